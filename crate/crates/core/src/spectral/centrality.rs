use super::Matrix;

/// Number of one-hop neighbors of `u` in a binary adjacency matrix.
pub fn degree_centrality(adjacency: &Matrix, u: usize) -> usize {
    (0..adjacency.cols()).filter(|&v| v != u && adjacency[(u, v)] != 0.0).count()
}

/// Neighbors of `u` restricted to `members`.
pub fn partial_degree_centrality(adjacency: &Matrix, u: usize, members: &[usize]) -> usize {
    members.iter().filter(|&&v| v != u && adjacency[(u, v)] != 0.0).count()
}
