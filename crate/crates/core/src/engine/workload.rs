use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::routing::Message;

use super::EngineError;

/// Share of the trace in which messages may be created.
pub const CREATION_WINDOW: f64 = 0.8;

/// Uniform `src ≠ dst` pairs created uniformly over the first 80% of the
/// trace, sorted by creation time. `stream` separates runs sharing a seed.
pub fn generate_workload(
    n: usize,
    duration: f64,
    n_messages: usize,
    ttl: f64,
    seed: u64,
    stream: u64,
) -> Result<Vec<Message>, EngineError> {
    if n < 2 {
        return Err(EngineError::TooFewNodes(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let horizon = CREATION_WINDOW * duration.max(0.0);
    let mut raw: Vec<(f64, usize, usize)> = (0..n_messages)
        .map(|_| {
            let src = rng.random_range(0..n);
            let mut dst = rng.random_range(0..n - 1);
            if dst >= src {
                dst += 1;
            }
            let created = if horizon > 0.0 { rng.random_range(0.0..horizon) } else { 0.0 };
            (created, src, dst)
        })
        .collect();
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(id, (created, src, dst))| Message { id, src, dst, created, ttl, size: 1 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_nodes_only_pair() {
        let w = generate_workload(2, 100.0, 50, 10.0, 1, 0).unwrap();
        assert!(w.iter().all(|m| (m.src, m.dst) == (0, 1) || (m.src, m.dst) == (1, 0)));
        assert!(w.iter().all(|m| m.created >= 0.0 && m.created < 80.0));
    }

    #[test]
    fn deterministic_per_seed_and_stream() {
        let a = generate_workload(10, 1000.0, 100, 10.0, 7, 3).unwrap();
        assert_eq!(a, generate_workload(10, 1000.0, 100, 10.0, 7, 3).unwrap());
        assert_ne!(a, generate_workload(10, 1000.0, 100, 10.0, 7, 4).unwrap());
        assert!(a.windows(2).all(|w| w[0].created <= w[1].created));
    }

    #[test]
    fn rejects_single_node() {
        assert_eq!(generate_workload(1, 10.0, 1, 1.0, 0, 0), Err(EngineError::TooFewNodes(1)));
    }

    #[test]
    fn sources_are_uniform() {
        let n = 20;
        let draws = 10_000;
        let w = generate_workload(n, 1000.0, draws, 10.0, 11, 0).unwrap();
        let mut counts = vec![0usize; n];
        for m in &w {
            assert_ne!(m.src, m.dst);
            counts[m.src] += 1;
        }
        let expected = draws as f64 / n as f64;
        let sigma = (draws as f64 * (1.0 / n as f64) * (1.0 - 1.0 / n as f64)).sqrt();
        for c in counts {
            assert!((c as f64 - expected).abs() <= 3.0 * sigma, "{c} vs {expected}±{sigma}");
        }
    }
}
