use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::{ContactEvent, ContactTrace, NodeId, TraceError};

/// Parameters of a synthetic trace with planted communities.
///
/// Nodes `0..sizes[0]` form community 0, the next `sizes[1]` community 1 and
/// so on; the `n_noise` noise nodes come last. Bridge `b` is the member at
/// offset `size - 1 - b / k` of community `b % k` and additionally behaves as
/// a member of community `(b + 1) % k`.
///
/// Rates are contacts per hour, times are seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedTraceSpec {
    pub n: usize,
    pub k_true: usize,
    pub community_sizes: Vec<usize>,
    pub n_noise: usize,
    pub n_bridge: usize,
    pub intra_rate: f64,
    pub inter_rate: f64,
    pub noise_rate: f64,
    pub mean_duration: f64,
    pub duration: f64,
    pub seed: u64,
}

impl Default for PlantedTraceSpec {
    /// Three communities of unequal size, two isolated noise nodes and two
    /// bridges over one day.
    fn default() -> Self {
        PlantedTraceSpec {
            n: 30,
            k_true: 3,
            community_sizes: vec![12, 9, 7],
            n_noise: 2,
            n_bridge: 2,
            intra_rate: 20.0,
            inter_rate: 0.5,
            noise_rate: 0.0,
            mean_duration: 60.0,
            duration: 24.0 * 3600.0,
            seed: 1,
        }
    }
}

/// Planted role of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Strong { community: usize },
    Bridge { home: usize, other: usize },
    Noise,
}

impl NodeRole {
    pub fn communities(&self) -> Vec<usize> {
        match *self {
            NodeRole::Strong { community } => vec![community],
            NodeRole::Bridge { home, other } => vec![home, other],
            NodeRole::Noise => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedTrace {
    pub trace: ContactTrace,
    pub roles: Vec<NodeRole>,
}

impl PlantedTraceSpec {
    pub fn validate(&self) -> Result<(), TraceError> {
        let bad = |msg: String| Err(TraceError::InvalidSpec(msg));
        if self.k_true == 0 {
            return bad("k_true must be at least 1".into());
        }
        if self.community_sizes.len() != self.k_true {
            return bad(format!(
                "{} community sizes given for k_true = {}",
                self.community_sizes.len(),
                self.k_true
            ));
        }
        if self.community_sizes.contains(&0) {
            return bad("community sizes must be positive".into());
        }
        let members: usize = self.community_sizes.iter().sum();
        if members + self.n_noise != self.n {
            return bad(format!(
                "sizes sum to {members} plus {} noise nodes, but n = {}",
                self.n_noise, self.n
            ));
        }
        if self.n_bridge > 0 && self.k_true < 2 {
            return bad("bridges need at least two communities".into());
        }
        for b in 0..self.n_bridge {
            if b / self.k_true >= self.community_sizes[b % self.k_true] {
                return bad(format!("community {} is too small to host bridge {b}", b % self.k_true));
            }
        }
        let rates_ok = self.intra_rate > 0.0
            && self.intra_rate > self.inter_rate
            && self.inter_rate >= self.noise_rate
            && self.noise_rate >= 0.0
            && self.intra_rate.is_finite();
        if !rates_ok {
            return bad("rates must satisfy intra > inter >= noise >= 0".into());
        }
        if !(self.mean_duration > 0.0) || !(self.duration > 0.0) {
            return bad("mean_duration and duration must be positive".into());
        }
        Ok(())
    }

    pub fn roles(&self) -> Vec<NodeRole> {
        let mut roles = Vec::with_capacity(self.n);
        let mut starts = Vec::with_capacity(self.k_true);
        for (c, &size) in self.community_sizes.iter().enumerate() {
            starts.push(roles.len());
            roles.extend(std::iter::repeat_n(NodeRole::Strong { community: c }, size));
        }
        roles.extend(std::iter::repeat_n(NodeRole::Noise, self.n_noise));
        for b in 0..self.n_bridge {
            let home = b % self.k_true;
            let node = starts[home] + self.community_sizes[home] - 1 - b / self.k_true;
            roles[node] = NodeRole::Bridge { home, other: (home + 1) % self.k_true };
        }
        roles
    }

    fn pair_rate(&self, a: NodeRole, b: NodeRole) -> f64 {
        if a == NodeRole::Noise || b == NodeRole::Noise {
            return self.noise_rate;
        }
        let ca = a.communities();
        if b.communities().iter().any(|c| ca.contains(c)) {
            self.intra_rate
        } else {
            self.inter_rate
        }
    }
}

/// Generates a trace where every pair meets as an alternating renewal
/// process: exponential gaps at the pair's rate, exponential contact
/// durations with mean `mean_duration`. Pure function of the spec.
pub fn generate_planted_trace(spec: &PlantedTraceSpec) -> Result<PlantedTrace, TraceError> {
    spec.validate()?;
    let roles = spec.roles();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let length = Exp::new(1.0 / spec.mean_duration).expect("validated positive");
    let mut events = Vec::new();
    for a in 0..spec.n {
        for b in (a + 1)..spec.n {
            let rate = spec.pair_rate(roles[a], roles[b]);
            if rate <= 0.0 {
                continue;
            }
            let gap = Exp::new(rate / 3600.0).expect("positive rate");
            let mut t = gap.sample(&mut rng);
            while t < spec.duration {
                let off = (t + length.sample(&mut rng)).min(spec.duration);
                if off > t {
                    events.push(ContactEvent { node_a: a as NodeId, node_b: b as NodeId, on: t, off });
                }
                t = off + gap.sample(&mut rng);
            }
        }
    }
    Ok(PlantedTrace { trace: ContactTrace::from_events(spec.n, spec.duration, events), roles })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_roles() {
        let spec = PlantedTraceSpec::default();
        spec.validate().unwrap();
        let roles = spec.roles();
        assert_eq!(roles.len(), 30);
        assert_eq!(roles[11], NodeRole::Bridge { home: 0, other: 1 });
        assert_eq!(roles[20], NodeRole::Bridge { home: 1, other: 2 });
        assert_eq!(roles[28], NodeRole::Noise);
        assert_eq!(roles.iter().filter(|r| matches!(r, NodeRole::Strong { .. })).count(), 26);
    }

    #[test]
    fn single_community_degenerate_spec() {
        let spec = PlantedTraceSpec {
            n: 3,
            k_true: 1,
            community_sizes: vec![3],
            n_noise: 0,
            n_bridge: 0,
            intra_rate: 6.0,
            inter_rate: 0.0,
            noise_rate: 0.0,
            mean_duration: 60.0,
            duration: 7200.0,
            seed: 3,
        };
        let p = generate_planted_trace(&spec).unwrap();
        assert!(!p.trace.is_empty());
        assert!(p.trace.events().iter().all(|e| e.node_a < 3 && e.node_b < 3));
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = PlantedTraceSpec { duration: 4.0 * 3600.0, ..Default::default() };
        let a = generate_planted_trace(&spec).unwrap().trace.to_csv();
        let b = generate_planted_trace(&spec).unwrap().trace.to_csv();
        assert_eq!(a, b);
        let c = generate_planted_trace(&PlantedTraceSpec { seed: 2, ..spec }).unwrap().trace.to_csv();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_inconsistent_specs() {
        let base = PlantedTraceSpec::default();
        let cases = [
            PlantedTraceSpec { n: 31, ..base.clone() },
            PlantedTraceSpec { community_sizes: vec![12, 16], ..base.clone() },
            PlantedTraceSpec { inter_rate: 25.0, ..base.clone() },
            PlantedTraceSpec { noise_rate: 1.0, ..base.clone() },
            PlantedTraceSpec { k_true: 0, community_sizes: vec![], ..base.clone() },
            PlantedTraceSpec { mean_duration: 0.0, ..base.clone() },
        ];
        for spec in cases {
            assert!(matches!(generate_planted_trace(&spec), Err(TraceError::InvalidSpec(_))), "{spec:?}");
        }
    }

    #[test]
    fn intra_inter_count_ratio_matches_renewal_expectation() {
        let spec = PlantedTraceSpec {
            n: 30,
            k_true: 3,
            community_sizes: vec![10, 10, 10],
            n_noise: 0,
            n_bridge: 0,
            intra_rate: 6.0,
            inter_rate: 0.1,
            noise_rate: 0.0,
            mean_duration: 60.0,
            duration: 48.0 * 3600.0,
            seed: 11,
        };
        let p = generate_planted_trace(&spec).unwrap();
        let (mut intra, mut inter) = (0.0, 0.0);
        for e in p.trace.events() {
            if e.node_a / 10 == e.node_b / 10 {
                intra += 1.0;
            } else {
                inter += 1.0;
            }
        }
        // expected contacts per pair of an alternating renewal process:
        // duration / (mean gap + mean contact length)
        let per_pair = |rate: f64| spec.duration / (3600.0 / rate + spec.mean_duration);
        let expected = (135.0 * per_pair(6.0)) / (300.0 * per_pair(0.1));
        let observed = intra / inter;
        assert!((observed / expected - 1.0).abs() < 0.2, "observed {observed}, expected {expected}");
    }
}
