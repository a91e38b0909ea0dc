use std::fmt::Write as _;

use crate::routing::Protocol;

use super::sim::RunRecord;

/// `t` lies inside a message's lifetime under `ttl`; same test as expiry.
fn alive(created: f64, ttl: f64, t: f64) -> bool {
    !(t - created > ttl)
}

/// Metrics of one run at one TTL.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub protocol: Protocol,
    pub ttl: f64,
    pub run: usize,
    pub created: usize,
    pub delivered: usize,
    pub pdr: f64,
    /// Mean delay over delivered messages; absent without deliveries.
    pub mdd: Option<f64>,
    /// Mean number of distinct nodes that ever held a copy.
    pub cost: f64,
}

/// Evaluates a run recorded at a larger TTL as if messages lived only `ttl`.
/// Forwarding decisions never read the TTL, so the prefix of each message's
/// history inside the shorter lifetime is exactly what a run at `ttl` would
/// produce.
pub fn compute_metrics(record: &RunRecord, ttl: f64) -> MetricsRow {
    let created = record.outcomes.len();
    let mut delivered = 0;
    let mut delay_sum = 0.0;
    let mut infected = 0usize;
    for o in &record.outcomes {
        if let Some(t) = o.delivered_at.filter(|&t| alive(o.created, ttl, t)) {
            delivered += 1;
            delay_sum += t - o.created;
        }
        infected += o.infections.iter().filter(|&&(_, t)| alive(o.created, ttl, t)).count();
    }
    let per = |x: f64| if created == 0 { 0.0 } else { x / created as f64 };
    MetricsRow {
        protocol: record.protocol,
        ttl,
        run: record.run,
        created,
        delivered,
        pdr: per(delivered as f64),
        mdd: (delivered > 0).then(|| delay_sum / delivered as f64),
        cost: per(infected as f64),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub created: usize,
    pub delivered: usize,
    /// Undelivered and past their lifetime when the trace ends.
    pub expired: usize,
    pub in_flight: usize,
}

pub fn outcome_counts(record: &RunRecord, ttl: f64) -> OutcomeCounts {
    let mut c = OutcomeCounts { created: record.outcomes.len(), delivered: 0, expired: 0, in_flight: 0 };
    for o in &record.outcomes {
        if o.delivered_at.is_some_and(|t| alive(o.created, ttl, t)) {
            c.delivered += 1;
        } else if alive(o.created, ttl, record.end_time) {
            c.in_flight += 1;
        } else {
            c.expired += 1;
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; zero for a single value.
    pub sd: f64,
    pub count: usize,
}

/// Mean and sample standard deviation, independent of input order.
pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = if v.len() < 2 { 0.0 } else { (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() };
    Some(Summary { mean, sd, count: v.len() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub protocol: Protocol,
    pub ttl: f64,
    pub runs: usize,
    pub pdr: Summary,
    /// Over runs with at least one delivery.
    pub mdd: Option<Summary>,
    pub cost: Summary,
}

/// Groups rows by (protocol, ttl) in order of first appearance.
pub fn aggregate_runs(rows: &[MetricsRow]) -> Vec<AggregateRow> {
    let mut keys: Vec<(Protocol, f64)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(p, t)| p == r.protocol && t.to_bits() == r.ttl.to_bits()) {
            keys.push((r.protocol, r.ttl));
        }
    }
    keys.into_iter()
        .filter_map(|(p, ttl)| {
            let group: Vec<&MetricsRow> = rows.iter().filter(|r| r.protocol == p && r.ttl.to_bits() == ttl.to_bits()).collect();
            let pick = |f: fn(&MetricsRow) -> f64| group.iter().map(|r| f(r)).collect::<Vec<_>>();
            let mdd: Vec<f64> = group.iter().filter_map(|r| r.mdd).collect();
            Some(AggregateRow {
                protocol: p,
                ttl,
                runs: group.len(),
                pdr: summarize(&pick(|r| r.pdr))?,
                mdd: summarize(&mdd),
                cost: summarize(&pick(|r| r.cost))?,
            })
        })
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from("protocol,ttl,run,pdr,mdd,cost\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{}", r.protocol, r.ttl, r.run, r.pdr, opt(r.mdd), r.cost);
    }
    out
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("protocol,ttl,pdr_mean,pdr_sd,mdd_mean,mdd_sd,cost_mean,cost_sd\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.protocol,
            r.ttl,
            r.pdr.mean,
            r.pdr.sd,
            opt(r.mdd.map(|s| s.mean)),
            opt(r.mdd.map(|s| s.sd)),
            r.cost.mean,
            r.cost.sd
        );
    }
    out
}
