//! Command-line front end.
//!
//! [`run`] executes a parsed command and returns what it would print, so the
//! binary stays a thin wrapper. Every output is computed in memory first and
//! written only after all of it succeeded; existing files are replaced only
//! with `--force`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::community::{detect_communities, CommunityAssignment, CommunityError};
use crate::config::{planted_spec_from_text, set_planted, ConfigError, RunConfig};
use crate::decayed_graph::aggregate_matrix;
use crate::engine::{
    aggregate_csv, community_timeline, log_to_csv, metrics_csv, summarize_timeline, timeline_csv, EngineError, Simulator,
};
use crate::trace::{extract_contacts, generate_planted_trace, parse_contact_trace, parse_positions, NodeRole, TraceError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Trace { path: PathBuf, source: TraceError },
    #[error(transparent)]
    Generate(TraceError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Community(#[from] CommunityError),
    #[error("{} already exists; pass --force to overwrite", .0.display())]
    Exists(PathBuf),
    #[error("{}: {reason}", path.display())]
    BadTable { path: PathBuf, reason: String },
}

#[derive(Debug, Parser)]
#[command(name = "ofpc", version, about = "Opportunistic forwarding with partial centrality: traces, communities, simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive contacts from a `node,t,x,y` position log.
    Extract {
        positions: PathBuf,
        /// Transmission range, meters.
        #[arg(long, default_value_t = 250.0)]
        range: f64,
        /// Contact file to write.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Detect communities on a contact trace and track them over epochs.
    Communities {
        contacts: PathBuf,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Run every listed protocol over `runs` workloads.
    Simulate {
        /// `key = value` config file; flags override it.
        config: Option<PathBuf>,
        /// Contact trace; overrides `trace` from the config.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Also write the decision log of run 0 of every protocol.
        #[arg(long)]
        log: Option<PathBuf>,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Join aggregated metric tables into one wide table keyed by TTL.
    Compare {
        #[arg(required = true)]
        tables: Vec<PathBuf>,
        /// File to write; printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Generate a trace with planted communities.
    Generate {
        /// `key = value` planted-trace spec; defaults when omitted.
        spec: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Contact file to write.
        #[arg(long)]
        out: PathBuf,
        /// Also write planted roles as `node,role,communities`.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
}

/// Flags shared by `communities` and `simulate`; each maps to a config key.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Decay rate per hour.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Cumulative energy ratio for choosing k.
    #[arg(long = "R")]
    pub ratio: Option<f64>,
    /// Overlap half-width in radians.
    #[arg(long)]
    pub phi: Option<f64>,
    /// Epoch length, seconds.
    #[arg(long)]
    pub epoch: Option<f64>,
    /// TTL list, seconds, comma-separated.
    #[arg(long)]
    pub ttl: Option<String>,
    #[arg(long)]
    pub messages: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Protocol list, comma-separated.
    #[arg(long)]
    pub protocols: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

impl Overrides {
    fn apply(&self, c: &mut RunConfig) -> Result<(), ConfigError> {
        let pairs: [(&str, Option<String>); 10] = [
            ("beta", self.beta.map(|v| v.to_string())),
            ("R", self.ratio.map(|v| v.to_string())),
            ("phi", self.phi.map(|v| v.to_string())),
            ("epoch", self.epoch.map(|v| v.to_string())),
            ("ttl", self.ttl.clone()),
            ("messages", self.messages.map(|v| v.to_string())),
            ("runs", self.runs.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("protocols", self.protocols.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                c.set(k, &v)?;
            }
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_trace(path: &Path) -> Result<crate::trace::ContactTrace, CliError> {
    parse_contact_trace(&read(path)?).map_err(|source| CliError::Trace { path: path.to_path_buf(), source })
}

/// Checks every target before writing any, then writes them in order.
fn write_all(files: &[(PathBuf, String)], force: bool) -> Result<(), CliError> {
    if !force {
        if let Some((p, _)) = files.iter().find(|(p, _)| p.exists()) {
            return Err(CliError::Exists(p.clone()));
        }
    }
    for (path, body) in files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
        }
        fs::write(path, body).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    Ok(())
}

fn out_dir(c: &RunConfig) -> PathBuf {
    c.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// Runs one command; the returned text goes to stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Extract { positions, range, out, force } => {
            let samples = parse_positions(&read(&positions)?).map_err(|source| CliError::Trace { path: positions.clone(), source })?;
            let trace = extract_contacts(&samples, range).map_err(|source| CliError::Trace { path: positions, source })?;
            write_all(&[(out.clone(), trace.to_csv())], force)?;
            Ok(format!("{} contacts among {} nodes written to {}\n", trace.events().len(), trace.n(), out.display()))
        }
        Command::Communities { contacts, opts } => {
            let mut c = RunConfig::default();
            opts.apply(&mut c)?;
            let c = c.finish()?;
            let trace = load_trace(&contacts)?;
            let p = &c.sim.community;
            let w = aggregate_matrix(&trace, trace.duration(), c.sim.decay.beta);
            let assignment = if trace.n() < 2 {
                CommunityAssignment::all_noise(trace.n(), p.phi)
            } else {
                match detect_communities(&w, p) {
                    Ok(a) => a.assignment,
                    Err(CommunityError::NoStructure) => CommunityAssignment::all_noise(trace.n(), p.phi),
                    Err(e) => return Err(e.into()),
                }
            };
            let rows = community_timeline(&trace, c.sim.decay, p, c.sim.epoch_for(&trace));
            let dir = out_dir(&c);
            write_all(&[(dir.join("assignment.csv"), assignment.to_csv()), (dir.join("timeline.csv"), timeline_csv(&rows))], opts.force)?;

            let s = assignment.stats();
            let mut text = String::new();
            let _ = writeln!(text, "k = {}", s.k);
            let _ = writeln!(text, "noise {:.2}%  bridging {:.2}%  strong {:.2}%", s.noise_pct, s.bridging_pct, s.strong_pct);
            if let Some(t) = summarize_timeline(&rows, 0) {
                let _ = writeln!(text, "epochs {}  max {}  min {}  mean {:.4}  variance {:.4}", rows.len(), t.max, t.min, t.mean, t.variance);
            }
            Ok(text)
        }
        Command::Simulate { config, trace, log, opts } => {
            let mut c = match &config {
                Some(path) => RunConfig::from_text(&read(path)?)?,
                None => RunConfig::default(),
            };
            opts.apply(&mut c)?;
            if let Some(t) = trace {
                c.trace = Some(t);
            }
            let c = c.finish()?;
            let path = c.trace.clone().ok_or(ConfigError::Missing("trace"))?;
            let trace = load_trace(&path)?;
            let sim = Simulator::new(&trace, c.sim.clone())?;
            let report = sim.report()?;
            let dir = out_dir(&c);
            let mut files = vec![
                (dir.join("metrics_raw.csv"), metrics_csv(&report.raw)),
                (dir.join("metrics_summary.csv"), aggregate_csv(&report.aggregate)),
            ];
            if let Some(path) = log {
                let workload = sim.workload(0)?;
                let mut entries = Vec::new();
                for &p in &c.sim.protocols {
                    entries.extend(sim.run(p, &workload, 0, true)?.log);
                }
                files.push((path, log_to_csv(&entries)));
            }
            write_all(&files, opts.force)?;
            let mut text = String::new();
            for r in &report.aggregate {
                let mdd = r.mdd.map_or("-".to_string(), |s| format!("{:.1}", s.mean));
                let _ = writeln!(text, "{:<9} ttl {:>8}  pdr {:.4}  mdd {:>9}  cost {:.3}", r.protocol, r.ttl, r.pdr.mean, mdd, r.cost.mean);
            }
            Ok(text)
        }
        Command::Compare { tables, out, force } => {
            let table = compare_tables(&tables)?;
            match out {
                Some(path) => {
                    write_all(&[(path.clone(), table)], force)?;
                    Ok(format!("comparison written to {}\n", path.display()))
                }
                None => Ok(table),
            }
        }
        Command::Generate { spec, seed, out, labels, force } => {
            let mut s = match &spec {
                Some(path) => planted_spec_from_text(&read(path)?)?,
                None => Default::default(),
            };
            if let Some(seed) = seed {
                set_planted(&mut s, "seed", &seed.to_string())?;
            }
            let planted = generate_planted_trace(&s).map_err(CliError::Generate)?;
            let mut files = vec![(out.clone(), planted.trace.to_csv())];
            if let Some(path) = labels {
                files.push((path, roles_csv(&planted.roles)));
            }
            write_all(&files, force)?;
            Ok(format!("{} contacts among {} nodes written to {}\n", planted.trace.events().len(), planted.trace.n(), out.display()))
        }
    }
}

fn roles_csv(roles: &[NodeRole]) -> String {
    let mut out = String::from("node,role,communities\n");
    for (u, r) in roles.iter().enumerate() {
        let name = match r {
            NodeRole::Strong { .. } => "strong",
            NodeRole::Bridge { .. } => "bridge",
            NodeRole::Noise => "noise",
        };
        let labels: Vec<String> = r.communities().iter().map(|c| (c + 1).to_string()).collect();
        let _ = writeln!(out, "{u},{name},{}", labels.join("|"));
    }
    out
}

const AGGREGATE_HEADER: &str = "protocol,ttl,pdr_mean,pdr_sd,mdd_mean,mdd_sd,cost_mean,cost_sd";

/// Wide table: one row per TTL, `pdr`, `mdd` and `cost` means per protocol
/// in order of first appearance.
pub fn compare_tables(paths: &[PathBuf]) -> Result<String, CliError> {
    let mut protocols: Vec<String> = Vec::new();
    let mut cells: BTreeMap<(u64, String), [String; 3]> = BTreeMap::new();
    let mut ttls: BTreeMap<u64, String> = BTreeMap::new();
    for path in paths {
        let text = read(path)?;
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(AGGREGATE_HEADER) {
            return Err(CliError::BadTable { path: path.clone(), reason: format!("expected header '{AGGREGATE_HEADER}'") });
        }
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = |reason: String| CliError::BadTable { path: path.clone(), reason: format!("line {}: {reason}", i + 2) };
            if f.len() != 8 {
                return Err(bad(format!("expected 8 fields, found {}", f.len())));
            }
            let ttl: f64 = f[1].parse().map_err(|_| bad(format!("invalid ttl {:?}", f[1])))?;
            let key = ttl.to_bits();
            ttls.insert(key, f[1].to_string());
            if !protocols.iter().any(|p| p == f[0]) {
                protocols.push(f[0].to_string());
            }
            cells.insert((key, f[0].to_string()), [f[2].to_string(), f[4].to_string(), f[6].to_string()]);
        }
    }
    let mut order: Vec<(f64, u64)> = ttls.keys().map(|&k| (f64::from_bits(k), k)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut out = String::from("ttl");
    for p in &protocols {
        let _ = write!(out, ",{p}_pdr,{p}_mdd,{p}_cost");
    }
    out.push('\n');
    for (_, key) in order {
        out.push_str(&ttls[&key]);
        for p in &protocols {
            match cells.get(&(key, p.clone())) {
                Some([a, b, c]) => {
                    let _ = write!(out, ",{a},{b},{c}");
                }
                None => out.push_str(",,,"),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("ofpc").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn range_defaults_to_250() {
        match parse(&["extract", "pos.csv", "--out", "c.csv"]).command {
            Command::Extract { range, .. } => assert_eq!(range, 250.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flags_override_config() {
        let cli = parse(&["simulate", "run.cfg", "--runs", "3", "--R", "0.9", "--ttl", "60,120", "--phi", "0.05"]);
        let Command::Simulate { opts, .. } = cli.command else { panic!() };
        let mut c = RunConfig::from_text("runs = 7\nmessages = 5").unwrap();
        opts.apply(&mut c).unwrap();
        assert_eq!((c.sim.runs, c.sim.n_messages, c.sim.community.ratio, c.sim.community.phi), (3, 5, 0.9, 0.05));
        assert_eq!(c.sim.ttl_list, vec![60.0, 120.0]);
    }

    #[test]
    fn compare_joins_by_ttl() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        fs::write(&a, format!("{AGGREGATE_HEADER}\nepidemic,600,1,0,10,0,5,0\nepidemic,60,0.5,0,20,0,3,0\n")).unwrap();
        fs::write(&b, format!("{AGGREGATE_HEADER}\ndirect,60,0.1,0,,,1,0\n")).unwrap();
        let t = compare_tables(&[a, b]).unwrap();
        assert_eq!(
            t,
            "ttl,epidemic_pdr,epidemic_mdd,epidemic_cost,direct_pdr,direct_mdd,direct_cost\n60,0.5,20,3,0.1,,1\n600,1,10,5,,,\n"
        );
    }

    #[test]
    fn compare_rejects_foreign_tables() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        fs::write(&a, "protocol,ttl,run,pdr,mdd,cost\n").unwrap();
        assert!(matches!(compare_tables(&[a]), Err(CliError::BadTable { .. })));
    }

    #[test]
    fn refuses_to_overwrite_without_force() {
        let dir = tempfile::tempdir().unwrap();
        let keep = dir.path().join("keep.csv");
        let fresh = dir.path().join("fresh.csv");
        fs::write(&keep, "old").unwrap();
        let files = [(fresh.clone(), "new".to_string()), (keep.clone(), "new".to_string())];
        assert!(matches!(write_all(&files, false), Err(CliError::Exists(_))));
        assert!(!fresh.exists());
        write_all(&files, true).unwrap();
        assert_eq!(fs::read_to_string(keep).unwrap(), "new");
    }
}
