//! Batch experiment runner behind the `interchange` binary.
//!
//! Every subcommand reads its parameters from an optional `key = value` file
//! (`--config`) overridden by flags, writes CSV files with a `#` header that
//! echoes the resolved configuration, and a `manifest.json` listing them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{audit_subset_density, sample_graph, AuditMode, AuditReduction, RegularGraph, SamplerKind};
use crate::measure::{
    estimate_weighted_time_integral, log_partition_from, sample_replicas, weighted_mean_cycles_from, weighted_prob_from,
    ESTIMATE_CSV_HEADER,
};
use crate::oracle::{exact_table_csv, ExactChain, DEFAULT_STATE_GUARD};
use crate::permutation::DeltaKind;
use crate::process::{simulate_path, sweep, TrajectoryConfig};
use crate::replica::MonteCarlo;
use crate::rng;
use crate::theory::{
    critical_time, reports_csv, stirring_interval_bound, theorem1_pointwise_bound, theorem2_integral_bound,
};

/// Version string recorded in every output file.
pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

#[derive(Parser, Debug)]
#[command(name = "interchange", version, about = "Interchange process and θ-weighted cycle experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Sample random regular graphs.
    Generate(Params),
    /// Simulate one trajectory with snapshots and occupation times.
    Simulate(Params),
    /// Replica averages over a time grid.
    Sweep(Params),
    /// θ-weighted estimates by importance reweighting.
    Weighted(Params),
    /// Exact chain computations on small graphs.
    Oracle(Params),
    /// Subset-density audit.
    Audit(Params),
    /// Closed-form critical times and bounds.
    Bounds(Params),
}

/// Parameters shared by all subcommands. Flags override `--config` entries.
#[derive(Args, Debug, Clone, Default)]
pub struct Params {
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed (required).
    #[arg(long)]
    pub seed: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub threads: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// Graph file, or one of `complete:N`, `cycle:N`, `bipartite:K`.
    #[arg(long)]
    pub graph: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    /// Degree (a comma list for `bounds`).
    #[arg(long)]
    pub d: Option<String>,
    /// `auto`, `rejection` or `incremental`.
    #[arg(long)]
    pub sampler: Option<String>,
    #[arg(long)]
    pub graphs: Option<String>,
    #[arg(long)]
    pub theta: Option<String>,
    /// Comma list of cycle-size thresholds.
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    /// Start of the time grid.
    #[arg(long)]
    pub a: Option<String>,
    /// End of the time grid.
    #[arg(long)]
    pub b: Option<String>,
    /// Number of grid times.
    #[arg(long)]
    pub points: Option<String>,
    /// Quadrature points for weighted time integrals.
    #[arg(long)]
    pub grid_points: Option<String>,
    #[arg(long)]
    pub replicas: Option<String>,
    /// Audit mode: `exhaustive` or `stochastic`.
    #[arg(long)]
    pub mode: Option<String>,
    /// Audit budget: subsets (exhaustive) or seeds (stochastic).
    #[arg(long)]
    pub budget: Option<String>,
    /// Write every transition of `simulate` to `events.csv`.
    #[arg(long)]
    pub events: Option<String>,
}

const KEYS: &[&str] = &[
    "seed", "threads", "out", "graph", "n", "d", "sampler", "graphs", "theta", "eta", "epsilon", "s", "t", "a", "b",
    "points", "grid_points", "replicas", "mode", "budget", "events",
];

impl Params {
    fn overrides(&self) -> [(&'static str, &Option<String>); 21] {
        [
            ("seed", &self.seed),
            ("threads", &self.threads),
            ("out", &self.out),
            ("graph", &self.graph),
            ("n", &self.n),
            ("d", &self.d),
            ("sampler", &self.sampler),
            ("graphs", &self.graphs),
            ("theta", &self.theta),
            ("eta", &self.eta),
            ("epsilon", &self.epsilon),
            ("s", &self.s),
            ("t", &self.t),
            ("a", &self.a),
            ("b", &self.b),
            ("points", &self.points),
            ("grid_points", &self.grid_points),
            ("replicas", &self.replicas),
            ("mode", &self.mode),
            ("budget", &self.budget),
            ("events", &self.events),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Generate,
    Simulate,
    Sweep,
    Weighted,
    Oracle,
    Audit,
    Bounds,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Generate => "generate",
            CommandKind::Simulate => "simulate",
            CommandKind::Sweep => "sweep",
            CommandKind::Weighted => "weighted",
            CommandKind::Oracle => "oracle",
            CommandKind::Audit => "audit",
            CommandKind::Bounds => "bounds",
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected 'key = value', got '{line}'") })?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Parse { line: i + 1, msg: format!("unknown key '{key}'") });
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

/// Fully resolved, validated configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub seed: u64,
    pub threads: usize,
    pub out: PathBuf,
    pub graph: Option<String>,
    pub n: Option<usize>,
    pub d: Vec<usize>,
    pub sampler: SamplerKind,
    pub graphs: usize,
    pub theta: f64,
    pub etas: Vec<f64>,
    pub epsilon: f64,
    pub s: f64,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub points: usize,
    pub grid_points: usize,
    pub replicas: usize,
    pub mode: Option<AuditMode>,
    pub budget: Option<u64>,
    pub events: bool,
}

fn config_err(key: &str, value: &str, what: &str) -> Error {
    Error::Config(format!("{key} = '{value}': {what}"))
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| config_err(key, value, "malformed value"))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|x| parse_value(key, x.trim())).collect()
}

impl ExperimentConfig {
    /// Merges `file` entries with flag overrides and validates the result.
    pub fn resolve(command: CommandKind, file: BTreeMap<String, String>, params: &Params) -> Result<Self> {
        let mut map = file;
        for (k, v) in params.overrides() {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let num = |k: &str, default: f64| -> Result<f64> {
            let v = get(k).map_or(Ok(default), |v| parse_value::<f64>(k, v))?;
            if !v.is_finite() {
                return Err(config_err(k, &v.to_string(), "must be finite"));
            }
            Ok(v)
        };
        let count = |k: &str, default: usize| get(k).map_or(Ok(default), |v| parse_value::<usize>(k, v));

        let seed = get("seed")
            .ok_or_else(|| Error::Config("seed is required".into()))
            .and_then(|v| parse_value::<u64>("seed", v))?;
        let cfg = ExperimentConfig {
            command,
            seed,
            threads: count("threads", 0)?,
            out: PathBuf::from(get("out").unwrap_or(".")),
            graph: get("graph").map(str::to_string),
            n: get("n").map(|v| parse_value("n", v)).transpose()?,
            d: get("d").map(|v| parse_list("d", v)).transpose()?.unwrap_or_default(),
            sampler: get("sampler").map_or(Ok(SamplerKind::Auto), str::parse)?,
            graphs: count("graphs", 1)?,
            theta: num("theta", 1.0)?,
            etas: get("eta").map(|v| parse_list("eta", v)).transpose()?.unwrap_or_else(|| vec![0.01]),
            epsilon: num("epsilon", 0.5)?,
            s: num("s", 1.0)?,
            t: num("t", 1.0)?,
            a: num("a", 0.0)?,
            b: num("b", 1.0)?,
            points: count("points", 11)?,
            grid_points: count("grid_points", 64)?,
            replicas: count("replicas", 100)?,
            mode: get("mode")
                .map(|v| match v {
                    "exhaustive" => Ok(AuditMode::Exhaustive),
                    "stochastic" => Ok(AuditMode::Stochastic),
                    other => Err(config_err("mode", other, "expected exhaustive or stochastic")),
                })
                .transpose()?,
            budget: get("budget").map(|v| parse_value("budget", v)).transpose()?,
            events: get("events").map_or(Ok(false), |v| parse_value("events", v))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.etas.is_empty() || self.etas.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return bad(format!("eta values {:?} must lie in (0, 1]", self.etas));
        }
        if !(self.theta > 0.0) {
            return bad(format!("theta = {} must be positive", self.theta));
        }
        if !(self.a >= 0.0 && self.a <= self.b) {
            return bad(format!("need 0 ≤ a ≤ b, got a = {}, b = {}", self.a, self.b));
        }
        if self.points == 0 {
            return bad("points must be at least 1".into());
        }
        if self.graphs == 0 {
            return bad("graphs must be at least 1".into());
        }
        let needs_graph = !matches!(self.command, CommandKind::Bounds);
        if needs_graph && self.graph.is_none() && (self.n.is_none() || self.d.len() != 1) {
            return bad("give either graph, or n and a single d".into());
        }
        if matches!(self.command, CommandKind::Bounds) && self.d.is_empty() {
            return bad("bounds needs d (a comma list)".into());
        }
        if matches!(self.command, CommandKind::Sweep | CommandKind::Weighted) && self.replicas < 2 {
            return bad("replicas must be at least 2".into());
        }
        if matches!(self.command, CommandKind::Weighted) && !(self.a < self.b) {
            return bad("weighted needs a < b".into());
        }
        Ok(())
    }

    /// The time grid: `points` uniform times from `a` to `b` inclusive.
    pub fn times(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.b];
        }
        let last = (self.points - 1) as f64;
        (0..self.points).map(|k| self.a + (self.b - self.a) * k as f64 / last).collect()
    }

    /// The configuration as `key → value` text, defaults included.
    pub fn echo(&self) -> BTreeMap<&'static str, String> {
        let join = |xs: &[String]| xs.join(",");
        let mut m = BTreeMap::new();
        m.insert("seed", self.seed.to_string());
        m.insert("threads", self.threads.to_string());
        m.insert("out", self.out.display().to_string());
        if let Some(g) = &self.graph {
            m.insert("graph", g.clone());
        }
        if let Some(n) = self.n {
            m.insert("n", n.to_string());
        }
        if !self.d.is_empty() {
            m.insert("d", join(&self.d.iter().map(|d| d.to_string()).collect::<Vec<_>>()));
        }
        m.insert("sampler", self.sampler.as_str().to_string());
        m.insert("graphs", self.graphs.to_string());
        m.insert("theta", self.theta.to_string());
        m.insert("eta", join(&self.etas.iter().map(|e| e.to_string()).collect::<Vec<_>>()));
        m.insert("epsilon", self.epsilon.to_string());
        m.insert("s", self.s.to_string());
        m.insert("t", self.t.to_string());
        m.insert("a", self.a.to_string());
        m.insert("b", self.b.to_string());
        m.insert("points", self.points.to_string());
        m.insert("grid_points", self.grid_points.to_string());
        m.insert("replicas", self.replicas.to_string());
        if let Some(mode) = self.mode {
            m.insert("mode", mode_str(mode).to_string());
        }
        if let Some(b) = self.budget {
            m.insert("budget", b.to_string());
        }
        m.insert("events", self.events.to_string());
        m
    }

    fn mc(&self) -> MonteCarlo {
        MonteCarlo::new(self.replicas, self.seed)
    }
}

fn mode_str(mode: AuditMode) -> &'static str {
    match mode {
        AuditMode::Exhaustive => "exhaustive",
        AuditMode::Stochastic => "stochastic",
    }
}

fn reduction_str(r: AuditReduction) -> &'static str {
    match r {
        AuditReduction::DensestComponent => "densest_component",
        AuditReduction::UnionOfViolators => "union_of_violators",
        AuditReduction::GreedyLowerBound => "greedy_lower_bound",
    }
}

/// Files and warnings produced by a run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunSummary {
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config: BTreeMap<&'static str, String>,
    files: &'a [String],
    warnings: &'a [String],
}

struct Output<'a> {
    cfg: &'a ExperimentConfig,
    summary: RunSummary,
}

impl Output<'_> {
    fn header(&self) -> String {
        let mut h = format!("# interchange {VERSION}\n# command = {}\n", self.cfg.command.as_str());
        for (k, v) in self.cfg.echo() {
            let _ = writeln!(h, "# {k} = {v}");
        }
        h
    }

    fn write(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.cfg.out.join(name);
        fs::write(&path, format!("{}{body}", self.header()))?;
        self.summary.files.push(name.to_string());
        Ok(())
    }

    fn warn(&mut self, msg: String) {
        eprintln!("warning: {msg}");
        self.summary.warnings.push(msg);
    }

    fn finish(self) -> Result<RunSummary> {
        let manifest = Manifest {
            command: self.cfg.command.as_str(),
            version: VERSION,
            config: self.cfg.echo(),
            files: &self.summary.files,
            warnings: &self.summary.warnings,
        };
        let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Resource(e.to_string()))?;
        fs::write(self.cfg.out.join("manifest.json"), json + "\n")?;
        Ok(self.summary)
    }
}

/// Resolves the `graph` key, or samples graph `index` from `(n, d)`.
fn obtain_graph(cfg: &ExperimentConfig, index: u64) -> Result<(Arc<RegularGraph>, Option<u64>)> {
    if let Some(spec) = &cfg.graph {
        let family = |name: &str| spec.strip_prefix(name).map(|k| parse_value::<usize>("graph", k));
        let g = if let Some(k) = family("complete:") {
            RegularGraph::complete(k?)?
        } else if let Some(k) = family("cycle:") {
            RegularGraph::cycle(k?)?
        } else if let Some(k) = family("bipartite:") {
            RegularGraph::complete_bipartite(k?)?
        } else {
            let text = fs::read_to_string(spec)
                .map_err(|e| Error::Config(format!("cannot read graph file '{spec}': {e}")))?;
            RegularGraph::from_text(&text)?
        };
        return Ok((Arc::new(g), None));
    }
    let (n, d) = (cfg.n.expect("validated"), cfg.d[0]);
    let sample = sample_graph(n, d, cfg.sampler, &mut rng::graph(cfg.seed, index))?;
    Ok((Arc::new(sample.graph), Some(sample.attempts)))
}

/// Runs one configured experiment on the current rayon pool.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    fs::create_dir_all(&cfg.out)?;
    let mut out = Output { cfg, summary: RunSummary::default() };
    match cfg.command {
        CommandKind::Generate => generate(cfg, &mut out)?,
        CommandKind::Simulate => simulate(cfg, &mut out)?,
        CommandKind::Sweep => run_sweep(cfg, &mut out)?,
        CommandKind::Weighted => weighted(cfg, &mut out)?,
        CommandKind::Oracle => oracle(cfg, &mut out)?,
        CommandKind::Audit => audit(cfg, &mut out)?,
        CommandKind::Bounds => bounds(cfg, &mut out)?,
    }
    out.finish()
}

fn generate(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let mut table = String::from("graph,n,d,edges,sampler,attempts,file\n");
    for i in 0..cfg.graphs {
        let (g, attempts) = obtain_graph(cfg, i as u64)?;
        let file = if cfg.graphs == 1 { "graph.txt".to_string() } else { format!("graph_{i:03}.txt") };
        out.write(&file, &g.to_text())?;
        let sampler = if attempts.is_some() { cfg.sampler.resolve(g.d()).as_str() } else { "given" };
        let _ = writeln!(
            table,
            "{i},{},{},{},{sampler},{},{file}",
            g.n(),
            g.d(),
            g.num_edges(),
            attempts.map_or(String::new(), |a| a.to_string())
        );
    }
    out.write("generate.csv", &table)
}

fn simulate(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let (g, _) = obtain_graph(cfg, 0)?;
    let tc = TrajectoryConfig {
        t_end: cfg.b,
        snapshot_times: cfg.times(),
        seed: cfg.seed,
        record_events: cfg.events,
        occupation_from: cfg.a,
    };
    let rec = simulate_path(&g, &tc, &cfg.etas)?;
    out.write("trajectory.csv", &rec.snapshots_csv())?;
    out.write("occupation.csv", &rec.occupation_csv())?;
    if cfg.events {
        let mut body = String::from("t,x,y,kind,N_before,N_after,E_eq_delta\n");
        for e in &rec.events {
            let kind = match e.delta.kind {
                DeltaKind::Split => "split",
                DeltaKind::Merge => "merge",
            };
            let d = &e.delta;
            let (x, y) = d.edge;
            let _ = writeln!(body, "{},{x},{y},{kind},{},{},{}", e.t, d.n_before, d.n_after, d.same_cycle_delta);
        }
        out.write("events.csv", &body)?;
    }
    Ok(())
}

fn run_sweep(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let (g, _) = obtain_graph(cfg, 0)?;
    let res = sweep(&g, &cfg.times(), &cfg.etas, cfg.a, &cfg.mc())?;
    let mut body = String::from(
        "t,mean_N,se_N,mean_E_eq,se_E_eq,mean_max_cycle_frac,se_max_cycle_frac,mean_events,se_events",
    );
    for eta in &res.etas {
        let _ = write!(body, ",prob_eta_{eta},se_prob_eta_{eta}");
    }
    body.push('\n');
    for r in &res.rows {
        let _ = write!(
            body,
            "{},{},{},{},{},{},{},{},{}",
            r.t,
            r.mean_cycles.0,
            r.mean_cycles.1,
            r.mean_same_cycle_edges.0,
            r.mean_same_cycle_edges.1,
            r.mean_largest_fraction.0,
            r.mean_largest_fraction.1,
            r.mean_events.0,
            r.mean_events.1
        );
        for p in &r.prob_macroscopic {
            let _ = write!(body, ",{},{}", p.0, p.1);
        }
        body.push('\n');
    }
    out.write("sweep.csv", &body)?;
    let mut occ = String::from("eta,a,b,occupation_time,std_error,replicas\n");
    for (eta, o) in res.etas.iter().zip(&res.occupation) {
        let _ = writeln!(occ, "{eta},{},{},{},{},{}", res.window.0, res.window.1, o.0, o.1, res.replicas);
    }
    out.write("sweep_occupation.csv", &occ)
}

fn weighted(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let (g, _) = obtain_graph(cfg, 0)?;
    let mc = cfg.mc();
    let theta = cfg.theta;
    let mut body = format!("{ESTIMATE_CSV_HEADER}\n");
    let mut low = Vec::new();
    let mut row = |quantity: &str, e: &crate::measure::WeightedEstimate, t: f64, body: &mut String| {
        let _ = writeln!(
            body,
            "{theta},{t},{quantity},{},{},{},{},{}",
            e.value, e.std_error, e.ess, e.replicas, cfg.seed
        );
        if e.low_ess {
            low.push(format!("low effective sample size {} for {quantity} at t = {t}", e.ess));
        }
    };
    for t in cfg.times() {
        let samples = sample_replicas(&g, t, &mc)?;
        row("log_Z", &log_partition_from(&samples, theta, t)?, t, &mut body);
        row("mean_N", &weighted_mean_cycles_from(&samples, theta, t)?, t, &mut body);
        for &eta in &cfg.etas {
            row(&format!("prob_eta_{eta}"), &weighted_prob_from(&samples, g.n(), theta, t, eta)?, t, &mut body);
        }
    }
    for &eta in &cfg.etas {
        let e = estimate_weighted_time_integral(&g, theta, cfg.a, cfg.b, eta, cfg.grid_points, &mc)?;
        row(&format!("integral_eta_{eta}"), &e.estimate, cfg.b, &mut body);
        if let Some(coarse) = e.coarse_value {
            let half = crate::measure::WeightedEstimate { value: coarse, ..e.estimate };
            row(&format!("integral_half_grid_eta_{eta}"), &half, cfg.b, &mut body);
        }
    }
    for w in low {
        out.warn(w);
    }
    out.write("weighted.csv", &body)
}

fn oracle(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let (g, _) = obtain_graph(cfg, 0)?;
    let chain = ExactChain::build(&g, DEFAULT_STATE_GUARD)?;
    chain.verify_transitions(&g).map_err(Error::Resource)?;
    let times = cfg.times();
    let mut body = String::new();
    for (i, &eta) in cfg.etas.iter().enumerate() {
        let csv = exact_table_csv(cfg.theta, eta, &chain.table(cfg.theta, eta, &times)?);
        body.push_str(if i == 0 { &csv } else { csv.split_once('\n').map_or("", |x| x.1) });
    }
    out.write("oracle.csv", &body)?;
    let mut reports = Vec::new();
    if times.len() >= 3 {
        reports.push(chain.check_log_convexity(cfg.theta, &times)?);
    }
    for &t in &times {
        reports.extend(chain.derivative_identities(cfg.theta, t)?);
    }
    for r in reports.iter().filter(|r| !r.verdict) {
        out.warn(format!("check {} failed with margin {}", r.name, r.margin));
    }
    out.write("oracle_checks.csv", &reports_csv(&reports))
}

fn audit(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let mut body = String::from(
        "graph,n,d,mode,reduction,eta,epsilon,max_size,worst_size,worst_margin,violated,explored\n",
    );
    for i in 0..cfg.graphs {
        let (g, _) = obtain_graph(cfg, i as u64)?;
        let mode = cfg.mode.unwrap_or(if g.n() <= 64 { AuditMode::Exhaustive } else { AuditMode::Stochastic });
        let budget = cfg.budget.unwrap_or(match mode {
            AuditMode::Exhaustive => 50_000_000,
            AuditMode::Stochastic => 64,
        });
        for &eta in &cfg.etas {
            let rep = audit_subset_density(&g, eta, cfg.epsilon, mode, budget, &mut rng::replica(cfg.seed, i as u64))?;
            let _ = writeln!(
                body,
                "{i},{},{},{},{},{eta},{},{},{},{},{},{}",
                g.n(),
                g.d(),
                mode_str(mode),
                reduction_str(rep.reduction),
                cfg.epsilon,
                rep.max_size,
                rep.worst_subset.len(),
                rep.worst_margin,
                rep.violated,
                rep.explored
            );
        }
    }
    out.write("audit.csv", &body)
}

fn bounds(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let cell = |r: Result<f64>| r.map_or(String::new(), |v| v.to_string());
    let theta_int = (cfg.theta.fract() == 0.0 && cfg.theta >= 2.0 && cfg.theta <= u32::MAX as f64)
        .then_some(cfg.theta as u32);
    let mut body = String::from("theta,d,epsilon,s,t,a,b,critical_time,stirring_bound,theorem1_bound,theorem2_bound\n");
    for &d in &cfg.d {
        let d = d as f64;
        let _ = writeln!(
            body,
            "{},{d},{},{},{},{},{},{},{},{},{}",
            cfg.theta,
            cfg.epsilon,
            cfg.s,
            cfg.t,
            cfg.a,
            cfg.b,
            cell(critical_time(cfg.theta, d)),
            cell(stirring_interval_bound(d, cfg.epsilon, cfg.s)),
            cell(theta_int.map_or(Err(Error::Precondition(String::new())), |th| {
                theorem1_pointwise_bound(th, d, cfg.epsilon, cfg.t)
            })),
            cell(theorem2_integral_bound(cfg.theta, d, cfg.epsilon, cfg.a, cfg.b)),
        );
    }
    out.write("bounds.csv", &body)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(summary) => {
            for f in &summary.files {
                println!("{f}");
            }
            0
        }
        Err(e) => {
            let category = e.category();
            eprintln!("error[{}]: {e}", category.as_str());
            category.exit_code()
        }
    }
}

/// Resolves the configuration of a parsed command line and runs it.
pub fn execute(cli: Cli) -> Result<RunSummary> {
    let (kind, params) = match cli.command {
        CliCommand::Generate(p) => (CommandKind::Generate, p),
        CliCommand::Simulate(p) => (CommandKind::Simulate, p),
        CliCommand::Sweep(p) => (CommandKind::Sweep, p),
        CliCommand::Weighted(p) => (CommandKind::Weighted, p),
        CliCommand::Oracle(p) => (CommandKind::Oracle, p),
        CliCommand::Audit(p) => (CommandKind::Audit, p),
        CliCommand::Bounds(p) => (CommandKind::Bounds, p),
    };
    let file = match &params.config {
        Some(path) => parse_config_text(&read_config(path)?)?,
        None => BTreeMap::new(),
    };
    let cfg = ExperimentConfig::resolve(kind, file, &params)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    pool.install(|| run(&cfg))
}

fn read_config(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read config '{}': {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(seed: Option<&str>) -> Params {
        Params { seed: seed.map(str::to_string), ..Default::default() }
    }

    #[test]
    fn config_text_parsing() {
        let m = parse_config_text("# comment\nn = 10\n\ngrid-points=5\n").unwrap();
        assert_eq!(m.get("n").unwrap(), "10");
        assert_eq!(m.get("grid_points").unwrap(), "5");
        assert!(matches!(parse_config_text("bogus = 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config_text("n 10"), Err(Error::Parse { .. })));
    }

    #[test]
    fn flags_override_file_and_seed_is_required() {
        let file = parse_config_text("seed = 1\ntheta = 2\nd = 5,6\n").unwrap();
        let mut p = params(Some("9"));
        p.theta = Some("3".into());
        let cfg = ExperimentConfig::resolve(CommandKind::Bounds, file, &p).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.theta, 3.0);
        assert_eq!(cfg.d, vec![5, 6]);
        let err = ExperimentConfig::resolve(CommandKind::Bounds, BTreeMap::new(), &params(None)).unwrap_err();
        assert_eq!(err.category().exit_code(), 2);
    }

    #[test]
    fn validation_errors_are_config() {
        let mut p = params(Some("1"));
        p.graph = Some("complete:4".into());
        p.eta = Some("1.5".into());
        let err = ExperimentConfig::resolve(CommandKind::Oracle, BTreeMap::new(), &p).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        p.eta = Some("x".into());
        assert!(ExperimentConfig::resolve(CommandKind::Oracle, BTreeMap::new(), &p).is_err());
        let p = params(Some("1"));
        assert!(ExperimentConfig::resolve(CommandKind::Sweep, BTreeMap::new(), &p).is_err());
    }

    #[test]
    fn time_grid() {
        let mut p = params(Some("1"));
        p.graph = Some("complete:2".into());
        p.points = Some("5".into());
        p.b = Some("2".into());
        let cfg = ExperimentConfig::resolve(CommandKind::Oracle, BTreeMap::new(), &p).unwrap();
        assert_eq!(cfg.times(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
