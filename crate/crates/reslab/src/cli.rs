//! Command-line front end: configuration, experiment runs and artifact
//! writing. Every artifact is a pure function of the resolved [`RunConfig`];
//! only `manifest.json` carries the wall time.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::charts::{cart_from_elements, CartState};
use crate::continuation::{displaced_state, newton_continue, ContinuedOrbit, PeriodicOrbitSeed, ShootingOptions};
use crate::elements::OrbitalElements;
use crate::error::{Error, Result};
use crate::families::{coupled_linearization, family_table, normal_frequencies, solve_equilibrium, FamilyLabel};
use crate::five_body::{verify_elliptic_2torus, FiveBodyConfig, TorusOptions};
use crate::frequency::{
    critical_arguments, diophantine_check, libration_frequencies, libration_report, DiophantineParams,
};
use crate::hamiltonian::{oracle_comparison, AVERAGE_NODES};
use crate::integrator::{conservation_report, integrate, Scheme, Trajectory};
use crate::laplace::{coeff_a, coeff_b, laplace_b, resonant_alpha};
use crate::mass::{MassConfig, ModelKind};

/// Integrator steps per reference period and per averaging block.
pub const STEPS_PER_PERIOD: usize = 128;
/// Default horizons, in reference periods.
pub const INTEGRATE_PERIODS: usize = 10_000;
pub const FREQ_PERIODS: usize = 50_000;
/// Displacement from the continued orbit used by `integrate` and `freq`.
pub const DEFAULT_DBAR: f64 = 1e-3;
pub const DEFAULT_KMAX: u32 = 20;
/// Eccentricity grid of the `resavg` comparison.
pub const RESAVG_GRID: [f64; 3] = [0.02, 0.01, 0.005];

/// Reference values shown by `report`.
pub const TARGET_2A: f64 = 2.3810;
pub const TARGET_2B_FIXED: f64 = 3.3764;
pub const TARGET_2B_FULL: f64 = 0.8566;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Laplace coefficients and the resonant coefficients A, B.
    Laplace,
    /// Closed-form normal form against the numeric average.
    Resavg,
    /// Stability table of the sixteen collinear families.
    Families,
    /// Newton continuation of one family to a periodic orbit.
    Continue,
    /// Long integration near a continued orbit with libration diagnostics.
    Integrate,
    /// Libration frequencies, predictions and Diophantine margin.
    Freq,
    /// Four satellites: intermediate orbit and outer-body checks.
    Fivebody,
    /// Render a summary of an artifact directory.
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Laplace => "laplace",
            Command::Resavg => "resavg",
            Command::Families => "families",
            Command::Continue => "continue",
            Command::Integrate => "integrate",
            Command::Freq => "freq",
            Command::Fivebody => "fivebody",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Fixed,
    Full,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Fixed => ModelKind::FixedCenter,
            ModelArg::Full => ModelKind::FullProblem,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "reslab", version, about = "Laplace-resonance normal forms, periodic families and libration checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration; the bundled Galilean system when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Artifact directory.
    #[arg(long, global = true, default_value = "reslab-out")]
    pub out: PathBuf,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub e2: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelArg>,
    /// Family signs such as `--++`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub family: Option<String>,
    /// Integrator steps (shooting: steps per period).
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Integrator time step.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    /// Truncation of the Diophantine test.
    #[arg(long, global = true)]
    pub kmax: Option<u32>,
}

/// One body of the JSON system definition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyDef {
    pub a: f64,
    pub e: f64,
    pub l: f64,
    pub g: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDef {
    pub model: ModelKind,
    #[serde(default = "unit")]
    pub m0: f64,
    pub mbar: Vec<f64>,
    pub mu: f64,
    /// Optional initial elements; `integrate` starts from them when present.
    #[serde(default)]
    pub bodies: Vec<BodyDef>,
}

fn unit() -> f64 {
    1.0
}

impl SystemDef {
    pub fn galilean() -> Self {
        SystemDef { model: ModelKind::FixedCenter, m0: 1.0, mbar: vec![1.0; 4], mu: 1e-6, bodies: Vec::new() }
    }

    pub fn mass_config(&self) -> Result<MassConfig> {
        MassConfig::new(self.m0, self.mbar.clone(), self.mu, self.model)
    }

    fn inner(&self) -> Result<MassConfig> {
        if self.mbar.len() < 3 {
            return Err(Error::Config(format!("need at least three satellites, got {}", self.mbar.len())));
        }
        Ok(self.mass_config()?.inner())
    }
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub system: SystemDef,
    #[serde(default)]
    pub e2: Option<f64>,
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub kmax: Option<u32>,
    #[serde(default)]
    pub a4: Option<f64>,
    #[serde(default)]
    pub dbar: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::Config("configuration file is empty".into()));
        }
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid configuration: {e}")))
    }
}

/// Fully resolved run; reproduces every artifact byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub system: SystemDef,
    pub e2: f64,
    pub family: String,
    pub steps: Option<usize>,
    pub dt: Option<f64>,
    pub kmax: u32,
    pub a4: f64,
    pub dbar: f64,
    /// Reserved for randomized sampling; no current command draws from it.
    pub seed: u64,
    #[serde(skip)]
    pub output: PathBuf,
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                Some(ConfigFile::parse(&text)?)
            }
            None => None,
        };
        let mut system = file.as_ref().map(|f| f.system.clone()).unwrap_or_else(SystemDef::galilean);
        if let Some(mu) = cli.mu {
            system.mu = mu;
        }
        if let Some(m) = cli.model {
            system.model = m.into();
        }
        let pick = |c: Option<String>, f: Option<String>, d: &str| c.or(f).unwrap_or_else(|| d.to_string());
        let cfg = RunConfig {
            command: cli.command,
            e2: cli.e2.or(file.as_ref().and_then(|f| f.e2)).unwrap_or(0.01),
            family: pick(cli.family.clone(), file.as_ref().and_then(|f| f.family.clone()), "--++"),
            steps: cli.steps.or(file.as_ref().and_then(|f| f.steps)),
            dt: cli.dt.or(file.as_ref().and_then(|f| f.dt)),
            kmax: cli.kmax.or(file.as_ref().and_then(|f| f.kmax)).unwrap_or(DEFAULT_KMAX),
            a4: file.as_ref().and_then(|f| f.a4).or(system.bodies.get(3).map(|b| b.a)).unwrap_or(2.0),
            dbar: file.as_ref().and_then(|f| f.dbar).unwrap_or(DEFAULT_DBAR),
            seed: file.as_ref().and_then(|f| f.seed).unwrap_or(0),
            output: cli.out.clone(),
            system,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.command == Command::Report {
            return Ok(());
        }
        self.system.mass_config()?;
        self.label()?;
        if !(self.e2 > 0.0 && self.e2 < 1.0) {
            return Err(Error::Config(format!("e2 must lie in (0, 1), got {}", self.e2)));
        }
        if self.steps == Some(0) {
            return Err(Error::Config("steps must be positive".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        if self.kmax == 0 {
            return Err(Error::Config("kmax must be at least 1".into()));
        }
        Ok(())
    }

    pub fn label(&self) -> Result<FamilyLabel> {
        self.family.parse()
    }

    /// SHA-256 of the canonical JSON form.
    pub fn inputs_hash(&self) -> Result<String> {
        Ok(sha256_hex(serde_json::to_string(self)?.as_bytes()))
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: Command,
    pub version: String,
    pub inputs_hash: String,
    pub config: RunConfig,
    pub artifacts: Vec<ArtifactEntry>,
    /// Seconds; the only field that differs between identical runs.
    pub wall_time: f64,
}

pub const MANIFEST: &str = "manifest.json";

/// Artifacts of one run, in write order.
pub type Artifacts = Vec<(String, Vec<u8>)>;

/// Runs the configured command and writes its artifacts and manifest.
/// `report` reads an existing directory and only adds `report.md`.
pub fn run(cfg: &RunConfig) -> Result<Manifest> {
    if cfg.command == Command::Report {
        let text = report(&cfg.output)?;
        fs::write(cfg.output.join("report.md"), &text)?;
        print!("{text}");
        let path = cfg.output.join(MANIFEST);
        return Ok(serde_json::from_str(&fs::read_to_string(path)?)?);
    }
    let start = Instant::now();
    let artifacts = produce(cfg)?;
    fs::create_dir_all(&cfg.output)?;
    let mut entries = Vec::new();
    for (name, bytes) in &artifacts {
        fs::write(cfg.output.join(name), bytes)?;
        entries.push(ArtifactEntry { name: name.clone(), sha256: sha256_hex(bytes), bytes: bytes.len() });
    }
    let manifest = Manifest {
        command: cfg.command,
        version: env!("CARGO_PKG_VERSION").to_string(),
        inputs_hash: cfg.inputs_hash()?,
        config: cfg.clone(),
        artifacts: entries,
        wall_time: start.elapsed().as_secs_f64(),
    };
    fs::write(cfg.output.join(MANIFEST), pretty(&serde_json::to_value(&manifest)?)?)?;
    Ok(manifest)
}

/// Computes the artifacts of `cfg` without touching the file system.
pub fn produce(cfg: &RunConfig) -> Result<Artifacts> {
    match cfg.command {
        Command::Laplace => laplace_csv().map(|b| vec![("laplace.csv".into(), b)]),
        Command::Resavg => resavg_csv(cfg).map(|b| vec![("resavg.csv".into(), b)]),
        Command::Families => families_csv(cfg).map(|b| vec![("families.csv".into(), b)]),
        Command::Continue => {
            let orbit = continued(cfg)?;
            Ok(vec![("continue.json".into(), pretty(&orbit_json(cfg, &orbit))?)])
        }
        Command::Integrate => run_integrate(cfg),
        Command::Freq => run_freq(cfg),
        Command::Fivebody => run_fivebody(cfg),
        Command::Report => Err(Error::Config("report does not produce run artifacts".into())),
    }
}

fn pretty(v: &Value) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

fn laplace_csv() -> Result<Vec<u8>> {
    let alpha = resonant_alpha();
    let mut s = String::from("s,k,alpha,value\n");
    for sv in [0.5, 1.5] {
        for k in 0..=3 {
            writeln!(s, "{sv},{k},{alpha},{}", laplace_b(sv, k, alpha)?).ok();
        }
    }
    let a = coeff_a(alpha)?;
    let bf = coeff_b(alpha, ModelKind::FixedCenter)?;
    let bu = coeff_b(alpha, ModelKind::FullProblem)?;
    writeln!(s, "2A,,{alpha},{}", 2.0 * a).ok();
    writeln!(s, "2B_fixed,,{alpha},{}", 2.0 * bf).ok();
    writeln!(s, "2B_full,,{alpha},{}", 2.0 * bu).ok();
    writeln!(s, "B_diff,,{alpha},{}", bf - bu).ok();
    Ok(s.into_bytes())
}

fn resavg_csv(cfg: &RunConfig) -> Result<Vec<u8>> {
    let mc = cfg.system.inner()?;
    let mut s = String::from("e,closed_form,oracle,abs_err\n");
    for e in RESAVG_GRID {
        let r = oracle_comparison(&mc, e, AVERAGE_NODES)?;
        writeln!(s, "{},{},{},{}", r.e, r.closed_form, r.oracle, r.abs_err).ok();
    }
    Ok(s.into_bytes())
}

fn families_csv(cfg: &RunConfig) -> Result<Vec<u8>> {
    let mc = cfg.system.inner()?;
    let rows = family_table(&mc, cfg.e2, 1.0, mc.mu)?;
    let mut s = String::from("label,qbar_sign,hessian_det_sign,verdict,e1,e2,e3\n");
    for row in rows {
        let qs = sign_of(row.qbar);
        match (&row.equilibrium, &row.report) {
            (Some(eq), Some(rep)) => {
                writeln!(
                    s,
                    "{},{qs},{},{:?},{},{},{}",
                    row.label, rep.hessian_det_sign, rep.verdict, eq.e[0], eq.e[1], eq.e[2]
                )
                .ok();
            }
            _ => {
                writeln!(s, "{},{qs},0,Infeasible,,,", row.label).ok();
            }
        }
    }
    Ok(s.into_bytes())
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn continued(cfg: &RunConfig) -> Result<ContinuedOrbit> {
    let mc = cfg.system.inner()?;
    let label = cfg.label()?;
    let eq = solve_equilibrium(label, &mc, cfg.e2, 1.0)?
        .feasible()
        .ok_or_else(|| Error::domain(format!("family {label} has no equilibrium at e2 = {}", cfg.e2)))?;
    let mut opts = ShootingOptions::default();
    // `steps` means steps per period only for the continuation itself
    if let (Command::Continue, Some(steps)) = (cfg.command, cfg.steps) {
        opts.steps = steps;
    }
    let seed = PeriodicOrbitSeed::from_equilibrium(&eq)?;
    newton_continue(&seed, &opts)
}

fn orbit_json(cfg: &RunConfig, o: &ContinuedOrbit) -> Value {
    json!({
        "label": cfg.label().map(|l| l.to_string()).unwrap_or_default(),
        "model": cfg.system.model,
        "mu": cfg.system.mu,
        "e2": cfg.e2,
        "period": o.period,
        "residual": o.residual,
        "iterations": o.iterations,
        "residual_history": o.residual_history,
        "multipliers": o.multipliers.iter().map(|m| [m.re, m.im]).collect::<Vec<_>>(),
        "max_circle_deviation": o.max_circle_deviation(),
        "determinant": o.determinant(),
    })
}

/// Initial state, period and time step of `integrate`/`freq`.
fn start_state(cfg: &RunConfig) -> Result<(CartState, f64, Option<ContinuedOrbit>)> {
    let mc = cfg.system.inner()?;
    if cfg.system.bodies.len() >= 3 {
        let els = cfg.system.bodies[..3]
            .iter()
            .map(|b| OrbitalElements::new(b.a, b.e, b.l, b.g))
            .collect::<Result<Vec<_>>>()?;
        let x = cart_from_elements(&els, &mc)?;
        let period = crate::integrator::reference_period(&x, &mc)?;
        return Ok((x, period, None));
    }
    let orbit = continued(cfg)?;
    Ok((displaced_state(&orbit, cfg.dbar)?, orbit.period, Some(orbit)))
}

fn trajectory_for(cfg: &RunConfig, default_periods: usize) -> Result<(Trajectory, Option<ContinuedOrbit>)> {
    let mc = cfg.system.inner()?;
    let (x0, period, orbit) = start_state(cfg)?;
    let steps = cfg.steps.unwrap_or(default_periods * STEPS_PER_PERIOD);
    if steps % STEPS_PER_PERIOD != 0 {
        return Err(Error::Config(format!("steps must be a multiple of {STEPS_PER_PERIOD}, got {steps}")));
    }
    let dt = cfg.dt.unwrap_or(period / STEPS_PER_PERIOD as f64);
    let traj = integrate(&x0, &mc, Scheme::WisdomHolman, dt, steps, STEPS_PER_PERIOD)?;
    Ok((traj, orbit))
}

fn summary_json(cfg: &RunConfig, traj: &Trajectory) -> Result<Value> {
    let cr = conservation_report(traj);
    let lib = libration_report(traj, cfg.label()?)?;
    Ok(json!({
        "model": traj.model,
        "dt": traj.dt,
        "steps": traj.len() * traj.stride,
        "periods": lib.periods,
        "max_rel_energy": cr.max_rel_energy,
        "energy_trend_per_period": cr.energy_trend,
        "max_rel_momentum": cr.max_rel_momentum,
        "momentum_trend_per_period": cr.momentum_trend,
        "libration": lib,
    }))
}

fn run_integrate(cfg: &RunConfig) -> Result<Artifacts> {
    let (traj, _) = trajectory_for(cfg, INTEGRATE_PERIODS)?;
    let n = traj.means.first().map(|m| m.len()).unwrap_or(0);
    let mut csv = String::from("t");
    for i in 1..=n {
        write!(csv, ",a{i},e{i},l{i},g{i}").ok();
    }
    csv.push('\n');
    for (k, m) in traj.means.iter().enumerate() {
        write!(csv, "{}", traj.mean_time(k)).ok();
        for b in m {
            write!(csv, ",{},{},{},{}", b.a, b.e, b.l, b.g).ok();
        }
        csv.push('\n');
    }
    let mut plot = String::from("arg_name,t,unwrapped_angle\n");
    for (name, cl, cg) in critical_arguments() {
        for (k, v) in traj.angle_series(&cl, &cg).iter().enumerate() {
            writeln!(plot, "{name},{},{v}", traj.mean_time(k)).ok();
        }
    }
    Ok(vec![
        ("trajectory.csv".into(), csv.into_bytes()),
        ("librations.csv".into(), plot.into_bytes()),
        ("integrate.json".into(), pretty(&summary_json(cfg, &traj)?)?),
    ])
}

fn run_freq(cfg: &RunConfig) -> Result<Artifacts> {
    let (traj, orbit) = trajectory_for(cfg, FREQ_PERIODS)?;
    let measured = libration_frequencies(&traj, 4)?;
    let mut out = json!({
        "summary": summary_json(cfg, &traj)?,
        "naff": measured,
    });
    if let Some(o) = &orbit {
        let mut floquet: Vec<f64> = o.multipliers.iter().map(|m| m.arg() / o.period).filter(|w| *w > 0.0).collect();
        floquet.sort_by(|a, b| a.total_cmp(b));
        let eq = solve_equilibrium(cfg.label()?, &cfg.system.inner()?, cfg.e2, 1.0)?.feasible();
        let predicted = match eq {
            Some(eq) => normal_frequencies(&coupled_linearization(&eq)?.eigenvalues),
            None => Vec::new(),
        };
        out["floquet"] = json!(floquet);
        out["predicted"] = json!(predicted);
        out["naff_vs_predicted"] = json!(relative_gaps(&measured, &predicted));
        out["naff_vs_floquet"] = json!(relative_gaps(&measured, &floquet));
    }
    if measured.len() >= 2 {
        let dp = DiophantineParams { gamma: 1e-12, tau: measured.len() as f64 - 0.5, kmax: cfg.kmax };
        out["diophantine"] = serde_json::to_value(diophantine_check(&measured, &[], &dp)?)?;
    }
    Ok(vec![("freq.json".into(), pretty(&out)?)])
}

/// `|a_k - b_k| / b_k` for sorted lists of equal length, else empty.
pub fn relative_gaps(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.len() != b.len() {
        return Vec::new();
    }
    a.iter().zip(b).map(|(x, y)| ((x - y) / y).abs()).collect()
}

fn run_fivebody(cfg: &RunConfig) -> Result<Artifacts> {
    let mc = cfg.system.mass_config()?;
    if mc.n() != 4 {
        return Err(Error::Config(format!("fivebody needs four rescaled masses, got {}", mc.n())));
    }
    let a3 = cfg.system.bodies.get(2).map(|b| b.a).unwrap_or(1.0);
    let five = FiveBodyConfig::new(mc, a3, cfg.a4, 0.1)?;
    let defaults = TorusOptions::default();
    let steps = cfg.steps.unwrap_or(defaults.periods * defaults.steps_per_period);
    if steps % defaults.steps_per_period != 0 {
        return Err(Error::Config(format!("steps must be a multiple of {}", defaults.steps_per_period)));
    }
    let opts = TorusOptions {
        label: cfg.label()?,
        e2: cfg.e2,
        dbar: cfg.dbar,
        periods: steps / defaults.steps_per_period,
        diophantine: DiophantineParams { kmax: cfg.kmax, ..defaults.diophantine },
        ..defaults
    };
    let r = verify_elliptic_2torus(&five, &opts)?;
    let out = json!({
        "kappa": r.kappa,
        "callisto_freq": r.callisto_freq,
        "measured_g4_rate": r.measured_g4_rate,
        "herman_residual": r.herman_residual,
        "libration": r.libration,
        "e4_band": {"initial": r.e4_initial, "min": r.e4_min, "max": r.e4_max, "within_factor_2": r.e4_band},
        "frequencies": r.frequencies,
        "diophantine_margin": r.diophantine.margin,
        "diophantine": r.diophantine,
        "max_rel_energy": r.max_rel_energy,
    });
    Ok(vec![("fivebody.json".into(), pretty(&out)?)])
}

/// Markdown summary of an artifact directory.
pub fn report(dir: &Path) -> Result<String> {
    let manifest_path = dir.join(MANIFEST);
    if !manifest_path.exists() {
        return Err(Error::MissingArtifact(manifest_path.display().to_string()));
    }
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&manifest_path)?)?;
    let mut s = String::new();
    writeln!(s, "# reslab report: {}\n", manifest.command.name()).ok();
    writeln!(s, "model `{}`, mu = {:e}, e2 = {}\n", manifest.config.system.model.as_str(), manifest.config.system.mu, manifest.config.e2).ok();

    let alpha = resonant_alpha();
    writeln!(s, "## Coefficients at alpha = 4^(-1/3)\n").ok();
    writeln!(s, "| quantity | reference | computed |\n|---|---|---|").ok();
    for (name, target, value) in [
        ("2A", TARGET_2A, 2.0 * coeff_a(alpha)?),
        ("2B fixed centre", TARGET_2B_FIXED, 2.0 * coeff_b(alpha, ModelKind::FixedCenter)?),
        ("2B full problem", TARGET_2B_FULL, 2.0 * coeff_b(alpha, ModelKind::FullProblem)?),
    ] {
        writeln!(s, "| {name} | {target:.4} | {value:.6} |").ok();
    }
    s.push('\n');

    let files: BTreeMap<&str, PathBuf> = manifest.artifacts.iter().map(|a| (a.name.as_str(), dir.join(&a.name))).collect();
    for name in files.keys() {
        if !files[name].exists() {
            return Err(Error::MissingArtifact(files[name].display().to_string()));
        }
    }
    if let Some(p) = files.get("families.csv") {
        writeln!(s, "## Stability table\n").ok();
        writeln!(s, "| family | Q sign | det H sign | verdict | e1 | e2 | e3 |\n|---|---|---|---|---|---|---|").ok();
        for line in fs::read_to_string(p)?.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let num = |k: usize| cols.get(k).and_then(|c| c.parse::<f64>().ok()).map(|v| format!("{v:.5}")).unwrap_or_default();
            writeln!(s, "| {} | {} | {} | {} | {} | {} | {} |", cols[0], cols[1], cols[2], cols[3], num(4), num(5), num(6)).ok();
        }
        s.push('\n');
    }
    for name in ["integrate.json", "freq.json"] {
        if let Some(p) = files.get(name) {
            let v: Value = serde_json::from_str(&fs::read_to_string(p)?)?;
            let summary = if name == "freq.json" { &v["summary"] } else { &v };
            writeln!(s, "## Libration ({name})\n").ok();
            libration_section(&mut s, summary);
            if name == "freq.json" {
                writeln!(s, "\nlibration frequencies (naff): {}", v["naff"]).ok();
                writeln!(s, "Floquet frequencies: {}", v["floquet"]).ok();
                writeln!(s, "predicted normal frequencies: {}", v["predicted"]).ok();
            }
            s.push('\n');
        }
    }
    if let Some(p) = files.get("continue.json") {
        let v: Value = serde_json::from_str(&fs::read_to_string(p)?)?;
        writeln!(s, "## Continued orbit\n").ok();
        writeln!(
            s,
            "{}: period {}, residual {}, max distance of multipliers from the unit circle {}\n",
            v["label"].as_str().unwrap_or(""), v["period"], v["residual"], v["max_circle_deviation"]
        )
        .ok();
    }
    if let Some(p) = files.get("fivebody.json") {
        let v: Value = serde_json::from_str(&fs::read_to_string(p)?)?;
        writeln!(s, "## Outer body\n").ok();
        writeln!(s, "kappa = {}, predicted precession {}, measured {}", v["kappa"], v["callisto_freq"], v["measured_g4_rate"]).ok();
        let band = &v["e4_band"];
        writeln!(
            s,
            "e4 band: initial {}, range [{}, {}], within factor 2: {}",
            band["initial"], band["min"], band["max"], band["within_factor_2"]
        )
        .ok();
        writeln!(s, "Herman residual {}, Diophantine margin {}", v["herman_residual"], v["diophantine_margin"]).ok();
        libration_section(&mut s, &v);
        s.push('\n');
    }
    for name in ["laplace.csv", "resavg.csv"] {
        if let Some(p) = files.get(name) {
            writeln!(s, "## {name}\n\n```\n{}```\n", fs::read_to_string(p)?).ok();
        }
    }
    Ok(s)
}

fn libration_section(s: &mut String, v: &Value) {
    let lib = if v.get("libration").is_some() { &v["libration"] } else { v };
    if let Some(args) = lib["arguments"].as_array() {
        writeln!(s, "| argument | motion | amplitude |\n|---|---|---|").ok();
        for a in args {
            writeln!(s, "| {} | {} | {} |", a["name"].as_str().unwrap_or(""), a["motion"].as_str().unwrap_or(""), a["amplitude"]).ok();
        }
    }
    if let Some(e) = v.get("max_rel_energy") {
        writeln!(s, "\nmax relative energy error {e}").ok();
    }
}

/// Entry point of the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    match RunConfig::resolve(&cli).and_then(|cfg| run(&cfg)) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Caps the worker pool from `RESLAB_THREADS`; results do not depend on it.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("RESLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(format!("RESLAB_THREADS must be a positive integer, got `{raw}`")))?;
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
