//! Command-line front end: argument types, dispatch and report files.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::continuum::{douglas_energy, BoundaryFunction, ContinuumError, HarmonicField};
use crate::linalg::SolveError;
use crate::map::{generate_tiling, grid_patch, map_from_json, truncate, MapError, PlanarMap, Truncation};
use crate::packing::{geometry_report, pack, packing_json, packing_svg, BoundaryMode, DoublePacking, PackingError};
use crate::potential::{capacity, escape_capacity, PotentialError};
use crate::transfer::{
    capacity_comparison, disc_operator, harnack_fit, roundtrip_sweep, SweepConfig, SweepRow, TransferError,
};

/// Largest relative layout residual accepted by `pack` and `analyze`.
const RESIDUAL_LIMIT: f64 = 1e-4;
/// Largest relative gap between the Douglas integral and `kπ`.
const DOUGLAS_LIMIT: f64 = 1e-3;
/// Largest relative gap between the two capacity computations.
const CAPACITY_LIMIT: f64 = 1e-6;
/// Largest relative rise of the roundtrip residual from one radius to the next.
const RESIDUAL_RISE: f64 = 0.10;
/// Degree of the random harmonic fields fed to `harnack`.
const HARNACK_DEGREE: usize = 4;

#[derive(Parser, Debug, Clone, Serialize)]
#[command(name = "hdpack", version, about = "Double circle packings and discrete Dirichlet spaces")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Directory receiving the reports.
    #[arg(long, global = true, env = "HDPACK_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Pack a truncation and draw it.
    Pack {
        #[command(flatten)]
        source: MapSource,
        #[command(flatten)]
        packing: PackOptions,
    },
    /// Residuals, ring ratios and sausage separation of a packing.
    Analyze {
        #[command(flatten)]
        source: MapSource,
        #[command(flatten)]
        packing: PackOptions,
    },
    /// Douglas integral of cos kθ against kπ.
    Douglas {
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        #[arg(long, default_value_t = 2048)]
        ntheta: usize,
    },
    /// Capacity of a vertex set, exactly, by escape probabilities and
    /// against the continuum capacity of its shrunken discs.
    Capacity {
        #[command(flatten)]
        source: MapSource,
        #[command(flatten)]
        packing: PackOptions,
        /// Vertices of the set; the root when empty.
        #[arg(long, value_delimiter = ',')]
        set: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        delta: Vec<f64>,
        #[arg(long, default_value_t = 1.0 / 128.0)]
        grid_h: f64,
    },
    /// Disc∘Cont roundtrip over a range of truncation radii.
    Roundtrip {
        #[arg(long, default_value = "7,3")]
        tiling: Pair,
        /// Inclusive range `first:last`.
        #[arg(long, default_value = "3:6")]
        radii: RadiusRange,
        #[arg(long, default_value_t = 1e-10)]
        pack_tol: f64,
        #[arg(long, default_value_t = 16)]
        kmax: usize,
        /// Trace circle offset; twice the outer layer thickness when omitted.
        #[arg(long)]
        eps_trace: Option<f64>,
        /// Boundary data as `theta,value` rows; `cos θ + sin 2θ / 2` when omitted.
        #[arg(long)]
        boundary: Option<PathBuf>,
    },
    /// Fit of the discrete Harnack exponent on random harmonic functions.
    Harnack {
        #[command(flatten)]
        source: MapSource,
        #[command(flatten)]
        packing: PackOptions,
        #[arg(long, default_value_t = 0.9)]
        alpha: f64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MapSource {
    /// Generate the `{p,q}` tiling.
    #[arg(long, default_value = "7,3")]
    pub tiling: Pair,
    #[arg(long, default_value_t = 3)]
    pub layers: usize,
    /// Square-lattice patch `cols,rows` instead of a tiling.
    #[arg(long, conflicts_with = "map")]
    pub grid: Option<Pair>,
    /// Map JSON file instead of a tiling.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Root vertex; 0, or the middle of a lattice patch, when omitted.
    #[arg(long)]
    pub root: Option<usize>,
    /// Truncation radius; the layer count for tilings and the outer face
    /// otherwise when omitted.
    #[arg(long)]
    pub radius: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PackOptions {
    #[arg(long, default_value_t = 1e-10)]
    pub pack_tol: f64,
    #[arg(long, value_enum, default_value_t = Normalization::Disc)]
    pub mode: Normalization,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Boundary circles horocyclic, packing filling the unit disc.
    Disc,
    /// Equal boundary radii, scaled into the unit disc.
    Uniform,
}

/// Two comma-separated integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pair(pub usize, pub usize);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
        Ok(Pair(parse(a)?, parse(b)?))
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RadiusRange {
    pub first: usize,
    pub last: usize,
}

impl RadiusRange {
    pub fn radii(&self) -> Vec<usize> {
        (self.first..=self.last).collect()
    }
}

impl FromStr for RadiusRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
        let range = match s.split_once(':') {
            Some((a, b)) => RadiusRange { first: parse(a)?, last: parse(b)? },
            None => {
                let r = parse(s)?;
                RadiusRange { first: r, last: r }
            }
        };
        if range.first == 0 || range.first > range.last {
            return Err(format!("radius range `{s}` is empty or starts at 0"));
        }
        Ok(range)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::DimensionMismatch { .. } => CliError::Config(e.to_string()),
            _ => CliError::Convergence(e.to_string()),
        }
    }
}

impl From<PackingError> for CliError {
    fn from(e: PackingError) -> Self {
        match e {
            PackingError::NoConvergence { .. }
            | PackingError::PlacementInconsistent { .. }
            | PackingError::Numerical(_) => CliError::Convergence(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<PotentialError> for CliError {
    fn from(e: PotentialError) -> Self {
        match e {
            PotentialError::Solve(s) => s.into(),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<ContinuumError> for CliError {
    fn from(e: ContinuumError) -> Self {
        match e {
            ContinuumError::Solve(s) => s.into(),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<TransferError> for CliError {
    fn from(e: TransferError) -> Self {
        match e {
            TransferError::Map(e) => e.into(),
            TransferError::Packing(e) => e.into(),
            TransferError::Potential(e) => e.into(),
            TransferError::Continuum(e) => e.into(),
            _ => CliError::Config(e.to_string()),
        }
    }
}

/// Files written by a run, and the invariant checks it failed.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<PathBuf>,
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() { 0 } else { 5 }
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(&config.out_dir).map_err(|source| io_error(&config.out_dir, source))?;
    let mut out = Outcome::default();
    match &config.command {
        Command::Pack { source, packing } => {
            let (_, p) = packed(source, packing)?;
            let residuals = p.residuals();
            let body = serde_json::json!({
                "stats": p.stats(),
                "residuals": residuals,
                "delta0": p.delta0(),
                "circles": packing_json(&p),
            });
            write_json(config, "packing.json", body, &mut out)?;
            write_file(&config.out_dir.join("packing.svg"), &packing_svg(&p), &mut out)?;
            if residuals.tangency.max(residuals.orthogonality) > RESIDUAL_LIMIT {
                out.violations.push(format!("layout residuals {residuals:?} exceed {RESIDUAL_LIMIT:e}"));
            }
        }
        Command::Analyze { source, packing } => {
            let (_, p) = packed(source, packing)?;
            let report = geometry_report(&p);
            if report.max_tangency_residual.max(report.max_orthogonality_residual) > RESIDUAL_LIMIT {
                out.violations.push("layout residuals exceed the limit".into());
            }
            if !report.sausage_ok {
                out.violations.push("sausages are not disjoint at δ₀".into());
            }
            write_json(config, "analyze.json", serde_json::json!({ "report": report }), &mut out)?;
        }
        Command::Douglas { kmax, ntheta } => douglas(config, *kmax, *ntheta, &mut out)?,
        Command::Capacity { source, packing, set, delta, grid_h } => {
            let (t, p) = packed(source, packing)?;
            let set = if set.is_empty() { vec![t.root()] } else { set.clone() };
            let exact = capacity(&t, &set)?;
            let escape = escape_capacity(&t, &set)?;
            if (exact.value - escape).abs() > CAPACITY_LIMIT * exact.value.abs().max(f64::MIN_POSITIVE) {
                out.violations.push(format!("capacity {} and escape capacity {escape} disagree", exact.value));
            }
            let comparisons =
                delta.iter().map(|&d| capacity_comparison(&t, &p, &set, d, *grid_h)).collect::<Result<Vec<_>, _>>()?;
            let body = serde_json::json!({
                "set": set,
                "capacity": exact,
                "escape_capacity": escape,
                "comparisons": comparisons,
            });
            write_json(config, "capacity.json", body, &mut out)?;
        }
        Command::Roundtrip { tiling, radii, pack_tol, kmax, eps_trace, boundary } => {
            let sweep = SweepConfig {
                p: tiling.0,
                q: tiling.1,
                radii: radii.radii(),
                pack_tol: *pack_tol,
                k_max: *kmax,
                eps_trace: *eps_trace,
            };
            let rows = match boundary {
                Some(path) => {
                    let g = BoundaryFunction::from_csv(&read(path)?)?;
                    roundtrip_sweep(&sweep, |t| g.eval(t))?
                }
                None => roundtrip_sweep(&sweep, |t| t.cos() + 0.5 * (2.0 * t).sin())?,
            };
            for w in rows.windows(2) {
                let (a, b) = (w[0].report.roundtrip_residual, w[1].report.roundtrip_residual);
                if b > a * (1.0 + RESIDUAL_RISE) {
                    out.violations.push(format!("residual rises from {a} to {b} at radius {}", w[1].radius));
                }
            }
            write_roundtrip_csv(&config.out_dir.join("roundtrip.csv"), &rows, &mut out)?;
            write_json(config, "roundtrip.json", serde_json::json!({ "rows": rows }), &mut out)?;
        }
        Command::Harnack { source, packing, alpha, samples } => {
            let (t, p) = packed(source, packing)?;
            if !p.is_disc() {
                return Err(CliError::Config("harnack needs a disc-mode packing".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut h_samples = Vec::with_capacity(*samples);
            for _ in 0..*samples {
                let mut coef = || (1..=HARNACK_DEGREE).map(|k| rng.gen_range(-1.0..1.0) / k as f64).collect::<Vec<_>>();
                let (a, b) = (coef(), coef());
                let field = HarmonicField::new(0.0, a, b)?;
                h_samples.push(disc_operator(&t, &p, &field)?.into_values());
            }
            let fit = harnack_fit(&t, &p, &h_samples, *alpha)?;
            if fit.beta_hat.is_some_and(|b| b <= 0.0) {
                out.violations.push(format!("fitted exponent {:?} is not positive", fit.beta_hat));
            }
            write_json(config, "harnack.json", serde_json::json!({ "fit": fit }), &mut out)?;
        }
    }
    Ok(out)
}

fn douglas(config: &RunConfig, kmax: usize, ntheta: usize, out: &mut Outcome) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Row {
        k: usize,
        douglas: f64,
        energy: f64,
        ratio: f64,
    }
    if kmax == 0 {
        return Err(CliError::Config("kmax must be positive".into()));
    }
    let mut rows = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let g = BoundaryFunction::from_fn(move |t| (k as f64 * t).cos());
        let d = douglas_energy(&g, ntheta)?;
        let energy = k as f64 * PI;
        rows.push(Row { k, douglas: d, energy, ratio: d / energy });
    }
    for r in &rows {
        if (r.ratio - 1.0).abs() > DOUGLAS_LIMIT {
            out.violations.push(format!("k = {}: ratio {} is off by more than {DOUGLAS_LIMIT:e}", r.k, r.ratio));
        }
    }
    let path = config.out_dir.join("douglas.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
    for r in &rows {
        w.serialize(r).map_err(|e| csv_error(&path, e))?;
    }
    w.flush().map_err(|source| io_error(&path, source))?;
    out.artifacts.push(path);
    write_json(config, "douglas.json", serde_json::json!({ "rows": rows }), out)
}

fn write_roundtrip_csv(path: &Path, rows: &[SweepRow], out: &mut Outcome) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Line {
        radius: usize,
        vertices: usize,
        eps_trace: f64,
        k_max: usize,
        energy_ratio_a: f64,
        energy_ratio_r: f64,
        roundtrip_residual: f64,
        asymptotic_gap: f64,
        oscillation: f64,
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for r in rows {
        let line = Line {
            radius: r.radius,
            vertices: r.vertices,
            eps_trace: r.eps_trace,
            k_max: r.report.k_max,
            energy_ratio_a: r.report.energy_ratio_a,
            energy_ratio_r: r.report.energy_ratio_r,
            roundtrip_residual: r.report.roundtrip_residual,
            asymptotic_gap: r.report.asymptotic_gap,
            oscillation: r.report.oscillation,
        };
        w.serialize(line).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|source| io_error(path, source))?;
    out.artifacts.push(path.to_path_buf());
    Ok(())
}

/// Truncation named by `source`.
pub fn load_truncation(source: &MapSource) -> Result<Truncation, CliError> {
    let (map, default_root, outer): (PlanarMap, usize, bool) = match (&source.map, source.grid) {
        (Some(path), _) => {
            let map = map_from_json(&read(path)?)?;
            let outer = map.outer_face().is_some();
            (map, 0, outer)
        }
        (None, Some(Pair(cols, rows))) => (grid_patch(cols, rows)?, (rows / 2) * cols + cols / 2, true),
        (None, None) => {
            let Pair(p, q) = source.tiling;
            (generate_tiling(p, q, source.layers)?, 0, false)
        }
    };
    let map = Arc::new(map);
    let root = source.root.unwrap_or(default_root);
    Ok(match source.radius {
        Some(r) => truncate(map, root, r)?,
        None if outer => Truncation::from_outer_face(map, root)?,
        None if source.map.is_some() => {
            return Err(CliError::Config("map file has no outer face; pass --radius".into()));
        }
        None => truncate(map, root, source.layers)?,
    })
}

fn packed(source: &MapSource, options: &PackOptions) -> Result<(Truncation, DoublePacking), CliError> {
    if !(options.pack_tol > 0.0) {
        return Err(CliError::Config("pack tolerance must be positive".into()));
    }
    let t = load_truncation(source)?;
    let mode = match options.mode {
        Normalization::Disc => BoundaryMode::Disc,
        Normalization::Uniform => BoundaryMode::Uniform(1.0),
    };
    let p = pack(&t, &mode, options.pack_tol)?;
    Ok((t, p))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| io_error(path, source))
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.to_path_buf(), source }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    io_error(path, std::io::Error::other(e))
}

fn write_file(path: &Path, contents: &str, out: &mut Outcome) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| io_error(path, source))?;
    out.artifacts.push(path.to_path_buf());
    Ok(())
}

fn write_json(config: &RunConfig, name: &str, body: serde_json::Value, out: &mut Outcome) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(&Report { config, body }).expect("reports serialize");
    text.push('\n');
    write_file(&config.out_dir.join(name), &text, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_and_ranges_parse() {
        assert_eq!("7,3".parse::<Pair>().unwrap(), Pair(7, 3));
        assert!("7".parse::<Pair>().is_err());
        assert_eq!("3:6".parse::<RadiusRange>().unwrap().radii(), vec![3, 4, 5, 6]);
        assert_eq!("4".parse::<RadiusRange>().unwrap().radii(), vec![4]);
        assert!("5:3".parse::<RadiusRange>().is_err());
        assert!("0:2".parse::<RadiusRange>().is_err());
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let no_conv: CliError = PackingError::NoConvergence { defect: 1.0, iterations: 3 }.into();
        assert_eq!(no_conv.exit_code(), 3);
        let bad: CliError = TransferError::Map(MapError::ZeroRadius).into();
        assert_eq!(bad.exit_code(), 2);
        let solve: CliError = PotentialError::Solve(SolveError::NoConvergence { residual: 1.0 }).into();
        assert_eq!(solve.exit_code(), 3);
    }

    #[test]
    fn lattice_root_defaults_to_the_middle() {
        let cfg = RunConfig::try_parse_from(["hdpack", "analyze", "--grid", "5,5"]).unwrap();
        let Command::Analyze { source, .. } = &cfg.command else { panic!() };
        let t = load_truncation(source).unwrap();
        assert_eq!(t.to_parent(t.root()), 12);
    }
}
