//! Command-line front end: figure reproduction (`carpet`), revival analysis
//! (`revival`), non-relativistic limit checks (`limits`) and grid comparison
//! (`compare`).
//!
//! Settings come from flags and an optional JSON file whose keys match the
//! long flag names. Flags win over the file, the file wins over defaults.
//!
//! Exit codes: 0 success, 1 tolerance failure, 2 usage or parse error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use qcarpet::evolution::REVIVAL_THRESHOLD;
use qcarpet::render::{self, ColorMap, Palette, DEFAULT_GAMMA};
use qcarpet::{
    analytic_revival_time, build_mode_set, compare_grids, density_grid, revival_report,
    DensityGrid, GridComparison, GridSpec, ModelKind, PacketSpec, PhysicalParams, RevivalReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest `q` for which `limits` may report PASS.
pub const LIMITS_MAX_Q: f64 = 1e-4;
/// Largest unit-peak max-abs difference for which `limits` reports PASS.
pub const LIMITS_MAX_DIFF: f64 = 1e-3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Sim(#[from] qcarpet::Error),
    #[error("invalid config file {path}: {source}")]
    Config { path: PathBuf, source: serde_json::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "qcarpet", version, about = "Quantum carpets of Schrödinger, Dirac and Klein-Gordon packets in a box")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a density carpet and write PGM, PNG and CSV files.
    Carpet(RunArgs),
    /// Autocorrelation trace, analytic revival time and detected revivals.
    Revival(RunArgs),
    /// Compare the exact Dirac carpet with the Schrödinger carpet.
    Limits(RunArgs),
    /// Compare two grid CSV files.
    Compare(CompareArgs),
}

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunArgs {
    /// JSON file with the same keys as the long flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// schrodinger, dirac, dirac-slight, dirac-nonrel or kg; `revival`
    /// accepts a comma-separated list.
    #[arg(long)]
    pub model: Option<String>,
    /// Dirac relativistic parameter q = λ_c / 4L.
    #[arg(long)]
    pub q: Option<f64>,
    /// Klein-Gordon relativistic parameter q'.
    #[arg(long)]
    pub qprime: Option<f64>,
    #[arg(long)]
    pub mmin: Option<u32>,
    #[arg(long)]
    pub mmax: Option<u32>,
    /// Gaussian width Δ.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Initial packet centre (default L/2).
    #[arg(long)]
    pub z0: Option<f64>,
    /// Initial momentum.
    #[arg(long)]
    pub p0: Option<f64>,
    /// Box length.
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub nz: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
    /// End time in units of the model's revival time.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Central mode index of the revival formulas (default: weighted mean).
    #[arg(long)]
    pub n0: Option<u32>,
    /// Klein-Gordon rest energy, overriding the value implied by q'.
    #[arg(long)]
    pub kg_rest_energy: Option<f64>,
    /// Override of the non-relativistic revival time (default 2L/q).
    #[arg(long)]
    pub trev_sch: Option<f64>,
    /// grayscale or viridis.
    #[arg(long)]
    pub colormap: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Revival detection threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Output path stem.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    pub path_a: PathBuf,
    pub path_b: PathBuf,
    /// Largest accepted max-abs difference of the unit-peak grids.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($field:ident),*) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl RunArgs {
    /// Fills unset fields from the JSON config file, if one was given.
    pub fn with_config_file(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path).map_err(qcarpet::Error::from)?;
        let file: RunArgs = serde_json::from_str(&text)
            .map_err(|source| CliError::Config { path: path.clone(), source })?;
        merge_fields!(self, file; model, q, qprime, mmin, mmax, delta, z0, p0, length, nz, nt,
            tmax, n0, kg_rest_energy, trev_sch, colormap, gamma, threshold, output);
        Ok(self)
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub models: Vec<ModelKind>,
    pub params: PhysicalParams,
    pub packet: PacketSpec,
    pub nz: usize,
    pub nt: usize,
    pub t_max: f64,
    pub n0: Option<u32>,
    pub colormap: ColorMap,
    pub threshold: f64,
    pub output: PathBuf,
}

impl RunConfig {
    pub fn resolve(args: RunArgs) -> Result<Self> {
        let args = args.with_config_file()?;
        let models = args
            .model
            .as_deref()
            .unwrap_or("dirac")
            .split(',')
            .map(|s| s.trim().parse::<ModelKind>().map_err(CliError::Usage))
            .collect::<Result<Vec<_>>>()?;
        let length = args.length.unwrap_or(1.0);
        let mut params =
            PhysicalParams::new(length, args.q.unwrap_or(1.0), args.qprime.unwrap_or(1.0))?;
        if let Some(e) = args.kg_rest_energy {
            params = params.with_rest_energy_kg(e)?;
        }
        if let Some(t) = args.trev_sch {
            params = params.with_trev_sch(t)?;
        }
        let packet = PacketSpec::new(
            args.z0.unwrap_or(0.5 * length),
            args.delta.unwrap_or(1e-2),
            args.mmin.unwrap_or(1),
            args.mmax.unwrap_or(40),
        )
        .with_p0(args.p0.unwrap_or(0.0));
        packet.validate(&params)?;
        let palette: Palette = args
            .colormap
            .as_deref()
            .unwrap_or("viridis")
            .parse()
            .map_err(CliError::Usage)?;
        let colormap = ColorMap::new(palette, args.gamma.unwrap_or(DEFAULT_GAMMA))?;
        let cfg = Self {
            models,
            params,
            packet,
            nz: args.nz.unwrap_or(512),
            nt: args.nt.unwrap_or(512),
            t_max: args.tmax.unwrap_or(1.0),
            n0: args.n0,
            colormap,
            threshold: args.threshold.unwrap_or(REVIVAL_THRESHOLD),
            output: args.output.unwrap_or_else(|| PathBuf::from("carpet")),
        };
        // Validates the sampling before any work is done.
        GridSpec::new(cfg.nz, cfg.nt, cfg.t_max, 1.0, length)?;
        if cfg.n0 == Some(0) {
            return Err(CliError::Usage("--n0 must be >= 1".into()));
        }
        Ok(cfg)
    }

    fn single_model(&self, cmd: &str) -> Result<ModelKind> {
        match self.models.as_slice() {
            [kind] => Ok(*kind),
            _ => Err(CliError::Usage(format!("{cmd} takes exactly one --model"))),
        }
    }
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Debug)]
pub struct CarpetOutcome {
    pub grid: DensityGrid,
    pub t_rev: f64,
    pub n0: u32,
    pub files: Vec<PathBuf>,
}

/// Builds the packet, evaluates the grid over `[0, tmax · T_rev]` and writes
/// `<output>.pgm`, `<output>.png` and `<output>.csv`.
pub fn cmd_carpet(cfg: &RunConfig) -> Result<CarpetOutcome> {
    let kind = cfg.single_model("carpet")?;
    let set = build_mode_set(kind, &cfg.packet, &cfg.params)?;
    let n0 = cfg.n0.unwrap_or_else(|| set.mean_mode_index());
    let t_rev = analytic_revival_time(kind, &cfg.params, n0)?;
    let spec = GridSpec::new(cfg.nz, cfg.nt, cfg.t_max, t_rev, cfg.params.length())?;
    let grid = density_grid(&set, &spec)?;
    let files = vec![
        with_suffix(&cfg.output, ".pgm"),
        with_suffix(&cfg.output, ".png"),
        with_suffix(&cfg.output, ".csv"),
    ];
    render::write_pgm(&grid, cfg.colormap.gamma, &files[0])?;
    render::write_png(&grid, &cfg.colormap, &files[1])?;
    render::write_csv(&grid, &files[2])?;
    Ok(CarpetOutcome { grid, t_rev, n0, files })
}

#[derive(Debug)]
pub struct RevivalOutcome {
    pub reports: Vec<RevivalReport>,
    pub files: Vec<PathBuf>,
    /// `T_Dirac / T_KG` when both exact models were requested.
    pub dirac_kg_ratio: Option<f64>,
}

/// Autocorrelation over `[0, tmax · T_rev]` with `nt` samples per model.
pub fn cmd_revival(cfg: &RunConfig) -> Result<RevivalOutcome> {
    let mut reports = Vec::new();
    let mut files = Vec::new();
    for &kind in &cfg.models {
        let set = build_mode_set(kind, &cfg.packet, &cfg.params)?;
        let report = revival_report(&set, &cfg.params, cfg.n0, cfg.t_max, cfg.nt, cfg.threshold)?;
        let path = if cfg.models.len() == 1 {
            with_suffix(&cfg.output, ".csv")
        } else {
            with_suffix(&cfg.output, &format!("-{kind}.csv"))
        };
        render::write_report_csv(&report, &path)?;
        files.push(path);
        reports.push(report);
    }
    let trev = |k| reports.iter().find(|r| r.model == k).map(|r| r.analytic_trev);
    let dirac_kg_ratio = trev(ModelKind::DiracExact)
        .zip(trev(ModelKind::KleinGordon))
        .map(|(d, k)| d / k);
    Ok(RevivalOutcome { reports, files, dirac_kg_ratio })
}

#[derive(Debug)]
pub struct LimitsOutcome {
    pub comparison: GridComparison,
    pub q: f64,
    pub pass: bool,
}

/// Exact Dirac carpet against the Schrödinger carpet on a shared time axis in
/// units of `T_sch`.
pub fn cmd_limits(cfg: &RunConfig) -> Result<LimitsOutcome> {
    let spec = GridSpec::new(cfg.nz, cfg.nt, cfg.t_max, cfg.params.trev_sch(), cfg.params.length())?;
    let dirac = build_mode_set(ModelKind::DiracExact, &cfg.packet, &cfg.params)?;
    let sch = build_mode_set(ModelKind::Schrodinger, &cfg.packet, &cfg.params)?;
    let comparison = compare_grids(&density_grid(&dirac, &spec)?, &density_grid(&sch, &spec)?)?;
    let q = cfg.params.q();
    let pass = q <= LIMITS_MAX_Q && comparison.max_abs < LIMITS_MAX_DIFF;
    Ok(LimitsOutcome { comparison, q, pass })
}

pub fn cmd_compare(a: &Path, b: &Path) -> Result<GridComparison> {
    let ga = render::read_grid_csv(a)?;
    let gb = render::read_grid_csv(b)?;
    Ok(compare_grids(&ga, &gb)?)
}

/// Runs one subcommand, returning the text for stdout and the exit code.
pub fn run(cli: Cli) -> Result<(String, i32)> {
    let mut out = String::new();
    let code = match cli.command {
        Command::Carpet(args) => {
            let cfg = RunConfig::resolve(args)?;
            let res = cmd_carpet(&cfg)?;
            let _ = writeln!(
                out,
                "model={} n0={} t_rev={:.12e} grid={}x{} peak={:.6e}",
                res.grid.model,
                res.n0,
                res.t_rev,
                res.grid.spec.nz,
                res.grid.spec.nt,
                res.grid.peak()
            );
            for f in &res.files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
            EXIT_OK
        }
        Command::Revival(args) => {
            let cfg = RunConfig::resolve(args)?;
            let res = cmd_revival(&cfg)?;
            for (r, f) in res.reports.iter().zip(&res.files) {
                let _ = writeln!(
                    out,
                    "model={} n0={} t_rev={:.12e} peaks={}",
                    r.model,
                    r.n0,
                    r.analytic_trev,
                    r.peaks.len()
                );
                for pk in &r.peaks {
                    let _ = writeln!(out, "  revival t={:.12e} (t/T_rev={:.6}) A={:.9}", pk.t, pk.t / r.analytic_trev, pk.a);
                }
                let _ = writeln!(out, "wrote {}", f.display());
            }
            if let Some(ratio) = res.dirac_kg_ratio {
                let order = if ratio > 1.0 { ">" } else { "<=" };
                let _ = writeln!(out, "T_dirac / T_kg = {ratio:.15} (T_dirac {order} T_kg)");
            }
            EXIT_OK
        }
        Command::Limits(args) => {
            let cfg = RunConfig::resolve(args)?;
            let res = cmd_limits(&cfg)?;
            let _ = writeln!(
                out,
                "q={:e} max_abs={:.6e} rms={:.6e} {}",
                res.q,
                res.comparison.max_abs,
                res.comparison.rms,
                if res.pass { "PASS" } else { "FAIL" }
            );
            if res.pass { EXIT_OK } else { EXIT_TOLERANCE }
        }
        Command::Compare(args) => {
            let cmp = cmd_compare(&args.path_a, &args.path_b)?;
            let _ = writeln!(out, "max_abs={:.6e} rms={:.6e}", cmp.max_abs, cmp.rms);
            if cmp.max_abs <= args.tol { EXIT_OK } else { EXIT_TOLERANCE }
        }
    };
    Ok((out, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("qcarpet").chain(args.iter().copied())).unwrap()
    }

    fn run_args(cli: Cli) -> RunArgs {
        match cli.command {
            Command::Carpet(a) | Command::Revival(a) | Command::Limits(a) => a,
            Command::Compare(_) => panic!("not a run command"),
        }
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(RunArgs::default()).unwrap();
        assert_eq!(cfg.models, vec![ModelKind::DiracExact]);
        assert_eq!((cfg.nz, cfg.nt, cfg.t_max), (512, 512, 1.0));
        assert_eq!(cfg.packet.z0, 0.5);
        assert_eq!(cfg.packet.delta, 1e-2);
        assert_eq!(cfg.params.length(), 1.0);
        assert_eq!(cfg.colormap.gamma, 0.5);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"model": "kg", "qprime": 2.0, "mmin": 3, "mmax": 9, "nz": 64}"#)
            .unwrap();
        let cli = parse(&["carpet", "--config", path.to_str().unwrap(), "--mmax", "11"]);
        let cfg = RunConfig::resolve(run_args(cli)).unwrap();
        assert_eq!(cfg.models, vec![ModelKind::KleinGordon]);
        assert_eq!(cfg.params.q_prime(), 2.0);
        assert_eq!((cfg.packet.m_min, cfg.packet.m_max), (3, 11));
        assert_eq!(cfg.nz, 64);
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"modle": "kg"}"#).unwrap();
        let cli = parse(&["carpet", "--config", path.to_str().unwrap()]);
        assert!(matches!(RunConfig::resolve(run_args(cli)), Err(CliError::Config { .. })));
        assert!(Cli::try_parse_from(["qcarpet", "carpet", "--bogus", "1"]).is_err());
    }

    #[test]
    fn validation_errors() {
        for args in [
            vec!["carpet", "--model", "boson"],
            vec!["carpet", "--mmin", "5", "--mmax", "5"],
            vec!["carpet", "--z0", "1.5"],
            vec!["carpet", "--nz", "1"],
            vec!["carpet", "--q", "-1"],
            vec!["carpet", "--colormap", "jet"],
            vec!["carpet", "--n0", "0"],
        ] {
            let err = RunConfig::resolve(run_args(parse(&args))).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_USAGE, "{args:?}");
        }
        let cfg = RunConfig::resolve(run_args(parse(&["carpet", "--model", "dirac,kg"]))).unwrap();
        assert!(cmd_carpet(&cfg).is_err());
    }
}
