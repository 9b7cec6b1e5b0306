//! The `qdspin` command line.
//!
//! Every subcommand writes one CSV table, to `--out` or stdout, preceded by
//! `# qdspin <version> config=<hash>` where the hash covers the effective
//! configuration and the subcommand arguments. Exit codes: 0 success, 2 usage
//! or configuration error, 1 numerical failure.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

pub use config::RunConfig;

use crate::csvio::{config_hash, write_table, NumericTable};
use crate::envelope::{design_sweep, linspace, NanoholeProfile, SWEEP_HEADER};
use crate::extract::{
    extract_g_factors, fss_fit, rectilinear_contrast, rectilinear_stokes_from_areas, synth_rf_map,
    PolarizationSeries, RfMapSpec, Spectrum, RF_MAP_HEADER,
};
use crate::hyperfine::{
    classify_lineshape, drag_sweep, infer_signs, simulate_labels, DragLabel, MagnitudeOrder,
    SignRelation, SweepDirection, DRAG_SCAN_HEADER,
};
use crate::optics::{build_transition_set, polarization_map, TransitionSet, POLAR_MAP_HEADER};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "qdspin", version, about = "Spin and optical models for charged GaAs quantum dots")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Field magnitude (T).
    #[arg(long = "B", global = true)]
    b: Option<f64>,
    /// Field polar angle from the growth axis (degrees).
    #[arg(long, global = true, allow_hyphen_values = true)]
    chi_deg: Option<f64>,
    /// Field azimuth from [100] (degrees).
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi_deg: Option<f64>,
    /// Electron g, applied to both the out-of-plane and in-plane components.
    #[arg(long, global = true, allow_hyphen_values = true)]
    ge: Option<f64>,
    /// Trion g, applied to both components of the g-tensor model.
    #[arg(long, global = true, allow_hyphen_values = true)]
    gt: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for synthetic noise and eigensolver start vectors.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RelationArg {
    Same,
    Opposite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    ElectronSmaller,
    ElectronLarger,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energies, Stokes vectors and TDM angles of the four trion lines.
    Transitions,
    /// Normalized emission rate against field azimuth and analyser angle.
    Polmap {
        #[arg(long, default_value_t = 36)]
        phi_steps: usize,
        #[arg(long, default_value_t = 72)]
        alpha_steps: usize,
    },
    /// Up and down laser sweeps across one line with nuclear feedback.
    Dragscan {
        /// Line index 1-4 in ascending energy.
        #[arg(long, default_value_t = 1)]
        line: usize,
    },
    /// g-factor signs from dragging labels, simulated unless given.
    InferSigns {
        /// Four labels in ascending energy, e.g. D,A,D,A.
        #[arg(long)]
        labels: Option<String>,
        #[arg(long, value_enum)]
        relation: Option<RelationArg>,
        #[arg(long, value_enum)]
        order: Option<OrderArg>,
    },
    /// Envelope design sweep over filling height and Al fraction.
    Sweep {
        #[arg(long)]
        afm: Option<PathBuf>,
        #[arg(long)]
        h_min: Option<f64>,
        #[arg(long)]
        h_max: Option<f64>,
        #[arg(long)]
        h_steps: Option<usize>,
        /// Comma-separated Al fractions.
        #[arg(long)]
        r: Option<String>,
        /// Grid points per axis.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Fit the two Voigt doublets of a spectrum and report |g_e|, |g_t|.
    Extract {
        /// CSV with energy_eV or energy_ueV and counts.
        #[arg(long)]
        spectrum: PathBuf,
        /// Comma-separated initial centres (eV).
        #[arg(long)]
        centers: Option<String>,
        /// Also write the full fit as JSON here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Fine structure splitting from a line position against polarizer angle.
    Fss {
        /// CSV with angle_deg and value_ueV.
        #[arg(long)]
        series: PathBuf,
    },
    /// Rectilinear Stokes estimate from two orthogonal line areas.
    StokesAreas {
        #[arg(long)]
        a1: f64,
        #[arg(long)]
        a2: f64,
    },
    /// Synthetic gate-voltage resonance-fluorescence map.
    Rfmap {
        #[arg(long, allow_hyphen_values = true)]
        stark_slope: Option<f64>,
        #[arg(long)]
        noise: Option<f64>,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Parse(_) | Error::Io { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

/// Run with full `argv` (program name first) and return the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("qdspin: error: {m}");
            2
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("qdspin: numerical failure: {m}");
            1
        }
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

/// Rounded to 12 significant digits and printed in the shortest form;
/// magnitudes below 1e-12 print as 0 so rounding noise does not show up as
/// `-0` or `1e-17`.
fn num(v: f64) -> String {
    if !v.is_finite() {
        return "NaN".into();
    }
    if v.abs() < 1e-12 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{rounded}")
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Failure::Usage(format!("bad number '{t}': {e}")))
        })
        .collect()
}

fn effective_config(cli: &Cli) -> std::result::Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| match e {
            Error::Io { path, source } => Failure::Usage(format!("cannot read config {path}: {source}")),
            other => Failure::Usage(other.to_string()),
        })?,
        None => RunConfig::default(),
    };
    if let Some(b) = cli.b {
        cfg.field.b = b;
    }
    if let Some(c) = cli.chi_deg {
        cfg.field.chi_deg = c;
    }
    if let Some(p) = cli.phi_deg {
        cfg.field.phi_deg = p;
    }
    if let Some(g) = cli.ge {
        cfg.electron.g_z = g;
        cfg.electron.g_perp = g;
    }
    if let Some(g) = cli.gt {
        cfg.trion.g_z = g;
        cfg.trion.g_perp = g;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Command::Sweep { afm: Some(p), .. } = &cli.command {
        cfg.design.afm = Some(p.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> std::result::Result<(), Failure> {
    let cfg = effective_config(&cli)?;
    let hash = config_hash(format!("{}\n{:?}", cfg.canonical(), cli.command).as_bytes());
    let table = match &cli.command {
        Command::Transitions => transitions(&cfg)?,
        Command::Polmap {
            phi_steps,
            alpha_steps,
        } => polmap(&cfg, *phi_steps, *alpha_steps)?,
        Command::Dragscan { line } => dragscan(&cfg, *line)?,
        Command::InferSigns {
            labels,
            relation,
            order,
        } => infer(&cfg, labels.as_deref(), *relation, *order)?,
        Command::Sweep {
            h_min,
            h_max,
            h_steps,
            r,
            grid,
            ..
        } => {
            let mut cfg = cfg.clone();
            let d = &mut cfg.design;
            d.h_min = h_min.unwrap_or(d.h_min);
            d.h_max = h_max.unwrap_or(d.h_max);
            d.h_steps = h_steps.unwrap_or(d.h_steps);
            if let Some(r) = r {
                d.r_values = parse_list(r)?;
            }
            if let Some(n) = grid {
                d.grid = [*n; 3];
            }
            sweep(&cfg)?
        }
        Command::Extract {
            spectrum,
            centers,
            report,
        } => extract(&cfg, spectrum, centers.as_deref(), report.as_deref())?,
        Command::Fss { series } => fss(series)?,
        Command::StokesAreas { a1, a2 } => {
            let mut t = Table::new(&["A1", "A2", "s1_lower_bound", "s1_contrast"]);
            t.rows.push(vec![
                num(*a1),
                num(*a2),
                num(rectilinear_stokes_from_areas(*a1, *a2)?),
                num(rectilinear_contrast(*a1, *a2)?),
            ]);
            t
        }
        Command::Rfmap { stark_slope, noise } => rfmap(&cfg, *stark_slope, *noise)?,
    };
    emit(&table, &hash, cli.out.as_ref())
}

fn emit(t: &Table, hash: &str, out: Option<&PathBuf>) -> std::result::Result<(), Failure> {
    let header: Vec<&str> = t.header.iter().map(|s| s.as_str()).collect();
    match out {
        Some(p) => {
            let f = std::fs::File::create(p)
                .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", p.display())))?;
            let mut w = std::io::BufWriter::new(f);
            write_table(&mut w, hash, &header, &t.rows)?;
            w.flush()
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))?;
        }
        None => {
            let stdout = std::io::stdout();
            write_table(stdout.lock(), hash, &header, &t.rows)?;
        }
    }
    Ok(())
}

fn transition_set(cfg: &RunConfig) -> Result<TransitionSet> {
    build_transition_set(
        &cfg.electron_g()?,
        &cfg.field_config()?,
        &cfg.hole_model()?,
        cfg.center_ev * 1e6,
    )
}

fn transitions(cfg: &RunConfig) -> Result<Table> {
    let set = transition_set(cfg)?;
    let tdm = set.tdm_angles();
    let mut t = Table::new(&[
        "line",
        "energy_ueV",
        "detuning_ueV",
        "electron",
        "trion",
        "ground_spin",
        "S0",
        "S1",
        "S2",
        "S3",
        "tdm_deg",
        "omega_e_ueV",
        "omega_t_ueV",
    ]);
    let level = |upper: bool| if upper { "upper" } else { "lower" };
    for k in 0..4 {
        let s = set.stokes[k];
        t.rows.push(vec![
            (k + 1).to_string(),
            num(set.energies[k]),
            num(set.energies[k] - set.omega_center),
            level(set.labels[k].electron_upper).into(),
            level(set.labels[k].trion_upper).into(),
            set.ground_spin[k].symbol().into(),
            num(s.s0),
            num(s.s1),
            num(s.s2),
            num(s.s3),
            num(tdm[k].to_degrees()),
            num(set.omega_e),
            num(set.omega_t),
        ]);
    }
    Ok(t)
}

fn polmap(cfg: &RunConfig, phi_steps: usize, alpha_steps: usize) -> Result<Table> {
    if phi_steps == 0 || alpha_steps == 0 {
        return crate::domain("step counts must be positive");
    }
    let pi = std::f64::consts::PI;
    let phis: Vec<f64> = (0..phi_steps).map(|i| pi * i as f64 / phi_steps as f64).collect();
    let alphas: Vec<f64> = (0..alpha_steps).map(|i| pi * i as f64 / alpha_steps as f64).collect();
    let f = cfg.field_config()?;
    let rows = polarization_map(&cfg.electron_g()?, &cfg.hole_model()?, f.b, f.chi, &phis, &alphas)?;
    let mut t = Table::new(&POLAR_MAP_HEADER);
    for r in rows {
        t.rows.push(vec![num(r.phi), num(r.alpha), (r.transition + 1).to_string(), num(r.rate_norm)]);
    }
    Ok(t)
}

fn dragscan(cfg: &RunConfig, line: usize) -> Result<Table> {
    if !(1..=4).contains(&line) {
        return crate::domain(format!("line must be 1-4, got {line}"));
    }
    let set = transition_set(cfg)?;
    let bath = cfg.bath()?;
    let spin = set.ground_spin[line - 1];
    let spec = cfg.drag_sweep();
    let up = drag_sweep(&bath, spin, &spec.with_direction(SweepDirection::Up))?;
    let down = drag_sweep(&bath, spin, &spec.with_direction(SweepDirection::Down))?;
    let label = classify_lineshape(&up, &down, bath.optical_linewidth)?;
    eprintln!("line {line}: ground spin {}, lineshape {}", spin.symbol(), label.symbol());
    let mut t = Table::new(&DRAG_SCAN_HEADER);
    for s in [&up, &down] {
        for k in 0..s.omega_l.len() {
            t.rows.push(vec![
                num(s.omega_l[k]),
                num(s.intensity[k]),
                num(s.i_x[k]),
                s.direction.name().into(),
            ]);
        }
    }
    Ok(t)
}

fn infer(
    cfg: &RunConfig,
    labels: Option<&str>,
    relation: Option<RelationArg>,
    order: Option<OrderArg>,
) -> Result<Table> {
    let set = transition_set(cfg)?;
    let labels: [DragLabel; 4] = match labels {
        Some(s) => {
            let v = s.split(',').map(DragLabel::parse).collect::<Result<Vec<_>>>()?;
            v.try_into()
                .map_err(|_| Error::Parse("--labels needs exactly four entries".into()))?
        }
        None => simulate_labels(&set, &cfg.bath()?, &cfg.drag_sweep())?,
    };
    let relation = match relation {
        Some(RelationArg::Same) => SignRelation::Same,
        Some(RelationArg::Opposite) => SignRelation::Opposite,
        None => SignRelation::from_tdm_angle(set.tdm_angles()[0], cfg.field_config()?.phi),
    };
    let order = match order {
        Some(OrderArg::ElectronSmaller) => MagnitudeOrder::ElectronSmaller,
        Some(OrderArg::ElectronLarger) => MagnitudeOrder::ElectronLarger,
        None => MagnitudeOrder::from_g(cfg.electron_g()?.g_perp(cfg.field_config()?.phi), cfg.trion_g_perp()?),
    };
    let (se, st) = infer_signs(relation, &labels, order)?;
    let mut t = Table::new(&["line", "detuning_ueV", "label", "relation", "order", "sign_g_e", "sign_g_t"]);
    for k in 0..4 {
        t.rows.push(vec![
            (k + 1).to_string(),
            num(set.energies[k] - set.omega_center),
            labels[k].symbol().into(),
            format!("{relation:?}").to_lowercase(),
            format!("{order:?}"),
            se.to_string(),
            st.to_string(),
        ]);
    }
    Ok(t)
}

fn sweep(cfg: &RunConfig) -> Result<Table> {
    let profile = match &cfg.design.afm {
        Some(p) => NanoholeProfile::from_csv(p)?,
        None => NanoholeProfile::default_afm(),
    };
    let d = &cfg.design;
    let hs = linspace(d.h_min, d.h_max, d.h_steps);
    let cells = design_sweep(&profile, &hs, &d.r_values, &cfg.design_settings()?)?;
    let mut t = Table::new(&SWEEP_HEADER);
    for c in cells {
        match c.result {
            Ok(p) => t.rows.push(p.csv_row()),
            Err(reason) => {
                eprintln!("qdspin: h={} r={} skipped: {reason}", c.h, c.r);
                t.rows.push(vec![num(c.h), num(c.r), "NaN".into(), "NaN".into(), "NaN".into()]);
            }
        }
    }
    Ok(t)
}

fn extract(
    cfg: &RunConfig,
    path: &Path,
    centers: Option<&str>,
    report: Option<&Path>,
) -> std::result::Result<Table, Failure> {
    let s = Spectrum::from_csv(path)?;
    let guesses = match centers {
        Some(c) => {
            let v = parse_list(c)?;
            let v: [f64; 4] = v
                .try_into()
                .map_err(|_| Failure::Usage("--centers needs exactly four values".into()))?;
            Some(v.map(|e| e * 1e6))
        }
        None => None,
    };
    let r = extract_g_factors(&s, cfg.field.b, guesses)?;
    if let Some(p) = report {
        let json = serde_json::to_string_pretty(&r).map_err(|e| Failure::Numerical(e.to_string()))?;
        std::fs::write(p, json + "\n")
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))?;
    }
    let mut t = Table::new(&[
        "g_e_abs",
        "g_t_abs",
        "E1_eV",
        "E2_eV",
        "E3_eV",
        "E4_eV",
        "sigma_low_ueV",
        "sigma_high_ueV",
    ]);
    let mut row = vec![num(r.g_e), num(r.g_t)];
    row.extend(r.centers.iter().map(|c| format!("{:.9}", c * 1e-6)));
    row.push(num(r.low.sigma));
    row.push(num(r.high.sigma));
    t.rows.push(row);
    Ok(t)
}

fn fss(path: &Path) -> Result<Table> {
    let data: NumericTable = crate::csvio::read_numeric(path)?;
    let (Some(a), Some(v)) = (data.column("angle_deg"), data.column("value_ueV")) else {
        return Err(Error::Parse(format!(
            "{}: series needs angle_deg and value_ueV columns",
            path.display()
        )));
    };
    let series = PolarizationSeries::new(a.iter().map(|d| d.to_radians()).collect(), v)?;
    let f = fss_fit(&series)?;
    let mut t = Table::new(&["fss_ueV", "fss_GHz", "eta_deg", "zero_flag"]);
    t.rows.push(vec![
        num(f.fss_uev),
        num(f.fss_ghz),
        f.eta_deg.map(num).unwrap_or_else(|| "NaN".into()),
        f.zero.to_string(),
    ]);
    Ok(t)
}

fn rfmap(cfg: &RunConfig, slope: Option<f64>, noise: Option<f64>) -> Result<Table> {
    let set = transition_set(cfg)?;
    let r = &cfg.rfmap;
    let mut spec = RfMapSpec::around(&set, slope.unwrap_or(r.stark_slope), r.linewidth_ghz);
    spec.windows = r.windows.iter().map(|w| (w[0], w[1])).collect();
    spec.gate = linspace(r.gate_min, r.gate_max, r.gate_steps);
    spec.gate_ref = r.gate_ref;
    spec.noise = noise.unwrap_or(r.noise);
    spec.seed = cfg.seed;
    let map = synth_rf_map(&set, &spec)?;
    let mut t = Table::new(&RF_MAP_HEADER);
    for row in map.rows() {
        t.rows.push(vec![num(row[0]), num(row[1]), num(row[2])]);
    }
    Ok(t)
}
