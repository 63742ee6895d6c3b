//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::io::{
    broadened_csv, dataset_source, error_sweep_csv, line_list_csv, load_molecule, samples_csv,
    DATASETS,
};
use crate::molecule::{Axis, HtOrder, MoleculeSpec};
use crate::spectrum::{
    broaden, condon_profile, error_sweep, exact_profile, noncondon_profile, noncondon_terms,
    sample_profile, total_mass, VibronicModel, WidthMode,
};

#[derive(Debug, Parser)]
#[command(
    name = "vibronic",
    version,
    about = "Non-Condon vibronic spectra from linear combinations of Gaussian boson samplers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a line list (and optionally a broadened curve).
    Spectrum(SpectrumArgs),
    /// Error of the tau combination against the exact profile over several tau.
    ErrorSweep(SweepArgs),
    /// Finite-shot estimate of the tau combination.
    Sample(SampleArgs),
    /// Check a molecule file and report every problem.
    Validate {
        /// Bundled dataset name or path to a molecule file.
        #[arg(long)]
        molecule: String,
    },
    /// Bundled molecules.
    Datasets {
        #[command(subcommand)]
        action: DatasetAction,
    },
}

#[derive(Debug, Subcommand)]
enum DatasetAction {
    /// List bundled dataset names.
    List,
    /// Write a bundled dataset as a molecule file.
    Export {
        name: String,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    Condon,
    Ht1,
    Ht2,
}

impl From<OrderArg> for HtOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Condon => HtOrder::Condon,
            OrderArg::Ht1 => HtOrder::Ht1,
            OrderArg::Ht2 => HtOrder::Ht2,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WidthArg {
    Sigma,
    Fwhm,
}

#[derive(Debug, Args)]
struct Common {
    /// Bundled dataset name or path to a molecule file.
    #[arg(long)]
    molecule: String,
    /// Expansion order of the transition dipole; defaults to the highest the file supports.
    #[arg(long, value_enum)]
    order: Option<OrderArg>,
    /// Maximum photons per mode.
    #[arg(long, default_value_t = 3)]
    cutoff: usize,
    /// Comma-separated dipole axes (x,y,z); defaults to every axis in the file.
    #[arg(long, value_delimiter = ',')]
    axes: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    /// Expansion parameter of the four-term combination (1/D).
    #[arg(long, default_value_t = 1e-2)]
    tau: f64,
    /// Use the exact profile instead of the tau combination.
    #[arg(long)]
    exact: bool,
    /// Broadening width in cm^-1; no curve is produced without it.
    #[arg(long)]
    broaden_width: Option<f64>,
    /// Whether the width is a standard deviation or a full width at half maximum.
    #[arg(long, value_enum, default_value_t = WidthArg::Sigma)]
    broaden_mode: WidthArg,
    /// Grid spacing of the broadened curve in cm^-1.
    #[arg(long, default_value_t = 1.0)]
    grid_step: f64,
    /// Line list output; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Broadened curve output.
    #[arg(long)]
    broadened_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated tau values (at least three).
    #[arg(long, value_delimiter = ',', required = true)]
    taus: Vec<f64>,
    /// CSV output; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1e-2)]
    tau: f64,
    /// Shots per device.
    #[arg(long)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn highest_order(spec: &MoleculeSpec) -> HtOrder {
    if spec.tdm.values().any(|t| t.mu2.is_some()) {
        HtOrder::Ht2
    } else if spec.tdm.values().any(|t| t.mu1.is_some()) {
        HtOrder::Ht1
    } else {
        HtOrder::Condon
    }
}

struct Setup {
    model: VibronicModel,
    order: HtOrder,
    axes: Vec<Axis>,
    cutoff: usize,
}

fn setup(c: &Common, err: &mut dyn Write) -> Result<Setup> {
    let parsed = load_molecule(&c.molecule)?;
    for w in &parsed.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let axes = match &c.axes {
        None => parsed.spec.axes(),
        Some(list) => list
            .iter()
            .map(|s| Axis::parse(s).ok_or_else(|| Error::InvalidArgument(format!("unknown axis {s:?}"))))
            .collect::<Result<_>>()?,
    };
    let order = c.order.map_or_else(|| highest_order(&parsed.spec), HtOrder::from);
    Ok(Setup {
        model: VibronicModel::new(&parsed.spec)?,
        order,
        axes,
        cutoff: c.cutoff,
    })
}

fn emit(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Spectrum(a) => {
            let s = setup(&a.common, err)?;
            let profile = if s.order == HtOrder::Condon {
                condon_profile(&s.model, s.cutoff)?
            } else if a.exact {
                exact_profile(&s.model, &s.axes, s.order, s.cutoff)?
            } else {
                noncondon_profile(&s.model, &s.axes, s.order, a.tau, s.cutoff)?
            };
            let _ = writeln!(
                err,
                "{} [{}] {} cutoff {}: total mass {}",
                profile.meta.molecule,
                s.order,
                profile.meta.kind,
                s.cutoff,
                total_mass(&profile)
            );
            for l in profile.top_lines(5) {
                let _ = writeln!(err, "  {:>12.4} cm-1  {:.6}", l.frequency, l.probability);
            }
            emit(&a.out, &line_list_csv(&profile), out)?;
            if let Some(width) = a.broaden_width {
                let mode = match a.broaden_mode {
                    WidthArg::Sigma => WidthMode::Sigma,
                    WidthArg::Fwhm => WidthMode::Fwhm,
                };
                let b = broaden(&profile, width, mode, a.grid_step)?;
                if b.clamped_mass > 0.0 {
                    let _ = writeln!(err, "clamped negative mass before broadening: {}", b.clamped_mass);
                }
                match &a.broadened_out {
                    Some(p) => std::fs::write(p, broadened_csv(&b))?,
                    None if a.out.is_some() => out.write_all(broadened_csv(&b).as_bytes())?,
                    None => {
                        let _ = writeln!(err, "no --broadened-out given; curve not written");
                    }
                }
            }
        }
        Command::ErrorSweep(a) => {
            let s = setup(&a.common, err)?;
            let sweep = error_sweep(&s.model, &s.axes, s.order, &a.taus, s.cutoff)?;
            match sweep.slope {
                Some(k) => {
                    let _ = writeln!(err, "fitted slope of log E against log(1/tau): {k}");
                }
                None => {
                    let _ = writeln!(err, "errors at rounding level; slope not fitted");
                }
            }
            emit(&a.out, &error_sweep_csv(&sweep), out)?;
        }
        Command::Sample(a) => {
            let s = setup(&a.common, err)?;
            let terms = noncondon_terms(&s.model, &s.axes, s.order, a.tau, s.cutoff)?;
            let result = sample_profile(&terms, a.shots, a.seed)?;
            let _ = writeln!(err, "total variation distance to the noiseless profile: {}", result.tv_distance);
            emit(&a.out, &samples_csv(&result), out)?;
        }
        Command::Validate { molecule } => {
            let parsed = load_molecule(&molecule)?;
            for w in &parsed.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            VibronicModel::new(&parsed.spec)?;
            let _ = writeln!(out, "{}: ok ({} modes)", parsed.spec.name, parsed.spec.modes());
        }
        Command::Datasets { action } => match action {
            DatasetAction::List => {
                for (name, _) in DATASETS {
                    writeln!(out, "{name}")?;
                }
            }
            DatasetAction::Export { name, out: path } => {
                let src = dataset_source(&name)
                    .ok_or_else(|| Error::InvalidArgument(format!("no bundled dataset named {name:?}")))?;
                emit(&path, src, out)?;
            }
        },
    }
    Ok(())
}

/// Runs the CLI on `argv` and returns the process exit code: 0 on success,
/// 1 for invalid input, 2 for numerical failures.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 1;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}
