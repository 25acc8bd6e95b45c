use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use piep::config::{parse_config_report, RunConfig};
use piep::csv_out::{write_grid, write_trace};
use piep::{
    build_generator, jordan_chain, optimal_period, run_scenario, spectral_decompose,
    sweep_perturbation_length, sweep_period_length, Error, SpectralData, C64,
};

#[derive(Parser)]
#[command(name = "piep", version, about = "Coupled non-Hermitian waveguides near the exceptional point")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, eigenvectors, overlap and c-parameter at both couplings.
    Spectrum(Common),
    /// Propagate one state and write the trace CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Use the saturable-gain equations (RK4).
        #[arg(long)]
        nonlinear: bool,
    },
    /// Transmission ratio against window length.
    SweepDz(Common),
    /// Transmission ratio over window length and period.
    SweepGrid(Common),
    /// Jordan chain of the base generator at the exceptional point.
    Ep(Common),
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let (cfg, report) = parse_config_report(&text)?;
    for (key, value) in &report.defaults_applied {
        eprintln!("default: {key} = {value}");
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    let res = match out {
        Some(p) => fs::File::create(p).and_then(|file| {
            let mut w = io::BufWriter::new(file);
            f(&mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    };
    res.map_err(|e| {
        let name = out.map_or("<stdout>".to_string(), |p| p.display().to_string());
        Failure::Numerical(format!("{name}: {e}"))
    })
}

fn fmt_c(c: C64) -> String {
    format!("{} {:+}i", c.re, c.im)
}

fn describe(w: &mut dyn Write, label: &str, kappa2: f64, sd: &SpectralData) -> io::Result<()> {
    writeln!(w, "[{label}] kappa2/g2 = {kappa2}")?;
    writeln!(w, "e1 = {}", fmt_c(sd.e1()))?;
    writeln!(w, "e2 = {}", fmt_c(sd.e2()))?;
    writeln!(w, "r1 = ({}, {})", fmt_c(sd.right[0][0]), fmt_c(sd.right[0][1]))?;
    writeln!(w, "r2 = ({}, {})", fmt_c(sd.right[1][0]), fmt_c(sd.right[1][1]))?;
    writeln!(w, "overlap = {}", fmt_c(sd.overlap))?;
    writeln!(w, "|overlap| = {}", sd.overlap.norm())?;
    writeln!(w, "|c| = {}", sd.c_param.norm())?;
    writeln!(w, "exceptional_point = {}", sd.is_defective)
}

fn spectrum(cfg: &RunConfig, out: Option<&Path>) -> Result<(), Failure> {
    let base = cfg.params()?;
    let pert = base.with_kappa(C64::new((cfg.kappa2_in * cfg.g2).sqrt(), 0.0));
    let sd_base = spectral_decompose(&build_generator(&base)?, cfg.ep_tol)?;
    let sd_pert = spectral_decompose(&build_generator(&pert)?, cfg.ep_tol)?;
    let period = optimal_period(&base).ok();
    emit(out, |w| {
        describe(w, "base", cfg.kappa2_out, &sd_base)?;
        match period {
            Some(d) => writeln!(w, "optimal_period = {d}")?,
            None => writeln!(w, "optimal_period = none")?,
        }
        writeln!(w)?;
        describe(w, "perturbed", cfg.kappa2_in, &sd_pert)
    })
}

fn ep_report(cfg: &RunConfig, out: Option<&Path>) -> Result<(), Failure> {
    let gen = build_generator(&cfg.params()?)?;
    let center = gen.matrix().trace() * 0.5;
    let chain = jordan_chain(&gen, center, cfg.ep_tol.max(1e-12))?;
    emit(out, |w| {
        writeln!(w, "eigenvalue = {}", fmt_c(chain.eigenvalue))?;
        writeln!(
            w,
            "eigenvector = ({}, {})",
            fmt_c(chain.eigenvector[0]),
            fmt_c(chain.eigenvector[1])
        )?;
        writeln!(
            w,
            "adjoint = ({}, {})",
            fmt_c(chain.adjoint[0]),
            fmt_c(chain.adjoint[1])
        )?;
        writeln!(w, "residual = {:e}", chain.residual)
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Spectrum(c) => spectrum(&load(&c.config)?, c.out.as_deref()),
        Command::Ep(c) => ep_report(&load(&c.config)?, c.out.as_deref()),
        Command::Simulate { common, nonlinear } => {
            let sc = load(&common.config)?.scenario(nonlinear)?;
            let result = run_scenario(&sc)?;
            emit(common.out.as_deref(), |w| write_trace(&result, w))
        }
        Command::SweepDz(c) => {
            let cfg = load(&c.config)?;
            let sc = cfg.scenario(false)?;
            let rows = sweep_perturbation_length(&sc, &cfg.dz_grid(&sc)?)?;
            emit(c.out.as_deref(), |w| write_grid(&rows, w))
        }
        Command::SweepGrid(c) => {
            let cfg = load(&c.config)?;
            let sc = cfg.scenario(false)?;
            let rows = sweep_period_length(&sc, &cfg.period_ratios(), &cfg.dz_grid(&sc)?)?;
            emit(c.out.as_deref(), |w| write_grid(&rows, w))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            ExitCode::from(2)
        }
    }
}
