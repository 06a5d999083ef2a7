//! `majorize`: JSON-in, JSON-out front end for the majorization toolkit.
//!
//! Exit codes: 0 when the checked relation holds (or a report was produced),
//! 1 when it fails and a certificate is attached, 2 on any input error. On
//! exit 2 nothing is written to `--out`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use majorization::discretize::approximate_operator;
use majorization::functionals::phi_divergence;
use majorization::majorize::{
    hlp_witness_with, matrix_majorize_with, multivariate_majorize_with,
    scalar_equivalence_report_with, scalar_verdict, sublinear_sweep_with, MajorizationVerdict,
    MajorizeOptions,
};
use majorization::tolerance::Tolerance;
use majorization::{ConvexFunctional, StochasticKernel, VectorStepFunction};

#[derive(Parser, Debug)]
#[command(
    name = "majorize",
    version,
    about = "Check majorization relations between step functions"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Relative tolerance for mass and value comparisons.
    #[arg(long, global = true, default_value_t = majorization::tolerance::EPS_MASS)]
    tolerance: f64,
    /// Smallest separation a certificate must achieve.
    #[arg(long, global = true, default_value_t = majorization::tolerance::CERTIFICATE_MARGIN)]
    certificate_margin: f64,
    /// Seed for sampled functionals.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Solve linear programs in exact rational arithmetic.
    #[arg(long, global = true)]
    exact: bool,
    /// Write JSON here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scalar majorization f ≺ g.
    CheckVector { f: PathBuf, g: PathBuf },
    /// Matrix majorization f ≺_M g by a stochastic kernel.
    CheckMatrix {
        f: PathBuf,
        g: PathBuf,
        /// Also report the worst margin over this many sampled sublinear functionals.
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// Multivariate majorization by a doubly stochastic kernel.
    CheckMultivariate { f: PathBuf, g: PathBuf },
    /// Doubly stochastic matrix S with S y = x for counting-measure vectors.
    WitnessHlp { x: PathBuf, y: PathBuf },
    /// Decreasing rearrangement of a scalar function.
    Rearrange { f: PathBuf },
    /// φ-divergence ∫ h φ(f/h) dμ.
    Divergence {
        f: PathBuf,
        h: PathBuf,
        phi: PathBuf,
    },
    /// Perspective of a convex functional.
    Perspective { phi: PathBuf },
    /// L¹ error of level-set block averaging of K f at levels 1..=levels.
    ApproxDemo {
        f: PathBuf,
        #[arg(long, default_value_t = 10)]
        levels: u32,
        /// Kernel to approximate; the identity when omitted.
        #[arg(long)]
        kernel: Option<PathBuf>,
    },
    /// Stochastic, convex and doubly stochastic forms of scalar majorization.
    ScalarEquiv {
        f: PathBuf,
        h: PathBuf,
        g: PathBuf,
        k: PathBuf,
    },
}

/// Writes every float with 17 significant digits.
struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

fn render<T: Serialize>(value: &T) -> Result<String, String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser).map_err(|e| e.to_string())?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| e.to_string())
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

struct Output {
    json: String,
    code: u8,
}

fn report<T: Serialize>(value: &T) -> Result<Output, String> {
    Ok(Output {
        json: render(value)?,
        code: 0,
    })
}

fn verdict(v: &MajorizationVerdict) -> Result<Output, String> {
    Ok(Output {
        json: render(v)?,
        code: if v.holds { 0 } else { 1 },
    })
}

fn options(run: &RunConfig) -> Result<MajorizeOptions, String> {
    let valid = |v: f64| v.is_finite() && v > 0.0;
    if !valid(run.tolerance) || !valid(run.certificate_margin) {
        return Err("tolerances must be positive and finite".into());
    }
    let mut opts = if run.exact {
        MajorizeOptions::exact()
    } else {
        MajorizeOptions::default()
    };
    opts.tolerance = Tolerance {
        eps_mass: run.tolerance,
        certificate_margin: run.certificate_margin,
    };
    Ok(opts)
}

fn run(cli: &Cli) -> Result<Output, String> {
    let opts = options(&cli.run)?;
    let e = |err: majorization::Error| err.to_string();
    match &cli.command {
        Command::CheckVector { f, g } => {
            let (f, g): (VectorStepFunction, VectorStepFunction) = (load(f)?, load(g)?);
            verdict(&scalar_verdict(&f, &g, &opts).map_err(e)?)
        }
        Command::CheckMatrix { f, g, sweep } => {
            let (f, g): (VectorStepFunction, VectorStepFunction) = (load(f)?, load(g)?);
            let v = matrix_majorize_with(&f, &g, &opts).map_err(e)?;
            match sweep {
                None => verdict(&v),
                Some(trials) => {
                    let extra: Vec<_> = v.certificate.iter().cloned().collect();
                    let worst =
                        sublinear_sweep_with(&f, &g, *trials, cli.run.seed, &extra).map_err(e)?;
                    #[derive(Serialize)]
                    struct Swept<'a> {
                        #[serde(flatten)]
                        verdict: &'a MajorizationVerdict,
                        sweep_min_margin: f64,
                    }
                    Ok(Output {
                        json: render(&Swept {
                            verdict: &v,
                            sweep_min_margin: worst,
                        })?,
                        code: if v.holds { 0 } else { 1 },
                    })
                }
            }
        }
        Command::CheckMultivariate { f, g } => {
            let (f, g): (VectorStepFunction, VectorStepFunction) = (load(f)?, load(g)?);
            verdict(&multivariate_majorize_with(&f, &g, &opts).map_err(e)?)
        }
        Command::WitnessHlp { x, y } => {
            let (fx, fy): (VectorStepFunction, VectorStepFunction) = (load(x)?, load(y)?);
            let counting = |v: &VectorStepFunction| v.space().weights().iter().all(|&w| w == 1.0);
            if !counting(&fx) || !counting(&fy) || fx.len() != fy.len() {
                return Err(
                    "witness-hlp needs two counting-measure vectors of equal length".into(),
                );
            }
            let (xs, ys) = (
                fx.scalar_values().map_err(e)?,
                fy.scalar_values().map_err(e)?,
            );
            match hlp_witness_with(&xs, &ys, &opts.tolerance) {
                Ok(s) => report(&s),
                Err(majorization::Error::NotMajorized(_)) => {
                    verdict(&scalar_verdict(&fx, &fy, &opts).map_err(e)?)
                }
                Err(err) => Err(err.to_string()),
            }
        }
        Command::Rearrange { f } => {
            let f: VectorStepFunction = load(f)?;
            report(&f.decreasing_rearrangement().map_err(e)?)
        }
        Command::Divergence { f, h, phi } => {
            let (f, h): (VectorStepFunction, VectorStepFunction) = (load(f)?, load(h)?);
            let phi: ConvexFunctional = load(phi)?;
            #[derive(Serialize)]
            struct Divergence {
                divergence: f64,
            }
            report(&Divergence {
                divergence: phi_divergence(&phi, &f, &h).map_err(e)?,
            })
        }
        Command::Perspective { phi } => {
            let phi: ConvexFunctional = load(phi)?;
            report(&phi.perspective())
        }
        Command::ApproxDemo { f, levels, kernel } => {
            let f: VectorStepFunction = load(f)?;
            let kernel = match kernel {
                Some(path) => load::<StochasticKernel>(path)?,
                None => StochasticKernel::identity(f.space()),
            };
            report(&approximate_operator(&kernel, &[f], *levels).map_err(e)?)
        }
        Command::ScalarEquiv { f, h, g, k } => {
            let (f, h): (VectorStepFunction, VectorStepFunction) = (load(f)?, load(h)?);
            let (g, k): (VectorStepFunction, VectorStepFunction) = (load(g)?, load(k)?);
            report(&scalar_equivalence_report_with(&f, &h, &g, &k, &opts).map_err(e)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 2 } else { 0 });
        }
    };
    let output = match run(&cli) {
        Ok(output) => output,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.run.out {
        Some(path) => fs::write(path, &output.json).map_err(|e| format!("{}: {e}", path.display())),
        None => io::stdout()
            .write_all(output.json.as_bytes())
            .map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => ExitCode::from(output.code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
