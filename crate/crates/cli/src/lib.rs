//! Command implementations for the `choichol` binary.
//!
//! Every command returns a process exit code:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 1    | I/O, parse or dimension error             |
//! | 2    | channel is not completely positive        |
//! | 3    | channel is not trace preserving (`--unitary`) |
//! | 4    | round-trip residual above `--tol`         |
//!
//! Output documents go to `--output` when given, otherwise to stdout with
//! the report moved to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use choichol::format::{ChannelFile, DilationFile, FactorsFile};
use choichol::random::Sampler;
use choichol::verify::{roundtrip_residual, test_inputs};
use choichol::{dilate, factorize, halmos_unitary, ChannelSpec, Error, Exec, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_CP: i32 = 2;
pub const EXIT_NOT_TP: i32 = 3;
pub const EXIT_RESIDUAL: i32 = 4;

/// Default complete-positivity tolerance, relative to the Choi norm.
pub const DEFAULT_CP_TOL: f64 = 1e-10;
/// Default round-trip gate.
pub const DEFAULT_ROUNDTRIP_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "choichol",
    version,
    about = "Choi-Cholesky dilations of completely positive maps"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Tolerance override (CP check, or the residual gate for `roundtrip`).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file for the produced document.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report CP / TP / Hermiticity verdicts for a channel file.
    Inspect { path: PathBuf },
    /// Write the block Cholesky factors of the Choi matrix.
    Decompose { path: PathBuf },
    /// Write the dilation operator V (and the unitary U with --unitary).
    Dilate {
        path: PathBuf,
        #[arg(long)]
        unitary: bool,
    },
    /// Check Ψ(V s V*) = Φ(s) on matrix units and random densities.
    Roundtrip {
        path: PathBuf,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        /// Adds this value to V[0, 0] before evaluating (negative control).
        #[arg(long, hide = true)]
        corrupt: Option<f64>,
    },
    /// Write a random CPTP channel built from a Stinespring isometry.
    Random {
        #[arg(long)]
        dim_in: usize,
        #[arg(long)]
        dim_out: usize,
        #[arg(long, default_value_t = 1)]
        env: usize,
    },
}

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_in: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_out: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cp: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tp: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tp_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hermitian_preserving: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hermiticity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruction_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_block_norms: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_block_norms: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isometry_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unitarity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roundtrip_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub elapsed_ms: f64,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            ..Default::default()
        }
    }

    fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string(self).expect("report serializes");
            s.push('\n');
            return s;
        }
        let value = serde_json::to_value(self).expect("report serializes");
        let mut s = String::new();
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                s.push_str(&format!("{k}={v}\n"));
            }
        }
        s
    }
}

struct Outcome {
    code: i32,
    document: Option<String>,
}

impl Outcome {
    fn code(code: i32) -> Self {
        Self {
            code,
            document: None,
        }
    }
}

/// Runs one parsed invocation, writing to the given streams.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let name = match &cli.command {
        Command::Inspect { .. } => "inspect",
        Command::Decompose { .. } => "decompose",
        Command::Dilate { .. } => "dilate",
        Command::Roundtrip { .. } => "roundtrip",
        Command::Random { .. } => "random",
    };
    let mut report = Report::new(name);
    let outcome = match execute(cli, &mut report) {
        Ok(o) => o,
        Err(e) => {
            report.error = Some(e.to_string());
            Outcome::code(match e {
                Error::NotCp(_) => EXIT_NOT_CP,
                _ => EXIT_ERROR,
            })
        }
    };
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut code = outcome.code;
    let report_to_stderr = outcome.document.is_some() && cli.global.output.is_none();
    if let Some(doc) = &outcome.document {
        let written = match &cli.global.output {
            Some(path) => std::fs::write(path, doc).map_err(|e| e.to_string()),
            None => stdout.write_all(doc.as_bytes()).map_err(|e| e.to_string()),
        };
        if let Err(e) = written {
            report.error = Some(format!("writing output: {e}"));
            code = EXIT_ERROR;
        }
    }
    let text = report.render(cli.global.json);
    let sink: &mut dyn Write = if report_to_stderr { stderr } else { stdout };
    let _ = sink.write_all(text.as_bytes());
    code
}

fn load(path: &Path, report: &mut Report) -> Result<ChannelSpec, Error> {
    let ch = ChannelFile::read(path)?.to_channel()?;
    report.dim_in = Some(ch.dim_in());
    report.dim_out = Some(ch.dim_out());
    Ok(ch)
}

/// Fills the CP fields and returns whether the channel is CP.
fn check_cp(ch: &ChannelSpec, tol: f64, report: &mut Report) -> Result<bool, Error> {
    let v = ch.is_cp(tol)?;
    report.cp = Some(v.verdict);
    report.min_eigenvalue = Some(v.min_eigenvalue);
    Ok(v.verdict)
}

fn execute(cli: &Cli, report: &mut Report) -> Result<Outcome, Error> {
    let g = &cli.global;
    let tolerances = Tolerances::default();
    match &cli.command {
        Command::Inspect { path } => {
            let ch = load(path, report)?;
            let tol = g.tol.unwrap_or(DEFAULT_CP_TOL);
            report.tolerance = Some(tol);
            let cp = check_cp(&ch, tol, report)?;
            let tp_residual = ch.tp_residual();
            report.tp = Some(tp_residual <= tol);
            report.tp_residual = Some(tp_residual);
            let herm = ch.hermiticity_residual();
            report.hermitian_preserving = Some(herm <= tol);
            report.hermiticity_residual = Some(herm);
            Ok(Outcome::code(if cp { EXIT_OK } else { EXIT_NOT_CP }))
        }
        Command::Decompose { path } => {
            let ch = load(path, report)?;
            if !check_cp(&ch, g.tol.unwrap_or(DEFAULT_CP_TOL), report)? {
                return Ok(Outcome::code(EXIT_NOT_CP));
            }
            let f = factorize(&ch, &tolerances)?;
            let choi = ch.full_choi();
            let diff = (f.reconstruct()?.data() - choi.data()).norm();
            let cn = choi.data().norm();
            report.reconstruction_residual = Some(if cn > 0.0 { diff / cn } else { diff });
            report.l_block_norms = Some(
                f.l_blocks()
                    .iter()
                    .map(|r| r.iter().map(|b| b.norm()).collect())
                    .collect(),
            );
            report.d_block_norms = Some((0..f.n_blocks()).map(|i| f.d(i).norm()).collect());
            Ok(Outcome {
                code: EXIT_OK,
                document: Some(FactorsFile::from_factors(&f).to_json()),
            })
        }
        Command::Dilate { path, unitary } => {
            let ch = load(path, report)?;
            if !check_cp(&ch, g.tol.unwrap_or(DEFAULT_CP_TOL), report)? {
                return Ok(Outcome::code(EXIT_NOT_CP));
            }
            let (_, v) = dilate(&ch, &tolerances)?;
            report.isometry_residual = Some(v.isometry_residual);
            report.sigma_max = Some(v.sigma_max);
            let u = if *unitary {
                if !v.is_isometry {
                    report.tp = Some(false);
                    report.error = Some("--unitary requires a trace-preserving channel".into());
                    return Ok(Outcome::code(EXIT_NOT_TP));
                }
                let u = halmos_unitary(&v)?;
                report.unitarity_residual = Some(u.unitarity_residual);
                Some(u)
            } else {
                None
            };
            let doc = DilationFile::new(&v, u.as_ref()).to_json();
            Ok(Outcome {
                code: EXIT_OK,
                document: Some(doc),
            })
        }
        Command::Roundtrip {
            path,
            samples,
            corrupt,
        } => {
            let ch = load(path, report)?;
            if !check_cp(&ch, DEFAULT_CP_TOL, report)? {
                return Ok(Outcome::code(EXIT_NOT_CP));
            }
            let (_, mut v) = dilate(&ch, &tolerances)?;
            if let Some(delta) = corrupt {
                v.v[(0, 0)] += choichol::C64::new(*delta, 0.0);
            }
            report.isometry_residual = Some(v.isometry_residual);
            let inputs = test_inputs(ch.dim_in(), *samples, g.seed);
            let residual = roundtrip_residual(&ch, &v, &inputs, Exec::default())?;
            let tol = g.tol.unwrap_or(DEFAULT_ROUNDTRIP_TOL);
            report.roundtrip_residual = Some(residual);
            report.tolerance = Some(tol);
            Ok(Outcome::code(if residual <= tol {
                EXIT_OK
            } else {
                EXIT_RESIDUAL
            }))
        }
        Command::Random {
            dim_in,
            dim_out,
            env,
        } => {
            let (ch, _) = Sampler::seeded(g.seed).stinespring_channel(*dim_in, *dim_out, *env)?;
            report.dim_in = Some(ch.dim_in());
            report.dim_out = Some(ch.dim_out());
            Ok(Outcome {
                code: EXIT_OK,
                document: Some(ChannelFile::from_channel(&ch).to_json()),
            })
        }
    }
}
