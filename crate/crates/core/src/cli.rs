//! Command-line front end: band structure, the embeddability function,
//! the embedding run (CSV + JSON sidecar), verification, and grid sweeps.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use crate::bands::band_structure;
use crate::cfunction::{c_exact, c_numeric, c_zeros_in_bands, scan_conjecture};
use crate::exact::rat_to_f64;
use crate::monodromy::{classify_point, PointTag};
use crate::operator::operator_from_path;
use crate::verify::verify_sequences;
use crate::wvn::{wvn_construct, BoundaryCase, WvnParams};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "jacobi-embed",
    about = "Embedded eigenvalues for periodic Jacobi matrices via slowly decaying oscillatory perturbations",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Spectral bands and band edges of the unperturbed periodic operator
    Bands {
        /// Operator JSON: {"a": [...], "b": [...]}, entries numbers or "p/q"
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The rational function whose interior zeros obstruct embedding
    Cfunc {
        #[arg(long)]
        operator: PathBuf,
        /// Also scan this many random operators and report zero counts
        #[arg(long)]
        scan_conjecture: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct the perturbation and candidate eigenvector at lambda
    Embed {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 1e-8)]
        tail_tol: f64,
        /// Boundary freedom: diagonal entry at site 1 (must differ from lambda)
        #[arg(long, allow_negative_numbers = true)]
        q1: Option<f64>,
        /// Boundary freedom: diagonal entry at site 2 (only used when u_2 = 0)
        #[arg(long, allow_negative_numbers = true)]
        q2: Option<f64>,
        /// CSV destination; a JSON sidecar is written next to it
        #[arg(long, default_value = "embed.csv")]
        out: PathBuf,
    },
    /// Check an embed CSV: residuals, finite-section spectrum, decay fit
    Verify {
        #[arg(long)]
        operator: PathBuf,
        /// CSV produced by the embed subcommand
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify lambda over a grid LO:HI:STEP and tabulate embeddability
    Sweep {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit status convention: 1 for I/O and parse failures, 2 for domain errors.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Parse(_) => 1,
        _ => 2,
    }
}

/// 17 significant digits: round-trips every f64.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bands { operator, out } => {
            let j = operator_from_path(&operator)?;
            let bs = band_structure(&j)?;
            let doc = json!({
                "period": j.period(),
                "bands": bs.bands,
                "parabolic": bs.parabolic().iter().map(|p| json!({
                    "lambda": p.lambda,
                    "sign": p.sign,
                    "mult": p.mult,
                })).collect::<Vec<_>>(),
                "degenerate": bs.degenerate,
            });
            emit(&out, &format!("{:#}\n", doc))
        }
        Command::Cfunc {
            operator,
            scan_conjecture: scan,
            seed,
            out,
        } => {
            let j = operator_from_path(&operator)?;
            let ce = c_exact(&j)?;
            let (num, den) = ce.f.integer_scaled_strings();
            let zeros = c_zeros_in_bands(&j)?;
            let mut doc = json!({
                "num": num,
                "den": den,
                "leading_order": ce.leading_order,
                "leading_coeff": rat_to_f64(&ce.leading_coeff),
                "zeros_in_bands": zeros,
            });
            if let Some(trials) = scan {
                let rows = scan_conjecture(trials, seed)?;
                doc["scan"] = json!(rows
                    .iter()
                    .map(|r| json!({
                        "period": r.period,
                        "seed": r.seed,
                        "zero_count": r.zero_count,
                    }))
                    .collect::<Vec<_>>());
            }
            emit(&out, &format!("{:#}\n", doc))
        }
        Command::Embed {
            operator,
            lambda,
            alpha,
            n,
            tail_tol,
            q1,
            q2,
            out,
        } => {
            let j = operator_from_path(&operator)?;
            let mut params = WvnParams::new(lambda)
                .with_alpha(alpha)
                .with_horizon(n)
                .with_tail_tol(tail_tol);
            params.q1_override = q1;
            params.q2_override = q2;
            let res = wvn_construct(&j, &params)?;

            let mut csv = String::with_capacity(64 * n);
            csv.push_str("n,u,q,omega\n");
            for i in 1..=n {
                csv.push_str(&format!(
                    "{i},{},{},{}\n",
                    fmt(res.u_at(i)),
                    fmt(res.q_at(i)),
                    fmt(res.omega_at(i))
                ));
            }
            std::fs::write(&out, csv)?;

            let sidecar = json!({
                "lambda": lambda,
                "alpha": alpha,
                "n": n,
                "tail_tol": tail_tol,
                "tail_cutoff": res.tail_cutoff,
                "est_tail_error": res.est_tail_error,
                "boundary": {
                    "case": match res.boundary.case_tag {
                        BoundaryCase::U2Nonzero => "u2_nonzero",
                        BoundaryCase::U2Zero => "u2_zero",
                    },
                    "u1": res.boundary.u1,
                    "q1": res.boundary.q1,
                    "q2": res.boundary.q2,
                },
                "c_overrides": res.c_applied.iter()
                    .map(|(k, v)| (k.to_string(), json!(v)))
                    .collect::<serde_json::Map<_, _>>(),
            });
            let sidecar_path = sidecar_path(&out);
            std::fs::write(sidecar_path, format!("{:#}\n", sidecar))?;
            Ok(())
        }
        Command::Verify {
            operator,
            input,
            lambda,
            alpha,
            out,
        } => {
            let j = operator_from_path(&operator)?;
            let (u, q) = read_embed_csv(&input)?;
            let report = verify_sequences(&j, lambda, alpha, &u, &q)?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Parse(e.to_string()))?;
            emit(&out, &format!("{text}\n"))
        }
        Command::Sweep {
            operator,
            grid,
            out,
        } => {
            let j = operator_from_path(&operator)?;
            let (lo, hi, step) = parse_grid(&grid)?;
            let zeros = if j.has_exact() {
                c_zeros_in_bands(&j)?
            } else {
                Vec::new()
            };
            let mut csv = String::from("lambda,trace,class,c,embeddable\n");
            let steps = ((hi - lo) / step).round() as usize;
            for i in 0..=steps {
                let lam = lo + i as f64 * step;
                if lam > hi + 0.5 * step {
                    break;
                }
                let class = classify_point(&j, Complex64::new(lam, 0.0));
                let (tag, c_field, embeddable) = match class.tag {
                    PointTag::Elliptic => {
                        let c = c_numeric(&j, lam)?;
                        let obstructed = if j.has_exact() {
                            zeros.iter().any(|&z| (z - lam).abs() <= 1e-9)
                        } else {
                            c.abs() < 1e-12
                        };
                        ("elliptic", fmt(c), !obstructed)
                    }
                    PointTag::Hyperbolic => ("hyperbolic", String::new(), false),
                    PointTag::Parabolic => ("parabolic", String::new(), false),
                };
                csv.push_str(&format!(
                    "{},{},{tag},{c_field},{embeddable}\n",
                    fmt(lam),
                    fmt(class.trace.re)
                ));
            }
            emit(&out, &csv)
        }
    }
}

fn sidecar_path(csv_path: &Path) -> PathBuf {
    let mut os = csv_path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

fn parse_grid(grid: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = grid.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("grid must be LO:HI:STEP, got {grid:?}")));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
        .collect::<Result<_>>()?;
    if !(nums[2] > 0.0) || nums[1] < nums[0] {
        return Err(Error::Parse(format!("degenerate grid {grid:?}")));
    }
    Ok((nums[0], nums[1], nums[2]))
}

/// Read back the `n,u,q,omega` CSV; rows must be 1..N in order.
fn read_embed_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "n,u,q,omega" => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header 'n,u,q,omega', got {other:?}"
            )))
        }
    }
    let mut u = Vec::new();
    let mut q = Vec::new();
    for (row, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::Parse(format!("row {}: need 4 columns", row + 2)));
        }
        let n: usize = cols[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: bad index", row + 2)))?;
        if n != row + 1 {
            return Err(Error::Parse(format!(
                "row {}: sites must be contiguous from 1",
                row + 2
            )));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("row {}: bad float {s:?}", row + 2)))
        };
        u.push(parse(cols[1])?);
        q.push(parse(cols[2])?);
    }
    Ok((u, q))
}
