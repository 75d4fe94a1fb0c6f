//! Command-line entry point.
//!
//! Subcommands: `construct` (build + verify a family and write the JSON
//! artifact), `verify` (re-check an artifact on a fresh grid), `diagnose`
//! (quotient/spherical heat map for exemplar families), `phipsi` (dump the
//! structural-form registry) and `hermite` (standalone interpolation).
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 internal
//! or numerical error. Failures print a machine-readable JSON line to stderr.

use clap::{Args, Parser, Subcommand, ValueEnum};
use martylab::artifact::{
    self, FamilyArtifact, HermiteDataArtifact, HeatCsvRow, LoadedFamily, RegistryArtifact,
    VerifyCsvRow,
};
use martylab::construct::{construct_family, ConstructOptions};
use martylab::error::{Error, Result};
use martylab::expcalc::{ExpProduct, PhiPsiRegistry};
use martylab::hermite::{hermite_interpolate, hermite_oracle};
use martylab::numerics::{BigComplex, BigReal, Precision};
use martylab::poly::Poly;
use martylab::verify::{
    grid_sup, marty_quotient, remark3_family, spherical_derivative, MemberEvaluator, Region,
};
use std::path::PathBuf;
use std::process::ExitCode;

const PRECISION_ENV: &str = "MARTYLAB_PRECISION";

#[derive(Parser)]
#[command(
    name = "martylab",
    about = "Construction and grid verification of holomorphic families under Marty-type differential inequalities",
    version
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Working precision in bits (>= 64); MARTYLAB_PRECISION overrides the
    /// default of 256, this flag overrides both.
    #[arg(long, global = true)]
    precision: Option<u32>,

    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Build the counterexample family for (k0, alpha, C) and verify it.
    Construct {
        #[arg(long)]
        k0: u32,
        /// Decimal value > 1.
        #[arg(long)]
        alpha: String,
        /// Decimal value > 0.
        #[arg(long = "C")]
        c: String,
        /// Member indices: a range `1..6` or a list `2,4,8`.
        #[arg(long)]
        n: String,
        /// Output JSON artifact.
        #[arg(long)]
        out: PathBuf,
        /// Verification grid resolution per axis.
        #[arg(long, default_value_t = 401)]
        grid: usize,
        /// Samples per circle in boundary searches.
        #[arg(long, default_value_t = 4096)]
        circle_samples: usize,
    },

    /// Re-verify a family artifact on a fresh quotient grid.
    Verify {
        /// Family artifact written by `construct`.
        file: PathBuf,
        #[arg(long, default_value_t = 201)]
        grid: usize,
        /// Scale factor applied to the threshold C before comparison.
        #[arg(long, default_value = "1")]
        threshold_scale: String,
        /// Optional CSV report path.
        #[arg(long)]
        report: Option<PathBuf>,
    },

    /// Heat map of quotient and spherical derivative for an exemplar family.
    Diagnose {
        #[arg(long, value_enum, default_value_t = ExampleFamily::Remark3)]
        example: ExampleFamily,
        /// Derivative order k >= 2 of the family (zeta = e^{2 pi i / k}).
        #[arg(long)]
        k: u32,
        /// Member index n >= 1.
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 201)]
        grid: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },

    /// Dump the structural-form polynomials phi_k, psi_k up to order k.
    Phipsi {
        /// Largest order to include (>= 2).
        #[arg(long)]
        k: u32,
        /// Output JSON path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Interpolate Hermite data from JSON and write the polynomial as JSON.
    Hermite {
        /// Input HermiteData JSON.
        #[arg(long)]
        input: PathBuf,
        /// Output polynomial JSON.
        #[arg(long)]
        out: PathBuf,
        /// Use the dense linear-solve oracle instead of the Newton scheme.
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleFamily {
    Remark3,
}

fn resolve_precision(flag: Option<u32>) -> Result<Precision> {
    if let Some(bits) = flag {
        return Precision::new(bits);
    }
    if let Ok(var) = std::env::var(PRECISION_ENV) {
        let bits: u32 = var.parse().map_err(|_| {
            Error::InvalidParameter(format!("{PRECISION_ENV} must be an integer, got `{var}`"))
        })?;
        return Precision::new(bits);
    }
    Ok(Precision::default())
}

fn parse_member_list(spec: &str) -> Result<Vec<u32>> {
    let bad = |s: &str| Error::InvalidParameter(format!("bad member list `{s}` (want A..B or a,b,c)"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| bad(spec))?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad(spec))?;
        if lo == 0 || hi < lo {
            return Err(bad(spec));
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|part| part.trim().parse::<u32>().map_err(|_| bad(spec)))
        .collect()
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: usize) {
    if threads > 0 {
        // ignore failure: the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: usize) {}

fn run(cli: Cli) -> Result<()> {
    let precision = resolve_precision(cli.global.precision)?;
    configure_threads(cli.global.threads);

    match cli.command {
        Command::Construct {
            k0,
            alpha,
            c,
            n,
            out,
            grid,
            circle_samples,
        } => {
            let alpha = BigReal::parse(&alpha, precision)
                .map_err(|e| Error::InvalidParameter(format!("--alpha: {e}")))?;
            let c = BigReal::parse(&c, precision)
                .map_err(|e| Error::InvalidParameter(format!("--C: {e}")))?;
            let members = parse_member_list(&n)?;
            let options = ConstructOptions {
                grid_resolution: grid,
                circle_samples,
                ..ConstructOptions::default()
            };
            let family = construct_family(k0, alpha, c, &members, precision, &options)?;
            artifact::write_json(&out, &FamilyArtifact::from_family(&family))?;
            for (member, verification) in family.members.iter().zip(&family.verification) {
                println!(
                    "n={}: log c_n = {:.6e}, log a_n = {:.6e}, max log quotient {:.6e} <= log C {:.6e} ({} samples)",
                    member.n,
                    member.log_cn.to_f64(),
                    member.log_an.to_f64(),
                    verification.quotient.max_log_quotient.to_f64(),
                    verification.quotient.threshold_log.to_f64(),
                    verification.quotient.samples_evaluated,
                );
            }
            println!("wrote {}", out.display());
            Ok(())
        }

        Command::Verify {
            file,
            grid,
            threshold_scale,
            report,
        } => {
            let loaded = LoadedFamily::from_artifact(&artifact::read_json(&file)?)?;
            let prec = loaded.spec.precision;
            let scale = BigReal::parse(&threshold_scale, prec)
                .map_err(|e| Error::InvalidParameter(format!("--threshold-scale: {e}")))?;
            if !(scale > BigReal::zero(prec)) {
                return Err(Error::InvalidParameter(
                    "--threshold-scale must be > 0".to_string(),
                ));
            }
            let threshold_log = &loaded.spec.log_c() + &scale.ln();
            let region = Region::disk(BigComplex::zero(prec), BigReal::from_u32(2, prec));

            let mut rows = Vec::new();
            let mut failed = None;
            for member in &loaded.members {
                let h = ExpProduct::new(
                    Poly::unit_roots_poly(member.n as usize, prec),
                    member.pn.clone(),
                );
                let evaluator =
                    MemberEvaluator::from_parts(member.n, &h, member.log_an.clone(), loaded.spec.k0);
                let result = grid_sup(
                    &evaluator,
                    &region,
                    loaded.spec.k0,
                    &loaded.spec.alpha,
                    grid,
                    &threshold_log,
                );
                println!(
                    "n={}: max log quotient {:.6e} vs threshold {:.6e} -> {}",
                    member.n,
                    result.max_log_quotient.to_f64(),
                    threshold_log.to_f64(),
                    if result.pass { "pass" } else { "FAIL" },
                );
                if !result.pass && failed.is_none() {
                    failed = Some((member.n, result.max_log_quotient.clone()));
                }
                rows.push(VerifyCsvRow {
                    n: member.n,
                    resolution: result.resolution,
                    max_log_quotient: result.max_log_quotient,
                    argmax: result.argmax,
                    pass: result.pass,
                });
            }
            if let Some(path) = report {
                artifact::write_verify_csv(&path, &rows)?;
                println!("wrote {}", path.display());
            }
            match failed {
                None => Ok(()),
                Some((n, max)) => Err(Error::VerificationFailed {
                    stage: "grid_sup",
                    n,
                    detail: format!("max log quotient {} exceeds the threshold", max.to_f64()),
                }),
            }
        }

        Command::Diagnose {
            example: ExampleFamily::Remark3,
            k,
            n,
            grid,
            out,
        } => {
            let family = remark3_family(k, n, precision)?;
            let region = family.strip_region(BigReal::from_u32(3, precision));
            let (re_min, re_max, im_min, im_max) = region.bounding_box();
            let steps = BigReal::from_usize(grid.max(2) - 1, precision);
            let re_step = &(&re_max - &re_min) / &steps;
            let im_step = &(&im_max - &im_min) / &steps;
            let alpha_one = BigReal::one(precision);

            let mut rows = Vec::new();
            for row in 0..grid {
                for col in 0..grid {
                    let z = BigComplex::new(
                        &re_min + &(&BigReal::from_usize(col, precision) * &re_step),
                        &im_min + &(&BigReal::from_usize(row, precision) * &im_step),
                    );
                    if !region.contains(&z) {
                        continue;
                    }
                    rows.push(HeatCsvRow {
                        log_quotient: marty_quotient(&family, &z, k, &alpha_one),
                        log_spherical: spherical_derivative(&family, &z),
                        z,
                    });
                }
            }
            artifact::write_heat_csv(&out, &rows)?;
            println!("wrote {} ({} samples)", out.display(), rows.len());
            Ok(())
        }

        Command::Phipsi { k, out } => {
            let reg = PhiPsiRegistry::build(k)?;
            let dump = RegistryArtifact::from_registry(&reg)?;
            match out {
                Some(path) => {
                    artifact::write_json(&path, &dump)?;
                    println!("wrote {}", path.display());
                }
                None => {
                    let bytes = artifact::to_json_bytes(&dump)?;
                    std::io::Write::write_all(&mut std::io::stdout(), &bytes)?;
                }
            }
            Ok(())
        }

        Command::Hermite { input, out, oracle } => {
            let data: HermiteDataArtifact = artifact::read_json(&input)?;
            let data = data.to_data(precision)?;
            let poly = if oracle {
                hermite_oracle(&data)?
            } else {
                hermite_interpolate(&data)?
            };
            artifact::write_json(&out, &artifact::poly_to_pairs(&poly))?;
            println!(
                "wrote {} (degree {})",
                out.display(),
                poly.degree().map_or(-1i64, |d| d as i64)
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = err.exit_code();
            let kind = match code {
                1 => "verification_failure",
                2 => "usage",
                _ => "internal",
            };
            let summary = serde_json::json!({
                "error": kind,
                "message": err.to_string(),
                "exit_code": code,
            });
            eprintln!("{summary}");
            ExitCode::from(code)
        }
    }
}
