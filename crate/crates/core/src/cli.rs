//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 when a binding certificate check fails (the
//! ledger is printed), 2 on usage, parse, I/O or budget errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cert2d;
use crate::certkd;
use crate::energy;
use crate::error::{Error, Result};
use crate::explore::{self, Family, FamilySpec, Objective, SearchConfig};
use crate::ledger::{Ledger, Relation};
use crate::numset::{self, NumberSet};
use crate::rat::Rat;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "sumprod",
    version,
    about = "Exact sum-product computations and certificates"
)]
pub struct Cli {
    /// Worker threads for data-parallel stages.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Write the JSON result to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// Write the CSV table to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,

    /// Point-enumeration cap.
    #[arg(long, global = true, value_name = "N")]
    budget: Option<u128>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a set from a family and write it in set-file format.
    Gen {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        /// Output file (standard output if omitted).
        #[arg(short = 'o', value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Sizes of A, A+A, AA and A/A.
    Stats { set: PathBuf },
    /// Multiplicative energy, its dyadic decomposition and lower bound.
    Energy { set: PathBuf },
    /// Build and check the two-dimensional ray certificate.
    CertifyMain { set: PathBuf },
    /// Build and check the k-fold triangulation certificate.
    CertifyKfold {
        set: PathBuf,
        #[arg(short = 'k', default_value_t = 3)]
        k: usize,
    },
    /// Check the main inequalities exactly.
    Verify {
        set: PathBuf,
        /// Second set for the asymmetric inequality.
        #[arg(long, value_name = "PATH")]
        with: Option<PathBuf>,
    },
    /// Tabulate a family over several sizes.
    Sweep {
        #[command(flatten)]
        family: FamilyArgs,
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
    },
    /// Anneal for sets with small sums and products.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        range: u64,
        #[arg(long, default_value = "maxside_ratio")]
        objective: String,
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long, default_value_t = 0.995)]
        cooling: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// interval, ap, gp, randint or union_ap.
    #[arg(long, default_value = "interval")]
    family: String,
    #[arg(long, default_value = "1")]
    start: Rat,
    #[arg(long, default_value = "1")]
    step: Rat,
    #[arg(long, default_value = "2")]
    ratio: Rat,
    #[arg(long, default_value_t = 1000)]
    range: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl FamilyArgs {
    fn spec(&self, n: usize) -> Result<FamilySpec> {
        Ok(FamilySpec {
            kind: self.family.parse::<Family>()?,
            n,
            start: self.start.clone(),
            step: self.step.clone(),
            ratio: self.ratio.clone(),
            range: self.range,
            seed: self.seed,
        })
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing the human-readable report to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if cli.threads == 0 {
        let _ = writeln!(err, "error: --threads must be at least 1");
        return EXIT_ERROR;
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    // Reports are buffered so the computation can run inside the pool.
    let (result, buf) = pool.install(|| {
        let mut buf = Vec::new();
        let r = execute(&cli, &mut buf);
        (r, buf)
    });
    let _ = out.write_all(&buf);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn read_set(path: &Path) -> Result<NumberSet> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    NumberSet::parse(&text).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn write_json<T: Serialize>(cli: &Cli, value: &T) -> Result<()> {
    if let Some(p) = &cli.json {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        write_file(p, &s)?;
    }
    Ok(())
}

fn ledger_exit(ledger: &Ledger) -> i32 {
    if ledger.all_binding_hold() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Gen { family, n, output } => {
            let a = explore::generate(&family.spec(*n)?)?;
            match output {
                Some(p) => {
                    write_file(p, &a.to_file_string())?;
                    writeln!(out, "wrote {} elements to {}", a.len(), p.display())?;
                }
                None => out.write_all(a.to_file_string().as_bytes())?,
            }
            write_json(cli, &a)?;
            Ok(EXIT_OK)
        }
        Command::Stats { set } => {
            let a = read_set(set)?;
            let s = numset::stats(&a)?;
            writeln!(out, "|A|={}", s.size)?;
            writeln!(out, "|A+A|={}", s.sumset)?;
            writeln!(out, "|AA|={}", s.productset)?;
            writeln!(out, "|A/A|={}", s.ratioset)?;
            write_json(cli, &s)?;
            Ok(EXIT_OK)
        }
        Command::Energy { set } => {
            let a = read_set(set)?;
            if a.len() < 2 {
                writeln!(out, "|A|=1")?;
                writeln!(out, "E(A)={}", energy::energy(&a)?)?;
                return Ok(EXIT_OK);
            }
            let r = energy::energy_report(&a)?;
            writeln!(out, "|A|={}", r.size)?;
            writeln!(out, "E(A)={}", r.energy)?;
            writeln!(out, "|A|^4/|AA|={}", r.cs_lower_bound)?;
            writeln!(out, "dyadic class sums: {:?}", r.class_sums)?;
            writeln!(
                out,
                "dominant class I={} m={} classSum={}",
                r.dominant.index, r.dominant.m, r.dominant.class_sum
            )?;
            write_json(cli, &r)?;
            Ok(if r.cs_holds && r.dominant.pigeonhole_holds {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::CertifyMain { set } => {
            let a = read_set(set)?;
            let c = cert2d::build_certificate(&a)?;
            writeln!(out, "A={}", c.set)?;
            writeln!(out, "E(A)={} I={} m={}", c.energy, c.index, c.m)?;
            writeln!(
                out,
                "|unionS|={} |A+A|={} |AA|={}",
                c.union_size, c.sumset_size, c.productset_size
            )?;
            write!(out, "{}", c.inequalities)?;
            if let Some(p) = &cli.json {
                write_file(p, &(c.to_json()? + "\n"))?;
            }
            Ok(ledger_exit(&c.inequalities))
        }
        Command::CertifyKfold { set, k } => {
            let a = read_set(set)?;
            let budget = cli.budget.unwrap_or(certkd::DEFAULT_BUDGET);
            let c = certkd::build_kfold_certificate_with_budget(&a, *k, budget)?;
            writeln!(out, "A={} k={}", c.set, c.k)?;
            writeln!(out, "status: {}", c.status)?;
            writeln!(
                out,
                "cover: {} lines, {} points; heavy: {} lines (threshold {})",
                c.cover.lines.len(),
                c.cover.total(),
                c.heavy.len(),
                c.params.threshold
            )?;
            if let Some(t) = &c.tau {
                writeln!(
                    out,
                    "triangulation: {} simplices on {} points",
                    t.simplices.len(),
                    t.vertices.len()
                )?;
            }
            write!(out, "{}", c.checks)?;
            if let Some(p) = &cli.json {
                write_file(p, &(c.to_json()? + "\n"))?;
            }
            Ok(if c.passes() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::Verify { set, with } => {
            let a = read_set(set)?;
            let mut led = Ledger::new();
            led.extend(cert2d::verify_theorem_main(&a)?);
            led.extend(cert2d::verify_lemma(&a)?);
            led.extend(cert2d::verify_corollary(&a)?);
            let (cs, _) = energy::cs_lower_bound(&a)?;
            led.exact(
                "energyCauchySchwarz",
                Rat::from(energy::energy(&a)?),
                Relation::Ge,
                cs,
            );
            if let Some(b) = with {
                let b = read_set(b)?;
                led.extend(cert2d::verify_asym(&a, &b)?);
            }
            write!(out, "{led}")?;
            write_json(cli, &led)?;
            Ok(ledger_exit(&led))
        }
        Command::Sweep { family, ns } => {
            let spec = family.spec(0)?;
            let budget = cli.budget.unwrap_or(explore::SWEEP_DEFAULT_BUDGET);
            let t = explore::sweep(&spec, ns, budget)?;
            writeln!(
                out,
                "{:>6} {:>8} {:>10} {:>14}",
                "n", "|A+A|", "|AA|", "thm ratio"
            )?;
            for r in &t.rows {
                writeln!(
                    out,
                    "{:>6} {:>8} {:>10} {:>14.6}",
                    r.n,
                    r.stats.sumset,
                    r.stats.productset,
                    r.thm_ratio.to_f64()
                )?;
            }
            if let Some((n, req)) = t.truncated {
                writeln!(out, "stopped at n={n}: {req} pairs exceed budget {budget}")?;
            }
            if let Some(p) = &cli.csv {
                write_file(p, &t.to_csv_string()?)?;
            }
            write_json(cli, &t)?;
            Ok(EXIT_OK)
        }
        Command::Search {
            n,
            range,
            objective,
            iterations,
            chains,
            temperature,
            cooling,
            seed,
        } => {
            let mut cfg = SearchConfig::new(*n, *range, objective.parse::<Objective>()?, *seed);
            cfg.iterations = *iterations;
            cfg.chains = *chains;
            cfg.initial_temperature = *temperature;
            cfg.cooling = *cooling;
            let r = explore::anneal(&cfg)?;
            writeln!(out, "best={}", r.best)?;
            writeln!(
                out,
                "objective={} ({})",
                r.best_key,
                crate::rat::sig12(r.best_value)
            )?;
            writeln!(
                out,
                "|A+A|={} |AA|={} E(A)={}",
                r.audit.stats.sumset, r.audit.stats.productset, r.audit.energy
            )?;
            write!(out, "{}", r.audit.inequalities)?;
            write_json(cli, &r)?;
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_binding_entry_exits_1() {
        let mut led = Ledger::new();
        led.count("holds", 1, Relation::Le, 2);
        assert_eq!(ledger_exit(&led), EXIT_OK);
        led.exact_advisory("advisory", Rat::one(), Relation::Lt, Rat::zero());
        assert_eq!(ledger_exit(&led), EXIT_OK);
        led.count("binding", 3, Relation::Le, 2);
        assert_eq!(ledger_exit(&led), EXIT_CHECK_FAILED);
    }
}
