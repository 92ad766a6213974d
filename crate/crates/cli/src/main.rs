use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Parser, Subcommand};
use ffenergy_cli::context::ContextOptions;
use ffenergy_cli::quantity;
use ffenergy_cli::report::{self, BoundReport, ReportFormat, Row};
use ffenergy_cli::selftest;
use ffenergy_cli::sweep::{run_sweep, GridSpec, RunOptions, SweepSpec};
use ffenergy_cli::weights::WeightSpec;
use ffenergy_core::classes::{find_m_alpha, MAlphaOptions};
use ffenergy_core::energy::{energy_sqrt_bruteforce, EnergyValue};
use ffenergy_core::field::DEFAULT_TABLE_BUDGET;
use std::path::PathBuf;

/// Exact evaluators and bound-ratio reports for additive energies, bilinear
/// character sums and smooth/square-free residue-class counts over
/// F_q\[X\]/F(X).
#[derive(Parser)]
#[command(name = "ffenergy", version, about)]
struct Cli {
    /// Field spec "p^e^r:coeffs" (e.g. "3^1^3:1,2,0,1") or "p^e^r" with
    /// --auto-modulus.
    #[arg(long, global = true)]
    field: Option<String>,

    /// Pick the smallest-encoding monic irreducible of degree r when the
    /// field spec carries no modulus coefficients.
    #[arg(long, global = true)]
    auto_modulus: bool,

    /// Global seed feeding every derived weight stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Enumeration budget (pairs/triples/translates per evaluation).
    #[arg(long, global = true, default_value_t = 1_000_000_000)]
    budget: u64,

    /// Cap on q^r for table construction.
    #[arg(long, global = true, default_value_t = DEFAULT_TABLE_BUDGET)]
    table_budget: u64,

    /// Table cache directory (FFENERGY_CACHE_DIR overrides the default of
    /// no caching).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Output path; sweeps write OUT.csv and OUT.json unless --format
    /// narrows it to one.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Additive energy of square roots over the window m.
    EnergySqrt {
        #[arg(long)]
        m: usize,
        /// Also run the brute-force quadruple oracle and compare.
        #[arg(long)]
        oracle: bool,
        /// Weight source: indicator | seed:N | <file.json>.
        #[arg(long)]
        weights: Option<String>,
    },
    /// Additive energy of reciprocals over the window m.
    EnergyInv {
        #[arg(long)]
        m: usize,
    },
    /// Bilinear sum over square roots with windows m, n.
    BilinearSqrt {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        weights: Option<String>,
        /// Additive character twist (element encoding, nonzero).
        #[arg(long)]
        twist: Option<u64>,
    },
    /// Bilinear sum over reciprocals with windows m, n.
    BilinearInv {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        twist: Option<u64>,
    },
    /// Multiplicative character sum over a polynomial family of degree n.
    Charsum {
        /// Family: irreducible | squarefree | monic.
        #[arg(long)]
        set: String,
        #[arg(long)]
        n: usize,
        /// Character index, or "sample:K" for K spread non-principal indices.
        #[arg(long)]
        chi: String,
    },
    /// Structured-product class counts: kind N, Nsf or Q.
    ResidueCount {
        #[arg(long)]
        kind: String,
        /// Class representative as polynomial text ("1,2" = 1 + 2X).
        #[arg(long)]
        a: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
    },
    /// Count m-smooth (optionally square-free) class members of degree < k.
    Psi {
        #[arg(long)]
        a: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        squarefree: bool,
    },
    /// Least degree covering every nonzero class with a smooth square-free
    /// representative; exports the witness map as CSV with --out.
    SmoothRep {
        /// Smoothness parameter alpha as an integer or num/den rational.
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        monic_only: bool,
    },
    /// Run a sweep config (JSON) over its parameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; report bytes do not depend on this.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Record wall-clock row timings (breaks byte-reproducibility).
        #[arg(long)]
        timings: bool,
    },
    /// Run the exact-identity suite.
    Selftest {
        #[arg(long, default_value = "quick")]
        level: String,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn context_options(cli: &Cli) -> ContextOptions {
    ContextOptions {
        auto_modulus: cli.auto_modulus,
        table_budget: cli.table_budget,
        cache_dir: cli.cache_dir.clone(),
    }
}

fn single_spec(
    cli: &Cli,
    quantity: &str,
    grid: GridSpec,
    weights: WeightSpec,
) -> Result<SweepSpec> {
    let field = cli
        .field
        .clone()
        .ok_or_else(|| anyhow!("--field is required for this subcommand"))?;
    // Honor the explicit-modulus rule at the CLI surface: bare "p^e^r"
    // specs need --auto-modulus here, even though sweep configs always
    // auto-select.
    if !field.contains(':') && !cli.auto_modulus {
        bail!("field spec '{field}' has no modulus; pass --auto-modulus");
    }
    Ok(SweepSpec {
        fields: vec![field],
        quantity: quantity.into(),
        grid,
        weights,
        seed: cli.seed,
        budget: cli.budget,
        table_budget: cli.table_budget,
        soft_ratio_threshold: 100.0,
        out: None,
        format: None,
    })
}

fn parse_weights(arg: &Option<String>) -> Result<WeightSpec> {
    match arg {
        None => Ok(WeightSpec::Indicator),
        Some(s) => WeightSpec::parse(s),
    }
}

fn row_json(row: &Row) -> serde_json::Value {
    let checks: serde_json::Map<String, serde_json::Value> = row
        .checks
        .split('|')
        .filter(|s| !s.is_empty())
        .filter_map(|s| s.split_once('='))
        .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.to_string())))
        .collect();
    let mut value = serde_json::json!({
        "field": row.field,
        "quantity": row.quantity,
        "params": row.params,
        "value": row.value,
        "main_term": row.main_term,
        "ratio": row.ratio,
        "method": row.method,
        "identity_checks": checks,
        "elapsed_ms": row.elapsed_ms,
        "status": row.status,
        "formula": row.formula,
    });
    if let Some(map) = value.as_object_mut() {
        for (k, v) in &row.extra {
            map.insert(k.clone(), serde_json::Value::String(v.clone()));
        }
    }
    value
}

/// Single-op CSV for the complex-valued sums, with their dedicated columns.
fn complex_csv(report: &BoundReport) -> Option<String> {
    let mut out = String::from("params,value_re,value_im,abs,trivial_bound,main_term,ratio\n");
    for row in &report.rows {
        let find = |key: &str| -> Option<&str> {
            row.extra
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
        };
        let (re, im, abs, triv) = (
            find("value_re")?,
            find("value_im")?,
            find("abs")?,
            find("trivial_bound")?,
        );
        out.push_str(&format!(
            "{},{re},{im},{abs},{triv},{},{}\n",
            row.params, row.main_term, row.ratio
        ));
    }
    Some(out)
}

fn emit_single(cli: &Cli, report: &BoundReport) -> Result<i32> {
    let format = match cli.format.as_deref() {
        Some(f) => ReportFormat::parse(f)?,
        None => ReportFormat::Json,
    };
    let text = match format {
        ReportFormat::Json => {
            let rows: Vec<serde_json::Value> = report.rows.iter().map(row_json).collect();
            let value = if rows.len() == 1 {
                rows.into_iter().next().unwrap()
            } else {
                serde_json::Value::Array(rows)
            };
            serde_json::to_string_pretty(&value)? + "\n"
        }
        ReportFormat::Csv => complex_csv(report).unwrap_or_else(|| report::emit_csv(report)),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(if report.all_hard_checks_passed() {
        0
    } else {
        2
    })
}

fn run_single(cli: &Cli, quantity: &str, grid: GridSpec, weights: WeightSpec) -> Result<i32> {
    let spec = single_spec(cli, quantity, grid, weights)?;
    let opts = RunOptions {
        workers: 1,
        timings: true,
        cache_dir: context_options(cli).effective_cache_dir(),
    };
    let report = run_sweep(&spec, &opts)?;
    for row in &report.rows {
        if row.status.starts_with("error") {
            bail!("{} [{}]: {}", row.quantity, row.params, row.status);
        }
    }
    emit_single(cli, &report)
}

fn run(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::EnergySqrt { m, oracle, weights } => {
            let grid = GridSpec {
                m: vec![*m],
                ..GridSpec::default()
            };
            let wspec = parse_weights(weights)?;
            let spec = single_spec(&cli, "energy_sqrt", grid, wspec)?;
            let opts = RunOptions {
                workers: 1,
                timings: true,
                cache_dir: context_options(&cli).effective_cache_dir(),
            };
            let mut report = run_sweep(&spec, &opts)?;
            if *oracle {
                let ctx = ContextOptions {
                    auto_modulus: true,
                    ..context_options(&cli)
                }
                .build(&spec.fields[0])?;
                let brute = energy_sqrt_bruteforce(&ctx, *m, cli.budget)?;
                let EnergyValue::Count(count) = brute.value else {
                    unreachable!()
                };
                let row = &mut report.rows[0];
                let agrees = row.value == count.to_string();
                if !agrees {
                    report.hard_failures += 1;
                }
                row.checks = format!(
                    "{}|oracle_equal={}",
                    row.checks,
                    if agrees { "pass" } else { "FAIL" }
                );
            }
            emit_single(&cli, &report)
        }
        Command::EnergyInv { m } => run_single(
            &cli,
            "energy_inv",
            GridSpec {
                m: vec![*m],
                ..GridSpec::default()
            },
            WeightSpec::Indicator,
        ),
        Command::BilinearSqrt {
            m,
            n,
            weights,
            twist,
        } => run_single(
            &cli,
            "bilinear_sqrt",
            GridSpec {
                m: vec![*m],
                n: vec![*n],
                twists: twist.map(|t| vec![t]).unwrap_or_default(),
                ..GridSpec::default()
            },
            parse_weights(weights)?,
        ),
        Command::BilinearInv {
            m,
            n,
            weights,
            twist,
        } => run_single(
            &cli,
            "bilinear_inv",
            GridSpec {
                m: vec![*m],
                n: vec![*n],
                twists: twist.map(|t| vec![t]).unwrap_or_default(),
                ..GridSpec::default()
            },
            parse_weights(weights)?,
        ),
        Command::Charsum { set, n, chi } => {
            let mut grid = GridSpec {
                n: vec![*n],
                set: Some(set.clone()),
                ..GridSpec::default()
            };
            if let Some(k) = chi.strip_prefix("sample:") {
                grid.chi_sample = Some(k.parse().context("bad sample count")?);
            } else {
                grid.chi = vec![chi.parse().context("bad character index")?];
            }
            run_single(&cli, "charsum", grid, WeightSpec::Indicator)
        }
        Command::ResidueCount { kind, a, n, h } => {
            let quantity = match kind.as_str() {
                "N" => "N",
                "Nsf" => "Nsf",
                "Q" => "Q",
                other => bail!("unknown kind '{other}' (N|Nsf|Q)"),
            };
            run_single(
                &cli,
                quantity,
                GridSpec {
                    a: vec![a.clone()],
                    n: vec![*n],
                    h: vec![*h],
                    ..GridSpec::default()
                },
                WeightSpec::Indicator,
            )
        }
        Command::Psi {
            a,
            k,
            m,
            squarefree,
        } => run_single(
            &cli,
            if *squarefree { "psi_sf" } else { "psi" },
            GridSpec {
                a: vec![a.clone()],
                k: vec![*k],
                m: vec![*m],
                ..GridSpec::default()
            },
            WeightSpec::Indicator,
        ),
        Command::SmoothRep { alpha, monic_only } => {
            let field = cli
                .field
                .clone()
                .ok_or_else(|| anyhow!("--field is required for smooth-rep"))?;
            if !field.contains(':') && !cli.auto_modulus {
                bail!("field spec '{field}' has no modulus; pass --auto-modulus");
            }
            let ctx = context_options(&cli).build(&field)?;
            let (num, den) = match alpha.split_once('/') {
                Some((a, b)) => (a.parse()?, b.parse()?),
                None => (alpha.parse()?, 1),
            };
            let opts = MAlphaOptions {
                monic_only: *monic_only,
                enum_budget: cli.budget,
                ..MAlphaOptions::default()
            };
            let outcome = find_m_alpha(&ctx, num, den, &opts)?;
            let summary = serde_json::json!({
                "field": ctx.spec_string(),
                "alpha": format!("{num}/{den}"),
                "smooth_bound": outcome.smooth_bound,
                "monic_only": monic_only,
                "bound": outcome.bound.map(|d| d as u64),
                "covered_classes": outcome.covered,
                "total_nonzero_classes": ctx.size() - 1,
                "witnesses_valid": outcome.validate(&ctx),
                "degree_ceiling": outcome.ceiling,
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            if let Some(path) = &cli.out {
                let mut csv = String::from("class_encoding,witness_poly,degree\n");
                for (enc, witness) in outcome.witnesses.iter().enumerate() {
                    if let Some(w) = witness {
                        csv.push_str(&format!("{},\"{}\",{}\n", enc, w, w.degree().unwrap_or(0)));
                    }
                }
                std::fs::write(path, csv)?;
            }
            Ok(if outcome.bound.is_some() { 0 } else { 1 })
        }
        Command::Sweep {
            config,
            workers,
            timings,
        } => {
            let spec = SweepSpec::load(config)?;
            if quantity::lookup(&spec.quantity).is_none() {
                bail!("unknown quantity '{}' in config", spec.quantity);
            }
            let opts = RunOptions {
                workers: (*workers).max(1),
                timings: *timings,
                cache_dir: context_options(&cli).effective_cache_dir(),
            };
            let report = run_sweep(&spec, &opts)?;
            // CLI flags override the config's own output settings.
            let out = cli
                .out
                .clone()
                .or_else(|| spec.out.as_ref().map(PathBuf::from));
            let format = cli.format.clone().or_else(|| spec.format.clone());
            match (&out, format.as_deref()) {
                (Some(path), Some(fmt)) => {
                    report::write_report(&report, path, ReportFormat::parse(fmt)?)?;
                }
                (Some(path), None) => {
                    report::write_report(&report, &path.with_extension("csv"), ReportFormat::Csv)?;
                    report::write_report(
                        &report,
                        &path.with_extension("json"),
                        ReportFormat::Json,
                    )?;
                }
                (None, Some("json")) => print!("{}", report::emit_json(&report)),
                (None, _) => print!("{}", report::emit_csv(&report)),
            }
            eprintln!(
                "{} rows, {} hard failures",
                report.rows.len(),
                report.hard_failures
            );
            Ok(if report.all_hard_checks_passed() {
                0
            } else {
                2
            })
        }
        Command::Selftest { level } => {
            let level = selftest::Level::parse(level)?;
            let cache = context_options(&cli).effective_cache_dir();
            let outcome = selftest::run(level, cache.as_deref());
            for name in &outcome.passed {
                println!("PASS {name}");
            }
            for (name, why) in &outcome.failed {
                println!("FAIL {name}: {why}");
            }
            println!(
                "selftest: {} passed, {} failed",
                outcome.passed.len(),
                outcome.failed.len()
            );
            Ok(if outcome.ok() { 0 } else { 1 })
        }
    }
}
