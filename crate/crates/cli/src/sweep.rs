use crate::context::ContextOptions;
use crate::quantity::{lookup, EvalConfig, Evaluation, Point, Quantity};
use crate::report::{fmt_float, render_checks, BoundReport, Row};
use crate::weights::WeightSpec;
use anyhow::{anyhow, Context as _, Result};
use ffenergy_core::error::Error;
use ffenergy_core::field::{ResidueField, DEFAULT_TABLE_BUDGET, WEIGHT_GENERATOR};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

fn default_budget() -> u64 {
    1_000_000_000
}

fn default_table_budget() -> u64 {
    DEFAULT_TABLE_BUDGET
}

fn default_soft_ratio() -> f64 {
    100.0
}

/// Parameter grid axes. Quantities read only the axes they consume; an
/// empty required axis yields an empty grid.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub h: Vec<usize>,
    pub k: Vec<usize>,
    pub alpha: Vec<String>,
    pub a: Vec<String>,
    pub chi: Vec<u64>,
    pub chi_sample: Option<usize>,
    pub set: Option<String>,
    pub twists: Vec<u64>,
    pub seeds: Vec<u64>,
    pub seed_count: Option<usize>,
    pub monic_only: bool,
}

/// A sweep configuration: fields, one quantity, its grid, weight source and
/// budgets. Field entries are spec strings; entries without an explicit
/// modulus tail use the smallest monic irreducible of the requested degree.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub fields: Vec<String>,
    pub quantity: String,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub weights: WeightSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_table_budget")]
    pub table_budget: u64,
    #[serde(default = "default_soft_ratio")]
    pub soft_ratio_threshold: f64,
    /// Default output base path; the --out flag overrides.
    #[serde(default)]
    pub out: Option<String>,
    /// Default output format; the --format flag overrides.
    #[serde(default)]
    pub format: Option<String>,
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<SweepSpec> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading sweep config {}", path.display()))?;
        serde_json::from_str(&text).context("parsing sweep config")
    }
}

/// Execution settings that must not affect report content.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub workers: usize,
    /// Record wall-clock per-row timings. Off by default: report bytes are a
    /// pure function of (spec, seed), and timings would break that.
    pub timings: bool,
    pub cache_dir: Option<std::path::PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: 1,
            timings: false,
            cache_dir: None,
        }
    }
}

struct JobSlot {
    field_index: usize,
    point: Point,
}

fn classify_error(e: &Error) -> (String, bool) {
    match e {
        Error::BudgetExceeded { needed, budget } => (
            format!("skipped: budget (needs {needed}, budget {budget})"),
            false,
        ),
        Error::OracleTooLarge { needed, budget } => (
            format!("skipped: oracle budget (needs {needed}, budget {budget})"),
            false,
        ),
        Error::FieldTooLarge { size, budget } => (
            format!("skipped: table budget (q^r = {size}, budget {budget})"),
            false,
        ),
        other => (format!("error: {other}"), true),
    }
}

fn row_from_eval(
    field: &str,
    quantity: &dyn Quantity,
    eval: Evaluation,
    elapsed_ms: u64,
) -> (Row, bool) {
    let hard_fail = eval.hard_fail;
    let eval_method = eval.method;
    let eval_extra = eval.extra.clone();
    let row = Row {
        field: field.to_string(),
        quantity: quantity.name().to_string(),
        params: eval.params,
        value: eval.value,
        main_term: eval.main_term.map(fmt_float).unwrap_or_default(),
        ratio: eval.ratio.map(fmt_float).unwrap_or_default(),
        checks: render_checks(&eval.checks),
        elapsed_ms,
        status: "ok".into(),
        method: eval_method.to_string(),
        formula: quantity.formula().to_string(),
        extra: eval_extra,
    };
    (row, hard_fail)
}

fn skipped_row(field: &str, quantity: &dyn Quantity, point: &Point, status: String) -> Row {
    Row {
        field: field.to_string(),
        quantity: quantity.name().to_string(),
        params: point_label(point),
        value: String::new(),
        main_term: String::new(),
        ratio: String::new(),
        checks: String::new(),
        elapsed_ms: 0,
        status,
        method: String::new(),
        formula: quantity.formula().to_string(),
        extra: Vec::new(),
    }
}

fn point_label(point: &Point) -> String {
    let mut parts = Vec::new();
    if let Some(m) = point.m {
        parts.push(format!("m={m}"));
    }
    if let Some(n) = point.n {
        parts.push(format!("n={n}"));
    }
    if let Some(h) = point.h {
        parts.push(format!("h={h}"));
    }
    if let Some(k) = point.k {
        parts.push(format!("k={k}"));
    }
    if let Some((num, den)) = point.alpha {
        parts.push(format!("alpha={num}/{den}"));
    }
    if let Some(a) = &point.a {
        parts.push(format!("a={a}"));
    }
    if let Some(chi) = point.chi {
        parts.push(format!("chi={chi}"));
    }
    if let Some(c) = point.twist {
        parts.push(format!("c={c}"));
    }
    if let Some(s) = point.seed_tag {
        parts.push(format!("pair={s}"));
    }
    parts.join(";")
}

/// Executes every grid point of the sweep. Rows are assembled in grid order
/// regardless of the worker count, and all evaluator inputs are derived
/// from (spec, seed, grid position), so the report content is a pure
/// function of the spec.
pub fn run_sweep(spec: &SweepSpec, opts: &RunOptions) -> Result<BoundReport> {
    let quantity = lookup(&spec.quantity).ok_or_else(|| {
        anyhow!(
            "unknown quantity '{}' (known: {:?})",
            spec.quantity,
            crate::quantity::registry().keys().collect::<Vec<_>>()
        )
    })?;
    let ctx_opts = ContextOptions {
        auto_modulus: true,
        table_budget: spec.table_budget,
        cache_dir: opts.cache_dir.clone(),
    };

    // Build each field context once; field-level failures become rows so the
    // grid shape survives.
    let mut contexts: Vec<(String, Option<Arc<ResidueField>>, String)> = Vec::new();
    for field_text in &spec.fields {
        match ctx_opts.build(field_text) {
            Ok(ctx) => {
                let label = ctx.spec_string();
                contexts.push((label, Some(ctx), String::new()));
            }
            Err(e) => contexts.push((field_text.clone(), None, format!("error: {e:#}"))),
        }
    }

    let mut jobs: Vec<JobSlot> = Vec::new();
    let mut rows: Vec<Option<Row>> = Vec::new();
    let mut hard_failures = 0u64;
    for (idx, (label, ctx, err)) in contexts.iter().enumerate() {
        match ctx {
            Some(ctx) => {
                let points = quantity
                    .points(ctx, spec)
                    .map_err(|e| anyhow!("expanding grid for '{}': {e}", spec.quantity))?;
                for point in points {
                    jobs.push(JobSlot {
                        field_index: idx,
                        point,
                    });
                    rows.push(None);
                }
            }
            None => {
                rows.push(Some(skipped_row(
                    label,
                    quantity,
                    &Point::default(),
                    err.clone(),
                )));
                jobs.push(JobSlot {
                    field_index: idx,
                    point: Point::default(),
                });
                hard_failures += 1;
            }
        }
    }

    let cfg = EvalConfig {
        budget: spec.budget,
        soft_ratio: spec.soft_ratio_threshold,
        weights: &spec.weights,
        global_seed: spec.seed,
    };

    let evaluate_one = |slot: &JobSlot| -> (Row, bool) {
        let (label, ctx, _) = &contexts[slot.field_index];
        let Some(ctx) = ctx else {
            unreachable!("field-error rows are prefilled");
        };
        let start = Instant::now();
        match quantity.evaluate(ctx, &slot.point, &cfg) {
            Ok(eval) => {
                let elapsed = if opts.timings {
                    start.elapsed().as_millis() as u64
                } else {
                    0
                };
                row_from_eval(label, quantity, eval, elapsed)
            }
            Err(e) => {
                let (status, hard) = classify_error(&e);
                (skipped_row(label, quantity, &slot.point, status), hard)
            }
        }
    };

    let computed: Vec<(usize, Row, bool)> = if opts.workers <= 1 {
        jobs.iter()
            .enumerate()
            .filter(|(i, _)| rows[*i].is_none())
            .map(|(i, slot)| {
                let (row, hard) = evaluate_one(slot);
                (i, row, hard)
            })
            .collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .context("building worker pool")?;
        let pending: Vec<(usize, &JobSlot)> = jobs
            .iter()
            .enumerate()
            .filter(|(i, _)| rows[*i].is_none())
            .collect();
        pool.install(|| {
            pending
                .par_iter()
                .map(|(i, slot)| {
                    let (row, hard) = evaluate_one(slot);
                    (*i, row, hard)
                })
                .collect()
        })
    };

    for (i, row, hard) in computed {
        if hard {
            hard_failures += 1;
        }
        rows[i] = Some(row);
    }

    Ok(BoundReport {
        quantity: spec.quantity.clone(),
        seed: spec.seed,
        weight_generator: WEIGHT_GENERATOR.to_string(),
        workers_label: "any".into(),
        rows: rows
            .into_iter()
            .map(|r| r.expect("all rows filled"))
            .collect(),
        hard_failures,
    })
}
