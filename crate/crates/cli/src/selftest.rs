//! Exact-identity suite at pinned small parameters: quick runs the q = 3,
//! r = 3 battery in seconds; full widens to r = 4 and q = 5 and adds the
//! two-path residue-class check and the coverage search.

use anyhow::{anyhow, ensure, Result};
use ffenergy_core::bilinear::{charsum, vinogradov_sum, PolySet};
use ffenergy_core::classes::{find_m_alpha, two_path_psi_report, MAlphaOptions};
use ffenergy_core::energy::{
    energy_inv, energy_sqrt, energy_sqrt_bruteforce, fourth_moment_check, inv_histogram,
    EnergyValue,
};
use ffenergy_core::field::{
    build_context, build_context_cached, Elem, ResidueField, Weight, DEFAULT_TABLE_BUDGET,
};
use ffenergy_core::gf::{count_irreducibles, enumerate_irreducibles, smallest_irreducible, FqSpec};
use num_bigint::BigUint;
use std::path::Path;

const BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn parse(s: &str) -> Result<Level> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(anyhow!("unknown level '{other}' (quick|full)")),
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub passed: Vec<String>,
    pub failed: Vec<(String, String)>,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        self.failed.is_empty()
    }
}

fn context(q: u64, r: usize, cache_dir: Option<&Path>) -> Result<ResidueField> {
    let fq = FqSpec::prime(q)?;
    let modulus = smallest_irreducible(&fq, r)?;
    Ok(match cache_dir {
        Some(dir) => build_context_cached(&fq, &modulus, DEFAULT_TABLE_BUDGET, dir)?,
        None => build_context(&fq, &modulus, DEFAULT_TABLE_BUDGET)?,
    })
}

fn exact_count(value: &EnergyValue) -> Result<BigUint> {
    match value {
        EnergyValue::Count(c) => Ok(c.clone()),
        EnergyValue::Weighted(_) => Err(anyhow!("expected the exact integer path")),
    }
}

fn dual_basis_battery(ctx: &ResidueField) -> Result<()> {
    let rho = ctx.rho();
    for i in 0..ctx.r() {
        let rp = ctx.pow(rho, i as u64);
        for (j, &w) in ctx.dual_basis().iter().enumerate() {
            ensure!(
                ctx.trace(ctx.mul(rp, w)) == u64::from(i == j),
                "dual-basis relation failed at ({i}, {j})"
            );
        }
    }
    for h in 1..=ctx.r() {
        let expect = BigUint::from(ctx.q().pow((ctx.r() - h) as u32));
        for u in ctx.elements() {
            let got = ctx.dual_basis_indicator(u, h)?;
            let want = if ctx.window_test(u, h)? {
                expect.clone().into()
            } else {
                num_bigint::BigInt::from(0)
            };
            ensure!(got == want, "window indicator failed at u={u}, h={h}");
        }
    }
    Ok(())
}

fn table_battery(ctx: &ResidueField) -> Result<()> {
    for x in ctx.elements().skip(1) {
        let l = ctx.log(x).ok_or_else(|| anyhow!("missing log"))?;
        ensure!(ctx.exp(l) == x, "log/exp roundtrip failed at {x}");
    }
    for x in ctx.elements() {
        let s = ctx.mul(x, x);
        ensure!(
            ctx.square_roots(s).iter().any(|h| h == x),
            "sqrt table misses {x}"
        );
    }
    for m in 1..=ctx.r() {
        ensure!(ctx.window(m)?.count() as u64 == ctx.window_size(m));
    }
    Ok(())
}

fn fourth_moment_battery(ctx: &ResidueField) -> Result<()> {
    for m in 1..=ctx.r() {
        for c in [1u64, 2, ctx.q()] {
            let check = fourth_moment_check(ctx, m, ctx.elem(c % ctx.size())?, BUDGET)?;
            ensure!(
                check.relative_error < 1e-6,
                "fourth moment off at m={m}, c={c}: {}",
                check.relative_error
            );
        }
    }
    Ok(())
}

fn oracle_battery(ctx: &ResidueField) -> Result<()> {
    for m in 1..=ctx.r() {
        let hist = exact_count(&energy_sqrt(ctx, &Weight::indicator(ctx.q(), m), BUDGET)?.value)?;
        let brute = exact_count(&energy_sqrt_bruteforce(ctx, m, BUDGET)?.value)?;
        ensure!(hist == brute, "oracle mismatch at m={m}: {hist} vs {brute}");
    }
    let e1 = exact_count(&energy_inv(ctx, 1, BUDGET)?.value)?;
    ensure!(e1 == BigUint::from(6u32), "E_inv(1) = {e1}, expected 6");
    Ok(())
}

fn mass_battery(ctx: &ResidueField) -> Result<()> {
    for m in 1..=ctx.r() {
        let hist = inv_histogram(ctx, m, BUDGET)?;
        let nonzero = ctx.window_size(m) - 1;
        ensure!(
            hist.total() == BigUint::from(nonzero * nonzero),
            "reciprocal mass failed at m={m}"
        );
    }
    Ok(())
}

fn vinogradov_battery(ctx: &ResidueField, pairs: u64) -> Result<()> {
    for seed in 0..pairs {
        let alpha = Weight::random(ctx.q(), ctx.r(), 0x5eed_0000 + seed);
        let beta = Weight::random(ctx.q(), ctx.r(), 0x5eed_8000 + seed);
        vinogradov_sum(ctx, &alpha, &beta, Elem::ONE).map_err(|e| anyhow!("pair {seed}: {e}"))?;
    }
    Ok(())
}

fn gauss_battery(q: u64, max_n: usize) -> Result<()> {
    let fq = FqSpec::prime(q)?;
    for n in 1..=max_n {
        let formula = count_irreducibles(&fq, n)?;
        let enumerated = enumerate_irreducibles(&fq, n)?.count();
        ensure!(
            formula == BigUint::from(enumerated),
            "Gauss count failed at q={q}, n={n}"
        );
    }
    Ok(())
}

fn charsum_battery(ctx: &ResidueField) -> Result<()> {
    for n in 1..ctx.r().min(4) {
        let principal = charsum(ctx, PolySet::Irreducible, n, 0)?;
        let pi = count_irreducibles(ctx.fq(), n)?;
        let pi_f: f64 = pi.to_string().parse().unwrap_or(f64::NAN);
        ensure!(
            (principal.re - pi_f).abs() < 1e-9,
            "principal charsum failed at n={n}"
        );
    }
    Ok(())
}

fn two_path_battery(ctx: &ResidueField) -> Result<()> {
    for aenc in 1..=10u64 {
        let a = ctx.elem(aenc % ctx.size())?;
        if a == Elem::ZERO {
            continue;
        }
        let report = two_path_psi_report(ctx, a, 5, 2, 1, 2, BUDGET)?;
        ensure!(
            report.g_route == report.distinct_triple_products,
            "two-path mismatch at a={aenc}"
        );
        ensure!(
            report.triple_route_ordered == report.expected_ordered,
            "ordered-triple multiplicity off at a={aenc}"
        );
        let tight = two_path_psi_report(ctx, a, 5, 2, 1, 1, BUDGET)?;
        ensure!(tight.unique_regime, "h=1 regime failed at a={aenc}");
        ensure!(
            tight.triple_route_ordered == BigUint::from(2u32) * tight.g_route.clone(),
            "unique-regime doubling failed at a={aenc}"
        );
    }
    Ok(())
}

fn m_alpha_battery() -> Result<()> {
    for r in 2..=3usize {
        let ctx = context(3, r, None)?;
        let outcome = find_m_alpha(&ctx, 1, 1, &MAlphaOptions::default())?;
        ensure!(outcome.bound.is_some(), "coverage did not finish at r={r}");
        ensure!(outcome.validate(&ctx), "witnesses failed at r={r}");
    }
    Ok(())
}

/// Runs the identity suite; `cache_dir` exercises the table-cache path when
/// set (a corrupt cache is rebuilt silently, so the suite still passes).
pub fn run(level: Level, cache_dir: Option<&Path>) -> Outcome {
    let mut outcome = Outcome::default();
    let mut check = |name: &str, result: Result<()>| match result {
        Ok(()) => outcome.passed.push(name.to_string()),
        Err(e) => outcome.failed.push((name.to_string(), format!("{e:#}"))),
    };

    let quick_ctx = match context(3, 3, cache_dir) {
        Ok(ctx) => ctx,
        Err(e) => {
            outcome
                .failed
                .push(("build_context(3,3)".into(), format!("{e:#}")));
            return outcome;
        }
    };
    check(
        "dual_basis_and_indicator(3,3)",
        dual_basis_battery(&quick_ctx),
    );
    check("log_exp_sqrt_windows(3,3)", table_battery(&quick_ctx));
    check("fourth_moment(3,3)", fourth_moment_battery(&quick_ctx));
    check("energy_oracles(3,3)", oracle_battery(&quick_ctx));
    check("reciprocal_mass(3,3)", mass_battery(&quick_ctx));
    check("vinogradov(3,3)x20", vinogradov_battery(&quick_ctx, 20));
    check("gauss_counts(q=3,n<=4)", gauss_battery(3, 4));
    check("principal_charsums(3,3)", charsum_battery(&quick_ctx));

    if level == Level::Full {
        match context(3, 4, cache_dir) {
            Ok(ctx) => {
                check("dual_basis_and_indicator(3,4)", dual_basis_battery(&ctx));
                check("fourth_moment(3,4)", fourth_moment_battery(&ctx));
                check("energy_oracles(3,4)", oracle_battery(&ctx));
                check("reciprocal_mass(3,4)", mass_battery(&ctx));
            }
            Err(e) => check("build_context(3,4)", Err(e)),
        }
        match context(5, 3, cache_dir) {
            Ok(ctx) => check("vinogradov(5,3)x100", vinogradov_battery(&ctx, 100)),
            Err(e) => check("build_context(5,3)", Err(e)),
        }
        check("gauss_counts(q=3,n<=6)", gauss_battery(3, 6));
        check("gauss_counts(q=5,n<=6)", gauss_battery(5, 6));
        check("two_path_psi(3,3)", two_path_battery(&quick_ctx));
        check("m_alpha_coverage(r<=3)", m_alpha_battery());
    }

    outcome
}
