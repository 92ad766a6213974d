//! Oracle-first checks for the energy module: every histogram path is held
//! against an independent, literal-definition evaluator at desk scale.

use ffenergy_core::energy::{
    a_lambda_spectrum, correlation_sums, count_hyperbola, count_quadratic_image, energy_inv,
    energy_sqrt, energy_sqrt_bruteforce, fourth_moment_check, inv_histogram, inv_rep_count,
    q_lambda, root_set, EnergyValue,
};
use ffenergy_core::field::{build_context_default, Elem, ResidueField, Weight};
use ffenergy_core::gf::{smallest_irreducible, FqSpec};
use num_bigint::BigUint;
use num_complex::Complex64;

const BUDGET: u64 = 1_000_000_000;

fn ctx(q: u64, r: usize) -> ResidueField {
    let fq = FqSpec::prime(q).unwrap();
    let modulus = smallest_irreducible(&fq, r).unwrap();
    build_context_default(&fq, &modulus).unwrap()
}

fn count_of(v: &EnergyValue) -> BigUint {
    match v {
        EnergyValue::Count(c) => c.clone(),
        EnergyValue::Weighted(_) => panic!("expected exact integer value"),
    }
}

/// Literal quadruple-definition evaluation of the weighted energy:
/// sum over u + v = x + y of beta(u^2) conj(beta(v^2)) beta(x^2) conj(beta(y^2)).
fn weighted_energy_by_definition(ctx: &ResidueField, beta: &Weight) -> Complex64 {
    let roots = root_set(ctx, beta.window()).unwrap();
    let value = |u: Elem| beta.get(ctx.mul(u, u));
    let mut total = Complex64::new(0.0, 0.0);
    for &u in &roots {
        for &v in &roots {
            let s = ctx.add(u, v);
            for &x in &roots {
                let y = ctx.sub(s, x);
                total += value(u) * value(v).conj() * value(x) * value(y).conj();
            }
        }
    }
    total
}

#[test]
fn histogram_equals_bruteforce_quadruples() {
    for r in 2..=4usize {
        let ctx = ctx(3, r);
        for m in 1..=r {
            let hist = energy_sqrt(&ctx, &Weight::indicator(3, m), BUDGET).unwrap();
            let oracle = energy_sqrt_bruteforce(&ctx, m, BUDGET).unwrap();
            assert_eq!(
                count_of(&hist.value),
                count_of(&oracle.value),
                "r = {r}, m = {m}"
            );
        }
    }
}

#[test]
fn full_window_closed_form() {
    for r in 2..=4usize {
        let ctx = ctx(3, r);
        let result = energy_sqrt(&ctx, &Weight::indicator(3, r), BUDGET).unwrap();
        assert_eq!(
            count_of(&result.value),
            BigUint::from(3u64).pow(3 * r as u32),
            "r = {r}"
        );
    }
}

#[test]
fn energy_lower_envelope() {
    // E >= (#root set)^2: the diagonal quadruples (x, y) = (u, v).
    let ctx = ctx(3, 4);
    for m in 1..=4usize {
        let roots = root_set(&ctx, m).unwrap().len();
        let e = count_of(
            &energy_sqrt(&ctx, &Weight::indicator(3, m), BUDGET)
                .unwrap()
                .value,
        );
        assert!(e >= BigUint::from((roots * roots) as u64));
        assert!(e <= BigUint::from(roots as u64).pow(3));
    }
}

#[test]
fn weighted_energy_matches_quadruple_definition() {
    let ctx = ctx(3, 3);
    for (m, seed) in [(1usize, 7u64), (2, 8), (2, 9)] {
        let beta = Weight::random(3, m, seed);
        let via_q = match energy_sqrt(&ctx, &beta, BUDGET).unwrap().value {
            EnergyValue::Weighted(w) => w,
            EnergyValue::Count(_) => panic!("random weights take the complex path"),
        };
        let direct = weighted_energy_by_definition(&ctx, &beta);
        let scale = direct.norm().max(1.0);
        assert!(
            (via_q - direct).norm() / scale < 1e-8,
            "m = {m} seed = {seed}: {via_q} vs {direct}"
        );
        // Non-negative real value up to rounding; eq of the two Q-forms.
        assert!(via_q.re >= -1e-9 * (beta.l1().powi(2) + 1.0));
        assert!(via_q.im.abs() <= 1e-9 * (beta.l1().powi(2) + 1.0));
    }
}

#[test]
fn sum_form_equals_difference_form() {
    // The sum-indexed correlation vector equals lambda -> Q_lambda.
    let ctx = ctx(3, 3);
    let beta = Weight::random(3, 2, 42);
    let sums = correlation_sums(&ctx, &beta, BUDGET).unwrap();
    for lambda in ctx.elements() {
        let direct = q_lambda(&ctx, &beta, lambda).unwrap();
        assert!(
            (sums[lambda.index()] - direct).norm() < 1e-10,
            "lambda = {lambda}"
        );
    }
}

#[test]
fn q_lambda_full_window_and_mass() {
    let ctx = ctx(3, 3);
    // Full window: every pair qualifies, so Q_lambda = q^r for each lambda.
    let full = Weight::indicator(3, 3);
    for lambda in ctx.elements() {
        let v = q_lambda(&ctx, &full, lambda).unwrap();
        assert!((v.re - 27.0).abs() < 1e-9 && v.im.abs() < 1e-12);
    }
    // Parseval mass: sum_lambda Q_lambda(1_m) = (#root set)^2, exactly.
    for m in 1..=3usize {
        let beta = Weight::indicator(3, m);
        let roots = root_set(&ctx, m).unwrap().len() as u64;
        let sums = correlation_sums(&ctx, &beta, BUDGET).unwrap();
        let total: f64 = sums.iter().map(|s| s.re).sum();
        assert!((total - (roots * roots) as f64).abs() < 1e-9, "m = {m}");
        // Q_0(1_m) counts the diagonal: #{u : u^2 ~ m}.
        assert!((sums[0].re - roots as f64).abs() < 1e-9);
    }
}

#[test]
fn reciprocal_counts_brute_force_first() {
    // Independent oracle: enumerate ordered pairs literally.
    let ctx = ctx(3, 3);
    for m in 1..=3usize {
        let bound = ctx.window_size(m);
        let mut by_pairs = vec![0u64; ctx.size() as usize];
        for ue in 1..bound {
            for ve in 1..bound {
                let u = ctx.elem(ue).unwrap();
                let v = ctx.elem(ve).unwrap();
                let a = ctx.add(ctx.inv(u).unwrap(), ctx.inv(v).unwrap());
                by_pairs[a.index()] += 1;
            }
        }
        let hist = inv_histogram(&ctx, m, BUDGET).unwrap();
        for a in ctx.elements() {
            assert_eq!(hist.get(a), by_pairs[a.index()], "m = {m}, a = {a}");
            assert_eq!(
                inv_rep_count(&ctx, a, m).unwrap(),
                BigUint::from(by_pairs[a.index()]),
                "m = {m}, a = {a}"
            );
        }
        // Reciprocal mass: sum_a I_F(a, m) = (q^m - 1)^2.
        assert_eq!(hist.total(), BigUint::from((bound - 1) * (bound - 1)));
    }
}

#[test]
fn reciprocal_energy_matches_quadruple_definition() {
    // Literal count of (u, v, x, y) in the invertible window with
    // u^-1 + v^-1 = x^-1 + y^-1, held against the histogram path.
    let ctx = ctx(3, 4);
    for m in 1..=2usize {
        let bound = ctx.window_size(m);
        let invs: Vec<Elem> = (1..bound)
            .map(|enc| ctx.inv(ctx.elem(enc).unwrap()).unwrap())
            .collect();
        let mut quadruples = 0u64;
        for &u in &invs {
            for &v in &invs {
                let s = ctx.add(u, v);
                for &x in &invs {
                    for &y in &invs {
                        if ctx.add(x, y) == s {
                            quadruples += 1;
                        }
                    }
                }
            }
        }
        let e = count_of(&energy_inv(&ctx, m, BUDGET).unwrap().value);
        assert_eq!(e, BigUint::from(quadruples), "m = {m}");
    }
}

#[test]
fn reciprocal_energy_envelopes() {
    let ctx = ctx(3, 4);
    for m in 1..=4usize {
        let e = count_of(&energy_inv(&ctx, m, BUDGET).unwrap().value);
        let nonzero = ctx.window_size(m) - 1;
        assert!(e >= BigUint::from(nonzero * nonzero), "m = {m}");
        assert!(e <= BigUint::from(nonzero).pow(3), "m = {m}");
    }
}

#[test]
fn spectrum_full_window_collapses() {
    let ctx = ctx(3, 3);
    let c = Elem::ONE;
    let spectrum = a_lambda_spectrum(&ctx, 3, c).unwrap();
    assert!((spectrum[0].re - 27.0).abs() < 1e-9);
    for (lambda, a) in spectrum.iter().enumerate().skip(1) {
        assert!(a.norm() < 1e-9, "lambda = {lambda}");
    }
    let fourth: f64 = spectrum.iter().map(|a| a.norm_sqr().powi(2)).sum();
    assert!((fourth - 27f64.powi(4)).abs() / 27f64.powi(4) < 1e-12);
}

#[test]
fn spectrum_at_zero_is_root_count() {
    let ctx = ctx(3, 4);
    for m in 1..=4usize {
        let spectrum = a_lambda_spectrum(&ctx, m, ctx.elem(2).unwrap()).unwrap();
        let roots = root_set(&ctx, m).unwrap().len() as f64;
        assert!((spectrum[0].re - roots).abs() < 1e-9 && spectrum[0].im.abs() < 1e-12);
    }
}

#[test]
fn fourth_moment_identity_small() {
    let ctx = ctx(3, 4);
    for m in 1..=4usize {
        for c in [1u64, 2, 3] {
            let check = fourth_moment_check(&ctx, m, ctx.elem(c).unwrap(), BUDGET).unwrap();
            assert!(
                check.relative_error < 1e-6,
                "m = {m}, c = {c}: rel err {}",
                check.relative_error
            );
        }
    }
}

#[test]
fn quadratic_image_brute_force() {
    let ctx = ctx(3, 3);
    // P(u) = u^2, m = 1: direct enumeration over the 3 window values.
    let count = count_quadratic_image(&ctx, [Elem::ZERO, Elem::ZERO, Elem::ONE], 1).unwrap();
    let mut expect = 0u64;
    for ue in 0..3u64 {
        let u = ctx.elem(ue).unwrap();
        if ctx.mul(u, u).encoding() < 3 {
            expect += 1;
        }
    }
    assert_eq!(count, BigUint::from(expect));
    // count <= q^m: v is determined by u.
    for m in 1..=3usize {
        let c = count_quadratic_image(&ctx, [Elem::ONE, Elem::ONE, Elem::ONE], m).unwrap();
        assert!(c <= BigUint::from(ctx.window_size(m)));
    }
}

#[test]
fn hyperbola_brute_force() {
    let ctx = ctx(3, 2);
    let g = ctx.generator();
    let direct = |a: Elem, m: usize| {
        let bound = ctx.window_size(m);
        let mut n = 0u64;
        for ue in 0..bound {
            for ve in 0..bound {
                let u = ctx.elem(ue).unwrap();
                let v = ctx.elem(ve).unwrap();
                if ctx.mul(u, v) == a {
                    n += 1;
                }
            }
        }
        n
    };
    assert_eq!(
        count_hyperbola(&ctx, g, 1).unwrap(),
        BigUint::from(direct(g, 1))
    );
    assert_eq!(
        count_hyperbola(&ctx, g, 2).unwrap(),
        BigUint::from(direct(g, 2))
    );
    // m = r: q^r - 1 solutions.
    assert_eq!(
        count_hyperbola(&ctx, Elem::ONE, 2).unwrap(),
        BigUint::from(8u32)
    );
}
