//! Context-level invariants at scales beyond the inline unit tests, plus
//! the character-sum envelope checks over polynomial families.

use ffenergy_core::bilinear::{charsum, PolySet};
use ffenergy_core::field::{build_context_default, Elem, ResidueField, Weight};
use ffenergy_core::gf::{smallest_irreducible, FqSpec};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(q: u64, r: usize) -> ResidueField {
    let fq = FqSpec::prime(q).unwrap();
    let modulus = smallest_irreducible(&fq, r).unwrap();
    build_context_default(&fq, &modulus).unwrap()
}

#[test]
fn log_exp_roundtrip_up_to_r6() {
    for r in [5usize, 6] {
        let ctx = ctx(3, r);
        for x in ctx.elements().skip(1) {
            assert_eq!(ctx.exp(ctx.log(x).unwrap()), x);
        }
    }
}

#[test]
fn sqrt_roundtrip_small_fields() {
    for (q, r) in [(3u64, 4usize), (5, 3), (7, 2)] {
        let ctx = ctx(q, r);
        for x in ctx.elements() {
            let s = ctx.mul(x, x);
            assert!(
                ctx.square_roots(s).iter().any(|h| h == x),
                "q = {q}, r = {r}, x = {x}"
            );
        }
    }
}

#[test]
fn additive_char_multiplicativity_random_pairs() {
    let ctx = ctx(3, 4);
    let c = ctx.elem(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10_000 {
        let x = ctx.elem(rng.gen_range(0..ctx.size())).unwrap();
        let y = ctx.elem(rng.gen_range(0..ctx.size())).unwrap();
        let lhs = ctx.additive_char(c, ctx.add(x, y));
        let rhs = ctx.additive_char(c, x) * ctx.additive_char(c, y);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn window_enumeration_counts() {
    let ctx = ctx(3, 5);
    for m in 1..=5usize {
        let elems: Vec<Elem> = ctx.window(m).unwrap().collect();
        assert_eq!(elems.len() as u64, 3u64.pow(m as u32));
        for &x in &elems {
            assert!(ctx.window_test(x, m).unwrap());
        }
        // Everything beyond the range fails the test.
        if m < 5 {
            let outside = ctx.elem(ctx.window_size(m)).unwrap();
            assert!(!ctx.window_test(outside, m).unwrap());
        }
    }
}

#[test]
fn prime_power_context_builds() {
    // q = 9  = 3^2, r = 2: tables over an extension coefficient field.
    let fq = FqSpec::new(3, 2).unwrap();
    let modulus = smallest_irreducible(&fq, 2).unwrap();
    let ctx = build_context_default(&fq, &modulus).unwrap();
    assert_eq!(ctx.size(), 81);
    for x in ctx.elements().skip(1) {
        assert_eq!(ctx.mul(x, ctx.inv(x).unwrap()), Elem::ONE);
    }
    // Dual-basis relation survives the extension coefficient field.
    let rho = ctx.rho();
    for i in 0..2 {
        let rp = ctx.pow(rho, i as u64);
        for (j, &w) in ctx.dual_basis().iter().enumerate() {
            assert_eq!(ctx.trace(ctx.mul(rp, w)), u64::from(i as usize == j));
        }
    }
    // Window indicator, additive-char orthogonality and the fourth-moment
    // identity all ride the trace-to-F_p lift; exercise them over F_81.
    for h in 1..=2usize {
        let inside = num_bigint::BigInt::from(9u64.pow((2 - h) as u32));
        for u in ctx.elements() {
            let got = ctx.dual_basis_indicator(u, h).unwrap();
            let want = if ctx.window_test(u, h).unwrap() {
                inside.clone()
            } else {
                num_bigint::BigInt::from(0)
            };
            assert_eq!(got, want, "q=9 h={h} u={u}");
        }
    }
    let total: Complex64 = ctx.elements().map(|x| ctx.additive_char(Elem::ONE, x)).sum();
    assert!(total.norm() < 1e-9);
    for m in 1..=2usize {
        let check =
            ffenergy_core::energy::fourth_moment_check(&ctx, m, ctx.elem(3).unwrap(), 1 << 30)
                .unwrap();
        assert!(check.relative_error < 1e-6, "q=9 m={m}");
    }
}

#[test]
fn even_characteristic_supports_non_sqrt_features() {
    // q = 2 is outside the square-root feature set but the reciprocal
    // energy, characters and class counters still apply.
    let ctx = ctx(2, 3);
    assert_eq!(ctx.size(), 8);
    // Frobenius squaring is a bijection: every element has exactly one root.
    for x in ctx.elements() {
        assert_eq!(ctx.square_roots(ctx.mul(x, x)).count(), 1);
    }
    assert!(matches!(
        ctx.quadratic_char(Elem::ONE),
        Err(ffenergy_core::Error::EvenCharacteristic)
    ));
    let e = ffenergy_core::energy::energy_inv(&ctx, 2, 1 << 30).unwrap();
    let ffenergy_core::energy::EnergyValue::Count(v) = e.value else {
        panic!()
    };
    // Oracle: enumerate the ordered quadruples directly.
    let mut expect = 0u64;
    let invs: Vec<Elem> = (1..4u64)
        .map(|enc| ctx.inv(ctx.elem(enc).unwrap()).unwrap())
        .collect();
    for &u in &invs {
        for &v2 in &invs {
            for &x in &invs {
                for &y in &invs {
                    if ctx.add(u, v2) == ctx.add(x, y) {
                        expect += 1;
                    }
                }
            }
        }
    }
    assert_eq!(v, num_bigint::BigUint::from(expect));
}

#[test]
fn charsum_envelope_over_sampled_characters() {
    // Empirical envelope |sum_{P_n} chi| <= r q^{n/2} on 50 sampled
    // non-principal characters (the sharp bound carries an o(r) factor).
    let ctx = ctx(3, 5);
    let order = ctx.size() - 1;
    let step = (order - 1) / 50;
    for n in 1..=3usize {
        let cap = ctx.r() as f64 * 3f64.powf(n as f64 / 2.0);
        for i in 0..50u64 {
            let index = 1 + i * step.max(1);
            if index >= order {
                break;
            }
            let s = charsum(&ctx, PolySet::Irreducible, n, index).unwrap();
            assert!(
                s.norm() <= cap,
                "n = {n}, chi index {index}: |sum| = {} > {cap}",
                s.norm()
            );
        }
    }
}

#[test]
fn charsum_readings_disagree_only_where_expected() {
    // The all-monic and irreducible families agree at n = 1 (every monic
    // linear is irreducible) and differ from n = 2 on.
    let ctx = ctx(3, 4);
    for index in [0u64, 3, 7] {
        let a = charsum(&ctx, PolySet::Irreducible, 1, index).unwrap();
        let b = charsum(&ctx, PolySet::AllMonic, 1, index).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
    let a = charsum(&ctx, PolySet::Irreducible, 2, 0).unwrap();
    let b = charsum(&ctx, PolySet::AllMonic, 2, 0).unwrap();
    assert!((a.re - 3.0).abs() < 1e-12);
    assert!((b.re - 9.0).abs() < 1e-12);
}

#[test]
fn weight_norm_inequalities() {
    // l2^2 <= l1 * linf, the chain used by the energy bounds.
    for seed in 0..20u64 {
        let w = Weight::random(3, 3, seed);
        assert!(w.l2().powi(2) <= w.l1() * w.linf() + 1e-9);
    }
    let zero = Weight::from_values(3, 1, vec![Complex64::new(0.0, 0.0); 3]).unwrap();
    assert_eq!(zero.l1(), 0.0);
    assert_eq!(zero.linf(), 0.0);
}
