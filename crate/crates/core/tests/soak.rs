//! Longer randomized batteries, excluded from the default run:
//! `cargo test -p ffenergy-core --test soak -- --ignored`

use ffenergy_core::bilinear::{bilinear_inv, bilinear_sqrt, vinogradov_sum};
use ffenergy_core::energy::{
    energy_sqrt, energy_sqrt_bruteforce, fourth_moment_check, EnergyValue,
};
use ffenergy_core::field::{build_context, ResidueField, Weight};
use ffenergy_core::gf::{smallest_irreducible, FqSpec};

const BUDGET: u64 = 1 << 30;

fn build(p: u64, e: u32, r: usize) -> ResidueField {
    let fq = FqSpec::new(p, e).unwrap();
    let modulus = smallest_irreducible(&fq, r).unwrap();
    build_context(&fq, &modulus, 1 << 24).unwrap()
}

#[test]
#[ignore = "soak battery; run with --ignored"]
fn vinogradov_and_fourth_moment_soak() {
    for (p, e, r) in [(3u64, 1u32, 4usize), (5, 1, 3), (3, 2, 2)] {
        let ctx = build(p, e, r);
        let q = ctx.q();
        for seed in 0..500u64 {
            let alpha = Weight::random(q, r, 0xaaaa ^ seed);
            let beta = Weight::random(q, r, 0xbbbb ^ seed);
            let c = ctx.elem(1 + seed % (ctx.size() - 1)).unwrap();
            vinogradov_sum(&ctx, &alpha, &beta, c).expect("inequality holds");
        }
        for m in 1..=r {
            for t in 1..=5u64 {
                let c = ctx.elem(t % (ctx.size() - 1) + 1).unwrap();
                let fm = fourth_moment_check(&ctx, m, c, BUDGET).unwrap();
                assert!(
                    fm.relative_error < 1e-6,
                    "q={q} r={r} m={m} t={t}: {}",
                    fm.relative_error
                );
            }
        }
        for seed in 0..100u64 {
            let m = 1 + (seed as usize) % r;
            let n = 1 + (seed as usize / 3) % r;
            let alpha = Weight::random(q, m, seed);
            let beta = Weight::random(q, n, seed + 7);
            let c = ctx.elem(1 + seed % (ctx.size() - 1)).unwrap();
            let s = bilinear_sqrt(&ctx, &alpha, &beta, c, BUDGET).unwrap();
            assert!(s.abs <= s.trivial_bound * (1.0 + 1e-6) + 1e-9);
            let s = bilinear_inv(&ctx, &alpha, &beta, c, BUDGET).unwrap();
            assert!(s.abs <= s.trivial_bound * (1.0 + 1e-6) + 1e-9);
        }
    }
}

#[test]
#[ignore = "soak battery; run with --ignored"]
fn oracle_equivalence_q5() {
    let ctx = build(5, 1, 3);
    for m in 1..=3usize {
        let hist = match energy_sqrt(&ctx, &Weight::indicator(5, m), BUDGET)
            .unwrap()
            .value
        {
            EnergyValue::Count(c) => c,
            _ => unreachable!(),
        };
        let brute = match energy_sqrt_bruteforce(&ctx, m, BUDGET).unwrap().value {
            EnergyValue::Count(c) => c,
            _ => unreachable!(),
        };
        assert_eq!(hist, brute, "m = {m}");
    }
}
