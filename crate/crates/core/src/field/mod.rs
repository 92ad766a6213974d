//! Immutable computational context for F_q\[X\]/F(X) = F_{q^r}: reduction,
//! inversion via discrete-log tables, trace, dual basis, characters, square
//! roots and the degree-window (f ~ m) machinery.
//!
//! Elements are canonical integer encodings in `[0, q^r)`: the base-q digits
//! of the encoding are the coefficients of the reduced residue in the
//! power basis 1, rho, ..., rho^{r-1} (rho a root of F). Windows are then
//! integer ranges: deg f < m exactly when the encoding is below q^m.

mod cache;
mod chars;
mod histogram;
mod spec;
mod weight;

pub use cache::build_context_cached;
pub use histogram::Histogram;
pub use spec::FieldSpec;
pub use weight::{Weight, WEIGHT_GENERATOR};

use crate::error::{Error, Result};
use crate::gf::{FqSpec, Poly};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

/// Default cap on q^r for table mode.
pub const DEFAULT_TABLE_BUDGET: u64 = 1 << 24;

const NO_LOG: u32 = u32::MAX;
const NO_ROOT: u32 = u32::MAX;

/// An element of F_{q^r}: a reduced residue of degree < r, carried as its
/// canonical encoding.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn encoding(self) -> u64 {
        self.0 as u64
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(i: usize) -> Elem {
        Elem(i as u32)
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Elem({})", self.0)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The 0, 1 or 2 solutions of h^2 = a.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SquareRoots {
    None,
    One(Elem),
    Two(Elem, Elem),
}

impl SquareRoots {
    pub fn count(self) -> usize {
        match self {
            SquareRoots::None => 0,
            SquareRoots::One(_) => 1,
            SquareRoots::Two(_, _) => 2,
        }
    }

    pub fn iter(self) -> impl Iterator<Item = Elem> {
        let (a, b) = match self {
            SquareRoots::None => (None, None),
            SquareRoots::One(x) => (Some(x), None),
            SquareRoots::Two(x, y) => (Some(x), Some(y)),
        };
        a.into_iter().chain(b)
    }
}

/// Immutable context for F_q\[X\]/F(X). All operations are pure reads; the
/// value is safe to share across threads.
pub struct ResidueField {
    fq: Arc<FqSpec>,
    modulus: Poly,
    r: usize,
    size: u64,
    generator: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
    sqrt: Vec<u32>,
    trace_q: Vec<u32>,
    trace_p: Vec<u32>,
    dual_basis: Vec<Elem>,
    psi_roots: Vec<Complex64>,
}

impl fmt::Debug for ResidueField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ResidueField({})", self.spec_string())
    }
}

/// Builds the context with the default table budget.
pub fn build_context_default(fq: &Arc<FqSpec>, modulus: &Poly) -> Result<ResidueField> {
    build_context(fq, modulus, DEFAULT_TABLE_BUDGET)
}

/// Builds the full table context for F_q\[X\]/F(X). The generator is the
/// element of smallest encoding that generates the multiplicative group, so
/// all derived tables are deterministic across runs and platforms.
pub fn build_context(fq: &Arc<FqSpec>, modulus: &Poly, table_budget: u64) -> Result<ResidueField> {
    if !fq.same_field(modulus.fq()) {
        return Err(Error::MixedFields);
    }
    let r = match modulus.degree() {
        None | Some(0) => return Err(Error::ModulusNotIrreducible),
        Some(r) => r,
    };
    if !modulus.is_monic() {
        return Err(Error::ModulusNotIrreducible);
    }
    if !modulus.is_irreducible()? {
        return Err(Error::ModulusNotIrreducible);
    }
    let size_wide = (fq.q() as u128).pow(r as u32);
    if size_wide > table_budget as u128 || size_wide > u32::MAX as u128 {
        return Err(Error::FieldTooLarge {
            size: size_wide,
            budget: table_budget.min(u32::MAX as u64),
        });
    }
    let size = size_wide as u64;

    let mut ctx = ResidueField {
        fq: Arc::clone(fq),
        modulus: modulus.clone(),
        r,
        size,
        generator: Elem::ZERO,
        exp: Vec::new(),
        log: Vec::new(),
        sqrt: Vec::new(),
        trace_q: Vec::new(),
        trace_p: Vec::new(),
        dual_basis: Vec::new(),
        psi_roots: Vec::new(),
    };
    ctx.generator = ctx.find_generator()?;
    ctx.build_log_tables();
    ctx.build_sqrt_table();
    ctx.build_trace_tables();
    ctx.build_dual_basis()?;
    ctx.psi_roots = psi_roots(fq.p());
    Ok(ctx)
}

pub(crate) fn psi_roots(p: u64) -> Vec<Complex64> {
    (0..p)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / p as f64))
        .collect()
}

fn prime_divisors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl ResidueField {
    // ----- construction internals -----

    /// Multiplication through polynomial reduction; used only while the log
    /// tables are being built.
    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let pa = self.to_poly(a);
        let pb = self.to_poly(b);
        self.from_poly(&pa.mul(&pb))
    }

    fn pow_slow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    fn find_generator(&self) -> Result<Elem> {
        let order = self.size - 1;
        let primes = prime_divisors_u64(order);
        for enc in 1..self.size {
            let cand = Elem(enc as u32);
            if primes
                .iter()
                .all(|&l| self.pow_slow(cand, order / l) != Elem::ONE)
            {
                return Ok(cand);
            }
        }
        Err(Error::ModulusNotIrreducible)
    }

    fn build_log_tables(&mut self) {
        let order = (self.size - 1) as usize;
        let mut exp = vec![0u32; order.max(1)];
        let mut log = vec![NO_LOG; self.size as usize];
        let mut acc = Elem::ONE;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = acc.0;
            debug_assert!(
                log[acc.index()] == NO_LOG,
                "generator has order below q^r - 1"
            );
            log[acc.index()] = i as u32;
            acc = self.mul_slow(acc, self.generator);
        }
        debug_assert_eq!(acc, Elem::ONE, "generator order must divide q^r - 1");
        self.exp = exp;
        self.log = log;
    }

    fn build_sqrt_table(&mut self) {
        let mut sqrt = vec![NO_ROOT; self.size as usize];
        sqrt[0] = 0;
        for enc in 1..self.size {
            let x = Elem(enc as u32);
            let s = self.mul(x, x);
            if sqrt[s.index()] == NO_ROOT {
                sqrt[s.index()] = x.0;
            }
        }
        self.sqrt = sqrt;
    }

    fn build_trace_tables(&mut self) {
        let q = self.fq.q();
        let mut trace_q = vec![0u32; self.size as usize];
        let mut trace_p = vec![0u32; self.size as usize];
        for enc in 0..self.size {
            let x = Elem(enc as u32);
            let mut acc = Elem::ZERO;
            let mut frob = x;
            for _ in 0..self.r {
                acc = self.add(acc, frob);
                frob = self.pow(frob, q);
            }
            debug_assert!(
                acc.encoding() < q,
                "trace must land in the constant subfield"
            );
            trace_q[enc as usize] = acc.0;
            trace_p[enc as usize] = self.fq.trace_to_prime(acc.encoding()) as u32;
        }
        self.trace_q = trace_q;
        self.trace_p = trace_p;
    }

    /// Dual basis omega_j of the power basis rho^i: invert the trace Gram
    /// matrix Tr(rho^{i+j}) over F_q; column j of the inverse is the digit
    /// vector of omega_j. The defining relation Tr(rho^i omega_j) = delta_ij
    /// is verified exhaustively before the context is returned.
    #[allow(clippy::needless_range_loop)] // j walks matrix columns
    fn build_dual_basis(&mut self) -> Result<()> {
        let r = self.r;
        let fq = Arc::clone(&self.fq);
        let rho_pow: Vec<Elem> = (0..=2 * r - 2)
            .map(|k| self.pow(self.rho(), k as u64))
            .collect();
        let mut gram = vec![vec![0u64; r]; r];
        for (i, row) in gram.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.trace_q[rho_pow[i + j].index()] as u64;
            }
        }
        let inv = invert_matrix(&fq, gram).ok_or(Error::ModulusNotIrreducible)?;
        let q = fq.q();
        let mut dual = Vec::with_capacity(r);
        for j in 0..r {
            let mut enc = 0u64;
            for k in (0..r).rev() {
                enc = enc * q + inv[k][j];
            }
            dual.push(Elem(enc as u32));
        }
        // Exhaustive defining-relation check.
        for (i, &rp) in rho_pow.iter().take(r).enumerate() {
            for (j, &w) in dual.iter().enumerate() {
                let t = self.trace_q[self.mul(rp, w).index()];
                let want = u32::from(i == j);
                if t != want {
                    return Err(Error::ModulusNotIrreducible);
                }
            }
        }
        self.dual_basis = dual;
        Ok(())
    }

    #[allow(clippy::too_many_arguments)] // table-cache deserialization
    pub(crate) fn from_parts(
        fq: Arc<FqSpec>,
        modulus: Poly,
        generator: Elem,
        exp: Vec<u32>,
        log: Vec<u32>,
        sqrt: Vec<u32>,
        trace_q: Vec<u32>,
        trace_p: Vec<u32>,
        dual_basis: Vec<Elem>,
    ) -> ResidueField {
        let r = modulus.degree().expect("nonzero modulus");
        let size = (fq.q() as u128).pow(r as u32) as u64;
        let p = fq.p();
        ResidueField {
            fq,
            modulus,
            r,
            size,
            generator,
            exp,
            log,
            sqrt,
            trace_q,
            trace_p,
            dual_basis,
            psi_roots: psi_roots(p),
        }
    }

    // ----- basic accessors -----

    pub fn fq(&self) -> &Arc<FqSpec> {
        &self.fq
    }

    pub fn q(&self) -> u64 {
        self.fq.q()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// q^r, the number of elements.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn generator(&self) -> Elem {
        self.generator
    }

    /// The class of X, a root of the modulus.
    pub fn rho(&self) -> Elem {
        if self.r == 1 {
            // X = -F[0] as a constant.
            Elem(self.fq.neg(self.modulus.coeff(0)) as u32)
        } else {
            Elem(self.fq.q() as u32)
        }
    }

    pub fn dual_basis(&self) -> &[Elem] {
        &self.dual_basis
    }

    /// Canonical spec string "p^e^r:c0,c1,...,cr".
    pub fn spec_string(&self) -> String {
        format!(
            "{}^{}^{}:{}",
            self.fq.p(),
            self.fq.e(),
            self.r,
            self.modulus
        )
    }

    pub fn elem(&self, enc: u64) -> Result<Elem> {
        if enc < self.size {
            Ok(Elem(enc as u32))
        } else {
            Err(Error::BadParameter {
                name: "elem",
                detail: format!("encoding {enc} not below q^r = {}", self.size),
            })
        }
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.size as u32).map(Elem)
    }

    // ----- arithmetic -----

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let q = self.fq.q();
        let (mut x, mut y) = (a.encoding(), b.encoding());
        let mut acc = 0u64;
        let mut place = 1u64;
        while x > 0 || y > 0 {
            acc += self.fq.add(x % q, y % q) * place;
            place *= q;
            x /= q;
            y /= q;
        }
        Elem(acc as u32)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let q = self.fq.q();
        let mut x = a.encoding();
        let mut acc = 0u64;
        let mut place = 1u64;
        while x > 0 {
            acc += self.fq.neg(x % q) * place;
            place *= q;
            x /= q;
        }
        Elem(acc as u32)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == Elem::ZERO || b == Elem::ZERO {
            return Elem::ZERO;
        }
        let order = self.size - 1;
        let la = self.log[a.index()] as u64;
        let lb = self.log[b.index()] as u64;
        let mut l = la + lb;
        if l >= order {
            l -= order;
        }
        Elem(self.exp[l as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == Elem::ZERO {
            return Err(Error::ZeroDivisor);
        }
        let order = self.size - 1;
        let l = self.log[a.index()] as u64;
        Ok(Elem(self.exp[((order - l) % order) as usize]))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if a == Elem::ZERO {
            return if e == 0 { Elem::ONE } else { Elem::ZERO };
        }
        let order = self.size - 1;
        if order == 0 {
            return Elem::ONE;
        }
        let l = (self.log[a.index()] as u128 * e as u128 % order as u128) as usize;
        Elem(self.exp[l])
    }

    /// Discrete log base the canonical generator; `None` at 0.
    pub fn log(&self, a: Elem) -> Option<u64> {
        let l = self.log[a.index()];
        (l != NO_LOG).then_some(l as u64)
    }

    pub fn exp(&self, l: u64) -> Elem {
        Elem(self.exp[(l % (self.size - 1)) as usize])
    }

    // ----- polynomial interface -----

    /// Reduces an arbitrary polynomial mod F and encodes the residue.
    pub fn from_poly(&self, f: &Poly) -> Elem {
        let reduced = if f.degree().is_some_and(|d| d >= self.r) {
            f.rem(&self.modulus).expect("modulus is nonzero")
        } else {
            f.clone()
        };
        Elem(reduced.encoding() as u32)
    }

    pub fn to_poly(&self, a: Elem) -> Poly {
        Poly::from_encoding(&self.fq, a.encoding() as u128)
    }

    /// Degree of the reduced residue (None for 0).
    pub fn residue_degree(&self, a: Elem) -> Option<usize> {
        if a == Elem::ZERO {
            return None;
        }
        let q = self.fq.q();
        let mut x = a.encoding();
        let mut d = 0;
        let mut deg = 0;
        while x > 0 {
            if !x.is_multiple_of(q) {
                deg = d;
            }
            x /= q;
            d += 1;
        }
        Some(deg)
    }

    // ----- windows -----

    /// Number of elements f with f ~ m.
    pub fn window_size(&self, m: usize) -> u64 {
        self.fq.q().pow(m as u32)
    }

    fn check_window(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.r {
            return Err(Error::WindowOutOfRange { m, r: self.r });
        }
        Ok(())
    }

    /// True iff the reduced residue of x has degree < m (x ~ m).
    pub fn window_test(&self, x: Elem, m: usize) -> Result<bool> {
        self.check_window(m)?;
        Ok(x.encoding() < self.window_size(m))
    }

    /// All q^m elements of the window, ascending encoding order.
    pub fn window(&self, m: usize) -> Result<impl Iterator<Item = Elem>> {
        self.check_window(m)?;
        Ok((0..self.window_size(m) as u32).map(Elem))
    }

    // ----- squares -----

    /// All h with h^2 = a: {0} at 0, both roots of a nonzero square, empty
    /// for a non-square. For odd q a nonzero square has exactly two roots.
    pub fn square_roots(&self, a: Elem) -> SquareRoots {
        if a == Elem::ZERO {
            return SquareRoots::One(Elem::ZERO);
        }
        let root = self.sqrt[a.index()];
        if root == NO_ROOT {
            return SquareRoots::None;
        }
        let h = Elem(root);
        let neg = self.neg(h);
        if neg == h {
            SquareRoots::One(h)
        } else {
            SquareRoots::Two(h, neg)
        }
    }

    pub fn is_square(&self, a: Elem) -> bool {
        a == Elem::ZERO || self.sqrt[a.index()] != NO_ROOT
    }

    // ----- trace -----

    /// Tr_{F_{q^r}/F_q}(a), as an F_q encoding.
    pub fn trace(&self, a: Elem) -> u64 {
        self.trace_q[a.index()] as u64
    }

    /// Lift of Tr_{F_{q^r}/F_p}(a) to {0, ..., p-1}.
    pub fn trace_to_prime(&self, a: Elem) -> u64 {
        self.trace_p[a.index()] as u64
    }

    pub(crate) fn psi_root(&self, lift: u64) -> Complex64 {
        self.psi_roots[lift as usize]
    }

    pub(crate) fn raw_tables(&self) -> RawTables<'_> {
        RawTables {
            generator: self.generator,
            exp: &self.exp,
            log: &self.log,
            sqrt: &self.sqrt,
            trace_q: &self.trace_q,
            trace_p: &self.trace_p,
            dual_basis: &self.dual_basis,
        }
    }
}

pub(crate) struct RawTables<'a> {
    pub generator: Elem,
    pub exp: &'a [u32],
    pub log: &'a [u32],
    pub sqrt: &'a [u32],
    pub trace_q: &'a [u32],
    pub trace_p: &'a [u32],
    pub dual_basis: &'a [Elem],
}

/// Gaussian elimination over F_q; returns None for a singular matrix.
fn invert_matrix(fq: &Arc<FqSpec>, mut m: Vec<Vec<u64>>) -> Option<Vec<Vec<u64>>> {
    let n = m.len();
    let mut inv: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&row| m[row][col] != 0)?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let piv_inv = fq.inv(m[col][col]).ok()?;
        for j in 0..n {
            m[col][j] = fq.mul(m[col][j], piv_inv);
            inv[col][j] = fq.mul(inv[col][j], piv_inv);
        }
        for row in 0..n {
            if row == col || m[row][col] == 0 {
                continue;
            }
            let factor = m[row][col];
            for j in 0..n {
                m[row][j] = fq.sub(m[row][j], fq.mul(factor, m[col][j]));
                inv[row][j] = fq.sub(inv[row][j], fq.mul(factor, inv[col][j]));
            }
        }
    }
    Some(inv)
}
