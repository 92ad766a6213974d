//! Versioned binary cache for residue-field tables, keyed by the field spec
//! string hash. The cache is disposable: any mismatch, truncation or
//! checksum failure falls back to a rebuild that overwrites the file.

use super::{build_context, Elem, ResidueField};
use crate::error::Result;
use crate::gf::{FqSpec, Poly};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

const MAGIC: &[u8; 8] = b"FFETAB01";

/// FNV-1a, used for stable cache file names and content checksums.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn cache_path(dir: &Path, spec_string: &str) -> PathBuf {
    dir.join(format!("{:016x}.ffetab", fnv1a(spec_string.as_bytes())))
}

/// Builds the context through the table cache: loads the tables when a valid
/// cache file exists, otherwise builds from scratch and writes the file.
pub fn build_context_cached(
    fq: &Arc<FqSpec>,
    modulus: &Poly,
    table_budget: u64,
    cache_dir: &Path,
) -> Result<ResidueField> {
    let spec_string = format!(
        "{}^{}^{}:{}",
        fq.p(),
        fq.e(),
        modulus.degree().unwrap_or(0),
        modulus
    );
    let path = cache_path(cache_dir, &spec_string);
    if let Some(ctx) = try_load(fq, modulus, &path) {
        return Ok(ctx);
    }
    let ctx = build_context(fq, modulus, table_budget)?;
    // Cache write failures are not fatal; the context is already built.
    let _ = save(&ctx, cache_dir);
    Ok(ctx)
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new() -> Writer {
        Writer { buf: Vec::new() }
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u32_slice(&mut self, vs: &[u32]) {
        self.u64(vs.len() as u64);
        for &v in vs {
            self.buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    fn u64_slice(&mut self, vs: &[u64]) {
        self.u64(vs.len() as u64);
        for &v in vs {
            self.u64(v);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Reader<'a> {
        Reader { buf, pos: 0 }
    }
    fn u64(&mut self) -> Option<u64> {
        let end = self.pos.checked_add(8)?;
        let bytes = self.buf.get(self.pos..end)?;
        self.pos = end;
        Some(u64::from_le_bytes(bytes.try_into().ok()?))
    }
    fn u32_slice(&mut self) -> Option<Vec<u32>> {
        let len = self.u64()? as usize;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let end = self.pos.checked_add(4)?;
            let bytes = self.buf.get(self.pos..end)?;
            self.pos = end;
            out.push(u32::from_le_bytes(bytes.try_into().ok()?));
        }
        Some(out)
    }
    fn u64_slice(&mut self) -> Option<Vec<u64>> {
        let len = self.u64()? as usize;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.u64()?);
        }
        Some(out)
    }
}

/// Serializes all integer tables; complex root tables are rebuilt on load.
pub fn save(ctx: &ResidueField, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let tables = ctx.raw_tables();
    let mut w = Writer::new();
    w.buf.extend_from_slice(MAGIC);
    w.u64(ctx.fq().p());
    w.u64(ctx.fq().e() as u64);
    w.u64(ctx.r() as u64);
    w.u64(ctx.size());
    w.u64_slice(ctx.fq().base_modulus());
    w.u64_slice(ctx.modulus().coeffs());
    w.u64(tables.generator.encoding());
    w.u32_slice(tables.exp);
    w.u32_slice(tables.log);
    w.u32_slice(tables.sqrt);
    w.u32_slice(tables.trace_q);
    w.u32_slice(tables.trace_p);
    let dual: Vec<u32> = tables
        .dual_basis
        .iter()
        .map(|e| e.encoding() as u32)
        .collect();
    w.u32_slice(&dual);
    let checksum = fnv1a(&w.buf);
    w.u64(checksum);

    let path = cache_path(dir, &ctx.spec_string());
    let tmp = path.with_extension("ffetab.tmp");
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(&w.buf)?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Returns None on any mismatch or corruption; the caller rebuilds.
fn try_load(fq: &Arc<FqSpec>, modulus: &Poly, path: &Path) -> Option<ResidueField> {
    let buf = fs::read(path).ok()?;
    if buf.len() < MAGIC.len() + 8 || &buf[..MAGIC.len()] != MAGIC {
        return None;
    }
    let body = &buf[..buf.len() - 8];
    let stored = u64::from_le_bytes(buf[buf.len() - 8..].try_into().ok()?);
    if fnv1a(body) != stored {
        return None;
    }
    let mut r = Reader::new(&body[MAGIC.len()..]);
    let p = r.u64()?;
    let e = r.u64()?;
    let deg = r.u64()? as usize;
    let size = r.u64()?;
    let base_modulus = r.u64_slice()?;
    let modulus_coeffs = r.u64_slice()?;
    if p != fq.p()
        || e != fq.e() as u64
        || base_modulus != fq.base_modulus()
        || modulus_coeffs != modulus.coeffs()
        || Some(deg) != modulus.degree()
    {
        return None;
    }
    let generator = r.u64()?;
    let exp = r.u32_slice()?;
    let log = r.u32_slice()?;
    let sqrt = r.u32_slice()?;
    let trace_q = r.u32_slice()?;
    let trace_p = r.u32_slice()?;
    let dual = r.u32_slice()?;
    if exp.len() as u64 != size - 1
        || log.len() as u64 != size
        || sqrt.len() as u64 != size
        || trace_q.len() as u64 != size
        || trace_p.len() as u64 != size
        || dual.len() != deg
        || generator >= size
    {
        return None;
    }
    let dual_basis: Vec<Elem> = dual.iter().map(|&v| Elem::from_index(v as usize)).collect();
    let ctx = ResidueField::from_parts(
        Arc::clone(fq),
        modulus.clone(),
        Elem::from_index(generator as usize),
        exp,
        log,
        sqrt,
        trace_q,
        trace_p,
        dual_basis,
    );
    sanity_check(&ctx).then_some(ctx)
}

/// Cheap structural checks so a stale-but-well-formed file cannot sneak in.
fn sanity_check(ctx: &ResidueField) -> bool {
    let tables = ctx.raw_tables();
    if tables.exp.first() != Some(&1) {
        return false;
    }
    // log/exp must be mutually inverse on a few probes.
    let order = ctx.size() - 1;
    for probe in [0u64, 1, order / 2, order - 1] {
        let x = tables.exp[probe as usize % order as usize];
        if tables.log[x as usize] as u64 != probe % order {
            return false;
        }
    }
    // The dual-basis defining relation at (0, 0): Tr(omega_0) = 1.
    if ctx.trace(tables.dual_basis[0]) != 1 {
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_context_default;

    #[test]
    fn cache_roundtrip_and_corruption_recovery() {
        let fq = FqSpec::prime(3).unwrap();
        let modulus = Poly::parse(&fq, "1,2,0,1").unwrap();
        let dir = tempfile::tempdir().unwrap();

        let built = build_context_default(&fq, &modulus).unwrap();
        let path = save(&built, dir.path()).unwrap();
        assert!(path.exists());

        let loaded = build_context_cached(&fq, &modulus, 1 << 24, dir.path()).unwrap();
        assert_eq!(loaded.generator(), built.generator());
        assert_eq!(loaded.raw_tables().exp, built.raw_tables().exp);

        // Corrupt the file: the loader must fall back to a clean rebuild.
        let mut bytes = fs::read(&path).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0xff;
        fs::write(&path, &bytes).unwrap();
        let rebuilt = build_context_cached(&fq, &modulus, 1 << 24, dir.path()).unwrap();
        assert_eq!(rebuilt.generator(), built.generator());
        // And the rebuild refreshed the file to a valid state.
        let reloaded = build_context_cached(&fq, &modulus, 1 << 24, dir.path()).unwrap();
        assert_eq!(reloaded.raw_tables().log, built.raw_tables().log);
    }
}
