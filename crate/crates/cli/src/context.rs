use anyhow::{Context as _, Result};
use ffenergy_core::field::{
    build_context, build_context_cached, FieldSpec, ResidueField, DEFAULT_TABLE_BUDGET,
};
use std::path::PathBuf;
use std::sync::Arc;

/// Environment variable overriding the table-cache location.
pub const CACHE_DIR_ENV: &str = "FFENERGY_CACHE_DIR";

/// How to build residue fields: spec string, modulus policy, budget, cache.
#[derive(Clone, Debug)]
pub struct ContextOptions {
    pub auto_modulus: bool,
    pub table_budget: u64,
    pub cache_dir: Option<PathBuf>,
}

impl Default for ContextOptions {
    fn default() -> Self {
        ContextOptions {
            auto_modulus: false,
            table_budget: DEFAULT_TABLE_BUDGET,
            cache_dir: None,
        }
    }
}

impl ContextOptions {
    /// Resolves the cache directory: explicit flag first, then the
    /// environment variable, else no caching.
    pub fn effective_cache_dir(&self) -> Option<PathBuf> {
        self.cache_dir
            .clone()
            .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
    }

    pub fn build(&self, spec_text: &str) -> Result<Arc<ResidueField>> {
        let spec = FieldSpec::parse(spec_text)
            .with_context(|| format!("parsing field spec '{spec_text}'"))?;
        let (fq, modulus) = spec
            .resolve(self.auto_modulus)
            .with_context(|| format!("resolving field spec '{spec_text}'"))?;
        let ctx = match self.effective_cache_dir() {
            Some(dir) => build_context_cached(&fq, &modulus, self.table_budget, &dir)?,
            None => build_context(&fq, &modulus, self.table_budget)?,
        };
        Ok(Arc::new(ctx))
    }
}
