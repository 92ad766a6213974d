use anyhow::{anyhow, bail, Result};
use ffenergy_core::field::Weight;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Weight source for sweep configs and the --weights flag: the window
/// indicator, a seeded generator, or a JSON file.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    #[default]
    Indicator,
    Seed {
        seed: u64,
    },
    File {
        path: String,
    },
}

impl WeightSpec {
    /// Parses the --weights argument: "indicator", "seed:N", or a file path.
    pub fn parse(arg: &str) -> Result<WeightSpec> {
        if arg == "indicator" {
            return Ok(WeightSpec::Indicator);
        }
        if let Some(seed) = arg.strip_prefix("seed:") {
            return Ok(WeightSpec::Seed {
                seed: seed
                    .parse()
                    .map_err(|_| anyhow!("bad seed in --weights '{arg}'"))?,
            });
        }
        Ok(WeightSpec::File { path: arg.into() })
    }

    /// Stable description recorded in report parameters.
    pub fn describe(&self, derived_seed: Option<u64>) -> String {
        match self {
            WeightSpec::Indicator => "indicator".into(),
            WeightSpec::Seed { .. } => match derived_seed {
                Some(s) => format!("chacha8:{s}"),
                None => "chacha8".into(),
            },
            WeightSpec::File { path } => format!("file:{path}"),
        }
    }

    /// Materializes the weight for a window. Seeded sources mix the base
    /// seed with the caller-supplied stream id, so distinct grid points and
    /// roles draw independent, schedule-free values.
    pub fn materialize(&self, q: u64, window: usize, stream: u64) -> Result<Weight> {
        match self {
            WeightSpec::Indicator => Ok(Weight::indicator(q, window)),
            WeightSpec::Seed { seed } => Ok(Weight::random(q, window, seed ^ stream)),
            WeightSpec::File { path } => load_weight_file(Path::new(path), q, window),
        }
    }

    pub fn is_seeded(&self) -> bool {
        matches!(self, WeightSpec::Seed { .. })
    }

    pub fn base_seed(&self) -> Option<u64> {
        match self {
            WeightSpec::Seed { seed } => Some(*seed),
            _ => None,
        }
    }
}

/// Weight files hold either a bare array of [re, im] pairs or an object
/// {"alpha": [...], "beta": [...]}; the role picks the array.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightRole {
    Alpha,
    Beta,
}

impl WeightRole {
    pub fn stream_tag(self) -> u64 {
        match self {
            WeightRole::Alpha => 0xa1fa,
            WeightRole::Beta => 0xbe7a,
        }
    }
}

fn parse_pairs(value: &serde_json::Value) -> Result<Vec<Complex64>> {
    let arr = value
        .as_array()
        .ok_or_else(|| anyhow!("weight entry is not an array"))?;
    arr.iter()
        .map(|pair| {
            let parts = pair
                .as_array()
                .ok_or_else(|| anyhow!("weight value must be a [re, im] pair"))?;
            if parts.len() != 2 {
                bail!("weight value must be a [re, im] pair");
            }
            let re = parts[0]
                .as_f64()
                .ok_or_else(|| anyhow!("re not a number"))?;
            let im = parts[1]
                .as_f64()
                .ok_or_else(|| anyhow!("im not a number"))?;
            Ok(Complex64::new(re, im))
        })
        .collect()
}

fn load_weight_file(path: &Path, q: u64, window: usize) -> Result<Weight> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let values = parse_pairs(&value)?;
    Ok(Weight::from_values(q, window, values)?)
}

/// Loads a role-specific array from a weight file that may carry both.
pub fn load_weight_file_role(
    path: &Path,
    q: u64,
    window: usize,
    role: WeightRole,
) -> Result<Weight> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let key = match role {
        WeightRole::Alpha => "alpha",
        WeightRole::Beta => "beta",
    };
    let entry = match &value {
        serde_json::Value::Object(map) => map
            .get(key)
            .or_else(|| map.get("alpha"))
            .ok_or_else(|| anyhow!("weight file has no '{key}' entry"))?,
        other => other,
    };
    let values = parse_pairs(entry)?;
    Ok(Weight::from_values(q, window, values)?)
}

/// Materializes a role-aware weight (files may differ per role; seeded
/// sources use a role-tagged stream).
pub fn weight_for_role(
    spec: &WeightSpec,
    q: u64,
    window: usize,
    stream: u64,
    role: WeightRole,
) -> Result<Weight> {
    match spec {
        WeightSpec::File { path } => load_weight_file_role(Path::new(path), q, window, role),
        other => other.materialize(q, window, stream ^ role.stream_tag()),
    }
}
