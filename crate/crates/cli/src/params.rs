//! Command parameters: one struct read from both the JSON config and the
//! command line. Config keys are the long flag names (`max-retries`, `N`,
//! `R`, ...); flags win over config keys of the same name.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use msl::convex_geometry::{BodySpec, Exponent};
use msl::{CosineProduct, PrunedArrangement};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A dimension or an inclusive range `a..b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dims {
    One(usize),
    Range(String),
}

impl Dims {
    pub fn expand(&self) -> Result<Vec<usize>, String> {
        match self {
            Dims::One(d) => Ok(vec![*d]),
            Dims::Range(s) => match s.split_once("..") {
                Some((a, b)) => {
                    let a: usize = a.trim().parse().map_err(|_| format!("bad dimension range {s:?}"))?;
                    let b = b.trim().trim_start_matches('=');
                    let b: usize = b.parse().map_err(|_| format!("bad dimension range {s:?}"))?;
                    if a > b {
                        return Err(format!("empty dimension range {s:?}"));
                    }
                    Ok((a..=b).collect())
                }
                None => s.trim().parse().map(|d| vec![d]).map_err(|_| format!("bad dimension {s:?}")),
            },
        }
    }

    pub fn single(&self) -> Result<usize, String> {
        match self.expand()?.as_slice() {
            [d] => Ok(*d),
            _ => Err("expected a single dimension".into()),
        }
    }
}

/// A body name (`ball`, `cube`, `lp`, `oracle-grid`) completed by `d`, `R`,
/// `p` and `grid`, or a full body object in the config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BodyArg {
    Name(String),
    Spec(BodySpec),
}

fn dims(s: &str) -> Result<Dims, String> {
    let d = Dims::Range(s.to_string());
    d.expand()?;
    Ok(match s.parse() {
        Ok(n) => Dims::One(n),
        Err(_) => d,
    })
}

fn exponent(s: &str) -> Result<Exponent, String> {
    let p: f64 = s.parse().map_err(|_| format!("bad exponent {s:?}"))?;
    Ok(Exponent(p))
}

fn json<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_str(s).map_err(|e| e.to_string())
}

fn body_name(s: &str) -> Result<BodyArg, String> {
    Ok(BodyArg::Name(s.to_string()))
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    /// JSON config file; flags override its keys.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Thread budget (default: MSL_THREADS, else all cores).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,

    /// Dimension, or a range such as `2..4`.
    #[arg(long = "d", global = true, value_parser = dims)]
    #[serde(rename = "d", skip_serializing_if = "Option::is_none")]
    pub d: Option<Dims>,
    /// ball, cube, lp or oracle-grid.
    #[arg(long, global = true, value_parser = body_name)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub body: Option<BodyArg>,
    /// Radius of a ball or half-width of a cube; radius for ronkin and crofton.
    #[arg(long = "R", global = true)]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// lp-ball exponent (`inf` allowed).
    #[arg(long, global = true, value_parser = exponent)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    /// Support values on a uniform angular grid (oracle-grid bodies).
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,

    /// Cosine product as JSON: `{"dimension":2,"terms":[{"a":1,"nu":[1,0]}]}`.
    #[arg(long, global = true, value_parser = json::<CosineProduct>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<CosineProduct>,
    /// Arrangement as JSON: `{"dimension":2,"families":[...],"rho":0}`.
    #[arg(long, global = true, value_parser = json::<PrunedArrangement>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arrangement: Option<PrunedArrangement>,

    #[arg(long = "N", global = true)]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Constant weight g.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// Boundary samples behind the mu estimate (M).
    #[arg(long = "M", global = true)]
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub mu_samples: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_retries: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polar_resolution: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_resolution: Option<usize>,

    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Profile radii, each in (0, 1).
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_list: Option<Vec<f64>>,
    /// Explicit centers (config only).
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<Vec<f64>>>,
    /// Centers per axis of the default grid over one period.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_grid: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_dirs: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lines: Option<usize>,

    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[arg(long = "T", global = true)]
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Support value in direction theta (default: the spectrum's own).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_theta: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,

    /// Norm exponent of the sampling sweep (`inf` allowed).
    #[arg(long, global = true, value_parser = exponent)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_p: Option<Exponent>,
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub densities: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[arg(long = "box", global = true)]
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_half_width: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adversarial: Option<bool>,
}

impl Params {
    /// Config values overlaid by the flags that were given.
    pub fn merge(config: Params, flags: &Params) -> Result<Params, String> {
        let mut base = serde_json::to_value(config).map_err(|e| e.to_string())?;
        let top = serde_json::to_value(flags).map_err(|e| e.to_string())?;
        if let (Value::Object(b), Value::Object(t)) = (&mut base, top) {
            b.extend(t);
        }
        serde_json::from_value(base).map_err(|e| e.to_string())
    }

    /// The parameters that shape the result, for echoing in the output.
    pub fn echo(&self) -> Value {
        let mut v = serde_json::to_value(self).unwrap_or(Value::Null);
        if let Value::Object(m) = &mut v {
            for k in ["config", "threads", "out", "format"] {
                m.remove(k);
            }
        }
        v
    }
}
