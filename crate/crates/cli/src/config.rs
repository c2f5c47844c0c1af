//! Configuration loading with JSON-pointer error reporting.
//!
//! The configuration file is a single JSON object; every key is optional and
//! falls back to a documented default. Schema violations are reported with
//! the JSON pointer of the offending value so they can be located directly.

use std::path::Path;

use cantorcut_core::rat::{parse_rat, rat, rat_int, Rat};
use cantorcut_core::window::{CantorKind, CantorScheme};
use num_traits::{Signed, Zero};
use serde_json::Value;

use crate::CliError;

/// How the window is assembled over the carrier.
#[derive(Debug, Clone)]
pub enum BuilderSpec {
    /// The carrier residual itself (no gap re-insertion).
    Residual,
    /// Bernoulli(p) gap selection; `seed` defaults to the seed derived for
    /// the `window-builder` component from the root seed.
    Random { seed: Option<u64>, p: Rat },
    /// Explicit per-gap bits in canonical order.
    Explicit { bits: Vec<bool> },
    /// The arithmetic gap family indexed by j.
    Family { j: u32 },
    /// Anchored deterministic window with the given anchor count.
    Deterministic { anchors: usize },
    /// Weak (empty-interior) window; `insert` is the positive-measure
    /// carrier inserted into the marker gaps.
    Weak { anchors: usize, insert: CantorKind },
    /// Exactly known window: a finite union of closed intervals, ignoring
    /// the carrier (e.g. the unit interval for classical density runs).
    Exact { parts: Vec<(Rat, Rat)> },
}

impl BuilderSpec {
    pub fn name(&self) -> &'static str {
        match self {
            BuilderSpec::Residual => "residual",
            BuilderSpec::Random { .. } => "random",
            BuilderSpec::Explicit { .. } => "explicit",
            BuilderSpec::Family { .. } => "family",
            BuilderSpec::Deterministic { .. } => "deterministic",
            BuilderSpec::Weak { .. } => "weak",
            BuilderSpec::Exact { .. } => "exact",
        }
    }
}

/// Effective run configuration after defaults and file values are merged
/// (command-line flags are applied on top by the caller).
#[derive(Debug, Clone)]
pub struct Config {
    pub root_seed: u64,
    pub theta: Rat,
    pub h: Rat,
    /// Optional exact construction h = star(l) − offset, overriding `h`.
    pub h_from_lattice: Option<(Vec<i64>, Rat)>,
    pub t: Vec<i64>,
    pub radius: i64,
    pub depth: u32,
    /// Box radius for the free-point pool.
    pub free_t: i64,
    /// Number of base points used by pattern analyses (≤ 10).
    pub base_points: usize,
    /// Nesting levels for the topological independence check.
    pub levels: u32,
    /// Endpoint tolerance for the genericity scan.
    pub tolerance: Rat,
    /// Density margin for the ergodicity diagnostic.
    pub margin: f64,
    /// Maximal-density reference for the ergodicity diagnostic; defaults to
    /// 1/|det A|.
    pub nu_max: Option<f64>,
    pub carrier: CantorKind,
    pub builder: BuilderSpec,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            root_seed: 42,
            theta: Rat::zero(),
            h: Rat::zero(),
            h_from_lattice: None,
            t: vec![1_000],
            radius: 1_000,
            depth: 10,
            free_t: 2,
            base_points: 3,
            levels: 2,
            tolerance: rat(1, 1_000_000),
            margin: 0.1,
            nu_max: None,
            carrier: CantorKind::fat_default(),
            builder: BuilderSpec::Random {
                seed: None,
                p: rat(1, 2),
            },
        }
    }
}

fn cfg_err(pointer: &str, detail: impl Into<String>) -> CliError {
    CliError::Config {
        pointer: pointer.to_string(),
        detail: detail.into(),
    }
}

fn expect_u64(v: &Value, ptr: &str) -> Result<u64, CliError> {
    v.as_u64()
        .ok_or_else(|| cfg_err(ptr, "expected a non-negative integer"))
}

fn expect_i64(v: &Value, ptr: &str) -> Result<i64, CliError> {
    if let Some(x) = v.as_i64() {
        return Ok(x);
    }
    if let Some(x) = v.as_f64() {
        if x.is_finite() && x.abs() < 9e15 {
            return Ok(x.round() as i64);
        }
    }
    Err(cfg_err(ptr, "expected a number"))
}

fn expect_f64(v: &Value, ptr: &str) -> Result<f64, CliError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| cfg_err(ptr, "expected a finite number"))
}

/// Rationals are given as strings ("1/3", "0.25", "7") or JSON integers.
fn expect_rat(v: &Value, ptr: &str) -> Result<Rat, CliError> {
    match v {
        Value::String(s) => {
            parse_rat(s).map_err(|e| cfg_err(ptr, format!("not a rational: {e}")))
        }
        Value::Number(n) if n.is_i64() => Ok(rat_int(n.as_i64().unwrap())),
        _ => Err(cfg_err(ptr, "expected a rational as a string like \"1/3\"")),
    }
}

fn expect_obj<'v>(
    v: &'v Value,
    ptr: &str,
) -> Result<&'v serde_json::Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| cfg_err(ptr, "expected an object"))
}

fn parse_t_list(v: &Value, ptr: &str) -> Result<Vec<i64>, CliError> {
    let items: Vec<&Value> = match v {
        Value::Array(a) => a.iter().collect(),
        other => vec![other],
    };
    if items.is_empty() {
        return Err(cfg_err(ptr, "expected at least one box radius"));
    }
    let mut out = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let t = expect_i64(item, &format!("{ptr}/{i}"))?;
        if t < 1 {
            return Err(cfg_err(&format!("{ptr}/{i}"), "box radius must be ≥ 1"));
        }
        out.push(t);
    }
    Ok(out)
}

fn parse_carrier(v: &Value, ptr: &str) -> Result<CantorKind, CliError> {
    let kind: CantorKind = serde_json::from_value(v.clone())
        .map_err(|e| cfg_err(ptr, format!("invalid carrier descriptor: {e}")))?;
    // Surface parameter-domain violations as config errors.
    CantorScheme::new(kind.clone()).map_err(|e| cfg_err(ptr, e.to_string()))?;
    Ok(kind)
}

fn parse_builder(v: &Value, ptr: &str) -> Result<BuilderSpec, CliError> {
    let obj = expect_obj(v, ptr)?;
    let type_ptr = format!("{ptr}/type");
    let ty = obj
        .get("type")
        .ok_or_else(|| cfg_err(&type_ptr, "missing builder type"))?
        .as_str()
        .ok_or_else(|| cfg_err(&type_ptr, "expected a string"))?;
    let known_keys: &[&str] = match ty {
        "residual" => &["type"],
        "random" => &["type", "seed", "p"],
        "explicit" => &["type", "bits"],
        "family" => &["type", "j"],
        "deterministic" => &["type", "anchors"],
        "weak" => &["type", "anchors", "insert"],
        "exact" => &["type", "parts"],
        other => {
            return Err(cfg_err(
                &type_ptr,
                format!(
                    "unknown builder {other:?}; expected residual, random, explicit, \
                     family, deterministic, weak, or exact"
                ),
            ))
        }
    };
    for key in obj.keys() {
        if !known_keys.contains(&key.as_str()) {
            return Err(cfg_err(
                &format!("{ptr}/{key}"),
                format!("unknown key for builder {ty:?}"),
            ));
        }
    }
    match ty {
        "residual" => Ok(BuilderSpec::Residual),
        "random" => {
            let seed = obj
                .get("seed")
                .map(|v| expect_u64(v, &format!("{ptr}/seed")))
                .transpose()?;
            let p = match obj.get("p") {
                Some(v) => expect_rat(v, &format!("{ptr}/p"))?,
                None => rat(1, 2),
            };
            if !p.is_positive() || p >= rat_int(1) {
                return Err(cfg_err(&format!("{ptr}/p"), "p must lie in (0, 1)"));
            }
            Ok(BuilderSpec::Random { seed, p })
        }
        "explicit" => {
            let bits_ptr = format!("{ptr}/bits");
            let arr = obj
                .get("bits")
                .ok_or_else(|| cfg_err(&bits_ptr, "missing bits array"))?
                .as_array()
                .ok_or_else(|| cfg_err(&bits_ptr, "expected an array of booleans"))?;
            let mut bits = Vec::with_capacity(arr.len());
            for (i, b) in arr.iter().enumerate() {
                bits.push(
                    b.as_bool()
                        .ok_or_else(|| cfg_err(&format!("{bits_ptr}/{i}"), "expected a boolean"))?,
                );
            }
            Ok(BuilderSpec::Explicit { bits })
        }
        "family" => {
            let j_ptr = format!("{ptr}/j");
            let j = expect_u64(
                obj.get("j").ok_or_else(|| cfg_err(&j_ptr, "missing index j"))?,
                &j_ptr,
            )?;
            if j == 0 || j > u32::MAX as u64 {
                return Err(cfg_err(&j_ptr, "family index must be a positive u32"));
            }
            Ok(BuilderSpec::Family { j: j as u32 })
        }
        "deterministic" | "weak" => {
            let anchors_ptr = format!("{ptr}/anchors");
            let anchors = match obj.get("anchors") {
                Some(v) => expect_u64(v, &anchors_ptr)? as usize,
                None => 20,
            };
            if anchors == 0 {
                return Err(cfg_err(&anchors_ptr, "anchor count must be positive"));
            }
            if ty == "deterministic" {
                Ok(BuilderSpec::Deterministic { anchors })
            } else {
                let insert_ptr = format!("{ptr}/insert");
                let insert = match obj.get("insert") {
                    Some(v) => parse_carrier(v, &insert_ptr)?,
                    None => CantorKind::fat_default(),
                };
                let insert_scheme =
                    CantorScheme::new(insert.clone()).expect("validated just above");
                if !insert_scheme.limit_measure().is_positive() {
                    return Err(cfg_err(
                        &insert_ptr,
                        "inserted carrier must keep positive measure in the limit",
                    ));
                }
                Ok(BuilderSpec::Weak { anchors, insert })
            }
        }
        "exact" => {
            let parts_ptr = format!("{ptr}/parts");
            let arr = obj
                .get("parts")
                .ok_or_else(|| cfg_err(&parts_ptr, "missing interval list"))?
                .as_array()
                .ok_or_else(|| cfg_err(&parts_ptr, "expected an array of [lo, hi] pairs"))?;
            if arr.is_empty() {
                return Err(cfg_err(&parts_ptr, "expected at least one interval"));
            }
            let mut parts = Vec::with_capacity(arr.len());
            for (i, pair) in arr.iter().enumerate() {
                let pair_ptr = format!("{parts_ptr}/{i}");
                let ends = pair
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| cfg_err(&pair_ptr, "expected a [lo, hi] pair"))?;
                let lo = expect_rat(&ends[0], &format!("{pair_ptr}/0"))?;
                let hi = expect_rat(&ends[1], &format!("{pair_ptr}/1"))?;
                if lo > hi {
                    return Err(cfg_err(&pair_ptr, "interval endpoints out of order"));
                }
                parts.push((lo, hi));
            }
            Ok(BuilderSpec::Exact { parts })
        }
        _ => unreachable!("filtered above"),
    }
}

fn parse_window(cfg: &mut Config, v: &Value) -> Result<(), CliError> {
    let obj = expect_obj(v, "/window")?;
    for key in obj.keys() {
        match key.as_str() {
            "carrier" | "builder" => {}
            other => {
                return Err(cfg_err(
                    &format!("/window/{other}"),
                    "unknown key; expected carrier or builder",
                ))
            }
        }
    }
    if let Some(c) = obj.get("carrier") {
        cfg.carrier = parse_carrier(c, "/window/carrier")?;
    }
    if let Some(b) = obj.get("builder") {
        cfg.builder = parse_builder(b, "/window/builder")?;
    }
    Ok(())
}

fn parse_h_from_lattice(v: &Value) -> Result<(Vec<i64>, Rat), CliError> {
    let obj = expect_obj(v, "/hFromLattice")?;
    for key in obj.keys() {
        match key.as_str() {
            "l" | "offset" => {}
            other => {
                return Err(cfg_err(
                    &format!("/hFromLattice/{other}"),
                    "unknown key; expected l or offset",
                ))
            }
        }
    }
    let l_ptr = "/hFromLattice/l";
    let arr = obj
        .get("l")
        .ok_or_else(|| cfg_err(l_ptr, "missing lattice coordinates"))?
        .as_array()
        .ok_or_else(|| cfg_err(l_ptr, "expected an integer array"))?;
    let mut l = Vec::with_capacity(arr.len());
    for (i, x) in arr.iter().enumerate() {
        l.push(
            x.as_i64()
                .ok_or_else(|| cfg_err(&format!("{l_ptr}/{i}"), "expected an integer"))?,
        );
    }
    if l.len() != 2 {
        return Err(cfg_err(l_ptr, "expected exactly 2 coordinates"));
    }
    let offset = match obj.get("offset") {
        Some(v) => expect_rat(v, "/hFromLattice/offset")?,
        None => Rat::zero(),
    };
    Ok((l, offset))
}

/// Read the raw configuration bytes (`{}` when no file is given).
pub fn load_bytes(path: Option<&Path>) -> Result<Vec<u8>, CliError> {
    match path {
        None => Ok(b"{}".to_vec()),
        Some(p) => std::fs::read(p).map_err(|e| {
            CliError::Usage(format!("cannot read config {}: {e}", p.display()))
        }),
    }
}

/// Parse configuration bytes into an effective [`Config`].
pub fn from_bytes(bytes: &[u8]) -> Result<Config, CliError> {
    let v: Value = serde_json::from_slice(bytes)
        .map_err(|e| cfg_err("", format!("configuration is not valid JSON: {e}")))?;
    let obj = expect_obj(&v, "")?;
    let mut cfg = Config::default();
    for (key, val) in obj {
        match key.as_str() {
            "rootSeed" => cfg.root_seed = expect_u64(val, "/rootSeed")?,
            "theta" => cfg.theta = expect_rat(val, "/theta")?,
            "h" => cfg.h = expect_rat(val, "/h")?,
            "hFromLattice" => cfg.h_from_lattice = Some(parse_h_from_lattice(val)?),
            "t" => cfg.t = parse_t_list(val, "/t")?,
            "radius" => {
                cfg.radius = expect_i64(val, "/radius")?;
                if cfg.radius < 1 {
                    return Err(cfg_err("/radius", "scan radius must be ≥ 1"));
                }
            }
            "depth" => {
                let d = expect_u64(val, "/depth")?;
                if d > 24 {
                    return Err(cfg_err("/depth", "depth above 24 is not materializable"));
                }
                cfg.depth = d as u32;
            }
            "freeT" => {
                cfg.free_t = expect_i64(val, "/freeT")?;
                if cfg.free_t < 1 {
                    return Err(cfg_err("/freeT", "free-point box radius must be ≥ 1"));
                }
            }
            "basePoints" => {
                let n = expect_u64(val, "/basePoints")? as usize;
                if n == 0 || n > 10 {
                    return Err(cfg_err("/basePoints", "base-point count must be in 1..=10"));
                }
                cfg.base_points = n;
            }
            "levels" => {
                let n = expect_u64(val, "/levels")?;
                if n == 0 || n > 8 {
                    return Err(cfg_err("/levels", "witness levels must be in 1..=8"));
                }
                cfg.levels = n as u32;
            }
            "tolerance" => {
                cfg.tolerance = expect_rat(val, "/tolerance")?;
                if !cfg.tolerance.is_positive() {
                    return Err(cfg_err("/tolerance", "tolerance must be positive"));
                }
            }
            "margin" => {
                cfg.margin = expect_f64(val, "/margin")?;
                if cfg.margin < 0.0 {
                    return Err(cfg_err("/margin", "margin must be non-negative"));
                }
            }
            "nuMax" => {
                let x = expect_f64(val, "/nuMax")?;
                if x <= 0.0 {
                    return Err(cfg_err("/nuMax", "density reference must be positive"));
                }
                cfg.nu_max = Some(x);
            }
            "window" => parse_window(&mut cfg, val)?,
            other => {
                return Err(cfg_err(
                    &format!("/{other}"),
                    "unknown configuration key",
                ))
            }
        }
    }
    Ok(cfg)
}
