//! File formats: `x,value` profile CSV, model JSON, atomic output writes,
//! and deterministic float formatting.

use sseplab_core::bernoulli::BernoulliModel;
use sseplab_core::grid::GridFunction;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Errors carry the exit code contract: validation problems map to 2.
#[derive(Debug)]
pub struct IoError(pub String);

impl std::fmt::Display for IoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for IoError {}

/// Fixed 17-significant-digit formatting so identical runs are byte-identical.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // JSON has no non-finite numbers
        "null".into()
    }
}

/// Reads a profile from `x,value` CSV (header mandatory, rows in x order).
pub fn read_profile(path: &Path) -> Result<GridFunction, IoError> {
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| IoError(format!("{}: {e}", path.display())))?;
    {
        let headers = rdr
            .headers()
            .map_err(|e| IoError(format!("{}: {e}", path.display())))?;
        if headers.len() < 2 || headers.get(0) != Some("x") || headers.get(1) != Some("value") {
            return Err(IoError(format!(
                "{}: expected header `x,value`, got {:?}",
                path.display(),
                headers
            )));
        }
    }
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| IoError(format!("{}: {e}", path.display())))?;
        let v: f64 = rec
            .get(1)
            .ok_or_else(|| IoError(format!("{}: line {}: missing value", path.display(), i + 2)))?
            .parse()
            .map_err(|e| IoError(format!("{}: line {}: {e}", path.display(), i + 2)))?;
        values.push(v);
    }
    GridFunction::new(values).map_err(|e| IoError(format!("{}: {e}", path.display())))
}

/// Profile CSV text for a grid function.
pub fn profile_csv(g: &GridFunction) -> String {
    let mut out = String::from("x,value\n");
    for j in 0..=g.m() {
        let _ = writeln!(out, "{},{}", fmt_f64(g.x(j)), fmt_f64(g.values()[j]));
    }
    out
}

/// Model JSON: either `{"sites": N, "probs": [...2^N entries...]}` with the
/// configuration at index `mask` (site i occupied ⇔ bit i−1 set), or
/// `{"independent": [g_1, ..., g_N]}`.
pub fn read_model(path: &Path) -> Result<BernoulliModel, IoError> {
    let text = fs::read_to_string(path)
        .map_err(|e| IoError(format!("{}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| IoError(format!("{}: {e}", path.display())))?;
    let obj = v
        .as_object()
        .ok_or_else(|| IoError(format!("{}: model must be a JSON object", path.display())))?;
    if let Some(g) = obj.get("independent") {
        let g: Vec<f64> = g
            .as_array()
            .ok_or_else(|| IoError("field `independent` must be an array".into()))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| IoError("non-numeric probability".into())))
            .collect::<Result<_, _>>()?;
        return BernoulliModel::independent(&g).map_err(|e| IoError(e.to_string()));
    }
    let sites = obj
        .get("sites")
        .and_then(|x| x.as_u64())
        .ok_or_else(|| IoError("field `sites` missing or not a positive integer".into()))?
        as usize;
    let probs: Vec<f64> = obj
        .get("probs")
        .and_then(|x| x.as_array())
        .ok_or_else(|| IoError("field `probs` missing or not an array".into()))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| IoError("non-numeric probability".into())))
        .collect::<Result<_, _>>()?;
    if probs.len() != 1 << sites {
        return Err(IoError(format!(
            "`probs` must have 2^{sites} = {} entries, got {}",
            1usize << sites,
            probs.len()
        )));
    }
    BernoulliModel::new(sites, probs).map_err(|e| IoError(e.to_string()))
}

/// Writes atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), IoError> {
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, content).map_err(|e| IoError(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| IoError(format!("{}: {e}", path.display())))
}

/// Writes to the path if given, else prints to stdout.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), IoError> {
    match path {
        Some(p) => write_atomic(p, content),
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}
