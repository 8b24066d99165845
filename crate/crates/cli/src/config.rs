//! Flat TOML run configuration. Every key can be overridden by the flag of
//! the same name (`lambda_f` ↔ `--lambda-f`).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::failure::Failure;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub retrieved: Option<PathBuf>,
    pub format: Option<String>,
    pub p: Option<usize>,
    pub n: Option<usize>,

    pub beta: Option<f64>,
    pub sigma: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_f: Option<f64>,
    pub mu: Option<f64>,

    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub step_size: Option<f64>,
    pub line_search: Option<bool>,
    pub backtrack_factor: Option<f64>,
    pub armijo_c: Option<f64>,
    pub threshold: Option<f64>,
    pub scene_threshold: Option<f64>,
    pub record_traces: Option<bool>,

    pub seed: Option<u64>,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub channels: Option<usize>,
    pub drift: Option<f64>,
    pub cuts: Option<Vec<usize>>,

    pub variant: Option<String>,
    pub lambdas: Option<Vec<f64>>,
    pub lambda_f_range: Option<String>,

    pub times: Option<Vec<f64>>,
    pub grid: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
    }
}

/// Flag value if given, else file value, else the default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// `start:stop:count`, evenly spaced with both ends included.
pub fn parse_range(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::config(format!("expected start:stop:count, got {text:?}"));
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let count: usize = count.parse().map_err(|_| bad())?;
    if !start.is_finite() || !stop.is_finite() || stop < start || count == 0 {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                start + i as f64 * (stop - start) / (count - 1) as f64
            }
        })
        .collect())
}

/// `"2"`, `"3"`, `"squared"` or `"cubed"`.
pub fn parse_variant(text: &str) -> Result<seqhop::analysis::ConditionVariant, Failure> {
    use seqhop::analysis::ConditionVariant;
    match text.trim().to_ascii_lowercase().as_str() {
        "2" | "squared" => Ok(ConditionVariant::Squared),
        "3" | "cubed" => Ok(ConditionVariant::Cubed),
        other => Err(Failure::config(format!(
            "variant must be 2 or 3, got {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:10:11").unwrap()[1], 1.0);
        assert_eq!(parse_range("2:2:1").unwrap(), vec![2.0]);
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_range("1:0:3").is_err());
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:1:0").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("beta = 1.0\nlambda_f = 500.0").is_ok());
        assert!(toml::from_str::<FileConfig>("betta = 1.0").is_err());
        assert!(toml::from_str::<FileConfig>("cuts = [5, 9]\ntimes = [0.0, 1.5]").is_ok());
    }

    #[test]
    fn precedence() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick(None::<i32>, None, 3), 3);
    }
}
