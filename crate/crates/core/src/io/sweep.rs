use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::output::fmt;
use super::run::{run, RunResult};
use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// One scenario key and the values it takes, written `model.eta=0.1:0.5:5`
/// (start:end:count, inclusive) or `model.eta=0.1,0.2,0.4`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<f64>,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Schema {
            key: Some("axis".into()),
            message: format!("{m}: {s:?}"),
        };
        let (key, spec) = s
            .split_once('=')
            .ok_or_else(|| bad("expected KEY=VALUES"))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(bad("empty key"));
        }
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let values = if spec.contains(':') {
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("range must be start:end:count"));
            }
            let (a, b) = (num(parts[0])?, num(parts[1])?);
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| bad("count must be an integer"))?;
            if count == 0 {
                return Err(bad("count must be positive"));
            }
            crate::dynamics::linspace(b - a, count)
                .into_iter()
                .map(|x| a + x)
                .collect()
        } else {
            spec.split(',').map(num).collect::<Result<Vec<f64>>>()?
        };
        if values.is_empty() {
            return Err(bad("no values"));
        }
        Ok(SweepAxis {
            key: key.to_string(),
            values,
        })
    }
}

impl SweepAxis {
    /// `template` with `key` set to `value` and the name suffixed by `index`.
    pub fn apply(&self, template: &Scenario, index: usize, value: f64) -> Result<Scenario> {
        let schema = |m: String| Error::Schema {
            key: Some(self.key.clone()),
            message: m,
        };
        let mut doc = toml::Value::try_from(template).map_err(|e| schema(e.to_string()))?;
        let mut slot = &mut doc;
        let parts: Vec<&str> = self.key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let table = slot
                .as_table_mut()
                .ok_or_else(|| schema("not a table".into()))?;
            if i + 1 == parts.len() {
                let new = match table.get(*part) {
                    Some(toml::Value::Integer(_)) => {
                        if value.fract() != 0.0 || value < 0.0 {
                            return Err(schema(format!("{value} is not a valid integer")));
                        }
                        toml::Value::Integer(value as i64)
                    }
                    _ => toml::Value::Float(value),
                };
                table.insert(part.to_string(), new);
                break;
            }
            slot = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(Default::default()));
        }
        let mut s: Scenario = doc
            .try_into()
            .map_err(|e: toml::de::Error| schema(e.message().to_string()))?;
        s.name = format!("{}-{index:03}", template.name);
        s.validate()?;
        Ok(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepEntry {
    pub index: usize,
    pub value: f64,
    pub result: Option<RunResult>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub entries: Vec<SweepEntry>,
    pub index_path: PathBuf,
    pub failures_path: PathBuf,
}

impl SweepOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &SweepEntry> {
        self.entries.iter().filter(|e| e.error.is_some())
    }
}

/// Runs every grid point, concurrently under `exec`. Failed points are
/// recorded, not fatal. Writes `sweep_index.csv` and `failures.json` under
/// `<out_dir>/<template name>-sweep/`.
pub fn sweep(
    template: &Scenario,
    axis: &SweepAxis,
    out_dir: &Path,
    exec: Execution,
) -> Result<SweepOutcome> {
    let dir = out_dir.join(format!("{}-sweep", template.name));
    std::fs::create_dir_all(&dir)?;
    let entries: Vec<SweepEntry> = exec.map_range(axis.values.len(), |i| {
        let value = axis.values[i];
        let outcome = axis
            .apply(template, i, value)
            .and_then(|s| run(&s, &dir, Execution::Sequential));
        match outcome {
            Ok(r) => SweepEntry {
                index: i,
                value,
                result: Some(r),
                error: None,
            },
            Err(e) => SweepEntry {
                index: i,
                value,
                result: None,
                error: Some(e.to_string()),
            },
        }
    });

    let index_path = dir.join("sweep_index.csv");
    let mut w = csv::Writer::from_path(&index_path).map_err(|e| Error::Io(e.into()))?;
    let rel = |p: &Path| p.strip_prefix(&dir).unwrap_or(p).display().to_string();
    w.write_record([
        axis.key.as_str(),
        "index",
        "status",
        "trajectory",
        "metadata",
    ])
    .map_err(|e| Error::Io(e.into()))?;
    for e in &entries {
        let (status, csv, meta) = match &e.result {
            Some(r) if r.converged() => ("ok", rel(&r.csv_path), rel(&r.metadata_path)),
            Some(r) => ("not-converged", rel(&r.csv_path), rel(&r.metadata_path)),
            None => ("failed", String::new(), String::new()),
        };
        w.write_record([fmt(e.value), e.index.to_string(), status.into(), csv, meta])
            .map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;

    let failures: Vec<_> = entries
        .iter()
        .filter_map(|e| {
            e.error
                .as_ref()
                .map(|m| serde_json::json!({"index": e.index, "value": e.value, "error": m}))
        })
        .collect();
    let failures_path = dir.join("failures.json");
    std::fs::write(
        &failures_path,
        serde_json::to_string_pretty(&failures)? + "\n",
    )?;
    Ok(SweepOutcome {
        entries,
        index_path,
        failures_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_axes() {
        let a: SweepAxis = "model.eta=0.1:0.5:5".parse().unwrap();
        assert_eq!(a.key, "model.eta");
        assert_eq!(a.values.len(), 5);
        assert!((a.values[4] - 0.5).abs() < 1e-15);
        let b: SweepAxis = "initial.n=0,3,5".parse().unwrap();
        assert_eq!(b.values, vec![0.0, 3.0, 5.0]);
        assert!("model.eta".parse::<SweepAxis>().is_err());
        assert!("model.eta=1:2".parse::<SweepAxis>().is_err());
        assert!("model.eta=a,b".parse::<SweepAxis>().is_err());
    }
}
