//! The JSON/CSV payload every command emits.

use std::collections::BTreeMap;
use std::time::Duration;

use dpdelta::azflag::FlagRecord;
use dpdelta::exactnum::QuadExt;
use serde::Serialize;
use serde_json::Value;

pub const SHADOW_DIGITS: usize = 15;
pub const SHADOW_AUTHORITY: &str = "non-authoritative";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    InvariantFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecimalShadows {
    pub authority: &'static str,
    pub significant_digits: usize,
    /// JSON pointer into `results` mapped to a rounded decimal.
    pub values: BTreeMap<String, String>,
}

/// A CSV-shaped view of the results, for commands that produce rows.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub status: Status,
    /// Exact values, as strings that parse back with the exact-number parsers.
    pub results: Value,
    pub decimal_shadows: DecimalShadows,
    pub flags: Vec<FlagRecord>,
    /// Hard invariants that failed.
    pub failures: Vec<String>,
    /// Wall-clock time; reported on stderr only so payloads stay reproducible.
    #[serde(skip)]
    pub timing: Duration,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl ReportEnvelope {
    pub fn new(command: &str, parameters: BTreeMap<String, String>, results: Value) -> Self {
        let values = shadows_of(&results);
        ReportEnvelope {
            command: command.to_string(),
            parameters,
            status: Status::Ok,
            results,
            decimal_shadows: DecimalShadows {
                authority: SHADOW_AUTHORITY,
                significant_digits: SHADOW_DIGITS,
                values,
            },
            flags: Vec::new(),
            failures: Vec::new(),
            timing: Duration::ZERO,
            table: None,
        }
    }

    pub fn with_flags(mut self, flags: Vec<FlagRecord>) -> Self {
        self.flags = flags;
        self
    }

    pub fn with_failures(mut self, failures: Vec<String>) -> Self {
        self.status = if failures.is_empty() {
            Status::Ok
        } else {
            Status::InvariantFailure
        };
        self.failures = failures;
        self
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Ok
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }

    /// The row table if there is one, else `key,value` lines of the results.
    pub fn to_csv(&self) -> String {
        let table = self.table.clone().unwrap_or_else(|| {
            let mut rows = Vec::new();
            flatten(&self.results, String::new(), &mut rows);
            Table {
                header: vec!["key".into(), "value".into()],
                rows: rows.into_iter().map(|(k, v)| vec![k, v]).collect(),
            }
        });
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&table.header).expect("in-memory write");
        for row in &table.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// `key = value` lines for a terminal.
    pub fn to_text(&self) -> String {
        let mut rows = Vec::new();
        flatten(&self.results, String::new(), &mut rows);
        let mut out = format!("{} ({})\n", self.command, status_word(self.status));
        for (k, v) in rows {
            out.push_str(&format!("  {k} = {v}\n"));
        }
        for f in &self.flags {
            out.push_str(&format!("  [{}] {}: {}\n", f.flag, f.subject, f.detail));
        }
        for f in &self.failures {
            out.push_str(&format!("  FAILED: {f}\n"));
        }
        out
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::InvariantFailure => "invariant failure",
    }
}

fn flatten(v: &Value, prefix: String, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(x, p, out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(x, format!("{prefix}[{i}]"), out);
            }
        }
        Value::String(s) => out.push((prefix, s.clone())),
        other => out.push((prefix, other.to_string())),
    }
}

/// Rounds to [`SHADOW_DIGITS`] significant digits.
pub fn shadow(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (SHADOW_DIGITS as i32 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Shadows every non-integer exact scalar inside `results`.
fn shadows_of(results: &Value) -> BTreeMap<String, String> {
    fn walk(v: &Value, path: String, out: &mut BTreeMap<String, String>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    walk(x, format!("{path}/{}", k.replace('~', "~0").replace('/', "~1")), out);
                }
            }
            Value::Array(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    walk(x, format!("{path}/{i}"), out);
                }
            }
            Value::String(s) if s.contains('/') || s.contains("sqrt") => {
                if let Ok(q) = s.parse::<QuadExt>() {
                    out.insert(path, shadow(q.to_f64()));
                }
            }
            _ => {}
        }
    }
    let mut out = BTreeMap::new();
    walk(results, String::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn shadow_digits() {
        assert_eq!(shadow(40.0 / 19.0), "2.10526315789474");
        assert_eq!(shadow(0.95), "0.950000000000000");
        assert_eq!(shadow(123.0), "123.000000000000");
    }

    #[test]
    fn shadows_only_fractional_scalars() {
        let e = ReportEnvelope::new("t", BTreeMap::new(), json!({"s": "19/20", "name": "E1", "n": "-2", "l": ["66/71+48/71*sqrt(3)"]}));
        let keys: Vec<_> = e.decimal_shadows.values.keys().cloned().collect();
        assert_eq!(keys, vec!["/l/0", "/s"]);
        assert_eq!(e.decimal_shadows.authority, "non-authoritative");
    }

    #[test]
    fn timing_stays_out_of_json() {
        let mut e = ReportEnvelope::new("t", BTreeMap::new(), json!({}));
        e.timing = Duration::from_secs(3);
        assert!(!e.to_json().contains("timing"));
    }
}
