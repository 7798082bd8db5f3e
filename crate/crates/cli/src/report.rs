//! Report assembly, inputs digest and the two output formats.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::Format;

pub const TOOL_VERSION: &str = concat!("diagflow ", env!("CARGO_PKG_VERSION"));

/// Everything that determines a report besides the command name. The config
/// text is stored verbatim so a report can be re-run from itself.
#[derive(Clone, Debug, Serialize)]
pub struct Inputs {
    pub config: String,
    pub seed: u64,
    pub precision_margin: Option<u32>,
}

impl Inputs {
    /// sha256 over command, seed, margin and config bytes, NUL-separated.
    pub fn digest(&self, command: &str) -> String {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update([0]);
        h.update(self.seed.to_string().as_bytes());
        h.update([0]);
        h.update(self.precision_margin.map_or(String::new(), |m| m.to_string()).as_bytes());
        h.update([0]);
        h.update(self.config.as_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(check: impl Into<String>, passed: bool, detail: impl Into<String>) -> Verdict {
        Verdict { check: check.into(), passed, detail: detail.into() }
    }
}

/// Wall time is not part of the report; it goes to stderr so that reports
/// stay byte-identical across runs.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub tool_version: &'static str,
    pub inputs_digest: String,
    pub inputs: Inputs,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new(command: &str, inputs: Inputs, results: Value, verdicts: Vec<Verdict>) -> Report {
        Report {
            command: command.to_string(),
            tool_version: TOOL_VERSION,
            inputs_digest: inputs.digest(command),
            inputs,
            results,
            verdicts,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => self.to_csv(),
        }
    }

    /// Columns `section,path,value`. Meta rows first, then every result
    /// leaf in key order with a `/`-separated path, then one row per
    /// verdict with value `pass` or `fail: <detail>`.
    fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["section", "path", "value"])?;
        w.write_record(["meta", "command", &self.command])?;
        w.write_record(["meta", "tool_version", self.tool_version])?;
        w.write_record(["meta", "inputs_digest", &self.inputs_digest])?;
        w.write_record(["meta", "seed", &self.inputs.seed.to_string()])?;
        let mut leaves = Vec::new();
        flatten(&self.results, String::new(), &mut leaves);
        for (path, value) in leaves {
            w.write_record(["result", &path, &value])?;
        }
        for v in &self.verdicts {
            let value = if v.passed { "pass".to_string() } else { format!("fail: {}", v.detail) };
            w.write_record(["verdict", &v.check, &value])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

fn flatten(v: &Value, path: String, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}/{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(x, join(k), out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(x, join(&i.to_string()), out)),
        Value::String(s) => out.push((path, s.clone())),
        Value::Null => out.push((path, String::new())),
        other => out.push((path, other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn inputs() -> Inputs {
        Inputs { config: "dimension = 2\n".into(), seed: 0, precision_margin: None }
    }

    #[test]
    fn digest_depends_on_every_input() {
        let a = inputs();
        let mut b = inputs();
        b.seed = 1;
        let mut c = inputs();
        c.precision_margin = Some(0);
        let ds = [a.digest("tau"), a.digest("hn"), b.digest("tau"), c.digest("tau")];
        for i in 0..ds.len() {
            assert_eq!(ds[i].len(), 64);
            for j in 0..i {
                assert_ne!(ds[i], ds[j]);
            }
        }
        assert_eq!(a.digest("tau"), inputs().digest("tau"));
    }

    #[test]
    fn csv_layout() {
        let r = Report::new(
            "tau",
            inputs(),
            json!({"values": [{"v": "1/2", "ok": true}], "note": null}),
            vec![Verdict::new("agree", false, "a, b")],
        );
        let csv = r.render(Format::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "section,path,value");
        assert!(lines.contains(&"result,values/0/ok,true"));
        assert!(lines.contains(&"result,values/0/v,1/2"));
        assert!(lines.contains(&"result,note,"));
        assert_eq!(*lines.last().unwrap(), "verdict,agree,\"fail: a, b\"");
    }
}
