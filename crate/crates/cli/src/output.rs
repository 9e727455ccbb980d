// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use ndarray::Array2;
use overlapnet::numfmt::{fmt_sig, round_sig};
use overlapnet::SoftMembership;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn read_input(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn digest(path: &Path, text: &str) -> InputDigest {
    InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(text.as_bytes())),
    }
}

/// Rounds every float inside a JSON value to the output precision.
pub fn round_floats(value: Value) -> Value {
    match value {
        Value::Number(num) if num.is_f64() => {
            let x = round_sig(num.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let value = round_floats(serde_json::to_value(value)?);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    flags: &'a Value,
    seed: Option<u64>,
    inputs: &'a [InputDigest],
    outputs: &'a [String],
}

/// Collects the files of one run and finishes with a manifest beside them.
pub struct OutputDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> anyhow::Result<OutputDir> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn finish(
        self,
        command: &str,
        flags: Value,
        seed: Option<u64>,
        inputs: &[InputDigest],
    ) -> anyhow::Result<()> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            flags: &round_floats(flags),
            seed,
            inputs,
            outputs: &self.written,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}

/// `node,u0,u1,...` rows, columns in the given order.
pub fn soft_csv(u: &SoftMembership, order: &[usize]) -> String {
    let mut out = String::from("node");
    for k in 0..order.len() {
        let _ = write!(out, ",u{k}");
    }
    out.push('\n');
    for (v, row) in u.values().rows().into_iter().enumerate() {
        let _ = write!(out, "{v}");
        for &t in order {
            let _ = write!(out, ",{}", fmt_sig(row[t]));
        }
        out.push('\n');
    }
    out
}

pub fn parse_soft_csv(text: &str) -> anyhow::Result<SoftMembership> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("empty soft membership file")?;
    let c = header.split(',').count().saturating_sub(1);
    if c == 0 {
        bail!("soft membership header has no columns");
    }
    let mut values = Vec::new();
    let mut n = 0;
    for (idx, line) in lines.enumerate() {
        let mut fields = line.split(',');
        let node: usize = fields
            .next()
            .unwrap_or_default()
            .trim()
            .parse()
            .with_context(|| format!("row {}: bad node id", idx + 1))?;
        if node != idx {
            bail!("row {}: expected node {idx}, found {node}", idx + 1);
        }
        let row = fields
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("row {}: bad value", idx + 1))?;
        if row.len() != c {
            bail!("row {}: expected {c} values, found {}", idx + 1, row.len());
        }
        values.extend(row);
        n += 1;
    }
    let values = Array2::from_shape_vec((n, c), values)?;
    // printed values carry rounding error, so rows are renormalized
    Ok(SoftMembership::normalized(values)?)
}
