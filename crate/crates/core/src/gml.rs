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

//! Reader for the subset of GML used by published network datasets: a
//! `graph [...]` block with `node [ id ... ]` and `edge [ source target ]`
//! entries. Nested blocks such as `graphics` are skipped.

use std::collections::{BTreeMap, HashMap};

use crate::cover::HardLabeling;
use crate::error::{Error, Result};
use crate::graph::{Graph, LoadReport};

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Scalar(String),
    List(Vec<(String, Value)>),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Word(String),
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let mut tokens = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut chars = raw.chars().peekable();
        while let Some(&ch) = chars.peek() {
            match ch {
                c if c.is_whitespace() => {
                    chars.next();
                }
                '#' => break,
                '[' | ']' => {
                    chars.next();
                    tokens.push((if ch == '[' { Token::Open } else { Token::Close }, line));
                }
                '"' => {
                    chars.next();
                    let mut s = String::new();
                    loop {
                        match chars.next() {
                            Some('"') => break,
                            Some(c) => s.push(c),
                            None => {
                                return Err(Error::Parse {
                                    line,
                                    msg: "unterminated string".into(),
                                })
                            }
                        }
                    }
                    tokens.push((Token::Word(s), line));
                }
                _ => {
                    let mut s = String::new();
                    while let Some(&c) = chars.peek() {
                        if c.is_whitespace() || c == '[' || c == ']' {
                            break;
                        }
                        s.push(c);
                        chars.next();
                    }
                    tokens.push((Token::Word(s), line));
                }
            }
        }
    }
    Ok(tokens)
}

fn parse_list(
    tokens: &[(Token, usize)],
    pos: &mut usize,
    nested: bool,
) -> Result<Vec<(String, Value)>> {
    let mut items = Vec::new();
    while *pos < tokens.len() {
        let (token, line) = &tokens[*pos];
        *pos += 1;
        let key = match token {
            Token::Close if nested => return Ok(items),
            Token::Word(w) => w.clone(),
            _ => {
                return Err(Error::Parse {
                    line: *line,
                    msg: "expected a key".into(),
                })
            }
        };
        let Some((value, line)) = tokens.get(*pos) else {
            return Err(Error::Parse {
                line: *line,
                msg: format!("key {key:?} has no value"),
            });
        };
        *pos += 1;
        let value = match value {
            Token::Word(w) => Value::Scalar(w.clone()),
            Token::Open => Value::List(parse_list(tokens, pos, true)?),
            Token::Close => {
                return Err(Error::Parse {
                    line: *line,
                    msg: format!("key {key:?} has no value"),
                })
            }
        };
        items.push((key, value));
    }
    if nested {
        return Err(Error::Parse {
            line: tokens.last().map_or(0, |t| t.1),
            msg: "unbalanced brackets".into(),
        });
    }
    Ok(items)
}

fn scalar<'a>(list: &'a [(String, Value)], key: &str) -> Option<&'a str> {
    list.iter().find_map(|(k, v)| match v {
        Value::Scalar(s) if k == key => Some(s.as_str()),
        _ => None,
    })
}

/// A network read from GML, nodes numbered in order of appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct GmlNetwork {
    pub graph: Graph,
    pub report: LoadReport,
    /// The `id` of every node as written in the file.
    pub ids: Vec<i64>,
    /// Scalar node attributes other than `id`.
    pub attributes: Vec<BTreeMap<String, String>>,
}

impl GmlNetwork {
    /// Groups nodes by the value of a node attribute, e.g. `value` for a
    /// dataset that stores ground-truth groups there.
    pub fn partition_by(&self, key: &str) -> Result<HardLabeling> {
        let raw = self
            .attributes
            .iter()
            .enumerate()
            .map(|(v, attrs)| {
                attrs.get(key).cloned().ok_or_else(|| {
                    Error::Inconsistent(format!("node {} has no attribute {key:?}", self.ids[v]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HardLabeling::from_raw(&raw))
    }
}

pub fn load_gml(text: &str) -> Result<GmlNetwork> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let top = parse_list(&tokens, &mut pos, false)?;
    let body = top
        .iter()
        .find_map(|(k, v)| match v {
            Value::List(items) if k == "graph" => Some(items),
            _ => None,
        })
        .ok_or(Error::EmptyInput)?;

    let mut ids = Vec::new();
    let mut attributes: Vec<BTreeMap<String, String>> = Vec::new();
    let mut index: HashMap<i64, usize> = HashMap::new();
    let mut raw_edges = Vec::new();
    for (key, value) in body {
        let Value::List(items) = value else { continue };
        match key.as_str() {
            "node" => {
                let id: i64 = scalar(items, "id")
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Inconsistent("node without integer id".into()))?;
                if index.insert(id, ids.len()).is_some() {
                    return Err(Error::Inconsistent(format!("duplicate node id {id}")));
                }
                ids.push(id);
                attributes.push(
                    items
                        .iter()
                        .filter_map(|(k, v)| match v {
                            Value::Scalar(s) if k != "id" => Some((k.clone(), s.clone())),
                            _ => None,
                        })
                        .collect(),
                );
            }
            "edge" => {
                let end = |name: &str| -> Result<i64> {
                    scalar(items, name)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::Inconsistent(format!("edge without integer {name}")))
                };
                raw_edges.push((end("source")?, end("target")?));
            }
            _ => {}
        }
    }
    if ids.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pairs = raw_edges
        .into_iter()
        .map(|(s, t)| {
            let look = |id: i64| {
                index
                    .get(&id)
                    .copied()
                    .ok_or_else(|| Error::Inconsistent(format!("edge refers to unknown node {id}")))
            };
            Ok((look(s)?, look(t)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut graph, report) = Graph::from_pairs(ids.len(), pairs)?;
    let labels: Option<Vec<String>> = attributes.iter().map(|a| a.get("label").cloned()).collect();
    if let Some(labels) = labels {
        graph = graph.with_names(labels)?;
    }
    Ok(GmlNetwork {
        graph,
        report,
        ids,
        attributes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"Creator "hand written"
graph
[
  directed 0
  node
  [
    id 10
    label "Alpha Team"
    value 3
  ]
  node [ id 11 label "Beta" value 3 graphics [ x 1.0 y 2.0 ] ]
  node [ id 12 label "Gamma" value 0 ]
  edge [ source 10 target 11 ]
  edge [ source 11 target 10 ]
  edge [ source 12 target 11 ]
  edge [ source 12 target 12 ]
]
"#;

    #[test]
    fn reads_nodes_edges_and_attributes() {
        let net = load_gml(SAMPLE).unwrap();
        assert_eq!(net.ids, vec![10, 11, 12]);
        assert_eq!(net.graph.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(net.report.dropped_duplicates, 1);
        assert_eq!(net.report.dropped_self_loops, 1);
        assert_eq!(net.graph.names().unwrap()[0], "Alpha Team");
        assert_eq!(net.partition_by("value").unwrap().labels(), &[0, 0, 1]);
        assert!(net.partition_by("missing").is_err());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(load_gml("graph [ node [ id 1 ]").is_err());
        assert!(load_gml("graph [ node [ id 1 ] edge [ source 1 target 2 ] ]").is_err());
        assert!(load_gml("graph [ node [ label \"x\" ] ]").is_err());
        assert!(load_gml("graph [ node [ id 1 ] node [ id 1 ] ]").is_err());
        assert!(matches!(load_gml("graph [ ]"), Err(Error::EmptyInput)));
        assert!(load_gml("graph [ node [ label \"open ] ]").is_err());
    }
}
