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

//! Undirected simple graphs, dataset loaders and the dense adjacency used by
//! the factorization.
//!
//! Node ids are contiguous and 0-based everywhere inside the crate. Loaders
//! accept 1-based files and shift at the boundary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::cover::CommunityCover;
use crate::error::{Error, Result};

/// Undirected graph without self-loops or parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Sorted, each pair stored once with `u < v`.
    edges: Vec<(usize, usize)>,
    /// Sorted neighbor lists.
    neighbors: Vec<Vec<usize>>,
    names: Option<Vec<String>>,
}

/// What a loader did with the raw input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub n: usize,
    pub m: usize,
    pub dropped_duplicates: usize,
    pub dropped_self_loops: usize,
}

impl Graph {
    /// Builds a graph from raw pairs, silently dropping self-loops and
    /// repeated edges; the returned report counts what was dropped.
    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<(Graph, LoadReport)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        let mut dropped_duplicates = 0;
        let mut dropped_self_loops = 0;
        for (u, v) in pairs {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                dropped_self_loops += 1;
                continue;
            }
            if !set.insert((u.min(v), u.max(v))) {
                dropped_duplicates += 1;
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in &edges {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let report = LoadReport {
            n,
            m: edges.len(),
            dropped_duplicates,
            dropped_self_loops,
        };
        Ok((
            Graph {
                n,
                edges,
                neighbors,
                names: None,
            },
            report,
        ))
    }

    /// Convenience constructor for tests and generators: panics on
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_pairs(n, edges.iter().copied())
            .expect("edge endpoint out of range")
            .0
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Graph> {
        if names.len() != self.n {
            return Err(Error::Inconsistent(format!(
                "{} names for {} nodes",
                names.len(),
                self.n
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.neighbors[node].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.neighbors[u].binary_search(&v).is_ok()
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Writes one `u v` line per edge.
    pub fn to_edge_list(&self, one_based: bool) -> String {
        let shift = usize::from(one_based);
        let mut out = String::with_capacity(self.edges.len() * 8);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{}\t{}", u + shift, v + shift);
        }
        out
    }
}

fn parse_id(token: &str, line: usize, one_based: bool) -> Result<usize> {
    let raw: usize = token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a non-negative integer node id, got {token:?}"),
    })?;
    if one_based {
        raw.checked_sub(1).ok_or(Error::Parse {
            line,
            msg: "node id 0 in a 1-based file".to_string(),
        })
    } else {
        Ok(raw)
    }
}

fn parse_pairs(text: &str, one_based: bool) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: idx + 1,
                msg: "expected two node ids".to_string(),
            });
        };
        // trailing columns (weights, timestamps) are ignored
        pairs.push((
            parse_id(a, idx + 1, one_based)?,
            parse_id(b, idx + 1, one_based)?,
        ));
    }
    Ok(pairs)
}

/// Parses a whitespace-separated edge list with `#` comments.
///
/// The node count is one past the largest id seen.
pub fn load_edge_list(text: &str, one_based: bool) -> Result<(Graph, LoadReport)> {
    let pairs = parse_pairs(text, one_based)?;
    let n = pairs
        .iter()
        .map(|&(u, v)| u.max(v) + 1)
        .max()
        .ok_or(Error::EmptyInput)?;
    Graph::from_pairs(n, pairs)
}

fn parse_memberships(text: &str, one_based: bool) -> Result<BTreeMap<usize, Vec<usize>>> {
    let mut memberships: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let node = parse_id(tokens.next().unwrap_or_default(), idx + 1, one_based)?;
        let labels = tokens
            .map(|t| {
                t.parse::<usize>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("expected a non-negative integer community id, got {t:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if memberships.insert(node, labels).is_some() {
            return Err(Error::Inconsistent(format!(
                "node {} listed twice in the community file",
                node + usize::from(one_based)
            )));
        }
    }
    if memberships.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(memberships)
}

fn cover_from_memberships(
    n: usize,
    memberships: &BTreeMap<usize, Vec<usize>>,
) -> Result<CommunityCover> {
    let raw_ids: BTreeSet<usize> = memberships.values().flatten().copied().collect();
    let remap: BTreeMap<usize, usize> = raw_ids
        .into_iter()
        .enumerate()
        .map(|(new, raw)| (raw, new))
        .collect();
    let mut communities = vec![Vec::new(); remap.len()];
    for (&node, labels) in memberships {
        let distinct: BTreeSet<usize> = labels.iter().map(|l| remap[l]).collect();
        for c in distinct {
            communities[c].push(node);
        }
    }
    CommunityCover::new(n, communities)
}

/// Parses a community file with lines `node c1 c2 ...`. Every node from 0
/// up to the largest id must be listed; raw community ids are renumbered to
/// contiguous 0-based ids in ascending order.
pub fn parse_community_file(text: &str, one_based: bool) -> Result<CommunityCover> {
    let memberships = parse_memberships(text, one_based)?;
    let n = memberships.keys().next_back().map_or(0, |&v| v + 1);
    if memberships.len() != n {
        let missing = (0..n).find(|v| !memberships.contains_key(v)).unwrap_or(0);
        return Err(Error::Inconsistent(format!(
            "community file skips node {}",
            missing + usize::from(one_based)
        )));
    }
    cover_from_memberships(n, &memberships)
}

/// Writes a community file, one `node\tc1 c2 ...` line per node. Outliers
/// get a line with no community.
pub fn write_community_file(cover: &CommunityCover, one_based: bool) -> String {
    let shift = usize::from(one_based);
    let mut out = String::new();
    for (v, labels) in cover.memberships().iter().enumerate() {
        let ids: Vec<String> = labels.iter().map(|c| (c + shift).to_string()).collect();
        let _ = writeln!(out, "{}\t{}", v + shift, ids.join(" "));
    }
    out
}

/// Parses a benchmark file pair: a 1-based network file (each edge possibly
/// listed in both directions) and a 1-based community file with lines
/// `node c1 c2 ...`.
///
/// Community ids are renumbered to contiguous 0-based ids in ascending order
/// of the raw ids. A node listed with no community becomes an outlier.
pub fn load_lfr_files(
    network_text: &str,
    community_text: &str,
) -> Result<(Graph, CommunityCover, LoadReport)> {
    let pairs = parse_pairs(network_text, true)?;
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n_network = pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);

    let memberships = parse_memberships(community_text, true)?;
    if let Some(&v) = memberships.keys().find(|&&v| v >= n_network) {
        return Err(Error::Inconsistent(format!(
            "node {} of the community file is absent from the network file",
            v + 1
        )));
    }
    if memberships.len() != n_network {
        let missing = (0..n_network)
            .find(|v| !memberships.contains_key(v))
            .unwrap_or(0);
        return Err(Error::Inconsistent(format!(
            "network has {} nodes but the community file lists {} (node {} is missing)",
            n_network,
            memberships.len(),
            missing + 1
        )));
    }

    let (graph, report) = Graph::from_pairs(n_network, pairs)?;
    let cover = cover_from_memberships(n_network, &memberships)?;
    Ok((graph, cover, report))
}

/// Dense symmetric 0/1 adjacency with every diagonal entry set to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix(Array2<f64>);

impl AdjacencyMatrix {
    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    /// Wraps an arbitrary square matrix. Used by tests that need inputs the
    /// graph constructor cannot produce.
    pub fn from_array(values: Array2<f64>) -> Result<AdjacencyMatrix> {
        if values.nrows() != values.ncols() {
            return Err(Error::Dimension(format!(
                "adjacency must be square, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        Ok(AdjacencyMatrix(values))
    }
}

pub fn adjacency_unit_diag(g: &Graph) -> AdjacencyMatrix {
    let n = g.node_count();
    let mut a = Array2::<f64>::eye(n);
    for &(u, v) in g.edges() {
        a[[u, v]] = 1.0;
        a[[v, u]] = 1.0;
    }
    AdjacencyMatrix(a)
}

/// Number of graph edges with both endpoints in `nodes`. Repeated ids in
/// `nodes` are counted once.
pub fn induced_edge_count(g: &Graph, nodes: &[usize]) -> Result<usize> {
    let n = g.node_count();
    let mut inside = vec![false; n];
    for &v in nodes {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
        inside[v] = true;
    }
    let mut count = 0;
    for u in (0..n).filter(|&u| inside[u]) {
        count += g
            .neighbors(u)
            .iter()
            .filter(|&&v| v > u && inside[v])
            .count();
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn edge_list_zero_based() {
        let (g, report) = load_edge_list("0 1\n1 2", false).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(report.dropped_duplicates, 0);
    }

    #[test]
    fn edge_list_one_based_matches() {
        let (a, _) = load_edge_list("0 1\n1 2", false).unwrap();
        let (b, _) = load_edge_list("1 2\n2 3", true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn edge_list_drops_duplicates_and_loops() {
        let text = "# comment\n0 1\n1 0\n\n2 2\n0 1 0.5\n";
        let (g, report) = load_edge_list(text, false).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.node_count(), 3);
        assert_eq!(report.dropped_duplicates, 2);
        assert_eq!(report.dropped_self_loops, 1);
    }

    #[test]
    fn edge_list_errors() {
        assert_eq!(load_edge_list("", false), Err(Error::EmptyInput));
        assert_eq!(load_edge_list("# only\n", false), Err(Error::EmptyInput));
        match load_edge_list("0 1\n1 x\n", false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_edge_list("0 1\n", true),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_edge_list("3\n", false),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn lfr_minimal_pair() {
        let (g, cover, _) = load_lfr_files("1\t2\n2\t1\n", "1\t1\n2\t1\n").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(cover.communities(), &[vec![0, 1]]);
        assert!(cover.outliers().is_empty());
    }

    #[test]
    fn lfr_overlapping_line() {
        let net = "1 2\n2 3\n3 4\n4 5\n5 1\n";
        let com = "1\t1\n2\t1\n3\t2\n4\t2\n5\t1 2\n";
        let (_, cover, _) = load_lfr_files(net, com).unwrap();
        assert_eq!(cover.communities(), &[vec![0, 1, 4], vec![2, 3, 4]]);
        assert_eq!(cover.label_counts()[4], 2);
    }

    #[test]
    fn lfr_errors() {
        // node 3 does not exist in the network
        assert!(matches!(
            load_lfr_files("1 2\n", "1 1\n2 1\n3 1\n"),
            Err(Error::Inconsistent(_))
        ));
        // node 3 of the network has no community line
        assert!(matches!(
            load_lfr_files("1 2\n2 3\n", "1 1\n2 1\n"),
            Err(Error::Inconsistent(_))
        ));
        assert!(matches!(
            load_lfr_files("", "1 1\n"),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn adjacency_examples() {
        let a = adjacency_unit_diag(&Graph::from_edges(2, &[(0, 1)]));
        assert_eq!(a.as_array(), &array![[1.0, 1.0], [1.0, 1.0]]);
        let a = adjacency_unit_diag(&Graph::from_edges(2, &[]));
        assert_eq!(a.as_array(), &array![[1.0, 0.0], [0.0, 1.0]]);
        let a = adjacency_unit_diag(&Graph::from_edges(3, &[(0, 1)]));
        assert_eq!(
            a.as_array(),
            &array![[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        );
    }

    #[test]
    fn induced_counts() {
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(induced_edge_count(&tri, &[0, 1, 2]).unwrap(), 3);
        assert_eq!(induced_edge_count(&tri, &[0, 2]).unwrap(), 1);
        assert_eq!(induced_edge_count(&tri, &[]).unwrap(), 0);
        assert_eq!(
            induced_edge_count(&tri, &[5]),
            Err(Error::NodeOutOfRange { node: 5, n: 3 })
        );
    }

    #[test]
    fn writer_round_trip() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3), (1, 3)]);
        let (back, _) = load_edge_list(&g.to_edge_list(true), true).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn community_file_round_trip() {
        let cover = CommunityCover::new(5, vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        for one_based in [false, true] {
            let text = write_community_file(&cover, one_based);
            assert_eq!(parse_community_file(&text, one_based).unwrap(), cover);
        }
        assert_eq!(
            write_community_file(&cover, true),
            "1\t1\n2\t1\n3\t1 2\n4\t2\n5\t\n"
        );
        assert!(matches!(
            parse_community_file("0 1\n2 1\n", false),
            Err(Error::Inconsistent(_))
        ));
        assert!(matches!(
            parse_community_file("0 1\n0 2\n", false),
            Err(Error::Inconsistent(_))
        ));
    }
}
