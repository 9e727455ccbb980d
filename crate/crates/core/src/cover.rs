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

//! Community covers (possibly overlapping, possibly with outliers) and hard
//! labelings, plus the plain-text cover file format.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of node communities over `n` nodes. Nodes in no community are
/// outliers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityCover {
    n: usize,
    communities: Vec<Vec<usize>>,
    outliers: Vec<usize>,
}

impl CommunityCover {
    /// Builds a cover; every node not in a community becomes an outlier.
    /// Communities are sorted and deduplicated and must be non-empty.
    pub fn new(n: usize, communities: Vec<Vec<usize>>) -> Result<CommunityCover> {
        let mut covered = vec![false; n];
        let mut cleaned = Vec::with_capacity(communities.len());
        for (idx, mut members) in communities.into_iter().enumerate() {
            members.sort_unstable();
            members.dedup();
            if members.is_empty() {
                return Err(Error::InvalidArgument(format!("community {idx} is empty")));
            }
            for &v in &members {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, n });
                }
                covered[v] = true;
            }
            cleaned.push(members);
        }
        let outliers = (0..n).filter(|&v| !covered[v]).collect();
        Ok(CommunityCover {
            n,
            communities: cleaned,
            outliers,
        })
    }

    pub fn from_labeling(labeling: &HardLabeling) -> CommunityCover {
        let mut communities = vec![Vec::new(); labeling.num_clusters()];
        for (node, &c) in labeling.labels().iter().enumerate() {
            communities[c].push(node);
        }
        CommunityCover {
            n: labeling.len(),
            communities,
            outliers: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn communities(&self) -> &[Vec<usize>] {
        &self.communities
    }

    pub fn outliers(&self) -> &[usize] {
        &self.outliers
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    /// Number of communities each node belongs to.
    pub fn label_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for v in self.communities.iter().flatten() {
            counts[*v] += 1;
        }
        counts
    }

    /// Nodes that belong to more than one community.
    pub fn overlapping(&self) -> Vec<usize> {
        self.label_counts()
            .into_iter()
            .enumerate()
            .filter_map(|(v, l)| (l > 1).then_some(v))
            .collect()
    }

    /// Community indices of each node.
    pub fn memberships(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (c, members) in self.communities.iter().enumerate() {
            for &v in members {
                out[v].push(c);
            }
        }
        out
    }

    /// Returns the equivalent hard labeling when every node has exactly one
    /// community.
    pub fn to_labeling(&self) -> Option<HardLabeling> {
        let mut labels = vec![usize::MAX; self.n];
        for (c, members) in self.communities.iter().enumerate() {
            for &v in members {
                if labels[v] != usize::MAX {
                    return None;
                }
                labels[v] = c;
            }
        }
        if labels.contains(&usize::MAX) {
            return None;
        }
        Some(HardLabeling::from_raw(&labels))
    }

    /// Renders the cover file: one `id: node node ...` line per community
    /// followed by a final `outliers: ...` line.
    pub fn to_cover_file(&self) -> String {
        let mut out = String::new();
        for (c, members) in self.communities.iter().enumerate() {
            let _ = write!(out, "{c}:");
            for v in members {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out.push_str("outliers:");
        for v in &self.outliers {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
        out
    }

    /// Parses the format written by [`CommunityCover::to_cover_file`]. The
    /// node count is inferred from the largest id; every node must appear
    /// either in a community or in the outlier line.
    pub fn parse_cover_file(text: &str) -> Result<CommunityCover> {
        let mut communities = Vec::new();
        let mut outliers: Option<Vec<usize>> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (head, body) = line.split_once(':').ok_or(Error::Parse {
                line: idx + 1,
                msg: "expected `id: nodes` or `outliers: nodes`".to_string(),
            })?;
            let nodes = body
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::Parse {
                        line: idx + 1,
                        msg: format!("bad node id {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match head.trim() {
                "outliers" => {
                    if outliers.replace(nodes).is_some() {
                        return Err(Error::Parse {
                            line: idx + 1,
                            msg: "duplicate outliers line".to_string(),
                        });
                    }
                }
                id => {
                    id.parse::<usize>().map_err(|_| Error::Parse {
                        line: idx + 1,
                        msg: format!("bad community id {id:?}"),
                    })?;
                    communities.push(nodes);
                }
            }
        }
        let outliers = outliers.unwrap_or_default();
        let n = communities
            .iter()
            .flatten()
            .chain(outliers.iter())
            .map(|&v| v + 1)
            .max()
            .ok_or(Error::EmptyInput)?;
        let cover = CommunityCover::new(n, communities)?;
        let declared: BTreeSet<usize> = outliers.into_iter().collect();
        let actual: BTreeSet<usize> = cover.outliers.iter().copied().collect();
        if declared != actual {
            return Err(Error::Inconsistent(
                "outlier line disagrees with the community lines".to_string(),
            ));
        }
        Ok(cover)
    }
}

/// One community id per node, ids contiguous from 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardLabeling {
    labels: Vec<usize>,
    k: usize,
}

impl HardLabeling {
    /// Validates that ids are contiguous from 0.
    pub fn new(labels: Vec<usize>) -> Result<HardLabeling> {
        let k = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
        let mut used = vec![false; k];
        for &l in &labels {
            used[l] = true;
        }
        if let Some(gap) = used.iter().position(|u| !u) {
            return Err(Error::InvalidArgument(format!(
                "community ids are not contiguous: {gap} is unused"
            )));
        }
        Ok(HardLabeling { labels, k })
    }

    /// Renumbers arbitrary ids in order of first appearance.
    pub fn from_raw<T: Ord + Clone>(raw: &[T]) -> HardLabeling {
        let mut seen = std::collections::BTreeMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = seen.len();
                *seen.entry(l.clone()).or_insert(next)
            })
            .collect();
        HardLabeling {
            labels,
            k: seen.len(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.k
    }
}

/// Benchmark truth: a hard partition or an overlapping cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundTruth {
    Hard(HardLabeling),
    Cover(CommunityCover),
}

impl GroundTruth {
    pub fn to_cover(&self) -> CommunityCover {
        match self {
            GroundTruth::Hard(l) => CommunityCover::from_labeling(l),
            GroundTruth::Cover(c) => c.clone(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            GroundTruth::Hard(l) => l.len(),
            GroundTruth::Cover(c) => c.node_count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn outliers_are_complement() {
        let cover = CommunityCover::new(5, vec![vec![1, 0], vec![3]]).unwrap();
        assert_eq!(cover.communities(), &[vec![0, 1], vec![3]]);
        assert_eq!(cover.outliers(), &[2, 4]);
    }

    #[test]
    fn rejects_bad_communities() {
        assert!(CommunityCover::new(3, vec![vec![]]).is_err());
        assert_eq!(
            CommunityCover::new(3, vec![vec![3]]),
            Err(Error::NodeOutOfRange { node: 3, n: 3 })
        );
    }

    #[test]
    fn cover_file_format() {
        let cover = CommunityCover::new(6, vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        let text = cover.to_cover_file();
        assert_eq!(text, "0: 0 1 2\n1: 2 3\noutliers: 4 5\n");
        assert_eq!(CommunityCover::parse_cover_file(&text).unwrap(), cover);
    }

    #[test]
    fn cover_file_rejects_disagreeing_outliers() {
        assert!(CommunityCover::parse_cover_file("0: 0 1\noutliers: 1\n").is_err());
        assert!(CommunityCover::parse_cover_file("0: 0 2\noutliers:\n").is_err());
        assert!(CommunityCover::parse_cover_file("x: 0 1\n").is_err());
    }

    #[test]
    fn labeling_helpers() {
        let l = HardLabeling::from_raw(&[7, 7, 3, 9]);
        assert_eq!(l.labels(), &[0, 0, 1, 2]);
        assert_eq!(l.num_clusters(), 3);
        assert!(HardLabeling::new(vec![0, 2]).is_err());
        let cover = CommunityCover::from_labeling(&l);
        assert_eq!(cover.to_labeling().unwrap(), l);
        let overlapping = CommunityCover::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(overlapping.to_labeling().is_none());
        assert_eq!(overlapping.overlapping(), vec![1]);
    }

    proptest! {
        #[test]
        fn cover_file_round_trips(
            n in 1usize..40,
            raw in prop::collection::vec(prop::collection::vec(0usize..40, 1..10), 0..6),
        ) {
            let communities: Vec<Vec<usize>> = raw
                .into_iter()
                .map(|c| c.into_iter().map(|v| v % n).collect())
                .collect();
            let cover = CommunityCover::new(n, communities).unwrap();
            let back = CommunityCover::parse_cover_file(&cover.to_cover_file()).unwrap();
            prop_assert_eq!(back, cover);
        }
    }
}
