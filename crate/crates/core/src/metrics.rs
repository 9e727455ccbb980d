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

//! Agreement scores between detected structure and ground truth.
//!
//! [`nmi`] compares two hard partitions. [`gnmi`] compares covers whose
//! communities may overlap and need not cover every node: each community is
//! treated as a binary indicator over nodes, every community is matched to
//! the community of the other cover that explains it best, and the two
//! directions of normalized conditional entropy are averaged.

use serde::{Deserialize, Serialize};

use crate::cover::{CommunityCover, HardLabeling};
use crate::error::{Error, Result};

/// Joint counts of two hard labelings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionTable {
    /// `counts[i][j]`: nodes in truth community `i` and found community `j`.
    pub counts: Vec<Vec<usize>>,
    pub truth_sizes: Vec<usize>,
    pub found_sizes: Vec<usize>,
    pub n: usize,
}

fn same_nodes(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Inconsistent(format!(
            "node sets differ: {a} nodes vs {b} nodes"
        )));
    }
    Ok(())
}

pub fn confusion(truth: &HardLabeling, found: &HardLabeling) -> Result<ConfusionTable> {
    same_nodes(truth.len(), found.len())?;
    let (k1, k2) = (truth.num_clusters(), found.num_clusters());
    let mut counts = vec![vec![0; k2]; k1];
    let mut truth_sizes = vec![0; k1];
    let mut found_sizes = vec![0; k2];
    for (&i, &j) in truth.labels().iter().zip(found.labels()) {
        counts[i][j] += 1;
        truth_sizes[i] += 1;
        found_sizes[j] += 1;
    }
    Ok(ConfusionTable {
        counts,
        truth_sizes,
        found_sizes,
        n: truth.len(),
    })
}

/// Normalized mutual information with the geometric-mean normalization and
/// natural logarithms.
///
/// When either side is a single cluster the normalizer vanishes; the score
/// is then 1 if both labelings are the same partition and 0 otherwise.
pub fn nmi(truth: &HardLabeling, found: &HardLabeling) -> Result<f64> {
    let table = confusion(truth, found)?;
    if table.n == 0 {
        return Err(Error::EmptyInput);
    }
    if table.truth_sizes.len() == 1 || table.found_sizes.len() == 1 {
        let same = HardLabeling::from_raw(truth.labels()) == HardLabeling::from_raw(found.labels());
        return Ok(if same { 1.0 } else { 0.0 });
    }
    let n = table.n as f64;
    let mut mutual = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let nij = nij as f64;
                mutual += nij
                    * (nij * n / (table.truth_sizes[i] as f64 * table.found_sizes[j] as f64)).ln();
            }
        }
    }
    let spread = |sizes: &[usize]| -> f64 {
        sizes
            .iter()
            .filter(|&&s| s > 0)
            .map(|&s| s as f64 * (s as f64 / n).ln())
            .sum()
    };
    let denom = (spread(&table.truth_sizes) * spread(&table.found_sizes)).sqrt();
    Ok((mutual / denom).clamp(0.0, 1.0))
}

fn h(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

fn binary_entropy(size: usize, n: f64) -> f64 {
    let p = size as f64 / n;
    h(p) + h(1.0 - p)
}

/// Mean over the communities of `x` of the normalized conditional entropy
/// given the best admissible community of `y`.
fn normalized_conditional(
    x_sizes: &[usize],
    y_sizes: &[usize],
    shared: &[Vec<usize>],
    n: usize,
    transpose: bool,
) -> f64 {
    let nf = n as f64;
    let mut sum = 0.0;
    for (k, &xs) in x_sizes.iter().enumerate() {
        let hx = binary_entropy(xs, nf);
        if hx == 0.0 {
            // a community holding every node carries no information to lose
            continue;
        }
        let mut best = hx;
        for (l, &ys) in y_sizes.iter().enumerate() {
            let both = if transpose {
                shared[l][k]
            } else {
                shared[k][l]
            };
            let p11 = both as f64 / nf;
            let p10 = (xs - both) as f64 / nf;
            let p01 = (ys - both) as f64 / nf;
            let p00 = (n + both - xs - ys) as f64 / nf;
            // only accept matches that are positively correlated enough
            if h(p11) + h(p00) <= h(p01) + h(p10) {
                continue;
            }
            let joint = h(p11) + h(p10) + h(p01) + h(p00);
            let conditional = joint - binary_entropy(ys, nf);
            if conditional < best {
                best = conditional;
            }
        }
        sum += (best / hx).max(0.0);
    }
    sum / x_sizes.len() as f64
}

/// Normalized mutual information between two covers, in `[0, 1]`.
pub fn gnmi(truth: &CommunityCover, found: &CommunityCover) -> Result<f64> {
    same_nodes(truth.node_count(), found.node_count())?;
    if truth.is_empty() || found.is_empty() {
        return Err(Error::InvalidArgument("cannot score an empty cover".into()));
    }
    let n = truth.node_count();
    let truth_of = truth.memberships();
    let found_of = found.memberships();
    let mut shared = vec![vec![0usize; found.len()]; truth.len()];
    for v in 0..n {
        for &k in &truth_of[v] {
            for &l in &found_of[v] {
                shared[k][l] += 1;
            }
        }
    }
    let truth_sizes: Vec<usize> = truth.communities().iter().map(Vec::len).collect();
    let found_sizes: Vec<usize> = found.communities().iter().map(Vec::len).collect();
    let x_given_y = normalized_conditional(&truth_sizes, &found_sizes, &shared, n, false);
    let y_given_x = normalized_conditional(&found_sizes, &truth_sizes, &shared, n, true);
    Ok((1.0 - 0.5 * (x_given_y + y_given_x)).clamp(0.0, 1.0))
}

/// Metric result as emitted by the command-line tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric: String,
    pub value: f64,
    pub n: usize,
    pub k_truth: usize,
    pub k_found: usize,
}
