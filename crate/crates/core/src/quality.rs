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

//! Partition density of a node cover.
//!
//! Each community contributes `(n_a / q_a) (m_a - (n_a - 1)) / ((n_a - 2)(n_a - 1))`
//! where `q_a` is the largest label count among its members. The total is
//! scaled by `2 / N`, with `N` the summed community sizes plus outliers.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cover::CommunityCover;
use crate::error::{Error, Result};
use crate::graph::{induced_edge_count, Graph};
use crate::numfmt::fmt_sig;

/// Number of communities containing each node; outliers get 0.
pub fn label_counts(cover: &CommunityCover) -> Vec<usize> {
    cover.label_counts()
}

/// Link density of a single community,
/// `(m - (n - 1)) / (n (n - 1) / 2 - (n - 1))`, defined as 0 when `n < 3`.
pub fn community_density(n: usize, m: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("community has no nodes".into()));
    }
    let max_edges = n * (n - 1) / 2;
    if m > max_edges {
        return Err(Error::InvalidArgument(format!(
            "{m} edges exceed the {max_edges} possible among {n} nodes"
        )));
    }
    if n < 3 {
        return Ok(0.0);
    }
    let tree = (n - 1) as f64;
    Ok((m as f64 - tree) / (max_edges as f64 - tree))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommunityDensity {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub per_community: Vec<CommunityDensity>,
    /// Summed community sizes plus outliers.
    #[serde(rename = "N")]
    pub total_size: usize,
    #[serde(rename = "D")]
    pub density: f64,
    pub outliers: usize,
    /// Set when the cover has no communities; `density` is then 0.
    pub empty_cover: bool,
}

impl DensityReport {
    /// `community_id,n,m,q,d` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("community_id,n,m,q,d\n");
        for (id, c) in self.per_community.iter().enumerate() {
            let _ = writeln!(out, "{id},{},{},{},{}", c.n, c.m, c.q, fmt_sig(c.d));
        }
        out
    }
}

pub fn partition_density(g: &Graph, cover: &CommunityCover) -> Result<DensityReport> {
    if cover.node_count() != g.node_count() {
        return Err(Error::Dimension(format!(
            "cover spans {} nodes but the graph has {}",
            cover.node_count(),
            g.node_count()
        )));
    }
    let labels = cover.label_counts();
    let mut per_community = Vec::with_capacity(cover.len());
    let mut weighted = 0.0;
    for members in cover.communities() {
        let n = members.len();
        let m = induced_edge_count(g, members)?;
        let q = members.iter().map(|&v| labels[v]).max().unwrap_or(1);
        let d = community_density(n, m)?;
        if n >= 3 {
            let nf = n as f64;
            weighted += (nf / q as f64) * (m as f64 - (nf - 1.0)) / ((nf - 2.0) * (nf - 1.0));
        }
        per_community.push(CommunityDensity { n, m, q, d });
    }
    let total_size = per_community.iter().map(|c| c.n).sum::<usize>() + cover.outliers().len();
    let empty_cover = cover.is_empty();
    let density = if empty_cover || total_size == 0 {
        0.0
    } else {
        2.0 / total_size as f64 * weighted
    };
    if !density.is_finite() {
        return Err(Error::Numeric("partition density is not finite".into()));
    }
    Ok(DensityReport {
        per_community,
        total_size,
        density,
        outliers: cover.outliers().len(),
        empty_cover,
    })
}
