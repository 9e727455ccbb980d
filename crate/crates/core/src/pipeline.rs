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

//! Detection runs: repeated SNMF solves with binarization at a fixed
//! community count, sweeps over the count, and reporting helpers.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{CommunityCover, HardLabeling};
use crate::error::{Error, Result};
use crate::graph::{adjacency_unit_diag, AdjacencyMatrix, Graph};
use crate::numfmt::fmt_sig;
use crate::quality::{partition_density, DensityReport};
use crate::sbmf::{binarize, cover_from_binary, BinarizeConfig, BinaryCover, ThresholdSummary};
use crate::snmf::{membership_entropy, snmf_run, SoftMembership, SolveTrace, DEFAULT_ITERATIONS};

pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub c: usize,
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    pub binarize: BinarizeConfig,
}

impl RunConfig {
    pub fn new(c: usize, seed: u64) -> Self {
        RunConfig {
            c,
            restarts: DEFAULT_RESTARTS,
            iters: DEFAULT_ITERATIONS,
            seed,
            binarize: BinarizeConfig::default(),
        }
    }

    pub fn with_c(&self, c: usize) -> Self {
        RunConfig { c, ..*self }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one restart, mixed from the base seed, the community count and
/// the restart index.
pub fn restart_seed(base: u64, c: usize, restart: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ c as u64) ^ restart as u64)
}

/// Everything produced by one solve + binarization.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub restart: usize,
    pub seed: u64,
    pub soft: SoftMembership,
    pub trace: SolveTrace,
    pub threshold: ThresholdSummary,
    pub found: BinaryCover,
    pub density: DensityReport,
}

/// Result of [`detect`]: the winning restart plus per-restart scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub c: usize,
    pub best: RestartOutcome,
    /// Partition density of every restart, in restart order.
    pub densities: Vec<f64>,
    /// Number of non-empty communities of every restart.
    pub effective_c: Vec<usize>,
}

impl Detection {
    pub fn cover(&self) -> &CommunityCover {
        &self.best.found.cover
    }

    pub fn density(&self) -> &DensityReport {
        &self.best.density
    }

    pub fn soft(&self) -> &SoftMembership {
        &self.best.soft
    }
}

fn run_once(
    g: &Graph,
    a: &AdjacencyMatrix,
    cfg: &RunConfig,
    restart: usize,
) -> Result<RestartOutcome> {
    let seed = restart_seed(cfg.seed, cfg.c, restart);
    let (soft, trace) = snmf_run(a, cfg.c, cfg.iters, seed)?;
    let search = binarize(a, &soft, &cfg.binarize)?;
    let found = cover_from_binary(&search.membership);
    let density = partition_density(g, &found.cover)?;
    Ok(RestartOutcome {
        restart,
        seed,
        soft,
        trace,
        threshold: search.summary(),
        found,
        density,
    })
}

fn check_config(g: &Graph, cfg: &RunConfig) -> Result<()> {
    let n = g.node_count();
    if cfg.c == 0 || cfg.c > n {
        return Err(Error::InvalidArgument(format!(
            "community count {} must lie in 1..={n}",
            cfg.c
        )));
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    if cfg.iters == 0 {
        return Err(Error::InvalidArgument(
            "iteration count must be positive".into(),
        ));
    }
    Ok(())
}

fn detect_with(g: &Graph, a: &AdjacencyMatrix, cfg: &RunConfig) -> Result<Detection> {
    check_config(g, cfg)?;
    let runs: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_once(g, a, cfg, r))
        .collect::<Result<_>>()?;
    let densities = runs.iter().map(|r| r.density.density).collect();
    let effective_c = runs.iter().map(|r| r.found.cover.len()).collect();
    // highest density wins, then lower binarization objective, then the
    // earlier restart
    let best = runs
        .into_iter()
        .reduce(|best, cand| {
            let (bd, cd) = (best.density.density, cand.density.density);
            if cd > bd || (cd == bd && cand.threshold.objective < best.threshold.objective) {
                cand
            } else {
                best
            }
        })
        .expect("at least one restart");
    Ok(Detection {
        c: cfg.c,
        best,
        densities,
        effective_c,
    })
}

/// Runs `cfg.restarts` independent solves at `cfg.c` communities and keeps
/// the one whose cover has the highest partition density.
pub fn detect(g: &Graph, cfg: &RunConfig) -> Result<Detection> {
    detect_with(g, &adjacency_unit_diag(g), cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub c: usize,
    pub mean_d: f64,
    pub std_d: f64,
    pub mean_effective_c: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Ascending in `c`.
    pub per_c: Vec<SweepEntry>,
    pub selected_c: usize,
}

impl SweepReport {
    /// `c,mean_D,std_D` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("c,mean_D,std_D\n");
        for e in &self.per_c {
            let _ = writeln!(out, "{},{},{}", e.c, fmt_sig(e.mean_d), fmt_sig(e.std_d));
        }
        out
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Detection at every requested community count. Counts are deduplicated
/// and processed in ascending order whatever order they are given in.
pub fn sweep_detailed(
    g: &Graph,
    counts: &[usize],
    cfg: &RunConfig,
) -> Result<(SweepReport, Vec<Detection>)> {
    let mut counts = counts.to_vec();
    counts.sort_unstable();
    counts.dedup();
    if counts.is_empty() {
        return Err(Error::InvalidArgument("empty community-count range".into()));
    }
    let a = adjacency_unit_diag(g);
    let detections: Vec<Detection> = counts
        .par_iter()
        .map(|&c| detect_with(g, &a, &cfg.with_c(c)))
        .collect::<Result<_>>()?;
    let per_c: Vec<SweepEntry> = detections
        .iter()
        .map(|d| {
            let (mean_d, std_d) = mean_std(&d.densities);
            let eff: Vec<f64> = d.effective_c.iter().map(|&x| x as f64).collect();
            SweepEntry {
                c: d.c,
                mean_d,
                std_d,
                mean_effective_c: mean_std(&eff).0,
                runs: d.densities.len(),
            }
        })
        .collect();
    // strict comparison keeps the smallest c among ties
    let selected_c = per_c
        .iter()
        .fold(None::<&SweepEntry>, |best, e| match best {
            Some(b) if e.mean_d <= b.mean_d => Some(b),
            _ => Some(e),
        })
        .map(|e| e.c)
        .expect("non-empty sweep");
    Ok((SweepReport { per_c, selected_c }, detections))
}

/// Mean partition density over restarts for each count in `counts`; the
/// selected count maximizes it.
pub fn sweep(g: &Graph, counts: &[usize], cfg: &RunConfig) -> Result<SweepReport> {
    sweep_detailed(g, counts, cfg).map(|(report, _)| report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySummary {
    /// Community index, or `None` for the outlier group.
    pub community: Option<usize>,
    pub size: usize,
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub per_node: Vec<f64>,
    pub per_community: Vec<EntropySummary>,
    /// Present when the cover has outliers.
    pub outliers: Option<EntropySummary>,
}

impl EntropyReport {
    /// `node,entropy,communities` rows; communities are `;`-separated.
    pub fn nodes_csv(&self, cover: &CommunityCover) -> String {
        let memberships = cover.memberships();
        let mut out = String::from("node,entropy,communities\n");
        for (v, h) in self.per_node.iter().enumerate() {
            let labels: Vec<String> = memberships[v].iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{v},{},{}", fmt_sig(*h), labels.join(";"));
        }
        out
    }

    /// `community,size,mean_entropy,max_entropy`; outliers appear as
    /// community `outliers`.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("community,size,mean_entropy,max_entropy\n");
        for s in self.per_community.iter().chain(self.outliers.iter()) {
            let id = s
                .community
                .map_or("outliers".to_string(), |c| c.to_string());
            let _ = writeln!(
                out,
                "{id},{},{},{}",
                s.size,
                fmt_sig(s.mean),
                fmt_sig(s.max)
            );
        }
        out
    }
}

fn summarize(community: Option<usize>, nodes: &[usize], h: &[f64]) -> EntropySummary {
    let values: Vec<f64> = nodes.iter().map(|&v| h[v]).collect();
    let size = values.len();
    let mean = if size == 0 {
        0.0
    } else {
        values.iter().sum::<f64>() / size as f64
    };
    EntropySummary {
        community,
        size,
        mean,
        max: values.iter().copied().fold(0.0, f64::max),
    }
}

/// Membership entropy of every node, summarized per community.
pub fn entropy_report(u: &SoftMembership, cover: &CommunityCover) -> Result<EntropyReport> {
    if u.nodes() != cover.node_count() {
        return Err(Error::Dimension(format!(
            "membership has {} rows but the cover spans {} nodes",
            u.nodes(),
            cover.node_count()
        )));
    }
    let per_node = membership_entropy(u);
    let per_community = cover
        .communities()
        .iter()
        .enumerate()
        .map(|(c, members)| summarize(Some(c), members, &per_node))
        .collect();
    let outliers =
        (!cover.outliers().is_empty()).then(|| summarize(None, cover.outliers(), &per_node));
    Ok(EntropyReport {
        per_node,
        per_community,
        outliers,
    })
}

/// Hard labeling from a binarized cover: members of several communities keep
/// the one with the largest soft membership, outliers take their strongest
/// retained community. Falls back to the row argmax when no community is left.
pub fn harden(u: &SoftMembership, found: &BinaryCover) -> Result<HardLabeling> {
    let cover = &found.cover;
    if u.nodes() != cover.node_count() {
        return Err(Error::Dimension(format!(
            "membership has {} rows but the cover spans {} nodes",
            u.nodes(),
            cover.node_count()
        )));
    }
    if found.all_empty {
        return Ok(HardLabeling::from_raw(&u.argmax_rows()));
    }
    let values = u.values();
    let memberships = cover.memberships();
    let strongest = |v: usize, options: &mut dyn Iterator<Item = usize>| -> usize {
        options
            .fold((usize::MAX, f64::NEG_INFINITY), |best, c| {
                let s = values[[v, found.columns[c]]];
                if s > best.1 {
                    (c, s)
                } else {
                    best
                }
            })
            .0
    };
    let labels: Vec<usize> = (0..cover.node_count())
        .map(|v| {
            if memberships[v].is_empty() {
                strongest(v, &mut (0..cover.len()))
            } else {
                strongest(v, &mut memberships[v].iter().copied())
            }
        })
        .collect();
    Ok(HardLabeling::from_raw(&labels))
}
