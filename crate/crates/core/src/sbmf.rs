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

//! Discretization of a soft membership into a binary one.
//!
//! The binary matrix is `Theta(U - u)` for a single scalar threshold `u`,
//! chosen to minimize `||A - B B^T||_1` plus a penalty on rows. The
//! objective only changes when `u` crosses an entry of `U`, so evaluating
//! it at every distinct entry (and at 0) is an exhaustive search.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::cover::CommunityCover;
use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;
use crate::snmf::SoftMembership;

/// Which matrix 1-norm the residual is measured with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    /// Largest column sum of absolute values.
    #[default]
    Induced,
    /// Sum of all absolute values.
    Entrywise,
}

/// Row penalty added to the residual norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// One unit per all-zero row.
    #[default]
    ZeroRows,
    /// `sum_i (1 - sum_j B_ij)`, which can go negative.
    LiteralEq3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Among equal objectives keep the largest threshold.
    #[default]
    LargerThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BinarizeConfig {
    pub norm_mode: NormMode,
    pub penalty_mode: PenaltyMode,
    pub tie_break: TieBreak,
}

impl FromStr for NormMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "induced" => Ok(NormMode::Induced),
            "entrywise" => Ok(NormMode::Entrywise),
            _ => Err(Error::InvalidArgument(format!("unknown norm mode {s:?}"))),
        }
    }
}

impl fmt::Display for NormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormMode::Induced => "induced",
            NormMode::Entrywise => "entrywise",
        })
    }
}

impl FromStr for PenaltyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero_rows" | "zero-rows" => Ok(PenaltyMode::ZeroRows),
            "literal_eq3" | "literal-eq3" => Ok(PenaltyMode::LiteralEq3),
            _ => Err(Error::InvalidArgument(format!(
                "unknown penalty mode {s:?}"
            ))),
        }
    }
}

impl fmt::Display for PenaltyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenaltyMode::ZeroRows => "zero_rows",
            PenaltyMode::LiteralEq3 => "literal_eq3",
        })
    }
}

/// `n x c` matrix of zeros and ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMembership(Array2<u8>);

impl BinaryMembership {
    pub fn from_array(values: Array2<u8>) -> Result<BinaryMembership> {
        if values.iter().any(|&x| x > 1) {
            return Err(Error::InvalidArgument(
                "binary membership entries must be 0 or 1".into(),
            ));
        }
        Ok(BinaryMembership(values))
    }

    pub fn values(&self) -> &Array2<u8> {
        &self.0
    }

    pub fn nodes(&self) -> usize {
        self.0.nrows()
    }

    pub fn columns(&self) -> usize {
        self.0.ncols()
    }

    pub fn to_f64(&self) -> Array2<f64> {
        self.0.mapv(f64::from)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSearchResult {
    pub threshold: f64,
    pub objective: f64,
    pub candidates_evaluated: usize,
    pub membership: BinaryMembership,
}

/// Serializable part of a [`ThresholdSearchResult`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub threshold: f64,
    pub objective: f64,
    pub candidates_evaluated: usize,
}

impl ThresholdSearchResult {
    pub fn summary(&self) -> ThresholdSummary {
        ThresholdSummary {
            threshold: self.threshold,
            objective: self.objective,
            candidates_evaluated: self.candidates_evaluated,
        }
    }
}

/// Entry is 1 exactly where `m - u > 0`.
pub fn heaviside(m: ArrayView2<'_, f64>, u: f64) -> BinaryMembership {
    BinaryMembership(m.mapv(|x| u8::from(x - u > 0.0)))
}

pub fn matrix_one_norm(m: ArrayView2<'_, f64>, mode: NormMode) -> f64 {
    match mode {
        NormMode::Induced => m
            .axis_iter(Axis(1))
            .map(|col| col.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max),
        NormMode::Entrywise => m.iter().map(|x| x.abs()).sum(),
    }
}

fn penalty(b: &BinaryMembership, mode: PenaltyMode) -> f64 {
    let row_sums: Vec<u32> =
        b.0.axis_iter(Axis(0))
            .map(|row| row.iter().map(|&x| u32::from(x)).sum())
            .collect();
    match mode {
        PenaltyMode::ZeroRows => row_sums.iter().filter(|&&s| s == 0).count() as f64,
        PenaltyMode::LiteralEq3 => row_sums.iter().map(|&s| 1.0 - f64::from(s)).sum(),
    }
}

/// Direct evaluation of `||A - B B^T||_1 + penalty(B)`.
pub fn sbmf_objective(a: &AdjacencyMatrix, b: &BinaryMembership, cfg: &BinarizeConfig) -> f64 {
    let bf = b.to_f64();
    let residual = a.as_array() - &bf.dot(&bf.t());
    matrix_one_norm(residual.view(), cfg.norm_mode) + penalty(b, cfg.penalty_mode)
}

fn distinct_sorted(values: ArrayView2<'_, f64>) -> Vec<f64> {
    let mut out: Vec<f64> = values.iter().copied().collect();
    out.push(0.0);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Ascending distinct entries of `U` with 0 included.
pub fn candidate_thresholds(u: &SoftMembership) -> Vec<f64> {
    distinct_sorted(u.view())
}

/// Exhaustive threshold search on a soft membership.
pub fn binarize(
    a: &AdjacencyMatrix,
    u: &SoftMembership,
    cfg: &BinarizeConfig,
) -> Result<ThresholdSearchResult> {
    binarize_values(a, u.view(), cfg)
}

/// Incremental evaluation state for the threshold sweep. Entries of `B` are
/// switched on one at a time in descending order of `U`; `B B^T` and the
/// per-column absolute residual sums are maintained exactly.
struct SweepState<'a> {
    a: ArrayView2<'a, f64>,
    n: usize,
    gram: Vec<u32>,
    col_abs: Vec<f64>,
    total_abs: f64,
    members: Vec<Vec<usize>>,
    row_ones: Vec<u32>,
    zero_rows: usize,
    ones: usize,
}

impl<'a> SweepState<'a> {
    fn new(a: ArrayView2<'a, f64>, c: usize) -> Self {
        let n = a.nrows();
        let col_abs: Vec<f64> = a
            .axis_iter(Axis(1))
            .map(|col| col.iter().map(|x| x.abs()).sum())
            .collect();
        let total_abs = col_abs.iter().sum();
        SweepState {
            a,
            n,
            gram: vec![0; n * n],
            col_abs,
            total_abs,
            members: vec![Vec::new(); c],
            row_ones: vec![0; n],
            zero_rows: n,
            ones: 0,
        }
    }

    /// Increments `gram[i][k]`, adjusting the residual sum of column `k`.
    fn bump(&mut self, i: usize, k: usize) -> f64 {
        let idx = i * self.n + k;
        let aik = self.a[[i, k]];
        let before = (aik - f64::from(self.gram[idx])).abs();
        self.gram[idx] += 1;
        let after = (aik - f64::from(self.gram[idx])).abs();
        let delta = after - before;
        self.col_abs[k] += delta;
        delta
    }

    fn switch_on(&mut self, i: usize, t: usize) {
        let mut delta = 0.0;
        for idx in 0..self.members[t].len() {
            let k = self.members[t][idx];
            delta += self.bump(i, k);
            delta += self.bump(k, i);
        }
        delta += self.bump(i, i);
        self.total_abs += delta;
        self.members[t].push(i);
        if self.row_ones[i] == 0 {
            self.zero_rows -= 1;
        }
        self.row_ones[i] += 1;
        self.ones += 1;
    }

    fn objective(&self, cfg: &BinarizeConfig) -> f64 {
        let norm = match cfg.norm_mode {
            NormMode::Induced => self.col_abs.iter().copied().fold(0.0, f64::max),
            NormMode::Entrywise => self.total_abs,
        };
        let pen = match cfg.penalty_mode {
            PenaltyMode::ZeroRows => self.zero_rows as f64,
            PenaltyMode::LiteralEq3 => self.n as f64 - self.ones as f64,
        };
        norm + pen
    }
}

/// Threshold search on an arbitrary nonnegative matrix (row sums are not
/// required to be 1).
pub fn binarize_values(
    a: &AdjacencyMatrix,
    u: ArrayView2<'_, f64>,
    cfg: &BinarizeConfig,
) -> Result<ThresholdSearchResult> {
    let (n, c) = u.dim();
    if a.size() != n {
        return Err(Error::Dimension(format!(
            "adjacency is {0}x{0} but membership has {n} rows",
            a.size()
        )));
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("membership has non-finite entries".into()));
    }
    let candidates = distinct_sorted(u);

    let mut entries: Vec<(f64, usize, usize)> =
        u.indexed_iter().map(|((i, t), &x)| (x, i, t)).collect();
    // descending by value, then by position so the sweep is reproducible
    entries.sort_by(|x, y| y.0.total_cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));

    let mut state = SweepState::new(a.as_array().view(), c);
    let mut next = 0;
    let mut best: Option<(f64, f64)> = None;
    for &threshold in candidates.iter().rev() {
        while next < entries.len() && entries[next].0 > threshold {
            let (_, i, t) = entries[next];
            state.switch_on(i, t);
            next += 1;
        }
        let obj = state.objective(cfg);
        // walking downward, so a strict improvement is required to move
        // away from the larger threshold
        if best.is_none_or(|(_, b)| obj < b) {
            best = Some((threshold, obj));
        }
    }
    let (threshold, objective) = best.expect("candidate list always contains 0");
    if !objective.is_finite() {
        return Err(Error::Numeric(
            "binarization objective is not finite".into(),
        ));
    }
    Ok(ThresholdSearchResult {
        threshold,
        objective,
        candidates_evaluated: candidates.len(),
        membership: heaviside(u, threshold),
    })
}

/// Cover read off a binary membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCover {
    pub cover: CommunityCover,
    /// Column of the binary matrix each community came from.
    pub columns: Vec<usize>,
    /// Nodes with more than one label.
    pub overlapping: Vec<usize>,
    /// Set when every column was empty.
    pub all_empty: bool,
}

/// Communities are the non-empty columns; zero rows become outliers.
pub fn cover_from_binary(b: &BinaryMembership) -> BinaryCover {
    let mut communities = Vec::new();
    let mut columns = Vec::new();
    for (t, col) in b.0.axis_iter(Axis(1)).enumerate() {
        let members: Vec<usize> = col
            .iter()
            .enumerate()
            .filter_map(|(i, &x)| (x == 1).then_some(i))
            .collect();
        if !members.is_empty() {
            communities.push(members);
            columns.push(t);
        }
    }
    let cover = CommunityCover::new(b.nodes(), communities)
        .expect("columns of a binary matrix form a valid cover");
    let overlapping = cover.overlapping();
    let all_empty = cover.is_empty();
    BinaryCover {
        cover,
        columns,
        overlapping,
        all_empty,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn adj(values: Array2<f64>) -> AdjacencyMatrix {
        AdjacencyMatrix::from_array(values).unwrap()
    }

    /// Straight transcription of the objective: explicit residual loops,
    /// independent of the matrix helpers above.
    fn oracle_objective(a: &Array2<f64>, b: &Array2<u8>, cfg: &BinarizeConfig) -> f64 {
        let (n, c) = b.dim();
        let mut col = vec![0.0; n];
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut g = 0.0;
                for t in 0..c {
                    g += f64::from(b[[i, t]] * b[[j, t]]);
                }
                let r = (a[[i, j]] - g).abs();
                col[j] += r;
                total += r;
            }
        }
        let norm = match cfg.norm_mode {
            NormMode::Induced => col.iter().copied().fold(0.0, f64::max),
            NormMode::Entrywise => total,
        };
        let mut pen = 0.0;
        for i in 0..n {
            let s: u32 = (0..c).map(|t| u32::from(b[[i, t]])).sum();
            pen += match cfg.penalty_mode {
                PenaltyMode::ZeroRows => f64::from(u8::from(s == 0)),
                PenaltyMode::LiteralEq3 => 1.0 - f64::from(s),
            };
        }
        norm + pen
    }

    #[test]
    fn heaviside_examples() {
        assert_eq!(
            heaviside(array![[0.5]].view(), 0.5).values(),
            &array![[0u8]]
        );
        assert_eq!(
            heaviside(array![[0.5]].view(), 0.4999).values(),
            &array![[1u8]]
        );
        assert_eq!(
            heaviside(array![[0.9, 0.1], [0.2, 0.8]].view(), 0.5).values(),
            &array![[1u8, 0], [0, 1]]
        );
    }

    #[test]
    fn one_norm_examples() {
        let m = array![[1.0, -2.0], [3.0, 4.0]];
        assert_eq!(matrix_one_norm(m.view(), NormMode::Induced), 6.0);
        assert_eq!(matrix_one_norm(m.view(), NormMode::Entrywise), 10.0);
        let z = Array2::<f64>::zeros((3, 2));
        assert_eq!(matrix_one_norm(z.view(), NormMode::Induced), 0.0);
        assert_eq!(matrix_one_norm(z.view(), NormMode::Entrywise), 0.0);
    }

    #[test]
    fn objective_examples_match_oracle() {
        let cfg = BinarizeConfig::default();
        let ones = array![[1.0, 1.0], [1.0, 1.0]];
        let eye = array![[1.0, 0.0], [0.0, 1.0]];
        let cases = [
            (ones.clone(), array![[1u8], [1]]),
            (eye, array![[0u8], [0]]),
            (ones, array![[1u8], [0]]),
        ];
        let expected = [0.0, 3.0, 3.0];
        for ((a, b), want) in cases.into_iter().zip(expected) {
            let oracle = oracle_objective(&a, &b, &cfg);
            assert_eq!(oracle, want);
            let got = sbmf_objective(&adj(a), &BinaryMembership::from_array(b).unwrap(), &cfg);
            assert_eq!(got, want);
        }
    }

    #[test]
    fn candidate_examples() {
        let u = SoftMembership::from_array(array![[0.9, 0.1], [0.8, 0.2]]).unwrap();
        assert_eq!(candidate_thresholds(&u), vec![0.0, 0.1, 0.2, 0.8, 0.9]);
        let u = SoftMembership::from_array(array![[0.5, 0.5], [0.5, 0.5]]).unwrap();
        assert_eq!(candidate_thresholds(&u), vec![0.0, 0.5]);
    }

    #[test]
    fn two_cliques_binarize() {
        let a = adj(array![
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 1.0],
            [0.0, 0.0, 1.0, 1.0]
        ]);
        let u = SoftMembership::from_array(array![[0.9, 0.1], [0.8, 0.2], [0.1, 0.9], [0.2, 0.8]])
            .unwrap();
        let res = binarize(&a, &u, &BinarizeConfig::default()).unwrap();
        assert_eq!(
            res.membership.values(),
            &array![[1u8, 0], [1, 0], [0, 1], [0, 1]]
        );
        assert_eq!(res.objective, 0.0);
        // ties go to the larger threshold: 0.2 is the top of the optimal range
        assert_eq!(res.threshold, 0.2);
        assert_eq!(res.candidates_evaluated, 5);
    }

    #[test]
    fn one_hot_input_is_reproduced() {
        let a = adj(array![[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let u = SoftMembership::from_array(array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let res = binarize(&a, &u, &BinarizeConfig::default()).unwrap();
        assert_eq!(res.membership.values(), &array![[1u8, 0], [1, 0], [0, 1]]);
        assert_eq!(res.objective, 0.0);
        assert_eq!(res.threshold, 0.0);
    }

    #[test]
    fn incremental_matches_oracle_at_every_candidate() {
        use rand::{Rng, SeedableRng};
        let configs = [
            BinarizeConfig::default(),
            BinarizeConfig {
                norm_mode: NormMode::Entrywise,
                ..Default::default()
            },
            BinarizeConfig {
                penalty_mode: PenaltyMode::LiteralEq3,
                ..Default::default()
            },
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(2..9);
            let c = rng.random_range(1..4);
            let mut a = Array2::<f64>::eye(n);
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random_bool(0.4) {
                        a[[i, j]] = 1.0;
                        a[[j, i]] = 1.0;
                    }
                }
            }
            // coarse values so ties appear
            let u =
                Array2::from_shape_simple_fn((n, c), || f64::from(rng.random_range(0..5u8)) / 4.0);
            for cfg in &configs {
                let res = binarize_values(&adj(a.clone()), u.view(), cfg).unwrap();
                let mut best = f64::INFINITY;
                let mut best_u = f64::NAN;
                for &t in distinct_sorted(u.view()).iter() {
                    let obj = oracle_objective(&a, heaviside(u.view(), t).values(), cfg);
                    if obj <= best {
                        best = obj;
                        best_u = t;
                    }
                }
                assert_eq!(res.objective, best);
                assert_eq!(res.threshold, best_u);
            }
        }
    }

    #[test]
    fn heaviside_extremes() {
        let u = array![[0.3, 0.7], [0.0, 1.0]];
        let top = heaviside(u.view(), 1.0);
        assert!(top.values().iter().all(|&x| x == 0));
        let bottom = heaviside(u.view(), 0.0);
        assert_eq!(bottom.values(), &array![[1u8, 1], [0, 1]]);
    }

    #[test]
    fn covers_from_binary() {
        let b = BinaryMembership::from_array(array![[1u8, 0], [1, 0], [0, 1], [0, 1]]).unwrap();
        let bc = cover_from_binary(&b);
        assert_eq!(bc.cover.communities(), &[vec![0, 1], vec![2, 3]]);
        assert!(bc.cover.outliers().is_empty());
        assert!(bc.overlapping.is_empty());

        let b = BinaryMembership::from_array(array![[1u8, 1], [1, 0], [0, 1]]).unwrap();
        let bc = cover_from_binary(&b);
        assert_eq!(bc.overlapping, vec![0]);
        assert_eq!(bc.cover.label_counts()[0], 2);

        let b = BinaryMembership::from_array(array![[0u8, 0], [1, 0], [0, 1]]).unwrap();
        assert_eq!(cover_from_binary(&b).cover.outliers(), &[0]);

        let b = BinaryMembership::from_array(array![[0u8, 0, 1], [0, 0, 1]]).unwrap();
        let bc = cover_from_binary(&b);
        assert_eq!(bc.columns, vec![2]);

        let b = BinaryMembership::from_array(Array2::zeros((3, 2))).unwrap();
        let bc = cover_from_binary(&b);
        assert!(bc.all_empty);
        assert_eq!(bc.cover.outliers(), &[0, 1, 2]);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(
            "entrywise".parse::<NormMode>().unwrap(),
            NormMode::Entrywise
        );
        assert_eq!(
            "literal-eq3".parse::<PenaltyMode>().unwrap(),
            PenaltyMode::LiteralEq3
        );
        assert!("l2".parse::<NormMode>().is_err());
        assert_eq!(PenaltyMode::ZeroRows.to_string(), "zero_rows");
    }
}
