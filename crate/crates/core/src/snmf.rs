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

//! Simplex-constrained symmetric NMF, `min ||A - U U^T||_F^2` with `U >= 0`
//! and unit row sums, solved by multiplicative updates followed by row
//! normalization.

use std::fmt::Write as _;

use ndarray::{Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;

/// Floor applied to the update denominator.
pub const DENOMINATOR_GUARD: f64 = 1e-12;
/// Fixed iteration count used unless configured otherwise.
pub const DEFAULT_ITERATIONS: usize = 100;
/// Row sums of a soft membership may deviate from 1 by at most this much.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// `n x c` nonnegative matrix with rows summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMembership(Array2<f64>);

impl SoftMembership {
    /// Validates nonnegativity and unit row sums.
    pub fn from_array(values: Array2<f64>) -> Result<SoftMembership> {
        if values.ncols() == 0 {
            return Err(Error::InvalidArgument(
                "membership needs at least one column".into(),
            ));
        }
        for (i, row) in values.axis_iter(Axis(0)).enumerate() {
            if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has a negative or non-finite entry"
                )));
            }
            let sum = row.sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidArgument(format!("row {i} sums to {sum}")));
            }
        }
        Ok(SoftMembership(values))
    }

    /// Row-normalizes a nonnegative matrix.
    pub fn normalized(mut values: Array2<f64>) -> Result<SoftMembership> {
        for mut row in values.axis_iter_mut(Axis(0)) {
            let sum = row.sum();
            if !(sum > 0.0) || !sum.is_finite() {
                return Err(Error::InvalidArgument("row cannot be normalized".into()));
            }
            row.mapv_inplace(|x| x / sum);
        }
        SoftMembership::from_array(values)
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    pub fn nodes(&self) -> usize {
        self.0.nrows()
    }

    pub fn communities(&self) -> usize {
        self.0.ncols()
    }

    /// Column of the largest entry in each row; ties go to the lower index.
    pub fn argmax_rows(&self) -> Vec<usize> {
        self.0
            .axis_iter(Axis(0))
            .map(|row| {
                row.iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (j, &x)| {
                        if x > best.1 {
                            (j, x)
                        } else {
                            best
                        }
                    })
                    .0
            })
            .collect()
    }
}

/// Objective values recorded during a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    /// Objective after initialization, then after every iteration.
    pub objective_per_iteration: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
    /// Rows that collapsed to zero during an update and were reset to
    /// uniform.
    pub reset_rows: usize,
}

impl SolveTrace {
    /// `iteration,objective` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,objective\n");
        for (i, obj) in self.objective_per_iteration.iter().enumerate() {
            let _ = writeln!(out, "{i},{obj:.12e}");
        }
        out
    }

    pub fn initial_objective(&self) -> f64 {
        self.objective_per_iteration[0]
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_per_iteration.last().unwrap()
    }
}

/// Uniform entries on (0, 1], then row-normalized.
pub fn init_soft(n: usize, c: usize, seed: u64) -> Result<SoftMembership> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one node".into()));
    }
    if c == 0 || c > n {
        return Err(Error::InvalidArgument(format!(
            "community count {c} must lie in 1..={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = Array2::from_shape_simple_fn((n, c), || 1.0 - rng.random::<f64>());
    SoftMembership::normalized(values)
}

fn check_dims(a: &AdjacencyMatrix, u: &SoftMembership) -> Result<()> {
    if a.size() != u.nodes() {
        return Err(Error::Dimension(format!(
            "adjacency is {0}x{0} but membership has {1} rows",
            a.size(),
            u.nodes()
        )));
    }
    Ok(())
}

/// One multiplicative update plus row normalization, given `A U`.
/// Returns the number of rows reset to uniform.
fn update_in_place(u: &mut Array2<f64>, au: &Array2<f64>) -> usize {
    let gram = u.t().dot(&*u);
    let denom = u.dot(&gram);
    ndarray::Zip::from(&mut *u)
        .and(au)
        .and(&denom)
        .for_each(|x, &num, &den| *x *= num / den.max(DENOMINATOR_GUARD));
    let c = u.ncols() as f64;
    let mut reset = 0;
    for mut row in u.axis_iter_mut(Axis(0)) {
        let sum = row.sum();
        if sum > 0.0 && sum.is_finite() {
            row.mapv_inplace(|x| x / sum);
        } else {
            row.fill(1.0 / c);
            reset += 1;
        }
    }
    reset
}

/// `||A||^2 - 2 <U, AU> + ||U^T U||^2`, reusing an already computed `A U`.
fn objective_from_product(a_norm_sq: f64, u: &Array2<f64>, au: &Array2<f64>) -> f64 {
    let cross: f64 = ndarray::Zip::from(u)
        .and(au)
        .fold(0.0, |acc, &x, &y| acc + x * y);
    let gram = u.t().dot(u);
    let gram_sq: f64 = gram.iter().map(|x| x * x).sum();
    (a_norm_sq - 2.0 * cross + gram_sq).max(0.0)
}

/// Applies a single update step. The second value counts rows that had to
/// be reset to uniform.
pub fn snmf_step(a: &AdjacencyMatrix, u: &SoftMembership) -> Result<(SoftMembership, usize)> {
    check_dims(a, u)?;
    let mut next = u.values().clone();
    let au = a.as_array().dot(&next);
    let reset = update_in_place(&mut next, &au);
    Ok((SoftMembership(next), reset))
}

/// Squared Frobenius norm of `A - U U^T`, evaluated directly.
pub fn snmf_objective(a: &AdjacencyMatrix, u: &SoftMembership) -> f64 {
    let uv = u.values();
    let recon = uv.dot(&uv.t());
    a.as_array()
        .iter()
        .zip(recon.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Runs `iters` updates starting from `init`.
pub fn snmf_solve(
    a: &AdjacencyMatrix,
    init: SoftMembership,
    iters: usize,
    seed: u64,
) -> Result<(SoftMembership, SolveTrace)> {
    check_dims(a, &init)?;
    if iters == 0 {
        return Err(Error::InvalidArgument(
            "iteration count must be positive".into(),
        ));
    }
    let a_norm_sq: f64 = a.as_array().iter().map(|x| x * x).sum();
    let mut u = init.into_inner();
    let mut objectives = Vec::with_capacity(iters + 1);
    let mut reset_rows = 0;
    let mut au = a.as_array().dot(&u);
    for it in 0..=iters {
        let obj = objective_from_product(a_norm_sq, &u, &au);
        if !obj.is_finite() {
            return Err(Error::Numeric(format!(
                "objective became non-finite at iteration {it}"
            )));
        }
        objectives.push(obj);
        if it == iters {
            break;
        }
        reset_rows += update_in_place(&mut u, &au);
        au = a.as_array().dot(&u);
    }
    Ok((
        SoftMembership(u),
        SolveTrace {
            objective_per_iteration: objectives,
            iterations: iters,
            seed,
            reset_rows,
        },
    ))
}

/// Random start followed by `iters` multiplicative updates.
pub fn snmf_run(
    a: &AdjacencyMatrix,
    c: usize,
    iters: usize,
    seed: u64,
) -> Result<(SoftMembership, SolveTrace)> {
    let init = init_soft(a.size(), c, seed)?;
    snmf_solve(a, init, iters, seed)
}

/// Shannon entropy (natural log) of each membership row, with `0 ln 0 = 0`.
pub fn membership_entropy(u: &SoftMembership) -> Vec<f64> {
    u.values()
        .axis_iter(Axis(0))
        .map(|row| {
            -row.iter()
                .filter(|&&x| x > 0.0)
                .map(|&x| x * x.ln())
                .sum::<f64>()
        })
        .map(|h| h.max(0.0))
        .collect()
}
