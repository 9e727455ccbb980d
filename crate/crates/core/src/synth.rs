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

//! Benchmark graph generators.
//!
//! [`generate_gn`] builds the classic 128-node, four-group planted partition
//! with independent Bernoulli edges. [`generate_planted_overlap`] is a
//! simplified overlapping benchmark in the LFR style: power-law degrees and
//! community sizes, a mixing fraction of external stubs, and a chosen
//! fraction of nodes that belong to several communities.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{CommunityCover, HardLabeling};
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const GN_GROUPS: usize = 4;
pub const GN_GROUP_SIZE: usize = 32;
pub const GN_TOTAL_DEGREE: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnSpec {
    /// Expected number of neighbors outside a node's own group.
    pub z_out: f64,
    pub seed: u64,
}

impl GnSpec {
    pub fn new(z_out: f64, seed: u64) -> Self {
        GnSpec { z_out, seed }
    }

    pub fn z_in(&self) -> f64 {
        GN_TOTAL_DEGREE - self.z_out
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=GN_TOTAL_DEGREE).contains(&self.z_out) {
            return Err(Error::InvalidArgument(format!(
                "z_out must lie in [0, 16], got {}",
                self.z_out
            )));
        }
        Ok(())
    }
}

pub fn generate_gn(spec: &GnSpec) -> Result<(Graph, HardLabeling)> {
    spec.validate()?;
    let n = GN_GROUPS * GN_GROUP_SIZE;
    let p_in = spec.z_in() / (GN_GROUP_SIZE - 1) as f64;
    let p_out = spec.z_out / (n - GN_GROUP_SIZE) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if u / GN_GROUP_SIZE == v / GN_GROUP_SIZE {
                p_in
            } else {
                p_out
            };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let labels = HardLabeling::new((0..n).map(|v| v / GN_GROUP_SIZE).collect())?;
    Ok((Graph::from_edges(n, &edges), labels))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapSpec {
    pub n: usize,
    pub min_size: usize,
    pub max_size: usize,
    /// Fraction of each node's stubs wired outside its communities.
    pub mu: f64,
    /// Fraction of nodes that belong to `memberships_per_overlap` communities.
    pub overlap_fraction: f64,
    pub memberships_per_overlap: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    /// Degree distribution exponent.
    pub gamma: f64,
    /// Community size distribution exponent.
    pub beta: f64,
    pub seed: u64,
}

impl OverlapSpec {
    /// 1000 nodes, degrees up to 50 with exponent 2, community sizes in
    /// [20, 100] with exponent 1, mean degree 20, mixing 0.1 and 10% of the
    /// nodes in two communities.
    pub fn lfr_paper(seed: u64) -> Self {
        OverlapSpec {
            n: 1000,
            min_size: 20,
            max_size: 100,
            mu: 0.1,
            overlap_fraction: 0.1,
            memberships_per_overlap: 2,
            avg_degree: 20.0,
            max_degree: 50,
            gamma: 2.0,
            beta: 1.0,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(0.0..1.0).contains(&self.mu) {
            return bad(format!("mu must lie in [0, 1), got {}", self.mu));
        }
        if !(0.0..=1.0).contains(&self.overlap_fraction) {
            return bad(format!(
                "overlap fraction must lie in [0, 1], got {}",
                self.overlap_fraction
            ));
        }
        if self.min_size < 3 || self.min_size > self.max_size {
            return bad(format!(
                "community size range [{}, {}] is invalid (minimum must be at least 3)",
                self.min_size, self.max_size
            ));
        }
        if !(self.gamma > 0.0) || !(self.beta > 0.0) {
            return bad("power-law exponents must be positive".into());
        }
        if self.memberships_per_overlap < 2 {
            return bad("overlapping nodes need at least 2 memberships".into());
        }
        if self.max_degree == 0 || self.max_degree >= self.n || !(self.avg_degree >= 1.0) {
            return bad(format!(
                "degrees must satisfy 1 <= mean ({}) and max ({}) < n ({})",
                self.avg_degree, self.max_degree, self.n
            ));
        }
        if self.avg_degree > self.max_degree as f64 {
            return bad("mean degree exceeds the maximum degree".into());
        }
        Ok(())
    }
}

/// Integers in `[lo, hi]` with probability proportional to `k^-exponent`.
struct DiscretePowerLaw {
    lo: usize,
    index: WeightedIndex<f64>,
}

impl DiscretePowerLaw {
    fn new(lo: usize, hi: usize, exponent: f64) -> Self {
        let weights: Vec<f64> = (lo..=hi).map(|k| (k as f64).powf(-exponent)).collect();
        DiscretePowerLaw {
            lo,
            index: WeightedIndex::new(weights).expect("non-empty positive weights"),
        }
    }

    fn mean(lo: usize, hi: usize, exponent: f64) -> f64 {
        let (num, den) = (lo..=hi).fold((0.0, 0.0), |(num, den), k| {
            let w = (k as f64).powf(-exponent);
            (num + k as f64 * w, den + w)
        });
        num / den
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        self.lo + self.index.sample(rng)
    }
}

/// Smallest degree whose truncated power law has the mean closest to the
/// requested one.
fn min_degree_for_mean(avg: f64, max: usize, gamma: f64) -> usize {
    (1..=max)
        .min_by(|&a, &b| {
            let da = (DiscretePowerLaw::mean(a, max, gamma) - avg).abs();
            let db = (DiscretePowerLaw::mean(b, max, gamma) - avg).abs();
            da.total_cmp(&db)
        })
        .unwrap_or(1)
}

fn community_sizes(spec: &OverlapSpec, total: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let max_size = spec.max_size.min(spec.n);
    if total < spec.min_size || spec.min_size > max_size {
        return Err(Error::Infeasible(format!(
            "{total} memberships cannot fill communities of size [{}, {}]",
            spec.min_size, max_size
        )));
    }
    let law = DiscretePowerLaw::new(spec.min_size, max_size, spec.beta);
    let mut sizes = Vec::new();
    let mut sum = 0;
    while sum < total {
        let s = law.sample(rng);
        let rest = total - sum;
        if s <= rest {
            sizes.push(s);
            sum += s;
        } else if rest >= spec.min_size {
            sizes.push(rest);
            sum += rest;
        } else {
            // too few memberships left for a community of their own: spread
            // them over existing communities that still have room
            let room: usize = sizes.iter().map(|&x| max_size - x).sum();
            if room < rest {
                return Err(Error::Infeasible(
                    "community size bounds cannot absorb all memberships".into(),
                ));
            }
            for _ in 0..rest {
                let open: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] < max_size).collect();
                let pick = open[rng.random_range(0..open.len())];
                sizes[pick] += 1;
            }
            sum = total;
        }
    }
    let needed = if spec.overlap_fraction > 0.0 {
        spec.memberships_per_overlap
    } else {
        1
    };
    if sizes.len() < needed {
        return Err(Error::Infeasible(format!(
            "only {} communities for nodes that need {} memberships",
            sizes.len(),
            needed
        )));
    }
    Ok(sizes)
}

/// Places every membership token into a community, larger internal degrees
/// first, preferring communities big enough to host that degree.
fn assign_memberships(
    sizes: &[usize],
    tokens: &[(usize, usize)],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<usize>>> {
    let mut members: Vec<Vec<usize>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    let mut of_node: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut room: Vec<usize> = sizes.to_vec();
    for &(node, need) in tokens {
        let open = |require_size: bool, room: &[usize], of_node: &[Vec<usize>]| -> Vec<usize> {
            (0..sizes.len())
                .filter(|&c| room[c] > 0 && !of_node[node].contains(&c))
                .filter(|&c| !require_size || sizes[c] > need)
                .collect()
        };
        let mut candidates = open(true, &room, &of_node);
        if candidates.is_empty() {
            candidates = open(false, &room, &of_node);
        }
        let chosen = if !candidates.is_empty() {
            let weights: Vec<f64> = candidates.iter().map(|&c| room[c] as f64).collect();
            candidates[WeightedIndex::new(weights).unwrap().sample(rng)]
        } else {
            // every community with room already holds this node: trade places
            // with a member of another community
            let target = (0..sizes.len())
                .find(|&c| room[c] > 0)
                .ok_or_else(|| Error::Infeasible("membership slots exhausted".into()))?;
            let mut swapped = None;
            let mut order: Vec<usize> = (0..sizes.len()).collect();
            order.shuffle(rng);
            'outer: for other in order {
                if other == target || of_node[node].contains(&other) {
                    continue;
                }
                for pos in 0..members[other].len() {
                    let w = members[other][pos];
                    if !of_node[w].contains(&target) {
                        members[other][pos] = node;
                        of_node[w].retain(|&c| c != other);
                        of_node[node].push(other);
                        members[target].push(w);
                        of_node[w].push(target);
                        room[target] -= 1;
                        swapped = Some(());
                        break 'outer;
                    }
                }
            }
            swapped
                .ok_or_else(|| Error::Infeasible("cannot place overlapping memberships".into()))?;
            continue;
        };
        members[chosen].push(node);
        of_node[node].push(chosen);
        room[chosen] -= 1;
    }
    Ok(members)
}

/// Pairs stubs at random, rejecting self-loops, repeated edges and pairs for
/// which `allowed` is false. Unmatched stubs are reshuffled for a bounded
/// number of rounds and then dropped.
fn match_stubs(
    mut stubs: Vec<usize>,
    edges: &mut HashSet<(usize, usize)>,
    ordered: &mut Vec<(usize, usize)>,
    rng: &mut ChaCha8Rng,
    allowed: impl Fn(usize, usize) -> bool,
) {
    const ROUNDS: usize = 50;
    for _ in 0..ROUNDS {
        if stubs.len() < 2 {
            break;
        }
        stubs.shuffle(rng);
        let mut left = Vec::new();
        let mut iter = stubs.chunks_exact(2);
        for pair in &mut iter {
            let (u, v) = (pair[0], pair[1]);
            let key = (u.min(v), u.max(v));
            if u != v && allowed(u, v) && !edges.contains(&key) {
                edges.insert(key);
                ordered.push(key);
            } else {
                left.extend_from_slice(pair);
            }
        }
        left.extend_from_slice(iter.remainder());
        if left.len() == stubs.len() && left.len() <= 2 {
            break;
        }
        stubs = left;
    }
}

/// Overlapping planted-partition graph together with its planted cover.
pub fn generate_planted_overlap(spec: &OverlapSpec) -> Result<(Graph, CommunityCover)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;

    let n_overlap = (spec.overlap_fraction * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut label_count = vec![1usize; n];
    for &v in &order[..n_overlap] {
        label_count[v] = spec.memberships_per_overlap;
    }
    let total: usize = label_count.iter().sum();
    let sizes = community_sizes(spec, total, &mut rng)?;

    let k_min = min_degree_for_mean(spec.avg_degree, spec.max_degree, spec.gamma);
    let degree_law = DiscretePowerLaw::new(k_min, spec.max_degree, spec.gamma);
    let degrees: Vec<usize> = (0..n).map(|_| degree_law.sample(&mut rng)).collect();

    // membership tokens, sorted by the internal degree each must host
    let mut tokens: Vec<(usize, usize)> = Vec::with_capacity(total);
    for &v in &order {
        let per = ((1.0 - spec.mu) * degrees[v] as f64 / label_count[v] as f64).ceil() as usize;
        tokens.extend(std::iter::repeat_n((v, per), label_count[v]));
    }
    tokens.sort_by_key(|t| std::cmp::Reverse(t.1));
    let members = assign_memberships(&sizes, &tokens, n, &mut rng)?;

    let mut of_node: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, m) in members.iter().enumerate() {
        for &v in m {
            of_node[v].push(c);
        }
    }

    // split each node's internal degree across its communities, capped by
    // what the community can host; the remainder goes outside
    let mut internal: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut external = vec![0usize; n];
    for v in 0..n {
        let k = degrees[v];
        let k_in = ((1.0 - spec.mu) * k as f64).round() as usize;
        let l = of_node[v].len();
        let mut hosted = 0;
        for (idx, &c) in of_node[v].iter().enumerate() {
            let share = k_in / l + usize::from(idx < k_in % l);
            let cap = members[c].len() - 1;
            let d = share.min(cap);
            internal[v].push(d);
            hosted += d;
        }
        external[v] = k - hosted;
    }

    let mut edge_set = HashSet::new();
    let mut edges = Vec::new();
    for (c, m) in members.iter().enumerate() {
        let mut stubs = Vec::new();
        for &v in m {
            let pos = of_node[v].iter().position(|&x| x == c).unwrap();
            stubs.extend(std::iter::repeat_n(v, internal[v][pos]));
        }
        match_stubs(stubs, &mut edge_set, &mut edges, &mut rng, |_, _| true);
    }
    let mut stubs = Vec::new();
    for v in 0..n {
        stubs.extend(std::iter::repeat_n(v, external[v]));
    }
    let share = |u: usize, v: usize| of_node[u].iter().any(|c| of_node[v].contains(c));
    match_stubs(stubs, &mut edge_set, &mut edges, &mut rng, |u, v| {
        !share(u, v)
    });

    let graph = Graph::from_edges(n, &edges);
    let cover = CommunityCover::new(n, members)?;
    Ok((graph, cover))
}

/// Fraction of each node's edges whose endpoints share a community,
/// averaged over nodes with at least one edge.
pub fn mean_internal_fraction(g: &Graph, cover: &CommunityCover) -> f64 {
    let of_node = cover.memberships();
    let mut sum = 0.0;
    let mut count = 0;
    for v in 0..g.node_count() {
        let deg = g.degree(v);
        if deg == 0 {
            continue;
        }
        let inside = g
            .neighbors(v)
            .iter()
            .filter(|&&u| of_node[v].iter().any(|c| of_node[u].contains(c)))
            .count();
        sum += inside as f64 / deg as f64;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gn_shape() {
        let (g, labels) = generate_gn(&GnSpec::new(6.0, 1)).unwrap();
        assert_eq!(g.node_count(), 128);
        assert_eq!(labels.num_clusters(), 4);
        let cover = CommunityCover::from_labeling(&labels);
        assert!(cover.communities().iter().all(|c| c.len() == 32));
    }

    #[test]
    fn gn_without_external_edges() {
        let (g, labels) = generate_gn(&GnSpec::new(0.0, 9)).unwrap();
        let l = labels.labels();
        assert!(g.edges().iter().all(|&(u, v)| l[u] == l[v]));
        assert!(g.edge_count() > 0);
    }

    #[test]
    fn gn_rejects_bad_zout() {
        assert!(generate_gn(&GnSpec::new(-1.0, 0)).is_err());
        assert!(generate_gn(&GnSpec::new(16.5, 0)).is_err());
    }

    #[test]
    fn gn_is_deterministic() {
        let a = generate_gn(&GnSpec::new(4.0, 3)).unwrap();
        let b = generate_gn(&GnSpec::new(4.0, 3)).unwrap();
        assert_eq!(a, b);
    }

    fn small_spec() -> OverlapSpec {
        OverlapSpec {
            n: 100,
            min_size: 10,
            max_size: 30,
            mu: 0.1,
            overlap_fraction: 0.3,
            memberships_per_overlap: 2,
            avg_degree: 10.0,
            max_degree: 20,
            gamma: 2.0,
            beta: 1.0,
            seed: 4,
        }
    }

    #[test]
    fn overlap_count_is_exact() {
        let (g, cover) = generate_planted_overlap(&small_spec()).unwrap();
        assert_eq!(g.node_count(), 100);
        let l = cover.label_counts();
        assert_eq!(l.iter().filter(|&&x| x == 2).count(), 30);
        assert_eq!(l.iter().filter(|&&x| x == 1).count(), 70);
        assert!(cover.outliers().is_empty());
        assert!(cover
            .communities()
            .iter()
            .all(|c| (10..=30).contains(&c.len())));
    }

    #[test]
    fn disjoint_limit() {
        let spec = OverlapSpec {
            mu: 0.0,
            overlap_fraction: 0.0,
            ..small_spec()
        };
        let (g, cover) = generate_planted_overlap(&spec).unwrap();
        assert!(cover.overlapping().is_empty());
        assert!((mean_internal_fraction(&g, &cover) - 1.0).abs() < 1e-12);
        let labels = cover.to_labeling().unwrap();
        assert!(g
            .edges()
            .iter()
            .all(|&(u, v)| labels.labels()[u] == labels.labels()[v]));
    }

    #[test]
    fn overlap_is_deterministic() {
        let a = generate_planted_overlap(&small_spec()).unwrap();
        let b = generate_planted_overlap(&small_spec()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_specs() {
        let spec = OverlapSpec {
            n: 12,
            min_size: 10,
            max_size: 11,
            avg_degree: 3.0,
            max_degree: 5,
            ..small_spec()
        };
        assert!(matches!(
            generate_planted_overlap(&spec),
            Err(Error::Infeasible(_))
        ));
        let spec = OverlapSpec {
            min_size: 2,
            ..small_spec()
        };
        assert!(generate_planted_overlap(&spec).is_err());
        let spec = OverlapSpec {
            mu: 1.0,
            ..small_spec()
        };
        assert!(generate_planted_overlap(&spec).is_err());
    }

    #[test]
    fn power_law_mean_target() {
        let k_min = min_degree_for_mean(20.0, 50, 2.0);
        let mean = DiscretePowerLaw::mean(k_min, 50, 2.0);
        assert!((mean - 20.0).abs() < 1.5, "k_min {k_min} mean {mean}");
    }
}
