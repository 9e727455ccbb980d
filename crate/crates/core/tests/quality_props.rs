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

use overlapnet::quality::partition_density;
use overlapnet::{CommunityCover, Graph};
use proptest::prelude::*;

fn clique_graph(sizes: &[usize], extra: &[(usize, usize)]) -> (Graph, CommunityCover) {
    let n: usize = sizes.iter().sum();
    let mut edges = Vec::new();
    let mut communities = Vec::new();
    let mut start = 0;
    for &s in sizes {
        let members: Vec<usize> = (start..start + s).collect();
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                edges.push((u, v));
            }
        }
        communities.push(members);
        start += s;
    }
    let mut pairs: Vec<(usize, usize)> = edges;
    pairs.extend(extra.iter().map(|&(u, v)| (u % n, v % n)));
    let (g, _) = Graph::from_pairs(n, pairs).unwrap();
    (g, CommunityCover::new(n, communities).unwrap())
}

fn random_instance() -> impl Strategy<Value = (Graph, CommunityCover)> {
    (4usize..20).prop_flat_map(|n| {
        (
            prop::collection::vec((0..n, 0..n), 0..60),
            prop::collection::vec(prop::collection::vec(0..n, 1..8), 1..5),
        )
            .prop_map(move |(pairs, comms)| {
                let (g, _) = Graph::from_pairs(n, pairs).unwrap();
                (g, CommunityCover::new(n, comms).unwrap())
            })
    })
}

proptest! {
    #[test]
    fn disjoint_cliques_score_one(
        sizes in prop::collection::vec(3usize..13, 1..7),
        extra in prop::collection::vec((0usize..1000, 0usize..1000), 0..30),
    ) {
        let (g, cover) = clique_graph(&sizes, &extra);
        let report = partition_density(&g, &cover).unwrap();
        prop_assert!((report.density - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn outliers_lower_density((g, cover) in random_instance()) {
        let report = partition_density(&g, &cover).unwrap();
        let n = g.node_count();
        let grown = Graph::from_edges(n + 1, g.edges());
        let same = CommunityCover::new(n + 1, cover.communities().to_vec()).unwrap();
        let after = partition_density(&grown, &same).unwrap();
        prop_assert_eq!(after.total_size, report.total_size + 1);
        if report.density > 0.0 {
            prop_assert!(after.density < report.density);
        }
    }

    #[test]
    fn internal_edges_never_hurt((g, cover) in random_instance(), pick in any::<prop::sample::Index>()) {
        let before = partition_density(&g, &cover).unwrap();
        let members = &cover.communities()[pick.index(cover.len())];
        let missing = members
            .iter()
            .enumerate()
            .flat_map(|(i, &u)| members[i + 1..].iter().map(move |&v| (u, v)))
            .find(|&(u, v)| !g.has_edge(u, v));
        prop_assume!(missing.is_some());
        let mut edges = g.edges().to_vec();
        edges.push(missing.unwrap());
        let denser = Graph::from_edges(g.node_count(), &edges);
        let after = partition_density(&denser, &cover).unwrap();
        prop_assert!(after.density >= before.density);
    }

    #[test]
    fn label_count_bounds((g, cover) in random_instance()) {
        let report = partition_density(&g, &cover).unwrap();
        let labels = cover.label_counts();
        for (entry, members) in report.per_community.iter().zip(cover.communities()) {
            prop_assert!(entry.q >= 1);
            let overlaps = members.iter().any(|&v| labels[v] > 1);
            prop_assert_eq!(entry.q == 1, !overlaps);
        }
        let summed: usize = cover.communities().iter().map(Vec::len).sum();
        prop_assert_eq!(report.total_size, summed + cover.outliers().len());
    }

    #[test]
    fn reordering_communities_keeps_density((g, cover) in random_instance()) {
        let report = partition_density(&g, &cover).unwrap();
        let mut reversed = cover.communities().to_vec();
        reversed.reverse();
        let other = CommunityCover::new(g.node_count(), reversed).unwrap();
        let again = partition_density(&g, &other).unwrap();
        prop_assert!((report.density - again.density).abs() <= 1e-12);
    }
}
