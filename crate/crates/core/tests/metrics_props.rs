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

use overlapnet::metrics::{gnmi, nmi};
use overlapnet::{CommunityCover, HardLabeling};
use proptest::prelude::*;

fn labeling_pair() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<usize>)> {
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(0usize..5, n),
            prop::collection::vec(0usize..5, n),
            Just(vec![0usize, 1, 2, 3, 4]).prop_shuffle(),
        )
    })
}

fn cover_pair() -> impl Strategy<Value = (CommunityCover, CommunityCover)> {
    (3usize..30).prop_flat_map(|n| {
        let comms = prop::collection::vec(prop::collection::vec(0..n, 1..12), 1..5);
        (comms.clone(), comms).prop_map(move |(a, b)| {
            (
                CommunityCover::new(n, a).unwrap(),
                CommunityCover::new(n, b).unwrap(),
            )
        })
    })
}

fn reordered(cover: &CommunityCover) -> CommunityCover {
    let mut comms = cover.communities().to_vec();
    comms.rotate_left(1);
    CommunityCover::new(cover.node_count(), comms).unwrap()
}

proptest! {
    #[test]
    fn nmi_properties((a, b, perm) in labeling_pair()) {
        let la = HardLabeling::from_raw(&a);
        let lb = HardLabeling::from_raw(&b);
        let ab = nmi(&la, &lb).unwrap();
        let ba = nmi(&lb, &la).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));

        let relabeled: Vec<usize> = a.iter().map(|&x| perm[x]).collect();
        let lr = HardLabeling::from_raw(&relabeled);
        prop_assert!((nmi(&lr, &lb).unwrap() - ab).abs() <= 1e-12);
        if la.num_clusters() >= 2 {
            prop_assert!((nmi(&la, &la).unwrap() - 1.0).abs() <= 1e-12);
            prop_assert!((nmi(&la, &lr).unwrap() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn gnmi_properties((a, b) in cover_pair()) {
        let ab = gnmi(&a, &b).unwrap();
        let ba = gnmi(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
        prop_assert!((gnmi(&reordered(&a), &b).unwrap() - ab).abs() <= 1e-12);
        prop_assert!((gnmi(&a, &reordered(&b)).unwrap() - ab).abs() <= 1e-12);
    }

    #[test]
    fn gnmi_self_score((a, _) in cover_pair()) {
        prop_assert!((gnmi(&a, &a).unwrap() - 1.0).abs() <= 1e-12);
    }
}
