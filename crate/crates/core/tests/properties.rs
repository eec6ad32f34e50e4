// Copyright 2026 The rdfvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


use proptest::prelude::*;
use rdfvc_core::atomic::atomic_partition;
use rdfvc_core::delta::{apply, diff_partitions, Change};
use rdfvc_core::harness::gen::{gen_change, gen_dataset};
use rdfvc_core::merge::merge_three_way;
use rdfvc_core::rdf::{parse_nquads, BlankNode, Dataset};

fn relabel(d: &Dataset, salt: u64) -> Dataset {
    let mut out = Dataset::new();
    for q in d.iter() {
        out.insert(q.map_blank_nodes(|b| BlankNode::new(format!("z{salt}q{}", b.as_str())).unwrap()));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_bytes_ignore_blank_labels(seed in any::<u64>(), size in 1usize..120, salt in any::<u64>()) {
        let d = gen_dataset(seed, size, 0.5);
        let bytes = atomic_partition(&d).canonical_bytes();
        prop_assert_eq!(&bytes, &atomic_partition(&relabel(&d, salt)).canonical_bytes());
        let reparsed = parse_nquads(&bytes).unwrap();
        prop_assert_eq!(atomic_partition(&reparsed).canonical_bytes(), bytes);
    }

    #[test]
    fn diff_then_apply_reaches_target(seed in any::<u64>(), size in 1usize..80, add in 0usize..6, remove in 0usize..6) {
        prop_assume!(add + remove > 0);
        let d = gen_dataset(seed, size, 0.4);
        let from = atomic_partition(&d);
        let c = gen_change(seed.wrapping_add(1), &d, add, remove.min(from.len())).unwrap();
        let to = apply(&from, &c).unwrap();
        let derived = diff_partitions(&from, &to);
        prop_assert_eq!(&derived, &c);
        prop_assert_eq!(apply(&to, &derived.invert()).unwrap(), from);
        prop_assert_eq!(Change::from_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn three_way_is_symmetric_and_idempotent(seed in any::<u64>(), size in 1usize..80) {
        let d = gen_dataset(seed, size, 0.3);
        let base = atomic_partition(&d);
        let a = apply(&base, &gen_change(seed ^ 1, &d, 3, 1.min(base.len())).unwrap()).unwrap();
        let b = apply(&base, &gen_change(seed ^ 2, &d, 2, 2.min(base.len())).unwrap()).unwrap();
        prop_assert_eq!(merge_three_way(&base, &a, &b), merge_three_way(&base, &b, &a));
        prop_assert_eq!(merge_three_way(&base, &a, &a), a.clone());
        prop_assert_eq!(merge_three_way(&base, &base, &b), b.clone());
    }
}
