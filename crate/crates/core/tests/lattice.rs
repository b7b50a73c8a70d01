// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;

use sawlab_core::lattice::{count_half_space, count_saps, BridgeTable, HalfSpaceSampler};
use sawlab_core::rng::substream;

fn naive_half_space(n: usize) -> u64 {
    fn go(path: &mut Vec<(i32, i32)>, left: usize) -> u64 {
        if left == 0 {
            return 1;
        }
        let p = *path.last().unwrap();
        let mut total = 0;
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let q = (p.0 + dx, p.1 + dy);
            if q.0 > 0 && !path.contains(&q) {
                path.push(q);
                total += go(path, left - 1);
                path.pop();
            }
        }
        total
    }
    go(&mut vec![(0, 0)], n)
}

#[test]
fn half_space_counts_match_plain_enumeration() {
    for n in 1..=9 {
        assert_eq!(count_half_space(n, 2).unwrap(), naive_half_space(n), "n = {n}");
    }
}

#[test]
fn small_polygons() {
    let s4 = count_saps(4).unwrap();
    assert_eq!((s4.rooted, s4.classes), (8, 1));
    let s6 = count_saps(6).unwrap();
    assert_eq!((s6.rooted, s6.classes), (24, 2));
    let s8 = count_saps(8).unwrap();
    assert_eq!(s8.classes, 7);
}

#[test]
fn sampler_draws_half_space_saws() {
    let sampler = HalfSpaceSampler::new(BridgeTable::build(10, 2).unwrap()).unwrap();
    for i in 0..200 {
        let w = sampler.sample(60, &mut substream(9, i));
        let pts = w.points();
        assert!((61..71).contains(&pts.len()), "whole bridges overshoot by less than K");
        let sites: HashSet<Vec<i32>> = pts.iter().map(|p| p.coords().to_vec()).collect();
        assert_eq!(sites.len(), pts.len(), "walk {i} intersects itself");
        assert!(pts[1..].iter().all(|p| p.first() > 0));
        assert!(pts.windows(2).all(|s| s[0].l1_distance(&s[1]) == 1));
    }
}
