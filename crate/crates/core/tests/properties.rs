use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;

use domino_cyl::dynamics::{cocycle_twist, Block};
use domino_cyl::plugfloor::DEFAULT_PLUG_BOUND;
use domino_cyl::region::Disk;
use domino_cyl::stats::SamplerState;
use domino_cyl::transfer::{count_cylinder, twist_polynomial, FloorGraph, TransferSystem};
use domino_cyl::twist::{
    tiling_twist, twist_change_quarters, BaseDirection, FloorCocycle, TwistKernel,
};

/// Perfect matchings of `cells × {0..n}` by backtracking.
fn brute_force(cells: &[(i64, i64)], n: i64) -> u64 {
    let mut sites = Vec::new();
    for z in 0..n {
        for &(x, y) in cells {
            sites.push((x, y, z));
        }
    }
    sites.sort_by_key(|&(x, y, z)| (z, y, x));
    let pos: HashMap<(i64, i64, i64), usize> =
        sites.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    fn go(
        i: usize,
        sites: &[(i64, i64, i64)],
        pos: &HashMap<(i64, i64, i64), usize>,
        used: &mut [bool],
    ) -> u64 {
        let Some(i) = (i..sites.len()).find(|&j| !used[j]) else {
            return 1;
        };
        let (x, y, z) = sites[i];
        let mut total = 0;
        for nb in [(x + 1, y, z), (x, y + 1, z), (x, y, z + 1)] {
            if let Some(&j) = pos.get(&nb) {
                if !used[j] {
                    used[i] = true;
                    used[j] = true;
                    total += go(i + 1, sites, pos, used);
                    used[i] = false;
                    used[j] = false;
                }
            }
        }
        total
    }
    go(0, &sites, &pos, &mut vec![false; sites.len()])
}

/// Subsets of the 3×4 grid that form valid disks.
fn small_disk() -> impl Strategy<Value = Disk> {
    (1u32..(1 << 12)).prop_filter_map("not a disk", |mask| {
        let cells: Vec<(i64, i64)> = (0..12)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ((i % 3) as i64, (i / 3) as i64))
            .collect();
        Disk::from_cells(cells).ok()
    })
}

fn system(d: &Disk, k: TwistKernel) -> TransferSystem {
    let g = Arc::new(FloorGraph::build(d, DEFAULT_PLUG_BOUND).unwrap());
    TransferSystem::from_graph(g, &FloorCocycle::PerFloorKernel(k)).unwrap()
}

fn kernel() -> TwistKernel {
    TwistKernel::reference(BaseDirection::PlusE1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transfer_count_matches_brute_force(d in small_disk(), n in 0usize..4) {
        let ts = system(&d, kernel());
        let cells: Vec<(i64, i64)> = d.cells().iter().map(|c| (c.x, c.y)).collect();
        prop_assert_eq!(count_cylinder(&ts, n), BigInt::from(brute_force(&cells, n as i64)));
    }

    #[test]
    fn polynomial_sums_to_count_and_is_palindromic(d in small_disk(), n in 0usize..5) {
        let ts = system(&d, kernel());
        let p = twist_polynomial(&ts, n).unwrap();
        prop_assert_eq!(p.sum(), count_cylinder(&ts, n));
        prop_assert_eq!(p.mirror(), p);
    }

    #[test]
    fn sampled_tilings_respect_twist_invariants(d in small_disk(), n in 1usize..5, seed in any::<u64>()) {
        let k = kernel();
        let ts = system(&d, k);
        let st = SamplerState::new(&ts, n, seed);
        prop_assume!(st.total() > &BigInt::from(0));
        for i in 0..4 {
            let t = st.sample(i);
            t.validate(&d).unwrap();
            let tw = tiling_twist(&k, &d, &t).unwrap();
            prop_assert_eq!(cocycle_twist(&ts, &t).unwrap(), tw);
            prop_assert_eq!(tiling_twist(&k, &d, &t.reversed()).unwrap(), -tw);
            let b = Block::from_tiling(&d, &t);
            let before = b.dominoes(&d);
            for f in b.flips(&d) {
                prop_assert_eq!(twist_change_quarters(&k, &before, &f.dominoes(&d)), 0);
            }
            let u = st.sample(i + 100);
            let joined = t.concat(&u).unwrap();
            prop_assert_eq!(tiling_twist(&k, &d, &joined).unwrap(), tw + tiling_twist(&k, &d, &u).unwrap());
        }
    }

    #[test]
    fn twist_does_not_depend_on_base_direction(d in small_disk(), n in 1usize..4, seed in any::<u64>()) {
        let k = kernel();
        let ts = system(&d, k);
        let st = SamplerState::new(&ts, n, seed);
        prop_assume!(st.total() > &BigInt::from(0));
        for i in 0..4 {
            let t = st.sample(i);
            let tw = tiling_twist(&k, &d, &t).unwrap();
            for u in BaseDirection::ALL {
                prop_assert_eq!(tiling_twist(&k.with_u(u), &d, &t).unwrap(), tw, "u = {}", u);
            }
        }
    }
}
