//! Plugs, floors and cylinder tilings as floor sequences.
//!
//! A plug is a balanced set of cells, stored as a bitset over the disk's
//! column-major cell order. A floor `(p0, f*, p1)` is one layer of a tiling:
//! `p0` marks vertical dominoes arriving from below, `p1` those leaving
//! upwards, and `f*` tiles the remaining cells with planar dominoes.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::{Color, Disk};
use crate::twist::Domino3;

pub const DEFAULT_PLUG_BOUND: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Plug(pub u64);

impl Plug {
    pub const EMPTY: Plug = Plug(0);

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, cell: usize) -> bool {
        self.0 >> cell & 1 == 1
    }

    pub fn is_disjoint(self, other: Plug) -> bool {
        self.0 & other.0 == 0
    }

    pub fn to_hex(self) -> String {
        format!("{:#x}", self.0)
    }

    pub fn from_hex(s: &str) -> Result<Plug> {
        let digits = s.trim_start_matches("0x").trim_start_matches("0X");
        u64::from_str_radix(digits, 16)
            .map(Plug)
            .map_err(|e| Error::InvalidInput(format!("bad plug {s:?}: {e}")))
    }

    pub fn cells(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |i| bits >> i & 1 == 1)
    }
}

impl fmt::Display for Plug {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

fn check_disk_size(d: &Disk) -> Result<()> {
    if d.n_cells() > 64 || d.edges().len() > 64 {
        return Err(Error::DiskTooLarge {
            cells: d.n_cells(),
            edges: d.edges().len(),
        });
    }
    Ok(())
}

/// All plugs of a disk, sorted by bitset value (so the empty plug is first).
#[derive(Debug, Clone)]
pub struct PlugTable {
    plugs: Vec<Plug>,
    full: Plug,
}

impl PlugTable {
    pub fn len(&self) -> usize {
        self.plugs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plugs.is_empty()
    }

    pub fn get(&self, index: usize) -> Plug {
        self.plugs[index]
    }

    pub fn plugs(&self) -> &[Plug] {
        &self.plugs
    }

    pub fn index_of(&self, p: Plug) -> Option<usize> {
        self.plugs.binary_search(&p).ok()
    }

    pub fn empty_index(&self) -> usize {
        0
    }

    pub fn full_plug(&self) -> Plug {
        self.full
    }

    pub fn full_index(&self) -> usize {
        self.index_of(self.full).expect("full plug is balanced")
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Every balanced subset of the disk, in increasing bitset order.
pub fn enumerate_plugs(d: &Disk, bound: usize) -> Result<PlugTable> {
    check_disk_size(d)?;
    let n = d.n_cells() as u64;
    let size = binomial(n, n / 2);
    if size > bound as u128 {
        return Err(Error::TableTooLarge {
            size,
            bound: bound as u128,
        });
    }
    let whites: Vec<usize> = Plug(d.white_mask()).cells().collect();
    let blacks: Vec<usize> = Plug(d.black_mask()).cells().collect();
    let subsets = |cells: &[usize]| -> Vec<Vec<u64>> {
        let mut by_size = vec![Vec::new(); cells.len() + 1];
        for m in 0u64..(1u64 << cells.len()) {
            let bits = cells
                .iter()
                .enumerate()
                .filter(|(j, _)| m >> j & 1 == 1)
                .fold(0u64, |acc, (_, &c)| acc | 1 << c);
            by_size[m.count_ones() as usize].push(bits);
        }
        by_size
    };
    let ws = subsets(&whites);
    let bs = subsets(&blacks);
    let mut plugs = Vec::with_capacity(size as usize);
    for k in 0..ws.len() {
        for &w in &ws[k] {
            for &b in &bs[k] {
                plugs.push(Plug(w | b));
            }
        }
    }
    plugs.sort_unstable();
    Ok(PlugTable {
        plugs,
        full: Plug(d.full_mask()),
    })
}

/// Whether a set of cells has as many white as black cells.
pub fn is_balanced(d: &Disk, p: Plug) -> bool {
    (p.0 & d.white_mask()).count_ones() == (p.0 & d.black_mask()).count_ones()
}

/// Number of planar domino tilings of `D \ (p0 ∪ p1)`; zero when the plugs overlap.
///
/// Broken-profile dynamic programming over the bounding box in column-major
/// order: the state records which of the next `h` positions are already covered.
pub fn count_floor_tilings(d: &Disk, p0: Plug, p1: Plug) -> u64 {
    if !p0.is_disjoint(p1) {
        return 0;
    }
    count_region_tilings(d, d.full_mask() & !(p0.0 | p1.0))
}

pub(crate) fn count_region_tilings(d: &Disk, free: u64) -> u64 {
    if free == 0 {
        return 1;
    }
    let (min_x, max_x, min_y, max_y) = d.bounds();
    let h = (max_y - min_y + 1) as u32;
    let is_free = |x: i64, y: i64| -> bool {
        d.index_of(x, y)
            .map(|i| free >> i & 1 == 1)
            .unwrap_or(false)
    };
    let mut states: HashMap<u128, u64> = HashMap::from([(0u128, 1u64)]);
    for x in min_x..=max_x {
        for y in min_y..=max_y {
            let mut next: HashMap<u128, u64> = HashMap::with_capacity(states.len() * 2);
            let here = is_free(x, y);
            for (&mask, &ways) in &states {
                if mask & 1 == 1 || !here {
                    *next.entry(mask >> 1).or_default() += ways;
                    continue;
                }
                if y < max_y && mask & 2 == 0 && is_free(x, y + 1) {
                    *next.entry((mask | 2) >> 1).or_default() += ways;
                }
                if x < max_x && is_free(x + 1, y) {
                    *next.entry((mask | 1u128 << h) >> 1).or_default() += ways;
                }
            }
            states = next;
        }
    }
    states.get(&0).copied().unwrap_or(0)
}

/// Planar tilings of a cell set as edge-id bitmasks, sorted increasingly.
pub(crate) fn region_tilings(d: &Disk, free: u64) -> Vec<u64> {
    fn rec(d: &Disk, free: u64, acc: u64, out: &mut Vec<u64>) {
        if free == 0 {
            out.push(acc);
            return;
        }
        let i = free.trailing_zeros() as usize;
        for &j in d.neighbors(i) {
            if free >> j & 1 == 1 {
                let e = d.edge_id(i, j).expect("neighbors share an edge");
                rec(d, free & !(1 << i) & !(1 << j), acc | 1 << e, out);
            }
        }
    }
    let mut out = Vec::new();
    rec(d, free, 0, &mut out);
    out.sort_unstable();
    out
}

/// One layer of a tiling.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Floor {
    pub below: Plug,
    pub above: Plug,
    /// Planar dominoes as `(white cell, black cell)`, sorted.
    pub horizontals: Vec<(usize, usize)>,
}

impl Floor {
    pub fn from_edge_mask(d: &Disk, below: Plug, above: Plug, mask: u64) -> Floor {
        let mut horizontals: Vec<(usize, usize)> = (0..d.edges().len())
            .filter(|e| mask >> e & 1 == 1)
            .map(|e| {
                let (a, b) = d.edges()[e];
                if d.cell(a).color == Color::White {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        horizontals.sort_unstable();
        Floor {
            below,
            above,
            horizontals,
        }
    }

    pub fn edge_mask(&self, d: &Disk) -> Result<u64> {
        self.horizontals.iter().try_fold(0u64, |m, &(a, b)| {
            d.edge_id(a, b)
                .map(|e| m | 1 << e)
                .ok_or_else(|| Error::InvalidTiling(format!("cells {a} and {b} are not adjacent")))
        })
    }

    pub fn is_vertical(&self) -> bool {
        self.horizontals.is_empty()
    }

    /// The same floor traversed downwards.
    pub fn reversed(&self) -> Floor {
        Floor {
            below: self.above,
            above: self.below,
            horizontals: self.horizontals.clone(),
        }
    }

    /// Checks disjointness and exact cover of `D \ (below ∪ above)`.
    pub fn validate(&self, d: &Disk) -> Result<()> {
        if !self.below.is_disjoint(self.above) {
            return Err(Error::InvalidTiling("floor plugs overlap".into()));
        }
        let mut covered = self.below.0 | self.above.0;
        for &(a, b) in &self.horizontals {
            if d.edge_id(a, b).is_none() {
                return Err(Error::InvalidTiling(format!("cells {a}, {b} not adjacent")));
            }
            let bits = 1u64 << a | 1u64 << b;
            if covered & bits != 0 {
                return Err(Error::InvalidTiling(format!("domino ({a},{b}) overlaps")));
            }
            covered |= bits;
        }
        if covered != d.full_mask() {
            return Err(Error::InvalidTiling("floor does not cover the disk".into()));
        }
        Ok(())
    }
}

/// All floors `(p0, f*, p1)`, ordered by their edge bitmask; empty when the plugs overlap.
pub fn enumerate_floor_tilings(d: &Disk, p0: Plug, p1: Plug) -> impl Iterator<Item = Floor> + '_ {
    let masks = if p0.is_disjoint(p1) {
        region_tilings(d, d.full_mask() & !(p0.0 | p1.0))
    } else {
        Vec::new()
    };
    masks
        .into_iter()
        .map(move |m| Floor::from_edge_mask(d, p0, p1, m))
}

/// A tiling of a cork `R_{0,N;p0,pN}` as a sequence of compatible floors.
/// Cylinder tilings have both boundary plugs empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tiling {
    pub floors: Vec<Floor>,
}

impl Tiling {
    pub fn new(floors: Vec<Floor>) -> Result<Tiling> {
        for w in floors.windows(2) {
            if w[0].above != w[1].below {
                return Err(Error::InvalidTiling(
                    "consecutive floors disagree on their shared plug".into(),
                ));
            }
        }
        Ok(Tiling { floors })
    }

    pub fn height(&self) -> usize {
        self.floors.len()
    }

    /// `(p0, pN)`; an empty tiling reports the empty plug at both ends.
    pub fn boundary(&self) -> (Plug, Plug) {
        match (self.floors.first(), self.floors.last()) {
            (Some(a), Some(b)) => (a.below, b.above),
            _ => (Plug::EMPTY, Plug::EMPTY),
        }
    }

    /// `p0, p1, …, pN`.
    pub fn plugs(&self) -> Vec<Plug> {
        let mut out = vec![self.boundary().0];
        out.extend(self.floors.iter().map(|f| f.above));
        out
    }

    pub fn is_cylinder(&self) -> bool {
        self.boundary() == (Plug::EMPTY, Plug::EMPTY)
    }

    /// Number of floors with no planar dominoes.
    pub fn vert(&self) -> usize {
        self.floors.iter().filter(|f| f.is_vertical()).count()
    }

    /// All-vertical cylinder tiling of even height.
    pub fn vertical(d: &Disk, height: usize) -> Result<Tiling> {
        if height % 2 == 1 {
            return Err(Error::InvalidInput(
                "vertical tilings need even height".into(),
            ));
        }
        let full = Plug(d.full_mask());
        let floors = (0..height)
            .map(|k| {
                let (below, above) = if k % 2 == 0 {
                    (Plug::EMPTY, full)
                } else {
                    (full, Plug::EMPTY)
                };
                Floor {
                    below,
                    above,
                    horizontals: Vec::new(),
                }
            })
            .collect();
        Ok(Tiling { floors })
    }

    /// `self ∗ other`: `other` stacked on top of `self`.
    pub fn concat(&self, other: &Tiling) -> Result<Tiling> {
        let mut floors = self.floors.clone();
        floors.extend(other.floors.iter().cloned());
        Tiling::new(floors)
    }

    /// The tiling read from top to bottom.
    pub fn reversed(&self) -> Tiling {
        Tiling {
            floors: self.floors.iter().rev().map(Floor::reversed).collect(),
        }
    }

    pub fn validate(&self, d: &Disk) -> Result<()> {
        for f in &self.floors {
            f.validate(d)?;
        }
        Tiling::new(self.floors.clone()).map(|_| ())
    }

    /// The explicit 3D dominoes; floor `k` (from 1) occupies `z = k - 1`.
    /// Boundary plug cells of a cork are holes and carry no domino.
    pub fn dominoes(&self, d: &Disk) -> Vec<Domino3> {
        let mut out = Vec::new();
        for (k, f) in self.floors.iter().enumerate() {
            let z = k as i64;
            for &(a, b) in &f.horizontals {
                let (ca, cb) = (d.cell(a), d.cell(b));
                out.push(Domino3::from_cubes([ca.x, ca.y, z], [cb.x, cb.y, z]));
            }
            if k + 1 < self.floors.len() {
                for c in f.above.cells() {
                    let cell = d.cell(c);
                    out.push(Domino3::from_cubes(
                        [cell.x, cell.y, z],
                        [cell.x, cell.y, z + 1],
                    ));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> TilingJson {
        let (p0, pn) = self.boundary();
        TilingJson {
            height: self.height(),
            boundary: [p0.to_hex(), pn.to_hex()],
            floors: self.floors.iter().map(FloorJson::from).collect(),
        }
    }

    pub fn from_json(j: &TilingJson) -> Result<Tiling> {
        let floors = j
            .floors
            .iter()
            .map(Floor::try_from)
            .collect::<Result<Vec<_>>>()?;
        let t = Tiling::new(floors)?;
        if t.height() != j.height {
            return Err(Error::InvalidInput(
                "height disagrees with floor count".into(),
            ));
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorJson {
    pub below: String,
    pub above: String,
    pub horizontals: Vec<[usize; 2]>,
}

impl From<&Floor> for FloorJson {
    fn from(f: &Floor) -> FloorJson {
        FloorJson {
            below: f.below.to_hex(),
            above: f.above.to_hex(),
            horizontals: f.horizontals.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl TryFrom<&FloorJson> for Floor {
    type Error = Error;
    fn try_from(j: &FloorJson) -> Result<Floor> {
        let mut horizontals: Vec<(usize, usize)> =
            j.horizontals.iter().map(|&[a, b]| (a, b)).collect();
        horizontals.sort_unstable();
        Ok(Floor {
            below: Plug::from_hex(&j.below)?,
            above: Plug::from_hex(&j.above)?,
            horizontals,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingJson {
    pub height: usize,
    pub boundary: [String; 2],
    pub floors: Vec<FloorJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::parse_disk;

    fn brute_force_plugs(d: &Disk) -> usize {
        (0u64..1 << d.n_cells())
            .filter(|&m| is_balanced(d, Plug(m)))
            .count()
    }

    /// Perfect matchings of the free cells by exhaustive search over edge subsets.
    fn brute_force_matchings(d: &Disk, free: u64) -> u64 {
        let edges: Vec<_> = d
            .edges()
            .iter()
            .filter(|(a, b)| free >> a & 1 == 1 && free >> b & 1 == 1)
            .collect();
        let mut count = 0;
        for s in 0u64..1 << edges.len() {
            let mut covered = 0u64;
            let mut ok = true;
            for (k, (a, b)) in edges.iter().enumerate() {
                if s >> k & 1 == 1 {
                    let bits = 1 << a | 1 << b;
                    if covered & bits != 0 {
                        ok = false;
                        break;
                    }
                    covered |= bits;
                }
            }
            if ok && covered == free {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn plug_counts() {
        let d22 = Disk::rectangle(2, 2).unwrap();
        let d23 = Disk::rectangle(2, 3).unwrap();
        let d44 = Disk::rectangle(4, 4).unwrap();
        assert_eq!(brute_force_plugs(&d22), 6);
        assert_eq!(brute_force_plugs(&d23), 20);
        assert_eq!(brute_force_plugs(&d44), 12870);
        assert_eq!(enumerate_plugs(&d22, DEFAULT_PLUG_BOUND).unwrap().len(), 6);
        assert_eq!(enumerate_plugs(&d23, DEFAULT_PLUG_BOUND).unwrap().len(), 20);
        let t = enumerate_plugs(&d44, DEFAULT_PLUG_BOUND).unwrap();
        assert_eq!(t.len(), 12870);
        assert_eq!(t.get(0), Plug::EMPTY);
        assert!(t.plugs().windows(2).all(|w| w[0] < w[1]));
        assert!(t.plugs().iter().all(|&p| is_balanced(&d44, p)));
        assert_eq!(t.get(t.full_index()), Plug(0xffff));
    }

    #[test]
    fn plug_bound() {
        let d = Disk::rectangle(4, 4).unwrap();
        assert!(matches!(
            enumerate_plugs(&d, 1000),
            Err(Error::TableTooLarge { size: 12870, .. })
        ));
    }

    #[test]
    fn floor_counts() {
        let d = Disk::rectangle(2, 2).unwrap();
        assert_eq!(count_floor_tilings(&d, Plug::EMPTY, Plug::EMPTY), 2);
        assert_eq!(count_floor_tilings(&d, Plug::EMPTY, Plug(d.full_mask())), 1);
        // one white-black adjacent pair on both sides overlaps
        let pair = Plug(0b0011);
        assert!(is_balanced(&d, pair));
        assert_eq!(count_floor_tilings(&d, pair, pair), 0);

        let d44 = Disk::rectangle(4, 4).unwrap();
        assert_eq!(count_floor_tilings(&d44, Plug::EMPTY, Plug::EMPTY), 36);
        assert_eq!(count_floor_tilings(&d44, Plug(0xffff), Plug::EMPTY), 1);
    }

    #[test]
    fn floor_enumeration() {
        let d = Disk::rectangle(2, 2).unwrap();
        let floors: Vec<_> = enumerate_floor_tilings(&d, Plug::EMPTY, Plug::EMPTY).collect();
        assert_eq!(floors.len(), 2);
        assert_ne!(floors[0], floors[1]);
        let v: Vec<_> = enumerate_floor_tilings(&d, Plug::EMPTY, Plug(d.full_mask())).collect();
        assert_eq!(v.len(), 1);
        assert!(v[0].is_vertical());
        let d23 = Disk::rectangle(2, 3).unwrap();
        assert_eq!(
            enumerate_floor_tilings(&d23, Plug::EMPTY, Plug::EMPTY).count(),
            3
        );
    }

    #[test]
    fn dp_matches_brute_force_on_small_disks() {
        for text in [
            "##\n##\n",
            "##\n##\n##\n",
            "##\n####\n",
            "#\n#\n#\n###\n",
            "####\n####\n",
        ] {
            let d = parse_disk(text).unwrap();
            let table = enumerate_plugs(&d, DEFAULT_PLUG_BOUND).unwrap();
            for &p0 in table.plugs() {
                let mut per_row = 0;
                for &p1 in table.plugs() {
                    let n = count_floor_tilings(&d, p0, p1);
                    assert_eq!(n, count_floor_tilings(&d, p1, p0));
                    let listed: Vec<_> = enumerate_floor_tilings(&d, p0, p1).collect();
                    assert_eq!(listed.len() as u64, n);
                    for f in &listed {
                        f.validate(&d).unwrap();
                    }
                    if p0.is_disjoint(p1) {
                        let free = d.full_mask() & !(p0.0 | p1.0);
                        assert_eq!(n, brute_force_matchings(&d, free), "{p0} {p1}");
                    }
                    per_row += n;
                }
                // floors with below = p0: assign each free cell to above or a planar domino
                let free = d.full_mask() & !p0.0;
                let direct: u64 = (0u64..1 << d.n_cells())
                    .filter(|&s| s & !free == 0 && is_balanced(&d, Plug(s)))
                    .map(|s| brute_force_matchings(&d, free & !s))
                    .sum();
                assert_eq!(per_row, direct);
            }
        }
    }

    #[test]
    fn tiling_json_roundtrip() {
        let d = Disk::rectangle(2, 2).unwrap();
        let f1: Vec<_> = enumerate_floor_tilings(&d, Plug::EMPTY, Plug::EMPTY).collect();
        let t = Tiling::new(vec![f1[0].clone(), f1[1].clone()]).unwrap();
        let j = serde_json::to_string(&t.to_json()).unwrap();
        let back = Tiling::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, t);
        assert!(j.contains("\"0x0\""));
    }

    #[test]
    fn vertical_tiling() {
        let d = Disk::rectangle(2, 3).unwrap();
        let t = Tiling::vertical(&d, 4).unwrap();
        t.validate(&d).unwrap();
        assert!(t.is_cylinder());
        assert_eq!(t.vert(), 4);
        assert_eq!(t.dominoes(&d).len(), 12);
        assert!(Tiling::vertical(&d, 3).is_err());
    }
}
