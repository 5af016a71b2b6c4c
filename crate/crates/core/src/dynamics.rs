//! Exhaustive enumeration of cylinder tilings, flip and trit moves, and flip
//! components.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plugfloor::{Floor, Plug, Tiling};
use crate::region::Disk;
use crate::transfer::{count_cylinder, FloorGraph, TransferSystem};
use crate::twist::Domino3;

pub const DEFAULT_ENUMERATION_BOUND: u64 = 50_000_000;

/// Bijection between cylinder tilings of height `N` and `0..total`.
///
/// Tilings are ordered lexicographically by their sequence of
/// `(upper plug index, floor index within the plug pair)`.
#[derive(Debug)]
pub struct TilingIndex<'a> {
    graph: &'a FloorGraph,
    n: usize,
    /// `w[k][p]`: completions from plug `p` after `k` floors.
    w: Vec<Vec<u64>>,
    /// `prefix[k][slot]`: tilings skipped by choosing a pair slot at step `k`.
    prefix: Vec<Vec<u64>>,
    row_slots: Vec<usize>,
    total: u64,
}

impl<'a> TilingIndex<'a> {
    pub fn new(ts: &'a TransferSystem, n: usize, bound: u64) -> Result<TilingIndex<'a>> {
        let graph = ts.graph();
        let dim = graph.plugs().len();
        let empty = graph.plugs().empty_index();
        let mut w = vec![vec![0u128; dim]; n + 1];
        w[n][empty] = 1;
        let too_large = || Error::EnumerationTooLarge {
            count: count_cylinder(ts, n).to_string(),
            bound,
        };
        for k in (0..n).rev() {
            for p in 0..dim {
                let mut s: u128 = 0;
                for (q, fl) in graph.successors(p) {
                    s += fl.len() as u128 * w[k + 1][q];
                }
                if s > bound as u128 {
                    // only counts reachable from the empty plug matter at step 0
                    s = bound as u128 + 1;
                }
                w[k][p] = s;
            }
        }
        if w[0][empty] > bound as u128 {
            return Err(too_large());
        }
        let w: Vec<Vec<u64>> = w
            .into_iter()
            .map(|row| row.into_iter().map(|x| x as u64).collect())
            .collect();
        let mut row_slots = Vec::with_capacity(dim + 1);
        row_slots.push(0);
        for p in 0..dim {
            row_slots.push(row_slots[p] + graph.row_len(p));
        }
        let mut prefix = Vec::with_capacity(n);
        for k in 0..n {
            let mut pre = Vec::with_capacity(row_slots[dim]);
            for p in 0..dim {
                let mut acc = 0u64;
                for (q, fl) in graph.successors(p) {
                    pre.push(acc);
                    acc = acc.saturating_add((fl.len() as u64).saturating_mul(w[k + 1][q]));
                }
            }
            prefix.push(pre);
        }
        Ok(TilingIndex {
            graph,
            n,
            total: w[0][empty],
            w,
            prefix,
            row_slots,
        })
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn height(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> &FloorGraph {
        self.graph
    }

    /// Floor choices `(upper plug index, local floor index)` of a rank.
    pub fn unrank(&self, mut r: u64) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n);
        let mut p = self.graph.plugs().empty_index();
        for k in 0..self.n {
            let lo = self.row_slots[p];
            let pre = &self.prefix[k][lo..self.row_slots[p + 1]];
            let slot = pre.partition_point(|&x| x <= r) - 1;
            r -= pre[slot];
            let q = self.graph.row_col(p, slot);
            let wq = self.w[k + 1][q];
            out.push((q, (r / wq) as usize));
            r %= wq;
            p = q;
        }
        out
    }

    pub fn rank(&self, code: &[(usize, usize)]) -> u64 {
        let mut p = self.graph.plugs().empty_index();
        let mut r = 0;
        for (k, &(q, j)) in code.iter().enumerate() {
            let slot = self.graph.row_slot(p, q).expect("floor links the plugs");
            r += self.prefix[k][self.row_slots[p] + slot] + j as u64 * self.w[k + 1][q];
            p = q;
        }
        r
    }

    /// Floor choices of an explicit tiling.
    pub fn encode(&self, t: &Tiling) -> Result<Vec<(usize, usize)>> {
        let d = self.graph.disk();
        let plugs = self.graph.plugs();
        let idx = |p: Plug| {
            plugs
                .index_of(p)
                .ok_or_else(|| Error::InvalidTiling(format!("{p} is not a plug")))
        };
        t.floors
            .iter()
            .map(|f| {
                let (a, b) = (idx(f.below)?, idx(f.above)?);
                let j = self
                    .graph
                    .local_index(a, b, f.edge_mask(d)?)
                    .ok_or_else(|| Error::InvalidTiling("unknown floor".into()))?;
                Ok((b, j))
            })
            .collect()
    }

    pub fn decode(&self, code: &[(usize, usize)]) -> Tiling {
        let mut p = self.graph.plugs().empty_index();
        let floors = code
            .iter()
            .map(|&(q, j)| {
                let f = self.graph.floor(p, q, j);
                p = q;
                f
            })
            .collect();
        Tiling { floors }
    }

    pub fn tiling(&self, r: u64) -> Tiling {
        self.decode(&self.unrank(r))
    }

    pub fn rank_of(&self, t: &Tiling) -> Result<u64> {
        Ok(self.rank(&self.encode(t)?))
    }

    /// Rank of a block, via its floors.
    pub fn rank_block(&self, b: &Block) -> u64 {
        let d = self.graph.disk();
        let plugs = self.graph.plugs();
        let mut p = plugs.empty_index();
        let mut code = Vec::with_capacity(self.n);
        for z in 0..self.n {
            let (above, mask) = b.layer(d, z);
            let q = plugs.index_of(above).expect("balanced layer");
            let j = self.graph.local_index(p, q, mask).expect("valid floor");
            code.push((q, j));
            p = q;
        }
        self.rank(&code)
    }
}

/// Every cylinder tiling of height `N`, in index order.
pub fn enumerate_tilings(ts: &TransferSystem, n: usize, bound: u64) -> Result<Vec<Tiling>> {
    let idx = TilingIndex::new(ts, n, bound)?;
    Ok((0..idx.len()).map(|r| idx.tiling(r)).collect())
}

/// Cylinder tiling as a cube-to-partner map over `D × [0, N]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    n_cells: usize,
    height: usize,
    partner: Vec<u32>,
}

/// In-plane steps `+x, -x, +y, -y` from each cell.
fn plane_steps(d: &Disk) -> Vec<[Option<usize>; 4]> {
    (0..d.n_cells())
        .map(|i| {
            let c = d.cell(i);
            [
                d.index_of(c.x + 1, c.y),
                d.index_of(c.x - 1, c.y),
                d.index_of(c.x, c.y + 1),
                d.index_of(c.x, c.y - 1),
            ]
        })
        .collect()
}

impl Block {
    pub fn from_tiling(d: &Disk, t: &Tiling) -> Block {
        let n = d.n_cells();
        let mut partner = vec![u32::MAX; n * t.height()];
        for (z, f) in t.floors.iter().enumerate() {
            for &(a, b) in &f.horizontals {
                partner[z * n + a] = (z * n + b) as u32;
                partner[z * n + b] = (z * n + a) as u32;
            }
            for c in f.above.cells() {
                partner[z * n + c] = ((z + 1) * n + c) as u32;
                partner[(z + 1) * n + c] = (z * n + c) as u32;
            }
        }
        Block {
            n_cells: n,
            height: t.height(),
            partner,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn cube(&self, d: &Disk, id: usize) -> [i64; 3] {
        let c = d.cell(id % self.n_cells);
        [c.x, c.y, (id / self.n_cells) as i64]
    }

    /// Upper plug and planar edge mask of layer `z`.
    pub fn layer(&self, d: &Disk, z: usize) -> (Plug, u64) {
        let n = self.n_cells;
        let mut above = 0u64;
        let mut mask = 0u64;
        for c in 0..n {
            let id = z * n + c;
            let p = self.partner[id] as usize;
            if p == id + n {
                above |= 1 << c;
            } else if p / n == z && c < p % n {
                mask |= 1 << d.edge_id(c, p % n).expect("adjacent cells");
            }
        }
        (Plug(above), mask)
    }

    pub fn to_tiling(&self, d: &Disk) -> Tiling {
        let mut below = Plug::EMPTY;
        let floors = (0..self.height)
            .map(|z| {
                let (above, mask) = self.layer(d, z);
                let f = Floor::from_edge_mask(d, below, above, mask);
                below = above;
                f
            })
            .collect();
        Tiling { floors }
    }

    /// Dominoes sorted with the white cube first; the canonical form.
    pub fn dominoes(&self, d: &Disk) -> Vec<Domino3> {
        let mut out: Vec<Domino3> = (0..self.partner.len())
            .filter(|&i| i < self.partner[i] as usize)
            .map(|i| Domino3::from_cubes(self.cube(d, i), self.cube(d, self.partner[i] as usize)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Neighbour of a cube one unit along axis 0, 1 or 2 in the positive direction.
    fn up(&self, steps: &[[Option<usize>; 4]], id: usize, axis: usize) -> Option<usize> {
        let n = self.n_cells;
        let (z, c) = (id / n, id % n);
        match axis {
            0 => steps[c][0].map(|c2| z * n + c2),
            1 => steps[c][2].map(|c2| z * n + c2),
            _ => (z + 1 < self.height).then_some(id + n),
        }
    }

    fn domino_axis(&self, d: &Disk, a: usize, b: usize) -> usize {
        let n = self.n_cells;
        if a / n != b / n {
            2
        } else if d.cell(a % n).y == d.cell(b % n).y {
            0
        } else {
            1
        }
    }

    /// Every tiling one flip away.
    pub fn flips(&self, d: &Disk) -> Vec<Block> {
        let steps = plane_steps(d);
        let mut out = Vec::new();
        for a in 0..self.partner.len() {
            let b = self.partner[a] as usize;
            if a > b {
                continue;
            }
            let axis = self.domino_axis(d, a, b);
            for other in (0..3).filter(|&x| x != axis) {
                let (Some(a2), Some(b2)) = (self.up(&steps, a, other), self.up(&steps, b, other))
                else {
                    continue;
                };
                if self.partner[a2] as usize == b2 {
                    let mut t = self.clone();
                    t.partner[a] = a2 as u32;
                    t.partner[a2] = a as u32;
                    t.partner[b] = b2 as u32;
                    t.partner[b2] = b as u32;
                    out.push(t);
                }
            }
        }
        out
    }

    /// Every tiling one trit away: a 2×2×2 cube minus two opposite corners
    /// whose six cubes are covered by three dominoes is retiled the other way.
    pub fn trits(&self, d: &Disk) -> Vec<Block> {
        let steps = plane_steps(d);
        let n = self.n_cells;
        let mut out = Vec::new();
        if self.height < 2 {
            return out;
        }
        for c in 0..n {
            let (Some(cx), Some(cy)) = (steps[c][0], steps[c][2]) else {
                continue;
            };
            let Some(cxy) = steps[cx][2] else { continue };
            let square = [c, cx, cy, cxy];
            for z in 0..self.height - 1 {
                // corner k has bits (x, y, z) = (k & 1, k >> 1 & 1, k >> 2)
                let id = |k: usize| (z + (k >> 2)) * n + square[k & 3];
                for corner in 0..4 {
                    let removed = [corner, 7 - corner];
                    // hexagon: walk the six remaining corners along cube edges
                    let inside: Vec<usize> = (0..8).filter(|k| !removed.contains(k)).collect();
                    let mut cycle = vec![inside[0]];
                    while cycle.len() < 6 {
                        let last = *cycle.last().unwrap();
                        let next = inside
                            .iter()
                            .copied()
                            .find(|&k| (k ^ last).count_ones() == 1 && !cycle.contains(&k))
                            .expect("hexagon is a cycle");
                        cycle.push(next);
                    }
                    let ids: Vec<usize> = cycle.iter().map(|&k| id(k)).collect();
                    let matched = |shift: usize| {
                        (0..3).all(|i| {
                            let a = ids[(2 * i + shift) % 6];
                            let b = ids[(2 * i + 1 + shift) % 6];
                            self.partner[a] as usize == b
                        })
                    };
                    let current = if matched(0) {
                        0
                    } else if matched(1) {
                        1
                    } else {
                        continue;
                    };
                    let mut t = self.clone();
                    for i in 0..3 {
                        let a = ids[(2 * i + 1 - current) % 6];
                        let b = ids[(2 * i + 2 - current) % 6];
                        t.partner[a] = b as u32;
                        t.partner[b] = a as u32;
                    }
                    out.push(t);
                }
            }
        }
        out
    }
}

/// Flip neighbours of a cylinder tiling, without duplicates.
pub fn flip_neighbors(d: &Disk, t: &Tiling) -> Vec<Tiling> {
    let mut seen = BTreeSet::new();
    Block::from_tiling(d, t)
        .flips(d)
        .into_iter()
        .filter(|b| seen.insert(b.partner.clone()))
        .map(|b| b.to_tiling(d))
        .collect()
}

/// Twist of a tiling from the per-floor cocycle of a transfer system.
pub fn cocycle_twist(ts: &TransferSystem, t: &Tiling) -> Result<i64> {
    let plugs = ts.plugs();
    let d = ts.disk();
    let mut total = 0;
    for f in &t.floors {
        let a = plugs
            .index_of(f.below)
            .ok_or_else(|| Error::InvalidTiling("bad plug".into()))?;
        let b = plugs
            .index_of(f.above)
            .ok_or_else(|| Error::InvalidTiling("bad plug".into()))?;
        let j = ts
            .graph()
            .local_index(a, b, f.edge_mask(d)?)
            .ok_or_else(|| Error::InvalidTiling("unknown floor".into()))?;
        total += ts.floor_value(a, b, j);
    }
    if total % ts.m() != 0 {
        return Err(Error::CocycleNotClosed {
            exponent: total,
            m: ts.m(),
        });
    }
    Ok(total / ts.m())
}

fn code_twist(ts: &TransferSystem, code: &[(usize, usize)]) -> i64 {
    let mut p = ts.plugs().empty_index();
    let mut total = 0;
    for &(q, j) in code {
        total += ts.floor_value(p, q, j);
        p = q;
    }
    total / ts.m()
}

/// Trit neighbours with the twist change `Tw(t') − Tw(t)`.
pub fn trit_neighbors(ts: &TransferSystem, t: &Tiling) -> Result<Vec<(Tiling, i64)>> {
    let d = ts.disk();
    let base = cocycle_twist(ts, t)?;
    let mut seen = BTreeSet::new();
    Block::from_tiling(d, t)
        .trits(d)
        .into_iter()
        .filter(|b| seen.insert(b.partner.clone()))
        .map(|b| {
            let t2 = b.to_tiling(d);
            let s = cocycle_twist(ts, &t2)? - base;
            Ok((t2, s))
        })
        .collect()
}

/// Union-find over tiling ranks.
#[derive(Debug, Clone)]
pub struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    pub fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentInfo {
    /// Smallest tiling rank in the component.
    pub first: u64,
    pub size: u64,
    pub twist: i64,
    pub max_vert: usize,
    /// Floor positions (from 0) at which some member has a vertical floor.
    pub vertical_positions: Vec<usize>,
    /// Number of members with no flip at all.
    pub flip_isolated: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentReport {
    pub height: usize,
    pub n_tilings: u64,
    /// Whether any component contained tilings of different twist.
    pub twist_constant: bool,
    pub flip_edges: u64,
    pub components: Vec<ComponentInfo>,
    /// Component sizes under flips and trits together, largest first.
    pub flip_trit_sizes: Option<Vec<u64>>,
    pub trit_edges: u64,
    /// Twist changes observed along trit edges, with multiplicity.
    pub trit_steps: BTreeMap<i64, u64>,
}

impl ComponentReport {
    /// `twist → number of tilings`.
    pub fn twist_histogram(&self) -> BTreeMap<i64, u64> {
        let mut h = BTreeMap::new();
        for c in &self.components {
            *h.entry(c.twist).or_insert(0) += c.size;
        }
        h
    }

    /// Fraction of ordered same-twist pairs lying in one flip component.
    pub fn same_twist_same_component(&self) -> f64 {
        let within: f64 = self
            .components
            .iter()
            .map(|c| (c.size as f64).powi(2))
            .sum();
        let total: f64 = self
            .twist_histogram()
            .values()
            .map(|&n| (n as f64).powi(2))
            .sum();
        within / total
    }

    /// Components with a vertical floor at some position `k` whose members
    /// never show one at `k ± 1`, although that position exists.
    pub fn immobile_vertical_components(&self) -> usize {
        self.components
            .iter()
            .filter(|c| {
                !c.vertical_positions.is_empty()
                    && self.height > 1
                    && c.vertical_positions.iter().all(|&k| {
                        !(k > 0 && c.vertical_positions.contains(&(k - 1)))
                            && !(k + 1 < self.height && c.vertical_positions.contains(&(k + 1)))
                    })
            })
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("first,twist,size,max_vert,fat\n");
        for c in &self.components {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                c.first,
                c.twist,
                c.size,
                c.max_vert,
                c.max_vert >= 1
            );
        }
        s
    }
}

/// Flip components of all cylinder tilings of height `N`.
pub fn components(
    ts: &TransferSystem,
    n: usize,
    with_trits: bool,
    bound: u64,
) -> Result<ComponentReport> {
    let idx = TilingIndex::new(ts, n, bound)?;
    let total = idx.len();
    if total > u32::MAX as u64 {
        return Err(Error::EnumerationTooLarge {
            count: total.to_string(),
            bound,
        });
    }
    let d = ts.disk();
    let mut flips = Dsu::new(total as usize);
    let mut both = with_trits.then(|| Dsu::new(total as usize));
    let mut twist = vec![0i64; total as usize];
    let mut vert_mask = vec![0u64; total as usize];
    let mut isolated = vec![false; total as usize];
    let mut flip_edges = 0u64;
    let mut trit_edges = 0u64;
    let mut trit_steps = BTreeMap::new();
    const CHUNK: u64 = 1 << 16;
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        type Row = (i64, u64, Vec<u64>, Vec<(u64, i64)>);
        let rows: Vec<Row> = (start..end)
            .into_par_iter()
            .map(|r| {
                let code = idx.unrank(r);
                let tw = code_twist(ts, &code);
                let t = idx.decode(&code);
                let vm = t
                    .floors
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| f.is_vertical())
                    .fold(0u64, |m, (k, _)| m | 1 << k);
                let b = Block::from_tiling(d, &t);
                let fl: Vec<u64> = b.flips(d).iter().map(|x| idx.rank_block(x)).collect();
                let tr: Vec<(u64, i64)> = if with_trits {
                    b.trits(d)
                        .iter()
                        .map(|x| {
                            let r2 = idx.rank_block(x);
                            (r2, code_twist(ts, &idx.unrank(r2)) - tw)
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                (tw, vm, fl, tr)
            })
            .collect();
        for (off, (tw, vm, fl, tr)) in rows.into_iter().enumerate() {
            let r = start + off as u64;
            twist[r as usize] = tw;
            vert_mask[r as usize] = vm;
            isolated[r as usize] = fl.is_empty();
            for &s in &fl {
                if s > r {
                    flip_edges += 1;
                }
                flips.union(r as u32, s as u32);
                if let Some(u) = both.as_mut() {
                    u.union(r as u32, s as u32);
                }
            }
            for &(s, step) in &tr {
                if s > r {
                    trit_edges += 1;
                    *trit_steps.entry(step).or_insert(0) += 1;
                }
                if let Some(u) = both.as_mut() {
                    u.union(r as u32, s as u32);
                }
            }
        }
        start = end;
    }
    let mut by_root: BTreeMap<u32, ComponentInfo> = BTreeMap::new();
    let mut twist_constant = true;
    let mut vpos: BTreeMap<u32, u64> = BTreeMap::new();
    for r in 0..total as u32 {
        let root = flips.find(r);
        let i = r as usize;
        let vert = vert_mask[i].count_ones() as usize;
        let e = by_root.entry(root).or_insert_with(|| ComponentInfo {
            first: r as u64,
            size: 0,
            twist: twist[i],
            max_vert: 0,
            vertical_positions: Vec::new(),
            flip_isolated: 0,
        });
        e.size += 1;
        e.max_vert = e.max_vert.max(vert);
        e.flip_isolated += isolated[i] as u64;
        if e.twist != twist[i] {
            twist_constant = false;
        }
        *vpos.entry(root).or_insert(0) |= vert_mask[i];
    }
    for (root, info) in by_root.iter_mut() {
        let m = vpos[root];
        info.vertical_positions = (0..n).filter(|k| m >> k & 1 == 1).collect();
    }
    let mut comps: Vec<ComponentInfo> = by_root.into_values().collect();
    comps.sort_by_key(|c| c.first);
    let flip_trit_sizes = both.map(|mut u| {
        let mut sizes: BTreeMap<u32, u64> = BTreeMap::new();
        for r in 0..total as u32 {
            *sizes.entry(u.find(r)).or_insert(0) += 1;
        }
        let mut v: Vec<u64> = sizes.into_values().collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    });
    Ok(ComponentReport {
        height: n,
        n_tilings: total,
        twist_constant,
        flip_edges,
        components: comps,
        flip_trit_sizes,
        trit_edges,
        trit_steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub twist: i64,
    pub components: usize,
    pub fat: usize,
    pub tilings: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub threshold: usize,
    pub rows: Vec<CensusRow>,
    /// Twist values with more than one fat component.
    pub violations: Vec<i64>,
}

/// Per twist value, how many components reach `vert ≥ threshold`.
pub fn fat_thin_census(report: &ComponentReport, threshold: usize) -> Census {
    let mut rows: BTreeMap<i64, CensusRow> = BTreeMap::new();
    for c in &report.components {
        let row = rows.entry(c.twist).or_insert(CensusRow {
            twist: c.twist,
            components: 0,
            fat: 0,
            tilings: 0,
        });
        row.components += 1;
        row.tilings += c.size;
        if c.max_vert >= threshold {
            row.fat += 1;
        }
    }
    let rows: Vec<CensusRow> = rows.into_values().collect();
    let violations = rows.iter().filter(|r| r.fat > 1).map(|r| r.twist).collect();
    Census {
        threshold,
        rows,
        violations,
    }
}

/// Tilings admitting no flip, by rank.
pub fn flip_isolated(ts: &TransferSystem, n: usize, bound: u64) -> Result<Vec<u64>> {
    let idx = TilingIndex::new(ts, n, bound)?;
    let d = ts.disk();
    Ok((0..idx.len())
        .into_par_iter()
        .filter(|&r| Block::from_tiling(d, &idx.tiling(r)).flips(d).is_empty())
        .collect())
}

/// Flip graph in GraphViz form, labelled by twist; for tiny instances.
pub fn flip_graph_dot(ts: &TransferSystem, n: usize, bound: u64) -> Result<String> {
    let idx = TilingIndex::new(ts, n, bound)?;
    let d = ts.disk();
    let mut s = String::from("graph flips {\n");
    for r in 0..idx.len() {
        let code = idx.unrank(r);
        let _ = writeln!(s, "  t{r} [label=\"{r}:{}\"];", code_twist(ts, &code));
        let b = Block::from_tiling(d, &idx.decode(&code));
        for x in b.flips(d) {
            let r2 = idx.rank_block(&x);
            if r2 > r {
                let _ = writeln!(s, "  t{r} -- t{r2};");
            }
        }
    }
    s.push_str("}\n");
    Ok(s)
}
