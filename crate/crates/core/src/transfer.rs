//! Transfer matrices `A` and `α`, cylinder and cork counts, and the twist
//! polynomial `P_N(q)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{LaurentPoly, PlugMatrix};
use crate::error::{Error, Result};
use crate::plugfloor::{enumerate_plugs, is_balanced, region_tilings, Floor, Plug, PlugTable};
use crate::region::Disk;
use crate::twist::FloorCocycle;

/// Every floor of a disk, grouped by plug pair.
///
/// Rows are indexed by the lower plug; within a row the upper plugs are
/// increasing and each pair lists its floors by increasing edge mask.
#[derive(Debug, Clone)]
pub struct FloorGraph {
    disk: Disk,
    plugs: PlugTable,
    row_ptr: Vec<usize>,
    pair_col: Vec<u32>,
    pair_ptr: Vec<usize>,
    masks: Vec<u64>,
}

impl FloorGraph {
    pub fn build(d: &Disk, plug_bound: usize) -> Result<FloorGraph> {
        let plugs = enumerate_plugs(d, plug_bound)?;
        let full = d.full_mask();
        let rows: Vec<Vec<(u32, Vec<u64>)>> = plugs
            .plugs()
            .par_iter()
            .map(|&p0| {
                let comp = full & !p0.bits();
                let mut row = Vec::new();
                // submasks of comp in increasing order
                let mut s = 0u64;
                loop {
                    if is_balanced(d, Plug(s)) {
                        let fl = region_tilings(d, comp & !s);
                        if !fl.is_empty() {
                            let idx = plugs.index_of(Plug(s)).expect("balanced subset is a plug");
                            row.push((idx as u32, fl));
                        }
                    }
                    if s == comp {
                        break;
                    }
                    s = (s.wrapping_sub(comp)) & comp;
                }
                row
            })
            .collect();
        let mut row_ptr = vec![0];
        let mut pair_col = Vec::new();
        let mut pair_ptr = vec![0];
        let mut masks = Vec::new();
        for row in rows {
            for (c, fl) in row {
                pair_col.push(c);
                masks.extend(fl);
                pair_ptr.push(masks.len());
            }
            row_ptr.push(pair_col.len());
        }
        Ok(FloorGraph {
            disk: d.clone(),
            plugs,
            row_ptr,
            pair_col,
            pair_ptr,
            masks,
        })
    }

    pub fn disk(&self) -> &Disk {
        &self.disk
    }

    pub fn plugs(&self) -> &PlugTable {
        &self.plugs
    }

    pub fn n_floors(&self) -> usize {
        self.masks.len()
    }

    /// `(p1 index, floor masks)` for every `p1` reachable from `p0` in one floor.
    pub fn successors(&self, p0: usize) -> impl Iterator<Item = (usize, &[u64])> + '_ {
        (self.row_ptr[p0]..self.row_ptr[p0 + 1]).map(move |k| {
            (
                self.pair_col[k] as usize,
                &self.masks[self.pair_ptr[k]..self.pair_ptr[k + 1]],
            )
        })
    }

    pub fn row_len(&self, p0: usize) -> usize {
        self.row_ptr[p0 + 1] - self.row_ptr[p0]
    }

    /// Upper plug of the `slot`-th pair in row `p0`.
    pub fn row_col(&self, p0: usize, slot: usize) -> usize {
        self.pair_col[self.row_ptr[p0] + slot] as usize
    }

    /// Position of `p1` within row `p0`.
    pub fn row_slot(&self, p0: usize, p1: usize) -> Option<usize> {
        self.pair_slot(p0, p1).map(|k| k - self.row_ptr[p0])
    }

    fn pair_slot(&self, p0: usize, p1: usize) -> Option<usize> {
        let cols = &self.pair_col[self.row_ptr[p0]..self.row_ptr[p0 + 1]];
        cols.binary_search(&(p1 as u32))
            .ok()
            .map(|k| self.row_ptr[p0] + k)
    }

    /// Floor masks from `p0` to `p1`, increasing.
    pub fn floors(&self, p0: usize, p1: usize) -> &[u64] {
        match self.pair_slot(p0, p1) {
            Some(k) => &self.masks[self.pair_ptr[k]..self.pair_ptr[k + 1]],
            None => &[],
        }
    }

    /// Global floor index range of the pair `(p0, p1)`.
    pub fn floor_range(&self, p0: usize, p1: usize) -> std::ops::Range<usize> {
        match self.pair_slot(p0, p1) {
            Some(k) => self.pair_ptr[k]..self.pair_ptr[k + 1],
            None => 0..0,
        }
    }

    /// Position of a floor among the floors of its plug pair.
    pub fn local_index(&self, p0: usize, p1: usize, mask: u64) -> Option<usize> {
        self.floors(p0, p1).binary_search(&mask).ok()
    }

    pub fn floor(&self, p0: usize, p1: usize, local: usize) -> Floor {
        Floor::from_edge_mask(
            &self.disk,
            self.plugs.get(p0),
            self.plugs.get(p1),
            self.floors(p0, p1)[local],
        )
    }

    pub fn count(&self, p0: usize, p1: usize) -> u64 {
        self.floors(p0, p1).len() as u64
    }

    /// Adjacency matrix `A` with `A[p0][p1]` the number of floors.
    pub fn adjacency(&self) -> PlugMatrix<BigInt> {
        let mut trip = Vec::with_capacity(self.pair_col.len());
        for p0 in 0..self.plugs.len() {
            for (p1, fl) in self.successors(p0) {
                trip.push((p0, p1, BigInt::from(fl.len())));
            }
        }
        PlugMatrix::from_triplets(self.plugs.len(), trip)
    }

    /// Floating-point copy of `A` as row lists.
    pub fn adjacency_f64(&self) -> PlugMatrix<f64> {
        let mut trip = Vec::with_capacity(self.pair_col.len());
        for p0 in 0..self.plugs.len() {
            for (p1, fl) in self.successors(p0) {
                trip.push((p0, p1, fl.len() as f64));
            }
        }
        PlugMatrix::from_triplets(self.plugs.len(), trip)
    }
}

/// `α` entry stored compactly as `(q̃-exponent, multiplicity)` pairs.
type CompactEntry = Vec<(i64, u64)>;

/// Transfer data for one disk and one floor cocycle.
#[derive(Debug, Clone)]
pub struct TransferSystem {
    graph: Arc<FloorGraph>,
    m: i64,
    cocycle_kind: &'static str,
    a: PlugMatrix<BigInt>,
    alpha_rows: Vec<Vec<(usize, CompactEntry)>>,
    floor_values: Vec<i64>,
}

pub fn build_transfer(d: &Disk, cocycle: &FloorCocycle) -> Result<TransferSystem> {
    let graph = Arc::new(FloorGraph::build(d, crate::plugfloor::DEFAULT_PLUG_BOUND)?);
    TransferSystem::from_graph(graph, cocycle)
}

/// Column, compact `α` entry and per-floor values of one successor.
type RowEntry = (usize, CompactEntry, Vec<i64>);

impl TransferSystem {
    pub fn from_graph(graph: Arc<FloorGraph>, cocycle: &FloorCocycle) -> Result<TransferSystem> {
        let d = graph.disk().clone();
        let n = graph.plugs().len();
        let rows: Vec<Result<Vec<RowEntry>>> = (0..n)
            .into_par_iter()
            .map(|p0| {
                let below = graph.plugs().get(p0);
                graph
                    .successors(p0)
                    .map(|(p1, masks)| {
                        let above = graph.plugs().get(p1);
                        let vals = masks
                            .iter()
                            .map(|&mk| cocycle.value_raw(&d, below, above, mk))
                            .collect::<Result<Vec<i64>>>()?;
                        let mut entry: CompactEntry = Vec::new();
                        let mut sorted = vals.clone();
                        sorted.sort_unstable();
                        for e in sorted {
                            match entry.last_mut() {
                                Some((le, c)) if *le == e => *c += 1,
                                _ => entry.push((e, 1)),
                            }
                        }
                        Ok((p1, entry, vals))
                    })
                    .collect()
            })
            .collect();
        let mut alpha_rows = Vec::with_capacity(n);
        let mut floor_values = Vec::with_capacity(graph.n_floors());
        for row in rows {
            let row = row?;
            let mut out = Vec::with_capacity(row.len());
            for (p1, entry, vals) in row {
                floor_values.extend(vals);
                out.push((p1, entry));
            }
            alpha_rows.push(out);
        }
        Ok(TransferSystem {
            a: graph.adjacency(),
            graph,
            m: cocycle.m(),
            cocycle_kind: cocycle.kind_name(),
            alpha_rows,
            floor_values,
        })
    }

    pub fn graph(&self) -> &FloorGraph {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<FloorGraph> {
        Arc::clone(&self.graph)
    }

    pub fn disk(&self) -> &Disk {
        self.graph.disk()
    }

    pub fn plugs(&self) -> &PlugTable {
        self.graph.plugs()
    }

    pub fn dim(&self) -> usize {
        self.plugs().len()
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn cocycle_kind(&self) -> &'static str {
        self.cocycle_kind
    }

    pub fn a(&self) -> &PlugMatrix<BigInt> {
        &self.a
    }

    /// Cocycle values of all floors in graph order, in units of `1/m`.
    pub fn floor_values(&self) -> &[i64] {
        &self.floor_values
    }

    /// Cocycle value of one floor, in units of `1/m`.
    pub fn floor_value(&self, p0: usize, p1: usize, local: usize) -> i64 {
        self.floor_values[self.graph.floor_range(p0, p1).start + local]
    }

    /// `α` with Laurent entries in `q̃`.
    pub fn alpha(&self) -> PlugMatrix<LaurentPoly> {
        let mut trip = Vec::new();
        for (p0, row) in self.alpha_rows.iter().enumerate() {
            for (p1, entry) in row {
                let poly =
                    LaurentPoly::from_terms(entry.iter().map(|&(e, c)| (e, BigInt::from(c))));
                trip.push((p0, *p1, poly));
            }
        }
        PlugMatrix::from_triplets(self.dim(), trip)
    }

    /// `α` row `p0` as `(p1, [(exponent, multiplicity)])`.
    pub fn alpha_row(&self, p0: usize) -> &[(usize, Vec<(i64, u64)>)] {
        &self.alpha_rows[p0]
    }

    /// `A^N e_{p}` column.
    pub fn power_vector(&self, n: usize, from: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.dim()];
        v[from] = BigInt::one();
        for _ in 0..n {
            v = self.a_apply(&v);
        }
        v
    }

    /// `A v`.
    pub fn a_apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.dim())
            .into_par_iter()
            .map(|r| {
                let mut acc = BigInt::zero();
                for (c, w) in self.a.row(r) {
                    if !v[c].is_zero() {
                        acc += w * &v[c];
                    }
                }
                acc
            })
            .collect()
    }
}

pub fn count_cylinder(ts: &TransferSystem, n: usize) -> BigInt {
    let e = ts.plugs().empty_index();
    count_cork(ts, n, e, e)
}

/// `(A^N)[p0][pN]` by plug index.
pub fn count_cork(ts: &TransferSystem, n: usize, p0: usize, pn: usize) -> BigInt {
    ts.power_vector(n, pn)[p0].clone()
}

/// Laurent vector entry: dense coefficients from `lo` upward.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DenseLaurent {
    pub lo: i64,
    pub coeffs: Vec<BigInt>,
}

impl DenseLaurent {
    fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn to_poly(&self) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (self.lo + i as i64, c.clone())),
        )
    }
}

/// State of the propagation `w_k = α^k e_{p∘}`; serializable for checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Propagation {
    pub step: usize,
    pub entries: Vec<DenseLaurent>,
}

impl Propagation {
    pub fn start(ts: &TransferSystem) -> Propagation {
        let mut entries = vec![DenseLaurent::default(); ts.dim()];
        entries[ts.plugs().empty_index()] = DenseLaurent {
            lo: 0,
            coeffs: vec![BigInt::one()],
        };
        Propagation { step: 0, entries }
    }

    /// One multiplication by `α`.
    pub fn advance(&mut self, ts: &TransferSystem) {
        let v = &self.entries;
        let next: Vec<DenseLaurent> = (0..ts.dim())
            .into_par_iter()
            .map(|r| {
                let row = ts.alpha_row(r);
                let mut lo = i64::MAX;
                let mut hi = i64::MIN;
                for (c, entry) in row {
                    let src = &v[*c];
                    if src.is_empty() {
                        continue;
                    }
                    lo = lo.min(src.lo + entry[0].0);
                    hi = hi.max(src.hi() + entry[entry.len() - 1].0);
                }
                if lo > hi {
                    return DenseLaurent::default();
                }
                let mut out = vec![BigInt::zero(); (hi - lo + 1) as usize];
                for (c, entry) in row {
                    let src = &v[*c];
                    if src.is_empty() {
                        continue;
                    }
                    for &(e, mult) in entry {
                        let base = (src.lo + e - lo) as usize;
                        for (i, x) in src.coeffs.iter().enumerate() {
                            if x.is_zero() {
                                continue;
                            }
                            if mult == 1 {
                                out[base + i] += x;
                            } else {
                                out[base + i] += x * mult;
                            }
                        }
                    }
                }
                trim(lo, out)
            })
            .collect();
        self.entries = next;
        self.step += 1;
    }

    pub fn entry(&self, p: usize) -> LaurentPoly {
        self.entries[p].to_poly()
    }
}

fn trim(lo: i64, mut coeffs: Vec<BigInt>) -> DenseLaurent {
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    let skip = coeffs.iter().take_while(|c| c.is_zero()).count();
    if skip == coeffs.len() {
        return DenseLaurent::default();
    }
    coeffs.drain(..skip);
    DenseLaurent {
        lo: lo + skip as i64,
        coeffs,
    }
}

/// Rebases the empty-plug entry of a finished propagation into `q = q̃^m`.
pub fn finish_polynomial(ts: &TransferSystem, prop: &Propagation) -> Result<LaurentPoly> {
    let raw = prop.entry(ts.plugs().empty_index());
    raw.rebase(ts.m())
        .map_err(|exponent| Error::CocycleNotClosed {
            exponent,
            m: ts.m(),
        })
}

/// `P_N(q) = (α^N)[p∘][p∘]` rebased in `q = q̃^m`.
pub fn twist_polynomial(ts: &TransferSystem, n: usize) -> Result<LaurentPoly> {
    let mut prop = Propagation::start(ts);
    for _ in 0..n {
        prop.advance(ts);
    }
    finish_polynomial(ts, &prop)
}

/// `P_N` for every `N` in `0..=n_max`, from one propagation.
pub fn twist_polynomials(ts: &TransferSystem, n_max: usize) -> Result<Vec<LaurentPoly>> {
    let mut prop = Propagation::start(ts);
    let mut out = vec![finish_polynomial(ts, &prop)?];
    for _ in 0..n_max {
        prop.advance(ts);
        out.push(finish_polynomial(ts, &prop)?);
    }
    Ok(out)
}

/// The full matrix `α^N` in `q̃` (small disks only).
pub fn alpha_power(ts: &TransferSystem, n: usize) -> Result<PlugMatrix<LaurentPoly>> {
    let alpha = ts.alpha();
    let mut acc = PlugMatrix::identity(ts.dim(), LaurentPoly::one());
    for _ in 0..n {
        acc = acc.matmul(&alpha)?;
    }
    Ok(acc)
}

/// Outcome of the search for the smallest height at which every entry of
/// `α^N` is a non-monomial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupercorkReport {
    pub n0: Option<usize>,
    pub searched_up_to: usize,
    /// Smallest `N` at which every entry of `A^N` is positive.
    pub positive_from: Option<usize>,
}

/// Smallest `N ≤ n_max` with every `(α^N)[p][p̃]` nonzero and not a monomial.
pub fn supercork_search(ts: &TransferSystem, n_max: usize) -> Result<SupercorkReport> {
    let alpha = ts.alpha();
    let dim = ts.dim();
    let mut acc = PlugMatrix::identity(dim, LaurentPoly::one());
    let mut positive_from = None;
    for n in 1..=n_max {
        acc = acc.matmul(&alpha)?;
        if acc.nnz() == dim * dim {
            positive_from.get_or_insert(n);
            if acc.entries().all(|(_, _, p)| !p.is_monomial()) {
                return Ok(SupercorkReport {
                    n0: Some(n),
                    searched_up_to: n,
                    positive_from,
                });
            }
        }
    }
    Ok(SupercorkReport {
        n0: None,
        searched_up_to: n_max,
        positive_from,
    })
}

/// `max |t|` over the support of each `P_N`, with the least-squares slope
/// through the origin.
pub fn support_slope(polys: &[LaurentPoly]) -> (Vec<i64>, f64) {
    let widths: Vec<i64> = polys
        .iter()
        .map(|p| {
            p.min_exp()
                .into_iter()
                .chain(p.max_exp())
                .map(i64::abs)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for (n, &w) in widths.iter().enumerate() {
        num += n as f64 * w as f64;
        den += (n * n) as f64;
    }
    (widths, if den > 0.0 { num / den } else { 0.0 })
}

/// `Σ |coeff|` of a polynomial as a big integer.
pub fn abs_mass(p: &LaurentPoly) -> BigInt {
    p.terms().map(|(_, c)| c.abs()).sum()
}
