//! Twist of 3D domino tilings: the pairwise kernel, explicit pair sums and
//! floor cocycles, plus kernel calibration.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::LaurentPoly;
use crate::dynamics::{Block, TilingIndex};
use crate::error::{Error, Result};
use crate::plugfloor::{Floor, Plug, Tiling, DEFAULT_PLUG_BOUND};
use crate::region::Disk;
use crate::stats::SamplerState;
use crate::transfer::{twist_polynomial, FloorGraph, TransferSystem};

pub type Vec3 = [i64; 3];

fn is_black(c: Vec3) -> bool {
    (c[0] + c[1] + c[2]).rem_euclid(2) == 1
}

fn det3(a: Vec3, b: Vec3, c: Vec3) -> i64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// A 2×1×1 domino given by its two unit cubes (named by their minimal corner).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Domino3 {
    pub white: Vec3,
    pub black: Vec3,
}

impl Domino3 {
    /// Panics unless the cubes are face-adjacent.
    pub fn from_cubes(a: Vec3, b: Vec3) -> Domino3 {
        let dist: i64 = (0..3).map(|i| (a[i] - b[i]).abs()).sum();
        assert_eq!(dist, 1, "cubes {a:?} and {b:?} are not adjacent");
        if is_black(a) {
            Domino3 { white: b, black: a }
        } else {
            Domino3 { white: a, black: b }
        }
    }

    /// Unit vector from the white cube to the black cube.
    pub fn v(&self) -> Vec3 {
        [
            self.black[0] - self.white[0],
            self.black[1] - self.white[1],
            self.black[2] - self.white[2],
        ]
    }

    /// Axis along which the domino is long.
    pub fn axis(&self) -> usize {
        let v = self.v();
        (0..3).find(|&i| v[i] != 0).expect("nonzero direction")
    }

    /// Closed bounding box `[lo, hi]` in real coordinates.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = [0; 3];
        let mut hi = [0; 3];
        for i in 0..3 {
            lo[i] = self.white[i].min(self.black[i]);
            hi[i] = self.white[i].max(self.black[i]) + 1;
        }
        (lo, hi)
    }

    pub fn cubes(&self) -> [Vec3; 2] {
        [self.white, self.black]
    }

    pub fn translated(&self, t: Vec3) -> Domino3 {
        let add = |c: Vec3| [c[0] + t[0], c[1] + t[1], c[2] + t[2]];
        Domino3::from_cubes(add(self.white), add(self.black))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseDirection {
    #[serde(rename = "+e1")]
    PlusE1,
    #[serde(rename = "-e1")]
    MinusE1,
    #[serde(rename = "+e2")]
    PlusE2,
    #[serde(rename = "-e2")]
    MinusE2,
}

impl BaseDirection {
    pub const ALL: [BaseDirection; 4] = [
        BaseDirection::PlusE1,
        BaseDirection::MinusE1,
        BaseDirection::PlusE2,
        BaseDirection::MinusE2,
    ];

    pub fn vector(self) -> Vec3 {
        match self {
            BaseDirection::PlusE1 => [1, 0, 0],
            BaseDirection::MinusE1 => [-1, 0, 0],
            BaseDirection::PlusE2 => [0, 1, 0],
            BaseDirection::MinusE2 => [0, -1, 0],
        }
    }

    fn axis(self) -> usize {
        match self {
            BaseDirection::PlusE1 | BaseDirection::MinusE1 => 0,
            BaseDirection::PlusE2 | BaseDirection::MinusE2 => 1,
        }
    }

    fn positive(self) -> bool {
        matches!(self, BaseDirection::PlusE1 | BaseDirection::PlusE2)
    }
}

impl fmt::Display for BaseDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BaseDirection::PlusE1 => "+e1",
            BaseDirection::MinusE1 => "-e1",
            BaseDirection::PlusE2 => "+e2",
            BaseDirection::MinusE2 => "-e2",
        };
        f.write_str(s)
    }
}

/// Which translates of a domino along `u` form its shadow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShadowMode {
    /// `t > 0` only.
    PositiveOnly,
    /// All real `t`.
    Bidirectional,
}

/// Pairwise twist kernel. Values are counted in quarters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistKernel {
    pub u: BaseDirection,
    pub shadow_mode: ShadowMode,
    /// Magnitude of a nonzero interaction, in quarters (1 for ¼, 2 for ½).
    pub normalization_quarters: i64,
    pub sign_flip: i64,
    pub calibrated: bool,
}

impl TwistKernel {
    pub fn candidate(
        u: BaseDirection,
        shadow_mode: ShadowMode,
        normalization_quarters: i64,
        sign_flip: i64,
    ) -> TwistKernel {
        TwistKernel {
            u,
            shadow_mode,
            normalization_quarters,
            sign_flip,
            calibrated: false,
        }
    }

    /// The parameters selected by [`calibrate`] over [`default_candidates`],
    /// usable without rerunning the suite. The flag stays false.
    pub fn reference(u: BaseDirection) -> TwistKernel {
        TwistKernel::candidate(u, ShadowMode::PositiveOnly, 1, -1)
    }

    pub fn label(&self) -> String {
        let mode = match self.shadow_mode {
            ShadowMode::PositiveOnly => "positive",
            ShadowMode::Bidirectional => "bidirectional",
        };
        format!(
            "u={} shadow={} norm={}/4 sign={:+}",
            self.u, mode, self.normalization_quarters, self.sign_flip
        )
    }

    /// The same kernel with another base direction.
    pub fn with_u(&self, u: BaseDirection) -> TwistKernel {
        TwistKernel { u, ..*self }
    }
}

/// Open-box intersection test for `d1` against the `u`-shadow of `d0`.
fn meets_shadow(k: &TwistKernel, d0: &Domino3, d1: &Domino3) -> bool {
    let (lo0, hi0) = d0.bounds();
    let (lo1, hi1) = d1.bounds();
    let ax = k.u.axis();
    (0..3).all(|i| {
        let (a, b) = if i != ax {
            (Some(lo0[i]), Some(hi0[i]))
        } else {
            match (k.shadow_mode, k.u.positive()) {
                (ShadowMode::Bidirectional, _) => (None, None),
                (ShadowMode::PositiveOnly, true) => (Some(lo0[i]), None),
                (ShadowMode::PositiveOnly, false) => (None, Some(hi0[i])),
            }
        };
        let lo = a.map_or(lo1[i], |a| a.max(lo1[i]));
        let hi = b.map_or(hi1[i], |b| b.min(hi1[i]));
        lo < hi
    })
}

/// Contribution of the ordered pair `(d0, d1)`, in quarters.
pub fn pair_interaction(k: &TwistKernel, d0: &Domino3, d1: &Domino3) -> i64 {
    if d0 == d1 {
        return 0;
    }
    let det = det3(d0.v(), d1.v(), k.u.vector());
    if det == 0 || !meets_shadow(k, d0, d1) {
        return 0;
    }
    k.sign_flip * det.signum() * k.normalization_quarters
}

/// Sum of [`pair_interaction`] over all ordered pairs, in quarters.
///
/// With a horizontal `u` only dominoes sharing a layer can interact, so pairs
/// are drawn from per-layer buckets.
pub fn twist_quarters(k: &TwistKernel, dominoes: &[Domino3]) -> i64 {
    let mut layers: HashMap<i64, Vec<usize>> = HashMap::new();
    for (i, d) in dominoes.iter().enumerate() {
        let (lo, hi) = d.bounds();
        for z in lo[2]..hi[2] {
            layers.entry(z).or_default().push(i);
        }
    }
    let mut total = 0;
    let mut cand = Vec::new();
    for (i, d0) in dominoes.iter().enumerate() {
        let (lo, hi) = d0.bounds();
        cand.clear();
        for z in lo[2]..hi[2] {
            cand.extend_from_slice(&layers[&z]);
        }
        cand.sort_unstable();
        cand.dedup();
        for &j in &cand {
            if j != i {
                total += pair_interaction(k, d0, &dominoes[j]);
            }
        }
    }
    total
}

/// Twist of a cylinder tiling by the explicit pair sum.
pub fn tiling_twist(k: &TwistKernel, d: &Disk, t: &Tiling) -> Result<i64> {
    if !t.is_cylinder() {
        return Err(Error::InvalidInput("twist needs a cylinder tiling".into()));
    }
    let q = twist_quarters(k, &t.dominoes(d));
    if q % 4 != 0 {
        return Err(Error::IntegralityViolation { quarters: q });
    }
    Ok(q / 4)
}

/// Per-floor share of the pair sum, in quarters.
///
/// The floor sits at `z = 0`; vertical dominoes arriving from `below` occupy
/// `z ∈ {-1, 0}` and those leaving through `above` occupy `z ∈ {0, 1}`. Every
/// pair with at least one planar domino of this floor is counted here, which
/// partitions the pair sum of any cylinder tiling over its floors.
pub fn floor_quarters(k: &TwistKernel, d: &Disk, below: Plug, above: Plug, mask: u64) -> i64 {
    let mut local: Vec<Domino3> = Vec::with_capacity(d.n_cells());
    let edges = d.edges();
    let mut m = mask;
    while m != 0 {
        let e = m.trailing_zeros() as usize;
        m &= m - 1;
        let (a, b) = edges[e];
        let (ca, cb) = (d.cell(a), d.cell(b));
        local.push(Domino3::from_cubes([ca.x, ca.y, 0], [cb.x, cb.y, 0]));
    }
    let n_planar = local.len();
    for c in below.cells() {
        let cell = d.cell(c);
        local.push(Domino3::from_cubes(
            [cell.x, cell.y, -1],
            [cell.x, cell.y, 0],
        ));
    }
    for c in above.cells() {
        let cell = d.cell(c);
        local.push(Domino3::from_cubes(
            [cell.x, cell.y, 0],
            [cell.x, cell.y, 1],
        ));
    }
    let mut total = 0;
    for i in 0..local.len() {
        for j in 0..local.len() {
            if i != j && (i < n_planar || j < n_planar) {
                total += pair_interaction(k, &local[i], &local[j]);
            }
        }
    }
    total
}

/// Plug-to-plug connector tilings `t_p` of height `2|D|` from the empty plug.
#[derive(Debug, Clone)]
pub struct ConnectorTable {
    connectors: HashMap<Plug, Tiling>,
}

impl ConnectorTable {
    pub fn get(&self, p: Plug) -> Option<&Tiling> {
        self.connectors.get(&p)
    }

    pub fn len(&self) -> usize {
        self.connectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.connectors.is_empty()
    }

    /// Builds `t_p` for every plug by backtracking from `p` through the
    /// forward reachability levels of the empty plug, always taking the
    /// smallest predecessor index and its first floor.
    pub fn build(graph: &FloorGraph) -> Result<ConnectorTable> {
        let d = graph.disk();
        let n = graph.plugs().len();
        let height = 2 * d.n_cells();
        let mut levels = vec![vec![false; n]; height + 1];
        levels[0][graph.plugs().empty_index()] = true;
        for l in 0..height {
            let (cur, next) = levels.split_at_mut(l + 1);
            for (p, _) in cur[l].iter().enumerate().filter(|(_, &r)| r) {
                for (q, _) in graph.successors(p) {
                    next[0][q] = true;
                }
            }
        }
        let mut connectors = HashMap::with_capacity(n);
        for target in 0..n {
            let plug = graph.plugs().get(target);
            if !levels[height][target] {
                return Err(Error::ConnectorNotFound {
                    plug: plug.bits(),
                    height,
                });
            }
            let mut floors = Vec::with_capacity(height);
            let mut cur = target;
            for l in (0..height).rev() {
                let (prev, masks) = graph.successors(cur).find(|&(q, _)| levels[l][q]).ok_or(
                    Error::ConnectorNotFound {
                        plug: plug.bits(),
                        height,
                    },
                )?;
                floors.push(Floor::from_edge_mask(
                    d,
                    graph.plugs().get(prev),
                    graph.plugs().get(cur),
                    masks[0],
                ));
                cur = prev;
            }
            floors.reverse();
            connectors.insert(plug, Tiling::new(floors)?);
        }
        Ok(ConnectorTable { connectors })
    }
}

/// A floor cocycle with values in `(1/m)Z`.
#[derive(Debug, Clone)]
pub enum FloorCocycle {
    /// Per-floor kernel share; `m = 4`.
    PerFloorKernel(TwistKernel),
    /// Twist of the closed tiling `t_{p0} ∗ f ∗ t_{p1}⁻¹`; `m = 1`.
    ConnectorBased {
        kernel: TwistKernel,
        connectors: ConnectorTable,
    },
}

impl FloorCocycle {
    pub fn m(&self) -> i64 {
        match self {
            FloorCocycle::PerFloorKernel(_) => 4,
            FloorCocycle::ConnectorBased { .. } => 1,
        }
    }

    pub fn kernel(&self) -> &TwistKernel {
        match self {
            FloorCocycle::PerFloorKernel(k) => k,
            FloorCocycle::ConnectorBased { kernel, .. } => kernel,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FloorCocycle::PerFloorKernel(_) => "per-floor-kernel",
            FloorCocycle::ConnectorBased { .. } => "connector-based",
        }
    }

    pub fn connector(kernel: TwistKernel, graph: &FloorGraph) -> Result<Self> {
        Ok(FloorCocycle::ConnectorBased {
            kernel,
            connectors: ConnectorTable::build(graph)?,
        })
    }

    /// Value on a floor given by its plugs and edge mask, in units of `1/m`.
    pub fn value_raw(&self, d: &Disk, below: Plug, above: Plug, mask: u64) -> Result<i64> {
        match self {
            FloorCocycle::PerFloorKernel(k) => Ok(floor_quarters(k, d, below, above, mask)),
            FloorCocycle::ConnectorBased { kernel, connectors } => {
                let missing = |p: Plug| Error::ConnectorNotFound {
                    plug: p.bits(),
                    height: 2 * d.n_cells(),
                };
                let t0 = connectors.get(below).ok_or_else(|| missing(below))?;
                let t1 = connectors.get(above).ok_or_else(|| missing(above))?;
                let f = Floor::from_edge_mask(d, below, above, mask);
                let closed = t0.concat(&Tiling::new(vec![f])?)?.concat(&t1.reversed())?;
                tiling_twist(kernel, d, &closed)
            }
        }
    }
}

/// `ψ(f)` in units of `1/m`.
pub fn floor_cocycle(c: &FloorCocycle, d: &Disk, f: &Floor) -> Result<i64> {
    c.value_raw(d, f.below, f.above, f.edge_mask(d)?)
}

/// `Σ_k ψ(f_k)` in units of `1/m`.
pub fn cocycle_sum(c: &FloorCocycle, d: &Disk, t: &Tiling) -> Result<i64> {
    t.floors.iter().map(|f| floor_cocycle(c, d, f)).sum()
}

/// Change of the pair sum when the dominoes of `before` are replaced by those
/// of `after`, in quarters. Only pairs involving a changed domino are visited.
pub fn twist_change_quarters(k: &TwistKernel, before: &[Domino3], after: &[Domino3]) -> i64 {
    let b: BTreeSet<&Domino3> = before.iter().collect();
    let a: BTreeSet<&Domino3> = after.iter().collect();
    let removed: Vec<&Domino3> = b.difference(&a).copied().collect();
    let added: Vec<&Domino3> = a.difference(&b).copied().collect();
    let involving = |changed: &[&Domino3], all: &[Domino3]| -> i64 {
        let mut s = 0;
        for &c in changed {
            for o in all {
                if o != c {
                    s += pair_interaction(k, c, o);
                    if !changed.contains(&o) {
                        s += pair_interaction(k, o, c);
                    }
                }
            }
        }
        s
    };
    involving(&added, after) - involving(&removed, before)
}

/// `P_4` of the 4×4 disk as `(twist, count)`.
pub const FOUR_BY_FOUR_P4: [(i64, u64); 9] = [
    (-4, 18),
    (-3, 15144),
    (-2, 8955822),
    (-1, 310188792),
    (0, 4413212553),
    (1, 310188792),
    (2, 8955822),
    (3, 15144),
    (4, 18),
];

/// The eight kernels of the calibration family for a fixed `u`.
pub fn default_candidates(u: BaseDirection) -> Vec<TwistKernel> {
    let mut out = Vec::new();
    for mode in [ShadowMode::PositiveOnly, ShadowMode::Bidirectional] {
        for norm in [1, 2] {
            for sign in [1, -1] {
                out.push(TwistKernel::candidate(u, mode, norm, sign));
            }
        }
    }
    out
}

/// Base corner of the reference trit cube in the 4×4 disk.
const TRIT_BASE: Vec3 = [1, 1, 0];

/// The three dominoes of the reference trit before the move, inside the
/// cube `[1,3]² × [0,2]` with corners `(1,1,0)` and `(2,2,1)` left out.
pub fn reference_trit_dominoes() -> [Domino3; 3] {
    let at = |o: Vec3| {
        [
            TRIT_BASE[0] + o[0],
            TRIT_BASE[1] + o[1],
            TRIT_BASE[2] + o[2],
        ]
    };
    [
        Domino3::from_cubes(at([0, 1, 0]), at([1, 1, 0])),
        Domino3::from_cubes(at([0, 0, 1]), at([0, 1, 1])),
        Domino3::from_cubes(at([1, 0, 0]), at([1, 0, 1])),
    ]
}

/// The reference trit in the 4×4×2 box: the first tiling (in index order)
/// containing [`reference_trit_dominoes`], and its image under the trit.
pub fn reference_trit(ts44: &TransferSystem) -> Result<(Tiling, Tiling)> {
    let d = ts44.disk();
    let want = reference_trit_dominoes();
    let idx = TilingIndex::new(ts44, 2, 1 << 20)?;
    for r in 0..idx.len() {
        let t = idx.tiling(r);
        let block = Block::from_tiling(d, &t);
        let doms = block.dominoes(d);
        if want.iter().all(|w| doms.binary_search(w).is_ok()) {
            for b in block.trits(d) {
                let after = b.dominoes(d);
                if want.iter().all(|w| after.binary_search(w).is_err()) {
                    return Ok((t, b.to_tiling(d)));
                }
            }
        }
    }
    Err(Error::InvalidInput(
        "reference trit configuration not found".into(),
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateOutcome {
    pub kernel: TwistKernel,
    pub label: String,
    pub vertical_zero: bool,
    pub integral: bool,
    pub flip_invariant: bool,
    pub flips_checked: u64,
    pub additive: bool,
    pub pairs_checked: usize,
    /// `Tw(after) − Tw(before)` on the reference trit.
    pub trit_step: Option<i64>,
    /// `twist → (expected, computed)` wherever the histogram differs.
    pub p4_diff: BTreeMap<i64, (String, String)>,
    pub p4_error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub candidates: Vec<CandidateOutcome>,
    pub chosen: Option<TwistKernel>,
}

impl CalibrationReport {
    pub fn selected(&self) -> Result<TwistKernel> {
        let passing: Vec<&CandidateOutcome> = self.candidates.iter().filter(|c| c.passed).collect();
        match passing.len() {
            0 => Err(Error::NoKernelPasses),
            1 => Ok(TwistKernel {
                calibrated: true,
                ..passing[0].kernel
            }),
            n => Err(Error::MultipleKernelsPass { count: n }),
        }
    }
}

/// Shared data of the calibration runs.
pub struct CalibrationSuite {
    graph44: Arc<FloorGraph>,
    graph23: Arc<FloorGraph>,
    pub additivity_pairs: usize,
    pub seed: u64,
}

impl CalibrationSuite {
    pub fn standard() -> Result<CalibrationSuite> {
        Ok(CalibrationSuite {
            graph44: Arc::new(FloorGraph::build(
                &Disk::rectangle(4, 4)?,
                DEFAULT_PLUG_BOUND,
            )?),
            graph23: Arc::new(FloorGraph::build(
                &Disk::rectangle(2, 3)?,
                DEFAULT_PLUG_BOUND,
            )?),
            additivity_pairs: 200,
            seed: 0x7457_1571,
        })
    }

    pub fn graph44(&self) -> Arc<FloorGraph> {
        Arc::clone(&self.graph44)
    }

    pub fn run(&self, k: &TwistKernel) -> Result<CandidateOutcome> {
        let cocycle = FloorCocycle::PerFloorKernel(*k);
        let ts44 = TransferSystem::from_graph(self.graph44(), &cocycle)?;
        let ts23 = TransferSystem::from_graph(Arc::clone(&self.graph23), &cocycle)?;
        let mut integral = true;
        let mut twist = |d: &Disk, t: &Tiling| match tiling_twist(k, d, t) {
            Ok(x) => Some(x),
            Err(Error::IntegralityViolation { .. }) => {
                integral = false;
                None
            }
            Err(_) => None,
        };

        let mut vertical_zero = true;
        for ts in [&ts44, &ts23] {
            for n in [2, 4] {
                let t = Tiling::vertical(ts.disk(), n)?;
                vertical_zero &= twist(ts.disk(), &t) == Some(0);
            }
        }

        let mut flip_invariant = true;
        let mut flips_checked = 0;
        for (ts, n) in [(&ts23, 4), (&ts44, 2)] {
            let d = ts.disk();
            let idx = TilingIndex::new(ts, n, 1 << 24)?;
            for r in 0..idx.len() {
                let t = idx.tiling(r);
                if twist(d, &t).is_none() {
                    flip_invariant = false;
                }
                let block = Block::from_tiling(d, &t);
                let before = block.dominoes(d);
                for f in block.flips(d) {
                    flips_checked += 1;
                    if twist_change_quarters(k, &before, &f.dominoes(d)) != 0 {
                        flip_invariant = false;
                    }
                }
            }
        }

        let mut additive = true;
        let s2 = SamplerState::new(&ts44, 2, self.seed);
        let s3 = SamplerState::new(&ts44, 3, self.seed ^ 1);
        let d44 = ts44.disk();
        for i in 0..self.additivity_pairs as u64 {
            let (t0, t1) = (s2.sample(i), s3.sample(i));
            let joined = t0.concat(&t1)?;
            match (twist(d44, &t0), twist(d44, &t1), twist(d44, &joined)) {
                (Some(a), Some(b), Some(c)) => additive &= a + b == c,
                _ => additive = false,
            }
        }

        let (left, right) = reference_trit(&ts44)?;
        let trit_step = match (twist(d44, &left), twist(d44, &right)) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        };

        let mut p4_diff = BTreeMap::new();
        let mut p4_error = None;
        match twist_polynomial(&ts44, 4) {
            Ok(p) => {
                let expected = LaurentPoly::from_terms(
                    FOUR_BY_FOUR_P4.iter().map(|&(e, c)| (e, BigInt::from(c))),
                );
                let exps: BTreeSet<i64> =
                    p.terms().chain(expected.terms()).map(|(e, _)| e).collect();
                for e in exps {
                    let (want, got) = (expected.coeff(e), p.coeff(e));
                    if want != got {
                        p4_diff.insert(e, (want.to_string(), got.to_string()));
                    }
                }
            }
            Err(e) => p4_error = Some(e.to_string()),
        }

        let passed = vertical_zero
            && integral
            && flip_invariant
            && additive
            && trit_step == Some(1)
            && p4_diff.is_empty()
            && p4_error.is_none();
        Ok(CandidateOutcome {
            kernel: *k,
            label: k.label(),
            vertical_zero,
            integral,
            flip_invariant,
            flips_checked,
            additive,
            pairs_checked: self.additivity_pairs,
            trit_step,
            p4_diff,
            p4_error,
            passed,
        })
    }
}

/// Runs the suite on every candidate; the report lists all outcomes.
pub fn calibration_report(
    candidates: &[TwistKernel],
    suite: &CalibrationSuite,
) -> Result<CalibrationReport> {
    let outcomes = candidates
        .iter()
        .map(|k| suite.run(k))
        .collect::<Result<Vec<_>>>()?;
    let mut report = CalibrationReport {
        candidates: outcomes,
        chosen: None,
    };
    report.chosen = report.selected().ok();
    Ok(report)
}

/// The unique candidate passing the suite, marked calibrated.
pub fn calibrate(candidates: &[TwistKernel], suite: &CalibrationSuite) -> Result<TwistKernel> {
    calibration_report(candidates, suite)?.selected()
}
