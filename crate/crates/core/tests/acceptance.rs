//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the console.
//! The P₆₀ check takes minutes; it runs only with `DOMINO_CYL_SLOW=1`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;

use domino_cyl::algebra::LaurentPoly;
use domino_cyl::dynamics::cocycle_twist;
use domino_cyl::dynamics::{components, Block, TilingIndex};
use domino_cyl::plugfloor::DEFAULT_PLUG_BOUND;
use domino_cyl::region::Disk;
use domino_cyl::stats::{
    chi_square_critical, chi_square_uniform, contraction, gaussian_constants, perron,
    plug_marginal, SamplerState, TwistDistribution,
};
use domino_cyl::transfer::{
    count_cylinder, supercork_search, twist_polynomial, twist_polynomials, FloorGraph,
    TransferSystem,
};
use domino_cyl::twist::{
    calibration_report, default_candidates, tiling_twist, twist_change_quarters, BaseDirection,
    CalibrationSuite, FloorCocycle, TwistKernel, FOUR_BY_FOUR_P4,
};

const P60_EXTREME: u64 = 673_511_306_237_603_716;
const P60_SUPPORT: i64 = 88;
const SAMPLER_DRAWS: u64 = 100_000;
const SAMPLER_ALPHA: f64 = 1e-3;
const MARGINAL_TOL: f64 = 1e-6;
const VARIANCE_REL_TOL: f64 = 0.02;
const DENSITY_REL_TOL: f64 = 0.05;
const CDF_TOL: f64 = 0.02;
const MOD_TOL: f64 = 1e-3;
const CONTRACTION_TOL: f64 = 1e-9;
const SUPERCORK_MAX: usize = 20;

fn kernel() -> TwistKernel {
    TwistKernel::reference(BaseDirection::PlusE1)
}

fn rect(w: i64, h: i64) -> Disk {
    Disk::rectangle(w, h).unwrap()
}

fn system(d: &Disk) -> TransferSystem {
    let g = Arc::new(FloorGraph::build(d, DEFAULT_PLUG_BOUND).unwrap());
    TransferSystem::from_graph(g, &FloorCocycle::PerFloorKernel(kernel())).unwrap()
}

fn p4_table() -> LaurentPoly {
    LaurentPoly::from_terms(FOUR_BY_FOUR_P4.iter().map(|&(e, c)| (e, BigInt::from(c))))
}

/// Perfect matchings of the `w × h × n` box grid graph by plain backtracking.
fn brute_force_box(w: usize, h: usize, n: usize) -> u64 {
    fn go(filled: &mut Vec<bool>, dims: (usize, usize, usize)) -> u64 {
        let (w, h, n) = dims;
        let Some(i) = filled.iter().position(|&f| !f) else {
            return 1;
        };
        let (x, y, z) = (i % w, (i / w) % h, i / (w * h));
        let mut total = 0;
        let steps = [(x + 1 < w, 1), (y + 1 < h, w), (z + 1 < n, w * h)];
        for (ok, off) in steps {
            if ok && !filled[i + off] {
                filled[i] = true;
                filled[i + off] = true;
                total += go(filled, dims);
                filled[i] = false;
                filled[i + off] = false;
            }
        }
        total
    }
    go(&mut vec![false; w * h * n], (w, h, n))
}

type Criterion = Box<dyn Fn() -> Vec<Line>>;

struct Line {
    id: &'static str,
    pass: bool,
    skipped: bool,
    detail: String,
}

fn line(id: &'static str, pass: bool, detail: String) -> Line {
    Line {
        id,
        pass,
        skipped: false,
        detail,
    }
}

fn criterion_1() -> Vec<Line> {
    let ts = system(&rect(4, 4));
    let t = Instant::now();
    let p = twist_polynomial(&ts, 4).unwrap();
    let want = p4_table();
    vec![line(
        "1",
        p == want,
        format!("P4(4x4) = {p} in {:.1}s", t.elapsed().as_secs_f64()),
    )]
}

fn criterion_2() -> Vec<Line> {
    let ts44 = system(&rect(4, 4));
    let c4 = count_cylinder(&ts44, 4);
    let table_sum = p4_table().sum();
    let c1 = count_cylinder(&ts44, 1);
    let b1 = brute_force_box(4, 4, 1);
    let c22 = count_cylinder(&system(&rect(2, 2)), 2);
    let b22 = brute_force_box(2, 2, 2);
    vec![
        line(
            "2a",
            c4 == BigInt::from(5_051_532_105u64) && c4 == table_sum,
            format!("count(4x4, 4) = {c4}, P4(1) = {table_sum}"),
        ),
        line(
            "2b",
            c22 == BigInt::from(9) && c22 == BigInt::from(b22),
            format!("count(2x2, 2) = {c22}, brute force {b22}"),
        ),
        line(
            "2c",
            c1 == BigInt::from(36) && c1 == BigInt::from(b1),
            format!("count(4x4, 1) = {c1}, brute force {b1}"),
        ),
    ]
}

fn criterion_3(slow: bool) -> Vec<Line> {
    if !slow {
        return vec![Line {
            id: "3",
            pass: true,
            skipped: true,
            detail: "P60 runs only with DOMINO_CYL_SLOW=1".into(),
        }];
    }
    let ts = system(&rect(4, 4));
    let t = Instant::now();
    let p = twist_polynomial(&ts, 60).unwrap();
    let lo = p.min_exp().unwrap_or(0);
    let hi = p.max_exp().unwrap_or(0);
    let want = BigInt::from(P60_EXTREME);
    let pass =
        lo == -P60_SUPPORT && hi == P60_SUPPORT && p.coeff(lo) == want && p.coeff(hi) == want;
    vec![line(
        "3",
        pass,
        format!(
            "support [{lo}, {hi}], extremes {} / {} in {:.0}s",
            p.coeff(lo),
            p.coeff(hi),
            t.elapsed().as_secs_f64()
        ),
    )]
}

fn criterion_4() -> Vec<Line> {
    let suite = CalibrationSuite::standard().unwrap();
    let report = calibration_report(&default_candidates(BaseDirection::PlusE1), &suite).unwrap();
    let passing: Vec<&str> = report
        .candidates
        .iter()
        .filter(|c| c.passed)
        .map(|c| c.label.as_str())
        .collect();
    vec![line(
        "4",
        passing.len() == 1 && report.selected().is_ok(),
        format!(
            "{} of {} candidates pass: {:?}",
            passing.len(),
            report.candidates.len(),
            passing
        ),
    )]
}

fn criterion_5() -> Vec<Line> {
    let k = kernel();
    let mut out = Vec::new();
    for (id, d, n) in [("5a", rect(4, 4), 2), ("5b", rect(2, 3), 4)] {
        let ts = system(&d);
        let idx = TilingIndex::new(&ts, n, 1 << 24).unwrap();
        let mut edges = 0u64;
        let mut steps = BTreeSet::new();
        for r in 0..idx.len() {
            let b = Block::from_tiling(&d, &idx.tiling(r));
            let before = b.dominoes(&d);
            for t in b.trits(&d) {
                edges += 1;
                steps.insert(twist_change_quarters(&k, &before, &t.dominoes(&d)));
            }
        }
        // the per-tiling cocycle route must agree
        let report = components(&ts, n, true, 1 << 24).unwrap();
        let cocycle_steps: BTreeSet<i64> = report.trit_steps.keys().map(|s| s * 4).collect();
        let pass = edges > 0 && steps.iter().all(|s| s.abs() == 4) && steps == cocycle_steps;
        let (w, h) = if id == "5a" { (4, 4) } else { (2, 3) };
        out.push(line(
            id,
            pass,
            format!(
                "{w}x{h}x{n}: {edges} directed trit edges, twist steps {:?}",
                steps.iter().map(|s| s / 4).collect::<Vec<_>>()
            ),
        ));
    }
    out
}

fn criterion_6() -> Vec<Line> {
    let k = kernel();
    let mut out = Vec::new();
    for (w, h, n) in [(2, 2, 2), (2, 3, 2), (2, 3, 4)] {
        let d = rect(w, h);
        let g = Arc::new(FloorGraph::build(&d, DEFAULT_PLUG_BOUND).unwrap());
        for c in [
            FloorCocycle::PerFloorKernel(k),
            FloorCocycle::connector(k, &g).unwrap(),
        ] {
            let ts = TransferSystem::from_graph(Arc::clone(&g), &c).unwrap();
            let idx = TilingIndex::new(&ts, n, 1 << 24).unwrap();
            let bad = (0..idx.len())
                .filter(|&r| {
                    let t = idx.tiling(r);
                    tiling_twist(&k, &d, &t).ok() != cocycle_twist(&ts, &t).ok()
                })
                .count();
            out.push(line(
                "6",
                bad == 0,
                format!(
                    "{w}x{h}x{n} {}: {} tilings, {bad} mismatches",
                    c.kind_name(),
                    idx.len()
                ),
            ));
        }
    }
    out
}

fn criterion_7() -> Vec<Line> {
    let ts = system(&rect(4, 4));
    let mut out = Vec::new();
    for n in [2, 3] {
        let t = Instant::now();
        let report = components(&ts, n, false, 1 << 26).unwrap();
        let p = twist_polynomial(&ts, n).unwrap();
        let twists: BTreeSet<i64> = report.components.iter().map(|c| c.twist).collect();
        let with_vertical = |tw: i64| {
            report
                .components
                .iter()
                .filter(|c| c.twist == tw && c.max_vert >= 1)
                .count()
        };
        let per_twist: Vec<(i64, usize)> =
            twists.iter().map(|&tw| (tw, with_vertical(tw))).collect();
        out.push(line(
            "7a",
            report.twist_constant,
            format!(
                "4x4x{n}: {} flip components, twist constant on each",
                report.components.len()
            ),
        ));
        out.push(line(
            "7b",
            twists.len() == p.n_terms(),
            format!(
                "4x4x{n}: {} twists realized, support of P{n} has {}",
                twists.len(),
                p.n_terms()
            ),
        ));
        out.push(line(
            "7c",
            per_twist.iter().all(|&(_, c)| c == 1),
            format!(
                "4x4x{n}: components with a vertical floor per twist {:?} ({:.0}s)",
                per_twist,
                t.elapsed().as_secs_f64()
            ),
        ));
    }
    out
}

fn criterion_8() -> Vec<Line> {
    let ts = system(&rect(2, 3));
    let pf = perron(&ts).unwrap();
    let st = SamplerState::new(&ts, 40, 0);
    let m = plug_marginal(&st, 20).unwrap().to_f64();
    let worst = m
        .iter()
        .zip(&pf.v1)
        .map(|(a, v)| (a - v * v).abs())
        .fold(0.0, f64::max);
    vec![line(
        "8",
        worst < MARGINAL_TOL,
        format!(
            "2x3, N=40: max |marginal - v1^2| = {worst:.3e} over {} plugs",
            m.len()
        ),
    )]
}

fn criterion_9() -> Vec<Line> {
    let ts = system(&rect(2, 3));
    let polys = twist_polynomials(&ts, 200).unwrap();
    let pf = perron(&ts).unwrap();
    let g = gaussian_constants(&ts, pf.lambda1).unwrap();
    let dist = TwistDistribution::new(200, polys[200].clone());
    let n = 200f64;
    let var_rel = (dist.variance() / n / g.sigma2 - 1.0).abs();
    let dens = n.sqrt() * dist.prob(0);
    let dens_rel = (dens / g.c0 - 1.0).abs();
    let cdf = dist.cdf_distance(g.sigma2);
    let mods: Vec<(u64, f64)> = [2, 3, 5]
        .iter()
        .map(|&m| (m, dist.mod_deviation(m)))
        .collect();
    vec![
        line(
            "9a",
            var_rel < VARIANCE_REL_TOL,
            format!(
                "Var/N = {:.6e}, sigma2 = {:.6e}, relative error {var_rel:.4}",
                dist.variance() / n,
                g.sigma2
            ),
        ),
        line(
            "9b",
            dens_rel < DENSITY_REL_TOL,
            format!(
                "sqrt(N) P[Tw=0] = {dens:.6}, C0 = {:.6}, relative error {dens_rel:.4}",
                g.c0
            ),
        ),
        line("9c", cdf < CDF_TOL, format!("CDF sup distance {cdf:.5}")),
        line(
            "9d",
            mods.iter().all(|&(_, e)| e < MOD_TOL),
            format!("max deviation from uniform mod n: {mods:?}"),
        ),
    ]
}

fn criterion_10() -> Vec<Line> {
    let ts = system(&rect(2, 2));
    let idx = TilingIndex::new(&ts, 2, 1 << 10).unwrap();
    let st = SamplerState::new(&ts, 2, 2024);
    let mut counts = vec![0u64; idx.len() as usize];
    for i in 0..SAMPLER_DRAWS {
        counts[idx.rank_of(&st.sample(i)).unwrap() as usize] += 1;
    }
    let stat = chi_square_uniform(&counts);
    let crit = chi_square_critical(counts.len() - 1, SAMPLER_ALPHA);
    let again = SamplerState::new(&ts, 2, 2024);
    let same = (0..1000).all(|i| again.sample(i) == st.sample(i));
    vec![
        line(
            "10a",
            counts.len() == 9 && stat < crit,
            format!(
                "{} outcomes, chi-square {stat:.3} < {crit:.3}",
                counts.len()
            ),
        ),
        line(
            "10b",
            same,
            "fixed seed reproduces the first 1000 samples".into(),
        ),
    ]
}

fn criterion_11() -> Vec<Line> {
    let ts = system(&rect(2, 3));
    let s = supercork_search(&ts, SUPERCORK_MAX).unwrap();
    let Some(n0) = s.n0 else {
        return vec![line("11", false, format!("no N0 <= {SUPERCORK_MAX}"))];
    };
    let r = contraction(&ts, n0, &[PI / 4.0, PI / 2.0, PI]).unwrap();
    let pass = r.max_ratio.iter().all(|&x| x < 1.0 - CONTRACTION_TOL);
    vec![line(
        "11",
        pass,
        format!(
            "N0 = {n0}; max |alpha^N0| / A^N0 at t = pi/4, pi/2, pi: {:?}",
            r.max_ratio
        ),
    )]
}

fn main() {
    // behave like a libtest target when cargo asks for the test list
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let slow = std::env::var("DOMINO_CYL_SLOW").is_ok_and(|v| v == "1");
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1", Box::new(criterion_1)),
        ("2", Box::new(criterion_2)),
        ("3", Box::new(move || criterion_3(slow))),
        ("4", Box::new(criterion_4)),
        ("5", Box::new(criterion_5)),
        ("6", Box::new(criterion_6)),
        ("7", Box::new(criterion_7)),
        ("8", Box::new(criterion_8)),
        ("9", Box::new(criterion_9)),
        ("10", Box::new(criterion_10)),
        ("11", Box::new(criterion_11)),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = Vec::new();
    for (id, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        for l in run() {
            println!(
                "acceptance {:<4} {}  {}",
                l.id,
                if l.skipped {
                    "SKIP"
                } else if l.pass {
                    "PASS"
                } else {
                    "FAIL"
                },
                l.detail
            );
            if !l.pass {
                failed.push(l.id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing {failed:?}");
        std::process::exit(1);
    }
}
