//! Command-line front end. Every command prints a short human summary on
//! standard output and, with `--out`, writes its machine-readable artifact.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::{
    cocycle_twist, components, fat_thin_census, Block, TilingIndex, DEFAULT_ENUMERATION_BOUND,
};
use crate::error::{Error, Result};
use crate::plugfloor::DEFAULT_PLUG_BOUND;
use crate::region::{parse_disk, Disk};
use crate::stats::{
    chi_square_critical, chi_square_uniform, gaussian_constants, perron, prob_no_vertical,
    spectral_report, SamplerState, TwistDistribution,
};
use crate::transfer::{count_cylinder, finish_polynomial, FloorGraph, Propagation, TransferSystem};
use crate::twist::{
    calibration_report, default_candidates, tiling_twist, twist_change_quarters, BaseDirection,
    CalibrationSuite, FloorCocycle, TwistKernel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum CocycleKind {
    /// Per-floor pair kernel (`m = 4`).
    Kernel,
    /// Connector-based cocycle (`m = 1`).
    Connector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    #[value(name = "+e1")]
    PlusE1,
    #[value(name = "-e1")]
    MinusE1,
    #[value(name = "+e2")]
    PlusE2,
    #[value(name = "-e2")]
    MinusE2,
}

impl From<Direction> for BaseDirection {
    fn from(d: Direction) -> BaseDirection {
        match d {
            Direction::PlusE1 => BaseDirection::PlusE1,
            Direction::MinusE1 => BaseDirection::MinusE1,
            Direction::PlusE2 => BaseDirection::PlusE2,
            Direction::MinusE2 => BaseDirection::MinusE2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Number of tilings of `D × [0, N]`.
    Count,
    /// Twist polynomial `P_N`.
    Poly,
    /// Perron data, Gaussian constants and the eta curve.
    Spectrum,
    /// Flip components and the fat/thin census.
    Components,
    /// Exact uniform samples.
    Sample,
    /// Exact twist statistics at height `N`.
    Stats,
    /// Runs the kernel calibration suite.
    Calibrate,
    /// Runs the invariant suite; fails on any violation.
    Verify,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "domino-cyl",
    version,
    about = "3D domino tilings of cylinders over a quadriculated disk"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// ASCII disk file: `#` is a cell, `.` a hole.
    #[arg(long, global = true)]
    pub disk: Option<PathBuf>,
    #[arg(long, global = true)]
    pub height: Option<usize>,
    /// Modulus for the twist residue statistics (default: 2, 3 and 5).
    #[arg(long = "mod", global = true)]
    pub modulus: Option<u64>,
    #[arg(long, global = true, default_value_t = 10)]
    pub samples: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum, default_value_t = CocycleKind::Kernel)]
    pub cocycle: CocycleKind,
    /// Base direction of the twist kernel.
    #[arg(long, global = true, value_enum, default_value_t = Direction::PlusE1)]
    pub u: Direction,
    #[arg(long, global = true, default_value_t = DEFAULT_PLUG_BOUND)]
    pub plug_bound: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_BOUND)]
    pub enum_bound: u64,
    /// Vertical-floor threshold `M′` of the fat/thin census.
    #[arg(long, global = true, default_value_t = 1)]
    pub fat_threshold: usize,
    /// Also join components along trits.
    #[arg(long, global = true)]
    pub trits: bool,
    /// Checkpoint file for the `P_N` propagation.
    #[arg(long, global = true)]
    pub checkpoint: Option<PathBuf>,
    /// Multiplications between checkpoints.
    #[arg(long, global = true, default_value_t = 5)]
    pub checkpoint_every: usize,
    /// Start from the checkpoint file when it exists.
    #[arg(long, global = true)]
    pub resume: bool,
    /// Points on `[−π, π]` for the eta curve.
    #[arg(long, global = true, default_value_t = 64)]
    pub grid: usize,
}

/// What a command produced: the summary for standard output and the artifact.
pub struct Outcome {
    pub summary: String,
    pub artifact: String,
    pub exit_code: i32,
}

impl RunConfig {
    fn check(&self) -> Result<()> {
        let positive = [
            ("--samples", self.samples as u128),
            ("--plug-bound", self.plug_bound as u128),
            ("--enum-bound", self.enum_bound as u128),
            ("--checkpoint-every", self.checkpoint_every as u128),
            ("--grid", self.grid as u128),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidInput(format!("{name} must be positive")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidInput("--threads must be positive".into()));
        }
        if matches!(self.modulus, Some(0)) {
            return Err(Error::InvalidInput("--mod must be positive".into()));
        }
        Ok(())
    }

    fn load_disk(&self) -> Result<Disk> {
        let path = self
            .disk
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("--disk is required".into()))?;
        let text = fs::read_to_string(path)?;
        Ok(parse_disk(&text)?)
    }

    fn need_height(&self) -> Result<usize> {
        self.height
            .ok_or_else(|| Error::InvalidInput("--height is required".into()))
    }

    fn kernel(&self) -> TwistKernel {
        TwistKernel::reference(self.u.into())
    }

    fn system(&self, d: &Disk) -> Result<TransferSystem> {
        let graph = FloorGraph::build(d, self.plug_bound)?;
        let cocycle = match self.cocycle {
            CocycleKind::Kernel => FloorCocycle::PerFloorKernel(self.kernel()),
            CocycleKind::Connector => FloorCocycle::connector(self.kernel(), &graph)?,
        };
        TransferSystem::from_graph(graph.into(), &cocycle)
    }

    fn moduli(&self) -> Vec<u64> {
        self.modulus.map_or(vec![2, 3, 5], |n| vec![n])
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn poly_json(p: &crate::algebra::LaurentPoly) -> BTreeMap<i64, String> {
    p.terms().map(|(e, c)| (e, c.to_string())).collect()
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    disk: String,
    kernel: String,
    cocycle: String,
    propagation: Propagation,
}

/// `P_N`, advancing from a checkpoint when asked and saving one periodically.
fn polynomial_with_checkpoints(
    cfg: &RunConfig,
    ts: &TransferSystem,
    n: usize,
) -> Result<crate::algebra::LaurentPoly> {
    let tag = |prop: Propagation| Checkpoint {
        disk: ts.disk().render(),
        kernel: cfg.kernel().label(),
        cocycle: ts.cocycle_kind().to_string(),
        propagation: prop,
    };
    let mut prop = Propagation::start(ts);
    if let (true, Some(path)) = (cfg.resume, &cfg.checkpoint) {
        if path.exists() {
            let saved: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
            let expected = tag(Propagation::start(ts));
            if saved.disk != expected.disk
                || saved.kernel != expected.kernel
                || saved.cocycle != expected.cocycle
                || saved.propagation.entries.len() != ts.dim()
            {
                return Err(Error::InvalidInput(format!(
                    "checkpoint {} belongs to another run",
                    path.display()
                )));
            }
            if saved.propagation.step > n {
                return Err(Error::InvalidInput(format!(
                    "checkpoint is at step {}, beyond --height {n}",
                    saved.propagation.step
                )));
            }
            prop = saved.propagation;
        }
    }
    while prop.step < n {
        prop.advance(ts);
        if let Some(path) = &cfg.checkpoint {
            if prop.step.is_multiple_of(cfg.checkpoint_every) || prop.step == n {
                write_atomic(path, &serde_json::to_string(&tag(prop.clone()))?)?;
            }
        }
    }
    finish_polynomial(ts, &prop)
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Executes one command without touching standard output or files.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    cfg.check()?;
    let format = cfg.format.unwrap_or(match cfg.command {
        Command::Poly => Format::Csv,
        _ => Format::Json,
    });
    let ok = |summary: String, artifact: String| Outcome {
        summary,
        artifact,
        exit_code: 0,
    };
    match cfg.command {
        Command::Count => {
            let d = cfg.load_disk()?;
            let n = cfg.need_height()?;
            let ts = cfg.system(&d)?;
            let count = count_cylinder(&ts, n);
            let artifact = match format {
                Format::Json => {
                    to_json(&json!({"disk": d.render(), "N": n, "count": count.to_string()}))?
                }
                Format::Csv => format!("N,count\n{n},{count}\n"),
            };
            Ok(ok(count.to_string(), artifact))
        }
        Command::Poly => {
            let d = cfg.load_disk()?;
            let n = cfg.need_height()?;
            let ts = cfg.system(&d)?;
            let p = polynomial_with_checkpoints(cfg, &ts, n)?;
            let dist = TwistDistribution::new(n, p);
            let artifact = match format {
                Format::Json => to_json(&json!({
                    "disk": d.render(),
                    "N": n,
                    "count": dist.total.to_string(),
                    "poly": poly_json(&dist.poly),
                }))?,
                Format::Csv => dist
                    .poly
                    .terms()
                    .fold(String::from("exponent,coefficient\n"), |s, (e, c)| {
                        s + &format!("{e},{c}\n")
                    }),
            };
            let summary = if cfg.out.is_some() {
                format!(
                    "P_{n} has {} terms, P_{n}(1) = {}",
                    dist.poly.n_terms(),
                    dist.total
                )
            } else {
                artifact.trim_end().to_string()
            };
            Ok(ok(summary, artifact))
        }
        Command::Spectrum => {
            let d = cfg.load_disk()?;
            let ts = cfg.system(&d)?;
            let r = spectral_report(&ts, cfg.grid)?;
            let artifact = match format {
                Format::Json => to_json(&r)?,
                Format::Csv => r
                    .eta_curve
                    .iter()
                    .fold(String::from("t,eta\n"), |s, [t, e]| {
                        s + &format!("{t},{e}\n")
                    }),
            };
            let summary = format!(
                "lambda1 = {:.12}, gap = {:.6}, sigma2 = {:.9}, C0 = {:.9}, C1 = {:.9}",
                r.lambda1, r.gap, r.sigma2, r.c0, r.c1
            );
            Ok(ok(summary, artifact))
        }
        Command::Components => {
            let d = cfg.load_disk()?;
            let n = cfg.need_height()?;
            let ts = cfg.system(&d)?;
            let report = components(&ts, n, cfg.trits, cfg.enum_bound)?;
            let census = fat_thin_census(&report, cfg.fat_threshold);
            let artifact = match format {
                Format::Json => to_json(&json!({"report": report, "census": census}))?,
                Format::Csv => report.to_csv(),
            };
            let mut summary = format!(
                "{} tilings, {} flip components, twist constant: {}",
                report.n_tilings,
                report.components.len(),
                report.twist_constant
            );
            for row in &census.rows {
                summary += &format!(
                    "\n  twist {:>3}: {} components, {} with vert >= {}",
                    row.twist, row.components, row.fat, census.threshold
                );
            }
            Ok(ok(summary, artifact))
        }
        Command::Sample => {
            let d = cfg.load_disk()?;
            let n = cfg.need_height()?;
            let ts = cfg.system(&d)?;
            let st = SamplerState::new(&ts, n, cfg.seed);
            let rows: Vec<(u64, i64, usize, Value)> = (0..cfg.samples)
                .into_par_iter()
                .map(|i| {
                    let t = st.sample(i);
                    let tw = cocycle_twist(&ts, &t)?;
                    Ok((i, tw, t.vert(), serde_json::to_value(t.to_json())?))
                })
                .collect::<Result<_>>()?;
            let artifact = match format {
                Format::Json => to_json(
                    &rows
                        .iter()
                        .map(|(i, tw, v, t)| json!({"index": i, "twist": tw, "vert": v, "tiling": t}))
                        .collect::<Vec<_>>(),
                )?,
                Format::Csv => rows.iter().fold(String::from("index,twist,vert\n"), |s, (i, tw, v, _)| s + &format!("{i},{tw},{v}\n")),
            };
            let summary = format!(
                "{} samples of {} tilings (seed {})",
                cfg.samples,
                st.total(),
                cfg.seed
            );
            Ok(ok(summary, artifact))
        }
        Command::Stats => {
            let d = cfg.load_disk()?;
            let n = cfg.need_height()?;
            let ts = cfg.system(&d)?;
            let dist = TwistDistribution::new(n, polynomial_with_checkpoints(cfg, &ts, n)?);
            let p = perron(&ts)?;
            let g = gaussian_constants(&ts, p.lambda1)?;
            let nf = n as f64;
            let mods: BTreeMap<String, f64> = cfg
                .moduli()
                .into_iter()
                .map(|m| (m.to_string(), dist.mod_deviation(m)))
                .collect();
            let v = json!({
                "N": n,
                "count": dist.total.to_string(),
                "mean": dist.mean(),
                "variance": dist.variance(),
                "varianceOverN": dist.variance() / nf,
                "sigma2": g.sigma2,
                "C0": g.c0,
                "C1": g.c1,
                "sqrtNProbZero": nf.sqrt() * dist.prob(0),
                "cdfDistance": dist.cdf_distance(g.sigma2),
                "modDeviation": mods,
                "probNoVertical": prob_no_vertical(&ts, n),
                "lambda1": p.lambda1,
            });
            let artifact = match format {
                Format::Json => to_json(&v)?,
                Format::Csv => dist.histogram_csv(),
            };
            let summary = format!(
                "Var/N = {:.9} vs sigma2 = {:.9}; sqrt(N) P[0] = {:.9} vs C0 = {:.9}",
                dist.variance() / nf,
                g.sigma2,
                nf.sqrt() * dist.prob(0),
                g.c0
            );
            Ok(ok(summary, artifact))
        }
        Command::Calibrate => {
            let suite = CalibrationSuite::standard()?;
            let report = calibration_report(&default_candidates(cfg.u.into()), &suite)?;
            let mut summary = String::new();
            for c in &report.candidates {
                summary += &format!("{} {}\n", if c.passed { "PASS" } else { "fail" }, c.label);
            }
            let exit_code = match report.selected() {
                Ok(k) => {
                    summary += &format!("selected {}", k.label());
                    0
                }
                Err(e) => {
                    summary += &e.to_string();
                    e.exit_code()
                }
            };
            Ok(Outcome {
                summary,
                artifact: to_json(&report)?,
                exit_code,
            })
        }
        Command::Verify => {
            let checks = verify(cfg)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            let mut summary = String::new();
            for c in &checks {
                summary += &format!(
                    "{} {}: {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            summary += &format!("{} checks, {} failed", checks.len(), failed);
            let artifact = match format {
                Format::Json => to_json(&checks)?,
                Format::Csv => checks.iter().fold(String::from("check,passed\n"), |s, c| {
                    s + &format!("{},{}\n", c.name, c.passed)
                }),
            };
            Ok(Outcome {
                summary,
                artifact,
                exit_code: if failed == 0 { 0 } else { 3 },
            })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Calibration plus exhaustive invariant checks on `--disk` at `--height`
/// (default 2) for both cocycle kinds.
pub fn verify(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let suite = CalibrationSuite::standard()?;
    let report = calibration_report(&default_candidates(cfg.u.into()), &suite)?;
    let selected = report.selected();
    out.push(check(
        "calibration",
        matches!(&selected, Ok(k) if TwistKernel { calibrated: false, ..*k } == cfg.kernel()),
        match &selected {
            Ok(k) => k.label(),
            Err(e) => e.to_string(),
        },
    ));

    let d = cfg.load_disk()?;
    let n = cfg.height.unwrap_or(2);
    let k = cfg.kernel();
    let graph = std::sync::Arc::new(FloorGraph::build(&d, cfg.plug_bound)?);
    let kinds = [
        FloorCocycle::PerFloorKernel(k),
        FloorCocycle::connector(k, &graph)?,
    ];
    for cocycle in &kinds {
        let ts = TransferSystem::from_graph(graph.clone(), cocycle)?;
        let kind = ts.cocycle_kind();
        let idx = TilingIndex::new(&ts, n, cfg.enum_bound)?;
        let count = count_cylinder(&ts, n);
        out.push(check(
            &format!("{kind}: enumeration size equals count"),
            BigInt::from(idx.len()) == count,
            format!("{} tilings", idx.len()),
        ));
        let (mismatch, flip_bad, trit_bad): (u64, u64, u64) = (0..idx.len())
            .into_par_iter()
            .map(|r| {
                let t = idx.tiling(r);
                let explicit = tiling_twist(&k, &d, &t);
                let via = cocycle_twist(&ts, &t);
                let m = u64::from(!matches!((&explicit, &via), (Ok(a), Ok(b)) if a == b));
                let b = Block::from_tiling(&d, &t);
                let before = b.dominoes(&d);
                let f = b
                    .flips(&d)
                    .iter()
                    .filter(|x| twist_change_quarters(&k, &before, &x.dominoes(&d)) != 0)
                    .count() as u64;
                let tr = b
                    .trits(&d)
                    .iter()
                    .filter(|x| twist_change_quarters(&k, &before, &x.dominoes(&d)).abs() != 4)
                    .count() as u64;
                (m, f, tr)
            })
            .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
        out.push(check(
            &format!("{kind}: cocycle sum equals explicit twist"),
            mismatch == 0,
            format!("{mismatch} mismatches"),
        ));
        out.push(check(
            &format!("{kind}: flips preserve twist"),
            flip_bad == 0,
            format!("{flip_bad} violations"),
        ));
        out.push(check(
            &format!("{kind}: trits change twist by one"),
            trit_bad == 0,
            format!("{trit_bad} violations"),
        ));
        let p = polynomial_with_checkpoints(
            &RunConfig {
                checkpoint: None,
                ..cfg.clone()
            },
            &ts,
            n,
        )?;
        out.push(check(
            &format!("{kind}: P_N(1) equals count"),
            p.sum() == count,
            format!("{} vs {}", p.sum(), count),
        ));
        out.push(check(
            &format!("{kind}: P_N is palindromic"),
            p.mirror() == p,
            format!("{} terms", p.n_terms()),
        ));
    }

    let ts = TransferSystem::from_graph(graph, &kinds[0])?;
    let samples = cfg.samples.max(100);
    let st = SamplerState::new(&ts, n, cfg.seed);
    if st.total() <= &BigInt::from(64) {
        let idx = TilingIndex::new(&ts, n, cfg.enum_bound)?;
        let mut counts = vec![0u64; idx.len() as usize];
        for i in 0..samples * idx.len() {
            counts[idx.rank_of(&st.sample(i))? as usize] += 1;
        }
        let stat = chi_square_uniform(&counts);
        let crit = chi_square_critical(counts.len().saturating_sub(1).max(1), 1e-3);
        out.push(check(
            "sampler chi-square",
            stat < crit,
            format!("{stat:.3} < {crit:.3}"),
        ));
    }
    Ok(out)
}

/// Parses arguments, runs the command, writes the artifact and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return 1;
        }
    }
    let result = execute(&cfg).and_then(|o| {
        if let Some(path) = &cfg.out {
            fs::write(path, &o.artifact)?;
        }
        Ok(o)
    });
    match result {
        Ok(o) => {
            println!("{}", o.summary);
            o.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
