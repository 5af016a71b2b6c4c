//! Uniform sampling, spectral analysis of `A` and `α(z)`, and the exact twist
//! distribution derived from `P_N`.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_bigint::{BigInt, RandBigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::algebra::{evaluate, LaurentPoly, PlugMatrix};
use crate::error::{Error, Result};
use crate::plugfloor::{Floor, Tiling};
use crate::transfer::TransferSystem;

/// `num / den` as a float, exact up to rounding even for huge operands.
pub fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    if den.is_zero() {
        return f64::NAN;
    }
    let shift = (den.bits() as i64 - 64).max(0);
    let extra = 64i64;
    let scaled = (num << extra as usize) >> shift as usize;
    let d = den >> shift as usize;
    (scaled.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN))
        * 2f64.powi(-extra as i32)
}

/// Backward counts for exact uniform sampling of height-`N` cylinder tilings.
#[derive(Debug)]
pub struct SamplerState<'a> {
    ts: &'a TransferSystem,
    n: usize,
    /// `backward[k] = A^{N-k} e_{p∘}`.
    backward: Vec<Vec<BigInt>>,
    seed: u64,
}

impl<'a> SamplerState<'a> {
    pub fn new(ts: &'a TransferSystem, n: usize, seed: u64) -> SamplerState<'a> {
        let dim = ts.dim();
        let mut backward = vec![Vec::new(); n + 1];
        let mut v = vec![BigInt::zero(); dim];
        v[ts.plugs().empty_index()] = BigInt::from(1);
        backward[n] = v;
        for k in (0..n).rev() {
            backward[k] = ts.a_apply(&backward[k + 1]);
        }
        SamplerState {
            ts,
            n,
            backward,
            seed,
        }
    }

    pub fn height(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> &BigInt {
        &self.backward[0][self.ts.plugs().empty_index()]
    }

    pub fn backward(&self, k: usize) -> &[BigInt] {
        &self.backward[k]
    }

    /// Stream `index` of the generator keyed by the seed.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// Draws sample number `index`; the same `(seed, index)` gives the same tiling.
    pub fn sample(&self, index: u64) -> Tiling {
        let mut rng = self.rng(index);
        let graph = self.ts.graph();
        let mut p = self.ts.plugs().empty_index();
        let mut floors: Vec<Floor> = Vec::with_capacity(self.n);
        for k in 1..=self.n {
            let total = self.backward[k - 1][p]
                .to_biguint()
                .expect("counts are nonnegative");
            let mut x = BigInt::from(rng.gen_biguint_below(&total));
            let mut chosen = None;
            for (q, masks) in graph.successors(p) {
                let wq = &self.backward[k][q];
                if wq.is_zero() {
                    continue;
                }
                let weight = wq * masks.len();
                if x < weight {
                    let (j, _) = x.div_rem(wq);
                    chosen = Some((q, j.to_usize().expect("floor index fits")));
                    break;
                }
                x -= weight;
            }
            let (q, j) = chosen.expect("weights cover the draw");
            floors.push(graph.floor(p, q, j));
            p = q;
        }
        Tiling { floors }
    }

    pub fn sample_many(&self, start: u64, count: u64) -> Vec<Tiling> {
        (start..start + count)
            .into_par_iter()
            .map(|i| self.sample(i))
            .collect()
    }
}

pub fn sample_tiling(st: &SamplerState, index: u64) -> Tiling {
    st.sample(index)
}

/// Exact distribution of the plug after `j` floors.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub numerators: Vec<BigInt>,
    pub denominator: BigInt,
}

impl Marginal {
    pub fn to_f64(&self) -> Vec<f64> {
        self.numerators
            .iter()
            .map(|x| ratio_f64(x, &self.denominator))
            .collect()
    }
}

pub fn plug_marginal(st: &SamplerState, j: usize) -> Result<Marginal> {
    if j > st.n {
        return Err(Error::InvalidInput(format!(
            "floor index {j} exceeds height {}",
            st.n
        )));
    }
    // A is symmetric, so (A^j)_{p∘,p} is the p-th entry of A^j e_{p∘} = backward[N-j].
    let forward = &st.backward[st.n - j];
    let back = &st.backward[j];
    Ok(Marginal {
        numerators: forward.iter().zip(back).map(|(a, b)| a * b).collect(),
        denominator: st.total().clone(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Perron {
    pub lambda1: f64,
    pub v1: Vec<f64>,
    /// `|λ₂| / λ₁`.
    pub gap: f64,
    pub iterations: usize,
    pub residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn apply_f64(a: &PlugMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.dim())
        .into_par_iter()
        .map(|r| a.row(r).map(|(c, w)| w * v[c]).sum())
        .collect()
}

/// Irreducibility and aperiodicity of the floor graph.
pub fn check_primitive(ts: &TransferSystem) -> Result<()> {
    let g = ts.graph();
    let dim = ts.dim();
    let start = ts.plugs().empty_index();
    let mut level = vec![usize::MAX; dim];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for (q, _) in g.successors(p) {
            if level[q] == usize::MAX {
                level[q] = level[p] + 1;
                queue.push_back(q);
            }
        }
    }
    let unreached = level.iter().filter(|&&l| l == usize::MAX).count();
    if unreached > 0 {
        return Err(Error::NotPrimitive {
            reason: format!("{unreached} plugs unreachable from the empty plug"),
        });
    }
    let mut period = 0usize;
    for p in 0..dim {
        for (q, _) in g.successors(p) {
            period = period.gcd(&(level[p] + 1).abs_diff(level[q]));
        }
    }
    if period != 1 {
        return Err(Error::NotPrimitive {
            reason: format!("floor graph has period {period}"),
        });
    }
    Ok(())
}

/// Perron eigenpair of `A` by power iteration, and the ratio `|λ₂|/λ₁` by
/// iterating the deflated matrix.
pub fn perron(ts: &TransferSystem) -> Result<Perron> {
    check_primitive(ts)?;
    let a = ts.graph().adjacency_f64();
    let dim = a.dim();
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for it in 1..=200_000 {
        let w = apply_f64(&a, &v);
        lambda = dot(&v, &w);
        let r: Vec<f64> = w.iter().zip(&v).map(|(x, y)| x - lambda * y).collect();
        residual = norm(&r) / lambda;
        let nw = norm(&w);
        v = w.into_iter().map(|x| x / nw).collect();
        iterations = it;
        if residual < 1e-13 {
            break;
        }
    }
    if residual >= 1e-12 {
        return Err(Error::NotPrimitive {
            reason: format!("power iteration stalled at residual {residual:e}"),
        });
    }
    // v1 is positive up to rounding; clamp tiny negatives from roundoff
    for x in v.iter_mut() {
        *x = x.abs();
    }
    let gap = second_eigenvalue(&a, &v, lambda) / lambda;
    Ok(Perron {
        lambda1: lambda,
        v1: v,
        gap,
        iterations,
        residual,
    })
}

/// `|λ₂|` of a symmetric matrix from its Perron pair, via `sqrt(‖B²x‖/‖x‖)`
/// with `B = A − λ₁ v₁ v₁ᵀ`.
fn second_eigenvalue(a: &PlugMatrix<f64>, v1: &[f64], lambda: f64) -> f64 {
    let dim = a.dim();
    if dim < 2 {
        return 0.0;
    }
    let deflate = |x: &[f64]| -> Vec<f64> {
        let ax = apply_f64(a, x);
        let s = lambda * dot(v1, x);
        ax.iter().zip(v1).map(|(y, v)| y - s * v).collect()
    };
    let mut x: Vec<f64> = (0..dim)
        .map(|i| ((i * 7919 % 104729) as f64).sin())
        .collect();
    let s = dot(&x, v1);
    x.iter_mut().zip(v1).for_each(|(y, v)| *y -= s * v);
    let n0 = norm(&x);
    x.iter_mut().for_each(|y| *y /= n0);
    let mut est = 0.0;
    for _ in 0..20_000 {
        let y = deflate(&deflate(&x));
        let ny = norm(&y);
        if ny == 0.0 {
            return 0.0;
        }
        let next = ny.sqrt();
        x = y.into_iter().map(|t| t / ny).collect();
        if (next - est).abs() <= 1e-12 * next {
            return next;
        }
        est = next;
    }
    est
}

/// Largest eigenvalue of a Hermitian matrix by shifted power iteration,
/// starting from `start`. The shift `s` must make `H + sI` positive
/// semidefinite.
fn hermitian_top(
    h: &PlugMatrix<Complex64>,
    shift: f64,
    start: &[Complex64],
) -> (f64, Vec<Complex64>) {
    let apply = |x: &[Complex64]| -> Vec<Complex64> {
        (0..h.dim())
            .into_par_iter()
            .map(|r| h.row(r).map(|(c, w)| w * x[c]).sum::<Complex64>() + x[r] * shift)
            .collect()
    };
    let cnorm = |x: &[Complex64]| x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut x: Vec<Complex64> = start.to_vec();
    let n0 = cnorm(&x);
    x.iter_mut().for_each(|z| *z /= n0);
    let mut eta = 0.0;
    for _ in 0..1_000_000 {
        let y = apply(&x);
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum();
        let res = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (b - a * rq).norm_sqr())
            .sum::<f64>()
            .sqrt();
        eta = rq - shift;
        let ny = cnorm(&y);
        x = y.into_iter().map(|z| z / ny).collect();
        if res < 1e-14 {
            break;
        }
    }
    (eta, x)
}

/// `η₁(t)`: largest eigenvalue of `α(e^{it/m}) / λ₁` at each sample point.
pub fn eta_curve(ts: &TransferSystem, lambda1: f64, samples: &[f64]) -> Result<Vec<f64>> {
    let alpha = ts.alpha();
    let m = ts.m() as f64;
    let start = vec![Complex64::new(1.0, 0.0); ts.dim()];
    samples
        .iter()
        .map(|&t| {
            let z = Complex64::from_polar(1.0, t / m);
            let h = evaluate(&alpha, z)?.map(|w| w / lambda1);
            Ok(hermitian_top(&h, 1.0, &start).0)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianConstants {
    pub sigma2: f64,
    pub c0: f64,
    pub c1: f64,
    /// `(h, five-point estimate of η₁″(0))` for each step.
    pub sweep: Vec<(f64, f64)>,
    /// Richardson combinations of consecutive steps.
    pub richardson: Vec<f64>,
}

pub const CURVATURE_STEPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// `σ² = −η₁″(0)` by five-point differences and Richardson extrapolation;
/// `C1 = 1/(2σ²)`, `C0 = 1/√(2πσ²)`.
pub fn gaussian_constants(ts: &TransferSystem, lambda1: f64) -> Result<GaussianConstants> {
    let mut pts = vec![0.0];
    for h in CURVATURE_STEPS {
        pts.extend([h, -h, 2.0 * h, -2.0 * h]);
    }
    let eta = eta_curve(ts, lambda1, &pts)?;
    let f0 = eta[0];
    let sweep: Vec<(f64, f64)> = CURVATURE_STEPS
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let e = &eta[1 + 4 * i..5 + 4 * i];
            let d2 = (-e[2] + 16.0 * e[0] - 30.0 * f0 + 16.0 * e[1] - e[3]) / (12.0 * h * h);
            (h, d2)
        })
        .collect();
    let richardson: Vec<f64> = sweep
        .windows(2)
        .map(|w| (16.0 * w[1].1 - w[0].1) / 15.0)
        .collect();
    let second = *richardson.last().expect("at least two steps");
    if second >= 0.0 {
        return Err(Error::CurvatureNonNegative {
            second_derivative: second,
        });
    }
    let sigma2 = -second;
    Ok(GaussianConstants {
        sigma2,
        c0: 1.0 / (2.0 * PI * sigma2).sqrt(),
        c1: 1.0 / (2.0 * sigma2),
        sweep,
        richardson,
    })
}

/// Exact law of the twist over uniform tilings of height `N`, read off `P_N`.
#[derive(Debug, Clone)]
pub struct TwistDistribution {
    pub height: usize,
    pub poly: LaurentPoly,
    pub total: BigInt,
}

impl TwistDistribution {
    pub fn new(height: usize, poly: LaurentPoly) -> TwistDistribution {
        let total = poly.sum();
        TwistDistribution {
            height,
            poly,
            total,
        }
    }

    pub fn prob(&self, t: i64) -> f64 {
        ratio_f64(&self.poly.coeff(t), &self.total)
    }

    pub fn mean(&self) -> f64 {
        let s: BigInt = self.poly.terms().map(|(e, c)| c * e).sum();
        ratio_f64(&s, &self.total)
    }

    pub fn variance(&self) -> f64 {
        let s2: BigInt = self.poly.terms().map(|(e, c)| c * (e * e)).sum();
        let mu = self.mean();
        ratio_f64(&s2, &self.total) - mu * mu
    }

    /// `max_a |Prob[Tw ≡ a (mod n)] − 1/n|`.
    pub fn mod_deviation(&self, n: u64) -> f64 {
        let n_i = n as i64;
        let mut bins = vec![BigInt::zero(); n as usize];
        for (e, c) in self.poly.terms() {
            bins[e.rem_euclid(n_i) as usize] += c;
        }
        let target = BigInt::from(n);
        bins.iter()
            .map(|b| {
                // |b/total − 1/n| = |n·b − total| / (n·total)
                let diff: BigInt = &target * b - &self.total;
                let diff = BigInt::from_biguint(Sign::Plus, diff.magnitude().clone());
                ratio_f64(&diff, &(&target * &self.total))
            })
            .fold(0.0, f64::max)
    }

    /// `sup_t |Prob[Tw ≤ t] − Φ((t + ½)/√(σ²N))|` over the support.
    pub fn cdf_distance(&self, sigma2: f64) -> f64 {
        let normal =
            Normal::new(0.0, (sigma2 * self.height as f64).sqrt()).expect("positive scale");
        let mut acc = BigInt::zero();
        let mut worst: f64 = 0.0;
        for (e, c) in self.poly.terms() {
            let before = ratio_f64(&acc, &self.total);
            worst = worst.max((before - normal.cdf(e as f64 - 0.5)).abs());
            acc += c;
            let after = ratio_f64(&acc, &self.total);
            worst = worst.max((after - normal.cdf(e as f64 + 0.5)).abs());
        }
        worst
    }

    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("twist,count\n");
        for (e, c) in self.poly.terms() {
            s.push_str(&format!("{e},{c}\n"));
        }
        s
    }
}

pub fn mod_uniformity(p: &LaurentPoly, n: u64) -> f64 {
    TwistDistribution::new(0, p.clone()).mod_deviation(n)
}

/// `Prob[vert(T) = 0]` exactly: cylinder tilings avoiding vertical floors.
pub fn prob_no_vertical(ts: &TransferSystem, n: usize) -> f64 {
    let g = ts.graph();
    let full = ts.plugs().full_plug();
    let dim = ts.dim();
    let e = ts.plugs().empty_index();
    let mut trip = Vec::new();
    for p in 0..dim {
        let comp = crate::plugfloor::Plug(full.bits() & !ts.plugs().get(p).bits());
        for (q, masks) in g.successors(p) {
            let vertical = ts.plugs().get(q) == comp && masks.first() == Some(&0);
            let k = masks.len() - vertical as usize;
            if k > 0 {
                trip.push((p, q, BigInt::from(k)));
            }
        }
    }
    let restricted = PlugMatrix::from_triplets(dim, trip);
    let mut v = vec![BigInt::zero(); dim];
    v[e] = BigInt::from(1);
    let mut all = v.clone();
    for _ in 0..n {
        v = restricted.apply(&v).expect("square");
        all = ts.a_apply(&all);
    }
    ratio_f64(&v[e], &all[e])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionReport {
    pub height: usize,
    pub samples: Vec<f64>,
    /// `max |(α(z)^N)_{p,p̃}| / (A^N)_{p,p̃}` per sample.
    pub max_ratio: Vec<f64>,
}

/// Entrywise comparison of `|α(e^{it/m})^N|` against `A^N` (small disks).
pub fn contraction(ts: &TransferSystem, n: usize, samples: &[f64]) -> Result<ContractionReport> {
    let alpha = ts.alpha();
    let a = ts.graph().adjacency_f64();
    let mut an = PlugMatrix::identity(ts.dim(), 1.0);
    for _ in 0..n {
        an = an.matmul(&a)?;
    }
    let mut max_ratio = Vec::new();
    for &t in samples {
        let z = evaluate(&alpha, Complex64::from_polar(1.0, t / ts.m() as f64))?;
        let mut zn = PlugMatrix::identity(ts.dim(), Complex64::new(1.0, 0.0));
        for _ in 0..n {
            zn = zn.matmul(&z)?;
        }
        let mut worst: f64 = 0.0;
        for (r, c, v) in an.entries() {
            let w = zn.get(r, c).map_or(0.0, |x| x.norm());
            worst = worst.max(w / v);
        }
        max_ratio.push(worst);
    }
    Ok(ContractionReport {
        height: n,
        samples: samples.to_vec(),
        max_ratio,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralReport {
    pub lambda1: f64,
    pub gap: f64,
    pub sigma2: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "etaCurve")]
    pub eta_curve: Vec<[f64; 2]>,
}

pub fn spectral_report(ts: &TransferSystem, grid: usize) -> Result<SpectralReport> {
    let p = perron(ts)?;
    let g = gaussian_constants(ts, p.lambda1)?;
    let samples: Vec<f64> = (0..=grid)
        .map(|i| -PI + 2.0 * PI * i as f64 / grid as f64)
        .collect();
    let eta = eta_curve(ts, p.lambda1, &samples)?;
    Ok(SpectralReport {
        lambda1: p.lambda1,
        gap: p.gap,
        sigma2: g.sigma2,
        c0: g.c0,
        c1: g.c1,
        eta_curve: samples.into_iter().zip(eta).map(|(t, e)| [t, e]).collect(),
    })
}

/// Chi-square statistic of observed counts against equal expected counts.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let expected = n as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum()
}

/// Upper `alpha` critical value of the chi-square law.
pub fn chi_square_critical(dof: usize, alpha: f64) -> f64 {
    use statrs::distribution::ChiSquared;
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha)
}
