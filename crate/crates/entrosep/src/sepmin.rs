//! Deterministic multistart minimization of total uncertainty over
//! separable (pure product) and arbitrary pure states.
//!
//! Starts come from a shifted Halton sequence, so results for a fixed seed
//! are reproducible and adding starts can only lower the reported minimum.
//! Each start is refined derivative free: coordinate golden section sweeps
//! followed by simplex descent.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, TAU};

use crate::entropy::shannon;
use crate::observables::{me_basis, OperatorSet};
use crate::qstate::{random_pure_product_with, rng_stream, ProductParams};
use crate::{CVector, Error, Result};

/// Multistart budget and reproducibility knobs.
#[derive(Debug, Clone, Copy)]
pub struct MultistartConfig {
    pub starts: usize,
    pub seed: u64,
    /// Objective tolerance for the local refinement.
    pub obj_tol: f64,
}

impl Default for MultistartConfig {
    fn default() -> Self {
        Self { starts: 512, seed: 0, obj_tol: 1e-10 }
    }
}

/// Where a minimum was found.
#[derive(Debug, Clone)]
pub enum Argmin {
    /// Two qubit product state angles, canonicalized.
    ProductAngles(ProductParams),
    /// Product of two unit factors at higher local dimension.
    ProductPair { psi: CVector, phi: CVector },
    /// Unconstrained pure state of the joint space.
    Joint(CVector),
}

/// Refined objective value of one start.
#[derive(Debug, Clone, Copy)]
pub struct StartRecord {
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizationResult {
    pub value: f64,
    pub argmin: Argmin,
    pub starts: usize,
    pub converged: bool,
    pub per_start: Vec<StartRecord>,
}

// first 50 primes; one Halton base per search dimension
const PRIMES: [u64; 50] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229,
];

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut f = 1.0 / base as f64;
    while index > 0 {
        result += (index % base) as f64 * f;
        index /= base;
        f /= base as f64;
    }
    result
}

/// Halton points with a seeded per-dimension rotation. Point s depends only
/// on (seed, s), never on the total start count.
struct StartSequence {
    shifts: Vec<f64>,
}

impl StartSequence {
    fn new(dims: usize, seed: u64) -> Self {
        assert!(dims <= PRIMES.len(), "search space of {dims} dims exceeds the prime table");
        let mut rng = rng_stream(seed, u64::MAX);
        Self { shifts: (0..dims).map(|_| rng.random::<f64>()).collect() }
    }

    fn point(&self, index: usize) -> Vec<f64> {
        self.shifts
            .iter()
            .enumerate()
            .map(|(d, shift)| {
                let v = radical_inverse(index as u64 + 1, PRIMES[d]) + shift;
                v - v.floor()
            })
            .collect()
    }
}

// unit cube point -> standard normals, pairwise Box-Muller
fn gaussian_from_uniform(u: &[f64]) -> Vec<f64> {
    assert!(u.len() % 2 == 0, "gaussian mapping needs an even dimension count");
    let mut out = Vec::with_capacity(u.len());
    for pair in u.chunks_exact(2) {
        let r = (-2.0 * pair[0].max(1e-12).ln()).sqrt();
        let angle = TAU * pair[1];
        out.push(r * angle.cos());
        out.push(r * angle.sin());
    }
    out
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

// golden section line search on each coordinate in turn; keeps a move only
// when it improves the incumbent value
fn golden_sweep<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &mut [f64], h: f64, mut fbest: f64) -> f64 {
    for i in 0..x.len() {
        let center = x[i];
        let (mut a, mut b) = (center - h, center + h);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        x[i] = c;
        let mut fc = f(x);
        x[i] = d;
        let mut fd = f(x);
        for _ in 0..32 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                x[i] = c;
                fc = f(x);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                x[i] = d;
                fd = f(x);
            }
        }
        let (xm, fm) = if fc < fd { (c, fc) } else { (d, fd) };
        if fm < fbest {
            x[i] = xm;
            fbest = fm;
        } else {
            x[i] = center;
        }
    }
    fbest
}

// standard reflect/expand/contract/shrink simplex descent
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    h: f64,
    ftol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += h;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let by_value = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| {
        a.1.partial_cmp(&b.1).expect("objective values are finite")
    };
    let mut converged = false;
    for _ in 0..max_iter {
        simplex.sort_by(by_value);
        if simplex[n].1 - simplex[0].1 <= ftol {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi;
            }
        }
        for c in &mut centroid {
            *c /= n as f64;
        }
        let worst = simplex[n].clone();
        let reflect: Vec<f64> =
            centroid.iter().zip(&worst.0).map(|(c, w)| 2.0 * c - w).collect();
        let fr = f(&reflect);
        if fr < simplex[0].1 {
            let expand: Vec<f64> =
                centroid.iter().zip(&worst.0).map(|(c, w)| 3.0 * c - 2.0 * w).collect();
            let fe = f(&expand);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let toward = if fr < worst.1 { &reflect } else { &worst.0 };
            let contract: Vec<f64> =
                centroid.iter().zip(toward).map(|(c, t)| 0.5 * (c + t)).collect();
            let fc = f(&contract);
            if fc < worst.1.min(fr) {
                simplex[n] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> =
                        best.iter().zip(&entry.0).map(|(b, xi)| 0.5 * (b + xi)).collect();
                    let fx = f(&x);
                    *entry = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(by_value);
    (simplex[0].0.clone(), simplex[0].1, converged)
}

fn refine<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    mut x: Vec<f64>,
    scale: f64,
    obj_tol: f64,
) -> (Vec<f64>, f64, bool) {
    let mut fx = f(&x);
    fx = golden_sweep(f, &mut x, scale, fx);
    fx = golden_sweep(f, &mut x, scale / 8.0, fx);
    let mut h = scale / 4.0;
    let mut converged = false;
    for _ in 0..4 {
        let (nx, nf, conv) = nelder_mead(f, &x, h, obj_tol, 200 * x.len());
        let improved = fx - nf;
        if nf < fx {
            x = nx;
            fx = nf;
        }
        converged = conv;
        if conv && improved <= obj_tol {
            break;
        }
        h = (h * 1e-2).max(1e-7);
    }
    (x, fx, converged)
}

// sequential reduction with strict <, so the earliest best start wins ties
fn multistart<F, S>(
    dims: usize,
    scale: f64,
    cfg: &MultistartConfig,
    make_start: S,
    mut objective: F,
) -> Result<(Vec<f64>, f64, bool, Vec<StartRecord>)>
where
    F: FnMut(&[f64]) -> f64,
    S: Fn(&[f64]) -> Vec<f64>,
{
    if cfg.starts == 0 {
        return Err(Error::InvalidInput("multistart needs at least one start".into()));
    }
    if !(cfg.obj_tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "objective tolerance {} must be positive",
            cfg.obj_tol
        )));
    }
    let seq = StartSequence::new(dims, cfg.seed);
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut records = Vec::with_capacity(cfg.starts);
    for index in 0..cfg.starts {
        let x0 = make_start(&seq.point(index));
        let (x, fx, conv) = refine(&mut objective, x0, scale, cfg.obj_tol);
        records.push(StartRecord { index, value: fx });
        if best.as_ref().map_or(true, |(_, bf, _)| fx < *bf) {
            best = Some((x, fx, conv));
        }
    }
    let (x, fx, conv) = best.expect("at least one start ran");
    Ok((x, fx, conv, records))
}

const DEGENERATE_NORM_PENALTY: f64 = 1e6;

// interleaved (re, im) reals -> unit complex vector; None when the raw norm
// is too small to normalize stably
fn unit_from_reals(reals: &[f64]) -> Option<CVector> {
    let n = reals.len() / 2;
    let mut v = CVector::zeros(n);
    for i in 0..n {
        v[i] = Complex64::new(reals[2 * i], reals[2 * i + 1]);
    }
    let norm = v.norm();
    if norm < 1e-8 {
        None
    } else {
        Some(v.unscale(norm))
    }
}

fn kron_amp(psi: &CVector, phi: &CVector) -> CVector {
    let (da, db) = (psi.len(), phi.len());
    let mut amp = CVector::zeros(da * db);
    for i in 0..da {
        for l in 0..db {
            amp[i * db + l] = psi[i] * phi[l];
        }
    }
    amp
}

fn set_entropy_pure(set: &OperatorSet, amp: &CVector) -> f64 {
    set.observables().iter().map(|o| shannon(&o.probabilities_pure(amp))).sum()
}

// rotate the global phase so the largest entry is real positive
fn canonical_phase(mut v: CVector) -> CVector {
    let mut lead = 0;
    for i in 1..v.len() {
        if v[i].norm_sqr() > v[lead].norm_sqr() {
            lead = i;
        }
    }
    let mag = v[lead].norm();
    if mag > 0.0 {
        let phase = v[lead].conj().unscale(mag);
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
    v
}

/// Minimum total uncertainty over pure product states (sufficient for the
/// separable minimum: mixing only raises entropy). d = 2 searches the four
/// product angles; larger d searches a pair of unit factors.
pub fn minimize_sep(set: &OperatorSet, d: usize, cfg: &MultistartConfig) -> Result<MinimizationResult> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("local dimension must be at least 2, got {d}")));
    }
    if set.dim() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: set.dim() });
    }
    if d == 2 {
        let scales = [FRAC_PI_2, FRAC_PI_2, TAU, TAU];
        let (x, value, converged, per_start) = multistart(
            4,
            0.4,
            cfg,
            |u| u.iter().zip(scales).map(|(ui, s)| ui * s).collect(),
            |x| {
                let p = ProductParams::new(x[0], x[1], x[2], x[3]);
                set_entropy_pure(set, crate::qstate::product_state(&p).amplitudes())
            },
        )?;
        let angles = ProductParams::new(x[0], x[1], x[2], x[3]).canonicalized();
        Ok(MinimizationResult {
            value,
            argmin: Argmin::ProductAngles(angles),
            starts: cfg.starts,
            converged,
            per_start,
        })
    } else {
        let (x, value, converged, per_start) = multistart(
            4 * d,
            0.5,
            cfg,
            |u| gaussian_from_uniform(u),
            |x| match (unit_from_reals(&x[..2 * d]), unit_from_reals(&x[2 * d..])) {
                (Some(psi), Some(phi)) => set_entropy_pure(set, &kron_amp(&psi, &phi)),
                _ => DEGENERATE_NORM_PENALTY,
            },
        )?;
        let psi = unit_from_reals(&x[..2 * d]).expect("minimum cannot sit on the penalty plateau");
        let phi = unit_from_reals(&x[2 * d..]).expect("minimum cannot sit on the penalty plateau");
        Ok(MinimizationResult {
            value,
            argmin: Argmin::ProductPair {
                psi: canonical_phase(psi),
                phi: canonical_phase(phi),
            },
            starts: cfg.starts,
            converged,
            per_start,
        })
    }
}

/// Minimum total uncertainty over all pure states of the joint space.
pub fn minimize_global(set: &OperatorSet, cfg: &MultistartConfig) -> Result<MinimizationResult> {
    let n = set.dim();
    let (x, value, converged, per_start) = multistart(
        2 * n,
        0.5,
        cfg,
        |u| gaussian_from_uniform(u),
        |x| match unit_from_reals(x) {
            Some(w) => set_entropy_pure(set, &w),
            None => DEGENERATE_NORM_PENALTY,
        },
    )?;
    let w = unit_from_reals(&x).expect("minimum cannot sit on the penalty plateau");
    Ok(MinimizationResult {
        value,
        argmin: Argmin::Joint(canonical_phase(w)),
        starts: cfg.starts,
        converged,
        per_start,
    })
}

/// Separable and global minima side by side.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub sep: MinimizationResult,
    pub global: MinimizationResult,
}

impl GapReport {
    /// The separability gap: how far the separable floor sits above the
    /// unconstrained minimum.
    pub fn gap(&self) -> f64 {
        self.sep.value - self.global.value
    }
}

pub fn gap(set: &OperatorSet, cfg: &MultistartConfig) -> Result<GapReport> {
    let n = set.dim();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::InvalidInput(format!(
            "set dimension {n} is not a d x d bipartition"
        )));
    }
    Ok(GapReport { sep: minimize_sep(set, d, cfg)?, global: minimize_global(set, cfg)? })
}

/// Sampling audit of the product state projection cap against the
/// maximally entangled basis: every overlap stays at or below 1/d and at
/// least d of them are nonzero.
#[derive(Debug, Clone, Copy)]
pub struct CapReport {
    pub dim: usize,
    pub samples: usize,
    /// The cap 1/d.
    pub cap: f64,
    pub max_q: f64,
    pub cap_violations: usize,
    pub min_support: usize,
}

pub fn projection_cap_check(d: usize, samples: usize, seed: u64) -> Result<CapReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("cap check needs at least one sample".into()));
    }
    let basis = me_basis(d)?;
    let cap = 1.0 / d as f64;
    let mut rng = rng_stream(seed, 2);
    let mut max_q = 0.0f64;
    let mut cap_violations = 0;
    let mut min_support = usize::MAX;
    for _ in 0..samples {
        let w = random_pure_product_with(d, &mut rng);
        let mut support = 0;
        for v in basis.vectors() {
            let q = v.dotc(w.amplitudes()).norm_sqr();
            if q > max_q {
                max_q = q;
            }
            if q > cap + 1e-9 {
                cap_violations += 1;
            }
            if q > 1e-12 {
                support += 1;
            }
        }
        min_support = min_support.min(support);
    }
    Ok(CapReport { dim: d, samples, cap, max_q, cap_violations, min_support })
}
