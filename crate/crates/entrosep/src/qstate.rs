//! Bipartite states, product parameterizations and sampling helpers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::{CMatrix, CVector, Error, Result, TOL_HERMITIAN, TOL_NORM, TOL_PSD, TOL_TRACE};

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Validated density matrix of a dimA x dimB bipartition. Joint indices are
/// row-major: (i, l) -> i * dimB + l.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Checks hermiticity, unit trace and positivity; the error lists every
    /// invariant that failed.
    pub fn new(dim_a: usize, dim_b: usize, mat: CMatrix) -> Result<Self> {
        if dim_a < 2 || dim_b < 2 {
            return Err(Error::InvalidInput(format!(
                "subsystem dimensions must be at least 2, got {dim_a} and {dim_b}"
            )));
        }
        let n = dim_a * dim_b;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: mat.nrows() });
        }
        let mut violations = Vec::new();
        let herm = hermitian_deviation(&mat);
        if herm > TOL_HERMITIAN {
            violations.push(format!("hermiticity: max |M - M^H| = {herm:.3e}"));
        }
        let trace_dev = (mat.trace() - Complex64::new(1.0, 0.0)).norm();
        if trace_dev > TOL_TRACE {
            violations.push(format!("unit trace: |tr M - 1| = {trace_dev:.3e}"));
        }
        let min_eig = min_eigenvalue(&mat);
        if min_eig < -TOL_PSD {
            violations.push(format!("positivity: min eigenvalue = {min_eig:.3e}"));
        }
        if violations.is_empty() {
            Ok(Self { dim_a, dim_b, mat })
        } else {
            Err(Error::StateInvariants(violations))
        }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Total Hilbert space dimension.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Transposes the chosen factor only. Hermitian by construction, not
    /// necessarily positive, which is the whole point.
    pub fn partial_transpose(&self, sub: Subsystem) -> CMatrix {
        let db = self.dim_b;
        let n = self.dim();
        CMatrix::from_fn(n, n, |r, c| {
            let (i, l) = (r / db, r % db);
            let (j, m) = (c / db, c % db);
            match sub {
                Subsystem::A => self.mat[(j * db + l, i * db + m)],
                Subsystem::B => self.mat[(i * db + m, j * db + l)],
            }
        })
    }

    /// Smallest eigenvalue of the partial transpose. Both sides share a
    /// spectrum, so the side is not exposed.
    pub fn min_pt_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.partial_transpose(Subsystem::B))
    }

    /// Positive partial transpose test: decisive for two qubits, necessary
    /// for separability in any dimension.
    pub fn is_ppt(&self) -> bool {
        self.min_pt_eigenvalue() >= -TOL_PSD
    }

    pub fn partial_trace(&self, sub: Subsystem) -> CMatrix {
        let (da, db) = (self.dim_a, self.dim_b);
        match sub {
            Subsystem::A => CMatrix::from_fn(db, db, |l, m| {
                (0..da).map(|i| self.mat[(i * db + l, i * db + m)]).sum()
            }),
            Subsystem::B => CMatrix::from_fn(da, da, |i, j| {
                (0..db).map(|l| self.mat[(i * db + l, j * db + l)]).sum()
            }),
        }
    }

    /// Parses { "dimA", "dimB", "matrix": [[re, im], ...] } with the matrix
    /// entries row-major.
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: StateJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("state file: {e}")))?;
        let n = parsed
            .dim_a
            .checked_mul(parsed.dim_b)
            .filter(|n| n.checked_mul(*n).is_some())
            .ok_or_else(|| Error::InvalidInput("dimensions overflow".into()))?;
        if parsed.matrix.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "matrix has {} entries, expected {}",
                parsed.matrix.len(),
                n * n
            )));
        }
        let mat = CMatrix::from_fn(n, n, |r, c| {
            let [re, im] = parsed.matrix[r * n + c];
            Complex64::new(re, im)
        });
        Self::new(parsed.dim_a, parsed.dim_b, mat)
    }

    pub fn to_json(&self) -> String {
        let n = self.dim();
        let mut matrix = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let z = self.mat[(r, c)];
                matrix.push([z.re, z.im]);
            }
        }
        serde_json::to_string(&StateJson { dim_a: self.dim_a, dim_b: self.dim_b, matrix })
            .expect("state serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    matrix: Vec<[f64; 2]>,
}

/// Normalized pure state of a bipartition.
#[derive(Debug, Clone)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amp: CVector,
}

impl PureState {
    pub fn new(dim_a: usize, dim_b: usize, amp: CVector) -> Result<Self> {
        if amp.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch { expected: dim_a * dim_b, found: amp.len() });
        }
        let norm = amp.norm();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::InvalidInput(format!("amplitudes have norm {norm}, expected 1")));
        }
        Ok(Self { dim_a, dim_b, amp })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amp
    }

    pub fn density(&self) -> DensityMatrix {
        let mat = &self.amp * self.amp.adjoint();
        DensityMatrix::new(self.dim_a, self.dim_b, mat)
            .expect("projector onto a unit vector is a valid state")
    }
}

/// Four angles picking a two-qubit product state. Each factor reads
/// cos(t)|0> + e^(i phase) sin(t)|1> with (t, phase) = (alpha, delta) on the
/// first qubit and (beta, gamma) on the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl ProductParams {
    pub fn new(alpha: f64, beta: f64, delta: f64, gamma: f64) -> Self {
        Self { alpha, beta, delta, gamma }
    }

    /// Maps onto alpha, beta in [0, pi/2] and delta, gamma in [0, 2 pi)
    /// without moving either factor ray.
    pub fn canonicalized(&self) -> Self {
        let (alpha, delta) = canon_factor(self.alpha, self.delta);
        let (beta, gamma) = canon_factor(self.beta, self.gamma);
        Self { alpha, beta, delta, gamma }
    }
}

// t -> -t keeps cos and flips sin, t -> pi - t flips cos up to a global
// sign; both amount to a phase shift of pi on the |1> component.
fn canon_factor(theta: f64, phase: f64) -> (f64, f64) {
    let mut t = theta.rem_euclid(TAU);
    let mut ph = phase;
    if t >= PI {
        t = TAU - t;
        ph += PI;
    }
    if t > FRAC_PI_2 {
        t = PI - t;
        ph += PI;
    }
    (t, ph.rem_euclid(TAU))
}

/// Product state amplitudes in the order |00>, |01>, |10>, |11>.
pub fn product_state(params: &ProductParams) -> PureState {
    let (ca, sa) = (params.alpha.cos(), params.alpha.sin());
    let (cb, sb) = (params.beta.cos(), params.beta.sin());
    let ed = Complex64::from_polar(1.0, params.delta);
    let eg = Complex64::from_polar(1.0, params.gamma);
    let amp = CVector::from_vec(vec![
        Complex64::new(ca * cb, 0.0),
        eg * (ca * sb),
        ed * (sa * cb),
        ed * eg * (sa * sb),
    ]);
    PureState::new(2, 2, amp).expect("trig amplitudes are normalized")
}

/// Kronecker product in the row-major joint index convention.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn product_of(psi: &CVector, phi: &CVector) -> Result<PureState> {
    let (da, db) = (psi.len(), phi.len());
    let mut amp = CVector::zeros(da * db);
    for i in 0..da {
        for l in 0..db {
            amp[i * db + l] = psi[i] * phi[l];
        }
    }
    PureState::new(da, db, amp)
}

/// Convex mixture of pure product states kept in factorized form.
#[derive(Debug, Clone)]
pub struct SeparableEnsemble {
    weights: Vec<f64>,
    factors_a: Vec<CVector>,
    factors_b: Vec<CVector>,
}

impl SeparableEnsemble {
    pub fn new(weights: Vec<f64>, factors_a: Vec<CVector>, factors_b: Vec<CVector>) -> Result<Self> {
        if weights.is_empty() || weights.len() != factors_a.len() || weights.len() != factors_b.len() {
            return Err(Error::InvalidInput(
                "ensemble weights and factor lists must have equal nonzero length".into(),
            ));
        }
        if let Some(w) = weights.iter().find(|w| **w < 0.0) {
            return Err(Error::InvalidInput(format!("negative weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("weights sum to {total}, expected 1")));
        }
        let da = factors_a[0].len();
        let db = factors_b[0].len();
        for v in &factors_a {
            if v.len() != da {
                return Err(Error::DimensionMismatch { expected: da, found: v.len() });
            }
        }
        for v in &factors_b {
            if v.len() != db {
                return Err(Error::DimensionMismatch { expected: db, found: v.len() });
            }
        }
        for v in factors_a.iter().chain(factors_b.iter()) {
            let norm = v.norm();
            if (norm - 1.0).abs() > TOL_NORM {
                return Err(Error::InvalidInput(format!("factor has norm {norm}, expected 1")));
            }
        }
        Ok(Self { weights, factors_a, factors_b })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn realize(&self) -> DensityMatrix {
        let da = self.factors_a[0].len();
        let db = self.factors_b[0].len();
        let n = da * db;
        let mut mat = CMatrix::zeros(n, n);
        for ((w, a), b) in self.weights.iter().zip(&self.factors_a).zip(&self.factors_b) {
            let joint = product_of(a, b).expect("unit factors give a unit product");
            mat += (joint.amplitudes() * joint.amplitudes().adjoint()).scale(*w);
        }
        DensityMatrix::new(da, db, mat).expect("convex mixture of product projectors is a valid state")
    }
}

/// Stream-split chacha generator: one seed, independent deterministic
/// streams.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    (r * (TAU * u2).cos(), r * (TAU * u2).sin())
}

/// Haar distributed unit vector from normalized complex gaussians.
pub fn random_unit_vector<R: Rng>(dim: usize, rng: &mut R) -> CVector {
    loop {
        let mut v = CVector::zeros(dim);
        for i in 0..dim {
            let (x, y) = normal_pair(rng);
            v[i] = Complex64::new(x, y);
        }
        let n = v.norm();
        if n > 1e-6 {
            return v.unscale(n);
        }
    }
}

pub fn random_pure_product(dim: usize, seed: u64) -> PureState {
    random_pure_product_with(dim, &mut rng_stream(seed, 0))
}

pub fn random_pure_product_with<R: Rng>(dim: usize, rng: &mut R) -> PureState {
    let psi = random_unit_vector(dim, rng);
    let phi = random_unit_vector(dim, rng);
    product_of(&psi, &phi).expect("unit factors give a unit product")
}

pub fn random_density_matrix(dim_a: usize, dim_b: usize, seed: u64) -> DensityMatrix {
    random_density_matrix_with(dim_a, dim_b, &mut rng_stream(seed, 0))
}

/// Full-rank random state rho = G G^H / tr(G G^H) from a square gaussian G.
pub fn random_density_matrix_with<R: Rng>(dim_a: usize, dim_b: usize, rng: &mut R) -> DensityMatrix {
    let n = dim_a * dim_b;
    let g = CMatrix::from_fn(n, n, |_, _| {
        let (x, y) = normal_pair(rng);
        Complex64::new(x, y)
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(dim_a, dim_b, m.unscale(tr)).expect("normalized gram matrix is a valid state")
}

pub fn random_separable_mixture(dim: usize, terms: usize, seed: u64) -> SeparableEnsemble {
    random_separable_mixture_with(dim, terms, &mut rng_stream(seed, 0))
}

pub fn random_separable_mixture_with<R: Rng>(dim: usize, terms: usize, rng: &mut R) -> SeparableEnsemble {
    assert!(terms >= 1, "mixture needs at least one term");
    // exponential draws normalize to a flat simplex sample
    let mut weights: Vec<f64> = (0..terms).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        weights = vec![1.0 / terms as f64; terms];
    } else {
        for w in &mut weights {
            *w /= total;
        }
    }
    let factors_a = (0..terms).map(|_| random_unit_vector(dim, rng)).collect();
    let factors_b = (0..terms).map(|_| random_unit_vector(dim, rng)).collect();
    SeparableEnsemble::new(weights, factors_a, factors_b).expect("sampled ensemble is valid")
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    (m - &adj).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Smallest eigenvalue of the hermitian part of m.
pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}
