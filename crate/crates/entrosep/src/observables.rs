//! Spectral observables, maximally entangled bases and the operator set
//! registry used by the separability criteria.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, LN_2, TAU};

use crate::entropy::binary_entropy;
use crate::qstate::{hermitian_deviation, product_of};
use crate::{CMatrix, CVector, Error, Result, EIG_CLUSTER_GAP, TOL_HERMITIAN};

pub const SET_NAMES: [&str; 8] =
    ["xy", "xyz", "1_3", "1_1_2", "1111", "spin", "extreme", "one_rest"];

// eigenvalue of sigma^j x sigma^j on each Bell vector, j = 1, 2, 3
const SIGNS_X: [f64; 4] = [1.0, 1.0, -1.0, -1.0];
const SIGNS_Y: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
const SIGNS_Z: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

/// One eigenvalue with an orthonormal basis of its eigenspace.
#[derive(Debug, Clone)]
pub struct EigenSpace {
    value: f64,
    basis: CMatrix,
    // cached basis adjoint; projection in the optimizer hot loop
    basis_adj: CMatrix,
    projector: CMatrix,
}

impl EigenSpace {
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn multiplicity(&self) -> usize {
        self.basis.ncols()
    }

    /// Columns are orthonormal eigenvectors.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }
}

/// Hermitian observable stored as its eigenspaces, sorted by eigenvalue.
/// Outcome k is a projection onto the k-th eigenspace, so degenerate
/// eigenvalues give a single outcome.
#[derive(Debug, Clone)]
pub struct SpectralObservable {
    label: String,
    spaces: Vec<EigenSpace>,
}

impl SpectralObservable {
    /// Builds from (eigenvalue, eigenvectors) groups. Values must be
    /// distinct, the vectors must form an orthonormal basis of the space.
    pub fn from_eigen_groups(label: &str, groups: Vec<(f64, Vec<CVector>)>) -> Result<Self> {
        if groups.is_empty() || groups.iter().any(|(_, vs)| vs.is_empty()) {
            return Err(Error::InvalidInput("eigen groups must be nonempty".into()));
        }
        if groups.iter().any(|(v, _)| !v.is_finite()) {
            return Err(Error::InvalidInput("eigenvalues must be finite".into()));
        }
        let mut groups = groups;
        groups.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
        for w in groups.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!(
                    "duplicate eigenvalue {} across groups",
                    w[0].0
                )));
            }
        }
        let n = groups[0].1[0].len();
        let total: usize = groups.iter().map(|(_, vs)| vs.len()).sum();
        if total != n {
            return Err(Error::InvalidInput(format!(
                "eigenspaces span {total} of {n} dimensions"
            )));
        }
        let mut spaces = Vec::with_capacity(groups.len());
        let mut all = Vec::with_capacity(n);
        for (value, vecs) in groups {
            for v in &vecs {
                if v.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: v.len() });
                }
            }
            all.extend(vecs.iter().cloned());
            let basis = CMatrix::from_columns(&vecs);
            let basis_adj = basis.adjoint();
            let projector = &basis * &basis_adj;
            spaces.push(EigenSpace { value, basis, basis_adj, projector });
        }
        let u = CMatrix::from_columns(&all);
        let gram_dev = (u.adjoint() * &u - CMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if gram_dev > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "eigenvectors are not orthonormal: gram deviation {gram_dev:.3e}"
            )));
        }
        Ok(Self { label: label.to_string(), spaces })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.spaces[0].basis.nrows()
    }

    pub fn n_outcomes(&self) -> usize {
        self.spaces.len()
    }

    pub fn spaces(&self) -> &[EigenSpace] {
        &self.spaces
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spaces.iter().map(|s| s.value).collect()
    }

    pub fn projectors(&self) -> impl Iterator<Item = &CMatrix> {
        self.spaces.iter().map(|s| &s.projector)
    }

    /// Dense matrix sum of value * projector.
    pub fn matrix(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for s in &self.spaces {
            m += s.projector.scale(s.value);
        }
        m
    }

    /// tr(P_k rho) per outcome, in eigenvalue order.
    pub fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        debug_assert_eq!(rho.nrows(), self.dim());
        self.spaces
            .iter()
            .map(|s| {
                let prod = rho * &s.basis;
                s.basis.dotc(&prod).re
            })
            .collect()
    }

    /// |P_k psi|^2 for a unit vector. The largest eigenspace is completed
    /// from normalization instead of being projected, which matters in the
    /// optimizer hot loop.
    pub fn probabilities_pure(&self, amp: &CVector) -> Vec<f64> {
        debug_assert_eq!(amp.len(), self.dim());
        let skip = self
            .spaces
            .iter()
            .enumerate()
            .max_by_key(|(_, s)| s.multiplicity())
            .map(|(i, _)| i)
            .expect("observable has at least one eigenspace");
        let mut probs = vec![0.0; self.spaces.len()];
        let mut rest = 0.0;
        for (i, s) in self.spaces.iter().enumerate() {
            if i == skip {
                continue;
            }
            let overlap = &s.basis_adj * amp;
            let p = overlap.norm_squared();
            probs[i] = p;
            rest += p;
        }
        probs[skip] = (1.0 - rest).max(0.0);
        probs
    }
}

/// Eigendecomposition with eigenvalues closer than the cluster gap merged
/// into one outcome, represented by their mean.
pub fn spectral_decompose(label: &str, m: &CMatrix) -> Result<SpectralObservable> {
    let dev = hermitian_deviation(m);
    if dev > TOL_HERMITIAN {
        return Err(Error::NotHermitian { deviation: dev, tol: TOL_HERMITIAN });
    }
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| {
        eig.eigenvalues[*a]
            .partial_cmp(&eig.eigenvalues[*b])
            .expect("hermitian eigenvalues are finite")
    });
    let column = |idx: usize| -> CVector { eig.eigenvectors.column(idx).clone_owned() };
    let mut groups: Vec<(f64, Vec<CVector>)> = Vec::new();
    let mut members = vec![order[0]];
    for &idx in &order[1..] {
        let prev = *members.last().expect("cluster is nonempty");
        if eig.eigenvalues[idx] - eig.eigenvalues[prev] <= EIG_CLUSTER_GAP {
            members.push(idx);
        } else {
            groups.push(flush_cluster(&eig.eigenvalues, &members, &column));
            members = vec![idx];
        }
    }
    groups.push(flush_cluster(&eig.eigenvalues, &members, &column));
    SpectralObservable::from_eigen_groups(label, groups)
}

fn flush_cluster(
    values: &nalgebra::DVector<f64>,
    members: &[usize],
    column: &dyn Fn(usize) -> CVector,
) -> (f64, Vec<CVector>) {
    let mean = members.iter().map(|i| values[*i]).sum::<f64>() / members.len() as f64;
    (mean, members.iter().map(|i| column(*i)).collect())
}

/// Orthonormal basis of maximally entangled vectors on a d x d bipartition.
#[derive(Debug, Clone)]
pub struct BellBasis {
    dim: usize,
    vectors: Vec<CVector>,
}

impl BellBasis {
    pub fn new(dim: usize, vectors: Vec<CVector>) -> Result<Self> {
        let n = dim * dim;
        if vectors.len() != n {
            return Err(Error::InvalidInput(format!(
                "need {n} basis vectors for local dimension {dim}, got {}",
                vectors.len()
            )));
        }
        for v in &vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        for (a, va) in vectors.iter().enumerate() {
            for (b, vb) in vectors.iter().enumerate() {
                let g = va.dotc(vb);
                let want = if a == b { 1.0 } else { 0.0 };
                if (g - Complex64::new(want, 0.0)).norm() > 1e-9 {
                    return Err(Error::InvalidInput(format!(
                        "vectors {a} and {b} are not orthonormal"
                    )));
                }
            }
        }
        let flat = 1.0 / dim as f64;
        for (v, amp) in vectors.iter().enumerate() {
            // reduced state of either side must be I/d
            for (reduced, side) in [(reduced_a(amp, dim), "A"), (reduced_b(amp, dim), "B")] {
                let dev = (reduced - CMatrix::identity(dim, dim).scale(flat))
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                if dev > 1e-9 {
                    return Err(Error::InvalidInput(format!(
                        "vector {v} is not maximally entangled on side {side}: deviation {dev:.3e}"
                    )));
                }
            }
        }
        Ok(Self { dim, vectors })
    }

    /// Local dimension d; the joint space has dimension d^2.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, v: usize) -> &CVector {
        &self.vectors[v]
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn projector(&self, v: usize) -> CMatrix {
        &self.vectors[v] * self.vectors[v].adjoint()
    }
}

fn reduced_a(amp: &CVector, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| (0..d).map(|l| amp[i * d + l] * amp[j * d + l].conj()).sum())
}

fn reduced_b(amp: &CVector, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |l, m| (0..d).map(|i| amp[i * d + l] * amp[i * d + m].conj()).sum())
}

/// The four Bell vectors in the order used by every sign table here:
/// (|00> + |11>)/sqrt2, (|00> - |11>)/sqrt2, (|01> + |10>)/sqrt2,
/// (|01> - |10>)/sqrt2.
pub fn bell_basis_2() -> BellBasis {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let vecs = vec![
        CVector::from_vec(vec![h, z, z, h]),
        CVector::from_vec(vec![h, z, z, -h]),
        CVector::from_vec(vec![z, h, h, z]),
        CVector::from_vec(vec![z, h, -h, z]),
    ];
    BellBasis::new(2, vecs).expect("hard-coded Bell vectors are valid")
}

// e^(2 pi i k / d), exact on the four axes so low d bases stay clean
fn root_of_unity(k: usize, d: usize) -> Complex64 {
    if (4 * k) % d == 0 {
        match (4 * k / d) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, TAU * k as f64 / d as f64)
    }
}

/// Maximally entangled basis for any local dimension: vector v = s * d + t
/// pairs |i> with |(i + s) mod d> under Fourier phases e^(2 pi i i t / d).
/// At d = 2 this reproduces the Bell vectors in their standard order.
pub fn me_basis(d: usize) -> Result<BellBasis> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("local dimension must be at least 2, got {d}")));
    }
    let scale = 1.0 / (d as f64).sqrt();
    let mut vectors = Vec::with_capacity(d * d);
    for s in 0..d {
        for t in 0..d {
            let mut v = CVector::zeros(d * d);
            for i in 0..d {
                v[i * d + (i + s) % d] = root_of_unity((i * t) % d, d).scale(scale);
            }
            vectors.push(v);
        }
    }
    BellBasis::new(d, vectors)
}

/// sigma^1 = diag(1, -1); sigma^2 and sigma^3 are its conjugate pair with
/// sigma^1 sigma^2 = i sigma^3 cyclically.
pub fn pauli(j: usize) -> CMatrix {
    let c = Complex64::new;
    match j {
        1 => CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        2 => CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]),
        3 => CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        _ => panic!("pauli index {j} outside 1..=3"),
    }
}

// (+1, -1) eigenvectors of pauli(j)
fn pauli_eigvecs(j: usize) -> (CVector, CVector) {
    let c = Complex64::new;
    let h = c(FRAC_1_SQRT_2, 0.0);
    match j {
        1 => (
            CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
            CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]),
        ),
        2 => (
            CVector::from_vec(vec![h, c(0.0, -FRAC_1_SQRT_2)]),
            CVector::from_vec(vec![h, c(0.0, FRAC_1_SQRT_2)]),
        ),
        3 => (
            CVector::from_vec(vec![h, h]),
            CVector::from_vec(vec![h, -h]),
        ),
        _ => panic!("pauli index {j} outside 1..=3"),
    }
}

/// Single qubit observable with outcomes -1 and +1.
pub fn pauli_observable(label: &str, j: usize) -> SpectralObservable {
    let (up, um) = pauli_eigvecs(j);
    SpectralObservable::from_eigen_groups(label, vec![(-1.0, vec![um]), (1.0, vec![up])])
        .expect("pauli eigenvectors are orthonormal")
}

// total spin component sigma^j x I + I x sigma^j, eigenvalues -2, 0, +2
fn collective_spin(j: usize) -> SpectralObservable {
    let (up, um) = pauli_eigvecs(j);
    let kron = |a: &CVector, b: &CVector| -> CVector {
        product_of(a, b).expect("unit factors give a unit product").amplitudes().clone()
    };
    SpectralObservable::from_eigen_groups(
        &format!("S_{j}"),
        vec![
            (-2.0, vec![kron(&um, &um)]),
            (0.0, vec![kron(&up, &um), kron(&um, &up)]),
            (2.0, vec![kron(&up, &up)]),
        ],
    )
    .expect("spin eigenvectors are orthonormal")
}

/// Observable diagonal in a maximally entangled basis; equal assignment
/// values merge into one outcome.
pub fn bell_diagonal(label: &str, basis: &BellBasis, assignment: &[f64]) -> Result<SpectralObservable> {
    if assignment.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: assignment.len() });
    }
    let mut groups: Vec<(f64, Vec<CVector>)> = Vec::new();
    for (v, a) in assignment.iter().enumerate() {
        match groups.iter_mut().find(|(val, _)| val == a) {
            Some((_, list)) => list.push(basis.vector(v).clone()),
            None => groups.push((*a, vec![basis.vector(v).clone()])),
        }
    }
    SpectralObservable::from_eigen_groups(label, groups)
}

/// A named family of observables with its entropy sum floors: sep_floor
/// holds for every separable state, global_floor for every state.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    name: String,
    observables: Vec<SpectralObservable>,
    sep_floor: f64,
    global_floor: f64,
}

impl OperatorSet {
    fn build(name: &str, observables: Vec<SpectralObservable>, sep_floor: f64, global_floor: f64) -> Self {
        assert!(!observables.is_empty());
        let dim = observables[0].dim();
        assert!(observables.iter().all(|o| o.dim() == dim), "mixed dimensions in set {name}");
        assert!(
            sep_floor >= global_floor && global_floor >= 0.0,
            "floors out of order in set {name}"
        );
        Self { name: name.to_string(), observables, sep_floor, global_floor }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn observables(&self) -> &[SpectralObservable] {
        &self.observables
    }

    pub fn dim(&self) -> usize {
        self.observables[0].dim()
    }

    pub fn sep_floor(&self) -> f64 {
        self.sep_floor
    }

    pub fn global_floor(&self) -> f64 {
        self.global_floor
    }
}

pub fn set_xy() -> OperatorSet {
    let b = bell_basis_2();
    let obs = vec![
        bell_diagonal("X", &b, &SIGNS_X).expect("sign table is a valid assignment"),
        bell_diagonal("Y", &b, &SIGNS_Y).expect("sign table is a valid assignment"),
    ];
    OperatorSet::build("xy", obs, LN_2, 0.0)
}

pub fn set_xyz() -> OperatorSet {
    let b = bell_basis_2();
    let obs = vec![
        bell_diagonal("X", &b, &SIGNS_X).expect("sign table is a valid assignment"),
        bell_diagonal("Y", &b, &SIGNS_Y).expect("sign table is a valid assignment"),
        bell_diagonal("Z", &b, &SIGNS_Z).expect("sign table is a valid assignment"),
    ];
    OperatorSet::build("xyz", obs, 2.0 * LN_2, 0.0)
}

pub fn set_13() -> OperatorSet {
    let b = bell_basis_2();
    let obs = (0..4)
        .map(|v| {
            let mut a = [-1.0; 4];
            a[v] = 1.0;
            bell_diagonal(&format!("X^(1,3)_{}", v + 1), &b, &a)
                .expect("rank one assignment is valid")
        })
        .collect();
    OperatorSet::build("1_3", obs, 2.0 * LN_2, 0.0)
}

pub fn set_112() -> OperatorSet {
    let b = bell_basis_2();
    let rows: [[f64; 4]; 6] = [
        [0.0, 0.0, 1.0, -1.0],
        [0.0, 1.0, 0.0, -1.0],
        [0.0, 1.0, -1.0, 0.0],
        [1.0, 0.0, 0.0, -1.0],
        [1.0, 0.0, -1.0, 0.0],
        [1.0, -1.0, 0.0, 0.0],
    ];
    let obs = rows
        .iter()
        .enumerate()
        .map(|(j, row)| {
            bell_diagonal(&format!("X^(1,1,2)_{}", j + 1), &b, row)
                .expect("three outcome assignment is valid")
        })
        .collect();
    OperatorSet::build("1_1_2", obs, 5.0 * LN_2, 0.0)
}

pub fn set_1111() -> OperatorSet {
    let b = bell_basis_2();
    let obs = vec![bell_diagonal("X^(1,1,1,1)", &b, &[1.0, 2.0, 3.0, 4.0])
        .expect("distinct assignment is valid")];
    OperatorSet::build("1111", obs, LN_2, 0.0)
}

pub fn set_spin() -> OperatorSet {
    let obs = (1..=3).map(collective_spin).collect();
    OperatorSet::build("spin", obs, 3.0 * LN_2, 0.0)
}

/// One nondegenerate observable over the maximally entangled basis,
/// eigenvalues 1..d^2.
pub fn set_extreme(d: usize) -> Result<OperatorSet> {
    let b = me_basis(d)?;
    let assignment: Vec<f64> = (1..=d * d).map(|v| v as f64).collect();
    let obs = vec![bell_diagonal("X^(1,..,1)", &b, &assignment)?];
    Ok(OperatorSet::build("extreme", obs, (d as f64).ln(), 0.0))
}

/// d^2 two outcome observables 2|phi_v><phi_v| - I over the maximally
/// entangled basis.
pub fn set_one_rest(d: usize) -> Result<OperatorSet> {
    let b = me_basis(d)?;
    let n = d * d;
    let obs = (0..n)
        .map(|v| {
            let mut a = vec![-1.0; n];
            a[v] = 1.0;
            bell_diagonal(&format!("X^(1,{})_{}", n - 1, v + 1), &b, &a)
        })
        .collect::<Result<Vec<_>>>()?;
    let floor = d as f64 * binary_entropy(1.0 / d as f64);
    Ok(OperatorSet::build("one_rest", obs, floor, 0.0))
}

/// Registry lookup for the CLI set names. The two qubit sets require d = 2;
/// extreme and one_rest accept any local dimension.
pub fn set_by_name(name: &str, d: usize) -> Result<OperatorSet> {
    let two_qubit = matches!(name, "xy" | "xyz" | "1_3" | "1_1_2" | "1111" | "spin");
    if two_qubit && d != 2 {
        return Err(Error::InvalidInput(format!("set {name} is defined for d = 2 only, got d = {d}")));
    }
    match name {
        "xy" => Ok(set_xy()),
        "xyz" => Ok(set_xyz()),
        "1_3" => Ok(set_13()),
        "1_1_2" => Ok(set_112()),
        "1111" => Ok(set_1111()),
        "spin" => Ok(set_spin()),
        "extreme" => set_extreme(d),
        "one_rest" => set_one_rest(d),
        _ => Err(Error::InvalidInput(format!(
            "unknown set {name}, expected one of {}",
            SET_NAMES.join("|")
        ))),
    }
}
