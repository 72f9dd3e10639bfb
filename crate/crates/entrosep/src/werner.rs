//! One parameter family interpolating the maximally mixed state and the
//! singlet, with closed form entropy sums and detection thresholds.

use crate::criteria::{two_qubit_criteria, TWO_QUBIT_IDS};
use crate::entropy::{binary_entropy, f_func};
use crate::observables::bell_basis_2;
use crate::qstate::DensityMatrix;
use crate::{CMatrix, Error, Result};

/// The family is separable exactly up to this mixing parameter.
pub const SEPARABLE_MAX_P: f64 = 1.0 / 3.0;

/// w_p = (1-p)/4 I + p |psi_4><psi_4| with psi_4 the singlet.
#[derive(Debug, Clone)]
pub struct WernerPoint {
    p: f64,
    state: DensityMatrix,
}

impl WernerPoint {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }
}

pub fn werner(p: f64) -> Result<WernerPoint> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("mixing parameter {p} outside [0, 1]")));
    }
    let proj = bell_basis_2().projector(3);
    let mat = CMatrix::identity(4, 4).scale((1.0 - p) / 4.0) + proj.scale(p);
    let state = DensityMatrix::new(2, 2, mat).expect("the family is a valid state for p in [0,1]");
    Ok(WernerPoint { p, state })
}

/// Closed form total uncertainty of a registered criterion on w_p. The
/// singlet overlap is (1+3p)/4, the other three Bell overlaps (1-p)/4, and
/// each two outcome component observable splits as (1 +- p)/2.
pub fn closed_form(criterion_id: &str, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("mixing parameter {p} outside [0, 1]")));
    }
    let half = (1.0 + p) / 2.0;
    let q_small = (1.0 - p) / 4.0;
    let q_big = (1.0 + 3.0 * p) / 4.0;
    match criterion_id {
        "E8-XY" => Ok(2.0 * binary_entropy(half)),
        "E12-XYZ" => Ok(3.0 * binary_entropy(half)),
        "E14-1_3" => Ok(3.0 * binary_entropy(q_small) + binary_entropy(q_big)),
        "E16-1_1_2" => {
            Ok(3.0 * binary_entropy(half) + 3.0 * f_func(q_big) + 9.0 * f_func(q_small))
        }
        "E18-1111" => Ok(3.0 * f_func(q_small) + f_func(q_big)),
        "E22-SPIN" => Ok(3.0 * f_func(half) + 6.0 * f_func(q_small)),
        _ => Err(Error::InvalidInput(format!(
            "unknown criterion id {criterion_id}, expected one of {}",
            TWO_QUBIT_IDS.join("|")
        ))),
    }
}

/// Separable floor of a registered two qubit criterion.
pub fn bound(criterion_id: &str) -> Result<f64> {
    two_qubit_criteria()
        .into_iter()
        .find(|c| c.id() == criterion_id)
        .map(|c| c.set().sep_floor())
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "unknown criterion id {criterion_id}, expected one of {}",
                TWO_QUBIT_IDS.join("|")
            ))
        })
}

/// Detection threshold p*: the unique parameter where the closed form
/// crosses its floor; w_p is certified entangled for p > p*. The closed
/// form is checked to be decreasing on a 1000 point grid before bisection.
pub fn threshold(criterion_id: &str, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("bisection tolerance {tol} must be positive")));
    }
    let floor = bound(criterion_id)?;
    let h = |p: f64| closed_form(criterion_id, p).expect("p stays in range") - floor;
    let h0 = h(0.0);
    if h0 <= 0.0 {
        return Err(Error::NoThreshold(format!("criterion {criterion_id} already fires at p = 0")));
    }
    let grid = 1000;
    let mut prev = h0;
    for i in 1..=grid {
        let p = i as f64 / grid as f64;
        let cur = h(p);
        if cur > prev + 1e-12 {
            return Err(Error::Numerical(format!(
                "closed form for {criterion_id} is not decreasing near p = {p}"
            )));
        }
        prev = cur;
    }
    if prev >= 0.0 {
        return Err(Error::NoThreshold(format!(
            "criterion {criterion_id} never fires on this family"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One sweep grid point: (value, violated) per requested criterion plus the
/// positive partial transpose flag of the actual matrix.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub p: f64,
    pub entries: Vec<(f64, bool)>,
    pub ppt: bool,
}

pub fn sweep(criterion_ids: &[String], p_min: f64, p_max: f64, steps: usize) -> Result<Vec<SweepRow>> {
    if !(0.0..=1.0).contains(&p_min) || !(0.0..=1.0).contains(&p_max) || p_min > p_max {
        return Err(Error::InvalidInput(format!(
            "sweep range [{p_min}, {p_max}] must sit inside [0, 1]"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("sweep needs at least one step".into()));
    }
    if steps == 1 && p_min != p_max {
        return Err(Error::InvalidInput("a single step needs p-min = p-max".into()));
    }
    let floors = criterion_ids.iter().map(|id| bound(id)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let p = if steps == 1 {
            p_min
        } else {
            p_min + (p_max - p_min) * i as f64 / (steps - 1) as f64
        };
        let entries = criterion_ids
            .iter()
            .zip(&floors)
            .map(|(id, floor)| {
                let value = closed_form(id, p)?;
                Ok((value, value < floor - crate::TOL_VERDICT))
            })
            .collect::<Result<Vec<_>>>()?;
        let ppt = werner(p)?.state().is_ppt();
        rows.push(SweepRow { p, entries, ppt });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::entropic_uncertainty;
    use crate::observables::set_xyz;
    use crate::qstate::{rng_stream, tensor_product};
    use num_complex::Complex64;
    use rand::Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn endpoints_are_maximally_mixed_and_singlet() {
        let flat = werner(0.0).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == c { 0.25 } else { 0.0 };
                assert!((flat.state().matrix()[(r, c)] - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        let singlet = werner(1.0).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!((singlet.state().matrix()[(1, 1)].re - h * h).abs() < 1e-12);
        assert!((singlet.state().matrix()[(1, 2)].re + h * h).abs() < 1e-12);
        assert!(werner(-0.1).is_err());
        assert!(werner(1.1).is_err());
    }

    #[test]
    fn ppt_boundary_sits_at_one_third() {
        let at = werner(SEPARABLE_MAX_P).unwrap();
        assert!(at.state().min_pt_eigenvalue().abs() < 1e-9);
        assert!(at.state().is_ppt());
        assert!(!werner(SEPARABLE_MAX_P + 1e-6).unwrap().state().is_ppt());
        assert!(werner(0.2).unwrap().state().is_ppt());
    }

    #[test]
    fn family_commutes_with_local_rotations() {
        let mut rng = rng_stream(41, 0);
        let w = werner(0.63).unwrap();
        for _ in 0..20 {
            let g = CMatrix::from_fn(2, 2, |_, _| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let u = g.qr().q();
            let uu = tensor_product(&u, &u);
            let comm = &uu * w.state().matrix() - w.state().matrix() * &uu;
            let dev = comm.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(dev < 1e-9, "commutator norm {dev:.3e}");
        }
    }

    #[test]
    fn component_uncertainties_are_identical_by_symmetry() {
        let set = set_xyz();
        for p in [0.0, 0.3, 0.77, 1.0] {
            let w = werner(p).unwrap();
            let hs: Vec<f64> = set
                .observables()
                .iter()
                .map(|o| entropic_uncertainty(o, w.state()).unwrap())
                .collect();
            assert!((hs[0] - hs[1]).abs() < 1e-12);
            assert!((hs[0] - hs[2]).abs() < 1e-12);
            assert!((hs[0] - binary_entropy((1.0 + p) / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_forms_match_matrix_pipeline_on_a_grid() {
        let criteria = two_qubit_criteria();
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            let w = werner(p).unwrap();
            for c in &criteria {
                let numeric = c.evaluate(w.state()).unwrap().value;
                let analytic = closed_form(c.id(), p).unwrap();
                assert!(
                    (numeric - analytic).abs() < 1e-9,
                    "{} at p = {p}: {numeric} vs {analytic}",
                    c.id()
                );
            }
        }
    }

    #[test]
    fn triple_form_is_three_halves_of_the_pair_form() {
        for i in 0..=50 {
            let p = i as f64 / 50.0;
            let e8 = closed_form("E8-XY", p).unwrap();
            let e12 = closed_form("E12-XYZ", p).unwrap();
            assert!((e12 - 1.5 * e8).abs() < 1e-12);
        }
    }

    #[test]
    fn thresholds_land_on_the_documented_values() {
        let expected = [
            ("E8-XY", 0.78),
            ("E12-XYZ", 0.65),
            ("E14-1_3", 0.68),
            ("E16-1_1_2", 0.72),
            ("E18-1111", 0.74),
            ("E22-SPIN", 0.55),
        ];
        let mut computed = Vec::new();
        for (id, want) in expected {
            let p = threshold(id, 1e-6).unwrap();
            assert!((p - want).abs() <= 0.01, "{id}: {p} vs {want}");
            // crossing point: closed form meets the floor
            let floor = bound(id).unwrap();
            assert!((closed_form(id, p).unwrap() - floor).abs() < 1e-5);
            assert!(p > SEPARABLE_MAX_P);
            computed.push((id, p));
        }
        let order: Vec<&str> = {
            let mut v = computed.clone();
            v.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
            v.into_iter().map(|(id, _)| id).collect()
        };
        assert_eq!(order, vec!["E22-SPIN", "E12-XYZ", "E14-1_3", "E16-1_1_2", "E18-1111", "E8-XY"]);
    }

    #[test]
    fn threshold_rejects_unknown_ids_and_bad_tolerances() {
        assert!(threshold("E9-NOPE", 1e-6).is_err());
        assert!(threshold("E8-XY", 0.0).is_err());
    }

    #[test]
    fn sweep_flags_follow_the_thresholds() {
        let ids: Vec<String> = TWO_QUBIT_IDS.iter().map(|s| s.to_string()).collect();
        let rows = sweep(&ids, 0.0, 1.0, 4).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].ppt);
        assert!(!rows[3].ppt);
        // p = 0 and p = 1/3 stay clean, p = 1 fires everything
        assert!(rows[0].entries.iter().all(|(_, v)| !v));
        assert!(rows[3].entries.iter().all(|(_, v)| *v));

        let only_spin = sweep(&ids, 0.6, 0.6, 1).unwrap();
        let flags: Vec<bool> = only_spin[0].entries.iter().map(|(_, v)| *v).collect();
        assert_eq!(flags, vec![false, false, false, false, false, true]);

        assert!(sweep(&ids, 0.5, 0.4, 3).is_err());
        assert!(sweep(&ids, 0.0, 1.5, 3).is_err());
        assert!(sweep(&ids, 0.0, 1.0, 0).is_err());
    }
}
