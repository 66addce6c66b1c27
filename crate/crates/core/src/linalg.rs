//! Dense helpers on top of `nalgebra`: largest singular value by power
//! iteration, Frobenius norm, smallest symmetric eigenvalue.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const POWER_TOL: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 100_000;

/// Largest singular value of `b` by power iteration on `bᵀb`.
///
/// The start vector is fixed, so results are reproducible. Iteration stops
/// once the Rayleigh quotient changes by less than `tol` (relative) on three
/// consecutive steps.
pub fn sigma_max(b: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<f64> {
    let cols = b.ncols();
    if cols == 0 || b.nrows() == 0 {
        return Ok(0.0);
    }
    let golden = 0.618_033_988_749_894_9;
    let mut v = DVector::from_fn(cols, |i, _| 1.0 + (golden * i as f64).fract());
    v /= v.norm();
    let mut last = 0.0;
    let mut calm = 0;
    for _ in 0..max_iter {
        let bv = b * &v;
        let rayleigh = bv.norm_squared();
        if rayleigh == 0.0 {
            return Ok(0.0);
        }
        let mut w = b.tr_mul(&bv);
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(rayleigh.sqrt());
        }
        w /= wn;
        if (rayleigh - last).abs() <= tol * rayleigh {
            calm += 1;
            if calm >= 3 {
                return Ok(rayleigh.sqrt());
            }
        } else {
            calm = 0;
        }
        last = rayleigh;
        v = w;
    }
    Err(Error::Convergence {
        what: "power iteration for the largest singular value".into(),
        iterations: max_iter,
    })
}

/// Top right singular vector of `b` (unit norm), by the same iteration.
pub fn top_right_singular_vector(b: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<DVector<f64>> {
    let cols = b.ncols();
    let golden = 0.618_033_988_749_894_9;
    let mut v = DVector::from_fn(cols, |i, _| 1.0 + (golden * i as f64).fract());
    v /= v.norm();
    for _ in 0..max_iter {
        let mut w = b.tr_mul(&(b * &v));
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(v);
        }
        w /= wn;
        let change = (&w - &v).norm();
        v = w;
        if change <= tol.sqrt() {
            return Ok(v);
        }
    }
    Err(Error::Convergence {
        what: "power iteration for the top singular vector".into(),
        iterations: max_iter,
    })
}

pub fn frobenius(b: &DMatrix<f64>) -> f64 {
    b.norm()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_has_unit_norm() {
        let m = DMatrix::<f64>::identity(50, 50);
        assert!((sigma_max(&m, POWER_TOL, POWER_MAX_ITER).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let v = DVector::from_vec(vec![3.0, 1.0, 4.0, -1.0]);
        let m = &u * v.transpose();
        let want = u.norm() * v.norm();
        assert!((sigma_max(&m, POWER_TOL, POWER_MAX_ITER).unwrap() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn random_matches_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = DMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
            let svd = m.clone().svd(false, false);
            let want = svd.singular_values.max();
            let got = sigma_max(&m, POWER_TOL, POWER_MAX_ITER).unwrap();
            assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
            assert!(got <= frobenius(&m) * (1.0 + 1e-15));
        }
    }

    #[test]
    fn frobenius_example() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 4.0, 0.0, 0.0]);
        assert_eq!(frobenius(&m), 5.0);
    }

    #[test]
    fn non_convergence_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = DMatrix::from_fn(30, 30, |_, _| rng.gen_range(-1.0..1.0));
        assert!(matches!(
            sigma_max(&m, 0.0, 5),
            Err(Error::Convergence { iterations: 5, .. })
        ));
    }

    #[test]
    fn min_eigenvalue_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 0.25, 7.0]));
        assert!((min_symmetric_eigenvalue(&m) - 0.25).abs() < 1e-14);
    }
}
