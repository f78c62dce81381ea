//! Dense complex eigendecomposition backed by LAPACK `zgeev`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest accepted residual `max_i ‖A r_i − λ_i r_i‖ / ‖A‖_F`.
pub const EIG_RESIDUAL_TOL: f64 = 1e-10;

/// Eigenvalues with right and left eigenvectors of a general complex matrix.
///
/// Columns of `right` are unit-norm right eigenvectors. Columns of `left`
/// are scaled so that `left[:, i]ᴴ · right[:, i] = 1`; for simple
/// eigenvalues this makes the pair biorthonormal.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<Complex64>,
    pub right: DMatrix<Complex64>,
    pub left: DMatrix<Complex64>,
    pub residual: f64,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Max deviation of `⟨l_i|r_j⟩` from `δ_ij`.
    pub fn biorthogonality_error(&self) -> f64 {
        let overlap = self.left.adjoint() * &self.right;
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((overlap[(i, j)] - target).norm());
            }
        }
        worst
    }
}

/// Eigen-ordering used everywhere: real part ascending, then imaginary part.
pub fn eig_order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn check_finite(a: &DMatrix<Complex64>) -> Result<()> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::InvalidInput(format!(
            "eigensolver needs a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    Ok(())
}

struct Geev {
    values: Vec<Complex64>,
    left: Option<Vec<Complex64>>,
    right: Option<Vec<Complex64>>,
}

fn zgeev(a: &DMatrix<Complex64>, vectors: bool) -> Result<Geev> {
    let n = a.nrows();
    let ni = n as i32;
    let mut work_a: Vec<Complex64> = a.as_slice().to_vec();
    let mut w = vec![Complex64::default(); n];
    let job = if vectors { b'V' } else { b'N' };
    let vec_len = if vectors { n * n } else { 1 };
    let mut vl = vec![Complex64::default(); vec_len];
    let mut vr = vec![Complex64::default(); vec_len];
    let ld = if vectors { ni } else { 1 };
    let mut rwork = vec![0.0f64; 2 * n];
    let mut info = 0;

    let mut query = [Complex64::default()];
    unsafe {
        lapack::zgeev(
            job, job, ni, &mut work_a, ni, &mut w, &mut vl, ld, &mut vr, ld, &mut query, -1,
            &mut rwork, &mut info,
        );
    }
    let lwork = (query[0].re as usize).max(2 * n).max(1);
    let mut work = vec![Complex64::default(); lwork];
    unsafe {
        lapack::zgeev(
            job,
            job,
            ni,
            &mut work_a,
            ni,
            &mut w,
            &mut vl,
            ld,
            &mut vr,
            ld,
            &mut work,
            lwork as i32,
            &mut rwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigen {
            dim: n,
            residual: f64::INFINITY,
        });
    }
    Ok(Geev {
        values: w,
        left: vectors.then_some(vl),
        right: vectors.then_some(vr),
    })
}

/// Eigenvalues only, sorted by [`eig_order`].
pub fn eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    check_finite(a)?;
    let mut values = zgeev(a, false)?.values;
    values.sort_by(eig_order);
    Ok(values)
}

/// Full eigensystem with biorthonormalized left vectors, sorted by [`eig_order`].
pub fn dense_eig(a: &DMatrix<Complex64>) -> Result<EigenSystem> {
    check_finite(a)?;
    let n = a.nrows();
    let geev = zgeev(a, true)?;
    let vr = DMatrix::from_column_slice(n, n, geev.right.as_deref().unwrap_or(&[]));
    let vl = DMatrix::from_column_slice(n, n, geev.left.as_deref().unwrap_or(&[]));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig_order(&geev.values[i], &geev.values[j]));

    let values: Vec<Complex64> = order.iter().map(|&i| geev.values[i]).collect();
    let mut right = DMatrix::<Complex64>::zeros(n, n);
    let mut left = DMatrix::<Complex64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let r = vr.column(src);
        let norm = r.norm();
        let r = if norm > 0.0 { r / Complex64::from(norm) } else { r.into_owned() };
        let l = vl.column(src).into_owned();
        let overlap = l.dotc(&r);
        // Non-normalizable pairs sit on exceptional points; leave them as returned.
        let l = if overlap.norm() > f64::EPSILON {
            l / overlap.conj()
        } else {
            l
        };
        right.set_column(dst, &r);
        left.set_column(dst, &l);
    }

    let scale = a.norm();
    let mut residual = 0.0f64;
    if scale > 0.0 {
        for (i, lambda) in values.iter().enumerate() {
            let r = right.column(i);
            let res = (a * r - r * *lambda).norm() / scale;
            residual = residual.max(res);
        }
    }
    if !(residual <= EIG_RESIDUAL_TOL) {
        return Err(Error::Eigen { dim: n, residual });
    }
    Ok(EigenSystem {
        values,
        right,
        left,
        residual,
    })
}

/// Singular values (descending) of a general complex matrix.
pub fn singular_values(a: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let m = a.nrows();
    let n = a.ncols();
    if m == 0 || n == 0 {
        return Ok(Vec::new());
    }
    let mut work_a: Vec<Complex64> = a.as_slice().to_vec();
    let k = m.min(n);
    let mut s = vec![0.0f64; k];
    let mut u = [Complex64::default()];
    let mut vt = [Complex64::default()];
    let mut rwork = vec![0.0f64; 5 * k];
    let mut info = 0;
    let mut query = [Complex64::default()];
    unsafe {
        lapack::zgesvd(
            b'N', b'N', m as i32, n as i32, &mut work_a, m as i32, &mut s, &mut u, 1, &mut vt, 1,
            &mut query, -1, &mut rwork, &mut info,
        );
    }
    let lwork = (query[0].re as usize).max(2 * k + m.max(n));
    let mut work = vec![Complex64::default(); lwork];
    unsafe {
        lapack::zgesvd(
            b'N',
            b'N',
            m as i32,
            n as i32,
            &mut work_a,
            m as i32,
            &mut s,
            &mut u,
            1,
            &mut vt,
            1,
            &mut work,
            lwork as i32,
            &mut rwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigen {
            dim: k,
            residual: f64::INFINITY,
        });
    }
    Ok(s)
}
