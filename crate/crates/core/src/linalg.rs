//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn complexify(m: &RMat) -> CMat {
    m.map(c)
}

pub fn complexify_vec(v: &RVec) -> CVec {
    v.map(c)
}

pub fn conj(m: &CMat) -> CMat {
    m.map(|x| x.conj())
}

pub fn conj_vec(v: &CVec) -> CVec {
    v.map(|x| x.conj())
}

pub fn diag_c(values: &[Complex64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(values))
}

pub fn diag_r(values: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(values.len(), values.iter().map(|&x| c(x))))
}

/// Frobenius norm of `a - b`.
pub fn frob_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm()
}

/// Complex SVD `m = u * diag(s) * vh` with singular values sorted descending.
pub fn svd_desc(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (u, s, vh) = polished_svd(m);
    let order = descending(&s);
    let n = m.nrows();
    let mut us = CMat::zeros(n, n);
    let mut vhs = CMat::zeros(n, n);
    let mut ss = Vec::with_capacity(n);
    for (k, &src) in order.iter().enumerate() {
        us.set_column(k, &u.column(src));
        vhs.set_row(k, &vh.row(src));
        ss.push(s[src]);
    }
    (us, ss, vhs)
}

/// Real SVD `m = u * diag(s) * vt`, descending, with the first significant
/// entry of every column of `u` made positive (the matching row of `vt`
/// flips with it).
pub fn real_svd_desc(m: &RMat) -> (RMat, Vec<f64>, RMat) {
    let (u, s, vt) = polished_svd(&complexify(m));
    let (u, vt) = (u.map(|z| z.re), vt.map(|z| z.re));
    let order = descending(&s);
    let n = m.nrows();
    let mut us = RMat::zeros(n, n);
    let mut vts = RMat::zeros(n, n);
    let mut ss = Vec::with_capacity(n);
    for (k, &src) in order.iter().enumerate() {
        let mut col = u.column(src).into_owned();
        let mut row = vt.row(src).into_owned();
        if first_significant(col.iter().copied()) < 0.0 {
            col.neg_mut();
            row.neg_mut();
        }
        us.set_column(k, &col);
        vts.set_row(k, &row);
        ss.push(s[src]);
    }
    (us, ss, vts)
}

fn descending(s: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    order
}

/// nalgebra's SVD followed by one-sided Jacobi sweeps on `m v`, which bring
/// the reconstruction error of clustered spectra down to rounding level.
/// Real input stays real throughout.
fn polished_svd(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let n = m.ncols();
    let svd = m.clone().svd(true, true);
    let u0 = svd.u.expect("u requested");
    let vh0 = svd.v_t.expect("v_t requested");
    let s0: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = s0.iter().copied().fold(0.0, f64::max);
    if m.nrows() != n || n == 0 || s0.iter().any(|&x| x <= 1e-10 * smax) {
        return (u0, s0, vh0);
    }
    let mut v = vh0.adjoint();
    let mut b = m * &v;
    for _ in 0..30 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = b.column(p).norm_squared();
                let beta = b.column(q).norm_squared();
                let g = b.column(p).dotc(&b.column(q));
                if g.norm() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = g.conj() / g.norm();
                let zeta = (beta - alpha) / (2.0 * g.norm());
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut b, &mut v] {
                    for i in 0..n {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)] * phase;
                        mat[(i, p)] = xp * cs - xq * sn;
                        mat[(i, q)] = xp * sn + xq * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let s: Vec<f64> = (0..n).map(|k| b.column(k).norm()).collect();
    let mut u = b;
    for (k, &sk) in s.iter().enumerate() {
        u.column_mut(k).unscale_mut(sk);
    }
    (u, s, v.adjoint())
}

fn first_significant(mut it: impl Iterator<Item = f64>) -> f64 {
    it.find(|x| x.abs() > 1e-12).unwrap_or(1.0)
}

/// Eigendecomposition of a real symmetric matrix, eigenvalues descending,
/// eigenvectors as columns with a positive first significant entry.
pub fn sym_eigen_desc(m: &RMat) -> (Vec<f64>, RMat) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep the solver order
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let mut vecs = RMat::zeros(n, n);
    let mut sorted = Vec::with_capacity(n);
    for (k, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        if first_significant(col.iter().copied()) < 0.0 {
            col.neg_mut();
        }
        vecs.set_column(k, &col);
        sorted.push(vals[src]);
    }
    (sorted, vecs)
}

/// Principal logarithm of a unitary matrix via its Schur form.
pub fn unitary_log(u: &CMat) -> Result<CMat> {
    let n = u.nrows();
    let unitarity = frob_diff(&(u * u.adjoint()), &CMat::identity(n, n));
    if unitarity > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "matrix is not unitary (residual {unitarity:.3e})"
        )));
    }
    let (q, t) = u.clone().schur().unpack();
    let mut logd = CMat::zeros(n, n);
    for k in 0..n {
        let z = t[(k, k)];
        logd[(k, k)] = Complex64::new(0.0, z.arg());
    }
    let g = &q * logd * q.adjoint();
    // a normal matrix has a diagonal Schur form; check the round trip
    let back = exp_anti_hermitian(&g);
    let err = frob_diff(&back, u);
    if err > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "unitary logarithm failed to round-trip (residual {err:.3e})"
        )));
    }
    Ok(g)
}

/// `exp(g)` for anti-Hermitian `g`, through the Hermitian eigendecomposition
/// of `-i g`.
pub fn exp_anti_hermitian(g: &CMat) -> CMat {
    let n = g.nrows();
    let h = g.map(|x| x * -I);
    let h = (&h + h.adjoint()).map(|x| x * 0.5);
    let eig = h.symmetric_eigen();
    let phases = CVec::from_iterator(n, eig.eigenvalues.iter().map(|&e| (I * e).exp()));
    &eig.eigenvectors * CMat::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}
