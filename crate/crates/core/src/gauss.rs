//! Linear algebra of multimode Gaussian unitaries.
//!
//! A Gaussian unitary `O` is carried by its Heisenberg action on the
//! annihilation operators,
//!
//! ```text
//! O† a O = Y a + X a† + z,
//! ```
//!
//! which for real data is the same statement as `a'† = X a + Y a† + z`
//! (the Duschinsky form). Products of unitaries compose these maps; the
//! elementary maps are
//!
//! * rotation `R(U)`:      `R† a R = U a`,
//! * squeezer `S(ξ)`:      `S† a S = cosh|ξ| a + e^{i arg ξ} sinh|ξ| a†` (per mode),
//! * displacement `D(α)`:  `D† a D = a + α`.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    c, complexify, complexify_vec, conj, conj_vec, diag_r, frob_diff, real_svd_desc, svd_desc,
    sym_eigen_desc, CMat, CVec, RMat, RVec,
};

/// Tolerance on the symplectic residuals of freshly constructed transforms.
pub const CONSTRUCTION_TOL: f64 = 1e-10;
/// Residual beyond which a transform is treated as corrupted input.
pub const INVARIANT_GATE: f64 = 1e-8;

/// Heisenberg map `a -> Y a + X a† + z` of a Gaussian unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovTransform {
    pub x: CMat,
    pub y: CMat,
    pub z: CVec,
}

impl BogoliubovTransform {
    pub fn identity(modes: usize) -> Self {
        Self {
            x: CMat::zeros(modes, modes),
            y: CMat::identity(modes, modes),
            z: CVec::zeros(modes),
        }
    }

    pub fn rotation(u: &CMat) -> Self {
        let m = u.nrows();
        Self {
            x: CMat::zeros(m, m),
            y: u.clone(),
            z: CVec::zeros(m),
        }
    }

    /// Independent single-mode squeezers `S(ξ_1) ⊗ … ⊗ S(ξ_M)`.
    pub fn squeeze(xi: &[Complex64]) -> Self {
        let m = xi.len();
        let mut x = CMat::zeros(m, m);
        let mut y = CMat::zeros(m, m);
        for (j, &s) in xi.iter().enumerate() {
            let r = s.norm();
            let phase = if r > 0.0 {
                s / r
            } else {
                Complex64::new(1.0, 0.0)
            };
            y[(j, j)] = c(r.cosh());
            x[(j, j)] = phase * r.sinh();
        }
        Self {
            x,
            y,
            z: CVec::zeros(m),
        }
    }

    pub fn displacement(alpha: &CVec) -> Self {
        let m = alpha.len();
        Self {
            x: CMat::zeros(m, m),
            y: CMat::identity(m, m),
            z: alpha.clone(),
        }
    }

    pub fn modes(&self) -> usize {
        self.y.nrows()
    }

    /// Map of the operator product `self · inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let y = &self.y * &inner.y + &self.x * conj(&inner.x);
        let x = &self.y * &inner.x + &self.x * conj(&inner.y);
        let z = &self.y * &inner.z + &self.x * conj_vec(&inner.z) + &self.z;
        Self { x, y, z }
    }

    /// `(‖Y Y† − X X† − I‖_F, ‖X Yᵀ − (X Yᵀ)ᵀ‖_F)`.
    pub fn symplectic_residuals(&self) -> (f64, f64) {
        let m = self.modes();
        let gram = &self.y * self.y.adjoint() - &self.x * self.x.adjoint();
        let r1 = frob_diff(&gram, &CMat::identity(m, m));
        let xyt = &self.x * self.y.transpose();
        let r2 = frob_diff(&xyt, &xyt.transpose());
        (r1, r2)
    }

    pub fn check(&self, tolerance: f64) -> Result<()> {
        let (r1, r2) = self.symplectic_residuals();
        if !(r1 <= tolerance) {
            return Err(Error::InvariantViolation {
                what: "YY†-XX†-I",
                residual: r1,
                tolerance,
            });
        }
        if !(r2 <= tolerance) {
            return Err(Error::InvariantViolation {
                what: "XYᵀ asymmetry",
                residual: r2,
                tolerance,
            });
        }
        Ok(())
    }

    fn check_dims(&self) -> Result<()> {
        let m = self.modes();
        if self.y.ncols() != m || self.x.shape() != (m, m) || self.z.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "transform blocks X {:?}, Y {:?}, z {}",
                self.x.shape(),
                self.y.shape(),
                self.z.len()
            )));
        }
        Ok(())
    }
}

/// Doktorov factorization `U_Dok = R(U2) S(ln L) R(U1) D(β)` from the SVD
/// `J = U2 · diag(l) · U1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoktorovFactors {
    pub u2: RMat,
    pub l: Vec<f64>,
    pub u1: RMat,
    pub beta: RVec,
}

impl DoktorovFactors {
    pub fn modes(&self) -> usize {
        self.l.len()
    }

    pub fn duschinsky(&self) -> RMat {
        &self.u2 * RMat::from_diagonal(&RVec::from_column_slice(&self.l)) * &self.u1
    }

    /// Heisenberg map of the full Doktorov operator.
    pub fn transform(&self) -> BogoliubovTransform {
        let squeeze: Vec<Complex64> = self.l.iter().map(|&l| c(l.ln())).collect();
        BogoliubovTransform::rotation(&complexify(&self.u2))
            .compose(&BogoliubovTransform::squeeze(&squeeze))
            .compose(&BogoliubovTransform::rotation(&complexify(&self.u1)))
            .compose(&BogoliubovTransform::displacement(&complexify_vec(
                &self.beta,
            )))
    }
}

fn check_square(j: &RMat, delta: &RVec) -> Result<()> {
    if j.nrows() != j.ncols() || j.nrows() != delta.len() || j.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "J is {:?}, delta has length {}",
            j.shape(),
            delta.len()
        )));
    }
    Ok(())
}

/// Condition number of `J`; errors when it is singular to working precision.
pub fn duschinsky_condition(j: &RMat) -> Result<f64> {
    let (_, s, _) = real_svd_desc(j);
    let smax = s[0];
    let smin = *s.last().unwrap();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !condition.is_finite() || condition > 1e13 {
        return Err(Error::SingularDuschinsky { condition });
    }
    Ok(condition)
}

/// Duschinsky relation as a Bogoliubov map:
/// `X = (J − J⁻ᵀ)/2`, `Y = (J + J⁻ᵀ)/2`, `z = δ/√2`.
pub fn bogoliubov_from_duschinsky(j: &RMat, delta: &RVec) -> Result<BogoliubovTransform> {
    check_square(j, delta)?;
    duschinsky_condition(j)?;
    let jit = j
        .transpose()
        .lu()
        .try_inverse()
        .ok_or(Error::SingularDuschinsky {
            condition: f64::INFINITY,
        })?;
    let x = (j - &jit) * 0.5;
    let y = (j + &jit) * 0.5;
    Ok(BogoliubovTransform {
        x: complexify(&x),
        y: complexify(&y),
        z: complexify_vec(&(delta / std::f64::consts::SQRT_2)),
    })
}

pub fn doktorov_factorize(j: &RMat, delta: &RVec) -> Result<DoktorovFactors> {
    check_square(j, delta)?;
    duschinsky_condition(j)?;
    let (u2, l, u1) = real_svd_desc(j);
    let beta = j
        .clone()
        .lu()
        .solve(delta)
        .ok_or(Error::SingularDuschinsky {
            condition: f64::INFINITY,
        })?
        / std::f64::consts::SQRT_2;
    Ok(DoktorovFactors { u2, l, u1, beta })
}

/// Map of `U_Dok · R(U_htᵀ) · S(Ξ) · D(α)` for one value of κ.
pub fn compose_chain(
    dok: &DoktorovFactors,
    u_ht: &RMat,
    xi: &[Complex64],
    alpha: &[Complex64],
) -> Result<BogoliubovTransform> {
    let m = dok.modes();
    if u_ht.shape() != (m, m) || xi.len() != m || alpha.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "Doktorov has {m} modes; U_ht {:?}, xi {}, alpha {}",
            u_ht.shape(),
            xi.len(),
            alpha.len()
        )));
    }
    Ok(dok
        .transform()
        .compose(&BogoliubovTransform::rotation(&complexify(&u_ht.transpose())))
        .compose(&BogoliubovTransform::squeeze(xi))
        .compose(&BogoliubovTransform::displacement(&CVec::from_column_slice(
            alpha,
        ))))
}

/// Canonical form `O = R(V) S(Σ) R(W)† D(γ)` of a pure Gaussian unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMessiahForm {
    pub v: CMat,
    pub sigma: Vec<f64>,
    pub w: CMat,
    pub gamma: CVec,
}

impl BlochMessiahForm {
    pub fn identity(modes: usize) -> Self {
        Self {
            v: CMat::identity(modes, modes),
            sigma: vec![0.0; modes],
            w: CMat::identity(modes, modes),
            gamma: CVec::zeros(modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.sigma.len()
    }

    /// `Y = V cosh Σ W†`, `X = V sinh Σ Wᵀ`, `z = Y γ + X γ*`.
    pub fn transform(&self) -> BogoliubovTransform {
        let ch: Vec<f64> = self.sigma.iter().map(|s| s.cosh()).collect();
        let sh: Vec<f64> = self.sigma.iter().map(|s| s.sinh()).collect();
        let y = &self.v * diag_r(&ch) * self.w.adjoint();
        let x = &self.v * diag_r(&sh) * self.w.transpose();
        let z = &y * &self.gamma + &x * conj_vec(&self.gamma);
        BogoliubovTransform { x, y, z }
    }
}

/// Couplings below this (relative to ‖X‖) do not merge singular triplets.
const COUPLING_TOL: f64 = 1e-13;
/// Squeezing below which a mode is treated as unsqueezed.
const ZERO_SQUEEZE: f64 = 1e-12;
const SIGMA_TIE: f64 = 1e-12;

/// Bloch-Messiah refactorization of a Gaussian map.
///
/// `Y = V C W†` comes from one SVD. `P = V† X W*` is then block diagonal
/// over clusters of (near-)degenerate singular values; a Takagi
/// factorization `P_b = R S Rᵀ` of every block rotates `V_b -> V_b R`,
/// `W_b -> W_b R`, which leaves `Y` unchanged and makes `V† X W*` real
/// diagonal.
pub fn bloch_messiah(b: &BogoliubovTransform) -> Result<BlochMessiahForm> {
    b.check_dims()?;
    b.check(INVARIANT_GATE)?;
    let m = b.modes();

    let (mut v, _, wh) = svd_desc(&b.y);
    let mut w = wh.adjoint();
    let p = v.adjoint() * &b.x * conj(&w);

    let scale = b.x.norm().max(1.0);
    let clusters = coupled_clusters(&p, COUPLING_TOL * scale);
    let mut s = vec![0.0; m];
    for idx in &clusters {
        let block = CMat::from_fn(idx.len(), idx.len(), |i, j| p[(idx[i], idx[j])]);
        let (r, vals) = takagi(&block);
        let vb = CMat::from_fn(m, idx.len(), |i, j| v[(i, idx[j])]) * &r;
        let wb = CMat::from_fn(m, idx.len(), |i, j| w[(i, idx[j])]) * &r;
        for (k, &col) in idx.iter().enumerate() {
            v.set_column(col, &vb.column(k));
            w.set_column(col, &wb.column(k));
            s[col] = vals[k];
        }
    }
    let mut sigma: Vec<f64> = s.iter().map(|x| x.asinh()).collect();

    canonical_phases(&mut v, &mut w, &sigma);
    let order = canonical_order(&v, &sigma);
    let v = CMat::from_fn(m, m, |i, j| v[(i, order[j])]);
    let w = CMat::from_fn(m, m, |i, j| w[(i, order[j])]);
    sigma = order.iter().map(|&k| sigma[k]).collect();

    // invert z = Y γ + X γ*
    let gamma = b.y.adjoint() * &b.z - b.x.transpose() * conj_vec(&b.z);
    Ok(BlochMessiahForm { v, sigma, w, gamma })
}

fn coupled_clusters(p: &CMat, tol: f64) -> Vec<Vec<usize>> {
    let m = p.nrows();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut k = i;
        while parent[k] != r {
            let next = parent[k];
            parent[k] = r;
            k = next;
        }
        r
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if p[(i, j)].norm() > tol || p[(j, i)].norm() > tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; m];
    for i in 0..m {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    groups
}

/// Takagi factorization `p = R diag(s) Rᵀ` of a complex symmetric block,
/// with `R` unitary and `s ≥ 0` descending.
pub(crate) fn takagi(p: &CMat) -> (CMat, Vec<f64>) {
    let n = p.nrows();
    let sym = (p + p.transpose()).map(|x| x * 0.5);
    if n == 1 {
        let z = sym[(0, 0)];
        let r = if z.norm() > 0.0 {
            Complex64::from_polar(1.0, 0.5 * z.arg())
        } else {
            c(1.0)
        };
        return (CMat::from_element(1, 1, r), vec![z.norm()]);
    }
    // [[A, B], [B, -A]] (x; y) = s (x; y)  <=>  p (x - iy) = s (x + iy)
    let k = RMat::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let (ii, jj) = (i % n, j % n);
        let z = sym[(ii, jj)];
        match (bi, bj) {
            (0, 0) => z.re,
            (1, 1) => -z.re,
            _ => z.im,
        }
    });
    let (vals, vecs) = sym_eigen_desc(&k);
    let mut r = CMat::from_fn(n, n, |i, j| Complex64::new(vecs[(i, j)], vecs[(i + n, j)]));
    // complete the zero-squeezing subspace to an orthonormal set
    for j in 0..n {
        let mut col = r.column(j).into_owned();
        for k in 0..j {
            let prev = r.column(k).into_owned();
            let proj = prev.dotc(&col);
            col -= prev * proj;
        }
        let norm = col.norm();
        if norm > 1e-8 {
            col /= c(norm);
        }
        r.set_column(j, &col);
    }
    let s = vals[..n].iter().map(|&x| x.max(0.0)).collect();
    (r, s)
}

fn canonical_phases(v: &mut CMat, w: &mut CMat, sigma: &[f64]) {
    let m = v.nrows();
    for k in 0..m {
        let Some(lead) = v.column(k).iter().copied().find(|z| z.norm() > 1e-12) else {
            continue;
        };
        let factor = if sigma[k] > ZERO_SQUEEZE {
            // only a sign is free once V†XW* is fixed real positive
            let negative = lead.re < 0.0 || (lead.re == 0.0 && lead.im < 0.0);
            if negative {
                c(-1.0)
            } else {
                c(1.0)
            }
        } else {
            lead.conj() / lead.norm()
        };
        if factor != c(1.0) {
            for i in 0..m {
                v[(i, k)] *= factor;
                w[(i, k)] *= factor;
            }
        }
    }
}

/// Descending σ; runs of tied σ are ordered by their `V` columns.
fn canonical_order(v: &CMat, sigma: &[f64]) -> Vec<usize> {
    let m = sigma.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let column_key = |k: usize| -> Vec<f64> {
        v.column(k).iter().flat_map(|z| [z.re, z.im]).collect()
    };
    let lex = |a: &Vec<f64>, b: &Vec<f64>| -> Ordering {
        for (x, y) in a.iter().zip(b) {
            match x.total_cmp(y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    };
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m
            && (sigma[order[end - 1]] - sigma[order[end]]).abs()
                <= SIGMA_TIE * sigma[order[end - 1]].max(1.0)
        {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&a, &b| lex(&column_key(b), &column_key(a)));
        }
        start = end;
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    fn assert_close(a: &CMat, b: &CMat, tol: f64) {
        let d = frob_diff(a, b);
        assert!(d <= tol, "difference {d:e} > {tol:e}\n{a}\n{b}");
    }

    #[test]
    fn identity_duschinsky() {
        let t = bogoliubov_from_duschinsky(&RMat::identity(2, 2), &RVec::zeros(2)).unwrap();
        assert_eq!(t.x, CMat::zeros(2, 2));
        assert_eq!(t.y, CMat::identity(2, 2));
        assert_eq!(t.z, CVec::zeros(2));
    }

    #[test]
    fn diagonal_duschinsky() {
        let j = RMat::from_diagonal(&RVec::from_vec(vec![2.0, 1.0]));
        let t = bogoliubov_from_duschinsky(&j, &RVec::zeros(2)).unwrap();
        assert_close(&t.x, &diag_r(&[0.75, 0.0]), 1e-15);
        assert_close(&t.y, &diag_r(&[1.25, 1.0]), 1e-15);
        t.check(CONSTRUCTION_TOL).unwrap();
    }

    #[test]
    fn singular_duschinsky_rejected() {
        let j = RMat::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            bogoliubov_from_duschinsky(&j, &RVec::zeros(2)),
            Err(Error::SingularDuschinsky { .. })
        ));
        assert!(matches!(
            doktorov_factorize(&j, &RVec::zeros(2)),
            Err(Error::SingularDuschinsky { .. })
        ));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            bogoliubov_from_duschinsky(&RMat::identity(2, 2), &RVec::zeros(3)),
            Err(Error::DimensionMismatch(_))
        ));
        let dok = doktorov_factorize(&RMat::identity(2, 2), &RVec::zeros(2)).unwrap();
        assert!(matches!(
            compose_chain(&dok, &RMat::identity(2, 2), &[c(0.0)], &[c(0.0), c(0.0)]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn doktorov_identity() {
        let dok = doktorov_factorize(&RMat::identity(3, 3), &RVec::zeros(3)).unwrap();
        assert_eq!(dok.l, vec![1.0; 3]);
        assert!((&dok.u2 * &dok.u1 - RMat::identity(3, 3)).norm() < 1e-15);
        assert_eq!(dok.beta, RVec::zeros(3));
    }

    #[test]
    fn doktorov_map_equals_duschinsky_map() {
        let j = RMat::from_row_slice(3, 3, &[0.9, -0.3, 0.1, 0.2, 1.1, 0.0, 0.05, 0.1, 0.7]);
        let delta = RVec::from_vec(vec![0.3, -0.2, 0.5]);
        let direct = bogoliubov_from_duschinsky(&j, &delta).unwrap();
        let dok = doktorov_factorize(&j, &delta).unwrap();
        assert!((dok.duschinsky() - &j).norm() < 1e-13);
        let via = dok.transform();
        assert_close(&via.x, &direct.x, 1e-13);
        assert_close(&via.y, &direct.y, 1e-13);
        assert!((via.z - direct.z).norm() < 1e-13);
    }

    #[test]
    fn chain_franck_condon_limit() {
        let j = RMat::from_row_slice(2, 2, &[0.9, -0.3, 0.2, 1.1]);
        let delta = RVec::from_vec(vec![0.3, -0.2]);
        let dok = doktorov_factorize(&j, &delta).unwrap();
        let chain = compose_chain(&dok, &RMat::identity(2, 2), &[c(0.0); 2], &[c(0.0); 2]).unwrap();
        assert_eq!(chain, dok.transform());
    }

    #[test]
    fn chain_pure_displacement() {
        let dok = doktorov_factorize(&RMat::identity(2, 2), &RVec::zeros(2)).unwrap();
        let a = [c(0.4), c(-0.1)];
        let t = compose_chain(&dok, &RMat::identity(2, 2), &[c(0.0); 2], &a).unwrap();
        assert_close(&t.x, &CMat::zeros(2, 2), 0.0);
        assert_close(&t.y, &CMat::identity(2, 2), 0.0);
        assert_eq!(t.z, CVec::from_column_slice(&a));
    }

    #[test]
    fn chain_matches_closed_form_for_real_parameters() {
        // X = U2 sinh(lnL) U1 Uᵀ cosh Ξ + U2 cosh(lnL) U1 Uᵀ sinh Ξ, etc.
        let j = RMat::from_row_slice(2, 2, &[0.8, -0.25, 0.3, 1.2]);
        let delta = RVec::from_vec(vec![0.2, 0.4]);
        let dok = doktorov_factorize(&j, &delta).unwrap();
        let th: f64 = 0.4;
        let u = RMat::from_row_slice(2, 2, &[th.cos(), th.sin(), -th.sin(), th.cos()]);
        let xi = [0.05, -0.02];
        let alpha = [0.3, -0.1];
        let t = compose_chain(&dok, &u, &xi.map(c), &alpha.map(c)).unwrap();

        let lnl: Vec<f64> = dok.l.iter().map(|l| l.ln()).collect();
        let sh_l = RMat::from_diagonal(&RVec::from_iterator(2, lnl.iter().map(|x| x.sinh())));
        let ch_l = RMat::from_diagonal(&RVec::from_iterator(2, lnl.iter().map(|x| x.cosh())));
        let sh_x = RMat::from_diagonal(&RVec::from_iterator(2, xi.iter().map(|x| x.sinh())));
        let ch_x = RMat::from_diagonal(&RVec::from_iterator(2, xi.iter().map(|x| x.cosh())));
        let ex_x = RMat::from_diagonal(&RVec::from_iterator(2, xi.iter().map(|x| x.exp())));
        let l = RMat::from_diagonal(&RVec::from_column_slice(&dok.l));
        let ut = u.transpose();
        let x = &dok.u2 * &sh_l * &dok.u1 * &ut * &ch_x + &dok.u2 * &ch_l * &dok.u1 * &ut * &sh_x;
        let y = &dok.u2 * &ch_l * &dok.u1 * &ut * &ch_x + &dok.u2 * &sh_l * &dok.u1 * &ut * &sh_x;
        let z = &dok.u2 * &l * &dok.u1 * &ut * &ex_x * RVec::from_column_slice(&alpha)
            + &dok.u2 * &l * &dok.u1 * &dok.beta;
        assert_close(&t.x, &complexify(&x), 1e-13);
        assert_close(&t.y, &complexify(&y), 1e-13);
        assert!((t.z - complexify_vec(&z)).norm() < 1e-13);
    }

    #[test]
    fn bloch_messiah_identity() {
        let f = bloch_messiah(&BogoliubovTransform::identity(3)).unwrap();
        assert_eq!(f.sigma, vec![0.0; 3]);
        assert_close(&(&f.v * f.w.adjoint()), &CMat::identity(3, 3), 1e-14);
        assert_close(&f.v, &CMat::identity(3, 3), 1e-14);
        assert_eq!(f.gamma, CVec::zeros(3));
    }

    #[test]
    fn bloch_messiah_single_mode_squeeze() {
        let r: f64 = 0.3;
        let t = BogoliubovTransform {
            x: CMat::from_element(1, 1, c(r.sinh())),
            y: CMat::from_element(1, 1, c(r.cosh())),
            z: CVec::zeros(1),
        };
        let f = bloch_messiah(&t).unwrap();
        assert!((f.sigma[0] - r).abs() < 1e-15);
        assert!((f.v[(0, 0)] - c(1.0)).norm() < 1e-15);
        assert!((f.w[(0, 0)] - c(1.0)).norm() < 1e-15);
        assert_eq!(f.gamma[0], c(0.0));
    }

    #[test]
    fn bloch_messiah_complex_phase_squeeze() {
        let xi = Complex64::from_polar(0.5, 1.1);
        let t = BogoliubovTransform::squeeze(&[xi, c(0.2)])
            .compose(&BogoliubovTransform::displacement(&CVec::from_column_slice(&[
                c(0.3) + I * 0.1,
                c(-0.2),
            ])));
        let f = bloch_messiah(&t).unwrap();
        let back = f.transform();
        assert_close(&back.x, &t.x, 1e-13);
        assert_close(&back.y, &t.y, 1e-13);
        assert!((back.z - &t.z).norm() < 1e-13);
        assert!((f.sigma[0] - 0.5).abs() < 1e-14 && (f.sigma[1] - 0.2).abs() < 1e-14);
    }

    #[test]
    fn bloch_messiah_degenerate_block() {
        // two equal squeezers mixed by a complex rotation on both sides
        let th: f64 = 0.7;
        let u = CMat::from_row_slice(
            2,
            2,
            &[c(th.cos()), I * th.sin(), I * th.sin(), c(th.cos())],
        );
        let t = BogoliubovTransform::rotation(&u)
            .compose(&BogoliubovTransform::squeeze(&[c(0.4), c(0.4)]))
            .compose(&BogoliubovTransform::rotation(&complexify(&RMat::from_row_slice(
                2,
                2,
                &[0.6, 0.8, -0.8, 0.6],
            ))));
        let f = bloch_messiah(&t).unwrap();
        let back = f.transform();
        assert_close(&back.x, &t.x, 1e-13);
        assert_close(&back.y, &t.y, 1e-13);
        let again = bloch_messiah(&t).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn corrupted_transform_rejected() {
        let mut t = BogoliubovTransform::squeeze(&[c(0.3)]);
        t.y[(0, 0)] += 1e-6;
        assert!(matches!(
            bloch_messiah(&t),
            Err(Error::InvariantViolation { .. })
        ));
    }

    #[test]
    fn takagi_reconstructs() {
        let p = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.3, 0.1),
                Complex64::new(-0.2, 0.4),
                Complex64::new(-0.2, 0.4),
                Complex64::new(0.05, -0.3),
            ],
        );
        let (r, s) = takagi(&p);
        let back = &r * diag_r(&s) * r.transpose();
        assert_close(&back, &p, 1e-14);
        assert_close(&(r.adjoint() * &r), &CMat::identity(2, 2), 1e-14);
    }
}
