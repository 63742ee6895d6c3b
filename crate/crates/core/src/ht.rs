//! Gaussian factorization of `exp(κ μ̂)|0⟩` and the normalization constants.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, RMat, RVec};
use crate::molecule::{ht_rotation, Axis, DimensionlessTdm, HtOrder};

pub const POLE_GUARD: f64 = 1e-12;

/// `(C, ξ, α)` with `exp(κ b q̂ + κ d q̂²)|0⟩ = C · S(ξ) D(α) |0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFactor {
    pub c: Complex64,
    pub xi: Complex64,
    pub alpha: Complex64,
}

/// Single-mode factorization, exact for any κ inside the domain.
///
/// With `t = κd/(1−κd)`, `ξ = artanh|t| · e^{i arg t}` and `s = sech|ξ|`:
///
/// ```text
/// α = (κb/√2)(1 + t) cosh|ξ|
/// C = (s(1−κd))^{-1/2} exp((κb)²(1 + t)/4 + |α|²/2 + α² t*/2)
/// ```
pub fn single_mode_factors(kappa: Complex64, b: f64, d: f64) -> Result<ModeFactor> {
    let kd = kappa * d;
    let one_minus = c(1.0) - kd;
    if one_minus.norm() <= POLE_GUARD {
        return Err(Error::Pole(one_minus.norm()));
    }
    let t = kd / one_minus;
    if t.norm() >= 1.0 - POLE_GUARD {
        return Err(Error::Domain(t.norm()));
    }
    let r = t.norm().atanh();
    let xi = if r > 0.0 {
        Complex64::from_polar(r, t.arg())
    } else {
        c(0.0)
    };
    let s = 1.0 / r.cosh();
    let kb = kappa * (b / std::f64::consts::SQRT_2);
    let alpha = kb * (c(1.0) + t) * r.cosh();
    let exponent = kb * kb * (c(1.0) + t) * 0.5 + alpha.norm_sqr() * 0.5 + alpha * alpha * t.conj() * 0.5;
    let c_j = (one_minus * s).sqrt().inv() * exponent.exp();
    Ok(ModeFactor { c: c_j, xi, alpha })
}

/// Per-mode factors of `exp(κ μ̂)|0⟩` in the frame that diagonalizes `Λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HtModeFactors {
    pub kappa: Complex64,
    pub mu0: f64,
    pub modes: Vec<ModeFactor>,
    /// `U` of `Λ = Uᵀ diag(D) U`.
    pub u_ht: RMat,
    /// `b = U λ`.
    pub b: RVec,
    pub d: Vec<f64>,
}

impl HtModeFactors {
    pub fn xi(&self) -> Vec<Complex64> {
        self.modes.iter().map(|f| f.xi).collect()
    }

    pub fn alpha(&self) -> Vec<Complex64> {
        self.modes.iter().map(|f| f.alpha).collect()
    }

    /// `|e^{κ μ0}|² Π_j |C_j|²`.
    pub fn prefactor(&self) -> f64 {
        let mut p = (2.0 * self.kappa.re * self.mu0).exp();
        for f in &self.modes {
            p *= f.c.norm_sqr();
        }
        p
    }
}

pub fn ht_mode_factors(tdm: &DimensionlessTdm, kappa: Complex64) -> Result<HtModeFactors> {
    let m = tdm.modes();
    let (u_ht, d) = ht_rotation(&tdm.lambda2);
    let b = &u_ht * &tdm.lambda;
    let modes = (0..m)
        .map(|j| single_mode_factors(kappa, b[j], d[j]))
        .collect::<Result<Vec<_>>>()?;
    Ok(HtModeFactors {
        kappa,
        mu0: tdm.mu0,
        modes,
        u_ht,
        b,
        d,
    })
}

/// `𝒩 = Σ_r ⟨0|μ̂_r²|0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationConstant {
    pub value: f64,
    pub order: HtOrder,
    pub per_axis: Vec<(Axis, f64)>,
}

/// `⟨0|μ̂²|0⟩` for one axis, keeping the terms up to `order`.
pub fn axis_normalization(tdm: &DimensionlessTdm, order: HtOrder) -> f64 {
    let t = tdm.truncate(order);
    let mut n = t.mu0 * t.mu0;
    if order >= HtOrder::Ht1 {
        n += 0.5 * t.lambda.norm_squared();
    }
    if order >= HtOrder::Ht2 {
        let m = t.modes();
        let l = &t.lambda2;
        let mut diag_cross = 0.0;
        let mut off_sq = 0.0;
        let mut diag_sq = 0.0;
        for j in 0..m {
            diag_sq += l[(j, j)] * l[(j, j)];
            for k in 0..m {
                if j != k {
                    diag_cross += l[(j, j)] * l[(k, k)];
                    off_sq += l[(j, k)] * l[(j, k)];
                }
            }
        }
        n += t.mu0 * l.trace() + 0.25 * diag_cross + 0.5 * off_sq + 0.75 * diag_sq;
    }
    n
}

pub fn normalization_constant(tdms: &[DimensionlessTdm], order: HtOrder) -> NormalizationConstant {
    let per_axis: Vec<(Axis, f64)> = tdms
        .iter()
        .map(|t| (t.axis, axis_normalization(t, order)))
        .collect();
    NormalizationConstant {
        value: per_axis.iter().map(|(_, n)| n).sum(),
        order,
        per_axis,
    }
}
