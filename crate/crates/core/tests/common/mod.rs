#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use vibronic::fock::{fock_amplitudes, truncated_oracle_state, Lattice, OracleOp, TdmPolynomial};
use vibronic::gauss::{bloch_messiah, BlochMessiahForm, BogoliubovTransform};
use vibronic::ht::{axis_normalization, single_mode_factors};
use vibronic::linalg::{c, exp_anti_hermitian, frob_diff, CMat, CVec, RMat, RVec, I};
use vibronic::molecule::{DimensionlessTdm, HtOrder};
use vibronic::Result;

/// Uniform numbers in [-1, 1] from a fixed list, reused cyclically.
pub struct Draw {
    vals: Vec<f64>,
    pos: usize,
}

impl Draw {
    pub fn new(vals: Vec<f64>) -> Self {
        assert!(!vals.is_empty());
        Self { vals, pos: 0 }
    }

    pub fn seeded(seed: u64, n: usize) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        Self::new((0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
    }

    pub fn unit(&mut self) -> f64 {
        let v = self.vals[self.pos % self.vals.len()];
        self.pos += 1;
        v
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (self.unit() + 1.0) * 0.5 * (hi - lo)
    }

    pub fn complex(&mut self, radius: f64) -> Complex64 {
        Complex64::from_polar(self.range(0.0, radius), self.range(-std::f64::consts::PI, std::f64::consts::PI))
    }
}

pub fn random_orthogonal(d: &mut Draw, m: usize) -> RMat {
    let mut q = RMat::identity(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let th = std::f64::consts::PI * d.unit();
            let mut g = RMat::identity(m, m);
            g[(i, i)] = th.cos();
            g[(j, j)] = th.cos();
            g[(i, j)] = -th.sin();
            g[(j, i)] = th.sin();
            q = g * q;
        }
    }
    if m > 0 && d.unit() < 0.0 {
        q.row_mut(0).neg_mut();
    }
    q
}

pub fn random_unitary(d: &mut Draw, m: usize) -> CMat {
    let mut h = CMat::zeros(m, m);
    for i in 0..m {
        h[(i, i)] = c(2.0 * d.unit());
        for j in (i + 1)..m {
            let z = Complex64::new(d.unit(), d.unit());
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    exp_anti_hermitian(&h.map(|x| x * I))
}

/// Duschinsky map of `J = O1 diag(e^u) O2` with `u, δ ∈ [-1, 1]`.
pub fn random_duschinsky(d: &mut Draw, m: usize) -> (RMat, RVec) {
    let o1 = random_orthogonal(d, m);
    let o2 = random_orthogonal(d, m);
    let l = RVec::from_iterator(m, (0..m).map(|_| d.unit().exp()));
    let j = o1 * RMat::from_diagonal(&l) * o2;
    let delta = RVec::from_iterator(m, (0..m).map(|_| d.unit()));
    (j, delta)
}

/// `R(U1) S(ξ) R(U2) D(α)` with complex parameters.
pub fn random_complex_transform(d: &mut Draw, m: usize) -> BogoliubovTransform {
    let xi: Vec<Complex64> = (0..m).map(|_| d.complex(1.0)).collect();
    let alpha = CVec::from_iterator(m, (0..m).map(|_| d.complex(1.0)));
    BogoliubovTransform::rotation(&random_unitary(d, m))
        .compose(&BogoliubovTransform::squeeze(&xi))
        .compose(&BogoliubovTransform::rotation(&random_unitary(d, m)))
        .compose(&BogoliubovTransform::displacement(&alpha))
}

/// Like [`random_complex_transform`] but with squeezing values repeated in
/// pairs (and a zero), so the singular values of `Y` are degenerate.
pub fn degenerate_transform(d: &mut Draw, m: usize) -> BogoliubovTransform {
    let mut xi = Vec::with_capacity(m);
    while xi.len() < m {
        let r = d.range(0.1, 1.0);
        xi.push(Complex64::from_polar(r, d.range(-3.0, 3.0)));
        if xi.len() < m {
            xi.push(Complex64::from_polar(r, d.range(-3.0, 3.0)));
        }
    }
    if m >= 3 {
        xi[m - 1] = c(0.0);
    }
    let alpha = CVec::from_iterator(m, (0..m).map(|_| d.complex(0.5)));
    BogoliubovTransform::rotation(&random_unitary(d, m))
        .compose(&BogoliubovTransform::squeeze(&xi))
        .compose(&BogoliubovTransform::rotation(&random_unitary(d, m)))
        .compose(&BogoliubovTransform::displacement(&alpha))
}

pub fn transform_distance(a: &BogoliubovTransform, b: &BogoliubovTransform) -> f64 {
    frob_diff(&a.x, &b.x)
        .max(frob_diff(&a.y, &b.y))
        .max((&a.z - &b.z).norm())
}

/// `(max symplectic residual, round-trip error)` of one transform.
pub fn bloch_messiah_check(t: &BogoliubovTransform) -> Result<(f64, f64)> {
    let (r1, r2) = t.symplectic_residuals();
    let form = bloch_messiah(t)?;
    let again = bloch_messiah(t)?;
    assert_eq!(form, again, "Bloch-Messiah output is not deterministic");
    assert!(form.sigma.iter().all(|&s| s >= 0.0));
    assert!(form.sigma.windows(2).all(|w| w[0] >= w[1] - 1e-12 * w[0].max(1.0)));
    Ok((r1.max(r2), transform_distance(&form.transform(), t)))
}

pub fn random_form(d: &mut Draw, m: usize) -> BlochMessiahForm {
    let v = random_unitary(d, m);
    let w = random_unitary(d, m);
    let sigma: Vec<f64> = (0..m).map(|_| d.range(0.0, 0.8)).collect();
    let mut gamma = CVec::from_iterator(m, (0..m).map(|_| d.complex(1.0)));
    let n = gamma.norm();
    if n > 1.0 {
        gamma /= c(n);
    }
    BlochMessiahForm { v, sigma, w, gamma }
}

pub fn form_oracle_ops(form: &BlochMessiahForm) -> Vec<OracleOp> {
    let sigma = CVec::from_iterator(form.modes(), form.sigma.iter().map(|&s| c(s)));
    vec![
        OracleOp::Rotation(form.v.clone()),
        OracleOp::Squeeze(CMat::from_diagonal(&sigma)),
        OracleOp::Rotation(form.w.adjoint()),
        OracleOp::Displacement(form.gamma.clone()),
    ]
}

/// Largest amplitude difference between the recursion and the oracle over
/// all patterns with at most `budget` photons.
pub fn dual_evaluator_discrepancy(form: &BlochMessiahForm, budget: usize) -> Result<f64> {
    let lattice = Lattice::total(form.modes(), budget)?;
    let fast = fock_amplitudes(form, &lattice);
    let slow = truncated_oracle_state(&form_oracle_ops(form), &lattice)?;
    Ok(fast
        .iter()
        .zip(&slow.amplitudes)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Largest amplitude difference on 30 levels between
/// `exp(κ b q̂ + κ d q̂²)|0⟩` (oracle) and `C S(ξ) D(α)|0⟩` (factors).
pub fn single_mode_discrepancy(kappa: Complex64, b: f64, d: f64) -> Result<f64> {
    let f = single_mode_factors(kappa, b, d)?;
    let lattice = Lattice::per_mode(1, 29)?;
    let poly = TdmPolynomial {
        mu0: 0.0,
        lambda: RVec::from_element(1, b),
        lambda2: RMat::from_element(1, 1, d),
    };
    let oracle = truncated_oracle_state(&[OracleOp::ExpPolynomial { kappa, poly }], &lattice)?;
    let t = BogoliubovTransform::squeeze(&[f.xi]).compose(&BogoliubovTransform::displacement(&CVec::from_element(1, f.alpha)));
    let fast = fock_amplitudes(&bloch_messiah(&t)?, &lattice);
    Ok(fast
        .iter()
        .zip(&oracle.amplitudes)
        .map(|(a, o)| (f.c * a - o).norm())
        .fold(0.0, f64::max))
}

pub fn random_tdm(d: &mut Draw, m: usize) -> DimensionlessTdm {
    let lambda = RVec::from_iterator(m, (0..m).map(|_| d.unit()));
    let raw = RMat::from_fn(m, m, |_, _| 0.5 * d.unit());
    DimensionlessTdm::new(vibronic::molecule::Axis::X, d.unit(), lambda, (&raw + raw.transpose()) * 0.5)
}

/// `|𝒩 − ⟨0|μ̂²|0⟩|` with the right side from the oracle.
pub fn normalization_discrepancy(tdm: &DimensionlessTdm) -> Result<f64> {
    let lattice = Lattice::total(tdm.modes(), 2)?;
    let state = truncated_oracle_state(&[OracleOp::Polynomial(tdm.into())], &lattice)?;
    Ok((axis_normalization(tdm, HtOrder::Ht2) - state.norm_squared()).abs())
}

