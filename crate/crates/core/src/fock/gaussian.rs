use num_complex::Complex64;

use super::lattice::Lattice;
use crate::error::{Error, Result};
use crate::gauss::BlochMessiahForm;
use crate::linalg::{c, CMat, CVec};

/// Largest total photon number accepted by [`gaussian_fock_amplitude`].
pub const MAX_PHOTONS: usize = 60;

/// `ψ = R(V) S(Σ) R(W)† D(γ)|0⟩ = ψ_0 · exp(½ a†ᵀ Z a† + wᵀ a†)|0⟩`.
///
/// `a ψ = (Z a† + w) ψ` then gives the pattern recursion
/// `√(m_k+1) ψ(m+e_k) = w_k ψ(m) + Σ_l Z_kl √m_l ψ(m−e_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub z: CMat,
    pub w: CVec,
    pub vacuum: Complex64,
}

impl GaussianState {
    pub fn from_form(form: &BlochMessiahForm) -> Self {
        let tanh: Vec<f64> = form.sigma.iter().map(|s| s.tanh()).collect();
        let sech: Vec<f64> = form.sigma.iter().map(|s| 1.0 / s.cosh()).collect();
        let beta = form.w.adjoint() * &form.gamma;
        let mut v_tanh = form.v.clone();
        let mut v_sech = form.v.clone();
        for k in 0..form.modes() {
            v_tanh.column_mut(k).scale_mut(tanh[k]);
            v_sech.column_mut(k).scale_mut(sech[k]);
        }
        let z = &v_tanh * form.v.transpose();
        let w = &v_sech * &beta;
        let mut log_vac = c(-0.5 * beta.norm_squared());
        let mut scale = 1.0;
        for k in 0..form.modes() {
            log_vac -= beta[k] * beta[k] * (0.5 * tanh[k]);
            scale *= sech[k].sqrt();
        }
        Self {
            z: (&z + z.transpose()).map(|x| x * 0.5),
            w,
            vacuum: log_vac.exp() * scale,
        }
    }

    pub fn modes(&self) -> usize {
        self.w.len()
    }

    /// Amplitudes on every pattern of `lattice`, in enumeration order.
    pub fn amplitudes(&self, lattice: &Lattice) -> Vec<Complex64> {
        let m = self.modes();
        assert_eq!(lattice.modes(), m, "lattice and state disagree on modes");
        let roots: Vec<f64> = (0..=lattice.max_total().max(1)).map(|n| (n as f64).sqrt()).collect();
        let mut amp = vec![c(0.0); lattice.len()];
        for pos in lattice.positions_by_code() {
            let n = lattice.pattern(pos);
            let Some(k) = n.iter().position(|&x| x > 0) else {
                amp[pos] = self.vacuum;
                continue;
            };
            let code = lattice.code(pos);
            let parent_code = code - lattice.stride(k);
            let parent = lattice
                .position_of_code(parent_code)
                .expect("lattice is down-closed");
            let mut acc = self.w[k] * amp[parent];
            for l in 0..m {
                // pattern of the parent carries n_l − δ_kl photons in mode l
                let ml = n[l] as usize - usize::from(l == k);
                if ml == 0 {
                    continue;
                }
                let grand = lattice
                    .position_of_code(parent_code - lattice.stride(l))
                    .expect("lattice is down-closed");
                acc += self.z[(k, l)] * roots[ml] * amp[grand];
            }
            amp[pos] = acc / roots[n[k] as usize];
        }
        amp
    }

    /// Amplitude of a single pattern, evaluated over the box below it.
    pub fn amplitude(&self, m: &[u16]) -> Complex64 {
        let modes = self.modes();
        let radix: Vec<usize> = m.iter().map(|&x| x as usize + 1).collect();
        let mut stride = vec![1usize; modes];
        for j in 1..modes {
            stride[j] = stride[j - 1] * radix[j - 1];
        }
        let size = stride[modes - 1] * radix[modes - 1];
        let total: usize = m.iter().map(|&x| x as usize).sum();
        let roots: Vec<f64> = (0..=total.max(1)).map(|n| (n as f64).sqrt()).collect();
        let mut amp = vec![c(0.0); size];
        let mut n = vec![0usize; modes];
        for code in 0..size {
            if code > 0 {
                let mut j = 0;
                loop {
                    n[j] += 1;
                    if n[j] < radix[j] {
                        break;
                    }
                    n[j] = 0;
                    j += 1;
                }
            }
            let Some(k) = n.iter().position(|&x| x > 0) else {
                amp[0] = self.vacuum;
                continue;
            };
            let parent = code - stride[k];
            let mut acc = self.w[k] * amp[parent];
            for l in 0..modes {
                let ml = n[l] - usize::from(l == k);
                if ml > 0 {
                    acc += self.z[(k, l)] * roots[ml] * amp[parent - stride[l]];
                }
            }
            amp[code] = acc / roots[n[k]];
        }
        amp[size - 1]
    }
}

/// `scale · ⟨m| R(V) S(Σ) R(W)† D(γ) |0⟩`.
pub fn gaussian_fock_amplitude(
    form: &BlochMessiahForm,
    scale: Complex64,
    m: &[u16],
) -> Result<Complex64> {
    if m.len() != form.modes() {
        return Err(Error::DimensionMismatch(format!(
            "pattern has {} modes, form has {}",
            m.len(),
            form.modes()
        )));
    }
    let total: usize = m.iter().map(|&x| x as usize).sum();
    if total > MAX_PHOTONS {
        return Err(Error::CutoffExceeded(format!(
            "{total} photons requested, at most {MAX_PHOTONS} supported"
        )));
    }
    Ok(scale * GaussianState::from_form(form).amplitude(m))
}

/// Amplitudes of the form's state on every pattern of `lattice`.
pub fn fock_amplitudes(form: &BlochMessiahForm, lattice: &Lattice) -> Vec<Complex64> {
    GaussianState::from_form(form).amplitudes(lattice)
}
