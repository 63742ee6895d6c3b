//! Condon, exact and τ-approximated non-Condon profiles, plus broadening,
//! error sweeps and shot-noise sampling.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::fock::{fock_amplitudes, truncated_oracle_state, GaussianState, Lattice, OracleOp};
use crate::gauss::{bloch_messiah, compose_chain, doktorov_factorize, DoktorovFactors};
use crate::ht::{ht_mode_factors, normalization_constant, NormalizationConstant};
use crate::linalg::{c, complexify, complexify_vec, conj_vec, CMat, RMat};
use crate::molecule::{
    build_bogoliubov_inputs, dimensionless_tdm, Axis, DimensionlessTdm, HtOrder, MoleculeSpec,
};

/// Lines closer than this (cm⁻¹) share a bin.
pub const MERGE_TOL: f64 = 1e-6;

/// A molecule with its Doktorov factors and dimensionless dipoles.
#[derive(Debug, Clone)]
pub struct VibronicModel {
    pub name: String,
    pub omega_final: Vec<f64>,
    pub dok: DoktorovFactors,
    pub tdm: BTreeMap<Axis, DimensionlessTdm>,
}

impl VibronicModel {
    pub fn new(spec: &MoleculeSpec) -> Result<Self> {
        spec.validate()?;
        let (j, delta) = build_bogoliubov_inputs(spec)?;
        let dok = doktorov_factorize(&j, &delta)?;
        let tdm = spec
            .axes()
            .into_iter()
            .map(|a| Ok((a, dimensionless_tdm(spec, a)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            name: spec.name.clone(),
            omega_final: spec.omega_final.clone(),
            dok,
            tdm,
        })
    }

    pub fn modes(&self) -> usize {
        self.omega_final.len()
    }

    pub fn axes(&self) -> Vec<Axis> {
        self.tdm.keys().copied().collect()
    }

    fn tdms(&self, axes: &[Axis], order: HtOrder) -> Result<Vec<DimensionlessTdm>> {
        if axes.is_empty() {
            return Err(Error::InvalidArgument("no axes selected".into()));
        }
        axes.iter()
            .map(|a| {
                self.tdm
                    .get(a)
                    .map(|t| t.truncate(order))
                    .ok_or_else(|| Error::InvalidArgument(format!("{} has no tdm.{a}", self.name)))
            })
            .collect()
    }

    pub fn normalization(&self, axes: &[Axis], order: HtOrder) -> Result<NormalizationConstant> {
        Ok(normalization_constant(&self.tdms(axes, order)?, order))
    }

    fn lattice(&self, cutoff: usize) -> Result<Lattice> {
        Lattice::per_mode(self.modes(), cutoff)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Condon,
    Aux { kappa: Complex64 },
    NonCondon { tau: f64 },
    Exact,
    Sampled { tau: f64, shots: u64, seed: u64 },
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Condon => f.write_str("condon"),
            ProfileKind::Aux { kappa } => write!(f, "aux(kappa={kappa})"),
            ProfileKind::NonCondon { tau } => write!(f, "tau={tau:?}"),
            ProfileKind::Exact => f.write_str("exact"),
            ProfileKind::Sampled { tau, shots, seed } => {
                write!(f, "sampled(tau={tau:?}, shots={shots}, seed={seed})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileMeta {
    pub molecule: String,
    pub axes: Vec<Axis>,
    pub order: HtOrder,
    pub kind: ProfileKind,
    pub cutoff: usize,
}

/// Probability per Fock outcome, in lattice enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    pub lattice: Lattice,
    pub omega_final: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub meta: ProfileMeta,
}

/// One merged spectral line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub frequency: f64,
    pub probability: f64,
}

impl SpectralProfile {
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Resonance `m′ · ω′` of the outcome at `pos`.
    pub fn frequency(&self, pos: usize) -> f64 {
        self.lattice
            .pattern(pos)
            .iter()
            .zip(&self.omega_final)
            .map(|(&m, &w)| m as f64 * w)
            .sum()
    }

    pub fn probability_of(&self, m: &[u16]) -> Option<f64> {
        self.lattice.position(m).map(|p| self.probabilities[p])
    }

    /// Outcomes merged by frequency, ascending.
    pub fn lines(&self) -> Vec<Line> {
        let mut raw: Vec<Line> = (0..self.len())
            .map(|p| Line {
                frequency: self.frequency(p),
                probability: self.probabilities[p],
            })
            .collect();
        raw.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        let mut merged: Vec<Line> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for l in raw {
            match merged.last_mut() {
                Some(last) if l.frequency - anchor <= MERGE_TOL => last.probability += l.probability,
                _ => {
                    anchor = l.frequency;
                    merged.push(l);
                }
            }
        }
        merged
    }

    /// The `n` strongest merged lines, strongest first.
    pub fn top_lines(&self, n: usize) -> Vec<Line> {
        let mut lines = self.lines();
        lines.sort_by(|a, b| b.probability.total_cmp(&a.probability));
        lines.truncate(n);
        lines
    }
}

pub fn total_mass(profile: &SpectralProfile) -> f64 {
    profile.probabilities.iter().sum()
}

/// `f(κ) = prefactor · |⟨m′|O_κ|0⟩|²` for one device.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxTerm {
    pub kappa: Complex64,
    pub prefactor: f64,
    /// `|⟨m′|O_κ|0⟩|²`, a sub-normalized distribution.
    pub probabilities: Vec<f64>,
}

impl AuxTerm {
    pub fn values(&self) -> Vec<f64> {
        self.probabilities.iter().map(|p| self.prefactor * p).collect()
    }
}

fn aux_term(model: &VibronicModel, tdm: &DimensionlessTdm, kappa: Complex64, lattice: &Lattice) -> Result<AuxTerm> {
    let m = model.modes();
    let (u_ht, xi, alpha, prefactor) = if kappa == c(0.0) {
        // exp(0·μ̂) is the identity; skip the Λ rotation acting on vacuum
        (RMat::identity(m, m), vec![c(0.0); m], vec![c(0.0); m], 1.0)
    } else {
        let f = ht_mode_factors(tdm, kappa)?;
        let p = f.prefactor();
        (f.u_ht.clone(), f.xi(), f.alpha(), p)
    };
    let chain = compose_chain(&model.dok, &u_ht, &xi, &alpha)?;
    let form = bloch_messiah(&chain)?;
    let probabilities = fock_amplitudes(&form, lattice)
        .into_iter()
        .map(|a| a.norm_sqr())
        .collect();
    Ok(AuxTerm {
        kappa,
        prefactor,
        probabilities,
    })
}

/// `|⟨m′|U_Dok|0⟩|²`.
pub fn condon_profile(model: &VibronicModel, cutoff: usize) -> Result<SpectralProfile> {
    let lattice = model.lattice(cutoff)?;
    let m = model.modes();
    let flat = DimensionlessTdm::new(Axis::X, 0.0, crate::linalg::RVec::zeros(m), RMat::zeros(m, m));
    let term = aux_term(model, &flat, c(0.0), &lattice)?;
    Ok(SpectralProfile {
        lattice,
        omega_final: model.omega_final.clone(),
        probabilities: term.values(),
        meta: ProfileMeta {
            molecule: model.name.clone(),
            axes: Vec::new(),
            order: HtOrder::Condon,
            kind: ProfileKind::Condon,
            cutoff,
        },
    })
}

/// Unnormalized `f_m′(κ) = |⟨m′|U_Dok exp(κ μ̂)|0⟩|²`.
pub fn aux_profile(
    model: &VibronicModel,
    axis: Axis,
    order: HtOrder,
    kappa: Complex64,
    cutoff: usize,
) -> Result<SpectralProfile> {
    let tdm = model.tdms(&[axis], order)?.remove(0);
    let lattice = model.lattice(cutoff)?;
    let term = aux_term(model, &tdm, kappa, &lattice)?;
    Ok(SpectralProfile {
        lattice,
        omega_final: model.omega_final.clone(),
        probabilities: term.values(),
        meta: ProfileMeta {
            molecule: model.name.clone(),
            axes: vec![axis],
            order,
            kind: ProfileKind::Aux { kappa },
            cutoff,
        },
    })
}

/// The four devices per axis of the τ combination; `f(0)` is shared.
#[derive(Debug, Clone, PartialEq)]
pub struct NonCondonTerms {
    pub tau: f64,
    pub norm: NormalizationConstant,
    pub f0: AuxTerm,
    /// Per axis: `f(iτ)`, `f(τ)`, `f(−τ)`.
    pub axes: Vec<(Axis, [AuxTerm; 3])>,
    pub lattice: Lattice,
    pub meta: ProfileMeta,
    pub omega_final: Vec<f64>,
}

impl NonCondonTerms {
    /// Devices in sampling order: `f(0)`, then `f(iτ)`, `f(τ)`, `f(−τ)` per axis.
    pub fn devices(&self) -> Vec<&AuxTerm> {
        let mut d = vec![&self.f0];
        for (_, t) in &self.axes {
            d.extend(t.iter());
        }
        d
    }

    /// `Σ_r (f(iτ) + ½f(τ) + ½f(−τ) − 2f(0)) / (2τ² 𝒩)` from per-device values.
    fn combine_values(&self, values: &[Vec<f64>]) -> Vec<f64> {
        let scale = 1.0 / (2.0 * self.tau * self.tau * self.norm.value);
        let n = self.lattice.len();
        let mut out = vec![0.0; n];
        for (r, _) in self.axes.iter().enumerate() {
            let (fi, fp, fm) = (&values[1 + 3 * r], &values[2 + 3 * r], &values[3 + 3 * r]);
            for k in 0..n {
                out[k] += (fi[k] + 0.5 * fp[k] + 0.5 * fm[k] - 2.0 * values[0][k]) * scale;
            }
        }
        out
    }

    pub fn combine(&self) -> SpectralProfile {
        let values: Vec<Vec<f64>> = self.devices().iter().map(|d| d.values()).collect();
        SpectralProfile {
            lattice: self.lattice.clone(),
            omega_final: self.omega_final.clone(),
            probabilities: self.combine_values(&values),
            meta: self.meta.clone(),
        }
    }
}

pub fn noncondon_terms(
    model: &VibronicModel,
    axes: &[Axis],
    order: HtOrder,
    tau: f64,
    cutoff: usize,
) -> Result<NonCondonTerms> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let tdms = model.tdms(axes, order)?;
    let norm = normalization_constant(&tdms, order);
    if !(norm.value > 0.0) {
        return Err(Error::InvalidArgument(
            "transition dipole vanishes identically for this order".into(),
        ));
    }
    let lattice = model.lattice(cutoff)?;
    let f0 = aux_term(model, &tdms[0], c(0.0), &lattice)?;
    let mut per_axis = Vec::with_capacity(tdms.len());
    for t in &tdms {
        let fi = aux_term(model, t, Complex64::new(0.0, tau), &lattice)?;
        let fp = aux_term(model, t, c(tau), &lattice)?;
        let fm = aux_term(model, t, c(-tau), &lattice)?;
        per_axis.push((t.axis, [fi, fp, fm]));
    }
    Ok(NonCondonTerms {
        tau,
        norm,
        f0,
        axes: per_axis,
        lattice,
        meta: ProfileMeta {
            molecule: model.name.clone(),
            axes: axes.to_vec(),
            order,
            kind: ProfileKind::NonCondon { tau },
            cutoff,
        },
        omega_final: model.omega_final.clone(),
    })
}

/// τ-approximated non-Condon profile.
pub fn noncondon_profile(
    model: &VibronicModel,
    axes: &[Axis],
    order: HtOrder,
    tau: f64,
    cutoff: usize,
) -> Result<SpectralProfile> {
    Ok(noncondon_terms(model, axes, order, tau, cutoff)?.combine())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactBackend {
    /// Oracle for small problems, analytic otherwise.
    Auto,
    /// Truncated-operator oracle.
    Oracle,
    /// `U μ̂ |0⟩` as a polynomial in `a†` acting on the Gaussian `U|0⟩`.
    Analytic,
}

/// Oracle workspace estimate above which `Auto` switches to the analytic route.
const ORACLE_AUTO_LIMIT: f64 = 2e5;
const ORACLE_MAX_MODES: usize = 6;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn oracle_state_ops(dok: &DoktorovFactors, tdm: &DimensionlessTdm) -> Vec<OracleOp> {
    let lnl: Vec<Complex64> = dok.l.iter().map(|l| c(l.ln())).collect();
    vec![
        OracleOp::Rotation(complexify(&dok.u2)),
        OracleOp::Squeeze(CMat::from_diagonal(&crate::linalg::CVec::from_vec(lnl))),
        OracleOp::Rotation(complexify(&dok.u1)),
        OracleOp::Displacement(complexify_vec(&dok.beta)),
        OracleOp::Polynomial(tdm.into()),
    ]
}

/// `⟨m′|U_Dok μ̂|0⟩` on the lattice without truncation, from the Gaussian
/// `ψ0 = U|0⟩` and the images `U a†_j U† = (Yᵀa†)_j − (X†a)_j + k*_j`.
fn analytic_amplitudes(dok: &DoktorovFactors, tdm: &DimensionlessTdm, lattice: &Lattice) -> Result<Vec<Complex64>> {
    let m = dok.modes();
    let t = dok.transform();
    let form = bloch_messiah(&t)?;
    let gs = GaussianState::from_form(&form);
    let psi = gs.amplitudes(lattice);
    let xh = t.x.adjoint();
    let k = -(t.y.adjoint() * &t.z - t.x.transpose() * conj_vec(&t.z));
    // L_j ψ0 = (P_j · a† + p_j) ψ0
    let p_mat = t.y.transpose() - &xh * &gs.z;
    let p_vec = conj_vec(&k) - &xh * &gs.w;
    let lam = complexify_vec(&tdm.lambda);
    let big = complexify(&tdm.lambda2);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let comm = &xh * p_mat.transpose();
    let lp = &big * &p_vec;
    let mut s0 = c(tdm.mu0 + 0.5 * tdm.lambda2.trace());
    s0 += (lam.transpose() * &p_vec)[(0, 0)] * r;
    s0 += (p_vec.transpose() * &lp)[(0, 0)] * 0.5;
    for j in 0..m {
        for kk in 0..m {
            s0 -= big[(j, kk)] * comm[(j, kk)] * 0.5;
        }
    }
    let g = p_mat.transpose() * (lam.map(|x| x * r) + lp);
    let h = p_mat.transpose() * &big * &p_mat;

    let roots: Vec<f64> = (0..=lattice.max_total().max(2)).map(|n| (n as f64).sqrt()).collect();
    let mut out = vec![c(0.0); lattice.len()];
    let mut lowered = vec![0u16; m];
    for (pos, pattern) in lattice.iter().enumerate() {
        let mut acc = s0 * psi[pos];
        for l in 0..m {
            if pattern[l] == 0 {
                continue;
            }
            lowered.copy_from_slice(pattern);
            lowered[l] -= 1;
            let p1 = lattice.position(&lowered).expect("down-closed");
            acc += g[l] * roots[pattern[l] as usize] * psi[p1];
            for n in 0..m {
                if lowered[n] == 0 {
                    continue;
                }
                let f = roots[pattern[l] as usize] * roots[lowered[n] as usize];
                lowered[n] -= 1;
                let p2 = lattice.position(&lowered).expect("down-closed");
                acc += h[(l, n)] * (0.5 * f) * psi[p2];
                lowered[n] += 1;
            }
        }
        out[pos] = acc;
    }
    Ok(out)
}

/// Exact non-Condon profile `Σ_r |⟨m′|U_Dok μ̂_r|0⟩|² / 𝒩`.
pub fn exact_profile(
    model: &VibronicModel,
    axes: &[Axis],
    order: HtOrder,
    cutoff: usize,
) -> Result<SpectralProfile> {
    exact_profile_with(model, axes, order, cutoff, ExactBackend::Auto)
}

pub fn exact_profile_with(
    model: &VibronicModel,
    axes: &[Axis],
    order: HtOrder,
    cutoff: usize,
    backend: ExactBackend,
) -> Result<SpectralProfile> {
    let tdms = model.tdms(axes, order)?;
    let norm = normalization_constant(&tdms, order);
    if !(norm.value > 0.0) {
        return Err(Error::InvalidArgument(
            "transition dipole vanishes identically for this order".into(),
        ));
    }
    let lattice = model.lattice(cutoff)?;
    let m = model.modes();
    let use_oracle = match backend {
        ExactBackend::Oracle => true,
        ExactBackend::Analytic => false,
        ExactBackend::Auto => {
            let widest = lattice.max_total() + 40;
            m <= ORACLE_MAX_MODES && binomial(widest + m, m) <= ORACLE_AUTO_LIMIT
        }
    };
    let mut probabilities = vec![0.0; lattice.len()];
    for t in &tdms {
        let amps = if use_oracle {
            truncated_oracle_state(&oracle_state_ops(&model.dok, t), &lattice)?.amplitudes
        } else {
            analytic_amplitudes(&model.dok, t, &lattice)?
        };
        for (p, a) in probabilities.iter_mut().zip(amps) {
            *p += a.norm_sqr() / norm.value;
        }
    }
    Ok(SpectralProfile {
        lattice,
        omega_final: model.omega_final.clone(),
        probabilities,
        meta: ProfileMeta {
            molecule: model.name.clone(),
            axes: axes.to_vec(),
            order,
            kind: ProfileKind::Exact,
            cutoff,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthMode {
    /// The width is the Gaussian standard deviation.
    Sigma,
    /// The width is the full width at half maximum.
    Fwhm,
}

impl WidthMode {
    pub fn sigma(self, width: f64) -> f64 {
        match self {
            WidthMode::Sigma => width,
            WidthMode::Fwhm => width / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BroadenedSpectrum {
    pub grid: Vec<f64>,
    pub intensity: Vec<f64>,
    pub sigma: f64,
    /// Total weight of negative lines set to zero before broadening.
    pub clamped_mass: f64,
}

/// Sum of `p · exp(−(ω−ω₀)²/(2σ²))` over the merged lines.
pub fn broaden(
    profile: &SpectralProfile,
    width: f64,
    mode: WidthMode,
    grid_step: f64,
) -> Result<BroadenedSpectrum> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidArgument(format!("width must be positive, got {width}")));
    }
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid step must be positive, got {grid_step}")));
    }
    let sigma = mode.sigma(width);
    let mut clamped_mass = 0.0;
    let lines: Vec<Line> = profile
        .lines()
        .into_iter()
        .map(|mut l| {
            if l.probability < 0.0 {
                clamped_mass -= l.probability;
                l.probability = 0.0;
            }
            l
        })
        .collect();
    let lo = lines.first().map_or(0.0, |l| l.frequency) - 4.0 * sigma;
    let hi = lines.last().map_or(0.0, |l| l.frequency) + 4.0 * sigma;
    let count = ((hi - lo) / grid_step).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(Error::InvalidArgument(format!("grid of {count} points is too fine")));
    }
    let grid: Vec<f64> = (0..count).map(|i| lo + i as f64 * grid_step).collect();
    let inv = 1.0 / (2.0 * sigma * sigma);
    let intensity = grid
        .iter()
        .map(|&w| {
            lines
                .iter()
                .map(|l| l.probability * (-(w - l.frequency).powi(2) * inv).exp())
                .sum()
        })
        .collect();
    Ok(BroadenedSpectrum {
        grid,
        intensity,
        sigma,
        clamped_mass,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSweep {
    /// Descending.
    pub taus: Vec<f64>,
    /// `E(τ) = Σ_m′ |P_exact(m′) − P_τ(m′)|`.
    pub errors: Vec<f64>,
    /// Least-squares slope of `log E` against `log(1/τ)`; `None` when the
    /// errors sit at rounding level.
    pub slope: Option<f64>,
}

/// Errors below this are indistinguishable from rounding.
const SWEEP_FLOOR: f64 = 1e-14;

pub fn fit_slope(taus: &[f64], errors: &[f64]) -> Option<f64> {
    if taus.len() < 2 || errors.iter().any(|&e| !(e > SWEEP_FLOOR)) {
        return None;
    }
    let xs: Vec<f64> = taus.iter().map(|t| -t.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

pub fn l1_distance(a: &SpectralProfile, b: &SpectralProfile) -> f64 {
    a.probabilities
        .iter()
        .zip(&b.probabilities)
        .map(|(x, y)| (x - y).abs())
        .sum()
}

pub fn error_sweep(
    model: &VibronicModel,
    axes: &[Axis],
    order: HtOrder,
    taus: &[f64],
    cutoff: usize,
) -> Result<ErrorSweep> {
    if taus.len() < 3 {
        return Err(Error::InvalidArgument("an error sweep needs at least three tau values".into()));
    }
    let mut taus = taus.to_vec();
    taus.sort_by(|a, b| b.total_cmp(a));
    let exact = exact_profile(model, axes, order, cutoff)?;
    let errors = taus
        .iter()
        .map(|&t| Ok(l1_distance(&exact, &noncondon_profile(model, axes, order, t, cutoff)?)))
        .collect::<Result<Vec<_>>>()?;
    let slope = fit_slope(&taus, &errors);
    Ok(ErrorSweep { taus, errors, slope })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub profile: SpectralProfile,
    /// Noiseless combination the samples estimate.
    pub reference: SpectralProfile,
    /// `½ Σ |P̂ − P|` over the lattice.
    pub tv_distance: f64,
    /// Per device, the lattice counts followed by one overflow count.
    pub counts: Vec<Vec<u64>>,
}

/// Multinomial counts by sequential binomial draws; the last category
/// collects the mass outside the lattice.
fn draw_counts(probabilities: &[f64], shots: u64, rng: &mut ChaCha20Rng) -> Vec<u64> {
    let total: f64 = probabilities.iter().map(|p| p.max(0.0)).sum();
    let scale = total.max(1.0);
    let mut counts = vec![0u64; probabilities.len() + 1];
    let mut left = shots;
    let mut mass = 1.0;
    for (k, &p) in probabilities.iter().enumerate() {
        if left == 0 {
            break;
        }
        let p = p.max(0.0) / scale;
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 1.0 };
        let x = Binomial::new(left, q).map_or(0, |b| b.sample(rng));
        counts[k] = x;
        left -= x;
        mass -= p;
    }
    *counts.last_mut().unwrap() = left;
    counts
}

/// Finite-shot estimate of the τ combination, one seeded stream per device.
pub fn sample_profile(terms: &NonCondonTerms, shots: u64, seed: u64) -> Result<SampleOutcome> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let devices = terms.devices();
    let mut counts = Vec::with_capacity(devices.len());
    let mut values = Vec::with_capacity(devices.len());
    for (index, d) in devices.iter().enumerate() {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let cnt = draw_counts(&d.probabilities, shots, &mut rng);
        values.push(
            cnt[..cnt.len() - 1]
                .iter()
                .map(|&k| d.prefactor * k as f64 / shots as f64)
                .collect::<Vec<f64>>(),
        );
        counts.push(cnt);
    }
    let reference = terms.combine();
    let mut profile = reference.clone();
    profile.probabilities = terms.combine_values(&values);
    profile.meta.kind = ProfileKind::Sampled {
        tau: terms.tau,
        shots,
        seed,
    };
    let tv_distance = 0.5 * l1_distance(&profile, &reference);
    Ok(SampleOutcome {
        profile,
        reference,
        tv_distance,
        counts,
    })
}
