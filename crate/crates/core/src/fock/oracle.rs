//! Brute-force reference: operators as sparse matrices on a truncated Fock
//! space, exponentials by scaled Taylor series.

use std::collections::HashMap;

use num_complex::Complex64;

use super::lattice::Lattice;
use crate::error::{Error, Result};
use crate::linalg::{c, unitary_log, CMat, CVec, RMat, RVec};
use crate::molecule::DimensionlessTdm;

/// Amplitude change tolerated between two padded workspaces.
pub const CONVERGENCE_TOL: f64 = 1e-9;
const BASE_PADDING: usize = 10;
const MAX_BASIS: usize = 3_000_000;
const TAYLOR_STEP: f64 = 6.0;

/// `μ0 + λᵀq̂ + q̂ᵀΛq̂` with `q̂ = (a + a†)/√2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TdmPolynomial {
    pub mu0: f64,
    pub lambda: RVec,
    pub lambda2: RMat,
}

impl From<&DimensionlessTdm> for TdmPolynomial {
    fn from(t: &DimensionlessTdm) -> Self {
        Self {
            mu0: t.mu0,
            lambda: t.lambda.clone(),
            lambda2: t.lambda2.clone(),
        }
    }
}

/// One factor of an operator product, listed left to right.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleOp {
    /// `exp(αᵀa† − α†a)`.
    Displacement(CVec),
    /// `exp(½(a†ᵀΞa† − aᵀΞ*a))` with symmetric `Ξ`.
    Squeeze(CMat),
    /// `exp(a†ᵀ ln(U) a)`, so that `R† a R = U a`.
    Rotation(CMat),
    /// `exp(κ μ̂)`.
    ExpPolynomial { kappa: Complex64, poly: TdmPolynomial },
    /// `μ̂` itself.
    Polynomial(TdmPolynomial),
}

/// A word of ladder operators; `ops[0]` acts last. `true` means `a†`.
#[derive(Debug, Clone)]
struct Term {
    coef: Complex64,
    ops: Vec<(usize, bool)>,
}

fn term(coef: Complex64, ops: &[(usize, bool)]) -> Term {
    Term {
        coef,
        ops: ops.to_vec(),
    }
}

fn polynomial_terms(p: &TdmPolynomial, kappa: Complex64) -> Vec<Term> {
    let m = p.lambda.len();
    let mut terms = vec![term(kappa * p.mu0, &[])];
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..m {
        let l = p.lambda[j];
        if l != 0.0 {
            terms.push(term(kappa * (l * r), &[(j, false)]));
            terms.push(term(kappa * (l * r), &[(j, true)]));
        }
    }
    for j in 0..m {
        for k in 0..m {
            let l = p.lambda2[(j, k)];
            if l == 0.0 {
                continue;
            }
            let h = kappa * (0.5 * l);
            for dj in [false, true] {
                for dk in [false, true] {
                    terms.push(term(h, &[(j, dj), (k, dk)]));
                }
            }
        }
    }
    terms
}

fn generator_terms(op: &OracleOp) -> Result<Vec<Term>> {
    let mut terms = Vec::new();
    match op {
        OracleOp::Displacement(alpha) => {
            for (j, &a) in alpha.iter().enumerate() {
                terms.push(term(a, &[(j, true)]));
                terms.push(term(-a.conj(), &[(j, false)]));
            }
        }
        OracleOp::Squeeze(xi) => {
            let m = xi.nrows();
            for j in 0..m {
                for k in 0..m {
                    let x = 0.5 * (xi[(j, k)] + xi[(k, j)]) * 0.5;
                    if x != c(0.0) {
                        terms.push(term(x, &[(j, true), (k, true)]));
                        terms.push(term(-x.conj(), &[(j, false), (k, false)]));
                    }
                }
            }
        }
        OracleOp::Rotation(u) => {
            let l = unitary_log(u)?;
            let m = l.nrows();
            for j in 0..m {
                for k in 0..m {
                    if l[(j, k)].norm() > 0.0 {
                        terms.push(term(l[(j, k)], &[(j, true), (k, false)]));
                    }
                }
            }
        }
        OracleOp::ExpPolynomial { kappa, poly } => terms = polynomial_terms(poly, *kappa),
        OracleOp::Polynomial(poly) => terms = polynomial_terms(poly, c(1.0)),
    }
    Ok(terms)
}

fn op_modes(op: &OracleOp) -> usize {
    match op {
        OracleOp::Displacement(a) => a.len(),
        OracleOp::Squeeze(x) => x.nrows(),
        OracleOp::Rotation(u) => u.nrows(),
        OracleOp::ExpPolynomial { poly, .. } | OracleOp::Polynomial(poly) => poly.lambda.len(),
    }
}

/// Largest squeezing magnitude in the product, which sets the padding.
fn max_squeezing(ops: &[OracleOp]) -> f64 {
    ops.iter()
        .map(|op| match op {
            OracleOp::Squeeze(x) => x.clone().svd(false, false).singular_values.max(),
            OracleOp::ExpPolynomial { kappa, poly } => {
                kappa.norm() * poly.lambda2.clone().svd(false, false).singular_values.max()
            }
            _ => 0.0,
        })
        .fold(0.0, f64::max)
}

/// Rough mean photon number of the product applied to vacuum: a coherent
/// amplitude and a squeezing population, both amplified by every squeeze.
fn mean_photons(ops: &[OracleOp]) -> f64 {
    let (mut amp, mut pop) = (0.0f64, 0.0f64);
    for op in ops.iter().rev() {
        match op {
            OracleOp::Displacement(alpha) => amp += alpha.norm(),
            OracleOp::Squeeze(x) => {
                let s = x.clone().svd(false, false).singular_values.max();
                amp *= s.exp();
                pop = pop * (2.0 * s).exp() + x.nrows() as f64 * s.sinh().powi(2);
            }
            _ => {}
        }
    }
    amp * amp + pop
}

/// All patterns with at most `n` photons, keyed for lookup.
struct Basis {
    patterns: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
    total: usize,
}

impl Basis {
    fn new(modes: usize, total: usize) -> Result<Self> {
        let mut patterns = Vec::new();
        let mut current = vec![0u16; modes];
        fn fill(j: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>, cap: usize) -> bool {
            if j == cur.len() {
                out.push(cur.clone());
                return out.len() <= cap;
            }
            for n in 0..=left {
                cur[j] = n as u16;
                if !fill(j + 1, left - n, cur, out, cap) {
                    return false;
                }
            }
            cur[j] = 0;
            true
        }
        if !fill(0, total, &mut current, &mut patterns, MAX_BASIS) {
            return Err(Error::CutoffExceeded(format!(
                "oracle workspace of {total} photons on {modes} modes exceeds {MAX_BASIS} states"
            )));
        }
        let index = patterns
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        Ok(Self {
            patterns,
            index,
            total,
        })
    }

    fn len(&self) -> usize {
        self.patterns.len()
    }
}

/// Column-wise sparse matrix: `cols[s]` lists `(target, coefficient)`.
struct Sparse {
    cols: Vec<Vec<(usize, Complex64)>>,
    norm1: f64,
}

impl Sparse {
    fn build(terms: &[Term], basis: &Basis) -> Self {
        let mut cols = Vec::with_capacity(basis.len());
        let mut norm1: f64 = 0.0;
        let mut scratch: Vec<i64> = Vec::new();
        for src in &basis.patterns {
            let mut col: Vec<(usize, Complex64)> = Vec::new();
            for t in terms {
                scratch.clear();
                scratch.extend(src.iter().map(|&x| x as i64));
                let mut factor = 1.0;
                let mut dead = false;
                for &(mode, dagger) in t.ops.iter().rev() {
                    if dagger {
                        scratch[mode] += 1;
                        factor *= (scratch[mode] as f64).sqrt();
                    } else {
                        if scratch[mode] == 0 {
                            dead = true;
                            break;
                        }
                        factor *= (scratch[mode] as f64).sqrt();
                        scratch[mode] -= 1;
                    }
                }
                if dead {
                    continue;
                }
                let total: i64 = scratch.iter().sum();
                if total as usize > basis.total {
                    continue;
                }
                let key: Vec<u16> = scratch.iter().map(|&x| x as u16).collect();
                let target = basis.index[&key];
                let value = t.coef * factor;
                match col.iter_mut().find(|(i, _)| *i == target) {
                    Some(entry) => entry.1 += value,
                    None => col.push((target, value)),
                }
            }
            norm1 = norm1.max(col.iter().map(|(_, v)| v.norm()).sum());
            cols.push(col);
        }
        Self { cols, norm1 }
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![c(0.0); x.len()];
        for (src, col) in self.cols.iter().enumerate() {
            let xs = x[src];
            if xs == c(0.0) {
                continue;
            }
            for &(t, v) in col {
                y[t] += v * xs;
            }
        }
        y
    }

    /// `exp(G) x` by `s` Taylor steps of `exp(G/s)` with `‖G/s‖₁ ≤ TAYLOR_STEP`.
    fn expm_apply(&self, mut x: Vec<Complex64>) -> Vec<Complex64> {
        let steps = (self.norm1 / TAYLOR_STEP).ceil().max(1.0) as usize;
        let inv = 1.0 / steps as f64;
        for _ in 0..steps {
            let mut term = x.clone();
            let mut sum = x.clone();
            let mut ref_norm: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            for k in 1..120 {
                term = self.apply(&term);
                let scale = inv / k as f64;
                let mut norm = 0.0;
                for v in term.iter_mut() {
                    *v *= scale;
                    norm += v.norm_sqr();
                }
                for (s, v) in sum.iter_mut().zip(&term) {
                    *s += v;
                }
                ref_norm = ref_norm.max(norm);
                if norm <= 1e-36 * ref_norm.max(1e-300) {
                    break;
                }
            }
            x = sum;
        }
        x
    }
}

fn evolve(ops: &[OracleOp], modes: usize, total: usize) -> Result<(Basis, Vec<Complex64>)> {
    let basis = Basis::new(modes, total)?;
    let mut state = vec![c(0.0); basis.len()];
    state[0] = c(1.0);
    for op in ops.iter().rev() {
        let terms = generator_terms(op)?;
        let g = Sparse::build(&terms, &basis);
        state = match op {
            OracleOp::Polynomial(_) => g.apply(&state),
            _ => g.expm_apply(state),
        };
    }
    Ok((basis, state))
}

/// Amplitudes of `O_1 ⋯ O_n |0⟩` on the patterns of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    pub lattice: Lattice,
    pub amplitudes: Vec<Complex64>,
    /// Total photon budget of the accepted workspace.
    pub workspace: usize,
}

impl TruncatedState {
    pub fn amplitude(&self, m: &[u16]) -> Option<Complex64> {
        self.lattice.position(m).map(|p| self.amplitudes[p])
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

fn project(lattice: &Lattice, basis: &Basis, state: &[Complex64]) -> Vec<Complex64> {
    lattice
        .iter()
        .map(|m| basis.index.get(m).map_or(c(0.0), |&i| state[i]))
        .collect()
}

fn max_change(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Applies `ops` right to left to the vacuum in a padded truncated space and
/// reads the amplitudes on `lattice`. The padding is doubled until the
/// amplitudes stop moving.
pub fn truncated_oracle_state(ops: &[OracleOp], lattice: &Lattice) -> Result<TruncatedState> {
    let modes = lattice.modes();
    if let Some(bad) = ops.iter().find(|op| op_modes(op) != modes) {
        return Err(Error::DimensionMismatch(format!(
            "operator on {} modes applied to a {modes}-mode lattice",
            op_modes(bad)
        )));
    }
    let requested = lattice.max_total();
    let smax = max_squeezing(ops);
    let tail = if smax > 0.0 {
        (12.0 / -smax.tanh().ln()).ceil().min(1e4) as usize
    } else {
        0
    };
    let leak = (2.0 * smax * requested as f64).ceil() as usize;
    let pad = BASE_PADDING
        .max(leak)
        .max(tail)
        .max((4.0 * mean_photons(ops)).ceil() as usize);
    let run = |p: usize| -> Result<Vec<Complex64>> {
        let (basis, state) = evolve(ops, modes, requested + p)?;
        Ok(project(lattice, &basis, &state))
    };
    let mut previous = run(pad)?;
    let mut change = f64::INFINITY;
    for k in 1..=2usize {
        let width = pad << k;
        let next = run(width)?;
        change = max_change(&previous, &next);
        if change <= CONVERGENCE_TOL {
            return Ok(TruncatedState {
                lattice: lattice.clone(),
                amplitudes: next,
                workspace: requested + width,
            });
        }
        previous = next;
    }
    Err(Error::NonConvergence {
        change,
        workspace: requested + (pad << 2),
    })
}
