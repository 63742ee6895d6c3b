//! Molecular parameters and their conversion to dimensionless oscillator
//! quantities.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen_desc, RMat, RVec};

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light (cm/s).
pub const SPEED_OF_LIGHT_CM: f64 = 2.997_924_58e10;
/// Atomic mass unit (kg).
pub const ATOMIC_MASS: f64 = 1.660_539_066_60e-27;
/// Bohr radius (m).
pub const BOHR: f64 = 5.291_772_109_03e-11;
/// Ångström (m).
pub const ANGSTROM: f64 = 1e-10;

/// Duschinsky matrices quoted to four digits sit a few 1e-4 off orthogonal.
pub const ORTHOGONALITY_WARN: f64 = 1e-6;
pub const ORTHOGONALITY_REJECT: f64 = 1e-3;
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LengthUnit {
    Bohr,
    Angstrom,
}

impl LengthUnit {
    pub fn meters(self) -> f64 {
        match self {
            LengthUnit::Bohr => BOHR,
            LengthUnit::Angstrom => ANGSTROM,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LengthUnit::Bohr => "bohr",
            LengthUnit::Angstrom => "angstrom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Some(Axis::X),
            "y" => Some(Axis::Y),
            "z" => Some(Axis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Order of the Herzberg-Teller expansion of the transition dipole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HtOrder {
    Condon,
    Ht1,
    Ht2,
}

impl HtOrder {
    pub fn name(self) -> &'static str {
        match self {
            HtOrder::Condon => "condon",
            HtOrder::Ht1 => "ht1",
            HtOrder::Ht2 => "ht2",
        }
    }

    pub fn parse(s: &str) -> Option<HtOrder> {
        match s.trim().to_ascii_lowercase().as_str() {
            "condon" | "fc" => Some(HtOrder::Condon),
            "ht1" => Some(HtOrder::Ht1),
            "ht2" => Some(HtOrder::Ht2),
            _ => None,
        }
    }
}

impl fmt::Display for HtOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Displacement between the two potential minima, in one of two forms.
#[derive(Debug, Clone, PartialEq)]
pub enum Displacement {
    /// Mass-weighted displacement `d` in `u^½ · length_unit`.
    Cartesian(Vec<f64>),
    /// Dimensionless `δ`.
    Dimensionless(Vec<f64>),
}

impl Displacement {
    pub fn values(&self) -> &[f64] {
        match self {
            Displacement::Cartesian(v) | Displacement::Dimensionless(v) => v,
        }
    }
}

/// Expansion coefficients of one Cartesian component of the transition
/// dipole: `μ0` in D, `μ1` in D/(u^½ L), `μ2` in D/(u^½ L)².
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxisTdm {
    pub mu0: f64,
    pub mu1: Option<Vec<f64>>,
    pub mu2: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeSpec {
    pub name: String,
    /// Ground-state harmonic frequencies (cm⁻¹).
    pub omega_initial: Vec<f64>,
    /// Excited-state harmonic frequencies (cm⁻¹).
    pub omega_final: Vec<f64>,
    /// Row-major `U_D`.
    pub duschinsky: Vec<Vec<f64>>,
    pub displacement: Displacement,
    pub length_unit: Option<LengthUnit>,
    pub tdm: BTreeMap<Axis, AxisTdm>,
}

impl MoleculeSpec {
    pub fn modes(&self) -> usize {
        self.omega_initial.len()
    }

    pub fn axes(&self) -> Vec<Axis> {
        self.tdm.keys().copied().collect()
    }

    pub fn duschinsky_matrix(&self) -> RMat {
        let m = self.duschinsky.len();
        let n = self.duschinsky.first().map_or(0, |r| r.len());
        RMat::from_fn(m, n, |i, j| self.duschinsky[i].get(j).copied().unwrap_or(f64::NAN))
    }

    /// Largest entry of `|U_Dᵀ U_D − I|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let u = self.duschinsky_matrix();
        if !u.is_square() {
            return f64::INFINITY;
        }
        let n = u.nrows();
        (u.transpose() * &u - RMat::identity(n, n)).amax()
    }

    /// Every violation of the data-model invariants, and a list of warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let m = self.modes();
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        if m == 0 {
            errors.push("omega_initial is empty".to_string());
        }
        if self.omega_final.len() != m {
            errors.push(format!(
                "omega_final has {} entries, expected {m}",
                self.omega_final.len()
            ));
        }
        for (label, freqs) in [
            ("omega_initial", &self.omega_initial),
            ("omega_final", &self.omega_final),
        ] {
            for (j, &w) in freqs.iter().enumerate() {
                if !(w.is_finite() && w > 0.0) {
                    errors.push(format!("{label}[{j}] = {w} is not a positive frequency"));
                }
            }
        }
        let rows_ok = self.duschinsky.len() == m && self.duschinsky.iter().all(|r| r.len() == m);
        if !rows_ok {
            errors.push(format!("duschinsky must be {m}x{m}"));
        } else if self.duschinsky.iter().flatten().any(|x| !x.is_finite()) {
            errors.push("duschinsky has non-finite entries".to_string());
        } else {
            let res = self.orthogonality_residual();
            if res > ORTHOGONALITY_REJECT {
                errors.push(format!(
                    "duschinsky is not orthogonal: max |U^T U - I| = {res:.3e} > {ORTHOGONALITY_REJECT:e}"
                ));
            } else if res > ORTHOGONALITY_WARN {
                warnings.push(format!(
                    "duschinsky is orthogonal only to {res:.3e} (quoted precision)"
                ));
            }
        }
        let disp = self.displacement.values();
        let disp_name = match self.displacement {
            Displacement::Cartesian(_) => "displacement_d",
            Displacement::Dimensionless(_) => "delta",
        };
        if disp.len() != m {
            errors.push(format!("{disp_name} has {} entries, expected {m}", disp.len()));
        }
        if disp.iter().any(|x| !x.is_finite()) {
            errors.push(format!("{disp_name} has non-finite entries"));
        }
        if self.tdm.is_empty() {
            errors.push("no transition dipole axis given".to_string());
        }
        let needs_unit = matches!(self.displacement, Displacement::Cartesian(_))
            || self.tdm.values().any(|t| t.mu1.is_some() || t.mu2.is_some());
        if needs_unit && self.length_unit.is_none() {
            errors.push("length_unit is required for displacement_d, mu1 and mu2".to_string());
        }
        for (axis, t) in &self.tdm {
            if !t.mu0.is_finite() {
                errors.push(format!("tdm.{axis}.mu0 is not finite"));
            }
            if let Some(mu1) = &t.mu1 {
                if mu1.len() != m {
                    errors.push(format!("tdm.{axis}.mu1 has {} entries, expected {m}", mu1.len()));
                }
                if mu1.iter().any(|x| !x.is_finite()) {
                    errors.push(format!("tdm.{axis}.mu1 has non-finite entries"));
                }
            }
            if let Some(mu2) = &t.mu2 {
                if mu2.len() != m || mu2.iter().any(|r| r.len() != m) {
                    errors.push(format!("tdm.{axis}.mu2 must be {m}x{m}"));
                    continue;
                }
                for j in 0..m {
                    for k in 0..m {
                        let (a, b) = (mu2[j][k], mu2[k][j]);
                        if !a.is_finite() {
                            errors.push(format!("tdm.{axis}.mu2[{j}][{k}] is not finite"));
                        } else if k > j && (a - b).abs() > SYMMETRY_TOL {
                            errors.push(format!(
                                "tdm.{axis}.mu2 is not symmetric: [{j}][{k}] = {a} but [{k}][{j}] = {b}"
                            ));
                        }
                    }
                }
            }
        }
        if errors.is_empty() {
            Ok(warnings)
        } else {
            Err(Error::Validation(errors))
        }
    }
}

/// `sqrt(ħ/ω)` in `u^½ · unit` for a wavenumber in cm⁻¹, with `ω = 2πc·ω̃`.
pub fn oscillator_length(wavenumber: f64, unit: LengthUnit) -> f64 {
    let omega = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_CM * wavenumber;
    let l = unit.meters();
    (HBAR / (omega * ATOMIC_MASS * l * l)).sqrt()
}

fn required_unit(spec: &MoleculeSpec) -> Result<LengthUnit> {
    spec.length_unit
        .ok_or_else(|| Error::Unit("length_unit missing for a dimensionful quantity".to_string()))
}

/// `J = Ω' U_D Ω⁻¹` and `δ = ħ^{-½} Ω' d`.
pub fn build_bogoliubov_inputs(spec: &MoleculeSpec) -> Result<(RMat, RVec)> {
    let m = spec.modes();
    let u = spec.duschinsky_matrix();
    if u.shape() != (m, m) || spec.omega_final.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{m} modes but U_D is {:?} and omega_final has {}",
            u.shape(),
            spec.omega_final.len()
        )));
    }
    let j = RMat::from_fn(m, m, |r, s| {
        (spec.omega_final[r].sqrt() * u[(r, s)]) / spec.omega_initial[s].sqrt()
    });
    let delta = match &spec.displacement {
        Displacement::Dimensionless(v) => RVec::from_column_slice(v),
        Displacement::Cartesian(d) => {
            let unit = required_unit(spec)?;
            RVec::from_iterator(
                m,
                d.iter()
                    .zip(&spec.omega_final)
                    .map(|(&dj, &w)| dj / oscillator_length(w, unit)),
            )
        }
    };
    if delta.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "displacement has {} entries for {m} modes",
            delta.len()
        )));
    }
    Ok((j, delta))
}

/// `μ̂ = μ0 + λᵀq̂ + q̂ᵀΛq̂` in dimensionless coordinates, in Debye.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionlessTdm {
    pub axis: Axis,
    pub mu0: f64,
    pub lambda: RVec,
    pub lambda2: RMat,
}

impl DimensionlessTdm {
    pub fn new(axis: Axis, mu0: f64, lambda: RVec, lambda2: RMat) -> Self {
        Self {
            axis,
            mu0,
            lambda,
            lambda2,
        }
    }

    pub fn modes(&self) -> usize {
        self.lambda.len()
    }

    /// Drops the terms beyond `order`.
    pub fn truncate(&self, order: HtOrder) -> Self {
        let m = self.modes();
        let mut t = self.clone();
        if order < HtOrder::Ht2 {
            t.lambda2 = RMat::zeros(m, m);
        }
        if order < HtOrder::Ht1 {
            t.lambda = RVec::zeros(m);
        }
        t
    }
}

pub fn dimensionless_tdm(spec: &MoleculeSpec, axis: Axis) -> Result<DimensionlessTdm> {
    let m = spec.modes();
    let t = spec
        .tdm
        .get(&axis)
        .ok_or_else(|| Error::InvalidArgument(format!("molecule has no tdm.{axis} component")))?;
    let lengths: Option<Vec<f64>> = if t.mu1.is_some() || t.mu2.is_some() {
        let unit = required_unit(spec)?;
        Some(spec.omega_initial.iter().map(|&w| oscillator_length(w, unit)).collect())
    } else {
        None
    };
    let lambda = match (&t.mu1, &lengths) {
        (Some(mu1), Some(l)) => {
            if mu1.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "tdm.{axis}.mu1 has {} entries for {m} modes",
                    mu1.len()
                )));
            }
            RVec::from_iterator(m, mu1.iter().zip(l).map(|(&mu, &lj)| lj * mu))
        }
        _ => RVec::zeros(m),
    };
    let lambda2 = match (&t.mu2, &lengths) {
        (Some(mu2), Some(l)) => {
            if mu2.len() != m || mu2.iter().any(|r| r.len() != m) {
                return Err(Error::DimensionMismatch(format!("tdm.{axis}.mu2 is not {m}x{m}")));
            }
            let raw = RMat::from_fn(m, m, |j, k| 0.5 * mu2[j][k] * l[j] * l[k]);
            (&raw + raw.transpose()) * 0.5
        }
        _ => RMat::zeros(m, m),
    };
    Ok(DimensionlessTdm::new(axis, t.mu0, lambda, lambda2))
}

/// `Λ = Uᵀ diag(D) U` with eigenvalues descending.
pub fn ht_rotation(lambda2: &RMat) -> (RMat, Vec<f64>) {
    let (vals, vecs) = sym_eigen_desc(lambda2);
    (vecs.transpose(), vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(m: usize) -> MoleculeSpec {
        MoleculeSpec {
            name: "toy".into(),
            omega_initial: vec![1000.0; m],
            omega_final: vec![1000.0; m],
            duschinsky: (0..m)
                .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            displacement: Displacement::Cartesian(vec![0.0; m]),
            length_unit: Some(LengthUnit::Bohr),
            tdm: BTreeMap::from([(Axis::X, AxisTdm { mu0: 1.0, ..Default::default() })]),
        }
    }

    #[test]
    fn trivial_inputs() {
        let (j, d) = build_bogoliubov_inputs(&toy(2)).unwrap();
        assert_eq!(j, RMat::identity(2, 2));
        assert_eq!(d, RVec::zeros(2));
    }

    #[test]
    fn oscillator_length_at_509() {
        let l = oscillator_length(509.0, LengthUnit::Bohr) / std::f64::consts::SQRT_2;
        assert!((l - 0.3439).abs() < 5e-5, "{l}");
    }

    #[test]
    fn missing_unit() {
        let mut s = toy(2);
        s.length_unit = None;
        assert!(matches!(build_bogoliubov_inputs(&s), Err(Error::Unit(_))));
        s.displacement = Displacement::Dimensionless(vec![0.1, 0.0]);
        assert_eq!(build_bogoliubov_inputs(&s).unwrap().1[0], 0.1);
    }

    #[test]
    fn unit_round_trip() {
        let mut s = toy(3);
        s.omega_initial = vec![500.0, 800.0, 1200.0];
        let lambda = [0.3, -0.1, 0.05];
        let big = [[0.01, 0.002, -0.003], [0.002, -0.02, 0.0], [-0.003, 0.0, 0.004]];
        let l: Vec<f64> = s
            .omega_initial
            .iter()
            .map(|&w| oscillator_length(w, LengthUnit::Bohr))
            .collect();
        s.tdm.insert(
            Axis::X,
            AxisTdm {
                mu0: 0.5,
                mu1: Some((0..3).map(|j| lambda[j] / l[j]).collect()),
                mu2: Some(
                    (0..3)
                        .map(|j| (0..3).map(|k| 2.0 * big[j][k] / (l[j] * l[k])).collect())
                        .collect(),
                ),
            },
        );
        let t = dimensionless_tdm(&s, Axis::X).unwrap();
        for j in 0..3 {
            assert!((t.lambda[j] - lambda[j]).abs() < 1e-12);
            for k in 0..3 {
                assert!((t.lambda2[(j, k)] - big[j][k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_examples() {
        let (u, d) = ht_rotation(&RMat::zeros(2, 2));
        assert_eq!(u, RMat::identity(2, 2));
        assert_eq!(d, vec![0.0, 0.0]);
        let (u, d) = ht_rotation(&RMat::from_diagonal(&RVec::from_vec(vec![0.2, -0.1])));
        assert_eq!(u, RMat::identity(2, 2));
        assert_eq!(d, vec![0.2, -0.1]);
    }

    #[test]
    fn rotation_reconstructs() {
        let lam = RMat::from_row_slice(3, 3, &[0.0, 0.3, 0.3, 0.3, 0.1, 0.1, 0.3, 0.1, -0.1]);
        let (u, d) = ht_rotation(&lam);
        let back = u.transpose() * RMat::from_diagonal(&RVec::from_vec(d)) * &u;
        assert!((back - &lam).amax() < 1e-12);
        assert!((&u * u.transpose() - RMat::identity(3, 3)).amax() < 1e-12);
    }

    #[test]
    fn validation_lists_every_problem() {
        let mut s = toy(2);
        s.omega_final = vec![-1.0, 0.0];
        s.tdm.insert(
            Axis::Y,
            AxisTdm {
                mu0: 0.0,
                mu1: None,
                mu2: Some(vec![vec![0.0, 1.0], vec![2.0, 0.0]]),
            },
        );
        let Err(Error::Validation(list)) = s.validate() else {
            panic!("expected validation failure");
        };
        assert_eq!(list.len(), 3, "{list:?}");
        assert!(list.iter().any(|e| e.contains("mu2") && e.contains("[0][1]")));
    }

    #[test]
    fn near_orthogonal_warns() {
        let mut s = toy(2);
        s.duschinsky = vec![vec![0.98, -0.2], vec![0.2, 0.98]];
        let w = s.validate().unwrap();
        assert_eq!(w.len(), 1);
        s.duschinsky = vec![vec![0.9, -0.2], vec![0.2, 0.9]];
        assert!(s.validate().is_err());
    }
}
