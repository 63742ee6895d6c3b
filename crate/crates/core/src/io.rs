//! Molecule files, bundled datasets and CSV output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molecule::{AxisTdm, Axis, Displacement, LengthUnit, MoleculeSpec};
use crate::spectrum::{BroadenedSpectrum, ErrorSweep, SampleOutcome, SpectralProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoleculeFile {
    name: String,
    modes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length_unit: Option<UnitName>,
    omega_initial: Vec<f64>,
    omega_final: Vec<f64>,
    duschinsky: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    displacement_d: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<Vec<f64>>,
    #[serde(default)]
    tdm: TdmFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum UnitName {
    Bohr,
    Angstrom,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TdmFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<AxisFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<AxisFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    z: Option<AxisFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisFile {
    mu0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mu1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mu2: Option<Vec<Vec<f64>>>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

/// A validated molecule and the warnings raised while validating it.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedMolecule {
    pub spec: MoleculeSpec,
    pub warnings: Vec<String>,
}

pub fn parse_molecule_str(text: &str) -> Result<ParsedMolecule> {
    let file: MoleculeFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let mut errors = Vec::new();
    let displacement = match (file.displacement_d, file.delta) {
        (Some(d), None) => Displacement::Cartesian(d),
        (None, Some(d)) => Displacement::Dimensionless(d),
        (Some(_), Some(_)) => {
            errors.push("give exactly one of displacement_d and delta, not both".to_string());
            Displacement::Dimensionless(Vec::new())
        }
        (None, None) => {
            errors.push("one of displacement_d or delta is required".to_string());
            Displacement::Dimensionless(Vec::new())
        }
    };
    if file.omega_initial.len() != file.modes {
        errors.push(format!(
            "modes = {} but omega_initial has {} entries",
            file.modes,
            file.omega_initial.len()
        ));
    }
    let mut tdm = BTreeMap::new();
    for (axis, entry) in [(Axis::X, file.tdm.x), (Axis::Y, file.tdm.y), (Axis::Z, file.tdm.z)] {
        if let Some(a) = entry {
            tdm.insert(
                axis,
                AxisTdm {
                    mu0: a.mu0,
                    mu1: a.mu1,
                    mu2: a.mu2,
                },
            );
        }
    }
    let spec = MoleculeSpec {
        name: file.name,
        omega_initial: file.omega_initial,
        omega_final: file.omega_final,
        duschinsky: file.duschinsky,
        displacement,
        length_unit: file.length_unit.map(|u| match u {
            UnitName::Bohr => LengthUnit::Bohr,
            UnitName::Angstrom => LengthUnit::Angstrom,
        }),
        tdm,
    };
    let warnings = match spec.validate() {
        Ok(w) if errors.is_empty() => w,
        Ok(_) => return Err(Error::Validation(errors)),
        Err(Error::Validation(more)) => {
            errors.extend(more);
            return Err(Error::Validation(errors));
        }
        Err(e) => return Err(e),
    };
    Ok(ParsedMolecule { spec, warnings })
}

pub fn parse_molecule(path: &Path) -> Result<ParsedMolecule> {
    parse_molecule_str(&std::fs::read_to_string(path)?)
}

pub fn molecule_to_toml(spec: &MoleculeSpec) -> String {
    let axis = |a: Axis| {
        spec.tdm.get(&a).map(|t| AxisFile {
            mu0: t.mu0,
            mu1: t.mu1.clone(),
            mu2: t.mu2.clone(),
        })
    };
    let (displacement_d, delta) = match &spec.displacement {
        Displacement::Cartesian(d) => (Some(d.clone()), None),
        Displacement::Dimensionless(d) => (None, Some(d.clone())),
    };
    let file = MoleculeFile {
        name: spec.name.clone(),
        modes: spec.modes(),
        length_unit: spec.length_unit.map(|u| match u {
            LengthUnit::Bohr => UnitName::Bohr,
            LengthUnit::Angstrom => UnitName::Angstrom,
        }),
        omega_initial: spec.omega_initial.clone(),
        omega_final: spec.omega_final.clone(),
        duschinsky: spec.duschinsky.clone(),
        displacement_d,
        delta,
        tdm: TdmFile {
            x: axis(Axis::X),
            y: axis(Axis::Y),
            z: axis(Axis::Z),
        },
    };
    toml::to_string(&file).expect("molecule files always serialize")
}

/// Bundled molecules as `(name, file contents)`.
pub const DATASETS: [(&str, &str); 4] = [
    ("naphthalene", include_str!("../data/naphthalene.toml")),
    ("phenanthrene", include_str!("../data/phenanthrene.toml")),
    ("benzene_e1g", include_str!("../data/benzene_e1g.toml")),
    ("benzene_e2g", include_str!("../data/benzene_e2g.toml")),
];

pub fn dataset_source(name: &str) -> Option<&'static str> {
    DATASETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn dataset(name: &str) -> Result<ParsedMolecule> {
    let src = dataset_source(name)
        .ok_or_else(|| Error::InvalidArgument(format!("no bundled dataset named {name:?}")))?;
    parse_molecule_str(src)
}

/// A bundled dataset name, or else a path to a molecule file.
pub fn load_molecule(name_or_path: &str) -> Result<ParsedMolecule> {
    match dataset_source(name_or_path) {
        Some(src) => parse_molecule_str(src),
        None => parse_molecule(Path::new(name_or_path)),
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn pattern_field(m: &[u16]) -> String {
    m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

pub const LINE_LIST_HEADER: &str = "pattern,frequency_cm1,probability";

pub fn line_list_csv(profile: &SpectralProfile) -> String {
    let mut out = String::from(LINE_LIST_HEADER);
    out.push('\n');
    for (pos, m) in profile.lattice.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            pattern_field(m),
            fmt_f64(profile.frequency(pos)),
            fmt_f64(profile.probabilities[pos])
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineListRow {
    pub pattern: Vec<u16>,
    pub frequency: f64,
    pub probability: f64,
}

pub fn read_line_list(text: &str) -> Result<Vec<LineListRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == LINE_LIST_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("expected header {LINE_LIST_HEADER:?}"),
            })
        }
    }
    let bad = |line: usize, message: String| Error::Parse {
        line: line + 1,
        column: 1,
        message,
    };
    let mut rows = Vec::new();
    for (i, l) in lines {
        if l.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = l.split(',').collect();
        if fields.len() != 3 {
            return Err(bad(i, format!("expected 3 fields, found {}", fields.len())));
        }
        let pattern = fields[0]
            .split(';')
            .map(|x| x.trim().parse::<u16>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(i, format!("bad pattern: {e}")))?;
        let frequency = fields[1].trim().parse().map_err(|e| bad(i, format!("bad frequency: {e}")))?;
        let probability = fields[2].trim().parse().map_err(|e| bad(i, format!("bad probability: {e}")))?;
        rows.push(LineListRow {
            pattern,
            frequency,
            probability,
        });
    }
    Ok(rows)
}

/// Rebuilds a profile's probabilities from a line list written for it.
pub fn profile_from_line_list(template: &SpectralProfile, rows: &[LineListRow]) -> Result<SpectralProfile> {
    let mut out = template.clone();
    out.probabilities = vec![0.0; template.len()];
    let mut seen = vec![false; template.len()];
    for r in rows {
        let pos = template
            .lattice
            .position(&r.pattern)
            .ok_or_else(|| Error::InvalidArgument(format!("pattern {:?} is outside the lattice", r.pattern)))?;
        out.probabilities[pos] = r.probability;
        seen[pos] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidArgument("line list does not cover the lattice".into()));
    }
    Ok(out)
}

pub fn broadened_csv(b: &BroadenedSpectrum) -> String {
    let mut out = String::from("frequency_cm1,intensity\n");
    for (w, i) in b.grid.iter().zip(&b.intensity) {
        let _ = writeln!(out, "{},{}", fmt_f64(*w), fmt_f64(*i));
    }
    out
}

pub fn error_sweep_csv(s: &ErrorSweep) -> String {
    let slope = s.slope.map_or_else(String::new, fmt_f64);
    let mut out = String::from("tau,error,fitted_slope\n");
    for (t, e) in s.taus.iter().zip(&s.errors) {
        let _ = writeln!(out, "{},{},{}", fmt_f64(*t), fmt_f64(*e), slope);
    }
    out
}

pub fn samples_csv(s: &SampleOutcome) -> String {
    let mut out = String::from("pattern,frequency_cm1,sampled,noiseless\n");
    for (pos, m) in s.profile.lattice.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            pattern_field(m),
            fmt_f64(s.profile.frequency(pos)),
            fmt_f64(s.profile.probabilities[pos]),
            fmt_f64(s.reference.probabilities[pos])
        );
    }
    out
}
