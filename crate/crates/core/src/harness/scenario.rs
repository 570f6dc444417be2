//! Scenario files: one JSON document per instance.
//!
//! Layout (`format_version` 1):
//!
//! ```text
//! {
//!   "format_version": 1,
//!   "theorem": "2.1",
//!   "alg_dim": d,
//!   "source_len": n,
//!   "operators": { "K": op, "Theta": op, ... },
//!   "families": { "upsilon": family, "phi": family },
//!   "scalars": { "alpha1": 1.0, ... }
//! }
//! op     = { "alg_dim": d, "src_len": n, "dst_len": m, "matrix": [[[re, im], ...], ...] }
//! family = { "weights": [w, ...], "members": [op, ...] }
//! ```
//!
//! `matrix` is the row-major `(n·d) × (m·d)` matrix `M` acting on block
//! rows by `x ↦ x·M`. Numbers are written in shortest round-trip form, so
//! `load(save(s)) == s` bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{GFrameFamily, MeasureSpace};
use crate::matrix::{c64, CMatrix};
use crate::module::AdjOp;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremKind {
    /// Adjointness and norm of the synthesis/analysis pair.
    SynthesisAnalysis,
    PrecomposeAdjoint,
    Recovery,
    TightSurjectivity,
    Transfer,
    RangeEquality,
    KSum,
    DualSum,
    OrthogonalSum,
    WeightedOperatorSum,
    ScalarWeightedSum,
    FrameCheck,
}

impl TheoremKind {
    pub const ALL: [TheoremKind; 12] = [
        TheoremKind::SynthesisAnalysis,
        TheoremKind::PrecomposeAdjoint,
        TheoremKind::Recovery,
        TheoremKind::TightSurjectivity,
        TheoremKind::Transfer,
        TheoremKind::RangeEquality,
        TheoremKind::KSum,
        TheoremKind::DualSum,
        TheoremKind::OrthogonalSum,
        TheoremKind::WeightedOperatorSum,
        TheoremKind::ScalarWeightedSum,
        TheoremKind::FrameCheck,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TheoremKind::SynthesisAnalysis => "1.9",
            TheoremKind::PrecomposeAdjoint => "2.1",
            TheoremKind::Recovery => "2.2",
            TheoremKind::TightSurjectivity => "2.3",
            TheoremKind::Transfer => "2.4",
            TheoremKind::RangeEquality => "2.5",
            TheoremKind::KSum => "2.6",
            TheoremKind::DualSum => "3.1i",
            TheoremKind::OrthogonalSum => "3.1ii",
            TheoremKind::WeightedOperatorSum => "3.2",
            TheoremKind::ScalarWeightedSum => "3.3",
            TheoremKind::FrameCheck => "frame-check",
        }
    }

    /// Operators a scenario of this kind must provide.
    pub fn required_operators(self) -> &'static [&'static str] {
        match self {
            TheoremKind::SynthesisAnalysis => &[],
            TheoremKind::FrameCheck | TheoremKind::RangeEquality => &["K"],
            TheoremKind::PrecomposeAdjoint
            | TheoremKind::Recovery
            | TheoremKind::TightSurjectivity => &["K", "Theta"],
            TheoremKind::Transfer => &["K", "T", "Theta"],
            TheoremKind::KSum => &["K1", "K2"],
            TheoremKind::DualSum => &["K1"],
            TheoremKind::OrthogonalSum => &["K1", "K2"],
            TheoremKind::WeightedOperatorSum | TheoremKind::ScalarWeightedSum => {
                &["K1", "K2", "Theta1", "Theta2"]
            }
        }
    }

    pub fn needs_phi(self) -> bool {
        matches!(
            self,
            TheoremKind::DualSum
                | TheoremKind::OrthogonalSum
                | TheoremKind::WeightedOperatorSum
                | TheoremKind::ScalarWeightedSum
        )
    }

    pub fn required_scalars(self) -> &'static [&'static str] {
        match self {
            TheoremKind::ScalarWeightedSum => &["alpha1", "alpha2"],
            _ => &[],
        }
    }
}

impl fmt::Display for TheoremKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TheoremKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::Unsupported(s.to_string()))
    }
}

impl Serialize for TheoremKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for TheoremKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub theorem: TheoremKind,
    pub alg_dim: usize,
    pub source_len: usize,
    pub operators: BTreeMap<String, AdjOp>,
    pub upsilon: GFrameFamily,
    pub phi: Option<GFrameFamily>,
    pub scalars: BTreeMap<String, f64>,
}

impl Scenario {
    pub fn new(theorem: TheoremKind, upsilon: GFrameFamily) -> Self {
        Self {
            theorem,
            alg_dim: upsilon.alg_dim(),
            source_len: upsilon.source_len(),
            operators: BTreeMap::new(),
            upsilon,
            phi: None,
            scalars: BTreeMap::new(),
        }
    }

    pub fn with_operator(mut self, name: &str, op: AdjOp) -> Self {
        self.operators.insert(name.to_string(), op);
        self
    }

    pub fn with_phi(mut self, phi: GFrameFamily) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn with_scalar(mut self, name: &str, value: f64) -> Self {
        self.scalars.insert(name.to_string(), value);
        self
    }

    /// Operator `name`; a validated scenario has every required one.
    pub fn op(&self, name: &str) -> Result<&AdjOp> {
        self.operators
            .get(name)
            .ok_or_else(|| Error::invalid(format!("operators.{name}"), "missing"))
    }

    pub fn phi(&self) -> Result<&GFrameFamily> {
        self.phi
            .as_ref()
            .ok_or_else(|| Error::invalid("families.phi", "missing"))
    }

    pub fn scalar(&self, name: &str) -> Result<f64> {
        self.scalars
            .get(name)
            .copied()
            .ok_or_else(|| Error::invalid(format!("scalars.{name}"), "missing"))
    }

    /// Checks the presence and shapes of everything the theorem uses.
    pub fn validate(&self) -> Result<()> {
        let (d, n) = (self.alg_dim, self.source_len);
        check_family("families.upsilon", &self.upsilon, d, n)?;
        if let Some(phi) = &self.phi {
            check_family("families.phi", phi, d, n)?;
            if phi.dst_lens() != self.upsilon.dst_lens() || phi.weights() != self.upsilon.weights()
            {
                return Err(Error::invalid(
                    "families.phi",
                    "must share atoms, weights and destinations with upsilon",
                ));
            }
        } else if self.theorem.needs_phi() {
            return Err(Error::invalid("families.phi", "missing"));
        }
        for name in self.theorem.required_operators() {
            self.op(name)?;
        }
        for name in self.theorem.required_scalars() {
            self.scalar(name)?;
        }
        for (name, v) in &self.scalars {
            if !v.is_finite() {
                return Err(Error::invalid(format!("scalars.{name}"), "must be finite"));
            }
        }
        let target = self.operators.get("Theta1").map_or(n, AdjOp::dst_len);
        for (name, op) in &self.operators {
            let field = format!("operators.{name}");
            if op.alg_dim() != d {
                return Err(Error::invalid(
                    field,
                    format!("algebra dimension must be {d}"),
                ));
            }
            let (src, dst) = match name.as_str() {
                "Theta1" | "Theta2" => (n, target),
                "K2" if self.operators.contains_key("Theta1") => (target, target),
                _ => (n, n),
            };
            if op.src_len() != src || op.dst_len() != dst {
                return Err(Error::invalid(
                    field,
                    format!(
                        "expected A^{src} -> A^{dst}, found A^{} -> A^{}",
                        op.src_len(),
                        op.dst_len()
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&ScenarioWire::from(self))
            .expect("scenario wire form serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: ScenarioWire = serde_json::from_str(text).map_err(parse_error)?;
        let s = wire.into_scenario()?;
        s.validate()?;
        Ok(s)
    }
}

fn check_family(field: &str, f: &GFrameFamily, d: usize, n: usize) -> Result<()> {
    if f.alg_dim() != d || f.source_len() != n {
        return Err(Error::invalid(
            field,
            format!("members must map A^{n} over M_{d}"),
        ));
    }
    Ok(())
}

pub(crate) fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    Scenario::from_json(&std::fs::read_to_string(path)?)
}

pub fn save_scenario(s: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, s.to_json())?;
    Ok(())
}

type MatrixWire = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpWire {
    alg_dim: usize,
    src_len: usize,
    dst_len: usize,
    matrix: MatrixWire,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyWire {
    weights: Vec<f64>,
    members: Vec<OpWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamiliesWire {
    upsilon: FamilyWire,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<FamilyWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioWire {
    format_version: u32,
    theorem: TheoremKind,
    alg_dim: usize,
    source_len: usize,
    #[serde(default)]
    operators: BTreeMap<String, OpWire>,
    families: FamiliesWire,
    #[serde(default)]
    scalars: BTreeMap<String, f64>,
}

impl From<&AdjOp> for OpWire {
    fn from(op: &AdjOp) -> Self {
        let m = op.matrix();
        let matrix = (0..m.rows())
            .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Self {
            alg_dim: op.alg_dim(),
            src_len: op.src_len(),
            dst_len: op.dst_len(),
            matrix,
        }
    }
}

impl OpWire {
    fn into_op(self, field: &str) -> Result<AdjOp> {
        let rows = self.src_len * self.alg_dim;
        let cols = self.dst_len * self.alg_dim;
        if self.matrix.len() != rows || self.matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid(
                format!("{field}.matrix"),
                format!("expected {rows} rows of {cols} entries"),
            ));
        }
        let data = self
            .matrix
            .into_iter()
            .flatten()
            .map(|[re, im]| c64(re, im))
            .collect();
        let m = CMatrix::from_vec(rows, cols, data);
        if !m.is_finite() {
            return Err(Error::invalid(
                format!("{field}.matrix"),
                "entries must be finite",
            ));
        }
        AdjOp::new(self.alg_dim, self.src_len, self.dst_len, m)
    }
}

impl From<&GFrameFamily> for FamilyWire {
    fn from(f: &GFrameFamily) -> Self {
        Self {
            weights: f.weights().to_vec(),
            members: f.members().iter().map(OpWire::from).collect(),
        }
    }
}

impl FamilyWire {
    fn into_family(self, field: &str) -> Result<GFrameFamily> {
        let space = MeasureSpace::new(self.weights).map_err(|e| prefix_field(e, field))?;
        let members = self
            .members
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.into_op(&format!("{field}.members[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        GFrameFamily::new(space, members).map_err(|e| match e {
            Error::DimensionMismatch(msg) => Error::invalid(field, msg),
            other => prefix_field(other, field),
        })
    }
}

fn prefix_field(e: Error, prefix: &str) -> Error {
    match e {
        Error::Validation { field, message } => Error::Validation {
            field: format!("{prefix}.{field}"),
            message,
        },
        other => other,
    }
}

impl From<&Scenario> for ScenarioWire {
    fn from(s: &Scenario) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            theorem: s.theorem,
            alg_dim: s.alg_dim,
            source_len: s.source_len,
            operators: s
                .operators
                .iter()
                .map(|(k, v)| (k.clone(), OpWire::from(v)))
                .collect(),
            families: FamiliesWire {
                upsilon: FamilyWire::from(&s.upsilon),
                phi: s.phi.as_ref().map(FamilyWire::from),
            },
            scalars: s.scalars.clone(),
        }
    }
}

impl ScenarioWire {
    fn into_scenario(self) -> Result<Scenario> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::invalid(
                "format_version",
                format!("unsupported version {}", self.format_version),
            ));
        }
        let operators = self
            .operators
            .into_iter()
            .map(|(k, v)| {
                let op = v.into_op(&format!("operators.{k}"))?;
                Ok((k, op))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Scenario {
            theorem: self.theorem,
            alg_dim: self.alg_dim,
            source_len: self.source_len,
            operators,
            upsilon: self.families.upsilon.into_family("families.upsilon")?,
            phi: self
                .families
                .phi
                .map(|f| f.into_family("families.phi"))
                .transpose()?,
            scalars: self.scalars,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "format_version": 1,
  "theorem": "frame-check",
  "alg_dim": 1,
  "source_len": 1,
  "operators": {
    "K": { "alg_dim": 1, "src_len": 1, "dst_len": 1, "matrix": [[[1.0, 0.0]]] }
  },
  "families": {
    "upsilon": {
      "weights": [1.0],
      "members": [{ "alg_dim": 1, "src_len": 1, "dst_len": 1, "matrix": [[[2.0, 0.0]]] }]
    }
  }
}"#;

    #[test]
    fn minimal_scalar_scenario_loads() {
        let s = Scenario::from_json(MINIMAL).unwrap();
        assert_eq!(s.theorem, TheoremKind::FrameCheck);
        assert_eq!(s.upsilon.atom_count(), 1);
        assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn negative_weight_names_the_field() {
        let bad = MINIMAL.replace("\"weights\": [1.0]", "\"weights\": [-1.0]");
        match Scenario::from_json(&bad) {
            Err(Error::Validation { field, .. }) => {
                assert_eq!(field, "families.upsilon.weights[0]")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        let bad = MINIMAL.replace(
            "\"alg_dim\": 1,\n  \"source_len\"",
            "\"alg_dim\": ,\n  \"source_len\"",
        );
        match Scenario::from_json(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_theorem_is_rejected() {
        let bad = MINIMAL.replace("frame-check", "9.9");
        assert!(matches!(
            Scenario::from_json(&bad),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn missing_operator_is_a_validation_error() {
        let bad = MINIMAL.replace("frame-check", "2.1");
        match Scenario::from_json(&bad) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "operators.Theta"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_operator_shape_is_rejected() {
        let bad = MINIMAL.replace(
            r#""K": { "alg_dim": 1, "src_len": 1, "dst_len": 1, "matrix": [[[1.0, 0.0]]] }"#,
            r#""K": { "alg_dim": 1, "src_len": 1, "dst_len": 1, "matrix": [[[1.0, 0.0], [0.0, 0.0]]] }"#,
        );
        match Scenario::from_json(&bad) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "operators.K.matrix"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kind_ids_round_trip() {
        for k in TheoremKind::ALL {
            assert_eq!(k.id().parse::<TheoremKind>().unwrap(), k);
        }
        assert!(matches!(
            "1.1".parse::<TheoremKind>(),
            Err(Error::Unsupported(_))
        ));
    }
}
