//! Scenario file schema and its conversion into library types.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use fermifold::extgeo::{Coefficient, Form, Polynomial, SmoothMap, VectorField};
use fermifold::fields::{
    constant_profile, make_f, mass_shell, plane_wave_profile, FieldSet, Frequency, SlaterEntries,
    Spin, DEFAULT_TIME_DIRECTION,
};
use fermifold::fock::{
    base_flags, FockState, ModeIndex, Sector, SectorConfig, StateVector, DEFAULT_ORACLE_CEILING,
};
use fermifold::grading::PointZ;
use fermifold::Complex64;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Failure to load a scenario; maps to exit code 1.
#[derive(Debug)]
pub enum LoadError {
    Io(String),
    Schema(String),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Io(m) => write!(f, "io error: {m}"),
            LoadError::Schema(m) => write!(f, "schema error: {m}"),
        }
    }
}

/// Run-wide numeric settings; every field may be overridden in the file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub tolerance: f64,
    pub oracle_ceiling: usize,
    pub quadrature_order: usize,
    pub lie_time: f64,
    pub step_limit: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            oracle_ceiling: DEFAULT_ORACLE_CEILING,
            quadrature_order: fermifold::extgeo::DEFAULT_QUADRATURE_ORDER,
            lie_time: fermifold::extgeo::DEFAULT_LIE_TIME,
            step_limit: fermifold::opalg::DEFAULT_STEP_LIMIT,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    config: Option<[usize; 4]>,
    #[serde(default)]
    settings: Settings,
    #[serde(default)]
    seed: Option<u64>,
    tasks: Vec<serde_json::Value>,
}

#[derive(Debug)]
pub struct Scenario {
    pub config: Option<[usize; 4]>,
    pub settings: Settings,
    pub seed: Option<u64>,
    pub tasks: Vec<Task>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Task {
    pub id: String,
    /// Mode counts for this task, overriding the scenario default.
    #[serde(default)]
    pub config: Option<[usize; 4]>,
    #[serde(flatten)]
    pub spec: TaskSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TaskSpec {
    FockElement {
        bra: StateSpec,
        op: String,
        ket: StateSpec,
    },
    ExprVev {
        expr: String,
    },
    NormalOrder {
        expr: String,
        #[serde(default)]
        verify: bool,
    },
    Slater {
        fields: Vec<FieldSpec>,
        points: Vec<[f64; 12]>,
        modes: Vec<(u8, usize)>,
        #[serde(default = "one")]
        coefficient: [f64; 2],
        #[serde(default)]
        entries: EntriesSpec,
        #[serde(default)]
        as_form: bool,
    },
    FormOp {
        op: FormOpKind,
        form: FormSpec,
        #[serde(default)]
        other: Option<FormSpec>,
        #[serde(default)]
        map: Option<MapSpec>,
        #[serde(default)]
        field: Option<Vec<PolySpec>>,
        at: Vec<f64>,
    },
    Integrate {
        form: FormSpec,
        chain: Vec<PieceSpec>,
        #[serde(default)]
        order: Option<usize>,
    },
    OracleCheck {
        #[serde(default)]
        expr: Option<String>,
        #[serde(default)]
        samples: usize,
    },
}

impl TaskSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::FockElement { .. } => "fock-element",
            TaskSpec::ExprVev { .. } => "expr-vev",
            TaskSpec::NormalOrder { .. } => "normal-order",
            TaskSpec::Slater { .. } => "slater",
            TaskSpec::FormOp { .. } => "form-op",
            TaskSpec::Integrate { .. } => "integrate",
            TaskSpec::OracleCheck { .. } => "oracle-check",
        }
    }
}

fn one() -> [f64; 2] {
    [1.0, 0.0]
}

pub fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

/// A basis ket or a weighted sum of them.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Superposition { terms: Vec<BasisSpec> },
    Basis(BasisSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    #[serde(default = "one")]
    pub amp: [f64; 2],
    /// Occupied serials keyed by sector label.
    #[serde(default)]
    pub occupied: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub flags: [u8; 4],
}

impl BasisSpec {
    pub fn state(&self, cfg: SectorConfig) -> Result<FockState, String> {
        let mut bits = [0u64; 4];
        for (label, serials) in &self.occupied {
            let sector =
                Sector::from_label(label).ok_or_else(|| format!("unknown sector {label:?}"))?;
            for &r in serials {
                ModeIndex::new(sector, r)
                    .validate(&cfg)
                    .map_err(|e| e.to_string())?;
                bits[sector.index()] |= 1 << (r - 1);
            }
        }
        let base = base_flags(self.flags).map_err(|e| e.to_string())?;
        FockState::from_bits(cfg, base, bits).map_err(|e| e.to_string())
    }
}

impl StateSpec {
    pub fn vector(&self, cfg: SectorConfig) -> Result<StateVector, String> {
        let terms = match self {
            StateSpec::Basis(b) => std::slice::from_ref(b),
            StateSpec::Superposition { terms } => terms.as_slice(),
        };
        let mut v = StateVector::new();
        for t in terms {
            v.add(t.state(cfg)?, complex(t.amp));
        }
        Ok(v)
    }

    pub fn single(&self, cfg: SectorConfig) -> Option<FockState> {
        match self {
            StateSpec::Basis(b) if b.amp == one() => b.state(cfg).ok(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub mode: (u8, usize),
    #[serde(default = "unit_weights")]
    pub weights: [[f64; 2]; 3],
    pub profile: ProfileSpec,
}

fn unit_weights() -> [[f64; 2]; 3] {
    [one(); 3]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileSpec {
    Constant([f64; 2]),
    PlaneWave {
        p3: [f64; 3],
        mass: f64,
        #[serde(default)]
        spin: SpinSpec,
        #[serde(default)]
        frequency: FrequencySpec,
        #[serde(default)]
        component: usize,
        #[serde(default)]
        time_direction: Option<[f64; 3]>,
    },
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinSpec {
    #[default]
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencySpec {
    #[default]
    Positive,
    Negative,
}

pub fn mode(m: (u8, usize)) -> Result<ModeIndex, String> {
    let sector =
        Sector::from_label(&m.0.to_string()).ok_or_else(|| format!("unknown sector {}", m.0))?;
    Ok(ModeIndex::new(sector, m.1))
}

pub fn field_set(specs: &[FieldSpec]) -> Result<FieldSet, String> {
    specs
        .iter()
        .map(|s| {
            let m = mode(s.mode)?;
            let profile = match &s.profile {
                ProfileSpec::Constant(c) => constant_profile(complex(*c)),
                ProfileSpec::PlaneWave {
                    p3,
                    mass,
                    spin,
                    frequency,
                    component,
                    time_direction,
                } => {
                    let q = mass_shell(*p3, *mass).map_err(|e| e.to_string())?;
                    let spin = match spin {
                        SpinSpec::Up => Spin::Up,
                        SpinSpec::Down => Spin::Down,
                    };
                    let freq = match frequency {
                        FrequencySpec::Positive => Frequency::Positive,
                        FrequencySpec::Negative => Frequency::Negative,
                    };
                    plane_wave_profile(
                        q,
                        spin,
                        freq,
                        *component,
                        time_direction.unwrap_or(DEFAULT_TIME_DIRECTION),
                    )
                    .map_err(|e| e.to_string())?
                }
            };
            Ok(make_f(m, s.weights.map(complex), profile))
        })
        .collect()
}

pub fn points(raw: &[[f64; 12]]) -> Vec<PointZ> {
    raw.iter().map(|p| PointZ(*p)).collect()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(untagged)]
pub enum EntriesSpec {
    #[default]
    #[serde(skip)]
    Default,
    Keyword(String),
    Components(Vec<usize>),
}

impl EntriesSpec {
    pub fn entries(&self) -> Result<SlaterEntries, String> {
        match self {
            EntriesSpec::Default => Ok(SlaterEntries::Contracted),
            EntriesSpec::Keyword(k) if k == "contracted" => Ok(SlaterEntries::Contracted),
            EntriesSpec::Keyword(k) => Err(format!(
                "entries must be \"contracted\" or a component list, got {k:?}"
            )),
            EntriesSpec::Components(c) => Ok(SlaterEntries::Components(c.clone())),
        }
    }
}

/// A constant or a list of `[coefficient, [exponents…]]` monomials.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Constant(f64),
    Terms(Vec<(f64, Vec<u32>)>),
}

impl PolySpec {
    pub fn polynomial(&self, dim: usize) -> Result<Polynomial, String> {
        match self {
            PolySpec::Constant(c) => Ok(Polynomial::constant(dim, *c)),
            PolySpec::Terms(terms) => {
                let mut p = Polynomial::zero(dim);
                for (c, e) in terms {
                    if e.len() != dim {
                        return Err(format!(
                            "monomial exponents {e:?} do not match dimension {dim}"
                        ));
                    }
                    p.add_monomial(e.clone(), *c);
                }
                Ok(p)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub dim: usize,
    pub degree: usize,
    #[serde(default)]
    pub terms: Vec<FormTermSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormTermSpec {
    pub indices: Vec<usize>,
    pub coefficient: PolySpec,
}

impl FormSpec {
    pub fn form(&self) -> Result<Form, String> {
        let mut f = Form::zero(self.dim, self.degree).map_err(|e| e.to_string())?;
        for t in &self.terms {
            if t.indices.len() != self.degree {
                return Err(format!(
                    "term {:?} does not have degree {}",
                    t.indices, self.degree
                ));
            }
            f.add_term(
                &t.indices,
                Coefficient::Poly(t.coefficient.polynomial(self.dim)?),
            )
            .map_err(|e| e.to_string())?;
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormOpKind {
    /// Evaluate the form itself.
    Eval,
    D,
    Wedge,
    Pullback,
    Interior,
    Lie,
    LieCartan,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapSpec {
    Identity(usize),
    Linear(Vec<Vec<f64>>),
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    Polynomial {
        source: usize,
        components: Vec<PolySpec>,
    },
}

fn matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != m) {
        return Err("matrix rows must be non-empty and of equal length".into());
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

impl MapSpec {
    pub fn map(&self) -> Result<SmoothMap, String> {
        match self {
            MapSpec::Identity(d) => Ok(SmoothMap::identity(*d)),
            MapSpec::Linear(rows) => Ok(SmoothMap::linear(&matrix(rows)?)),
            MapSpec::Affine {
                matrix: rows,
                offset,
            } => SmoothMap::affine(&matrix(rows)?, offset).map_err(|e| e.to_string()),
            MapSpec::Polynomial { source, components } => {
                let comps = components
                    .iter()
                    .map(|p| p.polynomial(*source))
                    .collect::<Result<Vec<_>, _>>()?;
                SmoothMap::polynomial(*source, comps).map_err(|e| e.to_string())
            }
        }
    }
}

pub fn vector_field(components: &[PolySpec]) -> Result<VectorField, String> {
    let dim = components.len();
    let comps = components
        .iter()
        .map(|p| p.polynomial(dim))
        .collect::<Result<Vec<_>, _>>()?;
    VectorField::polynomial(comps).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default)]
    pub map: Option<MapSpec>,
    #[serde(default = "plus")]
    pub orientation: i8,
    #[serde(default = "unit")]
    pub multiplicity: i64,
}

fn plus() -> i8 {
    1
}

fn unit() -> i64 {
    1
}

pub fn config(counts: [usize; 4]) -> Result<SectorConfig, String> {
    SectorConfig::from_counts(counts).map_err(|e| e.to_string())
}

fn task_label(i: usize, v: &serde_json::Value) -> String {
    match v.get("id").and_then(|x| x.as_str()) {
        Some(id) => format!("task {id}"),
        None => format!("task #{}", i + 1),
    }
}

pub fn parse(text: &str) -> Result<Scenario, LoadError> {
    let raw: RawScenario =
        serde_json::from_str(text).map_err(|e| LoadError::Schema(e.to_string()))?;
    let mut tasks = Vec::with_capacity(raw.tasks.len());
    let mut seen = BTreeSet::new();
    for (i, v) in raw.tasks.into_iter().enumerate() {
        let label = task_label(i, &v);
        let task: Task =
            serde_json::from_value(v).map_err(|e| LoadError::Schema(format!("{label}: {e}")))?;
        if !seen.insert(task.id.clone()) {
            return Err(LoadError::Schema(format!("{label}: duplicate task id")));
        }
        tasks.push(task);
    }
    Ok(Scenario {
        config: raw.config,
        settings: raw.settings,
        seed: raw.seed,
        tasks,
    })
}

pub fn load(path: &Path) -> Result<Scenario, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LoadError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        LoadError::Schema(m) => LoadError::Schema(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_ids_are_rejected() {
        let text = r#"{"config":[1,0,0,0],"tasks":[
            {"id":"a","kind":"expr-vev","expr":"1"},
            {"id":"a","kind":"expr-vev","expr":"2"}]}"#;
        let err = parse(text).unwrap_err().to_string();
        assert!(err.contains("task a") && err.contains("duplicate"), "{err}");
    }

    #[test]
    fn schema_errors_name_the_task() {
        let text = r#"{"tasks":[{"id":"bad","kind":"slater"}]}"#;
        assert!(parse(text).unwrap_err().to_string().contains("task bad"));
        let text = r#"{"tasks":[{"kind":"expr-vev","expr":"1"}]}"#;
        assert!(parse(text).unwrap_err().to_string().contains("task #1"));
    }

    #[test]
    fn settings_defaults_and_overrides() {
        let s = parse(r#"{"settings":{"oracle_ceiling":12},"tasks":[]}"#).unwrap();
        assert_eq!(s.settings.oracle_ceiling, 12);
        assert_eq!(s.settings.tolerance, 1e-12);
        assert!(parse(r#"{"settings":{"ceiling":12},"tasks":[]}"#).is_err());
    }

    #[test]
    fn polynomial_terms() {
        let p: PolySpec = serde_json::from_str("[[2.0,[1,0]],[-1.0,[0,2]]]").unwrap();
        let p = p.polynomial(2).unwrap();
        assert_eq!(p.eval(&[3.0, 2.0]), 2.0);
        assert!(PolySpec::Constant(1.0).polynomial(3).is_ok());
        let bad: PolySpec = serde_json::from_str("[[1.0,[1]]]").unwrap();
        assert!(bad.polynomial(2).is_err());
    }
}
