//! Execution of individual scenario tasks.

use std::collections::BTreeMap;

use fermifold::extgeo::{
    integrate, lie_form, lie_form_cartan, pullback, slater_form, Chain, ChainPiece, Form, SmoothMap,
};
use fermifold::fields::slater_matrix_element;
use fermifold::fock::dense::graded_bracket;
use fermifold::fock::{dense_matrix, ordered_product_element, GenKind, Generator, SectorConfig};
use fermifold::opalg::{
    equivalence_deviation, normal_order_with_limit, scalar_to_c64, OperatorExpr,
};
use fermifold::{parse, sampling, Complex64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::scenario::{self, FormOpKind, Settings, Task, TaskSpec};

pub struct Context {
    pub settings: Settings,
    pub seed: u64,
    pub config: Option<[usize; 4]>,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub value: Value,
    pub diagnostics: BTreeMap<String, Value>,
}

impl Outcome {
    fn new(value: Value) -> Self {
        Self {
            value,
            diagnostics: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.to_string(), v.into());
        self
    }
}

type TaskResult = Result<Outcome, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn form_values(form: &Form, at: &[f64]) -> Result<Value, String> {
    if at.len() != form.dim() {
        return Err(format!(
            "evaluation point has {} coordinates, form lives on R^{}",
            at.len(),
            form.dim()
        ));
    }
    Ok(Value::Array(
        form.coefficient_values(at)
            .into_iter()
            .map(|(idx, v)| json!({ "indices": idx, "value": v }))
            .collect(),
    ))
}

fn parse_expr(src: &str, cfg: Option<&SectorConfig>) -> Result<OperatorExpr, String> {
    let e = parse(src).map_err(|e| format!("expression: {e}"))?;
    if let Some(cfg) = cfg {
        e.validate(cfg).map_err(err)?;
    }
    Ok(e)
}

impl Context {
    fn config(&self, task: &Task) -> Result<SectorConfig, String> {
        let counts = task.config.or(self.config).ok_or_else(|| {
            "no mode configuration given for this task or the scenario".to_string()
        })?;
        scenario::config(counts)
    }

    pub fn execute(&self, index: usize, task: &Task) -> TaskResult {
        match &task.spec {
            TaskSpec::FockElement { bra, op, ket } => {
                let cfg = self.config(task)?;
                let e = parse_expr(op, Some(&cfg))?;
                let b = bra.vector(cfg)?;
                let k = ket.vector(cfg)?;
                let moved = e.apply(&k).map_err(err)?;
                let value = b.inner(&moved).map_err(err)?;
                let mut out = Outcome::new(complex_json(value)).with("terms", moved.len());
                if let (Some(bs), Some(ks), [t]) = (bra.single(cfg), ket.single(cfg), e.terms()) {
                    if let [g] = t.gens.as_slice() {
                        let phase = ordered_product_element(&bs, *g, &ks).map_err(err)?;
                        out = out.with("ordered_product_phase", phase);
                    }
                }
                Ok(out)
            }
            TaskSpec::ExprVev { expr } => {
                let e = parse_expr(expr, None)?;
                let nf = normal_order_with_limit(&e, self.settings.step_limit).map_err(err)?;
                Ok(Outcome::new(complex_json(scalar_to_c64(&nf.scalar_part())))
                    .with("canonical", nf.to_string())
                    .with("terms", nf.term_count())
                    .with("steps", nf.steps()))
            }
            TaskSpec::NormalOrder { expr, verify } => {
                let e = parse_expr(expr, None)?;
                let nf = normal_order_with_limit(&e, self.settings.step_limit).map_err(err)?;
                let mut out = Outcome::new(Value::String(nf.to_string()))
                    .with("terms", nf.term_count())
                    .with("steps", nf.steps());
                if *verify {
                    let cfg = self.config(task)?;
                    let dev =
                        equivalence_deviation(&e, nf.expr(), &cfg, self.settings.oracle_ceiling)
                            .map_err(err)?;
                    if dev > self.settings.tolerance {
                        return Err(format!(
                            "oracle deviation {dev:e} exceeds tolerance {:e}",
                            self.settings.tolerance
                        ));
                    }
                    out = out.with("oracle_deviation", dev);
                }
                Ok(out)
            }
            TaskSpec::Slater {
                fields,
                points,
                modes,
                coefficient,
                entries,
                as_form,
            } => {
                let fields = scenario::field_set(fields)?;
                let points = scenario::points(points);
                let modes = modes
                    .iter()
                    .map(|&m| scenario::mode(m))
                    .collect::<Result<Vec<_>, _>>()?;
                let c = scenario::complex(*coefficient);
                if *as_form {
                    let f = slater_form(&points, &modes, c, &fields).map_err(err)?;
                    let zero = [0.0; 3];
                    let re = f.re.coefficient_values(&zero);
                    let im = f.im.coefficient_values(&zero);
                    let mut keys: Vec<&Vec<usize>> = re.keys().chain(im.keys()).collect();
                    keys.sort();
                    keys.dedup();
                    let value = keys
                        .into_iter()
                        .map(|k| {
                            let z = Complex64::new(
                                re.get(k).copied().unwrap_or(0.0),
                                im.get(k).copied().unwrap_or(0.0),
                            );
                            json!({ "indices": k, "value": complex_json(z) })
                        })
                        .collect();
                    return Ok(Outcome::new(Value::Array(value)).with("degree", points.len()));
                }
                let v = slater_matrix_element(&points, &modes, c, &fields, &entries.entries()?)
                    .map_err(err)?;
                Ok(Outcome::new(complex_json(v)).with("n", points.len()))
            }
            TaskSpec::FormOp {
                op,
                form,
                other,
                map,
                field,
                at,
            } => {
                let w = form.form()?;
                let need = |what: &str| format!("operation needs `{what}`");
                let result = match op {
                    FormOpKind::Eval => w,
                    FormOpKind::D => w.exterior_derivative().map_err(err)?,
                    FormOpKind::Wedge => {
                        let o = other.as_ref().ok_or_else(|| need("other"))?.form()?;
                        w.wedge(&o).map_err(err)?
                    }
                    FormOpKind::Pullback => {
                        let f = map.as_ref().ok_or_else(|| need("map"))?.map()?;
                        pullback(&f, &w).map_err(err)?
                    }
                    FormOpKind::Interior => {
                        let a =
                            scenario::vector_field(field.as_ref().ok_or_else(|| need("field"))?)?;
                        w.interior_product(a.components()).map_err(err)?
                    }
                    FormOpKind::Lie => {
                        let a =
                            scenario::vector_field(field.as_ref().ok_or_else(|| need("field"))?)?;
                        lie_form(&a, &w, self.settings.lie_time).map_err(err)?
                    }
                    FormOpKind::LieCartan => {
                        let a =
                            scenario::vector_field(field.as_ref().ok_or_else(|| need("field"))?)?;
                        lie_form_cartan(&a, &w).map_err(err)?
                    }
                };
                Ok(Outcome::new(form_values(&result, at)?)
                    .with("degree", result.degree())
                    .with("dim", result.dim()))
            }
            TaskSpec::Integrate { form, chain, order } => {
                let w = form.form()?;
                let mut c = Chain::new();
                for p in chain {
                    let m = match &p.map {
                        Some(m) => m.map()?,
                        None => SmoothMap::identity(p.lower.len()),
                    };
                    c.push(
                        ChainPiece::new(
                            p.lower.clone(),
                            p.upper.clone(),
                            m,
                            p.orientation,
                            p.multiplicity,
                        )
                        .map_err(err)?,
                    );
                }
                let order = order.unwrap_or(self.settings.quadrature_order);
                let r = integrate(&w, &c, order).map_err(err)?;
                Ok(Outcome::new(json!(r.value))
                    .with("error_estimate", r.error_estimate)
                    .with("quadrature_order", order))
            }
            TaskSpec::OracleCheck { expr, samples } => {
                let cfg = self.config(task)?;
                cfg.check_ceiling(self.settings.oracle_ceiling)
                    .map_err(err)?;
                let mut worst = 0.0f64;
                let mut cases = 0usize;
                let mut check = |e: &OperatorExpr| -> Result<(), String> {
                    let nf = normal_order_with_limit(e, self.settings.step_limit).map_err(err)?;
                    let dev =
                        equivalence_deviation(e, nf.expr(), &cfg, self.settings.oracle_ceiling)
                            .map_err(err)?;
                    worst = worst.max(dev);
                    cases += 1;
                    Ok(())
                };
                if let Some(src) = expr {
                    check(&parse_expr(src, Some(&cfg))?)?;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(index as u64));
                for _ in 0..*samples {
                    check(&sampling::expression(&mut rng, &cfg, 6, 3))?;
                }
                if expr.is_none() && *samples == 0 {
                    let (n, bad) = anticommutator_suite(&cfg, self.settings.oracle_ceiling)?;
                    cases = n;
                    worst = bad as f64;
                }
                if worst > self.settings.tolerance {
                    return Err(format!(
                        "oracle deviation {worst:e} exceeds tolerance {:e}",
                        self.settings.tolerance
                    ));
                }
                Ok(Outcome::new(json!(worst)).with("cases", cases))
            }
        }
    }
}

/// Exact check of the graded brackets of every generator pair.
fn anticommutator_suite(cfg: &SectorConfig, ceiling: usize) -> Result<(usize, usize), String> {
    let gens: Vec<Generator> = cfg
        .modes()
        .flat_map(|m| {
            [GenKind::Create, GenKind::Annihilate].map(|kind| Generator { kind, mode: m })
        })
        .collect();
    let mats = gens
        .iter()
        .map(|g| dense_matrix(cfg, *g, ceiling))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let dim = 1usize << cfg.total();
    let mut bad = 0;
    for (x, gx) in gens.iter().enumerate() {
        for (y, gy) in gens.iter().enumerate() {
            let same = gx.mode.sector == gy.mode.sector;
            let br = graded_bracket(&mats[x], &mats[y], if same { 1 } else { -1 });
            let ok = if same && gx.mode == gy.mode && gx.kind != gy.kind {
                br.len() == dim && br.iter().all(|(&(i, j), &v)| i == j && v == 1)
            } else {
                br.is_empty()
            };
            bad += usize::from(!ok);
        }
    }
    Ok((gens.len() * gens.len(), bad))
}
