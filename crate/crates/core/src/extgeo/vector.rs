use std::sync::Arc;

use super::form::{Coefficient, Form};
use super::map::{increasing_tuples, pullback, SmoothMap};
use super::poly::Polynomial;
use crate::error::{Error, Result};

pub const FLOW_STEPS: usize = 64;
pub const DEFAULT_LIE_TIME: f64 = 1e-3;

/// Vector field `A = A^i ∂_i` on `R^D`.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<Coefficient>,
}

impl VectorField {
    pub fn new(components: Vec<Coefficient>) -> Result<VectorField> {
        let dim = components.len();
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::Shape(format!(
                "vector field components must live on R^{dim}"
            )));
        }
        Ok(VectorField { components })
    }

    pub fn polynomial(components: Vec<Polynomial>) -> Result<VectorField> {
        VectorField::new(components.into_iter().map(Coefficient::Poly).collect())
    }

    pub fn constant(v: &[f64]) -> VectorField {
        let dim = v.len();
        VectorField {
            components: v.iter().map(|&c| Coefficient::constant(dim, c)).collect(),
        }
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate(dim: usize, i: usize) -> VectorField {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        VectorField::constant(&v)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Coefficient] {
        &self.components
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    /// Point reached after time `t`, classical RK4 with step `t/64`.
    pub fn flow(&self, x: &[f64], t: f64) -> Vec<f64> {
        self.flow_with_steps(x, t, FLOW_STEPS)
    }

    pub fn flow_with_steps(&self, x: &[f64], t: f64, steps: usize) -> Vec<f64> {
        let h = t / steps as f64;
        let mut y = x.to_vec();
        let shifted = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> {
            y.iter().zip(k).map(|(a, b)| a + s * b).collect()
        };
        for _ in 0..steps {
            let k1 = self.eval(&y);
            let k2 = self.eval(&shifted(&y, &k1, h / 2.0));
            let k3 = self.eval(&shifted(&y, &k2, h / 2.0));
            let k4 = self.eval(&shifted(&y, &k3, h));
            for i in 0..y.len() {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        y
    }

    /// The time-`t` flow as a map of `R^D` into itself.
    pub fn flow_map(&self, t: f64) -> SmoothMap {
        let field = self.clone();
        SmoothMap::from_fn(self.dim(), self.dim(), move |x| field.flow(x, t))
    }

    /// `A^i ∂_i φ` as a function.
    pub fn apply(&self, phi: &Coefficient) -> Result<Coefficient> {
        if phi.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "function on R^{} for a field on R^{}",
                phi.dim(),
                self.dim()
            )));
        }
        let mut out = Coefficient::constant(self.dim(), 0.0);
        for (i, a) in self.components.iter().enumerate() {
            let d = phi.partial(i);
            if !d.is_zero() && !a.is_zero() {
                out = out.add(&a.mul(&d));
            }
        }
        Ok(out)
    }
}

/// `L_A φ = A^i ∂_i φ` at `x`.
pub fn lie_function(field: &VectorField, phi: &Coefficient, x: &[f64]) -> Result<f64> {
    Ok(field.apply(phi)?.eval(x))
}

/// Difference quotient `(φ(A^t x) − φ(x)) / t` along the RK4 flow.
pub fn lie_function_flow(field: &VectorField, phi: &Coefficient, x: &[f64], t: f64) -> f64 {
    (phi.eval(&field.flow(x, t)) - phi.eval(x)) / t
}

/// `[A, B]^i = A^j ∂_j B^i − B^j ∂_j A^i`.
pub fn commutator(a: &VectorField, b: &VectorField) -> Result<VectorField> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(
            "commutator of fields on different spaces".into(),
        ));
    }
    let comps = (0..a.dim())
        .map(|i| {
            Ok(a.apply(&b.components[i])?
                .add(&b.apply(&a.components[i])?.scale(-1.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    VectorField::new(comps)
}

/// Cartan formula `L_A ω = d(ι_A ω) + ι_A(dω)`.
pub fn lie_form_cartan(field: &VectorField, form: &Form) -> Result<Form> {
    if field.dim() != form.dim() {
        return Err(Error::Shape(
            "field and form live on different spaces".into(),
        ));
    }
    let inner = if form.degree() == 0 {
        Form::zero(form.dim(), 0)?
    } else {
        form.interior_product(field.components())?
            .exterior_derivative()?
    };
    if form.degree() == form.dim() {
        return Ok(inner);
    }
    let outer = form
        .exterior_derivative()?
        .interior_product(field.components())?;
    inner.add(&outer)
}

/// Flow-limit Lie derivative from the quotients `D(s) = (φ_s* ω − ω)/s`
/// at `s = t, t/2, t/4`, combined by two Richardson steps so the error is
/// third order in `t`.
pub fn lie_form(field: &VectorField, form: &Form, t: f64) -> Result<Form> {
    if field.dim() != form.dim() {
        return Err(Error::Shape(
            "field and form live on different spaces".into(),
        ));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "flow time must be positive, got {t}"
        )));
    }
    let dim = form.dim();
    let times = [t, t / 2.0, t / 4.0];
    let pulled = times
        .iter()
        .map(|&s| pullback(&field.flow_map(s), form))
        .collect::<Result<Vec<_>>>()?;
    let base = Arc::new(form.clone());
    let mut out = Form::zero(dim, form.degree())?;
    for key in increasing_tuples(dim, form.degree()) {
        let c0 = base.coefficient(&key).cloned();
        let cs: Vec<Option<Coefficient>> = pulled
            .iter()
            .map(|f| f.coefficient(&key).cloned())
            .collect();
        if c0.is_none() && cs.iter().all(Option::is_none) {
            continue;
        }
        let eval = |c: &Option<Coefficient>, x: &[f64]| c.as_ref().map_or(0.0, |c| c.eval(x));
        let coeff = Coefficient::func(dim, move |x| {
            let w0 = eval(&c0, x);
            let d: Vec<f64> = cs
                .iter()
                .zip(times)
                .map(|(c, s)| (eval(c, x) - w0) / s)
                .collect();
            // 2D(s/2) − D(s) cancels the linear term, then (4R(t/2) − R(t))/3 the quadratic one.
            let r_full = 2.0 * d[1] - d[0];
            let r_half = 2.0 * d[2] - d[1];
            (4.0 * r_half - r_full) / 3.0
        });
        out.add_term(&key, coeff)?;
    }
    Ok(out)
}
