use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::form::{fd_step, Coefficient, Form};
use super::poly::Polynomial;
use crate::error::{Error, Result};

pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

#[derive(Clone)]
enum Components {
    Poly(Vec<Polynomial>),
    Func(VectorFn),
}

/// Differentiable map `R^n → R^m`.
#[derive(Clone)]
pub struct SmoothMap {
    source: usize,
    target: usize,
    components: Components,
    jacobian: Option<JacobianFn>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothMap")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("polynomial", &self.is_polynomial())
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl SmoothMap {
    /// Polynomial components, all on the same source space.
    pub fn polynomial(source: usize, components: Vec<Polynomial>) -> Result<SmoothMap> {
        if components.iter().any(|p| p.dim() != source) {
            return Err(Error::Shape(format!(
                "components must be polynomials on R^{source}"
            )));
        }
        Ok(SmoothMap {
            source,
            target: components.len(),
            components: Components::Poly(components),
            jacobian: None,
        })
    }

    /// Callable components; the Jacobian falls back to central differences.
    pub fn from_fn(
        source: usize,
        target: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> SmoothMap {
        SmoothMap {
            source,
            target,
            components: Components::Func(Arc::new(f)),
            jacobian: None,
        }
    }

    pub fn with_jacobian(
        mut self,
        j: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> SmoothMap {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn identity(dim: usize) -> SmoothMap {
        SmoothMap::polynomial(dim, (0..dim).map(|i| Polynomial::var(dim, i)).collect())
            .expect("consistent dims")
    }

    /// `x ↦ L x + b`.
    pub fn affine(matrix: &DMatrix<f64>, offset: &[f64]) -> Result<SmoothMap> {
        let (m, n) = matrix.shape();
        if offset.len() != m {
            return Err(Error::Shape(format!(
                "offset of length {} for {m} rows",
                offset.len()
            )));
        }
        let comps = (0..m)
            .map(|i| {
                let mut p = Polynomial::constant(n, offset[i]);
                for j in 0..n {
                    p = p.add(&Polynomial::var(n, j).scale(matrix[(i, j)]));
                }
                p
            })
            .collect();
        SmoothMap::polynomial(n, comps)
    }

    pub fn linear(matrix: &DMatrix<f64>) -> SmoothMap {
        SmoothMap::affine(matrix, &vec![0.0; matrix.nrows()]).expect("zero offset fits")
    }

    pub fn source_dim(&self) -> usize {
        self.source
    }

    pub fn target_dim(&self) -> usize {
        self.target
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.components, Components::Poly(_))
    }

    pub fn polynomials(&self) -> Option<&[Polynomial]> {
        match &self.components {
            Components::Poly(p) => Some(p),
            Components::Func(_) => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match &self.components {
            Components::Poly(ps) => ps.iter().map(|p| p.eval(x)).collect(),
            Components::Func(f) => f(x),
        }
    }

    /// Rows are target components, columns source coordinates.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        if let Some(j) = &self.jacobian {
            return j(x);
        }
        match &self.components {
            Components::Poly(ps) => {
                DMatrix::from_fn(self.target, self.source, |i, j| ps[i].derivative(j).eval(x))
            }
            Components::Func(_) => self.fd_jacobian(x),
        }
    }

    /// Central-difference Jacobian, ignoring any analytic one.
    pub fn fd_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.target, self.source);
        let mut p = x.to_vec();
        for j in 0..self.source {
            let h = fd_step(x[j]);
            p[j] = x[j] + h;
            let up = self.eval(&p);
            p[j] = x[j] - h;
            let down = self.eval(&p);
            p[j] = x[j];
            for i in 0..self.target {
                jac[(i, j)] = (up[i] - down[i]) / (2.0 * h);
            }
        }
        jac
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SmoothMap) -> Result<SmoothMap> {
        if inner.target != self.source {
            return Err(Error::Shape(format!(
                "cannot compose R^{} → R^{} after R^{} → R^{}",
                self.source, self.target, inner.source, inner.target
            )));
        }
        if let (Components::Poly(outer), Components::Poly(inner_p)) =
            (&self.components, &inner.components)
        {
            if self.jacobian.is_none() && inner.jacobian.is_none() {
                let comps = outer.iter().map(|p| p.compose(inner_p)).collect();
                return SmoothMap::polynomial(inner.source, comps);
            }
        }
        let (a, b) = (self.clone(), inner.clone());
        let (a2, b2) = (self.clone(), inner.clone());
        Ok(
            SmoothMap::from_fn(inner.source, self.target, move |x| a.eval(&b.eval(x)))
                .with_jacobian(move |x| a2.jacobian(&b2.eval(x)) * b2.jacobian(x)),
        )
    }

    /// Composes a target-space coefficient with this map.
    fn pull_coefficient(&self, c: &Coefficient) -> Coefficient {
        if let (Coefficient::Poly(p), Components::Poly(ps)) = (c, &self.components) {
            return Coefficient::Poly(p.compose(ps));
        }
        let (c, map) = (c.clone(), self.clone());
        Coefficient::func(self.source, move |x| c.eval(&map.eval(x)))
    }
}

/// All strictly increasing `k`-subsets of `0..n`.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Determinant of a square polynomial matrix by Laplace expansion.
fn poly_det(m: &[Vec<Polynomial>], dim: usize) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::constant(dim, 1.0);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = Polynomial::zero(dim);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul(&poly_det(&minor, dim));
        total = total.add(&if j % 2 == 0 { term } else { term.scale(-1.0) });
    }
    total
}

fn minor_det(jac: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    let k = rows.len();
    if k == 0 {
        return 1.0;
    }
    DMatrix::from_fn(k, k, |a, b| jac[(rows[a], cols[b])]).determinant()
}

/// `f*ω`: coefficients `(a_I ∘ f) · det(∂f^I/∂x^J)`.
pub fn pullback(f: &SmoothMap, form: &Form) -> Result<Form> {
    if form.dim() != f.target {
        return Err(Error::Shape(format!(
            "form on R^{} pulled back along a map into R^{}",
            form.dim(),
            f.target
        )));
    }
    let k = form.degree();
    let mut out = Form::zero(f.source, k)?;
    let exact = form.is_polynomial() && f.is_polynomial() && f.jacobian.is_none();
    let tuples = increasing_tuples(f.source, k);
    if exact {
        let ps = f.polynomials().expect("polynomial map");
        let grads: Vec<Vec<Polynomial>> = ps
            .iter()
            .map(|p| (0..f.source).map(|j| p.derivative(j)).collect())
            .collect();
        for (key, c) in form.terms() {
            let pulled = f.pull_coefficient(c);
            for cols in &tuples {
                let m: Vec<Vec<Polynomial>> = key
                    .iter()
                    .map(|&r| cols.iter().map(|&s| grads[r][s].clone()).collect())
                    .collect();
                let det = poly_det(&m, f.source);
                if !det.is_zero() {
                    out.add_term(cols, pulled.mul(&Coefficient::Poly(det)))?;
                }
            }
        }
        return Ok(out);
    }
    let terms: Arc<Vec<(Vec<usize>, Coefficient)>> =
        Arc::new(form.terms().map(|(k, c)| (k.to_vec(), c.clone())).collect());
    for cols in tuples {
        let (map, terms, cols2) = (f.clone(), terms.clone(), cols.clone());
        let coeff = Coefficient::func(f.source, move |x| {
            let y = map.eval(x);
            let jac = map.jacobian(x);
            terms
                .iter()
                .map(|(key, c)| c.eval(&y) * minor_det(&jac, key, &cols2))
                .sum()
        });
        out.add_term(&cols, coeff)?;
    }
    Ok(out)
}
