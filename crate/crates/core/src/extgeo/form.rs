use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::poly::Polynomial;
use crate::error::{Error, Result};

/// Real-valued function on `R^D`; must be reentrant.
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Central-difference step for coordinate value `x`.
pub fn fd_step(x: f64) -> f64 {
    1e-5 * (1.0 + x.abs())
}

/// Central difference of `f` along axis `i` at `x`.
pub fn central_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize) -> f64 {
    let h = fd_step(x[i]);
    let mut p = x.to_vec();
    p[i] = x[i] + h;
    let up = f(&p);
    p[i] = x[i] - h;
    let down = f(&p);
    (up - down) / (2.0 * h)
}

/// Form coefficient: an exact polynomial or an opaque callable.
#[derive(Clone)]
pub enum Coefficient {
    Poly(Polynomial),
    Func { dim: usize, f: ScalarFn },
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Poly(p) => write!(f, "Poly({p})"),
            Coefficient::Func { dim, .. } => write!(f, "Func(dim={dim})"),
        }
    }
}

impl From<Polynomial> for Coefficient {
    fn from(p: Polynomial) -> Self {
        Coefficient::Poly(p)
    }
}

impl Coefficient {
    pub fn constant(dim: usize, c: f64) -> Self {
        Coefficient::Poly(Polynomial::constant(dim, c))
    }

    pub fn func(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Func {
            dim,
            f: Arc::new(f),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Coefficient::Poly(p) => p.dim(),
            Coefficient::Func { dim, .. } => *dim,
        }
    }

    pub fn as_poly(&self) -> Option<&Polynomial> {
        match self {
            Coefficient::Poly(p) => Some(p),
            Coefficient::Func { .. } => None,
        }
    }

    /// Exactly zero; callables are never known to vanish.
    pub fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Poly(p) if p.is_zero())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Coefficient::Poly(p) => p.eval(x),
            Coefficient::Func { f, .. } => f(x),
        }
    }

    fn into_fn(self) -> ScalarFn {
        match self {
            Coefficient::Poly(p) => Arc::new(move |x: &[f64]| p.eval(x)),
            Coefficient::Func { f, .. } => f,
        }
    }

    pub fn add(&self, other: &Coefficient) -> Coefficient {
        match (self, other) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => Coefficient::Poly(a.add(b)),
            _ => {
                let (a, b) = (self.clone().into_fn(), other.clone().into_fn());
                Coefficient::func(self.dim(), move |x| a(x) + b(x))
            }
        }
    }

    pub fn scale(&self, s: f64) -> Coefficient {
        match self {
            Coefficient::Poly(p) => Coefficient::Poly(p.scale(s)),
            Coefficient::Func { dim, f } => {
                let f = f.clone();
                Coefficient::func(*dim, move |x| s * f(x))
            }
        }
    }

    pub fn mul(&self, other: &Coefficient) -> Coefficient {
        match (self, other) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => Coefficient::Poly(a.mul(b)),
            _ => {
                let (a, b) = (self.clone().into_fn(), other.clone().into_fn());
                Coefficient::func(self.dim(), move |x| a(x) * b(x))
            }
        }
    }

    /// `∂/∂x_i`: exact for polynomials, central differences otherwise.
    pub fn partial(&self, i: usize) -> Coefficient {
        match self {
            Coefficient::Poly(p) => Coefficient::Poly(p.derivative(i)),
            Coefficient::Func { dim, f } => {
                let f = f.clone();
                Coefficient::func(*dim, move |x| central_difference(&*f, x, i))
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|i| self.partial(i).eval(x)).collect()
    }
}

/// Sign of the permutation sorting `idx`, or `None` on a repeated entry.
pub fn sort_sign(idx: &[usize]) -> Option<(i8, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut sign = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// Differential k-form `Σ_{I increasing} a_I dx^{i₁}∧…∧dx^{i_k}` on `R^D`.
#[derive(Debug, Clone)]
pub struct Form {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Coefficient>,
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Result<Form> {
        if degree > dim {
            return Err(Error::Degree { degree, dim });
        }
        Ok(Form {
            dim,
            degree,
            terms: BTreeMap::new(),
        })
    }

    /// 0-form from a coefficient.
    pub fn scalar(c: Coefficient) -> Form {
        let mut f = Form::zero(c.dim(), 0).expect("degree 0");
        f.insert(Vec::new(), c);
        f
    }

    /// `dx^{i₁}∧…∧dx^{i_k}` in the given order, sorted with sign.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Form> {
        let mut f = Form::zero(dim, indices.len())?;
        f.add_term(indices, Coefficient::constant(dim, 1.0))?;
        Ok(f)
    }

    /// `c · dx^{i₁}∧…∧dx^{i_k}`.
    pub fn monomial(indices: &[usize], c: Coefficient) -> Result<Form> {
        let mut f = Form::zero(c.dim(), indices.len())?;
        f.add_term(indices, c)?;
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &Coefficient)> {
        self.terms.iter().map(|(k, c)| (k.as_slice(), c))
    }

    pub fn coefficient(&self, indices: &[usize]) -> Option<&Coefficient> {
        self.terms.get(indices)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.values().all(|c| c.as_poly().is_some())
    }

    fn insert(&mut self, key: Vec<usize>, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&key) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    /// Adds `c · dx^{indices}` with indices in any order.
    pub fn add_term(&mut self, indices: &[usize], c: Coefficient) -> Result<()> {
        if indices.len() != self.degree {
            return Err(Error::Shape(format!(
                "{} indices for a {}-form",
                indices.len(),
                self.degree
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim) {
            return Err(Error::Range {
                value: bad,
                bound: self.dim,
            });
        }
        if c.dim() != self.dim {
            return Err(Error::Shape(format!(
                "coefficient on R^{} for a form on R^{}",
                c.dim(),
                self.dim
            )));
        }
        if let Some((sign, key)) = sort_sign(indices) {
            self.insert(key, c.scale(f64::from(sign)));
        }
        Ok(())
    }

    fn check_same_space(&self, other: &Form) -> Result<()> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::Shape(format!(
                "{}-form on R^{} vs {}-form on R^{}",
                self.degree, self.dim, other.degree, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Form {
        let mut out = Form {
            dim: self.dim,
            degree: self.degree,
            terms: BTreeMap::new(),
        };
        for (k, c) in &self.terms {
            out.insert(k.clone(), c.scale(s));
        }
        out
    }

    /// Multiplies every coefficient by the function `g`.
    pub fn mul_function(&self, g: &Coefficient) -> Result<Form> {
        if g.dim() != self.dim {
            return Err(Error::Shape(
                "function and form live on different spaces".into(),
            ));
        }
        let mut out = Form::zero(self.dim, self.degree)?;
        for (k, c) in &self.terms {
            out.insert(k.clone(), c.mul(g));
        }
        Ok(out)
    }

    pub fn coefficient_values(&self, x: &[f64]) -> BTreeMap<Vec<usize>, f64> {
        self.terms
            .iter()
            .map(|(k, c)| (k.clone(), c.eval(x)))
            .collect()
    }

    /// Largest coefficient magnitude at `x`.
    pub fn max_abs_at(&self, x: &[f64]) -> f64 {
        self.terms
            .values()
            .map(|c| c.eval(x).abs())
            .fold(0.0, f64::max)
    }

    /// `Σ_I a_I(x) · det(v_j[i_l])`: the form applied to `k` vectors.
    pub fn evaluate(&self, vectors: &[Vec<f64>], x: &[f64]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::Shape(format!(
                "{} vectors for a {}-form",
                vectors.len(),
                self.degree
            )));
        }
        if x.len() != self.dim || vectors.iter().any(|v| v.len() != self.dim) {
            return Err(Error::Shape(format!(
                "vectors and point must have length {}",
                self.dim
            )));
        }
        let k = self.degree;
        let mut total = 0.0;
        for (key, c) in &self.terms {
            let minor = DMatrix::from_fn(k, k, |l, j| vectors[j][key[l]]);
            let det = if k == 0 { 1.0 } else { minor.determinant() };
            total += c.eval(x) * det;
        }
        Ok(total)
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!(
                "wedge of forms on R^{} and R^{}",
                self.dim, other.dim
            )));
        }
        let mut out = Form::zero(self.dim, self.degree + other.degree)?;
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let mut idx = i.clone();
                idx.extend(j);
                if let Some((sign, key)) = sort_sign(&idx) {
                    out.insert(key, a.mul(b).scale(f64::from(sign)));
                }
            }
        }
        Ok(out)
    }

    /// `d(a_I dx^I) = Σ_i ∂_i a_I dx^i∧dx^I`.
    pub fn exterior_derivative(&self) -> Result<Form> {
        let mut out = Form::zero(self.dim, self.degree + 1)?;
        for (key, c) in &self.terms {
            for i in 0..self.dim {
                if key.contains(&i) {
                    continue;
                }
                let dc = c.partial(i);
                if dc.is_zero() {
                    continue;
                }
                let pos = key.iter().filter(|&&k| k < i).count();
                let mut new_key = key.clone();
                new_key.insert(pos, i);
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                out.insert(new_key, dc.scale(sign));
            }
        }
        Ok(out)
    }

    /// `ι_A ω`, contraction of the first slot with the field components.
    pub fn interior_product(&self, field: &[Coefficient]) -> Result<Form> {
        if field.len() != self.dim {
            return Err(Error::Shape(format!(
                "field with {} components for a form on R^{}",
                field.len(),
                self.dim
            )));
        }
        if self.degree == 0 {
            return Form::zero(self.dim, 0);
        }
        let mut out = Form::zero(self.dim, self.degree - 1)?;
        for (key, c) in &self.terms {
            for (p, &i) in key.iter().enumerate() {
                let mut rest = key.clone();
                rest.remove(p);
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                out.insert(rest, c.mul(&field[i]).scale(sign));
            }
        }
        Ok(out)
    }
}
