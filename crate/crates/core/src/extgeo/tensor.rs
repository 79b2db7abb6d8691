use super::form::{sort_sign, Coefficient, Form};
use super::map::increasing_tuples;
use crate::error::{Error, Result};
use crate::fields::{factorial, slater_matrix_element, FieldSet, SlaterEntries};
use crate::fock::{Complex64, ModeIndex};
use crate::grading::PointZ;

/// Dense `(p, q)` tensor on `R^D`, row-major over upper then lower slots.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    dim: usize,
    upper: usize,
    lower: usize,
    data: Vec<f64>,
}

impl CoefficientTensor {
    pub fn zeros(dim: usize, upper: usize, lower: usize) -> Self {
        Self {
            dim,
            upper,
            lower,
            data: vec![0.0; dim.pow((upper + lower) as u32)],
        }
    }

    pub fn from_data(dim: usize, upper: usize, lower: usize, data: Vec<f64>) -> Result<Self> {
        let want = dim.pow((upper + lower) as u32);
        if data.len() != want {
            return Err(Error::Shape(format!(
                "({upper},{lower}) tensor on R^{dim} needs {want} entries, got {}",
                data.len()
            )));
        }
        Ok(Self {
            dim,
            upper,
            lower,
            data,
        })
    }

    /// Covariant tensor with entries `f(i₁, …, i_n)`.
    pub fn from_fn(dim: usize, order: usize, f: impl Fn(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(dim, 0, order);
        let mut idx = vec![0; order];
        for flat in 0..t.data.len() {
            t.unflatten_into(flat, &mut idx);
            t.data[flat] = f(&idx);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    fn unflatten_into(&self, mut flat: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.rank(), "index arity");
        self.data[self.flatten(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        assert_eq!(idx.len(), self.rank(), "index arity");
        let k = self.flatten(idx);
        self.data[k] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// All permutations of `0..n` with their signs, in lexicographic order.
pub fn permutations(n: usize) -> Vec<(i8, Vec<usize>)> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(i8, Vec<usize>)>) {
        if cur.len() == used.len() {
            let (sign, _) = sort_sign(cur).expect("permutation");
            out.push((sign, cur.clone()));
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Coefficient on increasing `I`: `(1/√n!) Σ_σ sgn σ · T[I∘σ]`.
pub fn antisymmetrize(t: &CoefficientTensor) -> Result<Form> {
    if t.upper != 0 {
        return Err(Error::Shape(format!(
            "antisymmetrization needs a covariant tensor, got order ({},{})",
            t.upper, t.lower
        )));
    }
    let n = t.lower;
    let mut out = Form::zero(t.dim, n)?;
    let perms = permutations(n);
    let norm = factorial(n).sqrt();
    let mut idx = vec![0; n];
    for key in increasing_tuples(t.dim, n) {
        let mut sum = 0.0;
        for (sign, p) in &perms {
            for (slot, &k) in p.iter().enumerate() {
                idx[slot] = key[k];
            }
            sum += f64::from(*sign) * t.get(&idx);
        }
        if sum != 0.0 {
            out.add_term(&key, Coefficient::constant(t.dim, sum / norm))?;
        }
    }
    Ok(out)
}

/// Fully antisymmetric covariant tensor of a form at a point.
pub fn form_tensor(form: &Form, x: &[f64]) -> CoefficientTensor {
    let values = form.coefficient_values(x);
    CoefficientTensor::from_fn(form.dim(), form.degree(), |idx| match sort_sign(idx) {
        Some((sign, key)) => f64::from(sign) * values.get(&key).copied().unwrap_or(0.0),
        None => 0.0,
    })
}

/// Complex-valued form split into real and imaginary parts.
#[derive(Debug, Clone)]
pub struct ComplexForm {
    pub re: Form,
    pub im: Form,
}

impl ComplexForm {
    pub fn degree(&self) -> usize {
        self.re.degree()
    }

    pub fn dim(&self) -> usize {
        self.re.dim()
    }

    pub fn coefficient(&self, key: &[usize], x: &[f64]) -> Complex64 {
        let part = |f: &Form| f.coefficient(key).map_or(0.0, |c| c.eval(x));
        Complex64::new(part(&self.re), part(&self.im))
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty() && self.im.is_empty()
    }
}

/// Antisymmetrizes the component tensor `T[a₁…a_n]` of Slater matrix
/// elements (row `i` carrying component `a_i`) into an `n`-form on the
/// three component directions. `coefficient` is the joint `c̄(r₁…r_n)`.
pub fn slater_form(
    points: &[PointZ],
    modes: &[ModeIndex],
    coefficient: Complex64,
    fields: &FieldSet,
) -> Result<ComplexForm> {
    let n = points.len();
    if modes.len() != n || n == 0 {
        return Err(Error::Shape(format!(
            "{n} points for {} modes",
            modes.len()
        )));
    }
    if n > 3 {
        return Err(Error::Degree { degree: n, dim: 3 });
    }
    let mut re = CoefficientTensor::zeros(3, 0, n);
    let mut im = CoefficientTensor::zeros(3, 0, n);
    let mut idx = vec![0; n];
    for flat in 0..re.data.len() {
        re.unflatten_into(flat, &mut idx);
        let v = slater_matrix_element(
            points,
            modes,
            coefficient,
            fields,
            &SlaterEntries::Components(idx.clone()),
        )?;
        re.data[flat] = v.re;
        im.data[flat] = v.im;
    }
    Ok(ComplexForm {
        re: antisymmetrize(&re)?,
        im: antisymmetrize(&im)?,
    })
}
