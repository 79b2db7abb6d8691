use std::f64::consts::PI;

use super::form::Form;
use super::map::{pullback, SmoothMap};
use crate::error::{Error, Result};

pub const DEFAULT_QUADRATURE_ORDER: usize = 8;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order.max(1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Tensor-product Gauss–Legendre rule for `f` over a box.
pub fn integrate_box(f: &dyn Fn(&[f64]) -> f64, lower: &[f64], upper: &[f64], order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let dim = lower.len();
    let half: Vec<f64> = (0..dim).map(|i| 0.5 * (upper[i] - lower[i])).collect();
    let mid: Vec<f64> = (0..dim).map(|i| 0.5 * (upper[i] + lower[i])).collect();
    let jac: f64 = half.iter().product();
    let n = nodes.len();
    let total_points = n.pow(dim as u32);
    let mut x = vec![0.0; dim];
    let mut sum = 0.0;
    for flat in 0..total_points {
        let mut rem = flat;
        let mut w = 1.0;
        for axis in 0..dim {
            let k = rem % n;
            rem /= n;
            x[axis] = mid[axis] + half[axis] * nodes[k];
            w *= weights[k];
        }
        sum += w * f(&x);
    }
    sum * jac
}

/// One oriented, weighted parallelepiped piece of a chain.
#[derive(Debug, Clone)]
pub struct ChainPiece {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub map: SmoothMap,
    pub orientation: i8,
    pub multiplicity: i64,
}

impl ChainPiece {
    pub fn new(
        lower: Vec<f64>,
        upper: Vec<f64>,
        map: SmoothMap,
        orientation: i8,
        multiplicity: i64,
    ) -> Result<Self> {
        if lower.len() != upper.len() || lower.len() != map.source_dim() {
            return Err(Error::Shape(format!(
                "box of dimension {}/{} for a map from R^{}",
                lower.len(),
                upper.len(),
                map.source_dim()
            )));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(a < b)) {
            return Err(Error::Domain(
                "chain boxes must be nondegenerate (lower < upper)".into(),
            ));
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::Domain(format!(
                "orientation must be ±1, got {orientation}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            map,
            orientation,
            multiplicity,
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }
}

/// Formal integer combination of oriented pieces.
#[derive(Debug, Clone, Default)]
pub struct Chain {
    pieces: Vec<ChainPiece>,
}

impl Chain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(piece: ChainPiece) -> Self {
        Self {
            pieces: vec![piece],
        }
    }

    pub fn push(&mut self, piece: ChainPiece) {
        self.pieces.push(piece);
    }

    pub fn pieces(&self) -> &[ChainPiece] {
        &self.pieces
    }

    /// Identity-mapped unit cube `[0,1]^dim`.
    pub fn unit_cube(dim: usize) -> Self {
        Self::single(
            ChainPiece::new(
                vec![0.0; dim],
                vec![1.0; dim],
                SmoothMap::identity(dim),
                1,
                1,
            )
            .expect("valid unit cube"),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Difference against a rule of half the order.
    pub error_estimate: f64,
}

/// `Σ m_i · Or_i · ∫_{D_i} f_i* ω`.
pub fn integrate(form: &Form, chain: &Chain, order: usize) -> Result<Integral> {
    let coarse = (order / 2).max(1);
    let mut value = 0.0;
    let mut rough = 0.0;
    for piece in &chain.pieces {
        if form.degree() != piece.dim() {
            return Err(Error::Shape(format!(
                "{}-form integrated over a {}-dimensional piece",
                form.degree(),
                piece.dim()
            )));
        }
        let pulled = pullback(&piece.map, form)?;
        let key: Vec<usize> = (0..piece.dim()).collect();
        let Some(c) = pulled.coefficient(&key) else {
            continue;
        };
        let g = |x: &[f64]| c.eval(x);
        let weight = piece.multiplicity as f64 * f64::from(piece.orientation);
        value += weight * integrate_box(&g, &piece.lower, &piece.upper, order);
        rough += weight * integrate_box(&g, &piece.lower, &piece.upper, coarse);
    }
    Ok(Integral {
        value,
        error_estimate: (value - rough).abs(),
    })
}
