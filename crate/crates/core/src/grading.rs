//! Index algebra of the twelve-dimensional chart.
//!
//! Coordinates `ζ^(λ,μ,α)` carry a composite index with `λ, μ ∈ {1,2}` and
//! `α ∈ {1,2,3}`. The chart splits into an η-sector and a u-sector, each
//! holding a `+` and a `−` light-cone triple:
//!
//! ```text
//! η^(+α) = (ζ^(1,1,α) + ζ^(2,1,α)) / √2     u^(+α) = (ζ^(1,1,α) − ζ^(2,1,α)) / √2
//! η^(−α) = (ζ^(1,2,α) + ζ^(2,2,α)) / √2     u^(−α) = (ζ^(1,2,α) − ζ^(2,2,α)) / √2
//! ```
//!
//! On a sector point the bilinear form is off-diagonal in `±`, so the
//! quadratic form reads `2 Σ_α plus_α · minus_α`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// Number of chart coordinates.
pub const CHART_DIM: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompositeIndex {
    lambda: u8,
    mu: u8,
    alpha: u8,
}

impl CompositeIndex {
    pub fn new(lambda: u8, mu: u8, alpha: u8) -> Result<Self> {
        if !(1..=2).contains(&lambda) || !(1..=2).contains(&mu) || !(1..=3).contains(&alpha) {
            return Err(Error::Domain(format!(
                "composite index ({lambda},{mu},{alpha}) outside (1..2,1..2,1..3)"
            )));
        }
        Ok(Self { lambda, mu, alpha })
    }

    pub fn lambda(self) -> u8 {
        self.lambda
    }

    pub fn mu(self) -> u8 {
        self.mu
    }

    pub fn alpha(self) -> u8 {
        self.alpha
    }

    /// Lexicographic position in `(λ, μ, α)`.
    pub fn flatten(self) -> usize {
        (self.lambda as usize - 1) * 6 + (self.mu as usize - 1) * 3 + (self.alpha as usize - 1)
    }

    pub fn unflatten(flat: usize) -> Result<Self> {
        if flat >= CHART_DIM {
            return Err(Error::Range {
                value: flat,
                bound: CHART_DIM,
            });
        }
        Ok(Self {
            lambda: (flat / 6) as u8 + 1,
            mu: ((flat / 3) % 2) as u8 + 1,
            alpha: (flat % 3) as u8 + 1,
        })
    }

    pub fn all() -> impl Iterator<Item = CompositeIndex> {
        (0..CHART_DIM).map(|i| Self::unflatten(i).expect("in range"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SectorKind {
    Eta,
    U,
}

impl SectorKind {
    /// `ε_η = +1`, `ε_u = −1`.
    pub fn epsilon(self) -> f64 {
        match self {
            SectorKind::Eta => 1.0,
            SectorKind::U => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LightConeSign {
    Plus,
    Minus,
}

/// A light-cone coordinate label `η^(±α)` or `u^(±α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SectorLabel {
    pub kind: SectorKind,
    pub sign: LightConeSign,
    pub alpha: u8,
}

impl SectorLabel {
    pub fn all() -> impl Iterator<Item = SectorLabel> {
        [SectorKind::Eta, SectorKind::U]
            .into_iter()
            .flat_map(|kind| {
                [LightConeSign::Plus, LightConeSign::Minus]
                    .into_iter()
                    .flat_map(move |sign| {
                        (1..=3).map(move |alpha| SectorLabel { kind, sign, alpha })
                    })
            })
    }

    /// The two chart indices combined into this label, `(λ=1, λ=2)` with the
    /// shared `μ` fixed by the sign.
    pub fn sources(self) -> (CompositeIndex, CompositeIndex) {
        let mu = match self.sign {
            LightConeSign::Plus => 1,
            LightConeSign::Minus => 2,
        };
        (
            CompositeIndex {
                lambda: 1,
                mu,
                alpha: self.alpha,
            },
            CompositeIndex {
                lambda: 2,
                mu,
                alpha: self.alpha,
            },
        )
    }
}

/// A point of the full chart, indexed by the flat composite index.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointZ(pub [f64; CHART_DIM]);

impl PointZ {
    pub fn get(&self, idx: CompositeIndex) -> f64 {
        self.0[idx.flatten()]
    }

    pub fn set(&mut self, idx: CompositeIndex, value: f64) {
        self.0[idx.flatten()] = value;
    }
}

/// Light-cone components of one sector (`η` or `u`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointSector {
    pub plus: [f64; 3],
    pub minus: [f64; 3],
}

impl PointSector {
    pub fn new(plus: [f64; 3], minus: [f64; 3]) -> Self {
        Self { plus, minus }
    }

    pub fn component(&self, sign: LightConeSign, alpha: usize) -> f64 {
        match sign {
            LightConeSign::Plus => self.plus[alpha],
            LightConeSign::Minus => self.minus[alpha],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.plus.iter().chain(&self.minus).all(|v| v.is_finite())
    }
}

pub fn to_lightcone(z: &PointZ) -> (PointSector, PointSector) {
    let mut eta = PointSector::default();
    let mut u = PointSector::default();
    for a in 0..3 {
        let z11 = z.0[a];
        let z12 = z.0[3 + a];
        let z21 = z.0[6 + a];
        let z22 = z.0[9 + a];
        eta.plus[a] = (z11 + z21) * FRAC_1_SQRT_2;
        eta.minus[a] = (z12 + z22) * FRAC_1_SQRT_2;
        u.plus[a] = (z11 - z21) * FRAC_1_SQRT_2;
        u.minus[a] = (z12 - z22) * FRAC_1_SQRT_2;
    }
    (eta, u)
}

pub fn from_lightcone(eta: &PointSector, u: &PointSector) -> PointZ {
    let mut z = PointZ::default();
    for a in 0..3 {
        z.0[a] = (eta.plus[a] + u.plus[a]) * FRAC_1_SQRT_2;
        z.0[6 + a] = (eta.plus[a] - u.plus[a]) * FRAC_1_SQRT_2;
        z.0[3 + a] = (eta.minus[a] + u.minus[a]) * FRAC_1_SQRT_2;
        z.0[9 + a] = (eta.minus[a] - u.minus[a]) * FRAC_1_SQRT_2;
    }
    z
}

/// Symmetric bilinear pairing with off-diagonal `±` metric:
/// `Σ_α (a⁺_α b⁻_α + a⁻_α b⁺_α)`.
pub fn pairing(a: &PointSector, b: &PointSector) -> f64 {
    (0..3)
        .map(|i| a.plus[i] * b.minus[i] + a.minus[i] * b.plus[i])
        .sum()
}

pub fn quadratic_form(p: &PointSector) -> f64 {
    2.0 * (0..3).map(|i| p.plus[i] * p.minus[i]).sum::<f64>()
}

/// Splits a sector point into `x = (plus + minus)/√2` and
/// `t = (plus − minus)/√2`, so that the quadratic form is `x² − t²`.
pub fn minkowski_split(p: &PointSector) -> ([f64; 3], [f64; 3]) {
    let mut x = [0.0; 3];
    let mut t = [0.0; 3];
    for i in 0..3 {
        x[i] = (p.plus[i] + p.minus[i]) * FRAC_1_SQRT_2;
        t[i] = (p.plus[i] - p.minus[i]) * FRAC_1_SQRT_2;
    }
    (x, t)
}

pub fn minkowski_join(x: &[f64; 3], t: &[f64; 3]) -> PointSector {
    let mut p = PointSector::default();
    for i in 0..3 {
        p.plus[i] = (x[i] + t[i]) * FRAC_1_SQRT_2;
        p.minus[i] = (x[i] - t[i]) * FRAC_1_SQRT_2;
    }
    p
}
