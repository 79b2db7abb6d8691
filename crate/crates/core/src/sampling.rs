//! Seeded random instances for property checks and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::extgeo::{Coefficient, Form, Polynomial};
use crate::fields::{
    make_f, mass_shell, plane_wave_profile, FieldSet, Frequency, Momentum, Spin,
    DEFAULT_TIME_DIRECTION,
};
use crate::fock::{
    basis_states, Complex64, FockState, GenKind, Generator, ModeIndex, SectorConfig, StateVector,
};
use crate::grading::PointZ;
use crate::opalg::{scalar_from_int, OperatorExpr, Scalar};
use num::{BigInt, BigRational, Complex};

/// Random mode counts with at most `max_per_sector` per sector and at most
/// `max_total` overall, never empty.
pub fn config<R: Rng>(rng: &mut R, max_total: usize, max_per_sector: usize) -> SectorConfig {
    loop {
        let mut counts = [0usize; 4];
        let mut left = max_total;
        let mut order = [0, 1, 2, 3];
        order.shuffle(rng);
        for &s in &order {
            let n = rng.gen_range(0..=max_per_sector.min(left));
            counts[s] = n;
            left -= n;
        }
        if counts.iter().sum::<usize>() > 0 {
            return SectorConfig::from_counts(counts).expect("counts within limits");
        }
    }
}

pub fn mode<R: Rng>(rng: &mut R, cfg: &SectorConfig) -> ModeIndex {
    let modes: Vec<ModeIndex> = cfg.modes().collect();
    *modes.choose(rng).expect("config has modes")
}

pub fn generator<R: Rng>(rng: &mut R, cfg: &SectorConfig) -> Generator {
    let m = mode(rng, cfg);
    let kind = if rng.gen_bool(0.5) {
        GenKind::Create
    } else {
        GenKind::Annihilate
    };
    Generator { kind, mode: m }
}

/// Small dyadic complex scalar.
pub fn scalar<R: Rng>(rng: &mut R) -> Scalar {
    let den = BigInt::from(1u32 << rng.gen_range(0..3));
    Complex::new(
        BigRational::new(rng.gen_range(-6i64..=6).into(), den.clone()),
        if rng.gen_bool(0.3) {
            BigRational::new(rng.gen_range(-4i64..=4).into(), den)
        } else {
            BigRational::from_integer(0.into())
        },
    )
}

/// Sum of up to `max_terms` products with at most `max_gens` generators in total.
pub fn expression<R: Rng>(
    rng: &mut R,
    cfg: &SectorConfig,
    max_gens: usize,
    max_terms: usize,
) -> OperatorExpr {
    let terms = rng.gen_range(1..=max_terms.max(1));
    let mut budget = max_gens;
    let mut e = OperatorExpr::zero();
    for t in 0..terms {
        let len = if t + 1 == terms {
            rng.gen_range(0..=budget)
        } else {
            rng.gen_range(0..=budget.min(3))
        };
        budget -= len;
        let gens = (0..len).map(|_| generator(rng, cfg)).collect();
        let s = scalar(rng);
        e.push_term(
            if num::Zero::is_zero(&s) {
                scalar_from_int(1)
            } else {
                s
            },
            gens,
        );
    }
    e
}

pub fn basis_state<R: Rng>(rng: &mut R, cfg: &SectorConfig) -> FockState {
    let idx = rng.gen_range(0..1usize << cfg.total());
    let base = std::array::from_fn(|_| rng.gen_bool(0.5));
    FockState::from_basis_index(*cfg, base, idx).expect("index in range")
}

/// Random superposition over distinct basis states with shared base flags.
pub fn superposition<R: Rng>(rng: &mut R, cfg: &SectorConfig, terms: usize) -> StateVector {
    let base = std::array::from_fn(|_| rng.gen_bool(0.5));
    let mut states: Vec<FockState> = basis_states(*cfg, base).collect();
    states.shuffle(rng);
    let mut v = StateVector::new();
    for s in states.into_iter().take(terms) {
        v.add(s, complex(rng));
    }
    v
}

pub fn complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn point<R: Rng>(rng: &mut R, dim: usize, half_width: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| rng.gen_range(-half_width..half_width))
        .collect()
}

pub fn chart_point<R: Rng>(rng: &mut R) -> PointZ {
    PointZ(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
}

pub fn momentum<R: Rng>(rng: &mut R) -> Momentum {
    let p3 = std::array::from_fn(|_| rng.gen_range(-4.0..4.0));
    mass_shell(p3, rng.gen_range(0.1..3.0)).expect("positive mass")
}

/// Plane-wave wave functions with random weights for every mode of `cfg`.
pub fn field_set<R: Rng>(rng: &mut R, cfg: &SectorConfig) -> FieldSet {
    cfg.modes()
        .map(|m| {
            let q = momentum(rng);
            let weights = std::array::from_fn(|_| complex(rng));
            let spin = if rng.gen_bool(0.5) {
                Spin::Up
            } else {
                Spin::Down
            };
            let comp = rng.gen_range(0..4);
            let profile =
                plane_wave_profile(q, spin, Frequency::Positive, comp, DEFAULT_TIME_DIRECTION)
                    .expect("valid component and direction");
            make_f(m, weights, profile)
        })
        .collect()
}

/// Integer-coefficient polynomial with monomials of total degree ≤ `max_degree`.
pub fn polynomial<R: Rng>(rng: &mut R, dim: usize, max_degree: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(dim);
    for _ in 0..terms {
        let mut e = vec![0u32; dim];
        let deg = rng.gen_range(0..=max_degree);
        for _ in 0..deg {
            e[rng.gen_range(0..dim)] += 1;
        }
        p.add_monomial(e, f64::from(rng.gen_range(-3i32..=3)));
    }
    p
}

/// Polynomial `degree`-form with up to `terms` random components.
pub fn polynomial_form<R: Rng>(
    rng: &mut R,
    dim: usize,
    degree: usize,
    terms: usize,
    max_poly_degree: u32,
) -> Form {
    let mut f = Form::zero(dim, degree).expect("degree within dimension");
    for _ in 0..terms {
        let mut idx: Vec<usize> = (0..dim).collect();
        idx.shuffle(rng);
        idx.truncate(degree);
        let c = Coefficient::Poly(polynomial(rng, dim, max_poly_degree, 3));
        f.add_term(&idx, c).expect("valid indices");
    }
    f
}

/// Square matrix with entries in `[-2, 2)`.
pub fn matrix<R: Rng>(rng: &mut R, n: usize) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(n, n, |_, _| rng.gen_range(-2.0..2.0))
}
