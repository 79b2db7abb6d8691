//! Desk-scale invariant suite shared by the command line and the tests.
//!
//! Every property draws from its own seeded stream, so results depend only
//! on the seed and the size limits.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::extgeo::{
    antisymmetrize, form_tensor, integrate, lie_form, lie_form_cartan, pullback, Chain, ChainPiece,
    Coefficient, CoefficientTensor, Form, SmoothMap, VectorField, DEFAULT_LIE_TIME,
    DEFAULT_QUADRATURE_ORDER,
};
use crate::fields::{
    dirac_spinor, field_matrix_element, fock_field_matrix_element, slater_matrix_element,
    state_from_amplitudes, AmplitudeVector, SlaterEntries, Spin, SpinorKind,
};
use crate::fock::{
    annihilate, basis_states, create, dense::graded_bracket, dense_matrix, Complex64, GenKind,
    Generator, SectorConfig, StateVector, DEFAULT_ORACLE_CEILING,
};
use crate::grading::{from_lightcone, to_lightcone, PointZ};
use crate::opalg::{equivalence_deviation, normal_order, normal_order_with_limit, parse};
use crate::sampling;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SelftestOptions {
    pub seed: u64,
    pub quick: bool,
}

impl SelftestOptions {
    /// Largest Fock mode count exercised.
    pub fn max_modes(&self) -> usize {
        if self.quick {
            6
        } else {
            10
        }
    }

    /// Largest geometry dimension exercised.
    pub fn max_dim(&self) -> usize {
        if self.quick {
            4
        } else {
            6
        }
    }

    fn scale(&self, full: usize) -> usize {
        if self.quick {
            (full / 4).max(1)
        } else {
            full
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub quick: bool,
    pub max_modes: usize,
    pub max_dim: usize,
    pub properties: Vec<PropertyOutcome>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn failures(&self) -> usize {
        self.properties.iter().filter(|p| !p.passed).count()
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "selftest seed={} quick={} max_modes={} max_dim={}",
            self.seed, self.quick, self.max_modes, self.max_dim
        )?;
        for p in &self.properties {
            write!(
                f,
                "{} {:<28} cases={:<6} worst={:.3e} tol={:.0e}",
                if p.passed { "PASS" } else { "FAIL" },
                p.name,
                p.cases,
                p.worst,
                p.tolerance
            )?;
            if let Some(e) = &p.error {
                write!(f, " error={e}")?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "{} of {} properties passed",
            self.properties.len() - self.failures(),
            self.properties.len()
        )
    }
}

type Check = fn(&mut ChaCha8Rng, &SelftestOptions) -> Result<(usize, f64)>;

const PROPERTIES: &[(&str, f64, Check)] = &[
    ("grading.lightcone_roundtrip", 1e-12, lightcone_roundtrip),
    ("fock.anticommutators", 0.0, anticommutators),
    ("fock.sign_rule", 0.0, sign_rule),
    ("fock.exclusion", 0.0, exclusion),
    ("fock.normalization", 1e-14, normalization),
    ("opalg.normal_order_sound", 1e-12, normal_order_sound),
    ("opalg.print_parse_roundtrip", 0.0, print_parse_roundtrip),
    ("opalg.adjoint_commutes", 0.0, adjoint_commutes),
    ("fields.mass_shell_spinors", 1e-10, mass_shell_spinors),
    ("fields.fock_consistency", 1e-12, fock_consistency),
    ("fields.slater_antisymmetry", 1e-12, slater_antisymmetry),
    ("extgeo.d_squared_zero", 1e-6, d_squared_zero),
    ("extgeo.wedge_graded", 0.0, wedge_graded),
    ("extgeo.pullback_commutes_d", 1e-5, pullback_commutes_d),
    ("extgeo.top_form_determinant", 1e-8, top_form_determinant),
    ("extgeo.chain_integration", 1e-10, chain_integration),
    ("extgeo.lie_flow_vs_cartan", 1e-4, lie_flow_vs_cartan),
    ("extgeo.antisymmetrize", 1e-12, antisymmetrize_idempotent),
];

/// Names of every property, in report order.
pub fn property_names() -> impl Iterator<Item = &'static str> {
    PROPERTIES.iter().map(|(n, _, _)| *n)
}

pub fn run(opts: &SelftestOptions) -> SelftestReport {
    let properties = PROPERTIES
        .iter()
        .enumerate()
        .map(|(i, (name, tol, check))| {
            let stream = opts
                .seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            match check(&mut rng, opts) {
                Ok((cases, worst)) => PropertyOutcome {
                    name,
                    passed: worst <= *tol,
                    cases,
                    worst,
                    tolerance: *tol,
                    error: None,
                },
                Err(e) => PropertyOutcome {
                    name,
                    passed: false,
                    cases: 0,
                    worst: f64::INFINITY,
                    tolerance: *tol,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    SelftestReport {
        seed: opts.seed,
        quick: opts.quick,
        max_modes: opts.max_modes(),
        max_dim: opts.max_dim(),
        properties,
    }
}

fn lightcone_roundtrip(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(500);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let z = PointZ(std::array::from_fn(|_| rng.gen_range(-10.0..10.0)));
        let (eta, u) = to_lightcone(&z);
        let back = from_lightcone(&eta, &u);
        for i in 0..z.0.len() {
            worst = worst.max((back.0[i] - z.0[i]).abs());
        }
    }
    Ok((n, worst))
}

fn anticommutators(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let mut cases = 0;
    let mut bad = 0usize;
    for _ in 0..3 {
        let cfg = sampling::config(rng, o.max_modes(), 3);
        let gens: Vec<Generator> = cfg
            .modes()
            .flat_map(|m| {
                [GenKind::Create, GenKind::Annihilate].map(|kind| Generator { kind, mode: m })
            })
            .collect();
        let mats = gens
            .iter()
            .map(|g| dense_matrix(&cfg, *g, DEFAULT_ORACLE_CEILING))
            .collect::<Result<Vec<_>>>()?;
        let dim = 1usize << cfg.total();
        for (x, gx) in gens.iter().enumerate() {
            for (y, gy) in gens.iter().enumerate() {
                let same = gx.mode.sector == gy.mode.sector;
                let br = graded_bracket(&mats[x], &mats[y], if same { 1 } else { -1 });
                let delta = same && gx.mode == gy.mode && gx.kind != gy.kind;
                let ok = if delta {
                    br.len() == dim && br.iter().all(|(&(i, j), &v)| i == j && v == 1)
                } else {
                    br.is_empty()
                };
                bad += usize::from(!ok);
                cases += 1;
            }
        }
    }
    Ok((cases, bad as f64))
}

fn sign_rule(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let mut cases = 0;
    let mut bad = 0usize;
    for _ in 0..2 {
        let cfg = sampling::config(rng, o.max_modes(), o.max_modes());
        for m in cfg.modes() {
            for kind in [GenKind::Create, GenKind::Annihilate] {
                let g = Generator { kind, mode: m };
                let dense = dense_matrix(&cfg, g, DEFAULT_ORACLE_CEILING)?;
                for s in basis_states(cfg, [false; 4]) {
                    let fast = match kind {
                        GenKind::Create => create(&s, m)?,
                        GenKind::Annihilate => annihilate(&s, m)?,
                    };
                    bad += usize::from(
                        fast.map(|(p, t)| (t.basis_index(), p)) != dense.column(s.basis_index()),
                    );
                    cases += 1;
                }
            }
        }
    }
    Ok((cases, bad as f64))
}

fn exclusion(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let cfg = sampling::config(rng, o.max_modes(), o.max_modes());
    let mut cases = 0;
    let mut worst = 0.0f64;
    for s in basis_states(cfg, [false; 4]) {
        let v = StateVector::basis(s);
        for m in cfg.modes() {
            let number = [
                Generator::create(m.sector, m.serial),
                Generator::annihilate(m.sector, m.serial),
            ];
            let n = v.inner(&v.apply_string(&number)?)?;
            let occupied = f64::from(crate::fock::occupation(&s, m)?);
            worst = worst.max((n - Complex64::new(occupied, 0.0)).norm());
            if n.re != 0.0 && n.re != 1.0 {
                worst = worst.max(1.0);
            }
            cases += 1;
        }
    }
    Ok((cases, worst))
}

fn normalization(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(100);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let cfg = sampling::config(rng, o.max_modes(), o.max_modes());
        let terms = rng.gen_range(1..=(1usize << cfg.total()).min(12));
        let v = sampling::superposition(rng, &cfg, terms);
        let direct: f64 = v.iter().map(|(_, a)| a.norm_sqr()).sum();
        worst = worst.max((v.inner(&v)?.re - direct).abs() / direct.max(1.0));
    }
    Ok((n, worst))
}

fn normal_order_sound(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(200);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let cfg = sampling::config(rng, o.max_modes().min(8), 4);
        let e = sampling::expression(rng, &cfg, 6, 3);
        let nf = normal_order_with_limit(&e, 10_000)?;
        if !nf.is_canonical() {
            worst = f64::INFINITY;
        }
        worst = worst.max(equivalence_deviation(
            &e,
            nf.expr(),
            &cfg,
            DEFAULT_ORACLE_CEILING,
        )?);
    }
    Ok((n, worst))
}

fn print_parse_roundtrip(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(300);
    let mut bad = 0usize;
    for _ in 0..n {
        let cfg = sampling::config(rng, 12, 4);
        let e = sampling::expression(rng, &cfg, 8, 4).pruned();
        bad += usize::from(parse(&e.to_string())?.pruned() != e);
    }
    Ok((n, bad as f64))
}

fn adjoint_commutes(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(200);
    let mut bad = 0usize;
    for _ in 0..n {
        let cfg = sampling::config(rng, 8, 4);
        let e = sampling::expression(rng, &cfg, 6, 3);
        let a = normal_order(&e.adjoint())?;
        let b = normal_order(&normal_order(&e)?.expr().adjoint())?;
        bad += usize::from(a.expr() != b.expr());
    }
    Ok((n, bad as f64))
}

fn mass_shell_spinors(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(1000);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let q = sampling::momentum(rng);
        worst = worst.max(q.shell_residual().abs());
        for s in Spin::BOTH {
            for t in Spin::BOTH {
                let delta = if s == t { 1.0 } else { 0.0 };
                let uu = dirac_spinor(&q, s, SpinorKind::U).bar_product(&dirac_spinor(
                    &q,
                    t,
                    SpinorKind::U,
                ));
                let vv = dirac_spinor(&q, s, SpinorKind::V).bar_product(&dirac_spinor(
                    &q,
                    t,
                    SpinorKind::V,
                ));
                worst = worst.max((uu - delta).norm()).max((vv + delta).norm());
            }
        }
    }
    Ok((n, worst))
}

fn fock_consistency(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(40);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let cfg = sampling::config(rng, 4, 4);
        let fields = sampling::field_set(rng, &cfg);
        let amps: AmplitudeVector = cfg.modes().map(|m| (m, sampling::complex(rng))).collect();
        let base = std::array::from_fn(|_| rng.gen_bool(0.5));
        let chi = state_from_amplitudes(cfg, base, &amps)?;
        let z = sampling::chart_point(rng);
        let direct = field_matrix_element(&amps, &fields, &z)?;
        let fock = fock_field_matrix_element(&chi, &fields, &z)?;
        for a in 0..3 {
            worst = worst.max((direct[a] - fock[a]).norm());
        }
    }
    Ok((n, worst))
}

fn slater_antisymmetry(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let reps = o.scale(20);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..reps {
        let cfg = SectorConfig::new(2, 2, 1, 1)?;
        let fields = sampling::field_set(rng, &cfg);
        let all: Vec<_> = cfg.modes().collect();
        for n in 2..=4 {
            let points: Vec<PointZ> = (0..n).map(|_| sampling::chart_point(rng)).collect();
            let modes: Vec<_> = all[..n].to_vec();
            let entries = SlaterEntries::Components((0..n).map(|_| rng.gen_range(0..3)).collect());
            let c = sampling::complex(rng);
            let v = slater_matrix_element(&points, &modes, c, &fields, &SlaterEntries::Contracted)?;
            let mut swapped = points.clone();
            swapped.swap(0, n - 1);
            let vs =
                slater_matrix_element(&swapped, &modes, c, &fields, &SlaterEntries::Contracted)?;
            let mut mswap = modes.clone();
            mswap.swap(0, 1);
            let vm = slater_matrix_element(&points, &mswap, c, &fields, &entries)?;
            let v2 = slater_matrix_element(&points, &modes, c, &fields, &entries)?;
            let mut repeated = modes.clone();
            repeated[1] = repeated[0];
            let vr = slater_matrix_element(&points, &repeated, c, &fields, &entries)?;
            let mut rp = points.clone();
            rp[1] = rp[0];
            let vp = slater_matrix_element(&rp, &modes, c, &fields, &SlaterEntries::Contracted)?;
            let scale = 1.0 + v.norm() + v2.norm();
            worst = worst
                .max((v + vs).norm() / scale)
                .max((v2 + vm).norm() / scale)
                .max(vr.norm() / scale)
                .max(vp.norm() / scale);
            cases += 1;
        }
    }
    Ok((cases, worst))
}

fn d_squared_zero(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(40);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dim = rng.gen_range(2..=o.max_dim());
        let k = rng.gen_range(0..=3.min(dim - 2));
        let w = sampling::polynomial_form(rng, dim, k, 3, 4);
        let dd = w.exterior_derivative()?.exterior_derivative()?;
        if !dd.is_empty() {
            for _ in 0..50 {
                worst = worst.max(dd.max_abs_at(&sampling::point(rng, dim, 1.0)));
            }
        }
        let f = Coefficient::func(dim, |x| (x[0] * x[1]).sin() + x[0].powi(3));
        let ddf = Form::scalar(f)
            .exterior_derivative()?
            .exterior_derivative()?;
        for _ in 0..5 {
            worst = worst.max(ddf.max_abs_at(&sampling::point(rng, dim, 1.0)));
        }
    }
    Ok((n, worst))
}

fn wedge_graded(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(60);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dim = rng.gen_range(3..=o.max_dim());
        let (ka, kb) = (rng.gen_range(0..=1), rng.gen_range(1..=2));
        let kc = rng.gen_range(0..=dim - ka - kb);
        let a = sampling::polynomial_form(rng, dim, ka, 2, 2);
        let b = sampling::polynomial_form(rng, dim, kb, 2, 2);
        let c = sampling::polynomial_form(rng, dim, kc, 2, 1);
        let ab = a.wedge(&b)?;
        let ba = b
            .wedge(&a)?
            .scale(if ka * kb % 2 == 0 { 1.0 } else { -1.0 });
        let left = ab.wedge(&c)?;
        let right = a.wedge(&b.wedge(&c)?)?;
        let x: Vec<f64> = (0..dim)
            .map(|_| f64::from(rng.gen_range(-8i32..=8)) / 4.0)
            .collect();
        worst = worst
            .max(ab.sub(&ba)?.max_abs_at(&x))
            .max(left.sub(&right)?.max_abs_at(&x));
    }
    Ok((n, worst))
}

fn pullback_commutes_d(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(30);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dim = rng.gen_range(2..=o.max_dim().min(4));
        let k = rng.gen_range(0..dim);
        let w = sampling::polynomial_form(rng, dim, k, 2, 2);
        let comps = (0..dim)
            .map(|_| sampling::polynomial(rng, dim, 2, 3))
            .collect();
        let poly_map = SmoothMap::polynomial(dim, comps)?;
        let pm = poly_map.clone();
        let func_map = SmoothMap::from_fn(dim, dim, move |x| pm.eval(x));
        for map in [&poly_map, &func_map] {
            let lhs = pullback(map, &w.exterior_derivative()?)?;
            let rhs = pullback(map, &w)?.exterior_derivative()?;
            let diff = lhs.sub(&rhs)?;
            for _ in 0..3 {
                let x = sampling::point(rng, dim, 0.5);
                let scale = 1.0 + lhs.max_abs_at(&x);
                worst = worst.max(diff.max_abs_at(&x) / scale);
            }
        }
    }
    Ok((n, worst))
}

fn top_form_determinant(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(40);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dim = rng.gen_range(1..=o.max_dim());
        let l = sampling::matrix(rng, dim);
        let all: Vec<usize> = (0..dim).collect();
        let c = Coefficient::Poly(sampling::polynomial(rng, dim, 2, 3));
        let w = Form::monomial(&all, c.clone())?;
        let p = pullback(&SmoothMap::linear(&l), &w)?;
        let x = sampling::point(rng, dim, 1.0);
        let y = &l * DMatrix::from_column_slice(dim, 1, &x);
        let expect = c.eval(y.as_slice()) * l.determinant();
        let got = p.coefficient(&all).map_or(0.0, |c| c.eval(&x));
        worst = worst.max((got - expect).abs() / (1.0 + expect.abs()));
    }
    Ok((n, worst))
}

fn chain_integration(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let area = integrate(
        &Form::basis(2, &[0, 1])?,
        &Chain::unit_cube(2),
        DEFAULT_QUADRATURE_ORDER,
    )?;
    let mut worst = (area.value - 1.0).abs();
    let n = o.scale(20);
    for _ in 0..n {
        let w = Form::monomial(
            &[0, 1],
            Coefficient::Poly(sampling::polynomial(rng, 2, 4, 4)),
        )?;
        let lo = sampling::point(rng, 2, 1.0);
        let hi: Vec<f64> = lo.iter().map(|v| v + rng.gen_range(0.1..1.0)).collect();
        let m = rng.gen_range(1..=4);
        let piece = |o, m| ChainPiece::new(lo.clone(), hi.clone(), SmoothMap::identity(2), o, m);
        let base = integrate(&w, &Chain::single(piece(1, 1)?), DEFAULT_QUADRATURE_ORDER)?.value;
        let flipped = integrate(&w, &Chain::single(piece(-1, m)?), DEFAULT_QUADRATURE_ORDER)?.value;
        if flipped != -(m as f64) * base {
            worst = worst.max((flipped + m as f64 * base).abs().max(f64::MIN_POSITIVE) * 1e20);
        }
    }
    Ok((n + 1, worst))
}

fn lie_flow_vs_cartan(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(12);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dim = 3;
        let field = VectorField::polynomial(
            (0..dim)
                .map(|_| sampling::polynomial(rng, dim, 1, 2))
                .collect(),
        )?;
        let w = sampling::polynomial_form(rng, dim, 1, 3, 2);
        let flow = lie_form(&field, &w, DEFAULT_LIE_TIME)?;
        let cartan = lie_form_cartan(&field, &w)?;
        for _ in 0..3 {
            let x = sampling::point(rng, dim, 0.5);
            for i in 0..dim {
                let a = flow.coefficient(&[i]).map_or(0.0, |c| c.eval(&x));
                let b = cartan.coefficient(&[i]).map_or(0.0, |c| c.eval(&x));
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok((n, worst))
}

fn antisymmetrize_idempotent(rng: &mut ChaCha8Rng, o: &SelftestOptions) -> Result<(usize, f64)> {
    let n = o.scale(20);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dim = rng.gen_range(3..=o.max_dim());
        let order = rng.gen_range(1..=3);
        let data = (0..dim.pow(order as u32))
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let t = CoefficientTensor::from_data(dim, 0, order, data)?;
        let once = antisymmetrize(&t)?;
        let twice = antisymmetrize(&form_tensor(&once, &vec![0.0; dim]))?;
        let norm = crate::fields::factorial(order).sqrt();
        worst = worst.max(twice.sub(&once.scale(norm))?.max_abs_at(&vec![0.0; dim]));
        let sym = CoefficientTensor::from_fn(dim, 2, |i| (i[0] + i[1]) as f64);
        worst = worst.max(antisymmetrize(&sym)?.max_abs_at(&vec![0.0; dim]));
    }
    Ok((n, worst))
}
