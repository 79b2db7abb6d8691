//! Operator expressions over creation/annihilation generators.
//!
//! An [`OperatorExpr`] is a sum of terms, each an exact complex-rational
//! scalar times an ordered product of [`Generator`]s. Normal ordering rewrites
//! adjacent out-of-order pairs with the sector algebra:
//!
//! * same sector: `x y = −y x + {x, y}` with `{b_r, b†_r'} = δ_rr'` and
//!   `{b, b} = {b†, b†} = 0`;
//! * different sectors: `x y = y x`.
//!
//! The canonical order puts creations first, ascending in `(sector, serial)`,
//! followed by annihilations descending, so the adjoint of a canonical term
//! is again canonical.

mod parser;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::bigint::BigInt;
use num::{BigRational, Complex, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fock::{
    dense_matrix, Complex64, GenKind, Generator, MonomialMatrix, OracleMatrix, SectorConfig,
    StateVector,
};

pub use parser::{parse, parse_spanned, ParseError, ParseErrorKind, Span, SpannedExpr, GRAMMAR};

/// Exact complex rational.
pub type Scalar = Complex<BigRational>;

/// Default budget of pair swaps per normal-ordering call.
pub const DEFAULT_STEP_LIMIT: usize = 1_000_000;

pub fn scalar_one() -> Scalar {
    Complex::new(BigRational::one(), BigRational::zero())
}

pub fn scalar_from_int(v: i64) -> Scalar {
    Complex::new(
        BigRational::from_integer(BigInt::from(v)),
        BigRational::zero(),
    )
}

/// Exact conversion of a finite double (every finite double is dyadic).
pub fn scalar_from_c64(c: Complex64) -> Option<Scalar> {
    Some(Complex::new(
        BigRational::from_float(c.re)?,
        BigRational::from_float(c.im)?,
    ))
}

pub fn scalar_to_c64(s: &Scalar) -> Complex64 {
    Complex64::new(
        s.re.to_f64().unwrap_or(f64::NAN),
        s.im.to_f64().unwrap_or(f64::NAN),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub scalar: Scalar,
    pub gens: Vec<Generator>,
}

/// Sum of scalar-weighted generator products, in source order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OperatorExpr {
    terms: Vec<Term>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_scalar(scalar_one())
    }

    pub fn from_scalar(s: Scalar) -> Self {
        let mut e = Self::zero();
        e.push_term(s, Vec::new());
        e
    }

    pub fn product(gens: Vec<Generator>) -> Self {
        let mut e = Self::zero();
        e.push_term(scalar_one(), gens);
        e
    }

    pub fn push_term(&mut self, scalar: Scalar, gens: Vec<Generator>) {
        self.terms.push(Term { scalar, gens });
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Drops terms with zero scalar.
    pub fn pruned(mut self) -> Self {
        self.terms.retain(|t| !t.scalar.is_zero());
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.scalar.is_zero())
    }

    pub fn generator_count(&self) -> usize {
        self.terms.iter().map(|t| t.gens.len()).sum()
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    scalar: &t.scalar * s,
                    gens: t.gens.clone(),
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &OperatorExpr) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    pub fn sub(&self, other: &OperatorExpr) -> Self {
        self.add(&other.scale(&-scalar_one()))
    }

    pub fn mul(&self, other: &OperatorExpr) -> Self {
        let mut out = Self::zero();
        for a in &self.terms {
            for b in &other.terms {
                let mut gens = a.gens.clone();
                gens.extend(&b.gens);
                out.push_term(&a.scalar * &b.scalar, gens);
            }
        }
        out
    }

    /// Hermitian adjoint: reversed products, flipped kinds, conjugated scalars.
    pub fn adjoint(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    scalar: t.scalar.conj(),
                    gens: t.gens.iter().rev().map(|g| g.adjoint()).collect(),
                })
                .collect(),
        }
    }

    /// Checks every generator against `cfg`.
    pub fn validate(&self, cfg: &SectorConfig) -> Result<()> {
        for t in &self.terms {
            for g in &t.gens {
                g.mode.validate(cfg)?;
            }
        }
        Ok(())
    }

    /// Linear action on a state vector; generators act right-to-left.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        let mut out = StateVector::new();
        for t in &self.terms {
            let c = scalar_to_c64(&t.scalar);
            for (s, a) in v.apply_string(&t.gens)?.iter() {
                out.add(*s, a * c);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let live: Vec<&Term> = self.terms.iter().filter(|t| !t.scalar.is_zero()).collect();
        if live.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in live.iter().enumerate() {
            let (negative, magnitude) = split_sign(&t.scalar);
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let unit = magnitude == "1";
            if t.gens.is_empty() || !unit {
                f.write_str(&magnitude)?;
                if !t.gens.is_empty() {
                    f.write_str(" ")?;
                }
            }
            for (k, g) in t.gens.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{g}")?;
            }
        }
        Ok(())
    }
}

/// Sign and unsigned DSL literal for a scalar.
fn split_sign(s: &Scalar) -> (bool, String) {
    if s.im.is_zero() {
        (s.re.is_negative(), format_decimal(&s.re.abs()))
    } else if s.re.is_zero() {
        (
            s.im.is_negative(),
            format!("{}i", format_decimal(&s.im.abs())),
        )
    } else {
        (
            false,
            format!("({},{})", format_signed(&s.re), format_signed(&s.im)),
        )
    }
}

fn format_signed(r: &BigRational) -> String {
    if r.is_negative() {
        format!("-{}", format_decimal(&r.abs()))
    } else {
        format_decimal(r)
    }
}

/// Exact decimal when the denominator is `2^a 5^b`, nearest double otherwise.
fn format_decimal(r: &BigRational) -> String {
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut a, mut b) = (0u32, 0u32);
    while (&den % &two).is_zero() {
        den /= &two;
        a += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        b += 1;
    }
    if !den.is_one() {
        return format!("{}", r.to_f64().unwrap_or(f64::NAN));
    }
    let digits = a.max(b);
    let scaled = r * BigRational::from_integer(num::pow(BigInt::from(10), digits as usize));
    let n = scaled.to_integer().to_string();
    if digits == 0 {
        return n;
    }
    let width = digits as usize + 1;
    let padded = format!("{n:0>width$}");
    let (int, frac) = padded.split_at(padded.len() - digits as usize);
    format!("{int}.{frac}")
}

fn canonical_rank(g: &Generator) -> (u8, usize, usize) {
    match g.kind {
        GenKind::Create => (0, g.mode.sector.index(), g.mode.serial),
        GenKind::Annihilate => (1, 3 - g.mode.sector.index(), usize::MAX - g.mode.serial),
    }
}

/// Total order of generators inside a canonical term.
pub fn canonical_cmp(a: &Generator, b: &Generator) -> Ordering {
    canonical_rank(a).cmp(&canonical_rank(b))
}

fn is_canonical_product(gens: &[Generator]) -> bool {
    gens.windows(2)
        .all(|w| canonical_cmp(&w[0], &w[1]) == Ordering::Less)
}

/// Canonical normal-ordered expression with the swap count that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    expr: OperatorExpr,
    steps: usize,
}

impl NormalForm {
    pub fn expr(&self) -> &OperatorExpr {
        &self.expr
    }

    pub fn into_expr(self) -> OperatorExpr {
        self.expr
    }

    /// Adjacent swaps performed while rewriting.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn term_count(&self) -> usize {
        self.expr.terms.len()
    }

    /// Coefficient of the identity term.
    pub fn scalar_part(&self) -> Scalar {
        self.expr
            .terms
            .iter()
            .find(|t| t.gens.is_empty())
            .map(|t| t.scalar.clone())
            .unwrap_or_else(Scalar::zero)
    }

    pub fn is_canonical(&self) -> bool {
        self.expr
            .terms
            .iter()
            .all(|t| !t.scalar.is_zero() && is_canonical_product(&t.gens))
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

pub fn normal_order(e: &OperatorExpr) -> Result<NormalForm> {
    normal_order_with_limit(e, DEFAULT_STEP_LIMIT)
}

/// Normal ordering that fails with a domain error once `limit` swaps have
/// been spent.
pub fn normal_order_with_limit(e: &OperatorExpr, limit: usize) -> Result<NormalForm> {
    let mut work: Vec<(Scalar, Vec<Generator>)> = e
        .terms
        .iter()
        .rev()
        .filter(|t| !t.scalar.is_zero())
        .map(|t| (t.scalar.clone(), t.gens.clone()))
        .collect();
    let mut collected: BTreeMap<Vec<Generator>, Scalar> = BTreeMap::new();
    let mut steps = 0usize;

    while let Some((mut c, mut gens)) = work.pop() {
        loop {
            let pos = gens
                .windows(2)
                .position(|w| canonical_cmp(&w[0], &w[1]) != Ordering::Less);
            let Some(i) = pos else {
                let slot = collected.entry(gens).or_insert_with(Scalar::zero);
                *slot = &*slot + &c;
                break;
            };
            steps += 1;
            if steps > limit {
                return Err(Error::Domain(format!(
                    "normal ordering exceeded {limit} rewrite steps"
                )));
            }
            let (x, y) = (gens[i], gens[i + 1]);
            if x == y {
                // b b = b† b† = 0 for the same mode.
                break;
            }
            if x.mode.sector == y.mode.sector {
                if x.mode == y.mode {
                    let mut contracted = gens[..i].to_vec();
                    contracted.extend_from_slice(&gens[i + 2..]);
                    work.push((c.clone(), contracted));
                }
                c = -c;
            }
            gens.swap(i, i + 1);
        }
    }

    let mut expr = OperatorExpr::zero();
    for (gens, s) in collected {
        if !s.is_zero() {
            expr.push_term(s, gens);
        }
    }
    Ok(NormalForm { expr, steps })
}

/// Vacuum expectation value: the identity coefficient of the normal form.
///
/// Base-ket flags are inert under the generators, so the value is the same
/// for every choice of `χ⁰(ν)` on both sides with equal flags and zero when
/// the flags differ; callers handle the latter.
pub fn vev(e: &OperatorExpr) -> Result<Complex64> {
    Ok(scalar_to_c64(&normal_order(e)?.scalar_part()))
}

/// Matrix of `e` assembled from the Kronecker-product generator oracle.
pub fn expression_matrix(
    e: &OperatorExpr,
    cfg: &SectorConfig,
    ceiling: usize,
) -> Result<OracleMatrix> {
    cfg.check_ceiling(ceiling)?;
    e.validate(cfg)?;
    let dim = 1usize << cfg.total();
    let mut cache: HashMap<Generator, MonomialMatrix> = HashMap::new();
    let mut out = OracleMatrix::zeros(dim);
    for t in &e.terms {
        if t.scalar.is_zero() {
            continue;
        }
        let mut m = MonomialMatrix::identity(dim);
        for g in &t.gens {
            if !cache.contains_key(g) {
                cache.insert(*g, dense_matrix(cfg, *g, ceiling)?);
            }
            m = m.mul(&cache[g]);
        }
        out.add_monomial(&m, scalar_to_c64(&t.scalar));
    }
    Ok(out)
}

/// Max-abs difference of the oracle matrices of `a` and `b`.
pub fn equivalence_deviation(
    a: &OperatorExpr,
    b: &OperatorExpr,
    cfg: &SectorConfig,
    ceiling: usize,
) -> Result<f64> {
    expression_matrix(a, cfg, ceiling)?.max_abs_diff(&expression_matrix(b, cfg, ceiling)?)
}

pub fn equivalent(
    a: &OperatorExpr,
    b: &OperatorExpr,
    cfg: &SectorConfig,
    ceiling: usize,
) -> Result<bool> {
    Ok(equivalence_deviation(a, b, cfg, ceiling)? <= 1e-12)
}
