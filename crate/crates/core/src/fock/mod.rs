//! Occupation-number states over the four `(λ,μ)` sectors.
//!
//! Each sector carries its own bit string of occupations. A creation or
//! annihilation on serial `r` of a sector picks up the sign string
//! `Π_{r' < r} (1 − 2 N_{r'})` of *that sector only*; generators of different
//! sectors therefore commute, while generators of one sector anticommute.
//!
//! The computational basis used by [`dense`] orders modes by sector
//! (`11, 12, 21, 22`) and then serial, the first mode being the most
//! significant bit of the basis index.

pub mod dense;

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num::Complex;

use crate::error::{Error, Result};
use crate::opalg::{scalar_from_c64, OperatorExpr};

pub use dense::{dense_matrix, MonomialMatrix, OracleMatrix};

pub type Complex64 = Complex<f64>;

/// Exact `±1` phase.
pub type Phase = i8;

/// Ceiling on the total mode count for dense oracle checks.
pub const DEFAULT_ORACLE_CEILING: usize = 16;

/// Bits available per sector occupation string.
pub const MAX_SECTOR_MODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    S11,
    S12,
    S21,
    S22,
}

impl Sector {
    pub const ALL: [Sector; 4] = [Sector::S11, Sector::S12, Sector::S21, Sector::S22];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Sector> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Sector::S11 => "11",
            Sector::S12 => "12",
            Sector::S21 => "21",
            Sector::S22 => "22",
        }
    }

    pub fn from_label(s: &str) -> Option<Sector> {
        match s {
            "11" => Some(Sector::S11),
            "12" => Some(Sector::S12),
            "21" => Some(Sector::S21),
            "22" => Some(Sector::S22),
            _ => None,
        }
    }

    pub fn lambda(self) -> u8 {
        match self {
            Sector::S11 | Sector::S12 => 1,
            Sector::S21 | Sector::S22 => 2,
        }
    }

    pub fn mu(self) -> u8 {
        match self {
            Sector::S11 | Sector::S21 => 1,
            Sector::S12 | Sector::S22 => 2,
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Mode counts `N, M, Q, T` of sectors `11, 12, 21, 22`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SectorConfig {
    modes: [usize; 4],
}

impl SectorConfig {
    pub fn new(n11: usize, n12: usize, n21: usize, n22: usize) -> Result<Self> {
        Self::from_counts([n11, n12, n21, n22])
    }

    pub fn from_counts(modes: [usize; 4]) -> Result<Self> {
        if let Some(&bad) = modes.iter().find(|&&m| m > MAX_SECTOR_MODES) {
            return Err(Error::Capacity {
                modes: bad,
                ceiling: MAX_SECTOR_MODES,
            });
        }
        Ok(Self { modes })
    }

    pub fn count(&self, sector: Sector) -> usize {
        self.modes[sector.index()]
    }

    pub fn counts(&self) -> [usize; 4] {
        self.modes
    }

    pub fn total(&self) -> usize {
        self.modes.iter().sum()
    }

    /// Position of the first mode of `sector` in the global `(sector, serial)` order.
    pub fn offset(&self, sector: Sector) -> usize {
        self.modes[..sector.index()].iter().sum()
    }

    /// All valid modes in global order.
    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        Sector::ALL.into_iter().flat_map(move |s| {
            (1..=self.count(s)).map(move |serial| ModeIndex { sector: s, serial })
        })
    }

    pub fn check_ceiling(&self, ceiling: usize) -> Result<()> {
        if self.total() > ceiling {
            return Err(Error::Capacity {
                modes: self.total(),
                ceiling,
            });
        }
        Ok(())
    }
}

/// A mode address: sector plus 1-based serial (the `(rα)` pair collapsed to `r`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex {
    pub sector: Sector,
    pub serial: usize,
}

impl ModeIndex {
    pub fn new(sector: Sector, serial: usize) -> Self {
        Self { sector, serial }
    }

    pub fn validate(&self, cfg: &SectorConfig) -> Result<()> {
        let count = cfg.count(self.sector);
        if self.serial == 0 || self.serial > count {
            return Err(Error::Index {
                sector: self.sector.label().to_string(),
                serial: self.serial,
                count,
            });
        }
        Ok(())
    }

    /// Position in the global `(sector, serial)` order of `cfg`.
    pub fn position(&self, cfg: &SectorConfig) -> usize {
        cfg.offset(self.sector) + self.serial - 1
    }

    fn bit(&self) -> u64 {
        1u64 << (self.serial - 1)
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.sector, self.serial)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    Create,
    Annihilate,
}

impl GenKind {
    pub fn adjoint(self) -> GenKind {
        match self {
            GenKind::Create => GenKind::Annihilate,
            GenKind::Annihilate => GenKind::Create,
        }
    }
}

/// A single creation or annihilation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub kind: GenKind,
    pub mode: ModeIndex,
}

impl Generator {
    pub fn create(sector: Sector, serial: usize) -> Self {
        Self {
            kind: GenKind::Create,
            mode: ModeIndex::new(sector, serial),
        }
    }

    pub fn annihilate(sector: Sector, serial: usize) -> Self {
        Self {
            kind: GenKind::Annihilate,
            mode: ModeIndex::new(sector, serial),
        }
    }

    pub fn adjoint(self) -> Self {
        Self {
            kind: self.kind.adjoint(),
            mode: self.mode,
        }
    }

    /// Applies this generator to a basis state.
    pub fn act(&self, s: &FockState) -> Result<Option<(Phase, FockState)>> {
        match self.kind {
            GenKind::Create => create(s, self.mode),
            GenKind::Annihilate => annihilate(s, self.mode),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            GenKind::Create => "b+",
            GenKind::Annihilate => "b-",
        };
        write!(f, "{tag}{}", self.mode)
    }
}

/// Basis ket: base-ket flags `ν` and per-sector occupation bit strings.
///
/// Bit `r − 1` of `occ[sector]` is the occupation of serial `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState {
    cfg: SectorConfig,
    base: [bool; 4],
    occ: [u64; 4],
}

impl FockState {
    /// Builds a state from explicit occupation bits; `occ[s][r-1]` is `n_r`.
    pub fn from_occupations(cfg: SectorConfig, base: [bool; 4], occ: [&[u8]; 4]) -> Result<Self> {
        let mut bits = [0u64; 4];
        for s in Sector::ALL {
            let list = occ[s.index()];
            if list.len() > cfg.count(s) {
                return Err(Error::Shape(format!(
                    "sector {s} has {} modes but {} occupations were given",
                    cfg.count(s),
                    list.len()
                )));
            }
            for (r, &n) in list.iter().enumerate() {
                match n {
                    0 => {}
                    1 => bits[s.index()] |= 1 << r,
                    other => {
                        return Err(Error::Domain(format!(
                            "occupation must be 0 or 1, got {other}"
                        )))
                    }
                }
            }
        }
        Ok(Self {
            cfg,
            base,
            occ: bits,
        })
    }

    /// Builds a state from raw per-sector bit masks.
    pub fn from_bits(cfg: SectorConfig, base: [bool; 4], occ: [u64; 4]) -> Result<Self> {
        for s in Sector::ALL {
            let n = cfg.count(s);
            let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            if occ[s.index()] & !mask != 0 {
                return Err(Error::Shape(format!(
                    "sector {s} bit string exceeds its {n} modes"
                )));
            }
        }
        Ok(Self { cfg, base, occ })
    }

    pub fn config(&self) -> &SectorConfig {
        &self.cfg
    }

    pub fn base(&self) -> [bool; 4] {
        self.base
    }

    pub fn bits(&self, sector: Sector) -> u64 {
        self.occ[sector.index()]
    }

    pub fn particle_count(&self, sector: Sector) -> u32 {
        self.occ[sector.index()].count_ones()
    }

    pub fn total_particles(&self) -> u32 {
        self.occ.iter().map(|b| b.count_ones()).sum()
    }

    /// Serials occupied in `sector`, ascending.
    pub fn occupied(&self, sector: Sector) -> Vec<usize> {
        (1..=self.cfg.count(sector))
            .filter(|r| self.occ[sector.index()] >> (r - 1) & 1 == 1)
            .collect()
    }

    /// Index of this state in the dense computational basis.
    pub fn basis_index(&self) -> usize {
        let k = self.cfg.total();
        let mut idx = 0usize;
        for mode in self.cfg.modes() {
            if self.occ[mode.sector.index()] & mode.bit() != 0 {
                idx |= 1 << (k - 1 - mode.position(&self.cfg));
            }
        }
        idx
    }

    pub fn from_basis_index(cfg: SectorConfig, base: [bool; 4], idx: usize) -> Result<Self> {
        let k = cfg.total();
        if k < usize::BITS as usize && idx >= 1usize << k {
            return Err(Error::Range {
                value: idx,
                bound: 1 << k,
            });
        }
        let mut occ = [0u64; 4];
        for mode in cfg.modes() {
            if idx >> (k - 1 - mode.position(&cfg)) & 1 == 1 {
                occ[mode.sector.index()] |= mode.bit();
            }
        }
        Ok(Self { cfg, base, occ })
    }

    fn check_mode(&self, m: ModeIndex) -> Result<()> {
        m.validate(&self.cfg)
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, s) in Sector::ALL.into_iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            for r in 0..self.cfg.count(s) {
                write!(f, "{}", self.occ[s.index()] >> r & 1)?;
            }
        }
        write!(f, "; ν=")?;
        for b in self.base {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ">")
    }
}

/// Every basis state of `cfg` with the given flags, in dense-basis order.
pub fn basis_states(cfg: SectorConfig, base: [bool; 4]) -> impl Iterator<Item = FockState> {
    let dim = 1usize << cfg.total();
    (0..dim).map(move |i| FockState::from_basis_index(cfg, base, i).expect("index in range"))
}

pub fn vacuum(cfg: SectorConfig, base: [bool; 4]) -> FockState {
    FockState {
        cfg,
        base,
        occ: [0; 4],
    }
}

/// Converts four `{0,1}` integer flags into base-ket flags.
pub fn base_flags(flags: [u8; 4]) -> Result<[bool; 4]> {
    let mut out = [false; 4];
    for (o, &f) in out.iter_mut().zip(&flags) {
        *o = match f {
            0 => false,
            1 => true,
            other => {
                return Err(Error::Domain(format!(
                    "base flag must be 0 or 1, got {other}"
                )))
            }
        };
    }
    Ok(out)
}

/// `(−1)` raised to the number of occupied serials below `m.serial` in `m`'s sector.
pub fn sign_string(s: &FockState, m: ModeIndex) -> Result<Phase> {
    s.check_mode(m)?;
    let below = s.occ[m.sector.index()] & (m.bit() - 1);
    Ok(if below.count_ones().is_multiple_of(2) { 1 } else { -1 })
}

/// `None` when the mode is already occupied.
pub fn create(s: &FockState, m: ModeIndex) -> Result<Option<(Phase, FockState)>> {
    let phase = sign_string(s, m)?;
    let slot = &s.occ[m.sector.index()];
    if slot & m.bit() != 0 {
        return Ok(None);
    }
    let mut out = *s;
    out.occ[m.sector.index()] |= m.bit();
    Ok(Some((phase, out)))
}

/// `None` when the mode is empty.
pub fn annihilate(s: &FockState, m: ModeIndex) -> Result<Option<(Phase, FockState)>> {
    let phase = sign_string(s, m)?;
    if s.occ[m.sector.index()] & m.bit() == 0 {
        return Ok(None);
    }
    let mut out = *s;
    out.occ[m.sector.index()] &= !m.bit();
    Ok(Some((phase, out)))
}

pub fn occupation(s: &FockState, m: ModeIndex) -> Result<u8> {
    s.check_mode(m)?;
    Ok((s.occ[m.sector.index()] & m.bit() != 0) as u8)
}

/// Kronecker delta over flags and bits.
pub fn inner_product(a: &FockState, b: &FockState) -> Result<u8> {
    if a.cfg != b.cfg {
        return Err(Error::Shape(format!(
            "config mismatch: {:?} vs {:?}",
            a.cfg.counts(),
            b.cfg.counts()
        )));
    }
    Ok((a.base == b.base && a.occ == b.occ) as u8)
}

/// Sign relating the bit-string ket to the ordered product state
/// `b†_{r_n} ⋯ b†_{r_1} χ⁰` (highest serial leftmost, sector by sector).
///
/// Creating the `j`-th particle of a sector from the bottom passes `j − 1`
/// occupied lower modes, so the sign is `Π_sectors (−1)^{n(n−1)/2}`.
pub fn ordered_product_sign(s: &FockState) -> Phase {
    let odd = Sector::ALL
        .iter()
        .map(|&sec| {
            let n = s.particle_count(sec) as u64;
            n * n.saturating_sub(1) / 2
        })
        .sum::<u64>()
        % 2;
    if odd == 0 {
        1
    } else {
        -1
    }
}

/// Single-generator matrix element between ordered product states, from the
/// closed-form rule: `(−1)^{n−k}` for annihilation of the `k`-th occupied
/// serial of a ket holding `n` quanta in that sector, `(−1)^{n'−k'}` for
/// creation with `n', k'` read off the bra.
pub fn ordered_product_element(bra: &FockState, gen: Generator, ket: &FockState) -> Result<i8> {
    if bra.cfg != ket.cfg {
        return Err(Error::Shape("config mismatch".into()));
    }
    ket.check_mode(gen.mode)?;
    if bra.base != ket.base {
        return Ok(0);
    }
    let sec = gen.mode.sector.index();
    let bit = gen.mode.bit();
    for i in 0..4 {
        let (b, k) = (bra.occ[i], ket.occ[i]);
        if i != sec && b != k {
            return Ok(0);
        }
    }
    let (b, k) = (bra.occ[sec], ket.occ[sec]);
    if b & !bit != k & !bit {
        return Ok(0);
    }
    let (holder, ok) = match gen.kind {
        GenKind::Create => (b, k & bit == 0 && b & bit != 0),
        GenKind::Annihilate => (k, k & bit != 0 && b & bit == 0),
    };
    if !ok {
        return Ok(0);
    }
    let n = holder.count_ones();
    let position = (holder & (bit - 1)).count_ones() + 1;
    Ok(if (n - position).is_multiple_of(2) { 1 } else { -1 })
}

/// Superposition of basis states with complex amplitudes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateVector {
    terms: BTreeMap<FockState, Complex64>,
}

impl StateVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(state: FockState) -> Self {
        let mut v = Self::new();
        v.add(state, Complex64::new(1.0, 0.0));
        v
    }

    pub fn add(&mut self, state: FockState, amp: Complex64) {
        if amp == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(state).or_default();
        *entry += amp;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&state);
        }
    }

    pub fn amplitude(&self, state: &FockState) -> Complex64 {
        self.terms.get(state).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockState, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::new();
        for (s, a) in &self.terms {
            out.add(*s, a * c);
        }
        out
    }

    /// Config shared by the stored states, if any.
    pub fn config(&self) -> Option<SectorConfig> {
        self.terms.keys().next().map(|s| s.cfg)
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if let (Some(a), Some(b)) = (self.config(), other.config()) {
            if a != b {
                return Err(Error::Shape("config mismatch between state vectors".into()));
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, a) in &self.terms {
            if let Some(b) = other.terms.get(s) {
                acc += a.conj() * b;
            }
        }
        Ok(acc)
    }

    /// Applies generators right-to-left.
    pub fn apply_string(&self, ops: &[Generator]) -> Result<StateVector> {
        let mut out = StateVector::new();
        'terms: for (s, a) in &self.terms {
            let mut state = *s;
            let mut phase: Phase = 1;
            for g in ops.iter().rev() {
                match g.act(&state)? {
                    Some((p, next)) => {
                        phase *= p;
                        state = next;
                    }
                    None => continue 'terms,
                }
            }
            out.add(state, *a * f64::from(phase));
        }
        Ok(out)
    }
}

/// `⟨bra| ops[0] ops[1] ⋯ |ket⟩`.
pub fn operator_string_matrix_element(
    bra: &StateVector,
    ops: &[Generator],
    ket: &StateVector,
) -> Result<Complex64> {
    if let (Some(a), Some(b)) = (bra.config(), ket.config()) {
        if a != b {
            return Err(Error::Shape("bra and ket configs differ".into()));
        }
    }
    let moved = ket.apply_string(ops)?;
    bra.inner(&moved)
}

/// `Ω(A) = Σ_{rs} A_{rs} b†_r b_s` over the modes of one sector.
pub fn lift_observable(
    a: &DMatrix<Complex64>,
    sector: Sector,
    cfg: &SectorConfig,
) -> Result<OperatorExpr> {
    let d = cfg.count(sector);
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::Shape(format!(
            "observable is {}x{} but sector {sector} has {d} modes",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut expr = OperatorExpr::zero();
    for r in 0..d {
        for s in 0..d {
            let coeff = scalar_from_c64(a[(r, s)])
                .ok_or_else(|| Error::Domain("non-finite observable entry".into()))?;
            expr.push_term(
                coeff,
                vec![
                    Generator::create(sector, r + 1),
                    Generator::annihilate(sector, s + 1),
                ],
            );
        }
    }
    Ok(expr.pruned())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: [usize; 4]) -> SectorConfig {
        SectorConfig::from_counts(n).unwrap()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    const B0: [bool; 4] = [true, false, false, false];

    #[test]
    fn vacuum_normalization() {
        let c = cfg([2, 0, 0, 0]);
        let v = vacuum(c, B0);
        assert_eq!(v.bits(Sector::S11), 0);
        assert_eq!(inner_product(&v, &vacuum(c, B0)).unwrap(), 1);
        assert_eq!(
            inner_product(&v, &vacuum(c, [false, true, false, false])).unwrap(),
            0
        );
        assert!(base_flags([1, 2, 0, 0]).is_err());
        assert_eq!(
            base_flags([1, 0, 0, 1]).unwrap(),
            [true, false, false, true]
        );
    }

    #[test]
    fn sign_string_is_sector_local() {
        let c = cfg([2, 1, 0, 0]);
        let vac = vacuum(c, B0);
        assert_eq!(
            sign_string(&vac, ModeIndex::new(Sector::S11, 2)).unwrap(),
            1
        );
        let one11 = FockState::from_occupations(c, B0, [&[1], &[], &[], &[]]).unwrap();
        assert_eq!(
            sign_string(&one11, ModeIndex::new(Sector::S11, 2)).unwrap(),
            -1
        );
        let one12 = FockState::from_occupations(c, B0, [&[], &[1], &[], &[]]).unwrap();
        assert_eq!(
            sign_string(&one12, ModeIndex::new(Sector::S11, 1)).unwrap(),
            1
        );
        assert_eq!(
            sign_string(&one12, ModeIndex::new(Sector::S11, 2)).unwrap(),
            1
        );
    }

    #[test]
    fn create_and_annihilate() {
        let c = cfg([2, 0, 0, 0]);
        let vac = vacuum(c, B0);
        let m1 = ModeIndex::new(Sector::S11, 1);
        let m2 = ModeIndex::new(Sector::S11, 2);
        let (p, s1) = create(&vac, m1).unwrap().unwrap();
        assert_eq!(p, 1);
        assert_eq!(occupation(&s1, m1).unwrap(), 1);
        assert!(create(&s1, m1).unwrap().is_none());
        let (p, s12) = create(&s1, m2).unwrap().unwrap();
        assert_eq!(p, -1);
        assert_eq!(s12.occupied(Sector::S11), vec![1, 2]);

        assert!(annihilate(&vac, m1).unwrap().is_none());
        let (p, back) = annihilate(&s1, m1).unwrap().unwrap();
        assert_eq!((p, back), (1, vac));
        let (p, back) = annihilate(&s12, m2).unwrap().unwrap();
        assert_eq!((p, back), (-1, s1));
        assert_eq!(occupation(&back, m2).unwrap(), 0);

        let bad = ModeIndex::new(Sector::S12, 1);
        assert!(matches!(create(&vac, bad), Err(Error::Index { .. })));
        assert!(matches!(annihilate(&vac, bad), Err(Error::Index { .. })));
        assert!(occupation(&vac, ModeIndex::new(Sector::S11, 3)).is_err());
    }

    #[test]
    fn inner_product_is_delta() {
        let c = cfg([2, 1, 0, 0]);
        let a = FockState::from_occupations(c, B0, [&[1, 0], &[1], &[], &[]]).unwrap();
        let b = FockState::from_occupations(c, B0, [&[1, 1], &[1], &[], &[]]).unwrap();
        assert_eq!(inner_product(&a, &a).unwrap(), 1);
        assert_eq!(inner_product(&a, &b).unwrap(), 0);
        let other = vacuum(cfg([1, 1, 0, 0]), B0);
        assert!(matches!(inner_product(&a, &other), Err(Error::Shape(_))));
    }

    #[test]
    fn superposition_norm() {
        let c = cfg([2, 0, 0, 1]);
        let mut v = StateVector::new();
        let amps = [
            Complex64::new(0.5, -0.25),
            Complex64::new(0.0, 1.5),
            Complex64::new(-2.0, 0.0),
        ];
        for (i, amp) in amps.iter().enumerate() {
            v.add(FockState::from_basis_index(c, B0, i * 3).unwrap(), *amp);
        }
        let expected: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        assert_eq!(v.norm_sqr(), expected);
        assert_eq!(v.inner(&v).unwrap().re, expected);
    }

    #[test]
    fn string_elements_follow_ordered_rules() {
        let c = cfg([3, 0, 0, 0]);
        let vac = StateVector::basis(vacuum(c, B0));
        let n1 =
            StateVector::basis(FockState::from_occupations(c, B0, [&[1], &[], &[], &[]]).unwrap());
        let b11 = Generator::annihilate(Sector::S11, 1);
        assert_eq!(
            operator_string_matrix_element(&vac, &[b11], &n1).unwrap(),
            one()
        );

        let full = FockState::from_occupations(c, B0, [&[1, 1, 1], &[], &[], &[]]).unwrap();
        let holes = FockState::from_occupations(c, B0, [&[1, 0, 1], &[], &[], &[]]).unwrap();
        let g = Generator::annihilate(Sector::S11, 2);
        let v = operator_string_matrix_element(
            &StateVector::basis(holes),
            &[g],
            &StateVector::basis(full),
        )
        .unwrap();
        assert_eq!(v, -one());
        assert_eq!(ordered_product_element(&holes, g, &full).unwrap(), -1);

        let other = FockState::from_occupations(c, B0, [&[0, 1], &[], &[], &[]]).unwrap();
        let v = operator_string_matrix_element(&StateVector::basis(other), &[b11], &n1).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn lift_identity_counts_particles() {
        let c = cfg([3, 0, 0, 0]);
        let id = DMatrix::<Complex64>::identity(3, 3);
        let number = lift_observable(&id, Sector::S11, &c).unwrap();
        for s in basis_states(c, B0) {
            let v = StateVector::basis(s);
            let out = number.apply(&v).unwrap();
            let expectation = v.inner(&out).unwrap();
            assert_eq!(expectation.re, s.total_particles() as f64);
        }
        let zero = lift_observable(&DMatrix::zeros(3, 3), Sector::S11, &c).unwrap();
        assert!(zero.is_zero());
        assert!(matches!(
            lift_observable(&DMatrix::zeros(2, 2), Sector::S11, &c),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn basis_index_roundtrip() {
        let c = cfg([2, 1, 1, 1]);
        for (i, s) in basis_states(c, B0).enumerate() {
            assert_eq!(s.basis_index(), i);
        }
        let first = FockState::from_occupations(c, B0, [&[1], &[], &[], &[]]).unwrap();
        assert_eq!(first.basis_index(), 1 << 4);
        assert!(FockState::from_basis_index(c, B0, 32).is_err());
        assert!(FockState::from_bits(c, B0, [0b100, 0, 0, 0]).is_err());
    }
}
