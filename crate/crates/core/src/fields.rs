//! Plane-wave state functions on the η/u sectors.
//!
//! A mode in sector `(λ, μ)` lives on the η chart for `λ = 1` and on the u
//! chart for `λ = 2`; `μ` picks the light-cone sign (`1 → +`, `2 → −`). Its
//! wave function has three components, `F_α(x) = e_α · x^(±α) · Ψ(x)`, and
//! the scalar `F = Σ_α F_α`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{vacuum, Complex64, Generator, ModeIndex, SectorConfig, StateVector};
use crate::grading::{pairing, to_lightcone, LightConeSign, PointSector, PointZ, SectorKind};

pub const DEFAULT_TIME_DIRECTION: [f64; 3] = [1.0, 0.0, 0.0];

const UNIT_TOL: f64 = 1e-12;

/// On-shell momentum with derived energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Momentum {
    p3: [f64; 3],
    mass: f64,
    energy: f64,
}

impl Momentum {
    pub fn p3(&self) -> [f64; 3] {
        self.p3
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn p_squared(&self) -> f64 {
        self.p3.iter().map(|v| v * v).sum()
    }

    /// `E² − p² − m²`, zero up to rounding.
    pub fn shell_residual(&self) -> f64 {
        self.energy * self.energy - self.p_squared() - self.mass * self.mass
    }
}

pub fn mass_shell(p3: [f64; 3], mass: f64) -> Result<Momentum> {
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::Domain(format!(
            "mass must be positive and finite, got {mass}"
        )));
    }
    if p3.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("momentum components must be finite".into()));
    }
    let p2: f64 = p3.iter().map(|v| v * v).sum();
    Ok(Momentum {
        p3,
        mass,
        energy: (p2 + mass * mass).sqrt(),
    })
}

fn check_unit(d: &[f64; 3]) -> Result<()> {
    let n: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::Domain(format!(
            "time direction must be a unit vector, |d| = {n}"
        )));
    }
    Ok(())
}

/// `plus = (E d + p)/√2`, `minus = (E d − p)/√2`.
pub fn lightcone_momentum(q: &Momentum, time_direction: &[f64; 3]) -> Result<PointSector> {
    check_unit(time_direction)?;
    let mut out = PointSector::default();
    for a in 0..3 {
        let ed = q.energy * time_direction[a];
        out.plus[a] = (ed + q.p3[a]) * FRAC_1_SQRT_2;
        out.minus[a] = (ed - q.p3[a]) * FRAC_1_SQRT_2;
    }
    Ok(out)
}

/// Inverse of [`lightcone_momentum`]; the energy part must lie along the
/// time direction and the invariant mass must be positive.
pub fn momentum_from_lightcone(p: &PointSector, time_direction: &[f64; 3]) -> Result<Momentum> {
    check_unit(time_direction)?;
    let mut ed = [0.0; 3];
    let mut p3 = [0.0; 3];
    for a in 0..3 {
        ed[a] = (p.plus[a] + p.minus[a]) * FRAC_1_SQRT_2;
        p3[a] = (p.plus[a] - p.minus[a]) * FRAC_1_SQRT_2;
    }
    let energy: f64 = (0..3).map(|a| ed[a] * time_direction[a]).sum();
    let off: f64 = (0..3)
        .map(|a| (ed[a] - energy * time_direction[a]).powi(2))
        .sum::<f64>()
        .sqrt();
    if off > 1e-9 * (1.0 + energy.abs()) {
        return Err(Error::Domain(
            "energy component not along the time direction".into(),
        ));
    }
    let p2: f64 = p3.iter().map(|v| v * v).sum();
    let m2 = energy * energy - p2;
    if !(energy > 0.0) || !(m2 > 0.0) {
        return Err(Error::Domain(format!(
            "not a massive positive-energy momentum (m² = {m2})"
        )));
    }
    Ok(Momentum {
        p3,
        mass: m2.sqrt(),
        energy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn value(self) -> i8 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    fn doublet(self) -> [Complex64; 2] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Spin::Up => [one, zero],
            Spin::Down => [zero, one],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinorKind {
    /// Positive-energy solution.
    U,
    /// Negative-energy solution.
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frequency {
    Positive,
    Negative,
}

/// Dirac spinor in the standard representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub components: [Complex64; 4],
    pub spin: Spin,
    pub kind: SpinorKind,
}

impl Spinor {
    /// `ā b` with `ā = a† γ⁰`, `γ⁰ = diag(1, 1, −1, −1)`.
    pub fn bar_product(&self, other: &Spinor) -> Complex64 {
        bar_product(&self.components, &other.components)
    }
}

pub fn bar_product(a: &[Complex64; 4], b: &[Complex64; 4]) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] - a[2].conj() * b[2] - a[3].conj() * b[3]
}

/// `σ·p` applied to a two-component doublet.
fn sigma_dot(p: &[f64; 3], v: &[Complex64; 2]) -> [Complex64; 2] {
    let pz = Complex64::new(p[2], 0.0);
    let minus = Complex64::new(p[0], -p[1]);
    let plus = Complex64::new(p[0], p[1]);
    [pz * v[0] + minus * v[1], plus * v[0] - pz * v[1]]
}

/// Rest-frame doublet boosted to momentum `q`, normalized to `ū u = 1`
/// and `v̄ v = −1`. The v spinor of spin `s` carries the doublet of `−s`.
pub fn dirac_spinor(q: &Momentum, spin: Spin, kind: SpinorKind) -> Spinor {
    let e_m = q.energy + q.mass;
    let norm = (e_m / (2.0 * q.mass)).sqrt();
    let components = match kind {
        SpinorKind::U => {
            let chi = spin.doublet();
            let low = sigma_dot(&q.p3, &chi);
            [
                chi[0] * norm,
                chi[1] * norm,
                low[0] * (norm / e_m),
                low[1] * (norm / e_m),
            ]
        }
        SpinorKind::V => {
            let eta = spin.flip().doublet();
            let up = sigma_dot(&q.p3, &eta);
            [
                up[0] * (norm / e_m),
                up[1] * (norm / e_m),
                eta[0] * norm,
                eta[1] * norm,
            ]
        }
    };
    Spinor {
        components,
        spin,
        kind,
    }
}

/// `√(m/E) · w(q, s) · exp(∓ i p·x)` with `w = u` for positive and `w = v`
/// for negative frequency, `p·x` the light-cone pairing.
pub fn plane_wave(
    x: &PointSector,
    q: &Momentum,
    spin: Spin,
    frequency: Frequency,
    time_direction: &[f64; 3],
) -> Result<[Complex64; 4]> {
    let p = lightcone_momentum(q, time_direction)?;
    let phase = pairing(&p, x);
    let (kind, sign) = match frequency {
        Frequency::Positive => (SpinorKind::U, -1.0),
        Frequency::Negative => (SpinorKind::V, 1.0),
    };
    let w = dirac_spinor(q, spin, kind);
    let factor = Complex64::from_polar((q.mass / q.energy).sqrt(), sign * phase);
    Ok(w.components.map(|c| c * factor))
}

/// Scalar profile `Ψ` on a sector point; must be reentrant.
pub type Profile = Arc<dyn Fn(&PointSector) -> Complex64 + Send + Sync>;

/// One spinor component of a plane wave as a scalar profile.
pub fn plane_wave_profile(
    q: Momentum,
    spin: Spin,
    frequency: Frequency,
    component: usize,
    time_direction: [f64; 3],
) -> Result<Profile> {
    if component >= 4 {
        return Err(Error::Range {
            value: component,
            bound: 4,
        });
    }
    check_unit(&time_direction)?;
    Ok(Arc::new(move |x: &PointSector| {
        plane_wave(x, &q, spin, frequency, &time_direction).expect("direction checked")[component]
    }))
}

pub fn constant_profile(value: Complex64) -> Profile {
    Arc::new(move |_: &PointSector| value)
}

/// Chart kind and light-cone sign a mode's wave function lives on.
pub fn mode_chart(mode: ModeIndex) -> (SectorKind, LightConeSign) {
    let kind = if mode.sector.lambda() == 1 {
        SectorKind::Eta
    } else {
        SectorKind::U
    };
    let sign = if mode.sector.mu() == 1 {
        LightConeSign::Plus
    } else {
        LightConeSign::Minus
    };
    (kind, sign)
}

/// Mode wave function `F_r` with components `e_α · x^(±α) · Ψ(x)`.
#[derive(Clone)]
pub struct WaveFunctionF {
    mode: ModeIndex,
    weights: [Complex64; 3],
    profile: Profile,
}

impl fmt::Debug for WaveFunctionF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveFunctionF")
            .field("mode", &self.mode)
            .field("weights", &self.weights)
            .finish_non_exhaustive()
    }
}

pub fn make_f(mode: ModeIndex, weights: [Complex64; 3], profile: Profile) -> WaveFunctionF {
    WaveFunctionF {
        mode,
        weights,
        profile,
    }
}

impl WaveFunctionF {
    pub fn mode(&self) -> ModeIndex {
        self.mode
    }

    pub fn weights(&self) -> [Complex64; 3] {
        self.weights
    }

    pub fn kind(&self) -> SectorKind {
        mode_chart(self.mode).0
    }

    /// Components at a point of this mode's own chart.
    pub fn eval_sector(&self, x: &PointSector) -> [Complex64; 3] {
        let sign = mode_chart(self.mode).1;
        let psi = (self.profile)(x);
        std::array::from_fn(|a| self.weights[a] * x.component(sign, a) * psi)
    }

    /// Components at a full chart point, projected onto this mode's chart.
    pub fn eval(&self, z: &PointZ) -> [Complex64; 3] {
        let (eta, u) = to_lightcone(z);
        match self.kind() {
            SectorKind::Eta => self.eval_sector(&eta),
            SectorKind::U => self.eval_sector(&u),
        }
    }

    /// `F = Σ_α F_α`.
    pub fn eval_contracted(&self, z: &PointZ) -> Complex64 {
        self.eval(z).iter().sum()
    }
}

/// Coefficients `c̄(r)` of the single-particle selectors.
pub type AmplitudeVector = BTreeMap<ModeIndex, Complex64>;

/// Wave functions keyed by mode.
#[derive(Debug, Clone, Default)]
pub struct FieldSet {
    fns: BTreeMap<ModeIndex, WaveFunctionF>,
}

impl FieldSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, f: WaveFunctionF) {
        self.fns.insert(f.mode, f);
    }

    pub fn get(&self, mode: ModeIndex) -> Result<&WaveFunctionF> {
        self.fns
            .get(&mode)
            .ok_or_else(|| Error::Shape(format!("no wave function for mode {mode}")))
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        self.fns.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.fns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fns.is_empty()
    }
}

impl FromIterator<WaveFunctionF> for FieldSet {
    fn from_iter<I: IntoIterator<Item = WaveFunctionF>>(iter: I) -> Self {
        let mut s = FieldSet::new();
        for f in iter {
            s.insert(f);
        }
        s
    }
}

fn add3(acc: &mut [Complex64; 3], v: [Complex64; 3], c: Complex64) {
    for a in 0..3 {
        acc[a] += c * v[a];
    }
}

/// `Σ_r c̄(r) F_r(x)`, componentwise.
pub fn field_matrix_element(
    c: &AmplitudeVector,
    fields: &FieldSet,
    z: &PointZ,
) -> Result<[Complex64; 3]> {
    let mut out = [Complex64::default(); 3];
    for (&mode, &amp) in c {
        add3(&mut out, fields.get(mode)?.eval(z), amp);
    }
    Ok(out)
}

/// `Σ_r c̄*(r) F̄_r(x)`, the co-vector counterpart.
pub fn covector_matrix_element(
    c: &AmplitudeVector,
    fields: &FieldSet,
    z: &PointZ,
) -> Result<[Complex64; 3]> {
    Ok(field_matrix_element(c, fields, z)?.map(|v| v.conj()))
}

/// Single-particle superposition `Σ_r c̄(r) b†_r |χ⁰(ν)⟩`.
pub fn state_from_amplitudes(
    cfg: SectorConfig,
    base: [bool; 4],
    c: &AmplitudeVector,
) -> Result<StateVector> {
    let vac = StateVector::basis(vacuum(cfg, base));
    let mut out = StateVector::new();
    for (&mode, &amp) in c {
        mode.validate(&cfg)?;
        for (s, a) in vac
            .apply_string(&[Generator::create(mode.sector, mode.serial)])?
            .iter()
        {
            out.add(*s, a * amp);
        }
    }
    Ok(out)
}

/// `⟨χ⁰‖b_r‖χ⟩`: the base-ket flags are summed over all sixteen choices.
pub fn reduced_annihilation_element(chi: &StateVector, mode: ModeIndex) -> Result<Complex64> {
    let Some(cfg) = chi.config() else {
        return Ok(Complex64::default());
    };
    let lowered = chi.apply_string(&[Generator::annihilate(mode.sector, mode.serial)])?;
    let mut total = Complex64::default();
    for flags in 0..16u8 {
        let base = std::array::from_fn(|i| flags >> i & 1 == 1);
        total += StateVector::basis(vacuum(cfg, base)).inner(&lowered)?;
    }
    Ok(total)
}

/// Fock-level evaluation of `⟨χ⁰‖Φ̂(ζ)‖χ⟩ = Σ_r ⟨χ⁰‖b_r‖χ⟩ F_r(ζ)`.
pub fn fock_field_matrix_element(
    chi: &StateVector,
    fields: &FieldSet,
    z: &PointZ,
) -> Result<[Complex64; 3]> {
    let mut out = [Complex64::default(); 3];
    for mode in fields.modes() {
        let amp = reduced_annihilation_element(chi, mode)?;
        if amp != Complex64::default() {
            add3(&mut out, fields.get(mode)?.eval(z), amp);
        }
    }
    Ok(out)
}

/// Which entry of the vector-valued `F` fills a determinant row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlaterEntries {
    /// Row `i` uses component `a_i` of each `F_{r_j}(x_i)`.
    Components(Vec<usize>),
    /// Entries are the contracted scalars `F_{r_j}(x_i)`.
    Contracted,
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Matrix `M[i][j]` of `F_{r_j}(x_i)` entries.
pub fn slater_matrix(
    points: &[PointZ],
    modes: &[ModeIndex],
    fields: &FieldSet,
    entries: &SlaterEntries,
) -> Result<DMatrix<Complex64>> {
    let n = points.len();
    if n == 0 || modes.len() != n {
        return Err(Error::Shape(format!(
            "need n ≥ 1 points and as many modes, got {} points and {} modes",
            n,
            modes.len()
        )));
    }
    if let SlaterEntries::Components(a) = entries {
        if a.len() != n {
            return Err(Error::Shape(format!(
                "{} component indices for {n} rows",
                a.len()
            )));
        }
        if let Some(&bad) = a.iter().find(|&&v| v >= 3) {
            return Err(Error::Range {
                value: bad,
                bound: 3,
            });
        }
    }
    let fs: Vec<&WaveFunctionF> = modes
        .iter()
        .map(|&m| fields.get(m))
        .collect::<Result<_>>()?;
    let mut m = DMatrix::zeros(n, n);
    for (i, z) in points.iter().enumerate() {
        for (j, f) in fs.iter().enumerate() {
            m[(i, j)] = match entries {
                SlaterEntries::Components(a) => f.eval(z)[a[i]],
                SlaterEntries::Contracted => f.eval_contracted(z),
            };
        }
    }
    Ok(m)
}

/// `(1/√n!) · c̄ · det F_{r_j}(x_i)`.
pub fn slater_matrix_element(
    points: &[PointZ],
    modes: &[ModeIndex],
    coefficient: Complex64,
    fields: &FieldSet,
    entries: &SlaterEntries,
) -> Result<Complex64> {
    let m = slater_matrix(points, modes, fields, entries)?;
    let n = points.len();
    Ok(coefficient * m.determinant() / factorial(n).sqrt())
}

/// `Σ_{r,r'} c̄(r) c̄*(r') F_r(x)_α F̄_{r'}(x')_α`, componentwise.
pub fn pair_correlator(
    c: &AmplitudeVector,
    fields: &FieldSet,
    x: &PointZ,
    x_prime: &PointZ,
) -> Result<[Complex64; 3]> {
    let left: Vec<(Complex64, [Complex64; 3])> = c
        .iter()
        .map(|(&m, &a)| Ok((a, fields.get(m)?.eval(x))))
        .collect::<Result<_>>()?;
    let right: Vec<(Complex64, [Complex64; 3])> = c
        .iter()
        .map(|(&m, &a)| Ok((a, fields.get(m)?.eval(x_prime))))
        .collect::<Result<_>>()?;
    let mut out = [Complex64::default(); 3];
    for (ca, fa) in &left {
        for (cb, fb) in &right {
            for k in 0..3 {
                out[k] += ca * cb.conj() * fa[k] * fb[k].conj();
            }
        }
    }
    Ok(out)
}

/// `Σ_α (|Ψ_η^(±α)|² − |Ψ_u^(±α)|²)` with `Ψ^(±α) = x^(±α) Ψ^±`.
pub fn lightcone_density(
    psi_eta: &Profile,
    psi_u: &Profile,
    sign: LightConeSign,
    eta: &PointSector,
    u: &PointSector,
) -> f64 {
    let pe = psi_eta(eta).norm_sqr();
    let pu = psi_u(u).norm_sqr();
    (0..3)
        .map(|a| eta.component(sign, a).powi(2) * pe - u.component(sign, a).powi(2) * pu)
        .sum()
}
