//! Eigen-energies, wave numbers and Dirac boundary data for a particle in a
//! one-dimensional box of length `L`.
//!
//! Natural units throughout (ħ = c = 1). The relativistic parameters set the
//! rest energies: `m₀ = π / (2 q L)` for the Dirac particle and
//! `M = π / (2 q' L)` for the Klein-Gordon particle. With that choice the
//! non-relativistic Dirac spectrum above the rest energy is exactly
//! `2πn² / T_sch` with `T_sch = 2L / q`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which dispersion relation and mode functions a simulation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Schrodinger,
    /// Closed-form Dirac spectrum `m₀ √(1 + (2nq)²)`.
    DiracExact,
    /// Second-order series `2πn²/T − 2πn⁴q²/T`, `P = nq − n³q³`.
    DiracSlightRel,
    /// Leading-order series `2πn²/T`, `P = nq`.
    DiracNonRelLimit,
    KleinGordon,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Schrodinger,
        ModelKind::DiracExact,
        ModelKind::DiracSlightRel,
        ModelKind::DiracNonRelLimit,
        ModelKind::KleinGordon,
    ];

    pub fn is_dirac(self) -> bool {
        matches!(
            self,
            ModelKind::DiracExact | ModelKind::DiracSlightRel | ModelKind::DiracNonRelLimit
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Schrodinger => "schrodinger",
            ModelKind::DiracExact => "dirac",
            ModelKind::DiracSlightRel => "dirac-slight",
            ModelKind::DiracNonRelLimit => "dirac-nonrel",
            ModelKind::KleinGordon => "kg",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "schrodinger" | "sch" => Ok(ModelKind::Schrodinger),
            "dirac" | "dirac-exact" => Ok(ModelKind::DiracExact),
            "dirac-slight" | "slight" => Ok(ModelKind::DiracSlightRel),
            "dirac-nonrel" | "nonrel" => Ok(ModelKind::DiracNonRelLimit),
            "kg" | "klein-gordon" => Ok(ModelKind::KleinGordon),
            other => Err(format!(
                "unknown model '{other}' (expected schrodinger, dirac, dirac-slight, dirac-nonrel, kg)"
            )),
        }
    }
}

/// Energy branch of the Klein-Gordon spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Particle,
    Antiparticle,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Particle => 1.0,
            Branch::Antiparticle => -1.0,
        }
    }
}

/// Box and particle parameters in natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    length: f64,
    q: f64,
    q_prime: f64,
    rest_energy_dirac: f64,
    rest_energy_kg: f64,
    trev_sch: f64,
}

impl PhysicalParams {
    /// Derives both rest energies and the non-relativistic revival time
    /// `T_sch = 2L/q` from the box length and relativistic parameters.
    pub fn new(length: f64, q: f64, q_prime: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParams(format!("box length must be > 0 (got {length})")));
        }
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidParams(format!("q must be > 0 (got {q})")));
        }
        if !(q_prime.is_finite() && q_prime > 0.0) {
            return Err(Error::InvalidParams(format!("q' must be > 0 (got {q_prime})")));
        }
        Ok(Self {
            length,
            q,
            q_prime,
            rest_energy_dirac: PI / (2.0 * q * length),
            rest_energy_kg: PI / (2.0 * q_prime * length),
            trev_sch: 2.0 * length / q,
        })
    }

    /// Replaces the non-relativistic revival time that scales the series
    /// spectra.
    pub fn with_trev_sch(mut self, trev_sch: f64) -> Result<Self> {
        if !(trev_sch.is_finite() && trev_sch > 0.0) {
            return Err(Error::InvalidParams(format!("T_sch must be > 0 (got {trev_sch})")));
        }
        self.trev_sch = trev_sch;
        Ok(self)
    }

    /// Overrides the Klein-Gordon rest energy `Mc²`, decoupling it from `q'`.
    /// Zero gives the massless dispersion.
    pub fn with_rest_energy_kg(mut self, rest_energy: f64) -> Result<Self> {
        if !(rest_energy.is_finite() && rest_energy >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "KG rest energy must be >= 0 (got {rest_energy})"
            )));
        }
        self.rest_energy_kg = rest_energy;
        Ok(self)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn q_prime(&self) -> f64 {
        self.q_prime
    }

    pub fn rest_energy_dirac(&self) -> f64 {
        self.rest_energy_dirac
    }

    pub fn rest_energy_kg(&self) -> f64 {
        self.rest_energy_kg
    }

    pub fn trev_sch(&self) -> f64 {
        self.trev_sch
    }

    /// Relativistic parameter relevant to `kind` (`q'` for Klein-Gordon).
    pub fn q_for(&self, kind: ModelKind) -> f64 {
        match kind {
            ModelKind::KleinGordon => self.q_prime,
            _ => self.q,
        }
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::new(1.0, 1.0, 1.0).expect("default parameters are valid")
    }
}

/// Spectral data of one box mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDescriptor {
    pub n: u32,
    /// Wave number `nπ/L`.
    pub k: f64,
    pub energy: f64,
    /// Energy above the rest energy. Drives the time evolution; only energy
    /// differences enter any density, and this avoids cancellation against
    /// large rest energies.
    pub kinetic: f64,
    /// Dimensionless momentum `P_n` (zero for sine-mode models).
    pub momentum: f64,
    /// Boundary phase `δ_n` in radians (zero for sine-mode models).
    pub phase: f64,
}

fn check_index(n: u32) -> Result<f64> {
    if n == 0 {
        Err(Error::InvalidModeIndex(n))
    } else {
        Ok(f64::from(n))
    }
}

pub fn wave_number(n: u32, params: &PhysicalParams) -> Result<f64> {
    Ok(check_index(n)? * PI / params.length)
}

/// `E_n = 2πn² / T_sch`.
pub fn schrodinger_energy(n: u32, params: &PhysicalParams) -> Result<f64> {
    let n = check_index(n)?;
    Ok(2.0 * PI * n * n / params.trev_sch)
}

/// `E_n = m₀ √(1 + (2nq)²)`.
pub fn dirac_energy(n: u32, params: &PhysicalParams) -> Result<f64> {
    let x = 2.0 * check_index(n)? * params.q;
    Ok(params.rest_energy_dirac * (1.0 + x * x).sqrt())
}

/// `E_n − m₀`, evaluated as `m₀ x² / (1 + √(1 + x²))` with `x = 2nq`.
pub fn dirac_kinetic_energy(n: u32, params: &PhysicalParams) -> Result<f64> {
    let x = 2.0 * check_index(n)? * params.q;
    let x2 = x * x;
    Ok(params.rest_energy_dirac * x2 / (1.0 + (1.0 + x2).sqrt()))
}

/// `P_n = k_n / (E_n + m₀) = 2nq / (1 + √(1 + (2nq)²))`, always in (0, 1).
pub fn dirac_momentum(n: u32, params: &PhysicalParams) -> Result<f64> {
    let x = 2.0 * check_index(n)? * params.q;
    Ok(x / (1.0 + (1.0 + x * x).sqrt()))
}

/// Boundary phase `δ = arg((P² − 1) + 2iP)`, the continuous branch of
/// `arctan(2P / (P² − 1))`. Decreases from π at `P = 0` to π/2 as `P → 1`.
pub fn dirac_phase(momentum: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&momentum) {
        return Err(Error::MomentumOutOfRange(momentum));
    }
    Ok((2.0 * momentum).atan2(momentum * momentum - 1.0))
}

/// `E_n± = ±√(k_n² + M²)`.
pub fn kg_energy(n: u32, branch: Branch, params: &PhysicalParams) -> Result<f64> {
    let k = wave_number(n, params)?;
    let m = params.rest_energy_kg;
    Ok(branch.sign() * (k * k + m * m).sqrt())
}

/// Positive-branch `E_n − M = k² / (E_n + M)`.
pub fn kg_kinetic_energy(n: u32, params: &PhysicalParams) -> Result<f64> {
    let k = wave_number(n, params)?;
    let m = params.rest_energy_kg;
    Ok(k * k / ((k * k + m * m).sqrt() + m))
}

/// Series spectra of the two Dirac limit regimes.
pub fn limit_energy(n: u32, kind: ModelKind, params: &PhysicalParams) -> Result<f64> {
    let base = schrodinger_energy(n, params)?;
    match kind {
        ModelKind::DiracNonRelLimit => Ok(base),
        ModelKind::DiracSlightRel => {
            let nq = f64::from(n) * params.q;
            Ok(base - base * nq * nq)
        }
        _ => Err(Error::UnsupportedModel { op: "limit_energy", kind }),
    }
}

/// Series momenta of the two Dirac limit regimes: `nq` and `nq − n³q³`.
pub fn limit_momentum(n: u32, kind: ModelKind, params: &PhysicalParams) -> Result<f64> {
    let nq = check_index(n)? * params.q;
    match kind {
        ModelKind::DiracNonRelLimit => Ok(nq),
        ModelKind::DiracSlightRel => Ok(nq - nq * nq * nq),
        _ => Err(Error::UnsupportedModel { op: "limit_momentum", kind }),
    }
}

/// Full spectral description of mode `n` under `kind`.
pub fn describe_mode(n: u32, kind: ModelKind, params: &PhysicalParams) -> Result<ModeDescriptor> {
    let k = wave_number(n, params)?;
    let (energy, kinetic, momentum, phase) = match kind {
        ModelKind::Schrodinger => {
            let e = schrodinger_energy(n, params)?;
            (e, e, 0.0, 0.0)
        }
        ModelKind::DiracExact => {
            let p = dirac_momentum(n, params)?;
            (dirac_energy(n, params)?, dirac_kinetic_energy(n, params)?, p, dirac_phase(p)?)
        }
        ModelKind::DiracSlightRel | ModelKind::DiracNonRelLimit => {
            let e = limit_energy(n, kind, params)?;
            let p = limit_momentum(n, kind, params)?;
            (e, e, p, dirac_phase(p)?)
        }
        ModelKind::KleinGordon => (
            kg_energy(n, Branch::Particle, params)?,
            kg_kinetic_energy(n, params)?,
            0.0,
            0.0,
        ),
    };
    Ok(ModeDescriptor { n, k, energy, kinetic, momentum, phase })
}
