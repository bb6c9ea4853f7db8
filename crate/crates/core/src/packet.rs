//! Gaussian wave packets expanded on the box eigenmodes.
//!
//! Every model produces a [`ModeSet`]: the spectral data of a contiguous mode
//! window together with complex amplitudes normalized to `Σ|c|² = 1`. Only
//! relative weights and phases matter for a carpet, so analytic prefactors
//! are dropped and the truncated expansion is renormalized numerically.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{simpson, sin_pi};
use crate::spectrum::{describe_mode, ModeDescriptor, ModelKind, PhysicalParams};

/// Weights below this magnitude count as zero when checking for a degenerate
/// packet.
pub const DEGENERATE_WEIGHT: f64 = 1e-300;

/// Gaussian damping used by the closed-form Dirac amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiracWidth {
    /// `exp(−Δ²k²/2)`, the projection of `exp(−(z−z₀)²/2Δ²)` on a box mode.
    /// Shared with the Schrödinger and Klein-Gordon amplitudes.
    #[default]
    Projected,
    /// `exp(−Δ²k²)`, the literal Dirac amplitude formula.
    Literal,
}

/// Initial Gaussian packet and the inclusive mode window it is expanded on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    pub z0: f64,
    pub delta: f64,
    pub p0: f64,
    pub m_min: u32,
    pub m_max: u32,
    pub dirac_width: DiracWidth,
}

impl PacketSpec {
    pub fn new(z0: f64, delta: f64, m_min: u32, m_max: u32) -> Self {
        Self { z0, delta, p0: 0.0, m_min, m_max, dirac_width: DiracWidth::default() }
    }

    /// Packet of width `10⁻²` centred in the box.
    pub fn centered(params: &PhysicalParams, m_min: u32, m_max: u32) -> Self {
        Self::new(0.5 * params.length(), 1e-2, m_min, m_max)
    }

    pub fn with_p0(mut self, p0: f64) -> Self {
        self.p0 = p0;
        self
    }

    pub fn with_dirac_width(mut self, width: DiracWidth) -> Self {
        self.dirac_width = width;
        self
    }

    pub fn validate(&self, params: &PhysicalParams) -> Result<()> {
        let l = params.length();
        if !(self.z0 > 0.0 && self.z0 < l) {
            return Err(Error::InvalidPacket(format!("z0 = {} must lie in (0, {l})", self.z0)));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::InvalidPacket(format!("width must be > 0 (got {})", self.delta)));
        }
        if !self.p0.is_finite() {
            return Err(Error::InvalidPacket("p0 must be finite".into()));
        }
        if self.m_min < 1 || self.m_max <= self.m_min {
            return Err(Error::InvalidPacket(format!(
                "mode window [{}, {}] needs 1 <= mmin < mmax",
                self.m_min, self.m_max
            )));
        }
        Ok(())
    }

    fn indices(&self) -> impl Iterator<Item = u32> {
        self.m_min..=self.m_max
    }
}

/// Spectral data plus normalized amplitudes of a truncated expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    model: ModelKind,
    length: f64,
    q: f64,
    modes: Vec<ModeDescriptor>,
    coeffs: Vec<Complex64>,
}

impl ModeSet {
    /// Sorts by mode index and renormalizes `weights` to unit norm.
    pub fn new(
        model: ModelKind,
        params: &PhysicalParams,
        modes: Vec<ModeDescriptor>,
        weights: Vec<Complex64>,
    ) -> Result<Self> {
        if modes.len() != weights.len() {
            return Err(Error::InvalidPacket(format!(
                "{} modes but {} amplitudes",
                modes.len(),
                weights.len()
            )));
        }
        if modes.is_empty() || weights.iter().all(|w| w.norm() < DEGENERATE_WEIGHT) {
            return Err(Error::DegeneratePacket);
        }
        let mut pairs: Vec<_> = modes.into_iter().zip(weights).collect();
        pairs.sort_by_key(|(m, _)| m.n);
        let norm = pairs.iter().map(|(_, w)| w.norm_sqr()).sum::<f64>().sqrt();
        let (modes, coeffs) = pairs.into_iter().map(|(m, w)| (m, w / norm)).unzip();
        Ok(Self { model, length: params.length(), q: params.q_for(model), modes, coeffs })
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Relativistic parameter of the model (`q'` for Klein-Gordon).
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn modes(&self) -> &[ModeDescriptor] {
        &self.modes
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeDescriptor, &Complex64)> {
        self.modes.iter().zip(&self.coeffs)
    }

    /// Weighted mean mode index `round(Σ n|c_n|²)`, at least 1.
    pub fn mean_mode_index(&self) -> u32 {
        let mean: f64 = self.iter().map(|(m, c)| f64::from(m.n) * c.norm_sqr()).sum();
        (mean.round() as u32).max(1)
    }

    /// Spatial factor of mode `i` at position `z`.
    pub fn mode_function(&self, i: usize, z: f64) -> Complex64 {
        mode_function(self.model, &self.modes[i], self.length, z)
    }
}

/// Spatial factor `φ_n(z)`: `sin(k_n z)` for the sine-mode models, and
/// `cos(k_n z − δ_n/2) − i P_n sin(k_n z − δ_n/2)` for the Dirac models.
pub fn mode_function(model: ModelKind, mode: &ModeDescriptor, length: f64, z: f64) -> Complex64 {
    if model.is_dirac() {
        let x = mode.k * z - 0.5 * mode.phase;
        let (s, c) = x.sin_cos();
        Complex64::new(c, -mode.momentum * s)
    } else {
        Complex64::new(sin_pi(f64::from(mode.n) * z / length), 0.0)
    }
}

fn describe_window(
    kind: ModelKind,
    spec: &PacketSpec,
    params: &PhysicalParams,
) -> Result<Vec<ModeDescriptor>> {
    spec.validate(params)?;
    spec.indices().map(|n| describe_mode(n, kind, params)).collect()
}

/// Overlap `∫ conj(φ_n(z)) g(z) dz` with the Gaussian
/// `g(z) = exp(−(z−z₀)²/2Δ²) exp(i p₀ (z−z₀))`, by composite Simpson over
/// `z₀ ± 12Δ` clipped to the box.
fn projected_weights(
    kind: ModelKind,
    modes: &[ModeDescriptor],
    spec: &PacketSpec,
    length: f64,
) -> Vec<Complex64> {
    let a = (spec.z0 - 12.0 * spec.delta).max(0.0);
    let b = (spec.z0 + 12.0 * spec.delta).min(length);
    let k_max = modes.iter().map(|m| m.k).fold(0.0, f64::max) + spec.p0.abs();
    let h = (spec.delta / 20.0).min(0.01 / k_max.max(1e-300));
    let intervals = (((b - a) / h).ceil() as usize).max(2000);
    let gaussian = |z: f64| {
        let u = z - spec.z0;
        Complex64::from_polar((-(u * u) / (2.0 * spec.delta * spec.delta)).exp(), spec.p0 * u)
    };
    modes
        .iter()
        .map(|mode| {
            simpson(a, b, intervals, |z| mode_function(kind, mode, length, z).conj() * gaussian(z))
        })
        .collect()
}

/// Gaussian projected on the sine modes:
/// `c_m ∝ exp(−π²Δ²m²/2L²) sin(mπz₀/L)`.
pub fn build_schrodinger_coeffs(spec: &PacketSpec, params: &PhysicalParams) -> Result<ModeSet> {
    let kind = ModelKind::Schrodinger;
    let modes = describe_window(kind, spec, params)?;
    let l = params.length();
    let weights = if spec.p0 == 0.0 {
        modes
            .iter()
            .map(|m| {
                let g = (-0.5 * spec.delta * spec.delta * m.k * m.k).exp();
                Complex64::new(g * sin_pi(f64::from(m.n) * spec.z0 / l), 0.0)
            })
            .collect()
    } else {
        projected_weights(kind, &modes, spec, l)
    };
    ModeSet::new(kind, params, modes, weights)
}

/// Dirac amplitudes
/// `c_m ∝ g(k_m) [cos(k_m z₀ − δ_m/2) + i P_m sin(k_m z₀ − δ_m/2)]`,
/// the conjugate of the mode function at `z₀`. Limit kinds take `P_m`, `δ_m`
/// and the energies from their series.
pub fn build_dirac_coeffs(
    spec: &PacketSpec,
    params: &PhysicalParams,
    kind: ModelKind,
) -> Result<ModeSet> {
    if !kind.is_dirac() {
        return Err(Error::UnsupportedModel { op: "build_dirac_coeffs", kind });
    }
    let modes = describe_window(kind, spec, params)?;
    let l = params.length();
    let weights = if spec.p0 == 0.0 {
        let d2 = spec.delta * spec.delta;
        modes
            .iter()
            .map(|m| {
                let g = match spec.dirac_width {
                    DiracWidth::Projected => (-0.5 * d2 * m.k * m.k).exp(),
                    DiracWidth::Literal => (-d2 * m.k * m.k).exp(),
                };
                mode_function(kind, m, l, spec.z0).conj() * g
            })
            .collect()
    } else {
        projected_weights(kind, &modes, spec, l)
    };
    ModeSet::new(kind, params, modes, weights)
}

/// Positive-branch Klein-Gordon amplitudes
/// `c_n ∝ E_n^{−1/2} exp(−k_n²Δ²/2) sin(nπz₀/L)`.
pub fn build_kg_coeffs(spec: &PacketSpec, params: &PhysicalParams) -> Result<ModeSet> {
    let kind = ModelKind::KleinGordon;
    let modes = describe_window(kind, spec, params)?;
    let l = params.length();
    let weights = if spec.p0 == 0.0 {
        modes
            .iter()
            .map(|m| {
                let g = (-0.5 * spec.delta * spec.delta * m.k * m.k).exp();
                Complex64::new(g * sin_pi(f64::from(m.n) * spec.z0 / l) / m.energy.sqrt(), 0.0)
            })
            .collect()
    } else {
        projected_weights(kind, &modes, spec, l)
            .into_iter()
            .zip(&modes)
            .map(|(w, m)| w / m.energy.sqrt())
            .collect()
    };
    ModeSet::new(kind, params, modes, weights)
}

/// Dispatches to the builder for `kind`.
pub fn build_mode_set(
    kind: ModelKind,
    spec: &PacketSpec,
    params: &PhysicalParams,
) -> Result<ModeSet> {
    match kind {
        ModelKind::Schrodinger => build_schrodinger_coeffs(spec, params),
        ModelKind::KleinGordon => build_kg_coeffs(spec, params),
        _ => build_dirac_coeffs(spec, params, kind),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn norm_sq(set: &ModeSet) -> f64 {
        set.coeffs().iter().map(|c| c.norm_sqr()).sum()
    }

    #[test]
    fn schrodinger_centered_parity() {
        let p = PhysicalParams::default();
        let set = build_schrodinger_coeffs(&PacketSpec::centered(&p, 1, 40), &p).unwrap();
        assert_eq!(set.len(), 40);
        for (m, c) in set.iter() {
            if m.n % 2 == 0 {
                assert_eq!(c.norm(), 0.0, "mode {}", m.n);
            } else {
                assert!(c.norm() > 0.0);
            }
        }
        assert!((norm_sq(&set) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schrodinger_first_weight_brute_force() {
        let p = PhysicalParams::default();
        let set = build_schrodinger_coeffs(&PacketSpec::centered(&p, 1, 40), &p).unwrap();
        // Oracle: sum the 40 unnormalized weights directly.
        let w: Vec<f64> = (1..=40)
            .map(|m| {
                let m = m as f64;
                (-PI * PI * 1e-4 * m * m / 2.0).exp() * (m * PI * 0.5).sin()
            })
            .collect();
        let total: f64 = w.iter().map(|x| x * x).sum();
        let c1 = set.coeffs()[0].norm_sqr();
        assert!((c1 - w[0] * w[0] / total).abs() < 1e-14);
        assert!((c1 - 0.076_608_053_183_486_5).abs() < 1e-14);
    }

    #[test]
    fn narrow_packet_flat_odd_weights() {
        let p = PhysicalParams::default();
        let spec = PacketSpec::new(0.5, 1e-9, 1, 21);
        let set = build_schrodinger_coeffs(&spec, &p).unwrap();
        let odd: Vec<f64> =
            set.iter().filter(|(m, _)| m.n % 2 == 1).map(|(_, c)| c.norm()).collect();
        for w in &odd {
            assert!((w - odd[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let p = PhysicalParams::default();
        for spec in [
            PacketSpec::new(0.0, 1e-2, 1, 10),
            PacketSpec::new(1.0, 1e-2, 1, 10),
            PacketSpec::new(0.5, 0.0, 1, 10),
            PacketSpec::new(0.5, 1e-2, 0, 10),
            PacketSpec::new(0.5, 1e-2, 5, 5),
        ] {
            assert!(matches!(
                build_schrodinger_coeffs(&spec, &p),
                Err(Error::InvalidPacket(_))
            ));
        }
    }

    #[test]
    fn degenerate_packets() {
        let p = PhysicalParams::default();
        // Single even mode, packet centred on its node.
        let even_only = ModeSet::new(
            ModelKind::Schrodinger,
            &p,
            vec![describe_mode(2, ModelKind::Schrodinger, &p).unwrap()],
            vec![Complex64::new(sin_pi(2.0 * 0.5), 0.0)],
        );
        assert!(matches!(even_only, Err(Error::DegeneratePacket)));
        assert!(build_schrodinger_coeffs(&PacketSpec::new(0.5, 1e-2, 2, 3), &p).is_ok());
        // Gaussian factor underflows for a very wide packet at high modes.
        let wide = PacketSpec::new(0.5, 0.5, 100, 110);
        let p = PhysicalParams::new(1.0, 1e-4, 1.0).unwrap();
        for kind in ModelKind::ALL {
            assert!(matches!(build_mode_set(kind, &wide, &p), Err(Error::DegeneratePacket)));
        }
    }

    #[test]
    fn dirac_relativistic_coeffs_complex() {
        let p = PhysicalParams::new(1.0, 1.0, 1.0).unwrap();
        let set = build_dirac_coeffs(&PacketSpec::centered(&p, 65, 95), &p, ModelKind::DiracExact)
            .unwrap();
        for (m, c) in set.iter() {
            assert!(m.momentum > 0.0 && m.momentum < 1.0);
            assert!(c.im.abs() > 1e-6, "mode {} has real coefficient {c}", m.n);
        }
        assert!((norm_sq(&set) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dirac_reduces_to_schrodinger() {
        let p = PhysicalParams::new(1.0, 1e-6, 1.0).unwrap();
        let spec = PacketSpec::centered(&p, 1, 20);
        let sch = build_schrodinger_coeffs(&spec, &p).unwrap();
        for kind in [ModelKind::DiracExact, ModelKind::DiracNonRelLimit] {
            let dir = build_dirac_coeffs(&spec, &p, kind).unwrap();
            // Align the global phase on the dominant mode.
            let phase = sch.coeffs()[0] / dir.coeffs()[0];
            let phase = phase / phase.norm();
            let worst = dir
                .coeffs()
                .iter()
                .zip(sch.coeffs())
                .map(|(d, s)| (d * phase - s).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-5, "{kind}: {worst}");
        }
    }

    #[test]
    fn dirac_literal_width_is_narrower_in_k() {
        let p = PhysicalParams::new(1.0, 1e-6, 1.0).unwrap();
        let spec = PacketSpec::centered(&p, 1, 40);
        let projected = build_dirac_coeffs(&spec, &p, ModelKind::DiracExact).unwrap();
        let literal = build_dirac_coeffs(
            &spec.with_dirac_width(DiracWidth::Literal),
            &p,
            ModelKind::DiracExact,
        )
        .unwrap();
        let ratio = |s: &ModeSet| s.coeffs()[38].norm() / s.coeffs()[0].norm();
        let expected = (-0.5 * 1e-4 * PI * PI * (39.0f64.powi(2) - 1.0)).exp();
        assert!((ratio(&projected) / expected - 1.0).abs() < 1e-6);
        assert!((ratio(&literal) / (expected * expected) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn dirac_rejects_non_dirac_kind() {
        let p = PhysicalParams::default();
        let spec = PacketSpec::centered(&p, 1, 10);
        assert!(build_dirac_coeffs(&spec, &p, ModelKind::KleinGordon).is_err());
    }

    #[test]
    fn kg_ratio_two_routes() {
        let p = PhysicalParams::default();
        let set = build_kg_coeffs(&PacketSpec::centered(&p, 1, 50), &p).unwrap();
        // Oracle: term-by-term re-evaluation of the weight formula.
        let weight = |n: f64| {
            let k = n * PI;
            let m = PI / 2.0;
            (-k * k * 1e-4 / 2.0).exp() * (n * PI / 2.0).sin() / (k * k + m * m).sqrt().sqrt()
        };
        let ratio = set.coeffs()[0].norm() / set.coeffs()[2].norm();
        assert!((ratio - (weight(1.0) / weight(3.0)).abs()).abs() < 1e-12);
        assert!((ratio - 1.655_855_579_665_272).abs() < 1e-12);
        assert!(set.coeffs().iter().skip(1).step_by(2).all(|c| c.norm() == 0.0));
    }

    #[test]
    fn kg_heavy_limit_matches_schrodinger_ratios() {
        let p = PhysicalParams::new(1.0, 1.0, 1e-8).unwrap();
        let spec = PacketSpec::centered(&p, 1, 20);
        let kg = build_kg_coeffs(&spec, &p).unwrap();
        let sch = build_schrodinger_coeffs(&spec, &p).unwrap();
        for (a, b) in kg.coeffs().iter().zip(sch.coeffs()) {
            assert!((a - b).norm() < 1e-6);
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let p = PhysicalParams::new(1.0, 1e-2, 1.0).unwrap();
        let spec = PacketSpec::new(0.4, 1e-2, 1, 60);
        for kind in ModelKind::ALL {
            let closed = build_mode_set(kind, &spec, &p).unwrap();
            // A vanishing but nonzero p0 forces the quadrature route.
            let quad = build_mode_set(kind, &spec.with_p0(1e-300), &p).unwrap();
            for (a, b) in closed.coeffs().iter().zip(quad.coeffs()) {
                assert!((a - b).norm() < 1e-9, "{kind}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn moving_packet_has_complex_coeffs() {
        let p = PhysicalParams::default();
        let spec = PacketSpec::new(0.3, 2e-2, 1, 60).with_p0(100.0);
        let set = build_schrodinger_coeffs(&spec, &p).unwrap();
        assert!(set.coeffs().iter().any(|c| c.im.abs() > 1e-3));
        assert!((norm_sq(&set) - 1.0).abs() < 1e-12);
        // Momentum concentrates weight near k ≈ p0.
        assert!((set.mean_mode_index() as f64 - 100.0 / PI).abs() < 3.0);
    }
}
