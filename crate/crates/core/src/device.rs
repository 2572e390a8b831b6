//! Device geometry, material constants and the confinement potential.
//!
//! Units are meV for energies and nm for lengths everywhere in the crate.

use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `hbar^2 / m_e` in meV nm^2 (CODATA 2018).
pub const HBAR2_OVER_ME: f64 = 76.199_642_28;
/// `e^2 / (4 pi eps_0)` in meV nm.
pub const COULOMB_VACUUM: f64 = 1_439.964_547;

pub type Position = Point2<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    effective_mass_ratio: f64,
    relative_permittivity: f64,
    coulomb_scale: f64,
}

impl MaterialParams {
    pub fn new(effective_mass_ratio: f64, relative_permittivity: f64) -> Result<Self> {
        if !(effective_mass_ratio.is_finite() && effective_mass_ratio > 0.0) {
            return Err(invalid(
                "effective_mass_ratio",
                format!("must be strictly positive, got {effective_mass_ratio}"),
            ));
        }
        if !(relative_permittivity.is_finite() && relative_permittivity > 0.0) {
            return Err(invalid(
                "relative_permittivity",
                format!("must be strictly positive, got {relative_permittivity}"),
            ));
        }
        Ok(Self {
            effective_mass_ratio,
            relative_permittivity,
            coulomb_scale: COULOMB_VACUUM / relative_permittivity,
        })
    }

    /// GaAs: `m*/m_e = 0.067`, `eps_r = 12.9`.
    pub fn gaas() -> Self {
        Self::new(0.067, 12.9).expect("GaAs constants are valid")
    }

    pub fn effective_mass_ratio(&self) -> f64 {
        self.effective_mass_ratio
    }

    pub fn relative_permittivity(&self) -> f64 {
        self.relative_permittivity
    }

    /// `e^2 / (4 pi eps_0 eps_r)` in meV nm.
    pub fn coulomb_scale(&self) -> f64 {
        self.coulomb_scale
    }

    /// `hbar^2 / m*` in meV nm^2.
    pub fn hbar2_over_mass(&self) -> f64 {
        HBAR2_OVER_ME / self.effective_mass_ratio
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self::gaas()
    }
}

/// Layout of the four dots and their confinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceGeometry {
    /// Half the intra-qubit dot spacing.
    pub a: f64,
    /// Half the inter-qubit spacing.
    pub r: f64,
    /// Per-dot energy offsets.
    pub epsilon: [f64; 4],
    pub hbar_omega0: f64,
}

impl DeviceGeometry {
    pub fn new(a: f64, r: f64, epsilon: [f64; 4], hbar_omega0: f64) -> Result<Self> {
        let g = Self {
            a,
            r,
            epsilon,
            hbar_omega0,
        };
        g.validate()?;
        Ok(g)
    }

    /// `hbar omega0 = 5 meV`, `a = 22 nm`, zero offsets, at the given `R`.
    pub fn with_defaults(r: f64) -> Result<Self> {
        Self::new(22.0, r, [0.0; 4], 5.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(invalid("a", format!("must satisfy a > 0, got {}", self.a)));
        }
        if !(self.r.is_finite() && self.r > self.a) {
            return Err(invalid(
                "R",
                format!("must satisfy R > a (= {}), got {}", self.a, self.r),
            ));
        }
        if !(self.hbar_omega0.is_finite() && self.hbar_omega0 > 0.0) {
            return Err(invalid(
                "hbar_omega0",
                format!("must be strictly positive, got {}", self.hbar_omega0),
            ));
        }
        if let Some(e) = self.epsilon.iter().find(|e| !e.is_finite()) {
            return Err(invalid(
                "epsilon",
                format!("offsets must be finite, got {e}"),
            ));
        }
        Ok(())
    }

    pub fn detunings(&self) -> Detunings {
        Detunings {
            eps_l: self.epsilon[0] - self.epsilon[1],
            eps_r: self.epsilon[2] - self.epsilon[3],
        }
    }

    /// Mirror image under `x -> -x`: offsets are reversed.
    pub fn mirrored(&self) -> Self {
        let e = self.epsilon;
        Self {
            epsilon: [e[3], e[2], e[1], e[0]],
            ..*self
        }
    }

    /// Same geometry with every offset shifted by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            epsilon: self.epsilon.map(|e| e + c),
            ..*self
        }
    }
}

/// Qubit detunings `eps_L = e1 - e2` and `eps_R = e3 - e4`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Detunings {
    pub eps_l: f64,
    pub eps_r: f64,
}

/// Full device description consumed by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub material: MaterialParams,
    pub geometry: DeviceGeometry,
}

impl Device {
    pub fn new(material: MaterialParams, geometry: DeviceGeometry) -> Result<Self> {
        geometry.validate()?;
        Ok(Self { material, geometry })
    }

    /// GaAs device with `hbar omega0 = 5 meV`, `a = 22 nm` at the given `R` and detunings.
    pub fn gaas_default(r: f64, detunings: Detunings) -> Result<Self> {
        let g = set_detunings(&DeviceGeometry::with_defaults(r)?, detunings);
        Self::new(MaterialParams::gaas(), g)
    }

    pub fn fock_darwin_radius(&self) -> f64 {
        fock_darwin_radius(&self.material, self.geometry.hbar_omega0)
    }

    pub fn with_geometry(&self, geometry: DeviceGeometry) -> Result<Self> {
        Self::new(self.material, geometry)
    }

    pub fn with_detunings(&self, d: Detunings) -> Self {
        Self {
            geometry: set_detunings(&self.geometry, d),
            ..*self
        }
    }

    pub fn mirrored(&self) -> Self {
        Self {
            geometry: self.geometry.mirrored(),
            ..*self
        }
    }
}

/// Dot centres, left to right, on the x axis.
pub fn dot_centers(g: &DeviceGeometry) -> [Position; 4] {
    let (a, r) = (g.a, g.r);
    [
        Position::new(-r - a, 0.0),
        Position::new(-r + a, 0.0),
        Position::new(r - a, 0.0),
        Position::new(r + a, 0.0),
    ]
}

/// Curvature prefactor `m* omega0^2 / 2` in meV / nm^2.
pub fn confinement_stiffness(m: &MaterialParams, hbar_omega0: f64) -> f64 {
    let a_b = fock_darwin_radius(m, hbar_omega0);
    0.5 * hbar_omega0 / (a_b * a_b)
}

/// Value of the single-well paraboloid `v_i` at `r`.
pub fn well_potential(i: usize, r: &Position, g: &DeviceGeometry, m: &MaterialParams) -> f64 {
    let k = confinement_stiffness(m, g.hbar_omega0);
    k * (r - dot_centers(g)[i]).norm_squared() + g.epsilon[i]
}

/// Minimum over the four dot paraboloids.
pub fn potential_at(r: &Position, g: &DeviceGeometry, m: &MaterialParams) -> f64 {
    let k = confinement_stiffness(m, g.hbar_omega0);
    dot_centers(g)
        .iter()
        .zip(g.epsilon)
        .map(|(c, e)| k * (r - c).norm_squared() + e)
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric split: `e1 = +eps_L/2`, `e2 = -eps_L/2`, `e3 = +eps_R/2`, `e4 = -eps_R/2`.
pub fn set_detunings(g: &DeviceGeometry, d: Detunings) -> DeviceGeometry {
    DeviceGeometry {
        epsilon: [0.5 * d.eps_l, -0.5 * d.eps_l, 0.5 * d.eps_r, -0.5 * d.eps_r],
        ..*g
    }
}

/// `a_B = hbar / sqrt(m* hbar omega0)` in nm.
pub fn fock_darwin_radius(m: &MaterialParams, hbar_omega0: f64) -> f64 {
    (m.hbar2_over_mass() / hbar_omega0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn geometry(a: f64, r: f64) -> DeviceGeometry {
        DeviceGeometry::new(a, r, [0.0; 4], 5.0).unwrap()
    }

    #[test]
    fn centers_at_default_spacing() {
        let c = dot_centers(&geometry(22.0, 58.0));
        let xs: Vec<f64> = c.iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![-80.0, -36.0, 36.0, 80.0]);
        assert!(c.iter().all(|p| p.y == 0.0));

        let c = dot_centers(&geometry(22.0, 150.0));
        let xs: Vec<f64> = c.iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![-172.0, -128.0, 128.0, 172.0]);
    }

    #[test]
    fn centers_mirror_pairwise() {
        let c = dot_centers(&geometry(17.0, 41.0));
        for i in 0..4 {
            assert_eq!(c[i].x, -c[3 - i].x);
        }
    }

    #[test]
    fn potential_vertex_values() {
        let m = MaterialParams::gaas();
        let g = geometry(22.0, 58.0);
        let c = dot_centers(&g);
        assert_eq!(potential_at(&c[0], &g, &m), 0.0);

        let g = DeviceGeometry::new(22.0, 300.0, [-2.0, 0.0, 0.0, 0.0], 5.0).unwrap();
        let c = dot_centers(&g);
        assert_relative_eq!(potential_at(&c[0], &g, &m), -2.0);
    }

    #[test]
    fn potential_at_interdot_midpoint() {
        let m = MaterialParams::gaas();
        let g = geometry(22.0, 58.0);
        let c = dot_centers(&g);
        let mid = Position::from((c[0].coords + c[1].coords) * 0.5);
        let v1 = well_potential(0, &mid, &g, &m);
        let v2 = well_potential(1, &mid, &g, &m);
        assert_relative_eq!(v1, v2, max_relative = 1e-14);
        // (hbar w0 / 2) (a / a_B)^2
        let a_b = fock_darwin_radius(&m, 5.0);
        let expected = 2.5 * (22.0 / a_b).powi(2);
        assert_relative_eq!(potential_at(&mid, &g, &m), expected, max_relative = 1e-12);
        assert_relative_eq!(expected, 5.3215, max_relative = 1e-3);
    }

    #[test]
    fn detuning_split_and_readback() {
        let g = geometry(22.0, 58.0);
        let d = set_detunings(
            &g,
            Detunings {
                eps_l: -2.0,
                eps_r: 0.0,
            },
        );
        assert_eq!(d.epsilon, [-1.0, 1.0, 0.0, 0.0]);
        let d = set_detunings(&g, Detunings::default());
        assert_eq!(d.epsilon, [0.0; 4]);
        let d = set_detunings(
            &g,
            Detunings {
                eps_l: 2.4,
                eps_r: -0.3,
            },
        );
        assert_eq!(
            d.detunings(),
            Detunings {
                eps_l: 2.4,
                eps_r: -0.3
            }
        );
    }

    #[test]
    fn fock_darwin_radius_gaas() {
        // Independent arithmetic: hbar c = 197.3269804 eV nm, m_e c^2 = 510998.95 eV.
        let hbar2_over_me = 197.326_980_4_f64.powi(2) / 510_998.95 * 1e3;
        let expected = (hbar2_over_me / (0.067 * 5.0)).sqrt();
        let m = MaterialParams::gaas();
        assert_relative_eq!(fock_darwin_radius(&m, 5.0), expected, max_relative = 1e-8);
        assert!((fock_darwin_radius(&m, 5.0) - 15.1).abs() < 0.05);
    }

    #[test]
    fn fock_darwin_radius_scaling() {
        let m = MaterialParams::gaas();
        let heavy = MaterialParams::new(4.0 * 0.067, 12.9).unwrap();
        let base = fock_darwin_radius(&m, 5.0);
        assert_relative_eq!(
            fock_darwin_radius(&heavy, 5.0),
            0.5 * base,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            fock_darwin_radius(&m, 20.0),
            0.5 * base,
            max_relative = 1e-14
        );
    }

    #[test]
    fn coulomb_scale_tracks_permittivity() {
        let m = MaterialParams::new(0.067, 12.9).unwrap();
        assert_relative_eq!(
            m.coulomb_scale() * 12.9,
            COULOMB_VACUUM,
            max_relative = 1e-12
        );
        assert_relative_eq!(m.coulomb_scale(), 1439.964 / 12.9, max_relative = 1e-6);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(MaterialParams::new(0.0, 12.9).is_err());
        assert!(MaterialParams::new(0.067, -1.0).is_err());
        assert!(DeviceGeometry::new(-1.0, 50.0, [0.0; 4], 5.0).is_err());
        assert!(DeviceGeometry::new(22.0, 20.0, [0.0; 4], 5.0).is_err());
        assert!(DeviceGeometry::new(22.0, 50.0, [0.0; 4], 0.0).is_err());
        assert!(DeviceGeometry::new(22.0, 50.0, [f64::NAN, 0.0, 0.0, 0.0], 5.0).is_err());
    }

    #[test]
    fn dimensional_round_trip() {
        // Lengths scale by lambda, masses by 1/lambda^2, energies fixed.
        for lambda in [0.5, 1.0, 3.0, 10.0] {
            let m = MaterialParams::new(0.067 / (lambda * lambda), 12.9).unwrap();
            let a_b = fock_darwin_radius(&m, 5.0);
            let invariant = a_b * (m.effective_mass_ratio() * 5.0 / HBAR2_OVER_ME).sqrt();
            assert_relative_eq!(invariant, 1.0, max_relative = 1e-14);
            assert_relative_eq!(
                a_b,
                lambda * fock_darwin_radius(&MaterialParams::gaas(), 5.0),
                max_relative = 1e-13
            );
        }
    }

    proptest! {
        #[test]
        fn potential_mirror_invariant(
            x in -200.0..200.0f64, y in -60.0..60.0f64,
            e in proptest::array::uniform4(-3.0..3.0f64),
            a in 10.0..30.0f64, extra in 1.0..100.0f64,
        ) {
            let m = MaterialParams::gaas();
            let g = DeviceGeometry::new(a, a + extra, e, 5.0).unwrap();
            let p = Position::new(x, y);
            let q = Position::new(-x, y);
            let lhs = potential_at(&p, &g, &m);
            let rhs = potential_at(&q, &g.mirrored(), &m);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn potential_is_lower_envelope(
            x in -200.0..200.0f64, y in -60.0..60.0f64,
            e in proptest::array::uniform4(-3.0..3.0f64),
        ) {
            let m = MaterialParams::gaas();
            let g = DeviceGeometry::new(22.0, 49.0, e, 5.0).unwrap();
            let p = Position::new(x, y);
            let v = potential_at(&p, &g, &m);
            for i in 0..4 {
                prop_assert!(v <= well_potential(i, &p, &g, &m));
            }
        }
    }
}
