//! Capacitive (Hartree) coupling between the two singlet-triplet pairs, the
//! exchange-to-capacitive ratio, and exchange crosstalk maps over detuning grids.

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{Detunings, Device};
use crate::error::{Error, Result};
use crate::fermion::{an, cr, one_body_operator, two_body_operator, FockSpace, Operator, DOWN, UP};
use crate::integrals::{Integrals, Tensor4};
use crate::manybody::{eigh, PairState};
use crate::quadrature::Tolerance;
use crate::spin_effective::j_eff_bond;

/// `|alpha0|` below this (meV) leaves the exchange/capacitive ratio undefined.
pub const MIN_ALPHA0: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Orbital indices of the pair.
    pub fn orbitals(self) -> [usize; 2] {
        match self {
            Self::Left => [0, 1],
            Self::Right => [2, 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsolatedQubitSolution {
    pub side: Side,
    /// Lowest singlet over `S(1,1)`, `S(2,0)`, `S(0,2)`.
    pub singlet_amplitudes: Vector3<f64>,
    pub singlet_energy: f64,
    pub triplet_energy: f64,
    /// Spin-summed one-particle density matrices (four-orbital indices).
    pub singlet_density: ChargeDensity,
    pub triplet_density: ChargeDensity,
}

/// Spin-summed one-particle density matrix `D_kl = sum_s <c+_{ks} c_{ls}>`
/// over the four orthogonal orbitals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeDensity(pub Matrix4<f64>);

impl ChargeDensity {
    pub fn electrons(&self) -> f64 {
        self.0.trace()
    }
}

fn pair_space() -> FockSpace {
    FockSpace::new(2, 1, 1)
}

fn pair_state_vectors(space: &FockSpace) -> [nalgebra::DVector<f64>; 4] {
    PairState::ALL.map(|p| {
        let parts: Vec<(f64, Vec<usize>)> = p
            .creation_strings(0, 1)
            .into_iter()
            .map(|(c, ops)| (c, ops.iter().map(|&(k, s)| space.mode(k, s)).collect()))
            .collect();
        space.state_vector(&parts)
    })
}

/// Two electrons on one dot pair, using the four-dot orthogonal orbitals
/// restricted to that pair.
pub fn solve_isolated_dqd(side: Side, ints: &Integrals) -> Result<IsolatedQubitSolution> {
    let orb = side.orbitals();
    let h = DMatrix::from_fn(2, 2, |i, j| ints.one_body.h[(orb[i], orb[j])]);
    let v = &ints.two_body.v;
    let mut op = one_body_operator(&h);
    op.extend(two_body_operator(2, |p, q, r, s| {
        v[[orb[p], orb[q], orb[r], orb[s]]]
    }));

    let space = pair_space();
    let ham = space.matrix(&op);
    let [s11, s20, s02, t11] = pair_state_vectors(&space);
    let basis = DMatrix::from_columns(&[s11, s20, s02]);
    let block = basis.transpose() * &ham * &basis;
    let (energies, vectors) = eigh(&block)?;
    let singlet_amplitudes = Vector3::from_iterator(vectors.column(0).iter().copied());
    let singlet = &basis * vectors.column(0);
    let triplet_energy = t11.dot(&(&ham * &t11));

    Ok(IsolatedQubitSolution {
        side,
        singlet_amplitudes,
        singlet_energy: energies[0],
        triplet_energy,
        singlet_density: pair_density(&space, &singlet, orb),
        triplet_density: pair_density(&space, &t11, orb),
    })
}

fn pair_density(space: &FockSpace, psi: &nalgebra::DVector<f64>, orb: [usize; 2]) -> ChargeDensity {
    let mut d = Matrix4::zeros();
    for k in 0..2 {
        for l in 0..2 {
            let mut op = Operator::default();
            for s in [UP, DOWN] {
                op.push(1.0, vec![cr(space.mode(k, s)), an(space.mode(l, s))]);
            }
            d[(orb[k], orb[l])] = psi.dot(&(space.matrix(&op) * psi));
        }
    }
    ChargeDensity(d)
}

/// Hartree energy `sum D^L_kl D^R_mn <k m|V|l n>` between two pair densities.
pub fn cross_coulomb_energy(left: &ChargeDensity, right: &ChargeDensity, v: &Tensor4) -> f64 {
    let mut e = 0.0;
    for k in 0..4 {
        for l in 0..4 {
            let dl = left.0[(k, l)];
            if dl == 0.0 {
                continue;
            }
            for m in 0..4 {
                for n in 0..4 {
                    e += dl * right.0[(m, n)] * v[[k, m, l, n]];
                }
            }
        }
    }
    e
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacitiveParams {
    pub alpha0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_l: f64,
    pub eps_r: f64,
}

/// Coefficients of `-beta1 sz(x)1 - beta2 1(x)sz + alpha0 sz(x)sz` (with
/// `sz|S> = +|S>`) reproducing the four cross energies.
pub fn capacitive_from_energies(v_ss: f64, v_st: f64, v_ts: f64, v_tt: f64) -> (f64, f64, f64) {
    (
        (v_ss + v_tt - v_st - v_ts) / 4.0,
        (v_ts + v_tt - v_ss - v_st) / 4.0,
        (v_st + v_tt - v_ss - v_ts) / 4.0,
    )
}

pub fn capacitive_params_from_integrals(
    ints: &Integrals,
    at: Detunings,
) -> Result<CapacitiveParams> {
    let l = solve_isolated_dqd(Side::Left, ints)?;
    let r = solve_isolated_dqd(Side::Right, ints)?;
    let v = &ints.two_body.v;
    let e = |a: &ChargeDensity, b: &ChargeDensity| cross_coulomb_energy(a, b, v);
    let (alpha0, beta1, beta2) = capacitive_from_energies(
        e(&l.singlet_density, &r.singlet_density),
        e(&l.singlet_density, &r.triplet_density),
        e(&l.triplet_density, &r.singlet_density),
        e(&l.triplet_density, &r.triplet_density),
    );
    Ok(CapacitiveParams {
        alpha0,
        beta1,
        beta2,
        eps_l: at.eps_l,
        eps_r: at.eps_r,
    })
}

pub fn capacitive_params(
    at: Detunings,
    device: &Device,
    tol: Tolerance,
) -> Result<CapacitiveParams> {
    let d = device.with_detunings(at);
    capacitive_params_from_integrals(&Integrals::compute(&d, tol)?, at)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingPoint {
    pub j23: f64,
    pub alpha0: f64,
    pub chi: f64,
}

/// `J^eff_23 / alpha0` for already computed integrals.
pub fn chi_from_integrals(ints: &Integrals, at: Detunings) -> Result<CouplingPoint> {
    let cap = capacitive_params_from_integrals(ints, at)?;
    let j23 = j_eff_bond(1, &ints.hubbard())?;
    if cap.alpha0.abs() < MIN_ALPHA0 {
        return Err(Error::UndefinedRatio { alpha0: cap.alpha0 });
    }
    Ok(CouplingPoint {
        j23,
        alpha0: cap.alpha0,
        chi: j23 / cap.alpha0,
    })
}

pub fn chi_ratio(eps_l: f64, device: &Device, tol: Tolerance) -> Result<CouplingPoint> {
    let at = Detunings { eps_l, eps_r: 0.0 };
    chi_from_integrals(&Integrals::compute(&device.with_detunings(at), tol)?, at)
}

/// `steps` values centred on `center`, symmetric about it by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(crate::error::invalid(
                "steps",
                format!("need at least 2, got {steps}"),
            ));
        }
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(crate::error::invalid(
                "axis",
                format!("need finite min < max, got [{min}, {max}]"),
            ));
        }
        Ok(Self { min, max, steps })
    }

    pub fn value(&self, k: usize) -> f64 {
        let n = (self.steps - 1) as f64;
        let c = 0.5 * (self.min + self.max);
        let h = 0.5 * (self.max - self.min);
        c + h * (2.0 * k as f64 - n) / n
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.value(k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkCell {
    pub eps_l: f64,
    pub eps_r: f64,
    /// `None` where the perturbative formula hits a resonance.
    pub j12: Option<f64>,
    pub j34: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkMap {
    pub eps_l: Axis,
    pub eps_r: Axis,
    /// Row-major, `eps_l` outer.
    pub cells: Vec<CrosstalkCell>,
}

impl CrosstalkMap {
    pub fn cell(&self, i: usize, j: usize) -> &CrosstalkCell {
        &self.cells[i * self.eps_r.steps + j]
    }

    pub fn masked(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| c.j12.is_none() || c.j34.is_none())
            .count()
    }

    /// Largest `|J12(eps_l, eps_r) - J34(-eps_r, -eps_l)|` over cells whose
    /// mirror partner lies on the grid; `None` if no cell has one.
    pub fn mirror_defect(&self) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for (i, el) in self.eps_l.values().into_iter().enumerate() {
            for (j, er) in self.eps_r.values().into_iter().enumerate() {
                let partner = self.cells.iter().find(|c| c.eps_l == -er && c.eps_r == -el);
                if let (Some(p), Some(a)) = (partner, self.cell(i, j).j12) {
                    if let Some(b) = p.j34 {
                        worst = Some(worst.unwrap_or(0.0).max((a - b).abs()));
                    }
                }
            }
        }
        worst
    }
}

fn crosstalk_cell(device: &Device, at: Detunings, tol: Tolerance) -> Result<CrosstalkCell> {
    let p = Integrals::compute(&device.with_detunings(at), tol)?.hubbard();
    let masked = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Resonance { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(CrosstalkCell {
        eps_l: at.eps_l,
        eps_r: at.eps_r,
        j12: masked(j_eff_bond(0, &p))?,
        j34: masked(j_eff_bond(2, &p))?,
    })
}

/// `J^eff_12` and `J^eff_34` over an `eps_l x eps_r` grid. Cells are computed
/// in parallel on the current rayon pool; resonances are masked, any other
/// failure aborts the map.
pub fn crosstalk_map(
    eps_l: Axis,
    eps_r: Axis,
    device: &Device,
    tol: Tolerance,
) -> Result<CrosstalkMap> {
    let points: Vec<Detunings> = eps_l
        .values()
        .into_iter()
        .flat_map(|l| {
            eps_r
                .values()
                .into_iter()
                .map(move |r| Detunings { eps_l: l, eps_r: r })
        })
        .collect();
    let cells = points
        .par_iter()
        .map(|&at| crosstalk_cell(device, at, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(CrosstalkMap {
        eps_l,
        eps_r,
        cells,
    })
}

/// `max_{eps_r} |J12(eps_l*, eps_r) - J12(eps_l*, 0)| / J12(eps_l*, 0)` with
/// every `eps_r` of the axis. The axis must contain 0 (odd step count
/// symmetric about 0).
pub fn crosstalk_metric(eps_l: f64, eps_r: Axis, device: &Device, tol: Tolerance) -> Result<f64> {
    let j = |er: f64| -> Result<f64> {
        let at = Detunings { eps_l, eps_r: er };
        j_eff_bond(
            0,
            &Integrals::compute(&device.with_detunings(at), tol)?.hubbard(),
        )
    };
    let values = eps_r.values();
    let reference = j(0.0)?;
    let others = values
        .par_iter()
        .map(|&er| j(er))
        .collect::<Result<Vec<_>>>()?;
    Ok(others
        .iter()
        .map(|v| ((v - reference) / reference).abs())
        .fold(0.0, f64::max))
}

/// Singlet-block Hamiltonian `[[S11], [S20], [S02]]` of a pair in the
/// Hubbard form, for a quick two-site check.
pub fn pair_singlet_block(eps: [f64; 2], t: f64, u: [f64; 2], unn: f64) -> Matrix3<f64> {
    let s = std::f64::consts::SQRT_2 * t;
    Matrix3::new(
        eps[0] + eps[1] + unn,
        s,
        s,
        s,
        2.0 * eps[0] + u[0],
        0.0,
        s,
        0.0,
        2.0 * eps[1] + u[1],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{DeviceGeometry, MaterialParams};
    use crate::integrals::HubbardParams;
    use crate::orbitals::gaussian_overlap;
    use crate::quadrature::integrate_1d;
    use std::f64::consts::PI;

    fn ints(r: f64, at: Detunings) -> Integrals {
        Integrals::compute(&Device::gaas_default(r, at).unwrap(), Tolerance::default()).unwrap()
    }

    fn hubbard_integrals(p: &HubbardParams) -> Integrals {
        let mut i = ints(150.0, Detunings::default());
        let (one, two) = p.to_integrals();
        i.one_body = one;
        i.two_body = two;
        i
    }

    #[test]
    fn singlet_block_matches_hubbard_pair() {
        let p = HubbardParams {
            eps: [0.3, -0.2, 0.0, 0.0],
            t: [-0.4, 0.0, 0.0],
            u: [5.0, 4.5, 5.0, 5.0],
            unn: [1.1, 0.0, 0.0],
            ..Default::default()
        };
        let sol = solve_isolated_dqd(Side::Left, &hubbard_integrals(&p)).unwrap();
        let block = pair_singlet_block([0.3, -0.2], -0.4, [5.0, 4.5], 1.1);
        let e = block.symmetric_eigenvalues().min();
        assert!((sol.singlet_energy - e).abs() < 1e-13);
        assert!((sol.triplet_energy - (0.3 - 0.2 + 1.1)).abs() < 1e-13);
        assert!((sol.singlet_amplitudes.norm() - 1.0).abs() < 1e-14);
        assert!((sol.singlet_density.electrons() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn zero_tunneling_selects_lowest_configuration() {
        let p = HubbardParams {
            eps: [-3.0, 0.0, 0.0, 0.0],
            u: [2.0, 2.0, 2.0, 2.0],
            unn: [1.5, 0.0, 0.0],
            ..Default::default()
        };
        let sol = solve_isolated_dqd(Side::Left, &hubbard_integrals(&p)).unwrap();
        // S11: -3 + 1.5, S20: -6 + 2, S02: 2
        assert_eq!(sol.singlet_amplitudes, Vector3::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn negative_detuning_favours_double_occupancy() {
        let sol = solve_isolated_dqd(
            Side::Left,
            &ints(
                58.0,
                Detunings {
                    eps_l: -12.0,
                    eps_r: 0.0,
                },
            ),
        )
        .unwrap();
        assert!(
            sol.singlet_amplitudes[1].powi(2) > 0.9,
            "{:?}",
            sol.singlet_amplitudes
        );
        let mild = solve_isolated_dqd(Side::Left, &ints(58.0, Detunings::default())).unwrap();
        assert!(mild.singlet_amplitudes[0].powi(2) > 0.9);
    }

    #[test]
    fn triplet_insensitive_to_detuning() {
        // eps_1 + eps_2 is fixed by the symmetric split, so the triplet level
        // moves only through the weak detuning dependence of the orbitals.
        let a = solve_isolated_dqd(Side::Left, &ints(150.0, Detunings::default())).unwrap();
        for el in [-2.0, 2.0] {
            let b = solve_isolated_dqd(
                Side::Left,
                &ints(
                    150.0,
                    Detunings {
                        eps_l: el,
                        eps_r: 0.0,
                    },
                ),
            )
            .unwrap();
            assert!((a.triplet_energy - b.triplet_energy).abs() < 0.02 * el.abs());
        }
    }

    // Density-density Coulomb from the primitive expansion and the Gaussian
    // transform of 1/r, evaluated by 1D quadrature.
    fn cross_energy_oracle(ints: &Integrals, l: &ChargeDensity, r: &ChargeDensity, cs: f64) -> f64 {
        let c = &ints.basis.coeffs;
        let prims = &ints.basis.primitives;
        let a = prims[0].radius;
        let kernel = |d: f64| {
            let f = |v: f64| {
                if v >= 1.0 {
                    return 0.0;
                }
                let u = v / (1.0 - v);
                let s = 1.0 + 2.0 * a * a * u * u;
                (-u * u * d * d / s).exp() / s / (1.0 - v).powi(2)
            };
            2.0 / PI.sqrt()
                * integrate_1d(
                    f,
                    &[0.0, 0.5, 0.9, 0.99, 1.0],
                    Tolerance::default().with_rel(1e-12),
                )
                .unwrap()
                .value
        };
        // density in primitive pairs: rho = sum_ij P_ij phi_i phi_j
        let to_prim = |d: &ChargeDensity| c.transpose() * d.0 * c;
        let (pl, pr) = (to_prim(l), to_prim(r));
        let mut e = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for m in 0..4 {
                        let (pi, pj, pk, pm) = (&prims[i], &prims[j], &prims[k], &prims[m]);
                        let w = pl[(i, j)]
                            * pr[(k, m)]
                            * gaussian_overlap((pi.center - pj.center).norm(), a)
                            * gaussian_overlap((pk.center - pm.center).norm(), a);
                        let d = ((pi.center.coords + pj.center.coords)
                            - (pk.center.coords + pm.center.coords))
                            .norm()
                            * 0.5;
                        e += w * kernel(d);
                    }
                }
            }
        }
        cs * e
    }

    #[test]
    fn cross_energy_matches_quadrature_oracle() {
        let dev = Device::gaas_default(
            50.0,
            Detunings {
                eps_l: -2.0,
                eps_r: 0.5,
            },
        )
        .unwrap();
        let i = Integrals::compute(&dev, Tolerance::default()).unwrap();
        let l = solve_isolated_dqd(Side::Left, &i).unwrap();
        let r = solve_isolated_dqd(Side::Right, &i).unwrap();
        for (a, b) in [
            (&l.singlet_density, &r.singlet_density),
            (&l.triplet_density, &r.singlet_density),
        ] {
            let got = cross_coulomb_energy(a, b, &i.two_body.v);
            let want = cross_energy_oracle(&i, a, b, dev.material.coulomb_scale());
            assert!(((got - want) / want).abs() < 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn cross_energy_point_charge_limit() {
        let g = DeviceGeometry::new(22.0, 3000.0, [0.0; 4], 5.0).unwrap();
        let dev = Device::new(MaterialParams::gaas(), g).unwrap();
        let i = Integrals::compute(&dev, Tolerance::default()).unwrap();
        let l = solve_isolated_dqd(Side::Left, &i).unwrap();
        let r = solve_isolated_dqd(Side::Right, &i).unwrap();
        let e = cross_coulomb_energy(&l.triplet_density, &r.triplet_density, &i.two_body.v);
        let point = 4.0 * dev.material.coulomb_scale() / 6000.0;
        assert!(((e - point) / point).abs() < 1e-3, "{e} vs {point}");
    }

    #[test]
    fn closer_charge_costs_more() {
        let i = ints(58.0, Detunings::default());
        let right = solve_isolated_dqd(Side::Right, &i).unwrap().triplet_density;
        let far = ChargeDensity(Matrix4::from_diagonal(&nalgebra::Vector4::new(
            2.0, 0.0, 0.0, 0.0,
        )));
        let near = ChargeDensity(Matrix4::from_diagonal(&nalgebra::Vector4::new(
            0.0, 2.0, 0.0, 0.0,
        )));
        assert!(
            cross_coulomb_energy(&near, &right, &i.two_body.v)
                > cross_coulomb_energy(&far, &right, &i.two_body.v)
        );
    }

    #[test]
    fn equal_energies_give_no_coupling() {
        assert_eq!(
            capacitive_from_energies(1.5, 1.5, 1.5, 1.5),
            (0.0, 0.0, 0.0)
        );
        // Round trip through the Ising form.
        let (a, b1, b2) = (0.3, -0.1, 0.05);
        let energy = |zl: f64, zr: f64| 7.0 - b1 * zl - b2 * zr + a * zl * zr;
        let got = capacitive_from_energies(
            energy(1.0, 1.0),
            energy(1.0, -1.0),
            energy(-1.0, 1.0),
            energy(-1.0, -1.0),
        );
        assert!(
            (got.0 - a).abs() < 1e-15 && (got.1 - b1).abs() < 1e-15 && (got.2 - b2).abs() < 1e-15
        );
    }

    #[test]
    fn capacitive_mirror_relation() {
        let dev = Device::gaas_default(50.0, Detunings::default()).unwrap();
        let tol = Tolerance::default();
        let a = capacitive_params(
            Detunings {
                eps_l: -1.5,
                eps_r: 0.5,
            },
            &dev,
            tol,
        )
        .unwrap();
        let b = capacitive_params(
            Detunings {
                eps_l: -0.5,
                eps_r: 1.5,
            },
            &dev,
            tol,
        )
        .unwrap();
        assert!((a.beta1 - b.beta2).abs() < 1e-9);
        assert!((a.alpha0 - b.alpha0).abs() < 1e-9);
    }

    #[test]
    fn chi_uniform_offset_invariance() {
        let dev = Device::gaas_default(55.0, Detunings::default()).unwrap();
        let tol = Tolerance::default();
        let base = chi_ratio(1.0, &dev, tol).unwrap();
        let g = dev
            .with_detunings(Detunings {
                eps_l: 1.0,
                eps_r: 0.0,
            })
            .geometry
            .shifted(0.37);
        let shifted = Device::new(dev.material, g).unwrap();
        let at = Detunings {
            eps_l: 1.0,
            eps_r: 0.0,
        };
        let other = chi_from_integrals(&Integrals::compute(&shifted, tol).unwrap(), at).unwrap();
        assert!(
            ((base.chi - other.chi) / base.chi).abs() < 1e-8,
            "{} vs {}",
            base.chi,
            other.chi
        );
    }

    #[test]
    fn undefined_ratio_when_alpha_vanishes() {
        let p = HubbardParams {
            t: [0.0, -0.1, 0.0],
            u: [5.0; 4],
            ..Default::default()
        };
        let i = hubbard_integrals(&p);
        assert!(matches!(
            chi_from_integrals(&i, Detunings::default()),
            Err(Error::UndefinedRatio { .. })
        ));
    }

    #[test]
    fn axis_values_are_mirror_exact() {
        let ax = Axis::new(-3.0, 3.0, 7).unwrap();
        let v = ax.values();
        for k in 0..7 {
            assert_eq!(v[k], -v[6 - k]);
        }
        assert_eq!(v[3], 0.0);
        assert!(Axis::new(1.0, 1.0, 3).is_err());
        assert!(Axis::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn crosstalk_mirror_identity_small_grid() {
        let dev = Device::gaas_default(44.0, Detunings::default()).unwrap();
        let ax = Axis::new(-2.0, 2.0, 3).unwrap();
        let map = crosstalk_map(ax, ax, &dev, Tolerance::default()).unwrap();
        assert_eq!(map.cells.len(), 9);
        assert_eq!(map.masked(), 0);
        assert!(
            map.mirror_defect().unwrap() < 1e-9,
            "{:?}",
            map.mirror_defect()
        );
    }
}
