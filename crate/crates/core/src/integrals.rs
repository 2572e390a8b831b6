//! One- and two-body matrix elements over the Hund-Mulliken orbitals and the
//! Hubbard coefficient set extracted from them.
//!
//! Two-body elements use the ordering `V[p][q][r][s] = <p(1) q(2)| e^2/r12 |r(1) s(2)>`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{confinement_stiffness, dot_centers, potential_at, Device, Position};
use crate::error::Result;
use crate::orbitals::{gaussian_overlap, OrthogonalBasis, PrimitiveOrbital};
use crate::quadrature::{integrate_2d, Estimate, Tolerance};
use crate::special::bessel_i0e;

/// Integration window beyond the outer dot centres, in units of `a_B`.
pub const WINDOW_RADII: f64 = 7.0;

/// Dense rank-4 tensor over the four orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4(Box<[f64; 256]>);

impl Tensor4 {
    pub fn zeros() -> Self {
        Self(Box::new([0.0; 256]))
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros();
        for (n, v) in t.0.iter_mut().enumerate() {
            *v = f(n >> 6, (n >> 4) & 3, (n >> 2) & 3, n & 3);
        }
        t
    }

    pub fn iter(&self) -> impl Iterator<Item = ([usize; 4], f64)> + '_ {
        self.0
            .iter()
            .enumerate()
            .map(|(n, &v)| ([n >> 6, (n >> 4) & 3, (n >> 2) & 3, n & 3], v))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Contract every index with `c`: `W_pqrs = sum C_pa C_qb C_rc C_sd V_abcd`.
    pub fn transformed(&self, c: &Matrix4<f64>) -> Self {
        let mut cur = self.clone();
        for slot in 0..4 {
            let shift = 6 - 2 * slot;
            let mut next = Self::zeros();
            for n in 0..256 {
                let base = n & !(3 << shift);
                let i = (n >> shift) & 3;
                next.0[n] = (0..4).map(|a| c[(i, a)] * cur.0[base | (a << shift)]).sum();
            }
            cur = next;
        }
        cur
    }
}

impl Index<[usize; 4]> for Tensor4 {
    type Output = f64;
    fn index(&self, [p, q, r, s]: [usize; 4]) -> &f64 {
        &self.0[(p << 6) | (q << 4) | (r << 2) | s]
    }
}

impl IndexMut<[usize; 4]> for Tensor4 {
    fn index_mut(&mut self, [p, q, r, s]: [usize; 4]) -> &mut f64 {
        &mut self.0[(p << 6) | (q << 4) | (r << 2) | s]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneBodyIntegrals {
    pub h: Matrix4<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyIntegrals {
    pub v: Tensor4,
}

/// Kinetic element between equal-width primitives:
/// `(hbar w0 / 2) (1 - d^2 / 4 a_B^2) O_pq`.
pub fn kinetic_primitive(p: &PrimitiveOrbital, q: &PrimitiveOrbital, hbar_omega0: f64) -> f64 {
    let a_b = p.radius;
    let d2 = (p.center - q.center).norm_squared();
    0.5 * hbar_omega0 * (1.0 - d2 / (4.0 * a_b * a_b)) * gaussian_overlap(d2.sqrt(), a_b)
}

/// Abscissae where two of the paraboloids `v_i` cross. All dots sit on the x
/// axis with a common curvature, so every crossing is a vertical line.
pub fn potential_kinks(device: &Device) -> Vec<f64> {
    let g = &device.geometry;
    let k = confinement_stiffness(&device.material, g.hbar_omega0);
    let xs = dot_centers(g).map(|c| c.x);
    let mut kinks = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let num = k * (xs[i] * xs[i] - xs[j] * xs[j]) + g.epsilon[i] - g.epsilon[j];
            kinks.push(num / (2.0 * k * (xs[i] - xs[j])));
        }
    }
    kinks.sort_by(f64::total_cmp);
    kinks.dedup();
    kinks
}

fn window(device: &Device) -> (Vec<f64>, Vec<f64>) {
    let a_b = device.fock_darwin_radius();
    let w = WINDOW_RADII * a_b;
    let xs = dot_centers(&device.geometry).map(|c| c.x);
    let (lo, hi) = (xs[0] - w, xs[3] + w);
    let mut xb = vec![lo];
    xb.extend(
        potential_kinks(device)
            .into_iter()
            .filter(|&x| x > lo && x < hi),
    );
    xb.push(hi);
    (xb, vec![-w, 0.0, w])
}

/// `<phi_p|V|phi_q>` for the min-of-paraboloids potential, by adaptive 2D
/// quadrature with the potential's kink lines as initial cuts.
pub fn potential_primitive(
    p: &PrimitiveOrbital,
    q: &PrimitiveOrbital,
    device: &Device,
    tol: Tolerance,
) -> Result<Estimate> {
    let (xb, yb) = window(device);
    let g = &device.geometry;
    let m = &device.material;
    integrate_2d(
        |x, y| {
            let r = Position::new(x, y);
            p.value(&r) * q.value(&r) * potential_at(&r, g, m)
        },
        &xb,
        &yb,
        tol,
    )
}

/// Coulomb energy between two unit-charge 2D Gaussian clouds
/// `exp(-|r - P|^2 / a_B^2) / (pi a_B^2)` whose centres are `d` apart:
/// `sqrt(pi/2) / a_B * exp(-x) I0(x)` with `x = d^2 / 4 a_B^2`.
pub fn coulomb_kernel(d: f64, radius: f64, coulomb_scale: f64) -> f64 {
    let x = d * d / (4.0 * radius * radius);
    coulomb_scale * (0.5 * PI).sqrt() / radius * bessel_i0e(x)
}

/// Four-centre element `<p q|V|r s>` over equal-width primitives: each charge
/// product `phi_p phi_r` collapses onto a Gaussian at the midpoint with weight `O_pr`.
pub fn coulomb_primitive_4center(
    p: &PrimitiveOrbital,
    q: &PrimitiveOrbital,
    r: &PrimitiveOrbital,
    s: &PrimitiveOrbital,
    coulomb_scale: f64,
) -> f64 {
    let a_b = p.radius;
    let o_pr = gaussian_overlap((p.center - r.center).norm(), a_b);
    let o_qs = gaussian_overlap((q.center - s.center).norm(), a_b);
    let m1 = Position::from((p.center.coords + r.center.coords) * 0.5);
    let m2 = Position::from((q.center.coords + s.center.coords) * 0.5);
    o_pr * o_qs * coulomb_kernel((m1 - m2).norm(), a_b, coulomb_scale)
}

/// Primitive-basis integrals before orthogonalization.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveIntegrals {
    pub kinetic: Matrix4<f64>,
    pub potential: Matrix4<f64>,
    pub coulomb: Tensor4,
    /// Largest quadrature error estimate among the potential elements.
    pub potential_error: f64,
}

impl PrimitiveIntegrals {
    pub fn compute(
        device: &Device,
        primitives: &[PrimitiveOrbital; 4],
        tol: Tolerance,
    ) -> Result<Self> {
        let hw = device.geometry.hbar_omega0;
        let kinetic =
            Matrix4::from_fn(|i, j| kinetic_primitive(&primitives[i], &primitives[j], hw));

        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| (i..4).map(move |j| (i, j))).collect();
        let estimates = pairs
            .par_iter()
            .map(|&(i, j)| potential_primitive(&primitives[i], &primitives[j], device, tol))
            .collect::<Result<Vec<_>>>()?;
        let mut potential = Matrix4::zeros();
        let mut potential_error: f64 = 0.0;
        for (&(i, j), e) in pairs.iter().zip(&estimates) {
            potential[(i, j)] = e.value;
            potential[(j, i)] = e.value;
            potential_error = potential_error.max(e.error);
        }

        let cs = device.material.coulomb_scale();
        let coulomb = Tensor4::from_fn(|p, q, r, s| {
            coulomb_primitive_4center(
                &primitives[p],
                &primitives[q],
                &primitives[r],
                &primitives[s],
                cs,
            )
        });
        Ok(Self {
            kinetic,
            potential,
            coulomb,
            potential_error,
        })
    }
}

/// Move primitive integrals onto the orthogonal orbitals `psi = C phi`.
pub fn transform_integrals(
    c: &Matrix4<f64>,
    h_primitive: &Matrix4<f64>,
    v_primitive: &Tensor4,
) -> (OneBodyIntegrals, TwoBodyIntegrals) {
    let h = c * h_primitive * c.transpose();
    let h = (h + h.transpose()) * 0.5;
    (
        OneBodyIntegrals { h },
        TwoBodyIntegrals {
            v: v_primitive.transformed(c),
        },
    )
}

/// Everything the many-body stage needs for one device configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrals {
    pub basis: OrthogonalBasis,
    pub one_body: OneBodyIntegrals,
    pub two_body: TwoBodyIntegrals,
    pub potential_error: f64,
}

impl Integrals {
    pub fn compute(device: &Device, tol: Tolerance) -> Result<Self> {
        let basis = OrthogonalBasis::for_device(device)?;
        let prim = PrimitiveIntegrals::compute(device, &basis.primitives, tol)?;
        let (one_body, two_body) = transform_integrals(
            &basis.coeffs,
            &(prim.kinetic + prim.potential),
            &prim.coulomb,
        );
        Ok(Self {
            basis,
            one_body,
            two_body,
            potential_error: prim.potential_error,
        })
    }

    pub fn hubbard(&self) -> HubbardParams {
        extract_hubbard(&self.one_body, &self.two_body)
    }
}

/// Nearest-neighbour Hubbard coefficients (0-based dots, bonds `k = (k, k+1)`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HubbardParams {
    pub eps: [f64; 4],
    pub t: [f64; 3],
    pub u: [f64; 4],
    pub unn: [f64; 3],
    pub je: [f64; 3],
    pub jp: [f64; 3],
    /// `jt[k] = [J^{t,k}_{k,k+1}, J^{t,k+1}_{k,k+1}]`: occupation-modulated
    /// hopping with the spectator on the left or right site of the bond.
    pub jt: [[f64; 2]; 3],
}

pub fn extract_hubbard(one: &OneBodyIntegrals, two: &TwoBodyIntegrals) -> HubbardParams {
    let h = &one.h;
    let v = &two.v;
    let mut p = HubbardParams::default();
    for k in 0..4 {
        p.eps[k] = h[(k, k)];
        p.u[k] = v[[k, k, k, k]];
    }
    for k in 0..3 {
        let l = k + 1;
        p.t[k] = h[(k, l)];
        p.unn[k] = v[[k, l, k, l]];
        p.je[k] = v[[k, l, l, k]];
        p.jp[k] = v[[k, k, l, l]];
        p.jt[k] = [-v[[k, k, k, l]], -v[[l, l, l, k]]];
    }
    p
}

/// Index tuples of `V` that the nearest-neighbour Hubbard form keeps for bond `(k, l)`.
fn bond_tuples(k: usize, l: usize) -> [([usize; 4], BondTerm); 14] {
    use BondTerm::*;
    [
        ([k, l, k, l], Direct),
        ([l, k, l, k], Direct),
        ([k, l, l, k], Exchange),
        ([l, k, k, l], Exchange),
        ([k, k, l, l], PairHop),
        ([l, l, k, k], PairHop),
        ([l, k, k, k], LeftHop),
        ([k, l, k, k], LeftHop),
        ([k, k, l, k], LeftHop),
        ([k, k, k, l], LeftHop),
        ([k, l, l, l], RightHop),
        ([l, k, l, l], RightHop),
        ([l, l, k, l], RightHop),
        ([l, l, l, k], RightHop),
    ]
}

#[derive(Debug, Clone, Copy)]
enum BondTerm {
    Direct,
    Exchange,
    PairHop,
    LeftHop,
    RightHop,
}

impl HubbardParams {
    /// Integral tensors that reproduce exactly this Hubbard model under the
    /// generic second-quantized assembly.
    pub fn to_integrals(&self) -> (OneBodyIntegrals, TwoBodyIntegrals) {
        let mut h = Matrix4::zeros();
        let mut v = Tensor4::zeros();
        for k in 0..4 {
            h[(k, k)] = self.eps[k];
            v[[k, k, k, k]] = self.u[k];
        }
        for k in 0..3 {
            h[(k, k + 1)] = self.t[k];
            h[(k + 1, k)] = self.t[k];
            for (idx, term) in bond_tuples(k, k + 1) {
                v[idx] = match term {
                    BondTerm::Direct => self.unn[k],
                    BondTerm::Exchange => self.je[k],
                    BondTerm::PairHop => self.jp[k],
                    BondTerm::LeftHop => -self.jt[k][0],
                    BondTerm::RightHop => -self.jt[k][1],
                };
            }
        }
        (OneBodyIntegrals { h }, TwoBodyIntegrals { v })
    }

    /// Mirror image `1<->4, 2<->3`.
    pub fn mirrored(&self) -> Self {
        let rev4 = |a: [f64; 4]| [a[3], a[2], a[1], a[0]];
        let rev3 = |a: [f64; 3]| [a[2], a[1], a[0]];
        let jt = self.jt;
        Self {
            eps: rev4(self.eps),
            t: rev3(self.t),
            u: rev4(self.u),
            unn: rev3(self.unn),
            je: rev3(self.je),
            jp: rev3(self.jp),
            jt: [
                [jt[2][1], jt[2][0]],
                [jt[1][1], jt[1][0]],
                [jt[0][1], jt[0][0]],
            ],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.eps
            .iter()
            .chain(&self.t)
            .chain(&self.u)
            .chain(&self.unn)
            .chain(&self.je)
            .chain(&self.jp)
            .chain(self.jt.iter().flatten())
            .all(|v| v.is_finite())
    }

    /// Flat `name index value` dump, one triple per line, meV. Indices are
    /// 1-based dot numbers (or the left dot of a bond).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut line = |name: &str, i: usize, v: f64| {
            let _ = writeln!(out, "{name} {} {v:.16e}", i + 1);
        };
        for k in 0..4 {
            line("eps", k, self.eps[k]);
        }
        for k in 0..3 {
            line("t", k, self.t[k]);
        }
        for k in 0..4 {
            line("U", k, self.u[k]);
        }
        for (name, arr) in [("Unn", self.unn), ("Je", self.je), ("Jp", self.jp)] {
            for (k, v) in arr.iter().enumerate() {
                line(name, k, *v);
            }
        }
        for k in 0..3 {
            line("Jt_left", k, self.jt[k][0]);
        }
        for k in 0..3 {
            line("Jt_right", k, self.jt[k][1]);
        }
        out
    }
}

impl TwoBodyIntegrals {
    /// Keep only the entries the nearest-neighbour Hubbard form uses.
    pub fn restricted_to_hubbard(&self) -> Self {
        let mut v = Tensor4::zeros();
        for k in 0..4 {
            v[[k, k, k, k]] = self.v[[k, k, k, k]];
        }
        for k in 0..3 {
            for (idx, _) in bond_tuples(k, k + 1) {
                v[idx] = self.v[idx];
            }
        }
        Self { v }
    }
}

impl OneBodyIntegrals {
    /// Tridiagonal part.
    pub fn restricted_to_hubbard(&self) -> Self {
        Self {
            h: Matrix4::from_fn(|i, j| {
                if i.abs_diff(j) <= 1 {
                    self.h[(i, j)]
                } else {
                    0.0
                }
            }),
        }
    }
}
