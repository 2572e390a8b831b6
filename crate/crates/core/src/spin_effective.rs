//! Second-order Schrieffer-Wolff reduction of the Hubbard model to a
//! nearest-neighbour Heisenberg chain, with exact-diagonalization checks.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{
    an, apply_string, cr, one_body_operator, two_body_operator, FockSpace, Ladder, Operator,
};
use crate::integrals::HubbardParams;
use crate::manybody::eigh;

/// Denominators at or below this magnitude (meV) are charge-transfer resonances.
pub const RESONANCE_GUARD: f64 = 1e-9;

/// Charge-transfer energies of bond `k`: `[into k, into k+1]`, i.e. the cost
/// of making site `k` (resp. `k+1`) doubly occupied from the singly occupied
/// chain. Neighbour repulsions beyond the chain ends are zero.
pub fn transfer_denominators(k: usize, p: &HubbardParams) -> [f64; 2] {
    let unn = |b: isize| -> f64 {
        if (0..3).contains(&b) {
            p.unn[b as usize]
        } else {
            0.0
        }
    };
    let kb = k as isize;
    let (left, mid, right) = (unn(kb - 1), unn(kb), unn(kb + 1));
    [
        p.u[k] + left - mid - right + p.eps[k] - p.eps[k + 1],
        p.u[k + 1] + right - left - mid + p.eps[k + 1] - p.eps[k],
    ]
}

/// Effective exchange of bond `k` (dots `k`, `k+1`, 0-based).
pub fn j_eff_bond(k: usize, p: &HubbardParams) -> Result<f64> {
    if k > 2 {
        return Err(crate::error::invalid(
            "bond",
            format!("{k} is not one of 0, 1, 2"),
        ));
    }
    if !p.is_finite() {
        return Err(crate::error::invalid("hubbard", "non-finite parameter"));
    }
    let d = transfer_denominators(k, p);
    for dd in d {
        if dd.abs() <= RESONANCE_GUARD {
            return Err(Error::Resonance {
                bond: k,
                denominator: dd,
            });
        }
    }
    let t = p.t[k];
    let [jl, jr] = p.jt[k];
    Ok(2.0 * (t - jl).powi(2) / d[0] + 2.0 * (t - jr).powi(2) / d[1] - 2.0 * p.je[k])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinChainCouplings {
    pub j_eff: [f64; 3],
}

impl SpinChainCouplings {
    pub fn from_hubbard(p: &HubbardParams) -> Result<Self> {
        Ok(Self {
            j_eff: [j_eff_bond(0, p)?, j_eff_bond(1, p)?, j_eff_bond(2, p)?],
        })
    }
}

/// Ground energy of `sum_k J_k S_k . S_{k+1}` on four spins, `S_z = 0` sector.
pub fn heisenberg_ground_energy(j: [f64; 3]) -> Result<f64> {
    let states: Vec<u8> = (0u8..16).filter(|s| s.count_ones() == 2).collect();
    let idx = |s: u8| states.iter().position(|&x| x == s).unwrap();
    let mut h = DMatrix::zeros(states.len(), states.len());
    for (c, &s) in states.iter().enumerate() {
        for (k, &jk) in j.iter().enumerate() {
            let (a, b) = (s >> k & 1, s >> (k + 1) & 1);
            h[(c, c)] += jk * if a == b { 0.25 } else { -0.25 };
            if a != b {
                h[(idx(s ^ (0b11 << k)), c)] += 0.5 * jk;
            }
        }
    }
    Ok(eigh(&h)?.0[0])
}

/// Energy the Heisenberg chain sits above, to second order: the singly
/// occupied charge configuration plus the spin-independent parts of the
/// direct-exchange and virtual-hopping terms.
pub fn charge_sector_constant(p: &HubbardParams) -> Result<f64> {
    let mut c: f64 = p.eps.iter().sum::<f64>() + p.unn.iter().sum::<f64>();
    for k in 0..3 {
        let d = transfer_denominators(k, p);
        if d.iter().any(|x| x.abs() <= RESONANCE_GUARD) {
            return Err(Error::Resonance {
                bond: k,
                denominator: d[0].min(d[1]),
            });
        }
        c -= 0.5 * p.je[k];
        c -= (p.t[k] - p.jt[k][0]).powi(2) / (2.0 * d[0])
            + (p.t[k] - p.jt[k][1]).powi(2) / (2.0 * d[1]);
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteComparison {
    pub j_eff: f64,
    pub j_exact: f64,
    pub deviation: f64,
}

/// Two electrons on two sites with hopping `t`, on-site `U` and site energy
/// offset `delta = eps_1 - eps_2`: the perturbative exchange against the exact
/// singlet-triplet gap of the 4-state `S_z = 0` problem.
pub fn sw_two_site_oracle(t: f64, u: f64, delta: f64) -> Result<TwoSiteComparison> {
    if !(t.is_finite() && u.is_finite() && delta.is_finite()) || u <= 0.0 {
        return Err(crate::error::invalid(
            "u",
            format!("need finite t, delta and U > 0, got t={t}, U={u}"),
        ));
    }
    let p = HubbardParams {
        eps: [delta, 0.0, 0.0, 0.0],
        t: [t, 0.0, 0.0],
        u: [u, u, 0.0, 0.0],
        ..Default::default()
    };
    let j_eff = j_eff_bond(0, &p)?;

    let space = FockSpace::new(2, 1, 1);
    let h1 = DMatrix::from_row_slice(2, 2, &[delta, t, t, 0.0]);
    let mut op = one_body_operator(&h1);
    op.extend(two_body_operator(2, |a, b, c, d| {
        if a == b && b == c && c == d {
            u
        } else {
            0.0
        }
    }));
    let h = space.matrix(&op);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let triplet = space.state_vector(&[(r, vec![0, 3]), (r, vec![2, 1])]);
    let e_t = triplet.dot(&(&h * &triplet));
    let e_s = eigh(&h)?.0[0];
    let j_exact = e_t - e_s;
    Ok(TwoSiteComparison {
        j_eff,
        j_exact,
        deviation: (j_eff - j_exact).abs(),
    })
}

/// Matrix of a two-site operator on the singly occupied states
/// `c+_{1 s1} c+_{2 s2} |vac>`, ordered `(s1, s2)` = uu, ud, du, dd.
/// Components leaving that subspace are projected out.
pub fn singly_occupied_matrix(op: &Operator) -> Matrix4<f64> {
    let mode = |site: usize, spin: usize| site + 2 * spin;
    let basis: Vec<(f64, u64)> = (0..4)
        .map(|n| {
            let ops: Vec<Ladder> = vec![cr(mode(0, n >> 1)), cr(mode(1, n & 1))];
            apply_string(0, &ops).unwrap()
        })
        .collect();
    let mut m = Matrix4::zeros();
    for (j, &(sj, sj_mask)) in basis.iter().enumerate() {
        for term in &op.terms {
            if let Some((s, out)) = apply_string(sj_mask, &term.ops) {
                if let Some(i) = basis.iter().position(|&(_, b)| b == out) {
                    m[(i, j)] += term.coeff * s * sj * basis[i].0;
                }
            }
        }
    }
    m
}

/// `S_1 . S_2` on two spin-1/2s, basis uu, ud, du, dd.
pub fn spin_dot_spin() -> Matrix4<f64> {
    let sx = Matrix2::new(0.0, 0.5, 0.5, 0.0);
    let sz = Matrix2::new(0.5, 0.0, 0.0, -0.5);
    // S_y (x) S_y is real: -(sigma_y/2 (x) sigma_y/2) with sigma_y = i*[[0,-1],[1,0]].
    let ay = Matrix2::new(0.0, -0.5, 0.5, 0.0);
    sx.kronecker(&sx) - ay.kronecker(&ay) + sz.kronecker(&sz)
}

/// Largest entrywise deviation of
/// `P sum_{s1 s2} c+_{1 s1} c_{2 s1} c+_{2 s2} c_{1 s2} P` from `1/2 - 2 S_1 . S_2`.
pub fn spin_identity_deviation() -> f64 {
    let mode = |site: usize, spin: usize| site + 2 * spin;
    let mut op = Operator::default();
    for s1 in 0..2 {
        for s2 in 0..2 {
            op.push(
                1.0,
                vec![
                    cr(mode(0, s1)),
                    an(mode(1, s1)),
                    cr(mode(1, s2)),
                    an(mode(0, s2)),
                ],
            );
        }
    }
    let lhs = singly_occupied_matrix(&op);
    let rhs = Matrix4::identity() * 0.5 - spin_dot_spin() * 2.0;
    (lhs - rhs).amax()
}

pub fn spin_identity_check() -> bool {
    spin_identity_deviation() <= 1e-14
}
