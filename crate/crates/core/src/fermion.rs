//! Fixed-particle-number fermion Fock spaces and operator strings.
//!
//! Modes are numbered `k + n_orb * sigma` with spin up (`sigma = 0`) first.
//! A basis state is the bitmask of occupied modes and stands for
//! `c+_{m1} c+_{m2} ... |vac>` with `m1 < m2 < ...`, so applying `c_j` or
//! `c+_j` picks up `(-1)^(number of occupied modes below j)`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, Matrix4};

use crate::integrals::{OneBodyIntegrals, TwoBodyIntegrals};

pub const UP: usize = 0;
pub const DOWN: usize = 1;

/// One ladder operator: `(mode, is_creation)`.
pub type Ladder = (usize, bool);

/// `coeff * op_0 op_1 ... op_n`, acting right to left.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub ops: Vec<Ladder>,
}

impl Term {
    pub fn new(coeff: f64, ops: Vec<Ladder>) -> Self {
        Self { coeff, ops }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            coeff: self.coeff,
            ops: self.ops.iter().rev().map(|&(m, d)| (m, !d)).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Operator {
    pub terms: Vec<Term>,
}

impl Operator {
    pub fn push(&mut self, coeff: f64, ops: Vec<Ladder>) {
        if coeff != 0.0 {
            self.terms.push(Term::new(coeff, ops));
        }
    }

    /// Push a term together with its Hermitian conjugate.
    pub fn push_with_adjoint(&mut self, coeff: f64, ops: Vec<Ladder>) {
        if coeff != 0.0 {
            let t = Term::new(coeff, ops);
            self.terms.push(t.adjoint());
            self.terms.push(t);
        }
    }

    pub fn extend(&mut self, other: Operator) {
        self.terms.extend(other.terms);
    }
}

pub fn cr(mode: usize) -> Ladder {
    (mode, true)
}

pub fn an(mode: usize) -> Ladder {
    (mode, false)
}

/// Apply a single ladder operator; `None` if it annihilates the state.
pub fn apply_ladder(state: u64, (mode, dagger): Ladder) -> Option<(f64, u64)> {
    let bit = 1u64 << mode;
    if (state & bit != 0) == dagger {
        return None;
    }
    let below = (state & (bit - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((sign, state ^ bit))
}

pub fn apply_string(state: u64, ops: &[Ladder]) -> Option<(f64, u64)> {
    ops.iter().rev().try_fold((1.0, state), |(s, st), &op| {
        apply_ladder(st, op).map(|(s2, st2)| (s * s2, st2))
    })
}

/// All states of `n_orb` spatial orbitals with fixed spin-up and spin-down counts.
#[derive(Debug, Clone)]
pub struct FockSpace {
    pub n_orb: usize,
    states: Vec<u64>,
    index: HashMap<u64, usize>,
}

/// Ascending `k`-subsets of `0..n`, lexicographic.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl FockSpace {
    /// States ordered lexicographically by the up orbitals, then the down orbitals.
    pub fn new(n_orb: usize, n_up: usize, n_down: usize) -> Self {
        assert!(2 * n_orb <= 64);
        let ups = combinations(n_orb, n_up);
        let downs = combinations(n_orb, n_down);
        let mut states = Vec::with_capacity(ups.len() * downs.len());
        for u in &ups {
            for d in &downs {
                let mask = u.iter().map(|&k| 1u64 << k).sum::<u64>()
                    + d.iter().map(|&k| 1u64 << (k + n_orb)).sum::<u64>();
                states.push(mask);
            }
        }
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Self {
            n_orb,
            states,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn index_of(&self, state: u64) -> Option<usize> {
        self.index.get(&state).copied()
    }

    pub fn mode(&self, orbital: usize, spin: usize) -> usize {
        orbital + self.n_orb * spin
    }

    pub fn occupation(&self, state: u64, orbital: usize, spin: usize) -> bool {
        state & (1 << self.mode(orbital, spin)) != 0
    }

    /// Dense matrix of `op` restricted to this space. Terms leaving the
    /// space are dropped.
    pub fn matrix(&self, op: &Operator) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (j, &s) in self.states.iter().enumerate() {
            for term in &op.terms {
                if let Some((sign, out)) = apply_string(s, &term.ops) {
                    if let Some(i) = self.index_of(out) {
                        m[(i, j)] += sign * term.coeff;
                    }
                }
            }
        }
        m
    }

    /// Coefficient vector of `sum_i coeff_i * (creation string_i)|vac>`.
    pub fn state_vector(&self, parts: &[(f64, Vec<usize>)]) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        for (coeff, modes) in parts {
            let ops: Vec<Ladder> = modes.iter().map(|&m| cr(m)).collect();
            if let Some((sign, out)) = apply_string(0, &ops) {
                let i = self
                    .index_of(out)
                    .expect("creation string outside the Fock space");
                v[i] += sign * coeff;
            }
        }
        v
    }

    /// `S^2 = S- S+ + Sz^2 + Sz`.
    pub fn spin_squared(&self) -> DMatrix<f64> {
        let n = self.n_orb;
        let mut op = Operator::default();
        for k in 0..n {
            for l in 0..n {
                op.push(
                    1.0,
                    vec![
                        cr(self.mode(k, DOWN)),
                        an(self.mode(k, UP)),
                        cr(self.mode(l, UP)),
                        an(self.mode(l, DOWN)),
                    ],
                );
            }
        }
        let mut m = self.matrix(&op);
        for (j, &s) in self.states.iter().enumerate() {
            let up = (0..n).filter(|&k| self.occupation(s, k, UP)).count() as f64;
            let dn = (0..n).filter(|&k| self.occupation(s, k, DOWN)).count() as f64;
            let sz = 0.5 * (up - dn);
            m[(j, j)] += sz * sz + sz;
        }
        m
    }
}

/// `sum_{pq sigma} h_pq c+_{p sigma} c_{q sigma}`.
pub fn one_body_operator(h: &DMatrix<f64>) -> Operator {
    let n = h.nrows();
    let mut op = Operator::default();
    for s in [UP, DOWN] {
        for p in 0..n {
            for q in 0..n {
                op.push(h[(p, q)], vec![cr(p + n * s), an(q + n * s)]);
            }
        }
    }
    op
}

/// `1/2 sum V_pqrs c+_{p sigma} c+_{q tau} c_{s tau} c_{r sigma}`, with
/// `v(p, q, r, s) = <p(1) q(2)|V|r(1) s(2)>`.
pub fn two_body_operator(n: usize, v: impl Fn(usize, usize, usize, usize) -> f64) -> Operator {
    let mut op = Operator::default();
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let x = v(p, q, r, s);
                    if x == 0.0 {
                        continue;
                    }
                    for sg in [UP, DOWN] {
                        for tau in [UP, DOWN] {
                            op.push(
                                0.5 * x,
                                vec![
                                    cr(p + n * sg),
                                    cr(q + n * tau),
                                    an(s + n * tau),
                                    an(r + n * sg),
                                ],
                            );
                        }
                    }
                }
            }
        }
    }
    op
}

/// Second-quantized Hamiltonian of four-orbital integrals.
pub fn hamiltonian_from_integrals(one: &OneBodyIntegrals, two: &TwoBodyIntegrals) -> Operator {
    let h: &Matrix4<f64> = &one.h;
    let mut op = one_body_operator(&DMatrix::from_fn(4, 4, |i, j| h[(i, j)]));
    op.extend(two_body_operator(4, |p, q, r, s| two.v[[p, q, r, s]]));
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ladder_signs_follow_mode_order() {
        // |0,2> = c+_0 c+_2 |vac>; c_2 must pass c+_0 -> -1.
        let s = 0b101;
        assert_eq!(apply_ladder(s, an(2)), Some((-1.0, 0b001)));
        assert_eq!(apply_ladder(s, an(0)), Some((1.0, 0b100)));
        assert_eq!(apply_ladder(s, cr(0)), None);
        assert_eq!(apply_ladder(s, an(1)), None);
        assert_eq!(apply_ladder(s, cr(1)), Some((-1.0, 0b111)));
    }

    #[test]
    fn anticommutation_on_all_states() {
        let n = 4;
        for s in 0u64..(1 << n) {
            for i in 0..n {
                for j in 0..n {
                    // {c_i, c+_j} = delta_ij
                    let mut acc: HashMap<u64, f64> = HashMap::new();
                    for ops in [vec![an(i), cr(j)], vec![cr(j), an(i)]] {
                        if let Some((sg, out)) = apply_string(s, &ops) {
                            *acc.entry(out).or_default() += sg;
                        }
                    }
                    acc.retain(|_, v| *v != 0.0);
                    if i == j {
                        assert_eq!(acc.len(), 1);
                        assert_eq!(acc[&s], 1.0);
                    } else {
                        assert!(acc.is_empty());
                    }
                }
            }
        }
    }

    #[test]
    fn space_sizes_and_order() {
        let f = FockSpace::new(4, 2, 2);
        assert_eq!(f.dim(), 36);
        assert_eq!(f.states()[0], 0b0011_0011);
        assert_eq!(f.states()[1], 0b0101_0011);
        assert_eq!(FockSpace::new(2, 1, 1).dim(), 4);
        assert_eq!(FockSpace::new(4, 1, 0).dim(), 4);
    }

    #[test]
    fn number_operator_is_diagonal() {
        let f = FockSpace::new(4, 2, 2);
        let mut op = Operator::default();
        for m in 0..8 {
            op.push(1.0, vec![cr(m), an(m)]);
        }
        let n = f.matrix(&op);
        assert_eq!(n, DMatrix::identity(36, 36) * 4.0);
    }

    #[test]
    fn adjoint_reverses_string() {
        let t = Term::new(2.0, vec![cr(1), cr(2), an(3), an(0)]);
        assert_eq!(t.adjoint().ops, vec![cr(0), cr(3), an(2), an(1)]);
        assert_eq!(t.adjoint().adjoint(), t);
    }

    #[test]
    fn two_site_singlet_triplet_spin() {
        let f = FockSpace::new(2, 1, 1);
        let s2 = f.spin_squared();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = f.state_vector(&[(r, vec![0, 3]), (-r, vec![2, 1])]);
        let triplet = f.state_vector(&[(r, vec![0, 3]), (r, vec![2, 1])]);
        assert_relative_eq!((&s2 * &singlet).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(&s2 * &triplet, triplet.clone() * 2.0, epsilon = 1e-15);
    }

    #[test]
    fn hubbard_dimer_closed_form() {
        // Two sites, two electrons: ground energy (U - sqrt(U^2 + 16 t^2)) / 2.
        let (t, u) = (0.3, 4.0);
        let f = FockSpace::new(2, 1, 1);
        let h = DMatrix::from_row_slice(2, 2, &[0.0, t, t, 0.0]);
        let mut op = one_body_operator(&h);
        op.extend(two_body_operator(2, |p, q, r, s| {
            if p == q && q == r && r == s {
                u
            } else {
                0.0
            }
        }));
        let m = f.matrix(&op);
        assert_relative_eq!(m.clone(), m.transpose(), epsilon = 0.0);
        let e = m.symmetric_eigenvalues().min();
        assert_relative_eq!(
            e,
            (u - (u * u + 16.0 * t * t).sqrt()) / 2.0,
            epsilon = 1e-13
        );
    }
}
