//! Four-electron, four-orbital exact diagonalization in the `S_z = 0` sector.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix as PfMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{an, cr, hamiltonian_from_integrals, FockSpace, Operator, DOWN, UP};
use crate::integrals::{HubbardParams, Integrals, OneBodyIntegrals, TwoBodyIntegrals};

pub const N_ORB: usize = 4;
pub const DIM: usize = 36;
/// Minimum weight for a classified branch to count as that state.
pub const DOMINANCE_THRESHOLD: f64 = 0.8;
/// Top-two overlaps closer than this make a classification ambiguous.
pub const AMBIGUITY_TOLERANCE: f64 = 1e-6;
/// Below this best overlap a tracked state is considered lost.
pub const TRACKING_THRESHOLD: f64 = 0.5;

/// One basis configuration: orbitals (0-based) holding the two up and two
/// down electrons.
///
/// The state vector is `c+_{i up} c+_{j up} c+_{k dn} c+_{l dn} |vac>` with
/// `i < j`, `k < l` (all up operators left of all down operators).
/// `canonical_sign` converts to the interleaved ordering
/// `c+_{i up} c+_{k dn} c+_{j up} c+_{l dn} |vac>`, which differs by one swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockState {
    pub up_pair: (usize, usize),
    pub down_pair: (usize, usize),
    pub canonical_sign: i8,
}

impl FockState {
    pub fn is_fully_paired(&self) -> bool {
        self.up_pair == self.down_pair
    }
}

pub fn fock_space() -> FockSpace {
    FockSpace::new(N_ORB, 2, 2)
}

pub fn enumerate_basis() -> Vec<FockState> {
    fock_space()
        .states()
        .iter()
        .map(|&s| {
            let up: Vec<usize> = (0..N_ORB).filter(|&k| s & (1 << k) != 0).collect();
            let dn: Vec<usize> = (0..N_ORB)
                .filter(|&k| s & (1 << (k + N_ORB)) != 0)
                .collect();
            FockState {
                up_pair: (up[0], up[1]),
                down_pair: (dn[0], dn[1]),
                canonical_sign: -1,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssemblyMode {
    /// Nearest-neighbour Hubbard truncation.
    #[default]
    HubbardNn,
    /// Every element of the four-orbital integral tensor.
    Full,
}

impl fmt::Display for AssemblyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::HubbardNn => "hubbard-nn",
            Self::Full => "full",
        })
    }
}

impl std::str::FromStr for AssemblyMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "hubbard-nn" => Ok(Self::HubbardNn),
            "full" => Ok(Self::Full),
            _ => Err(format!("unknown mode `{s}` (expected hubbard-nn or full)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyHamiltonian {
    pub matrix: DMatrix<f64>,
    pub mode: AssemblyMode,
}

fn mode(k: usize, s: usize) -> usize {
    k + N_ORB * s
}

fn bar(s: usize) -> usize {
    1 - s
}

/// The Hubbard Hamiltonian written term by term as operator strings:
/// on-site energies, hopping, on-site and neighbour repulsion, spin exchange,
/// pair hopping and occupation-modulated hopping.
pub fn hubbard_operator(p: &HubbardParams) -> Operator {
    let mut op = Operator::default();
    let spins = [UP, DOWN];
    for k in 0..N_ORB {
        for s in spins {
            op.push(p.eps[k], vec![cr(mode(k, s)), an(mode(k, s))]);
        }
        op.push(
            p.u[k],
            vec![
                cr(mode(k, UP)),
                an(mode(k, UP)),
                cr(mode(k, DOWN)),
                an(mode(k, DOWN)),
            ],
        );
    }
    for k in 0..N_ORB - 1 {
        let l = k + 1;
        for s in spins {
            op.push_with_adjoint(p.t[k], vec![cr(mode(k, s)), an(mode(l, s))]);
            for s2 in spins {
                op.push(
                    p.unn[k],
                    vec![
                        cr(mode(k, s)),
                        an(mode(k, s)),
                        cr(mode(l, s2)),
                        an(mode(l, s2)),
                    ],
                );
                op.push(
                    -p.je[k],
                    vec![
                        cr(mode(k, s)),
                        cr(mode(l, s2)),
                        an(mode(l, s)),
                        an(mode(k, s2)),
                    ],
                );
            }
            // J^{t,i} n_{i s} c+_{k sbar} c_{l sbar}, i in {k, l}
            for (which, i) in [(0, k), (1, l)] {
                op.push_with_adjoint(
                    -p.jt[k][which],
                    vec![
                        cr(mode(i, s)),
                        an(mode(i, s)),
                        cr(mode(k, bar(s))),
                        an(mode(l, bar(s))),
                    ],
                );
            }
        }
        op.push_with_adjoint(
            -p.jp[k],
            vec![
                cr(mode(l, UP)),
                cr(mode(l, DOWN)),
                an(mode(k, UP)),
                an(mode(k, DOWN)),
            ],
        );
    }
    op
}

pub fn assemble_hubbard(p: &HubbardParams) -> ManyBodyHamiltonian {
    ManyBodyHamiltonian {
        matrix: fock_space().matrix(&hubbard_operator(p)),
        mode: AssemblyMode::HubbardNn,
    }
}

/// Generic second-quantized assembly from integral tensors.
pub fn assemble_integrals(
    one: &OneBodyIntegrals,
    two: &TwoBodyIntegrals,
    mode: AssemblyMode,
) -> ManyBodyHamiltonian {
    ManyBodyHamiltonian {
        matrix: fock_space().matrix(&hamiltonian_from_integrals(one, two)),
        mode,
    }
}

pub fn assemble(ints: &Integrals, mode: AssemblyMode) -> ManyBodyHamiltonian {
    match mode {
        AssemblyMode::HubbardNn => assemble_hubbard(&ints.hubbard()),
        AssemblyMode::Full => assemble_integrals(&ints.one_body, &ints.two_body, mode),
    }
}

/// Symmetric eigendecomposition, eigenvalues ascending, each eigenvector
/// signed so that its largest-magnitude component is positive.
pub fn eigh(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigensolver("non-finite matrix element".into()));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(m.nrows(), m.ncols());
    for (c, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        let pivot = v.iamax();
        if v[pivot] < 0.0 {
            v.neg_mut();
        }
        vectors.set_column(c, &v);
    }
    if energies
        .iter()
        .chain(vectors.iter())
        .any(|x| !x.is_finite())
    {
        return Err(Error::Eigensolver("non-finite eigenpair".into()));
    }
    Ok((energies, vectors))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub energies: Vec<f64>,
    /// Eigenvectors as columns, in the order of `energies`.
    pub vectors: DMatrix<f64>,
    /// `compositions[(label, state)] = |<label|psi_state>|^2`, rows in [`Label::ALL`] order.
    pub compositions: DMatrix<f64>,
    /// Continuation ids across a sweep; energy order unless re-labelled by tracking.
    pub tracked_ids: Vec<usize>,
}

pub fn diagonalize(h: &ManyBodyHamiltonian) -> Result<SpectrumResult> {
    let (energies, vectors) = eigh(&h.matrix)?;
    let labels = label_matrix();
    let overlaps = labels.transpose() * &vectors;
    let compositions = overlaps.map(|x| x * x);
    Ok(SpectrumResult {
        energies,
        vectors,
        compositions,
        tracked_ids: (0..DIM).collect(),
    })
}

/// Two-electron state of one dot pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairState {
    S11,
    S20,
    S02,
    T11,
}

impl PairState {
    pub const ALL: [PairState; 4] = [Self::S11, Self::S20, Self::S02, Self::T11];
    pub const SINGLETS: [PairState; 3] = [Self::S11, Self::S20, Self::S02];

    /// Creation strings over `(orbital, spin)` for dots `(a, b)`.
    pub fn creation_strings(self, a: usize, b: usize) -> Vec<(f64, Vec<(usize, usize)>)> {
        let r = FRAC_1_SQRT_2;
        match self {
            Self::S11 => vec![
                (r, vec![(a, UP), (b, DOWN)]),
                (-r, vec![(a, DOWN), (b, UP)]),
            ],
            Self::T11 => vec![(r, vec![(a, UP), (b, DOWN)]), (r, vec![(a, DOWN), (b, UP)])],
            Self::S20 => vec![(1.0, vec![(a, UP), (a, DOWN)])],
            Self::S02 => vec![(1.0, vec![(b, UP), (b, DOWN)])],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::S11 => "S11",
            Self::S20 => "S20",
            Self::S02 => "S02",
            Self::T11 => "T11",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    /// Left pair (dots 1,2) state times right pair (dots 3,4) state.
    Product(PairState, PairState),
    /// `(c+_{1u} c+_{2u} c+_{3d} c+_{4d} - c+_{1d} c+_{2d} c+_{3u} c+_{4u}) / sqrt 2`.
    UpUpDownDown,
}

impl Label {
    pub const ALL: [Label; 17] = {
        use Label::Product as p;
        use PairState::*;
        [
            p(S11, S11),
            p(S20, S11),
            p(S02, S11),
            p(T11, S11),
            p(S11, T11),
            p(T11, T11),
            p(S11, S20),
            p(S11, S02),
            Label::UpUpDownDown,
            p(S20, S20),
            p(S20, S02),
            p(S02, S20),
            p(S02, S02),
            p(T11, S20),
            p(T11, S02),
            p(S20, T11),
            p(S02, T11),
        ]
    };

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&l| l == self).unwrap()
    }

    pub fn name(self) -> String {
        match self {
            Self::Product(l, r) => format!("{}{}", l.name(), r.name()),
            Self::UpUpDownDown => "Sudd".into(),
        }
    }

    pub fn vector(self, space: &FockSpace) -> DVector<f64> {
        let to_modes =
            |ops: &[(usize, usize)]| ops.iter().map(|&(k, s)| mode(k, s)).collect::<Vec<_>>();
        match self {
            Self::Product(l, r) => {
                let mut parts = Vec::new();
                for (cl, ol) in l.creation_strings(0, 1) {
                    for (cr_, or) in r.creation_strings(2, 3) {
                        let mut m = to_modes(&ol);
                        m.extend(to_modes(&or));
                        parts.push((cl * cr_, m));
                    }
                }
                space.state_vector(&parts)
            }
            Self::UpUpDownDown => {
                let r = FRAC_1_SQRT_2;
                space.state_vector(&[
                    (r, to_modes(&[(0, UP), (1, UP), (2, DOWN), (3, DOWN)])),
                    (-r, to_modes(&[(0, DOWN), (1, DOWN), (2, UP), (3, UP)])),
                ])
            }
        }
    }
}

/// Label vectors as columns, in [`Label::ALL`] order.
pub fn label_matrix() -> DMatrix<f64> {
    let space = fock_space();
    let cols: Vec<DVector<f64>> = Label::ALL.iter().map(|l| l.vector(&space)).collect();
    DMatrix::from_columns(&cols)
}

/// The four low-lying qubit-pair branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    SS,
    TS,
    ST,
    TT,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Self::SS, Self::TS, Self::ST, Self::TT];

    fn span(self) -> Vec<Label> {
        use PairState::*;
        let (left, right): (&[PairState], &[PairState]) = match self {
            Self::SS => (&PairState::SINGLETS, &PairState::SINGLETS),
            Self::TS => (&[T11], &PairState::SINGLETS),
            Self::ST => (&PairState::SINGLETS, &[T11]),
            Self::TT => (&[T11], &[T11]),
        };
        left.iter()
            .flat_map(|&l| right.iter().map(move |&r| Label::Product(l, r)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchAssignment {
    /// Eigenstate index (energy order).
    pub state: usize,
    pub energy: f64,
    /// Squared overlap of that eigenstate with the branch's reference state.
    pub dominance: f64,
    pub ambiguous: bool,
}

impl BranchAssignment {
    pub fn is_valid(&self) -> bool {
        !self.ambiguous && self.dominance >= DOMINANCE_THRESHOLD
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub branches: [BranchAssignment; 4],
}

impl Classification {
    pub fn get(&self, b: Branch) -> &BranchAssignment {
        &self.branches[b as usize]
    }
}

/// Reference state of a branch: the lowest eigenvector of `H` restricted to
/// the branch's product-state span. Dressing the bare label with the pair's
/// (2,0)/(0,2) admixture keeps the classification meaningful at finite detuning.
pub fn branch_reference(h: &DMatrix<f64>, branch: Branch) -> Result<DVector<f64>> {
    let space = fock_space();
    let cols: Vec<DVector<f64>> = branch.span().iter().map(|l| l.vector(&space)).collect();
    let b = DMatrix::from_columns(&cols);
    let sub = b.transpose() * h * &b;
    let (_, w) = eigh(&sub)?;
    Ok(b * w.column(0))
}

pub fn classify(h: &ManyBodyHamiltonian, spectrum: &SpectrumResult) -> Result<Classification> {
    let mut out = Vec::with_capacity(4);
    for branch in Branch::ALL {
        let target = branch_reference(&h.matrix, branch)?;
        let weights: Vec<f64> = spectrum
            .vectors
            .column_iter()
            .map(|v| v.dot(&target).powi(2))
            .collect();
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        let (best, second) = (order[0], order[1]);
        out.push(BranchAssignment {
            state: best,
            energy: spectrum.energies[best],
            dominance: weights[best],
            ambiguous: weights[best] - weights[second] <= AMBIGUITY_TOLERANCE,
        });
    }
    Ok(Classification {
        branches: [out[0], out[1], out[2], out[3]],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralExchange {
    /// `E(TS) - E(SS)`.
    pub j12: f64,
    /// `E(ST) - E(SS)`.
    pub j34: f64,
    pub valid12: bool,
    pub valid34: bool,
}

pub fn exchange_from_energies(c: &Classification) -> SpectralExchange {
    let (ss, ts, st) = (c.get(Branch::SS), c.get(Branch::TS), c.get(Branch::ST));
    SpectralExchange {
        j12: ts.energy - ss.energy,
        j34: st.energy - ss.energy,
        valid12: ss.is_valid() && ts.is_valid(),
        valid34: ss.is_valid() && st.is_valid(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tracking {
    /// `assignment[i]` = column of the current point continuing previous column `i`.
    pub assignment: Vec<usize>,
    pub lost: bool,
}

/// Continue eigenvectors between neighbouring sweep points by the
/// permutation maximizing the summed squared overlaps.
pub fn track_sweep(previous: &DMatrix<f64>, current: &DMatrix<f64>) -> Tracking {
    let ov = (previous.transpose() * current).map(|x| x * x);
    let n = ov.nrows();
    // Integer weights for the assignment solver; the low bit prefers keeping
    // the energy order when overlaps tie.
    let weights = PfMatrix::from_fn(n, ov.ncols(), |(i, j)| {
        ((ov[(i, j)] * 1e12).round() as i64) * 2 + i64::from(i == j)
    });
    let (_, assignment) = kuhn_munkres(&weights);
    let lost = ov.row_iter().any(|r| r.max() < TRACKING_THRESHOLD);
    Tracking { assignment, lost }
}

/// Propagate continuation ids from the previous point through a tracking result.
pub fn continue_ids(previous_ids: &[usize], tracking: &Tracking) -> Vec<usize> {
    let mut ids = vec![0; previous_ids.len()];
    for (i, &j) in tracking.assignment.iter().enumerate() {
        ids[j] = previous_ids[i];
    }
    ids
}

/// One-shot pipeline for a device: assembly, spectrum, classification.
#[derive(Debug, Clone)]
pub struct Solution {
    pub hamiltonian: ManyBodyHamiltonian,
    pub spectrum: SpectrumResult,
    pub classification: Classification,
    pub exchange: SpectralExchange,
}

pub fn solve(ints: &Integrals, mode: AssemblyMode) -> Result<Solution> {
    solve_hamiltonian(assemble(ints, mode))
}

pub fn solve_hamiltonian(hamiltonian: ManyBodyHamiltonian) -> Result<Solution> {
    let spectrum = diagonalize(&hamiltonian)?;
    let classification = classify(&hamiltonian, &spectrum)?;
    let exchange = exchange_from_energies(&classification);
    Ok(Solution {
        hamiltonian,
        spectrum,
        classification,
        exchange,
    })
}
