//! Brute-force reference evolution.
//!
//! Nothing here uses the closed forms of [`crate::fock_field`] or
//! [`crate::tavis_cummings`]. The squeezed vacuum comes from exponentiating the
//! two-mode squeezing generator, the beam splitters from exponentiating their
//! generator in each fixed-photon-number block, and the atom-cavity dynamics
//! from exponentiating the interaction Hamiltonian in the product basis. The
//! external modes are traced out through a purification sum over their photon
//! numbers `(k, l)`, then the cavities are traced out.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{contract, domain, Result};
use crate::fock_field::FieldConfig;
use crate::linalg::unitary_from_hermitian;
use crate::tavis_cummings::{in_pattern, ThreeQubitDensityMatrix};
use crate::{Matrix8, C64};

/// Largest ladder used for the squeezed vacuum.
pub const MAX_LADDER: usize = 600;

fn ladder_dimension(s: f64, n_max: usize) -> usize {
    let t = s.tanh();
    let decay = if t > 0.0 && t < 1.0 {
        ((1e-16f64).ln() / t.ln()).ceil() as usize
    } else {
        0
    };
    (n_max + 1)
        .max(decay)
        .saturating_add(20)
        .min(MAX_LADDER.max(n_max + 21))
}

/// Amplitudes of `|n, n>` (n = 0..=n_max) in `exp(s (a^dag b^dag - a b)) |0, 0>`,
/// from a numerical exponential on a ladder with headroom above `n_max`.
pub fn squeezed_vacuum_amplitudes(s: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(domain(format!(
            "squeezing must be finite and >= 0, got {s}"
        )));
    }
    let dim = ladder_dimension(s, n_max);
    // i * generator, restricted to span{|n, n>}
    let h = DMatrix::<C64>::from_fn(dim, dim, |i, j| {
        if i == j + 1 {
            C64::new(0.0, s * i as f64)
        } else if j == i + 1 {
            C64::new(0.0, -s * j as f64)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let u = unitary_from_hermitian(&h, 1.0)?;
    Ok((0..=n_max).map(|n| u[(n, 0)].re).collect())
}

/// Beam splitter `exp((theta/2)(c f^dag - c^dag f))` between an external mode
/// `f` and a cavity mode `c`, stored as one block per total photon number.
#[derive(Debug, Clone)]
pub struct TruncatedBeamSplitter {
    theta: f64,
    /// `blocks[N][(j, j')]`: amplitude of `|j>_f |N-j>_c` from `|j'>_f |N-j'>_c`.
    blocks: Vec<DMatrix<C64>>,
}

/// Builds the beam splitter for up to `max_photons` total photons.
pub fn truncated_beam_splitter(theta: f64, max_photons: usize) -> Result<TruncatedBeamSplitter> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(domain(format!("theta must lie in [0, pi], got {theta}")));
    }
    let phi = 0.5 * theta;
    let mut blocks = Vec::with_capacity(max_photons + 1);
    for total in 0..=max_photons {
        let d = total + 1;
        let h = DMatrix::<C64>::from_fn(d, d, |i, j| {
            // c f^dag: j -> j + 1, minus c^dag f: j -> j - 1
            let (jf, jc) = (j as f64, (total - j) as f64);
            if i == j + 1 {
                C64::new(0.0, phi * (jf + 1.0).sqrt() * jc.sqrt())
            } else if i + 1 == j {
                C64::new(0.0, -phi * jf.sqrt() * (jc + 1.0).sqrt())
            } else {
                C64::new(0.0, 0.0)
            }
        });
        blocks.push(unitary_from_hermitian(&h, 1.0)?);
    }
    Ok(TruncatedBeamSplitter { theta, blocks })
}

impl TruncatedBeamSplitter {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn max_photons(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Amplitude of `|k>_f |n-k>_c` given `|n>_f |0>_c`.
    pub fn amplitude(&self, n: usize, k: usize) -> C64 {
        self.blocks[n][(k, n)]
    }

    /// Dense operator on the span of all states with at most `max_photons`
    /// photons in total, ordered by total photon number `N` and then by `j_f`.
    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim: usize = self.blocks.iter().map(|b| b.nrows()).sum();
        let mut out = DMatrix::<C64>::zeros(dim, dim);
        let mut offset = 0;
        for block in &self.blocks {
            let d = block.nrows();
            out.view_mut((offset, offset), (d, d)).copy_from(block);
            offset += d;
        }
        out
    }
}

/// Atom-cavity blocks of the resonant interaction Hamiltonian (units of `g`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    /// One atom: `|n, g>`, `|n-1, e>`.
    OneAtom,
    /// Two atoms, symmetric basis: `|n, gg>`, `|n-1, (eg+ge)/sqrt 2>`, `|n-2, ee>`.
    TwoAtomCoupled,
    /// Two atoms, product basis: `|n, gg>`, `|n-1, eg>`, `|n-1, ge>`, `|n-2, ee>`
    /// (`eg` = first atom excited).
    TwoAtomProduct,
}

impl Block {
    /// Number of excitations removed from the cavity by each basis state.
    pub fn excitations(self) -> &'static [usize] {
        match self {
            Block::OneAtom => &[0, 1],
            Block::TwoAtomCoupled => &[0, 1, 2],
            Block::TwoAtomProduct => &[0, 1, 1, 2],
        }
    }

    /// Hamiltonian restricted to `n` total excitations; states needing more
    /// than `n` photons removed are dropped.
    pub fn hamiltonian(self, n: usize) -> DMatrix<C64> {
        let exc = self.excitations();
        let dim = exc.iter().filter(|&&e| e <= n).count();
        let photons = |idx: usize| n.saturating_sub(exc[idx]) as f64;
        let mut h = DMatrix::<C64>::zeros(dim, dim);
        let mut link = |i: usize, j: usize, v: f64| {
            if i < dim && j < dim {
                h[(i, j)] = C64::new(v, 0.0);
                h[(j, i)] = C64::new(v, 0.0);
            }
        };
        match self {
            Block::OneAtom => link(0, 1, photons(0).sqrt()),
            Block::TwoAtomCoupled => {
                link(0, 1, (2.0 * photons(0)).sqrt());
                link(1, 2, (2.0 * photons(1)).sqrt());
            }
            Block::TwoAtomProduct => {
                link(0, 1, photons(0).sqrt());
                link(0, 2, photons(0).sqrt());
                link(1, 3, photons(1).sqrt());
                link(2, 3, photons(2).sqrt());
            }
        }
        h
    }
}

/// `exp(-i H tau)` on the `n`-excitation block.
pub fn hamiltonian_block_evolution(block: Block, n: usize, tau: f64) -> Result<DMatrix<C64>> {
    if !tau.is_finite() {
        return Err(domain(format!("tau must be finite, got {tau}")));
    }
    unitary_from_hermitian(&block.hamiltonian(n), tau)
}

/// Reference three-qubit state and bookkeeping from [`full_evolution`].
#[derive(Debug, Clone)]
pub struct OracleState {
    pub rho: ThreeQubitDensityMatrix,
    /// `1 - sum_n lambda_n^2` over the retained ladder.
    pub squeezing_deficit: f64,
    /// Number of non-negligible external-mode kets `(k, l)` traced out.
    pub purification_terms: usize,
}

const NEGLIGIBLE: f64 = 1e-300;

/// Evolves the ground-state atoms with the injected field truncated at
/// `config.n_max()` photons per mode and traces out every field mode.
pub fn full_evolution(config: &FieldConfig, tau: f64) -> Result<OracleState> {
    if !tau.is_finite() {
        return Err(domain(format!("tau must be finite, got {tau}")));
    }
    let n_max = config.n_max();
    let lambda = squeezed_vacuum_amplitudes(config.s(), n_max)?;
    let splitter = truncated_beam_splitter(config.theta(), n_max)?;

    // atom columns from the ground state, per initial cavity photon number
    let mut two_atom = Vec::with_capacity(n_max + 1);
    let mut one_atom = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let u = hamiltonian_block_evolution(Block::TwoAtomProduct, n, tau)?;
        two_atom.push(u.column(0).iter().copied().collect::<Vec<_>>());
        let u = hamiltonian_block_evolution(Block::OneAtom, n, tau)?;
        one_atom.push(u.column(0).iter().copied().collect::<Vec<_>>());
    }
    // product-basis index -> atom bits (A1 bit 0, A2 bit 1)
    const PAIR_BITS: [usize; 4] = [0, 1, 2, 3];
    let pair_exc = Block::TwoAtomProduct.excitations();
    let single_exc = Block::OneAtom.excitations();

    let levels = n_max + 1;
    let mut psi = vec![C64::new(0.0, 0.0); levels * levels * 8];
    let mut rho = Matrix8::zeros();
    let mut terms = 0usize;
    for k in 0..=n_max {
        for l in 0..=n_max {
            psi.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            let mut any = false;
            for (n, &weight) in lambda.iter().enumerate().skip(k.max(l)) {
                let amp = splitter.amplitude(n, k) * splitter.amplitude(n, l) * weight;
                if amp.norm() < NEGLIGIBLE {
                    continue;
                }
                any = true;
                let (q, r) = (n - k, n - l);
                for (x, ux) in two_atom[q].iter().enumerate() {
                    let c1 = q - pair_exc[x];
                    for (y, uy) in one_atom[r].iter().enumerate() {
                        let c2 = r - single_exc[y];
                        let atoms = PAIR_BITS[x] | (y << 2);
                        psi[(c1 * levels + c2) * 8 + atoms] += amp * ux * uy;
                    }
                }
            }
            if !any {
                continue;
            }
            terms += 1;
            for cell in psi.chunks_exact(8) {
                if cell.iter().all(|z| z.norm_sqr() == 0.0) {
                    continue;
                }
                for i in 0..8 {
                    for j in 0..8 {
                        rho[(i, j)] += cell[i] * cell[j].conj();
                    }
                }
            }
        }
    }
    let squeezing_deficit = 1.0 - lambda.iter().map(|x| x * x).sum::<f64>();
    Ok(OracleState {
        rho: ThreeQubitDensityMatrix::from_matrix(rho),
        squeezing_deficit,
        purification_terms: terms,
    })
}

/// One matrix element of a comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryComparison {
    pub i: usize,
    pub j: usize,
    pub candidate: C64,
    pub reference: C64,
}

impl EntryComparison {
    pub fn abs_diff(&self) -> f64 {
        (self.candidate - self.reference).norm()
    }
}

/// Element-wise comparison of a candidate state against a reference.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub tolerance: f64,
    pub max_abs_diff: f64,
    pub argmax: (usize, usize),
    pub entries: Vec<EntryComparison>,
    /// Reference elements outside the expected zero pattern with magnitude
    /// above the tolerance.
    pub pattern_violations: Vec<EntryComparison>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.max_abs_diff < self.tolerance && self.pattern_violations.is_empty()
    }
}

/// Compares `candidate` with `reference` entry by entry.
pub fn compare_states(
    candidate: &ThreeQubitDensityMatrix,
    reference: &ThreeQubitDensityMatrix,
    tolerance: f64,
) -> Result<ComparisonReport> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(domain(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let mut entries = Vec::with_capacity(64);
    let mut pattern_violations = Vec::new();
    let mut max_abs_diff = 0.0;
    let mut argmax = (0, 0);
    for i in 0..8 {
        for j in 0..8 {
            let e = EntryComparison {
                i,
                j,
                candidate: candidate.entry(i, j),
                reference: reference.entry(i, j),
            };
            let d = e.abs_diff();
            if !d.is_finite() {
                return Err(contract(format!("non-finite element at ({i}, {j})")));
            }
            if d > max_abs_diff {
                max_abs_diff = d;
                argmax = (i, j);
            }
            if !in_pattern(i, j) && e.reference.norm() > tolerance {
                pattern_violations.push(e);
            }
            entries.push(e);
        }
    }
    Ok(ComparisonReport {
        tolerance,
        max_abs_diff,
        argmax,
        entries,
        pattern_violations,
    })
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "max |diff| = {:.3e} at ({}, {}), tolerance {:.1e}, {}",
            self.max_abs_diff,
            self.argmax.0,
            self.argmax.1,
            self.tolerance,
            if self.passed() { "ok" } else { "MISMATCH" }
        )?;
        for e in self
            .entries
            .iter()
            .filter(|e| e.abs_diff() >= self.tolerance)
        {
            writeln!(
                f,
                "  ({}, {}) candidate {:+.12e}{:+.12e}i reference {:+.12e}{:+.12e}i |diff| {:.3e}",
                e.i,
                e.j,
                e.candidate.re,
                e.candidate.im,
                e.reference.re,
                e.reference.im,
                e.abs_diff()
            )?;
        }
        for e in &self.pattern_violations {
            writeln!(
                f,
                "  ({}, {}) outside expected pattern: {:.3e}",
                e.i,
                e.j,
                e.reference.norm()
            )?;
        }
        Ok(())
    }
}
