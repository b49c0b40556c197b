//! Resonant atom–field dynamics and the closed-form reduced three-qubit state.
//!
//! In cavity `c1` the two atoms start in `|gg>` with `q` photons; the
//! interaction couples `|2,-2,q>`, `|2,0,q-1>` and `|2,2,q-2>` (symmetric
//! triplet, photon number decreasing). With `A = sqrt(2(q-1))`,
//! `B = sqrt(2q)` and `f_q = sqrt(A^2 + B^2) = sqrt(2(2q-1))` the ground column
//! of `exp(-i H tau)` is
//!
//! ```text
//! a0 = ((q-1) + q cos(f_q tau)) / (2q-1)
//! a1 = -i sqrt(q/(2q-1)) sin(f_q tau)
//! a2 = sqrt(q(q-1)) / (2q-1) (cos(f_q tau) - 1)
//! ```
//!
//! In cavity `c2` the single atom with `r` photons evolves as
//! `b0 = cos(sqrt(r) tau)`, `b1 = -i sin(sqrt(r) tau)`.
//!
//! Both cavities use the same convention `U = exp(-i H tau)`, so the
//! closed-form coherences agree in sign with the brute-force evolution in
//! [`crate::oracle`].

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;

use crate::error::{contract, domain, Result};
use crate::fock_field::{
    enumerate_field_terms, truncation_deficit, Band, FieldConfig, FieldTermWeight,
};
use crate::linalg::{hermiticity_defect, to_dynamic};
use crate::sum::NeumaierSum;
use crate::{Matrix8, C64};

/// Dimensionless interaction time `tau = g t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    tau: f64,
}

impl EvolutionParams {
    pub fn new(tau: f64) -> Result<Self> {
        if !tau.is_finite() || tau < 0.0 {
            return Err(domain(format!(
                "interaction time must be finite and >= 0, got {tau}"
            )));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Ground-state column of the two-atom block with `q` photons, as
/// `(a0, |a1|, a2)`; the middle amplitude carries a factor `-i`.
///
/// `q = 0` is the one-dimensional no-photon sector and returns `(1, 0, 0)`.
pub fn two_atom_ground_column(q: usize, tau: f64) -> (f64, f64, f64) {
    if q == 0 {
        return (1.0, 0.0, 0.0);
    }
    let qf = q as f64;
    let denom = 2.0 * qf - 1.0;
    let ft = (2.0 * denom).sqrt() * tau;
    let (sin_ft, cos_ft) = ft.sin_cos();
    let a0 = ((qf - 1.0) + qf * cos_ft) / denom;
    let a1 = (qf / denom).sqrt() * sin_ft;
    let a2 = (qf * (qf - 1.0)).sqrt() / denom * (cos_ft - 1.0);
    (a0, a1, a2)
}

/// Two-atom block unitary over `{|2,-2,n>, |2,0,n-1>, |2,2,n-2>}`.
///
/// The block has dimension 1 for `n = 0` and 2 for `n = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoAtomBlockUnitary {
    pub n: usize,
    pub matrix: DMatrix<C64>,
}

/// Closed-form `exp(-i H tau)` of the two-atom Tavis–Cummings block.
pub fn two_atom_unitary(n: usize, tau: f64) -> TwoAtomBlockUnitary {
    let i = C64::i();
    let matrix = match n {
        0 => DMatrix::identity(1, 1),
        1 => {
            let (s, c) = (SQRT_2 * tau).sin_cos();
            DMatrix::from_row_slice(2, 2, &[c.into(), -i * s, -i * s, c.into()])
        }
        _ => {
            let nf = n as f64;
            let a2 = 2.0 * (nf - 1.0);
            let b2 = 2.0 * nf;
            let f2 = a2 + b2;
            let (a, b, f) = (a2.sqrt(), b2.sqrt(), f2.sqrt());
            let (s, c) = (f * tau).sin_cos();
            let e00 = (b2 * c + a2) / f2;
            let e01 = -i * b * s / f;
            let e02 = a * b * (c - 1.0) / f2;
            let e12 = -i * a * s / f;
            let e22 = (a2 * c + b2) / f2;
            DMatrix::from_row_slice(
                3,
                3,
                &[
                    e00.into(),
                    e01,
                    e02.into(),
                    e01,
                    c.into(),
                    e12,
                    e02.into(),
                    e12,
                    e22.into(),
                ],
            )
        }
    };
    TwoAtomBlockUnitary { n, matrix }
}

/// One-atom block unitary over `{|1,-1,m>, |1,1,m-1>}`; dimension 1 for `m = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneAtomBlockUnitary {
    pub m: usize,
    pub matrix: DMatrix<C64>,
}

/// Closed-form `exp(-i H tau)` of the Jaynes–Cummings block.
pub fn one_atom_unitary(m: usize, tau: f64) -> OneAtomBlockUnitary {
    let matrix = if m == 0 {
        DMatrix::identity(1, 1)
    } else {
        let (s, c) = ((m as f64).sqrt() * tau).sin_cos();
        let off = -C64::i() * s;
        DMatrix::from_row_slice(2, 2, &[c.into(), off, off, c.into()])
    };
    OneAtomBlockUnitary { m, matrix }
}

/// Parameters a state was computed at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub tau: f64,
    pub s: f64,
    pub theta: f64,
    pub n_max: usize,
}

/// Positions (0-based) of the entries the reduced state may populate:
/// the diagonal, the two symmetric 2x2 blocks `{|100>,|010>}` and
/// `{|101>,|011>}`, and the coherences `|000> - |S>|1>` and `|S>|0> - |111>`.
pub fn in_pattern(i: usize, j: usize) -> bool {
    if i == j {
        return true;
    }
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    matches!((a, b), (1, 2) | (5, 6) | (0, 5) | (0, 6) | (1, 7) | (2, 7))
}

/// 8x8 three-qubit density matrix in the computational basis
/// `|000>, |100>, |010>, |110>, |001>, |101>, |011>, |111>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeQubitDensityMatrix {
    matrix: Matrix8,
    provenance: Option<Provenance>,
}

impl ThreeQubitDensityMatrix {
    pub fn from_matrix(matrix: Matrix8) -> Self {
        Self {
            matrix,
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    /// Pure state `|psi><psi|`.
    pub fn pure(psi: &crate::Vector8) -> Self {
        Self::from_matrix(psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.matrix
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// 0-based entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&to_dynamic(&self.matrix))
    }

    /// Largest magnitude among entries outside [`in_pattern`].
    pub fn off_pattern_magnitude(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..8 {
            for j in 0..8 {
                if !in_pattern(i, j) {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// The same state with qubits `A1` and `A2` exchanged.
    pub fn swap_a1_a2(&self) -> Self {
        let p = |i: usize| (i & 4) | ((i & 1) << 1) | ((i & 2) >> 1);
        let matrix = Matrix8::from_fn(|i, j| self.matrix[(p(i), p(j))]);
        Self {
            matrix,
            provenance: self.provenance,
        }
    }
}

/// The eight independent elements of a reduced state with the cavity zero
/// pattern, in the coupled labelling: populations of `|000>`, `|S>|0>`,
/// `|110>`, `|001>`, `|S>|1>`, `|111>` (with `|S> = (|10>+|01>)/sqrt 2` on
/// A1A2) and the coherences `<000|rho|S 1>`, `<S 0|rho|111>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledElements {
    pub r11: f64,
    pub r22: f64,
    pub r33: f64,
    pub r44: f64,
    pub r55: f64,
    pub r66: f64,
    pub r15: C64,
    pub r26: C64,
}

impl CoupledElements {
    /// Places the elements in the computational-basis 8x8 layout.
    pub fn assemble(&self) -> Matrix8 {
        let mut m = Matrix8::zeros();
        let half = |x: f64| C64::new(x / 2.0, 0.0);
        m[(0, 0)] = self.r11.into();
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            m[(i, j)] = half(self.r22);
        }
        m[(3, 3)] = self.r33.into();
        m[(4, 4)] = self.r44.into();
        for (i, j) in [(5, 5), (5, 6), (6, 5), (6, 6)] {
            m[(i, j)] = half(self.r55);
        }
        m[(7, 7)] = self.r66.into();
        let c15 = self.r15 / SQRT_2;
        let c26 = self.r26 / SQRT_2;
        for j in [5, 6] {
            m[(0, j)] = c15;
            m[(j, 0)] = c15.conj();
        }
        for i in [1, 2] {
            m[(i, 7)] = c26;
            m[(7, i)] = c26.conj();
        }
        m
    }

    /// Reads the elements back, failing if `m` departs from the layout by
    /// more than `tol` anywhere.
    pub fn from_matrix(m: &Matrix8, tol: f64) -> Result<Self> {
        let el = Self {
            r11: m[(0, 0)].re,
            r22: 2.0 * m[(1, 2)].re,
            r33: m[(3, 3)].re,
            r44: m[(4, 4)].re,
            r55: 2.0 * m[(5, 6)].re,
            r66: m[(7, 7)].re,
            r15: m[(0, 5)] * SQRT_2,
            r26: m[(1, 7)] * SQRT_2,
        };
        let rebuilt = el.assemble();
        let mut worst = (0.0f64, 0usize, 0usize);
        for i in 0..8 {
            for j in 0..8 {
                let d = (rebuilt[(i, j)] - m[(i, j)]).norm();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        if worst.0 > tol {
            return Err(contract(format!(
                "matrix lacks the cavity-state structure: entry ({}, {}) off by {:.3e}",
                worst.1, worst.2, worst.0
            )));
        }
        Ok(el)
    }
}

/// Which form of the coherence sums to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClosedFormVariant {
    /// Consistent with unitary `exp(-i H tau)` evolution in both cavities.
    #[default]
    OracleConsistent,
    /// Coherence sums with the `sqrt(q-1)/sqrt(2q-1)` prefactor in `<S0|rho|111>`
    /// and the opposite sign of `<000|rho|S1>`. Disagrees with direct evolution;
    /// kept for discrepancy reporting and fault injection.
    Uncorrected,
}

/// Evaluates the closed-form reduced state at many interaction times for one
/// field configuration. The field weights are enumerated once.
#[derive(Debug, Clone)]
pub struct ClosedFormEvaluator {
    config: FieldConfig,
    diagonal: Vec<FieldTermWeight>,
    adjacent: Vec<FieldTermWeight>,
    variant: ClosedFormVariant,
}

impl ClosedFormEvaluator {
    pub fn new(config: FieldConfig) -> Self {
        Self::with_variant(config, ClosedFormVariant::default())
    }

    pub fn with_variant(config: FieldConfig, variant: ClosedFormVariant) -> Self {
        Self {
            config,
            diagonal: enumerate_field_terms(&config, Band::Diagonal),
            adjacent: enumerate_field_terms(&config, Band::Adjacent),
            variant,
        }
    }

    pub fn config(&self) -> &FieldConfig {
        &self.config
    }

    /// The eight coupled-basis elements at interaction time `tau`.
    pub fn elements(&self, params: EvolutionParams) -> CoupledElements {
        let tau = params.tau();
        let top = self.config.n_max() + 1;
        let atoms: Vec<(f64, f64, f64)> =
            (0..=top).map(|q| two_atom_ground_column(q, tau)).collect();
        let single: Vec<(f64, f64)> = (0..=top)
            .map(|r| {
                let (s, c) = ((r as f64).sqrt() * tau).sin_cos();
                (c, s)
            })
            .collect();

        let mut pops = [NeumaierSum::new(); 6];
        for t in &self.diagonal {
            let (a0, a1, a2) = atoms[t.n - t.k];
            let (c, s) = single[t.n - t.l];
            let (c2, s2) = (c * c, s * s);
            let w = t.weight;
            pops[0] += w * a0 * a0 * c2;
            pops[1] += w * a1 * a1 * c2;
            pops[2] += w * a2 * a2 * c2;
            pops[3] += w * a0 * a0 * s2;
            pops[4] += w * a1 * a1 * s2;
            pops[5] += w * a2 * a2 * s2;
        }

        let mut r15 = NeumaierSum::new();
        let mut r26 = NeumaierSum::new();
        for t in &self.adjacent {
            let q = t.n - t.k;
            let r = t.n - t.l;
            let (a0, a1, _) = atoms[q];
            let (_, a1_up, a2_up) = atoms[q + 1];
            let (c, _) = single[r];
            let (_, s_up) = single[r + 1];
            let w = t.weight;
            match self.variant {
                ClosedFormVariant::OracleConsistent => {
                    // (-i a1')^* (-i b1')^* = -|a1'||b1'|
                    r15 += -w * a0 * c * a1_up * s_up;
                    // (-i a1)(+i |b1'|) = |a1||b1'|
                    r26 += w * a1 * c * a2_up * s_up;
                }
                ClosedFormVariant::Uncorrected => {
                    r15 += w * a0 * c * a1_up * s_up;
                    let a1_alt = if q >= 1 {
                        let qf = q as f64;
                        ((qf - 1.0) / (2.0 * qf - 1.0)).sqrt()
                            * ((2.0 * (2.0 * qf - 1.0)).sqrt() * tau).sin()
                    } else {
                        0.0
                    };
                    r26 += w * a1_alt * c * a2_up * s_up;
                }
            }
        }

        CoupledElements {
            r11: pops[0].value(),
            r22: pops[1].value(),
            r33: pops[2].value(),
            r44: pops[3].value(),
            r55: pops[4].value(),
            r66: pops[5].value(),
            r15: r15.value().into(),
            r26: r26.value().into(),
        }
    }

    pub fn rho(&self, params: EvolutionParams) -> ThreeQubitDensityMatrix {
        let matrix = self.elements(params).assemble();
        ThreeQubitDensityMatrix::from_matrix(matrix).with_provenance(Provenance {
            tau: params.tau(),
            s: self.config.s(),
            theta: self.config.theta(),
            n_max: self.config.n_max(),
        })
    }

    pub fn deficit(&self) -> f64 {
        truncation_deficit(&self.config)
    }
}

/// Closed-form reduced three-qubit state at interaction time `params.tau()`.
pub fn closed_form_rho(params: EvolutionParams, config: &FieldConfig) -> ThreeQubitDensityMatrix {
    ClosedFormEvaluator::new(*config).rho(params)
}

/// Diagonal entries `P_i`, `i = i1 + 2 i2 + 4 i3 + 1`.
pub fn diagonal_probabilities(rho: &ThreeQubitDensityMatrix) -> [f64; 8] {
    std::array::from_fn(|i| rho.entry(i, i).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_defect};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn two_atom_examples() {
        let u = two_atom_unitary(5, 0.0);
        assert!(max_abs_diff(&u.matrix, &DMatrix::identity(3, 3)) < 1e-15);
        let tau = 0.9;
        let u1 = two_atom_unitary(1, tau);
        assert_eq!(u1.matrix.nrows(), 2);
        assert!((u1.matrix[(0, 0)].re - (SQRT_2 * tau).cos()).abs() < 1e-15);
        assert_eq!(two_atom_unitary(0, 3.0).matrix, DMatrix::identity(1, 1));
    }

    #[test]
    fn one_atom_examples() {
        let u = one_atom_unitary(1, FRAC_PI_2);
        assert!(u.matrix[(0, 0)].norm() < 1e-15 && u.matrix[(1, 1)].norm() < 1e-15);
        assert!((u.matrix[(0, 1)] - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(one_atom_unitary(0, 1.7).matrix, DMatrix::identity(1, 1));
    }

    #[test]
    fn block_unitaries_are_unitary() {
        for n in 0..60 {
            for &tau in &[0.0, 0.3, 0.8, 2.0, 14.5] {
                assert!(
                    unitarity_defect(&two_atom_unitary(n, tau).matrix) < 1e-12,
                    "n={n} tau={tau}"
                );
                assert!(unitarity_defect(&one_atom_unitary(n, tau).matrix) < 1e-12);
            }
        }
    }

    #[test]
    fn ground_column_matches_block_unitary() {
        for q in 0..20 {
            let tau = 1.37;
            let (a0, a1, a2) = two_atom_ground_column(q, tau);
            let u = two_atom_unitary(q, tau).matrix;
            assert!((u[(0, 0)] - C64::from(a0)).norm() < 1e-14);
            if q >= 1 {
                assert!((u[(1, 0)] - C64::new(0.0, -a1)).norm() < 1e-14);
            }
            if q >= 2 {
                assert!((u[(2, 0)] - C64::from(a2)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn initial_time_leaves_ground_state() {
        let cfg = FieldConfig::new(1.2, 1.1, 80).unwrap();
        let rho = closed_form_rho(EvolutionParams::new(0.0).unwrap(), &cfg);
        let p = diagonal_probabilities(&rho);
        assert!((p[0] - (1.0 - truncation_deficit(&cfg))).abs() < 1e-12);
        let rest = rho.matrix()
            - Matrix8::from_fn(|i, j| {
                if i == 0 && j == 0 {
                    rho.entry(0, 0)
                } else {
                    C64::from(0.0)
                }
            });
        assert!(rest.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn vacuum_drives_nothing() {
        let cfg = FieldConfig::new(0.0, FRAC_PI_2, 20).unwrap();
        for &tau in &[0.5, 3.0, 14.5] {
            let rho = closed_form_rho(EvolutionParams::new(tau).unwrap(), &cfg);
            assert_eq!(rho.entry(0, 0).re, 1.0);
            assert!((rho.trace() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ground_probability_at_production_point() {
        let rho = closed_form_rho(
            EvolutionParams::new(0.8).unwrap(),
            &FieldConfig::production(),
        );
        let p1 = diagonal_probabilities(&rho)[0];
        assert!((p1 - 0.34).abs() < 0.01, "P1 = {p1}");
    }

    #[test]
    fn state_is_hermitian_with_unit_trace_and_swap_symmetry() {
        for &(s, theta) in &[(0.3, PI / 3.0), (0.9, FRAC_PI_2), (1.2, PI)] {
            let cfg = FieldConfig::new(s, theta, 60).unwrap();
            let eval = ClosedFormEvaluator::new(cfg);
            for &tau in &[0.3, 0.8, 2.0, 14.5] {
                let rho = eval.rho(EvolutionParams::new(tau).unwrap());
                assert!(rho.hermiticity_defect() < 1e-12);
                assert!((rho.trace() - (1.0 - eval.deficit())).abs() < 1e-10);
                assert_eq!(rho.off_pattern_magnitude(), 0.0);
                assert!(
                    max_abs_diff(
                        &to_dynamic(rho.swap_a1_a2().matrix()),
                        &to_dynamic(rho.matrix())
                    ) < 1e-15
                );
                let eig = crate::linalg::hermitian_eigen(&to_dynamic(rho.matrix())).unwrap();
                assert!(eig.values[0] > -1e-10);
            }
        }
    }

    #[test]
    fn coupled_elements_round_trip_and_reject_foreign_structure() {
        let el = CoupledElements {
            r11: 0.4,
            r22: 0.1,
            r33: 0.05,
            r44: 0.2,
            r55: 0.15,
            r66: 0.1,
            r15: C64::new(-0.12, 0.0),
            r26: C64::new(0.03, 0.01),
        };
        let m = el.assemble();
        assert_eq!(CoupledElements::from_matrix(&m, 1e-12).unwrap(), el);
        let mut bad = m;
        bad[(0, 7)] = C64::new(0.01, 0.0);
        bad[(7, 0)] = C64::new(0.01, 0.0);
        assert!(matches!(
            CoupledElements::from_matrix(&bad, 1e-10),
            Err(crate::Error::Contract(_))
        ));
    }

    #[test]
    fn evolution_params_validation() {
        assert!(EvolutionParams::new(-1.0).is_err());
        assert!(EvolutionParams::new(f64::INFINITY).is_err());
    }
}
