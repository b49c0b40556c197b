//! Entanglement diagnostics for three-qubit states.
//!
//! Qubit slots: `A1` is bit 0, `A2` bit 1 and `B` bit 2 of the basis index.
//!
//! The K-way partial transpose transposes only those elements whose bra and
//! ket differ in exactly `K` slots. For three qubits
//! `rho_G^T = rho_3^T + rho_2^T - rho` holds exactly whenever single-slot
//! coherences are real, which is the case for every state produced by the
//! cavity dynamics (it has no single-slot coherences at all).
//!
//! All negativities use the convention `N = -2 * (sum of negative eigenvalues)`,
//! so a Bell pair has negativity 1.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{domain, Result};
use crate::linalg::{fix_phase, hermitian_eigen, to_dynamic, vector8};
use crate::tavis_cummings::{CoupledElements, ThreeQubitDensityMatrix};
use crate::{Matrix8, Vector8, C64};

/// Eigenvalues in `(-NEGATIVE_EPS, 0)` are treated as zero.
pub const NEGATIVE_EPS: f64 = 1e-12;

/// Tolerance used to decide whether a matrix has the cavity-state layout.
pub const PATTERN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitLabel {
    A1,
    A2,
    B,
}

impl QubitLabel {
    pub const ALL: [QubitLabel; 3] = [QubitLabel::A1, QubitLabel::A2, QubitLabel::B];

    /// Tensor slot (0-based bit position in the basis index).
    pub fn slot(self) -> usize {
        match self {
            QubitLabel::A1 => 0,
            QubitLabel::A2 => 1,
            QubitLabel::B => 2,
        }
    }

    fn mask(self) -> usize {
        1 << self.slot()
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QubitLabel::A1 => "A1",
            QubitLabel::A2 => "A2",
            QubitLabel::B => "B",
        };
        f.write_str(s)
    }
}

impl FromStr for QubitLabel {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A1" => Ok(QubitLabel::A1),
            "A2" => Ok(QubitLabel::A2),
            "B" => Ok(QubitLabel::B),
            other => Err(domain(format!("unknown qubit label {other:?}"))),
        }
    }
}

/// Value of `<i|rho^{T_p}|j>`: swap the `p` bits of `i` and `j`.
fn transposed_entry(rho: &Matrix8, i: usize, j: usize, mask: usize) -> C64 {
    let ii = (i & !mask) | (j & mask);
    let jj = (j & !mask) | (i & mask);
    rho[(ii, jj)]
}

/// Global partial transpose with respect to qubit `p`.
pub fn partial_transpose_global(rho: &Matrix8, p: QubitLabel) -> Matrix8 {
    let mask = p.mask();
    Matrix8::from_fn(|i, j| transposed_entry(rho, i, j, mask))
}

/// K-way partial transpose (`K` = 2 or 3) with respect to qubit `p`.
pub fn partial_transpose_kway(rho: &Matrix8, p: QubitLabel, k: usize) -> Result<Matrix8> {
    if !(2..=3).contains(&k) {
        return Err(domain(format!(
            "K-way partial transpose needs K in {{2, 3}}, got {k}"
        )));
    }
    let mask = p.mask();
    Ok(Matrix8::from_fn(|i, j| {
        if (i ^ j).count_ones() as usize == k {
            transposed_entry(rho, i, j, mask)
        } else {
            rho[(i, j)]
        }
    }))
}

/// Pair-selective 2-way partial transposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectiveSpec {
    /// Transpose `A1` on elements where only `A1` and `B` change.
    A1A1B,
    /// Transpose `A1` on elements where only `A1` and `A2` change.
    A1A1A2,
    /// Transpose `B` on elements where only `B` and `A1` change.
    BBA1,
    /// Transpose `B` on elements where only `B` and `A2` change.
    BBA2,
}

impl SelectiveSpec {
    pub const ALL: [SelectiveSpec; 4] = [
        SelectiveSpec::A1A1B,
        SelectiveSpec::A1A1A2,
        SelectiveSpec::BBA1,
        SelectiveSpec::BBA2,
    ];

    /// The qubit whose index is transposed.
    pub fn transposed(self) -> QubitLabel {
        match self {
            SelectiveSpec::A1A1B | SelectiveSpec::A1A1A2 => QubitLabel::A1,
            SelectiveSpec::BBA1 | SelectiveSpec::BBA2 => QubitLabel::B,
        }
    }

    /// The two qubits allowed to differ between bra and ket.
    pub fn pair(self) -> (QubitLabel, QubitLabel) {
        match self {
            SelectiveSpec::A1A1B => (QubitLabel::A1, QubitLabel::B),
            SelectiveSpec::A1A1A2 => (QubitLabel::A1, QubitLabel::A2),
            SelectiveSpec::BBA1 => (QubitLabel::B, QubitLabel::A1),
            SelectiveSpec::BBA2 => (QubitLabel::B, QubitLabel::A2),
        }
    }

    fn pair_mask(self) -> usize {
        let (a, b) = self.pair();
        a.mask() | b.mask()
    }
}

impl fmt::Display for SelectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SelectiveSpec::A1A1B => "A1-A1B",
            SelectiveSpec::A1A1A2 => "A1-A1A2",
            SelectiveSpec::BBA1 => "B-BA1",
            SelectiveSpec::BBA2 => "B-BA2",
        };
        f.write_str(s)
    }
}

impl FromStr for SelectiveSpec {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        SelectiveSpec::ALL
            .into_iter()
            .find(|spec| spec.to_string() == s)
            .ok_or_else(|| domain(format!("unknown selective transpose {s:?}")))
    }
}

/// Selective partial transpose: 2-way elements whose differing slots are
/// exactly `spec.pair()` are transposed on `spec.transposed()`; all other
/// elements are copied.
pub fn selective_partial_transpose(rho: &Matrix8, spec: SelectiveSpec) -> Matrix8 {
    let pair = spec.pair_mask();
    let mask = spec.transposed().mask();
    Matrix8::from_fn(|i, j| {
        if i ^ j == pair {
            transposed_entry(rho, i, j, mask)
        } else {
            rho[(i, j)]
        }
    })
}

/// Negative part of a Hermitian spectrum.
#[derive(Debug, Clone)]
pub struct NegativeSpectrum {
    /// `-2 * sum` of the eigenvalues below `-NEGATIVE_EPS`.
    pub negativity: f64,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vector8>,
}

impl NegativeSpectrum {
    /// `-2 * sum_mu <v_mu| m |v_mu>` over the negative eigenvectors.
    pub fn project(&self, m: &Matrix8) -> f64 {
        -2.0 * self
            .eigenvectors
            .iter()
            .map(|v| (v.adjoint() * m * v)[(0, 0)].re)
            .sum::<f64>()
    }
}

/// Negative eigenvalues and eigenvectors of a Hermitian 8x8 matrix.
pub fn negative_eigensum(m: &Matrix8) -> Result<NegativeSpectrum> {
    let eig = hermitian_eigen(&to_dynamic(m))?;
    let mut eigenvalues = Vec::new();
    let mut eigenvectors = Vec::new();
    for (value, vector) in eig.values.iter().zip(&eig.vectors) {
        if *value < -NEGATIVE_EPS {
            eigenvalues.push(*value);
            eigenvectors.push(vector8(vector));
        }
    }
    let negativity = -2.0 * eigenvalues.iter().sum::<f64>();
    Ok(NegativeSpectrum {
        negativity,
        eigenvalues,
        eigenvectors,
    })
}

/// Global negativity `N_G^p`.
pub fn global_negativity(rho: &Matrix8, p: QubitLabel) -> Result<f64> {
    Ok(negative_eigensum(&partial_transpose_global(rho, p))?.negativity)
}

/// `N_G^B` from the two gated 2x2 eigenvalues of the `B`-transposed cavity
/// state; fails with a contract violation if `rho` lacks that layout.
pub fn closed_form_negativity_b(rho: &ThreeQubitDensityMatrix) -> Result<f64> {
    let el = CoupledElements::from_matrix(rho.matrix(), PATTERN_TOL)?;
    let gated = |a: f64, b: f64, c: f64| {
        let root = ((a - b).powi(2) + 4.0 * c * c).sqrt();
        // ">=" assigns zero
        if a + b < root {
            (a + b) / 2.0 - root / 2.0
        } else {
            0.0
        }
    };
    let lambda1 = gated(el.r33, el.r55, el.r26.norm());
    let lambda2 = gated(el.r22, el.r44, el.r15.norm());
    Ok(-2.0 * (lambda1 + lambda2))
}

/// Global negativity and its split into partial K-way negativities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KwayNegativities {
    pub global: f64,
    pub e3: f64,
    pub e2: f64,
    /// Projection of `rho` itself onto the negative eigenspace.
    pub e0: f64,
}

impl KwayNegativities {
    /// `N_G - (E_3 + E_2 - E_0)`.
    pub fn split_residual(&self) -> f64 {
        self.global - (self.e3 + self.e2 - self.e0)
    }

    /// `E_3 - E_0`: what the 3-way coherences add on top of the untransposed
    /// projection. Zero when the state has no 3-way coherences.
    pub fn three_way_coherence(&self) -> f64 {
        self.e3 - self.e0
    }
}

/// `E_K^p = -2 sum_i <Psi_i|rho_K^{T_p}|Psi_i>` over the negative eigenvectors
/// of the global transpose, for K = 3, 2 and the untransposed `E_0^p`.
pub fn kway_negativities(rho: &Matrix8, p: QubitLabel) -> Result<KwayNegativities> {
    let spectrum = negative_eigensum(&partial_transpose_global(rho, p))?;
    Ok(KwayNegativities {
        global: spectrum.negativity,
        e3: spectrum.project(&partial_transpose_kway(rho, p, 3)?),
        e2: spectrum.project(&partial_transpose_kway(rho, p, 2)?),
        e0: spectrum.project(rho),
    })
}

/// Partial K-way negativity `E_K^p` for `K` in {2, 3}.
pub fn partial_kway_negativity(rho: &Matrix8, p: QubitLabel, k: usize) -> Result<f64> {
    let transposed = partial_transpose_kway(rho, p, k)?;
    Ok(negative_eigensum(&partial_transpose_global(rho, p))?.project(&transposed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionMethod {
    /// Closed-form eigenpairs of the cavity-state layout.
    Analytic,
    /// Generic Hermitian eigensolver, eigenvalues ascending.
    Generic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureStateTerm {
    pub probability: f64,
    pub vector: Vector8,
}

impl PureStateTerm {
    pub fn projector(&self) -> Matrix8 {
        self.vector * self.vector.adjoint()
    }
}

/// Eigendecomposition `rho = sum_i p_i |Phi_i><Phi_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateDecomposition {
    pub terms: Vec<PureStateTerm>,
    pub method: DecompositionMethod,
}

fn clamp_probability(p: f64) -> f64 {
    if p < 0.0 && p > -NEGATIVE_EPS {
        0.0
    } else {
        p
    }
}

/// Eigenpairs of `[[a, c], [c*, b]]` in the basis `(e0, e1)`, as
/// `(minus, plus)`. A degenerate block (`|a - b|`, `|c|` below `NEGATIVE_EPS`)
/// returns `e0` for the minus root.
fn two_level(a: f64, b: f64, c: C64, e0: &Vector8, e1: &Vector8) -> [PureStateTerm; 2] {
    let mean = 0.5 * (a + b);
    let radius = 0.5 * ((a - b).powi(2) + 4.0 * c.norm_sqr()).sqrt();
    let (minus, plus) = if (a - b).abs() < NEGATIVE_EPS && c.norm() < NEGATIVE_EPS {
        (*e0, *e1)
    } else {
        let alpha = 0.5 * (2.0 * c.norm()).atan2(a - b);
        let phase = if c.norm() > 0.0 {
            c / c.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let (sa, ca) = alpha.sin_cos();
        let plus = e0 * C64::from(ca) + e1 * (phase.conj() * sa);
        let minus = e0 * (-phase * sa) + e1 * C64::from(ca);
        (minus, plus)
    };
    [
        PureStateTerm {
            probability: clamp_probability(mean - radius),
            vector: phased(minus),
        },
        PureStateTerm {
            probability: clamp_probability(mean + radius),
            vector: phased(plus),
        },
    ]
}

fn phased(v: Vector8) -> Vector8 {
    let mut d = nalgebra::DVector::from_column_slice(v.as_slice());
    fix_phase(&mut d);
    vector8(&d)
}

fn basis(i: usize) -> Vector8 {
    let mut v = Vector8::zeros();
    v[i] = C64::new(1.0, 0.0);
    v
}

fn pair(i: usize, j: usize, sign: f64) -> Vector8 {
    let mut v = Vector8::zeros();
    v[i] = C64::new(1.0 / SQRT_2, 0.0);
    v[j] = C64::new(sign / SQRT_2, 0.0);
    v
}

/// Pure-state decomposition of `rho` from its eigendecomposition.
///
/// For the cavity-state layout the eight eigenpairs are, in order:
/// the two roots in `span{|000>, |S>|1>}` (minus first), the two roots in
/// `span{|S>|0>, |111>}` (plus first), `|110>`, `|001>`, and the two
/// antisymmetric vectors `(|10>-|01>)|b>/sqrt 2` with zero weight. Anything
/// else falls back to the generic solver.
pub fn decompose(rho: &ThreeQubitDensityMatrix) -> Result<PureStateDecomposition> {
    match CoupledElements::from_matrix(rho.matrix(), PATTERN_TOL) {
        Ok(el) => {
            let [phi1, phi2] = two_level(el.r11, el.r55, el.r15, &basis(0), &pair(5, 6, 1.0));
            let [phi4, phi3] = two_level(el.r22, el.r66, el.r26, &pair(1, 2, 1.0), &basis(7));
            let mut terms = vec![phi1, phi2, phi3, phi4];
            terms.push(PureStateTerm {
                probability: clamp_probability(el.r33),
                vector: basis(3),
            });
            terms.push(PureStateTerm {
                probability: clamp_probability(el.r44),
                vector: basis(4),
            });
            terms.push(PureStateTerm {
                probability: 0.0,
                vector: pair(1, 2, -1.0),
            });
            terms.push(PureStateTerm {
                probability: 0.0,
                vector: pair(5, 6, -1.0),
            });
            Ok(PureStateDecomposition {
                terms,
                method: DecompositionMethod::Analytic,
            })
        }
        Err(_) => decompose_generic(rho.matrix()),
    }
}

/// Pure-state decomposition from the generic Hermitian eigensolver.
pub fn decompose_generic(rho: &Matrix8) -> Result<PureStateDecomposition> {
    let eig = hermitian_eigen(&to_dynamic(rho))?;
    let terms = eig
        .values
        .iter()
        .zip(&eig.vectors)
        .map(|(p, v)| PureStateTerm {
            probability: clamp_probability(*p),
            vector: vector8(v),
        })
        .collect();
    Ok(PureStateDecomposition {
        terms,
        method: DecompositionMethod::Generic,
    })
}

impl PureStateDecomposition {
    pub fn total_probability(&self) -> f64 {
        self.terms.iter().map(|t| t.probability).sum()
    }

    /// `sum_i p_i |Phi_i><Phi_i|`.
    pub fn reconstruct(&self) -> Matrix8 {
        self.terms.iter().fold(Matrix8::zeros(), |acc, t| {
            acc + t.projector() * C64::from(t.probability)
        })
    }

    fn weighted(&self) -> impl Iterator<Item = &PureStateTerm> {
        self.terms.iter().filter(|t| t.probability > 0.0)
    }

    /// `N_PSDG^p = sum_i p_i N_G^p(|Phi_i><Phi_i|)`.
    pub fn psdg_negativity(&self, p: QubitLabel) -> Result<f64> {
        let mut total = 0.0;
        for t in self.weighted() {
            total += t.probability * global_negativity(&t.projector(), p)?;
        }
        Ok(total)
    }

    /// `E_PSD^spec = -2 sum_i p_i sum_mu <v_mu,i| (rho_i)_2^{T_spec} |v_mu,i>`,
    /// where `v_mu,i` are the negative eigenvectors of the 2-way transpose of
    /// `rho_i` on the transposed qubit of `spec`.
    pub fn psd_partial_negativity(&self, spec: SelectiveSpec) -> Result<f64> {
        let mut total = 0.0;
        for t in self.weighted() {
            let pure = t.projector();
            let spectrum =
                negative_eigensum(&partial_transpose_kway(&pure, spec.transposed(), 2)?)?;
            total += t.probability * spectrum.project(&selective_partial_transpose(&pure, spec));
        }
        Ok(total)
    }

    /// Partial 3-way negativity `E_3^p` of every pure state in the decomposition.
    pub fn pure_state_three_way(&self, p: QubitLabel) -> Result<Vec<f64>> {
        self.terms
            .iter()
            .map(|t| kway_negativities(&t.projector(), p).map(|k| k.e3))
            .collect()
    }
}

/// `N_PSDG^p` of `rho` via [`decompose`].
pub fn psdg_negativity(rho: &ThreeQubitDensityMatrix, p: QubitLabel) -> Result<f64> {
    decompose(rho)?.psdg_negativity(p)
}

/// `E_PSD^spec` of `rho` via [`decompose`].
pub fn psd_partial_negativity(rho: &ThreeQubitDensityMatrix, spec: SelectiveSpec) -> Result<f64> {
    decompose(rho)?.psd_partial_negativity(spec)
}

/// Reduced state on the qubits in `keep` (kept in slot order, first kept
/// qubit as the lowest bit).
pub fn partial_trace(rho: &Matrix8, keep: &[QubitLabel]) -> Result<DMatrix<C64>> {
    let mut kept: Vec<QubitLabel> = keep.to_vec();
    kept.sort();
    kept.dedup();
    if kept.is_empty() {
        return Err(domain("partial trace must keep at least one qubit"));
    }
    let keep_mask: usize = kept.iter().map(|q| q.mask()).sum();
    let reduce = |i: usize| -> usize {
        kept.iter()
            .enumerate()
            .map(|(bit, q)| ((i >> q.slot()) & 1) << bit)
            .sum()
    };
    let dim = 1 << kept.len();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..8 {
        for j in 0..8 {
            if (i & !keep_mask) == (j & !keep_mask) {
                out[(reduce(i), reduce(j))] += rho[(i, j)];
            }
        }
    }
    Ok(out)
}

/// `S_l = d/(d-1) (1 - tr rho^2)`.
pub fn linear_entropy(rho: &DMatrix<C64>) -> Result<f64> {
    let d = rho.nrows();
    if d < 2 || !rho.is_square() {
        return Err(domain(format!(
            "linear entropy needs a square matrix of dimension >= 2, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let purity = (rho * rho).trace().re;
    Ok(d as f64 / (d as f64 - 1.0) * (1.0 - purity))
}

/// `|W1> = (|000> + |101> + |011>) / sqrt 3`.
pub fn w1_state() -> Vector8 {
    let a = C64::new(1.0 / 3f64.sqrt(), 0.0);
    let mut v = Vector8::zeros();
    v[0] = a;
    v[5] = a;
    v[6] = a;
    v
}

/// `Tr(rho |W1><W1|)`.
pub fn w1_fidelity(rho: &Matrix8) -> f64 {
    let w = w1_state();
    (w.adjoint() * rho * w)[(0, 0)].re
}

/// Probability of finding `A1A2` in `(|10> + |01>)/sqrt 2` after tracing out `B`.
pub fn bell_projection_probability(rho: &Matrix8) -> f64 {
    [(1, 2), (5, 6)]
        .iter()
        .map(|&(i, j)| 0.5 * (rho[(i, i)] + rho[(j, j)] + rho[(i, j)] + rho[(j, i)]).re)
        .sum()
}

/// A value per qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerQubit<T> {
    pub a1: T,
    pub a2: T,
    pub b: T,
}

impl<T: Copy> PerQubit<T> {
    pub fn try_from_fn<F: FnMut(QubitLabel) -> Result<T>>(mut f: F) -> Result<Self> {
        Ok(Self {
            a1: f(QubitLabel::A1)?,
            a2: f(QubitLabel::A2)?,
            b: f(QubitLabel::B)?,
        })
    }

    pub fn get(&self, p: QubitLabel) -> T {
        match p {
            QubitLabel::A1 => self.a1,
            QubitLabel::A2 => self.a2,
            QubitLabel::B => self.b,
        }
    }
}

/// Every diagnostic at one point of the dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativityReport {
    pub kway: PerQubit<KwayNegativities>,
    /// `N_G^B` from the gated closed form; `None` when `rho` lacks the cavity layout.
    pub closed_form_global_b: Option<f64>,
    pub psdg: PerQubit<f64>,
    pub psd_b_ba1: f64,
    pub psd_b_ba2: f64,
    pub psd_a1_a1a2: f64,
    pub psd_a1_a1b: f64,
    pub linear_entropy_b: f64,
    pub w1_fidelity: f64,
    pub bell_projection: f64,
    /// Largest `|E_3^p|` over the pure states of the decomposition and all `p`.
    pub max_pure_three_way: f64,
}

impl NegativityReport {
    pub fn compute(rho: &ThreeQubitDensityMatrix) -> Result<Self> {
        let m = rho.matrix();
        let decomposition = decompose(rho)?;
        let kway = PerQubit::try_from_fn(|p| kway_negativities(m, p))?;
        let psdg = PerQubit::try_from_fn(|p| decomposition.psdg_negativity(p))?;
        let mut max_pure_three_way = 0.0f64;
        for p in QubitLabel::ALL {
            for e3 in decomposition.pure_state_three_way(p)? {
                max_pure_three_way = max_pure_three_way.max(e3.abs());
            }
        }
        Ok(Self {
            kway,
            closed_form_global_b: closed_form_negativity_b(rho).ok(),
            psdg,
            psd_b_ba1: decomposition.psd_partial_negativity(SelectiveSpec::BBA1)?,
            psd_b_ba2: decomposition.psd_partial_negativity(SelectiveSpec::BBA2)?,
            psd_a1_a1a2: decomposition.psd_partial_negativity(SelectiveSpec::A1A1A2)?,
            psd_a1_a1b: decomposition.psd_partial_negativity(SelectiveSpec::A1A1B)?,
            linear_entropy_b: linear_entropy(&partial_trace(m, &[QubitLabel::B])?)?,
            w1_fidelity: w1_fidelity(m),
            bell_projection: bell_projection_probability(m),
            max_pure_three_way,
        })
    }

    pub fn global(&self, p: QubitLabel) -> f64 {
        self.kway.get(p).global
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(amps: &[(usize, f64)]) -> Vector8 {
        let mut v = Vector8::zeros();
        for &(i, a) in amps {
            v[i] = C64::new(a, 0.0);
        }
        v.normalize()
    }

    /// `(|00> + |11>)/sqrt 2` on (A1, B), A2 in `|0>`.
    fn bell_a1_b() -> Matrix8 {
        let v = ket(&[(0, 1.0), (5, 1.0)]);
        v * v.adjoint()
    }

    fn ghz() -> Matrix8 {
        let v = ket(&[(0, 1.0), (7, 1.0)]);
        v * v.adjoint()
    }

    #[test]
    fn diagonal_matrices_unchanged_by_every_transpose() {
        let d = Matrix8::from_diagonal(&Vector8::from_fn(|i, _| C64::new(i as f64 / 28.0, 0.0)));
        for p in QubitLabel::ALL {
            assert_eq!(partial_transpose_global(&d, p), d);
            for k in [2, 3] {
                assert_eq!(partial_transpose_kway(&d, p, k).unwrap(), d);
            }
        }
        for spec in SelectiveSpec::ALL {
            assert_eq!(selective_partial_transpose(&d, spec), d);
        }
    }

    #[test]
    fn kway_rejects_other_orders() {
        assert!(partial_transpose_kway(&ghz(), QubitLabel::B, 1).is_err());
        assert!(partial_transpose_kway(&ghz(), QubitLabel::B, 4).is_err());
    }

    #[test]
    fn bell_pair_transpose_has_eigenvalue_minus_half() {
        let t = partial_transpose_global(&bell_a1_b(), QubitLabel::B);
        let spectrum = negative_eigensum(&t).unwrap();
        assert_eq!(spectrum.eigenvalues.len(), 1);
        assert!((spectrum.eigenvalues[0] + 0.5).abs() < 1e-14);
        assert!((spectrum.negativity - 1.0).abs() < 1e-14);
    }

    #[test]
    fn psd_matrix_has_zero_negativity() {
        assert_eq!(negative_eigensum(&bell_a1_b()).unwrap().negativity, 0.0);
    }

    #[test]
    fn non_hermitian_is_a_contract_violation() {
        let mut m = Matrix8::identity();
        m[(0, 3)] = C64::new(1e-6, 0.0);
        assert!(matches!(
            negative_eigensum(&m),
            Err(crate::Error::Contract(_))
        ));
    }

    #[test]
    fn w1_negativity_with_respect_to_b() {
        let w = w1_state();
        let n = global_negativity(&(w * w.adjoint()), QubitLabel::B).unwrap();
        let schmidt = ((1.0f64 / 3.0).sqrt() + (2.0f64 / 3.0).sqrt()).powi(2) - 1.0;
        assert!((n - schmidt).abs() < 1e-12);
        assert!((n - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn w1_negativity_with_respect_to_a1() {
        // A1 | A2 B split: |0>(|00>+|11>)/sqrt3 + |1>|01>/sqrt3 in (A2,B) order
        // reduced A1 state diag(2/3, 1/3) after Schmidt: sqrt(2/3), sqrt(1/3)
        let w = w1_state();
        let n = global_negativity(&(w * w.adjoint()), QubitLabel::A1).unwrap();
        let schmidt = ((2.0f64 / 3.0).sqrt() + (1.0f64 / 3.0).sqrt()).powi(2) - 1.0;
        assert!((n - schmidt).abs() < 1e-12);
    }

    #[test]
    fn ghz_is_all_three_way() {
        let rho = ghz();
        assert_eq!(
            partial_transpose_kway(&rho, QubitLabel::A2, 2).unwrap(),
            rho
        );
        for p in QubitLabel::ALL {
            let k = kway_negativities(&rho, p).unwrap();
            assert!((k.global - 1.0).abs() < 1e-12);
            assert!((k.e3 - 1.0).abs() < 1e-12);
            assert!((k.e2 - k.e0).abs() < 1e-14);
        }
    }

    #[test]
    fn selective_specs_parse() {
        for spec in SelectiveSpec::ALL {
            assert_eq!(spec.to_string().parse::<SelectiveSpec>().unwrap(), spec);
        }
        assert!("A2-A2B".parse::<SelectiveSpec>().is_err());
        assert!("C".parse::<QubitLabel>().is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let bell = bell_a1_b();
        let a1 = partial_trace(&bell, &[QubitLabel::A1]).unwrap();
        assert!((a1[(0, 0)].re - 0.5).abs() < 1e-15 && (a1[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(a1[(0, 1)].norm() < 1e-15);
        assert!((linear_entropy(&a1).unwrap() - 1.0).abs() < 1e-14);
        assert!(partial_trace(&bell, &[]).is_err());

        // product |0><0|_A1 (x) sigma_{A2 B}
        let sigma = ket(&[(0, 0.6), (2, 0.0), (4, 0.8)]);
        let rho = sigma * sigma.adjoint();
        let kept = partial_trace(&rho, &[QubitLabel::A2, QubitLabel::B]).unwrap();
        assert_eq!(kept.nrows(), 4);
        // indices in (A2, B): |00> -> 0, |01> -> 2
        assert!((kept[(0, 0)].re - 0.36).abs() < 1e-14);
        assert!((kept[(2, 2)].re - 0.64).abs() < 1e-14);
        assert!((kept[(0, 2)].re - 0.48).abs() < 1e-14);
        assert!((partial_trace(&rho, &QubitLabel::ALL).unwrap() - to_dynamic(&rho)).norm() < 1e-15);
    }

    #[test]
    fn linear_entropy_limits() {
        let pure = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), 0.0.into(), 0.0.into(), 0.0.into()],
        );
        assert_eq!(linear_entropy(&pure).unwrap(), 0.0);
        assert!(linear_entropy(&DMatrix::identity(1, 1)).is_err());
        let mixed4 = DMatrix::<C64>::identity(4, 4) * C64::new(0.25, 0.0);
        assert!((linear_entropy(&mixed4).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn w1_fidelity_examples() {
        let w = w1_state();
        assert!((w1_fidelity(&(w * w.adjoint())) - 1.0).abs() < 1e-15);
        let ground = ket(&[(0, 1.0)]);
        assert!((w1_fidelity(&(ground * ground.adjoint())) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bell_projection_matches_reduced_state() {
        let v = ket(&[(0, 0.3), (1, 0.5), (2, 0.4), (5, -0.2), (6, 0.6), (7, 0.1)]);
        let rho = v * v.adjoint();
        let reduced = partial_trace(&rho, &[QubitLabel::A1, QubitLabel::A2]).unwrap();
        let psi = nalgebra::DVector::from_vec(vec![
            0.0.into(),
            C64::new(1.0 / SQRT_2, 0.0),
            C64::new(1.0 / SQRT_2, 0.0),
            0.0.into(),
        ]);
        let direct = (psi.adjoint() * reduced * &psi)[(0, 0)].re;
        assert!((bell_projection_probability(&rho) - direct).abs() < 1e-12);
    }

    #[test]
    fn degenerate_block_uses_ground_vector_first() {
        let el = CoupledElements {
            r11: 0.3,
            r22: 0.2,
            r33: 0.0,
            r44: 0.2,
            r55: 0.3,
            r66: 0.0,
            r15: 0.0.into(),
            r26: 0.0.into(),
        };
        let rho = ThreeQubitDensityMatrix::from_matrix(el.assemble());
        let d = decompose(&rho).unwrap();
        assert_eq!(d.method, DecompositionMethod::Analytic);
        assert_eq!(d.terms[0].vector, basis(0));
        assert!((d.terms[1].vector - pair(5, 6, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn foreign_structure_falls_back_to_generic() {
        let rho = ThreeQubitDensityMatrix::from_matrix(ghz());
        let d = decompose(&rho).unwrap();
        assert_eq!(d.method, DecompositionMethod::Generic);
        assert!((d.reconstruct() - ghz()).norm() < 1e-12);
        assert!(d
            .terms
            .windows(2)
            .all(|w| w[0].probability <= w[1].probability));
        assert!(closed_form_negativity_b(&rho).is_err());
    }

    mod properties {
        use super::super::*;
        use crate::linalg::unitary_from_hermitian;
        use proptest::prelude::*;

        fn psd_from(entries: &[f64], real: bool) -> Matrix8 {
            let a = Matrix8::from_fn(|i, j| {
                let k = 2 * (8 * i + j);
                C64::new(entries[k], if real { 0.0 } else { entries[k + 1] })
            });
            let m = a * a.adjoint();
            m / m.trace()
        }

        fn entries() -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-1.0f64..1.0, 128)
        }

        fn max_abs(m: &Matrix8) -> f64 {
            m.iter().map(|z| z.norm()).fold(0.0, f64::max)
        }

        proptest! {
            #[test]
            fn transposes_are_hermitian_trace_preserving_involutions(e in entries()) {
                let rho = psd_from(&e, false);
                for p in QubitLabel::ALL {
                    let t = partial_transpose_global(&rho, p);
                    prop_assert_eq!(partial_transpose_global(&t, p), rho);
                    prop_assert!(max_abs(&(t - t.adjoint())) < 1e-15);
                    prop_assert!((t.trace() - rho.trace()).norm() < 1e-15);
                    for k in [2, 3] {
                        let t = partial_transpose_kway(&rho, p, k).unwrap();
                        prop_assert_eq!(partial_transpose_kway(&t, p, k).unwrap(), rho);
                        prop_assert!(max_abs(&(t - t.adjoint())) < 1e-15);
                    }
                }
                for spec in SelectiveSpec::ALL {
                    let t = selective_partial_transpose(&rho, spec);
                    prop_assert_eq!(selective_partial_transpose(&t, spec), rho);
                    prop_assert!(max_abs(&(t - t.adjoint())) < 1e-15);
                }
            }

            #[test]
            fn selective_pairs_rebuild_two_way_transpose(e in entries()) {
                let rho = psd_from(&e, false);
                let b = selective_partial_transpose(&rho, SelectiveSpec::BBA1)
                    + selective_partial_transpose(&rho, SelectiveSpec::BBA2) - rho;
                prop_assert!(max_abs(&(b - partial_transpose_kway(&rho, QubitLabel::B, 2).unwrap())) < 1e-14);
                let a = selective_partial_transpose(&rho, SelectiveSpec::A1A1B)
                    + selective_partial_transpose(&rho, SelectiveSpec::A1A1A2) - rho;
                prop_assert!(max_abs(&(a - partial_transpose_kway(&rho, QubitLabel::A1, 2).unwrap())) < 1e-14);
            }

            #[test]
            fn kway_parts_rebuild_global_transpose_for_real_states(e in entries()) {
                let rho = psd_from(&e, true);
                for p in QubitLabel::ALL {
                    let sum = partial_transpose_kway(&rho, p, 3).unwrap()
                        + partial_transpose_kway(&rho, p, 2).unwrap() - rho;
                    prop_assert!(max_abs(&(sum - partial_transpose_global(&rho, p))) < 1e-14);
                    let k = kway_negativities(&rho, p).unwrap();
                    prop_assert!(k.split_residual().abs() < 1e-10);
                    prop_assert!(k.global >= 0.0);
                }
            }

            #[test]
            fn eigensum_is_unitarily_invariant(e in entries(), g in proptest::collection::vec(-1.0f64..1.0, 128)) {
                let t = partial_transpose_global(&psd_from(&e, false), QubitLabel::B);
                let h = psd_from(&g, false) * C64::new(5.0, 0.0);
                let u = unitary_from_hermitian(&to_dynamic(&h), 1.0).unwrap();
                let u = Matrix8::from_fn(|i, j| u[(i, j)]);
                let rotated = u * t * u.adjoint();
                let rotated = (rotated + rotated.adjoint()) * C64::new(0.5, 0.0);
                let a = negative_eigensum(&t).unwrap().negativity;
                let b = negative_eigensum(&rotated).unwrap().negativity;
                prop_assert!((a - b).abs() < 1e-10);
            }

            #[test]
            fn generic_decomposition_reconstructs(e in entries()) {
                let rho = psd_from(&e, false);
                let d = decompose_generic(&rho).unwrap();
                prop_assert!(max_abs(&(d.reconstruct() - rho)) < 1e-10);
                prop_assert!((d.total_probability() - 1.0).abs() < 1e-10);
                prop_assert!(d.terms.iter().all(|t| t.probability >= 0.0));
            }
        }
    }
}
