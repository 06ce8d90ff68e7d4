//! Generic checks for `N = 2` pseudo-supersymmetric systems.
//!
//! A system is a Hamiltonian `H`, a nilpotent supercharge `Q`, a grading `τ`
//! and a metric `η`. The supercharge moves states out of one grade sector
//! (the *source*) into the other (the *target*). Which sector is the source
//! depends on conventions, so it is detected from `Q` itself and every block
//! decomposition is written in the order (source, target), with `Q` in the
//! lower-left corner. With a source `ψ` of eigenvalue `E` the image `Qψ`
//! satisfies `⟨⟨Qψ, Qψ⟩⟩ = 2E ⟨⟨ψ, ψ⟩⟩`.

use nalgebra::{DMatrix, DVector, SVD};
use serde::Serialize;

use crate::algebra::{pseudo_adjoint, MetricOperator, RelationResidual};
use crate::error::{Error, Result};
use crate::matops::{
    anticommutator, c64, commutator, eig, hermitian_eig, inertia_of, null_space, ComplexMatrix, Inertia, Tolerance,
    C64,
};

#[derive(Clone, Debug)]
pub struct PseudoSusySystem {
    pub h: ComplexMatrix,
    pub q: ComplexMatrix,
    pub tau: ComplexMatrix,
    pub eta: MetricOperator,
    /// Projector onto the subspace where `{Q, Q♯} = 2H` is expected to hold.
    pub protected: ComplexMatrix,
}

impl PseudoSusySystem {
    pub fn new(
        h: ComplexMatrix,
        q: ComplexMatrix,
        tau: ComplexMatrix,
        eta: MetricOperator,
        protected: Option<ComplexMatrix>,
    ) -> Result<Self> {
        let n = h.dim();
        let protected = protected.unwrap_or_else(|| ComplexMatrix::identity(n));
        let dims: [(&'static str, usize); 4] = [
            ("PseudoSusySystem::new (Q)", q.dim()),
            ("PseudoSusySystem::new (tau)", tau.dim()),
            ("PseudoSusySystem::new (eta)", eta.dim()),
            ("PseudoSusySystem::new (protected)", protected.dim()),
        ];
        for (op, d) in dims {
            if d != n {
                return Err(Error::Shape { op, left: n, right: d });
            }
        }
        Ok(PseudoSusySystem {
            h,
            q,
            tau,
            eta,
            protected,
        })
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn q_sharp(&self) -> ComplexMatrix {
        pseudo_adjoint(&self.q, &self.eta).expect("dimensions validated at construction")
    }

    /// `X ↦ U X U†` applied to every operator; `U` must be unitary.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        let ud = u.dagger();
        let c = |x: &ComplexMatrix| u * x * &ud;
        let eta = c(self.eta.matrix());
        let eta = MetricOperator::new((&eta + eta.dagger()) * 0.5)?;
        Self::new(c(&self.h), c(&self.q), c(&self.tau), eta, Some(c(&self.protected)))
    }

    /// Replaces `Q` by another operator, keeping `H`, `τ` and `η`.
    pub fn with_supercharge(&self, q: ComplexMatrix) -> Result<Self> {
        Self::new(self.h.clone(), q, self.tau.clone(), self.eta.clone(), Some(self.protected.clone()))
    }

    pub fn with_hamiltonian(&self, h: ComplexMatrix) -> Result<Self> {
        Self::new(h, self.q.clone(), self.tau.clone(), self.eta.clone(), Some(self.protected.clone()))
    }

    /// Grade of the sector on which `Q` acts nontrivially (`+1` when `Q = 0`).
    pub fn source_grade(&self) -> i8 {
        let id = ComplexMatrix::identity(self.dim());
        let p_plus = (&id + &self.tau) * 0.5;
        let p_minus = (&id - &self.tau) * 0.5;
        if (&self.q * p_minus).norm() > (&self.q * p_plus).norm() {
            -1
        } else {
            1
        }
    }
}

/// Residuals of `Q² = 0`, `[Q,H] = 0`, `{Q,Q♯} = 2H` (protected),
/// `{τ,Q} = 0`, `[τ,η] = 0`, `τ² = 1` and `τ = τ†`.
pub fn verify_algebra(sys: &PseudoSusySystem, tol: Tolerance) -> Vec<RelationResidual> {
    let q = &sys.q;
    let h = &sys.h;
    let tau = &sys.tau;
    let eta = sys.eta.matrix();
    let qs = sys.q_sharp();
    let id = ComplexMatrix::identity(sys.dim());
    let anti = anticommutator(q, &qs).expect("square operands of equal size");
    let two_h = h * 2.0;
    vec![
        RelationResidual::vanishes("Q² = 0", &(q * q), q.norm().powi(2), tol),
        RelationResidual::vanishes(
            "[Q, H] = 0",
            &commutator(q, h).expect("validated"),
            q.norm() * h.norm(),
            tol,
        ),
        RelationResidual::vanishes(
            "{Q, Q♯} = 2H (protected subspace)",
            &((&anti - &two_h) * &sys.protected),
            anti.norm().max(two_h.norm()),
            tol,
        ),
        RelationResidual::vanishes(
            "{τ, Q} = 0",
            &anticommutator(tau, q).expect("validated"),
            tau.norm() * q.norm(),
            tol,
        ),
        RelationResidual::vanishes(
            "[τ, η] = 0",
            &commutator(tau, eta).expect("validated"),
            tau.norm() * eta.norm(),
            tol,
        ),
        RelationResidual::compare("τ² = 1", &(tau * tau), &id, tol),
        RelationResidual::compare("τ = τ†", tau, &tau.dagger(), tol),
    ]
}

/// `max |({Q,Q♯} − 2H)_{ij}|` over the whole space, including truncation
/// edge states.
pub fn full_space_defect(sys: &PseudoSusySystem) -> f64 {
    let anti = anticommutator(&sys.q, &sys.q_sharp()).expect("validated");
    (anti - &sys.h * 2.0).max_abs()
}

/// Block form of a graded system, ordered (source, target).
#[derive(Clone, Debug)]
pub struct TwoComponentForm {
    pub source_grade: i8,
    /// Target × source block of `Q`.
    pub d: DMatrix<C64>,
    /// Source × target block of `Q♯`.
    pub d_sharp: DMatrix<C64>,
    pub eta_plus: MetricOperator,
    pub eta_minus: MetricOperator,
    pub h_plus: ComplexMatrix,
    pub h_minus: ComplexMatrix,
    basis_plus: DMatrix<C64>,
    basis_minus: DMatrix<C64>,
    protected_plus: ComplexMatrix,
    protected_minus: ComplexMatrix,
}

impl TwoComponentForm {
    fn pick<'a, T>(&self, grade: i8, plus: &'a T, minus: &'a T) -> &'a T {
        if grade > 0 {
            plus
        } else {
            minus
        }
    }

    pub fn target_grade(&self) -> i8 {
        -self.source_grade
    }

    pub fn eta_source(&self) -> &MetricOperator {
        self.pick(self.source_grade, &self.eta_plus, &self.eta_minus)
    }

    pub fn eta_target(&self) -> &MetricOperator {
        self.pick(self.target_grade(), &self.eta_plus, &self.eta_minus)
    }

    pub fn h_source(&self) -> &ComplexMatrix {
        self.pick(self.source_grade, &self.h_plus, &self.h_minus)
    }

    pub fn h_target(&self) -> &ComplexMatrix {
        self.pick(self.target_grade(), &self.h_plus, &self.h_minus)
    }

    pub fn basis_source(&self) -> &DMatrix<C64> {
        self.pick(self.source_grade, &self.basis_plus, &self.basis_minus)
    }

    pub fn basis_target(&self) -> &DMatrix<C64> {
        self.pick(self.target_grade(), &self.basis_plus, &self.basis_minus)
    }

    /// Checks of `D♯ = η_s⁻¹ D† η_t`, `H_s = D♯D/2` and `H_t = DD♯/2`, the
    /// latter two on the protected part of each sector.
    pub fn residuals(&self, tol: Tolerance) -> Vec<RelationResidual> {
        let es = self.eta_source();
        let et = self.eta_target();
        let formula = es.inverse().as_dmatrix() * self.d.adjoint() * et.matrix().as_dmatrix();
        let half = c64(0.5, 0.0);
        let dsd = &self.d_sharp * &self.d * half;
        let ddst = &self.d * &self.d_sharp * half;
        let (ps, pt) = if self.source_grade > 0 {
            (&self.protected_plus, &self.protected_minus)
        } else {
            (&self.protected_minus, &self.protected_plus)
        };
        let hs = self.h_source().as_dmatrix();
        let ht = self.h_target().as_dmatrix();
        let scale_ds = formula.norm().max(self.d_sharp.norm());
        vec![
            RelationResidual::new(
                "D♯ = η_s⁻¹ D† η_t",
                (&self.d_sharp - &formula).norm(),
                tol.scaled(scale_ds),
            ),
            RelationResidual::new(
                "H_s = D♯D/2 (protected)",
                ((hs - &dsd) * ps.as_dmatrix()).norm(),
                tol.scaled(hs.norm().max(dsd.norm())),
            ),
            RelationResidual::new(
                "H_t = DD♯/2 (protected)",
                ((ht - &ddst) * pt.as_dmatrix()).norm(),
                tol.scaled(ht.norm().max(ddst.norm())),
            ),
        ]
    }

    /// `(Q, H, η)` rebuilt in the original basis from the blocks.
    pub fn reassemble(&self) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
        let bs = self.basis_source();
        let bt = self.basis_target();
        let q = bt * &self.d * bs.adjoint();
        let h = bs * self.h_source().as_dmatrix() * bs.adjoint() + bt * self.h_target().as_dmatrix() * bt.adjoint();
        let eta = bs * self.eta_source().matrix().as_dmatrix() * bs.adjoint()
            + bt * self.eta_target().matrix().as_dmatrix() * bt.adjoint();
        (ComplexMatrix::from_raw(q), ComplexMatrix::from_raw(h), ComplexMatrix::from_raw(eta))
    }
}

fn sector_bases(tau: &ComplexMatrix, tol: Tolerance) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let n = tau.dim();
    let unit = |k: usize| {
        let mut v = DVector::zeros(n);
        v[k] = c64(1.0, 0.0);
        v
    };
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    if tau.is_diagonal(tol.abs) {
        for (k, d) in tau.diagonal().into_iter().enumerate() {
            if (d - c64(1.0, 0.0)).norm() <= tol.abs {
                plus.push(unit(k));
            } else if (d + c64(1.0, 0.0)).norm() <= tol.abs {
                minus.push(unit(k));
            } else {
                return Err(Error::Structure(format!("grading has diagonal entry {d} ≠ ±1")));
            }
        }
    } else {
        if !tau.is_hermitian(tol) {
            return Err(Error::Structure(
                "grading operator is not Hermitian, so its sectors are not orthogonal".into(),
            ));
        }
        let (vals, vecs) = hermitian_eig(tau)?;
        for (k, &v) in vals.iter().enumerate() {
            let col = vecs.as_dmatrix().column(k).into_owned();
            if (v - 1.0).abs() <= 1e-8 {
                plus.push(col);
            } else if (v + 1.0).abs() <= 1e-8 {
                minus.push(col);
            } else {
                return Err(Error::Structure(format!("grading has eigenvalue {v} ≠ ±1")));
            }
        }
    }
    if plus.is_empty() || minus.is_empty() {
        return Err(Error::Structure("one grade sector is empty".into()));
    }
    Ok((DMatrix::from_columns(&plus), DMatrix::from_columns(&minus)))
}

/// Splits the system into its grade sectors.
///
/// Fails with a structure error when `τ` is not an orthogonal involution, or
/// when `Q`, `H` or `η` leak between or within sectors beyond tolerance.
pub fn two_component(sys: &PseudoSusySystem, tol: Tolerance) -> Result<TwoComponentForm> {
    let (bp, bm) = sector_bases(&sys.tau, tol)?;
    let block = |m: &ComplexMatrix, left: &DMatrix<C64>, right: &DMatrix<C64>| left.adjoint() * m.as_dmatrix() * right;

    let q = &sys.q;
    let q_pm = block(q, &bp, &bm);
    let q_mp = block(q, &bm, &bp);
    let q_leak = block(q, &bp, &bp).norm().max(block(q, &bm, &bm).norm());
    let q_tol = tol.scaled(q.norm());
    if q_leak > q_tol {
        return Err(Error::Structure(format!("Q has a diagonal block of norm {q_leak:e}")));
    }
    let source_grade = sys.source_grade();
    let (d, q_other) = if source_grade < 0 { (q_pm, q_mp) } else { (q_mp, q_pm) };
    if q_other.norm() > q_tol {
        return Err(Error::Structure(format!(
            "Q acts on both sectors (secondary block norm {:e})",
            q_other.norm()
        )));
    }

    let eta = sys.eta.matrix();
    let eta_leak = block(eta, &bp, &bm).norm();
    if eta_leak > tol.scaled(eta.norm()) {
        return Err(Error::Structure(format!("metric couples the sectors, block norm {eta_leak:e}")));
    }
    let h_leak = block(&sys.h, &bp, &bm).norm().max(block(&sys.h, &bm, &bp).norm());
    if h_leak > tol.scaled(sys.h.norm()) {
        return Err(Error::Structure(format!("Hamiltonian couples the sectors, block norm {h_leak:e}")));
    }

    let qs = sys.q_sharp();
    let d_sharp = if source_grade < 0 {
        block(&qs, &bm, &bp)
    } else {
        block(&qs, &bp, &bm)
    };
    let sq = |m: DMatrix<C64>| ComplexMatrix::from_raw(m);
    let herm = |m: DMatrix<C64>| ComplexMatrix::from_raw((&m + m.adjoint()) * c64(0.5, 0.0));
    Ok(TwoComponentForm {
        source_grade,
        eta_plus: MetricOperator::with_tolerance(herm(block(eta, &bp, &bp)), tol)?,
        eta_minus: MetricOperator::with_tolerance(herm(block(eta, &bm, &bm)), tol)?,
        h_plus: sq(block(&sys.h, &bp, &bp)),
        h_minus: sq(block(&sys.h, &bm, &bm)),
        protected_plus: sq(block(&sys.protected, &bp, &bp)),
        protected_minus: sq(block(&sys.protected, &bm, &bm)),
        d,
        d_sharp,
        basis_plus: bp,
        basis_minus: bm,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairingOptions {
    /// Eigenvalues closer than `group_rel · max(1, ρ(H))` are merged.
    pub group_rel: f64,
    /// Relative tolerance for eigenvector, grade and annihilation tests.
    pub check_rel: f64,
}

impl Default for PairingOptions {
    fn default() -> Self {
        PairingOptions {
            group_rel: 1e-8,
            check_rel: 1e-8,
        }
    }
}

/// Threshold used on singular values of unit-scale subspace problems.
const SUBSPACE_SIGMA: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralPair {
    pub eigenvalue: f64,
    #[serde(skip)]
    pub plus_vector: DVector<C64>,
    #[serde(skip)]
    pub minus_vector: DVector<C64>,
    pub eta_norm_plus: f64,
    pub eta_norm_minus: f64,
    pub sign_plus: i8,
    pub sign_minus: i8,
    /// `|⟨⟨Qψ,Qψ⟩⟩ − 2E⟨⟨ψ,ψ⟩⟩| / max(1, |2E⟨⟨ψ,ψ⟩⟩|)`.
    pub spect_residual: f64,
    pub eigen_residual: f64,
    pub grade_residual: f64,
    pub verified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnpairedKind {
    Zero,
    Edge,
    Unmatched,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnpairedState {
    pub eigenvalue: [f64; 2],
    #[serde(skip)]
    pub vector: DVector<C64>,
    pub grade: i8,
    pub kind: UnpairedKind,
    pub eta_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComplexPair {
    pub value: [f64; 2],
    pub conjugate: Option<[f64; 2]>,
    pub multiplicity: usize,
    pub matched: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectrumLevel {
    pub value: [f64; 2],
    pub multiplicity: usize,
    pub grades: Vec<i8>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairingFailure {
    pub eigenvalue: [f64; 2],
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairingReport {
    pub source_grade: i8,
    pub pairs: Vec<SpectralPair>,
    pub unpaired: Vec<UnpairedState>,
    pub complex_pairs: Vec<ComplexPair>,
    pub failures: Vec<PairingFailure>,
    pub spectrum: Vec<SpectrumLevel>,
    pub grouping_threshold: f64,
    /// Smallest distance between distinct eigenvalue groups.
    pub min_gap: Option<f64>,
    /// Largest distance between members of one group.
    pub max_group_spread: f64,
}

impl PairingReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn unpaired_of(&self, kind: UnpairedKind) -> impl Iterator<Item = &UnpairedState> {
        self.unpaired.iter().filter(move |u| u.kind == kind)
    }
}

struct Group {
    value: C64,
    members: Vec<C64>,
}

fn group_eigenvalues(vals: &[C64], threshold: f64) -> Vec<Group> {
    let mut groups: Vec<Group> = Vec::new();
    for &v in vals {
        match groups.iter_mut().find(|g| (g.members[0] - v).norm() <= threshold) {
            Some(g) => g.members.push(v),
            None => groups.push(Group {
                value: v,
                members: vec![v],
            }),
        }
    }
    for g in groups.iter_mut() {
        let sum: C64 = g.members.iter().sum();
        g.value = sum / g.members.len() as f64;
    }
    groups.sort_by(|a, b| {
        a.value
            .re
            .partial_cmp(&b.value.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.value.im.partial_cmp(&b.value.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    groups
}

fn pair_of(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// The `k` right singular vectors of `m` with smallest singular values.
fn smallest_right_vectors(m: &DMatrix<C64>, k: usize) -> DMatrix<C64> {
    let svd = SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| {
        svd.singular_values[a]
            .partial_cmp(&svd.singular_values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let cols: Vec<DVector<C64>> = idx.iter().take(k).map(|&i| v_t.row(i).adjoint()).collect();
    DMatrix::from_columns(&cols)
}

/// Right singular vectors of a tall `m` split into (σ ≤ threshold, σ > threshold).
fn split_right_vectors(m: &DMatrix<C64>, threshold: f64) -> (DMatrix<C64>, DMatrix<C64>) {
    let cols = m.ncols();
    if cols == 0 {
        return (DMatrix::zeros(0, 0), DMatrix::zeros(0, 0));
    }
    let svd = SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut small = Vec::new();
    let mut large = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let v = v_t.row(i).adjoint();
        if s <= threshold {
            small.push(v);
        } else {
            large.push(v);
        }
    }
    let build = |v: Vec<DVector<C64>>| {
        if v.is_empty() {
            DMatrix::zeros(cols, 0)
        } else {
            DMatrix::from_columns(&v)
        }
    };
    (build(small), build(large))
}

/// Part of the orthonormal subspace `v` with grade `grade`, and the amount by
/// which `τ` fails to preserve `span v`.
fn grade_subspace(tau: &ComplexMatrix, v: &DMatrix<C64>, grade: i8) -> (DMatrix<C64>, f64) {
    let tv = tau.as_dmatrix() * v;
    let t = v.adjoint() * &tv;
    let leak = (&tv - v * &t).norm();
    let shifted = &t - DMatrix::identity(t.nrows(), t.ncols()) * c64(f64::from(grade), 0.0);
    let (kernel, _) = split_right_vectors(&shifted, SUBSPACE_SIGMA);
    (v * kernel, leak)
}

/// Rotates an orthonormal basis so that `η` is diagonal on it, then scales
/// each vector to unit `|η|`-norm where that norm is nonzero.
fn eta_diagonalize(w: &DMatrix<C64>, eta: &MetricOperator) -> Vec<(DVector<C64>, f64)> {
    if w.ncols() == 0 {
        return Vec::new();
    }
    let g = w.adjoint() * eta.matrix().as_dmatrix() * w;
    let (_, u) = hermitian_eig(&ComplexMatrix::from_raw(g)).expect("finite Gram matrix");
    let rotated = w * u.as_dmatrix();
    rotated
        .column_iter()
        .map(|c| {
            let mut v = canonical_phase(c.into_owned());
            let n = eta.inner(&v, &v).re;
            if n.abs() > 1e-12 {
                v /= c64(n.abs().sqrt(), 0.0);
            }
            let n = eta.inner(&v, &v).re;
            (v, n)
        })
        .collect()
}

/// Multiplies by a phase so that the first entry of largest modulus is real
/// and positive.
pub fn canonical_phase(mut v: DVector<C64>) -> DVector<C64> {
    let mut best = 0;
    let mut best_abs = 0.0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best_abs * (1.0 + 1e-9) {
            best = i;
            best_abs = z.norm();
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / best_abs;
        v *= phase;
    }
    v
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

pub fn pair_spectrum(sys: &PseudoSusySystem) -> Result<PairingReport> {
    pair_spectrum_with(sys, PairingOptions::default())
}

/// Groups the spectrum of `H` and maps every protected source-grade
/// eigenvector of a nonzero real eigenvalue through `Q`.
///
/// Zero modes and states reaching outside the protected subspace are listed
/// as unpaired; complex eigenvalues are checked for conjugate partners only.
pub fn pair_spectrum_with(sys: &PseudoSusySystem, opts: PairingOptions) -> Result<PairingReport> {
    let decomposition = eig(&sys.h)?;
    if !decomposition.diagonalizable {
        return Err(Error::Domain(format!(
            "Hamiltonian is not diagonalizable (eigenvector condition {:e})",
            decomposition.condition_estimate
        )));
    }
    let n = sys.dim();
    let rho = decomposition.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = opts.group_rel * rho.max(1.0);
    let check = opts.check_rel * sys.h.norm().max(1.0);
    let groups = group_eigenvalues(&decomposition.eigenvalues, threshold);

    let mut min_gap: Option<f64> = None;
    for (i, a) in groups.iter().enumerate() {
        for b in &groups[i + 1..] {
            let d = (a.value - b.value).norm();
            min_gap = Some(min_gap.map_or(d, |g: f64| g.min(d)));
        }
    }
    let max_group_spread = groups
        .iter()
        .flat_map(|g| g.members.iter().map(move |m| (m - g.value).norm()))
        .fold(0.0, f64::max);

    let source = sys.source_grade();
    let target = -source;
    let id = DMatrix::<C64>::identity(n, n);
    let outside = &id - sys.protected.as_dmatrix();

    let mut pairs = Vec::new();
    let mut unpaired = Vec::new();
    let mut complex_pairs = Vec::new();
    let mut failures = Vec::new();
    let mut spectrum = Vec::new();

    for g in &groups {
        let lam = g.value;
        let m = g.members.len();
        let shifted = sys.h.as_dmatrix() - &id * lam;
        let space = smallest_right_vectors(&shifted, m);
        let (src, leak_s) = grade_subspace(&sys.tau, &space, source);
        let (tgt, leak_t) = grade_subspace(&sys.tau, &space, target);
        let mut grades = vec![1i8; if source > 0 { src.ncols() } else { tgt.ncols() }];
        grades.extend(vec![-1i8; if source > 0 { tgt.ncols() } else { src.ncols() }]);
        spectrum.push(SpectrumLevel {
            value: pair_of(lam),
            multiplicity: m,
            grades,
        });
        if leak_s.max(leak_t) > check || src.ncols() + tgt.ncols() != m {
            failures.push(PairingFailure {
                eigenvalue: pair_of(lam),
                reason: "grading does not preserve the eigenspace".into(),
            });
        }

        if lam.im.abs() > threshold {
            if lam.im > 0.0 {
                let partner = groups.iter().find(|h| (h.value - lam.conj()).norm() <= threshold);
                let matched = partner.is_some_and(|p| p.members.len() == m);
                if !matched {
                    failures.push(PairingFailure {
                        eigenvalue: pair_of(lam),
                        reason: "complex eigenvalue without a conjugate partner".into(),
                    });
                }
                complex_pairs.push(ComplexPair {
                    value: pair_of(lam),
                    conjugate: partner.map(|p| pair_of(p.value)),
                    multiplicity: m,
                    matched,
                });
            } else if !groups.iter().any(|h| (h.value - lam.conj()).norm() <= threshold) {
                failures.push(PairingFailure {
                    eigenvalue: pair_of(lam),
                    reason: "complex eigenvalue without a conjugate partner".into(),
                });
                complex_pairs.push(ComplexPair {
                    value: pair_of(lam),
                    conjugate: None,
                    multiplicity: m,
                    matched: false,
                });
            }
            continue;
        }

        let lam_re = lam.re;
        let lam_c = c64(lam_re, 0.0);
        if lam.norm() <= threshold {
            for (w, grade) in [(&src, source), (&tgt, target)] {
                for (v, nrm) in eta_diagonalize(w, &sys.eta) {
                    unpaired.push(UnpairedState {
                        eigenvalue: [0.0, 0.0],
                        vector: v,
                        grade,
                        kind: UnpairedKind::Zero,
                        eta_norm: nrm,
                    });
                }
            }
            continue;
        }

        let (coeff_protected, coeff_edge) = split_right_vectors(&(&outside * &src), SUBSPACE_SIGMA);
        let protected_src = &src * coeff_protected;
        let edge_src = &src * coeff_edge;
        for (v, nrm) in eta_diagonalize(&edge_src, &sys.eta) {
            unpaired.push(UnpairedState {
                eigenvalue: pair_of(lam_c),
                vector: v,
                grade: source,
                kind: UnpairedKind::Edge,
                eta_norm: nrm,
            });
        }

        let mut images: Vec<DVector<C64>> = Vec::new();
        for (psi, n_src) in eta_diagonalize(&protected_src, &sys.eta) {
            let phi = sys.q.as_dmatrix() * &psi;
            let phi_norm = phi.norm();
            if phi_norm <= check * psi.norm() {
                failures.push(PairingFailure {
                    eigenvalue: pair_of(lam_c),
                    reason: "Q annihilates a protected source-grade eigenvector".into(),
                });
                unpaired.push(UnpairedState {
                    eigenvalue: pair_of(lam_c),
                    vector: psi,
                    grade: source,
                    kind: UnpairedKind::Unmatched,
                    eta_norm: n_src,
                });
                continue;
            }
            let eigen_residual = (sys.h.as_dmatrix() * &phi - &phi * lam_c).norm() / phi_norm;
            let grade_residual =
                (sys.tau.as_dmatrix() * &phi - &phi * c64(f64::from(target), 0.0)).norm() / phi_norm;
            let n_tgt = sys.eta.inner(&phi, &phi).re;
            let expected = 2.0 * lam_re * n_src;
            let spect_residual = (n_tgt - expected).abs() / expected.abs().max(1.0);
            let mut verified = true;
            if eigen_residual > check || grade_residual > check {
                verified = false;
                failures.push(PairingFailure {
                    eigenvalue: pair_of(lam_c),
                    reason: format!(
                        "Qψ is not a target-grade eigenvector (eigen residual {eigen_residual:e}, grade residual {grade_residual:e})"
                    ),
                });
            }
            if n_src.abs() <= check {
                verified = false;
                failures.push(PairingFailure {
                    eigenvalue: pair_of(lam_c),
                    reason: "source eigenvector has vanishing η-norm".into(),
                });
            }
            let (plus_vector, minus_vector, eta_norm_plus, eta_norm_minus) = if source > 0 {
                (psi, phi.clone(), n_src, n_tgt)
            } else {
                (phi.clone(), psi, n_tgt, n_src)
            };
            pairs.push(SpectralPair {
                eigenvalue: lam_re,
                plus_vector,
                minus_vector,
                eta_norm_plus,
                eta_norm_minus,
                sign_plus: sign_of(eta_norm_plus),
                sign_minus: sign_of(eta_norm_minus),
                spect_residual,
                eigen_residual,
                grade_residual,
                verified,
            });
            images.push(phi / c64(phi_norm, 0.0));
        }

        if tgt.ncols() > 0 {
            let leftover = if images.is_empty() {
                tgt.clone()
            } else {
                let overlaps = tgt.adjoint() * DMatrix::from_columns(&images);
                &tgt * null_space(&overlaps.adjoint(), SUBSPACE_SIGMA)
            };
            for (z, nrm) in eta_diagonalize(&leftover, &sys.eta) {
                let kind = if (&outside * &z).norm() > SUBSPACE_SIGMA {
                    UnpairedKind::Edge
                } else {
                    failures.push(PairingFailure {
                        eigenvalue: pair_of(lam_c),
                        reason: "protected target-grade eigenvector is not the image of a source vector".into(),
                    });
                    UnpairedKind::Unmatched
                };
                unpaired.push(UnpairedState {
                    eigenvalue: pair_of(lam_c),
                    vector: z,
                    grade: target,
                    kind,
                    eta_norm: nrm,
                });
            }
        }
    }

    Ok(PairingReport {
        source_grade: source,
        pairs,
        unpaired,
        complex_pairs,
        failures,
        spectrum,
        grouping_threshold: threshold,
        min_gap,
        max_group_spread,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairSign {
    pub eigenvalue: f64,
    pub sign_plus: i8,
    pub sign_minus: i8,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorollaryVerdict {
    pub all_nonzero_real_negative: bool,
    pub pass: bool,
}

/// Metric-sign consequences of the pseudo-supersymmetry.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TheoremVerdict {
    pub source_grade: i8,
    pub pair_signs: Vec<PairSign>,
    pub sign_rule_holds: bool,
    pub has_negative_eigenvalue: bool,
    pub eta_inertia: Inertia,
    pub eta_indefinite: bool,
    /// A negative eigenvalue forces an indefinite metric.
    pub implication_holds: bool,
    pub max_distinct_overlap: f64,
    pub orthogonality_holds: bool,
    pub max_cross_grade_overlap: f64,
    pub cross_grade_holds: bool,
    pub max_spect_residual: f64,
    pub spect_holds: bool,
    /// Present when `η = τ`.
    pub corollary: Option<CorollaryVerdict>,
    pub pass: bool,
}

/// Evaluates the sign rule `sign(target) = sign(E)·sign(source)` on every
/// real pair, the implication "some `E < 0` ⇒ `η` indefinite", and the
/// orthogonality relations used in its proof.
pub fn sign_theorem_check(sys: &PseudoSusySystem, report: &PairingReport, tol: Tolerance) -> Result<TheoremVerdict> {
    let source = report.source_grade;
    let mut pair_signs = Vec::new();
    for p in &report.pairs {
        let (s_src, s_tgt) = if source > 0 {
            (p.sign_plus, p.sign_minus)
        } else {
            (p.sign_minus, p.sign_plus)
        };
        let holds = s_src != 0 && s_tgt == sign_of(p.eigenvalue) * s_src;
        pair_signs.push(PairSign {
            eigenvalue: p.eigenvalue,
            sign_plus: p.sign_plus,
            sign_minus: p.sign_minus,
            holds,
        });
    }
    let sign_rule_holds = pair_signs.iter().all(|s| s.holds);

    let threshold = report.grouping_threshold;
    let real_levels: Vec<f64> = report
        .spectrum
        .iter()
        .filter(|l| l.value[1].abs() <= threshold)
        .map(|l| l.value[0])
        .collect();
    let has_negative_eigenvalue = real_levels.iter().any(|&x| x < -threshold);
    let eta_inertia = inertia_of(sys.eta.matrix())?;
    let eta_indefinite = eta_inertia.is_indefinite();
    let implication_holds = !has_negative_eigenvalue || eta_indefinite;

    let mut vectors: Vec<(f64, DVector<C64>)> = Vec::new();
    for p in &report.pairs {
        vectors.push((p.eigenvalue, p.plus_vector.normalize()));
        vectors.push((p.eigenvalue, p.minus_vector.normalize()));
    }
    for u in &report.unpaired {
        if u.eigenvalue[1].abs() <= threshold {
            vectors.push((u.eigenvalue[0], u.vector.normalize()));
        }
    }
    let eta_norm = sys.eta.matrix().norm();
    let mut max_distinct_overlap: f64 = 0.0;
    for (i, (ea, va)) in vectors.iter().enumerate() {
        for (eb, vb) in &vectors[i + 1..] {
            if (ea - eb).abs() > threshold {
                max_distinct_overlap = max_distinct_overlap.max(sys.eta.inner(va, vb).norm());
            }
        }
    }
    let orthogonality_holds = max_distinct_overlap <= tol.scaled(eta_norm);

    let max_cross_grade_overlap = report
        .pairs
        .iter()
        .map(|p| sys.eta.inner(&p.minus_vector.normalize(), &p.plus_vector.normalize()).norm())
        .fold(0.0, f64::max);
    let cross_grade_holds = max_cross_grade_overlap <= tol.scaled(eta_norm);

    let max_spect_residual = report.pairs.iter().map(|p| p.spect_residual).fold(0.0, f64::max);
    let spect_holds = max_spect_residual <= tol.scaled(sys.h.norm());

    let corollary = if (sys.eta.matrix() - &sys.tau).norm() <= tol.scaled(eta_norm) {
        let all_neg = real_levels.iter().filter(|x| x.abs() > threshold).all(|&x| x < 0.0);
        Some(CorollaryVerdict {
            all_nonzero_real_negative: all_neg,
            pass: all_neg,
        })
    } else {
        None
    };

    let pass = sign_rule_holds
        && implication_holds
        && orthogonality_holds
        && cross_grade_holds
        && spect_holds
        && corollary.as_ref().is_none_or(|c| c.pass);
    Ok(TheoremVerdict {
        source_grade: source,
        pair_signs,
        sign_rule_holds,
        has_negative_eigenvalue,
        eta_inertia,
        eta_indefinite,
        implication_holds,
        max_distinct_overlap,
        orthogonality_holds,
        max_cross_grade_overlap,
        cross_grade_holds,
        max_spect_residual,
        spect_holds,
        corollary,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MetricOperator;
    use crate::oscillator::{build_boson_abnormal_phermion, build_boson_fermion, build_boson_phermion};
    use crate::random;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn boson_fermion_algebra_passes() {
        let sys = build_boson_fermion(1.0, 6).unwrap().pseudo_susy();
        for r in verify_algebra(&sys, tol()) {
            assert!(r.pass, "{r:?}");
        }
        // [a, a†] − 1 at the top level, times 2E
        assert!((full_space_defect(&sys) - 14.0).abs() < 1e-10);
    }

    #[test]
    fn abnormal_algebra_passes() {
        let sys = build_boson_abnormal_phermion(-1.0, 6).unwrap().pseudo_susy();
        for r in verify_algebra(&sys, tol()) {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn swapped_supercharge_breaks_anticommutator() {
        let eta2 = MetricOperator::from_diagonal(&[4.0, 1.0]).unwrap();
        let sys = build_boson_phermion(1.0, 4, &eta2).unwrap().pseudo_susy();
        let swapped = sys.with_supercharge(sys.q.dagger()).unwrap();
        let by_name = |name: &str| {
            verify_algebra(&swapped, tol())
                .into_iter()
                .find(|r| r.relation_name.starts_with(name))
                .unwrap()
        };
        assert!(by_name("Q² = 0").pass);
        assert!(by_name("{τ, Q}").pass);
        assert!(!by_name("{Q, Q♯}").pass);
    }

    #[test]
    fn two_component_boson_fermion_blocks() {
        let osc = build_boson_fermion(1.0, 3).unwrap();
        let sys = osc.pseudo_susy();
        let form = two_component(&sys, tol()).unwrap();
        assert_eq!(form.source_grade, -1);
        assert_eq!(form.d.shape(), (4, 4));
        // D = √2·a† in the boson level basis
        for r in 0..4 {
            for c in 0..4 {
                let expected = if r == c + 1 { (2.0 * r as f64).sqrt() } else { 0.0 };
                assert!((form.d[(r, c)] - c64(expected, 0.0)).norm() < 1e-14, "D[{r},{c}]");
            }
        }
        for r in form.residuals(tol()) {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn two_component_abnormal_metric_blocks() {
        let sys = build_boson_abnormal_phermion(-1.0, 3).unwrap().pseudo_susy();
        let form = two_component(&sys, tol()).unwrap();
        assert_eq!(form.eta_plus.matrix(), &ComplexMatrix::identity(4));
        assert_eq!(form.eta_minus.matrix(), &-ComplexMatrix::identity(4));
        for r in form.residuals(tol()) {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn two_component_reassembles() {
        let eta2 = MetricOperator::from_diagonal(&[4.0, 1.0]).unwrap();
        let u = random::unitary(&mut random::rng(7), 10);
        for sys in [
            build_boson_fermion(1.0, 4).unwrap().pseudo_susy(),
            build_boson_abnormal_phermion(-2.0, 4).unwrap().pseudo_susy(),
            build_boson_phermion(0.5, 4, &eta2).unwrap().pseudo_susy().conjugated(&u).unwrap(),
        ] {
            let form = two_component(&sys, tol()).unwrap();
            let (q, h, eta) = form.reassemble();
            assert!((&q - &sys.q).norm() <= 1e-11);
            assert!((&h - &sys.h).norm() <= 1e-11);
            assert!((&eta - sys.eta.matrix()).norm() <= 1e-11);
        }
    }

    #[test]
    fn two_component_rejects_non_hermitian_grading() {
        let eta2 = MetricOperator::new(ComplexMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap())
            .unwrap();
        let sys = build_boson_phermion(1.0, 3, &eta2).unwrap().pseudo_susy();
        assert!(matches!(two_component(&sys, tol()), Err(Error::Structure(_))));
    }

    #[test]
    fn two_component_rejects_leaking_supercharge() {
        let sys = build_boson_fermion(1.0, 3).unwrap().pseudo_susy();
        let bad = sys.with_supercharge(&sys.q + sys.q.dagger()).unwrap();
        assert!(matches!(two_component(&bad, tol()), Err(Error::Structure(_))));
    }

    #[test]
    fn boson_fermion_pairing() {
        let t = 6;
        let sys = build_boson_fermion(1.0, t).unwrap().pseudo_susy();
        let report = pair_spectrum(&sys).unwrap();
        assert!(report.pass(), "{:?}", report.failures);
        let values: Vec<f64> = report.pairs.iter().map(|p| p.eigenvalue).collect();
        let expected: Vec<f64> = (1..=t).map(|k| k as f64).collect();
        assert_eq!(values.len(), expected.len());
        for (a, b) in values.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(report.unpaired_of(UnpairedKind::Zero).count(), 1);
        let edge: Vec<_> = report.unpaired_of(UnpairedKind::Edge).collect();
        assert_eq!(edge.len(), 1);
        assert!((edge[0].eigenvalue[0] - (t + 1) as f64).abs() < 1e-10);
        assert!(report.complex_pairs.is_empty());
    }

    #[test]
    fn boson_fermion_theorem_vacuous() {
        let sys = build_boson_fermion(1.0, 5).unwrap().pseudo_susy();
        let report = pair_spectrum(&sys).unwrap();
        let v = sign_theorem_check(&sys, &report, tol()).unwrap();
        assert!(v.pass, "{v:?}");
        assert!(!v.has_negative_eigenvalue);
        assert!(!v.eta_indefinite);
        assert!(v.pair_signs.iter().all(|s| s.sign_plus == 1 && s.sign_minus == 1));
        assert!(v.corollary.is_none());
    }

    #[test]
    fn abnormal_theorem_and_corollary() {
        let t = 6;
        let sys = build_boson_abnormal_phermion(-1.0, t).unwrap().pseudo_susy();
        let report = pair_spectrum(&sys).unwrap();
        assert!(report.pass(), "{:?}", report.failures);
        assert_eq!(report.pairs.len(), t);
        for (k, p) in report.pairs.iter().rev().enumerate() {
            assert!((p.eigenvalue + (k + 1) as f64).abs() < 1e-10);
            assert_eq!(p.sign_plus, 1);
            assert_eq!(p.sign_minus, -1);
        }
        let v = sign_theorem_check(&sys, &report, tol()).unwrap();
        assert!(v.pass, "{v:?}");
        assert!(v.has_negative_eigenvalue && v.eta_indefinite && v.implication_holds);
        assert!(v.corollary.unwrap().pass);
    }

    #[test]
    fn broken_hamiltonian_reports_failures() {
        let sys = build_boson_fermion(1.0, 4).unwrap().pseudo_susy();
        let n = sys.dim();
        let perturbation = ComplexMatrix::real_diag(&(0..n).map(|k| 0.01 * ((k * k) as f64).sin()).collect::<Vec<_>>());
        let broken = sys.with_hamiltonian(&sys.h + perturbation).unwrap();
        let report = pair_spectrum(&broken).unwrap();
        assert!(!report.pass());
        assert!(report.failures.iter().any(|f| f.reason.contains("not a target-grade eigenvector")));
        let checks = verify_algebra(&broken, tol());
        assert!(!checks.iter().find(|r| r.relation_name == "[Q, H] = 0").unwrap().pass);
    }

    #[test]
    fn pairing_invariant_under_unitary_remixing() {
        let base = build_boson_abnormal_phermion(-1.5, 4).unwrap().pseudo_susy();
        let reference = pair_spectrum(&base).unwrap();
        let signs = |r: &PairingReport| -> Vec<(i8, i8)> { r.pairs.iter().map(|p| (p.sign_plus, p.sign_minus)).collect() };
        for seed in 0..5 {
            let u = random::unitary(&mut random::rng(100 + seed), base.dim());
            let sys = base.conjugated(&u).unwrap();
            let report = pair_spectrum(&sys).unwrap();
            assert!(report.pass(), "{:?}", report.failures);
            assert_eq!(report.pairs.len(), reference.pairs.len());
            assert_eq!(signs(&report), signs(&reference));
            let v = sign_theorem_check(&sys, &report, tol()).unwrap();
            assert!(v.pass, "{v:?}");
        }
    }

    #[test]
    fn complex_conjugate_pairs_are_listed() {
        // two-component system with D = Hadamard and both sector metrics σ₃:
        // H₊ = D♯D/2 has eigenvalues ±i/2
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut q = ComplexMatrix::zeros(4).into_dmatrix();
        q[(2, 0)] = c64(r, 0.0);
        q[(2, 1)] = c64(r, 0.0);
        q[(3, 0)] = c64(r, 0.0);
        q[(3, 1)] = c64(-r, 0.0);
        let q = ComplexMatrix::from_dmatrix(q).unwrap();
        let eta = MetricOperator::from_diagonal(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        let tau = ComplexMatrix::real_diag(&[1.0, 1.0, -1.0, -1.0]);
        let qs = pseudo_adjoint(&q, &eta).unwrap();
        let h = anticommutator(&q, &qs).unwrap() * 0.5;
        let sys = PseudoSusySystem::new(h, q, tau, eta, None).unwrap();
        for r in verify_algebra(&sys, tol()) {
            assert!(r.pass, "{r:?}");
        }
        let report = pair_spectrum(&sys).unwrap();
        assert!(report.pairs.is_empty());
        assert_eq!(report.complex_pairs.len(), 1);
        let cp = &report.complex_pairs[0];
        assert!(cp.matched);
        assert!((cp.value[1] - 0.5).abs() < 1e-12 && cp.value[0].abs() < 1e-12);
        assert_eq!(cp.multiplicity, 2);
    }

    #[test]
    fn defective_hamiltonian_is_rejected() {
        let mut h = ComplexMatrix::zeros(4).into_dmatrix();
        h[(0, 1)] = c64(1.0, 0.0);
        let h = ComplexMatrix::from_dmatrix(h).unwrap();
        let tau = ComplexMatrix::real_diag(&[1.0, 1.0, -1.0, -1.0]);
        let sys = PseudoSusySystem::new(h, ComplexMatrix::zeros(4), tau, MetricOperator::identity(4), None).unwrap();
        assert!(matches!(pair_spectrum(&sys), Err(Error::Domain(_))));
    }

    #[test]
    fn report_serializes_signs() {
        let sys = build_boson_abnormal_phermion(-1.0, 3).unwrap().pseudo_susy();
        let report = pair_spectrum(&sys).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        assert_eq!(v["sourceGrade"], -1);
        assert_eq!(v["pairs"][0]["signMinus"], -1);
        assert!(v["spectrum"][0]["value"].is_array());
    }
}
