//! Metric operators, pseudo-adjoints and single-species ladder representations.
//!
//! Every two-level species lives on `C²` with the occupied level `e₁`. The
//! annihilator of the basic fermion is `α = [[0,1],[0,0]]`; phermions are
//! conjugates of `α` by `η^{-1/2}`, and the abnormal phermion is `iα` with
//! metric `σ₃`.

use nalgebra::{DMatrix, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{
    anticommutator, c64, commutator, inertia_of, inverse_with_condition, sqrt_pos_def, ComplexMatrix, Inertia,
    Tolerance, C64,
};

/// Outcome of checking one identity `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RelationResidual {
    pub relation_name: String,
    pub residual_norm: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl RelationResidual {
    pub fn new(name: impl Into<String>, residual_norm: f64, tolerance: f64) -> Self {
        RelationResidual {
            relation_name: name.into(),
            residual_norm,
            tolerance,
            pass: residual_norm <= tolerance,
        }
    }

    /// `‖lhs − rhs‖_F` against `tol` scaled by the larger operand norm.
    pub fn compare(name: impl Into<String>, lhs: &ComplexMatrix, rhs: &ComplexMatrix, tol: Tolerance) -> Self {
        let scale = lhs.norm().max(rhs.norm());
        Self::new(name, (lhs - rhs).norm(), tol.scaled(scale))
    }

    /// `‖m‖_F` against `tol` scaled by `scale`.
    pub fn vanishes(name: impl Into<String>, m: &ComplexMatrix, scale: f64, tol: Tolerance) -> Self {
        Self::new(name, m.norm(), tol.scaled(scale))
    }
}

/// An invertible Hermitian matrix with its inverse and inertia.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricOperator {
    matrix: ComplexMatrix,
    inverse: ComplexMatrix,
    inertia: Inertia,
}

impl MetricOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, Tolerance::default())
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if !matrix.is_hermitian(tol) {
            return Err(Error::Domain("metric operator must be Hermitian".into()));
        }
        let (inverse, _) = inverse_with_condition(&matrix)?;
        let inertia = inertia_of(&matrix)?;
        if inertia.n_zero > 0 {
            return Err(Error::Domain(format!("metric operator has a kernel, inertia {inertia}")));
        }
        Ok(MetricOperator {
            matrix,
            inverse,
            inertia,
        })
    }

    pub fn identity(n: usize) -> Self {
        MetricOperator {
            matrix: ComplexMatrix::identity(n),
            inverse: ComplexMatrix::identity(n),
            inertia: Inertia::new(n, 0, 0),
        }
    }

    pub fn sigma3() -> Self {
        Self::new(sigma3()).expect("σ₃ is an invertible Hermitian matrix")
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::real_diag(d))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &ComplexMatrix {
        &self.inverse
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn negated(&self) -> Self {
        MetricOperator {
            matrix: -&self.matrix,
            inverse: -&self.inverse,
            inertia: Inertia::new(self.inertia.n_minus, self.inertia.n_plus, self.inertia.n_zero),
        }
    }

    /// `⟨u|η v⟩`.
    pub fn inner(&self, u: &nalgebra::DVector<C64>, v: &nalgebra::DVector<C64>) -> C64 {
        u.dotc(&(self.matrix.as_dmatrix() * v))
    }
}

pub fn alpha() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if (i, j) == (0, 1) { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
}

pub fn sigma1() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i != j { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
}

pub fn sigma3() -> ComplexMatrix {
    ComplexMatrix::real_diag(&[1.0, -1.0])
}

/// `A♯ = η⁻¹ A† η`.
pub fn pseudo_adjoint(a: &ComplexMatrix, eta: &MetricOperator) -> Result<ComplexMatrix> {
    if a.dim() != eta.dim() {
        return Err(Error::Shape {
            op: "pseudo_adjoint",
            left: a.dim(),
            right: eta.dim(),
        });
    }
    Ok(eta.inverse() * a.dagger() * eta.matrix())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Species {
    Boson,
    Fermion,
    Phermion,
    AbnormalPhermion,
}

impl Species {
    pub fn is_two_level(&self) -> bool {
        !matches!(self, Species::Boson)
    }
}

impl std::fmt::Display for Species {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Species::Boson => "boson",
            Species::Fermion => "fermion",
            Species::Phermion => "phermion",
            Species::AbnormalPhermion => "abnormal-phermion",
        };
        f.write_str(s)
    }
}

/// Annihilator, creator, number operator and metric for one species.
#[derive(Clone, Debug)]
pub struct LadderRep {
    pub species: Species,
    pub c: ComplexMatrix,
    pub c_star: ComplexMatrix,
    pub n: ComplexMatrix,
    pub eta: MetricOperator,
    /// `+1` or `−1`, the right-hand side of `{c, c♯} = ε`.
    pub epsilon: i8,
    pub truncation: Option<usize>,
    /// Set when a negative-definite metric was replaced by its negation.
    pub metric_negated: bool,
}

impl LadderRep {
    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    /// Projector onto every level below the truncation edge (identity for
    /// two-level species).
    pub fn protected_projector(&self) -> ComplexMatrix {
        match self.truncation {
            Some(t) => {
                let d: Vec<f64> = (0..=t).map(|k| if k < t { 1.0 } else { 0.0 }).collect();
                ComplexMatrix::real_diag(&d)
            }
            None => ComplexMatrix::identity(self.dim()),
        }
    }

    pub fn to_document(&self) -> LadderRepDocument {
        LadderRepDocument {
            species: self.species,
            dim: self.dim(),
            c: self.c.to_pairs(),
            eta: self.eta.matrix().to_pairs(),
            epsilon: self.epsilon,
            truncation: self.truncation,
        }
    }

    /// Rebuilds a representation from its annihilator and metric; the creator
    /// and number operator are derived.
    pub fn from_document(doc: &LadderRepDocument) -> Result<Self> {
        let c = ComplexMatrix::from_pairs(&doc.c)?;
        let eta = MetricOperator::new(ComplexMatrix::from_pairs(&doc.eta)?)?;
        if c.dim() != doc.dim || eta.dim() != doc.dim {
            return Err(Error::Serialization(format!(
                "declared dim {} but c is {} and eta is {}",
                doc.dim,
                c.dim(),
                eta.dim()
            )));
        }
        if doc.epsilon != 1 && doc.epsilon != -1 {
            return Err(Error::Serialization(format!("epsilon must be ±1, got {}", doc.epsilon)));
        }
        let c_star = pseudo_adjoint(&c, &eta)?;
        let n = match doc.species {
            Species::AbnormalPhermion => -(&c_star * &c),
            _ => &c_star * &c,
        };
        Ok(LadderRep {
            species: doc.species,
            c,
            c_star,
            n,
            eta,
            epsilon: doc.epsilon,
            truncation: doc.truncation,
            metric_negated: false,
        })
    }
}

/// JSON form of a [`LadderRep`]; entries are `[re, im]` pairs, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderRepDocument {
    pub species: Species,
    pub dim: usize,
    pub c: Vec<Vec<[f64; 2]>>,
    pub eta: Vec<Vec<[f64; 2]>>,
    pub epsilon: i8,
    pub truncation: Option<usize>,
}

/// Truncated boson on levels `0..=truncation` with `a|k⟩ = √k |k−1⟩`.
pub fn make_boson(truncation: usize) -> Result<LadderRep> {
    if truncation < 2 {
        return Err(Error::Config(format!("boson truncation must be at least 2, got {truncation}")));
    }
    let dim = truncation + 1;
    let a = ComplexMatrix::from_fn(dim, |i, j| {
        if j == i + 1 {
            c64((j as f64).sqrt(), 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    let a_dag = a.dagger();
    let n = &a_dag * &a;
    Ok(LadderRep {
        species: Species::Boson,
        c: a,
        c_star: a_dag,
        n,
        eta: MetricOperator::identity(dim),
        epsilon: 1,
        truncation: Some(truncation),
        metric_negated: false,
    })
}

pub fn make_fermion() -> LadderRep {
    let c = alpha();
    let c_star = c.dagger();
    let n = &c_star * &c;
    LadderRep {
        species: Species::Fermion,
        c,
        c_star,
        n,
        eta: MetricOperator::identity(2),
        epsilon: 1,
        truncation: None,
        metric_negated: false,
    }
}

/// Phermion for a definite 2×2 metric, `c = η^{-1/2} α η^{1/2}`.
///
/// A negative-definite metric is replaced by `−η` and flagged. An indefinite
/// metric cannot carry the phermion relations: the anticommutator is forced
/// to `−(|u|−|v|)² I` (see [`obstruction_demo`]).
pub fn make_phermion(eta: &MetricOperator) -> Result<LadderRep> {
    if eta.dim() != 2 {
        return Err(Error::Shape {
            op: "make_phermion",
            left: eta.dim(),
            right: 2,
        });
    }
    let inertia = eta.inertia();
    if inertia.is_indefinite() {
        return Err(Error::AlgebraObstruction(format!(
            "metric with inertia {inertia} is indefinite; a 2-dim phermion rep with an indefinite metric \
             has {{α₊, α₊♯}} = −(|u|−|v|)² I, which cannot be equated to the identity matrix"
        )));
    }
    let (eta, metric_negated) = if inertia.is_negative_definite() {
        (eta.negated(), true)
    } else {
        (eta.clone(), false)
    };
    let root = sqrt_pos_def(eta.matrix())?;
    let (root_inv, _) = inverse_with_condition(&root)?;
    let c = &root_inv * alpha() * &root;
    let c_star = pseudo_adjoint(&c, &eta)?;
    let n = &c_star * &c;
    Ok(LadderRep {
        species: Species::Phermion,
        c,
        c_star,
        n,
        eta,
        epsilon: 1,
        truncation: None,
        metric_negated,
    })
}

pub fn make_abnormal_phermion() -> LadderRep {
    let c = alpha().scale(c64(0.0, 1.0));
    let eta = MetricOperator::sigma3();
    let c_star = pseudo_adjoint(&c, &eta).expect("2x2 operands");
    let n = -(&c_star * &c);
    LadderRep {
        species: Species::AbnormalPhermion,
        c,
        c_star,
        n,
        eta,
        epsilon: -1,
        truncation: None,
        metric_negated: false,
    }
}

/// Residuals of every defining relation of a species.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpeciesReport {
    pub species: Species,
    pub relations: Vec<RelationResidual>,
    /// `max |([c,c*] − 1)_{ij}|` over the full truncated space (bosons only).
    pub truncation_defect: Option<f64>,
}

impl SpeciesReport {
    pub fn pass(&self) -> bool {
        self.relations.iter().all(|r| r.pass)
    }
}

pub fn verify_species(rep: &LadderRep, tol: Tolerance) -> Result<SpeciesReport> {
    let c = &rep.c;
    let cs = &rep.c_star;
    let n = &rep.n;
    let dim = rep.dim();
    let id = ComplexMatrix::identity(dim);
    let eps = f64::from(rep.epsilon);
    let mut out = vec![
        RelationResidual::compare("c* = c♯", cs, &pseudo_adjoint(c, &rep.eta)?, tol),
        RelationResidual::compare("n♯ = n", &pseudo_adjoint(n, &rep.eta)?, n, tol),
        RelationResidual::compare("[c, n] = c", &commutator(c, n)?, c, tol),
        RelationResidual::compare("[c*, n] = −c*", &commutator(cs, n)?, &-cs, tol),
    ];

    let mut truncation_defect = None;
    match rep.species {
        Species::Boson => {
            out.push(RelationResidual::compare("n = c*c", n, &(cs * c), tol));
            let defect = commutator(c, cs)? - &id;
            let p = rep.protected_projector();
            out.push(RelationResidual::vanishes(
                "[c, c*] = 1 (protected subspace)",
                &(&defect * &p),
                (c * cs).norm(),
                tol,
            ));
            truncation_defect = Some(defect.max_abs());
        }
        _ => {
            let zero = ComplexMatrix::zeros(dim);
            out.push(RelationResidual::compare("c² = 0", &(c * c), &zero, tol));
            out.push(RelationResidual::compare("c*² = 0", &(cs * cs), &zero, tol));
            out.push(RelationResidual::compare(
                "{c, c*} = ε·1",
                &anticommutator(c, cs)?,
                &(&id * eps),
                tol,
            ));
            out.push(RelationResidual::compare("n = ε·c*c", n, &((cs * c) * eps), tol));
            out.push(RelationResidual::compare(
                "[c, c*] = ε(1 − 2n)",
                &commutator(c, cs)?,
                &((&id - n * 2.0) * eps),
                tol,
            ));
        }
    }
    Ok(SpeciesReport {
        species: rep.species,
        relations: out,
        truncation_defect,
    })
}

/// One Hermitian solution of the metric constraint.
#[derive(Clone, Debug)]
pub struct MetricSolution {
    pub matrix: ComplexMatrix,
    pub inertia: Inertia,
}

#[derive(Clone, Debug)]
pub struct MetricClassification {
    /// Frobenius-orthonormal basis of the real solution space.
    pub basis: Vec<MetricSolution>,
    /// A fixed generic combination of the basis, absent for an empty space.
    pub generic: Option<MetricSolution>,
}

impl MetricClassification {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Every solution in the span is definite (or the span is empty).
    pub fn only_definite(&self) -> bool {
        match &self.generic {
            None => true,
            Some(g) => self.basis.len() == 1 && g.inertia.is_definite(),
        }
    }
}

/// Frobenius-orthonormal basis of the `n²`-dimensional real space of
/// Hermitian `n×n` matrices: diagonal units, then `(E_jk + E_kj)/√2`, then
/// `i(E_jk − E_kj)/√2`.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(n * n);
    for j in 0..n {
        basis.push(ComplexMatrix::from_fn(n, |a, b| {
            if a == j && b == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) }
        }));
    }
    for j in 0..n {
        for k in (j + 1)..n {
            basis.push(ComplexMatrix::from_fn(n, |a, b| {
                if (a, b) == (j, k) || (a, b) == (k, j) { c64(r, 0.0) } else { c64(0.0, 0.0) }
            }));
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            basis.push(ComplexMatrix::from_fn(n, |a, b| {
                if (a, b) == (j, k) {
                    c64(0.0, r)
                } else if (a, b) == (k, j) {
                    c64(0.0, -r)
                } else {
                    c64(0.0, 0.0)
                }
            }));
        }
    }
    basis
}

const CLASSIFY_NULL_REL: f64 = 1e-10;

/// All Hermitian `η` with `η·partner = c†·η`.
///
/// The constraint is linear over the real span of [`hermitian_basis`]; its
/// null space is reduced to row-echelon form so that the returned basis is
/// canonical, then orthonormalized.
pub fn classify_metrics(c: &ComplexMatrix, partner: &ComplexMatrix) -> Result<MetricClassification> {
    let n = c.dim();
    if partner.dim() != n {
        return Err(Error::Shape {
            op: "classify_metrics",
            left: n,
            right: partner.dim(),
        });
    }
    let tol = Tolerance::default();
    if c.norm() == 0.0 || (c * c).norm() > tol.scaled(c.norm() * c.norm()) {
        return Err(Error::Domain("classify_metrics expects a nonzero nilpotent annihilator (c² = 0)".into()));
    }
    let basis = hermitian_basis(n);
    let c_dag = c.dagger();
    let rows = 2 * n * n;
    let mut system = DMatrix::<f64>::zeros(rows, basis.len());
    for (k, b) in basis.iter().enumerate() {
        let image = b * partner - &c_dag * b;
        for i in 0..n {
            for j in 0..n {
                let z = image[(i, j)];
                system[(2 * (i * n + j), k)] = z.re;
                system[(2 * (i * n + j) + 1, k)] = z.im;
            }
        }
    }
    let coeffs = real_null_space_rref(&system, CLASSIFY_NULL_REL);
    let mut solutions = Vec::new();
    for x in &coeffs {
        let m = combine(&basis, x);
        let inertia = inertia_of(&m)?;
        solutions.push(MetricSolution { matrix: m, inertia });
    }
    let generic = if coeffs.is_empty() {
        None
    } else {
        // fixed, rationally independent weights
        let weights: Vec<f64> = (0..coeffs.len()).map(|k| ((k + 2) as f64).sqrt()).collect();
        let mut x = vec![0.0; basis.len()];
        for (w, v) in weights.iter().zip(&coeffs) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += w * vi;
            }
        }
        let m = combine(&basis, &x);
        let inertia = inertia_of(&m)?;
        Some(MetricSolution { matrix: m, inertia })
    };
    Ok(MetricClassification {
        basis: solutions,
        generic,
    })
}

fn combine(basis: &[ComplexMatrix], x: &[f64]) -> ComplexMatrix {
    let n = basis[0].dim();
    basis
        .iter()
        .zip(x)
        .fold(ComplexMatrix::zeros(n), |acc, (b, &w)| acc + b * w)
}

/// Null space of a real matrix as an orthonormal list of vectors, after
/// reduction to reduced row-echelon form.
fn real_null_space_rref(m: &DMatrix<f64>, rel: f64) -> Vec<Vec<f64>> {
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), m.shape()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = rel * smax.max(1.0);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut kernel: Vec<Vec<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= threshold)
        .map(|(k, _)| v_t.row(k).iter().copied().collect())
        .collect();
    if kernel.is_empty() {
        return kernel;
    }

    // Gauss-Jordan on the kernel rows
    let rows = kernel.len();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        let (best, val) = (pivot_row..rows)
            .map(|r| (r, kernel[r][col].abs()))
            .fold((pivot_row, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val < 1e-9 {
            continue;
        }
        kernel.swap(pivot_row, best);
        let p = kernel[pivot_row][col];
        for v in kernel[pivot_row].iter_mut() {
            *v /= p;
        }
        for r in 0..rows {
            if r != pivot_row {
                let f = kernel[r][col];
                if f != 0.0 {
                    let src = kernel[pivot_row].clone();
                    for (v, s) in kernel[r].iter_mut().zip(&src) {
                        *v -= f * s;
                    }
                }
            }
        }
        pivot_row += 1;
    }

    // Gram-Schmidt in echelon order
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut v in kernel {
        for u in &out {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= d * ui;
            }
        }
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 1e-9 {
            for x in v.iter_mut() {
                *x /= nrm;
                if x.abs() < 1e-15 {
                    *x = 0.0;
                }
            }
            out.push(v);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Principal,
    Negated,
}

/// The 2×2 nilpotent `σ(α₊)` in a basis where the metric is `σ₃`, together
/// with `{σ(α₊), σ₃ σ(α₊)† σ₃}`.
#[derive(Clone, Debug)]
pub struct ObstructionDemo {
    pub sigma_alpha: ComplexMatrix,
    pub anticommutator: ComplexMatrix,
    /// `−(|u| − |v|)²`.
    pub predicted: f64,
}

impl ObstructionDemo {
    /// `‖{…} − predicted·I‖_F`.
    pub fn residual(&self) -> f64 {
        (&self.anticommutator - ComplexMatrix::identity(2) * self.predicted).norm()
    }
}

pub fn obstruction_demo(u: C64, v: C64) -> Result<ObstructionDemo> {
    obstruction_demo_with_branch(u, v, Branch::Principal)
}

/// Builds `[[s, u], [v, −s]]` with `s² = −uv`, the condition for a nonzero
/// square-zero matrix with this off-diagonal.
pub fn obstruction_demo_with_branch(u: C64, v: C64, branch: Branch) -> Result<ObstructionDemo> {
    let uv = u * v;
    if uv.norm() == 0.0 {
        return Err(Error::Domain("obstruction demo requires u·v ≠ 0".into()));
    }
    let s = match branch {
        Branch::Principal => (-uv).sqrt(),
        Branch::Negated => -(-uv).sqrt(),
    };
    let sigma_alpha = ComplexMatrix::from_rows(&[vec![s, u], vec![v, -s]])?;
    let sq = &sigma_alpha * &sigma_alpha;
    let tol = Tolerance::default();
    if sq.norm() > tol.scaled(sigma_alpha.norm().powi(2)) {
        return Err(Error::Numeric(format!("σ(α₊)² = 0 failed with residual {:e}", sq.norm())));
    }
    let s3 = sigma3();
    let partner = &s3 * sigma_alpha.dagger() * &s3;
    let anti = anticommutator(&sigma_alpha, &partner)?;
    let gap = u.norm() - v.norm();
    Ok(ObstructionDemo {
        sigma_alpha,
        anticommutator: anti,
        predicted: -gap * gap,
    })
}

/// `S = η^{1/2}`: conjugation `X ↦ S X S⁻¹` turns a phermion pair with
/// metric `η` into an ordinary fermion pair.
pub fn phermion_to_fermion_map(eta: &MetricOperator) -> Result<ComplexMatrix> {
    if !eta.inertia().is_positive_definite() {
        return Err(Error::Domain(format!(
            "similarity to a fermion needs a positive-definite metric, inertia {}",
            eta.inertia()
        )));
    }
    sqrt_pos_def(eta.matrix())
}
