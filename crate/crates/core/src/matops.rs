//! Dense complex linear algebra.
//!
//! [`ComplexMatrix`] is the square carrier used for every operator in the
//! crate. The decompositions lean on `nalgebra`; eigenvectors of a
//! non-Hermitian matrix are obtained by back-substitution on its complex
//! Schur form so that defective (Jordan) cases are detected from the rank of
//! the eigenvector matrix rather than assumed away.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default cap on the dimension produced by [`kron`].
pub const DEFAULT_MAX_DIM: usize = 1 << 20;

/// Eigenvalues with modulus below this fraction of the spectral radius are
/// counted as zero by [`inertia_of`].
pub const ZERO_EIGENVALUE_REL: f64 = 1e-8;

/// Seed used by every randomized check unless overridden.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

const HERMITIAN_FAST_PATH_REL: f64 = 1e-14;
const SCHUR_MAX_ITER: usize = 10_000;

pub const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Absolute residual tolerance, scaled by `max(1, scale)` at the point of use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-10 }
    }
}

impl Tolerance {
    pub fn new(abs: f64) -> Self {
        Tolerance { abs }
    }

    pub fn scaled(&self, scale: f64) -> f64 {
        self.abs * scale.max(1.0)
    }
}

/// A dense square matrix with finite complex entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    m: DMatrix<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) {}", self.dim(), self.dim(), self.m)
    }
}

impl ComplexMatrix {
    /// Wraps an nalgebra matrix after checking it is square and finite.
    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Config("matrix dimension must be positive".into()));
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(ComplexMatrix { m })
    }

    pub(crate) fn from_raw(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        ComplexMatrix { m }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        Self::from_dmatrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c64(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_raw(DMatrix::from_fn(n, n, f))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_raw(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_raw(DMatrix::zeros(n, n))
    }

    pub fn diag(d: &[C64]) -> Self {
        Self::from_raw(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn real_diag(d: &[f64]) -> Self {
        let d: Vec<C64> = d.iter().map(|&x| c64(x, 0.0)).collect();
        Self::diag(&d)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn dagger(&self) -> Self {
        Self::from_raw(self.m.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self::from_raw(self.m.transpose())
    }

    pub fn scale(&self, z: C64) -> Self {
        Self::from_raw(self.m.map(|x| x * z))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m.iter().fold(0.0, |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn is_hermitian(&self, tol: Tolerance) -> bool {
        (&self.m - self.m.adjoint()).norm() <= tol.scaled(self.norm())
    }

    /// True when every off-diagonal entry is below `tol` in modulus.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.m[(i, j)].norm() <= tol))
    }

    pub fn diagonal(&self) -> Vec<C64> {
        self.m.diagonal().iter().copied().collect()
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.m * v
    }

    /// Real and imaginary parts as `[re, im]` pairs, row-major.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| {
                        let z = self.m[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|p| c64(p[0], p[1])).collect())
            .collect();
        Self::from_rows(&rows)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.m[idx]
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix::from_raw(&self.m $op &rhs.m)
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix::from_raw(self.m $op rhs.m)
            }
        }
        impl $tr<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix::from_raw(self.m $op &rhs.m)
            }
        }
        impl $tr<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix::from_raw(&self.m $op rhs.m)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, z: C64) -> ComplexMatrix {
        self.scale(z)
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, z: C64) -> ComplexMatrix {
        self.scale(z)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, x: f64) -> ComplexMatrix {
        self.scale(c64(x, 0.0))
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, x: f64) -> ComplexMatrix {
        self.scale(c64(x, 0.0))
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::from_raw(-&self.m)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::from_raw(-self.m)
    }
}

fn same_dim(op: &'static str, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Shape {
            op,
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// Kronecker product `A ⊗ B`, capped at [`DEFAULT_MAX_DIM`].
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_limit(a, b, DEFAULT_MAX_DIM)
}

pub fn kron_with_limit(a: &ComplexMatrix, b: &ComplexMatrix, max_dim: usize) -> Result<ComplexMatrix> {
    let requested = a.dim().checked_mul(b.dim()).ok_or(Error::Size {
        requested: usize::MAX,
        max: max_dim,
    })?;
    if requested > max_dim {
        return Err(Error::Size { requested, max: max_dim });
    }
    Ok(ComplexMatrix::from_raw(a.m.kronecker(&b.m)))
}

/// Left-to-right Kronecker product of a non-empty list of factors.
pub fn kron_all(factors: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::Config("kron_all needs at least one factor".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, f| kron(&acc, f))
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    same_dim("commutator", a, b)?;
    Ok(a * b - b * a)
}

/// `AB + BA`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    same_dim("anticommutator", a, b)?;
    Ok(a * b + b * a)
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let svd = SVD::new(m.clone(), false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Relative threshold on `σ_min / σ_max` below which [`inverse`] reports a
/// singular matrix.
pub const SINGULAR_REL: f64 = 1e-12;

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    inverse_with_condition(a).map(|(inv, _)| inv)
}

/// Inverse together with the 2-norm condition number `σ_max / σ_min`.
pub fn inverse_with_condition(a: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let s = singular_values(&a.m);
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = s.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin <= SINGULAR_REL * smax {
        return Err(Error::Singular {
            smallest_singular_value: smin,
        });
    }
    let inv = a.m.clone().lu().try_inverse().ok_or(Error::Singular {
        smallest_singular_value: smin,
    })?;
    Ok((ComplexMatrix::from_raw(inv), smax / smin))
}

/// Orthonormal basis (as columns) of the right null space of `m`: the right
/// singular vectors whose singular value is at most `threshold`.
pub fn null_space(m: &DMatrix<C64>, threshold: f64) -> DMatrix<C64> {
    let (rows, cols) = m.shape();
    // thin SVD only yields min(rows, cols) right vectors; pad to square
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let cols_out: Vec<DVector<C64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= threshold)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect();
    if cols_out.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&cols_out)
    }
}

/// Eigenpairs of a square matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<C64>,
    /// Unit-norm eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
    pub diagonalizable: bool,
    /// 2-norm condition number of the eigenvector matrix.
    pub condition_estimate: f64,
}

impl EigenDecomposition {
    /// `‖AV − V diag(λ)‖_F`.
    pub fn residual(&self, a: &ComplexMatrix) -> f64 {
        let v = self.eigenvectors.as_dmatrix();
        let lam = DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues));
        (a.as_dmatrix() * v - v * lam).norm()
    }
}

/// Below this value of `σ_min(V)` (unit columns) the eigenvectors are deemed
/// rank-deficient.
pub const DEFECTIVE_SIGMA: f64 = 1e-8;

pub fn eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let scale = a.norm().max(1.0);
    let skew = (&a.m - a.m.adjoint()).norm();
    if skew <= HERMITIAN_FAST_PATH_REL * scale {
        let (vals, vecs) = hermitian_eig(a)?;
        return Ok(EigenDecomposition {
            eigenvalues: vals.into_iter().map(|x| c64(x, 0.0)).collect(),
            eigenvectors: vecs,
            diagonalizable: true,
            condition_estimate: 1.0,
        });
    }

    let n = a.dim();
    let schur = Schur::try_new(a.m.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    for j in 0..n {
        for i in (j + 1)..n {
            if t[(i, j)].norm() > 1e-12 * scale {
                return Err(Error::Numeric("Schur form is not triangular".into()));
            }
        }
    }

    let t_norm = t.norm().max(f64::MIN_POSITIVE);
    let smin = f64::EPSILON * t_norm;
    let mut x = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        x[(k, k)] = c64(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = c64(0.0, 0.0);
            for j in (i + 1)..=k {
                acc += t[(i, j)] * x[(j, k)];
            }
            let mut pivot = t[(i, i)] - lambda;
            if pivot.norm() < smin {
                pivot = c64(smin, 0.0);
            }
            x[(i, k)] = -acc / pivot;
        }
    }
    let mut v = q * x;
    for mut col in v.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= c64(nrm, 0.0);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| cmp_complex(t[(i, i)], t[(j, j)]));
    let eigenvalues: Vec<C64> = order.iter().map(|&k| t[(k, k)]).collect();
    let v = DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);

    let s = singular_values(&v);
    let smax = s.first().copied().unwrap_or(0.0);
    let smin_v = s.last().copied().unwrap_or(0.0);
    let condition_estimate = if smin_v > 0.0 { smax / smin_v } else { f64::INFINITY };
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_raw(v),
        diagonalizable: smin_v > DEFECTIVE_SIGMA,
        condition_estimate,
    })
}

fn cmp_complex(a: C64, b: C64) -> std::cmp::Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and a
/// unitary eigenvector matrix. The input is symmetrized first.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let sym = (&a.m + a.m.adjoint()) * c64(0.5, 0.0);
    let n = a.dim();
    let se = SymmetricEigen::try_new(sym, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        se.eigenvalues[i]
            .partial_cmp(&se.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    Ok((vals, ComplexMatrix::from_raw(vecs)))
}

/// Counts of positive, negative and zero eigenvalues of a Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Inertia {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Inertia {
    pub fn new(n_plus: usize, n_minus: usize, n_zero: usize) -> Self {
        Inertia { n_plus, n_minus, n_zero }
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }

    pub fn is_definite(&self) -> bool {
        self.n_zero == 0 && (self.n_minus == 0 || self.n_plus == 0)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.n_zero == 0 && self.n_minus == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.n_zero == 0 && self.n_plus == 0
    }

    /// Both strictly positive and strictly negative eigenvalues present.
    pub fn is_indefinite(&self) -> bool {
        self.n_plus > 0 && self.n_minus > 0
    }
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n_plus, self.n_minus, self.n_zero)
    }
}

pub fn inertia_of(a: &ComplexMatrix) -> Result<Inertia> {
    inertia_of_with(a, Tolerance::default())
}

pub fn inertia_of_with(a: &ComplexMatrix, tol: Tolerance) -> Result<Inertia> {
    if !a.is_hermitian(tol) {
        return Err(Error::Domain("inertia requires a Hermitian matrix".into()));
    }
    let (vals, _) = hermitian_eig(a)?;
    Ok(inertia_from_eigenvalues(&vals))
}

pub(crate) fn inertia_from_eigenvalues(vals: &[f64]) -> Inertia {
    let radius = vals.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let zero = ZERO_EIGENVALUE_REL * radius;
    let mut inertia = Inertia::new(0, 0, 0);
    for &x in vals {
        if radius == 0.0 || x.abs() <= zero {
            inertia.n_zero += 1;
        } else if x > 0.0 {
            inertia.n_plus += 1;
        } else {
            inertia.n_minus += 1;
        }
    }
    inertia
}

/// The unique Hermitian positive-definite square root.
pub fn sqrt_pos_def(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_hermitian(Tolerance::default()) {
        return Err(Error::Domain("square root requires a Hermitian matrix".into()));
    }
    let (vals, vecs) = hermitian_eig(a)?;
    let inertia = inertia_from_eigenvalues(&vals);
    if !inertia.is_positive_definite() {
        return Err(Error::Domain(format!(
            "square root requires a positive-definite matrix, inertia {inertia}"
        )));
    }
    let root: Vec<C64> = vals.iter().map(|&x| c64(x.sqrt(), 0.0)).collect();
    let s = &vecs * ComplexMatrix::diag(&root) * vecs.dagger();
    Ok(ComplexMatrix::from_raw((&s.m + s.m.adjoint()) * c64(0.5, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()
    }

    fn sigma3() -> ComplexMatrix {
        ComplexMatrix::real_diag(&[1.0, -1.0])
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        let r = ComplexMatrix::from_dmatrix(DMatrix::zeros(2, 3));
        assert!(matches!(r, Err(Error::NotSquare { rows: 2, cols: 3 })));
        let mut m = DMatrix::zeros(2, 2);
        m[(1, 0)] = c64(f64::NAN, 0.0);
        assert!(matches!(
            ComplexMatrix::from_dmatrix(m),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
    }

    #[test]
    fn kron_examples() {
        let i6 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)).unwrap();
        assert_eq!(i6, ComplexMatrix::identity(6));

        let d = kron(&sigma3(), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(d, ComplexMatrix::real_diag(&[1.0, 1.0, -1.0, -1.0]));

        // alpha ⊗ alpha has its only nonzero at (0, 3): row 0 = (0,0), col 3 = (1,1)
        let aa = kron(&alpha(), &alpha()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (0, 3) { 1.0 } else { 0.0 };
                assert_eq!(aa[(i, j)], c64(expected, 0.0));
            }
        }
    }

    #[test]
    fn kron_size_limit() {
        let i2 = ComplexMatrix::identity(2);
        let err = kron_with_limit(&i2, &i2, 3).unwrap_err();
        assert_eq!(err, Error::Size { requested: 4, max: 3 });
    }

    #[test]
    fn dagger_examples() {
        let ad = dagger(&alpha());
        assert_eq!(ad, ComplexMatrix::from_real_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap());
        assert_eq!(dagger(&ComplexMatrix::identity(3)), ComplexMatrix::identity(3));
        let m = ComplexMatrix::from_rows(&[vec![c64(0., 0.), c64(0., 1.)], vec![c64(0., 0.), c64(0., 0.)]]).unwrap();
        let expected =
            ComplexMatrix::from_rows(&[vec![c64(0., 0.), c64(0., 0.)], vec![c64(0., -1.), c64(0., 0.)]]).unwrap();
        assert_eq!(dagger(&m), expected);
    }

    #[test]
    fn commutator_examples() {
        let a = alpha();
        assert_eq!(commutator(&a, &a).unwrap(), ComplexMatrix::zeros(2));
        assert_eq!(anticommutator(&a, &a.dagger()).unwrap(), ComplexMatrix::identity(2));
        assert_eq!(commutator(&sigma3(), &a).unwrap(), &a * 2.0);
        assert!(matches!(
            commutator(&a, &ComplexMatrix::identity(3)),
            Err(Error::Shape { left: 2, right: 3, .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        assert!(close(&inverse(&sigma3()).unwrap(), &sigma3(), 1e-15));
        let d = inverse(&ComplexMatrix::real_diag(&[2.0, -1.0])).unwrap();
        assert!(close(&d, &ComplexMatrix::real_diag(&[0.5, -1.0]), 1e-15));
        let u = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[vec![1.0, -1.0], vec![0.0, 1.0]]).unwrap();
        let (inv, cond) = inverse_with_condition(&u).unwrap();
        assert!(close(&inv, &expected, 1e-14));
        // σ = (√5 ± 1)/2 for [[1,1],[0,1]], so cond = (3 + √5)/2
        assert!((cond - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_singular() {
        match inverse(&alpha()) {
            Err(Error::Singular { smallest_singular_value }) => assert!(smallest_singular_value < 1e-15),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn eig_examples() {
        let e = eig(&ComplexMatrix::real_diag(&[3.0, 1.0, 1.0])).unwrap();
        let re: Vec<f64> = e.eigenvalues.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![1.0, 1.0, 3.0]);
        assert!(e.diagonalizable);

        let e = eig(&sigma3()).unwrap();
        let re: Vec<f64> = e.eigenvalues.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![-1.0, 1.0]);

        let e = eig(&alpha()).unwrap();
        assert!(e.eigenvalues.iter().all(|z| z.norm() < 1e-12));
        assert!(!e.diagonalizable);
    }

    #[test]
    fn eig_non_hermitian_reconstructs() {
        let a = ComplexMatrix::from_rows(&[
            vec![c64(1., 0.), c64(2., 1.), c64(0., 0.)],
            vec![c64(0., 0.), c64(-1., 0.5), c64(3., 0.)],
            vec![c64(0.5, 0.), c64(0., 0.), c64(2., -1.)],
        ])
        .unwrap();
        let e = eig(&a).unwrap();
        assert!(e.diagonalizable);
        assert!(e.residual(&a) <= 1e-12 * a.norm());
        for col in e.eigenvectors.as_dmatrix().column_iter() {
            assert!((col.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inertia_examples() {
        assert_eq!(inertia_of(&ComplexMatrix::identity(4)).unwrap(), Inertia::new(4, 0, 0));
        assert_eq!(inertia_of(&sigma3()).unwrap(), Inertia::new(1, 1, 0));
        let s = sigma3();
        let s3 = kron_all(&[&s, &s, &s]).unwrap();
        assert_eq!(inertia_of(&s3).unwrap(), Inertia::new(4, 4, 0));
        assert_eq!(
            inertia_of(&ComplexMatrix::real_diag(&[1.0, 0.0, -2.0])).unwrap(),
            Inertia::new(1, 1, 1)
        );
        assert!(matches!(inertia_of(&alpha()), Err(Error::Domain(_))));
    }

    #[test]
    fn sqrt_examples() {
        let i3 = ComplexMatrix::identity(3);
        assert!(close(&sqrt_pos_def(&i3).unwrap(), &i3, 1e-14));
        let d = sqrt_pos_def(&ComplexMatrix::real_diag(&[4.0, 9.0])).unwrap();
        assert!(close(&d, &ComplexMatrix::real_diag(&[2.0, 3.0]), 1e-14));

        let a = ComplexMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let s = sqrt_pos_def(&a).unwrap();
        assert!(close(&(&s * &s), &a, 1e-12));
        // oracle: eigenvalues 3 and 1 on (1,±1)/√2 give S = [[p,q],[q,p]]
        let p = (3f64.sqrt() + 1.0) / 2.0;
        let q = (3f64.sqrt() - 1.0) / 2.0;
        let expected = ComplexMatrix::from_real_rows(&[vec![p, q], vec![q, p]]).unwrap();
        assert!(close(&s, &expected, 1e-13));

        assert!(matches!(sqrt_pos_def(&sigma3()), Err(Error::Domain(_))));
        assert!(matches!(
            sqrt_pos_def(&ComplexMatrix::real_diag(&[1.0, 0.0])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn null_space_of_wide_matrix() {
        // one equation, three unknowns -> two-dimensional kernel
        let m = DMatrix::from_row_slice(1, 3, &[c64(1., 0.), c64(1., 0.), c64(0., 0.)]);
        let k = null_space(&m, 1e-12);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-14);
    }
}
