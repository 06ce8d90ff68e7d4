//! ℓ-site abnormal-phermion Fock space.
//!
//! Site operators use a left `σ₃` string: `α^{(i)} = σ₃^{⊗(i−1)} ⊗ iα ⊗ 1`.
//! Site 1 is the leftmost tensor factor, so occupation `ν_i` is bit `ℓ − i`
//! of the basis index. Every site operator is a phased bit flip, so all
//! operators are stored as CSR matrices; dense copies are built on request.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{alpha, make_abnormal_phermion, sigma3, MetricOperator, RelationResidual};
use crate::error::{Error, Result};
use crate::matops::{c64, kron_all, null_space, ComplexMatrix, Tolerance, C64};

pub type SparseMatrix = CsrMatrix<C64>;

pub const MIN_SITES: usize = 2;
pub const MAX_SITES: usize = 12;

fn dagger(a: &SparseMatrix) -> SparseMatrix {
    let mut t = a.transpose();
    for v in t.values_mut() {
        *v = v.conj();
    }
    t
}

/// `η⁻¹ A† η` for a diagonal `η` with entries `±1`.
fn sharp(a: &SparseMatrix, eta: &[f64]) -> SparseMatrix {
    let mut t = dagger(a);
    for (r, c, v) in t.triplet_iter_mut() {
        *v *= eta[r] * eta[c];
    }
    t
}

pub fn frobenius(a: &SparseMatrix) -> f64 {
    a.values().iter().fold(0.0, |acc, z| acc + z.norm_sqr()).sqrt()
}

fn commutator(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    a * b - b * a
}

fn anticommutator(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    a * b + b * a
}

pub fn to_dense(a: &SparseMatrix) -> ComplexMatrix {
    ComplexMatrix::from_dmatrix(DMatrix::from(a)).expect("site operators have finite entries")
}

fn apply(a: &SparseMatrix, v: &[(usize, C64)], dim: usize) -> Vec<(usize, C64)> {
    let mut dense = vec![c64(0.0, 0.0); dim];
    for &(k, x) in v {
        dense[k] = x;
    }
    let mut out = Vec::new();
    for (r, row) in a.row_iter().enumerate() {
        let mut acc = c64(0.0, 0.0);
        for (&c, &w) in row.col_indices().iter().zip(row.values()) {
            acc += w * dense[c];
        }
        if acc != c64(0.0, 0.0) {
            out.push((r, acc));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct MultiPhermionSystem {
    ell: usize,
    annihilators: Vec<SparseMatrix>,
    creators: Vec<SparseMatrix>,
    eta_diagonal: Vec<f64>,
    total_number: SparseMatrix,
}

fn site_bit(ell: usize, site: usize) -> usize {
    1 << (ell - 1 - site)
}

/// `(−1)` to the number of occupied sites left of `site` in basis index `idx`.
fn string_sign(ell: usize, site: usize, idx: usize) -> f64 {
    let higher = idx >> (ell - site);
    if higher.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `ℓ` sites with `2 ≤ ℓ ≤ 12`.
pub fn build_multi(ell: usize) -> Result<MultiPhermionSystem> {
    if !(MIN_SITES..=MAX_SITES).contains(&ell) {
        return Err(Error::Config(format!(
            "site count must lie in {MIN_SITES}..={MAX_SITES}, got {ell}"
        )));
    }
    let dim = 1usize << ell;
    let i = c64(0.0, 1.0);
    let mut annihilators = Vec::with_capacity(ell);
    let mut creators = Vec::with_capacity(ell);
    for site in 0..ell {
        let bit = site_bit(ell, site);
        let mut a = CooMatrix::new(dim, dim);
        let mut b = CooMatrix::new(dim, dim);
        for col in 0..dim {
            let s = string_sign(ell, site, col);
            if col & bit != 0 {
                a.push(col ^ bit, col, i * s);
            } else {
                // (iα)♯ = iα† with respect to σ₃
                b.push(col | bit, col, i * s);
            }
        }
        annihilators.push(CsrMatrix::from(&a));
        creators.push(CsrMatrix::from(&b));
    }
    let eta_diagonal: Vec<f64> = (0..dim)
        .map(|k| if k.count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let mut total_number = CsrMatrix::zeros(dim, dim);
    for (a, b) in annihilators.iter().zip(&creators) {
        total_number = total_number - b * a;
    }
    Ok(MultiPhermionSystem {
        ell,
        annihilators,
        creators,
        eta_diagonal,
        total_number,
    })
}

/// The same site annihilator as a dense Kronecker product.
pub fn dense_site_annihilator(ell: usize, site: usize) -> Result<ComplexMatrix> {
    if site >= ell {
        return Err(Error::Range {
            index: site,
            max: ell.saturating_sub(1),
        });
    }
    let s3 = sigma3();
    let id = ComplexMatrix::identity(2);
    let ia = alpha().scale(c64(0.0, 1.0));
    let factors: Vec<&ComplexMatrix> = (0..ell)
        .map(|k| match k.cmp(&site) {
            std::cmp::Ordering::Less => &s3,
            std::cmp::Ordering::Equal => &ia,
            std::cmp::Ordering::Greater => &id,
        })
        .collect();
    kron_all(&factors)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OccupationState {
    pub occupations: Vec<u8>,
    /// Nonzero entries `(index, value)` of the state vector.
    #[serde(skip)]
    pub entries: Vec<(usize, C64)>,
    pub eta_norm: f64,
    /// Coefficient of the single nonzero entry, `[re, im]`.
    pub phase: [f64; 2],
}

impl OccupationState {
    pub fn particle_number(&self) -> usize {
        self.occupations.iter().map(|&v| v as usize).sum()
    }

    pub fn dense(&self, dim: usize) -> DVector<C64> {
        let mut v = DVector::zeros(dim);
        for &(k, x) in &self.entries {
            v[k] = x;
        }
        v
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InnerProductCheck {
    /// `⟨⟨ν|ν⟩⟩` rounded to its sign, in occupation order.
    pub diagonal: Vec<i8>,
    /// `max | |⟨⟨ν|ν⟩⟩| − 1 |`.
    pub max_modulus_error: f64,
    /// `max |⟨⟨μ|ν⟩⟩|` over `μ ≠ ν`.
    pub max_off_diagonal: f64,
    /// Every diagonal sign equals `(−1)^{Σν}`.
    pub sign_rule_holds: bool,
    /// Every state is an eigenvector of the total number with eigenvalue `Σν`.
    pub number_eigenstates: bool,
}

impl InnerProductCheck {
    pub fn pass(&self) -> bool {
        self.sign_rule_holds && self.number_eigenstates && self.max_modulus_error == 0.0 && self.max_off_diagonal == 0.0
    }
}

#[derive(Clone, Debug)]
pub struct PhysicalSubspace {
    pub states: Vec<OccupationState>,
    /// Diagonal projector onto the span of `states`.
    pub projector: SparseMatrix,
}

impl PhysicalSubspace {
    pub fn dim(&self) -> usize {
        self.states.len()
    }
}

#[derive(Clone, Debug)]
pub struct PhysicalOperators {
    /// `α⁺_{ij} = α^{(j)♯} α^{(i)♯}`, `i < j`.
    pub creators: BTreeMap<(usize, usize), SparseMatrix>,
    /// `α_{ij} = α^{(i)} α^{(j)}`, `i < j`.
    pub annihilators: BTreeMap<(usize, usize), SparseMatrix>,
    /// `β_{ij} = α^{(i)♯} α^{(j)}`, all `i, j`.
    pub shifts: BTreeMap<(usize, usize), SparseMatrix>,
}

impl MultiPhermionSystem {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn dim(&self) -> usize {
        1 << self.ell
    }

    pub fn site_annihilators(&self) -> &[SparseMatrix] {
        &self.annihilators
    }

    pub fn site_creators(&self) -> &[SparseMatrix] {
        &self.creators
    }

    pub fn eta_diagonal(&self) -> &[f64] {
        &self.eta_diagonal
    }

    /// Dense `σ₃^{⊗ℓ}`.
    pub fn eta(&self) -> Result<MetricOperator> {
        MetricOperator::from_diagonal(&self.eta_diagonal)
    }

    pub fn total_number(&self) -> &SparseMatrix {
        &self.total_number
    }

    fn eta_inner(&self, u: &[(usize, C64)], v: &[(usize, C64)]) -> C64 {
        let mut acc = c64(0.0, 0.0);
        let mut j = 0;
        for &(k, x) in u {
            while j < v.len() && v[j].0 < k {
                j += 1;
            }
            if j < v.len() && v[j].0 == k {
                acc += x.conj() * v[j].1 * self.eta_diagonal[k];
            }
        }
        acc
    }

    /// `{α^{(i)}, α^{(j)}} = 0`, `{α^{(i)}, α^{(j)♯}} = −δ_ij` and
    /// `α^{(i)♯} = η⁻¹ α^{(i)†} η` for every pair of sites.
    pub fn verify_relative_fermi(&self, tol: Tolerance) -> Vec<RelationResidual> {
        let dim = self.dim();
        let id: SparseMatrix = CsrMatrix::identity(dim);
        let tuples: Vec<(usize, usize)> = (0..self.ell).flat_map(|i| (0..self.ell).map(move |j| (i, j))).collect();
        let mut out: Vec<RelationResidual> = tuples
            .par_iter()
            .flat_map_iter(|&(i, j)| {
                let a = &self.annihilators;
                let b = &self.creators;
                let mut v = Vec::with_capacity(2);
                if i <= j {
                    let aa = anticommutator(&a[i], &a[j]);
                    v.push(RelationResidual::new(
                        format!("{{α^({}), α^({})}} = 0", i + 1, j + 1),
                        frobenius(&aa),
                        tol.scaled(frobenius(&a[i]) * frobenius(&a[j])),
                    ));
                }
                let ab = anticommutator(&a[i], &b[j]);
                let diff = if i == j { ab + &id } else { ab };
                v.push(RelationResidual::new(
                    format!("{{α^({}), α^({})♯}} = −δ", i + 1, j + 1),
                    frobenius(&diff),
                    tol.scaled((dim as f64).sqrt()),
                ));
                v.into_iter()
            })
            .collect();
        for (k, (a, b)) in self.annihilators.iter().zip(&self.creators).enumerate() {
            out.push(RelationResidual::new(
                format!("α^({})♯ = η⁻¹α^({})†η", k + 1, k + 1),
                frobenius(&(sharp(a, &self.eta_diagonal) - b)),
                tol.scaled(frobenius(b)),
            ));
        }
        out
    }

    /// Simultaneous kernel of the site annihilators, as basis indices whose
    /// column is zero in every annihilator.
    fn vacuum_indices(&self) -> Vec<usize> {
        let mut occupied = vec![false; self.dim()];
        for a in &self.annihilators {
            for (_, c, v) in a.triplet_iter() {
                if *v != c64(0.0, 0.0) {
                    occupied[c] = true;
                }
            }
        }
        (0..self.dim()).filter(|&k| !occupied[k]).collect()
    }

    /// All `2^ℓ` states `(α^{(1)♯})^{ν₁} ⋯ (α^{(ℓ)♯})^{ν_ℓ} |0⟩`, ordered by
    /// the binary number `ν₁ν₂…ν_ℓ`.
    pub fn occupation_basis(&self) -> Result<Vec<OccupationState>> {
        let vac = self.vacuum_indices();
        if vac.len() != 1 {
            return Err(Error::Structure(format!(
                "vacuum space has dimension {}, expected 1",
                vac.len()
            )));
        }
        let dim = self.dim();
        let vacuum = vec![(vac[0], c64(1.0, 0.0))];
        let states = (0..dim)
            .into_par_iter()
            .map(|code| {
                let occupations: Vec<u8> = (0..self.ell).map(|s| ((code & site_bit(self.ell, s)) != 0) as u8).collect();
                let mut v = vacuum.clone();
                for site in (0..self.ell).rev() {
                    if occupations[site] == 1 {
                        v = apply(&self.creators[site], &v, dim);
                    }
                }
                let eta_norm = self.eta_inner(&v, &v).re;
                let phase = v.first().map_or([0.0, 0.0], |&(_, z)| [z.re, z.im]);
                OccupationState {
                    occupations,
                    entries: v,
                    eta_norm,
                    phase,
                }
            })
            .collect();
        Ok(states)
    }

    /// Gram matrix of the occupation basis against `(−1)^{Σν} δ_{μν}`.
    pub fn verify_inner_product(&self, states: &[OccupationState]) -> InnerProductCheck {
        let dim = self.dim();
        let mut by_index: Vec<Vec<usize>> = vec![Vec::new(); dim];
        for (s, st) in states.iter().enumerate() {
            for &(k, _) in &st.entries {
                by_index[k].push(s);
            }
        }
        let mut max_off: f64 = 0.0;
        for bucket in &by_index {
            for (x, &s) in bucket.iter().enumerate() {
                for &t in &bucket[x + 1..] {
                    max_off = max_off.max(self.eta_inner(&states[s].entries, &states[t].entries).norm());
                }
            }
        }
        let mut diagonal = Vec::with_capacity(states.len());
        let mut max_modulus_error: f64 = 0.0;
        let mut sign_rule_holds = true;
        let mut number_eigenstates = true;
        for st in states {
            max_modulus_error = max_modulus_error.max((st.eta_norm.abs() - 1.0).abs());
            let sign: i8 = if st.eta_norm > 0.0 { 1 } else { -1 };
            let expected: i8 = if st.particle_number() % 2 == 0 { 1 } else { -1 };
            sign_rule_holds &= sign == expected;
            diagonal.push(sign);
            let count = c64(st.particle_number() as f64, 0.0);
            let mut residual = st.dense(dim) * count;
            for (k, y) in apply(&self.total_number, &st.entries, dim) {
                residual[k] -= y;
            }
            number_eigenstates &= residual.norm() <= 1e-12;
        }
        InnerProductCheck {
            diagonal,
            max_modulus_error,
            max_off_diagonal: max_off,
            sign_rule_holds,
            number_eigenstates,
        }
    }

    /// Even-occupation states and the projector onto their span.
    pub fn physical_subspace(&self) -> Result<PhysicalSubspace> {
        let states: Vec<OccupationState> = self
            .occupation_basis()?
            .into_iter()
            .filter(|s| s.particle_number() % 2 == 0)
            .collect();
        let mut p = CooMatrix::new(self.dim(), self.dim());
        for s in &states {
            for &(k, _) in &s.entries {
                p.push(k, k, c64(1.0, 0.0));
            }
        }
        Ok(PhysicalSubspace {
            states,
            projector: CsrMatrix::from(&p),
        })
    }

    pub fn physical_ops(&self) -> PhysicalOperators {
        let a = &self.annihilators;
        let b = &self.creators;
        let mut creators = BTreeMap::new();
        let mut annihilators = BTreeMap::new();
        let mut shifts = BTreeMap::new();
        for i in 0..self.ell {
            for j in 0..self.ell {
                shifts.insert((i, j), &b[i] * &a[j]);
                if i < j {
                    creators.insert((i, j), &b[j] * &b[i]);
                    annihilators.insert((i, j), &a[i] * &a[j]);
                }
            }
        }
        PhysicalOperators {
            creators,
            annihilators,
            shifts,
        }
    }

    pub fn verify_phys_commutators(&self, tol: Tolerance) -> PhysCommutatorReport {
        let ops = self.physical_ops();
        let ell = self.ell;
        let dim = self.dim();
        let id: SparseMatrix = CsrMatrix::identity(dim);
        let pairs: Vec<(usize, usize)> = ops.annihilators.keys().copied().collect();
        let quads: Vec<((usize, usize), (usize, usize))> =
            pairs.iter().flat_map(|&p| pairs.iter().map(move |&q| (p, q))).collect();

        let phys1: Vec<TupleCheck> = quads
            .par_iter()
            .flat_map_iter(|&((i, j), (k, l))| {
                let ann = commutator(&ops.annihilators[&(i, j)], &ops.annihilators[&(k, l)]);
                let cre = commutator(&ops.creators[&(i, j)], &ops.creators[&(k, l)]);
                let scale = 1.0;
                [
                    TupleCheck::new("[α_ij, α_kl] = 0", [i, j, k, l], frobenius(&ann), tol.scaled(scale)),
                    TupleCheck::new("[α⁺_ij, α⁺_kl] = 0", [i, j, k, l], frobenius(&cre), tol.scaled(scale)),
                ]
            })
            .collect();

        let phys2: Vec<TupleCheck> = quads
            .par_iter()
            .map(|&((i, j), (k, l))| {
                let lhs = commutator(&ops.annihilators[&(i, j)], &ops.creators[&(k, l)]);
                phys2_check(&ops, &id, &lhs, [i, j, k, l], tol)
            })
            .collect();

        let unordered_tuples: Vec<[usize; 4]> = (0..ell)
            .flat_map(|i| (0..ell).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .flat_map(|(i, j)| {
                (0..ell)
                    .flat_map(move |k| (0..ell).map(move |l| (k, l)))
                    .filter(|(k, l)| k != l)
                    .map(move |(k, l)| [i, j, k, l])
            })
            .collect();
        let a = &self.annihilators;
        let b = &self.creators;
        let unordered: Vec<TupleCheck> = unordered_tuples
            .par_iter()
            .map(|&[i, j, k, l]| {
                let lhs = commutator(&(&a[i] * &a[j]), &(&b[l] * &b[k]));
                phys2_check(&ops, &id, &lhs, [i, j, k, l], tol)
            })
            .collect();
        let unordered_sweep = UnorderedSweep {
            tuples: unordered.len(),
            printed_failures: unordered.iter().filter(|c| !c.pass).map(|c| c.tuple.clone()).collect(),
            corrected_failures: unordered
                .iter()
                .filter(|c| !c.corrected_pass.unwrap_or(true))
                .map(|c| c.tuple.clone())
                .collect(),
            max_printed_residual: unordered.iter().map(|c| c.residual).fold(0.0, f64::max),
            max_corrected_residual: unordered
                .iter()
                .filter_map(|c| c.corrected_residual)
                .fold(0.0, f64::max),
        };

        let shift_keys: Vec<(usize, usize)> = ops.shifts.keys().copied().collect();
        let shift_number: Vec<TupleCheck> = shift_keys
            .par_iter()
            .map(|&(i, j)| {
                let c = commutator(&ops.shifts[&(i, j)], &self.total_number);
                TupleCheck::new("[β_ij, N_tot] = 0", [i, j], frobenius(&c), tol.scaled(1.0))
            })
            .collect();

        let parity = diagonal_sparse(&self.eta_diagonal);
        let mut structure: Vec<TupleCheck> = Vec::new();
        for (&(i, j), an) in &ops.annihilators {
            let cr = &ops.creators[&(i, j)];
            structure.push(TupleCheck::new(
                "α_ij♯ = α⁺_ij",
                [i, j],
                frobenius(&(sharp(an, &self.eta_diagonal) - cr)),
                tol.scaled(frobenius(cr)),
            ));
            structure.push(TupleCheck::new(
                "[α_ij, parity] = 0",
                [i, j],
                frobenius(&commutator(an, &parity)),
                tol.scaled(1.0),
            ));
            structure.push(TupleCheck::new(
                "[α⁺_ij, parity] = 0",
                [i, j],
                frobenius(&commutator(cr, &parity)),
                tol.scaled(1.0),
            ));
        }

        PhysCommutatorReport {
            phys1,
            phys2,
            unordered_sweep,
            shift_number,
            structure,
        }
    }

    pub fn to_document(&self, tol: Tolerance) -> Result<MultiDocument> {
        let basis = self.occupation_basis()?;
        let inner = self.verify_inner_product(&basis);
        let report = self.verify_phys_commutators(tol);
        let mut checks = self.verify_relative_fermi(tol)
            .into_iter()
            .map(|r| TupleCheck {
                relation: r.relation_name,
                tuple: Vec::new(),
                residual: r.residual_norm,
                tolerance: r.tolerance,
                pass: r.pass,
                term_breakdown: None,
                corrected_residual: None,
                corrected_pass: None,
            })
            .collect::<Vec<_>>();
        checks.extend(report.phys1.iter().cloned());
        checks.extend(report.phys2.iter().cloned());
        checks.extend(report.shift_number.iter().cloned());
        checks.extend(report.structure.iter().cloned());
        Ok(MultiDocument {
            ell: self.ell,
            dim: self.dim(),
            physical_dim: basis.iter().filter(|s| s.eta_norm > 0.0).count(),
            inner_product_diagonal: inner.diagonal.clone(),
            phases: basis.iter().map(|s| s.phase).collect(),
            inner_product: inner,
            commutator_checks: checks,
            unordered_sweep: report.unordered_sweep,
        })
    }
}

fn diagonal_sparse(d: &[f64]) -> SparseMatrix {
    let mut coo = CooMatrix::new(d.len(), d.len());
    for (k, &x) in d.iter().enumerate() {
        coo.push(k, k, c64(x, 0.0));
    }
    CsrMatrix::from(&coo)
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TermContribution {
    pub term: &'static str,
    pub coefficient: f64,
}

/// One relation checked at one index tuple (1-based in serialized form).
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TupleCheck {
    pub relation: String,
    pub tuple: Vec<usize>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term_breakdown: Option<Vec<TermContribution>>,
    /// Residual with `−δ_il δ_jk` in place of `−δ_ij δ_jk`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrected_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrected_pass: Option<bool>,
}

impl TupleCheck {
    fn new<const N: usize>(relation: &str, tuple: [usize; N], residual: f64, tolerance: f64) -> Self {
        TupleCheck {
            relation: relation.to_string(),
            tuple: tuple.iter().map(|x| x + 1).collect(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            term_breakdown: None,
            corrected_residual: None,
            corrected_pass: None,
        }
    }
}

/// `[α_ij, α⁺_kl]` against
/// `δ_ik δ_jl − δ_ij δ_jk + δ_ik β_lj + δ_jl β_ki − δ_jk β_li − δ_il β_kj`.
fn phys2_check(
    ops: &PhysicalOperators,
    id: &SparseMatrix,
    lhs: &SparseMatrix,
    [i, j, k, l]: [usize; 4],
    tol: Tolerance,
) -> TupleCheck {
    let beta = |p: usize, q: usize| &ops.shifts[&(p, q)];
    let terms = [
        ("δ_ik δ_jl", delta(i, k) * delta(j, l)),
        ("−δ_ij δ_jk", -delta(i, j) * delta(j, k)),
        ("δ_ik β_lj", delta(i, k)),
        ("δ_jl β_ki", delta(j, l)),
        ("−δ_jk β_li", -delta(j, k)),
        ("−δ_il β_kj", -delta(i, l)),
    ];
    let mut shifts_part = CsrMatrix::zeros(id.nrows(), id.ncols());
    for (coef, m) in [
        (terms[2].1, beta(l, j)),
        (terms[3].1, beta(k, i)),
        (terms[4].1, beta(l, i)),
        (terms[5].1, beta(k, j)),
    ] {
        if coef != 0.0 {
            shifts_part = shifts_part + m * c64(coef, 0.0);
        }
    }
    let printed = &shifts_part + id * c64(terms[0].1 + terms[1].1, 0.0);
    let corrected_constant = terms[0].1 - delta(i, l) * delta(j, k);
    let corrected = &shifts_part + id * c64(corrected_constant, 0.0);
    let scale = frobenius(lhs).max(frobenius(&printed));
    let residual = frobenius(&(lhs - &printed));
    let corrected_residual = frobenius(&(lhs - &corrected));
    let tolerance = tol.scaled(scale);
    TupleCheck {
        relation: "[α_ij, α⁺_kl] = δ_ik δ_jl − δ_ij δ_jk + δ_ik β_lj + δ_jl β_ki − δ_jk β_li − δ_il β_kj".into(),
        tuple: vec![i + 1, j + 1, k + 1, l + 1],
        residual,
        tolerance,
        pass: residual <= tolerance,
        term_breakdown: Some(
            terms
                .iter()
                .map(|&(term, coefficient)| TermContribution { term, coefficient })
                .collect(),
        ),
        corrected_residual: Some(corrected_residual),
        corrected_pass: Some(corrected_residual <= tolerance),
    }
}

/// The six-term formula over all `i ≠ j`, `k ≠ l`, outside the ordered range
/// `i < j`, `k < l` where it is stated.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnorderedSweep {
    pub tuples: usize,
    pub printed_failures: Vec<Vec<usize>>,
    pub corrected_failures: Vec<Vec<usize>>,
    pub max_printed_residual: f64,
    pub max_corrected_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PhysCommutatorReport {
    pub phys1: Vec<TupleCheck>,
    pub phys2: Vec<TupleCheck>,
    pub unordered_sweep: UnorderedSweep,
    pub shift_number: Vec<TupleCheck>,
    pub structure: Vec<TupleCheck>,
}

impl PhysCommutatorReport {
    pub fn pass(&self) -> bool {
        [&self.phys1, &self.phys2, &self.shift_number, &self.structure]
            .iter()
            .all(|v| v.iter().all(|c| c.pass))
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiDocument {
    pub ell: usize,
    pub dim: usize,
    pub physical_dim: usize,
    pub inner_product_diagonal: Vec<i8>,
    pub phases: Vec<[f64; 2]>,
    pub inner_product: InnerProductCheck,
    pub commutator_checks: Vec<TupleCheck>,
    pub unordered_sweep: UnorderedSweep,
}

/// Physical dimension of a single abnormal phermion: the number of
/// positive-norm states in its two-level space.
pub fn single_site_physical_dimension() -> Result<usize> {
    let rep = make_abnormal_phermion();
    let kernel = null_space(rep.c.as_dmatrix(), 1e-12);
    if kernel.ncols() != 1 {
        return Err(Error::Structure("single-site vacuum is not one-dimensional".into()));
    }
    let vac = kernel.column(0).into_owned();
    let excited = rep.c_star.apply(&vac);
    let count = [vac, excited]
        .iter()
        .filter(|v| rep.eta.inner(v, v).re > 0.0)
        .count();
    Ok(count)
}

/// `2^{ℓ−1}`, also the Fock dimension of `ℓ − 1` ordinary fermions.
pub fn expected_physical_dimension(ell: usize) -> usize {
    1 << (ell - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pseudo_adjoint;
    use crate::matops::{anticommutator as dense_anti, commutator as dense_comm};

    fn tol() -> Tolerance {
        Tolerance::new(1e-12)
    }

    #[test]
    fn range_enforced() {
        assert!(matches!(build_multi(1), Err(Error::Config(_))));
        assert!(matches!(build_multi(13), Err(Error::Config(_))));
        assert_eq!(build_multi(3).unwrap().dim(), 8);
    }

    #[test]
    fn two_site_relations() {
        let sys = build_multi(2).unwrap();
        let a = sys.site_annihilators();
        let b = sys.site_creators();
        assert_eq!(frobenius(&anticommutator(&a[0], &b[1])), 0.0);
        let d = to_dense(&anticommutator(&a[0], &b[0]));
        assert_eq!(d, -ComplexMatrix::identity(4));
        assert_eq!(sys.eta_diagonal(), &[1.0, -1.0, -1.0, 1.0]);
        assert!(sys.verify_relative_fermi(tol()).iter().all(|r| r.pass && r.residual_norm == 0.0));
    }

    #[test]
    fn sparse_matches_dense_kron() {
        for ell in 2..=5 {
            let sys = build_multi(ell).unwrap();
            let eta = crate::matops::kron_all(&vec![&sigma3(); ell]).unwrap();
            assert_eq!(eta, ComplexMatrix::real_diag(sys.eta_diagonal()));
            let eta = MetricOperator::new(eta).unwrap();
            for site in 0..ell {
                let dense = dense_site_annihilator(ell, site).unwrap();
                assert_eq!(to_dense(&sys.site_annihilators()[site]), dense);
                let creator = pseudo_adjoint(&dense, &eta).unwrap();
                assert!((to_dense(&sys.site_creators()[site]) - creator).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn dense_relative_fermi_oracle() {
        let ell = 3;
        let eta = MetricOperator::from_diagonal(build_multi(ell).unwrap().eta_diagonal()).unwrap();
        let ops: Vec<ComplexMatrix> = (0..ell).map(|s| dense_site_annihilator(ell, s).unwrap()).collect();
        for i in 0..ell {
            for j in 0..ell {
                let aa = dense_anti(&ops[i], &ops[j]).unwrap();
                assert!(aa.norm() == 0.0);
                let ab = dense_anti(&ops[i], &pseudo_adjoint(&ops[j], &eta).unwrap()).unwrap();
                let want = if i == j { -ComplexMatrix::identity(8) } else { ComplexMatrix::zeros(8) };
                assert!((ab - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn occupation_norms() {
        let sys = build_multi(2).unwrap();
        let basis = sys.occupation_basis().unwrap();
        let find = |occ: &[u8]| basis.iter().find(|s| s.occupations == occ).unwrap().eta_norm;
        assert_eq!(find(&[0, 0]), 1.0);
        assert_eq!(find(&[1, 1]), 1.0);
        assert_eq!(find(&[1, 0]), -1.0);

        let sys = build_multi(3).unwrap();
        let basis = sys.occupation_basis().unwrap();
        let find = |occ: &[u8]| basis.iter().find(|s| s.occupations == occ).unwrap();
        assert_eq!(find(&[1, 0, 1]).eta_norm, 1.0);
        assert_eq!(find(&[1, 0, 0]).eta_norm, -1.0);
        // explicit v†ηv on the dense vector
        let eta = sys.eta().unwrap();
        let v = find(&[1, 0, 0]).dense(8);
        assert_eq!(eta.inner(&v, &v).re, -1.0);
    }

    #[test]
    fn inner_product_rule() {
        for ell in 2..=8 {
            let sys = build_multi(ell).unwrap();
            let basis = sys.occupation_basis().unwrap();
            assert_eq!(basis.len(), 1 << ell);
            let check = sys.verify_inner_product(&basis);
            assert!(check.pass(), "ell={ell}: {check:?}");
            for st in &basis {
                let phase = c64(st.phase[0], st.phase[1]);
                assert!((phase.norm() - 1.0).abs() == 0.0);
            }
        }
    }

    #[test]
    fn phases_follow_creator_order() {
        let sys = build_multi(2).unwrap();
        let basis = sys.occupation_basis().unwrap();
        // α^{(1)♯} α^{(2)♯} |00⟩: site 2 gives i, then site 1 gives i → −1
        let s11 = basis.iter().find(|s| s.occupations == [1, 1]).unwrap();
        assert_eq!(s11.entries, vec![(3, c64(-1.0, 0.0))]);
    }

    #[test]
    fn physical_subspace_dimensions() {
        for ell in 2..=6 {
            let sys = build_multi(ell).unwrap();
            let phys = sys.physical_subspace().unwrap();
            assert_eq!(phys.dim(), expected_physical_dimension(ell));
            assert!(phys.states.iter().all(|s| s.eta_norm == 1.0));
            let p = to_dense(&phys.projector);
            assert_eq!(&p * &p, p);
        }
        let sys = build_multi(2).unwrap();
        let occ: Vec<Vec<u8>> = sys.physical_subspace().unwrap().states.into_iter().map(|s| s.occupations).collect();
        assert_eq!(occ, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(single_site_physical_dimension().unwrap(), 1);
        // ℓ − 1 fermions span 2^{ℓ−1} states
        for ell in 2..=12 {
            assert_eq!(expected_physical_dimension(ell), 2usize.pow(ell as u32 - 1));
        }
    }

    #[test]
    fn physical_operator_examples() {
        let sys = build_multi(2).unwrap();
        let ops = sys.physical_ops();
        let vac = vec![(0usize, c64(1.0, 0.0))];
        let out = apply(&ops.creators[&(0, 1)], &vac, 4);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, 3);
        assert_eq!(out[0].1.norm(), 1.0);

        let sys = build_multi(3).unwrap();
        let ops = sys.physical_ops();
        let vac = vec![(0usize, c64(1.0, 0.0))];
        for a in ops.annihilators.values() {
            assert!(apply(a, &vac, 8).is_empty());
        }
        let eta = sys.eta().unwrap();
        let a12 = to_dense(&ops.annihilators[&(0, 1)]);
        let c12 = to_dense(&ops.creators[&(0, 1)]);
        assert!((pseudo_adjoint(&a12, &eta).unwrap() - c12).norm() <= 1e-12);
    }

    #[test]
    fn phys2_examples_three_sites() {
        let sys = build_multi(3).unwrap();
        let ops = sys.physical_ops();
        let id = ComplexMatrix::identity(8);
        let b = |i, j| to_dense(&ops.shifts[&(i, j)]);
        let lhs = |i, j, k, l| {
            dense_comm(&to_dense(&ops.annihilators[&(i, j)]), &to_dense(&ops.creators[&(k, l)])).unwrap()
        };
        // (12),(12): 1 + β₂₂ + β₁₁
        let want = &id + b(1, 1) + b(0, 0);
        assert!((lhs(0, 1, 0, 1) - want).norm() <= 1e-12);
        // (12),(13): β₃₂
        assert!((lhs(0, 1, 0, 2) - b(2, 1)).norm() <= 1e-12);
    }

    #[test]
    fn phys1_four_sites() {
        let sys = build_multi(4).unwrap();
        let ops = sys.physical_ops();
        let c = commutator(&ops.annihilators[&(0, 1)], &ops.annihilators[&(2, 3)]);
        assert_eq!(frobenius(&c), 0.0);
    }

    #[test]
    fn full_commutator_sweep() {
        for ell in 2..=5 {
            let sys = build_multi(ell).unwrap();
            let report = sys.verify_phys_commutators(tol());
            assert!(report.pass(), "ell={ell}");
            let pairs = ell * (ell - 1) / 2;
            assert_eq!(report.phys2.len(), pairs * pairs);
            assert_eq!(report.phys1.len(), 2 * pairs * pairs);
            assert_eq!(report.shift_number.len(), ell * ell);
            assert!(report.phys2.iter().all(|c| c.corrected_pass == Some(true)));
        }
    }

    #[test]
    fn unordered_sweep_localizes_the_constant_term() {
        let sys = build_multi(3).unwrap();
        let sweep = sys.verify_phys_commutators(tol()).unordered_sweep;
        assert!(sweep.corrected_failures.is_empty());
        assert!(!sweep.printed_failures.is_empty());
        for t in &sweep.printed_failures {
            // fails exactly where i = l and j = k
            assert!(t[0] == t[3] && t[1] == t[2], "{t:?}");
        }
        assert_eq!(sweep.printed_failures.len(), 6);
    }

    #[test]
    fn document_shape() {
        let sys = build_multi(2).unwrap();
        let doc = serde_json::to_value(sys.to_document(tol()).unwrap()).unwrap();
        assert_eq!(doc["ell"], 2);
        assert_eq!(doc["dim"], 4);
        assert_eq!(doc["physicalDim"], 2);
        assert_eq!(doc["innerProductDiagonal"], serde_json::json!([1, -1, -1, 1]));
        let checks = doc["commutatorChecks"].as_array().unwrap();
        assert!(checks.iter().any(|c| c.get("termBreakdown").is_some()));
    }

    #[test]
    fn twelve_sites_build() {
        let sys = build_multi(12).unwrap();
        assert_eq!(sys.dim(), 4096);
        assert!(sys.verify_relative_fermi(tol()).iter().all(|r| r.pass));
    }

    #[test]
    fn shift_operators_conserve_number_dense() {
        let sys = build_multi(3).unwrap();
        let ops = sys.physical_ops();
        let n = to_dense(sys.total_number());
        for beta in ops.shifts.values() {
            assert_eq!(dense_comm(&to_dense(beta), &n).unwrap().norm(), 0.0);
        }
        // total number is diag(Σν)
        let diag: Vec<f64> = (0..8usize).map(|k| k.count_ones() as f64).collect();
        assert_eq!(n, ComplexMatrix::real_diag(&diag));
    }
}
