//! Composite boson ⊗ two-level oscillators.
//!
//! `H = E(N⊗1 + 1⊗n)`, `Q = √(2|E|)·a†⊗c` and `τ = 1⊗(1 − 2n)`, with the
//! boson factor always first. Identities involving `{Q, Q♯}` hold only below
//! the top boson level; that defect is kept visible in the reports.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    make_abnormal_phermion, make_boson, make_fermion, make_phermion, LadderRep, LadderRepDocument, MetricOperator,
    RelationResidual,
};
use crate::error::{Error, Result};
use crate::matops::{c64, commutator, kron, null_space, ComplexMatrix, Tolerance, C64};
use crate::pseudosusy::{
    canonical_phase, full_space_defect, pair_spectrum, verify_algebra, PseudoSusySystem, SpectrumLevel,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OscillatorKind {
    BosonFermion,
    BosonPhermion,
    BosonAbnormalPhermion,
}

impl std::fmt::Display for OscillatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OscillatorKind::BosonFermion => "boson-fermion",
            OscillatorKind::BosonPhermion => "boson-phermion",
            OscillatorKind::BosonAbnormalPhermion => "boson-abnormal-phermion",
        })
    }
}

/// Names under which lifted factor operators are stored.
pub const LIFTED_OPS: [&str; 4] = ["c", "c*", "n", "eta"];

#[derive(Clone, Debug)]
pub struct CompositeSystem {
    pub kind: OscillatorKind,
    factors: Vec<LadderRep>,
    lifted: BTreeMap<(usize, &'static str), ComplexMatrix>,
    eta: MetricOperator,
    tau: ComplexMatrix,
    h: ComplexMatrix,
    q: ComplexMatrix,
    energy: f64,
    truncation: usize,
    protected: ComplexMatrix,
}

impl CompositeSystem {
    pub fn factors(&self) -> &[LadderRep] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Operator `name` of factor `factor` acting on the full space.
    pub fn lifted(&self, factor: usize, name: &str) -> Option<&ComplexMatrix> {
        self.lifted.iter().find(|((f, n), _)| *f == factor && *n == name).map(|(_, m)| m)
    }

    pub fn eta(&self) -> &MetricOperator {
        &self.eta
    }

    pub fn tau(&self) -> &ComplexMatrix {
        &self.tau
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn supercharge(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn protected_projector(&self) -> &ComplexMatrix {
        &self.protected
    }

    pub fn pseudo_susy(&self) -> PseudoSusySystem {
        PseudoSusySystem::new(
            self.h.clone(),
            self.q.clone(),
            self.tau.clone(),
            self.eta.clone(),
            Some(self.protected.clone()),
        )
        .expect("operators share the product dimension")
    }

    /// Every lifted boson operator against every lifted two-level operator.
    pub fn relative_bose_checks(&self, tol: Tolerance) -> Vec<RelationResidual> {
        let mut out = Vec::new();
        for b in ["c", "c*", "n"] {
            let x = self.lifted(0, b).expect("boson factor present");
            for t in LIFTED_OPS {
                let y = self.lifted(1, t).expect("two-level factor present");
                let comm = commutator(x, y).expect("same dimension");
                out.push(RelationResidual::vanishes(
                    format!("[boson {b}, two-level {t}] = 0"),
                    &comm,
                    x.norm() * y.norm(),
                    tol,
                ));
            }
        }
        out
    }

    /// Relative statistics followed by the pseudo-supersymmetry relations.
    pub fn checks(&self, tol: Tolerance) -> Vec<RelationResidual> {
        let mut out = self.relative_bose_checks(tol);
        out.extend(verify_algebra(&self.pseudo_susy(), tol));
        out
    }

    /// `max |({Q,Q♯} − 2H)_{ij}|`, nonzero only at the truncation edge.
    pub fn truncation_defect(&self) -> f64 {
        full_space_defect(&self.pseudo_susy())
    }

    pub fn spectrum(&self) -> Result<Vec<SpectrumLevel>> {
        Ok(pair_spectrum(&self.pseudo_susy())?.spectrum)
    }

    /// `(n!)^{-1/2} a†ⁿ (c♯)^{(1−grade)/2}` applied to the vacuum, with the
    /// two-level vacuum normalized to unit `|η|`-norm.
    pub fn basis_state(&self, n: usize, grade: i8) -> Result<BasisState> {
        if n > self.truncation {
            return Err(Error::Range {
                index: n,
                max: self.truncation,
            });
        }
        if grade != 1 && grade != -1 {
            return Err(Error::Config(format!("grade must be ±1, got {grade}")));
        }
        let boson = &self.factors[0];
        let two = &self.factors[1];

        let mut b = DVector::<C64>::zeros(boson.dim());
        b[0] = c64(1.0, 0.0);
        let mut factorial = 1.0;
        for k in 1..=n {
            b = boson.c_star.apply(&b);
            factorial *= k as f64;
        }
        b /= c64(factorial.sqrt(), 0.0);

        let kernel = null_space(two.c.as_dmatrix(), 1e-10);
        if kernel.ncols() != 1 {
            return Err(Error::Structure(format!(
                "two-level annihilator has a {}-dimensional kernel",
                kernel.ncols()
            )));
        }
        let mut vac = canonical_phase(kernel.column(0).into_owned());
        let g = two.eta.inner(&vac, &vac).re;
        vac /= c64(g.abs().sqrt(), 0.0);
        let f = if grade == 1 { vac } else { two.c_star.apply(&vac) };

        let vector = DVector::from_iterator(b.len() * f.len(), b.iter().flat_map(|&x| f.iter().map(move |&y| x * y)));
        Ok(BasisState {
            boson_level: n,
            grade,
            vector,
        })
    }

    pub fn to_document(&self, tol: Tolerance) -> Result<SystemDocument> {
        Ok(SystemDocument {
            kind: self.kind,
            factors: self.factors.iter().map(LadderRep::to_document).collect(),
            energy: self.energy,
            truncation: self.truncation,
            spectrum: self.spectrum()?,
            checks: self.checks(tol),
            truncation_defect: self.truncation_defect(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisState {
    pub boson_level: usize,
    pub grade: i8,
    pub vector: DVector<C64>,
}

impl BasisState {
    pub fn eta_norm(&self, eta: &MetricOperator) -> f64 {
        eta.inner(&self.vector, &self.vector).re
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SystemDocument {
    pub kind: OscillatorKind,
    pub factors: Vec<LadderRepDocument>,
    #[serde(rename = "E")]
    pub energy: f64,
    pub truncation: usize,
    pub spectrum: Vec<SpectrumLevel>,
    pub checks: Vec<RelationResidual>,
    pub truncation_defect: f64,
}

fn assemble(kind: OscillatorKind, energy: f64, truncation: usize, two: LadderRep) -> Result<CompositeSystem> {
    let boson = make_boson(truncation)?;
    let ib = ComplexMatrix::identity(boson.dim());
    let it = ComplexMatrix::identity(two.dim());
    let lift0 = |x: &ComplexMatrix| kron(x, &it);
    let lift1 = |x: &ComplexMatrix| kron(&ib, x);

    let mut lifted = BTreeMap::new();
    for (name, op) in [("c", &boson.c), ("c*", &boson.c_star), ("n", &boson.n), ("eta", boson.eta.matrix())] {
        lifted.insert((0, name), lift0(op)?);
    }
    for (name, op) in [("c", &two.c), ("c*", &two.c_star), ("n", &two.n), ("eta", two.eta.matrix())] {
        lifted.insert((1, name), lift1(op)?);
    }

    let h = (lift0(&boson.n)? + lift1(&two.n)?) * energy;
    let q = kron(&boson.c_star, &two.c)? * (2.0 * energy.abs()).sqrt();
    let tau = lift1(&(&it - &two.n * 2.0))?;
    let eta = MetricOperator::new(kron(boson.eta.matrix(), two.eta.matrix())?)?;
    let protected = kron(&boson.protected_projector(), &it)?;
    Ok(CompositeSystem {
        kind,
        factors: vec![boson, two],
        lifted,
        eta,
        tau,
        h,
        q,
        energy,
        truncation,
        protected,
    })
}

fn require_energy(energy: f64, positive: bool) -> Result<()> {
    if !energy.is_finite() || (positive && energy <= 0.0) || (!positive && energy >= 0.0) {
        let want = if positive { "E > 0" } else { "E < 0" };
        return Err(Error::Config(format!("{want} required, got E = {energy}")));
    }
    Ok(())
}

pub fn build_boson_fermion(energy: f64, truncation: usize) -> Result<CompositeSystem> {
    require_energy(energy, true)?;
    assemble(OscillatorKind::BosonFermion, energy, truncation, make_fermion())
}

/// Fails with an algebra obstruction when `eta2` is indefinite.
pub fn build_boson_phermion(energy: f64, truncation: usize, eta2: &MetricOperator) -> Result<CompositeSystem> {
    require_energy(energy, true)?;
    let two = make_phermion(eta2)?;
    assemble(OscillatorKind::BosonPhermion, energy, truncation, two)
}

pub fn build_boson_abnormal_phermion(energy: f64, truncation: usize) -> Result<CompositeSystem> {
    require_energy(energy, false)?;
    assemble(OscillatorKind::BosonAbnormalPhermion, energy, truncation, make_abnormal_phermion())
}
