//! Three-dimensional Lie algebras spanned by `J₁, J₂, J₃` built from a
//! two-level ladder pair. `ε = +1` gives `su(2)`, `ε = −1` gives `su(1,1)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{make_abnormal_phermion, make_fermion, pseudo_adjoint, LadderRep, RelationResidual};
use crate::error::{Error, Result};
use crate::matops::{c64, commutator, inertia_of, inverse, ComplexMatrix, Inertia, Tolerance, C64};

#[derive(Clone, Debug)]
pub struct JTriple {
    pub epsilon: i8,
    pub j: [ComplexMatrix; 3],
    /// `(δ₁, δ₂, δ₃)` in `[J_i, J_j] = i Σ_k δ_k ε_ijk J_k`.
    pub delta: [i8; 3],
    pub rep: LadderRep,
}

/// `J₁ = (α + α♯)/2`, `J₂ = (α − α♯)/(2i)`, `J₃ = −N + 1/2`.
pub fn build_j_triple(epsilon: i8) -> Result<JTriple> {
    let rep = match epsilon {
        1 => make_fermion(),
        -1 => make_abnormal_phermion(),
        _ => return Err(Error::Config(format!("epsilon must be ±1, got {epsilon}"))),
    };
    let id = ComplexMatrix::identity(2);
    let j1 = (&rep.c + &rep.c_star) * 0.5;
    let j2 = (&rep.c - &rep.c_star).scale(c64(0.0, -0.5));
    let j3 = -&rep.n + &id * 0.5;
    let delta = if epsilon == 1 { [1, 1, 1] } else { [1, 1, -1] };
    Ok(JTriple {
        epsilon,
        j: [j1, j2, j3],
        delta,
        rep,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BracketCheck {
    /// 1-based `(i, j)`.
    pub ij: [usize; 2],
    pub expected_k: usize,
    /// `i δ_k` as `[re, im]`.
    pub coefficient: [f64; 2],
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `[J₁,J₂] = iδ₃J₃`, `[J₂,J₃] = iδ₁J₁`, `[J₃,J₁] = iδ₂J₂`.
pub fn verify_brackets(t: &JTriple, tol: Tolerance) -> Vec<BracketCheck> {
    [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
        .into_iter()
        .map(|(a, b, k)| {
            let coef = c64(0.0, f64::from(t.delta[k]));
            let lhs = commutator(&t.j[a], &t.j[b]).expect("2x2");
            let rhs = t.j[k].scale(coef);
            let r = RelationResidual::compare("", &lhs, &rhs, tol);
            BracketCheck {
                ij: [a + 1, b + 1],
                expected_k: k + 1,
                coefficient: [coef.re, coef.im],
                residual: r.residual_norm,
                tolerance: r.tolerance,
                pass: r.pass,
            }
        })
        .collect()
}

/// `J₁² + J₂² + δ₃J₃² = c·1`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CasimirWitness {
    pub value: f64,
    pub proportionality_residual: f64,
    pub supplementary: bool,
}

pub fn casimir(t: &JTriple) -> CasimirWitness {
    let [j1, j2, j3] = &t.j;
    let c = j1 * j1 + j2 * j2 + (j3 * j3) * f64::from(t.delta[2]);
    let value = (c.trace() / 2.0).re;
    CasimirWitness {
        value,
        proportionality_residual: (&c - ComplexMatrix::identity(2) * value).norm(),
        supplementary: true,
    }
}

/// Killing form of the real algebra spanned by `X_k = iJ_k`, from structure
/// constants extracted numerically.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KillingWitness {
    pub form: [[f64; 3]; 3],
    pub inertia: Inertia,
    /// Negative-definite Killing form.
    pub compact: bool,
    /// Largest imaginary part among the structure constants of the `X_k`.
    pub max_imaginary_structure_constant: f64,
    /// Residual of expanding each bracket in the `J` basis.
    pub expansion_residual: f64,
    pub supplementary: bool,
}

pub fn killing_form(t: &JTriple) -> Result<KillingWitness> {
    let x: Vec<ComplexMatrix> = t.j.iter().map(|j| j.scale(c64(0.0, 1.0))).collect();
    let inner = |a: &ComplexMatrix, b: &ComplexMatrix| (a.dagger() * b).trace();
    let gram = ComplexMatrix::from_fn(3, |k, l| inner(&x[k], &x[l]));
    let gram_inv = inverse(&gram)?;
    // f[a][b][k]: [X_a, X_b] = Σ_k f_abk X_k
    let mut f = [[[c64(0.0, 0.0); 3]; 3]; 3];
    let mut max_im: f64 = 0.0;
    let mut expansion_residual: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let br = commutator(&x[a], &x[b])?;
            let proj = DVector::from_iterator(3, (0..3).map(|k| inner(&x[k], &br)));
            let coeffs = gram_inv.as_dmatrix() * proj;
            let mut rebuilt = ComplexMatrix::zeros(2);
            for k in 0..3 {
                f[a][b][k] = coeffs[k];
                max_im = max_im.max(coeffs[k].im.abs());
                rebuilt = rebuilt + x[k].scale(coeffs[k]);
            }
            expansion_residual = expansion_residual.max((&br - &rebuilt).norm());
        }
    }
    let mut form = [[0.0; 3]; 3];
    for (a, row) in form.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let s: C64 = (0..9).map(|cd| f[a][cd / 3][cd % 3] * f[b][cd % 3][cd / 3]).sum();
            *entry = s.re;
        }
    }
    let m = ComplexMatrix::from_dmatrix(DMatrix::from_fn(3, 3, |a, b| c64(form[a][b], 0.0)))?;
    let inertia = inertia_of(&m)?;
    Ok(KillingWitness {
        form,
        inertia,
        compact: inertia.is_negative_definite(),
        max_imaginary_structure_constant: max_im,
        expansion_residual,
        supplementary: true,
    })
}

/// `J_k♯ = J_k` with respect to the species metric, plus whether `J_k` is
/// also Hermitian in the ordinary sense.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HermiticityCheck {
    pub k: usize,
    pub sharp_residual: f64,
    pub sharp_hermitian: bool,
    pub dagger_hermitian: bool,
}

pub fn hermiticity(t: &JTriple, tol: Tolerance) -> Vec<HermiticityCheck> {
    t.j.iter()
        .enumerate()
        .map(|(k, j)| {
            let r = RelationResidual::compare("", &pseudo_adjoint(j, &t.rep.eta).expect("2x2"), j, tol);
            HermiticityCheck {
                k: k + 1,
                sharp_residual: r.residual_norm,
                sharp_hermitian: r.pass,
                dagger_hermitian: j.is_hermitian(tol),
            }
        })
        .collect()
}

/// `[α, α♯] = ε(1 − 2N)`, and the form `1 − 2εN` evaluated for comparison.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LadderCommutatorCheck {
    pub identity: RelationResidual,
    /// Residual of `[α, α♯] = 1 − 2εN`; agrees with `identity` only at `ε = +1`.
    pub alternative_residual: f64,
}

pub fn ladder_commutator(t: &JTriple, tol: Tolerance) -> LadderCommutatorCheck {
    let id = ComplexMatrix::identity(2);
    let eps = f64::from(t.epsilon);
    let lhs = commutator(&t.rep.c, &t.rep.c_star).expect("2x2");
    let valid = (&id - &t.rep.n * 2.0) * eps;
    let alternative = &id - &t.rep.n * (2.0 * eps);
    LadderCommutatorCheck {
        identity: RelationResidual::compare("[α, α♯] = ε(1 − 2N)", &lhs, &valid, tol),
        alternative_residual: (&lhs - &alternative).norm(),
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LieDocument {
    pub epsilon: i8,
    pub algebra: &'static str,
    pub delta_vector: [i8; 3],
    pub brackets: Vec<BracketCheck>,
    pub casimir: CasimirWitness,
    pub killing: KillingWitness,
    pub hermiticity: Vec<HermiticityCheck>,
    pub ladder_commutator: LadderCommutatorCheck,
}

impl LieDocument {
    pub fn pass(&self) -> bool {
        let expected_compact = self.epsilon == 1;
        self.brackets.iter().all(|b| b.pass)
            && self.hermiticity.iter().all(|h| h.sharp_hermitian)
            && self.ladder_commutator.identity.pass
            && self.killing.compact == expected_compact
    }
}

pub fn lie_document(epsilon: i8, tol: Tolerance) -> Result<LieDocument> {
    let t = build_j_triple(epsilon)?;
    let killing = killing_form(&t)?;
    Ok(LieDocument {
        epsilon,
        algebra: if killing.compact { "su(2)" } else { "su(1,1)" },
        delta_vector: t.delta,
        brackets: verify_brackets(&t, tol),
        casimir: casimir(&t),
        hermiticity: hermiticity(&t, tol),
        ladder_commutator: ladder_commutator(&t, tol),
        killing,
    })
}
