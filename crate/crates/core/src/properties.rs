//! Seeded randomized suites over the structural identities.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{pseudo_adjoint, MetricOperator};
use crate::error::Result;
use crate::matops::{inertia_of, Tolerance};
use crate::oscillator::{build_boson_abnormal_phermion, build_boson_fermion, build_boson_phermion};
use crate::pseudosusy::two_component;
use crate::random;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PropertySuite {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl PropertySuite {
    fn from_residuals(name: &str, residuals: &[f64], tolerance: f64) -> Self {
        let failures = residuals.iter().filter(|r| r.is_nan() || **r > tolerance).count();
        PropertySuite {
            name: name.to_string(),
            samples: residuals.len(),
            failures,
            max_residual: residuals.iter().copied().fold(0.0, f64::max),
            tolerance,
            pass: failures == 0,
        }
    }
}

fn random_metric<R: Rng>(rng: &mut R, n: usize, indefinite: bool) -> Result<MetricOperator> {
    let m = if indefinite {
        random::indefinite(rng, n)
    } else {
        random::positive_definite(rng, n)
    };
    MetricOperator::new(m)
}

/// Relative residuals of `(A♯)♯ = A` and `(AB)♯ = B♯A♯` on `count` samples
/// of 4×4 matrices, alternating definite and indefinite metrics.
pub fn pseudo_adjoint_suites(seed: u64, count: usize, tol: f64) -> Result<[PropertySuite; 2]> {
    let mut rng = random::rng(seed);
    let mut involution = Vec::with_capacity(count);
    let mut anti = Vec::with_capacity(count);
    for k in 0..count {
        let eta = random_metric(&mut rng, 4, k % 2 == 1)?;
        let a = random::matrix(&mut rng, 4);
        let b = random::matrix(&mut rng, 4);
        let aa = pseudo_adjoint(&pseudo_adjoint(&a, &eta)?, &eta)?;
        involution.push((&aa - &a).norm() / a.norm().max(1.0));
        let lhs = pseudo_adjoint(&(&a * &b), &eta)?;
        let rhs = pseudo_adjoint(&b, &eta)? * pseudo_adjoint(&a, &eta)?;
        anti.push((&lhs - &rhs).norm() / lhs.norm().max(1.0));
    }
    Ok([
        PropertySuite::from_residuals("pseudo-adjoint involution", &involution, tol),
        PropertySuite::from_residuals("pseudo-adjoint anti-multiplicativity", &anti, tol),
    ])
}

/// `inertia(S†HS) = inertia(H)` for random invertible Hermitian `H` with
/// random sign pattern and random invertible `S`. The recorded residual is
/// the number of mismatching inertia triples (0 or 1 per sample).
pub fn sylvester_suite(seed: u64, count: usize) -> Result<PropertySuite> {
    let mut rng = random::rng(seed);
    let mut mismatches = Vec::with_capacity(count);
    for _ in 0..count {
        let spectrum: Vec<f64> = (0..4)
            .map(|_| {
                let mag = rng.random_range(0.5..2.5);
                if rng.random_bool(0.5) { mag } else { -mag }
            })
            .collect();
        let h = random::metric_with_spectrum(&mut rng, &spectrum);
        let s = random::invertible(&mut rng, 4);
        let congruent = s.dagger() * &h * &s;
        let congruent = (&congruent + congruent.dagger()) * 0.5;
        let same = inertia_of(&h)? == inertia_of(&congruent)?;
        mismatches.push(if same { 0.0 } else { 1.0 });
    }
    Ok(PropertySuite::from_residuals("Sylvester inertia invariance", &mismatches, 0.0))
}

/// Decompose and reassemble random oscillator systems in random unitary
/// frames; the residual is the worst relative deviation of the rebuilt blocks.
pub fn reassembly_suite(seed: u64, count: usize, tol: f64) -> Result<PropertySuite> {
    let mut rng = random::rng(seed);
    let decompose_tol = Tolerance::new(1e-10);
    let mut residuals = Vec::with_capacity(count);
    for k in 0..count {
        let truncation = rng.random_range(2..=6);
        let energy = rng.random_range(0.25..3.0);
        let system = match k % 3 {
            0 => build_boson_fermion(energy, truncation)?,
            1 => {
                let d = [rng.random_range(0.25..4.0), rng.random_range(0.25..4.0)];
                build_boson_phermion(energy, truncation, &MetricOperator::from_diagonal(&d)?)?
            }
            _ => build_boson_abnormal_phermion(-energy, truncation)?,
        };
        let u = random::unitary(&mut rng, system.dim());
        let sys = system.pseudo_susy().conjugated(&u)?;
        let form = two_component(&sys, decompose_tol)?;
        let (q, h, eta) = form.reassemble();
        let rel = |x: &crate::ComplexMatrix, y: &crate::ComplexMatrix| (x - y).norm() / y.norm().max(1.0);
        residuals.push(rel(&q, &sys.q).max(rel(&h, &sys.h)).max(rel(&eta, sys.eta.matrix())));
    }
    Ok(PropertySuite::from_residuals("two-component reassembly", &residuals, tol))
}
