use proptest::prelude::*;

use phermion_core::algebra::{
    alpha, classify_metrics, make_abnormal_phermion, make_boson, make_fermion, make_phermion, obstruction_demo,
    pseudo_adjoint, MetricOperator,
};
use phermion_core::matops::{commutator, eig, inertia_of, kron, sqrt_pos_def};
use phermion_core::oscillator::{build_boson_abnormal_phermion, build_boson_fermion, build_boson_phermion, CompositeSystem};
use phermion_core::pseudosusy::{pair_spectrum, sign_theorem_check, two_component, PairingReport};
use phermion_core::random;
use phermion_core::{c64, ComplexMatrix, Tolerance, C64};

fn complex_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
        let mut it = v.into_iter();
        ComplexMatrix::from_fn(n, |_, _| {
            let (re, im) = it.next().unwrap();
            c64(re, im)
        })
    })
}

/// Spectrum magnitudes in `[0.5, 2.5]`; `indefinite` forces mixed signs.
fn metric(n: usize, indefinite: bool) -> impl Strategy<Value = MetricOperator> {
    (prop::collection::vec(0.5..2.5f64, n), any::<u64>()).prop_map(move |(mags, seed)| {
        let spectrum: Vec<f64> = mags
            .iter()
            .enumerate()
            .map(|(k, m)| if indefinite && k % 2 == 1 { -m } else { *m })
            .collect();
        MetricOperator::new(random::metric_with_spectrum(&mut random::rng(seed), &spectrum)).unwrap()
    })
}

fn nonzero_complex() -> impl Strategy<Value = C64> {
    (0.05..3.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn rel(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    BosonFermion,
    BosonPhermion(f64, f64),
    Abnormal,
}

fn oscillator() -> impl Strategy<Value = (Kind, f64, usize)> {
    let kind = prop_oneof![
        Just(Kind::BosonFermion),
        (0.25..4.0f64, 0.25..4.0f64).prop_map(|(a, b)| Kind::BosonPhermion(a, b)),
        Just(Kind::Abnormal),
    ];
    (kind, 0.2..3.0f64, 2usize..=7)
}

fn build((kind, energy, t): (Kind, f64, usize)) -> CompositeSystem {
    match kind {
        Kind::BosonFermion => build_boson_fermion(energy, t).unwrap(),
        Kind::BosonPhermion(a, b) => build_boson_phermion(energy, t, &MetricOperator::from_diagonal(&[a, b]).unwrap()).unwrap(),
        Kind::Abnormal => build_boson_abnormal_phermion(-energy, t).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dagger_reverses_products(a in complex_matrix(4), b in complex_matrix(4)) {
        prop_assert!(rel(&(&a * &b).dagger(), &(b.dagger() * a.dagger())) <= 1e-12);
    }

    #[test]
    fn kron_mixed_product(a in complex_matrix(2), b in complex_matrix(3), c in complex_matrix(2), d in complex_matrix(3)) {
        let lhs = kron(&a, &b).unwrap() * kron(&c, &d).unwrap();
        let rhs = kron(&(&a * &c), &(&b * &d)).unwrap();
        prop_assert!(rel(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn sylvester_law(
        mags in prop::collection::vec(0.5..2.5f64, 4),
        signs in prop::collection::vec(any::<bool>(), 4),
        seed in any::<u64>(),
        s in complex_matrix(4),
    ) {
        let spectrum: Vec<f64> = mags.iter().zip(&signs).map(|(m, &pos)| if pos { *m } else { -m }).collect();
        let h = random::metric_with_spectrum(&mut random::rng(seed), &spectrum);
        let s = s + ComplexMatrix::identity(4) * 5.0;
        let congruent = s.dagger() * &h * &s;
        let congruent = (&congruent + congruent.dagger()) * 0.5;
        let inertia = inertia_of(&h).unwrap();
        prop_assert_eq!(inertia.n_plus, signs.iter().filter(|&&p| p).count());
        prop_assert_eq!(inertia, inertia_of(&congruent).unwrap());
    }

    #[test]
    fn sqrt_pos_def_squares_back(h in metric(4, false)) {
        let s = sqrt_pos_def(h.matrix()).unwrap();
        prop_assert!(rel(&(&s * &s), h.matrix()) <= 1e-10);
        prop_assert!(s.is_hermitian(Tolerance::new(1e-12)));
    }

    #[test]
    fn pseudo_adjoint_is_an_involution(a in complex_matrix(4), eta in prop_oneof![metric(4, false), metric(4, true)]) {
        let back = pseudo_adjoint(&pseudo_adjoint(&a, &eta).unwrap(), &eta).unwrap();
        prop_assert!(rel(&back, &a) <= 1e-11);
    }

    #[test]
    fn pseudo_adjoint_reverses_products(a in complex_matrix(4), b in complex_matrix(4), eta in prop_oneof![metric(4, false), metric(4, true)]) {
        let lhs = pseudo_adjoint(&(&a * &b), &eta).unwrap();
        let rhs = pseudo_adjoint(&b, &eta).unwrap() * pseudo_adjoint(&a, &eta).unwrap();
        prop_assert!(rel(&lhs, &rhs) <= 1e-11);
    }

    #[test]
    fn phermion_number_is_sharp_hermitian(eta in metric(2, false)) {
        let rep = make_phermion(&eta).unwrap();
        prop_assert!(rel(&pseudo_adjoint(&rep.n, &rep.eta).unwrap(), &rep.n) <= 1e-12);
        prop_assert!(rel(&commutator(&rep.c, &rep.n).unwrap(), &rep.c) <= 1e-12);
        prop_assert!(rel(&commutator(&rep.c_star, &rep.n).unwrap(), &(-&rep.c_star)) <= 1e-12);
    }

    #[test]
    fn conjugated_fermions_admit_only_definite_metrics(s in complex_matrix(2)) {
        let s = s + ComplexMatrix::identity(2) * 3.0;
        let s_inv = phermion_core::matops::inverse(&s).unwrap();
        let c = &s * alpha() * &s_inv;
        let partner = &s * alpha().dagger() * &s_inv;
        let cls = classify_metrics(&c, &partner).unwrap();
        prop_assert_eq!(cls.dimension(), 1);
        prop_assert!(cls.only_definite());
    }

    #[test]
    fn obstruction_is_nonpositive_identity(u in nonzero_complex(), v in nonzero_complex()) {
        let demo = obstruction_demo(u, v).unwrap();
        let m = &demo.anticommutator;
        let scale = m.norm().max(1.0);
        prop_assert!(m[(0, 1)].norm() <= 1e-12 * scale && m[(1, 0)].norm() <= 1e-12 * scale);
        prop_assert!((m[(0, 0)] - m[(1, 1)]).norm() <= 1e-12 * scale);
        prop_assert!(m[(0, 0)].im.abs() <= 1e-12 * scale && m[(0, 0)].re <= 1e-12 * scale);
    }

    #[test]
    fn oscillator_exact_relations(params in oscillator()) {
        let system = build(params);
        let sys = system.pseudo_susy();
        // a generic metric enters through an inexact square root
        let slack = match params.0 {
            Kind::BosonPhermion(..) => 1e-14 * sys.q.norm().max(1.0),
            _ => 0.0,
        };
        prop_assert_eq!((&sys.q * &sys.q).norm(), 0.0);
        prop_assert!((&sys.tau * &sys.q + &sys.q * &sys.tau).norm() <= slack);
        prop_assert!(commutator(&sys.tau, sys.eta.matrix()).unwrap().norm() <= slack);
        for r in system.relative_bose_checks(Tolerance::new(1e-10)) {
            prop_assert_eq!(r.residual_norm, 0.0, "{}", r.relation_name);
        }
        let qh = commutator(&sys.q, &sys.h).unwrap().norm();
        prop_assert!(qh <= 1e-10 * sys.q.norm().max(sys.h.norm()).max(1.0));
    }

    #[test]
    fn pairing_and_sign_rule(params in oscillator()) {
        let system = build(params);
        let sys = system.pseudo_susy();
        let report = pair_spectrum(&sys).unwrap();
        prop_assert!(report.pass(), "{:?}", report.failures);
        prop_assert_eq!(report.pairs.len(), system.truncation());
        let e = system.energy().signum();
        for p in &report.pairs {
            prop_assert_eq!(f64::from(p.sign_plus * p.sign_minus), e);
            prop_assert_eq!(p.eigenvalue.signum(), e);
        }
        // nonzero levels below the edge are exactly twofold
        for level in &report.spectrum {
            let x = level.value[0].abs();
            if x > 1e-9 && x < params.1 * (params.2 as f64 + 0.5) {
                prop_assert_eq!(level.multiplicity, 2);
            }
        }
        let verdict = sign_theorem_check(&sys, &report, Tolerance::new(1e-10)).unwrap();
        prop_assert!(verdict.orthogonality_holds && verdict.pass, "{:?}", verdict);
    }

    #[test]
    fn two_component_round_trip(params in oscillator(), seed in any::<u64>()) {
        let base = build(params).pseudo_susy();
        let u = random::unitary(&mut random::rng(seed), base.dim());
        let sys = base.conjugated(&u).unwrap();
        let form = two_component(&sys, Tolerance::new(1e-10)).unwrap();
        let (q, h, eta) = form.reassemble();
        prop_assert!(rel(&q, &sys.q) <= 1e-11);
        prop_assert!(rel(&h, &sys.h) <= 1e-11);
        prop_assert!(rel(&eta, sys.eta.matrix()) <= 1e-11);
    }

    #[test]
    fn pairing_invariant_under_unitary_frames(params in oscillator(), seed in any::<u64>()) {
        let base = build(params).pseudo_susy();
        let signs = |r: &PairingReport| -> Vec<(i8, i8)> { r.pairs.iter().map(|p| (p.sign_plus, p.sign_minus)).collect() };
        let reference = pair_spectrum(&base).unwrap();
        let u = random::unitary(&mut random::rng(seed), base.dim());
        let rotated = pair_spectrum(&base.conjugated(&u).unwrap()).unwrap();
        prop_assert_eq!(rotated.pairs.len(), reference.pairs.len());
        prop_assert_eq!(signs(&rotated), signs(&reference));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn eig_reconstructs_random_matrices(seed in any::<u64>()) {
        let a = random::matrix(&mut random::rng(seed), 16);
        let e = eig(&a).unwrap();
        prop_assert!(e.diagonalizable);
        prop_assert!(e.residual(&a) <= 1e-9 * a.norm().max(1.0));
    }
}

#[test]
fn square_root_metric_oscillator_is_exact() {
    let system = build((Kind::BosonPhermion(4.0, 1.0), 1.0, 6));
    let sys = system.pseudo_susy();
    assert_eq!((&sys.q * &sys.q).norm(), 0.0);
    assert_eq!((&sys.tau * &sys.q + &sys.q * &sys.tau).norm(), 0.0);
    assert_eq!(commutator(&sys.tau, sys.eta.matrix()).unwrap().norm(), 0.0);
}

#[test]
fn number_operators_are_sharp_hermitian_for_every_species() {
    let reps = [make_boson(6).unwrap(), make_fermion(), make_abnormal_phermion()];
    for rep in &reps {
        let n_sharp = pseudo_adjoint(&rep.n, &rep.eta).unwrap();
        assert_eq!(rel(&n_sharp, &rep.n), 0.0, "{}", rep.species);
    }
}

#[test]
fn ladder_number_commutators_for_both_signs() {
    for rep in [make_fermion(), make_abnormal_phermion()] {
        assert!(rel(&commutator(&rep.c, &rep.n).unwrap(), &rep.c) <= 1e-15);
        assert!(rel(&commutator(&rep.c_star, &rep.n).unwrap(), &(-&rep.c_star)) <= 1e-15);
    }
}
