use std::sync::Arc;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use hopfo::cli::doc::{self, Entity};
use hopfo::exactla::{Field, FieldSpec, Mat};
use hopfo::hmod::{self, HModule};
use hopfo::hopf::{builtin_from_spec, HopfRef};
use hopfo::kzero;
use hopfo::sample;

fn hopf(i: usize) -> HopfRef {
    let specs = sample::builtin_specs();
    Arc::new(builtin_from_spec(specs[i % specs.len()]).unwrap())
}

fn field(i: usize) -> Field {
    let spec = [FieldSpec::Prime(2), FieldSpec::Prime(3), FieldSpec::Prime(5), FieldSpec::Rationals, FieldSpec::Cyclotomic(3)];
    Field::new(spec[i % 5].clone()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rank_nullity(fi in 0usize..5, rows in 1usize..6, cols in 1usize..6, seed: u64) {
        let f = field(fi);
        let mut rng = StdRng::seed_from_u64(seed);
        let a = sample::matrix(&f, rows, cols, &mut rng);
        let n = a.nullspace();
        prop_assert_eq!(a.rank() + n.cols(), cols);
        prop_assert!(a.mul(&n).is_zero());
        prop_assert_eq!(a.rref().reduced.rref().reduced, a.rref().reduced);
    }

    #[test]
    fn solve_is_consistent(fi in 0usize..5, n in 1usize..5, seed: u64) {
        let f = field(fi);
        let mut rng = StdRng::seed_from_u64(seed);
        let a = sample::matrix(&f, n, n, &mut rng);
        let x = sample::matrix(&f, n, 2, &mut rng);
        let b = a.mul(&x);
        let y = a.solve(&b).unwrap().expect("b is in the column space");
        prop_assert_eq!(a.mul(&y), b);
        if let Some(inv) = a.inverse() {
            prop_assert!(a.mul(&inv).is_identity());
        }
    }

    #[test]
    fn tensor_unit_and_associativity(hi in 0usize..10, seed: u64) {
        let h = hopf(hi);
        let mut rng = StdRng::seed_from_u64(seed);
        let m = sample::module(&h, 3, &mut rng);
        let n = sample::module(&h, 2, &mut rng);
        let p = sample::module(&h, 2, &mut rng);
        let mk = hmod::tensor(&m, &HModule::trivial(&h, 0)).unwrap();
        prop_assert_eq!(hmod::stable_invariants(&mk).graded, hmod::stable_invariants(&m).graded);
        let left = hmod::tensor(&hmod::tensor(&m, &n).unwrap(), &p).unwrap();
        let right = hmod::tensor(&m, &hmod::tensor(&n, &p).unwrap()).unwrap();
        prop_assert_eq!(hmod::stable_invariants(&left).graded, hmod::stable_invariants(&right).graded);
    }

    #[test]
    fn stable_invariants_are_additive(hi in 0usize..10, seed: u64) {
        let h = hopf(hi);
        let mut rng = StdRng::seed_from_u64(seed);
        let m = sample::module(&h, 3, &mut rng);
        let n = sample::module(&h, 3, &mut rng);
        let s = hmod::stable_invariants(&m.direct_sum(&n).unwrap()).dim;
        prop_assert_eq!(s, hmod::stable_invariants(&m).dim + hmod::stable_invariants(&n).dim);
        let padded = m.direct_sum(&HModule::regular(&h, 1)).unwrap();
        prop_assert_eq!(hmod::stable_invariants(&padded).dim, hmod::stable_invariants(&m).dim);
    }

    #[test]
    fn shift_round_trip(hi in 0usize..10, seed: u64) {
        let h = hopf(hi);
        let mut rng = StdRng::seed_from_u64(seed);
        let m = sample::module(&h, 3, &mut rng);
        let back = hmod::shift(&hmod::shift(&m, 1).unwrap(), -1).unwrap();
        prop_assert_eq!(hmod::stable_invariants(&back).graded, hmod::stable_invariants(&m).graded);
        prop_assert_eq!(hmod::is_projective(&back), hmod::is_projective(&m));
    }

    #[test]
    fn grothendieck_class_is_additive(hi in 0usize..10, seed: u64) {
        let h = hopf(hi);
        prop_assume!(kzero::k0_ring(&h).is_ok());
        let mut rng = StdRng::seed_from_u64(seed);
        let m = sample::module(&h, 3, &mut rng);
        let n = sample::module(&h, 3, &mut rng);
        let cm = kzero::k0_class(&m).unwrap();
        let cn = kzero::k0_class(&n).unwrap();
        prop_assert_eq!(kzero::k0_class(&m.direct_sum(&n).unwrap()).unwrap(), cm.add(&cn));
        prop_assert_eq!(kzero::k0_class(&hmod::shift(&m, 1).unwrap()).unwrap(), cm.neg());
    }

    #[test]
    fn integral_rescaling_is_invisible(hi in 0usize..10, seed: u64) {
        let h = hopf(hi);
        let mut rng = StdRng::seed_from_u64(seed);
        let c = sample::nonzero_scalar(h.field(), &mut rng);
        let h2: HopfRef = Arc::new(h.with_integral_scaled(&c));
        prop_assert_eq!(h2.preferred_integral(), h.preferred_integral());
        let m = sample::module(&h, 4, &mut rng);
        let m2 = HModule::new(h2, m.actions().to_vec(), m.grading().to_vec()).unwrap();
        prop_assert_eq!(hmod::stable_invariants(&m).graded, hmod::stable_invariants(&m2).graded);
    }

    #[test]
    fn module_documents_round_trip(hi in 0usize..10, seed: u64) {
        let h = hopf(hi);
        let mut rng = StdRng::seed_from_u64(seed);
        let m = sample::module(&h, 3, &mut rng);
        let text = doc::serialize(&Entity::HModule(m.clone()));
        let Entity::HModule(back) = doc::parse(&text).unwrap() else { panic!("kind changed") };
        prop_assert_eq!(back.actions(), m.actions());
        prop_assert_eq!(back.grading(), m.grading());
        prop_assert_eq!(doc::serialize(&Entity::HModule(back)), text);
    }
}

#[test]
fn identity_has_full_rank() {
    for fi in 0..5 {
        let f = field(fi);
        assert_eq!(Mat::identity(&f, 4).rank(), 4);
    }
}
