use super::*;
use crate::conemodel::dual_description_dd;
use crate::corpus;
use crate::decomp::{convert, total_facets, Method, Policy};
use crate::symdetect::restricted_automorphism_group;
use num_bigint::BigUint;
use proptest::prelude::*;
use std::collections::BTreeSet;

fn detected(c: &Cone) -> PermGroup {
    restricted_automorphism_group(c.rays()).unwrap().group
}

fn dd_supports(c: &Cone) -> BTreeSet<FaceSet> {
    dual_description_dd(c)
        .unwrap()
        .into_iter()
        .map(|f| f.support)
        .collect()
}

fn expand(g: &PermGroup, facets: &[Facet]) -> BTreeSet<FaceSet> {
    facets
        .iter()
        .flat_map(|f| g.orbit_of_set(&f.support))
        .collect()
}

fn cascade(c: &Cone, g: &PermGroup) -> Conversion {
    let t = ConversionTask::new(c.clone(), g.clone(), Method::Cascade);
    cascade_convert(&t).unwrap()
}

#[test]
fn simplex_lift_is_the_identity() {
    let c = corpus::simplex(3);
    let order = LiftOrder::new(&c, vec![0, 1, 2]).unwrap();
    let lift = simplicial_lift(&c, &order).unwrap();
    assert_eq!(lift.rays(), c.rays());
}

#[test]
fn square_lift_is_simplicial() {
    let c = corpus::cube(2);
    let order = LiftOrder::greedy(&c, &detected(&c)).unwrap();
    let lift = simplicial_lift(&c, &order).unwrap();
    assert_eq!((lift.num_rays(), lift.dim()), (4, 4));
    assert!(!lift.rays().determinant().is_zero());
}

#[test]
fn lift_projects_back() {
    for (_, c) in corpus::standard() {
        let order = LiftOrder::greedy(&c, &detected(&c)).unwrap();
        let lift = simplicial_lift(&c, &order).unwrap();
        let first: Vec<usize> = (0..c.dim()).collect();
        assert_eq!(lift.rays().select_cols(&first), *c.rays());
        assert_eq!(rank(lift.rays()), c.num_rays());
    }
}

#[test]
fn lift_order_checks() {
    let c = corpus::cube(2);
    assert!(LiftOrder::new(&c, vec![0, 1, 2]).is_err());
    assert!(LiftOrder::new(&c, vec![0, 0, 1, 2]).is_err());
    assert!(LiftOrder::new(&c, vec![0, 1, 2, 7]).is_err());
    // rays 0 and 3 are antipodal in the square, so 0, 3 plus one more is a basis
    assert!(LiftOrder::new(&c, vec![0, 3, 1, 2]).is_ok());
    let mut flat = corpus::cube(2).rays().to_rows();
    for r in &mut flat {
        r[1] = r[0].clone();
    }
    let degenerate = Cone::new(RationalMatrix::from_rows(3, flat)).unwrap();
    assert!(LiftOrder::greedy(&degenerate, &PermGroup::trivial(4)).is_err());
}

#[test]
fn lifted_simplex_single_step() {
    let c = corpus::simplex(3);
    let mut rows = c.rays().to_rows();
    rows.push(vec![Rational::from_integer(1.into()); 3]);
    let c = Cone::new(RationalMatrix::from_rows(3, rows)).unwrap();
    let order = LiftOrder::new(&c, vec![0, 1, 2, 3]).unwrap();
    let state = initial_state(&c, &PermGroup::trivial(4), order).unwrap();
    assert_eq!(state.facets.len(), 4);
    let next = project_step(&c, &PermGroup::trivial(4), &state).unwrap();
    assert_eq!(next.step, 3);
    let got: BTreeSet<FaceSet> = next.facets.iter().map(|f| f.support.clone()).collect();
    let coordinate: BTreeSet<FaceSet> = (0..3)
        .map(|i| FaceSet::new((0..3).filter(|&j| j != i).collect()))
        .collect();
    assert_eq!(got, coordinate);
    assert!(project_step(&c, &PermGroup::trivial(4), &next).is_err());
}

#[test]
fn square_single_step_matches_dd() {
    let c = corpus::cube(2);
    let g = detected(&c);
    let order = LiftOrder::greedy(&c, &g).unwrap();
    let state = initial_state(&c, &g, order).unwrap();
    let next = project_step(&c, &g, &state).unwrap();
    assert_eq!(next.step, 3);
    assert_eq!(expand(&next.group, &next.facets), dd_supports(&c));
    assert_eq!(expand(&next.group, &next.facets).len(), 4);
}

#[test]
fn every_step_matches_dd_on_the_projection() {
    for (name, c) in corpus::standard() {
        if c.num_rays() > 12 {
            continue;
        }
        let g = detected(&c);
        let order = LiftOrder::greedy(&c, &g).unwrap();
        let mut state = initial_state(&c, &g, order).unwrap();
        loop {
            assert_eq!(
                expand(&state.group, &state.facets),
                dd_supports(&state.cone),
                "{name} step {}",
                state.step
            );
            assert_eq!(state.facets.len(), {
                let reps: BTreeSet<FaceSet> = state
                    .facets
                    .iter()
                    .map(|f| state.group.canonical_representative(&f.support))
                    .collect();
                reps.len()
            });
            if state.step == c.dim() {
                break;
            }
            state = project_step(&c, &g, &state).unwrap();
        }
    }
}

#[test]
fn group_sequence_ends_at_the_task_group() {
    let c = corpus::cube(3);
    let g = detected(&c);
    let order = LiftOrder::greedy(&c, &g).unwrap();
    let mut state = initial_state(&c, &g, order).unwrap();
    assert_eq!(
        state.group.order(),
        g.set_stabilizer(&FaceSet::new(state.order.0[4..].to_vec()))
            .order()
    );
    while state.step > c.dim() {
        state = project_step(&c, &g, &state).unwrap();
    }
    assert_eq!(state.group.order(), g.order());
}

#[test]
fn cascade_examples() {
    let c = corpus::simplex(4);
    let out = cascade(&c, &PermGroup::symmetric(4));
    assert_eq!(out.representatives.len(), 1);
    assert_eq!(
        total_facets(&PermGroup::symmetric(4), &out.representatives),
        BigUint::from(4u32)
    );

    for (c, orbits, total) in [
        (corpus::cube(3), 1, 6u32),
        (corpus::cross_polytope(3), 1, 8),
        (corpus::cross_polytope(4), 1, 16),
    ] {
        let g = detected(&c);
        let out = cascade(&c, &g);
        assert_eq!(out.representatives.len(), orbits);
        assert_eq!(total_facets(&g, &out.representatives), BigUint::from(total));
    }
}

#[test]
fn needs_restricted_group() {
    let mut t = ConversionTask::new(corpus::cube(3), PermGroup::trivial(8), Method::Cascade);
    t.restricted = false;
    assert!(matches!(cascade_convert(&t), Err(Error::Unsupported(_))));
}

#[test]
fn explicit_orders_agree() {
    let c = corpus::cube_pyramid(3);
    let g = detected(&c);
    let reference = convert(&ConversionTask::new(c.clone(), g.clone(), Method::Direct))
        .unwrap()
        .supports();
    for order in [
        vec![0, 1, 2, 4, 8, 3, 5, 6, 7],
        vec![8, 7, 6, 5, 3, 0, 1, 2, 4],
        vec![1, 2, 4, 8, 7, 0, 3, 5, 6],
    ] {
        let t = ConversionTask::new(c.clone(), g.clone(), Method::Cascade).with_policy(Policy {
            cascade_order: Some(order),
            ..Policy::default()
        });
        assert_eq!(convert(&t).unwrap().supports(), reference);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn row_order_does_not_change_orbits(seed in any::<u64>(), shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let c = corpus::random_01(4, 8, seed);
        let mut perm: Vec<usize> = (0..c.num_rays()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle));
        let p = c.reordered(&perm).unwrap();
        let a: BTreeSet<FaceSet> = expand(&detected(&c), &cascade(&c, &detected(&c)).representatives)
            .into_iter()
            .map(|s| FaceSet::new(s.iter().map(|i| perm.iter().position(|&x| x == i).unwrap()).collect()))
            .collect();
        let b = expand(&detected(&p), &cascade(&p, &detected(&p)).representatives);
        prop_assert_eq!(a, b);
    }
}
