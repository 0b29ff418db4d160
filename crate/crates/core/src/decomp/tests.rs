use super::*;
use crate::corpus;
use crate::exactlin::{int, rat};
use crate::permgrp::Permutation;
use proptest::prelude::*;
use std::collections::BTreeSet;

/// Supports of all facets by trying every subset of `d - 1` rays.
fn brute_force_supports(c: &Cone) -> BTreeSet<FaceSet> {
    let n = c.num_rays();
    let d = c.dim();
    let mut out = BTreeSet::new();
    let mut idx: Vec<usize> = (0..d - 1).collect();
    loop {
        let sub = c.rays().select_rows(&idx);
        let k = kernel_basis(&sub);
        if k.rows() == 1 {
            let normal = primitive_integer(k.row(0));
            let vals: Vec<BigInt> = (0..n).map(|i| c.value(&normal, i)).collect();
            let pos = vals.iter().any(|v| v.is_positive());
            let neg = vals.iter().any(|v| v.is_negative());
            if pos != neg {
                out.insert((0..n).filter(|&i| vals[i].is_zero()).collect());
            }
        }
        let mut i = d - 1;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - (d - 1 - i) {
                idx[i] += 1;
                for j in i + 1..d - 1 {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

use num_bigint::BigInt;

fn expand(group: &PermGroup, reps: &[Facet]) -> BTreeSet<FaceSet> {
    reps.iter()
        .flat_map(|f| group.orbit_of_set(&f.support))
        .collect()
}

fn task(c: Cone, method: Method) -> ConversionTask {
    ConversionTask::with_detected_group(c, method).unwrap()
}

fn run(c: Cone, method: Method) -> (Conversion, PermGroup) {
    let t = task(c, method);
    (convert(&t).unwrap(), t.group)
}

fn fs(v: &[usize]) -> FaceSet {
    FaceSet::new(v.to_vec())
}

#[test]
fn incidence_examples() {
    let (out, g) = run(corpus::cube(3), Method::Incidence);
    assert_eq!(out.representatives.len(), 1);
    assert_eq!(total_facets(&g, &out.representatives), BigUint::from(6u32));

    let (out, g) = run(corpus::cross_polytope(3), Method::Incidence);
    assert_eq!(out.representatives.len(), 1);
    assert_eq!(total_facets(&g, &out.representatives), BigUint::from(8u32));

    // oct-pyr: brute-force facets fused under the restricted group
    let c = corpus::oct_pyr();
    let t = task(c.clone(), Method::Incidence);
    let oracle: BTreeSet<FaceSet> = brute_force_supports(&c)
        .iter()
        .map(|s| t.group.canonical_representative(s))
        .collect();
    let out = convert(&t).unwrap();
    assert_eq!(out.supports().into_iter().collect::<BTreeSet<_>>(), oracle);
    assert_eq!(oracle.len(), 3);
}

#[test]
fn adjacency_examples() {
    let t = ConversionTask::new(
        corpus::simplex(4),
        PermGroup::symmetric(4),
        Method::Adjacency,
    );
    let out = convert(&t).unwrap();
    assert_eq!(out.representatives.len(), 1);
    assert_eq!(
        total_facets(&t.group, &out.representatives),
        BigUint::from(4u32)
    );

    let t = ConversionTask::new(corpus::cube(3), PermGroup::trivial(8), Method::Adjacency);
    let out = convert(&t).unwrap();
    assert_eq!(out.representatives.len(), 6);
    let all: BTreeSet<FaceSet> = out.supports().into_iter().collect();
    assert_eq!(all, brute_force_supports(&corpus::cube(3)));
}

#[test]
fn wreath_two_two() {
    let (out, g) = run(corpus::wreath_cross(2, 2), Method::Adjacency);
    assert_eq!(out.representatives.len(), 1);
    assert_eq!(total_facets(&g, &out.representatives), BigUint::from(64u32));
}

#[test]
fn initial_facet_examples() {
    let s = corpus::simplex(4);
    let f = initial_facet(&s).unwrap();
    assert_eq!(f.support.len(), 3);
    assert_eq!(f.normal.iter().filter(|x| !x.is_zero()).count(), 1);

    for c in [
        corpus::cube(3),
        corpus::oct_pyr(),
        corpus::cell24(),
        corpus::random_01(4, 9, 3),
    ] {
        let f = initial_facet(&c).unwrap();
        assert!(c.is_valid_normal(&f.normal));
        assert_eq!(c.rank_of(&f.support) + 1, c.dim());
        assert!(brute_force_supports(&c).contains(&f.support));
    }
}

#[test]
fn balinski_examples() {
    assert!(balinski_skip(&[], 4));
    assert!(!balinski_skip(&[(fs(&[0]), BigUint::from(3u32))], 4));
    assert!(balinski_skip(&[(fs(&[0]), BigUint::from(2u32))], 4));

    let t = task(corpus::cube(3), Method::Adjacency);
    let stats = Stats::default();
    let out = convert_with_stats(&t, &stats).unwrap();
    assert_eq!(out.representatives.len(), 1);
}

#[test]
fn incidence_ordering_examples() {
    let a = vec![fs(&[0]), fs(&[0, 1]), fs(&[0, 1, 2])];
    assert_eq!(order_by_incidence_number(a.clone()), a);
    let b = vec![fs(&[0, 1, 2, 3, 4]), fs(&[0, 1, 2]), fs(&[0, 1, 2, 3])];
    let sorted = order_by_incidence_number(b.clone());
    assert_eq!(
        sorted.iter().map(FaceSet::len).collect::<Vec<_>>(),
        vec![3, 4, 5]
    );
    let ties = vec![fs(&[5, 6]), fs(&[0]), fs(&[1, 2])];
    assert_eq!(
        order_by_incidence_number(ties),
        vec![fs(&[0]), fs(&[5, 6]), fs(&[1, 2])]
    );
}

fn deep_policy() -> Policy {
    Policy {
        base_threshold: 0,
        base_dim: 0,
        ..Policy::default()
    }
}

#[test]
fn recursion_examples() {
    let c = corpus::cube(3);
    let t = task(c.clone(), Method::Adjacency);
    let mut direct_task = t.clone();
    direct_task.method = Method::Direct;
    assert_eq!(
        convert(&t).unwrap().supports(),
        convert(&direct_task).unwrap().supports()
    );

    let t = task(corpus::cube(4), Method::Adjacency).with_policy(deep_policy());
    let stats = Stats::default();
    let out = convert_with_stats(&t, &stats).unwrap();
    assert_eq!(out.representatives.len(), 1);
    assert_eq!(
        total_facets(&t.group, &out.representatives),
        BigUint::from(8u32)
    );
    assert!(stats.subproblems.load(Ordering::Relaxed) > 0);

    let shallow = Policy {
        max_depth: 0,
        ..deep_policy()
    };
    let t = task(corpus::cube(4), Method::Adjacency).with_policy(shallow);
    assert!(matches!(convert(&t), Err(Error::RecursionDepth { .. })));
}

#[test]
fn facet_group_larger_than_stabilizer() {
    // a subgroup of the 24-cell group: facets are octahedra whose own
    // symmetry is much larger than their stabilizer
    let c = corpus::cell24();
    let full = restricted_automorphism_group(c.rays()).unwrap().group;
    assert_eq!(full.order(), BigUint::from(1152u32));
    let sub = PermGroup::new(24, vec![full.generators()[0].clone()]).unwrap();
    let oracle: BTreeSet<FaceSet> = brute_force_supports(&c)
        .iter()
        .map(|s| sub.canonical_representative(s))
        .collect();
    for method in [Method::Adjacency, Method::Incidence] {
        let t = ConversionTask::new(c.clone(), sub.clone(), method).with_policy(deep_policy());
        let out = convert(&t).unwrap();
        assert_eq!(
            out.supports().into_iter().collect::<BTreeSet<_>>(),
            oracle,
            "{method}"
        );
    }
}

#[test]
fn bank_examples() {
    let bank = Bank::new();
    let c = corpus::cube(3);
    let g = restricted_automorphism_group(c.rays()).unwrap().group;
    assert!(bank.lookup(&c, &g).unwrap().is_none());

    let reps: Vec<FaceSet> = direct(&ConversionTask::new(c.clone(), g.clone(), Method::Direct))
        .unwrap()
        .supports();
    assert!(bank.store(&c, &g, &reps).unwrap());
    assert!(!bank.store(&c, &g, &reps).unwrap());

    let order = [5, 2, 7, 0, 3, 6, 1, 4];
    let permuted = c.reordered(&order).unwrap();
    let pg = restricted_automorphism_group(permuted.rays())
        .unwrap()
        .group;
    let got = bank.lookup(&permuted, &pg).unwrap().unwrap();
    assert_eq!(got.len(), 1);
    let triv = PermGroup::trivial(8);
    let all = bank.lookup(&permuted, &triv).unwrap().unwrap();
    assert_eq!(all.len(), 6);
    for s in &all {
        assert!(facet_through(&permuted, s).is_some_and(|f| f.support == *s));
    }
    assert_eq!(
        all.into_iter().collect::<BTreeSet<_>>(),
        brute_force_supports(&permuted)
    );

    let text = bank.export();
    let back = Bank::import(&text).unwrap();
    assert_eq!(back.len(), 1);
    assert_eq!(back.export(), text);
    assert!(Bank::import("bank\nrays 1 x\n").is_err());
}

#[test]
fn bank_hits_on_repeated_ridge_cones() {
    // every facet of the 4-cube is a 3-cube; with the trivial group each
    // is its own subproblem and all but the first come from the bank
    let bank = Arc::new(Bank::new());
    let policy = Policy {
        bank: Some(bank.clone()),
        balinski: false,
        ..deep_policy()
    };
    let t = ConversionTask::new(corpus::cube(4), PermGroup::trivial(16), Method::Adjacency)
        .with_policy(policy);
    let stats = Stats::default();
    let out = convert_with_stats(&t, &stats).unwrap();
    assert_eq!(out.representatives.len(), 8);
    assert!(stats.bank_hits.load(Ordering::Relaxed) >= 7);
    let plain = ConversionTask::new(corpus::cube(4), PermGroup::trivial(16), Method::Adjacency)
        .with_policy(deep_policy());
    assert_eq!(convert(&plain).unwrap().supports(), out.supports());
}

#[test]
fn threads_give_the_same_orbits() {
    for method in [Method::Adjacency, Method::Incidence] {
        let c = corpus::cell24();
        let single = task(c.clone(), method);
        let multi = single.clone().with_policy(Policy {
            threads: 4,
            ..Policy::default()
        });
        assert_eq!(
            convert(&single).unwrap().supports(),
            convert(&multi).unwrap().supports()
        );
    }
}

#[test]
fn group_checks() {
    let c = corpus::cube(3);
    let bad = PermGroup::new(8, vec![Permutation::from_cycles(8, &[vec![0, 1]]).unwrap()]).unwrap();
    let t = ConversionTask::new(c.clone(), bad, Method::Direct);
    assert!(matches!(t.verify_group(), Err(Error::GroupAction(_))));
    let t = ConversionTask::new(c, PermGroup::trivial(7), Method::Direct);
    assert!(matches!(convert(&t), Err(Error::GroupAction(_))));
    assert_eq!("pivot".parse::<Method>().unwrap(), Method::Pivot);
    assert!("simplex".parse::<Method>().is_err());
}

#[test]
fn quotient_examples() {
    // apex of a square pyramid: the quotient is the square cone
    let rows = vec![
        vec![rat(1, 1), int(1), int(0), int(1)],
        vec![int(1), int(-1), int(0), int(1)],
        vec![int(-1), int(1), int(0), int(1)],
        vec![int(-1), int(-1), int(0), int(1)],
        vec![int(0), int(0), int(1), int(1)],
    ];
    let c = Cone::new(RationalMatrix::from_rows(4, rows)).unwrap();
    let (q, kept) = quotient_at(&c, 4).unwrap();
    assert_eq!(kept, vec![0, 1, 2, 3]);
    assert_eq!(q.dim(), 3);
    let (q, kept) = quotient_at(&c, 0).unwrap();
    assert_eq!(kept, vec![1, 2, 4]);
    assert_eq!(q.num_rays(), 3);
}

fn corpus_cone() -> impl Strategy<Value = Cone> {
    (3usize..=4, 5usize..=9, any::<u64>())
        .prop_map(|(dim, count, seed)| corpus::random_01(dim, count.min(1 << dim), seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn methods_agree_and_expand_to_all_facets(c in corpus_cone()) {
        let t = task(c.clone(), Method::Direct);
        let reference = convert(&t).unwrap();
        prop_assert_eq!(expand(&t.group, &reference.representatives), brute_force_supports(&c));
        for method in [Method::Incidence, Method::Adjacency, Method::Cascade, Method::Pivot] {
            let mut m = t.clone();
            m.method = method;
            prop_assert_eq!(convert(&m).unwrap().supports(), reference.supports());
        }
    }

    #[test]
    fn switches_do_not_change_output(c in corpus_cone(), trivial in any::<bool>()) {
        let mut t = task(c.clone(), Method::Adjacency);
        if trivial {
            t.group = PermGroup::trivial(c.num_rays());
        }
        let reference = convert(&t).unwrap().supports();
        let variants = [
            Policy { balinski: false, ..deep_policy() },
            Policy { incidence_ordering: false, ..Policy::default() },
            Policy { bank: Some(Arc::new(Bank::new())), ..deep_policy() },
            deep_policy(),
        ];
        for p in variants {
            let v = t.clone().with_policy(p);
            prop_assert_eq!(convert(&v).unwrap().supports(), reference.clone());
        }
    }
}
