use super::*;
use crate::exactlin::{int, rat};
use proptest::prelude::*;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn square() -> Cone {
    Cone::from_i64_rows(&[
        vec![1, 1, 1],
        vec![1, -1, 1],
        vec![-1, 1, 1],
        vec![-1, -1, 1],
    ])
    .unwrap()
}

fn cube3() -> Cone {
    let rows: Vec<Vec<i64>> = (0..8)
        .map(|v| {
            let mut r: Vec<i64> = (0..3)
                .map(|b| if v >> b & 1 == 1 { 1 } else { -1 })
                .collect();
            r.push(1);
            r
        })
        .collect();
    Cone::from_i64_rows(&rows).unwrap()
}

fn oct_pyr() -> Cone {
    let h = rat(1, 2);
    let z = int(0);
    let o = int(1);
    let m = |x: i64| int(x);
    let rows = vec![
        vec![m(1), z.clone(), h.clone(), o.clone(), o.clone()],
        vec![m(-1), z.clone(), h.clone(), o.clone(), o.clone()],
        vec![z.clone(), m(1), z.clone(), o.clone(), o.clone()],
        vec![z.clone(), m(-1), z.clone(), o.clone(), o.clone()],
        vec![z.clone(), z.clone(), m(1), o.clone(), o.clone()],
        vec![z.clone(), z.clone(), m(-1), o.clone(), o.clone()],
        vec![z.clone(), z.clone(), z.clone(), m(-1), o.clone()],
    ];
    Cone::new(RationalMatrix::from_rows(5, rows)).unwrap()
}

/// Facet supports by testing every hyperplane through `d-1` generators.
fn brute_force_supports(c: &Cone) -> Vec<FaceSet> {
    let n = c.num_rays();
    let d = c.dim();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..d - 1).collect();
    loop {
        let s = FaceSet::new(idx.clone());
        if c.rank_of(&s) == d - 1 {
            let k = kernel_basis(&c.rays().select_rows(s.indices()));
            let vals: Vec<Rational> = (0..n).map(|i| dot(k.row(0), c.rays().row(i))).collect();
            let pos = vals.iter().all(|v| !v.is_negative());
            let neg = vals.iter().all(|v| !v.is_positive());
            if pos || neg {
                let supp: FaceSet = (0..n).filter(|&i| vals[i].is_zero()).collect();
                out.push(supp);
            }
        }
        let mut k = d - 1;
        loop {
            if k == 0 {
                out.sort();
                out.dedup();
                return out;
            }
            k -= 1;
            if idx[k] < n - (d - 1 - k) {
                idx[k] += 1;
                for j in k + 1..d - 1 {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn supports(facets: &[Facet]) -> Vec<FaceSet> {
    let mut s: Vec<FaceSet> = facets.iter().map(|f| f.support.clone()).collect();
    s.sort();
    s
}

#[test]
fn homogenize_examples() {
    let pts = RationalMatrix::from_i64_rows(&[vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]]);
    let c = homogenize(&pts, &RationalMatrix::zeros(0, 2)).unwrap();
    assert_eq!(c.num_rays(), 4);
    assert_eq!(c.dim(), 3);
    assert_eq!(c.rays().row(1), &[int(1), int(-1), int(1)]);

    let c = homogenize(
        &RationalMatrix::from_i64_rows(&[vec![0]]),
        &RationalMatrix::zeros(0, 1),
    )
    .unwrap();
    assert_eq!(c.rays().row(0), &[int(0), int(1)]);

    let c = homogenize(
        &RationalMatrix::from_i64_rows(&[vec![0]]),
        &RationalMatrix::from_i64_rows(&[vec![1]]),
    )
    .unwrap();
    assert_eq!(
        c.rays().to_rows(),
        vec![vec![int(0), int(1)], vec![int(1), int(0)]]
    );
    assert_eq!(
        c.provenance().homogenization.as_ref().unwrap().is_point,
        vec![true, false]
    );

    assert!(matches!(
        homogenize(&RationalMatrix::zeros(0, 2), &RationalMatrix::zeros(0, 2)),
        Err(Error::EmptyInput)
    ));
    assert!(homogenize(
        &RationalMatrix::from_i64_rows(&[vec![0, 1]]),
        &RationalMatrix::from_i64_rows(&[vec![1]])
    )
    .is_err());
}

#[test]
fn reduce_examples() {
    let c = Cone::from_i64_rows(&[vec![1, 0], vec![-1, 0], vec![0, 1]]).unwrap();
    let r = reduce_to_pointed_fulldim(&c).unwrap();
    let red = r.provenance().reduction.as_ref().unwrap();
    assert_eq!(red.lineality.rows(), 1);
    assert!(red.lineality[(0, 1)].is_zero());
    assert_eq!(r.dim(), 1);
    assert_eq!(red.kept, vec![2]);
    let facets = dual_description_dd(&r).unwrap();
    assert_eq!(facets.len(), 1);
    assert_eq!(red.lift_normal(&facets[0].normal), ints(&[0, 1]));

    let sq = square();
    let r = reduce_to_pointed_fulldim(&sq).unwrap();
    assert!(r.provenance().reduction.as_ref().unwrap().is_identity());
    assert_eq!(r.rays(), sq.rays());

    let line = Cone::from_i64_rows(&[vec![1], vec![-1]]).unwrap();
    assert!(matches!(
        reduce_to_pointed_fulldim(&line),
        Err(Error::DegenerateCone(1))
    ));
}

#[test]
fn reduce_drops_redundant_and_projects() {
    // square in the plane z = 1 of R^4 with an extra interior point and a
    // duplicated vertex
    let c = Cone::from_i64_rows(&[
        vec![1, 1, 1, 0],
        vec![1, -1, 1, 0],
        vec![0, 0, 1, 0],
        vec![-1, 1, 1, 0],
        vec![-1, -1, 1, 0],
        vec![2, 2, 2, 0],
    ])
    .unwrap();
    let r = reduce_to_pointed_fulldim(&c).unwrap();
    let red = r.provenance().reduction.as_ref().unwrap();
    assert_eq!(r.dim(), 3);
    assert_eq!(red.kept, vec![1, 3, 4, 5]);
    for f in dual_description_dd(&r).unwrap() {
        let lifted = red.lift_normal(&f.normal);
        assert!(c.is_valid_normal(&lifted));
        assert_eq!(c.rank_of(&c.support_of(&lifted)), 2);
    }
}

#[test]
fn dd_examples() {
    let facets = dual_description_dd(&square()).unwrap();
    let normals: Vec<Vec<BigInt>> = facets.iter().map(|f| f.normal.clone()).collect();
    assert_eq!(
        normals,
        vec![
            ints(&[-1, 0, 1]),
            ints(&[0, -1, 1]),
            ints(&[0, 1, 1]),
            ints(&[1, 0, 1])
        ]
    );
    assert_eq!(dual_description_dd(&cube3()).unwrap().len(), 6);

    let op = oct_pyr();
    let facets = dual_description_dd(&op).unwrap();
    assert_eq!(facets.len(), 9);
    assert_eq!(supports(&facets), brute_force_supports(&op));
    let base = FaceSet::new(vec![0, 1, 2, 3, 4, 5]);
    assert!(facets.iter().any(|f| f.support == base));
}

#[test]
fn incidence_examples() {
    let sq = square();
    let m = incidence_matrix(&sq, &dual_description_dd(&sq).unwrap());
    assert!(m.iter().all(|row| row.iter().filter(|&&b| b).count() == 2));
    assert!((0..4).all(|j| m.iter().filter(|row| row[j]).count() == 2));

    let simplex = Cone::from_i64_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    let facets = dual_description_dd(&simplex).unwrap();
    let m = incidence_matrix(&simplex, &facets);
    for i in 0..3 {
        assert_eq!(m[i].iter().filter(|&&b| !b).count(), 1);
    }
    let c = cube3();
    let m = incidence_matrix(&c, &dual_description_dd(&c).unwrap());
    assert!(m.iter().all(|row| row.iter().filter(|&&b| b).count() == 3));
    assert!((0..6).all(|j| m.iter().filter(|row| row[j]).count() == 4));
}

#[test]
fn gift_wrap_examples() {
    let sq = square();
    let x1 = sq.facet_from_normal(ints(&[-1, 0, 1]));
    // rays (1,1,1) is index 0; x <= 1 means facet -x + 1 >= 0
    let ridge = FaceSet::new(vec![0]);
    let other = gift_wrap(&sq, &x1, &ridge).unwrap();
    assert_eq!(other.normal, ints(&[0, -1, 1]));

    let c = cube3();
    let x1 = c.facet_from_normal(ints(&[-1, 0, 0, 1]));
    // vertices (1,1,1) = 7 and (1,1,-1) = 3
    let edge = FaceSet::new(vec![3, 7]);
    assert_eq!(
        gift_wrap(&c, &x1, &edge).unwrap().normal,
        ints(&[0, -1, 0, 1])
    );
    assert!(matches!(
        gift_wrap(&c, &x1, &FaceSet::new(vec![7])),
        Err(Error::NotARidge(_))
    ));
    assert!(gift_wrap(&c, &x1, &FaceSet::new(vec![0, 1])).is_err());

    let simplex = Cone::from_i64_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    let f = simplex.facet_from_normal(ints(&[1, 0, 0]));
    let g = gift_wrap(&simplex, &f, &FaceSet::new(vec![1])).unwrap();
    assert_eq!(g.support, FaceSet::new(vec![0, 1]));
}

#[test]
fn ridges_examples() {
    let c = cube3();
    let f = c.facet_from_normal(ints(&[-1, 0, 0, 1]));
    assert_eq!(ridges_of(&c, &f).unwrap().len(), 4);

    let simplex = Cone::from_i64_rows(&[
        vec![1, 0, 0, 0],
        vec![0, 1, 0, 0],
        vec![0, 0, 1, 0],
        vec![0, 0, 0, 1],
    ])
    .unwrap();
    let f = simplex.facet_from_normal(ints(&[0, 0, 0, 1]));
    let r = ridges_of(&simplex, &f).unwrap();
    assert_eq!(
        r,
        vec![
            FaceSet::new(vec![0, 1]),
            FaceSet::new(vec![0, 2]),
            FaceSet::new(vec![1, 2])
        ]
    );

    let oct = Cone::from_i64_rows(&[
        vec![1, 0, 0, 1],
        vec![-1, 0, 0, 1],
        vec![0, 1, 0, 1],
        vec![0, -1, 0, 1],
        vec![0, 0, 1, 1],
        vec![0, 0, -1, 1],
    ])
    .unwrap();
    let facets = dual_description_dd(&oct).unwrap();
    assert_eq!(facets.len(), 8);
    assert_eq!(ridges_of(&oct, &facets[0]).unwrap().len(), 3);
}

#[test]
fn refinement_examples() {
    let c = cube3();
    let coarse = dual_description_dd(&c).unwrap();
    let id: Vec<usize> = (0..8).collect();
    assert!(boundary_complex_refines(&coarse, &coarse, &id));

    // pull vertex (1,1,1) outward
    let mut rows = c.rays().to_rows();
    rows[7] = vec![rat(11, 10), rat(11, 10), rat(11, 10), int(1)];
    let pulled = Cone::new(RationalMatrix::from_rows(4, rows)).unwrap();
    let fine = dual_description_dd(&pulled).unwrap();
    assert_eq!(fine.len(), 9);
    assert!(boundary_complex_refines(&coarse, &fine, &id));

    let oct = Cone::from_i64_rows(&[
        vec![1, 0, 0, 1],
        vec![-1, 0, 0, 1],
        vec![0, 1, 0, 1],
        vec![0, -1, 0, 1],
        vec![0, 0, 1, 1],
        vec![0, 0, -1, 1],
        vec![1, 1, 1, 1],
        vec![2, 3, 5, 1],
    ])
    .unwrap();
    let other = dual_description_dd(&reduce_to_pointed_fulldim(&oct).unwrap()).unwrap();
    assert!(!boundary_complex_refines(&coarse, &other, &id));
}

fn random_polytope() -> impl Strategy<Value = Cone> {
    (3usize..=4).prop_flat_map(|dim| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, dim), dim + 2..=11).prop_map(
            move |pts| {
                let rows: Vec<Vec<i64>> = pts
                    .into_iter()
                    .map(|mut p| {
                        p.push(1);
                        p
                    })
                    .collect();
                Cone::from_i64_rows(&rows).unwrap()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dd_matches_brute_force_and_dualizes(c in random_polytope()) {
        prop_assume!(c.rank() == c.dim());
        let r = reduce_to_pointed_fulldim(&c).unwrap();
        prop_assert_eq!(r.dim(), c.dim());
        let facets = dual_description_dd(&r).unwrap();
        prop_assert_eq!(supports(&facets), brute_force_supports(&r));
        for f in &facets {
            prop_assert_eq!(r.rank_of(&f.support) + 1, r.dim());
        }
        let normals: Vec<Vec<BigInt>> = facets.iter().map(|f| f.normal.clone()).collect();
        let dual = Cone::from_int_rows(r.dim(), &normals).unwrap();
        let mut back: Vec<Vec<BigInt>> =
            dual_description_dd(&dual).unwrap().into_iter().map(|f| f.normal).collect();
        let mut rays: Vec<Vec<BigInt>> = r.int_rays().to_vec();
        back.sort();
        rays.sort();
        prop_assert_eq!(back, rays);
    }

    #[test]
    fn dd_is_order_independent(c in random_polytope(), seed in any::<u64>()) {
        prop_assume!(c.rank() == c.dim());
        let n = c.num_rays();
        let mut order: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a: Vec<Vec<BigInt>> = dual_description_dd(&c).unwrap().into_iter().map(|f| f.normal).collect();
        let b: Vec<Vec<BigInt>> =
            dual_description_dd(&c.reordered(&order).unwrap()).unwrap().into_iter().map(|f| f.normal).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn diamond_property(c in random_polytope()) {
        prop_assume!(c.rank() == c.dim());
        let r = reduce_to_pointed_fulldim(&c).unwrap();
        let facets = dual_description_dd(&r).unwrap();
        for f in &facets {
            for ridge in ridges_of(&r, f).unwrap() {
                prop_assert_eq!(r.rank_of(&ridge) + 2, r.dim());
                let g = gift_wrap(&r, f, &ridge).unwrap();
                prop_assert!(g != *f);
                prop_assert!(facets.contains(&g));
                prop_assert_eq!(&gift_wrap(&r, &g, &ridge).unwrap(), f);
            }
        }
    }
}
