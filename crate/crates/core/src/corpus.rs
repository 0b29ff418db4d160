//! Standard test cones: homogenized polytopes with known symmetry.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conemodel::Cone;
use crate::exactlin::{int, rank, rat, RationalMatrix};

fn homogenized(points: Vec<Vec<i64>>) -> Cone {
    let rows: Vec<Vec<i64>> = points
        .into_iter()
        .map(|mut p| {
            p.push(1);
            p
        })
        .collect();
    Cone::from_i64_rows(&rows).expect("nonempty point set")
}

/// The cone spanned by the unit vectors of `R^d`.
pub fn simplex(d: usize) -> Cone {
    let rows: Vec<Vec<i64>> = (0..d)
        .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
        .collect();
    Cone::from_i64_rows(&rows).expect("d > 0")
}

/// `[-1, 1]^d`; vertex `v` has coordinate `j` equal to `+1` iff bit `j` of
/// `v` is set.
pub fn cube(d: usize) -> Cone {
    homogenized(
        (0..1usize << d)
            .map(|v| {
                (0..d)
                    .map(|j| if v >> j & 1 == 1 { 1 } else { -1 })
                    .collect()
            })
            .collect(),
    )
}

/// Vertices `+e_1, -e_1, +e_2, -e_2, ...`.
pub fn cross_polytope(d: usize) -> Cone {
    homogenized(
        (0..2 * d)
            .map(|k| {
                (0..d)
                    .map(|j| {
                        if j == k / 2 {
                            if k % 2 == 0 {
                                1
                            } else {
                                -1
                            }
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

/// Wreath product of the `d`-cross polytope with the `e`-cross polytope:
/// a copy of the first on each of the `2e` vertices of the second, in
/// pairwise orthogonal coordinate blocks.
pub fn wreath_cross(d: usize, e: usize) -> Cone {
    let copies = 2 * e;
    let dim = copies * d + e;
    let mut points = Vec::new();
    for k in 0..copies {
        for i in 0..2 * d {
            let mut p = vec![0i64; dim];
            p[k * d + i / 2] = if i % 2 == 0 { 1 } else { -1 };
            p[copies * d + k / 2] = if k % 2 == 0 { 1 } else { -1 };
            points.push(p);
        }
    }
    homogenized(points)
}

/// Pyramid over a slightly skewed octahedron; its restricted symmetry is
/// much smaller than its combinatorial symmetry.
pub fn oct_pyr() -> Cone {
    let h = rat(1, 2);
    let rows = vec![
        vec![int(1), int(0), h.clone(), int(1), int(1)],
        vec![int(-1), int(0), h, int(1), int(1)],
        vec![int(0), int(1), int(0), int(1), int(1)],
        vec![int(0), int(-1), int(0), int(1), int(1)],
        vec![int(0), int(0), int(1), int(1), int(1)],
        vec![int(0), int(0), int(-1), int(1), int(1)],
        vec![int(0), int(0), int(0), int(-1), int(1)],
    ];
    Cone::new(RationalMatrix::from_rows(5, rows)).expect("seven rays")
}

/// Triangular prism: rays `(e_i, 0)` then `(e_i, 1)` in `R^4`, with the
/// coordinate sum acting as homogenizing functional.
pub fn triangular_prism() -> Cone {
    let mut rows = Vec::new();
    for top in 0..2 {
        for i in 0..3 {
            let mut r = vec![0i64; 4];
            r[i] = 1;
            r[3] = top;
            rows.push(r);
        }
    }
    Cone::from_i64_rows(&rows).expect("six rays")
}

/// The 24-cell: all permutations of `(+-1, +-1, 0, 0)`.
pub fn cell24() -> Cone {
    let mut points = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            for s in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut p = vec![0i64; 4];
                p[a] = s.0;
                p[b] = s.1;
                points.push(p);
            }
        }
    }
    homogenized(points)
}

/// Pyramid over the `d`-cube.
pub fn cube_pyramid(d: usize) -> Cone {
    let mut points: Vec<Vec<i64>> = (0..1usize << d)
        .map(|v| {
            let mut p: Vec<i64> = (0..d)
                .map(|j| if v >> j & 1 == 1 { 1 } else { -1 })
                .collect();
            p.push(0);
            p
        })
        .collect();
    let mut apex = vec![0; d];
    apex.push(1);
    points.push(apex);
    homogenized(points)
}

/// A full-dimensional 0/1-polytope on `count` random vertices of `[0,1]^dim`.
pub fn random_01(dim: usize, count: usize, seed: u64) -> Cone {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<usize> = (0..1usize << dim).collect();
    loop {
        let mut pick: Vec<usize> = all
            .choose_multiple(&mut rng, count.min(all.len()))
            .copied()
            .collect();
        pick.sort_unstable();
        let c = homogenized(
            pick.iter()
                .map(|&v| (0..dim).map(|j| (v >> j & 1) as i64).collect())
                .collect(),
        );
        if rank(c.rays()) == dim + 1 {
            return c;
        }
    }
}

/// Named cones with at most 16 rays, covering every family above.
pub fn standard() -> Vec<(String, Cone)> {
    let mut out: Vec<(String, Cone)> = vec![
        ("simplex-3".into(), simplex(3)),
        ("simplex-5".into(), simplex(5)),
        ("square".into(), cube(2)),
        ("cube-3".into(), cube(3)),
        ("cube-4".into(), cube(4)),
        ("cross-3".into(), cross_polytope(3)),
        ("cross-4".into(), cross_polytope(4)),
        ("cross-5".into(), cross_polytope(5)),
        ("oct-pyr".into(), oct_pyr()),
        ("prism-3".into(), triangular_prism()),
        ("cube-pyramid-3".into(), cube_pyramid(3)),
        ("wreath-1-2".into(), wreath_cross(1, 2)),
        ("wreath-2-1".into(), wreath_cross(2, 1)),
    ];
    for (k, (dim, count)) in [(3, 5), (3, 6), (4, 7), (4, 9), (4, 11), (5, 10)]
        .into_iter()
        .enumerate()
    {
        out.push((
            format!("random01-{dim}-{count}"),
            random_01(dim, count, 17 + k as u64),
        ));
    }
    out
}
