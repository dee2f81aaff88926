//! Alpha filtration of a Delaunay complex.
//!
//! Every Delaunay simplex receives the radius of its smallest empty
//! circumscribing sphere. Tetrahedra get their circumradius. A lower
//! dimensional simplex gets its own smallest-enclosing-sphere radius if
//! that sphere is empty (the simplex is Gabriel), otherwise it inherits the
//! smallest value among the cofaces that witness the obstruction. Values
//! are radii, not squared radii, and vertices sit at zero.
//!
//! Radii are computed in floating point (with an exact rational fallback
//! for nearly flat simplices); a final clamp pass restores exact
//! face-before-coface monotonicity after rounding.

use super::delaunay::DelaunayComplex;
use super::filtration::Filtration;
use super::predicates::{big, det3_big};
use super::{GeometryError, PointCloud};
use crate::scalar::Real;
use crate::vec3::{add, cross, dist_sq, dot, norm_sq, scale, sub, V3};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::collections::BTreeMap;

type P3 = V3<f64>;

/// Smallest enclosing sphere of a simplex spanned by its vertices:
/// circumcenter and squared circumradius.
struct MinSphere {
    center: P3,
    r_sq: f64,
}

fn circumsphere_edge(p0: P3, p1: P3) -> MinSphere {
    let center = scale(add(p0, p1), 0.5);
    MinSphere { center, r_sq: dist_sq(p0, p1) * 0.25 }
}

fn circumsphere_triangle(p0: P3, p1: P3, p2: P3) -> MinSphere {
    let a = sub(p1, p0);
    let b = sub(p2, p0);
    let aa = norm_sq(a);
    let bb = norm_sq(b);
    let ab = dot(a, b);
    let det = aa * bb - ab * ab;
    let alpha = bb * (aa - ab) / (2.0 * det);
    let beta = aa * (bb - ab) / (2.0 * det);
    let u = add(scale(a, alpha), scale(b, beta));
    let r_sq = norm_sq(u);
    if det > 0.0 && r_sq.is_finite() {
        MinSphere { center: add(p0, u), r_sq }
    } else {
        circumsphere_triangle_exact(p0, p1, p2)
    }
}

fn circumsphere_triangle_exact(p0: P3, p1: P3, p2: P3) -> MinSphere {
    let a: Vec<BigRational> = (0..3).map(|i| big(p1[i]) - big(p0[i])).collect();
    let b: Vec<BigRational> = (0..3).map(|i| big(p2[i]) - big(p0[i])).collect();
    let dotr = |x: &[BigRational], y: &[BigRational]| -> BigRational {
        x.iter().zip(y).map(|(u, v)| u * v).sum()
    };
    let aa = dotr(&a, &a);
    let bb = dotr(&b, &b);
    let ab = dotr(&a, &b);
    let det = &aa * &bb - &ab * &ab;
    assert!(det != BigRational::default(), "degenerate triangle in Delaunay complex");
    let two_det = BigRational::from_integer(2.into()) * &det;
    let alpha = &bb * (&aa - &ab) / &two_det;
    let beta = &aa * (&bb - &ab) / &two_det;
    let u: Vec<BigRational> =
        (0..3).map(|i| &alpha * &a[i] + &beta * &b[i]).collect();
    let r_sq = dotr(&u, &u).to_f64().unwrap_or(f64::MAX);
    let center = [
        p0[0] + u[0].to_f64().unwrap_or(0.0),
        p0[1] + u[1].to_f64().unwrap_or(0.0),
        p0[2] + u[2].to_f64().unwrap_or(0.0),
    ];
    MinSphere { center, r_sq }
}

fn circumsphere_tet(p0: P3, p1: P3, p2: P3, p3: P3) -> MinSphere {
    let a = sub(p1, p0);
    let b = sub(p2, p0);
    let c = sub(p3, p0);
    let det = dot(a, cross(b, c));
    let num = add(
        add(scale(cross(b, c), norm_sq(a)), scale(cross(c, a), norm_sq(b))),
        scale(cross(a, b), norm_sq(c)),
    );
    let u = scale(num, 1.0 / (2.0 * det));
    let r_sq = norm_sq(u);
    if det != 0.0 && r_sq.is_finite() {
        MinSphere { center: add(p0, u), r_sq }
    } else {
        circumsphere_tet_exact(p0, p1, p2, p3)
    }
}

fn circumsphere_tet_exact(p0: P3, p1: P3, p2: P3, p3: P3) -> MinSphere {
    let row = |p: P3| -> [BigRational; 3] {
        [big(p[0]) - big(p0[0]), big(p[1]) - big(p0[1]), big(p[2]) - big(p0[2])]
    };
    let m = [row(p1), row(p2), row(p3)];
    let det = det3_big(&m);
    assert!(det != BigRational::default(), "flat cell in Delaunay complex");
    let dotr = |x: &[BigRational; 3], y: &[BigRational; 3]| -> BigRational {
        x.iter().zip(y).map(|(u, v)| u * v).sum()
    };
    let rhs = [
        dotr(&m[0], &m[0]) / BigRational::from_integer(2.into()),
        dotr(&m[1], &m[1]) / BigRational::from_integer(2.into()),
        dotr(&m[2], &m[2]) / BigRational::from_integer(2.into()),
    ];
    // Cramer solve of M u = rhs for the circumcenter offset u.
    let mut u = [BigRational::default(), BigRational::default(), BigRational::default()];
    for k in 0..3 {
        let mut mk = m.clone();
        for r in 0..3 {
            mk[r][k] = rhs[r].clone();
        }
        u[k] = det3_big(&mk) / &det;
    }
    let r_sq = dotr(&u, &u).to_f64().unwrap_or(f64::MAX);
    let center = [
        p0[0] + u[0].to_f64().unwrap_or(0.0),
        p0[1] + u[1].to_f64().unwrap_or(0.0),
        p0[2] + u[2].to_f64().unwrap_or(0.0),
    ];
    MinSphere { center, r_sq }
}

/// Builds the alpha filtration of `complex` over `cloud`.
pub fn alpha_filtration<S: Real>(
    cloud: &PointCloud<S>,
    complex: &DelaunayComplex,
) -> Result<Filtration<S>, GeometryError> {
    let pts = cloud.coords_f64();
    assert_eq!(pts.len(), complex.n_points);

    // Enumerate all simplices, tetrahedra down to vertices, with stable ids.
    let mut simplices: Vec<Vec<u32>> = Vec::new();
    let mut ids: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let mut intern = |verts: Vec<u32>, simplices: &mut Vec<Vec<u32>>| -> usize {
        *ids.entry(verts.clone()).or_insert_with(|| {
            simplices.push(verts);
            simplices.len() - 1
        })
    };
    for tet in &complex.tetrahedra {
        intern(tet.to_vec(), &mut simplices);
        for k in 0..4 {
            let tri: Vec<u32> =
                (0..4).filter(|&j| j != k).map(|j| tet[j]).collect();
            for e in 0..3 {
                let edge: Vec<u32> =
                    (0..3).filter(|&j| j != e).map(|j| tri[j]).collect();
                intern(edge, &mut simplices);
            }
            intern(tri, &mut simplices);
        }
    }
    for v in 0..complex.n_points as u32 {
        intern(vec![v], &mut simplices);
    }

    let mut value_sq: Vec<Option<f64>> = vec![None; simplices.len()];
    let sphere = |verts: &[u32], pts: &[P3]| -> MinSphere {
        match verts.len() {
            2 => circumsphere_edge(pts[verts[0] as usize], pts[verts[1] as usize]),
            3 => circumsphere_triangle(
                pts[verts[0] as usize],
                pts[verts[1] as usize],
                pts[verts[2] as usize],
            ),
            _ => circumsphere_tet(
                pts[verts[0] as usize],
                pts[verts[1] as usize],
                pts[verts[2] as usize],
                pts[verts[3] as usize],
            ),
        }
    };

    // Dimensions descending: when a simplex of dimension d is processed all
    // min-updates from its cofaces have already landed, so its value is
    // final before it is propagated to its facets.
    for d in (1..=3usize).rev() {
        for si in 0..simplices.len() {
            if simplices[si].len() != d + 1 {
                continue;
            }
            let v_sq = match value_sq[si] {
                Some(v) => v,
                None => {
                    let v = sphere(&simplices[si], &pts).r_sq;
                    value_sq[si] = Some(v);
                    v
                }
            };
            if d == 1 {
                continue;
            }
            let verts = simplices[si].clone();
            for k in 0..=d {
                let facet: Vec<u32> =
                    (0..=d).filter(|&j| j != k).map(|j| verts[j]).collect();
                let fi = ids[&facet];
                match value_sq[fi] {
                    Some(old) => value_sq[fi] = Some(old.min(v_sq)),
                    None => {
                        let ms = sphere(&facet, &pts);
                        let w = pts[verts[k] as usize];
                        let gabriel = dist_sq(w, ms.center) >= ms.r_sq;
                        if !gabriel {
                            value_sq[fi] = Some(v_sq);
                        }
                    }
                }
            }
        }
    }

    let mut items: Vec<(Vec<u32>, S)> = Vec::with_capacity(simplices.len());
    for (si, verts) in simplices.iter().enumerate() {
        let value = if verts.len() == 1 {
            S::zero()
        } else {
            let v_sq = value_sq[si].expect("assigned during the descending pass");
            S::cast(v_sq.max(0.0).sqrt())
        };
        items.push((verts.clone(), value));
    }

    // Rounding in sqrt or a narrowing scalar cast can nick monotonicity by
    // an ulp; clamp each simplex to its facets, facets first.
    let mut clamped: BTreeMap<Vec<u32>, S> = items.iter().cloned().collect();
    for d in 1..=3usize {
        let keys: Vec<Vec<u32>> =
            clamped.keys().filter(|k| k.len() == d + 1).cloned().collect();
        for verts in keys {
            let mut v = clamped[&verts];
            for k in 0..=d {
                let facet: Vec<u32> =
                    (0..=d).filter(|&j| j != k).map(|j| verts[j]).collect();
                let fv = clamped[&facet];
                if fv > v {
                    v = fv;
                }
            }
            clamped.insert(verts, v);
        }
    }

    let items: Vec<(Vec<u32>, S)> = clamped.into_iter().collect();
    Filtration::build(items).map_err(|_| GeometryError::DegenerateInput)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::delaunay::delaunay3;

    fn alpha_of(points: Vec<[f64; 3]>) -> Filtration<f64> {
        let cloud = PointCloud::new(points).unwrap();
        let dc = delaunay3(&cloud, 0).unwrap();
        alpha_filtration(&cloud, &dc).unwrap()
    }

    fn value_of(f: &Filtration<f64>, verts: &[u32]) -> f64 {
        f.value(f.index_of(verts).unwrap())
    }

    #[test]
    fn right_tetrahedron_values() {
        // Known alpha values for the unit right-corner tetrahedron: the
        // hypotenuse face is not Gabriel (the origin lies inside its
        // circumsphere) and inherits the cell circumradius.
        let f = alpha_of(vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ]);
        assert_eq!(f.len(), 15);
        let eps = 1e-12;
        for v in 0..4 {
            assert_eq!(value_of(&f, &[v]), 0.0);
        }
        for e in [[0u32, 1], [0, 2], [0, 3]] {
            assert!((value_of(&f, &e) - 0.5).abs() < eps);
        }
        let rt_half = 0.5f64.sqrt();
        for e in [[1u32, 2], [1, 3], [2, 3]] {
            assert!((value_of(&f, &e) - rt_half).abs() < eps);
        }
        for t in [[0u32, 1, 2], [0, 1, 3], [0, 2, 3]] {
            assert!((value_of(&f, &t) - rt_half).abs() < eps);
        }
        let rt3_half = 3.0f64.sqrt() / 2.0;
        assert!((value_of(&f, &[1, 2, 3]) - rt3_half).abs() < eps);
        assert!((value_of(&f, &[0, 1, 2, 3]) - rt3_half).abs() < eps);
    }

    #[test]
    fn regular_tetrahedron_is_fully_gabriel() {
        // Every face of a regular tetrahedron keeps its own circumradius.
        let s = 0.5f64.sqrt();
        let f = alpha_of(vec![
            [1.0, 0.0, -s],
            [-1.0, 0.0, -s],
            [0.0, 1.0, s],
            [0.0, -1.0, s],
        ]);
        let eps = 1e-12;
        // Edge length 2: edges at 1, triangles at 2/sqrt(3), cell at
        // circumradius sqrt(3/2).
        assert!((value_of(&f, &[0, 1]) - 1.0).abs() < eps);
        assert!((value_of(&f, &[0, 2]) - 1.0).abs() < eps);
        assert!((value_of(&f, &[0, 1, 2]) - 2.0 / 3.0f64.sqrt()).abs() < eps);
        assert!((value_of(&f, &[0, 1, 2, 3]) - 1.5f64.sqrt()).abs() < eps);
    }

    #[test]
    fn cospherical_cube_shares_one_circumsphere() {
        let mut pts = Vec::new();
        for z in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for x in [0.0, 1.0] {
                    pts.push([x, y, z]);
                }
            }
        }
        let f = alpha_of(pts);
        let r = 0.75f64.sqrt();
        for (_, s, v) in f.iter() {
            if s.dim() == 3 {
                assert!((v - r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn filtration_is_monotone_for_noisy_cloud() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<[f64; 3]> = (0..80)
            .map(|_| {
                let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                let u: f64 = rng.gen::<f64>() * 2.0 - 1.0;
                let r = (1.0 - u * u).sqrt();
                [
                    r * t.cos() + 0.01 * rng.gen::<f64>(),
                    r * t.sin() + 0.01 * rng.gen::<f64>(),
                    u + 0.01 * rng.gen::<f64>(),
                ]
            })
            .collect();
        // Filtration::build checks exact monotonicity, so success is the
        // assertion; spot-check vertices and the global maximum on top.
        let f = alpha_of(pts);
        let mut max_val: f64 = 0.0;
        let mut max_tet: f64 = 0.0;
        for (_, s, v) in f.iter() {
            if s.dim() == 0 {
                assert_eq!(v, 0.0);
            }
            max_val = max_val.max(v);
            if s.dim() == 3 {
                max_tet = max_tet.max(v);
            }
        }
        assert_eq!(max_val, max_tet);
    }

    #[test]
    fn f32_narrowing_stays_monotone() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<[f32; 3]> = (0..60)
            .map(|_| [rng.gen::<f32>(), rng.gen::<f32>(), rng.gen::<f32>()])
            .collect();
        let cloud = PointCloud::new(pts).unwrap();
        let dc = delaunay3(&cloud, 0).unwrap();
        // build() would reject any monotonicity violation introduced by the
        // f32 cast.
        alpha_filtration(&cloud, &dc).unwrap();
    }
}
