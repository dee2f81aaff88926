//! Orientation and in-sphere predicates with exact fallback and symbolic
//! perturbation.
//!
//! Every predicate first evaluates the determinant in f64 guarded by a
//! forward error bound (the classic "stage A" filter); when the magnitude
//! clears the bound the sign is certain. Otherwise the same determinant is
//! recomputed in arbitrary-precision rationals, which is exact because every
//! f64 is a dyadic rational. Coordinates are assumed to be of ordinary
//! magnitude: the filter constants do not account for subnormal underflow or
//! overflow of intermediate products.
//!
//! An exactly zero determinant is resolved by symbolic perturbation:
//! conceptually the paraboloid lift of point i is lowered by an infinitesimal
//! eps_i, where a higher perturbation priority means a larger (dominating)
//! infinitesimal. The sign of the perturbed determinant is read off its
//! cofactor expansion, walking candidates in decreasing priority. The scheme
//! behaves like an actual regular triangulation of infinitesimally weighted
//! points, so all call sites stay mutually consistent.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

// Unit roundoff 2^-53 and the stage-A filter constants.
const EPS: f64 = f64::EPSILON / 2.0;
const CCW_ERR_A: f64 = (3.0 + 16.0 * EPS) * EPS;
const O3D_ERR_A: f64 = (7.0 + 56.0 * EPS) * EPS;
const ISP_ERR_A: f64 = (16.0 + 224.0 * EPS) * EPS;
// Conservative bound for the coplanar in-circle determinant, which mixes
// chart coordinates with full 3D lifts and therefore does not match any of
// the textbook constants. Looseness only costs a trip to exact arithmetic.
const ICC_CHART_ERR: f64 = 1024.0 * EPS;

pub type P3 = [f64; 3];

#[inline]
fn sign_f64(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

#[inline]
pub(crate) fn big(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

pub(crate) fn det3_big(m: &[[BigRational; 3]; 3]) -> BigRational {
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
        &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]
    };
    &m[0][0] * minor(1, 2, 1, 2) - &m[0][1] * minor(1, 2, 0, 2) + &m[0][2] * minor(1, 2, 0, 1)
}

fn det4_big(m: &[[BigRational; 4]; 4]) -> BigRational {
    let mut acc = BigRational::zero();
    for col in 0..4 {
        let mut sub = [
            [BigRational::zero(), BigRational::zero(), BigRational::zero()],
            [BigRational::zero(), BigRational::zero(), BigRational::zero()],
            [BigRational::zero(), BigRational::zero(), BigRational::zero()],
        ];
        for r in 1..4 {
            let mut cc = 0;
            for c in 0..4 {
                if c != col {
                    sub[r - 1][cc] = m[r][c].clone();
                    cc += 1;
                }
            }
        }
        let term = &m[0][col] * det3_big(&sub);
        if col % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn big_sign(v: &BigRational) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `det [pa-pc; pb-pc]` on the two given coordinate axes.
///
/// Positive means (pa, pb, pc) wind counterclockwise in the (u, v) chart.
pub fn orient2d_axes(pa: P3, pb: P3, pc: P3, u: usize, v: usize) -> i8 {
    let detleft = (pa[u] - pc[u]) * (pb[v] - pc[v]);
    let detright = (pa[v] - pc[v]) * (pb[u] - pc[u]);
    let det = detleft - detright;
    let magnitude = detleft.abs() + detright.abs();
    if magnitude == 0.0 {
        return 0;
    }
    if det.abs() >= CCW_ERR_A * magnitude {
        return sign_f64(det);
    }
    let m = [
        [big(pa[u]) - big(pc[u]), big(pa[v]) - big(pc[v])],
        [big(pb[u]) - big(pc[u]), big(pb[v]) - big(pc[v])],
    ];
    big_sign(&(&m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]))
}

/// Sign of the 3D orientation determinant `det [pa-pd; pb-pd; pc-pd]`.
///
/// Positive means pd sees the triangle (pa, pb, pc) in counterclockwise
/// order from the negative side of its plane; a positively oriented
/// tetrahedron (a, b, c, d) is one where this sign is positive.
pub fn orient3d(pa: P3, pb: P3, pc: P3, pd: P3) -> i8 {
    let adx = pa[0] - pd[0];
    let bdx = pb[0] - pd[0];
    let cdx = pc[0] - pd[0];
    let ady = pa[1] - pd[1];
    let bdy = pb[1] - pd[1];
    let cdy = pc[1] - pd[1];
    let adz = pa[2] - pd[2];
    let bdz = pb[2] - pd[2];
    let cdz = pc[2] - pd[2];

    let bdxcdy = bdx * cdy;
    let cdxbdy = cdx * bdy;
    let cdxady = cdx * ady;
    let adxcdy = adx * cdy;
    let adxbdy = adx * bdy;
    let bdxady = bdx * ady;

    let det =
        adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
    let permanent = (bdxcdy.abs() + cdxbdy.abs()) * adz.abs()
        + (cdxady.abs() + adxcdy.abs()) * bdz.abs()
        + (adxbdy.abs() + bdxady.abs()) * cdz.abs();
    if permanent == 0.0 {
        return 0;
    }
    if det.abs() >= O3D_ERR_A * permanent {
        return sign_f64(det);
    }
    orient3d_exact(pa, pb, pc, pd)
}

fn orient3d_exact(pa: P3, pb: P3, pc: P3, pd: P3) -> i8 {
    let row = |p: P3| {
        [
            big(p[0]) - big(pd[0]),
            big(p[1]) - big(pd[1]),
            big(p[2]) - big(pd[2]),
        ]
    };
    let m = [row(pa), row(pb), row(pc)];
    big_sign(&det3_big(&m))
}

/// Sign of the in-sphere determinant for a positively oriented tetrahedron
/// (pa, pb, pc, pd): positive iff pe lies strictly inside its circumsphere.
pub fn insphere(pa: P3, pb: P3, pc: P3, pd: P3, pe: P3) -> i8 {
    let aex = pa[0] - pe[0];
    let bex = pb[0] - pe[0];
    let cex = pc[0] - pe[0];
    let dex = pd[0] - pe[0];
    let aey = pa[1] - pe[1];
    let bey = pb[1] - pe[1];
    let cey = pc[1] - pe[1];
    let dey = pd[1] - pe[1];
    let aez = pa[2] - pe[2];
    let bez = pb[2] - pe[2];
    let cez = pc[2] - pe[2];
    let dez = pd[2] - pe[2];

    let aexbey = aex * bey;
    let bexaey = bex * aey;
    let ab = aexbey - bexaey;
    let bexcey = bex * cey;
    let cexbey = cex * bey;
    let bc = bexcey - cexbey;
    let cexdey = cex * dey;
    let dexcey = dex * cey;
    let cd = cexdey - dexcey;
    let dexaey = dex * aey;
    let aexdey = aex * dey;
    let da = dexaey - aexdey;
    let aexcey = aex * cey;
    let cexaey = cex * aey;
    let ac = aexcey - cexaey;
    let bexdey = bex * dey;
    let dexbey = dex * bey;
    let bd = bexdey - dexbey;

    let abc = aez * bc - bez * ac + cez * ab;
    let bcd = bez * cd - cez * bd + dez * bc;
    let cda = cez * da + dez * ac + aez * cd;
    let dab = dez * ab + aez * bd + bez * da;

    let alift = aex * aex + aey * aey + aez * aez;
    let blift = bex * bex + bey * bey + bez * bez;
    let clift = cex * cex + cey * cey + cez * cez;
    let dlift = dex * dex + dey * dey + dez * dez;

    let det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);

    let aezp = aez.abs();
    let bezp = bez.abs();
    let cezp = cez.abs();
    let dezp = dez.abs();
    let aexbeyp = aexbey.abs();
    let bexaeyp = bexaey.abs();
    let bexceyp = bexcey.abs();
    let cexbeyp = cexbey.abs();
    let cexdeyp = cexdey.abs();
    let dexceyp = dexcey.abs();
    let dexaeyp = dexaey.abs();
    let aexdeyp = aexdey.abs();
    let aexceyp = aexcey.abs();
    let cexaeyp = cexaey.abs();
    let bexdeyp = bexdey.abs();
    let dexbeyp = dexbey.abs();
    let permanent = ((cexdeyp + dexceyp) * bezp
        + (dexbeyp + bexdeyp) * cezp
        + (bexceyp + cexbeyp) * dezp)
        * alift
        + ((dexaeyp + aexdeyp) * cezp
            + (aexceyp + cexaeyp) * dezp
            + (cexdeyp + dexceyp) * aezp)
            * blift
        + ((aexbeyp + bexaeyp) * dezp
            + (bexdeyp + dexbeyp) * aezp
            + (dexaeyp + aexdeyp) * bezp)
            * clift
        + ((bexceyp + cexbeyp) * aezp
            + (cexaeyp + aexceyp) * bezp
            + (aexbeyp + bexaeyp) * cezp)
            * dlift;
    if permanent == 0.0 {
        return 0;
    }
    if det.abs() >= ISP_ERR_A * permanent {
        return sign_f64(det);
    }
    insphere_exact(pa, pb, pc, pd, pe)
}

fn insphere_exact(pa: P3, pb: P3, pc: P3, pd: P3, pe: P3) -> i8 {
    let row = |p: P3| {
        let dx = big(p[0]) - big(pe[0]);
        let dy = big(p[1]) - big(pe[1]);
        let dz = big(p[2]) - big(pe[2]);
        let lift = &dx * &dx + &dy * &dy + &dz * &dz;
        [dx, dy, dz, lift]
    };
    let m = [row(pa), row(pb), row(pc), row(pd)];
    big_sign(&det4_big(&m))
}

/// Perturbed in-circumsphere test for a positively oriented tetrahedron.
///
/// Returns true iff pe lies inside the circumsphere of (pa..pd) after the
/// symbolic perturbation; never reports "on the sphere". `prio` gives the
/// perturbation priority of each of the five points in argument order, all
/// distinct, with larger values dominating.
pub fn insphere_sos(pa: P3, pb: P3, pc: P3, pd: P3, pe: P3, prio: [u64; 5]) -> bool {
    debug_assert!(orient3d(pa, pb, pc, pd) > 0, "tetrahedron must be positive");
    match insphere(pa, pb, pc, pd, pe) {
        1 => return true,
        -1 => return false,
        _ => {}
    }
    let mut order = [0usize, 1, 2, 3, 4];
    order.sort_by_key(|&k| std::cmp::Reverse(prio[k]));
    for &k in &order {
        // Perturbing row k contributes eps_k * (-1)^k * orient of the other
        // four points in row order to the lifted determinant.
        match k {
            4 => return true,
            3 => {
                let s = orient3d(pa, pb, pc, pe);
                if s != 0 {
                    return s < 0;
                }
            }
            2 => {
                let s = orient3d(pa, pb, pd, pe);
                if s != 0 {
                    return s > 0;
                }
            }
            1 => {
                let s = orient3d(pa, pc, pd, pe);
                if s != 0 {
                    return s < 0;
                }
            }
            0 => {
                let s = orient3d(pb, pc, pd, pe);
                if s != 0 {
                    return s > 0;
                }
            }
            _ => unreachable!(),
        }
    }
    unreachable!("query-point term always decides")
}

/// Picks chart axes (u, v) for a triangle so its projection keeps a nonzero
/// orientation, preferring the dominant normal component. Returns
/// (u, v, orientation sign of (pa, pb, pc) in that chart).
fn triangle_chart(pa: P3, pb: P3, pc: P3) -> (usize, usize, i8) {
    let ab = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
    let ac = [pc[0] - pa[0], pc[1] - pa[1], pc[2] - pa[2]];
    let n = [
        (ab[1] * ac[2] - ab[2] * ac[1]).abs(),
        (ab[2] * ac[0] - ab[0] * ac[2]).abs(),
        (ab[0] * ac[1] - ab[1] * ac[0]).abs(),
    ];
    let mut axes = [0usize, 1, 2];
    axes.sort_by(|&i, &j| n[j].partial_cmp(&n[i]).unwrap().then(i.cmp(&j)));
    for &drop in &axes {
        // Dropping an axis keeps the chart right-handed as seen from +axis.
        let (u, v) = match drop {
            0 => (1, 2),
            1 => (2, 0),
            _ => (0, 1),
        };
        let o = orient2d_axes(pa, pb, pc, u, v);
        if o != 0 {
            return (u, v, o);
        }
    }
    panic!("degenerate triangle has no valid chart");
}

/// Sign of the in-circle determinant of four coplanar points in the (u, v)
/// chart, using the full 3D paraboloid lift. The query is inside the circle
/// through (pa, pb, pc) iff this sign matches the chart orientation of
/// (pa, pb, pc).
fn incircle_chart(pa: P3, pb: P3, pc: P3, pq: P3, u: usize, v: usize) -> i8 {
    let lift = |p: P3| p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    let lq = lift(pq);
    let row = |p: P3| [p[u] - pq[u], p[v] - pq[v], lift(p) - lq];
    let (ra, rb, rc) = (row(pa), row(pb), row(pc));
    let minor = |x: [f64; 3], y: [f64; 3], c0: usize, c1: usize| x[c0] * y[c1] - x[c1] * y[c0];
    let det = ra[2] * minor(rb, rc, 0, 1) - rb[2] * minor(ra, rc, 0, 1)
        + rc[2] * minor(ra, rb, 0, 1);
    let mag = |x: [f64; 3], y: [f64; 3], c0: usize, c1: usize| {
        (x[c0] * y[c1]).abs() + (x[c1] * y[c0]).abs()
    };
    let permanent = ra[2].abs() * mag(rb, rc, 0, 1)
        + rb[2].abs() * mag(ra, rc, 0, 1)
        + rc[2].abs() * mag(ra, rb, 0, 1);
    if permanent == 0.0 {
        return 0;
    }
    if det.abs() >= ICC_CHART_ERR * permanent {
        return sign_f64(det);
    }
    // Exact: same reduced determinant in rationals.
    let lift_big = |p: P3| {
        let (x, y, z) = (big(p[0]), big(p[1]), big(p[2]));
        &x * &x + &y * &y + &z * &z
    };
    let lq_big = lift_big(pq);
    let row_big = |p: P3| {
        [
            big(p[u]) - big(pq[u]),
            big(p[v]) - big(pq[v]),
            lift_big(p) - lq_big.clone(),
        ]
    };
    let m = [row_big(pa), row_big(pb), row_big(pc)];
    let reordered = [
        [m[0][0].clone(), m[0][1].clone(), m[0][2].clone()],
        [m[1][0].clone(), m[1][1].clone(), m[1][2].clone()],
        [m[2][0].clone(), m[2][1].clone(), m[2][2].clone()],
    ];
    big_sign(&det3_big(&reordered))
}

/// Perturbed "pq strictly inside the circumcircle of (pa, pb, pc)" for four
/// coplanar points, consistent with [`insphere_sos`]'s perturbation.
pub fn incircle_coplanar_sos(pa: P3, pb: P3, pc: P3, pq: P3, prio: [u64; 4]) -> bool {
    let (u, v, o_ref) = triangle_chart(pa, pb, pc);
    let g = incircle_chart(pa, pb, pc, pq, u, v);
    if g != 0 {
        return g as i32 * o_ref as i32 > 0;
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_by_key(|&k| std::cmp::Reverse(prio[k]));
    for &k in &order {
        match k {
            3 => return true,
            2 => {
                let s = orient2d_axes(pa, pb, pq, u, v);
                if s != 0 {
                    return (s as i32) * (o_ref as i32) < 0;
                }
            }
            1 => {
                let s = orient2d_axes(pa, pc, pq, u, v);
                if s != 0 {
                    return (s as i32) * (o_ref as i32) > 0;
                }
            }
            0 => {
                let s = orient2d_axes(pb, pc, pq, u, v);
                if s != 0 {
                    return (s as i32) * (o_ref as i32) < 0;
                }
            }
            _ => unreachable!(),
        }
    }
    unreachable!("query-point term always decides")
}

/// True when the three points are collinear (exact).
pub fn collinear(pa: P3, pb: P3, pc: P3) -> bool {
    orient2d_axes(pa, pb, pc, 1, 2) == 0
        && orient2d_axes(pa, pb, pc, 2, 0) == 0
        && orient2d_axes(pa, pb, pc, 0, 1) == 0
}
