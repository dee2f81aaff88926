//! Small fixed-size vector helpers used throughout the crate.

use crate::scalar::Real;

pub type V3<S> = [S; 3];

#[inline]
pub fn add<S: Real>(a: V3<S>, b: V3<S>) -> V3<S> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub<S: Real>(a: V3<S>, b: V3<S>) -> V3<S> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale<S: Real>(a: V3<S>, s: S) -> V3<S> {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot<S: Real>(a: V3<S>, b: V3<S>) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<S: Real>(a: V3<S>, b: V3<S>) -> V3<S> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm_sq<S: Real>(a: V3<S>) -> S {
    dot(a, a)
}

#[inline]
pub fn norm<S: Real>(a: V3<S>) -> S {
    norm_sq(a).sqrt()
}

#[inline]
pub fn dist_sq<S: Real>(a: V3<S>, b: V3<S>) -> S {
    norm_sq(sub(a, b))
}

#[inline]
pub fn dist<S: Real>(a: V3<S>, b: V3<S>) -> S {
    dist_sq(a, b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_of_axes() {
        let x = [1.0f64, 0.0, 0.0];
        let y = [0.0, 1.0, 0.0];
        assert_eq!(cross(x, y), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn distance_is_symmetric() {
        let a = [1.0f32, 2.0, 3.0];
        let b = [-2.0, 0.5, 7.0];
        assert_eq!(dist(a, b), dist(b, a));
    }
}
