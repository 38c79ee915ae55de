//! Dirac matrices in the standard (Dirac) representation, acting on
//! four-component spinors stored as `[upper0, upper1, lower0, lower1]`.
//!
//! `beta = gamma^0 = diag(1, 1, -1, -1)` and `alpha_k = [[0, sigma_k], [sigma_k, 0]]`.

use crate::scalar::{Complex, Real};

pub type Spinor<T> = [Complex<T>; 4];

#[inline]
fn mi<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(z.im, -z.re)
}

#[inline]
fn pi<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(-z.im, z.re)
}

#[inline]
pub fn beta<T: Real>(v: &Spinor<T>) -> Spinor<T> {
    [v[0], v[1], -v[2], -v[3]]
}

#[inline]
pub fn alpha_x<T: Real>(v: &Spinor<T>) -> Spinor<T> {
    [v[3], v[2], v[1], v[0]]
}

#[inline]
pub fn alpha_y<T: Real>(v: &Spinor<T>) -> Spinor<T> {
    [mi(v[3]), pi(v[2]), mi(v[1]), pi(v[0])]
}

#[inline]
pub fn alpha_z<T: Real>(v: &Spinor<T>) -> Spinor<T> {
    [v[2], -v[3], v[0], -v[1]]
}

/// `alpha_k v` for `k` in 0..3 (x, y, z).
#[inline]
pub fn alpha<T: Real>(k: usize, v: &Spinor<T>) -> Spinor<T> {
    match k {
        0 => alpha_x(v),
        1 => alpha_y(v),
        2 => alpha_z(v),
        _ => panic!("alpha index {k} out of range"),
    }
}

/// `gamma^0 gamma^mu A_mu` acting on `v`, i.e. `(A^0 - alpha . A) v` for a
/// contravariant four-potential `a = [A^0, A^x, A^y, A^z]`.
#[inline]
pub fn minimal_coupling<T: Real>(a: &[T; 4], v: &Spinor<T>) -> Spinor<T> {
    let ax = alpha_x(v);
    let ay = alpha_y(v);
    let az = alpha_z(v);
    let mut out = [Complex::new(T::zero(), T::zero()); 4];
    for c in 0..4 {
        out[c] = v[c] * a[0] - ax[c] * a[1] - ay[c] * a[2] - az[c] * a[3];
    }
    out
}

/// `u^dagger v`.
#[inline]
pub fn dagger_dot<T: Real>(u: &Spinor<T>, v: &Spinor<T>) -> Complex<T> {
    u[0].conj() * v[0] + u[1].conj() * v[1] + u[2].conj() * v[2] + u[3].conj() * v[3]
}

#[inline]
pub fn norm_sqr<T: Real>(u: &Spinor<T>) -> T {
    u[0].norm_sqr() + u[1].norm_sqr() + u[2].norm_sqr() + u[3].norm_sqr()
}
