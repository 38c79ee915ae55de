//! Special functions needed by the Landau orbitals.

use crate::scalar::{from_usize, Real};

/// Generalized Laguerre polynomial `L_n^alpha(x)` by upward recurrence.
pub fn laguerre<T: Real>(n: usize, alpha: T, x: T) -> T {
    if n == 0 {
        return T::one();
    }
    let mut prev = T::one();
    let mut cur = T::one() + alpha - x;
    for k in 1..n {
        let kf: T = from_usize(k);
        let two_k = kf + kf;
        let next = ((two_k + T::one() + alpha - x) * cur - (kf + alpha) * prev) / (kf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Derivative of `L_n^alpha` with respect to `x`, i.e. `-L_{n-1}^{alpha+1}(x)`.
pub fn laguerre_derivative<T: Real>(n: usize, alpha: T, x: T) -> T {
    if n == 0 {
        T::zero()
    } else {
        -laguerre(n - 1, alpha + T::one(), x)
    }
}

/// `ln(n! / (n + k)!)`.
pub fn ln_factorial_ratio<T: Real>(n: usize, k: usize) -> T {
    let mut acc = T::zero();
    for j in (n + 1)..=(n + k) {
        acc -= from_usize::<T>(j).ln();
    }
    acc
}
