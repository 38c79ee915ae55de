//! Uniform transverse grids, sampled spinor fields and finite-difference
//! stencils.

use crate::dirac::{self, Spinor};
use crate::error::{Error, Result};
use crate::scalar::{czero, from_usize, lit, to_f64, Complex, Real};

/// Square grid on `[-L, L]^2` with `N` cell-centred nodes per axis.
///
/// Node `(ix, iy)` sits at `x = -L + (ix + 1/2) h`, `h = 2L / N`, and is stored
/// at flat index `iy * N + ix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseGrid<T> {
    extent: T,
    points: usize,
}

impl<T: Real> TransverseGrid<T> {
    pub fn new(extent: T, points: usize) -> Result<Self> {
        if !(extent > T::zero()) || !extent.is_finite() {
            return Err(Error::invalid("extent", "grid extent must be positive and finite"));
        }
        if points < 16 || points % 2 != 0 {
            return Err(Error::invalid(
                "points",
                format!("points per axis must be even and at least 16, got {points}"),
            ));
        }
        Ok(Self { extent, points })
    }

    pub fn extent(&self) -> T {
        self.extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> T {
        (self.extent + self.extent) / from_usize(self.points)
    }

    /// Quadrature weight of a single node, `h^2`.
    pub fn cell_area(&self) -> T {
        let h = self.spacing();
        h * h
    }

    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coordinate(&self, i: usize) -> T {
        -self.extent + (from_usize::<T>(i) + lit(0.5)) * self.spacing()
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.points + ix
    }

    pub fn position(&self, flat: usize) -> (T, T) {
        let ix = flat % self.points;
        let iy = flat / self.points;
        (self.coordinate(ix), self.coordinate(iy))
    }

    pub fn positions(&self) -> impl Iterator<Item = (T, T)> + '_ {
        (0..self.len()).map(move |k| self.position(k))
    }

    /// Requires `L >= 6 / sqrt(H)` so bound orbitals have decayed at the edge.
    pub fn check_magnetic_extent(&self, field: T) -> Result<()> {
        let lb = T::one() / field.sqrt();
        if self.extent < lit::<T>(6.0) * lb {
            return Err(Error::GridTooSmall(format!(
                "extent {} is below 6 magnetic lengths ({})",
                to_f64(self.extent),
                to_f64(lit::<T>(6.0) * lb)
            )));
        }
        Ok(())
    }

    /// Outermost ring of nodes with outward unit normals; each entry is
    /// `(flat index, [n_x, n_y])`. Corner nodes appear once per edge.
    pub fn boundary(&self) -> Vec<(usize, [T; 2])> {
        let n = self.points;
        let mut out = Vec::with_capacity(4 * n);
        for i in 0..n {
            out.push((self.index(0, i), [-T::one(), T::zero()]));
            out.push((self.index(n - 1, i), [T::one(), T::zero()]));
            out.push((self.index(i, 0), [T::zero(), -T::one()]));
            out.push((self.index(i, n - 1), [T::zero(), T::one()]));
        }
        out
    }

    pub fn is_boundary(&self, flat: usize) -> bool {
        let n = self.points;
        let ix = flat % n;
        let iy = flat / n;
        ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1
    }
}

/// Centred finite-difference stencil for first derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    Central2,
    #[default]
    Central4,
}

impl Stencil {
    pub fn order(&self) -> u32 {
        match self {
            Stencil::Central2 => 2,
            Stencil::Central4 => 4,
        }
    }

    pub fn radius(&self) -> usize {
        match self {
            Stencil::Central2 => 1,
            Stencil::Central4 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// First derivative of a scalar grid field along `axis`. Values outside the
/// grid are taken as zero, which is exact to the decay level of bound states.
pub fn derivative<T: Real>(
    grid: &TransverseGrid<T>,
    values: &[Complex<T>],
    axis: Axis,
    stencil: Stencil,
) -> Vec<Complex<T>> {
    let n = grid.points() as isize;
    let h = grid.spacing();
    let at = |ix: isize, iy: isize| -> Complex<T> {
        if ix < 0 || iy < 0 || ix >= n || iy >= n {
            czero()
        } else {
            values[(iy * n + ix) as usize]
        }
    };
    let (dx, dy) = match axis {
        Axis::X => (1, 0),
        Axis::Y => (0, 1),
    };
    let mut out = vec![czero(); values.len()];
    for iy in 0..n {
        for ix in 0..n {
            let f = |s: isize| at(ix + s * dx, iy + s * dy);
            let d = match stencil {
                Stencil::Central2 => (f(1) - f(-1)) / (h + h),
                Stencil::Central4 => (f(-2) - f(2) + (f(1) - f(-1)) * lit::<T>(8.0)) / (lit::<T>(12.0) * h),
            };
            out[(iy * n + ix) as usize] = d;
        }
    }
    out
}

/// Four-component spinor samples on a transverse grid with a longitudinal
/// plane-wave factor `exp(i kz z)` carried analytically.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField<T: Real> {
    grid: TransverseGrid<T>,
    kz: T,
    data: Vec<Spinor<T>>,
}

impl<T: Real> SpinorField<T> {
    pub fn zeros(grid: TransverseGrid<T>, kz: T) -> Self {
        Self {
            grid,
            kz,
            data: vec![[czero(); 4]; grid.len()],
        }
    }

    pub fn from_data(grid: TransverseGrid<T>, kz: T, data: Vec<Spinor<T>>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} nodes",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, kz, data })
    }

    pub fn from_fn(grid: TransverseGrid<T>, kz: T, f: impl Fn(T, T) -> Spinor<T>) -> Self {
        let data = grid.positions().map(|(x, y)| f(x, y)).collect();
        Self { grid, kz, data }
    }

    pub fn grid(&self) -> &TransverseGrid<T> {
        &self.grid
    }

    pub fn kz(&self) -> T {
        self.kz
    }

    pub fn data(&self) -> &[Spinor<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Spinor<T>] {
        &mut self.data
    }

    /// Scalar grid field of one spinor component.
    pub fn component(&self, c: usize) -> Vec<Complex<T>> {
        self.data.iter().map(|s| s[c]).collect()
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        if self.kz != other.kz {
            return Err(Error::GridMismatch(format!(
                "longitudinal momenta differ ({} vs {})",
                to_f64(self.kz),
                to_f64(other.kz)
            )));
        }
        Ok(())
    }

    /// Dirac inner product `sum psi^dagger phi h^2`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_compatible(other)?;
        let mut acc = czero();
        for (u, v) in self.data.iter().zip(&other.data) {
            acc += dirac::dagger_dot(u, v);
        }
        Ok(acc * self.grid.cell_area())
    }

    pub fn norm_sqr(&self) -> T {
        let mut acc = T::zero();
        for u in &self.data {
            acc += dirac::norm_sqr(u);
        }
        acc * self.grid.cell_area()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, s: Complex<T>) {
        for u in &mut self.data {
            for c in u.iter_mut() {
                *c *= s;
            }
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: Complex<T>, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        for (u, v) in self.data.iter_mut().zip(&other.data) {
            for c in 0..4 {
                u[c] += v[c] * a;
            }
        }
        Ok(())
    }

    /// Largest pointwise spinor magnitude over the ring of boundary nodes and
    /// over the whole grid.
    pub fn boundary_and_peak(&self) -> (T, T) {
        let mut peak = T::zero();
        let mut edge = T::zero();
        for (k, u) in self.data.iter().enumerate() {
            let a = dirac::norm_sqr(u).sqrt();
            if a > peak {
                peak = a;
            }
            if self.grid.is_boundary(k) && a > edge {
                edge = a;
            }
        }
        (edge, peak)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(TransverseGrid::new(8.0, 15).is_err());
        assert!(TransverseGrid::new(8.0, 14).is_err());
        assert!(TransverseGrid::new(-1.0, 32).is_err());
        let g = TransverseGrid::new(8.0, 32).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.coordinate(0), -7.75);
        assert_eq!(g.coordinate(31), 7.75);
        assert!(g.check_magnetic_extent(1.0).is_ok());
        assert!(matches!(g.check_magnetic_extent(0.25), Err(Error::GridTooSmall(_))));
    }

    #[test]
    fn boundary_ring_has_four_edges() {
        let g = TransverseGrid::new(8.0, 16).unwrap();
        let b = g.boundary();
        assert_eq!(b.len(), 64);
        assert!(b.iter().all(|(k, _)| g.is_boundary(*k)));
    }

    #[test]
    fn stencils_converge_at_nominal_order() {
        // derivative of a Gaussian, error measured in the max norm
        let err = |n: usize, st: Stencil| {
            let g = TransverseGrid::<f64>::new(8.0, n).unwrap();
            let f: Vec<Complex<f64>> = g
                .positions()
                .map(|(x, y)| Complex::new((-(x * x + y * y) / 2.0).exp() * x.cos(), 0.0))
                .collect();
            let d = derivative(&g, &f, Axis::X, st);
            g.positions()
                .zip(&d)
                .map(|((x, y), v)| {
                    let e = (-(x * x + y * y) / 2.0).exp();
                    let exact = -x * e * x.cos() - e * x.sin();
                    (v.re - exact).abs()
                })
                .fold(0.0, f64::max)
        };
        for st in [Stencil::Central2, Stencil::Central4] {
            let p = (err(128, st) / err(256, st)).log2();
            assert!((p - st.order() as f64).abs() < 0.1, "{st:?}: order {p}");
        }
    }
}
