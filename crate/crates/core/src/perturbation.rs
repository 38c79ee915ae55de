//! Static, z-independent perturbing four-potentials `A^mu(x, y)`.
//!
//! Components are contravariant, `[A^0, A^x, A^y, A^z]`. They enter the Dirac
//! Hamiltonian as `epsilon (A^0 - alpha . A)`, i.e. `gamma^0 gamma^mu A_mu`.

use crate::error::{Error, Result};
use crate::grid::TransverseGrid;
use crate::perturbative::boost_velocity;
use crate::scalar::{lit, to_f64, Real};

/// Minimum number of grid spacings across the finest perturbation feature.
pub const MIN_POINTS_PER_FEATURE: f64 = 8.0;

/// Potential tabulated on the nodes of a specific grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPotential<T> {
    pub grid: TransverseGrid<T>,
    pub components: [Vec<T>; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile<T> {
    Zero,
    /// `A^0 = value` everywhere.
    ConstantScalar {
        value: T,
    },
    /// `A^0 = amplitude exp(-|r - center|^2 / (2 width^2))`.
    GaussianScalar {
        amplitude: T,
        width: T,
        center: [T; 2],
    },
    /// `A = (strength / 2) g(r') (-y', x', 0)` with the same Gaussian envelope
    /// `g`, giving a localized field `B_z = strength g (1 - r'^2 / (2 width^2))`.
    GaussianVector {
        strength: T,
        width: T,
        center: [T; 2],
    },
    Tabulated(TabulatedPotential<T>),
}

/// Frame in which the profile is specified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// The lab frame, where the background field and the time coordinate live.
    #[default]
    Lab,
    /// Rest frame of the longitudinal motion; lab components follow from a
    /// z-boost with velocity `v(kz)`.
    Comoving,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationField<T> {
    pub profile: Profile<T>,
    pub epsilon: T,
    pub frame: Frame,
}

/// Lab-frame potential sampled on grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSamples<T> {
    pub grid: TransverseGrid<T>,
    pub components: [Vec<T>; 4],
}

impl<T: Real> PotentialSamples<T> {
    #[inline]
    pub fn at(&self, k: usize) -> [T; 4] {
        [
            self.components[0][k],
            self.components[1][k],
            self.components[2][k],
            self.components[3][k],
        ]
    }
}

fn gaussian<T: Real>(width: T, center: [T; 2], x: T, y: T) -> (T, T, T) {
    let dx = x - center[0];
    let dy = y - center[1];
    let g = (-(dx * dx + dy * dy) / (lit::<T>(2.0) * width * width)).exp();
    (g, dx, dy)
}

impl<T: Real> PerturbationField<T> {
    pub fn new(profile: Profile<T>, epsilon: T) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::invalid("epsilon", "must be finite"));
        }
        match &profile {
            Profile::GaussianScalar {
                width,
                amplitude,
                center,
            }
            | Profile::GaussianVector {
                width,
                strength: amplitude,
                center,
            } => {
                if !(*width > T::zero()) || !width.is_finite() {
                    return Err(Error::invalid("width", "must be positive and finite"));
                }
                if !amplitude.is_finite() || !center[0].is_finite() || !center[1].is_finite() {
                    return Err(Error::invalid("profile", "parameters must be finite"));
                }
            }
            Profile::ConstantScalar { value } if !value.is_finite() => {
                return Err(Error::invalid("value", "must be finite"));
            }
            Profile::Tabulated(t) => {
                if t.components.iter().any(|c| c.len() != t.grid.len()) {
                    return Err(Error::GridMismatch(
                        "tabulated components must have one value per node".into(),
                    ));
                }
                if t.components.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("tabulated", "components must be bounded"));
                }
            }
            _ => {}
        }
        Ok(Self {
            profile,
            epsilon,
            frame: Frame::Lab,
        })
    }

    pub fn zero() -> Self {
        Self {
            profile: Profile::Zero,
            epsilon: T::zero(),
            frame: Frame::Lab,
        }
    }

    pub fn in_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// Profile value in its own frame at a point. Tabulated profiles have no
    /// off-grid values and return `None`.
    pub fn profile_at(&self, x: T, y: T) -> Option<[T; 4]> {
        let z = T::zero();
        Some(match &self.profile {
            Profile::Zero => [z; 4],
            Profile::ConstantScalar { value } => [*value, z, z, z],
            Profile::GaussianScalar {
                amplitude,
                width,
                center,
            } => {
                let (g, _, _) = gaussian(*width, *center, x, y);
                [*amplitude * g, z, z, z]
            }
            Profile::GaussianVector {
                strength,
                width,
                center,
            } => {
                let (g, dx, dy) = gaussian(*width, *center, x, y);
                let s = *strength * g / lit(2.0);
                [z, -s * dy, s * dx, z]
            }
            Profile::Tabulated(_) => return None,
        })
    }

    fn sample_profile(&self, grid: &TransverseGrid<T>) -> Result<[Vec<T>; 4]> {
        if let Profile::Tabulated(t) = &self.profile {
            if &t.grid != grid {
                return Err(Error::GridMismatch(
                    "tabulated potential lives on a different grid".into(),
                ));
            }
            return Ok(t.components.clone());
        }
        let mut out: [Vec<T>; 4] = Default::default();
        for c in out.iter_mut() {
            c.reserve(grid.len());
        }
        for (x, y) in grid.positions() {
            let a = self.profile_at(x, y).expect("analytic profile");
            for c in 0..4 {
                out[c].push(a[c]);
            }
        }
        Ok(out)
    }

    /// Lab-frame components on the grid nodes, for a particle of the given
    /// mass and longitudinal momentum.
    pub fn lab_samples(&self, grid: &TransverseGrid<T>, mass: T, kz: T) -> Result<PotentialSamples<T>> {
        let mut comps = self.sample_profile(grid)?;
        if self.frame == Frame::Comoving {
            let v = boost_velocity(kz, mass)?;
            let gamma = T::one() / (T::one() - v * v).sqrt();
            for k in 0..grid.len() {
                let a0 = comps[0][k];
                let az = comps[3][k];
                comps[0][k] = gamma * (a0 + v * az);
                comps[3][k] = gamma * (az + v * a0);
            }
        }
        Ok(PotentialSamples {
            grid: *grid,
            components: comps,
        })
    }

    /// Finest length scale of the profile (Gaussian FWHM), if any.
    pub fn length_scale(&self) -> Option<T> {
        match &self.profile {
            Profile::GaussianScalar { width, .. } | Profile::GaussianVector { width, .. } => {
                Some(*width * lit(2.0 * (2.0 * std::f64::consts::LN_2).sqrt()))
            }
            _ => None,
        }
    }

    /// Requires at least [`MIN_POINTS_PER_FEATURE`] grid spacings across the
    /// finest feature.
    pub fn check_resolution(&self, grid: &TransverseGrid<T>) -> Result<()> {
        if let Some(scale) = self.length_scale() {
            let pts = scale / grid.spacing();
            if pts < lit(MIN_POINTS_PER_FEATURE) {
                return Err(Error::GridTooCoarse(format!(
                    "perturbation scale {} spans {:.2} grid spacings, need {}",
                    to_f64(scale),
                    to_f64(pts),
                    MIN_POINTS_PER_FEATURE
                )));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        match &self.profile {
            Profile::Zero => true,
            Profile::ConstantScalar { value } => *value == T::zero(),
            Profile::GaussianScalar { amplitude, .. } => *amplitude == T::zero(),
            Profile::GaussianVector { strength, .. } => *strength == T::zero(),
            Profile::Tabulated(t) => t.components.iter().flatten().all(|v| *v == T::zero()),
        }
    }
}
