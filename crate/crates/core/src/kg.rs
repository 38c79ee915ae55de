//! One-dimensional Klein-Gordon toy on a periodic grid.
//!
//! The field obeys `(D_0^2 - d_x^2 + m^2) phi = 0` with `D_0 = d_t + i eps A(x)`
//! for a static scalar potential `A`, reduced to first order in the state
//! `(phi, pi = d_t phi)`:
//!
//! ```text
//! d_t phi = pi
//! d_t pi  = d_x^2 phi - m^2 phi + eps^2 A^2 phi - 2 i eps A pi
//! ```
//!
//! Time stepping is an integrating-factor (Lawson) RK4 scheme: free
//! evolution is applied exactly per Fourier mode and RK4 handles the
//! potential terms, so the unperturbed flow is exact. The
//! inner product is the indefinite form `i h sum (phi_1^* pi_2 - pi_1^* phi_2)`,
//! conserved at `eps = 0`. The propagator is the forward initial-value kernel.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{cabs, cis, creal, czero, from_i64, from_usize, lit, times_i, to_f64, Complex, Real};

/// RK4 is stable for `rate * dt <= 2 sqrt(2)` on an imaginary spectrum.
pub const RK4_STABILITY: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Default step as a fraction of `1 / omega_max`.
pub const DEFAULT_STEP_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KgGrid<T> {
    length: T,
    points: usize,
}

impl<T: Real> KgGrid<T> {
    /// Periodic grid of `points` nodes on `[-length/2, length/2)`.
    pub fn new(length: T, points: usize) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::invalid("length", "must be positive and finite"));
        }
        if points < 8 || points % 2 != 0 {
            return Err(Error::invalid("points", "need an even count of at least 8"));
        }
        Ok(Self { length, points })
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> T {
        self.length / from_usize(self.points)
    }

    pub fn coordinate(&self, i: usize) -> T {
        -self.length / lit(2.0) + from_usize::<T>(i) * self.spacing()
    }

    /// Signed mode index of FFT bin `j`.
    pub fn mode_index(&self, j: usize) -> i64 {
        let n = self.points as i64;
        let j = j as i64;
        if j <= n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn wavenumber(&self, j: usize) -> T {
        from_i64::<T>(self.mode_index(j)) * T::two_pi() / self.length
    }

    pub fn max_wavenumber(&self) -> T {
        T::pi() / self.spacing()
    }
}

/// Static scalar potential `A(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarProfile<T> {
    Zero,
    Constant { value: T },
    Gaussian { amplitude: T, width: T, center: T },
    Tabulated(Vec<T>),
}

impl<T: Real> ScalarProfile<T> {
    pub fn samples(&self, grid: &KgGrid<T>) -> Result<Vec<T>> {
        let n = grid.points();
        let xs = (0..n).map(|i| grid.coordinate(i));
        let out: Vec<T> = match self {
            ScalarProfile::Zero => vec![T::zero(); n],
            ScalarProfile::Constant { value } => vec![*value; n],
            ScalarProfile::Gaussian {
                amplitude,
                width,
                center,
            } => {
                if !(*width > T::zero()) {
                    return Err(Error::invalid("width", "must be positive"));
                }
                xs.map(|x| {
                    let d = x - *center;
                    *amplitude * (-d * d / (lit::<T>(2.0) * *width * *width)).exp()
                })
                .collect()
            }
            ScalarProfile::Tabulated(v) => {
                if v.len() != n {
                    return Err(Error::GridMismatch(format!(
                        "{} potential samples for {} nodes",
                        v.len(),
                        n
                    )));
                }
                v.clone()
            }
        };
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("profile", "potential must be bounded"));
        }
        Ok(out)
    }
}

/// Field and its time derivative on the periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KgState<T> {
    pub grid: KgGrid<T>,
    pub phi: Vec<Complex<T>>,
    pub pi: Vec<Complex<T>>,
}

impl<T: Real> KgState<T> {
    pub fn new(grid: KgGrid<T>, phi: Vec<Complex<T>>, pi: Vec<Complex<T>>) -> Result<Self> {
        if phi.len() != grid.points() || pi.len() != grid.points() {
            return Err(Error::GridMismatch("state length differs from the grid".into()));
        }
        Ok(Self { grid, phi, pi })
    }

    /// Unit-norm plane wave `exp(i k x)` with `k = 2 pi mode / length`,
    /// positive or negative frequency.
    pub fn plane_wave(grid: KgGrid<T>, mode: i64, mass: T, positive: bool) -> Self {
        let k = from_i64::<T>(mode) * T::two_pi() / grid.length();
        let omega = (k * k + mass * mass).sqrt();
        let amp = T::one() / (lit::<T>(2.0) * omega * grid.length()).sqrt();
        let phi: Vec<_> = (0..grid.points()).map(|i| cis(k * grid.coordinate(i)) * amp).collect();
        let sign = if positive { -T::one() } else { T::one() };
        let pi = phi.iter().map(|z| times_i(*z) * (sign * omega)).collect();
        Self { grid, phi, pi }
    }

    /// Positive-frequency data `pi = -i omega(-i d_x) phi`, scaled to unit norm.
    pub fn positive_frequency(grid: KgGrid<T>, mass: T, phi: Vec<Complex<T>>) -> Result<Self> {
        if phi.len() != grid.points() {
            return Err(Error::GridMismatch("field length differs from the grid".into()));
        }
        let spec = Spectral::new(grid);
        let pi: Vec<_> = spec
            .omega(&phi, mass)
            .into_iter()
            .map(|z| times_i(z) * -T::one())
            .collect();
        let mut s = Self { grid, phi, pi };
        let norm = kg_inner(&s, &s)?.re;
        if !(norm > T::zero()) {
            return Err(Error::invalid("phi", "field has no positive-frequency content"));
        }
        let scale = T::one() / norm.sqrt();
        s.phi.iter_mut().chain(s.pi.iter_mut()).for_each(|z| *z *= scale);
        Ok(s)
    }

    /// Positive-frequency Gaussian packet with carrier wavenumber `k0`.
    pub fn gaussian_packet(grid: KgGrid<T>, mass: T, center: T, width: T, k0: T) -> Result<Self> {
        let phi = (0..grid.points())
            .map(|i| {
                let d = grid.coordinate(i) - center;
                cis(k0 * d) * (-d * d / (lit::<T>(4.0) * width * width)).exp()
            })
            .collect();
        Self::positive_frequency(grid, mass, phi)
    }

    fn flat(&self) -> Vec<Complex<T>> {
        self.phi.iter().chain(&self.pi).copied().collect()
    }

    fn from_flat(grid: KgGrid<T>, v: &[Complex<T>]) -> Self {
        let n = grid.points();
        Self {
            grid,
            phi: v[..n].to_vec(),
            pi: v[n..].to_vec(),
        }
    }
}

/// `i h sum (a.phi^* b.pi - a.pi^* b.phi)`.
pub fn kg_inner<T: Real>(a: &KgState<T>, b: &KgState<T>) -> Result<Complex<T>> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch("states live on different grids".into()));
    }
    let mut acc = czero();
    for i in 0..a.grid.points() {
        acc += a.phi[i].conj() * b.pi[i] - a.pi[i].conj() * b.phi[i];
    }
    Ok(times_i(acc) * a.grid.spacing())
}

#[derive(Clone)]
struct Spectral<T: Real> {
    grid: KgGrid<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Spectral<T> {
    fn new(grid: KgGrid<T>) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.points()),
            inverse: planner.plan_fft_inverse(grid.points()),
        }
    }

    fn multiply(&self, v: &[Complex<T>], symbol: impl Fn(T) -> T) -> Vec<Complex<T>> {
        let mut buf = v.to_vec();
        self.forward.process(&mut buf);
        let inv_n = T::one() / from_usize(self.grid.points());
        for (j, z) in buf.iter_mut().enumerate() {
            *z *= symbol(self.grid.wavenumber(j)) * inv_n;
        }
        self.inverse.process(&mut buf);
        buf
    }

    /// Unnormalized forward transform.
    fn forward(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = v.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform including the `1 / N` factor.
    fn inverse(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = v.to_vec();
        self.inverse.process(&mut buf);
        let inv_n = T::one() / from_usize(self.grid.points());
        buf.iter_mut().for_each(|z| *z *= inv_n);
        buf
    }

    fn omega(&self, v: &[Complex<T>], mass: T) -> Vec<Complex<T>> {
        self.multiply(v, |k| (k * k + mass * mass).sqrt())
    }
}

impl<T: Real> std::fmt::Debug for Spectral<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

/// Exact free evolution over a fixed time, per Fourier mode:
/// `(Phi, Pi) -> (c Phi + s Pi / w, -w s Phi + c Pi)`.
struct FreeRotation<T> {
    cos: Vec<T>,
    sin: Vec<T>,
    omega: Vec<T>,
}

impl<T: Real> FreeRotation<T> {
    fn new(system: &KgSystem<T>, tau: T) -> Self {
        let n = system.grid.points();
        let omega: Vec<T> = (0..n)
            .map(|j| {
                let k = system.grid.wavenumber(j);
                (k * k + system.mass * system.mass).sqrt()
            })
            .collect();
        Self {
            cos: omega.iter().map(|w| (*w * tau).cos()).collect(),
            sin: omega.iter().map(|w| (*w * tau).sin()).collect(),
            omega,
        }
    }

    fn apply(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.omega.len();
        let mut out = vec![czero(); 2 * n];
        for j in 0..n {
            let (c, s, w) = (self.cos[j], self.sin[j], self.omega[j]);
            out[j] = u[j] * c + u[n + j] * (s / w);
            out[n + j] = u[j] * (-w * s) + u[n + j] * c;
        }
        out
    }
}

/// Grid, mass, perturbation strength and potential, with the time stepper.
#[derive(Debug, Clone)]
pub struct KgSystem<T: Real> {
    grid: KgGrid<T>,
    mass: T,
    epsilon: T,
    potential: Vec<T>,
    step: Option<T>,
    spectral: Spectral<T>,
}

impl<T: Real> KgSystem<T> {
    pub fn new(grid: KgGrid<T>, mass: T, epsilon: T, profile: &ScalarProfile<T>) -> Result<Self> {
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::invalid("mass", "must be positive and finite"));
        }
        if !epsilon.is_finite() {
            return Err(Error::invalid("epsilon", "must be finite"));
        }
        Ok(Self {
            grid,
            mass,
            epsilon,
            potential: profile.samples(&grid)?,
            step: None,
            spectral: Spectral::new(grid),
        })
    }

    /// Fix the integration step instead of deriving it from `omega_max`.
    pub fn with_step(mut self, dt: T) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        self.step = Some(dt);
        Ok(self)
    }

    pub fn with_epsilon(&self, epsilon: T) -> Self {
        let mut s = self.clone();
        s.epsilon = epsilon;
        s
    }

    pub fn grid(&self) -> &KgGrid<T> {
        &self.grid
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// Upper bound on the magnitude of the generator's eigenfrequencies.
    pub fn max_frequency(&self) -> T {
        let k = self.grid.max_wavenumber();
        (k * k + self.mass * self.mass).sqrt() + self.potential_rate() / lit(2.0)
    }

    /// Largest rate `2 |eps| max |A|` of the potential terms, the part of the
    /// generator that is stepped with RK4.
    pub fn potential_rate(&self) -> T {
        let a = self.potential.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        lit::<T>(2.0) * self.epsilon.abs() * a
    }

    /// Largest stable step; unbounded when the potential terms vanish.
    pub fn stability_bound(&self) -> T {
        let r = self.potential_rate();
        if r > T::zero() {
            lit::<T>(RK4_STABILITY) / r
        } else {
            lit(f64::INFINITY)
        }
    }

    /// Requested step, or the default fraction of `1 / omega_max`.
    pub fn step(&self) -> T {
        self.step
            .unwrap_or_else(|| lit::<T>(DEFAULT_STEP_FRACTION) / self.max_frequency())
    }

    fn is_free(&self) -> bool {
        self.epsilon == T::zero() || self.potential.iter().all(|a| *a == T::zero())
    }

    /// Potential terms `(0, eps^2 A^2 phi - 2 i eps A pi)` in Fourier space.
    fn potential_terms(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.grid.points();
        let phi = self.spectral.inverse(&u[..n]);
        let pi = self.spectral.inverse(&u[n..]);
        let two: T = lit(2.0);
        let g: Vec<Complex<T>> = (0..n)
            .map(|i| {
                let ea = self.epsilon * self.potential[i];
                phi[i] * (ea * ea) - times_i(pi[i]) * (two * ea)
            })
            .collect();
        let mut out = vec![czero(); n];
        out.extend(self.spectral.forward(&g));
        out
    }

    /// Integrating-factor RK4 step of length `h` on Fourier-space data.
    fn lawson_step(&self, u: &mut [Complex<T>], h: T, half: &FreeRotation<T>, full: &FreeRotation<T>) {
        let hh = h / lit(2.0);
        let axpy = |x: &[Complex<T>], k: &[Complex<T>], a: T| -> Vec<Complex<T>> {
            x.iter().zip(k).map(|(x, k)| *x + *k * a).collect()
        };
        let k1 = self.potential_terms(u);
        let k2 = self.potential_terms(&half.apply(&axpy(u, &k1, hh)));
        let eu = half.apply(u);
        let k3 = self.potential_terms(&axpy(&eu, &k2, hh));
        let e_full = half.apply(&eu);
        let k4 = self.potential_terms(&axpy(&e_full, &half.apply(&k3), h));
        let mid: Vec<Complex<T>> = k2.iter().zip(&k3).map(|(a, b)| *a + *b).collect();
        let r1 = full.apply(&k1);
        let r23 = half.apply(&mid);
        let w: T = h / lit(6.0);
        for i in 0..u.len() {
            u[i] = e_full[i] + (r1[i] + r23[i] * lit::<T>(2.0) + k4[i]) * w;
        }
    }

    /// Step count and step size covering `[0, t]`.
    fn schedule(&self, t: T) -> Result<(usize, T)> {
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(Error::invalid("t", "must be non-negative and finite"));
        }
        let req = self.step();
        let bound = self.stability_bound();
        if req > bound {
            return Err(Error::StabilityViolation {
                dt: to_f64(req),
                bound: to_f64(bound),
            });
        }
        if t == T::zero() {
            return Ok((0, T::zero()));
        }
        let steps = (to_f64(t / req)).ceil().max(1.0) as usize;
        Ok((steps, t / from_usize(steps)))
    }

    fn advance(&self, v: &mut [Complex<T>], t: T) -> Result<()> {
        let (steps, dt) = self.schedule(t)?;
        if steps == 0 {
            return Ok(());
        }
        let n = self.grid.points();
        let mut u = self.spectral.forward(&v[..n]);
        u.extend(self.spectral.forward(&v[n..]));
        if self.is_free() {
            u = FreeRotation::new(self, t).apply(&u);
        } else {
            let half = FreeRotation::new(self, dt / lit(2.0));
            let full = FreeRotation::new(self, dt);
            for _ in 0..steps {
                self.lawson_step(&mut u, dt, &half, &full);
            }
        }
        v[..n].copy_from_slice(&self.spectral.inverse(&u[..n]));
        v[n..].copy_from_slice(&self.spectral.inverse(&u[n..]));
        Ok(())
    }

    pub fn evolve(&self, state: &KgState<T>, t: T) -> Result<KgState<T>> {
        if state.grid != self.grid {
            return Err(Error::GridMismatch("state and system grids differ".into()));
        }
        let mut v = state.flat();
        self.advance(&mut v, t)?;
        Ok(KgState::from_flat(self.grid, &v))
    }
}

pub fn kg_evolve<T: Real>(system: &KgSystem<T>, state: &KgState<T>, t: T) -> Result<KgState<T>> {
    system.evolve(state, t)
}

/// `f(t) = <phi, t | phi(eps), t>` by evolving with and without the potential.
pub fn kg_fidelity<T: Real>(system: &KgSystem<T>, state: &KgState<T>, t: T) -> Result<Complex<T>> {
    let free = system.with_epsilon(T::zero()).evolve(state, t)?;
    let pert = system.evolve(state, t)?;
    kg_inner(&free, &pert)
}

/// Fidelity at increasing sample times, evolving incrementally.
pub fn kg_fidelity_series<T: Real>(system: &KgSystem<T>, state: &KgState<T>, times: &[T]) -> Result<Vec<Complex<T>>> {
    let free_sys = system.with_epsilon(T::zero());
    let mut free = state.clone();
    let mut pert = state.clone();
    let mut now = T::zero();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < now {
            return Err(Error::invalid("times", "sample times must be increasing"));
        }
        free = free_sys.evolve(&free, t - now)?;
        pert = system.evolve(&pert, t - now)?;
        now = t;
        out.push(kg_inner(&free, &pert)?);
    }
    Ok(out)
}

/// Forward evolution matrix on `(phi, pi)`, `2N x 2N`.
#[derive(Debug, Clone)]
pub struct KgPropagator<T: Real> {
    pub grid: KgGrid<T>,
    pub time: T,
    pub matrix: DMatrix<Complex<T>>,
}

impl<T: Real> KgPropagator<T> {
    /// Assembled by evolving unit columns.
    pub fn assemble(system: &KgSystem<T>, t: T) -> Result<Self> {
        let n2 = 2 * system.grid.points();
        system.schedule(t)?;
        let cols = (0..n2)
            .into_par_iter()
            .map(|c| {
                let mut v = vec![czero(); n2];
                v[c] = creal(T::one());
                system.advance(&mut v, t)?;
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: system.grid,
            time: t,
            matrix: DMatrix::from_vec(n2, n2, cols.into_iter().flatten().collect()),
        })
    }

    /// `max |P^dagger K P - K|` for the matrix `K` of the KG form.
    pub fn form_defect(&self) -> T {
        let n = self.grid.points();
        let h = self.grid.spacing();
        let mut k = DMatrix::from_element(2 * n, 2 * n, czero());
        for i in 0..n {
            k[(i, n + i)] = Complex::new(T::zero(), h);
            k[(n + i, i)] = Complex::new(T::zero(), -h);
        }
        let d = self.matrix.adjoint() * &k * &self.matrix - &k;
        d.iter().fold(T::zero(), |a, z| a.max(cabs(*z))) / h
    }
}

/// Default ceiling for KG kernel assembly (bytes).
pub const DEFAULT_KG_CEILING: usize = 256 << 20;

/// Bilinear echo kernel `M(x, x')` contracted against positive-frequency
/// initial data as `f = h^2 sum phi_0^*(x) M(x, x') phi_0(x')`.
#[derive(Debug, Clone)]
pub struct KgEchoKernel<T: Real> {
    pub grid: KgGrid<T>,
    pub time: T,
    pub matrix: DMatrix<Complex<T>>,
}

impl<T: Real> KgEchoKernel<T> {
    pub fn contract(&self, state: &KgState<T>) -> Result<Complex<T>> {
        if state.grid != self.grid {
            return Err(Error::GridMismatch("state and kernel grids differ".into()));
        }
        let n = self.grid.points();
        let phi = nalgebra::DVector::from_column_slice(&state.phi);
        debug_assert_eq!(phi.len(), n);
        let h = self.grid.spacing();
        Ok(phi.dotc(&(&self.matrix * &phi)) * (h * h))
    }
}

/// Kernel from the propagators with and without the perturbation.
///
/// With `Delta(x, x') = G(x, x') / h`, where `G = P_phiphi - i P_phipi Omega`
/// maps positive-frequency initial data to the field at time `t`, and
/// `d_t Delta` read off the `pi` rows of the same propagator,
/// `M(x, x') = i h sum_x'' [Delta_0^*(x'', x) d_t Delta_eps(x'', x')
/// - d_t Delta_0^*(x'', x) Delta_eps(x'', x')]`.
pub fn kg_echo_kernel<T: Real>(system: &KgSystem<T>, t: T, ceiling_bytes: usize) -> Result<KgEchoKernel<T>> {
    let n = system.grid.points();
    let elem = std::mem::size_of::<Complex<T>>();
    let bytes = (2 * (2 * n) * (2 * n) + 5 * n * n).saturating_mul(elem);
    if bytes > ceiling_bytes {
        return Err(Error::MemoryCeiling {
            bytes,
            ceiling: ceiling_bytes,
        });
    }
    let p_eps = KgPropagator::assemble(system, t)?;
    let p_free = KgPropagator::assemble(&system.with_epsilon(T::zero()), t)?;
    // columns of [I; -i Omega]
    let mut lift = DMatrix::from_element(2 * n, n, czero());
    for c in 0..n {
        let mut e = vec![czero(); n];
        e[c] = creal(T::one());
        let w = system.spectral.omega(&e, system.mass);
        lift[(c, c)] = creal(T::one());
        for r in 0..n {
            lift[(n + r, c)] = times_i(w[r]) * -T::one();
        }
    }
    let h = system.grid.spacing();
    let g_eps = &p_eps.matrix * &lift / creal(h);
    let g_free = &p_free.matrix * &lift / creal(h);
    let (d0, d0_dt) = (g_free.rows(0, n), g_free.rows(n, n));
    let (de, de_dt) = (g_eps.rows(0, n), g_eps.rows(n, n));
    let m = (d0.ad_mul(&de_dt) - d0_dt.ad_mul(&de)) * Complex::new(T::zero(), h);
    Ok(KgEchoKernel {
        grid: system.grid,
        time: t,
        matrix: m,
    })
}

/// Free plane-wave check of the boost relation. In the rest frame a mode of
/// mass `m` sits in a constant potential `A^0 = a`; its fidelity amplitude
/// relative to the unperturbed mode is `exp(-i eps a t')`.
pub fn rest_mode_fidelity<T: Real>(epsilon: T, a: T, t_rest: T) -> Complex<T> {
    cis(-epsilon * a * t_rest)
}

/// The same mode seen from a frame where it moves with momentum `k`: the
/// potential becomes `(gamma a, gamma v a)`, the perturbed canonical momentum
/// is `gamma v (m + eps a)`, and its energy follows from the lab dispersion
/// `(E - eps A^0)^2 = (p - eps A^x)^2 + m^2`. The amplitude is the ratio of
/// the perturbed and unperturbed modes along the worldline `x = v t`.
pub fn lab_mode_fidelity<T: Real>(epsilon: T, a: T, k: T, m: T, t_lab: T) -> Result<Complex<T>> {
    let v = crate::perturbative::boost_velocity(k, m)?;
    let gamma = crate::perturbative::lorentz_factor(k, m)?;
    let a0 = gamma * a;
    let ax = gamma * v * a;
    let p0 = gamma * v * m;
    let e0 = (p0 * p0 + m * m).sqrt();
    let pe = gamma * v * (m + epsilon * a);
    let kin = pe - epsilon * ax;
    let ee = epsilon * a0 + (kin * kin + m * m).sqrt();
    let x = v * t_lab;
    Ok(cis(-((ee - e0) * t_lab - (pe - p0) * x)))
}
