//! Fidelity amplitude `f(t) = <psi, t | psi(eps), t>` by direct overlap, by
//! integrating the transition current, and by the first-order rate equation,
//! together with the continuity-equation diagnostic.
//!
//! The current is `j_mu = bar(psi) gamma_mu psi(eps)` with the unperturbed
//! state as bra, so `j_0 = psi^dagger psi(eps)` integrates to `f` and the
//! spatial vector `J = psi^dagger alpha psi(eps)` satisfies
//! `d_t j_0 + div J = -i eps A^mu j_mu`.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::dirac::{self, Spinor};
use crate::dynamics::{Evolution, HamiltonianModel};
use crate::error::{Error, Result};
use crate::grid::{derivative, Axis, SpinorField, Stencil, TransverseGrid};
use crate::landau::SampledBasis;
use crate::perturbation::PerturbationField;
use crate::scalar::{cabs, creal, czero, from_usize, lit, times_i, to_f64, Complex, Real};

/// Tolerance on the norm of initial states.
pub const NORM_TOL: f64 = 1e-8;

/// Boundary flux above which a scenario is treated as unbound.
pub const BOUNDARY_FLUX_THRESHOLD: f64 = 1e-8;

/// Largest phase advance `step * max|E_i - E_j|` of one rate-equation step.
pub const MAX_PHASE_STEP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Overlap,
    Current,
    Ode,
    Perturbative,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Overlap => "overlap",
            Method::Current => "current",
            Method::Ode => "ode",
            Method::Perturbative => "perturbative",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySeries<T> {
    times: Vec<T>,
    amplitude: Vec<Complex<T>>,
    fidelity: Vec<T>,
    method: Method,
}

impl<T: Real> FidelitySeries<T> {
    pub fn from_parts(times: Vec<T>, amplitude: Vec<Complex<T>>, fidelity: Vec<T>, method: Method) -> Result<Self> {
        if amplitude.len() != times.len() || fidelity.len() != times.len() {
            return Err(Error::invalid(
                "series",
                "times, amplitudes and fidelities must have equal length",
            ));
        }
        Ok(Self {
            times,
            amplitude,
            fidelity,
            method,
        })
    }

    /// Series with `F = |f|^2`.
    pub fn from_amplitudes(times: Vec<T>, amplitude: Vec<Complex<T>>, method: Method) -> Result<Self> {
        let fidelity = amplitude.iter().map(|z| z.norm_sqr()).collect();
        Self::from_parts(times, amplitude, fidelity, method)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn amplitude(&self) -> &[Complex<T>] {
        &self.amplitude
    }

    pub fn fidelity(&self) -> &[T] {
        &self.fidelity
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max(F - 1, 0)` over the series.
    pub fn max_excess(&self) -> T {
        self.fidelity.iter().fold(T::zero(), |a, &f| a.max(f - T::one()))
    }

    /// `max |f_a - f_b|` against another series on the same times.
    pub fn max_amplitude_difference(&self, other: &Self) -> Result<T> {
        if self.times != other.times {
            return Err(Error::invalid("series", "series have different time grids"));
        }
        Ok(self
            .amplitude
            .iter()
            .zip(&other.amplitude)
            .fold(T::zero(), |a, (x, y)| a.max(cabs(*x - *y))))
    }
}

fn check_normalized<T: Real>(state: &DVector<Complex<T>>) -> Result<()> {
    let norm = to_f64(state.norm());
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized {
            norm,
            tolerance: NORM_TOL,
        });
    }
    Ok(())
}

fn check_state<T: Real>(model: &HamiltonianModel<T>, state: &DVector<Complex<T>>) -> Result<()> {
    if state.len() != model.dimension() {
        return Err(Error::invalid(
            "state",
            format!("{} coefficients for a basis of {}", state.len(), model.dimension()),
        ));
    }
    check_normalized(state)
}

/// Unit vector on basis state `i`.
pub fn basis_state<T: Real>(dimension: usize, i: usize) -> DVector<Complex<T>> {
    let mut v = DVector::from_element(dimension, czero());
    v[i] = creal(T::one());
    v
}

/// `f(t) = <U_0 psi | U_eps psi>` in the truncated basis.
pub fn fidelity_overlap<T: Real>(
    model: &HamiltonianModel<T>,
    psi0: &DVector<Complex<T>>,
    times: &[T],
) -> Result<FidelitySeries<T>> {
    check_state(model, psi0)?;
    let amplitude = times
        .par_iter()
        .map(|&t| {
            let a = model.evolve(psi0, t, Evolution::Unperturbed);
            let b = model.evolve(psi0, t, Evolution::Perturbed);
            a.dotc(&b)
        })
        .collect();
    FidelitySeries::from_amplitudes(times.to_vec(), amplitude, Method::Overlap)
}

/// `f(t) = <psi| M_t |psi>` through the echo operator.
pub fn fidelity_echo<T: Real>(
    model: &HamiltonianModel<T>,
    psi0: &DVector<Complex<T>>,
    times: &[T],
) -> Result<FidelitySeries<T>> {
    check_state(model, psi0)?;
    let amplitude = times
        .par_iter()
        .map(|&t| model.echo_operator(t).expectation(psi0))
        .collect();
    FidelitySeries::from_amplitudes(times.to_vec(), amplitude, Method::Overlap)
}

/// Incoherent beam average: `f = sum_n w_n f_n`, `F = sum_n w_n |f_n|^2` for
/// basis states `n`.
pub fn fidelity_ensemble<T: Real>(
    model: &HamiltonianModel<T>,
    members: &[(usize, T)],
    times: &[T],
) -> Result<FidelitySeries<T>> {
    let d = model.dimension();
    let mut amplitude = vec![czero(); times.len()];
    let mut fidelity = vec![T::zero(); times.len()];
    for &(i, w) in members {
        if i >= d {
            return Err(Error::invalid("ensemble", format!("index {i} outside the basis")));
        }
        let s = fidelity_overlap(model, &basis_state(d, i), times)?;
        for k in 0..times.len() {
            amplitude[k] += s.amplitude[k] * w;
            fidelity[k] += s.fidelity[k] * w;
        }
    }
    FidelitySeries::from_parts(times.to_vec(), amplitude, fidelity, Method::Overlap)
}

/// Transition current `j_mu = bar(bra) gamma_mu ket` (lower index) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentField<T: Real> {
    pub grid: TransverseGrid<T>,
    pub components: [Vec<Complex<T>>; 4],
}

impl<T: Real> CurrentField<T> {
    /// `sum j_0 h^2`.
    pub fn total_charge(&self) -> Complex<T> {
        self.components[0].iter().fold(czero(), |a, z| a + *z) * self.grid.cell_area()
    }

    /// Contravariant spatial component `J^k = -j_k`, `k` in 1..=3.
    pub fn spatial(&self, k: usize) -> Vec<Complex<T>> {
        self.components[k].iter().map(|z| -*z).collect()
    }
}

pub fn current<T: Real>(bra: &SpinorField<T>, ket: &SpinorField<T>) -> Result<CurrentField<T>> {
    bra.check_compatible(ket)?;
    let n = bra.grid().len();
    let mut comps: [Vec<Complex<T>>; 4] = Default::default();
    for c in comps.iter_mut() {
        c.reserve(n);
    }
    for (u, v) in bra.data().iter().zip(ket.data()) {
        comps[0].push(dirac::dagger_dot(u, v));
        for k in 1..4 {
            comps[k].push(-dirac::dagger_dot(u, &dirac::alpha(k - 1, v)));
        }
    }
    Ok(CurrentField {
        grid: *bra.grid(),
        components: comps,
    })
}

/// `f(t) = int j_0` with both states reconstructed on the basis grid.
pub fn fidelity_current<T: Real>(
    model: &HamiltonianModel<T>,
    basis: &SampledBasis<T>,
    psi0: &DVector<Complex<T>>,
    times: &[T],
) -> Result<FidelitySeries<T>> {
    check_state(model, psi0)?;
    if basis.dimension() != model.dimension() {
        return Err(Error::GridMismatch("basis and model dimensions differ".into()));
    }
    let amplitude = times
        .par_iter()
        .map(|&t| {
            let bra = basis.superpose(&model.evolve(psi0, t, Evolution::Unperturbed));
            let ket = basis.superpose(&model.evolve(psi0, t, Evolution::Perturbed));
            Ok(current(&bra, &ket)?.total_charge())
        })
        .collect::<Result<Vec<_>>>()?;
    FidelitySeries::from_amplitudes(times.to_vec(), amplitude, Method::Current)
}

/// Unperturbed and perturbed states at one time with their time derivatives.
///
/// The derivatives are spectral: `-i E c` for the unperturbed state, and
/// `-i (E c(eps) + eps V(x) psi(eps)(x))` for the perturbed one, with the
/// potential applied pointwise so that the local balance holds independently
/// of the basis truncation.
#[derive(Debug, Clone)]
pub struct EvolvingPair<T: Real> {
    pub bra: SpinorField<T>,
    pub ket: SpinorField<T>,
    pub bra_dt: SpinorField<T>,
    pub ket_dt: SpinorField<T>,
}

pub fn evolving_pair<T: Real>(
    model: &HamiltonianModel<T>,
    basis: &SampledBasis<T>,
    pert: &PerturbationField<T>,
    psi0: &DVector<Complex<T>>,
    t: T,
) -> Result<EvolvingPair<T>> {
    check_state(model, psi0)?;
    let c0 = model.evolve(psi0, t, Evolution::Unperturbed);
    let ce = model.evolve(psi0, t, Evolution::Perturbed);
    let e = model.energies();
    let rate = |c: &DVector<Complex<T>>| {
        DVector::from_iterator(
            c.len(),
            c.iter().zip(e.iter()).map(|(z, &en)| times_i(*z * en) * -T::one()),
        )
    };
    let bra = basis.superpose(&c0);
    let ket = basis.superpose(&ce);
    let bra_dt = basis.superpose(&rate(&c0));
    let mut ket_dt = basis.superpose(&rate(&ce));
    let p = basis.params();
    let samples = pert.lab_samples(basis.grid(), p.mass, p.kz)?;
    let eps = pert.epsilon;
    for (k, (d, v)) in ket_dt.data_mut().iter_mut().zip(ket.data()).enumerate() {
        let w = dirac::minimal_coupling(&samples.at(k), v);
        for c in 0..4 {
            d[c] -= times_i(w[c] * eps);
        }
    }
    Ok(EvolvingPair {
        bra,
        ket,
        bra_dt,
        ket_dt,
    })
}

/// Pointwise sides of the continuity balance and their difference.
#[derive(Debug, Clone)]
pub struct ContinuityResidual<T: Real> {
    pub grid: TransverseGrid<T>,
    /// `d_t j_0 + div J` with stencil derivatives.
    pub lhs: Vec<Complex<T>>,
    /// `-i eps A^mu j_mu`.
    pub rhs: Vec<Complex<T>>,
}

fn l2<T: Real>(grid: &TransverseGrid<T>, v: impl Iterator<Item = Complex<T>>) -> T {
    (v.fold(T::zero(), |a, z| a + z.norm_sqr()) * grid.cell_area()).sqrt()
}

impl<T: Real> ContinuityResidual<T> {
    /// Grid L2 norm of `lhs - rhs`.
    pub fn residual_norm(&self) -> T {
        l2(&self.grid, self.lhs.iter().zip(&self.rhs).map(|(a, b)| *a - *b))
    }

    pub fn lhs_norm(&self) -> T {
        l2(&self.grid, self.lhs.iter().copied())
    }

    pub fn rhs_norm(&self) -> T {
        l2(&self.grid, self.rhs.iter().copied())
    }
}

/// Minimum grid points per magnetic length for the continuity diagnostic.
pub const MIN_POINTS_PER_MAGNETIC_LENGTH: f64 = 3.0;

pub fn continuity_residual<T: Real>(
    pair: &EvolvingPair<T>,
    pert: &PerturbationField<T>,
    mass: T,
    field: T,
    stencil: Stencil,
) -> Result<ContinuityResidual<T>> {
    let EvolvingPair {
        bra,
        ket,
        bra_dt,
        ket_dt,
    } = pair;
    bra.check_compatible(ket)?;
    bra.check_compatible(bra_dt)?;
    ket.check_compatible(ket_dt)?;
    let grid = *bra.grid();
    pert.check_resolution(&grid)?;
    let per_length = T::one() / field.sqrt() / grid.spacing();
    if per_length < lit(MIN_POINTS_PER_MAGNETIC_LENGTH) {
        return Err(Error::GridTooCoarse(format!(
            "{:.2} grid spacings per magnetic length, need {}",
            to_f64(per_length),
            MIN_POINTS_PER_MAGNETIC_LENGTH
        )));
    }
    let j = current(bra, ket)?;
    let jx = j.spatial(1);
    let jy = j.spatial(2);
    let div_x = derivative(&grid, &jx, Axis::X, stencil);
    let div_y = derivative(&grid, &jy, Axis::Y, stencil);
    let samples = pert.lab_samples(&grid, mass, bra.kz())?;
    let eps = pert.epsilon;
    let n = grid.len();
    let mut lhs = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for k in 0..n {
        let (u, v): (&Spinor<T>, &Spinor<T>) = (&bra.data()[k], &ket.data()[k]);
        let drho = dirac::dagger_dot(&bra_dt.data()[k], v) + dirac::dagger_dot(u, &ket_dt.data()[k]);
        lhs.push(drho + div_x[k] + div_y[k]);
        let a = samples.at(k);
        let mut contracted = czero();
        for mu in 0..4 {
            contracted += j.components[mu][k] * a[mu];
        }
        rhs.push(times_i(contracted * eps) * -T::one());
    }
    Ok(ContinuityResidual { grid, lhs, rhs })
}

/// Output of the rate-equation route.
#[derive(Debug, Clone)]
pub struct OdeSeries<T: Real> {
    pub series: FidelitySeries<T>,
    /// `dF/dt = 2 Re(conj(f) df/dt)` at each sample time.
    pub fidelity_rate: Vec<T>,
    /// Largest boundary flux `|sum_S n . psi^dagger alpha psi(eps)|` seen.
    pub boundary_flux: T,
    pub substeps: usize,
}

/// `df/dt = -i eps <V_I(t)>` at time `t`.
pub fn linear_response_rate<T: Real>(model: &HamiltonianModel<T>, psi0: &DVector<Complex<T>>, t: T) -> Complex<T> {
    times_i(creal(model.epsilon() * model.interaction_expectation(psi0, t))) * -T::one()
}

/// Flux of `psi^dagger alpha psi(eps)` through the grid boundary rectangle.
pub fn boundary_flux<T: Real>(
    model: &HamiltonianModel<T>,
    basis: &SampledBasis<T>,
    psi0: &DVector<Complex<T>>,
    t: T,
) -> Complex<T> {
    let c0 = model.evolve(psi0, t, Evolution::Unperturbed);
    let ce = model.evolve(psi0, t, Evolution::Perturbed);
    let grid = basis.grid();
    let at = |c: &DVector<Complex<T>>, k: usize| -> Spinor<T> {
        let mut s = [czero(); 4];
        for (j, cj) in c.iter().enumerate() {
            let v = basis.node_value(j, k);
            for q in 0..4 {
                s[q] += v[q] * *cj;
            }
        }
        s
    };
    let mut flux = czero();
    for (k, normal) in grid.boundary() {
        let u = at(&c0, k);
        let v = at(&ce, k);
        flux += dirac::dagger_dot(&u, &dirac::alpha_x(&v)) * normal[0]
            + dirac::dagger_dot(&u, &dirac::alpha_y(&v)) * normal[1];
    }
    flux * grid.spacing()
}

/// Integrates `df/dt = -i eps <V_I(t)> f` with classical RK4 between the
/// sample times, subdividing so that each step advances the fastest phase by
/// at most [`MAX_PHASE_STEP`]. To first order in `eps` this is the linear
/// response rate; the factor `f` makes a constant potential an exact phase.
pub fn fidelity_ode<T: Real>(
    model: &HamiltonianModel<T>,
    basis: &SampledBasis<T>,
    psi0: &DVector<Complex<T>>,
    times: &[T],
) -> Result<OdeSeries<T>> {
    fidelity_ode_with_threshold(model, basis, psi0, times, BOUNDARY_FLUX_THRESHOLD)
}

/// [`fidelity_ode`] with an explicit boundary-flux threshold.
pub fn fidelity_ode_with_threshold<T: Real>(
    model: &HamiltonianModel<T>,
    basis: &SampledBasis<T>,
    psi0: &DVector<Complex<T>>,
    times: &[T],
    flux_threshold: f64,
) -> Result<OdeSeries<T>> {
    check_state(model, psi0)?;
    if times.is_empty() {
        return Err(Error::invalid("times", "need at least one sample time"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times[0] < T::zero() {
        return Err(Error::invalid(
            "times",
            "sample times must be non-negative and increasing",
        ));
    }
    let e = model.energies();
    let (lo, hi) = e.iter().fold((e[0], e[0]), |(a, b), &x| (a.min(x), b.max(x)));
    let omega = to_f64(hi - lo);
    let flux = times
        .par_iter()
        .map(|&t| cabs(boundary_flux(model, basis, psi0, t)))
        .collect::<Vec<T>>()
        .into_iter()
        .fold(T::zero(), |a, x| a.max(x));
    if to_f64(flux) > flux_threshold {
        return Err(Error::BoundaryFluxTooLarge {
            flux: to_f64(flux),
            threshold: flux_threshold,
        });
    }
    let rate = |t: T| linear_response_rate(model, psi0, t);
    let half: T = lit(0.5);
    let sixth: T = lit(1.0 / 6.0);
    let mut f = creal(T::one());
    let mut t = T::zero();
    let mut amplitude = Vec::with_capacity(times.len());
    let mut max_sub = 1usize;
    for &target in times {
        let span = target - t;
        if span > T::zero() {
            let sub = ((to_f64(span) * omega / MAX_PHASE_STEP).ceil() as usize).max(1);
            max_sub = max_sub.max(sub);
            let dt = span / from_usize(sub);
            for _ in 0..sub {
                let (r1, r2, r4) = (rate(t), rate(t + dt * half), rate(t + dt));
                let k1 = r1 * f;
                let k2 = r2 * (f + k1 * (dt * half));
                let k3 = r2 * (f + k2 * (dt * half));
                let k4 = r4 * (f + k3 * dt);
                f += (k1 + (k2 + k3) * lit::<T>(2.0) + k4) * (dt * sixth);
                t += dt;
            }
        }
        t = target;
        amplitude.push(f);
    }
    let fidelity_rate = times
        .iter()
        .zip(&amplitude)
        .map(|(&t, a)| lit::<T>(2.0) * (a.conj() * rate(t) * *a).re)
        .collect();
    Ok(OdeSeries {
        series: FidelitySeries::from_amplitudes(times.to_vec(), amplitude, Method::Ode)?,
        fidelity_rate,
        boundary_flux: flux,
        substeps: max_sub,
    })
}
