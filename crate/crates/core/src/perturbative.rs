//! Second-order predictions for fidelity decay: the correlation double
//! integral, the degenerate coefficient `C`, beam averages, the quadratic
//! decay law with its boost suppression, and the fit used to compare it with
//! simulated series.

use rayon::prelude::*;

use crate::dynamics::HamiltonianModel;
use crate::error::{Error, Result};
use crate::fidelity::{FidelitySeries, Method};
use crate::landau::QuantumNumbers;
use crate::scalar::{creal, lit, to_f64, Complex, Real};

/// Lower and upper bounds on `1 - F` for the quadratic fit.
pub const DEFAULT_FIT_WINDOW: (f64, f64) = (1e-4, 1e-2);

/// Relative tolerance of [`boost_check`].
pub const BOOST_TOLERANCE: f64 = 0.01;

/// Tolerance on the total beam weight.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Longitudinal velocity `k / sqrt(k^2 + m^2)`.
pub fn boost_velocity<T: Real>(k: T, m: T) -> Result<T> {
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::invalid("mass", "must be positive and finite"));
    }
    if !k.is_finite() {
        return Err(Error::invalid("kz", "must be finite"));
    }
    Ok(k / (k * k + m * m).sqrt())
}

/// `1 / sqrt(1 - v^2) = sqrt(k^2 + m^2) / m`.
pub fn lorentz_factor<T: Real>(k: T, m: T) -> Result<T> {
    boost_velocity(k, m)?;
    Ok((k * k + m * m).sqrt() / m)
}

/// `1 - v(k)^2 = m^2 / (k^2 + m^2)`.
pub fn suppression_factor<T: Real>(k: T, m: T) -> Result<T> {
    boost_velocity(k, m)?;
    Ok(m * m / (k * k + m * m))
}

fn degeneracy_threshold<T: Real>(reference: T, tol: T) -> T {
    tol * reference.abs().max(T::one())
}

fn check_index<T: Real>(model: &HamiltonianModel<T>, i: usize) -> Result<()> {
    if i >= model.dimension() {
        return Err(Error::invalid(
            "state",
            format!("index {i} outside a basis of {}", model.dimension()),
        ));
    }
    Ok(())
}

/// The two parts of the correlation sum: partners degenerate with the
/// reference state (growing as `t^2`) and the bounded oscillatory rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTerms<T> {
    pub degenerate: T,
    pub oscillatory: T,
}

impl<T: Real> CorrelationTerms<T> {
    pub fn total(&self) -> T {
        self.degenerate + self.oscillatory
    }
}

/// `4 sum_j |V_ij|^2 sin^2((E_i - E_j) t / 2) / (E_i - E_j)^2`, split into
/// degenerate and oscillatory parts. Pairs closer than `tol` (relative to
/// `max(|E_i|, 1)`) use the limit `t^2 / 4`.
pub fn correlation_terms<T: Real>(model: &HamiltonianModel<T>, i: usize, t: T, tol: T) -> Result<CorrelationTerms<T>> {
    check_index(model, i)?;
    let e = model.energies();
    let v = model.perturbation();
    let thr = degeneracy_threshold(e[i], tol);
    let half: T = lit(0.5);
    let four: T = lit(4.0);
    let mut degenerate = T::zero();
    let mut oscillatory = T::zero();
    for j in 0..model.dimension() {
        let w = v[(i, j)].norm_sqr();
        let gap = e[j] - e[i];
        if gap.abs() <= thr {
            degenerate += w * t * t;
        } else {
            let s = (gap * t * half).sin();
            oscillatory += four * w * s * s / (gap * gap);
        }
    }
    Ok(CorrelationTerms {
        degenerate,
        oscillatory,
    })
}

/// Closed-form double time integral of `<i| V_I(t') V_I(t'') |i>` over
/// `[0, t]^2`, with the default degeneracy tolerance.
pub fn correlation_integral<T: Real>(model: &HamiltonianModel<T>, i: usize, t: T) -> Result<T> {
    Ok(correlation_terms(model, i, t, lit(crate::landau::DEFAULT_DEGENERACY_TOL))?.total())
}

/// Upper bound `4 sum_{nondegenerate j} |V_ij|^2 / (E_j - E_i)^2` on the
/// oscillatory part.
pub fn oscillatory_bound<T: Real>(model: &HamiltonianModel<T>, i: usize, tol: T) -> Result<T> {
    check_index(model, i)?;
    let e = model.energies();
    let thr = degeneracy_threshold(e[i], tol);
    let four: T = lit(4.0);
    let mut acc = T::zero();
    for j in 0..model.dimension() {
        let gap = e[j] - e[i];
        if gap.abs() > thr {
            acc += four * model.perturbation()[(i, j)].norm_sqr() / (gap * gap);
        }
    }
    Ok(acc)
}

/// Time after which the degenerate term `C t^2` exceeds the oscillatory
/// bound. `None` when `C = 0`.
pub fn crossover_time<T: Real>(model: &HamiltonianModel<T>, i: usize, tol: T) -> Result<Option<T>> {
    let c = c_coefficient(model, i, tol)?.value;
    if c <= T::zero() {
        return Ok(None);
    }
    Ok(Some((oscillatory_bound(model, i, tol)? / c).sqrt()))
}

/// Degenerate correlation coefficient `C = sum_{j != i, E_j = E_i} |V_ij|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCoefficient<T> {
    pub value: T,
    pub reference: usize,
    /// `(partner index, |V_ij|^2)` for every degenerate partner.
    pub partners: Vec<(usize, T)>,
}

pub fn c_coefficient<T: Real>(model: &HamiltonianModel<T>, i: usize, tol: T) -> Result<CorrelationCoefficient<T>> {
    check_index(model, i)?;
    let e = model.energies();
    let thr = degeneracy_threshold(e[i], tol);
    let partners: Vec<(usize, T)> = (0..model.dimension())
        .into_par_iter()
        .filter(|&j| j != i && (e[j] - e[i]).abs() <= thr)
        .map(|j| (j, model.perturbation()[(i, j)].norm_sqr()))
        .collect();
    let value = partners.iter().fold(T::zero(), |a, (_, w)| a + *w);
    Ok(CorrelationCoefficient {
        value,
        reference: i,
        partners,
    })
}

/// Weighted set of degenerate beam states.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamEnsemble<T> {
    members: Vec<(QuantumNumbers<T>, T)>,
}

impl<T: Real> BeamEnsemble<T> {
    pub fn new(members: Vec<(QuantumNumbers<T>, T)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("ensemble", "needs at least one member"));
        }
        if members.iter().any(|(_, w)| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(Error::invalid("weight", "weights must be non-negative and finite"));
        }
        let sum = members.iter().fold(0.0, |a, (_, w)| a + to_f64(*w));
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSumViolation { sum });
        }
        Ok(Self { members })
    }

    /// Equal weights over the given states.
    pub fn uniform(states: Vec<QuantumNumbers<T>>) -> Result<Self> {
        let w = T::one() / crate::scalar::from_usize(states.len().max(1));
        Self::new(states.into_iter().map(|q| (q, w)).collect())
    }

    pub fn members(&self) -> &[(QuantumNumbers<T>, T)] {
        &self.members
    }

    /// Model indices and weights, checking that all members are in the basis
    /// and share one energy.
    pub fn resolve(&self, model: &HamiltonianModel<T>, tol: T) -> Result<Vec<(usize, T)>> {
        let labels = model.labels();
        let mut out = Vec::with_capacity(self.members.len());
        for (q, w) in &self.members {
            let idx = labels
                .iter()
                .position(|l| l == q)
                .ok_or_else(|| Error::EmptyTruncation(format!("beam state {q} is not in the basis")))?;
            out.push((idx, *w));
        }
        let e = model.energies();
        let e0 = e[out[0].0];
        let thr = degeneracy_threshold(e0, tol);
        if out.iter().any(|(j, _)| (e[*j] - e0).abs() > thr) {
            return Err(Error::invalid("ensemble", "beam members must share one energy"));
        }
        Ok(out)
    }
}

/// Per-member coefficients and their weighted sum.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamCoefficient<T> {
    pub value: T,
    pub members: Vec<(usize, T, T)>,
}

/// `sum_n w_n C_n` over the beam.
pub fn beam_c<T: Real>(ensemble: &BeamEnsemble<T>, model: &HamiltonianModel<T>, tol: T) -> Result<BeamCoefficient<T>> {
    let resolved = ensemble.resolve(model, tol)?;
    let members = resolved
        .iter()
        .map(|&(j, w)| Ok((j, w, c_coefficient(model, j, tol)?.value)))
        .collect::<Result<Vec<_>>>()?;
    let value = members.iter().fold(T::zero(), |a, (_, w, c)| a + *w * *c);
    Ok(BeamCoefficient { value, members })
}

/// Quadratic decay law `f = 1 - eps^2 C (1 - v^2) t^2 / 2`,
/// `F = 1 - eps^2 C (1 - v^2) t^2`.
pub fn predicted_series<T: Real>(c: T, epsilon: T, k: T, m: T, times: &[T]) -> Result<FidelitySeries<T>> {
    if !(c >= T::zero()) {
        return Err(Error::invalid("C", "must be non-negative"));
    }
    let rate = epsilon * epsilon * c * suppression_factor(k, m)?;
    let half: T = lit(0.5);
    let amplitude = times
        .iter()
        .map(|&t| creal(T::one() - rate * t * t * half))
        .collect::<Vec<Complex<T>>>();
    let fidelity = times.iter().map(|&t| T::one() - rate * t * t).collect();
    FidelitySeries::from_parts(times.to_vec(), amplitude, fidelity, Method::Perturbative)
}

/// Least-squares fit `1 - F = a t^2 + b` on the window `lo <= 1 - F <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFit<T> {
    pub coefficient: T,
    pub intercept: T,
    /// RMS residual divided by the largest `1 - F` in the window.
    pub relative_residual: T,
    pub points: usize,
    pub window: (T, T),
}

pub fn fit_quadratic_decay<T: Real>(series: &FidelitySeries<T>) -> Result<QuadraticFit<T>> {
    fit_quadratic_decay_in(series, (lit(DEFAULT_FIT_WINDOW.0), lit(DEFAULT_FIT_WINDOW.1)))
}

pub fn fit_quadratic_decay_in<T: Real>(series: &FidelitySeries<T>, window: (T, T)) -> Result<QuadraticFit<T>> {
    let pts: Vec<(f64, f64)> = series
        .times()
        .iter()
        .zip(series.fidelity())
        .map(|(&t, &f)| (to_f64(t), 1.0 - to_f64(f)))
        .filter(|&(_, d)| d >= to_f64(window.0) && d <= to_f64(window.1))
        .map(|(t, d)| (t * t, d))
        .collect();
    if pts.len() < 3 {
        return Err(Error::FitFailure(format!(
            "{} samples inside the decay window [{}, {}], need at least 3",
            pts.len(),
            to_f64(window.0),
            to_f64(window.1)
        )));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (x - mx), b + (x - mx) * (y - my))
    });
    if sxx <= 0.0 {
        return Err(Error::FitFailure("window samples share a single time".into()));
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::FitFailure(format!("non-positive quadratic coefficient {a:e}")));
    }
    let ymax = pts.iter().fold(0.0f64, |m, (_, y)| m.max(*y));
    let rms = (pts.iter().map(|(x, y)| (y - a * x - b).powi(2)).sum::<f64>() / n).sqrt();
    Ok(QuadraticFit {
        coefficient: lit(a),
        intercept: lit(b),
        relative_residual: lit(rms / ymax),
        points: pts.len(),
        window,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostReport<T> {
    pub ratio: T,
    pub expected: T,
    pub relative_error: T,
    pub tolerance: T,
    pub passed: bool,
    pub fit_moving: QuadraticFit<T>,
    pub fit_rest: QuadraticFit<T>,
}

/// Compare fitted decay coefficients of a series at `kz = k` and at `kz = 0`
/// against the suppression factor `1 - v(k)^2`.
pub fn boost_check<T: Real>(
    series_at_k: &FidelitySeries<T>,
    series_at_0: &FidelitySeries<T>,
    k: T,
    m: T,
) -> Result<BoostReport<T>> {
    let expected = suppression_factor(k, m)?;
    let fit_moving = fit_quadratic_decay(series_at_k)?;
    let fit_rest = fit_quadratic_decay(series_at_0)?;
    let ratio = fit_moving.coefficient / fit_rest.coefficient;
    let relative_error = (ratio - expected).abs() / expected;
    let tolerance = lit(BOOST_TOLERANCE);
    Ok(BoostReport {
        ratio,
        expected,
        relative_error,
        tolerance,
        passed: relative_error <= tolerance,
        fit_moving,
        fit_rest,
    })
}

/// The two routes to the momentum dependence of `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumDependence<T> {
    /// Coefficient times suppression, both computed at `kz = k`.
    pub direct: T,
    /// `C(kz = 0) (1 - v(k)^2)`.
    pub boost_route: T,
    pub relative_discrepancy: T,
}

/// `c_at_k` is the coefficient computed in a model at `kz = k`, `c_at_0` the
/// one at rest. The direct route treats the decay rate as `c_at_k` itself.
pub fn momentum_dependence<T: Real>(c_at_k: T, c_at_0: T, k: T, m: T) -> Result<MomentumDependence<T>> {
    let boost_route = c_at_0 * suppression_factor(k, m)?;
    let scale = boost_route.abs().max(c_at_k.abs());
    let relative_discrepancy = if scale > T::zero() {
        (c_at_k - boost_route).abs() / scale
    } else {
        T::zero()
    };
    Ok(MomentumDependence {
        direct: c_at_k,
        boost_route,
        relative_discrepancy,
    })
}

/// Regime of the single-particle description.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub valid: bool,
    pub warnings: Vec<String>,
}

/// Largest `n / m^3` (particles per cubed Compton wavelength) considered dilute.
pub const DILUTE_DENSITY: f64 = 1e-3;

/// Flags `|k| >= 2m` (pair-creation regime) and, when a number density is
/// given, beams that are not dilute on the Compton scale. Never fails.
pub fn compton_guard<T: Real>(k: T, m: T, density: Option<T>) -> ValidityReport {
    let mut warnings = Vec::new();
    let (k, m) = (to_f64(k), to_f64(m));
    if !(m > 0.0) {
        warnings.push(format!("mass {m} is not positive"));
    } else {
        if k.abs() >= 2.0 * m {
            warnings.push(format!("pair-creation regime: |k| = {} >= 2m = {}", k.abs(), 2.0 * m));
        }
        if let Some(n) = density.map(to_f64) {
            let reduced = n / (m * m * m);
            if !(reduced < DILUTE_DENSITY) {
                warnings.push(format!("dense beam: n / m^3 = {reduced:e} exceeds {DILUTE_DENSITY:e}"));
            }
        }
    }
    ValidityReport {
        valid: warnings.is_empty(),
        warnings,
    }
}
