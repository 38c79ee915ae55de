//! Relativistic Landau levels in the symmetric gauge.
//!
//! Conventions: natural units with unit charge, background field `B = H z`,
//! symmetric gauge `a = (H/2) (-y, x, 0)` and kinetic momentum
//! `pi = -i grad - a`. With `pi_+ = pi_x + i pi_y` lowering the Landau level,
//! an orbital `phi_{n, ml}` has `pi_perp^2 = (2n + 1) H` and angular momentum
//! `ml >= -n`.
//!
//! A positive-energy spinor is `N (chi, (sigma . pi) chi / (E + m))` with
//! `chi = phi_{n, ml} (x) spin`. Its effective level index `nu` is `n` on the
//! aligned branch and `n + 1` on the anti-aligned branch, so that
//! `E = sqrt(m^2 + kz^2 + 2 nu H)`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::dirac::{self, Spinor};
use crate::error::{Error, Result};
use crate::grid::{derivative, Axis, SpinorField, Stencil, TransverseGrid};
use crate::scalar::{cis, czero, from_i64, from_usize, lit, to_f64, Complex, Real};
use crate::special::{laguerre, laguerre_derivative, ln_factorial_ratio};

/// Default relative tolerance for treating two energies as degenerate.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Default ceiling on the truncated basis dimension.
pub const DEFAULT_DIMENSION_CEILING: usize = 4096;

/// Boundary amplitude, relative to the peak, above which a grid is rejected.
pub const BOUNDARY_DECAY: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleParams<T> {
    pub mass: T,
    pub field: T,
    pub kz: T,
}

impl<T: Real> ParticleParams<T> {
    pub fn new(mass: T, field: T, kz: T) -> Result<Self> {
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::invalid("mass", "must be positive and finite"));
        }
        if !(field > T::zero()) || !field.is_finite() {
            return Err(Error::invalid("field", "must be positive and finite"));
        }
        if !kz.is_finite() {
            return Err(Error::invalid("kz", "must be finite"));
        }
        Ok(Self { mass, field, kz })
    }

    pub fn with_kz(self, kz: T) -> Result<Self> {
        Self::new(self.mass, self.field, kz)
    }

    pub fn magnetic_length(&self) -> T {
        T::one() / self.field.sqrt()
    }
}

/// Spin branch relative to the background field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    /// Upper-component spin up; the only branch present in the lowest level.
    Aligned,
    Anti,
}

impl Spin {
    pub fn sign(&self) -> i32 {
        match self {
            Spin::Aligned => 1,
            Spin::Anti => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Sector {
    #[default]
    Positive,
    /// Negative-energy solutions. Experimental; never part of the default basis.
    Negative,
}

/// Label of a relativistic Landau eigenstate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumNumbers<T> {
    /// Landau index of the orbital carried by the large components.
    pub n: u32,
    /// Angular momentum of that orbital.
    pub ml: i32,
    pub spin: Spin,
    pub kz: T,
    pub sector: Sector,
}

impl<T: Real> QuantumNumbers<T> {
    pub fn new(n: u32, ml: i32, spin: Spin, kz: T) -> Result<Self> {
        if i64::from(ml) < -i64::from(n) {
            return Err(Error::invalid(
                "ml",
                format!("angular momentum {ml} is below -n = -{n}"),
            ));
        }
        Ok(Self {
            n,
            ml,
            spin,
            kz,
            sector: Sector::Positive,
        })
    }

    /// Build from the effective level index `nu` instead of the orbital index.
    pub fn from_level(nu: u32, ml: i32, spin: Spin, kz: T) -> Result<Self> {
        let n = match spin {
            Spin::Aligned => nu,
            Spin::Anti => nu
                .checked_sub(1)
                .ok_or_else(|| Error::invalid("spin", "the lowest level has only the aligned branch"))?,
        };
        Self::new(n, ml, spin, kz)
    }

    pub fn lowest(kz: T) -> Self {
        Self {
            n: 0,
            ml: 0,
            spin: Spin::Aligned,
            kz,
            sector: Sector::Positive,
        }
    }

    pub fn with_ml(self, ml: i32) -> Result<Self> {
        Self::new(self.n, ml, self.spin, self.kz).map(|q| q.in_sector(self.sector))
    }

    pub fn in_sector(mut self, sector: Sector) -> Self {
        self.sector = sector;
        self
    }

    /// Effective level index `nu`.
    pub fn level(&self) -> u32 {
        match self.spin {
            Spin::Aligned => self.n,
            Spin::Anti => self.n + 1,
        }
    }

    /// Same labels ignoring `kz`.
    pub fn same_transverse(&self, other: &Self) -> bool {
        self.n == other.n && self.ml == other.ml && self.spin == other.spin && self.sector == other.sector
    }
}

impl<T: Real> fmt::Display for QuantumNumbers<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.spin {
            Spin::Aligned => "+",
            Spin::Anti => "-",
        };
        let sec = match self.sector {
            Sector::Positive => "",
            Sector::Negative => ", E<0",
        };
        write!(f, "(n={}, ml={}, s={}, kz={}{})", self.n, self.ml, s, self.kz, sec)
    }
}

/// `E = ±sqrt(m^2 + kz^2 + 2 nu H)`.
pub fn landau_energy<T: Real>(qn: &QuantumNumbers<T>, p: &ParticleParams<T>) -> T {
    let nu: T = from_usize(qn.level() as usize);
    let e = (p.mass * p.mass + qn.kz * qn.kz + (nu + nu) * p.field).sqrt();
    match qn.sector {
        Sector::Positive => e,
        Sector::Negative => -e,
    }
}

// --- orbitals -------------------------------------------------------------

struct OrbitalShape<T> {
    radial_index: usize,
    alpha: usize,
    ln_norm: T,
}

fn orbital_shape<T: Real>(n: u32, ml: i32, field: T) -> OrbitalShape<T> {
    let alpha = ml.unsigned_abs() as usize;
    let radial_index = (i64::from(n) - (alpha as i64 - i64::from(ml)) / 2) as usize;
    let two: T = lit(2.0);
    let ln_norm = (field.ln() - (two * T::pi()).ln()
        + from_usize::<T>(alpha) * (field / two).ln()
        + ln_factorial_ratio::<T>(radial_index, alpha))
        / two;
    OrbitalShape {
        radial_index,
        alpha,
        ln_norm,
    }
}

/// `exp(ln_c) r^p exp(-u/2)` with `0^0 = 1`.
fn power_gauss<T: Real>(ln_c: T, p: i64, r: T, u: T) -> T {
    if p == 0 {
        return (ln_c - u / lit(2.0)).exp();
    }
    if r == T::zero() {
        return T::zero();
    }
    (ln_c + from_i64::<T>(p) * r.ln() - u / lit(2.0)).exp()
}

fn validate_orbital(n: u32, ml: i32) {
    assert!(
        i64::from(ml) >= -i64::from(n),
        "orbital (n={n}, ml={ml}) does not exist"
    );
}

/// Radial profile `R(r)` with `phi_{n, ml} = R(r) exp(i ml theta)`, normalized
/// in the plane.
pub fn orbital_radial<T: Real>(n: u32, ml: i32, field: T, r: T) -> T {
    validate_orbital(n, ml);
    let s = orbital_shape(n, ml, field);
    let u = field * r * r / lit(2.0);
    power_gauss(s.ln_norm, s.alpha as i64, r, u) * laguerre(s.radial_index, from_usize(s.alpha), u)
}

/// Symmetric-gauge Landau orbital `phi_{n, ml}(x, y)`.
pub fn landau_orbital_value<T: Real>(n: u32, ml: i32, field: T, x: T, y: T) -> Complex<T> {
    let r = x.hypot(y);
    cis(from_i64::<T>(ml.into()) * y.atan2(x)) * orbital_radial(n, ml, field, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ladder {
    /// `pi_+ = pi_x + i pi_y`
    Plus,
    /// `pi_- = pi_x - i pi_y`
    Minus,
}

/// `pi_± phi_{n, ml}` evaluated pointwise from the analytic radial derivative:
/// `pi_± (f(r) e^{i l theta}) = -i e^{i (l ± 1) theta} [f' ∓ (l / r) f ± (H / 2) r f]`.
fn ladder_value<T: Real>(which: Ladder, n: u32, ml: i32, field: T, x: T, y: T) -> Complex<T> {
    let s = orbital_shape(n, ml, field);
    let r = x.hypot(y);
    let u = field * r * r / lit(2.0);
    let alpha_t: T = from_usize(s.alpha);
    let lag = laguerre(s.radial_index, alpha_t, u);
    let dlag = laguerre_derivative(s.radial_index, alpha_t, u);
    let a = s.alpha as i64;
    let l = i64::from(ml);
    let inner_coeff = match which {
        Ladder::Plus => a - l,
        Ladder::Minus => a + l,
    };
    let mut b = T::zero();
    if inner_coeff != 0 {
        b += from_i64::<T>(inner_coeff) * power_gauss(s.ln_norm, a - 1, r, u) * lag;
    }
    let outer = power_gauss(s.ln_norm, a + 1, r, u) * field;
    b += match which {
        Ladder::Plus => outer * dlag,
        Ladder::Minus => outer * (dlag - lag),
    };
    let new_l = match which {
        Ladder::Plus => l + 1,
        Ladder::Minus => l - 1,
    };
    let phase = cis(from_i64::<T>(new_l) * y.atan2(x));
    // -i * phase * b
    Complex::new(phase.im * b, -phase.re * b)
}

/// Orbital sampled on `grid` and renormalized under grid quadrature.
pub fn landau_orbital<T: Real>(n: u32, ml: i32, field: T, grid: &TransverseGrid<T>) -> Result<Vec<Complex<T>>> {
    if i64::from(ml) < -i64::from(n) {
        return Err(Error::invalid("ml", format!("orbital (n={n}, ml={ml}) does not exist")));
    }
    grid.check_magnetic_extent(field)?;
    let mut values: Vec<Complex<T>> = grid
        .positions()
        .map(|(x, y)| landau_orbital_value(n, ml, field, x, y))
        .collect();
    let mut peak = T::zero();
    let mut edge = T::zero();
    let mut norm = T::zero();
    for (k, v) in values.iter().enumerate() {
        let a = v.norm_sqr();
        norm += a;
        let a = a.sqrt();
        peak = peak.max(a);
        if grid.is_boundary(k) {
            edge = edge.max(a);
        }
    }
    if edge > lit::<T>(BOUNDARY_DECAY) * peak {
        return Err(Error::GridTooSmall(format!(
            "orbital (n={n}, ml={ml}) has boundary amplitude {:.3e} of its peak",
            to_f64(edge / peak)
        )));
    }
    let scale = T::one() / (norm * grid.cell_area()).sqrt();
    for v in &mut values {
        *v *= scale;
    }
    Ok(values)
}

// --- spinors --------------------------------------------------------------

/// Analytic eigenspinor of the unperturbed Dirac Hamiltonian at `(x, y)`.
pub fn spinor_value<T: Real>(qn: &QuantumNumbers<T>, p: &ParticleParams<T>, x: T, y: T) -> Spinor<T> {
    let h = p.field;
    let phi = landau_orbital_value(qn.n, qn.ml, h, x, y);
    let kz = qn.kz;
    // chi and (sigma . pi) chi as two-spinors
    let (chi, spi) = match qn.spin {
        Spin::Aligned => (
            [phi, czero()],
            [phi * kz, ladder_value(Ladder::Plus, qn.n, qn.ml, h, x, y)],
        ),
        Spin::Anti => (
            [czero(), phi],
            [ladder_value(Ladder::Minus, qn.n, qn.ml, h, x, y), -phi * kz],
        ),
    };
    let e = landau_energy(qn, p).abs();
    let m = p.mass;
    let norm = ((e + m) / (e + e)).sqrt();
    let small = norm / (e + m);
    match qn.sector {
        Sector::Positive => [chi[0] * norm, chi[1] * norm, spi[0] * small, spi[1] * small],
        Sector::Negative => [-spi[0] * small, -spi[1] * small, chi[0] * norm, chi[1] * norm],
    }
}

/// Eigenspinor sampled on `grid`; unit Dirac norm up to quadrature error.
pub fn landau_spinor<T: Real>(
    qn: &QuantumNumbers<T>,
    p: &ParticleParams<T>,
    grid: &TransverseGrid<T>,
) -> Result<SpinorField<T>> {
    grid.check_magnetic_extent(p.field)?;
    let field = SpinorField::from_fn(*grid, qn.kz, |x, y| spinor_value(qn, p, x, y));
    let (edge, peak) = field.boundary_and_peak();
    if edge > lit::<T>(BOUNDARY_DECAY) * peak {
        return Err(Error::GridTooSmall(format!(
            "spinor {qn} has boundary amplitude {:.3e} of its peak",
            to_f64(edge / peak)
        )));
    }
    Ok(field)
}

/// Finite-difference unperturbed Dirac Hamiltonian
/// `alpha_perp . (-i grad - a) + alpha_z kz + beta m` applied to `psi`.
pub fn apply_dirac_hamiltonian<T: Real>(
    psi: &SpinorField<T>,
    p: &ParticleParams<T>,
    stencil: Stencil,
) -> SpinorField<T> {
    let grid = *psi.grid();
    let half_h = p.field / lit(2.0);
    let mut dx = Vec::with_capacity(4);
    let mut dy = Vec::with_capacity(4);
    for c in 0..4 {
        let comp = psi.component(c);
        dx.push(derivative(&grid, &comp, Axis::X, stencil));
        dy.push(derivative(&grid, &comp, Axis::Y, stencil));
    }
    let mut out = SpinorField::zeros(grid, psi.kz());
    for (k, (v, o)) in psi.data().iter().zip(out.data_mut()).enumerate() {
        let (x, y) = grid.position(k);
        let ax = -half_h * y;
        let ay = half_h * x;
        let mut pix = [czero(); 4];
        let mut piy = [czero(); 4];
        for c in 0..4 {
            // -i d/dx - a_x
            pix[c] = Complex::new(dx[c][k].im, -dx[c][k].re) - v[c] * ax;
            piy[c] = Complex::new(dy[c][k].im, -dy[c][k].re) - v[c] * ay;
        }
        let tx = dirac::alpha_x(&pix);
        let ty = dirac::alpha_y(&piy);
        let tz = dirac::alpha_z(v);
        let tb = dirac::beta(v);
        for c in 0..4 {
            o[c] = tx[c] + ty[c] + tz[c] * psi.kz() + tb[c] * p.mass;
        }
    }
    out
}

/// `||H psi - E psi|| / ||psi||` on the grid.
pub fn eigen_residual<T: Real>(psi: &SpinorField<T>, energy: T, p: &ParticleParams<T>, stencil: Stencil) -> T {
    let mut hpsi = apply_dirac_hamiltonian(psi, p, stencil);
    hpsi.axpy(Complex::new(-energy, T::zero()), psi)
        .expect("same grid by construction");
    hpsi.norm() / psi.norm()
}

// --- truncation -----------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpinSelection {
    Aligned,
    Anti,
    #[default]
    Both,
}

impl SpinSelection {
    fn admits(&self, s: Spin) -> bool {
        matches!(
            (self, s),
            (SpinSelection::Both, _) | (SpinSelection::Aligned, Spin::Aligned) | (SpinSelection::Anti, Spin::Anti)
        )
    }
}

/// Finite window of Landau labels used as the dynamical basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisTruncation {
    pub nu_max: u32,
    pub ml_min: i32,
    pub ml_max: i32,
    pub spins: SpinSelection,
    /// Experimental: append the negative-energy partners of every label.
    pub include_negative_energy: bool,
    pub dimension_ceiling: usize,
}

impl BasisTruncation {
    pub fn new(nu_max: u32, ml_min: i32, ml_max: i32) -> Result<Self> {
        if ml_min > ml_max {
            return Err(Error::invalid("ml_min", "must not exceed ml_max"));
        }
        Ok(Self {
            nu_max,
            ml_min,
            ml_max,
            spins: SpinSelection::Both,
            include_negative_energy: false,
            dimension_ceiling: DEFAULT_DIMENSION_CEILING,
        })
    }

    pub fn with_spins(mut self, spins: SpinSelection) -> Self {
        self.spins = spins;
        self
    }

    pub fn with_negative_energy(mut self, on: bool) -> Self {
        self.include_negative_energy = on;
        self
    }

    pub fn with_ceiling(mut self, ceiling: usize) -> Self {
        self.dimension_ceiling = ceiling;
        self
    }

    /// Labels ordered by level, then spin branch (aligned first), then `ml`;
    /// negative-energy partners, when enabled, follow in the same order.
    pub fn labels<T: Real>(&self, kz: T) -> Vec<QuantumNumbers<T>> {
        let mut out = Vec::new();
        for nu in 0..=self.nu_max {
            for spin in [Spin::Aligned, Spin::Anti] {
                if !self.spins.admits(spin) {
                    continue;
                }
                let n = match spin {
                    Spin::Aligned => nu,
                    Spin::Anti if nu == 0 => continue,
                    Spin::Anti => nu - 1,
                };
                for ml in self.ml_min.max(-(n as i32))..=self.ml_max {
                    out.push(QuantumNumbers {
                        n,
                        ml,
                        spin,
                        kz,
                        sector: Sector::Positive,
                    });
                }
            }
        }
        if self.include_negative_energy {
            let neg: Vec<_> = out.iter().map(|q| q.in_sector(Sector::Negative)).collect();
            out.extend(neg);
        }
        out
    }

    pub fn dimension(&self) -> usize {
        self.labels(0.0_f64).len()
    }

    pub fn contains<T: Real>(&self, qn: &QuantumNumbers<T>) -> bool {
        qn.level() <= self.nu_max
            && qn.ml >= self.ml_min
            && qn.ml <= self.ml_max
            && i64::from(qn.ml) >= -i64::from(qn.n)
            && self.spins.admits(qn.spin)
            && (qn.sector == Sector::Positive || self.include_negative_energy)
    }

    pub fn check_ceiling(&self) -> Result<()> {
        let d = self.dimension();
        if d == 0 {
            return Err(Error::invalid("truncation", "selects no states"));
        }
        if d > self.dimension_ceiling {
            return Err(Error::TruncationTooLarge {
                dimension: d,
                ceiling: self.dimension_ceiling,
            });
        }
        Ok(())
    }
}

/// Labels in `truncation` whose energy lies within `tol * |E_ref|` of the
/// reference energy. Always contains the reference.
pub fn degenerate_set<T: Real>(
    reference: &QuantumNumbers<T>,
    p: &ParticleParams<T>,
    truncation: &BasisTruncation,
    tol: T,
) -> Result<Vec<QuantumNumbers<T>>> {
    if !(tol >= T::zero()) {
        return Err(Error::invalid("tol", "degeneracy tolerance must be non-negative"));
    }
    if !truncation.contains(reference) {
        return Err(Error::EmptyTruncation(reference.to_string()));
    }
    let e_ref = landau_energy(reference, p);
    Ok(truncation
        .labels(reference.kz)
        .into_iter()
        .filter(|q| (landau_energy(q, p) - e_ref).abs() <= tol * e_ref.abs())
        .collect())
}

// --- sampled basis --------------------------------------------------------

/// Basis spinors sampled on a grid, stored as the columns of a
/// `(4 * nodes) x D` matrix with layout `[node][component]`.
#[derive(Debug, Clone)]
pub struct SampledBasis<T: Real> {
    params: ParticleParams<T>,
    grid: TransverseGrid<T>,
    labels: Vec<QuantumNumbers<T>>,
    energies: Vec<T>,
    columns: DMatrix<Complex<T>>,
}

impl<T: Real> SampledBasis<T> {
    pub fn new(params: ParticleParams<T>, truncation: &BasisTruncation, grid: TransverseGrid<T>) -> Result<Self> {
        truncation.check_ceiling()?;
        Self::from_labels(params, truncation.labels(params.kz), grid)
    }

    pub fn from_labels(
        params: ParticleParams<T>,
        labels: Vec<QuantumNumbers<T>>,
        grid: TransverseGrid<T>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("labels", "basis must not be empty"));
        }
        if labels.iter().any(|q| q.kz != params.kz) {
            return Err(Error::invalid("labels", "all basis states must carry the scenario kz"));
        }
        grid.check_magnetic_extent(params.field)?;
        let sampled: Vec<Result<Vec<Complex<T>>>> = labels
            .par_iter()
            .map(|qn| {
                let f = landau_spinor(qn, &params, &grid)?;
                Ok(f.data().iter().flat_map(|s| s.iter().copied()).collect())
            })
            .collect();
        let mut flat = Vec::with_capacity(4 * grid.len() * labels.len());
        for col in sampled {
            flat.extend(col?);
        }
        let columns = DMatrix::from_vec(4 * grid.len(), labels.len(), flat);
        let energies = labels.iter().map(|q| landau_energy(q, &params)).collect();
        Ok(Self {
            params,
            grid,
            labels,
            energies,
            columns,
        })
    }

    pub fn params(&self) -> &ParticleParams<T> {
        &self.params
    }

    pub fn grid(&self) -> &TransverseGrid<T> {
        &self.grid
    }

    pub fn labels(&self) -> &[QuantumNumbers<T>] {
        &self.labels
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.columns
    }

    pub fn index_of(&self, qn: &QuantumNumbers<T>) -> Option<usize> {
        self.labels.iter().position(|q| q.same_transverse(qn))
    }

    pub fn spinor(&self, j: usize) -> SpinorField<T> {
        self.field_from_flat(self.columns.column(j).iter().copied())
    }

    fn field_from_flat(&self, flat: impl Iterator<Item = Complex<T>>) -> SpinorField<T> {
        let flat: Vec<_> = flat.collect();
        let data = flat.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect();
        SpinorField::from_data(self.grid, self.params.kz, data).expect("sized by construction")
    }

    /// Position-space field `sum_j c_j psi_j(x)`.
    pub fn superpose(&self, coefficients: &DVector<Complex<T>>) -> SpinorField<T> {
        assert_eq!(coefficients.len(), self.dimension());
        let flat = &self.columns * coefficients;
        self.field_from_flat(flat.iter().copied())
    }

    /// Grid-quadrature projections `<psi_j | field>`.
    pub fn project(&self, field: &SpinorField<T>) -> Result<DVector<Complex<T>>> {
        if field.grid() != &self.grid || field.kz() != self.params.kz {
            return Err(Error::GridMismatch("field does not match the basis grid".into()));
        }
        let flat = DVector::from_iterator(4 * self.grid.len(), field.data().iter().flat_map(|s| s.iter().copied()));
        Ok(self.columns.ad_mul(&flat) * Complex::new(self.grid.cell_area(), T::zero()))
    }

    /// Grid-quadrature Gram matrix of the basis.
    pub fn gram(&self) -> DMatrix<Complex<T>> {
        self.columns.ad_mul(&self.columns) * Complex::new(self.grid.cell_area(), T::zero())
    }

    /// Spinor of basis state `j` at flat grid node `k`.
    pub fn node_value(&self, j: usize, k: usize) -> Spinor<T> {
        let c = self.columns.column(j);
        [c[4 * k], c[4 * k + 1], c[4 * k + 2], c[4 * k + 3]]
    }
}
