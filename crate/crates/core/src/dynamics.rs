//! Perturbed Dirac Hamiltonian in a truncated Landau basis, exact evolution
//! through its eigendecomposition, and the echo operator and kernel.
//!
//! Evolution follows `U_t = exp(-i H t)`. The echo operator is
//! `M_t = U_t^dagger U_t(eps)` (evolve with the perturbation, return without
//! it), so that the fidelity amplitude is `f(t) = <psi| M_t |psi>
//! = <psi, t | psi(eps), t>` and obeys `df/dt = -i eps <V_I(t)>` to first order.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::dirac;
use crate::error::{Error, Result};
use crate::grid::{SpinorField, TransverseGrid};
use crate::landau::{BasisTruncation, ParticleParams, QuantumNumbers, SampledBasis};
use crate::perturbation::PerturbationField;
use crate::scalar::{cabs, cis, creal, czero, Complex, Real};

/// Default ceiling for position-space kernels (bytes).
pub const DEFAULT_KERNEL_CEILING: usize = 512 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evolution {
    Unperturbed,
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssembleOptions {
    /// Basis index whose diagonal matrix element is shifted to zero.
    pub reference: Option<usize>,
    pub dimension_ceiling: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self {
            reference: None,
            dimension_ceiling: crate::landau::DEFAULT_DIMENSION_CEILING,
        }
    }
}

/// `H(eps) = diag(E) + eps V` together with its eigendecomposition.
#[derive(Debug, Clone)]
pub struct HamiltonianModel<T: Real> {
    labels: Vec<QuantumNumbers<T>>,
    energies: DVector<T>,
    perturbation: DMatrix<Complex<T>>,
    epsilon: T,
    diagonal_shift: T,
    spectrum: DVector<T>,
    eigenvectors: DMatrix<Complex<T>>,
}

fn symmetrize<T: Real>(v: &mut DMatrix<Complex<T>>) {
    let n = v.nrows();
    let half: T = crate::scalar::lit(0.5);
    for i in 0..n {
        v[(i, i)] = creal(v[(i, i)].re);
        for j in (i + 1)..n {
            let s = (v[(i, j)] + v[(j, i)].conj()) * half;
            v[(i, j)] = s;
            v[(j, i)] = s.conj();
        }
    }
}

impl<T: Real> HamiltonianModel<T> {
    /// Model from explicit unperturbed energies and perturbation matrix. `V` is
    /// symmetrized as `(V + V^dagger) / 2`.
    pub fn from_parts(energies: Vec<T>, mut perturbation: DMatrix<Complex<T>>, epsilon: T) -> Result<Self> {
        let d = energies.len();
        if d == 0 {
            return Err(Error::invalid("energies", "model must have at least one state"));
        }
        if perturbation.nrows() != d || perturbation.ncols() != d {
            return Err(Error::invalid(
                "perturbation",
                format!(
                    "expected a {d}x{d} matrix, got {}x{}",
                    perturbation.nrows(),
                    perturbation.ncols()
                ),
            ));
        }
        if !epsilon.is_finite() {
            return Err(Error::invalid("epsilon", "must be finite"));
        }
        symmetrize(&mut perturbation);
        let mut model = Self {
            labels: Vec::new(),
            energies: DVector::from_vec(energies),
            perturbation,
            epsilon,
            diagonal_shift: T::zero(),
            spectrum: DVector::zeros(d),
            eigenvectors: DMatrix::identity(d, d),
        };
        model.diagonalize();
        Ok(model)
    }

    /// Project the perturbation onto a sampled basis by grid quadrature.
    pub fn assemble(basis: &SampledBasis<T>, pert: &PerturbationField<T>, options: &AssembleOptions) -> Result<Self> {
        let d = basis.dimension();
        if d > options.dimension_ceiling {
            return Err(Error::TruncationTooLarge {
                dimension: d,
                ceiling: options.dimension_ceiling,
            });
        }
        let grid = basis.grid();
        pert.check_resolution(grid)?;
        let p = basis.params();
        let samples = pert.lab_samples(grid, p.mass, p.kz)?;
        let phi = basis.matrix();
        let rows = phi.nrows();
        let coupled: Vec<Vec<Complex<T>>> = (0..d)
            .into_par_iter()
            .map(|j| {
                let col = phi.column(j);
                let mut out = Vec::with_capacity(rows);
                for k in 0..grid.len() {
                    let s = [col[4 * k], col[4 * k + 1], col[4 * k + 2], col[4 * k + 3]];
                    out.extend(dirac::minimal_coupling(&samples.at(k), &s));
                }
                out
            })
            .collect();
        let w = DMatrix::from_vec(rows, d, coupled.into_iter().flatten().collect());
        let v = phi.ad_mul(&w) * creal(grid.cell_area());
        let mut model = Self::from_parts(basis.energies().to_vec(), v, pert.epsilon)?;
        model.labels = basis.labels().to_vec();
        if let Some(r) = options.reference {
            model = model.with_zero_diagonal_at(r)?;
        }
        Ok(model)
    }

    pub fn with_labels(mut self, labels: Vec<QuantumNumbers<T>>) -> Result<Self> {
        if labels.len() != self.dimension() {
            return Err(Error::invalid("labels", "one label per basis state required"));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Subtract `V_rr` times the identity so that `<r|V|r> = 0`. This changes
    /// fidelity amplitudes only by a global phase.
    pub fn with_zero_diagonal_at(mut self, r: usize) -> Result<Self> {
        if r >= self.dimension() {
            return Err(Error::invalid("reference", format!("index {r} outside the basis")));
        }
        let s = self.perturbation[(r, r)].re;
        for i in 0..self.dimension() {
            self.perturbation[(i, i)] -= creal(s);
        }
        self.diagonal_shift += s;
        self.diagonalize();
        Ok(self)
    }

    /// Same `V`, different strength.
    pub fn with_epsilon(&self, epsilon: T) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::invalid("epsilon", "must be finite"));
        }
        let mut m = self.clone();
        m.epsilon = epsilon;
        m.diagonalize();
        Ok(m)
    }

    fn diagonalize(&mut self) {
        let h = self.hamiltonian();
        let eig = SymmetricEigen::new(h);
        self.spectrum = eig.eigenvalues;
        self.eigenvectors = eig.eigenvectors;
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    pub fn labels(&self) -> &[QuantumNumbers<T>] {
        &self.labels
    }

    pub fn energies(&self) -> &DVector<T> {
        &self.energies
    }

    /// Unscaled perturbation matrix `V_ij = <i| gamma^0 gamma^mu A_mu |j>`.
    pub fn perturbation(&self) -> &DMatrix<Complex<T>> {
        &self.perturbation
    }

    /// `eps V`.
    pub fn scaled_perturbation(&self) -> DMatrix<Complex<T>> {
        &self.perturbation * creal(self.epsilon)
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// Total constant removed from the diagonal of `V`.
    pub fn diagonal_shift(&self) -> T {
        self.diagonal_shift
    }

    pub fn spectrum(&self) -> &DVector<T> {
        &self.spectrum
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex<T>> {
        &self.eigenvectors
    }

    /// Dense `diag(E) + eps V`.
    pub fn hamiltonian(&self) -> DMatrix<Complex<T>> {
        let mut h = self.scaled_perturbation();
        for i in 0..self.dimension() {
            h[(i, i)] += creal(self.energies[i]);
        }
        h
    }

    /// `max |V - V^dagger|`.
    pub fn hermiticity_defect(&self) -> T {
        let v = &self.perturbation;
        let mut worst = T::zero();
        for i in 0..v.nrows() {
            for j in 0..v.ncols() {
                worst = worst.max(cabs(v[(i, j)] - v[(j, i)].conj()));
            }
        }
        worst
    }

    /// `max |Q diag(lambda) Q^dagger - H| / max(|H|, 1)`.
    pub fn reconstruction_error(&self) -> T {
        let q = &self.eigenvectors;
        let lam = DMatrix::from_diagonal(&self.spectrum.map(creal));
        let rec = q * lam * q.adjoint();
        let h = self.hamiltonian();
        let scale = h.iter().fold(T::one(), |a, z| a.max(cabs(*z)));
        let err = (rec - h).iter().fold(T::zero(), |a, z| a.max(cabs(*z)));
        err / scale
    }

    /// `exp(-i H t) state` with `H` the perturbed or unperturbed Hamiltonian.
    pub fn evolve(&self, state: &DVector<Complex<T>>, t: T, which: Evolution) -> DVector<Complex<T>> {
        assert_eq!(state.len(), self.dimension(), "state dimension mismatch");
        match which {
            Evolution::Unperturbed => DVector::from_iterator(
                state.len(),
                state.iter().zip(self.energies.iter()).map(|(c, &e)| *c * cis(-e * t)),
            ),
            Evolution::Perturbed => {
                let q = &self.eigenvectors;
                let mut a = q.ad_mul(state);
                for (ai, &l) in a.iter_mut().zip(self.spectrum.iter()) {
                    *ai *= cis(-l * t);
                }
                q * a
            }
        }
    }

    /// `<psi| U_0(t)^dagger V U_0(t) |psi>` with the unscaled `V`.
    pub fn interaction_expectation(&self, state: &DVector<Complex<T>>, t: T) -> T {
        let c = self.evolve(state, t, Evolution::Unperturbed);
        let vc = &self.perturbation * &c;
        c.dotc(&vc).re
    }

    pub fn echo_operator(&self, t: T) -> EchoOperator<T> {
        let d = self.dimension();
        let q = &self.eigenvectors;
        let mut right = q.adjoint();
        for (i, &l) in self.spectrum.iter().enumerate() {
            let ph = cis(-l * t);
            right.row_mut(i).iter_mut().for_each(|z| *z *= ph);
        }
        let mut m = q * right;
        for (i, &e) in self.energies.iter().enumerate() {
            let ph = cis(e * t);
            m.row_mut(i).iter_mut().for_each(|z| *z *= ph);
        }
        debug_assert_eq!(m.nrows(), d);
        EchoOperator { time: t, matrix: m }
    }
}

/// `M_t = U_t^dagger U_t(eps)` in the truncated basis.
#[derive(Debug, Clone)]
pub struct EchoOperator<T: Real> {
    pub time: T,
    pub matrix: DMatrix<Complex<T>>,
}

impl<T: Real> EchoOperator<T> {
    pub fn apply(&self, state: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        &self.matrix * state
    }

    /// `<psi| M_t |psi>`.
    pub fn expectation(&self, state: &DVector<Complex<T>>) -> Complex<T> {
        state.dotc(&self.apply(state))
    }

    /// `max |M^dagger M - I|`.
    pub fn unitarity_defect(&self) -> T {
        let p = self.matrix.ad_mul(&self.matrix);
        let mut worst = T::zero();
        for i in 0..p.nrows() {
            for j in 0..p.ncols() {
                let target = if i == j { creal(T::one()) } else { czero() };
                worst = worst.max(cabs(p[(i, j)] - target));
            }
        }
        worst
    }
}

/// Position-space echo kernel `M'(x, x') = gamma^0 sum_ij psi_i(x) M_ij psi_j(x')^dagger`,
/// stored as a `(4 nodes) x (4 nodes)` matrix with `[node][component]` layout.
#[derive(Debug, Clone)]
pub struct EchoKernel<T: Real> {
    grid: TransverseGrid<T>,
    kz: T,
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> EchoKernel<T> {
    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn grid(&self) -> &TransverseGrid<T> {
        &self.grid
    }

    /// `int int bar(bra)(x) M'(x, x') ket(x') d^2x d^2x'` with `bar(psi) = psi^dagger gamma^0`.
    pub fn contract(&self, bra: &SpinorField<T>, ket: &SpinorField<T>) -> Result<Complex<T>> {
        for f in [bra, ket] {
            if f.grid() != &self.grid || f.kz() != self.kz {
                return Err(Error::GridMismatch("field does not match the kernel grid".into()));
            }
        }
        let n = 4 * self.grid.len();
        let bar = DVector::from_iterator(n, bra.data().iter().flat_map(|s| dirac::beta(s).into_iter()));
        let k = DVector::from_iterator(n, ket.data().iter().flat_map(|s| s.iter().copied()));
        let w = self.grid.cell_area();
        Ok(bar.dotc(&(&self.matrix * k)) * creal(w * w))
    }
}

/// Assemble the position-space echo kernel at time `t`.
pub fn echo_kernel<T: Real>(
    model: &HamiltonianModel<T>,
    basis: &SampledBasis<T>,
    t: T,
    ceiling_bytes: usize,
) -> Result<EchoKernel<T>> {
    if basis.dimension() != model.dimension() {
        return Err(Error::invalid("basis", "basis and model dimensions differ"));
    }
    let n = 4 * basis.grid().len();
    let bytes = n.saturating_mul(n).saturating_mul(std::mem::size_of::<Complex<T>>());
    if bytes > ceiling_bytes {
        return Err(Error::MemoryCeiling {
            bytes,
            ceiling: ceiling_bytes,
        });
    }
    let m = model.echo_operator(t).matrix;
    let phi = basis.matrix();
    let mut left = phi * m;
    // gamma^0 on the spinor index of x
    for r in 0..n {
        if r % 4 >= 2 {
            left.row_mut(r).iter_mut().for_each(|z| *z = -*z);
        }
    }
    let matrix = left * phi.adjoint();
    debug_assert_eq!(matrix.nrows(), n);
    Ok(EchoKernel {
        grid: *basis.grid(),
        kz: basis.params().kz,
        matrix,
    })
}

/// Sample the basis and assemble the model in one step.
pub fn assemble<T: Real>(
    params: ParticleParams<T>,
    pert: &PerturbationField<T>,
    truncation: &BasisTruncation,
    grid: TransverseGrid<T>,
    options: &AssembleOptions,
) -> Result<(HamiltonianModel<T>, SampledBasis<T>)> {
    if truncation.dimension() > options.dimension_ceiling {
        return Err(Error::TruncationTooLarge {
            dimension: truncation.dimension(),
            ceiling: options.dimension_ceiling,
        });
    }
    pert.check_resolution(&grid)?;
    let basis = SampledBasis::new(params, truncation, grid)?;
    let model = HamiltonianModel::assemble(&basis, pert, options)?;
    Ok((model, basis))
}
