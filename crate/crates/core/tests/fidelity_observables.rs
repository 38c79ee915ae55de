mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relecho::perturbation::TabulatedPotential;
use relecho::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn scenario(kz: f64, n: usize, pert: &Perturbation) -> (Model, Basis) {
    let p = Params::new(1.0, 1.0, kz).unwrap();
    let trunc = BasisTruncation::new(1, -1, 2).unwrap();
    let grid = Grid::new(10.0, n).unwrap();
    assemble(p, pert, &trunc, grid, &AssembleOptions::default()).unwrap()
}

fn bump(eps: f64) -> Perturbation {
    Perturbation::new(
        Profile::GaussianScalar {
            amplitude: 1.0,
            width: 1.2,
            center: [0.7, -0.4],
        },
        eps,
    )
    .unwrap()
}

fn mixed_state(d: usize) -> DVector<C64> {
    let v = DVector::from_fn(d, |i, _| C64::new(1.0 / (1.0 + i as f64), 0.3 * i as f64 / d as f64));
    let n = v.norm();
    v / c(n)
}

#[test]
fn unperturbed_overlap_is_unity() {
    let (model, _) = scenario(0.0, 64, &bump(0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let psi = random_state(&mut rng, model.dimension());
    let s = fidelity_overlap(&model, &psi, &linspace(1000.0, 200)).unwrap();
    for (f, big_f) in s.amplitude().iter().zip(s.fidelity()) {
        assert!((f - c(1.0)).norm() < 1e-10);
        assert!((big_f - 1.0).abs() < 1e-10);
    }
}

#[test]
fn overlap_starts_at_exactly_one() {
    let (model, _) = scenario(0.0, 64, &bump(0.3));
    let psi = mixed_state(model.dimension());
    let s = fidelity_overlap(&model, &psi, &[0.0, 1.0]).unwrap();
    assert!((s.amplitude()[0] - c(1.0)).norm() < 1e-15);
    assert_eq!(s.method(), Method::Overlap);
}

#[test]
fn two_level_amplitude_matches_closed_form() {
    let (d, eps, v) = (0.6, 0.3, 0.5);
    let mut m = DMatrix::from_element(2, 2, c(0.0));
    m[(0, 1)] = c(v);
    m[(1, 0)] = c(v);
    let model = Model::from_parts(vec![d / 2.0, -d / 2.0], m, eps).unwrap();
    let g = eps * v;
    let w = (d * d / 4.0 + g * g).sqrt();
    let times = linspace(60.0, 120);
    let s = fidelity_overlap(&model, &basis_state(2, 0), &times).unwrap();
    for (t, f) in times.iter().zip(s.amplitude()) {
        let a0 = C64::new((w * t).cos(), -(d / 2.0) / w * (w * t).sin());
        let expect = C64::from_polar(1.0, d * t / 2.0) * a0;
        assert!((f - expect).norm() < 1e-10, "t {t}");
    }
}

#[test]
fn current_of_normalized_and_orthogonal_states() {
    let (_, basis) = scenario(0.4, 96, &bump(0.0));
    let a = basis.spinor(0);
    let b = basis.spinor(3);
    assert!((current(&a, &a).unwrap().total_charge() - c(1.0)).norm() < 1e-6);
    assert!(current(&a, &b).unwrap().total_charge().norm() < 1e-6);
}

#[test]
fn lowest_spinor_density_is_the_gaussian() {
    for kz in [0.0, 0.8] {
        let p = Params::new(1.0, 1.0, kz).unwrap();
        let grid = Grid::new(10.0, 64).unwrap();
        let psi = landau_spinor(&Labels::lowest(kz), &p, &grid).unwrap();
        let j = current(&psi, &psi).unwrap();
        for (k, (x, y)) in grid.positions().enumerate() {
            let exact = (-(x * x + y * y) / 2.0).exp() / (2.0 * std::f64::consts::PI);
            assert!((j.components[0][k] - c(exact)).norm() < 1e-12);
        }
    }
}

#[test]
fn mismatched_fields_are_rejected() {
    let (_, coarse) = scenario(0.0, 64, &bump(0.0));
    let (_, fine) = scenario(0.0, 96, &bump(0.0));
    assert!(matches!(
        current(&coarse.spinor(0), &fine.spinor(0)),
        Err(Error::GridMismatch(_))
    ));
}

#[test]
fn current_route_agrees_with_overlap() {
    let pert = bump(0.2);
    let (model, basis) = scenario(0.3, 96, &pert);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let psi = random_state(&mut rng, model.dimension());
    let times = linspace(40.0, 16);
    let a = fidelity_overlap(&model, &psi, &times).unwrap();
    let b = fidelity_current(&model, &basis, &psi, &times).unwrap();
    assert_eq!(b.method(), Method::Current);
    assert!(a.max_amplitude_difference(&b).unwrap() < 1e-6);
    assert!((b.amplitude()[0] - c(1.0)).norm() < 1e-6);
    let free = model.with_epsilon(0.0).unwrap();
    let s = fidelity_current(&free, &basis, &psi, &times).unwrap();
    assert!(s.amplitude().iter().all(|f| (f - c(1.0)).norm() < 1e-6));
}

fn residual(n: usize, eps: f64, psi: impl Fn(usize) -> DVector<C64>, st: Stencil) -> f64 {
    let pert = bump(eps);
    let (model, basis) = scenario(0.3, n, &pert);
    let pair = evolving_pair(&model, &basis, &pert, &psi(model.dimension()), 2.5).unwrap();
    continuity_residual(&pair, &pert, 1.0, 1.0, st).unwrap().residual_norm()
}

#[test]
fn stationary_state_has_small_continuity_residual() {
    let pert = bump(0.0);
    let (model, basis) = scenario(0.3, 128, &pert);
    let pair = evolving_pair(&model, &basis, &pert, &basis_state(model.dimension(), 2), 2.5).unwrap();
    let r = continuity_residual(&pair, &pert, 1.0, 1.0, Stencil::Central4).unwrap();
    assert!(r.residual_norm() < 1e-5);
    assert_eq!(r.rhs_norm(), 0.0);
}

#[test]
fn continuity_residual_converges_at_stencil_order() {
    for eps in [0.0, 0.05] {
        let r64 = residual(64, eps, mixed_state, Stencil::Central2);
        let r128 = residual(128, eps, mixed_state, Stencil::Central2);
        let order = (r64 / r128).log2();
        assert!((order - 2.0).abs() < 0.3, "eps {eps}: order {order}");
    }
}

#[test]
fn continuity_source_balances_the_divergence() {
    let pert = bump(0.05);
    let (model, basis) = scenario(0.3, 128, &pert);
    let pair = evolving_pair(&model, &basis, &pert, &mixed_state(model.dimension()), 2.5).unwrap();
    let r = continuity_residual(&pair, &pert, 1.0, 1.0, Stencil::Central4).unwrap();
    assert!(r.rhs_norm() > 1e-3);
    assert!(r.residual_norm() < 1e-2 * r.rhs_norm());
}

#[test]
fn coarse_grid_is_rejected_by_continuity_check() {
    let pert = Perturbation::new(
        Profile::GaussianScalar {
            amplitude: 1.0,
            width: 4.0,
            center: [0.0, 0.0],
        },
        0.1,
    )
    .unwrap();
    let p = Params::new(1.0, 1.0, 0.0).unwrap();
    let trunc = BasisTruncation::new(0, 0, 1).unwrap();
    let grid = Grid::new(10.0, 32).unwrap();
    let (model, basis) = assemble(p, &pert, &trunc, grid, &AssembleOptions::default()).unwrap();
    let pair = evolving_pair(&model, &basis, &pert, &basis_state(2, 0), 1.0).unwrap();
    assert!(matches!(
        continuity_residual(&pair, &pert, 1.0, 1.0, Stencil::Central2),
        Err(Error::GridTooCoarse(_))
    ));
}

#[test]
fn rate_equation_without_perturbation_stays_at_one() {
    let (model, basis) = scenario(0.0, 64, &bump(0.0));
    let psi = mixed_state(model.dimension());
    let out = fidelity_ode(&model, &basis, &psi, &linspace(50.0, 25)).unwrap();
    assert!(out.series.amplitude().iter().all(|f| *f == c(1.0)));
    assert!(out.fidelity_rate.iter().all(|r| *r == 0.0));
    assert!(out.boundary_flux < 1e-8);
}

#[test]
fn zero_diagonal_reference_state_decays_only_at_second_order() {
    let p = Params::new(1.0, 1.0, 0.0).unwrap();
    let trunc = BasisTruncation::new(0, -3, 10).unwrap();
    let grid = Grid::new(12.0, 96).unwrap();
    let basis = Basis::new(p, &trunc, grid).unwrap();
    let i0 = basis.index_of(&Labels::lowest(0.0)).unwrap();
    let opts = AssembleOptions {
        reference: Some(i0),
        ..Default::default()
    };
    let model = Model::assemble(&basis, &off_centre_bump(1.0), &opts).unwrap();
    let psi = basis_state(model.dimension(), i0);
    let times = linspace(20.0, 10);
    let deviation = |eps: f64| {
        let m = model.with_epsilon(eps).unwrap();
        let ode = fidelity_ode(&m, &basis, &psi, &times).unwrap();
        assert!(ode.series.amplitude().iter().all(|f| (f - c(1.0)).norm() < 1e-14));
        let exact = fidelity_overlap(&m, &psi, &times).unwrap();
        exact
            .amplitude()
            .iter()
            .map(|f| (f - c(1.0)).norm())
            .fold(0.0, f64::max)
    };
    let ratio = deviation(0.02) / deviation(0.01);
    assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn constant_potential_is_a_pure_phase() {
    let (eps, value) = (0.05, 0.8);
    let pert = Perturbation::new(Profile::ConstantScalar { value }, eps).unwrap();
    let (model, basis) = scenario(0.0, 96, &pert);
    let psi = mixed_state(model.dimension());
    let times = linspace(30.0, 30);
    let ode = fidelity_ode(&model, &basis, &psi, &times).unwrap();
    for (t, (f, big_f)) in times
        .iter()
        .zip(ode.series.amplitude().iter().zip(ode.series.fidelity()))
    {
        assert!((f - C64::from_polar(1.0, -eps * value * t)).norm() < 1e-8, "t {t}");
        assert!((big_f - 1.0).abs() < 1e-8);
    }
    assert!(ode.fidelity_rate.iter().all(|r| r.abs() < 1e-8));
}

#[test]
fn rate_equation_follows_overlap_for_short_times() {
    let pert = bump(1e-3);
    let (model, basis) = scenario(0.3, 64, &pert);
    let psi = mixed_state(model.dimension());
    let times = linspace(5.0, 10);
    let ode = fidelity_ode(&model, &basis, &psi, &times).unwrap();
    let exact = fidelity_overlap(&model, &psi, &times).unwrap();
    // agreement to first order: mismatch O(eps^2 t^2)
    assert!(ode.series.max_amplitude_difference(&exact).unwrap() < 1e-5);
    assert!(ode.substeps >= 1);
}

#[test]
fn boundary_flux_above_threshold_is_an_error() {
    let (model, basis) = scenario(0.0, 64, &bump(0.1));
    let psi = mixed_state(model.dimension());
    let times = linspace(3.0, 3);
    let ok = fidelity_ode(&model, &basis, &psi, &times).unwrap();
    assert!(ok.boundary_flux > 0.0 && ok.boundary_flux < 1e-8);
    let err = fidelity_ode_with_threshold(&model, &basis, &psi, &times, ok.boundary_flux / 2.0);
    assert!(matches!(err, Err(Error::BoundaryFluxTooLarge { .. })));
}

#[test]
fn finite_difference_rate_mismatch_scales_quadratically() {
    let pert = bump(1.0);
    let (base, _) = scenario(0.3, 64, &pert);
    let psi = mixed_state(base.dimension());
    let (t, dt) = (4.0, 1e-3);
    let mismatch = |eps: f64| {
        let m = base.with_epsilon(eps).unwrap();
        let s = fidelity_overlap(&m, &psi, &[t - dt, t + dt]).unwrap();
        let fd = (s.amplitude()[1] - s.amplitude()[0]) / c(2.0 * dt);
        (fd - linear_response_rate(&m, &psi, t)).norm()
    };
    let ratio = mismatch(0.02) / mismatch(0.01);
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
}

#[test]
fn constant_shift_of_scalar_potential_only_changes_the_phase() {
    let (eps, shift) = (0.1, 0.35);
    let grid = Grid::new(10.0, 96).unwrap();
    let base = bump(eps);
    let samples = base.lab_samples(&grid, 1.0, 0.0).unwrap();
    let zeros = vec![0.0; grid.len()];
    let shifted = TabulatedPotential {
        grid,
        components: [
            samples.components[0].iter().map(|a| a + shift).collect(),
            zeros.clone(),
            zeros.clone(),
            zeros,
        ],
    };
    let shifted = Perturbation::new(Profile::Tabulated(shifted), eps).unwrap();
    let (m0, _) = scenario(0.0, 96, &base);
    let (m1, _) = scenario(0.0, 96, &shifted);
    let psi = mixed_state(m0.dimension());
    let times = linspace(40.0, 20);
    let a = fidelity_overlap(&m0, &psi, &times).unwrap();
    let b = fidelity_overlap(&m1, &psi, &times).unwrap();
    for (k, t) in times.iter().enumerate() {
        let expect = a.amplitude()[k] * C64::from_polar(1.0, -eps * shift * t);
        assert!((b.amplitude()[k] - expect).norm() < 1e-10);
        assert!((b.fidelity()[k] - a.fidelity()[k]).abs() < 1e-10);
    }
}

#[test]
fn fidelity_never_exceeds_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let model = random_toy(&mut rng, 12, 2, 0.3);
    let psi = random_state(&mut rng, 12);
    let s = fidelity_overlap(&model, &psi, &linspace(300.0, 300)).unwrap();
    assert!(s.max_excess() <= 1e-8);
    assert!(s.fidelity().iter().all(|f| *f <= 1.0 + 1e-8));
}
