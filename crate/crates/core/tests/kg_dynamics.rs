use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relecho::kg::{lab_mode_fidelity, rest_mode_fidelity, DEFAULT_KG_CEILING};
use relecho::perturbative::lorentz_factor;
use relecho::*;

const MASS: f64 = 1.0;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn grid(points: usize) -> KgGrid<f64> {
    KgGrid::new(20.0, points).unwrap()
}

fn bump() -> ScalarProfile<f64> {
    ScalarProfile::Gaussian {
        amplitude: 1.0,
        width: 1.5,
        center: 0.8,
    }
}

#[test]
fn plane_wave_norms_and_orthogonality() {
    let g = grid(64);
    let p = KgField::plane_wave(g, 2, MASS, true);
    let n = KgField::plane_wave(g, 2, MASS, false);
    let q = KgField::plane_wave(g, -3, MASS, true);
    assert!((kg_inner(&p, &p).unwrap() - c(1.0)).norm() < 1e-12);
    assert!((kg_inner(&n, &n).unwrap() + c(1.0)).norm() < 1e-12);
    assert!(kg_inner(&p, &q).unwrap().norm() < 1e-10);
    assert!(kg_inner(&p, &n).unwrap().norm() < 1e-10);
}

#[test]
fn inner_product_rejects_mismatched_grids() {
    let a = KgField::plane_wave(grid(64), 1, MASS, true);
    let b = KgField::plane_wave(grid(32), 1, MASS, true);
    assert!(matches!(kg_inner(&a, &b), Err(Error::GridMismatch(_))));
}

#[test]
fn form_is_hermitian_but_indefinite() {
    let g = grid(64);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut random = || {
        let mut v = || {
            (0..64)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        KgField::new(g, v(), v()).unwrap()
    };
    let (a, b) = (random(), random());
    let ab = kg_inner(&a, &b).unwrap();
    let ba = kg_inner(&b, &a).unwrap();
    assert!((ab - ba.conj()).norm() < 1e-13);
    assert!(kg_inner(&a, &a).unwrap().im.abs() < 1e-13);
}

#[test]
fn free_mode_rotates_and_keeps_its_norm() {
    let g = grid(64);
    let sys = KgSystem::new(g, MASS, 0.0, &ScalarProfile::Zero).unwrap();
    let s = KgField::plane_wave(g, 3, MASS, true);
    let k = g.wavenumber(3);
    let omega = (k * k + MASS * MASS).sqrt();
    let t = 400.0;
    let out = kg_evolve(&sys, &s, t).unwrap();
    let phase = C64::from_polar(1.0, -omega * t);
    for i in 0..64 {
        assert!((out.phi[i] - s.phi[i] * phase).norm() < 1e-8);
    }
    assert!((kg_inner(&out, &out).unwrap().re - 1.0).abs() < 1e-8);
    assert_eq!(kg_evolve(&sys, &s, 0.0).unwrap(), s);
}

#[test]
fn constant_potential_shifts_the_mode_frequencies() {
    // free positive-frequency data splits into the shifted modes
    // nu = eps a + omega and eps a - omega with weights (2w - eps a) / 2w and eps a / 2w
    let g = grid(64);
    let (eps, a) = (1e-3, 0.7);
    let sys = KgSystem::new(g, MASS, eps, &ScalarProfile::Constant { value: a }).unwrap();
    let s = KgField::plane_wave(g, 1, MASS, true);
    let k = g.wavenumber(1);
    let w = (k * k + MASS * MASS).sqrt();
    let ea = eps * a;
    let (up, down) = ((2.0 * w - ea) / (2.0 * w), ea / (2.0 * w));
    for t in [5.0, 30.0] {
        let out = kg_evolve(&sys, &s, t).unwrap();
        let shift = C64::from_polar(up, -(ea + w) * t) + C64::from_polar(down, -(ea - w) * t);
        let worst = (0..64)
            .map(|i| (out.phi[i] - s.phi[i] * shift).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6 * s.phi[0].norm(), "t {t}: {worst}");
        let f = kg_fidelity(&sys, &s, t).unwrap();
        let expect = C64::from_polar((2.0 * w + ea) * up / (2.0 * w), -ea * t)
            + C64::from_polar(ea * down / (2.0 * w), (2.0 * w - ea) * t);
        assert!((f - expect).norm() < 1e-10, "{f} vs {expect}");
        assert!((f - rest_mode_fidelity(eps, a, t)).norm() < 1e-6);
    }
}

#[test]
fn unperturbed_fidelity_is_one() {
    let g = grid(64);
    let s = KgField::gaussian_packet(g, MASS, -2.0, 1.5, 0.6).unwrap();
    let sys = KgSystem::new(g, MASS, 0.0, &bump()).unwrap();
    let times: Vec<f64> = (0..=10).map(|k| 5.0 * k as f64).collect();
    for f in kg_fidelity_series(&sys, &s, &times).unwrap() {
        assert!((f - c(1.0)).norm() < 1e-8);
    }
    let pert = sys.with_epsilon(0.05);
    assert!((kg_fidelity(&pert, &s, 0.0).unwrap() - c(1.0)).norm() < 1e-14);
}

#[test]
fn series_and_single_time_fidelity_agree() {
    let g = grid(64);
    let s = KgField::gaussian_packet(g, MASS, -2.0, 1.5, 0.6).unwrap();
    let sys = KgSystem::new(g, MASS, 0.05, &bump()).unwrap();
    let series = kg_fidelity_series(&sys, &s, &[3.0, 9.0]).unwrap();
    // the incremental series restarts the step schedule, so the two routes
    // differ only by integrator error
    assert!((series[1] - kg_fidelity(&sys, &s, 9.0).unwrap()).norm() < 1e-8);
    assert!(series[1].norm() < 1.0);
}

#[test]
fn free_propagator_preserves_the_form() {
    let sys = KgSystem::new(grid(32), MASS, 0.0, &ScalarProfile::Zero).unwrap();
    assert!(KgPropagator::assemble(&sys, 120.0).unwrap().form_defect() < 1e-8);
}

#[test]
fn kernel_route_matches_direct_fidelity() {
    let g = grid(64);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..3 {
        let center = rng.gen_range(-4.0..4.0);
        let width = rng.gen_range(1.0..2.5);
        let k0 = rng.gen_range(-1.0..1.0);
        let s = KgField::gaussian_packet(g, MASS, center, width, k0).unwrap();
        let sys = KgSystem::new(g, MASS, rng.gen_range(0.01..0.2), &bump()).unwrap();
        let t = rng.gen_range(1.0..15.0);
        let kernel = kg_echo_kernel(&sys, t, DEFAULT_KG_CEILING).unwrap();
        let via_kernel = kernel.contract(&s).unwrap();
        let direct = kg_fidelity(&sys, &s, t).unwrap();
        assert!((via_kernel - direct).norm() < 1e-6, "{via_kernel} vs {direct}");
    }
}

#[test]
fn free_kernel_contracts_to_one() {
    let g = grid(64);
    let s = KgField::gaussian_packet(g, MASS, 1.0, 2.0, -0.4).unwrap();
    let sys = KgSystem::new(g, MASS, 0.0, &bump()).unwrap();
    for t in [0.0, 4.0, 20.0] {
        let k = kg_echo_kernel(&sys, t, DEFAULT_KG_CEILING).unwrap();
        assert!((k.contract(&s).unwrap() - c(1.0)).norm() < 1e-6, "t {t}");
    }
    let pert = sys.with_epsilon(0.3);
    let k = kg_echo_kernel(&pert, 0.0, DEFAULT_KG_CEILING).unwrap();
    assert!((k.contract(&s).unwrap() - c(1.0)).norm() < 1e-6);
}

#[test]
fn kernel_over_memory_ceiling_is_rejected() {
    let sys = KgSystem::new(grid(64), MASS, 0.1, &bump()).unwrap();
    assert!(matches!(
        kg_echo_kernel(&sys, 1.0, 1 << 16),
        Err(Error::MemoryCeiling { .. })
    ));
}

#[test]
fn oversized_step_is_a_stability_violation() {
    let g = grid(64);
    let sys = KgSystem::new(g, MASS, 0.5, &ScalarProfile::Constant { value: 1.0 }).unwrap();
    let bound = sys.stability_bound();
    assert!((bound - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    let s = KgField::plane_wave(g, 1, MASS, true);
    let bad = sys.clone().with_step(1.5 * bound).unwrap();
    assert!(matches!(
        kg_evolve(&bad, &s, 3.0),
        Err(Error::StabilityViolation { .. })
    ));
    assert!(kg_evolve(&sys.with_step(0.9 * bound).unwrap(), &s, 3.0).is_ok());
}

#[test]
fn boosted_mode_reproduces_rest_series_at_dilated_times() {
    let (eps, a) = (0.02, 0.6);
    for k in [0.5, 1.0, 2.0] {
        let gamma = lorentz_factor(k, MASS).unwrap();
        for t in [1.0, 10.0, 100.0] {
            let lab = lab_mode_fidelity(eps, a, k, MASS, gamma * t).unwrap();
            assert!((lab - rest_mode_fidelity(eps, a, t)).norm() < 1e-6);
        }
    }
}
