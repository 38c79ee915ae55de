mod common;

use nalgebra::DMatrix;
use relecho::landau::{eigen_residual, orbital_radial};
use relecho::*;

fn unit_params(kz: f64) -> Params {
    Params::new(1.0, 1.0, kz).unwrap()
}

/// Dirac operator of the angular-momentum-zero sector reduced to the radial
/// line (`u = sqrt(r) f`), on a staggered grid: upper component at
/// `(i + 1/2) dr`, lower component at `(i + 1) dr`, coupled by
/// `d/dr - (1/2)/r + H r / 2`.
fn radial_dirac_spectrum(mass: f64, field: f64, radius: f64, cells: usize) -> Vec<f64> {
    let dr = radius / cells as f64;
    let m = cells;
    let mut h = DMatrix::<f64>::zeros(2 * m - 1, 2 * m - 1);
    for i in 0..m {
        h[(i, i)] = mass;
    }
    for q in 0..(m - 1) {
        h[(m + q, m + q)] = -mass;
        let r = (q + 1) as f64 * dr;
        let w = -0.5 / r + field * r / 2.0;
        // (D g)_q = (g_{q+1} - g_q) / dr + w (g_q + g_{q+1}) / 2
        let a = -1.0 / dr + w / 2.0;
        let b = 1.0 / dr + w / 2.0;
        h[(m + q, q)] = a;
        h[(q, m + q)] = a;
        h[(m + q, q + 1)] = b;
        h[(q + 1, m + q)] = b;
    }
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

#[test]
fn first_excited_energy_matches_discretized_dirac_operator() {
    let oracle = radial_dirac_spectrum(1.0, 1.0, 12.0, 1200);
    let first_excited = oracle.iter().copied().find(|&e| e > 1.1).unwrap();
    let lowest_positive = oracle.iter().copied().find(|&e| e > 0.0).unwrap();
    let q = QuantumNumbers::from_level(1, 0, Spin::Aligned, 0.0).unwrap();
    let e = landau_energy(&q, &unit_params(0.0));
    assert!((e - 3f64.sqrt()).abs() < 1e-15);
    assert!(
        ((first_excited - e) / e).abs() < 1e-4,
        "oracle {first_excited}, closed form {e}"
    );
    assert!((lowest_positive - 1.0).abs() < 1e-4);
}

#[test]
fn lowest_level_energies() {
    let p = unit_params(0.0);
    assert_eq!(landau_energy(&QuantumNumbers::lowest(0.0), &p), 1.0);
    let p = Params::new(1.3, 0.7, 0.9).unwrap();
    let e = landau_energy(&QuantumNumbers::lowest(0.9), &p);
    assert!((e - (1.3f64 * 1.3 + 0.81).sqrt()).abs() < 1e-15);
}

#[test]
fn ground_orbital_is_normalized_and_orthogonal() {
    let grid = Grid::new(10.0, 128).unwrap();
    let g0 = landau_orbital(0, 0, 1.0, &grid).unwrap();
    let g1 = landau_orbital(1, 0, 1.0, &grid).unwrap();
    let w = grid.cell_area();
    let n0: f64 = g0.iter().map(|z| z.norm_sqr()).sum::<f64>() * w;
    let ov: C64 = g0.iter().zip(&g1).map(|(a, b)| a.conj() * b).sum::<C64>() * w;
    assert!((n0 - 1.0).abs() < 1e-8);
    assert!(ov.norm() < 1e-8);
    // width 1/sqrt(H): |phi|^2 = exp(-r^2 / 2) / (2 pi)
    for (k, (x, y)) in grid.positions().enumerate().step_by(997) {
        let exact = (-(x * x + y * y) / 2.0).exp() / (2.0 * std::f64::consts::PI);
        assert!((g0[k].norm_sqr() - exact).abs() < 1e-8);
    }
}

#[test]
fn orbital_peak_radius_matches_dense_scan_of_closed_form() {
    // n = 2, ml = 3: density ~ r^6 [L_2^3(r^2/2)]^2 exp(-r^2/2),
    // L_2^3(u) = u^2/2 - 5u + 10
    let density = |r: f64| {
        let u = r * r / 2.0;
        let l = u * u / 2.0 - 5.0 * u + 10.0;
        r.powi(6) * l * l * (-u).exp()
    };
    let mut best = (0.0, 0.0);
    for k in 1..2_000_000 {
        let r = k as f64 * 5e-6;
        let d = density(r);
        if d > best.1 {
            best = (r, d);
        }
    }
    let mut lib = (0.0, 0.0);
    for k in 1..2_000_000 {
        let r = k as f64 * 5e-6;
        let d = orbital_radial(2, 3, 1.0f64, r).powi(2);
        if d > lib.1 {
            lib = (r, d);
        }
    }
    assert!((lib.0 - best.0).abs() < 1e-5, "library {} oracle {}", lib.0, best.0);
    // sampled field peaks within one grid spacing of the oracle radius
    let grid = Grid::new(12.0, 256).unwrap();
    let g = landau_orbital(2, 3, 1.0, &grid).unwrap();
    let (k, _) = g
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .unwrap();
    let (x, y) = grid.position(k);
    assert!(((x * x + y * y).sqrt() - best.0).abs() < grid.spacing());
}

#[test]
fn lowest_spinor_has_no_lower_components() {
    let grid = Grid::new(8.0, 64).unwrap();
    let s = landau_spinor(&QuantumNumbers::lowest(0.0), &unit_params(0.0), &grid).unwrap();
    assert!(s
        .data()
        .iter()
        .all(|v| v[2] == C64::new(0.0, 0.0) && v[3] == C64::new(0.0, 0.0)));
    assert!((s.norm() - 1.0).abs() < 1e-8);
}

#[test]
fn distinct_spinors_are_orthogonal() {
    let p = unit_params(0.6);
    let grid = Grid::new(12.0, 160).unwrap();
    let trunc = BasisTruncation::new(2, -2, 3).unwrap();
    let basis = Basis::new(p, &trunc, grid).unwrap();
    let gram = basis.gram();
    let d = basis.dimension();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    assert!(worst < 1e-6, "Gram deviation {worst:e}");
}

#[test]
fn excited_spinor_residual_is_small_and_converges_at_stencil_order() {
    let p = unit_params(0.0);
    let q = QuantumNumbers::from_level(1, 0, Spin::Anti, 0.0).unwrap();
    let e = landau_energy(&q, &p);
    let res = |n: usize, st: Stencil| {
        let grid = Grid::new(8.0, n).unwrap();
        eigen_residual(&landau_spinor(&q, &p, &grid).unwrap(), e, &p, st)
    };
    assert!(res(128, Stencil::default()) <= 1e-3);
    let (r128, r256) = (res(128, Stencil::Central2), res(256, Stencil::Central2));
    let order = (r128 / r256).log2();
    assert!((order - 2.0).abs() < 0.1, "order {order}");
    assert!(res(256, Stencil::Central4) < r256 / 10.0);
    let q = QuantumNumbers::from_level(1, 2, Spin::Aligned, 0.0).unwrap();
    let grid = Grid::new(10.0, 160).unwrap();
    assert!(eigen_residual(&landau_spinor(&q, &p, &grid).unwrap(), e, &p, Stencil::default()) <= 1e-3);
}

#[test]
fn degenerate_set_of_lowest_level_spans_the_ml_range() {
    let p = unit_params(0.0);
    let trunc = BasisTruncation::new(0, 0, 7).unwrap();
    let set = degenerate_set(&QuantumNumbers::lowest(0.0), &p, &trunc, 1e-9).unwrap();
    assert_eq!(set.len(), 8);
}

#[test]
fn degenerate_sets_match_brute_force_scan() {
    let p = Params::new(1.0, 0.8, 0.3).unwrap();
    let trunc = BasisTruncation::new(1, -2, 4).unwrap();
    let labels = trunc.labels(0.3);
    let energies: Vec<f64> = labels.iter().map(|q| landau_energy(q, &p)).collect();
    for (i, q) in labels.iter().enumerate() {
        let brute = energies
            .iter()
            .filter(|&&e| (e - energies[i]).abs() <= 1e-9 * energies[i])
            .count();
        let set = degenerate_set(q, &p, &trunc, 1e-9).unwrap();
        assert_eq!(set.len(), brute);
        assert!(set.contains(q));
    }
    let outside = QuantumNumbers::lowest(0.3).with_ml(9).unwrap();
    assert!(matches!(
        degenerate_set(&outside, &p, &trunc, 1e-9),
        Err(Error::EmptyTruncation(_))
    ));
}

#[test]
fn distinct_levels_give_disjoint_sets_at_zero_tolerance() {
    let p = unit_params(0.0);
    let trunc = BasisTruncation::new(1, 0, 3).unwrap();
    let a = degenerate_set(&QuantumNumbers::lowest(0.0), &p, &trunc, 0.0).unwrap();
    let b = degenerate_set(
        &QuantumNumbers::from_level(1, 0, Spin::Aligned, 0.0).unwrap(),
        &p,
        &trunc,
        0.0,
    )
    .unwrap();
    assert!(a.iter().all(|q| !b.contains(q)));
}

#[test]
fn small_grids_are_rejected() {
    let grid = Grid::new(4.0, 64).unwrap();
    assert!(matches!(landau_orbital(0, 0, 1.0, &grid), Err(Error::GridTooSmall(_))));
    let grid = Grid::new(6.5, 64).unwrap();
    assert!(matches!(
        landau_spinor(
            &QuantumNumbers::lowest(0.0).with_ml(12).unwrap(),
            &unit_params(0.0),
            &grid
        ),
        Err(Error::GridTooSmall(_))
    ));
}
