#![allow(dead_code)]

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use relecho::*;

/// Gauss-Legendre nodes and weights mapped to `[a, b]`.
pub fn gl_rule(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).unwrap());
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * ((b - a) * x + b + a), 0.5 * (b - a) * w))
        .collect()
}

/// Tensor-product Gauss-Legendre integral of a complex function over a square.
pub fn integrate_square(n: usize, half: f64, f: impl Fn(f64, f64) -> C64) -> C64 {
    let rule = gl_rule(n, -half, half);
    let mut acc = C64::new(0.0, 0.0);
    for &(x, wx) in &rule {
        for &(y, wy) in &rule {
            acc += f(x, y) * (wx * wy);
        }
    }
    acc
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Lowest-level symmetric-gauge orbital `c (x + i y)^ml exp(-H r^2 / 4)`.
pub fn lll_orbital(ml: u32, field: f64, x: f64, y: f64) -> C64 {
    let c = (field / (2.0 * std::f64::consts::PI) * (field / 2.0).powi(ml as i32) / factorial(ml)).sqrt();
    C64::new(x, y).powu(ml) * (c * (-field * (x * x + y * y) / 4.0).exp())
}

/// Off-centre Gaussian scalar bump used by the decay scenarios.
pub fn off_centre_bump(epsilon: f64) -> Perturbation {
    Perturbation::new(
        Profile::GaussianScalar {
            amplitude: 1.0,
            width: 1.0,
            center: [1.5, 0.0],
        },
        epsilon,
    )
    .unwrap()
}

/// Random Hermitian toy with `E` in `[0, 3)`, zero diagonal in `V`, and
/// `degenerate` exact copies of the first energy.
pub fn random_toy(rng: &mut ChaCha8Rng, d: usize, degenerate: usize, eps: f64) -> Model {
    let mut e: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..3.0)).collect();
    for k in 1..=degenerate.min(d - 1) {
        e[k] = e[0];
    }
    let mut v = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            v[(i, j)] = z;
            v[(j, i)] = z.conj();
        }
    }
    Model::from_parts(e, v, eps).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, d: usize) -> DVector<C64> {
    let v = DVector::from_fn(d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn linspace(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_max * k as f64 / n as f64).collect()
}

/// Lowest-level decay scenario in the comoving frame with the diagonal of the
/// lowest state shifted to zero. Returns the unit-strength model, its basis
/// and the index of the lowest state.
pub fn decay_scenario(kz: f64, nu_max: u32, ml_max: i32, extent: f64, points: usize) -> (Model, Basis, usize) {
    let p = Params::new(1.0, 1.0, kz).unwrap();
    let grid = Grid::new(extent, points).unwrap();
    let trunc = BasisTruncation::new(nu_max, -3, ml_max).unwrap();
    let pert = off_centre_bump(1.0).in_frame(Frame::Comoving);
    let basis = Basis::new(p, &trunc, grid).unwrap();
    let i0 = basis.index_of(&Labels::lowest(kz)).unwrap();
    let opts = AssembleOptions {
        reference: Some(i0),
        ..Default::default()
    };
    let model = Model::assemble(&basis, &pert, &opts).unwrap();
    (model, basis, i0)
}

/// Strength that brings `1 - F` to `target` at rest-frame time `t_rest`.
pub fn strength_for(c_rest: f64, target: f64, t_rest: f64) -> f64 {
    (target / (c_rest * t_rest * t_rest)).sqrt()
}

/// Overlap fidelity of basis state `i0` on `samples + 1` times up to `t_max`.
pub fn decay_series(model: &Model, i0: usize, t_max: f64, samples: usize) -> Series {
    let psi = basis_state(model.dimension(), i0);
    fidelity_overlap(model, &psi, &linspace(t_max, samples)).unwrap()
}
