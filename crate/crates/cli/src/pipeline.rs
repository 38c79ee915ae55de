//! Subcommand pipelines. Each step is a call into the library; this module
//! only wires configuration to operations and results to files.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relecho::kg::DEFAULT_KG_CEILING;
use relecho::landau::DEFAULT_DEGENERACY_TOL;
use relecho::perturbative::lorentz_factor;
use relecho::*;

use crate::config::{InitialState, MethodKind, Scenario};
use crate::error::CliError;
use crate::output::{num, series_csv, table_csv, Outputs};

/// Assembled Landau scenario at one longitudinal momentum.
pub struct Landau {
    pub params: Params,
    pub pert: Perturbation,
    pub basis: Basis,
    pub model: Model,
    pub state: InitialState,
    /// Basis indices and weights of the reference state or beam.
    pub members: Vec<(usize, f64)>,
}

impl Landau {
    pub fn build(sc: &Scenario, kz: Option<f64>) -> Result<Self, CliError> {
        let mut params = sc.params()?;
        if let Some(k) = kz {
            params = params.with_kz(k).map_err(|e| CliError::from_core_in("particle", e))?;
        }
        let pert = sc.perturbation()?;
        let truncation = sc.truncation()?;
        let grid = sc.grid()?;
        grid.check_magnetic_extent(params.field)
            .map_err(|e| CliError::from_core_in("grid", e))?;
        pert.check_resolution(&grid)
            .map_err(|e| CliError::from_core_in("grid", e))?;
        let state = sc.initial_state(params.kz)?;
        let basis = Basis::new(params, &truncation, grid).map_err(|e| CliError::from_core_in("basis", e))?;
        let reference = match &state {
            InitialState::Label(q) if sc.zero_diagonal() => basis.index_of(q),
            _ => None,
        };
        let options = AssembleOptions {
            reference,
            dimension_ceiling: truncation.dimension_ceiling,
        };
        let model = Model::assemble(&basis, &pert, &options)?;
        let members = match &state {
            InitialState::Label(q) => vec![(basis.index_of(q).expect("label checked against truncation"), 1.0)],
            InitialState::Random => Vec::new(),
            InitialState::Beam(e) => e.resolve(&model, DEFAULT_DEGENERACY_TOL)?,
        };
        Ok(Self {
            params,
            pert,
            basis,
            model,
            state,
            members,
        })
    }

    fn single_state(&self, seed: u64, what: &str) -> Result<DVector<C64>, CliError> {
        let d = self.model.dimension();
        match &self.state {
            InitialState::Label(_) => Ok(basis_state(d, self.members[0].0)),
            InitialState::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let v = DVector::from_fn(d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                Ok(v.normalize())
            }
            InitialState::Beam(_) => Err(CliError::Validation(format!(
                "state: the {what} method needs a single state, not a beam"
            ))),
        }
    }

    /// Overlap series of the configured state, or the incoherent beam average.
    pub fn overlap(&self, times: &[f64], seed: u64) -> Result<Series, CliError> {
        match &self.state {
            InitialState::Beam(_) => Ok(fidelity_ensemble(&self.model, &self.members, times)?),
            _ => Ok(fidelity_overlap(
                &self.model,
                &self.single_state(seed, "overlap")?,
                times,
            )?),
        }
    }

    pub fn series(&self, method: MethodKind, times: &[f64], seed: u64) -> Result<Series, CliError> {
        match method {
            MethodKind::Overlap => self.overlap(times, seed),
            MethodKind::Echo => Ok(fidelity_echo(&self.model, &self.single_state(seed, "echo")?, times)?),
            MethodKind::Current => Ok(fidelity_current(
                &self.model,
                &self.basis,
                &self.single_state(seed, "current")?,
                times,
            )?),
            MethodKind::Ode => {
                Ok(fidelity_ode(&self.model, &self.basis, &self.single_state(seed, "ode")?, times)?.series)
            }
        }
    }

    /// Correlation coefficient of the reference state or beam at this momentum.
    pub fn coefficient(&self) -> Result<f64, CliError> {
        match &self.state {
            InitialState::Label(_) => Ok(c_coefficient(&self.model, self.members[0].0, DEFAULT_DEGENERACY_TOL)?.value),
            InitialState::Beam(e) => Ok(beam_c(e, &self.model, DEFAULT_DEGENERACY_TOL)?.value),
            InitialState::Random => Err(CliError::Validation(
                "state: perturbative predictions need a basis state or a beam".into(),
            )),
        }
    }
}

fn write_series(out: &mut Outputs, name: &str, s: &Series, label: &str) {
    out.add(name, series_csv(s.times(), s.amplitude(), s.fidelity(), label));
}

pub fn spectrum(sc: &Scenario) -> Result<Outputs, CliError> {
    let p = sc.params()?;
    let truncation = sc.truncation()?;
    let mut seen: Vec<Labels> = Vec::new();
    let mut rows: Vec<(f64, Vec<String>)> = Vec::new();
    for q in truncation.labels(p.kz) {
        if seen.contains(&q) {
            continue;
        }
        let set = degenerate_set(&q, &p, &truncation, DEFAULT_DEGENERACY_TOL)?;
        let mut ml: Vec<i32> = set.iter().map(|s| s.ml).collect();
        ml.sort_unstable();
        ml.dedup();
        let e = landau_energy(&q, &p);
        let ml = ml.iter().map(i32::to_string).collect::<Vec<_>>().join(" ");
        rows.push((e, vec![q.level().to_string(), num(e), set.len().to_string(), ml]));
        seen.extend(set);
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rows: Vec<Vec<String>> = rows.into_iter().map(|(_, r)| r).collect();
    let mut out = Outputs::default();
    out.add(
        "spectrum.csv",
        table_csv(&["nu", "energy", "degeneracy", "ml_values"], &rows),
    );
    Ok(out)
}

pub fn evolve(sc: &Scenario, seed: u64) -> Result<Outputs, CliError> {
    let landau = Landau::build(sc, None)?;
    let times = sc.times()?;
    let mut out = Outputs::default();
    evolve_into(&mut out, sc, &landau, &times, seed)?;
    Ok(out)
}

fn evolve_into(
    out: &mut Outputs,
    sc: &Scenario,
    landau: &Landau,
    times: &[f64],
    seed: u64,
) -> Result<Series, CliError> {
    let overlap = landau.overlap(times, seed)?;
    let mut methods = sc.methods();
    if !methods.contains(&MethodKind::Overlap) {
        methods.insert(0, MethodKind::Overlap);
    }
    for m in methods {
        let s = if m == MethodKind::Overlap {
            overlap.clone()
        } else {
            landau.series(m, times, seed)?
        };
        write_series(out, &format!("fidelity_{}.csv", m.label()), &s, m.label());
    }
    Ok(overlap)
}

/// Rest-frame coefficient and the prediction built from it.
struct Prediction {
    c_at_kz: f64,
    c_rest: f64,
    series: Series,
    decay_rate: f64,
}

fn predict(sc: &Scenario, landau: &Landau, times: &[f64], out: &mut Outputs) -> Result<Prediction, CliError> {
    let p = landau.params;
    let c_at_kz = landau.coefficient()?;
    let c_rest = if p.kz == 0.0 {
        c_at_kz
    } else {
        Landau::build(sc, Some(0.0))?.coefficient()?
    };
    let eps = landau.pert.epsilon;
    let series = predicted_series(c_rest, eps, p.kz, p.mass, times)?;
    let decay_rate = 1.0 - predicted_series(c_rest, eps, p.kz, p.mass, &[1.0])?.fidelity()[0];
    for w in compton_guard(p.kz, p.mass, None).warnings {
        out.warn(false, w);
    }
    Ok(Prediction {
        c_at_kz,
        c_rest,
        series,
        decay_rate,
    })
}

pub fn perturbative(sc: &Scenario, seed: u64) -> Result<Outputs, CliError> {
    let landau = Landau::build(sc, None)?;
    let times = sc.times()?;
    let mut out = Outputs::default();
    let pred = predict(sc, &landau, &times, &mut out)?;
    let p = landau.params;
    let rows = vec![
        vec!["c_at_kz".to_string(), num(pred.c_at_kz)],
        vec!["c_rest".to_string(), num(pred.c_rest)],
        vec![
            "suppression".to_string(),
            num(perturbative::suppression_factor(p.kz, p.mass)?),
        ],
        vec!["epsilon".to_string(), num(landau.pert.epsilon)],
        vec!["kz".to_string(), num(p.kz)],
        vec!["decay_rate".to_string(), num(pred.decay_rate)],
    ];
    out.add("coefficient.csv", table_csv(&["quantity", "value"], &rows));
    write_series(&mut out, "prediction.csv", &pred.series, Method::Perturbative.as_str());

    let momenta = sc.boost_momenta();
    if !momenta.is_empty() {
        let rest = Landau::build(sc, Some(0.0))?;
        let s0 = rest.overlap(&times, seed)?;
        let mut rows = Vec::new();
        for k in momenta {
            let gamma = lorentz_factor(k, p.mass)?;
            let dilated: Vec<f64> = times.iter().map(|t| t * gamma).collect();
            let moving = Landau::build(sc, Some(k))?;
            let sk = moving.overlap(&dilated, seed)?;
            let r = boost_check(&sk, &s0, k, p.mass)?;
            if !r.passed {
                out.warn(true, format!("boost check at kz = {k} off by {:e}", r.relative_error));
            }
            rows.push(vec![
                num(k),
                num(r.expected),
                num(r.ratio),
                num(r.relative_error),
                r.passed.to_string(),
            ]);
        }
        out.add(
            "boost_report.csv",
            table_csv(&["kz", "expected", "ratio", "relative_error", "passed"], &rows),
        );
    }
    Ok(out)
}

pub fn run(sc: &Scenario, seed: u64) -> Result<Outputs, CliError> {
    let landau = Landau::build(sc, None)?;
    let times = sc.times()?;
    let mut out = Outputs::default();
    let overlap = evolve_into(&mut out, sc, &landau, &times, seed)?;
    let pred = predict(sc, &landau, &times, &mut out)?;
    write_series(&mut out, "prediction.csv", &pred.series, Method::Perturbative.as_str());
    let header = [
        "coefficient",
        "intercept",
        "relative_residual",
        "points",
        "predicted",
        "relative_error",
        "status",
    ];
    let row = match fit_quadratic_decay(&overlap) {
        Ok(fit) => {
            let rel = if pred.decay_rate > 0.0 {
                (fit.coefficient - pred.decay_rate) / pred.decay_rate
            } else {
                f64::INFINITY
            };
            vec![
                num(fit.coefficient),
                num(fit.intercept),
                num(fit.relative_residual),
                fit.points.to_string(),
                num(pred.decay_rate),
                num(rel),
                "ok".to_string(),
            ]
        }
        Err(e) => {
            out.warn(true, e.to_string());
            let nan = num(f64::NAN);
            vec![
                nan.clone(),
                nan.clone(),
                nan.clone(),
                "0".into(),
                num(pred.decay_rate),
                nan,
                "fit_failed".into(),
            ]
        }
    };
    out.add("fit_report.csv", table_csv(&header, &[row]));
    Ok(out)
}

pub fn kg(sc: &Scenario) -> Result<Outputs, CliError> {
    let sys = sc.kg_system()?;
    let state = sc.kg_state(&sys)?;
    let times = sc.kg_times()?;
    let mut out = Outputs::default();
    let direct = kg_fidelity_series(&sys, &state, &times)?;
    let s = Series::from_amplitudes(times.clone(), direct, Method::Overlap)?;
    write_series(&mut out, "kg_fidelity.csv", &s, "kg_direct");
    if sc.kg()?.kernel {
        let amps = times
            .iter()
            .map(|&t| kg_echo_kernel(&sys, t, DEFAULT_KG_CEILING)?.contract(&state))
            .collect::<relecho::Result<Vec<_>>>()?;
        let s = Series::from_amplitudes(times, amps, Method::Overlap)?;
        write_series(&mut out, "kg_kernel.csv", &s, "kg_kernel");
    }
    Ok(out)
}
