//! Scenario files: TOML with one section per module and a mandatory
//! `units = "natural"` key.

use relecho::kg::KgSystem;
use relecho::{
    BasisTruncation, Ensemble, Frame, Grid, KgField, KgGrid, Labels, Params, Perturbation, Profile, ScalarProfile,
    Spin, SpinSelection,
};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub units: String,
    pub name: Option<String>,
    pub particle: Option<ParticleSection>,
    pub perturbation: Option<PerturbationSection>,
    pub basis: Option<BasisSection>,
    pub grid: Option<GridSection>,
    pub state: Option<StateSection>,
    pub time: Option<TimeSection>,
    pub methods: Option<MethodsSection>,
    pub boost: Option<BoostSection>,
    pub kg: Option<KgSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSection {
    pub mass: f64,
    pub field: f64,
    #[serde(default)]
    pub kz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Zero,
    ConstantScalar,
    GaussianScalar,
    GaussianVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    #[default]
    Lab,
    Comoving,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSection {
    pub profile: ProfileKind,
    /// Scalar value, Gaussian amplitude or vector strength, by profile.
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "one")]
    pub width: f64,
    #[serde(default)]
    pub center: [f64; 2],
    pub epsilon: f64,
    #[serde(default)]
    pub frame: FrameKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpinsKind {
    Aligned,
    Anti,
    #[default]
    Both,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSection {
    pub nu_max: u32,
    pub ml_min: i32,
    pub ml_max: i32,
    #[serde(default)]
    pub spins: SpinsKind,
    #[serde(default)]
    pub negative_energy: bool,
    pub dimension_ceiling: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub extent: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Basis,
    Random,
    Beam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpinKind {
    #[default]
    Aligned,
    Anti,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSection {
    #[serde(default)]
    pub nu: u32,
    #[serde(default)]
    pub ml: i32,
    #[serde(default)]
    pub spin: SpinKind,
    pub weight: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub kind: StateKind,
    #[serde(default)]
    pub nu: u32,
    #[serde(default)]
    pub ml: i32,
    #[serde(default)]
    pub spin: SpinKind,
    /// Shift the diagonal element of the reference state to zero.
    #[serde(default)]
    pub zero_diagonal: bool,
    #[serde(default)]
    pub members: Vec<MemberSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Overlap,
    Echo,
    Current,
    Ode,
}

impl MethodKind {
    pub fn label(&self) -> &'static str {
        match self {
            MethodKind::Overlap => "overlap",
            MethodKind::Echo => "echo",
            MethodKind::Current => "current",
            MethodKind::Ode => "ode",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodsSection {
    pub evolve: Vec<MethodKind>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostSection {
    pub kz: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KgProfileKind {
    Zero,
    Constant,
    Gaussian,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KgSection {
    pub length: f64,
    pub points: usize,
    pub mass: f64,
    pub epsilon: f64,
    pub profile: KgProfileKind,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "one")]
    pub width: f64,
    #[serde(default)]
    pub center: f64,
    pub packet_center: f64,
    pub packet_width: f64,
    #[serde(default)]
    pub packet_k0: f64,
    pub t_max: f64,
    pub samples: usize,
    pub step: Option<f64>,
    #[serde(default)]
    pub kernel: bool,
}

fn one() -> f64 {
    1.0
}

fn missing(section: &str) -> CliError {
    CliError::Validation(format!("missing section [{section}]"))
}

fn field(section: &str) -> impl Fn(relecho::Error) -> CliError + '_ {
    move |e| CliError::from_core_in(section, e)
}

fn spin(kind: SpinKind) -> Spin {
    match kind {
        SpinKind::Aligned => Spin::Aligned,
        SpinKind::Anti => Spin::Anti,
    }
}

/// Reference state or beam of a Landau scenario.
#[derive(Debug, Clone)]
pub enum InitialState {
    Label(Labels),
    Random,
    Beam(Ensemble),
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: Scenario = toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {}", e.message())))?;
        if s.units != "natural" {
            return Err(CliError::Validation(format!(
                "units: expected \"natural\", got \"{}\"",
                s.units
            )));
        }
        Ok(s)
    }

    pub fn params(&self) -> Result<Params, CliError> {
        let p = self.particle.as_ref().ok_or_else(|| missing("particle"))?;
        Params::new(p.mass, p.field, p.kz).map_err(field("particle"))
    }

    pub fn perturbation(&self) -> Result<Perturbation, CliError> {
        let p = self.perturbation.as_ref().ok_or_else(|| missing("perturbation"))?;
        let profile = match p.profile {
            ProfileKind::Zero => Profile::Zero,
            ProfileKind::ConstantScalar => Profile::ConstantScalar { value: p.amplitude },
            ProfileKind::GaussianScalar => Profile::GaussianScalar {
                amplitude: p.amplitude,
                width: p.width,
                center: p.center,
            },
            ProfileKind::GaussianVector => Profile::GaussianVector {
                strength: p.amplitude,
                width: p.width,
                center: p.center,
            },
        };
        let frame = match p.frame {
            FrameKind::Lab => Frame::Lab,
            FrameKind::Comoving => Frame::Comoving,
        };
        Ok(Perturbation::new(profile, p.epsilon)
            .map_err(field("perturbation"))?
            .in_frame(frame))
    }

    pub fn truncation(&self) -> Result<BasisTruncation, CliError> {
        let b = self.basis.as_ref().ok_or_else(|| missing("basis"))?;
        let spins = match b.spins {
            SpinsKind::Aligned => SpinSelection::Aligned,
            SpinsKind::Anti => SpinSelection::Anti,
            SpinsKind::Both => SpinSelection::Both,
        };
        let mut t = BasisTruncation::new(b.nu_max, b.ml_min, b.ml_max)
            .map_err(field("basis"))?
            .with_spins(spins)
            .with_negative_energy(b.negative_energy);
        if let Some(c) = b.dimension_ceiling {
            t = t.with_ceiling(c);
        }
        t.check_ceiling().map_err(field("basis"))?;
        Ok(t)
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        let g = self.grid.as_ref().ok_or_else(|| missing("grid"))?;
        Grid::new(g.extent, g.points).map_err(field("grid"))
    }

    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        let t = self.time.as_ref().ok_or_else(|| missing("time"))?;
        if !(t.t_max >= 0.0) || !t.t_max.is_finite() {
            return Err(CliError::Validation(
                "time.t_max: must be non-negative and finite".into(),
            ));
        }
        if t.samples == 0 {
            return Err(CliError::Validation("time.samples: must be at least 1".into()));
        }
        Ok((0..=t.samples).map(|k| t.t_max * k as f64 / t.samples as f64).collect())
    }

    pub fn methods(&self) -> Vec<MethodKind> {
        self.methods
            .as_ref()
            .map(|m| m.evolve.clone())
            .unwrap_or_else(|| vec![MethodKind::Overlap])
    }

    pub fn initial_state(&self, kz: f64) -> Result<InitialState, CliError> {
        let s = self.state.as_ref().ok_or_else(|| missing("state"))?;
        let label = |nu, ml, sp| Labels::from_level(nu, ml, spin(sp), kz).map_err(field("state"));
        let truncation = self.truncation()?;
        let check = |q: Labels| {
            if truncation.contains(&q) {
                Ok(q)
            } else {
                Err(CliError::Validation(format!(
                    "state: {q} is outside the basis truncation"
                )))
            }
        };
        match s.kind {
            StateKind::Basis => Ok(InitialState::Label(check(label(s.nu, s.ml, s.spin)?)?)),
            StateKind::Random => Ok(InitialState::Random),
            StateKind::Beam => {
                if s.members.is_empty() {
                    return Err(CliError::Validation(
                        "state.members: a beam needs at least one member".into(),
                    ));
                }
                let members = s
                    .members
                    .iter()
                    .map(|m| Ok((check(label(m.nu, m.ml, m.spin)?)?, m.weight)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(InitialState::Beam(Ensemble::new(members).map_err(field("state"))?))
            }
        }
    }

    pub fn zero_diagonal(&self) -> bool {
        self.state.as_ref().is_some_and(|s| s.zero_diagonal)
    }

    pub fn kg(&self) -> Result<&KgSection, CliError> {
        self.kg.as_ref().ok_or_else(|| missing("kg"))
    }

    pub fn boost_momenta(&self) -> Vec<f64> {
        self.boost.as_ref().map(|b| b.kz.clone()).unwrap_or_default()
    }

    /// Checks every present section without running any pipeline.
    pub fn validate(&self) -> Result<(), CliError> {
        let params = self.particle.as_ref().map(|_| self.params()).transpose()?;
        let pert = self.perturbation.as_ref().map(|_| self.perturbation()).transpose()?;
        if self.basis.is_some() {
            self.truncation()?;
        }
        if let Some(grid) = self.grid.as_ref().map(|_| self.grid()).transpose()? {
            if let Some(p) = &params {
                grid.check_magnetic_extent(p.field).map_err(field("grid"))?;
            }
            if let Some(pert) = &pert {
                pert.check_resolution(&grid).map_err(field("grid"))?;
            }
        }
        if self.time.is_some() {
            self.times()?;
        }
        if let (Some(p), Some(_)) = (&params, &self.state) {
            self.initial_state(p.kz)?;
        }
        for &k in &self.boost_momenta() {
            relecho::boost_velocity(k, params.map_or(1.0, |p| p.mass)).map_err(field("boost"))?;
        }
        if self.kg.is_some() {
            let sys = self.kg_system()?;
            self.kg_state(&sys)?;
        }
        Ok(())
    }

    pub fn kg_system(&self) -> Result<KgSystem<f64>, CliError> {
        let k = self.kg()?;
        let grid = KgGrid::new(k.length, k.points).map_err(field("kg"))?;
        let profile = match k.profile {
            KgProfileKind::Zero => ScalarProfile::Zero,
            KgProfileKind::Constant => ScalarProfile::Constant { value: k.amplitude },
            KgProfileKind::Gaussian => ScalarProfile::Gaussian {
                amplitude: k.amplitude,
                width: k.width,
                center: k.center,
            },
        };
        let sys = KgSystem::new(grid, k.mass, k.epsilon, &profile).map_err(field("kg"))?;
        match k.step {
            Some(dt) => sys.with_step(dt).map_err(field("kg")),
            None => Ok(sys),
        }
    }

    pub fn kg_state(&self, sys: &KgSystem<f64>) -> Result<KgField, CliError> {
        let k = self.kg()?;
        KgField::gaussian_packet(*sys.grid(), k.mass, k.packet_center, k.packet_width, k.packet_k0).map_err(field("kg"))
    }

    pub fn kg_times(&self) -> Result<Vec<f64>, CliError> {
        let k = self.kg()?;
        if !(k.t_max >= 0.0) || !k.t_max.is_finite() || k.samples == 0 {
            return Err(CliError::Validation(
                "kg: t_max must be non-negative and samples at least 1".into(),
            ));
        }
        Ok((0..=k.samples).map(|i| k.t_max * i as f64 / k.samples as f64).collect())
    }
}
