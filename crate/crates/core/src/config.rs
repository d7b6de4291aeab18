//! TOML run configuration.
//!
//! ```toml
//! system = "cee"
//! order = 4
//!
//! [grid]
//! nodes = [21, 21]
//!
//! [parameters]
//! gamma = 1.4
//!
//! [initial]
//! kind = "uniform"
//! state = [1.0, 0.5, 0.25, 1.0]
//!
//! [boundary.west]
//! preset = "cee-characteristic-inflow"
//! data = "reference"
//!
//! [boundary.east]
//! inflow = { variant = "cee-char", m_minus = 3 }
//! outflow = { variant = "cee-contracted", m_minus = 0 }
//!
//! [time]
//! t_end = 0.1
//! cfl = 0.5
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::boundary::{Mode, PRESET_NAMES};
use crate::equations::{System, Variant};
use crate::error::{Error, Result};
use crate::sbp::{minimum_nodes, FaceId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: String,
    pub order: u32,
    pub grid: GridConfig,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub initial: InitialConfig,
    pub boundary: BoundaryConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Seeds the initial noise.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// One entry for a line, two for a rectangle.
    pub nodes: Vec<usize>,
    #[serde(default = "unit")]
    pub x: [f64; 2],
    #[serde(default = "unit")]
    pub y: [f64; 2],
}

fn unit() -> [f64; 2] {
    [0.0, 1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Parameters {
    pub gamma: f64,
    pub epsilon: f64,
    pub coriolis: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub degeneracy_threshold: f64,
}

impl Default for Parameters {
    fn default() -> Self {
        Self {
            gamma: 1.4,
            epsilon: 0.0,
            coriolis: 0.0,
            alpha: 0.2,
            beta: 0.2,
            kappa: 1e-2,
            degeneracy_threshold: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    /// The base state everywhere.
    Uniform,
    /// Base velocity plus `strength · (x − center)`.
    Source,
    /// Base state plus a Gaussian bump on every primitive variable.
    Pulse,
}

/// Initial data in primitive variables: IEE/INSE (u, v, p), SWE (φ, u, v),
/// CEE (ρ, u, v, p).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConfig {
    pub kind: InitialKind,
    /// Defaults per system when absent.
    pub state: Option<Vec<f64>>,
    pub strength: f64,
    pub amplitude: f64,
    pub width: f64,
    pub center: [f64; 2],
    /// Seeded uniform noise in [−noise, noise] on every primitive variable.
    pub noise: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            kind: InitialKind::Uniform,
            state: None,
            strength: 0.5,
            amplitude: 0.05,
            width: 0.15,
            center: [0.5, 0.5],
            noise: 0.0,
        }
    }
}

impl InitialConfig {
    pub fn base_state(&self, system: System) -> Vec<f64> {
        self.state.clone().unwrap_or_else(|| match system {
            System::Iee | System::Inse => vec![1.0, 0.5, 1.0],
            System::Swe => vec![1.0, 0.3, 0.2],
            System::Cee => vec![1.0, 0.5, 0.25, 1.0],
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub west: Option<FaceConfig>,
    pub east: Option<FaceConfig>,
    pub south: Option<FaceConfig>,
    pub north: Option<FaceConfig>,
}

impl BoundaryConfig {
    pub fn get(&self, face: FaceId) -> Option<&FaceConfig> {
        match face {
            FaceId::West => self.west.as_ref(),
            FaceId::East => self.east.as_ref(),
            FaceId::South => self.south.as_ref(),
            FaceId::North => self.north.as_ref(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeConfig {
    Strong,
    #[default]
    Weak,
}

impl From<ModeConfig> for Mode {
    fn from(m: ModeConfig) -> Self {
        match m {
            ModeConfig::Strong => Mode::Strong,
            ModeConfig::Weak => Mode::Weak,
        }
    }
}

/// Boundary data G: `"zero"`, `"reference"` (G reproducing the noise-free
/// initial state) or a constant vector of length m⁻.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataConfig {
    Named(String),
    Constant(Vec<f64>),
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig::Named("zero".into())
    }
}

/// Conditions for one face. Give exactly one of `preset`, `presets`,
/// `scenario` or the explicit `inflow`/`outflow` pair.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceConfig {
    pub preset: Option<String>,
    /// Several presets merged; later entries fill regimes left open.
    pub presets: Option<Vec<String>>,
    /// Shallow water inflow/outflow variant pairing, 1 to 4.
    pub scenario: Option<usize>,
    pub inflow: Option<ExplicitCondition>,
    pub outflow: Option<ExplicitCondition>,
    #[serde(default)]
    pub mode: ModeConfig,
    #[serde(default)]
    pub data: DataConfig,
}

/// √|Λ⁻|W⁻ = R√Λ⁺W⁺ + SG with R (m⁻×m⁺, default 0) and S (default I).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitCondition {
    pub variant: String,
    pub m_minus: usize,
    pub m_plus: Option<usize>,
    pub r: Option<Vec<Vec<f64>>>,
    pub s: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    pub cfl: Option<f64>,
    pub dt: Option<f64>,
    #[serde(default = "one")]
    pub cadence: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Stem of `<name>.csv` and `<name>.json`.
    pub name: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("."),
            name: "run".into(),
        }
    }
}

fn fail<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T> {
    Err(Error::Config {
        path: path.into(),
        message: message.into(),
    })
}

/// Parses and validates a TOML configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| Error::Config {
        path: "<document>".into(),
        message: e.message().to_string(),
    })?;
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let mut path = e.path().to_string();
        let message = e.into_inner().message().to_string();
        // the deserializer sometimes descends into the unknown key itself
        if let Some(key) = message.strip_prefix("unknown field `").and_then(|m| m.split('`').next()) {
            if let Some(table) = path.strip_suffix(&format!(".{key}")) {
                path = table.to_string();
            } else if path == key {
                path = ".".into();
            }
        }
        Error::Config {
            path: if path == "." { "<document>".into() } else { path },
            message,
        }
    })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn system_id(&self) -> Result<System> {
        System::parse(&self.system).map_or_else(
            || fail("system", format!("unknown system `{}` (expected iee, swe, cee or inse)", self.system)),
            Ok,
        )
    }

    /// Faces present for the configured grid dimension.
    pub fn faces(&self) -> &'static [FaceId] {
        if self.grid.nodes.len() == 1 {
            &FaceId::ALL[..2]
        } else {
            &FaceId::ALL
        }
    }

    pub fn validate(&self) -> Result<()> {
        let system = self.system_id()?;
        let Ok(min_nodes) = minimum_nodes(self.order) else {
            return fail("order", format!("unsupported order {} (expected 2, 4 or 6)", self.order));
        };
        if !(1..=2).contains(&self.grid.nodes.len()) {
            return fail("grid.nodes", "expected one or two node counts");
        }
        for (k, &n) in self.grid.nodes.iter().enumerate() {
            if n < min_nodes {
                return fail(
                    format!("grid.nodes[{k}]"),
                    format!("order {} needs at least {min_nodes} nodes, got {n}", self.order),
                );
            }
        }
        for (name, [a, b]) in [("grid.x", self.grid.x), ("grid.y", self.grid.y)] {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return fail(name, format!("extent must be increasing, got [{a}, {b}]"));
            }
        }

        let p = &self.parameters;
        if system == System::Cee {
            if !(p.gamma > 1.0) {
                return fail("parameters.gamma", format!("γ>1 required, got {}", p.gamma));
            }
            if !(p.gamma < 2.0) {
                return fail("parameters.gamma", format!("γ<2 required, got {}", p.gamma));
            }
        }
        if !(p.epsilon >= 0.0 && p.epsilon.is_finite()) {
            return fail("parameters.epsilon", format!("ε>=0 required, got {}", p.epsilon));
        }
        if system.is_incompressible() && !(p.kappa > 0.0 && p.kappa.is_finite()) {
            return fail("parameters.kappa", format!("κ>0 required, got {}", p.kappa));
        }
        if !(p.degeneracy_threshold > 0.0) {
            return fail("parameters.degeneracy_threshold", "must be positive");
        }
        for (name, v) in [("parameters.coriolis", p.coriolis), ("parameters.alpha", p.alpha), ("parameters.beta", p.beta)] {
            if !v.is_finite() {
                return fail(name, "must be finite");
            }
        }

        let init = &self.initial;
        let state = init.base_state(system);
        if state.len() != system.components() {
            return fail(
                "initial.state",
                format!("{} needs {} primitive values, got {}", system.name(), system.components(), state.len()),
            );
        }
        if init.kind == InitialKind::Pulse && !(init.width > 0.0) {
            return fail("initial.width", "must be positive");
        }
        if !(init.noise >= 0.0) {
            return fail("initial.noise", "must be non-negative");
        }

        for &face in self.faces() {
            let path = format!("boundary.{face}");
            match self.boundary.get(face) {
                None => return fail(path, "missing boundary condition"),
                Some(fc) => fc.validate(system, &path)?,
            }
        }
        if self.grid.nodes.len() == 1 && (self.boundary.south.is_some() || self.boundary.north.is_some()) {
            return fail("boundary", "south/north faces do not exist on a line grid");
        }

        let t = &self.time;
        if !(t.t_end >= 0.0 && t.t_end.is_finite()) {
            return fail("time.t_end", format!("must be finite and non-negative, got {}", t.t_end));
        }
        match (t.cfl, t.dt) {
            (Some(_), Some(_)) => return fail("time", "give either cfl or dt, not both"),
            (None, None) => return fail("time", "one of cfl or dt is required"),
            (Some(c), None) if !(c > 0.0) => return fail("time.cfl", "must be positive"),
            (None, Some(d)) if !(d > 0.0) => return fail("time.dt", "must be positive"),
            _ => {}
        }
        if t.cadence == 0 {
            return fail("time.cadence", "must be at least 1");
        }
        if self.output.name.is_empty() {
            return fail("output.name", "must not be empty");
        }
        Ok(())
    }
}

impl FaceConfig {
    fn validate(&self, system: System, path: &str) -> Result<()> {
        let given = [
            self.preset.is_some(),
            self.presets.is_some(),
            self.scenario.is_some(),
            self.inflow.is_some() || self.outflow.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if given != 1 {
            return fail(path, "give exactly one of preset, presets, scenario or inflow/outflow");
        }
        let names: Vec<&String> = self.preset.iter().chain(self.presets.iter().flatten()).collect();
        for (k, name) in names.iter().enumerate() {
            if !PRESET_NAMES.contains(&name.as_str()) {
                let sub = if self.preset.is_some() {
                    format!("{path}.preset")
                } else {
                    format!("{path}.presets[{k}]")
                };
                return fail(sub, format!("unknown preset `{name}`"));
            }
        }
        if let Some(k) = self.scenario {
            if system != System::Swe {
                return fail(format!("{path}.scenario"), "flow scenarios exist for swe only");
            }
            if !(1..=4).contains(&k) {
                return fail(format!("{path}.scenario"), format!("expected 1 to 4, got {k}"));
            }
        }
        for (name, cond) in [("inflow", &self.inflow), ("outflow", &self.outflow)] {
            if let Some(c) = cond {
                c.validate(system, &format!("{path}.{name}"))?;
            }
        }
        match &self.data {
            DataConfig::Named(n) if n != "zero" && n != "reference" => {
                fail(format!("{path}.data"), format!("expected \"zero\", \"reference\" or a list, got `{n}`"))
            }
            DataConfig::Constant(g) if g.iter().any(|v| !v.is_finite()) => fail(format!("{path}.data"), "must be finite"),
            _ => Ok(()),
        }
    }
}

impl ExplicitCondition {
    pub fn variant_id(&self) -> Option<Variant> {
        Variant::parse(&self.variant)
    }

    pub fn m_plus(&self, system: System) -> usize {
        let w = self.variant_id().map_or(0, |v| v.w_len(system.components()));
        self.m_plus.unwrap_or(w.saturating_sub(self.m_minus))
    }

    fn validate(&self, system: System, path: &str) -> Result<()> {
        let Some(variant) = self.variant_id() else {
            return fail(format!("{path}.variant"), format!("unknown variant `{}`", self.variant));
        };
        if !variant.supports(system) {
            return fail(
                format!("{path}.variant"),
                format!("variant {} is not available for {}", variant.name(), system.name()),
            );
        }
        let w = variant.w_len(system.components());
        let (mm, mp) = (self.m_minus, self.m_plus(system));
        if mm + mp != w {
            return fail(path, format!("m_minus + m_plus must equal {w}, got {mm} + {mp}"));
        }
        if let Some(r) = &self.r {
            if r.len() != mm || r.iter().any(|row| row.len() != mp) {
                return fail(format!("{path}.r"), format!("expected a {mm}x{mp} matrix"));
            }
        }
        if let Some(s) = &self.s {
            if s.len() != mm || s.iter().any(|row| row.len() != mm) {
                return fail(format!("{path}.s"), format!("expected a {mm}x{mm} matrix"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
system = "iee"
order = 2
[grid]
nodes = [11]
[boundary.west]
preset = "iee-characteristic-inflow"
[boundary.east]
preset = "iee-pressure-outflow"
[time]
t_end = 0.1
cfl = 0.5
"#;

    fn path_of(text: &str) -> (String, String) {
        match parse_config(text) {
            Err(Error::Config { path, message }) => (path, message),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_iee_config() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.system_id().unwrap(), System::Iee);
        assert_eq!(c.faces().len(), 2);
        assert_eq!(c.time.cadence, 1);
        assert_eq!(c.initial.kind, InitialKind::Uniform);
    }

    #[test]
    fn unsupported_order() {
        let (path, msg) = path_of(&MINIMAL.replace("order = 2", "order = 3"));
        assert_eq!(path, "order");
        assert!(msg.contains("unsupported order"), "{msg}");
    }

    #[test]
    fn cee_needs_gamma_above_one() {
        let text = r#"
system = "cee"
order = 2
[grid]
nodes = [11]
[parameters]
gamma = 1.0
[boundary.west]
preset = "cee-characteristic-inflow"
[boundary.east]
preset = "cee-outflow"
[time]
t_end = 0.1
cfl = 0.5
"#;
        let (path, msg) = path_of(text);
        assert_eq!(path, "parameters.gamma");
        assert!(msg.contains("γ>1 required"), "{msg}");
    }

    #[test]
    fn unknown_keys_name_their_path() {
        let (path, _) = path_of(&MINIMAL.replace("cfl = 0.5", "cfl = 0.5\nstep = 3"));
        assert_eq!(path, "time");
        let (path, _) = path_of(&MINIMAL.replace("[boundary.east]", "[boundary.east]\nfoo = 1"));
        assert_eq!(path, "boundary.east");
        let (path, _) = path_of(&MINIMAL.replace("order = 2", "order = \"two\""));
        assert_eq!(path, "order");
    }

    #[test]
    fn face_errors() {
        let (path, _) = path_of(&MINIMAL.replace("iee-pressure-outflow", "nope"));
        assert_eq!(path, "boundary.east.preset");
        let (path, _) = path_of(&MINIMAL.replace("[boundary.east]\npreset = \"iee-pressure-outflow\"\n", ""));
        assert_eq!(path, "boundary.east");
        let explicit = MINIMAL.replace(
            "preset = \"iee-pressure-outflow\"",
            "outflow = { variant = \"iee-char\", m_minus = 1, r = [[0.0]] }",
        );
        let (path, _) = path_of(&explicit);
        assert_eq!(path, "boundary.east.outflow.r");
        let ok = MINIMAL.replace(
            "preset = \"iee-pressure-outflow\"",
            "outflow = { variant = \"iee-char\", m_minus = 1, r = [[0.0, 0.0]] }",
        );
        parse_config(&ok).unwrap();
    }

    #[test]
    fn syntax_error() {
        let (path, _) = path_of("system = ");
        assert_eq!(path, "<document>");
    }

    #[test]
    fn time_step_choice() {
        let (path, _) = path_of(&MINIMAL.replace("cfl = 0.5", "cfl = 0.5\ndt = 0.01"));
        assert_eq!(path, "time");
        let (path, _) = path_of(&MINIMAL.replace("cfl = 0.5", "cfl = -1.0"));
        assert_eq!(path, "time.cfl");
    }
}
