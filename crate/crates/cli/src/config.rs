//! Run configuration, read from TOML.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qhalab::SpaceKind;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceConfig,
    pub grid: GridConfig,
    pub subgroup: SubgroupConfig,
    pub symbols: SymbolConfig,
    pub wiener: WienerConfig,
    /// Overrides keyed by check id; every other check keeps its default.
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceConfig {
    pub n: usize,
    pub degree: usize,
    pub kind: SpaceKindName,
    /// Gauss order of the space quadrature; `None` keeps the default.
    pub quadrature_order: Option<usize>,
    /// Truncation degree used for the two-dimensional checks.
    pub degree_2d: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKindName {
    Fock,
    Bergman,
}

impl From<SpaceKindName> for SpaceKind {
    fn from(k: SpaceKindName) -> Self {
        match k {
            SpaceKindName::Fock => SpaceKind::Fock,
            SpaceKindName::Bergman => SpaceKind::Bergman,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub radius: f64,
    pub points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgroupKindName {
    Torus,
    QuasiRadialBlocks,
    FullUnitary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubgroupConfig {
    pub kind: SubgroupKindName,
    pub partition: Option<Vec<usize>>,
    pub angle_grid: usize,
    /// Angle grid of each coordinate for the two-dimensional checks.
    pub angle_grid_2d: usize,
    pub mc_samples: usize,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[derive(Default)]
pub struct SymbolConfig {
    /// Registry labels; empty selects the whole registry.
    pub registry: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WienerConfig {
    pub t_schedule: Vec<f64>,
    /// Truncation degree of the strong-topology study.
    pub degree: usize,
    /// Number of basis test vectors.
    pub tests: usize,
    /// Truncation degrees of the convergence-in-N study.
    pub truncations: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            space: SpaceConfig::default(),
            grid: GridConfig::default(),
            subgroup: SubgroupConfig::default(),
            symbols: SymbolConfig::default(),
            wiener: WienerConfig::default(),
            tolerances: BTreeMap::new(),
            seed: 7,
            output: OutputConfig::default(),
        }
    }
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            n: 1,
            degree: 16,
            kind: SpaceKindName::Fock,
            quadrature_order: None,
            degree_2d: 8,
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            radius: 6.0,
            points: 256,
        }
    }
}

impl Default for SubgroupConfig {
    fn default() -> Self {
        SubgroupConfig {
            kind: SubgroupKindName::Torus,
            partition: None,
            angle_grid: 64,
            angle_grid_2d: 32,
            mc_samples: 4096,
            seed: None,
        }
    }
}


impl Default for WienerConfig {
    fn default() -> Self {
        WienerConfig {
            t_schedule: vec![1.0, 0.5, 0.25, 0.125],
            degree: 20,
            tests: 5,
            truncations: vec![8, 12, 16, 20, 24],
        }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("qhalab-out"),
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count())
                .map(|line| format!("line {line}"))
                .unwrap_or_else(|| "<document>".into());
            invalid(&field, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Seed used for group sampling.
    pub fn group_seed(&self) -> u64 {
        self.subgroup.seed.unwrap_or(self.seed)
    }

    /// Tolerance of check `id`, after overrides and `scale`.
    pub fn tolerance(&self, id: &str, default: f64, scale: f64) -> f64 {
        self.tolerances.get(id).copied().unwrap_or(default) * scale
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.space;
        if s.n == 0 || s.n > 2 {
            return Err(invalid("space.n", "must be 1 or 2"));
        }
        if s.degree < 8 {
            return Err(invalid("space.degree", "must be at least 8"));
        }
        if s.degree_2d < 4 {
            return Err(invalid("space.degree_2d", "must be at least 4"));
        }
        if let Some(q) = s.quadrature_order {
            if q < s.degree + 1 {
                return Err(invalid("space.quadrature_order", "must exceed the truncation degree"));
            }
        }
        let g = &self.grid;
        if !(g.radius.is_finite() && g.radius > 0.0) {
            return Err(invalid("grid.radius", "must be positive"));
        }
        if g.points < 8 || !g.points.is_multiple_of(2) {
            return Err(invalid("grid.points", "must be even and at least 8"));
        }
        let sg = &self.subgroup;
        if sg.angle_grid == 0 {
            return Err(invalid("subgroup.angle_grid", "must be positive"));
        }
        if sg.angle_grid_2d == 0 {
            return Err(invalid("subgroup.angle_grid_2d", "must be positive"));
        }
        if sg.mc_samples == 0 {
            return Err(invalid("subgroup.mc_samples", "must be positive"));
        }
        if let Some(p) = &sg.partition {
            if p.is_empty() || p.contains(&0) {
                return Err(invalid("subgroup.partition", "blocks must be positive"));
            }
            if sg.kind != SubgroupKindName::QuasiRadialBlocks {
                return Err(invalid("subgroup.partition", "only quasi_radial_blocks takes a partition"));
            }
        }
        let known: Vec<String> = qhalab::symbol::registry(1)
            .iter()
            .map(|a| a.label().to_string())
            .collect();
        for (i, name) in self.symbols.registry.iter().enumerate() {
            if !known.contains(name) {
                return Err(invalid(
                    &format!("symbols.registry[{i}]"),
                    format!("unknown symbol `{name}`; known: {}", known.join(", ")),
                ));
            }
        }
        let w = &self.wiener;
        if w.t_schedule.is_empty() {
            return Err(invalid("wiener.t_schedule", "must not be empty"));
        }
        for (i, t) in w.t_schedule.iter().enumerate() {
            if !(t.is_finite() && *t > 0.0) {
                return Err(invalid(&format!("wiener.t_schedule[{i}]"), "must be positive"));
            }
        }
        if w.t_schedule.windows(2).any(|p| p[1] >= p[0]) {
            return Err(invalid("wiener.t_schedule", "must be strictly decreasing"));
        }
        if w.degree < 8 {
            return Err(invalid("wiener.degree", "must be at least 8"));
        }
        if w.tests == 0 || w.tests > w.degree + 1 {
            return Err(invalid("wiener.tests", "must lie in 1..=degree+1"));
        }
        if w.truncations.is_empty() {
            return Err(invalid("wiener.truncations", "must not be empty"));
        }
        for (i, d) in w.truncations.iter().enumerate() {
            if *d < 8 {
                return Err(invalid(&format!("wiener.truncations[{i}]"), "must be at least 8"));
            }
        }
        for (id, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(invalid(&format!("tolerances.{id}"), "must be non-negative"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn custom_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.space.kind = SpaceKindName::Bergman;
        cfg.space.quadrature_order = Some(70);
        cfg.subgroup.kind = SubgroupKindName::QuasiRadialBlocks;
        cfg.subgroup.partition = Some(vec![1, 1]);
        cfg.subgroup.seed = Some(3);
        cfg.symbols.registry = vec!["phi".into(), "lorentzian".into()];
        cfg.tolerances.insert("conv.symbol_op".into(), 1e-7);
        cfg.output.dir = PathBuf::from("/tmp/x");
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let cfg = RunConfig::from_toml("seed = 11\n[space]\ndegree = 12\n").unwrap();
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.space.degree, 12);
        assert_eq!(cfg.grid, GridConfig::default());
    }

    fn field_of(text: &str) -> String {
        match RunConfig::from_toml(text) {
            Err(CliError::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(field_of("[wiener]\nt_schedule = []\n"), "wiener.t_schedule");
        assert_eq!(field_of("[wiener]\nt_schedule = [1.0, -0.5]\n"), "wiener.t_schedule[1]");
        assert_eq!(field_of("[wiener]\nt_schedule = [0.5, 1.0]\n"), "wiener.t_schedule");
        assert_eq!(field_of("[space]\nn = 0\n"), "space.n");
        assert_eq!(field_of("[grid]\npoints = 7\n"), "grid.points");
        assert_eq!(field_of("[symbols]\nregistry = [\"phi\", \"nope\"]\n"), "symbols.registry[1]");
        assert_eq!(field_of("[subgroup]\npartition = [1, 1]\n"), "subgroup.partition");
        assert!(field_of("[space]\nbogus = 1\n").starts_with("line"));
    }
}
