//! Run configuration. Every field has a default, and the default thresholds
//! are the acceptance thresholds, so an empty file is a complete config.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub l1: f64,
    pub l2: f64,
    pub n1: usize,
    pub n2: usize,
}

impl GridConfig {
    pub fn square(l: f64, n: usize) -> Self {
        Self { l1: l, l2: l, n1: n, n2: n }
    }

    fn check(&self, what: &str) -> Result<()> {
        for n in [self.n1, self.n2] {
            if !n.is_power_of_two() || n < 4 {
                bail!("{what}: grid sizes must be powers of two ≥ 4, got {n}");
            }
        }
        if !(self.l1 > 0.0 && self.l2 > 0.0) {
            bail!("{what}: half-widths must be positive");
        }
        Ok(())
    }

    pub fn build(&self) -> Result<paracomm::TorusGrid64> {
        Ok(paracomm::TorusGrid64::new(self.l1, self.l2, self.n1, self.n2)?)
    }

    fn halved(&self) -> Self {
        Self { n1: (self.n1 / 2).max(16), n2: (self.n2 / 2).max(16), ..*self }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self::square(4.0, 64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolConfig {
    pub c: f64,
    pub k1: i64,
    pub k2: i64,
    /// Seed of `random_bandlimited`.
    pub seed: u64,
    pub band: i64,
}

impl Default for SymbolConfig {
    fn default() -> Self {
        Self { c: 1.0, k1: 1, k2: 1, seed: 7, band: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiplierDecayConfig {
    pub rays: Vec<[f64; 2]>,
    pub k_max: u32,
    pub max_log_slope: f64,
}

impl Default for MultiplierDecayConfig {
    fn default() -> Self {
        Self { rays: vec![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0]], k_max: 14, max_log_slope: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QsDecayConfig {
    pub grid: GridConfig,
    pub symbols: Vec<String>,
    pub j: i32,
    pub s: Vec<f64>,
    pub n_quad: usize,
    pub min_exponent: f64,
    pub min_r_squared: f64,
}

impl Default for QsDecayConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::square(4.0, 64),
            symbols: strings(&["sine_x1", "sine_x2", "mixed"]),
            j: 0,
            s: (1..=5).map(|k| 2f64.powi(-k)).collect(),
            n_quad: 16,
            min_exponent: 0.05,
            min_r_squared: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelRegConfig {
    pub symbols: Vec<String>,
    pub lambdas: Vec<f64>,
    pub x: [f64; 2],
    pub panels: usize,
    /// Draw `h` uniformly in the box instead of the corner `(λ, λ²)`.
    pub random_h: bool,
    pub max_ratio_spread: f64,
    pub max_refinement_change: f64,
}

impl Default for KernelRegConfig {
    fn default() -> Self {
        Self {
            symbols: strings(&["sine_x1", "sine_x2", "mixed"]),
            lambdas: (10..=18).map(|k| 2f64.powi(-k)).collect(),
            x: [0.3, 0.1],
            panels: 32,
            random_h: false,
            max_ratio_spread: 5.0,
            max_refinement_change: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftBoundConfig {
    pub lambdas: Vec<f64>,
    pub samples: usize,
}

impl Default for ShiftBoundConfig {
    fn default() -> Self {
        Self { lambdas: vec![1e-3, 1e-4, 1e-5], samples: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FLambdaConfig {
    pub lambdas: Vec<f64>,
    pub samples: usize,
    /// Bound `estimate ≤ max_constant · λ^{2/3}`.
    pub max_constant: f64,
    pub max_rel_std_error: f64,
}

impl Default for FLambdaConfig {
    fn default() -> Self {
        Self { lambdas: vec![1e-3], samples: 1_000_000, max_constant: 100.0, max_rel_std_error: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WbpConfig {
    pub grid: GridConfig,
    pub symbols: Vec<String>,
    pub r: Vec<f64>,
    pub center: [f64; 2],
    pub epsilon: f64,
    pub r_max: f64,
    pub n_quad: usize,
    pub max_spread: f64,
    /// Allowed variation of the ratio for `linear_x1`.
    pub linear_tolerance: f64,
}

impl Default for WbpConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig { l1: 3.0, l2: 4.0, n1: 64, n2: 64 },
            symbols: strings(&["sine_x1", "linear_x1"]),
            r: (-2..=2).map(|k| 2f64.powi(k)).collect(),
            center: [0.4, 0.1],
            epsilon: 1.0 / 64.0,
            r_max: 1.5,
            n_quad: 16,
            max_spread: 50.0,
            linear_tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct T1OscConfig {
    pub grid: GridConfig,
    pub symbol: String,
    pub cubes: usize,
    pub r: f64,
    pub t_max: f64,
    pub epsilon: f64,
    pub n_quad: usize,
    pub max_over_median: f64,
}

impl Default for T1OscConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig { l1: 8.0, l2: 12.0, n1: 64, n2: 64 },
            symbol: "sine_x1".into(),
            cubes: 20,
            r: 1.0,
            t_max: 2.5,
            epsilon: 1.0 / 64.0,
            n_quad: 16,
            max_over_median: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigmaSweepConfig {
    pub grid: GridConfig,
    pub symbols: Vec<String>,
    pub n_sigma: usize,
    pub epsilon: f64,
    pub r_max: f64,
    pub n_quad: usize,
    pub max_over_median: f64,
}

impl Default for SigmaSweepConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::square(4.0, 64),
            symbols: strings(&["sine_x1", "sine_x2", "mixed", "random_bandlimited"]),
            n_sigma: 32,
            epsilon: 1.0 / 64.0,
            r_max: 2.0,
            n_quad: 16,
            max_over_median: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotationsConfig {
    pub grid: GridConfig,
    pub symbol: String,
    pub n_sigma: usize,
    pub n_quad: usize,
    pub inner: f64,
    pub outer: f64,
    pub taper: f64,
    pub sub_samples: usize,
    pub max_rel_error: f64,
    /// Required error reduction when every quadrature step is halved.
    pub min_refinement_gain: f64,
}

impl Default for RotationsConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig { l1: 2.5, l2: 4.5, n1: 64, n2: 64 },
            symbol: "sine_x1".into(),
            n_sigma: 64,
            n_quad: 16,
            inner: 1.0,
            outer: 2.0,
            taper: 0.25,
            sub_samples: 1,
            max_rel_error: 1e-2,
            min_refinement_gain: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolCheckConfig {
    pub grid: GridConfig,
    pub symbols: Vec<String>,
}

impl Default for SymbolCheckConfig {
    fn default() -> Self {
        Self { grid: GridConfig::square(std::f64::consts::PI, 64), symbols: strings(&paracomm::symbols::GENERATORS) }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub plot: bool,
    pub symbol: SymbolConfig,
    pub multiplier_decay: MultiplierDecayConfig,
    pub qs_decay: QsDecayConfig,
    pub kernel_reg: KernelRegConfig,
    pub shift_bound: ShiftBoundConfig,
    pub f_lambda: FLambdaConfig,
    pub wbp: WbpConfig,
    pub t1_osc: T1OscConfig,
    pub sigma_sweep: SigmaSweepConfig,
    pub rotations: RotationsConfig,
    pub symbol_check: SymbolCheckConfig,
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("config parse failure")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.qs_decay.grid.check("qs_decay")?;
        self.wbp.grid.check("wbp")?;
        self.t1_osc.grid.check("t1_osc")?;
        self.sigma_sweep.grid.check("sigma_sweep")?;
        self.rotations.grid.check("rotations")?;
        self.symbol_check.grid.check("symbol_check")?;
        let lists = [
            ("multiplier_decay.rays", self.multiplier_decay.rays.len()),
            ("qs_decay.symbols", self.qs_decay.symbols.len()),
            ("qs_decay.s", self.qs_decay.s.len()),
            ("kernel_reg.symbols", self.kernel_reg.symbols.len()),
            ("kernel_reg.lambdas", self.kernel_reg.lambdas.len()),
            ("shift_bound.lambdas", self.shift_bound.lambdas.len()),
            ("f_lambda.lambdas", self.f_lambda.lambdas.len()),
            ("wbp.symbols", self.wbp.symbols.len()),
            ("wbp.r", self.wbp.r.len()),
            ("sigma_sweep.symbols", self.sigma_sweep.symbols.len()),
            ("symbol_check.symbols", self.symbol_check.symbols.len()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, n)| *n == 0) {
            bail!("{name} must not be empty");
        }
        Ok(())
    }

    /// Smaller grids and sample counts for smoke runs.
    pub fn quick(mut self) -> Self {
        self.multiplier_decay.k_max = self.multiplier_decay.k_max.min(10);
        self.qs_decay.grid = self.qs_decay.grid.halved();
        self.qs_decay.symbols.truncate(1);
        self.kernel_reg.symbols.truncate(1);
        self.kernel_reg.panels = self.kernel_reg.panels.min(16);
        self.shift_bound.samples = self.shift_bound.samples.min(10_000);
        self.f_lambda.samples = self.f_lambda.samples.min(100_000);
        self.wbp.r.retain(|&r| (0.5..=2.0).contains(&r));
        self.t1_osc.cubes = self.t1_osc.cubes.min(5);
        self.sigma_sweep.grid = self.sigma_sweep.grid.halved();
        self.sigma_sweep.symbols.truncate(1);
        self.sigma_sweep.n_sigma = self.sigma_sweep.n_sigma.min(16);
        self.rotations.grid = self.rotations.grid.halved();
        self.rotations.n_sigma = self.rotations.n_sigma.min(32);
        self.rotations.n_quad = self.rotations.n_quad.min(8);
        self.symbol_check.grid = self.symbol_check.grid.halved();
        self
    }

    pub fn symbol_params(&self, grid: Option<&paracomm::TorusGrid64>) -> paracomm::symbols::SymbolParams<f64> {
        let base = match grid {
            Some(g) => paracomm::symbols::SymbolParams::for_grid(g),
            None => paracomm::symbols::SymbolParams::default(),
        };
        paracomm::symbols::SymbolParams {
            c: self.symbol.c,
            k1: self.symbol.k1,
            k2: self.symbol.k2,
            seed: self.symbol.seed,
            band: self.symbol.band,
            ..base
        }
    }
}
