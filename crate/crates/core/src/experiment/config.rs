use serde::{Deserialize, Serialize};

use crate::channels::SelectionNorm;
use crate::error::{Error, Result};
use crate::noise::IsingParams;
use crate::oracle::MAX_DENSE_SITES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    AdSweep,
    AdSizeSweep,
    CbfSweep,
    OracleCheck,
    Timing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// Largest AD lattice width; `W = 3` gives the 5x3 lattice.
pub const MAX_AD_WIDTH: usize = 3;

/// The configuration document as written by the user; every missing field
/// is filled from the kind's defaults by [`ExperimentConfig::resolve`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub kind: Option<ExperimentKind>,
    pub sizes: Option<Vec<usize>>,
    pub gammas: Option<Vec<f64>>,
    pub inv_betas: Option<Vec<f64>>,
    pub h: Option<f64>,
    pub j1: Option<f64>,
    pub j2: Option<f64>,
    pub chi: Option<usize>,
    pub norm: Option<SelectionNorm>,
    pub samples: Option<usize>,
    pub burn_in_sweeps: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<String>,
    pub format: Option<OutputFormat>,
}

/// A fully resolved experiment configuration.
///
/// `sizes` holds code distances `d` (square `d x d` lattices) for CBF and
/// timing runs, and widths `W` (lattice `2W-1` wide, `W` high) for AD runs.
/// `chi = 0` in an oracle check means exact contraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub sizes: Vec<usize>,
    pub gammas: Vec<f64>,
    pub inv_betas: Vec<f64>,
    pub h: f64,
    pub j1: f64,
    pub j2: f64,
    pub chi: usize,
    pub norm: SelectionNorm,
    pub samples: usize,
    pub burn_in_sweeps: usize,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<String>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            kind,
            sizes: vec![],
            gammas: vec![],
            inv_betas: vec![],
            h: 0.01,
            j1: 1.0,
            j2: -1.5,
            chi: 8,
            norm: SelectionNorm::Trace,
            samples: 12_000,
            burn_in_sweeps: 100,
            seed: 1,
            workers: 1,
            out: None,
            format: OutputFormat::Csv,
        };
        match kind {
            ExperimentKind::AdSweep => ExperimentConfig {
                sizes: vec![2],
                gammas: vec![0.0, 0.09, 0.2, 0.3, 0.39],
                norm: SelectionNorm::Diamond,
                ..base
            },
            ExperimentKind::AdSizeSweep => ExperimentConfig {
                sizes: vec![2, 3],
                gammas: vec![0.09, 0.39],
                norm: SelectionNorm::Diamond,
                ..base
            },
            ExperimentKind::CbfSweep => {
                ExperimentConfig { sizes: vec![3, 5], inv_betas: vec![0.7, 0.8, 0.9, 1.0], ..base }
            }
            ExperimentKind::OracleCheck => ExperimentConfig {
                sizes: vec![3],
                gammas: vec![0.09, 0.2, 0.39],
                inv_betas: vec![1.0 / 0.8, 1.0, 1.0 / 1.4],
                chi: 0,
                samples: 10_000,
                ..base
            },
            ExperimentKind::Timing => {
                ExperimentConfig {
                    sizes: vec![3, 5, 7, 9],
                    inv_betas: vec![1.0],
                    samples: 50,
                    norm: SelectionNorm::Diamond,
                    ..base
                }
            }
        }
    }

    /// Fills unset fields of `file` from the defaults of its kind.
    pub fn resolve(file: ConfigFile, kind_override: Option<ExperimentKind>) -> Result<Self> {
        let kind = kind_override
            .or(file.kind)
            .ok_or_else(|| Error::Config("experiment kind missing".into()))?;
        if let (Some(a), Some(b)) = (kind_override, file.kind) {
            if a != b {
                return Err(Error::Config(format!("config is for {b:?}, command runs {a:?}")));
            }
        }
        let d = Self::defaults(kind);
        let cfg = ExperimentConfig {
            kind,
            sizes: file.sizes.unwrap_or(d.sizes),
            gammas: file.gammas.unwrap_or(d.gammas),
            inv_betas: file.inv_betas.unwrap_or(d.inv_betas),
            h: file.h.unwrap_or(d.h),
            j1: file.j1.unwrap_or(d.j1),
            j2: file.j2.unwrap_or(d.j2),
            chi: file.chi.unwrap_or(d.chi),
            norm: file.norm.unwrap_or(d.norm),
            samples: file.samples.unwrap_or(d.samples),
            burn_in_sweeps: file.burn_in_sweeps.unwrap_or(d.burn_in_sweeps),
            seed: file.seed.unwrap_or(d.seed),
            workers: file.workers.unwrap_or(d.workers),
            out: file.out.or(d.out),
            format: file.format.unwrap_or(d.format),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn ising(&self, inv_beta: f64) -> IsingParams {
        IsingParams { beta: 1.0 / inv_beta, h: self.h, j1: self.j1, j2: self.j2 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.sizes.is_empty() {
            return bad("no lattice sizes".into());
        }
        if self.chi == 0 && self.kind != ExperimentKind::OracleCheck {
            return bad("chi must be at least 1".into());
        }
        for &g in &self.gammas {
            if !(0.0..=1.0).contains(&g) {
                return bad(format!("gamma {g} outside [0, 1]"));
            }
        }
        for &t in &self.inv_betas {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("1/beta = {t} must be positive"));
            }
            self.ising(t).validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        match self.kind {
            ExperimentKind::AdSweep | ExperimentKind::AdSizeSweep => {
                if self.gammas.is_empty() {
                    return bad("AD experiments need gammas".into());
                }
                if let Some(&w) = self.sizes.iter().find(|&&w| !(2..=MAX_AD_WIDTH).contains(&w)) {
                    return bad(format!("AD width {w} outside 2..={MAX_AD_WIDTH}"));
                }
            }
            ExperimentKind::CbfSweep | ExperimentKind::Timing => {
                if self.inv_betas.is_empty() {
                    return bad("CBF experiments need inv_betas".into());
                }
                if let Some(&d) = self.sizes.iter().find(|&&d| d < 2) {
                    return bad(format!("distance {d} too small"));
                }
            }
            ExperimentKind::OracleCheck => {
                if let Some(&d) = self.sizes.iter().find(|&&d| d * d > MAX_DENSE_SITES) {
                    return bad(format!("oracle check at d={d} exceeds the dense bound"));
                }
            }
        }
        Ok(())
    }
}
