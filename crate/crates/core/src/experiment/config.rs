use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::ClassifierSpec;
use crate::data::LabelColumn;
use crate::error::{Error, Result};
use crate::search::Scoring;
use crate::simgen::{SimConfig, Setting};

fn default_replications() -> usize {
    50
}
fn default_cv_folds() -> usize {
    5
}
fn default_label_column() -> LabelColumn {
    LabelColumn::Name("label".into())
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Simulation {
        setting: Setting,
        #[serde(default = "default_replications")]
        replications: usize,
    },
    Csv {
        path: PathBuf,
        #[serde(default = "default_label_column")]
        label_column: LabelColumn,
        #[serde(default = "default_cv_folds")]
        cv_folds: usize,
        #[serde(default = "yes")]
        has_header: bool,
    },
}

impl Source {
    /// Replications or folds.
    pub fn units(&self) -> usize {
        match self {
            Source::Simulation { replications, .. } => *replications,
            Source::Csv { cv_folds, .. } => *cv_folds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Strategy {
    AllFeatures,
    Forward { d: usize },
    Beam { d: usize, k: usize },
}

impl Strategy {
    pub fn target_size(&self) -> Option<usize> {
        match *self {
            Strategy::AllFeatures => None,
            Strategy::Forward { d } | Strategy::Beam { d, .. } => Some(d),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Strategy::AllFeatures => "all features",
            Strategy::Forward { .. } => "forward selection",
            Strategy::Beam { .. } => "beam search",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::AllFeatures => write!(f, "all features"),
            Strategy::Forward { d } => write!(f, "forward selection (d={d})"),
            Strategy::Beam { d, k } => write!(f, "beam search (d={d}, k={k})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    #[default]
    Markdown,
}

impl ReportFormat {
    /// `.csv` means CSV, anything else Markdown.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Markdown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    /// Inferred from the extension when absent.
    #[serde(default)]
    pub format: Option<ReportFormat>,
}

impl OutputSpec {
    pub fn format(&self) -> ReportFormat {
        self.format.unwrap_or_else(|| ReportFormat::from_path(&self.path))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub title: Option<String>,
    pub source: Source,
    pub models: Vec<ClassifierSpec>,
    pub strategies: Vec<Strategy>,
    /// How candidate subsets are scored during the search.
    #[serde(default)]
    pub scoring: Scoring,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    /// Cap on the total number of model fits.
    #[serde(default)]
    pub max_fits: Option<u64>,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a TOML config. Relative CSV and output paths are taken
    /// relative to the config file's directory.
    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(base) = path.parent() {
            if let Source::Csv { path: data, .. } = &mut cfg.source {
                if data.is_relative() {
                    *data = base.join(&*data);
                }
            }
            if let Some(out) = &mut cfg.output {
                if out.path.is_relative() {
                    out.path = base.join(&out.path);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match &self.source {
            Source::Simulation { setting, replications } => {
                if *replications == 0 {
                    return bad("replications must be ≥ 1".into());
                }
                SimConfig::new(*setting, 0).validate()?;
            }
            Source::Csv { cv_folds, .. } => {
                if *cv_folds < 2 {
                    return bad(format!("cv_folds must be ≥ 2, got {cv_folds}"));
                }
            }
        }
        if self.models.is_empty() {
            return bad("no models configured".into());
        }
        if self.strategies.is_empty() {
            return bad("no strategies configured".into());
        }
        for m in &self.models {
            m.validate()?;
        }
        for s in &self.strategies {
            match *s {
                Strategy::Forward { d: 0 } | Strategy::Beam { d: 0, .. } => return bad(format!("{s}: d must be ≥ 1")),
                Strategy::Beam { k: 0, .. } => return bad(format!("{s}: k must be ≥ 1")),
                _ => {}
            }
        }
        match self.scoring {
            Scoring::Holdout { fraction, .. } if !(fraction > 0.0 && fraction < 1.0) => {
                return bad(format!("holdout fraction must be in (0, 1), got {fraction}"));
            }
            Scoring::InnerCv { folds, .. } if folds < 2 => {
                return bad(format!("inner folds must be ≥ 2, got {folds}"));
            }
            _ => {}
        }
        if self.threads == Some(0) {
            return bad("threads must be ≥ 1".into());
        }
        Ok(())
    }
}
