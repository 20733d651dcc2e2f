use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::data::FeatureSubset;
use crate::error::{Error, Result};
use crate::experiment::config::ReportFormat;

/// Aggregated test error of one (model, strategy) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub model: String,
    pub strategy: String,
    /// Test misclassification rate per successful replication or fold.
    pub rates: Vec<f64>,
    /// `None` when every unit failed.
    pub mean: Option<f64>,
    /// Sample standard deviation over `√count`; 0 for a single unit.
    pub se: Option<f64>,
    /// Selected subsets with how often each was chosen, most frequent first.
    pub subset_frequencies: Vec<(FeatureSubset, usize)>,
    /// Failed units with the reason.
    pub failures: Vec<(usize, String)>,
    pub skipped_reason: Option<String>,
    pub warnings: Vec<String>,
}

impl CellReport {
    pub(crate) fn from_rates(
        model: String,
        strategy: String,
        rates: Vec<f64>,
        frequencies: BTreeMap<FeatureSubset, usize>,
        failures: Vec<(usize, String)>,
        unit_word: &str,
        units: usize,
    ) -> Self {
        let count = rates.len();
        let mut warnings = Vec::new();
        let (mean, se, skipped_reason) = if count == 0 {
            let reason = failures
                .first()
                .map(|(_, r)| r.clone())
                .unwrap_or_else(|| "no units".into());
            (None, None, Some(reason))
        } else {
            let mean = rates.iter().sum::<f64>() / count as f64;
            let se = if count > 1 {
                let var = rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (count - 1) as f64;
                (var / count as f64).sqrt()
            } else {
                warnings.push(format!("single {unit_word}: standard error reported as 0"));
                0.0
            };
            (Some(mean), Some(se), None)
        };
        if count > 0 && !failures.is_empty() {
            warnings.push(format!(
                "{} of {units} {unit_word}s failed; first: {}",
                failures.len(),
                failures[0].1
            ));
        }
        let mut subset_frequencies: Vec<(FeatureSubset, usize)> = frequencies.into_iter().collect();
        subset_frequencies.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Self {
            model,
            strategy,
            rates,
            mean,
            se,
            subset_frequencies,
            failures,
            skipped_reason,
            warnings,
        }
    }

    pub fn count(&self) -> usize {
        self.rates.len()
    }

    /// How often `subset` was selected.
    pub fn frequency_of(&self, subset: &FeatureSubset) -> usize {
        self.subset_frequencies
            .iter()
            .find(|(s, _)| s == subset)
            .map_or(0, |(_, c)| *c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub title: Option<String>,
    /// Replications or folds run.
    pub units: usize,
    pub models: Vec<String>,
    pub strategies: Vec<String>,
    /// Model-major order.
    pub cells: Vec<CellReport>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn cell(&self, model: &str, strategy: &str) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.model == model && c.strategy == strategy)
    }

    pub fn warnings(&self) -> impl Iterator<Item = String> + '_ {
        self.cells
            .iter()
            .flat_map(|c| c.warnings.iter().map(move |w| format!("{} / {}: {w}", c.model, c.strategy)))
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Rounds half away from zero to three decimals.
fn three_decimals(x: f64) -> String {
    format!("{:.3}", (x * 1000.0).round() / 1000.0)
}

/// `model,strategy,mean,se,count,skipped_reason`, one row per cell.
pub fn render_csv(rep: &ExperimentReport) -> String {
    let mut out = String::from("model,strategy,mean,se,count,skipped_reason\n");
    for c in &rep.cells {
        let num = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_field(&c.model),
            csv_field(&c.strategy),
            num(c.mean),
            num(c.se),
            c.count(),
            csv_field(c.skipped_reason.as_deref().unwrap_or(""))
        );
    }
    out
}

/// Strategies as rows, models as columns, `mean(se)` cells.
pub fn render_markdown(rep: &ExperimentReport) -> String {
    let mut out = String::new();
    if let Some(t) = &rep.title {
        let _ = writeln!(out, "## {t}\n");
    }
    let _ = writeln!(out, "| | {} |", rep.models.join(" | "));
    let _ = writeln!(out, "|---|{}", "---|".repeat(rep.models.len()));
    for s in &rep.strategies {
        let row: Vec<String> = rep
            .models
            .iter()
            .map(|m| match rep.cell(m, s) {
                Some(CellReport {
                    mean: Some(mean),
                    se: Some(se),
                    ..
                }) => format!("{}({})", three_decimals(*mean), three_decimals(*se)),
                _ => "—".to_string(),
            })
            .collect();
        let _ = writeln!(out, "| {s} | {} |", row.join(" | "));
    }
    out.push('\n');
    for c in rep.cells.iter().filter(|c| c.skipped_reason.is_some()) {
        let _ = writeln!(
            out,
            "- {} / {} skipped: {}",
            c.model,
            c.strategy,
            c.skipped_reason.as_deref().unwrap_or_default()
        );
    }
    for w in rep.warnings() {
        let _ = writeln!(out, "- {w}");
    }
    for n in &rep.notes {
        let _ = writeln!(out, "- {n}");
    }
    out
}

/// `model,strategy,subset,count`, one row per distinct selected subset.
pub fn render_subsets(rep: &ExperimentReport) -> String {
    let mut out = String::from("model,strategy,subset,count\n");
    for c in &rep.cells {
        for (subset, n) in &c.subset_frequencies {
            let _ = writeln!(
                out,
                "{},{},{},{n}",
                csv_field(&c.model),
                csv_field(&c.strategy),
                csv_field(&subset.to_string())
            );
        }
    }
    out
}

/// Companion file for the subset table: `table.md` → `table.subsets.csv`.
pub fn subsets_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.subsets.csv"))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            reason: e.to_string(),
        })?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Writes the report to `path` and the subset frequencies next to it.
pub fn emit_report(rep: &ExperimentReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => render_csv(rep),
        ReportFormat::Markdown => render_markdown(rep),
    };
    write(path, &text)?;
    write(&subsets_path(path), &render_subsets(rep))
}
