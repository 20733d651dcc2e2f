use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bounds::binomial;
use crate::classifiers::{fit, misclassification_rate, ClassifierSpec, Lambda, TrainedModel};
use crate::data::{load_csv, stratified_kfold, FeatureSubset, LabeledDataset};
use crate::error::{Error, Result};
use crate::experiment::config::{ExperimentConfig, Source, Strategy};
use crate::experiment::report::{CellReport, ExperimentReport};
use crate::rng::mix;
use crate::search::{beam_search_with, forward_selection_with, Evaluator, PreparedEvaluator, Scoring};
use crate::simgen::{generate, SimConfig};

type CellOutcome = std::result::Result<(f64, FeatureSubset), String>;

/// Upper bound on the number of model fits `cfg` performs on data with
/// `p` features (duplicates removed by the beam are still counted).
pub fn estimate_fits(cfg: &ExperimentConfig, p: usize) -> u128 {
    let scoring_fits = cfg.scoring.fits_per_score() as u128;
    let mut per_unit: u128 = 0;
    for model in &cfg.models {
        let final_fit = match model {
            ClassifierSpec::LogRegL1 {
                lambda: Lambda::Cv,
                lambda_grid,
                inner_folds,
                ..
            } => {
                let grid = if lambda_grid.is_empty() { 20 } else { lambda_grid.len() };
                (*inner_folds * grid + 1) as u128
            }
            _ => 1,
        };
        // The penalty is chosen once per unit for searching.
        let mut model_fits = if final_fit > 1 { final_fit } else { 0 };
        for s in &cfg.strategies {
            let candidates: u128 = match *s {
                Strategy::AllFeatures => 0,
                Strategy::Forward { d } => (1..=d.min(p)).map(|t| (p - t + 1) as u128).sum(),
                Strategy::Beam { d, k } => (1..=d.min(p))
                    .map(|t| {
                        let parents = if t == 1 { 1 } else { binomial(p as u64, t as u64 - 1).min(k as u128) };
                        parents.saturating_mul((p - t + 1) as u128)
                    })
                    .fold(0u128, u128::saturating_add),
            };
            model_fits = model_fits
                .saturating_add(candidates.saturating_mul(scoring_fits))
                .saturating_add(final_fit);
        }
        per_unit = per_unit.saturating_add(model_fits);
    }
    per_unit.saturating_mul(cfg.source.units() as u128)
}

/// Runs every (model, strategy) cell over all replications or folds.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| run_validated(cfg)),
        None => run_validated(cfg),
    }
}

enum Units {
    Simulation(SimConfig),
    Folds {
        data: LabeledDataset<f64>,
        fold_of: crate::data::FoldAssignment,
    },
}

fn run_validated(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (units, p) = match &cfg.source {
        Source::Simulation { setting, .. } => (Units::Simulation(SimConfig::new(*setting, cfg.master_seed)), setting.p()),
        Source::Csv {
            path,
            label_column,
            cv_folds,
            has_header,
        } => {
            let data: LabeledDataset<f64> = load_csv(path, label_column, *has_header)?;
            let fold_of = stratified_kfold(&data, *cv_folds, mix(cfg.master_seed, u64::MAX))?;
            let p = data.n_features();
            (Units::Folds { data, fold_of }, p)
        }
    };
    for s in &cfg.strategies {
        if let Some(d) = s.target_size() {
            if d > p {
                return Err(Error::Config(format!("{s}: d exceeds the {p} available features")));
            }
        }
    }
    if let Some(cap) = cfg.max_fits {
        let needed = estimate_fits(cfg, p);
        if needed > cap as u128 {
            return Err(Error::BudgetExceeded {
                needed,
                budget: cap as u128,
            });
        }
    }

    let n_units = cfg.source.units();
    let outcomes: Vec<Vec<CellOutcome>> = (0..n_units)
        .into_par_iter()
        .map(|u| {
            let unit_seed = mix(cfg.master_seed, u as u64);
            let pair = match &units {
                Units::Simulation(sim) => generate::<f64>(&SimConfig::new(sim.which, unit_seed))
                    .map(|sp| (sp.train, sp.test)),
                Units::Folds { data, fold_of } => {
                    let (train, test) = fold_of.split(u);
                    Ok((data.select_rows(&train), data.select_rows(&test)))
                }
            };
            match pair {
                Ok((train, test)) => run_unit(cfg, &train, &test, unit_seed),
                Err(e) => vec![Err(format!("data: {e}")); cfg.models.len() * cfg.strategies.len()],
            }
        })
        .collect();

    Ok(assemble(cfg, n_units, outcomes))
}

/// The specification used while searching: a cross-validated logistic
/// penalty is chosen once on the full training data and then held fixed.
/// Also returns that full-data fit, when one was made.
fn search_spec(
    model: &ClassifierSpec,
    train: &LabeledDataset<f64>,
) -> Result<(ClassifierSpec, Option<TrainedModel<f64>>)> {
    match model {
        ClassifierSpec::LogRegL1 { lambda: Lambda::Cv, .. } => {
            let full = fit(model, train)?;
            let mut fixed = model.clone();
            if let ClassifierSpec::LogRegL1 { lambda, .. } = &mut fixed {
                *lambda = Lambda::Fixed(full.lambda().expect("logistic model"));
            }
            Ok((fixed, Some(full)))
        }
        other => Ok((other.clone(), None)),
    }
}

fn scoring_for_unit(scoring: &Scoring, unit_seed: u64) -> Scoring {
    let base = match scoring {
        Scoring::TrainResubstitution => return Scoring::TrainResubstitution,
        Scoring::Holdout { seed, .. } | Scoring::InnerCv { seed, .. } => *seed,
    };
    scoring.reseeded(mix(base, unit_seed))
}

fn run_unit(
    cfg: &ExperimentConfig,
    train: &LabeledDataset<f64>,
    test: &LabeledDataset<f64>,
    unit_seed: u64,
) -> Vec<CellOutcome> {
    let p = train.n_features();
    let mut out = Vec::with_capacity(cfg.models.len() * cfg.strategies.len());
    for model in &cfg.models {
        let needs_search = cfg.strategies.iter().any(|s| s.target_size().is_some());
        let mut full_fit = None;
        let evaluator: std::result::Result<Option<Evaluator>, String> = if needs_search {
            search_spec(model, train)
                .map(|(spec, full)| {
                    full_fit = full;
                    Some(Evaluator::new(spec, scoring_for_unit(&cfg.scoring, unit_seed)))
                })
                .map_err(|e| format!("penalty selection: {e}"))
        } else {
            Ok(None)
        };
        let prepared: std::result::Result<Option<PreparedEvaluator<'_, f64>>, String> = match &evaluator {
            Ok(Some(ev)) => ev.prepare(train).map(Some).map_err(|e| format!("scoring split: {e}")),
            Ok(None) => Ok(None),
            Err(e) => Err(e.clone()),
        };
        for strategy in &cfg.strategies {
            let subset = match (*strategy, &prepared) {
                (Strategy::AllFeatures, _) => Ok(FeatureSubset::full(p)),
                (_, Err(e)) => Err(e.clone()),
                (Strategy::Forward { d }, Ok(Some(scorer))) => {
                    forward_selection_with(scorer, d).map(|o| o.subset).map_err(|e| format!("search: {e}"))
                }
                (Strategy::Beam { d, k }, Ok(Some(scorer))) => {
                    beam_search_with(scorer, d, k).map(|o| o.subset).map_err(|e| format!("search: {e}"))
                }
                (_, Ok(None)) => unreachable!("searches imply a scorer"),
            };
            out.push(subset.and_then(|subset| {
                let score = || -> Result<f64> {
                    let model_fit = match (&full_fit, subset.len() == p) {
                        (Some(m), true) => m.clone(),
                        _ => fit(model, &train.project(&subset)?)?,
                    };
                    Ok(misclassification_rate(&model_fit, &test.project(&subset)?)?.rate())
                };
                score().map(|rate| (rate, subset)).map_err(|e| e.to_string())
            }));
        }
    }
    out
}

fn model_names(models: &[ClassifierSpec]) -> Vec<String> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for m in models {
        *seen.entry(m.name()).or_default() += 1;
    }
    let mut running: BTreeMap<&str, usize> = BTreeMap::new();
    models
        .iter()
        .map(|m| {
            let name = m.name();
            if seen[name] == 1 {
                name.to_string()
            } else {
                let i = running.entry(name).or_default();
                *i += 1;
                format!("{name} #{i}")
            }
        })
        .collect()
}

fn strategy_names(strategies: &[Strategy]) -> Vec<String> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for s in strategies {
        *seen.entry(s.label()).or_default() += 1;
    }
    strategies
        .iter()
        .map(|s| {
            if seen[s.label()] == 1 {
                s.label().to_string()
            } else {
                s.to_string()
            }
        })
        .collect()
}

fn assemble(cfg: &ExperimentConfig, n_units: usize, outcomes: Vec<Vec<CellOutcome>>) -> ExperimentReport {
    let models = model_names(&cfg.models);
    let strategies = strategy_names(&cfg.strategies);
    let unit_word = match cfg.source {
        Source::Simulation { .. } => "replication",
        Source::Csv { .. } => "fold",
    };
    let mut cells = Vec::new();
    for (mi, model) in models.iter().enumerate() {
        for (si, strategy) in strategies.iter().enumerate() {
            let slot = mi * strategies.len() + si;
            let mut rates = Vec::new();
            let mut frequencies: BTreeMap<FeatureSubset, usize> = BTreeMap::new();
            let mut failures = Vec::new();
            for (u, unit) in outcomes.iter().enumerate() {
                match &unit[slot] {
                    Ok((rate, subset)) => {
                        rates.push(*rate);
                        *frequencies.entry(subset.clone()).or_default() += 1;
                    }
                    Err(reason) => failures.push((u, reason.clone())),
                }
            }
            cells.push(CellReport::from_rates(
                model.clone(),
                strategy.clone(),
                rates,
                frequencies,
                failures,
                unit_word,
                n_units,
            ));
        }
    }
    let mut notes = vec![format!("{} {unit_word}s, master seed {}", n_units, cfg.master_seed)];
    notes.push(format!("scoring: {:?}", cfg.scoring));
    for (name, spec) in models.iter().zip(&cfg.models) {
        notes.push(format!("{name}: {spec:?}"));
    }
    ExperimentReport {
        title: cfg.title.clone(),
        units: n_units,
        models,
        strategies,
        cells,
        notes,
    }
}
