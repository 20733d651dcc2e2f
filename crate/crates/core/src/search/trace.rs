use std::fmt;
use std::str::FromStr;

use crate::classifiers::RiskEstimate;
use crate::data::FeatureSubset;
use crate::error::{Error, Result};

/// The retained candidates after one search step, best first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeamState {
    pub step: usize,
    pub candidates: Vec<(FeatureSubset, RiskEstimate)>,
}

impl BeamState {
    pub fn best(&self) -> Option<&(FeatureSubset, RiskEstimate)> {
        self.candidates.first()
    }
}

/// Bookkeeping for one step of the search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    /// Beam size entering the step (0 at step 1).
    pub parents: usize,
    /// Children produced before deduplication.
    pub generated: usize,
    /// Children dropped because another parent produced the same set.
    pub duplicates: usize,
    /// Candidates actually scored: `generated − duplicates`.
    pub fitted: usize,
    /// Candidates whose evaluation failed, with the reason.
    pub failures: Vec<(FeatureSubset, String)>,
    pub beam: BeamState,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchTrace {
    pub steps: Vec<StepRecord>,
}

impl SearchTrace {
    pub fn total_fitted(&self) -> usize {
        self.steps.iter().map(|s| s.fitted).sum()
    }

    pub fn final_beam(&self) -> Option<&BeamState> {
        self.steps.last().map(|s| &s.beam)
    }

    /// Line-oriented form, one step per line:
    ///
    /// ```text
    /// step=2 parents=5 generated=45 duplicates=10 fitted=35 failed=- beam={0,1}:3/500 {1,2}:5/500
    /// ```
    ///
    /// Failure reasons are not part of the text form.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SearchTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            write!(
                f,
                "step={} parents={} generated={} duplicates={} fitted={} failed=",
                s.beam.step, s.parents, s.generated, s.duplicates, s.fitted
            )?;
            if s.failures.is_empty() {
                write!(f, "-")?;
            } else {
                let list: Vec<String> = s.failures.iter().map(|(sub, _)| sub.to_string()).collect();
                write!(f, "{}", list.join(";"))?;
            }
            write!(f, " beam=")?;
            let beam: Vec<String> = s
                .beam
                .candidates
                .iter()
                .map(|(sub, score)| format!("{sub}:{score}"))
                .collect();
            writeln!(f, "{}", beam.join(" "))?;
        }
        Ok(())
    }
}

fn field<'a>(token: Option<&'a str>, key: &str) -> Result<&'a str> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| Error::TraceFormat(format!("expected {key}=…")))
}

fn count(token: Option<&str>, key: &str) -> Result<usize> {
    field(token, key)?
        .parse()
        .map_err(|_| Error::TraceFormat(format!("bad {key}")))
}

impl FromStr for SearchTrace {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut steps = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (head, beam_part) = line
                .split_once(" beam=")
                .ok_or_else(|| Error::TraceFormat(format!("missing beam in {line:?}")))?;
            let mut tokens = head.split_whitespace();
            let step = count(tokens.next(), "step")?;
            let parents = count(tokens.next(), "parents")?;
            let generated = count(tokens.next(), "generated")?;
            let duplicates = count(tokens.next(), "duplicates")?;
            let fitted = count(tokens.next(), "fitted")?;
            let failed = field(tokens.next(), "failed")?;
            let failures = if failed == "-" {
                Vec::new()
            } else {
                failed
                    .split(';')
                    .map(|s| Ok((s.parse::<FeatureSubset>()?, String::new())))
                    .collect::<Result<Vec<_>>>()?
            };
            let candidates = beam_part
                .split_whitespace()
                .map(|tok| {
                    let (sub, score) = tok
                        .rsplit_once(':')
                        .ok_or_else(|| Error::TraceFormat(format!("bad candidate {tok:?}")))?;
                    Ok((
                        sub.parse::<FeatureSubset>()?,
                        score.parse::<RiskEstimate>().map_err(Error::TraceFormat)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            steps.push(StepRecord {
                parents,
                generated,
                duplicates,
                fitted,
                failures,
                beam: BeamState { step, candidates },
            });
        }
        Ok(SearchTrace { steps })
    }
}
