//! Flag parsing and the flat JSON config file. Flags win over file values.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Search-space size (first of the doubling sweep when --n-max is set).
    #[arg(long)]
    pub n: Option<usize>,
    /// Last search-space size; sizes double from --n up to this value.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// First iteration count.
    #[arg(long)]
    pub t: Option<usize>,
    /// Last iteration count (inclusive).
    #[arg(long)]
    pub t_max: Option<usize>,
    /// Oracles per round, as a comma list: 1,4,16.
    #[arg(long)]
    pub s: Option<String>,
    /// Seeds: a comma list (3,5,8) or a half-open range (0..100).
    #[arg(long)]
    pub seeds: Option<String>,
    /// Random trials per seed.
    #[arg(long)]
    pub trials: Option<usize>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG plot destination.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Flat JSON file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Slack allowed before a check counts as violated.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unitaries {
    /// Haar-random unitaries between rounds.
    Random,
    /// One Grover diffusion per register.
    TensorGrover,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ParallelArgs {
    #[arg(long, value_enum)]
    pub unitaries: Option<Unitaries>,
    /// Target success probability for the partition baseline.
    #[arg(long)]
    pub target_p: Option<f64>,
    /// Workspace dimension appended to the query registers.
    #[arg(long)]
    pub workspace: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct DiscriminateArgs {
    /// Points on the p grid from 1/n to 1.
    #[arg(long)]
    pub p_points: Option<usize>,
}

/// A list-valued config entry: a number, an array, or the flag's string form.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ListValue {
    One(u64),
    Many(Vec<u64>),
    Text(String),
}

impl ListValue {
    fn into_flag(self) -> String {
        match self {
            ListValue::One(v) => v.to_string(),
            ListValue::Many(v) => v.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
            ListValue::Text(s) => s,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    #[serde(alias = "n_max")]
    n_max: Option<usize>,
    t: Option<usize>,
    #[serde(alias = "t_max")]
    t_max: Option<usize>,
    s: Option<ListValue>,
    seeds: Option<ListValue>,
    trials: Option<usize>,
    out: Option<PathBuf>,
    plot: Option<PathBuf>,
    tolerance: Option<f64>,
    unitaries: Option<Unitaries>,
    #[serde(alias = "target_p")]
    target_p: Option<f64>,
    workspace: Option<usize>,
    #[serde(alias = "p_points")]
    p_points: Option<usize>,
}

/// Everything a command can read, after merging flags over the file.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub t: Option<usize>,
    pub t_max: Option<usize>,
    pub s: Option<Vec<usize>>,
    pub seeds: Option<Vec<u64>>,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub unitaries: Option<Unitaries>,
    pub target_p: Option<f64>,
    pub workspace: Option<usize>,
    pub p_points: Option<usize>,
}

fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

pub fn merge(
    common: &CommonArgs,
    parallel: Option<&ParallelArgs>,
    discriminate: Option<&DiscriminateArgs>,
) -> Result<Settings, CliError> {
    let file = match &common.config {
        Some(path) => load(path)?,
        None => FileConfig::default(),
    };
    let s = common.s.clone().or(file.s.map(ListValue::into_flag));
    let seeds = common.seeds.clone().or(file.seeds.map(ListValue::into_flag));
    let parallel = parallel.cloned().unwrap_or_default();
    let discriminate = discriminate.cloned().unwrap_or_default();
    let tolerance = common.tolerance.or(file.tolerance);
    if let Some(tol) = tolerance {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(CliError::Usage(format!("tolerance must be a finite non-negative number, got {tol}")));
        }
    }
    Ok(Settings {
        n: common.n.or(file.n),
        n_max: common.n_max.or(file.n_max),
        t: common.t.or(file.t),
        t_max: common.t_max.or(file.t_max),
        s: s.map(|s| parse_list(&s)).transpose()?,
        seeds: seeds.map(|s| parse_seeds(&s)).transpose()?,
        trials: common.trials.or(file.trials),
        out: common.out.clone().or(file.out),
        plot: common.plot.clone().or(file.plot),
        tolerance,
        unitaries: parallel.unitaries.or(file.unitaries),
        target_p: parallel.target_p.or(file.target_p),
        workspace: parallel.workspace.or(file.workspace),
        p_points: discriminate.p_points.or(file.p_points),
    })
}

pub fn parse_list(text: &str) -> Result<Vec<usize>, CliError> {
    let values = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("not a non-negative integer: {part:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::Usage("empty list".into()));
    }
    Ok(values)
}

pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("bad seed list {text:?}: use 3,5,8 or 0..100"));
    let seeds: Vec<u64> = if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        (a..b).collect()
    } else {
        text.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if seeds.is_empty() {
        return Err(CliError::Usage(format!("empty seed range {text:?}")));
    }
    Ok(seeds)
}
