//! Run configuration: TOML file values overlaid by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use benchdyn::cluster::{SomConfig, SomInit};
use benchdyn::lifecycle::{AnalysisWindow, DisbandedMode};
use benchdyn::report::Format;
use serde::Deserialize;

use crate::exit::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
    #[serde(default)]
    pub inputs: InputsSection,
    pub window: Option<WindowSection>,
    #[serde(default)]
    pub lifecycle: LifecycleSection,
    #[serde(default)]
    pub popularity: PopularitySection,
    #[serde(default)]
    pub som: SomSection,
    #[serde(default)]
    pub coverage: CoverageSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputsSection {
    pub results: Option<PathBuf>,
    pub hierarchy: Option<PathBuf>,
    pub polarity: Option<PathBuf>,
    pub attributes: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    pub first_year: i32,
    pub last_year: i32,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifecycleSection {
    pub censor_year: Option<i32>,
    pub disbanded: Option<DisbandedMode>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopularitySection {
    pub cohort_year: Option<i32>,
    pub list_size: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SomSection {
    pub grid: Option<String>,
    pub sigma: Option<f64>,
    pub learning_rate: Option<f64>,
    pub iterations: Option<usize>,
    pub init: Option<SomInit>,
}

#[derive(Debug, Default, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct CoverageSection {
    pub s: Option<u64>,
    pub n: Option<u64>,
    pub corpus: Option<u64>,
    pub captured: Option<u64>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub results: Option<PathBuf>,
    pub hierarchy: Option<PathBuf>,
    pub polarity: Option<PathBuf>,
    pub attributes: Option<PathBuf>,
    pub seed: u64,
    pub window: Option<AnalysisWindow>,
    pub censor_year: Option<i32>,
    pub disbanded: DisbandedMode,
    pub cohort_year: Option<i32>,
    pub list_size: usize,
    pub som: SomConfig,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub coverage: CoverageSection,
}

/// Flag values; `None` leaves the file value in place.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub results: Option<PathBuf>,
    pub hierarchy: Option<PathBuf>,
    pub polarity: Option<PathBuf>,
    pub attributes: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub formats: Option<String>,
    pub window: Option<String>,
    pub cohort_year: Option<i32>,
    pub censor_year: Option<i32>,
    pub som_sigma: Option<f64>,
    pub som_lr: Option<f64>,
    pub som_iters: Option<usize>,
    pub grid: Option<String>,
}

pub fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("grid must look like 1x3, got {text:?}"));
    let (r, c) = text.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

pub fn parse_window(text: &str) -> Result<AnalysisWindow, CliError> {
    let bad = || CliError::Config(format!("window must look like 2012:2022, got {text:?}"));
    let (a, b) = text.trim().split_once([':', '-']).ok_or_else(bad)?;
    let window = AnalysisWindow { first_year: a.trim().parse().map_err(|_| bad())?, last_year: b.trim().parse().map_err(|_| bad())? };
    if window.first_year > window.last_year {
        return Err(bad());
    }
    Ok(window)
}

pub fn parse_formats<S: AsRef<str>>(items: &[S]) -> Result<Vec<Format>, CliError> {
    let mut out = Vec::new();
    for item in items {
        let f: Format = item.as_ref().parse().map_err(|e: benchdyn::Error| CliError::Config(e.to_string()))?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("at least one output format is required".into()));
    }
    Ok(out)
}

fn anchored(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

pub fn load_file(path: &Path) -> anyhow::Result<FileConfig> {
    if !path.exists() {
        return Err(CliError::MissingInput(path.to_path_buf()).into());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg: FileConfig = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let fix = |p: Option<PathBuf>| p.map(|p| anchored(base, p));
    cfg.inputs.results = fix(cfg.inputs.results.take());
    cfg.inputs.hierarchy = fix(cfg.inputs.hierarchy.take());
    cfg.inputs.polarity = fix(cfg.inputs.polarity.take());
    cfg.inputs.attributes = fix(cfg.inputs.attributes.take());
    cfg.out = fix(cfg.out.take());
    Ok(cfg)
}

pub fn resolve(file: FileConfig, flags: Overrides) -> Result<RunConfig, CliError> {
    let mut som = SomConfig::default();
    if let Some(init) = file.som.init {
        som.init = init;
    }
    if let Some((r, c)) = flags.grid.as_deref().or(file.som.grid.as_deref()).map(parse_grid).transpose()? {
        som.grid_rows = r;
        som.grid_cols = c;
    }
    if let Some(v) = flags.som_sigma.or(file.som.sigma) {
        som.sigma = v;
    }
    if let Some(v) = flags.som_lr.or(file.som.learning_rate) {
        som.learning_rate = v;
    }
    if let Some(v) = flags.som_iters.or(file.som.iterations) {
        som.iterations = v;
    }
    som.validate().map_err(|e| CliError::Config(e.to_string()))?;

    let window = match flags.window.as_deref() {
        Some(w) => Some(parse_window(w)?),
        None => file.window.map(|w| AnalysisWindow { first_year: w.first_year, last_year: w.last_year }),
    };
    let formats = match flags.formats {
        Some(list) => parse_formats(&list.split(',').map(str::trim).collect::<Vec<_>>())?,
        None => match file.formats {
            Some(list) => parse_formats(&list)?,
            None => vec![Format::Csv, Format::Json, Format::Svg],
        },
    };
    Ok(RunConfig {
        results: flags.results.or(file.inputs.results),
        hierarchy: flags.hierarchy.or(file.inputs.hierarchy),
        polarity: flags.polarity.or(file.inputs.polarity),
        attributes: flags.attributes.or(file.inputs.attributes),
        seed: flags.seed.or(file.seed).unwrap_or(benchdyn::rng::DEFAULT_SEED),
        window,
        censor_year: flags.censor_year.or(file.lifecycle.censor_year),
        disbanded: file.lifecycle.disbanded.unwrap_or_default(),
        cohort_year: flags.cohort_year.or(file.popularity.cohort_year),
        list_size: file.popularity.list_size.unwrap_or(20),
        som,
        out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        formats,
        coverage: file.coverage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str(
            "seed = 7\nformats = [\"csv\"]\n[som]\ngrid = \"2x2\"\nsigma = 0.5\n[popularity]\ncohort_year = 2018\n",
        )
        .unwrap();
        let flags = Overrides { seed: Some(9), grid: Some("1x3".into()), ..Default::default() };
        let cfg = resolve(file, flags).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!((cfg.som.grid_rows, cfg.som.grid_cols, cfg.som.sigma), (1, 3, 0.5));
        assert_eq!(cfg.formats, vec![Format::Csv]);
        assert_eq!(cfg.cohort_year, Some(2018));
    }

    #[test]
    fn defaults() {
        let cfg = resolve(FileConfig::default(), Overrides::default()).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.som, SomConfig::default());
        assert_eq!(cfg.formats.len(), 3);
    }

    #[test]
    fn bad_values_are_config_errors() {
        assert!(parse_grid("3").is_err());
        assert!(parse_window("2020:2019").is_err());
        assert_eq!(parse_window("2012-2022").unwrap(), AnalysisWindow { first_year: 2012, last_year: 2022 });
        assert!(parse_formats(&["pdf"]).is_err());
        assert!(toml::from_str::<FileConfig>("sede = 1").is_err());
        let flags = Overrides { som_sigma: Some(-1.0), ..Default::default() };
        assert!(resolve(FileConfig::default(), flags).is_err());
    }
}
