//! One method per subcommand. Every stage reads the configured inputs
//! itself, so partial runs produce the same files as `all`.

use std::fs;
use std::path::Path;

use anyhow::{Context as _, Result};
use benchdyn::cluster::{
    assign_cluster, rank_by_gold_distance, train_som, write_model, GoldFunction, SomConfig,
};
use benchdyn::ecosystem::{
    compare_all, coverage_estimate, equal_share_fraction, load_attribute_table, required_sample_size,
    sample_popularity_groups, utilization_ranking,
};
use benchdyn::ingest::{
    apply_polarity, detect_polarity_conflicts, load_polarity_table, parse_result_records, parse_task_hierarchy,
    write_result_records, ResultRecord, TaskHierarchy, DEFAULT_NEGATIVE_KEYWORDS,
};
use benchdyn::lifecycle::{lifecycle_table, LifecycleOptions, LifecycleReport};
use benchdyn::preprocess::{normalize_trajectory, write_vectors, NormalizedTrajectory};
use benchdyn::report::{self, ClusterAssignment, ClusterSummary, Format, Metadata, PopularitySummary, ReportDocument, ReportKind};
use benchdyn::rng::derive_seed;
use benchdyn::sota::{
    activity_counts, build_sota_map, clustering_eligible, descriptive_stats, extract_all_trajectories,
    relative_improvements,
};

use crate::config::RunConfig;
use crate::exit::CliError;

struct Inputs {
    parsed: Vec<ResultRecord>,
    records: Vec<ResultRecord>,
    parse_errors: Vec<benchdyn::ingest::LineError>,
    hierarchy: TaskHierarchy,
    metadata: Metadata,
}

pub struct Context {
    cfg: RunConfig,
    inputs: Option<Inputs>,
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    if !path.exists() {
        return Err(CliError::MissingInput(path.to_path_buf()).into());
    }
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn required<'a>(path: &'a Option<std::path::PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref().ok_or_else(|| CliError::Config(format!("{flag} is required for this command")).into())
}

impl Context {
    pub fn new(cfg: RunConfig) -> Self {
        Self { cfg, inputs: None }
    }

    fn inputs(&mut self) -> Result<&Inputs> {
        if self.inputs.is_none() {
            let results_path = required(&self.cfg.results, "--input")?;
            let polarity_path = required(&self.cfg.polarity, "--polarity")?;
            let results = read_input(results_path)?;
            let polarity = read_input(polarity_path)?;
            let hierarchy_bytes = match &self.cfg.hierarchy {
                Some(p) => read_input(p)?,
                None => Vec::new(),
            };

            let report = parse_result_records(results.as_slice())
                .with_context(|| format!("parsing {}", results_path.display()))?;
            let table = load_polarity_table(polarity.as_slice())
                .with_context(|| format!("parsing {}", polarity_path.display()))?;
            let records = apply_polarity(&report.records, &table)?;
            let hierarchy = if self.cfg.hierarchy.is_some() {
                parse_task_hierarchy(hierarchy_bytes.as_slice()).context("parsing the task hierarchy")?
            } else {
                TaskHierarchy::from_edges(Vec::new(), Default::default())?
            };
            let mut metadata = Metadata::new(
                report::input_digest([results.as_slice(), hierarchy_bytes.as_slice(), polarity.as_slice()]),
                self.cfg.seed,
            );
            metadata.generated_at = std::env::var("SOURCE_DATE_EPOCH").ok();
            self.inputs = Some(Inputs {
                parsed: report.records,
                records,
                parse_errors: report.errors,
                hierarchy,
                metadata,
            });
        }
        Ok(self.inputs.as_ref().expect("loaded above"))
    }

    fn write(&self, name: &str, content: &str) -> Result<()> {
        fs::create_dir_all(&self.cfg.out).with_context(|| format!("creating {}", self.cfg.out.display()))?;
        let path = self.cfg.out.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn formats(&self) -> Vec<Format> {
        self.cfg.formats.clone()
    }

    fn table_formats(&self) -> Vec<Format> {
        self.cfg.formats.iter().copied().filter(|f| *f != Format::Svg).collect()
    }

    pub fn ingest(&mut self, strict: bool) -> Result<()> {
        let inputs = self.inputs()?;
        if strict && !inputs.parse_errors.is_empty() {
            let first = &inputs.parse_errors[0];
            return Err(CliError::Schema(format!(
                "{} malformed result lines, first at line {}: {}",
                inputs.parse_errors.len(),
                first.line,
                first.message
            ))
            .into());
        }
        let mut normalized = Vec::new();
        write_result_records(&inputs.records, &mut normalized)?;
        let conflicts = detect_polarity_conflicts(&inputs.parsed, DEFAULT_NEGATIVE_KEYWORDS);
        let errors = report::parse_errors_csv(&inputs.parse_errors)?;
        let conflicts_csv = report::polarity_conflicts_csv(&conflicts)?;
        let (n_records, n_errors, n_conflicts) = (inputs.records.len(), inputs.parse_errors.len(), conflicts.len());
        self.write("records.jsonl", &String::from_utf8(normalized)?)?;
        self.write("parse_errors.csv", &errors)?;
        self.write("polarity_conflicts.csv", &conflicts_csv)?;
        println!("{n_records} records, {n_errors} malformed lines, {n_conflicts} polarity conflicts");
        Ok(())
    }

    fn cluster_vectors(&mut self) -> Result<Vec<NormalizedTrajectory>> {
        let inputs = self.inputs()?;
        extract_all_trajectories(&inputs.records)
            .iter()
            .filter(|t| clustering_eligible(t))
            .map(|t| normalize_trajectory(t).map_err(Into::into))
            .collect()
    }

    pub fn trajectories(&mut self) -> Result<()> {
        let trajectories = extract_all_trajectories(&self.inputs()?.records);
        let vectors = self.cluster_vectors()?;
        let mut buf = Vec::new();
        write_vectors(&vectors, &mut buf)?;
        self.write("trajectories.csv", &report::trajectories_csv(&trajectories)?)?;
        self.write("vectors.csv", &String::from_utf8(buf)?)?;
        println!("{} trajectories, {} eligible for clustering", trajectories.len(), vectors.len());
        Ok(())
    }

    pub fn relimp(&mut self) -> Result<()> {
        let inputs = self.inputs()?;
        let improvements: Vec<_> = extract_all_trajectories(&inputs.records).iter().flat_map(relative_improvements).collect();
        let descriptive = descriptive_stats(&inputs.records, &inputs.hierarchy);
        self.write("relimp.csv", &report::relative_improvements_csv(&improvements)?)?;
        self.write("descriptive.csv", &report::descriptive_csv(&descriptive)?)?;
        Ok(())
    }

    fn som_config(&self) -> SomConfig {
        SomConfig { seed: derive_seed(self.cfg.seed, "som"), ..self.cfg.som }
    }

    pub fn cluster(&mut self) -> Result<()> {
        let vectors = self.cluster_vectors()?;
        let model = train_som(&vectors, &self.som_config())?;
        let mut assignments = Vec::with_capacity(vectors.len());
        let mut sizes = vec![0; model.config.units()];
        for v in &vectors {
            let (row, col) = assign_cluster(&model, v)?;
            sizes[row * model.config.grid_cols + col] += 1;
            assignments.push(ClusterAssignment { source_id: v.source_id.clone(), row, col });
        }
        let summary = ClusterSummary {
            config: model.config,
            assignments,
            sizes,
            quantization_error: model.training_quantization_error.clone(),
        };
        let metadata = self.inputs()?.metadata.clone();
        for f in self.table_formats() {
            self.write(&format!("cluster.{f}"), &report::emit_cluster_report(&summary, f, &metadata)?)?;
        }
        let mut buf = Vec::new();
        write_model(&model, &mut buf)?;
        self.write("som_model.csv", &String::from_utf8(buf)?)?;
        println!("cluster sizes {:?}", summary.sizes);
        Ok(())
    }

    pub fn match_gold(&mut self, gold: &str, k: usize) -> Result<()> {
        let golds: Vec<GoldFunction> = if gold.eq_ignore_ascii_case("all") {
            GoldFunction::ALL.to_vec()
        } else {
            vec![gold.parse()?]
        };
        let vectors = self.cluster_vectors()?;
        for g in golds {
            let ranked = rank_by_gold_distance(&vectors, g, k)?;
            self.write(&format!("match_{g}.csv"), &report::gold_matches_csv(&ranked)?)?;
        }
        Ok(())
    }

    fn lifecycle_report(&mut self) -> Result<LifecycleReport> {
        let options = LifecycleOptions { window: self.cfg.window, censor_year: self.cfg.censor_year, disbanded: self.cfg.disbanded };
        let inputs = self.inputs()?;
        Ok(lifecycle_table(&inputs.records, &inputs.hierarchy, options)?)
    }

    pub fn lifecycle(&mut self) -> Result<()> {
        let report = self.lifecycle_report()?;
        self.write("lifecycle_states.csv", &report::lifecycle_entries_csv(&report.table.entries)?)?;
        self.write("lifecycle_counts.csv", &report::lifecycle_counts_csv(&report.counts)?)?;
        Ok(())
    }

    pub fn popularity(&mut self, list_size: Option<usize>) -> Result<()> {
        let cohort = self.cfg.cohort_year;
        let seed = derive_seed(self.cfg.seed, "popularity");
        let list_size = list_size.unwrap_or(self.cfg.list_size);
        let inputs = self.inputs()?;
        let ranking = utilization_ranking(&inputs.records, cohort);
        let metadata = inputs.metadata.clone();
        let summary = PopularitySummary {
            equal_share_fraction: equal_share_fraction(&ranking).ok(),
            ranking,
            comparison: Vec::new(),
        };
        for f in self.table_formats() {
            self.write(&format!("popularity.{f}"), &report::emit_popularity_report(&summary, f, &metadata)?)?;
        }
        if summary.ranking.entries.len() >= 2 {
            let (top, bottom) = sample_popularity_groups(&summary.ranking, list_size, seed)?;
            self.write("popularity_groups.csv", &report::popularity_groups_csv(&top, &bottom)?)?;
        }
        match summary.equal_share_fraction {
            Some(f) => println!("{} datasets, equal-share fraction {:.1}%", summary.ranking.entries.len(), 100.0 * f),
            None => println!("no datasets in the selected cohort"),
        }
        Ok(())
    }

    pub fn compare(&mut self) -> Result<()> {
        let path = required(&self.cfg.attributes, "--attributes")?.to_path_buf();
        let bytes = read_input(&path)?;
        let table = load_attribute_table(bytes.as_slice()).with_context(|| format!("parsing {}", path.display()))?;
        if !table.groups_balanced() {
            let (t, b) = table.group_sizes();
            eprintln!("warning: attribute groups are unbalanced ({t} top, {b} bottom)");
        }
        let rows = compare_all(&table)?;
        let metadata = Metadata::new(report::input_digest([bytes.as_slice()]), self.cfg.seed);
        for f in self.table_formats() {
            let text = match f {
                Format::Csv => report::comparison_csv(&rows)?,
                _ => ReportDocument::new(ReportKind::PopularityReport, metadata.clone(), &rows).to_json()?,
            };
            self.write(&format!("comparison.{f}"), &text)?;
        }
        Ok(())
    }

    pub fn coverage(
        &mut self,
        s: Option<u64>,
        n: Option<u64>,
        corpus: Option<u64>,
        c: Option<u64>,
        margin: Option<f64>,
        confidence: f64,
    ) -> Result<()> {
        let file = self.cfg.coverage;
        let need = |v: Option<u64>, flag: &str| v.ok_or_else(|| CliError::Config(format!("coverage needs --{flag}")));
        let s = need(s.or(file.s), "s")?;
        let n = need(n.or(file.n), "n")?;
        let corpus = need(corpus.or(file.corpus), "T")?;
        let c = need(c.or(file.captured), "c")?;
        let e = coverage_estimate(s, n, corpus, c)?;
        println!("sota_rate {:.2}%", 100.0 * e.sota_rate);
        println!("estimated_sota_papers {:.2}", e.estimated_sota_papers);
        println!("coverage {:.2}%", 100.0 * e.coverage);
        if e.exceeds_estimate() {
            println!("note: captured papers exceed the extrapolated total");
        }
        if let Some(m) = margin {
            println!("required_sample_size {}", required_sample_size(corpus, m, confidence)?);
        }
        Ok(())
    }

    pub fn report(&mut self) -> Result<()> {
        let lifecycle = self.lifecycle_report()?;
        let inputs = self.inputs()?;
        let grid = build_sota_map(&inputs.records, &inputs.hierarchy)?;
        let activity = activity_counts(&inputs.records, &inputs.hierarchy);
        let metadata = inputs.metadata.clone();
        for f in self.formats() {
            self.write(&format!("sota_map.{f}"), &report::emit_sota_map(&grid, f, &metadata)?)?;
            self.write(&format!("lifecycle.{f}"), &report::emit_lifecycle_map(&lifecycle, f, &metadata)?)?;
            self.write(&format!("activity.{f}"), &report::emit_activity_counts(&activity, f, &metadata)?)?;
        }
        Ok(())
    }

    pub fn all(&mut self) -> Result<()> {
        self.ingest(false)?;
        self.trajectories()?;
        self.relimp()?;
        if self.cluster_vectors()?.is_empty() {
            eprintln!("warning: no trajectory is eligible for clustering; skipping cluster and match");
        } else {
            self.cluster()?;
            self.match_gold("all", 10)?;
        }
        self.lifecycle()?;
        self.popularity(None)?;
        if self.cfg.attributes.is_some() {
            self.compare()?;
        }
        let cov = self.cfg.coverage;
        if cov.s.is_some() && cov.n.is_some() && cov.corpus.is_some() && cov.captured.is_some() {
            self.coverage(None, None, None, None, None, 0.95)?;
        }
        self.report()
    }
}
