//! Argument definitions and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands;
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "normprobe",
    version,
    about = "Linear probes of concept embeddings against semantic norms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train and cross-validate one probe per attribute; write a results CSV.
    Run(RunArgs),
    /// Summarise one or more results files.
    Report(ReportArgs),
    /// Build and transform datasets.
    #[command(subcommand)]
    Dataset(DatasetCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Classification,
    Regression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineArg {
    /// Chance F1 is the test-fold positive rate.
    ClosedForm,
    /// Chance F1 is estimated from random labelings (see --baseline-trials).
    MonteCarlo,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Embedding file (NPRB1).
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Norms (`concept,attribute,value`) or ratings (`concept,attribute,rating`) CSV.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Attribute-type file; defaults to the dataset's companion file.
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    /// Dataset name written to the results; defaults to the dataset file stem.
    #[arg(long)]
    pub dataset_name: Option<String>,
    /// Expected task; inferred from the dataset header when omitted.
    #[arg(long, value_enum)]
    pub task: Option<TaskArg>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 13)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 2)]
    pub repeats: usize,
    /// Probe worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, env = "NORMPROBE_WORKERS", default_value_t = 0)]
    pub workers: usize,
    /// Fail when a dataset concept has no embedding (default).
    #[arg(long, conflicts_with = "lenient")]
    pub strict: bool,
    /// Drop dataset concepts that have no embedding.
    #[arg(long)]
    pub lenient: bool,
    #[arg(long, default_value_t = 1000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub gradient_tolerance: f64,
    #[arg(long, value_enum, default_value_t = BaselineArg::ClosedForm)]
    pub baseline: BaselineArg,
    #[arg(long, default_value_t = 1000)]
    pub baseline_trials: usize,
    #[command(flatten)]
    pub scale: ScaleArgs,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ScaleArgs {
    /// Lowest admissible rating.
    #[arg(long, default_value_t = 0.0)]
    pub scale_low: f64,
    /// Highest admissible rating.
    #[arg(long, default_value_t = 6.0)]
    pub scale_high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportMode {
    /// Per-model means of every metric, one column block per dataset.
    Summary,
    /// Per attribute type: mean and 95% bootstrap interval.
    ByType,
    /// Pearson correlations of per-attribute scores between models.
    Correlate,
    /// Models ranked per dataset.
    Rank,
    /// Correlation of supercategory purity with F1 selectivity, per model.
    Purity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PurityVariantArg {
    ExtensionShare,
    CategoryCoverage,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(value_enum)]
    pub mode: ReportMode,
    /// Results CSV files written by `normprobe run`.
    #[arg(required = true)]
    pub results: Vec<PathBuf>,
    /// Metric to report; defaults to F1 selectivity (classification) or RMSE
    /// (regression).
    #[arg(long)]
    pub metric: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub n_bootstrap: usize,
    #[arg(long, default_value_t = 13)]
    pub seed: u64,
    /// Norms dataset the results were computed on (purity).
    #[arg(long)]
    pub norms: Option<PathBuf>,
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    /// `concept,supercategory` file (purity).
    #[arg(long)]
    pub supercategories: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PurityVariantArg::ExtensionShare)]
    pub variant: PurityVariantArg,
    /// Also write per-attribute purity rows to this file (purity).
    #[arg(long)]
    pub per_attribute: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Extract `valid` judgements from annotation output, one record per line.
    ParseAnnotations(ParseAnnotationsArgs),
    /// Build a dense norms dataset from parsed records.
    Assemble(AssembleArgs),
    /// Drop attributes with fewer than --min-positive positive concepts.
    Filter(FilterArgs),
    /// Merge attributes whose embeddings are more similar than --threshold.
    Merge(MergeArgs),
    /// Median-binarise a ratings dataset.
    Binarize(BinarizeArgs),
    /// Keep only the listed concepts.
    Restrict(RestrictArgs),
    /// Per-attribute recall of reference positives in an assembled dataset.
    Recall(RecallArgs),
}

#[derive(Debug, Args)]
pub struct ParseAnnotationsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Parsed records (`line,concept,attribute,valid`).
    #[arg(long)]
    pub output: PathBuf,
    /// Failures (`line,valid_offset,reason,raw`); defaults to
    /// `<output stem>.failures.csv`.
    #[arg(long)]
    pub failures: Option<PathBuf>,
    /// Extra or overriding truth tokens, e.g. `--truth maybe=false`.
    #[arg(long, value_name = "TOKEN=BOOL")]
    pub truth: Vec<String>,
    /// Start from an empty vocabulary instead of the default one.
    #[arg(long)]
    pub no_default_truth: bool,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    /// Records written by `parse-annotations`.
    #[arg(long)]
    pub records: PathBuf,
    /// Concept list, one per line.
    #[arg(long)]
    pub concepts: PathBuf,
    /// `attribute,type` file listing every attribute.
    #[arg(long)]
    pub attributes: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub min_positive: usize,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    /// NPRB1 file with one embedding per attribute name.
    #[arg(long)]
    pub attribute_embeddings: PathBuf,
    #[arg(long, default_value_t = 0.9)]
    pub threshold: f64,
    #[arg(long)]
    pub output: PathBuf,
    /// Merge plan (`representative,member`); defaults to
    /// `<output stem>.merge.csv`.
    #[arg(long)]
    pub plan: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BinarizeRuleArg {
    StrictlyAboveMedian,
    AtOrAboveMedian,
}

#[derive(Debug, Args)]
pub struct BinarizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BinarizeRuleArg::StrictlyAboveMedian)]
    pub rule: BinarizeRuleArg,
    #[command(flatten)]
    pub scale: ScaleArgs,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RestrictArgs {
    /// Norms or ratings CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    /// Concept list, one per line.
    #[arg(long, required_unless_present = "keep_embeddings")]
    pub keep: Option<PathBuf>,
    /// Keep the concepts of this NPRB1 file.
    #[arg(long, conflicts_with = "keep")]
    pub keep_embeddings: Option<PathBuf>,
    #[command(flatten)]
    pub scale: ScaleArgs,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RecallArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub reference_attributes: Option<PathBuf>,
    #[arg(long)]
    pub assembled: PathBuf,
    #[arg(long)]
    pub assembled_attributes: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => commands::run::execute(&args),
        Command::Report(args) => commands::report::execute(&args),
        Command::Dataset(cmd) => commands::dataset::execute(cmd),
    }
}
