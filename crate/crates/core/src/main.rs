use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{ArgAction, Args, Parser, Subcommand};

use abnormality::corpus::{load_corpus, split_corpus, split_corpus_stratified, Corpus, Split};
use abnormality::evaluate::{
    documents, evaluate_documents, fit_on_split, grid_search, GridCell, GridRow, GridSpec,
    KernelTemplate, MetricReport, Selection,
};
use abnormality::persist::{load_model, save_model, Metadata, ModelBundle};
use abnormality::pipeline::{ClassifierConfig, ClassifierKind};
use abnormality::sparse::FeatureKind;
use abnormality::svm::{KernelKind, KernelSpec, SolverConfig};
use abnormality::vectorize::{FeatureConfig, TfMode};

#[derive(Parser)]
#[command(
    name = "abnormality",
    version,
    about = "Normal/abnormal classification of Bengali sentences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a pipeline on the training split, write the model, report test metrics.
    Train(TrainArgs),
    /// Report test-split metrics for a configuration, or score a saved model on a file.
    Evaluate(EvaluateArgs),
    /// Classify sentences with a saved model.
    Predict(PredictArgs),
    /// Evaluate a grid of feature × classifier configurations.
    GridSearch(GridArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Dataset file, one `label<TAB>text` record per line.
    #[arg(long)]
    input: PathBuf,
    /// Fraction of documents used for training.
    #[arg(long = "split", default_value_t = 0.7)]
    split_fraction: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Split each class separately.
    #[arg(long)]
    stratify: bool,
}

#[derive(Args, Clone)]
struct FeatureArgs {
    #[arg(long = "features", default_value = "tfidf")]
    features: FeatureKind,
    /// Keep only the K terms with the highest document frequency.
    #[arg(long)]
    max_features: Option<usize>,
    /// `relative` (count / document length) or `literal` (TF fixed at 1).
    #[arg(long, default_value = "relative", value_parser = parse_tf_mode)]
    tf_mode: TfMode,
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long, default_value = "svm")]
    classifier: ClassifierKind,
    #[arg(long = "c", default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value = "rbf")]
    kernel: KernelKind,
    /// Offset r of the polynomial and conventional sigmoid kernels.
    #[arg(long, default_value_t = 0.0)]
    coef0: f64,
    /// Use tanh(γ x·z + coef0) instead of tanh(γ x·z + γ) for `--kernel sigmoid`.
    #[arg(long)]
    sigmoid_coef0: bool,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    fit_prior: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// SMO stopping tolerance on KKT violations.
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    #[arg(long, default_value_t = 10_000_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    solver_seed: u64,
    /// Kernel cache size in MiB (0 disables).
    #[arg(long, default_value_t = 100)]
    cache_mb: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Model file to write.
    #[arg(long = "out", alias = "model")]
    out: PathBuf,
    /// Also write the test metrics as CSV.
    #[arg(long)]
    report_csv: Option<PathBuf>,
    /// Record the training time in the model metadata (makes files differ between runs).
    #[arg(long)]
    stamp_time: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Score this saved model on every record of the input instead of training.
    #[arg(long = "model")]
    model_path: Option<PathBuf>,
    #[arg(long)]
    report_csv: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// A single sentence.
    #[arg(long, conflicts_with = "input")]
    text: Option<String>,
    /// File with one sentence per line.
    #[arg(long, required_unless_present = "text")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    data: DataArgs,
    /// CSV file for the grid results.
    #[arg(long = "out")]
    out: PathBuf,
    #[arg(
        long = "features",
        value_delimiter = ',',
        default_value = "count,tfidf"
    )]
    features: Vec<FeatureKind>,
    #[arg(long = "classifiers", value_delimiter = ',', default_value = "nb,svm")]
    classifiers: Vec<ClassifierKind>,
    #[arg(long = "kernels", value_delimiter = ',', default_value = "linear,rbf")]
    kernels: Vec<KernelKind>,
    #[arg(long = "grid-c", value_delimiter = ',', default_value = "1,10,100")]
    c_values: Vec<f64>,
    #[arg(
        long = "grid-gamma",
        value_delimiter = ',',
        default_value = "0.01,0.1,1"
    )]
    gamma_values: Vec<f64>,
    #[arg(long = "nb-alpha", value_delimiter = ',', default_value = "1")]
    nb_alphas: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    coef0: f64,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    fit_prior: bool,
    #[arg(long)]
    max_features: Option<usize>,
    #[arg(long, default_value = "relative", value_parser = parse_tf_mode)]
    tf_mode: TfMode,
    /// Metric that picks the best row.
    #[arg(long = "select", default_value = "accuracy")]
    select_by: Selection,
    /// Worker threads for grid cells.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

fn parse_tf_mode(s: &str) -> Result<TfMode, String> {
    match s {
        "relative" => Ok(TfMode::Relative),
        "literal" => Ok(TfMode::Literal),
        other => Err(format!(
            "unknown tf mode `{other}` (expected relative or literal)"
        )),
    }
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            tolerance: self.tolerance,
            max_iterations: self.max_iter,
            seed: self.solver_seed,
            cache_mb: self.cache_mb,
        }
    }
}

impl FeatureArgs {
    fn config(&self) -> FeatureConfig {
        FeatureConfig {
            kind: self.features,
            max_features: self.max_features,
            tf_mode: self.tf_mode,
        }
    }
}

impl ModelArgs {
    fn config(&self) -> ClassifierConfig {
        match self.classifier {
            ClassifierKind::Nb => ClassifierConfig::Nb {
                alpha: self.alpha,
                fit_prior: self.fit_prior,
            },
            ClassifierKind::Svm => {
                let kind = match self.kernel {
                    KernelKind::Sigmoid if self.sigmoid_coef0 => KernelKind::SigmoidCoef0,
                    k => k,
                };
                ClassifierConfig::Svm {
                    c: self.c,
                    kernel: KernelSpec {
                        kind,
                        gamma: self.gamma,
                        coef0: self.coef0,
                    },
                    solver: self.solver.config(),
                }
            }
        }
    }
}

fn prepare(data: &DataArgs) -> CliResult<(Corpus, Split)> {
    let corpus = load_corpus(&data.input)?;
    corpus.ensure_both_classes()?;
    let split = if data.stratify {
        split_corpus_stratified(&corpus, data.split_fraction, data.seed)?
    } else {
        split_corpus(&corpus, data.split_fraction, data.seed)?
    };
    Ok((corpus, split))
}

fn describe_classifier(config: &ClassifierConfig) -> Vec<(&'static str, String)> {
    match config {
        ClassifierConfig::Nb { alpha, fit_prior } => vec![
            ("classifier", "nb".into()),
            ("alpha", alpha.to_string()),
            ("fit_prior", fit_prior.to_string()),
        ],
        ClassifierConfig::Svm { c, kernel, solver } => vec![
            ("classifier", "svm".into()),
            ("kernel", kernel.kind.to_string()),
            ("C", c.to_string()),
            ("gamma", kernel.gamma.to_string()),
            ("coef0", kernel.coef0.to_string()),
            ("tolerance", solver.tolerance.to_string()),
            ("max_iter", solver.max_iterations.to_string()),
            ("solver_seed", solver.seed.to_string()),
        ],
    }
}

fn describe_data(data: &DataArgs) -> Vec<(&'static str, String)> {
    vec![
        ("input", data.input.display().to_string()),
        ("split", data.split_fraction.to_string()),
        ("seed", data.seed.to_string()),
        ("stratify", data.stratify.to_string()),
    ]
}

fn describe_features(f: &FeatureConfig) -> Vec<(&'static str, String)> {
    vec![
        ("features", f.kind.to_string()),
        (
            "max_features",
            f.max_features
                .map_or_else(|| "all".to_string(), |k| k.to_string()),
        ),
        ("tf_mode", format!("{:?}", f.tf_mode).to_lowercase()),
    ]
}

fn write_config(out: &mut impl Write, command: &str, entries: &[(&str, String)]) -> io::Result<()> {
    writeln!(out, "configuration")?;
    writeln!(out, "  {:<14}{}", "command", command)?;
    for (k, v) in entries {
        writeln!(out, "  {k:<14}{v}")?;
    }
    Ok(())
}

fn write_report(out: &mut impl Write, title: &str, r: &MetricReport) -> io::Result<()> {
    writeln!(out, "{title}")?;
    for (name, v) in [
        ("accuracy", r.accuracy),
        ("precision", r.precision),
        ("recall", r.recall),
        ("f1", r.f1),
        ("macro_precision", r.macro_precision),
        ("macro_recall", r.macro_recall),
        ("macro_f1", r.macro_f1),
    ] {
        writeln!(out, "  {name:<16}{v:.6}")?;
    }
    let m = r.matrix;
    writeln!(out, "  confusion (positive = abnormal)")?;
    writeln!(out, "    tp {:<8} fp {}", m.tp, m.fp)?;
    writeln!(out, "    fn {:<8} tn {}", m.fn_, m.tn)?;
    if r.undefined.any() {
        writeln!(
            out,
            "  warning: zero denominator reported as 0 (precision: {}, recall: {}, f1: {})",
            r.undefined.precision, r.undefined.recall, r.undefined.f1
        )?;
    }
    Ok(())
}

fn write_report_csv(
    path: &Path,
    feature_kind: FeatureKind,
    config: &ClassifierConfig,
    r: &MetricReport,
) -> CliResult<()> {
    let row = GridRow {
        cell: GridCell {
            feature_kind,
            classifier: *config,
        },
        outcome: Ok(*r),
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(abnormality::evaluate::CSV_HEADER)?;
    w.write_record(row.csv_fields())?;
    w.flush()?;
    Ok(())
}

fn cmd_train(args: &TrainArgs) -> CliResult<()> {
    let features = args.features.config();
    let classifier = args.model.config();
    let mut out = io::stdout().lock();
    let mut entries = describe_data(&args.data);
    entries.extend(describe_features(&features));
    entries.extend(describe_classifier(&classifier));
    entries.push(("out", args.out.display().to_string()));
    write_config(&mut out, "train", &entries)?;

    let (corpus, split) = prepare(&args.data)?;
    let pipeline = fit_on_split(&corpus, &split, &features, &classifier)?;
    let test = documents(&corpus, &split.test_ids)?;
    let report = evaluate_documents(&pipeline, &test)?;

    let trained_at_unix = if args.stamp_time {
        Some(SystemTime::now().duration_since(UNIX_EPOCH)?.as_secs())
    } else {
        None
    };
    let metadata = Metadata {
        trained_at_unix,
        corpus_fingerprint: corpus.fingerprint(),
        seed: args.data.seed,
        train_fraction: args.data.split_fraction,
        stratified: args.data.stratify,
        n_train: split.train_ids.len(),
        features,
        hyperparameters: classifier,
    };
    save_model(&ModelBundle::new(&pipeline, metadata), &args.out)?;

    let title = format!(
        "test metrics ({} train / {} test documents, {} terms)",
        split.train_ids.len(),
        split.test_ids.len(),
        pipeline.features.dim()
    );
    write_report(&mut out, &title, &report)?;
    if let Some(path) = &args.report_csv {
        write_report_csv(path, features.kind, &classifier, &report)?;
    }
    Ok(())
}

fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let mut out = io::stdout().lock();
    if let Some(model_path) = &args.model_path {
        let bundle = load_model(model_path)?;
        let pipeline = bundle.pipeline()?;
        write_config(
            &mut out,
            "evaluate",
            &[
                ("input", args.data.input.display().to_string()),
                ("model", model_path.display().to_string()),
                ("features", bundle.feature_kind.to_string()),
            ],
        )?;
        let corpus = load_corpus(&args.data.input)?;
        let docs: Vec<_> = corpus.documents().iter().collect();
        let report = evaluate_documents(&pipeline, &docs)?;
        write_report(
            &mut out,
            &format!("metrics ({} documents)", docs.len()),
            &report,
        )?;
        if let Some(path) = &args.report_csv {
            write_report_csv(
                path,
                bundle.feature_kind,
                &bundle.metadata.hyperparameters,
                &report,
            )?;
        }
        return Ok(());
    }

    let features = args.features.config();
    let classifier = args.model.config();
    let mut entries = describe_data(&args.data);
    entries.extend(describe_features(&features));
    entries.extend(describe_classifier(&classifier));
    write_config(&mut out, "evaluate", &entries)?;
    let (corpus, split) = prepare(&args.data)?;
    let report = abnormality::evaluate::evaluate_pipeline(&corpus, &split, &features, &classifier)?;
    let title = format!("test metrics ({} test documents)", split.test_ids.len());
    write_report(&mut out, &title, &report)?;
    if let Some(path) = &args.report_csv {
        write_report_csv(path, features.kind, &classifier, &report)?;
    }
    Ok(())
}

fn cmd_predict(args: &PredictArgs) -> CliResult<()> {
    let bundle = load_model(&args.model)?;
    let pipeline = bundle.pipeline()?;
    let mut err = io::stderr().lock();
    let mut entries = vec![
        ("model", args.model.display().to_string()),
        ("features", bundle.feature_kind.to_string()),
    ];
    entries.extend(describe_classifier(&bundle.metadata.hyperparameters));
    write_config(&mut err, "predict", &entries)?;

    let sentences: Vec<String> = match (&args.text, &args.input) {
        (Some(text), _) => vec![text.clone()],
        (None, Some(path)) => {
            let file = fs::File::open(path)
                .map_err(|e| format!("failed to read {}: {e}", path.display()))?;
            io::BufReader::new(file)
                .lines()
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .filter(|l| !l.trim().is_empty())
                .collect()
        }
        (None, None) => unreachable!("clap requires --text or --input"),
    };

    let mut out = io::stdout().lock();
    for sentence in &sentences {
        let cleaned = abnormality::corpus::clean_text(sentence);
        let p = pipeline.predict_text(&cleaned)?;
        writeln!(out, "{}\t{}\t{}", p.label.name(), p.score, cleaned)?;
    }
    Ok(())
}

fn cmd_grid_search(args: &GridArgs) -> CliResult<()> {
    let grid = GridSpec {
        feature_kinds: args.features.clone(),
        classifiers: args.classifiers.clone(),
        kernels: args
            .kernels
            .iter()
            .map(|&kind| KernelTemplate {
                kind,
                coef0: args.coef0,
            })
            .collect(),
        c_values: args.c_values.clone(),
        gamma_values: args.gamma_values.clone(),
        nb_alphas: args.nb_alphas.clone(),
        fit_prior: args.fit_prior,
        solver: args.solver.config(),
        max_features: args.max_features,
        tf_mode: args.tf_mode,
        select_by: args.select_by,
    };
    let join = |v: Vec<String>| v.join(",");
    let mut out = io::stdout().lock();
    let mut entries = describe_data(&args.data);
    entries.extend([
        (
            "features",
            join(grid.feature_kinds.iter().map(ToString::to_string).collect()),
        ),
        (
            "classifiers",
            join(grid.classifiers.iter().map(ToString::to_string).collect()),
        ),
        (
            "kernels",
            join(grid.kernels.iter().map(|k| k.kind.to_string()).collect()),
        ),
        (
            "grid_c",
            join(grid.c_values.iter().map(ToString::to_string).collect()),
        ),
        (
            "grid_gamma",
            join(grid.gamma_values.iter().map(ToString::to_string).collect()),
        ),
        (
            "nb_alpha",
            join(grid.nb_alphas.iter().map(ToString::to_string).collect()),
        ),
        ("select", grid.select_by.to_string()),
        ("jobs", args.jobs.to_string()),
        ("out", args.out.display().to_string()),
    ]);
    write_config(&mut out, "grid-search", &entries)?;

    let (corpus, split) = prepare(&args.data)?;
    let result = grid_search(&corpus, &split, &grid, args.jobs)?;
    for row in &result.rows {
        if let Err(e) = &row.outcome {
            eprintln!("cell failed ({}): {e}", row.csv_fields()[..6].join(","));
        }
    }
    fs::write(&args.out, result.to_csv()?)
        .map_err(|e| format!("failed to write {}: {e}", args.out.display()))?;

    writeln!(out, "grid: {} cells", result.rows.len())?;
    match result.best_row() {
        Some(row) => {
            writeln!(out, "best ({}):", result.select_by)?;
            writeln!(out, "  {}", abnormality::evaluate::CSV_HEADER.join(","))?;
            writeln!(out, "  {}", row.csv_fields().join(","))?;
        }
        None => return Err("every grid cell failed".into()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Predict(a) => cmd_predict(a),
        Command::GridSearch(a) => cmd_grid_search(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
