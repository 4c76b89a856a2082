use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use indexmap::IndexMap;
use num_rational::BigRational;

use xgenre::corpus::{build_scenario, dedupe_external, ingest_tsv, write_tsv, Document, Fraction, Label};
use xgenre::ensemble::{
    accuracy_from_decimal, format_decimal, load_external_predictions, load_members_dir, write_predictions, Ensemble,
    LabelEncoding,
};
use xgenre::features::{build_clusters, default_k, EmbeddingTable, FeatureConfig, KMeansConfig};
use xgenre::harness::synth::{self, SynthConfig};
use xgenre::harness::{
    correct_count, round_half_away, slug, HarnessError, ModelKind, Report, Resources, RunConfig, ScenarioChoice,
    TrainedModel, CONFIG_ENV,
};

/// Gender profiling across genres: corpora, features, models, ensembles.
#[derive(Debug, Parser)]
#[command(name = "xgenre", version)]
struct Cli {
    /// Base configuration file (key=value lines); flags override it.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a TSV corpus and write it back normalized.
    Ingest {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Drop documents whose text also occurs in this provided corpus.
        #[arg(long)]
        dedupe_against: Option<PathBuf>,
    },
    /// Write train.tsv / valid.tsv for each scenario.
    Split {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<ScenarioChoice>,
        #[arg(long)]
        valid_fraction: Option<Fraction>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster word embeddings with size-capped k-means.
    ClusterBuild {
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 500)]
        max_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a feature-based classifier.
    Train {
        #[arg(long, value_parser = parse_feature_model)]
        model: Option<ModelKind>,
        /// Preset (`best-trad`) or comma-separated families.
        #[arg(long, value_parser = parse_features)]
        features: Option<String>,
        #[arg(long)]
        train: PathBuf,
        #[command(flatten)]
        opts: TrainOpts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the pair of per-gender n-gram language models.
    TrainLm {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=8))]
        order: Option<u64>,
        #[arg(long)]
        prune: bool,
        #[arg(long)]
        length_normalize: bool,
        #[arg(long)]
        lowercase: bool,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label documents with a saved model.
    Predict {
        #[arg(long)]
        model_dir: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Labelled documents whose accuracy goes into the header.
        #[arg(long, conflicts_with = "acc")]
        valid: Option<PathBuf>,
        /// Validation accuracy to record in the header (default 0.5).
        #[arg(long)]
        acc: Option<String>,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weighted majority vote over prediction files.
    Ensemble {
        #[arg(long)]
        members: PathBuf,
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        positive: Option<Label>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Accuracy of a prediction file against a labelled corpus.
    Evaluate {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
    },
    /// Render a saved report as a table.
    Report {
        input: PathBuf,
        #[arg(long)]
        kv: bool,
    },
    /// Run the configured scenarios end to end.
    Run {
        /// Extra `key=value` settings applied after the config file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Write a synthetic corpus and matching embeddings.
    Synth {
        #[arg(long, default_value_t = 2000)]
        docs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct TrainOpts {
    #[arg(long)]
    clusters: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lowercase: bool,
    #[arg(long)]
    l2_lambda: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    nb_alpha: Option<f64>,
}

fn parse_feature_model(s: &str) -> Result<ModelKind, String> {
    match s.parse::<ModelKind>().map_err(|e| e.to_string())? {
        k @ (ModelKind::Logreg | ModelKind::Nb) => Ok(k),
        other => Err(format!("`{other}` is not a feature model; use logreg or nb")),
    }
}

fn parse_features(s: &str) -> Result<String, String> {
    FeatureConfig::parse(s).map(|_| s.to_string()).map_err(|e| e.to_string())
}

/// Usage errors exit 1, data errors exit 2.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

macro_rules! data_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}
data_error!(
    io::Error,
    xgenre::corpus::CorpusError,
    xgenre::features::FeatureError,
    xgenre::ensemble::EnsembleError
);

type CliResult = Result<(), CliError>;

fn base_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => Ok(RunConfig::load(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn require_file(p: &Path) -> Result<(), CliError> {
    if p.exists() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{} does not exist", p.display())))
    }
}

fn write_corpus(path: &Path, docs: &[Document]) -> CliResult {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = io::BufWriter::new(fs::File::create(path)?);
    write_tsv(&mut w, docs)?;
    w.flush()?;
    Ok(())
}

fn gold_labels(docs: &[Document]) -> Result<IndexMap<String, Label>, CliError> {
    docs.iter()
        .map(|d| {
            d.label
                .map(|l| (d.id.clone(), l))
                .ok_or_else(|| CliError::Data(format!("gold document `{}` has no label", d.id)))
        })
        .collect()
}

fn predictions(model: &TrainedModel, docs: &[Document]) -> Result<IndexMap<String, Label>, CliError> {
    Ok(docs.iter().map(|d| d.id.clone()).zip(model.predict(docs)?).collect())
}

fn exact_accuracy(pred: &IndexMap<String, Label>, gold: &IndexMap<String, Label>) -> Result<BigRational, CliError> {
    let (c, n) = correct_count(pred, gold)?;
    Ok(BigRational::new(c.into(), n.into()))
}

fn save_predictions(path: &Path, name: &str, acc: &BigRational, preds: &IndexMap<String, Label>) -> CliResult {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = io::BufWriter::new(fs::File::create(path)?);
    write_predictions(&mut w, name, acc, preds.iter().map(|(k, l)| (k.as_str(), *l)))?;
    w.flush()?;
    Ok(())
}

fn percent(acc: &BigRational) -> String {
    use num_traits::ToPrimitive;
    round_half_away(acc.to_f64().unwrap_or(f64::NAN) * 100.0, 2)
}

fn train_model(kind: ModelKind, train: &Path, cfg: &RunConfig, out: &Path) -> CliResult {
    require_file(train)?;
    cfg.check()?;
    let docs = ingest_tsv(train)?.into_documents();
    let res = Resources::prepare(cfg)?;
    let model = TrainedModel::train(kind, &docs, cfg, res.clusters.as_ref())?;
    model.save(out)?;
    println!("trained {kind} on {} documents -> {}", docs.len(), out.display());
    Ok(())
}

fn execute(cli: Cli) -> CliResult {
    let config = cli.config.as_deref();
    match cli.command {
        Command::Ingest { input, out, dedupe_against } => {
            require_file(&input)?;
            let mut corpus = ingest_tsv(&input)?;
            let before = corpus.len();
            if let Some(p) = dedupe_against {
                require_file(&p)?;
                corpus = dedupe_external(&ingest_tsv(&p)?, &corpus);
            }
            write_corpus(&out, corpus.documents())?;
            println!("{} documents kept of {before}", corpus.len());
        }
        Command::Split { corpus, scenario, valid_fraction, seed, out } => {
            let mut cfg = base_config(config)?;
            cfg.corpus = corpus.or(cfg.corpus);
            cfg.scenario = scenario.unwrap_or(cfg.scenario);
            cfg.valid_fraction = valid_fraction.unwrap_or(cfg.valid_fraction);
            cfg.seed = seed.unwrap_or(cfg.seed);
            let path = cfg
                .corpus
                .clone()
                .ok_or_else(|| CliError::Usage("no corpus given".into()))?;
            require_file(&path)?;
            let corpus = ingest_tsv(&path)?;
            for spec in cfg.scenarios(&corpus)? {
                let (train, valid) = build_scenario(&corpus, &spec)?;
                let dir = out.join(slug(&spec.name));
                write_corpus(&dir.join("train.tsv"), &train)?;
                write_corpus(&dir.join("valid.tsv"), &valid)?;
                println!("{}\ttrain={}\tvalid={}", spec.name, train.len(), valid.len());
            }
        }
        Command::ClusterBuild { embeddings, k, max_size, seed, out } => {
            require_file(&embeddings)?;
            if k == Some(0) || max_size < 2 {
                return Err(CliError::Usage("k must be positive and max-size at least 2".into()));
            }
            let emb = EmbeddingTable::load(&embeddings)?;
            let k = k.unwrap_or_else(|| default_k(emb.len()));
            let cm = build_clusters(&emb, &KMeansConfig::new(k, max_size, seed))?;
            cm.save(&out)?;
            println!("{} words in {} clusters -> {}", cm.assignment().len(), cm.sizes().len(), out.display());
        }
        Command::Train { model, features, train, opts, out } => {
            let mut cfg = base_config(config)?;
            cfg.model = model.unwrap_or(match cfg.model {
                k @ (ModelKind::Logreg | ModelKind::Nb) => k,
                _ => ModelKind::Logreg,
            });
            cfg.features = features.unwrap_or(cfg.features);
            cfg.clusters = opts.clusters.or(cfg.clusters);
            cfg.embeddings = opts.embeddings.or(cfg.embeddings);
            cfg.k = opts.k.or(cfg.k);
            cfg.seed = opts.seed.unwrap_or(cfg.seed);
            cfg.lowercase |= opts.lowercase;
            cfg.l2_lambda = opts.l2_lambda.unwrap_or(cfg.l2_lambda);
            cfg.epochs = opts.epochs.unwrap_or(cfg.epochs);
            cfg.nb_alpha = opts.nb_alpha.unwrap_or(cfg.nb_alpha);
            train_model(cfg.model, &train, &cfg, &out)?;
        }
        Command::TrainLm { order, prune, length_normalize, lowercase, train, out } => {
            let mut cfg = base_config(config)?;
            cfg.model = ModelKind::DualLm;
            cfg.lm_order = order.map_or(cfg.lm_order, |o| o as usize);
            cfg.lm_prune |= prune;
            cfg.length_normalize |= length_normalize;
            cfg.lowercase |= lowercase;
            train_model(ModelKind::DualLm, &train, &cfg, &out)?;
        }
        Command::Predict { model_dir, input, valid, acc, name, out } => {
            require_file(&model_dir)?;
            require_file(&input)?;
            let acc = match (&acc, &valid) {
                (Some(a), _) => Some(accuracy_from_decimal(a).map_err(|e| CliError::Usage(e.to_string()))?),
                (None, Some(v)) => {
                    require_file(v)?;
                    None
                }
                (None, None) => Some(BigRational::new(1.into(), 2.into())),
            };
            let model = TrainedModel::load(&model_dir)?;
            let acc = match acc {
                Some(a) => a,
                None => {
                    let docs = ingest_tsv(valid.as_ref().expect("checked above"))?.into_documents();
                    exact_accuracy(&predictions(&model, &docs)?, &gold_labels(&docs)?)?
                }
            };
            let docs = ingest_tsv(&input)?.into_documents();
            let preds = predictions(&model, &docs)?;
            let name = name.unwrap_or_else(|| model.kind().to_string());
            save_predictions(&out, &name, &acc, &preds)?;
            println!("{} predictions -> {} (acc={})", preds.len(), out.display(), format_decimal(&acc));
        }
        Command::Ensemble { members, gold, positive, out } => {
            require_file(&members)?;
            let cfg = base_config(config)?;
            let encoding = LabelEncoding {
                positive: positive.unwrap_or(cfg.positive_label),
            };
            let loaded = if members.is_dir() {
                load_members_dir(&members, encoding)?
            } else {
                vec![load_external_predictions(&members, encoding)?]
            };
            let ensemble = Ensemble::new(loaded, encoding)?;
            for m in ensemble.members() {
                println!(
                    "member\t{}\tacc={}\tweight={}",
                    m.name,
                    format_decimal(m.validation_accuracy()),
                    format_decimal(m.weight())
                );
            }
            let combined = ensemble.combine_all()?;
            let acc = match gold {
                Some(g) => {
                    require_file(&g)?;
                    let docs = ingest_tsv(&g)?.into_documents();
                    let acc = exact_accuracy(&combined, &gold_labels(&docs)?)?;
                    println!("accuracy\t{}\t{}%", format_decimal(&acc), percent(&acc));
                    acc
                }
                None => BigRational::new(1.into(), 2.into()),
            };
            save_predictions(&out, "ensemble", &acc, &combined)?;
        }
        Command::Evaluate { gold, pred } => {
            require_file(&gold)?;
            require_file(&pred)?;
            let cfg = base_config(config)?;
            let encoding = LabelEncoding {
                positive: cfg.positive_label,
            };
            let member = load_external_predictions(&pred, encoding)?;
            let preds: IndexMap<String, Label> = member
                .predictions()
                .iter()
                .map(|(k, v)| (k.clone(), encoding.decode(*v)))
                .collect();
            let docs = ingest_tsv(&gold)?.into_documents();
            let g = gold_labels(&docs)?;
            let (c, n) = correct_count(&preds, &g)?;
            let acc = BigRational::new(c.into(), n.into());
            println!("{}\t{c}/{n}\t{}\t{}%", member.name, format_decimal(&acc), percent(&acc));
        }
        Command::Report { input, kv } => {
            require_file(&input)?;
            let report = Report::from_kv(&fs::read_to_string(&input)?)?;
            print!("{}", if kv { report.to_kv() } else { report.to_table() });
        }
        Command::Run { set } => {
            let mut cfg = base_config(config)?;
            for kv in &set {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("`{kv}` is not key=value")))?;
                cfg.set(k, v)?;
            }
            let (report, _) = xgenre::harness::run(&cfg)?;
            print!("{}", report.to_table());
        }
        Command::Synth { docs, seed, out } => {
            if docs < 20 {
                return Err(CliError::Usage("need at least 20 documents".into()));
            }
            let data = synth::generate(&SynthConfig {
                docs,
                seed,
                ..SynthConfig::default()
            });
            fs::create_dir_all(&out)?;
            write_corpus(&out.join("corpus.tsv"), data.corpus.documents())?;
            let mut w = io::BufWriter::new(fs::File::create(out.join("embeddings.txt"))?);
            data.embeddings.write(&mut w)?;
            w.flush()?;
            println!("{} documents -> {}", data.corpus.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
