//! Command-line driver.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 numeric failure. `PTR_SEED`, when set, overrides `--seed`.

mod config;
mod manifest;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{PromptConfig, RunConfig};
pub use manifest::{sha256_file, unix_now, InputFile, RunManifest};

use crate::corpus::{
    generate_synthetic, load_jsonl, pretraining_text, synthetic_vocabulary, to_jsonl, Dataset,
};
use crate::dsl::print_task_spec;
use crate::eval::{evaluate, sweep_fewshot, ModelInit, SweepData};
use crate::mlm::{checkpoint, TinyMlm};
use crate::prompt::{inspect, PromptSchema};
use crate::task::Task;
use crate::train::{predict_all, pretrain, train, Objective, TrainError};

pub const SEED_ENV: &str = "PTR_SEED";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

/// Writes `text`, creating parent directories.
pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Parser)]
#[command(name = "ptr", version, about = "Prompt tuning with logic rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a spec into a JSON prompt schema.
    Compile {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        reverse: ReverseArg,
    },
    /// Print the template and verbalizer table of a spec or schema.
    Inspect {
        /// A `.ptr` spec or a compiled `.json` schema.
        input: PathBuf,
        #[command(flatten)]
        reverse: ReverseArg,
    },
    /// Print a spec with the given classes' relations reversed.
    Reverse {
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        classes: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic JSONL corpus for a spec.
    Gen {
        #[arg(long)]
        spec: PathBuf,
        /// Instances per class.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Initialize (and optionally pretrain) a model checkpoint.
    InitModel {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Corpora whose words the vocabulary must cover.
        #[arg(long)]
        data: Vec<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train on a JSONL corpus and write a run directory.
    Train(TrainArgs),
    /// Score a checkpoint on a JSONL corpus.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's objective.
        #[arg(long)]
        objective: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Few-shot sweep of PTR and the [CLS]-head baseline.
    Sweep {
        #[arg(long)]
        fewshot: bool,
        #[arg(long)]
        spec: PathBuf,
        /// Pool the few-shot training subsets are drawn from.
        #[arg(long)]
        data: PathBuf,
        /// Pool for the dev subsets; without it they come from --data.
        #[arg(long)]
        dev: Option<PathBuf>,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Start every cell from this checkpoint.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-cell results as JSON.
        #[arg(long)]
        cells: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ReverseArg {
    /// Classes to reverse, in addition to the config's list.
    #[arg(long, value_delimiter = ',')]
    reverse: Vec<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, required_unless_present = "manifest")]
    spec: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    data: Option<PathBuf>,
    #[arg(long)]
    dev: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from this checkpoint instead of a new model.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Repeat the run recorded in this manifest.
    #[arg(long, conflicts_with_all = ["spec", "data", "dev", "test", "config", "model", "seed"])]
    manifest: Option<PathBuf>,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn resolve_seed(flag: Option<u64>, fallback: u64) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(flag.unwrap_or(fallback)),
    }
}

fn load_task(spec: &Path, reverse: &[String]) -> Result<Task, CliError> {
    let task = Task::load(spec).map_err(data)?;
    if reverse.is_empty() {
        Ok(task)
    } else {
        task.reversed(reverse).map_err(data)
    }
}

fn load_data(path: &Path) -> Result<Dataset, CliError> {
    load_jsonl(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path, schema: &PromptSchema) -> Result<TinyMlm, CliError> {
    let model = checkpoint::load(path).map_err(data)?;
    if model.classes != schema.classes {
        return Err(CliError::Data(format!(
            "{}: checkpoint classes do not match the spec",
            path.display()
        )));
    }
    Ok(model)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_objective(name: &str) -> Result<Objective, CliError> {
    match name {
        "ptr" => Ok(Objective::Ptr),
        "cls-baseline" => Ok(Objective::ClsBaseline),
        _ => Err(CliError::Usage(format!(
            "unknown objective `{name}` (expected ptr or cls-baseline)"
        ))),
    }
}

/// A new model covering the task and the datasets, pretrained on synthetic
/// text from the spec when the config asks for it.
fn initial_model(task: &Task, cfg: &RunConfig, datasets: &[&Dataset], seed: u64) -> Result<TinyMlm, CliError> {
    let vocab = task.vocab_with(datasets, synthetic_vocabulary(&task.spec));
    let model = task.model(cfg.model.clone(), vocab, seed).map_err(data)?;
    if cfg.pretrain.epochs == 0 {
        return Ok(model);
    }
    let text = pretraining_text(&task.spec, cfg.pretrain.sentences, seed);
    let (mut model, _) = pretrain(&model, &text, &cfg.pretrain, seed)?;
    model.init_phrases_from_words();
    Ok(model)
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Compile { spec, out, reverse } => {
            let cfg = RunConfig::load(reverse.config.as_deref())?;
            let task = load_task(&spec, &[cfg.prompt.reverse, reverse.reverse].concat())?;
            emit(out.as_deref(), &task.schema.to_json())
        }
        Command::Inspect { input, reverse } => {
            let cfg = RunConfig::load(reverse.config.as_deref())?;
            let classes = [cfg.prompt.reverse, reverse.reverse].concat();
            let schema = if input.extension().is_some_and(|e| e == "json") {
                if !classes.is_empty() {
                    return Err(CliError::Usage("--reverse needs a .ptr spec, not a schema".into()));
                }
                let text = fs::read_to_string(&input)
                    .map_err(|e| CliError::Data(format!("cannot read {}: {e}", input.display())))?;
                PromptSchema::from_json(&text)
                    .map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?
            } else {
                load_task(&input, &classes)?.schema
            };
            print!("{}", inspect(&schema));
            Ok(())
        }
        Command::Reverse { spec, classes, out } => {
            let task = load_task(&spec, &classes)?;
            emit(out.as_deref(), &print_task_spec(&task.spec))
        }
        Command::Gen { spec, n, seed, noise, out } => {
            if !(0.0..=1.0).contains(&noise) {
                return Err(CliError::Usage(format!("--noise must be in [0, 1], got {noise}")));
            }
            let seed = resolve_seed(Some(seed), 0)?;
            let task = load_task(&spec, &[])?;
            emit(out.as_deref(), &to_jsonl(&generate_synthetic(&task.spec, n, seed, noise)))
        }
        Command::InitModel { spec, config, data: paths, seed, out } => {
            let cfg = RunConfig::load(config.as_deref())?;
            let seed = resolve_seed(seed, cfg.train.seed)?;
            let task = load_task(&spec, &cfg.prompt.reverse)?;
            let datasets = paths.iter().map(|p| load_data(p)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Dataset> = datasets.iter().collect();
            let model = initial_model(&task, &cfg, &refs, seed)?;
            checkpoint::save(&model, &out).map_err(data)
        }
        Command::Train(args) => run_train(args),
        Command::Eval {
            model,
            spec,
            data: path,
            config,
            objective,
            report,
            csv,
            predictions,
        } => {
            let cfg = RunConfig::load(config.as_deref())?;
            let objective = match objective {
                Some(name) => parse_objective(&name)?,
                None => cfg.train.objective,
            };
            let task = load_task(&spec, &cfg.prompt.reverse)?;
            let model = load_model(&model, &task.schema)?;
            let test = load_data(&path)?;
            let preds = predict_all(&model, &task.schema, &test, objective)?;
            let evaluation = evaluate(&preds, &test.labels(), cfg.train.negative_class.as_deref()).map_err(data)?;
            if let Some(p) = predictions {
                write_file(&p, &lines(&preds))?;
            }
            if let Some(p) = csv {
                write_file(&p, &evaluation.to_csv())?;
            }
            let json = to_json(&evaluation);
            match report {
                Some(p) => write_file(&p, &json)?,
                None => print!("{}", evaluation.to_csv()),
            }
            Ok(())
        }
        Command::Sweep {
            fewshot,
            spec,
            data: path,
            dev,
            test,
            config,
            model,
            seed,
            out,
            cells,
        } => {
            if !fewshot {
                return Err(CliError::Usage("sweep needs --fewshot (the only sweep mode)".into()));
            }
            let cfg = RunConfig::load(config.as_deref())?;
            let seed = resolve_seed(seed, cfg.train.seed)?;
            let task = load_task(&spec, &cfg.prompt.reverse)?;
            let pool = load_data(&path)?;
            let dev_pool = dev.as_deref().map(load_data).transpose()?;
            let test = load_data(&test)?;
            let mut refs = vec![&pool, &test];
            refs.extend(dev_pool.as_ref());
            let base = match model {
                Some(p) => Some(load_model(&p, &task.schema)?),
                None if cfg.pretrain.epochs > 0 => Some(initial_model(&task, &cfg, &refs, seed)?),
                None => None,
            };
            let vocab = task.vocab_with(&refs, synthetic_vocabulary(&task.spec));
            let init = match &base {
                Some(m) => ModelInit::From(m),
                None => ModelInit::Fresh {
                    config: &cfg.model,
                    vocab: &vocab,
                },
            };
            let table = sweep_fewshot(
                &task.schema,
                init,
                SweepData {
                    train_pool: &pool,
                    dev_pool: dev_pool.as_ref(),
                    test: &test,
                },
                &cfg.fewshot,
                &cfg.train,
                &[Objective::Ptr, Objective::ClsBaseline],
            );
            for cell in table.cells.iter().filter(|c| c.f1.is_err()) {
                eprintln!(
                    "warning: {} K={} seed {} failed: {}",
                    cell.method.display_name(),
                    cell.k,
                    cell.seed,
                    cell.f1.as_ref().unwrap_err()
                );
            }
            if let Some(p) = cells {
                write_file(&p, &to_json(&table.cells))?;
            }
            emit(out.as_deref(), &table.to_csv())
        }
    }
}

fn lines(items: &[String]) -> String {
    items.iter().map(|s| format!("{s}\n")).collect()
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn run_train(args: TrainArgs) -> Result<(), CliError> {
    let started = unix_now();
    let (cfg, seed, inputs) = match &args.manifest {
        Some(path) => {
            let m = RunManifest::load(path)?;
            m.verify_inputs()?;
            (m.config, m.seed, m.inputs)
        }
        None => {
            let cfg = RunConfig::load(args.config.as_deref())?;
            let seed = resolve_seed(args.seed, cfg.train.seed)?;
            let mut inputs = Vec::new();
            let roles = [
                ("spec", &args.spec),
                ("data", &args.data),
                ("dev", &args.dev),
                ("test", &args.test),
                ("model", &args.model),
            ];
            for (role, path) in roles {
                if let Some(p) = path {
                    inputs.push(InputFile::new(role, p)?);
                }
            }
            (cfg, seed, inputs)
        }
    };
    let mut cfg = cfg;
    cfg.train.seed = seed;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: "train".to_string(),
        seed,
        config: cfg.clone(),
        inputs,
        started_unix: started,
        finished_unix: 0,
    };
    let input = |role: &str| manifest.input(role);
    let spec = input("spec").ok_or_else(|| CliError::Usage("train needs --spec".into()))?;
    let task = load_task(spec, &cfg.prompt.reverse)?;
    let train_set = load_data(input("data").ok_or_else(|| CliError::Usage("train needs --data".into()))?)?;
    let dev_set = match input("dev") {
        Some(p) => load_data(p)?,
        None => Dataset {
            split: "dev".to_string(),
            classes: train_set.classes.clone(),
            instances: Vec::new(),
        },
    };
    let test_set = input("test").map(load_data).transpose()?;

    let model = match input("model") {
        Some(p) => load_model(p, &task.schema)?,
        None => {
            let mut refs = vec![&train_set, &dev_set];
            refs.extend(test_set.as_ref());
            initial_model(&task, &cfg, &refs, seed)?
        }
    };
    let outcome = train(&model, &task.schema, &train_set, &dev_set, &cfg.train)?;
    if outcome.dev_empty {
        eprintln!("warning: no dev set; keeping the last epoch's model");
    }

    let out = &args.out;
    fs::create_dir_all(out).map_err(|e| CliError::Data(format!("cannot create {}: {e}", out.display())))?;
    checkpoint::save(&outcome.model, &out.join("checkpoint.json")).map_err(data)?;
    write_file(&out.join("history.csv"), &outcome.history.to_csv())?;
    write_file(&out.join("schema.json"), &task.schema.to_json())?;
    if let Some(test) = &test_set {
        let preds = predict_all(&outcome.model, &task.schema, test, cfg.train.objective)?;
        let evaluation = evaluate(&preds, &test.labels(), cfg.train.negative_class.as_deref()).map_err(data)?;
        write_file(&out.join("predictions.txt"), &lines(&preds))?;
        write_file(&out.join("report.json"), &to_json(&evaluation))?;
        println!("test micro-F1 {}", crate::eval::percent(evaluation.excluded.micro_f1));
    }
    if let (Some(epoch), Some(f1)) = (outcome.best_epoch, outcome.best_dev_f1) {
        println!("best epoch {epoch}, dev micro-F1 {}", crate::eval::percent(f1));
    }
    let manifest = RunManifest {
        finished_unix: unix_now(),
        ..manifest
    };
    manifest.save(&out.join("manifest.json"))
}
