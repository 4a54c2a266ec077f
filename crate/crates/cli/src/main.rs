use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;
use sha2::{Digest, Sha256};
use wembed::eval::{eval_recommendation, eval_word_similarity, RecEvalSplit, Scorer, SimilarityBenchmark};
use wembed::{
    parse_edge_list, reweight, train, write_edge_list, EdgeList, Embeddings32, Graph, GraphSampler, LineOrder,
    ModelKind, ParseOptions, TrainConfig, WeightScheme,
};

#[derive(Parser)]
#[command(name = "wembed", version, about = "Weighted network embedding toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train vertex embeddings from a weighted edge list.
    Train(TrainArgs),
    /// Re-run the training recorded in a manifest.
    Replay(ReplayArgs),
    /// Rewrite edge weights with a weighting scheme.
    Reweight(ReweightArgs),
    /// Print sampler table sizes for an edge list.
    Stats(StatsArgs),
    /// Spearman correlation of cosine similarities against human scores.
    EvalSim(EvalSimArgs),
    /// Item-item recommendation metrics on a train/test split.
    EvalRec(EvalRecArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Edge list: `<source> <target> <weight>` per line.
    #[arg(long)]
    train: PathBuf,
    /// Add the reverse of every edge.
    #[arg(long)]
    undirected: bool,
    /// Source column is partition 0, target column partition 1.
    #[arg(long)]
    typed: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output embedding file; the manifest goes to `<save>.manifest`.
    #[arg(long)]
    save: PathBuf,
    #[arg(long, default_value = "deepwalk")]
    model: ModelKind,
    #[arg(long, default_value_t = 64)]
    dimensions: usize,
    #[arg(long, default_value_t = 10)]
    walk_times: usize,
    #[arg(long, default_value_t = 40)]
    walk_length: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    /// Start-vertex draws for line/hpe, in millions.
    #[arg(long, default_value_t = 10.0)]
    sample_times: f64,
    #[arg(long, default_value_t = 0.025)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "both")]
    line_order: LineOrder,
    /// Walklets step offsets to train, e.g. `2,3`. Defaults to 1..=window.
    #[arg(long, value_delimiter = ',')]
    offsets: Option<Vec<usize>>,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    save: PathBuf,
}

#[derive(Args)]
struct ReweightArgs {
    #[arg(long)]
    scheme: WeightScheme,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
    #[arg(long)]
    typed: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct EvalSimArgs {
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    benchmark: PathBuf,
}

#[derive(Args)]
struct EvalRecArgs {
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value_t = 5)]
    queries: usize,
    #[arg(long, value_delimiter = ',', default_value = "10,20,30")]
    k: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "dot")]
    scorer: Scorer,
    /// Print `metric,k,value` lines instead of the table.
    #[arg(long)]
    csv: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", first.trim());
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Train(args) => cmd_train(args),
        Command::Replay(args) => cmd_replay(args),
        Command::Reweight(args) => cmd_reweight(args),
        Command::Stats(args) => cmd_stats(args),
        Command::EvalSim(args) => cmd_eval_sim(args),
        Command::EvalRec(args) => cmd_eval_rec(args),
    }
}

fn read_edges(path: &Path, options: ParseOptions) -> anyhow::Result<EdgeList> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_edge_list(BufReader::new(file), options).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(input: &InputArgs) -> anyhow::Result<Graph> {
    let options = ParseOptions {
        undirected: input.undirected,
        typed: input.typed,
    };
    Ok(Graph::from_edge_list(&read_edges(&input.train, options)?)?)
}

fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn manifest_path(save: &Path) -> PathBuf {
    let mut name = save.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

fn train_config(args: &TrainArgs) -> anyhow::Result<TrainConfig> {
    if !(args.sample_times.is_finite() && args.sample_times > 0.0) {
        bail!("--sample-times must be a positive number of millions");
    }
    let cfg = TrainConfig {
        model: args.model,
        dimensions: args.dimensions,
        walk_times: args.walk_times,
        walk_length: args.walk_length,
        window: args.window,
        negatives: args.negatives,
        sample_times: (args.sample_times * 1e6).round().max(1.0) as u64,
        alpha: args.alpha,
        workers: args.threads,
        seed: args.seed,
        line_order: args.line_order,
        walklets_offsets: args.offsets.clone(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_train(args: TrainArgs) -> anyhow::Result<()> {
    let cfg = train_config(&args)?;
    let digest = sha256_file(&args.input.train)?;
    let graph = load_graph(&args.input)?;
    info!("{} vertices, {} edges", graph.vertex_count(), graph.edge_count());
    let report = GraphSampler::new(&graph)?.size_report();

    let started = Instant::now();
    let embeddings: Embeddings32 = train(&graph, &cfg)?;
    let duration = started.elapsed();

    let out = File::create(&args.save).with_context(|| format!("cannot create {}", args.save.display()))?;
    embeddings.write(BufWriter::new(out))?;

    let mut manifest = BTreeMap::new();
    manifest.insert("model", cfg.model.to_string());
    manifest.insert("dimensions", cfg.dimensions.to_string());
    manifest.insert("walk_times", cfg.walk_times.to_string());
    manifest.insert("walk_length", cfg.walk_length.to_string());
    manifest.insert("window", cfg.window.to_string());
    manifest.insert("negatives", cfg.negatives.to_string());
    manifest.insert("sample_times", cfg.sample_times.to_string());
    manifest.insert("alpha", cfg.alpha.to_string());
    manifest.insert("threads", cfg.workers.to_string());
    manifest.insert("seed", cfg.seed.to_string());
    manifest.insert("line_order", cfg.line_order.to_string());
    let offsets = cfg.offsets().iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    manifest.insert("offsets", offsets);
    manifest.insert("undirected", args.input.undirected.to_string());
    manifest.insert("typed", args.input.typed.to_string());
    manifest.insert("input", args.input.train.display().to_string());
    manifest.insert("input_sha256", digest);
    manifest.insert("vertices", graph.vertex_count().to_string());
    manifest.insert("edges", graph.edge_count().to_string());
    manifest.insert("source_cells", report.source_cells.to_string());
    manifest.insert("context_cells", report.context_cells.to_string());
    manifest.insert("context_refs", report.context_refs.to_string());
    manifest.insert("negative_cells", report.negative_cells.to_string());
    manifest.insert("duration_secs", format!("{:.3}", duration.as_secs_f64()));
    manifest.insert("version", env!("CARGO_PKG_VERSION").to_string());

    let mut text = String::new();
    for (k, v) in &manifest {
        text.push_str(&format!("{k}={v}\n"));
    }
    let path = manifest_path(&args.save);
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    info!("trained in {:.2}s", duration.as_secs_f64());
    Ok(())
}

fn read_manifest(path: &Path) -> anyhow::Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .with_context(|| format!("{} line {}: expected key=value", path.display(), i + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn cmd_replay(args: ReplayArgs) -> anyhow::Result<()> {
    let m = read_manifest(&args.manifest)?;
    let get = |key: &str| -> anyhow::Result<&str> {
        m.get(key)
            .map(String::as_str)
            .with_context(|| format!("manifest has no `{key}`"))
    };
    fn parsed<T: std::str::FromStr>(key: &str, value: &str) -> anyhow::Result<T> {
        value.parse().map_err(|_| anyhow::anyhow!("manifest `{key}` has bad value `{value}`"))
    }

    let train_path = PathBuf::from(get("input")?);
    let digest = sha256_file(&train_path)?;
    if digest != get("input_sha256")? {
        bail!("{} changed since the manifest was written", train_path.display());
    }
    let sample_times: u64 = parsed("sample_times", get("sample_times")?)?;
    let offsets = get("offsets")?
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| parsed("offsets", s))
        .collect::<anyhow::Result<Vec<usize>>>()?;
    let args = TrainArgs {
        input: InputArgs {
            train: train_path,
            undirected: parsed("undirected", get("undirected")?)?,
            typed: parsed("typed", get("typed")?)?,
        },
        save: args.save,
        model: parsed("model", get("model")?)?,
        dimensions: parsed("dimensions", get("dimensions")?)?,
        walk_times: parsed("walk_times", get("walk_times")?)?,
        walk_length: parsed("walk_length", get("walk_length")?)?,
        window: parsed("window", get("window")?)?,
        negatives: parsed("negatives", get("negatives")?)?,
        sample_times: sample_times as f64 / 1e6,
        alpha: parsed("alpha", get("alpha")?)?,
        threads: parsed("threads", get("threads")?)?,
        seed: parsed("seed", get("seed")?)?,
        line_order: parsed("line_order", get("line_order")?)?,
        offsets: Some(offsets),
    };
    cmd_train(args)
}

fn cmd_reweight(args: ReweightArgs) -> anyhow::Result<()> {
    let list = read_edges(
        &args.input,
        ParseOptions {
            undirected: false,
            typed: args.typed,
        },
    )?;
    if args.scheme == WeightScheme::RatingIrf && !args.typed {
        bail!("--scheme rating-irf needs --typed (user column first, item column second)");
    }
    let edges = reweight(&list.edges, args.scheme, list.types.as_ref())?;
    let out = File::create(&args.output).with_context(|| format!("cannot create {}", args.output.display()))?;
    write_edge_list(&edges, BufWriter::new(out))?;
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> anyhow::Result<()> {
    let graph = load_graph(&args.input)?;
    let report = GraphSampler::new(&graph)?.size_report();
    let mut out = io::stdout().lock();
    writeln!(out, "vertices: {}", graph.vertex_count())?;
    writeln!(out, "edges: {}", graph.edge_count())?;
    writeln!(out, "{report}")?;
    Ok(())
}

fn read_embeddings(path: &Path) -> anyhow::Result<Embeddings32> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Embeddings32::read(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn cmd_eval_sim(args: EvalSimArgs) -> anyhow::Result<()> {
    let embeddings = read_embeddings(&args.embeddings)?;
    let file = File::open(&args.benchmark).with_context(|| format!("cannot open {}", args.benchmark.display()))?;
    let bench = SimilarityBenchmark::read(BufReader::new(file))?;
    let report = eval_word_similarity(&embeddings, &bench)?;
    println!("rho: {:.4}", report.rho);
    println!("covered: {}", report.covered);
    println!("skipped: {}", report.skipped);
    Ok(())
}

fn cmd_eval_rec(args: EvalRecArgs) -> anyhow::Result<()> {
    let embeddings = read_embeddings(&args.embeddings)?;
    let train = read_edges(&args.train, ParseOptions::default())?;
    let test = read_edges(&args.test, ParseOptions::default())?;
    let mut split = RecEvalSplit::new(&train.edges, &test.edges)?;
    split.queries = args.queries;
    split.cutoffs = args.k;
    split.runs = args.runs;
    split.seed = args.seed;
    split.scorer = args.scorer;
    let report = eval_recommendation(&embeddings, &split)?;
    if args.csv {
        print!("{}", report.to_csv());
    } else {
        print!("{report}");
    }
    Ok(())
}
