//! `corpkit`: build, deduplicate and compare Serbo-Croatian text corpora.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use corpkit::corpus::{load_corpus, write_jsonl_doc, CorpusFormat, LoadOptions, OnMalformed};
use corpkit::dedup::{share_report, DedupConfig, Deduplicator};
use corpkit::dissertation::{
    process_dissertations, read_metadata, write_jsonl, write_report_csv, RunOptions, SectionPatterns,
};
use corpkit::freq::{ExcerptSpec, ExcerptStrategy};
use corpkit::pipeline::eval::{profile_corpus, EvalInput, EvalParams};
use corpkit::pipeline::{aggregate, digest, run_eval, split_named, OutputSet, PipelineConfig, StagedOutput};
use corpkit::variant::{classify_stream, is_serbian, ClassifierConfig, MarkerLexicon};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "corpkit", version, about = "Corpus construction and evaluation toolkit")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "info")]
    log_level: log::LevelFilter,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fuzzy n-gram deduplication of one or more corpora, in the given order.
    Dedup(DedupArgs),
    /// Split a mixed corpus into Serbian and Croatian halves.
    Classify(ClassifyArgs),
    /// Top-K frequency profile of a corpus excerpt.
    Freq(FreqArgs),
    /// Similarity matrix, ranking and graph from frequency profiles.
    Sim(SimArgs),
    /// Parallel abstract extraction from dissertation texts.
    Extract(ExtractArgs),
    /// Build the umbrella corpus from a TOML configuration.
    Aggregate(AggregateArgs),
    /// Profile raw corpora and compare them in one run.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Input format: jsonl or textdir.
    #[arg(long, default_value = "jsonl")]
    format: CorpusFormat,
    /// Skip malformed records instead of failing.
    #[arg(long)]
    skip_malformed: bool,
}

impl InputArgs {
    fn load_options(&self) -> LoadOptions {
        LoadOptions {
            on_malformed: if self.skip_malformed {
                OnMalformed::Skip
            } else {
                OnMalformed::Fail
            },
            allow_empty: true,
            ..LoadOptions::new(self.format)
        }
    }
}

#[derive(Args, Debug)]
struct DedupArgs {
    /// Words per shingle.
    #[arg(long, default_value_t = 6)]
    ngram: usize,
    /// Drop documents whose duplicated share is strictly above this.
    #[arg(long, default_value_t = 0.75)]
    threshold: f64,
    /// Inputs, processed in the order given; each is one report row.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[command(flatten)]
    io: InputArgs,
    /// Kept documents, jsonl.
    #[arg(long)]
    output: PathBuf,
    /// Per-source word counts before and after, CSV.
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Mixed corpus to split.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    io: InputArgs,
    /// Marker TSV (hr_form, sr_form); built-in pairs otherwise.
    #[arg(long)]
    markers: Option<PathBuf>,
    /// je/e ratio above which a document gets one Croatian vote.
    #[arg(long, default_value_t = 0.16)]
    je_threshold: f64,
    /// Serbian documents, jsonl.
    #[arg(long)]
    out_sr: PathBuf,
    /// Croatian and undecided documents, jsonl.
    #[arg(long)]
    out_hr: PathBuf,
    /// Per-document verdicts: id,label,sr_votes,hr_votes,je_ratio.
    #[arg(long)]
    verdicts: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExcerptArgs {
    /// Words per excerpt.
    #[arg(long, default_value_t = 1_000_000)]
    excerpt_words: usize,
    /// head, shuffled or shuffled:<seed>.
    #[arg(long, default_value = "head")]
    strategy: ExcerptStrategy,
    /// Use the whole corpus when it is shorter than the excerpt.
    #[arg(long)]
    allow_short: bool,
}

impl ExcerptArgs {
    fn spec(&self) -> ExcerptSpec {
        ExcerptSpec {
            size_words: self.excerpt_words,
            strategy: self.strategy,
            allow_short: self.allow_short,
        }
    }
}

#[derive(Args, Debug)]
struct FreqArgs {
    /// Corpus file or text directory.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    io: InputArgs,
    /// Corpus name; defaults to the input file stem.
    #[arg(long)]
    name: Option<String>,
    #[command(flatten)]
    excerpt: ExcerptArgs,
    /// Profile size K.
    #[arg(long, default_value_t = 1000)]
    top: usize,
    /// Profile TSV: rank, word, count, per_million.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SimOutputs {
    /// Exponent applied to the cosine.
    #[arg(long, default_value_t = 10)]
    pow: i32,
    /// Similarity matrix, CSV.
    #[arg(long)]
    matrix_out: Option<PathBuf>,
    /// Distance graph, DOT.
    #[arg(long)]
    graph_out: Option<PathBuf>,
    /// Corpora by average similarity to the others, most distinct first, CSV.
    #[arg(long)]
    ranking_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimArgs {
    /// Profile TSVs, as `path` or `name=path`.
    #[arg(long, required = true, num_args = 1..)]
    profiles: Vec<String>,
    /// Profile size K; longer profiles are truncated.
    #[arg(long, default_value_t = 1000)]
    k: usize,
    #[command(flatten)]
    out: SimOutputs,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Corpora, as `path` or `name=path`.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<String>,
    #[command(flatten)]
    io: InputArgs,
    #[command(flatten)]
    excerpt: ExcerptArgs,
    /// Profile size K.
    #[arg(long, default_value_t = 1000)]
    top: usize,
    #[command(flatten)]
    out: SimOutputs,
    /// Also write each profile as `<dir>/<name>.tsv`.
    #[arg(long)]
    profiles_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Dissertation records, jsonl.
    #[arg(long)]
    metadata: PathBuf,
    /// Directory of `<id>.txt` full texts and optional `<id>.p10.txt` probes.
    #[arg(long)]
    texts: PathBuf,
    /// Pattern directory; missing files fall back to the built-in set.
    #[arg(long)]
    patterns: Option<PathBuf>,
    /// Parallel abstract pairs, jsonl.
    #[arg(long)]
    pairs_out: PathBuf,
    /// Input records with extracted fields filled in, jsonl.
    #[arg(long)]
    metadata_out: PathBuf,
    /// Candidates not fully paired, with the reason, CSV.
    #[arg(long)]
    report: PathBuf,
    /// Non-whitespace characters below which a text needs OCR.
    #[arg(long, default_value_t = corpkit::dissertation::record::DEFAULT_MIN_OCR_CHARS)]
    min_ocr_chars: usize,
}

#[derive(Args, Debug)]
struct AggregateArgs {
    /// Pipeline configuration, TOML.
    #[arg(long)]
    config: PathBuf,
    /// Override [dedup] ngram.
    #[arg(long)]
    ngram: Option<usize>,
    /// Override [dedup] threshold.
    #[arg(long)]
    threshold: Option<f64>,
    /// Override [classifier] je_ratio_threshold.
    #[arg(long)]
    je_threshold: Option<f64>,
    /// Override [output] corpus.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override [output] report.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(cli.log_level)
        .format_timestamp_millis()
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    info!("corpkit {VERSION}");
    match cli.cmd {
        Command::Dedup(a) => cmd_dedup(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Freq(a) => cmd_freq(a),
        Command::Sim(a) => cmd_sim(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Aggregate(a) => cmd_aggregate(a),
        Command::Eval(a) => cmd_eval(a),
    }
}

/// Digest of the effective settings, so a run can be repeated exactly.
fn log_settings(settings: &impl std::fmt::Debug) {
    let text = format!("{settings:#?}");
    info!("config digest sha256:{}", digest(text.as_bytes()));
    log::debug!("settings: {text}");
}

fn cmd_dedup(a: DedupArgs) -> Result<()> {
    log_settings(&a);
    let config = DedupConfig {
        ngram: a.ngram,
        threshold: a.threshold,
        ..DedupConfig::default()
    };
    let mut dedup = Deduplicator::new(config)?;
    let opts = a.io.load_options();
    let readers = a
        .input
        .iter()
        .map(|p| load_corpus(p, &opts))
        .collect::<corpkit::Result<Vec<_>>>()?;
    info!(
        "source order: {}",
        a.input.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
    );

    let mut outputs = OutputSet::new();
    let i = outputs.stage(&a.output)?;
    let (mut seen, mut kept) = (0u64, 0u64);
    {
        let staged = outputs.get(i);
        let mut w = BufWriter::with_capacity(1 << 20, staged.file());
        for reader in readers {
            for doc in reader {
                let doc = doc?;
                seen += 1;
                if dedup.process(&doc).kept {
                    kept += 1;
                    write_jsonl_doc(&mut w, &doc).with_context(|| format!("writing {}", a.output.display()))?;
                }
            }
        }
        w.flush().with_context(|| format!("writing {}", a.output.display()))?;
    }
    let report = dedup.finish();
    outputs.write(&a.report, |w| report.write_csv(w))?;
    outputs.commit()?;
    info!("kept {kept} of {seen} documents");
    eprint!("{}", share_report(&report));
    Ok(())
}

fn cmd_classify(a: ClassifyArgs) -> Result<()> {
    log_settings(&a);
    let lexicon = match &a.markers {
        Some(p) => MarkerLexicon::load(p)?,
        None => MarkerLexicon::default(),
    };
    let config = ClassifierConfig {
        je_ratio_threshold: a.je_threshold,
        ..ClassifierConfig::default()
    };
    let docs = load_corpus(&a.input, &a.io.load_options())?;

    let mut sr_out = StagedOutput::new(&a.out_sr)?;
    let mut hr_out = StagedOutput::new(&a.out_hr)?;
    let mut verdict_out = a.verdicts.as_ref().map(StagedOutput::new).transpose()?;
    let (mut n_sr, mut n_hr) = (0u64, 0u64);
    {
        let mut sr = BufWriter::new(sr_out.file());
        let mut hr = BufWriter::new(hr_out.file());
        let mut verdicts = verdict_out.as_mut().map(|o| csv::Writer::from_writer(BufWriter::new(o.file())));
        if let Some(v) = verdicts.as_mut() {
            v.write_record(["id", "label", "sr_votes", "hr_votes", "je_ratio"])?;
        }
        classify_stream(docs, &lexicon, &config, |doc, verdict| {
            if let Some(v) = verdicts.as_mut() {
                v.write_record([
                    doc.id.as_str(),
                    verdict.label.as_str(),
                    &verdict.sr_votes.to_string(),
                    &verdict.hr_votes.to_string(),
                    &format!("{:?}", verdict.je_ratio),
                ])?;
            }
            if is_serbian(&verdict) {
                n_sr += 1;
                write_jsonl_doc(&mut sr, &doc).map_err(io_error(&a.out_sr))
            } else {
                n_hr += 1;
                write_jsonl_doc(&mut hr, &doc).map_err(io_error(&a.out_hr))
            }
        })?;
        sr.flush()?;
        hr.flush()?;
        if let Some(mut v) = verdicts {
            v.flush()?;
        }
    }
    sr_out.commit()?;
    hr_out.commit()?;
    if let Some(v) = verdict_out {
        v.commit()?;
    }
    info!("serbian: {n_sr} documents, croatian/other: {n_hr}");
    Ok(())
}

fn cmd_freq(a: FreqArgs) -> Result<()> {
    log_settings(&a);
    if a.top == 0 {
        bail!("--top must be >= 1");
    }
    let name = a.name.clone().unwrap_or_else(|| split_named(&a.input.to_string_lossy()).0);
    let profile = profile_corpus(&name, &a.input, a.io.format, &a.excerpt.spec(), a.top)?;
    let mut outputs = OutputSet::new();
    outputs.write(&a.out, |w| {
        profile.write_tsv(w).map_err(|e| corpkit::Error::Io {
            path: a.out.clone(),
            source: e,
        })
    })?;
    outputs.commit()?;
    info!("{name}: {} entries written to {}", profile.entries.len(), a.out.display());
    Ok(())
}

fn eval_params(out: &SimOutputs, excerpt: ExcerptSpec, top_k: usize, profiles_out: Option<PathBuf>) -> EvalParams {
    EvalParams {
        excerpt,
        top_k,
        power: out.pow,
        matrix_out: out.matrix_out.clone(),
        graph_out: out.graph_out.clone(),
        ranking_out: out.ranking_out.clone(),
        profiles_out,
    }
}

fn report_eval(summary: &corpkit::pipeline::EvalSummary) {
    info!(
        "source order: {}",
        summary.matrix.names.join(", ")
    );
    info!("{} features in the union", summary.features.len());
    eprint!("{}", summary.matrix.human_report());
}

fn cmd_sim(a: SimArgs) -> Result<()> {
    log_settings(&a);
    let inputs: Vec<EvalInput> = a
        .profiles
        .iter()
        .map(|s| {
            let (name, path) = split_named(s);
            EvalInput::Profile { name, path }
        })
        .collect();
    let params = eval_params(&a.out, ExcerptSpec::default(), a.k, None);
    let summary = run_eval(&inputs, &params)?;
    report_eval(&summary);
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    log_settings(&a);
    let inputs: Vec<EvalInput> = a
        .input
        .iter()
        .map(|s| {
            let (name, path) = split_named(s);
            EvalInput::Corpus {
                name,
                path,
                format: a.io.format,
            }
        })
        .collect();
    let params = eval_params(&a.out, a.excerpt.spec(), a.top, a.profiles_out.clone());
    let summary = run_eval(&inputs, &params)?;
    report_eval(&summary);
    Ok(())
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> corpkit::Error + '_ {
    move |e| corpkit::Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn cmd_extract(a: ExtractArgs) -> Result<()> {
    log_settings(&a);
    let patterns = match &a.patterns {
        Some(dir) => SectionPatterns::load_dir(dir)?,
        None => SectionPatterns::default(),
    };
    let records = read_metadata(&a.metadata)?;
    let opts = RunOptions {
        min_ocr_chars: a.min_ocr_chars,
        ..RunOptions::default()
    };
    let out = process_dissertations(records, &a.texts, &patterns, &opts)?;

    let mut outputs = OutputSet::new();
    outputs.write(&a.pairs_out, |w| write_jsonl(w, &out.pairs).map_err(io_error(&a.pairs_out)))?;
    outputs.write(&a.metadata_out, |w| {
        write_jsonl(w, &out.records).map_err(io_error(&a.metadata_out))
    })?;
    outputs.write(&a.report, |w| write_report_csv(w, &out.report))?;
    outputs.commit()?;
    info!(
        "{} records, {} candidates: {} paired, {} partial, {} failed",
        out.records.len(),
        out.candidates,
        out.paired,
        out.partial,
        out.failed
    );
    Ok(())
}

fn cmd_aggregate(a: AggregateArgs) -> Result<()> {
    let (mut cfg, text) = PipelineConfig::load(&a.config)?;
    info!("config {} sha256:{}", a.config.display(), digest(text.as_bytes()));
    if let Some(n) = a.ngram {
        cfg.dedup.ngram = n;
    }
    if let Some(t) = a.threshold {
        cfg.dedup.threshold = t;
    }
    if let Some(t) = a.je_threshold {
        cfg.classifier.je_ratio_threshold = t;
    }
    if let Some(p) = a.output.clone() {
        cfg.output.corpus = p;
    }
    if let Some(p) = a.report.clone() {
        cfg.output.report = p;
    }
    if a.ngram.is_some() || a.threshold.is_some() || a.je_threshold.is_some() || a.output.is_some() || a.report.is_some() {
        log_settings(&cfg);
    }
    info!(
        "source order: {}",
        cfg.sources
            .iter()
            .map(|s| if s.split {
                format!("{0}-sr, {0}-hr", s.name)
            } else {
                s.name.clone()
            })
            .collect::<Vec<_>>()
            .join(", ")
    );
    let summary = aggregate(&cfg)?;
    info!(
        "kept {} of {} documents; {} distinct shingles",
        summary.docs_kept, summary.docs_in, summary.shingles
    );
    eprint!("{}", share_report(&summary.report));
    Ok(())
}
