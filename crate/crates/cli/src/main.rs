//! `cantus`: validate, clean, filter, count, serve and link chant corpora.
//!
//! Exit codes: 0 success, 1 domain errors (validation, linkage), 2 unreadable
//! or malformed input.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use chrono::Utc;
use clap::{Args, Parser, Subcommand, ValueEnum};

use cantus_core::century::SpanRule;
use cantus_core::cleanse::{self, PipelineConfig, SchemeConcordance};
use cantus_core::ingest::{self, IngestIssue, Severity};
use cantus_core::linkage::{self, ExportOptions, MatchOutcome, MatchedOn, Matcher, Normalizer, SiglumConcordance};
use cantus_core::stats::{corpus_stats, per_db_stats};
use cantus_core::{apply_filter, export_filter, parse_filter, table, Chant, Corpus, CorpusOptions, HistoryEntry, Source};

#[derive(Parser)]
#[command(name = "cantus", version, about = "Chant catalogue corpus tooling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a chants/sources pair and report problems.
    Validate(Inputs),
    /// Run the cleaning pipeline.
    Clean(CleanArgs),
    /// Print corpus statistics.
    Stats(StatsArgs),
    /// Apply a filter config file.
    Filter(FilterArgs),
    /// Serve the HTTP API over one corpus.
    Serve(ServeArgs),
    /// Assign Cantus IDs to an outside dataset and export it in corpus form.
    Link(LinkArgs),
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    chants: PathBuf,
    #[arg(long)]
    sources: PathBuf,
    /// Reject dangling srclinks and unknown db codes instead of warning.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct CleanArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    out: PathBuf,
    /// CSV of db,chantlink,field,new_value rows.
    #[arg(long)]
    overrides: Option<PathBuf>,
    /// CSV of chantlink,genre rows from the genre-of-origin list.
    #[arg(long)]
    genre_map: Option<PathBuf>,
    /// CSV of url,scheme rows fixing the canonical scheme per URL.
    #[arg(long)]
    schemes: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Span::First)]
    span_rule: Span,
}

#[derive(Clone, Copy, ValueEnum)]
enum Span {
    First,
    Latest,
    Midpoint,
}

impl From<Span> for SpanRule {
    fn from(s: Span) -> Self {
        match s {
            Span::First => SpanRule::First,
            Span::Latest => SpanRule::Latest,
            Span::Midpoint => SpanRule::Midpoint,
        }
    }
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write stats.csv and per_db.csv here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct FilterArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
    #[arg(long, default_value_t = 8000)]
    port: u16,
    /// Send permissive CORS headers so a browser UI on another origin can call in.
    #[arg(long)]
    allow_cross_origin: bool,
}

#[derive(Args)]
struct LinkArgs {
    /// CSV of record_id,text_content,genre,external_siglum[,feast,melody,folio].
    #[arg(long)]
    records: PathBuf,
    /// CSV of cantus_id,text,genre[,feast].
    #[arg(long)]
    candidates: PathBuf,
    /// CSV of external_siglum,siglum.
    #[arg(long)]
    concordance: PathBuf,
    /// Sources CSV describing the target sigla.
    #[arg(long)]
    source_metadata: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = linkage::DEFAULT_THRESHOLD)]
    threshold: u32,
    /// CSV of from,to substitutions applied before comparison.
    #[arg(long, conflicts_with = "latin_folds")]
    substitutions: Option<PathBuf>,
    /// Fold h, j/i and u/v before comparison.
    #[arg(long)]
    latin_folds: bool,
    #[arg(long, value_enum, default_value_t = Text::Incipit)]
    matched_on: Text,
    #[arg(long, default_value = "CM")]
    db_code: String,
    #[arg(long, default_value = "https://corpus-monodicum.de/records/")]
    chantlink_base: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Text {
    Incipit,
    FullText,
}

/// An error with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn input(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: error.into() }
}

fn domain(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: error.into() }
}

type Run = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(a) => validate(a),
        Command::Clean(a) => clean(a),
        Command::Stats(a) => stats(a),
        Command::Filter(a) => filter(a),
        Command::Serve(a) => serve(a),
        Command::Link(a) => link(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

// ---- shared plumbing ----

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(input)
}

fn write(dir: &Path, name: &str, data: impl AsRef<[u8]>) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, data)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(input)
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create {}", dir.display()))
        .map_err(input)
}

struct Loaded {
    chants: Vec<Chant>,
    sources: Vec<Source>,
    issues: Vec<(&'static str, IngestIssue)>,
}

impl Loaded {
    fn errors(&self) -> usize {
        self.issues.iter().filter(|(_, i)| i.severity == Severity::Error).count()
    }

    fn report_issues(&self) {
        for (file, issue) in &self.issues {
            eprintln!("{file} {issue}");
        }
    }

    fn options(strict: bool) -> CorpusOptions {
        if strict {
            CorpusOptions::default()
        } else {
            CorpusOptions::lenient()
        }
    }

    fn into_corpus(self, strict: bool) -> Result<Corpus, Failure> {
        let corpus =
            Corpus::with_options(self.chants, self.sources, false, Self::options(strict)).map_err(domain)?;
        for w in corpus.warnings() {
            eprintln!("warning: {w}");
        }
        Ok(corpus)
    }
}

fn load(inputs: &Inputs) -> Result<Loaded, Failure> {
    let (chants, chant_issues) = ingest::parse_chants_csv(&read(&inputs.chants)?)
        .with_context(|| format!("in {}", inputs.chants.display()))
        .map_err(input)?;
    let (sources, source_issues) = ingest::parse_sources_csv(&read(&inputs.sources)?)
        .with_context(|| format!("in {}", inputs.sources.display()))
        .map_err(input)?;
    let issues = chant_issues
        .into_iter()
        .map(|i| ("chants", i))
        .chain(source_issues.into_iter().map(|i| ("sources", i)))
        .collect();
    Ok(Loaded { chants, sources, issues })
}

fn shell_quote(arg: &str) -> String {
    let plain = |c: char| c.is_ascii_alphanumeric() || "-_./:=,@+%".contains(c);
    if !arg.is_empty() && arg.chars().all(plain) {
        arg.to_string()
    } else {
        format!("'{}'", arg.replace('\'', r"'\''"))
    }
}

/// History text: how to rerun this command, then the ledger entries.
fn history_text(entries: &str) -> String {
    let mut out = String::new();
    let cwd = std::env::current_dir().map(|p| p.display().to_string()).unwrap_or_default();
    let args: Vec<String> = std::env::args().collect();
    let mut command = vec!["cantus".to_string()];
    command.extend(args.iter().skip(1).map(|a| shell_quote(a)));
    let _ = writeln!(out, "# cantus {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# cwd: {cwd}");
    let _ = writeln!(out, "# command: {}", command.join(" "));
    out.push_str(entries);
    out
}

fn entry(op: &str, params: String, chants: (usize, usize), sources: (usize, usize)) -> String {
    let e = HistoryEntry {
        op_name: op.into(),
        params_digest: params,
        chants_before: chants.0,
        chants_after: chants.1,
        sources_before: sources.0,
        sources_after: sources.1,
        timestamp: Utc::now(),
    };
    format!("{e}\n")
}

// ---- subcommands ----

fn validate(args: Inputs) -> Run {
    let loaded = load(&args)?;
    loaded.report_issues();
    let errors = loaded.errors();
    let warnings = loaded.issues.len() - errors;
    let (n_chants, n_sources) = (loaded.chants.len(), loaded.sources.len());
    let corpus = loaded.into_corpus(args.strict)?;
    println!(
        "{n_chants} chants, {n_sources} sources; {errors} errors, {} warnings",
        warnings + corpus.warnings().len()
    );
    if errors > 0 {
        return Err(domain(anyhow!("{errors} rows failed validation")));
    }
    Ok(())
}

fn clean(args: CleanArgs) -> Run {
    let loaded = load(&args.inputs)?;
    loaded.report_issues();
    let mut config = PipelineConfig {
        span_rule: args.span_rule.into(),
        ..Default::default()
    };
    let mut params = vec![format!("span_rule={:?}", config.span_rule).to_lowercase()];
    if let Some(p) = &args.genre_map {
        config.genre_of_origin = cleanse::genre_map_from_csv(&read(p)?)
            .with_context(|| format!("in {}", p.display()))
            .map_err(input)?;
        params.push(format!("genre_map={}", p.display()));
    }
    if let Some(p) = &args.schemes {
        config.schemes = SchemeConcordance::from_csv(&read(p)?)
            .with_context(|| format!("in {}", p.display()))
            .map_err(input)?;
        params.push(format!("schemes={}", p.display()));
    }
    if let Some(p) = &args.overrides {
        config.overrides = cleanse::overrides_from_csv(&read(p)?)
            .with_context(|| format!("in {}", p.display()))
            .map_err(input)?;
        params.push(format!("overrides={}", p.display()));
    }

    let out = cleanse::run_pipeline(&loaded.chants, &loaded.sources, &config);
    let mut summary = String::new();
    for r in &out.reports {
        let _ = writeln!(summary, "{}", r.summary());
    }
    print!("{summary}");

    create_dir(&args.out)?;
    write(&args.out, "chants.csv", table::write_chants(&out.chants))?;
    write(&args.out, "sources.csv", table::write_sources(&out.sources))?;
    write(&args.out, "cleaning_report.txt", &summary)?;
    write(&args.out, "cleaning_actions.csv", cleanse::actions_csv(&out.reports))?;
    write(&args.out, "review.csv", cleanse::review_csv(&out.reports))?;
    let ledger = entry(
        "clean",
        params.join(" "),
        (loaded.chants.len(), out.chants.len()),
        (loaded.sources.len(), out.sources.len()),
    );
    write(&args.out, "history.txt", history_text(&ledger))
}

fn stats(args: StatsArgs) -> Run {
    let loaded = load(&args.inputs)?;
    loaded.report_issues();
    let corpus = loaded.into_corpus(args.inputs.strict)?;
    let report = corpus_stats(&corpus);
    let per_db = per_db_stats(&corpus);
    match args.format {
        Format::Text => print!("{}\n{}", report.to_text(), per_db.to_text()),
        Format::Csv => {
            print!("{}", String::from_utf8_lossy(&report.to_csv()));
            print!("{}", String::from_utf8_lossy(&per_db.to_csv()));
        }
    }
    if let Some(out) = &args.out {
        create_dir(out)?;
        write(out, "stats.csv", report.to_csv())?;
        write(out, "per_db.csv", per_db.to_csv())?;
        write(out, "history.txt", history_text(&corpus.export_history()))?;
    }
    Ok(())
}

fn filter(args: FilterArgs) -> Run {
    let text = String::from_utf8(read(&args.config)?)
        .with_context(|| format!("{} is not UTF-8", args.config.display()))
        .map_err(input)?;
    let config = parse_filter(&text)
        .with_context(|| format!("in {}", args.config.display()))
        .map_err(input)?;
    let loaded = load(&args.inputs)?;
    loaded.report_issues();
    let corpus = loaded.into_corpus(args.inputs.strict)?;
    let out = apply_filter(&corpus, &config).map_err(domain)?;
    println!(
        "{} of {} chants, {} of {} sources",
        out.chants().len(),
        corpus.chants().len(),
        out.sources().len(),
        corpus.sources().len()
    );
    let (chants_csv, sources_csv) = out.export_csv();
    create_dir(&args.out)?;
    write(&args.out, "chants.csv", chants_csv)?;
    write(&args.out, "sources.csv", sources_csv)?;
    write(&args.out, "filter.yaml", export_filter(&config))?;
    write(&args.out, "history.txt", history_text(&out.export_history()))
}

fn serve(args: ServeArgs) -> Run {
    let loaded = load(&args.inputs)?;
    loaded.report_issues();
    let corpus = loaded.into_corpus(args.inputs.strict)?.lock();
    let addr = SocketAddr::new(args.host, args.port);
    println!(
        "serving {} chants, {} sources on http://{addr}",
        corpus.chants().len(),
        corpus.sources().len()
    );
    let app = cantus_service::router(Some(Arc::new(corpus)), args.allow_cross_origin);
    let runtime = tokio::runtime::Runtime::new().map_err(input)?;
    runtime
        .block_on(cantus_service::serve(app, addr))
        .with_context(|| format!("cannot serve on {addr}"))
        .map_err(input)
}

fn link(args: LinkArgs) -> Run {
    let table_input = |p: &Path, e: cantus_core::table::TableError| input(anyhow!(e).context(format!("in {}", p.display())));
    let records = linkage::records_from_csv(&read(&args.records)?).map_err(|e| table_input(&args.records, e))?;
    let candidates =
        linkage::candidates_from_csv(&read(&args.candidates)?).map_err(|e| table_input(&args.candidates, e))?;
    let concordance =
        SiglumConcordance::from_csv(&read(&args.concordance)?).map_err(|e| table_input(&args.concordance, e))?;
    let (source_metadata, issues) = ingest::parse_sources_csv(&read(&args.source_metadata)?)
        .with_context(|| format!("in {}", args.source_metadata.display()))
        .map_err(input)?;
    for issue in &issues {
        eprintln!("source metadata {issue}");
    }
    let normalizer = match &args.substitutions {
        Some(p) => Normalizer::from_csv(&read(p)?).map_err(|e| table_input(p, e))?,
        None if args.latin_folds => Normalizer::latin_folds(),
        None => Normalizer::default(),
    };

    let matcher = Matcher {
        threshold: args.threshold,
        normalizer,
    };
    let decisions = matcher.match_batch(&records, &candidates).map_err(domain)?;
    let options = ExportOptions {
        chantlink_base: args.chantlink_base.clone(),
        db_code: args.db_code.clone(),
        matched_on: match args.matched_on {
            Text::Incipit => MatchedOn::Incipit,
            Text::FullText => MatchedOn::FullText,
        },
        ..Default::default()
    };
    let export = linkage::export_to_schema(&records, &decisions, &concordance, &source_metadata, &options)
        .map_err(domain)?;

    // the export must load as a strict corpus carrying the new db code
    let (chants, _) = ingest::parse_chants_csv(&export.chants_csv).map_err(domain)?;
    let (sources, _) = ingest::parse_sources_csv(&export.sources_csv).map_err(domain)?;
    Corpus::with_options(chants, sources, false, CorpusOptions::default().with_db_code(&args.db_code))
        .map_err(domain)?;

    let mut tally: HashMap<&str, usize> = HashMap::new();
    for d in &decisions {
        *tally.entry(d.outcome.label()).or_default() += 1;
    }
    let count = |o: &MatchOutcome| tally.get(o.label()).copied().unwrap_or(0);
    println!(
        "{} records: {} matched, {} ambiguous, {} no match; {} sources",
        records.len(),
        count(&MatchOutcome::Matched { cantus_id: String::new(), score: 0 }),
        count(&MatchOutcome::Ambiguous(Vec::new())),
        count(&MatchOutcome::NoMatch { best_score: 0 }),
        export.sources
    );

    create_dir(&args.out)?;
    write(&args.out, "chants.csv", &export.chants_csv)?;
    write(&args.out, "sources.csv", &export.sources_csv)?;
    write(&args.out, "audit.csv", &export.audit_csv)?;
    let ledger = entry(
        "link",
        format!("threshold={} db={} matched_on={}", args.threshold, args.db_code, options.matched_on),
        (records.len(), export.matched),
        (0, export.sources),
    );
    write(&args.out, "history.txt", history_text(&ledger))
}
