//! `pds`: positional description scheme tooling for text normalization data.

mod lines;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pds_tn::arith::{generate_records, render_record, ArithConfig, Operator};
use pds_tn::corpus::{
    emit_parallel, parse_kestrel_stream, split_corpus, write_parallel, SplitSpec,
};
use pds_tn::eval::{
    build_report, sentence_magnitude, vocabulary_census, Annotation, CensusMode, ClassSelection,
    EvalItem,
};
use pds_tn::scanner::{
    invert_pretokenization, pretokenize_text, scan, LocaleNumberFormat, OversizePolicy, ScanConfig,
    ScanError,
};
use pds_tn::verbalize::{
    generate_synthetic_cardinal_set, verbalize, SyntheticRecord, VerbalizationStyle,
};
use pds_tn::PdsConfig;

use crate::lines::{display_name, open_input, read_lines, transform_lines, Sink};

#[derive(Parser, Debug)]
#[command(
    name = "pds",
    version,
    about = "Positional description scheme tooling for numbers in text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rewrite every number in each line into PDS tokens
    Encode(StreamArgs),
    /// Restore the original text from PDS-encoded lines
    Decode(StreamArgs),
    /// Print the number spans of each line as JSON lines
    Scan(StreamArgs),
    /// Split a Kestrel-format corpus into aligned training and evaluation sets
    PrepCorpus(PrepCorpusArgs),
    /// Generate synthetic sentences with verbalized cardinals
    GenSynth(GenSynthArgs),
    /// Generate arithmetic expressions with their exact values
    GenArith(GenArithArgs),
    /// Score predictions against gold targets
    Eval(EvalArgs),
    /// Verbalize a single written form
    Verbalize(VerbalizeArgs),
    /// Count distinct numbers, digit/place pairs and token types
    Census(CensusArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Minimal,
    Grouped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

impl Toggle {
    fn enabled(self) -> bool {
        self == Toggle::On
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Oversize {
    /// leave long digit runs untouched
    Pass,
    /// fail on the first long digit run
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
    Eqn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Style {
    Cardinal,
    Digits,
    Decimal,
    Time,
}

#[derive(Args, Debug, Clone)]
struct ScanOpts {
    /// How digit runs are grouped into numbers
    #[arg(long, value_enum, default_value = "minimal")]
    mode: Mode,
    /// Thousands separator; required in grouped mode
    #[arg(long)]
    thousands_sep: Option<char>,
    /// Decimal separator; digits after it never start a thousands group
    #[arg(long)]
    decimal_sep: Option<char>,
    /// Longest digit run that is encoded
    #[arg(long, default_value_t = 20)]
    max_digits: usize,
    /// What to do with digit runs longer than --max-digits
    #[arg(long, value_enum, default_value = "pass")]
    oversize: Oversize,
}

impl ScanOpts {
    fn config(&self) -> Result<ScanConfig> {
        let grouped = self.mode == Mode::Grouped;
        if grouped && self.thousands_sep.is_none() {
            return Err(usage("--mode grouped needs --thousands-sep"));
        }
        let locale = LocaleNumberFormat {
            thousands_separator: self.thousands_sep,
            decimal_separator: self.decimal_sep,
            grouped_mode: grouped,
        };
        let pds = PdsConfig::with_max_digits(self.max_digits)
            .map_err(|e| usage(format!("--max-digits: {e}")))?;
        let policy = match self.oversize {
            Oversize::Pass => OversizePolicy::PassThrough,
            Oversize::Error => OversizePolicy::Error,
        };
        ScanConfig::new(locale, pds, policy).map_err(|e| usage(e.to_string()))
    }
}

#[derive(Args, Debug)]
struct StreamArgs {
    #[command(flatten)]
    scan: ScanOpts,
    /// Input file; standard input when absent or "-"
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Output file, written atomically; standard output when absent or "-"
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Worker threads; output order always matches input order
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
}

#[derive(Args, Debug)]
struct PrepCorpusArgs {
    #[command(flatten)]
    scan: ScanOpts,
    /// Kestrel-format input; standard input when absent or "-"
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Directory for the .src/.tgt sets and manifest.json
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Rewrite source sentences into PDS tokens
    #[arg(long, value_enum, default_value = "on")]
    pds: Toggle,
    #[arg(long, default_value_t = 10_000)]
    heldout_size: usize,
    #[arg(long, default_value_t = 1_000)]
    per_class_size: usize,
    /// Comma-separated training set sizes; smaller sets nest in larger ones
    #[arg(long, value_delimiter = ',', default_value = "100000,1000000,10000000")]
    train_sizes: Vec<usize>,
    /// Skip malformed lines instead of failing
    #[arg(long)]
    lenient: bool,
}

#[derive(Args, Debug)]
struct GenSynthArgs {
    #[command(flatten)]
    scan: ScanOpts,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1_000)]
    count: usize,
    /// Values lie in [10^LO, 10^HI) with a uniformly drawn digit count
    #[arg(long, value_name = "LO", default_value_t = 0)]
    magnitude_lo: u32,
    /// Exclusive upper power of ten, at most 21
    #[arg(long, value_name = "HI", default_value_t = 20)]
    magnitude_hi: u32,
    /// Rewrite source sentences into PDS tokens
    #[arg(long, value_enum, default_value = "on")]
    pds: Toggle,
    /// text: tab-separated source and target; jsonl: one record per line
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write STEM.src, STEM.tgt and the STEM.jsonl sidecar instead of standard output
    #[arg(long, value_name = "STEM")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArithArgs {
    #[command(flatten)]
    scan: ScanOpts,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = 2)]
    min_ops: usize,
    #[arg(long, default_value_t = 5)]
    max_ops: usize,
    /// Operands are drawn from [0, bound)
    #[arg(long, default_value_t = 10_000_000_000)]
    operand_bound: u64,
    /// Operator symbols to draw from, e.g. "+-"
    #[arg(long, default_value = "+-*")]
    operators: String,
    /// Rewrite both sides into PDS tokens; not available with --format eqn
    #[arg(long, value_enum)]
    pds: Option<Toggle>,
    /// text: tab-separated source and target; eqn: "EXPR = VALUE"; jsonl: one record per line
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write STEM.src and STEM.tgt (text), STEM.eqn or STEM.jsonl instead of standard output
    #[arg(long, value_name = "STEM")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Predicted targets, one sentence per line
    #[arg(long)]
    pred: PathBuf,
    /// Gold targets, aligned with --pred
    #[arg(long)]
    gold: PathBuf,
    /// JSON lines with optional class, class_match and magnitude per sentence
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Source sentences; numbers in them fill in missing magnitudes
    #[arg(long)]
    source: Option<PathBuf>,
    /// Comma-separated classes for the macro average
    #[arg(long, value_delimiter = ',')]
    include_classes: Option<Vec<String>>,
    /// text: a table; jsonl: the report as one JSON document
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also write the JSON report to this file
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerbalizeArgs {
    /// Written form; each standard input line is verbalized when absent
    value: Option<String>,
    #[arg(long, value_enum, default_value = "cardinal")]
    style: Style,
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[command(flatten)]
    scan: ScanOpts,
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// on: count PDS groups; off: count raw digit runs
    #[arg(long, value_enum, default_value = "on")]
    pds: Toggle,
    /// The input is already PDS-encoded
    #[arg(long)]
    pretokenized: bool,
}

/// A problem with how the tool was invoked rather than with the data.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

fn scan_error(e: ScanError) -> anyhow::Error {
    anyhow!("{e} ({})", e.name())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}\n\nFor more information, try '--help'.");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Encode(args) => {
            let config = args.scan.config()?;
            stream(&args, |line| {
                pretokenize_text(line, &config)
                    .map(Some)
                    .map_err(scan_error)
            })
        }
        Command::Decode(args) => {
            let config = args.scan.config()?;
            stream(&args, |line| {
                invert_pretokenization(line, &config)
                    .map(Some)
                    .map_err(scan_error)
            })
        }
        Command::Scan(args) => {
            let config = args.scan.config()?;
            stream(&args, |line| scan_line(line, &config))
        }
        Command::PrepCorpus(args) => prep_corpus(args),
        Command::GenSynth(args) => gen_synth(args),
        Command::GenArith(args) => gen_arith(args),
        Command::Eval(args) => eval(args),
        Command::Verbalize(args) => verbalize_cmd(args),
        Command::Census(args) => census(args),
    }
}

fn stream<F>(args: &StreamArgs, transform: F) -> Result<()>
where
    F: Fn(&str) -> Result<Option<String>> + Sync,
{
    transform_lines(
        args.input.as_deref(),
        args.output.as_deref(),
        args.jobs.into(),
        transform,
    )
}

fn scan_line(line: &str, config: &ScanConfig) -> Result<Option<String>> {
    let spans = scan(line, config).map_err(scan_error)?;
    if spans.is_empty() {
        return Ok(None);
    }
    let rows: Vec<String> = spans
        .iter()
        .map(serde_json::to_string)
        .collect::<Result<_, _>>()?;
    Ok(Some(rows.join("\n")))
}

fn prep_corpus(args: PrepCorpusArgs) -> Result<()> {
    let config = args.scan.config()?;
    let reader = open_input(args.input.as_deref())?;
    let parsed = parse_kestrel_stream(reader, args.lenient)
        .with_context(|| display_name(args.input.as_deref()))?;
    for (line, reason) in &parsed.skipped {
        eprintln!("skipped line {line}: {reason}");
    }
    let spec = SplitSpec {
        seed: args.seed,
        heldout_size: args.heldout_size,
        per_class_size: args.per_class_size,
        train_sizes: args.train_sizes,
    };
    let split = split_corpus(&parsed.sentences, &spec)?;
    let manifest = emit_parallel(
        &parsed.sentences,
        &split,
        args.pds.enabled(),
        &config,
        &args.out_dir,
    )?;
    eprintln!("{} sentences read", parsed.sentences.len());
    for set in &manifest.sets {
        eprintln!("{:<24} {} of {}", set.name, set.size, set.requested);
    }
    Ok(())
}

#[derive(Serialize)]
struct SynthSidecar<'a> {
    value: u128,
    magnitude: u32,
    template_id: usize,
    class: &'a str,
}

fn gen_synth(args: GenSynthArgs) -> Result<()> {
    let config = args.scan.config()?;
    if args.format == Format::Eqn {
        return Err(usage("gen-synth writes text or jsonl"));
    }
    let records = generate_synthetic_cardinal_set(
        args.count,
        args.magnitude_lo..args.magnitude_hi,
        args.seed,
    )
    .map_err(|e| usage(e.to_string()))?;
    let pds = args.pds.enabled();
    let source = |text: &str| -> Result<String> {
        if pds {
            pretokenize_text(text, &config).map_err(scan_error)
        } else {
            Ok(text.to_string())
        }
    };

    let Some(stem) = args.out else {
        let mut sink = Sink::open(None)?;
        for r in &records {
            match args.format {
                Format::Jsonl => {
                    let row = SyntheticRecord {
                        source: source(&r.source)?,
                        ..r.clone()
                    };
                    writeln!(sink, "{}", serde_json::to_string(&row)?)?;
                }
                _ => writeln!(sink, "{}\t{}", source(&r.source)?, r.target)?,
            }
        }
        return sink.finish();
    };

    if args.format == Format::Jsonl {
        let mut sink = Sink::file(stem.with_extension("jsonl"))?;
        for r in &records {
            let row = SyntheticRecord {
                source: source(&r.source)?,
                ..r.clone()
            };
            writeln!(sink, "{}", serde_json::to_string(&row)?)?;
        }
        return sink.finish();
    }
    write_parallel(
        records
            .iter()
            .map(|r| (r.source.as_str(), r.target.as_str())),
        pds,
        &config,
        &stem,
    )?;
    let mut sidecar = Sink::file(stem.with_extension("jsonl"))?;
    for r in &records {
        let row = SynthSidecar {
            value: r.value,
            magnitude: r.magnitude,
            template_id: r.template_id,
            class: "CARDINAL",
        };
        writeln!(sidecar, "{}", serde_json::to_string(&row)?)?;
    }
    sidecar.finish()
}

#[derive(Serialize)]
struct ArithRow {
    source: String,
    target: String,
    expression: String,
    value: String,
}

fn gen_arith(args: GenArithArgs) -> Result<()> {
    let scan_config = args.scan.config()?;
    let operators = args
        .operators
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| Operator::from_symbol(c).ok_or_else(|| usage(format!("unknown operator {c:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let config = ArithConfig {
        min_ops: args.min_ops,
        max_ops: args.max_ops,
        operand_bound: args.operand_bound,
        operators,
        ..ArithConfig::with_seed(args.seed)
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    let pds = match (args.format, args.pds) {
        (Format::Eqn, Some(Toggle::On)) => {
            return Err(usage("--format eqn writes plain equations; drop --pds on"))
        }
        (Format::Eqn, _) => false,
        (_, toggle) => toggle.unwrap_or(Toggle::On).enabled(),
    };
    let records = generate_records(args.count, &config)?;

    match (args.format, args.out) {
        (Format::Text, Some(stem)) => {
            let mut src = Sink::file(stem.with_extension("src"))?;
            let mut tgt = Sink::file(stem.with_extension("tgt"))?;
            for record in &records {
                let (s, t) = render_record(record, pds, &scan_config)?;
                writeln!(src, "{s}")?;
                writeln!(tgt, "{t}")?;
            }
            src.finish()?;
            tgt.finish()
        }
        (format, out) => {
            let path = out.map(|stem| {
                stem.with_extension(if format == Format::Eqn {
                    "eqn"
                } else {
                    "jsonl"
                })
            });
            let mut sink = Sink::open(path.as_deref())?;
            for record in &records {
                match format {
                    Format::Eqn => writeln!(sink, "{}", record.to_eqn())?,
                    Format::Jsonl => {
                        let (source, target) = render_record(record, pds, &scan_config)?;
                        let row = ArithRow {
                            source,
                            target,
                            expression: record.expression.clone(),
                            value: record.value.to_string(),
                        };
                        writeln!(sink, "{}", serde_json::to_string(&row)?)?;
                    }
                    Format::Text => {
                        let (s, t) = render_record(record, pds, &scan_config)?;
                        writeln!(sink, "{s}\t{t}")?;
                    }
                }
            }
            sink.finish()
        }
    }
}

fn eval(args: EvalArgs) -> Result<()> {
    if args.format == Format::Eqn {
        return Err(usage("eval reports as text or jsonl"));
    }
    let pred = read_lines(Some(&args.pred))?;
    let gold = read_lines(Some(&args.gold))?;
    check_aligned(&args.pred, pred.len(), &args.gold, gold.len())?;
    let mut items: Vec<EvalItem> = gold
        .into_iter()
        .zip(pred)
        .map(|(g, p)| EvalItem::new(g, p))
        .collect();

    if let Some(path) = &args.source {
        let source = read_lines(Some(path))?;
        check_aligned(path, source.len(), &args.gold, items.len())?;
        for (item, line) in items.iter_mut().zip(&source) {
            item.magnitude = sentence_magnitude(line);
        }
    }
    if let Some(path) = &args.sidecar {
        let rows = read_lines(Some(path))?;
        check_aligned(path, rows.len(), &args.gold, items.len())?;
        for (idx, (item, row)) in items.iter_mut().zip(&rows).enumerate() {
            let annotation: Annotation = serde_json::from_str(row)
                .with_context(|| format!("{}: line {}", path.display(), idx + 1))?;
            annotation.apply(item);
        }
    }

    let selection = match args.include_classes {
        Some(list) => ClassSelection::Explicit(list),
        None => ClassSelection::Default,
    };
    let report = build_report(&items, &selection)?;
    let json = serde_json::to_string_pretty(&report)?;
    if let Some(path) = &args.json {
        let mut sink = Sink::open(Some(path))?;
        writeln!(sink, "{json}")?;
        sink.finish()?;
    }
    let mut out = Sink::open(None)?;
    match args.format {
        Format::Jsonl => writeln!(out, "{}", serde_json::to_string(&report)?)?,
        _ => write!(out, "{report}")?,
    }
    out.finish()
}

fn check_aligned(a: &Path, a_len: usize, b: &Path, b_len: usize) -> Result<()> {
    if a_len != b_len {
        bail!(
            "{} has {a_len} lines but {} has {b_len}; they diverge at line {}",
            a.display(),
            b.display(),
            a_len.min(b_len) + 1
        );
    }
    Ok(())
}

fn verbalize_cmd(args: VerbalizeArgs) -> Result<()> {
    let style = match args.style {
        Style::Cardinal => VerbalizationStyle::Cardinal,
        Style::Digits => VerbalizationStyle::DigitWise,
        Style::Decimal => VerbalizationStyle::Decimal,
        Style::Time => VerbalizationStyle::Time,
    };
    match args.value {
        Some(value) => {
            println!("{}", verbalize(&value, style)?);
            Ok(())
        }
        None => transform_lines(None, None, 1, |line| Ok(Some(verbalize(line, style)?))),
    }
}

fn census(args: CensusArgs) -> Result<()> {
    let config = args.scan.config()?;
    let lines = read_lines(args.input.as_deref())?;
    let name = display_name(args.input.as_deref());
    let census = if !args.pds.enabled() {
        vocabulary_census(&lines, CensusMode::Raw, &config.pds)?
    } else if args.pretokenized {
        vocabulary_census(&lines, CensusMode::Pds, &config.pds)?
    } else {
        let encoded = lines
            .iter()
            .enumerate()
            .map(|(i, l)| {
                pretokenize_text(l, &config)
                    .map_err(scan_error)
                    .with_context(|| format!("{name}: line {}", i + 1))
            })
            .collect::<Result<Vec<_>>>()?;
        vocabulary_census(&encoded, CensusMode::Pds, &config.pds)?
    };
    println!("{}", serde_json::to_string(&census)?);
    Ok(())
}
