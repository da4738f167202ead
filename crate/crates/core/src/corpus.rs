//! Kestrel-format text normalization data: parsing, sentence assembly,
//! seeded splits and parallel-file emission.
//!
//! The input is the tab-separated layout of the public Google TN release:
//!
//! ```text
//! PLAIN	the	<self>
//! CARDINAL	123	one hundred twenty three
//! PUNCT	.	sil
//! <eos>	<eos>
//! ```
//!
//! `<self>` and `sil` both resolve to the input token on the target side, so
//! punctuation is kept verbatim.

#![allow(clippy::tabs_in_doc_comments)]

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::output::AtomicFile;
use crate::rng::keyed_permutation;
use crate::scanner::{pretokenize_text, ScanConfig, ScanError};

pub const SELF_MARKER: &str = "<self>";
pub const SIL_MARKER: &str = "sil";
pub const EOS_MARKER: &str = "<eos>";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("sentence has no tokens")]
    EmptySentence,
    #[error("not enough sentences for {set}: short by {shortfall}")]
    InsufficientData { set: String, shortfall: usize },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("reading input: {0}")]
    Read(io::Error),
    #[error(transparent)]
    Scan(#[from] ScanError),
}

impl CorpusError {
    fn io(path: &Path, source: io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TnToken {
    pub semiotic_class: String,
    pub input: String,
    pub output: String,
}

impl TnToken {
    /// The spoken form this token contributes to the target sentence.
    pub fn resolved_output(&self) -> &str {
        if self.output == SELF_MARKER || self.output == SIL_MARKER {
            &self.input
        } else {
            &self.output
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TnSentence {
    pub tokens: Vec<TnToken>,
}

impl TnSentence {
    pub fn classes(&self) -> BTreeSet<&str> {
        self.tokens
            .iter()
            .map(|t| t.semiotic_class.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KestrelLine {
    Token(TnToken),
    EndOfSentence,
    Blank,
}

/// Classify one line. Errors carry a message but no line number.
pub fn parse_kestrel_line(line: &str) -> Result<KestrelLine, String> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.trim().is_empty() {
        return Ok(KestrelLine::Blank);
    }
    let fields: Vec<&str> = line.split('\t').collect();
    match fields.as_slice() {
        [a, b] | [a, b, _] if *a == EOS_MARKER && *b == EOS_MARKER => {
            Ok(KestrelLine::EndOfSentence)
        }
        [class, input, output] => {
            if class.is_empty() {
                return Err("empty semiotic class".into());
            }
            if input.is_empty() {
                return Err("empty input token".into());
            }
            Ok(KestrelLine::Token(TnToken {
                semiotic_class: class.to_string(),
                input: input.to_string(),
                output: output.to_string(),
            }))
        }
        other => Err(format!(
            "expected 3 tab-separated fields, found {}",
            other.len()
        )),
    }
}

#[derive(Debug, Default)]
pub struct ParsedCorpus {
    pub sentences: Vec<TnSentence>,
    /// (line number, reason) for lines dropped in lenient mode.
    pub skipped: Vec<(usize, String)>,
}

/// Read a Kestrel stream. Strict mode stops at the first malformed line;
/// lenient mode drops it and records why. Line numbers start at 1.
pub fn parse_kestrel_stream<R: BufRead>(
    reader: R,
    lenient: bool,
) -> Result<ParsedCorpus, CorpusError> {
    let mut parsed = ParsedCorpus::default();
    let mut current = TnSentence::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(CorpusError::Read)?;
        match parse_kestrel_line(&line) {
            Ok(KestrelLine::Token(tok)) => current.tokens.push(tok),
            Ok(KestrelLine::EndOfSentence) => {
                if !current.tokens.is_empty() {
                    parsed.sentences.push(std::mem::take(&mut current));
                }
            }
            Ok(KestrelLine::Blank) => {}
            Err(message) if lenient => parsed.skipped.push((line_no, message)),
            Err(message) => {
                return Err(CorpusError::MalformedLine {
                    line: line_no,
                    message,
                })
            }
        }
    }
    if !current.tokens.is_empty() {
        parsed.sentences.push(current);
    }
    Ok(parsed)
}

/// Source and target text: inputs, and resolved outputs, joined by single spaces.
pub fn assemble_pair(sentence: &TnSentence) -> Result<(String, String), CorpusError> {
    if sentence.tokens.is_empty() {
        return Err(CorpusError::EmptySentence);
    }
    let source = sentence
        .tokens
        .iter()
        .map(|t| t.input.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    let target = sentence
        .tokens
        .iter()
        .map(TnToken::resolved_output)
        .collect::<Vec<_>>()
        .join(" ");
    Ok((source, target))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitSpec {
    pub seed: u64,
    pub heldout_size: usize,
    pub per_class_size: usize,
    pub train_sizes: Vec<usize>,
}

impl SplitSpec {
    /// 10k held-out sentences, 1k per class, and nested 100k/1M/10M training sets.
    pub fn standard(seed: u64) -> Self {
        Self {
            seed,
            heldout_size: 10_000,
            per_class_size: 1_000,
            train_sizes: vec![100_000, 1_000_000, 10_000_000],
        }
    }
}

/// Sentence indices per set, each in sampled order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSplit {
    pub seed: u64,
    pub heldout: Vec<usize>,
    /// Class label to sentences containing at least one token of that class.
    pub per_class: BTreeMap<String, Vec<usize>>,
    /// Requested size and members, in the order of `train_sizes`.
    pub train: Vec<(usize, Vec<usize>)>,
    pub per_class_requested: usize,
}

impl CorpusSplit {
    /// Named sets in emission order.
    pub fn named_sets(&self) -> Vec<(String, usize, &[usize])> {
        let mut sets = vec![(
            "heldout".to_string(),
            self.heldout.len(),
            self.heldout.as_slice(),
        )];
        for (size, members) in &self.train {
            sets.push((format!("train_{size}"), *size, members.as_slice()));
        }
        for (class, members) in &self.per_class {
            sets.push((
                format!("class_{class}"),
                self.per_class_requested,
                members.as_slice(),
            ));
        }
        sets
    }
}

/// Deterministic held-out, per-class and nested training sets.
///
/// All sentences are ordered by a seeded permutation. The held-out set is
/// its first `heldout_size` entries and the training sets are prefixes of
/// the entries that follow, so smaller training sets nest inside larger
/// ones and never meet the held-out set. Per-class sets take, in the same
/// order, the first sentences outside every training set that contain the
/// class; a rare class simply gets a smaller set.
pub fn split_corpus(
    sentences: &[TnSentence],
    spec: &SplitSpec,
) -> Result<CorpusSplit, CorpusError> {
    let n = sentences.len();
    if spec.heldout_size > n {
        return Err(CorpusError::InsufficientData {
            set: "heldout".into(),
            shortfall: spec.heldout_size - n,
        });
    }
    let max_train = spec.train_sizes.iter().copied().max().unwrap_or(0);
    let needed = spec.heldout_size + max_train;
    if needed > n {
        return Err(CorpusError::InsufficientData {
            set: format!("train_{max_train}"),
            shortfall: needed - n,
        });
    }

    let order = keyed_permutation(spec.seed, n);
    let heldout = order[..spec.heldout_size].to_vec();
    let train_pool = &order[spec.heldout_size..needed];
    let train = spec
        .train_sizes
        .iter()
        .map(|&size| (size, train_pool[..size].to_vec()))
        .collect();

    let mut per_class: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    if spec.per_class_size > 0 {
        let outside_train = order[..spec.heldout_size].iter().chain(&order[needed..]);
        for &idx in outside_train {
            for class in sentences[idx].classes() {
                let members = per_class.entry(class.to_string()).or_default();
                if members.len() < spec.per_class_size {
                    members.push(idx);
                }
            }
        }
    }

    Ok(CorpusSplit {
        seed: spec.seed,
        heldout,
        per_class,
        train,
        per_class_requested: spec.per_class_size,
    })
}

/// Write aligned `<stem>.src` / `<stem>.tgt` files, one sentence per line.
///
/// With PDS on, only the source side is rewritten. Both files are published
/// together once complete; on error neither appears.
pub fn write_parallel<'a>(
    pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    pds_enabled: bool,
    config: &ScanConfig,
    stem: &Path,
) -> Result<usize, CorpusError> {
    let src_path = stem.with_extension("src");
    let tgt_path = stem.with_extension("tgt");
    let mut src = AtomicFile::create(&src_path).map_err(|e| CorpusError::io(&src_path, e))?;
    let mut tgt = AtomicFile::create(&tgt_path).map_err(|e| CorpusError::io(&tgt_path, e))?;
    let mut lines = 0;
    for (source, target) in pairs {
        if pds_enabled {
            writeln!(src, "{}", pretokenize_text(source, config)?)
        } else {
            writeln!(src, "{source}")
        }
        .map_err(|e| CorpusError::io(&src_path, e))?;
        writeln!(tgt, "{target}").map_err(|e| CorpusError::io(&tgt_path, e))?;
        lines += 1;
    }
    src.commit().map_err(|e| CorpusError::io(&src_path, e))?;
    tgt.commit().map_err(|e| CorpusError::io(&tgt_path, e))?;
    Ok(lines)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetEntry {
    pub name: String,
    pub size: usize,
    pub requested: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub pds: bool,
    pub sets: Vec<SetEntry>,
}

/// Emit every set of `split` into `out_dir` plus a `manifest.json`.
pub fn emit_parallel(
    sentences: &[TnSentence],
    split: &CorpusSplit,
    pds_enabled: bool,
    config: &ScanConfig,
    out_dir: &Path,
) -> Result<SplitManifest, CorpusError> {
    let pairs: Vec<(String, String)> = sentences
        .iter()
        .map(assemble_pair)
        .collect::<Result<_, _>>()?;
    let mut sets = Vec::new();
    for (name, requested, members) in split.named_sets() {
        let stem = out_dir.join(&name);
        let chosen = members
            .iter()
            .map(|&i| (pairs[i].0.as_str(), pairs[i].1.as_str()));
        let size = write_parallel(chosen, pds_enabled, config, &stem)?;
        sets.push(SetEntry {
            name,
            size,
            requested,
        });
    }
    let manifest = SplitManifest {
        seed: split.seed,
        pds: pds_enabled,
        sets,
    };
    let path = out_dir.join("manifest.json");
    let mut file = AtomicFile::create(&path).map_err(|e| CorpusError::io(&path, e))?;
    serde_json::to_writer_pretty(&mut file, &manifest)
        .map_err(|e| CorpusError::io(&path, e.into()))?;
    writeln!(file).map_err(|e| CorpusError::io(&path, e))?;
    file.commit().map_err(|e| CorpusError::io(&path, e))?;
    Ok(manifest)
}
