//! Line streaming between files and standard streams.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use pds_tn::output::AtomicFile;
use rayon::prelude::*;

/// Lines handed to the worker pool at once when `--jobs` is above one.
const BATCH_LINES: usize = 4096;

pub fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => Box::new(BufReader::new(
            File::open(p).with_context(|| format!("cannot open {}", p.display()))?,
        )),
        _ => Box::new(BufReader::new(io::stdin())),
    })
}

/// Read every line, with `\n` or `\r\n` endings removed.
pub fn read_lines(path: Option<&Path>) -> Result<Vec<String>> {
    let name = display_name(path);
    open_input(path)?
        .lines()
        .enumerate()
        .map(|(i, line)| line.with_context(|| format!("{name}: line {}", i + 1)))
        .collect()
}

pub fn display_name(path: Option<&Path>) -> String {
    path.map_or_else(|| "<stdin>".to_string(), |p| p.display().to_string())
}

/// Standard output, or a file that only appears once [`Sink::finish`] runs.
pub enum Sink {
    Stdout(BufWriter<io::Stdout>),
    File(AtomicFile),
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self> {
        Ok(match path {
            Some(p) if p != Path::new("-") => Sink::File(
                AtomicFile::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            ),
            _ => Sink::Stdout(BufWriter::new(io::stdout())),
        })
    }

    pub fn file(path: PathBuf) -> Result<Self> {
        Self::open(Some(&path))
    }

    pub fn finish(self) -> Result<()> {
        match self {
            Sink::Stdout(mut w) => w.flush().context("cannot write to standard output"),
            Sink::File(f) => {
                let path = f.path().display().to_string();
                f.commit().with_context(|| format!("cannot write {path}"))
            }
        }
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::Stdout(w) => w.write(buf),
            Sink::File(f) => f.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::Stdout(w) => w.flush(),
            Sink::File(f) => f.flush(),
        }
    }
}

/// Apply `transform` to every input line and write the results in input
/// order. `None` writes nothing for that line. With `jobs > 1` lines are
/// transformed in parallel batches; the bytes written are the same.
///
/// A failing line stops the run after every earlier line has been written;
/// the error names the line.
pub fn transform_lines<F>(
    input: Option<&Path>,
    output: Option<&Path>,
    jobs: usize,
    transform: F,
) -> Result<()>
where
    F: Fn(&str) -> Result<Option<String>> + Sync,
{
    let name = display_name(input);
    let mut lines = open_input(input)?.lines();
    let mut sink = Sink::open(output)?;
    let pool = if jobs > 1 {
        Some(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
    } else {
        None
    };
    let mut line_no = 0usize;
    let mut batch = Vec::with_capacity(BATCH_LINES);
    loop {
        batch.clear();
        let batch_size = if pool.is_some() { BATCH_LINES } else { 1 };
        for line in lines.by_ref().take(batch_size) {
            batch
                .push(line.with_context(|| format!("{name}: line {}", line_no + batch.len() + 1))?);
        }
        if batch.is_empty() {
            break;
        }
        let results: Vec<Result<Option<String>>> = match &pool {
            Some(pool) => pool.install(|| batch.par_iter().map(|l| transform(l)).collect()),
            None => batch.iter().map(|l| transform(l)).collect(),
        };
        for result in results {
            line_no += 1;
            if let Some(text) = result.with_context(|| format!("{name}: line {line_no}"))? {
                writeln!(sink, "{text}")?;
            }
        }
    }
    sink.finish()
}
