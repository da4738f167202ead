//! Locating numbers in running text and rewriting them with PDS.
//!
//! In the default minimal mode a number is any maximal run of ASCII digits;
//! decimals, times and dates fall apart into independent runs (`49.297`
//! becomes two numbers around a verbatim `.`). Grouped mode additionally
//! merges thousands-separated groups (`1,234`) into one number before
//! encoding.
//!
//! Rewriting pads each encoded number with a single space wherever it would
//! otherwise touch a non-space character, so the boundaries always stand as
//! separate tokens. That padding is not recorded in the output, so
//! [`invert_pretokenization`] has to decide which spaces next to a decoded
//! number were added. It drops them only around characters that conventionally
//! touch numbers (see [`Attachment`]): currency signs before a number, `%`
//! after one, and `.` `,` `:` `/` when they sit between two numbers. All
//! other spaces are kept. Inversion is therefore exact for space-tokenized
//! text (Kestrel sources, spaced arithmetic) and for ordinary prose in which
//! numbers are separated from words by whitespace, including decimals, times
//! and dates written `49.297`, `23:54`, `12/05/2021`.

use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::pds::{self, PdsConfig, PdsError, PdsNumber, PdsToken};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScanError {
    #[error("number of {len} digits at offset {start} exceeds the maximum of {max}")]
    OversizeNumber {
        start: usize,
        len: usize,
        max: usize,
    },
    #[error("invalid locale: {0}")]
    InvalidLocale(String),
    #[error(transparent)]
    Pds(#[from] PdsError),
}

impl ScanError {
    pub fn name(&self) -> &'static str {
        match self {
            ScanError::OversizeNumber { .. } => "OversizeNumber",
            ScanError::InvalidLocale(_) => "InvalidLocale",
            ScanError::Pds(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocaleNumberFormat {
    pub thousands_separator: Option<char>,
    pub decimal_separator: Option<char>,
    pub grouped_mode: bool,
}

impl LocaleNumberFormat {
    /// Minimal mode: every maximal digit run is a number.
    pub fn minimal() -> Self {
        Self::default()
    }

    /// Grouped mode with the given separators.
    pub fn grouped(thousands: char, decimal: Option<char>) -> Result<Self, ScanError> {
        let locale = Self {
            thousands_separator: Some(thousands),
            decimal_separator: decimal,
            grouped_mode: true,
        };
        locale.validate()?;
        Ok(locale)
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        if let (Some(t), Some(d)) = (self.thousands_separator, self.decimal_separator) {
            if t == d {
                return Err(ScanError::InvalidLocale(format!(
                    "thousands and decimal separator are both {t:?}"
                )));
            }
        }
        for sep in [self.thousands_separator, self.decimal_separator]
            .into_iter()
            .flatten()
        {
            if sep.is_ascii_digit() {
                return Err(ScanError::InvalidLocale(format!(
                    "separator {sep:?} is a digit"
                )));
            }
        }
        if self.grouped_mode && self.thousands_separator.is_none() {
            return Err(ScanError::InvalidLocale(
                "grouped mode needs a thousands separator".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OversizePolicy {
    /// Leave digit runs longer than `max_digits` untouched.
    #[default]
    PassThrough,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScanConfig {
    pub locale: LocaleNumberFormat,
    pub pds: PdsConfig,
    pub oversize_policy: OversizePolicy,
}

impl ScanConfig {
    pub fn new(
        locale: LocaleNumberFormat,
        pds: PdsConfig,
        oversize_policy: OversizePolicy,
    ) -> Result<Self, ScanError> {
        locale.validate()?;
        Ok(Self {
            locale,
            pds,
            oversize_policy,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpanKind {
    Integer,
    GroupedInteger,
}

/// A number located in text. Offsets count characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NumberSpan {
    pub start: usize,
    pub end: usize,
    pub raw: String,
    pub digits: PdsNumber,
    pub kind: SpanKind,
}

struct Located {
    span: NumberSpan,
    bytes: Range<usize>,
}

struct DigitRun {
    chars: Range<usize>,
    bytes: Range<usize>,
}

fn digit_runs(text: &str) -> Vec<DigitRun> {
    let mut runs = Vec::new();
    let mut current: Option<DigitRun> = None;
    for (char_idx, (byte_idx, c)) in text.char_indices().enumerate() {
        if c.is_ascii_digit() {
            match current.as_mut() {
                Some(run) => {
                    run.chars.end = char_idx + 1;
                    run.bytes.end = byte_idx + 1;
                }
                None => {
                    current = Some(DigitRun {
                        chars: char_idx..char_idx + 1,
                        bytes: byte_idx..byte_idx + 1,
                    })
                }
            }
        } else if let Some(run) = current.take() {
            runs.push(run);
        }
    }
    runs.extend(current);
    runs
}

fn locate(text: &str, config: &ScanConfig) -> Result<Vec<Located>, ScanError> {
    let runs = digit_runs(text);
    let mut found = Vec::with_capacity(runs.len());
    let mut i = 0;
    while i < runs.len() {
        let first = &runs[i];
        let mut last = i;
        if config.locale.grouped_mode {
            last = extend_group(text, &runs, i, &config.locale);
        }
        let bytes = first.bytes.start..runs[last].bytes.end;
        let raw = &text[bytes.clone()];
        let digits: String = runs[i..=last]
            .iter()
            .map(|r| &text[r.bytes.clone()])
            .collect();
        let kind = if last > i {
            SpanKind::GroupedInteger
        } else {
            SpanKind::Integer
        };
        let start = first.chars.start;
        let end = runs[last].chars.end;
        i = last + 1;

        if digits.len() > config.pds.max_digits() {
            match config.oversize_policy {
                OversizePolicy::PassThrough => continue,
                OversizePolicy::Error => {
                    return Err(ScanError::OversizeNumber {
                        start,
                        len: digits.len(),
                        max: config.pds.max_digits(),
                    })
                }
            }
        }
        found.push(Located {
            span: NumberSpan {
                start,
                end,
                raw: raw.to_string(),
                digits: PdsNumber::new(digits)?,
                kind,
            },
            bytes,
        });
    }
    Ok(found)
}

/// Index of the last run that belongs to a thousands group starting at `i`.
///
/// The leading group has 1-3 digits and every following group exactly 3,
/// each joined by one separator character. A run that is the fractional part
/// of a decimal never starts a group.
fn extend_group(text: &str, runs: &[DigitRun], i: usize, locale: &LocaleNumberFormat) -> usize {
    let Some(sep) = locale.thousands_separator else {
        return i;
    };
    let first = &runs[i];
    if first.bytes.len() > 3 {
        return i;
    }
    if let Some(dec) = locale.decimal_separator {
        let before = &text[..first.bytes.start];
        let mut rev = before.chars().rev();
        if rev.next() == Some(dec) && rev.next().is_some_and(|c| c.is_ascii_digit()) {
            return i;
        }
    }
    let mut last = i;
    while let Some(next) = runs.get(last + 1) {
        let gap = &text[runs[last].bytes.end..next.bytes.start];
        let mut gap_chars = gap.chars();
        let joined = gap_chars.next() == Some(sep) && gap_chars.next().is_none();
        if !joined || next.bytes.len() != 3 {
            break;
        }
        last += 1;
    }
    last
}

/// Numbers in `text`, ordered and non-overlapping.
pub fn scan(text: &str, config: &ScanConfig) -> Result<Vec<NumberSpan>, ScanError> {
    Ok(locate(text, config)?.into_iter().map(|l| l.span).collect())
}

/// Replace every number in `text` with its PDS rendering.
pub fn pretokenize_text(text: &str, config: &ScanConfig) -> Result<String, ScanError> {
    let located = locate(text, config)?;
    let mut out = String::with_capacity(text.len() + located.len() * 16);
    let mut copied = 0;
    for loc in &located {
        let before = &text[copied..loc.bytes.start];
        out.push_str(before);
        if text[..loc.bytes.start]
            .chars()
            .next_back()
            .is_some_and(|c| !c.is_whitespace())
        {
            out.push(' ');
        }
        let tokens = pds::encode_digits(&loc.span.digits, &config.pds)?;
        out.push_str(&pds::render_tokens(&tokens, &config.pds));
        if text[loc.bytes.end..]
            .chars()
            .next()
            .is_some_and(|c| !c.is_whitespace())
        {
            out.push(' ');
        }
        copied = loc.bytes.end;
    }
    out.push_str(&text[copied..]);
    Ok(out)
}

/// How a character sits against a neighbouring number in normal writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attachment {
    /// Written directly before a number: `$40`, `#3`.
    Prefix,
    /// Written directly after a number: `40%`.
    Suffix,
    /// Written directly between two numbers: `49.297`, `23:54`, `1/2`.
    Infix,
}

/// Attachment class of `c`, or `None` for characters that never attach
/// (letters, whitespace, brackets, arithmetic operators, the boundary).
/// Non-space locale separators count as infix.
pub fn attachment(c: char, locale: &LocaleNumberFormat) -> Option<Attachment> {
    match c {
        '$' | '£' | '€' | '¥' | '₹' | '#' => Some(Attachment::Prefix),
        '%' | '‰' => Some(Attachment::Suffix),
        '.' | ',' | ':' | '/' => Some(Attachment::Infix),
        c if !c.is_whitespace()
            && (Some(c) == locale.thousands_separator || Some(c) == locale.decimal_separator) =>
        {
            Some(Attachment::Infix)
        }
        _ => None,
    }
}

/// A PDS group found in rewritten text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdsGroup {
    /// Byte range of the group, boundaries included.
    pub bytes: Range<usize>,
    pub digits: PdsNumber,
}

/// Next single-space-separated word starting at byte `pos`.
fn next_word(text: &str, pos: usize) -> Option<(&str, usize)> {
    let rest = text.get(pos..)?;
    let rest = rest.strip_prefix(' ')?;
    let start = pos + 1;
    let len = rest.find(char::is_whitespace).unwrap_or(rest.len());
    if len == 0 {
        return None;
    }
    Some((&text[start..start + len], start + len))
}

/// Try to read a group whose opening boundary starts at byte `at`.
///
/// Returns `Ok(None)` when the text there does not look like a group at
/// all. Once a boundary is followed by a facevalue and a placevalue the
/// group is committed, and any later deviation is an error.
fn read_group(text: &str, at: usize, config: &PdsConfig) -> Result<Option<PdsGroup>, PdsError> {
    let boundary = config.boundary();
    let mut pos = at + boundary.len();
    let mut tokens = vec![PdsToken::Boundary];

    let Some((face, p1)) = next_word(text, pos) else {
        return Ok(None);
    };
    let Some(face) = pds::parse_facevalue(face) else {
        return Ok(None);
    };
    let Some((place, p2)) = next_word(text, p1) else {
        return Ok(None);
    };
    if !pds::is_placevalue_shaped(place, config) {
        return Ok(None);
    }
    tokens.push(PdsToken::FaceValue(face));
    tokens.push(PdsToken::PlaceValue(place.parse().expect("checked digits")));
    pos = p2;

    loop {
        let (word, next) = next_word(text, pos)
            .ok_or_else(|| PdsError::MalformedStream(format!("unterminated group at byte {at}")))?;
        if word == boundary {
            tokens.push(PdsToken::Boundary);
            pos = next;
            break;
        }
        let face = pds::parse_facevalue(word).ok_or_else(|| {
            PdsError::MalformedStream(format!("expected facevalue or boundary, found {word:?}"))
        })?;
        let (place, after) = next_word(text, next)
            .filter(|(w, _)| pds::is_placevalue_shaped(w, config))
            .ok_or_else(|| {
                PdsError::MalformedStream(format!("facevalue {face} lacks a placevalue"))
            })?;
        tokens.push(PdsToken::FaceValue(face));
        tokens.push(PdsToken::PlaceValue(place.parse().expect("checked digits")));
        pos = after;
    }

    let digits = pds::decode_tokens(&tokens, config)?;
    Ok(Some(PdsGroup {
        bytes: at..pos,
        digits,
    }))
}

enum Piece<'a> {
    /// A decoded group and the text that follows it.
    Group(&'a PdsGroup, &'a str),
    Verbatim(char),
}

/// Walk `text`, handing each PDS group and each verbatim character to
/// `visit` in order.
fn walk_groups(
    text: &str,
    config: &PdsConfig,
    mut visit: impl FnMut(Piece<'_>),
) -> Result<(), PdsError> {
    let boundary = config.boundary();
    let mut pos = 0;
    let mut prev: Option<char> = None;
    while pos < text.len() {
        let at_token_start = prev.is_none_or(char::is_whitespace);
        if at_token_start && text[pos..].starts_with(boundary) {
            if let Some(group) = read_group(text, pos, config)? {
                pos = group.bytes.end;
                prev = text[..pos].chars().next_back();
                visit(Piece::Group(&group, &text[pos..]));
                continue;
            }
        }
        let c = text[pos..].chars().next().expect("pos is a char boundary");
        visit(Piece::Verbatim(c));
        prev = Some(c);
        pos += c.len_utf8();
    }
    Ok(())
}

/// All PDS groups in `text`, in order.
pub fn find_groups(text: &str, config: &PdsConfig) -> Result<Vec<PdsGroup>, PdsError> {
    let mut groups = Vec::new();
    walk_groups(text, config, |piece| {
        if let Piece::Group(g, _) = piece {
            groups.push(g.clone());
        }
    })?;
    Ok(groups)
}

/// Undo [`pretokenize_text`].
///
/// Only well-formed groups are decoded; any other occurrence of the
/// boundary token is copied through. Grouped-mode output decodes to the
/// bare digits, without the thousands separators.
pub fn invert_pretokenization(text: &str, config: &ScanConfig) -> Result<String, ScanError> {
    let pds = &config.pds;
    let attach = |c: char| attachment(c, &config.locale);
    let starts_group = |at: usize| {
        text[at..].starts_with(pds.boundary()) && matches!(read_group(text, at, pds), Ok(Some(_)))
    };

    let mut out = String::with_capacity(text.len());
    // the space after the last group was padding
    let mut skip_space = false;
    // the space before the next group is padding (infix between two groups)
    let mut join_next = false;
    walk_groups(text, pds, |piece| match piece {
        Piece::Group(group, rest) => {
            if out.ends_with(' ') {
                let before = out[..out.len() - 1].chars().next_back();
                if join_next || before.and_then(attach) == Some(Attachment::Prefix) {
                    out.pop();
                }
            }
            join_next = false;
            skip_space = false;
            out.push_str(group.digits.as_str());

            let Some(after) = rest.strip_prefix(' ') else {
                return;
            };
            let Some(c) = after.chars().next() else {
                return;
            };
            match attach(c) {
                Some(Attachment::Suffix) => skip_space = true,
                Some(Attachment::Infix) => {
                    let tail = &after[c.len_utf8()..];
                    let next_at = text.len() - tail.len() + 1;
                    if tail.starts_with(' ') && starts_group(next_at) {
                        skip_space = true;
                        join_next = true;
                    }
                }
                _ => {}
            }
        }
        Piece::Verbatim(c) => {
            if std::mem::take(&mut skip_space) && c == ' ' {
                return;
            }
            out.push(c);
        }
    })?;
    Ok(out)
}
