//! Digit-level positional description encoding.
//!
//! A digit string `d_1 d_2 ... d_n` is rewritten as
//!
//! ```text
//! _ d_1 n d_2 n-1 ... d_n 01 _
//! ```
//!
//! where each digit (the facevalue) is followed by its place counted from
//! the least significant digit (the placevalue), rendered as a zero-padded
//! fixed-width decimal, and the whole number is delimited by boundary
//! tokens. `"123"` becomes `"_ 1 03 2 02 3 01 _"`.
//!
//! The encoding is positional over the literal digit string, so leading
//! zeros survive a round trip.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_MAX_DIGITS: usize = 20;
pub const DEFAULT_BOUNDARY: &str = "_";
pub const DEFAULT_PLACEVALUE_WIDTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdsError {
    #[error("empty digit string")]
    EmptyInput,
    #[error("number has {len} digits, more than the configured maximum of {max}")]
    TooManyDigits { len: usize, max: usize },
    #[error("non-digit character {ch:?} at position {position}")]
    NonDigit { ch: char, position: usize },
    #[error("malformed token stream: {0}")]
    MalformedStream(String),
    #[error("placevalue gap: expected {expected}, found {found}")]
    PlaceValueGap { expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl PdsError {
    /// Stable variant name, used by foreign-language bindings and the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            PdsError::EmptyInput => "EmptyInput",
            PdsError::TooManyDigits { .. } => "TooManyDigits",
            PdsError::NonDigit { .. } => "NonDigit",
            PdsError::MalformedStream(_) => "MalformedStream",
            PdsError::PlaceValueGap { .. } => "PlaceValueGap",
            PdsError::InvalidConfig(_) => "InvalidConfig",
        }
    }
}

/// Encoding parameters.
///
/// `max_digits` must fit in `placevalue_width` decimal digits, and the
/// boundary token must not be confusable with a digit or break the
/// space-separated rendering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdsConfig {
    max_digits: usize,
    boundary: String,
    placevalue_width: usize,
}

impl Default for PdsConfig {
    fn default() -> Self {
        Self {
            max_digits: DEFAULT_MAX_DIGITS,
            boundary: DEFAULT_BOUNDARY.to_string(),
            placevalue_width: DEFAULT_PLACEVALUE_WIDTH,
        }
    }
}

impl PdsConfig {
    pub fn new(
        max_digits: usize,
        boundary: impl Into<String>,
        placevalue_width: usize,
    ) -> Result<Self, PdsError> {
        let boundary = boundary.into();
        if max_digits == 0 {
            return Err(PdsError::InvalidConfig(
                "max_digits must be positive".into(),
            ));
        }
        if placevalue_width == 0 || placevalue_width > 9 {
            return Err(PdsError::InvalidConfig(format!(
                "placevalue_width must be in 1..=9, got {placevalue_width}"
            )));
        }
        let limit = 10usize.pow(placevalue_width as u32) - 1;
        if max_digits > limit {
            return Err(PdsError::InvalidConfig(format!(
                "max_digits {max_digits} does not fit in {placevalue_width} placevalue digits"
            )));
        }
        if boundary.is_empty() {
            return Err(PdsError::InvalidConfig("boundary token is empty".into()));
        }
        if boundary
            .chars()
            .any(|c| c.is_ascii_digit() || c.is_whitespace())
        {
            return Err(PdsError::InvalidConfig(format!(
                "boundary token {boundary:?} contains a digit or whitespace"
            )));
        }
        Ok(Self {
            max_digits,
            boundary,
            placevalue_width,
        })
    }

    /// Default boundary and width with a different digit limit.
    pub fn with_max_digits(max_digits: usize) -> Result<Self, PdsError> {
        Self::new(max_digits, DEFAULT_BOUNDARY, DEFAULT_PLACEVALUE_WIDTH)
    }

    pub fn max_digits(&self) -> usize {
        self.max_digits
    }

    pub fn boundary(&self) -> &str {
        &self.boundary
    }

    pub fn placevalue_width(&self) -> usize {
        self.placevalue_width
    }

    /// Zero-padded rendering of a placevalue.
    pub fn render_placevalue(&self, place: usize) -> String {
        format!("{place:0width$}", width = self.placevalue_width)
    }
}

/// One unit of an encoded stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PdsToken {
    Boundary,
    FaceValue(u8),
    PlaceValue(usize),
}

impl PdsToken {
    pub fn render(&self, config: &PdsConfig) -> String {
        match *self {
            PdsToken::Boundary => config.boundary.clone(),
            PdsToken::FaceValue(d) => char::from(b'0' + d).to_string(),
            PdsToken::PlaceValue(p) => config.render_placevalue(p),
        }
    }
}

/// A validated, non-empty string of ASCII decimal digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PdsNumber(String);

impl PdsNumber {
    pub fn new(digits: impl Into<String>) -> Result<Self, PdsError> {
        let digits = digits.into();
        if digits.is_empty() {
            return Err(PdsError::EmptyInput);
        }
        if let Some((position, ch)) = digits
            .chars()
            .enumerate()
            .find(|(_, c)| !c.is_ascii_digit())
        {
            return Err(PdsError::NonDigit { ch, position });
        }
        Ok(Self(digits))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Digit values, most significant first.
    pub fn digit_values(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.bytes().map(|b| b - b'0')
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl FromStr for PdsNumber {
    type Err = PdsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl fmt::Display for PdsNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for PdsNumber {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

pub fn encode_digits(digits: &PdsNumber, config: &PdsConfig) -> Result<Vec<PdsToken>, PdsError> {
    let len = digits.len();
    if len > config.max_digits {
        return Err(PdsError::TooManyDigits {
            len,
            max: config.max_digits,
        });
    }
    let mut tokens = Vec::with_capacity(2 * len + 2);
    tokens.push(PdsToken::Boundary);
    for (idx, face) in digits.digit_values().enumerate() {
        tokens.push(PdsToken::FaceValue(face));
        tokens.push(PdsToken::PlaceValue(len - idx));
    }
    tokens.push(PdsToken::Boundary);
    Ok(tokens)
}

/// Strict inverse of [`encode_digits`]. Streams that do not follow
/// `Boundary (FaceValue PlaceValue)+ Boundary` with placevalues counting
/// down to 1 are rejected, never repaired.
pub fn decode_tokens(tokens: &[PdsToken], config: &PdsConfig) -> Result<PdsNumber, PdsError> {
    let malformed = |msg: &str| PdsError::MalformedStream(msg.to_string());
    match (tokens.first(), tokens.last()) {
        (Some(PdsToken::Boundary), Some(PdsToken::Boundary)) if tokens.len() >= 2 => {}
        _ => return Err(malformed("stream must start and end with a boundary")),
    }
    let body = &tokens[1..tokens.len() - 1];
    if body.is_empty() {
        return Err(malformed("no digits between boundaries"));
    }
    if !body.len().is_multiple_of(2) {
        return Err(malformed("facevalue without placevalue"));
    }
    let len = body.len() / 2;
    if len > config.max_digits {
        return Err(PdsError::TooManyDigits {
            len,
            max: config.max_digits,
        });
    }

    let mut digits = String::with_capacity(len);
    for (idx, pair) in body.chunks_exact(2).enumerate() {
        let face = match pair[0] {
            PdsToken::FaceValue(d) if d <= 9 => d,
            PdsToken::FaceValue(d) => {
                return Err(PdsError::MalformedStream(format!(
                    "facevalue {d} is not a digit"
                )))
            }
            _ => return Err(malformed("expected a facevalue")),
        };
        let place = match pair[1] {
            PdsToken::PlaceValue(p) if (1..=config.max_digits).contains(&p) => p,
            PdsToken::PlaceValue(p) => {
                return Err(PdsError::MalformedStream(format!(
                    "placevalue {p} out of range"
                )))
            }
            _ => return Err(malformed("expected a placevalue")),
        };
        let expected = len - idx;
        if place != expected {
            return Err(PdsError::PlaceValueGap {
                expected,
                found: place,
            });
        }
        digits.push(char::from(b'0' + face));
    }
    Ok(PdsNumber(digits))
}

/// Space-separated wire rendering of a token stream.
pub fn render_tokens(tokens: &[PdsToken], config: &PdsConfig) -> String {
    let mut out = String::with_capacity(tokens.len() * 3);
    for (i, tok) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        match *tok {
            PdsToken::Boundary => out.push_str(&config.boundary),
            PdsToken::FaceValue(d) => out.push(char::from(b'0' + d)),
            PdsToken::PlaceValue(p) => out.push_str(&config.render_placevalue(p)),
        }
    }
    out
}

/// Parse a whitespace-separated rendering back into tokens.
///
/// Facevalue and placevalue tokens are told apart by their position in the
/// grammar, and each must have its exact rendered width.
pub fn parse_tokens(text: &str, config: &PdsConfig) -> Result<Vec<PdsToken>, PdsError> {
    let mut tokens = Vec::new();
    let mut expect_place = false;
    for word in text.split_whitespace() {
        if expect_place {
            tokens.push(PdsToken::PlaceValue(parse_placevalue(word, config)?));
            expect_place = false;
        } else if word == config.boundary {
            tokens.push(PdsToken::Boundary);
        } else if let Some(d) = parse_facevalue(word) {
            tokens.push(PdsToken::FaceValue(d));
            expect_place = true;
        } else {
            return Err(PdsError::MalformedStream(format!(
                "unexpected token {word:?}"
            )));
        }
    }
    if expect_place {
        return Err(PdsError::MalformedStream(
            "stream ends after a facevalue".into(),
        ));
    }
    Ok(tokens)
}

pub(crate) fn parse_facevalue(word: &str) -> Option<u8> {
    match word.as_bytes() {
        [b] if b.is_ascii_digit() => Some(b - b'0'),
        _ => None,
    }
}

pub(crate) fn is_placevalue_shaped(word: &str, config: &PdsConfig) -> bool {
    word.len() == config.placevalue_width && word.bytes().all(|b| b.is_ascii_digit())
}

fn parse_placevalue(word: &str, config: &PdsConfig) -> Result<usize, PdsError> {
    if !is_placevalue_shaped(word, config) {
        return Err(PdsError::MalformedStream(format!(
            "expected a {}-digit placevalue, found {word:?}",
            config.placevalue_width
        )));
    }
    // width <= 9, always fits
    Ok(word.parse().expect("checked digits"))
}

/// Validate and encode a digit string straight to its wire rendering.
pub fn encode_str(digits: &str, config: &PdsConfig) -> Result<String, PdsError> {
    let number = PdsNumber::new(digits)?;
    Ok(render_tokens(&encode_digits(&number, config)?, config))
}

/// Parse and decode a wire rendering of a single number.
pub fn decode_str(text: &str, config: &PdsConfig) -> Result<PdsNumber, PdsError> {
    decode_tokens(&parse_tokens(text, config)?, config)
}

/// Every rendered token text an encoder with `config` can produce.
pub fn pds_vocabulary(config: &PdsConfig) -> BTreeSet<String> {
    let mut vocab = BTreeSet::new();
    vocab.insert(config.boundary.clone());
    vocab.extend((0..10).map(|d| d.to_string()));
    vocab.extend((1..=config.max_digits).map(|p| config.render_placevalue(p)));
    vocab
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc(s: &str) -> Result<String, PdsError> {
        encode_str(s, &PdsConfig::default())
    }

    fn dec(s: &str) -> Result<String, PdsError> {
        decode_str(s, &PdsConfig::default()).map(PdsNumber::into_string)
    }

    #[test]
    fn encodes_reference_examples() {
        assert_eq!(enc("123").unwrap(), "_ 1 03 2 02 3 01 _");
        assert_eq!(enc("7").unwrap(), "_ 7 01 _");
        assert_eq!(enc("007").unwrap(), "_ 0 03 0 02 7 01 _");
        assert_eq!(enc("1234").unwrap(), "_ 1 04 2 03 3 02 4 01 _");
    }

    #[test]
    fn encode_rejects_bad_input() {
        assert_eq!(enc(""), Err(PdsError::EmptyInput));
        assert_eq!(
            enc("12a"),
            Err(PdsError::NonDigit {
                ch: 'a',
                position: 2
            })
        );
        assert_eq!(
            enc(&"1".repeat(21)),
            Err(PdsError::TooManyDigits { len: 21, max: 20 })
        );
        assert!(enc(&"9".repeat(20)).is_ok());
    }

    #[test]
    fn decodes_reference_examples() {
        assert_eq!(dec("_ 1 03 2 02 3 01 _").unwrap(), "123");
        assert_eq!(dec("_ 0 01 _").unwrap(), "0");
        assert_eq!(
            dec("_ 1 02 _"),
            Err(PdsError::PlaceValueGap {
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn decode_rejects_grammar_violations() {
        for bad in [
            "",
            "_",
            "_ _",
            "1 01",
            "_ 1 01",
            "1 01 _",
            "_ 1 _",
            "_ 1 1 _",
            "_ 01 1 _",
            "_ 1 01 2 _",
        ] {
            let err = dec(bad).unwrap_err();
            assert_eq!(err.name(), "MalformedStream", "{bad:?} gave {err:?}");
        }
        // descending but not contiguous
        assert_eq!(
            dec("_ 1 03 2 01 _"),
            Err(PdsError::PlaceValueGap {
                expected: 2,
                found: 3
            })
        );
        assert!(matches!(
            dec("_ 1 01 2 02 _"),
            Err(PdsError::PlaceValueGap { .. })
        ));
        assert_eq!(dec("_ 1 00 _").unwrap_err().name(), "MalformedStream");
    }

    #[test]
    fn decode_rejects_out_of_range_tokens() {
        let cfg = PdsConfig::default();
        let bad_face = [
            PdsToken::Boundary,
            PdsToken::FaceValue(12),
            PdsToken::PlaceValue(1),
            PdsToken::Boundary,
        ];
        assert_eq!(
            decode_tokens(&bad_face, &cfg).unwrap_err().name(),
            "MalformedStream"
        );
        let bad_place = [
            PdsToken::Boundary,
            PdsToken::FaceValue(1),
            PdsToken::PlaceValue(21),
            PdsToken::Boundary,
        ];
        assert_eq!(
            decode_tokens(&bad_place, &cfg).unwrap_err().name(),
            "MalformedStream"
        );
    }

    #[test]
    fn vocabulary_sizes() {
        let v20 = pds_vocabulary(&PdsConfig::default());
        assert_eq!(v20.len(), 31);
        assert!(v20.contains("_") && v20.contains("20") && v20.contains("01"));
        let v1 = pds_vocabulary(&PdsConfig::with_max_digits(1).unwrap());
        assert_eq!(v1.len(), 12);
        assert!(v1.contains("01"));
        assert_eq!(
            pds_vocabulary(&PdsConfig::with_max_digits(5).unwrap()).len(),
            16
        );
    }

    #[test]
    fn config_validation() {
        assert!(PdsConfig::new(99, "_", 2).is_ok());
        assert!(PdsConfig::new(100, "_", 2).is_err());
        assert!(PdsConfig::new(0, "_", 2).is_err());
        assert!(PdsConfig::new(9, "_", 1).is_ok());
        assert!(PdsConfig::new(20, "", 2).is_err());
        assert!(PdsConfig::new(20, "b1", 2).is_err());
        assert!(PdsConfig::new(20, "< >", 2).is_err());
        assert!(PdsConfig::new(20, "<num>", 2).is_ok());
    }

    #[test]
    fn custom_boundary_and_width() {
        let cfg = PdsConfig::new(5, "<n>", 3).unwrap();
        let out = encode_str("42", &cfg).unwrap();
        assert_eq!(out, "<n> 4 002 2 001 <n>");
        assert_eq!(decode_str(&out, &cfg).unwrap().as_str(), "42");
    }

    #[test]
    fn error_names_are_stable() {
        assert_eq!(PdsError::EmptyInput.name(), "EmptyInput");
        assert_eq!(
            PdsError::TooManyDigits { len: 1, max: 0 }.name(),
            "TooManyDigits"
        );
        assert_eq!(
            PdsError::PlaceValueGap {
                expected: 1,
                found: 2
            }
            .name(),
            "PlaceValueGap"
        );
    }
}
