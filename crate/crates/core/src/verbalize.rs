//! Rule-based English verbalizer used as a gold oracle.
//!
//! Output style is lowercase, hyphen-free and never uses "and":
//! 631818 is "six hundred thirty one thousand eight hundred eighteen".

use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::pds::{PdsError, PdsNumber};
use crate::rng::SplitMix64;

/// Exclusive upper bound of [`verbalize_cardinal`].
pub const CARDINAL_LIMIT: u128 = 1_000_000_000_000_000_000_000;

const ONES: [&str; 20] = [
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
];

const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

// index k names 10^(3k)
const SCALES: [&str; 7] = [
    "",
    "thousand",
    "million",
    "billion",
    "trillion",
    "quadrillion",
    "quintillion",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerbalizeError {
    #[error("{0} is outside the supported cardinal range")]
    OutOfRange(String),
    #[error("empty digit string")]
    EmptyInput,
    #[error("non-digit character {ch:?} at position {position}")]
    NonDigit { ch: char, position: usize },
    #[error("invalid clock time {hours}:{minutes:02}")]
    InvalidTime { hours: u32, minutes: u32 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input {0:?}")]
    InvalidInput(String),
}

impl From<PdsError> for VerbalizeError {
    fn from(e: PdsError) -> Self {
        match e {
            PdsError::NonDigit { ch, position } => VerbalizeError::NonDigit { ch, position },
            PdsError::EmptyInput => VerbalizeError::EmptyInput,
            other => VerbalizeError::InvalidInput(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerbalizationStyle {
    Cardinal,
    DigitWise,
    Decimal,
    Time,
}

fn push_below_thousand(n: u128, words: &mut Vec<&'static str>) {
    debug_assert!(n > 0 && n < 1000);
    let hundreds = (n / 100) as usize;
    let rest = (n % 100) as usize;
    if hundreds > 0 {
        words.push(ONES[hundreds]);
        words.push("hundred");
    }
    if rest >= 20 {
        words.push(TENS[rest / 10]);
        if !rest.is_multiple_of(10) {
            words.push(ONES[rest % 10]);
        }
    } else if rest > 0 {
        words.push(ONES[rest]);
    }
}

pub fn verbalize_cardinal(n: u128) -> Result<String, VerbalizeError> {
    if n >= CARDINAL_LIMIT {
        return Err(VerbalizeError::OutOfRange(n.to_string()));
    }
    if n == 0 {
        return Ok("zero".to_string());
    }
    let mut chunks = Vec::new();
    let mut rest = n;
    while rest > 0 {
        chunks.push(rest % 1000);
        rest /= 1000;
    }
    let mut words = Vec::new();
    for (scale, &chunk) in chunks.iter().enumerate().rev() {
        if chunk == 0 {
            continue;
        }
        push_below_thousand(chunk, &mut words);
        if scale > 0 {
            words.push(SCALES[scale]);
        }
    }
    Ok(words.join(" "))
}

/// Cardinal reading of a digit string, leading zeros ignored.
pub fn verbalize_cardinal_digits(digits: &PdsNumber) -> Result<String, VerbalizeError> {
    let trimmed = digits.as_str().trim_start_matches('0');
    if trimmed.len() > 21 {
        return Err(VerbalizeError::OutOfRange(digits.to_string()));
    }
    let value: u128 = if trimmed.is_empty() {
        0
    } else {
        trimmed.parse().expect("checked digits")
    };
    verbalize_cardinal(value)
}

/// One word per digit; zero reads "zero".
pub fn verbalize_digits(digits: &str) -> Result<String, VerbalizeError> {
    let digits = PdsNumber::new(digits)?;
    Ok(digits
        .digit_values()
        .map(|d| ONES[usize::from(d)])
        .collect::<Vec<_>>()
        .join(" "))
}

pub fn verbalize_decimal(int_part: &str, frac_part: &str) -> Result<String, VerbalizeError> {
    let int_part = PdsNumber::new(int_part)?;
    let frac = verbalize_digits(frac_part)?;
    Ok(format!(
        "{} point {frac}",
        verbalize_cardinal_digits(&int_part)?
    ))
}

/// Clock time as spoken: 23:54 is "twenty three fifty four", 12:05 is
/// "twelve oh five". Full hours are rejected.
pub fn verbalize_time(hours: u32, minutes: u32) -> Result<String, VerbalizeError> {
    if hours > 23 || minutes > 59 {
        return Err(VerbalizeError::InvalidTime { hours, minutes });
    }
    if minutes == 0 {
        return Err(VerbalizeError::Unsupported(format!(
            "full-hour time {hours}:00"
        )));
    }
    let h = verbalize_cardinal(hours.into())?;
    let m = verbalize_cardinal(minutes.into())?;
    if minutes < 10 {
        Ok(format!("{h} oh {m}"))
    } else {
        Ok(format!("{h} {m}"))
    }
}

/// Verbalize a written form under `style`.
///
/// Decimals are written `INT.FRAC` and times `HH:MM`.
pub fn verbalize(input: &str, style: VerbalizationStyle) -> Result<String, VerbalizeError> {
    let input = input.trim();
    match style {
        VerbalizationStyle::Cardinal => verbalize_cardinal_digits(&PdsNumber::new(input)?),
        VerbalizationStyle::DigitWise => verbalize_digits(input),
        VerbalizationStyle::Decimal => {
            let (int_part, frac) = input
                .split_once('.')
                .ok_or_else(|| VerbalizeError::InvalidInput(input.to_string()))?;
            verbalize_decimal(int_part, frac)
        }
        VerbalizationStyle::Time => {
            let (h, m) = input
                .split_once(':')
                .filter(|(h, m)| {
                    (1..=2).contains(&h.len())
                        && m.len() == 2
                        && h.bytes().chain(m.bytes()).all(|b| b.is_ascii_digit())
                })
                .ok_or_else(|| VerbalizeError::InvalidInput(input.to_string()))?;
            verbalize_time(h.parse().expect("checked"), m.parse().expect("checked"))
        }
    }
}

/// Sentence frames for synthetic cardinal records. `{}` marks the number.
pub const CARDINAL_TEMPLATES: [&str; 8] = [
    "I have {} apples",
    "The stadium holds {} people",
    "There were {} votes counted in the district",
    "The company shipped {} units last year",
    "She walked {} steps on the trail",
    "The population of the region is {}",
    "They donated {} books to the library",
    "The archive contains {} records",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyntheticRecord {
    pub source: String,
    pub target: String,
    pub value: u128,
    /// Number of decimal digits in `value`.
    pub magnitude: u32,
    pub template_id: usize,
}

/// Digit count of `value` (1 for zero).
pub fn digit_count(value: u128) -> u32 {
    value.checked_ilog10().map_or(1, |l| l + 1)
}

/// Seeded synthetic sentences carrying one cardinal each.
///
/// Magnitude `m` covers values in `[10^m, 10^(m+1))` (`[0, 10)` for `m = 0`).
/// Each record picks `m` uniformly from `magnitudes`, then a value uniformly
/// within that magnitude, then a template.
pub fn generate_synthetic_cardinal_set(
    count: usize,
    magnitudes: Range<u32>,
    seed: u64,
) -> Result<Vec<SyntheticRecord>, VerbalizeError> {
    if magnitudes.start >= magnitudes.end || magnitudes.end > 21 {
        return Err(VerbalizeError::InvalidInput(format!(
            "magnitude range {}..{} must be non-empty and within 0..21",
            magnitudes.start, magnitudes.end
        )));
    }
    (0..count)
        .map(|index| {
            let mut rng = SplitMix64::for_record(seed, index as u64);
            let m = rng.between(magnitudes.start.into(), (magnitudes.end - 1).into()) as u32;
            let lo = if m == 0 { 0 } else { 10u128.pow(m) };
            let hi = 10u128.pow(m + 1);
            let value = lo + rng.below_u128(hi - lo);
            let template_id = rng.below(CARDINAL_TEMPLATES.len() as u64) as usize;
            let template = CARDINAL_TEMPLATES[template_id];
            Ok(SyntheticRecord {
                source: template.replace("{}", &value.to_string()),
                target: template.replace("{}", &verbalize_cardinal(value)?),
                value,
                magnitude: digit_count(value),
                template_id,
            })
        })
        .collect()
}
