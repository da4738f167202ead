//! Synthetic BODMAS arithmetic: generation, exact evaluation and scoring.
//!
//! Expressions are flat chains of non-negative decimal operands joined by
//! `+`, `-` and `*`, with multiplication binding tighter. Values are exact
//! big integers since six operands near 10^10 multiply out to ~10^60.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::rng::SplitMix64;
use crate::scanner::{invert_pretokenization, pretokenize_text, ScanConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("invalid arithmetic config: {0}")]
    InvalidConfig(String),
    #[error("{predicted} predictions for {gold} gold records")]
    LengthMismatch { predicted: usize, gold: usize },
    #[error("line {line}: stated value {stated} but expression evaluates to {actual}")]
    ValueMismatch {
        line: usize,
        stated: String,
        actual: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Add,
    Sub,
    Mul,
}

impl Operator {
    pub const ALL: [Operator; 3] = [Operator::Add, Operator::Sub, Operator::Mul];

    pub fn symbol(self) -> char {
        match self {
            Operator::Add => '+',
            Operator::Sub => '-',
            Operator::Mul => '*',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '+' => Some(Operator::Add),
            '-' | '−' => Some(Operator::Sub),
            '*' | '×' => Some(Operator::Mul),
            _ => None,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithConfig {
    pub min_ops: usize,
    pub max_ops: usize,
    /// Exclusive upper bound on operands.
    pub operand_bound: u64,
    pub operators: Vec<Operator>,
    pub seed: u64,
}

impl ArithConfig {
    /// Two to five operations over operands in `[0, 10^10)` using all three operators.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            min_ops: 2,
            max_ops: 5,
            operand_bound: 10_000_000_000,
            operators: Operator::ALL.to_vec(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ArithError> {
        if self.min_ops == 0 || self.min_ops > self.max_ops {
            return Err(ArithError::InvalidConfig(format!(
                "need 1 <= min_ops <= max_ops, got {}..{}",
                self.min_ops, self.max_ops
            )));
        }
        if self.operand_bound == 0 {
            return Err(ArithError::InvalidConfig(
                "operand_bound must be at least 1".into(),
            ));
        }
        if self.operators.is_empty() {
            return Err(ArithError::InvalidConfig("no operators configured".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithRecord {
    pub expression: String,
    pub value: BigInt,
}

impl ArithRecord {
    /// `EXPR = VALUE`.
    pub fn to_eqn(&self) -> String {
        format!("{} = {}", self.expression, self.value)
    }
}

fn parse_error(position: usize, message: impl Into<String>) -> ArithError {
    ArithError::Parse {
        position,
        message: message.into(),
    }
}

/// Exact value of `operand (operator operand)*`, `*` before `+`/`-`,
/// left-associative. Positions in errors count characters.
pub fn evaluate_expression(expression: &str) -> Result<BigInt, ArithError> {
    let chars: Vec<char> = expression.chars().collect();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while chars.get(*pos).is_some_and(|c| c.is_whitespace()) {
            *pos += 1;
        }
    };
    let read_operand = |pos: &mut usize| -> Result<BigInt, ArithError> {
        let start = *pos;
        while chars.get(*pos).is_some_and(char::is_ascii_digit) {
            *pos += 1;
        }
        if start == *pos {
            return Err(match chars.get(start) {
                Some(c) => parse_error(start, format!("expected an operand, found {c:?}")),
                None => parse_error(start, "expected an operand, found end of input"),
            });
        }
        let literal: String = chars[start..*pos].iter().collect();
        Ok(literal.parse().expect("digits parse as an integer"))
    };

    let mut total = BigInt::from(0);
    // sign of the product currently being built
    let mut sign = Operator::Add;
    skip_ws(&mut pos);
    let mut term = read_operand(&mut pos)?;
    loop {
        skip_ws(&mut pos);
        let Some(&c) = chars.get(pos) else {
            break;
        };
        let op = Operator::from_symbol(c)
            .ok_or_else(|| parse_error(pos, format!("expected an operator, found {c:?}")))?;
        pos += 1;
        skip_ws(&mut pos);
        let operand = read_operand(&mut pos)?;
        match op {
            Operator::Mul => term *= operand,
            Operator::Add | Operator::Sub => {
                match sign {
                    Operator::Sub => total -= term,
                    _ => total += term,
                }
                sign = op;
                term = operand;
            }
        }
    }
    match sign {
        Operator::Sub => total -= term,
        _ => total += term,
    }
    Ok(total)
}

/// Seeded records; record `i` depends only on the seed and `i`.
pub fn generate_records(
    count: usize,
    config: &ArithConfig,
) -> Result<Vec<ArithRecord>, ArithError> {
    config.validate()?;
    (0..count)
        .map(|index| {
            let mut rng = SplitMix64::for_record(config.seed, index as u64);
            let ops = rng.between(config.min_ops as u64, config.max_ops as u64) as usize;
            let mut expression = rng.below(config.operand_bound).to_string();
            for _ in 0..ops {
                let op = config.operators[rng.below(config.operators.len() as u64) as usize];
                let operand = rng.below(config.operand_bound);
                expression.push_str(&format!(" {op} {operand}"));
            }
            let value = evaluate_expression(&expression)?;
            Ok(ArithRecord { expression, value })
        })
        .collect()
}

/// Parse an `EXPR = VALUE` line and check the stated value.
pub fn parse_eqn_line(line: &str, line_no: usize) -> Result<ArithRecord, ArithError> {
    let (expr, stated) = line
        .rsplit_once('=')
        .ok_or_else(|| parse_error(0, format!("line {line_no}: missing '='")))?;
    let expression = expr.trim().to_string();
    let stated = stated.trim();
    let value = evaluate_expression(&expression)?;
    if stated != value.to_string() {
        return Err(ArithError::ValueMismatch {
            line: line_no,
            stated: stated.to_string(),
            actual: value.to_string(),
        });
    }
    Ok(ArithRecord { expression, value })
}

/// Source and target lines for a record. With PDS on both sides are
/// rewritten; a negative answer keeps its `-` outside the boundaries.
pub fn render_record(
    record: &ArithRecord,
    pds_enabled: bool,
    config: &ScanConfig,
) -> Result<(String, String), ArithError> {
    let source = record.expression.clone();
    let target = record.value.to_string();
    if !pds_enabled {
        return Ok((source, target));
    }
    let rewrite =
        |s: &str| pretokenize_text(s, config).map_err(|e| ArithError::InvalidConfig(e.to_string()));
    Ok((rewrite(&source)?, rewrite(&target)?))
}

/// Undo PDS on a rendered answer line. Returns `None` when the line holds a
/// malformed group.
pub fn invert_answer(line: &str, config: &ScanConfig) -> Option<String> {
    let plain = invert_pretokenization(line, config).ok()?;
    let plain = plain.trim();
    // the renderer leaves a padding space after a leading sign
    match plain.strip_prefix('-') {
        Some(rest)
            if rest
                .trim_start()
                .bytes()
                .next()
                .is_some_and(|b| b.is_ascii_digit()) =>
        {
            Some(format!("-{}", rest.trim_start()))
        }
        _ => Some(plain.to_string()),
    }
}

/// Fraction of predictions equal to the gold value's decimal rendering.
pub fn score_answers(
    predicted: &[String],
    gold: &[ArithRecord],
    pds_enabled: bool,
    config: &ScanConfig,
) -> Result<f64, ArithError> {
    if predicted.len() != gold.len() {
        return Err(ArithError::LengthMismatch {
            predicted: predicted.len(),
            gold: gold.len(),
        });
    }
    if gold.is_empty() {
        return Ok(0.0);
    }
    let correct = predicted
        .iter()
        .zip(gold)
        .filter(|(pred, record)| {
            let answer = if pds_enabled {
                invert_answer(pred, config)
            } else {
                Some(pred.trim().to_string())
            };
            answer.is_some_and(|a| a == record.value.to_string())
        })
        .count();
    Ok(correct as f64 / gold.len() as f64)
}
