//! Positional description pre-tokenization for numbers.
//!
//! Every number in a text is rewritten digit by digit as a facevalue
//! followed by its zero-padded placevalue, between boundary tokens:
//!
//! ```
//! use pds_tn::scanner::{pretokenize_text, ScanConfig};
//!
//! let out = pretokenize_text("I have 123 apples", &ScanConfig::default()).unwrap();
//! assert_eq!(out, "I have _ 1 03 2 02 3 01 _ apples");
//! ```
//!
//! Besides the encoder ([`pds`]) and the text-level scanner ([`scanner`]),
//! the crate carries the tooling around it: Kestrel corpus preparation
//! ([`corpus`]), a rule-based English verbalizer for gold data
//! ([`verbalize`]), a synthetic arithmetic task ([`arith`]) and the
//! evaluation harness ([`eval`]).

pub mod arith;
pub mod binding;
pub mod corpus;
pub mod eval;
pub mod output;
pub mod pds;
pub mod rng;
pub mod scanner;
pub mod verbalize;

pub use pds::{decode_tokens, encode_digits, PdsConfig, PdsError, PdsNumber, PdsToken};
pub use scanner::{
    invert_pretokenization, pretokenize_text, scan, LocaleNumberFormat, NumberSpan, OversizePolicy,
    ScanConfig, ScanError,
};

/// Crate version, shared with the CLI and any bindings.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
