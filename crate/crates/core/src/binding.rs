//! The surface that language bindings wrap: text in, text out, plus the
//! digit-level encoder. Every function is a direct call into the modules
//! above, so a binding adds no behavior of its own.

use crate::pds::{self, PdsConfig, PdsError, PdsNumber};
use crate::scanner::{self, NumberSpan, ScanConfig, ScanError};

/// Same as [`scanner::pretokenize_text`].
pub fn encode_text(text: &str, config: &ScanConfig) -> Result<String, ScanError> {
    scanner::pretokenize_text(text, config)
}

/// Same as [`scanner::invert_pretokenization`].
pub fn decode_text(text: &str, config: &ScanConfig) -> Result<String, ScanError> {
    scanner::invert_pretokenization(text, config)
}

/// Same as [`scanner::scan`].
pub fn scan(text: &str, config: &ScanConfig) -> Result<Vec<NumberSpan>, ScanError> {
    scanner::scan(text, config)
}

/// Encode a digit string into rendered token texts.
pub fn encode_digits(digits: &str, config: &PdsConfig) -> Result<Vec<String>, PdsError> {
    let tokens = pds::encode_digits(&PdsNumber::new(digits)?, config)?;
    Ok(tokens.iter().map(|t| t.render(config)).collect())
}

/// Decode rendered token texts back into the digit string.
pub fn decode_tokens<S: AsRef<str>>(tokens: &[S], config: &PdsConfig) -> Result<String, PdsError> {
    let mut joined = String::new();
    for token in tokens {
        let token = token.as_ref();
        if token.split_whitespace().count() != 1 || token.trim() != token {
            return Err(PdsError::MalformedStream(format!(
                "token {token:?} is not a single word"
            )));
        }
        if !joined.is_empty() {
            joined.push(' ');
        }
        joined.push_str(token);
    }
    let parsed = pds::parse_tokens(&joined, config)?;
    Ok(pds::decode_tokens(&parsed, config)?.into_string())
}
