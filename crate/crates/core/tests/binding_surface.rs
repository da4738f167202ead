use std::fs;
use std::path::Path;

use pds_tn::binding::{decode_text, decode_tokens, encode_digits, encode_text, scan};
use pds_tn::scanner::{OversizePolicy, ScanConfig};
use pds_tn::PdsConfig;

#[test]
fn examples() {
    let cfg = ScanConfig::default();
    assert_eq!(
        encode_text("I have 123 apples", &cfg).unwrap(),
        "I have _ 1 03 2 02 3 01 _ apples"
    );
    assert_eq!(encode_text("", &cfg).unwrap(), "");
    let strict = ScanConfig {
        oversize_policy: OversizePolicy::Error,
        ..ScanConfig::default()
    };
    let err = encode_text(&"9".repeat(21), &strict).unwrap_err();
    assert_eq!(err.name(), "OversizeNumber");
}

#[test]
fn digit_level_round_trip() {
    let cfg = PdsConfig::default();
    let tokens = encode_digits("123", &cfg).unwrap();
    assert_eq!(tokens, ["_", "1", "03", "2", "02", "3", "01", "_"]);
    assert_eq!(decode_tokens(&tokens, &cfg).unwrap(), "123");
    assert_eq!(encode_digits("12a", &cfg).unwrap_err().name(), "NonDigit");
    assert_eq!(encode_digits("", &cfg).unwrap_err().name(), "EmptyInput");
    assert_eq!(
        decode_tokens(&["_", "1 03", "_"], &cfg).unwrap_err().name(),
        "MalformedStream"
    );
    assert_eq!(
        decode_tokens(&["_", "1", "03", "2", "01", "_"], &cfg)
            .unwrap_err()
            .name(),
        "PlaceValueGap"
    );
}

#[test]
fn text_level_agrees_with_scanner() {
    let cfg = ScanConfig::default();
    let text = "Event occurs at 23:54 .";
    let encoded = encode_text(text, &cfg).unwrap();
    assert_eq!(decode_text(&encoded, &cfg).unwrap(), text);
    let spans = scan(text, &cfg).unwrap();
    assert_eq!(
        spans.iter().map(|s| s.raw.as_str()).collect::<Vec<_>>(),
        ["23", "54"]
    );
}

#[test]
fn shared_vector_file() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/tests/data/encode_vectors.tsv");
    let vectors = fs::read_to_string(path).unwrap();
    let cfg = ScanConfig::default();
    let mut n = 0;
    for (i, line) in vectors.lines().enumerate() {
        let (input, expected) = line.split_once('\t').unwrap();
        assert_eq!(
            encode_text(input, &cfg).unwrap(),
            expected,
            "vector {}",
            i + 1
        );
        n += 1;
    }
    assert_eq!(n, 1000);
}
