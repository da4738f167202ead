//! Sentence-level exact-match evaluation and related reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pds::{PdsConfig, PdsError};
use crate::scanner::find_groups;

/// Classes left out of the default macro average because their reference
/// data is unreliable.
pub const UNRELIABLE_CLASSES: [&str; 4] = ["ELECTRONIC", "ADDRESS", "FRACTION", "TELEPHONE"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("nothing to evaluate")]
    EmptyEvaluation,
    #[error("class {0:?} has no accuracy to average")]
    MissingClass(String),
    #[error("the list of classes to average is empty")]
    EmptyClassList,
    #[error("item {0} carries no magnitude")]
    MissingMagnitude(usize),
    #[error(transparent)]
    Pds(#[from] PdsError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EvalItem {
    pub gold: String,
    pub predicted: String,
    pub semiotic_class: Option<String>,
    /// Whether the class was judged correct; taken from an annotation sidecar.
    pub class_match: Option<bool>,
    /// Digit count of the number that governs the sentence.
    pub magnitude: Option<u32>,
}

impl EvalItem {
    pub fn new(gold: impl Into<String>, predicted: impl Into<String>) -> Self {
        Self {
            gold: gold.into(),
            predicted: predicted.into(),
            ..Default::default()
        }
    }

    pub fn is_match(&self) -> bool {
        normalize_whitespace(&self.gold) == normalize_whitespace(&self.predicted)
    }
}

/// One line of the optional JSONL annotation sidecar.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Annotation {
    #[serde(default, alias = "semiotic_class")]
    pub class: Option<String>,
    #[serde(default)]
    pub class_match: Option<bool>,
    #[serde(default)]
    pub magnitude: Option<u32>,
}

impl Annotation {
    pub fn apply(self, item: &mut EvalItem) {
        item.semiotic_class = self.class.or(item.semiotic_class.take());
        item.class_match = self.class_match.or(item.class_match);
        item.magnitude = self.magnitude.or(item.magnitude);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorBucket {
    Correct,
    /// Wrong class, right normalization.
    Ignorable,
    /// Right class, wrong normalization.
    Critical,
    /// Wrong class and wrong normalization.
    Fatal,
}

impl fmt::Display for ErrorBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorBucket::Correct => "CORRECT",
            ErrorBucket::Ignorable => "IGNORABLE",
            ErrorBucket::Critical => "CRITICAL",
            ErrorBucket::Fatal => "FATAL",
        })
    }
}

pub fn classify_error(class_match: bool, norm_match: bool) -> ErrorBucket {
    match (class_match, norm_match) {
        (true, true) => ErrorBucket::Correct,
        (false, true) => ErrorBucket::Ignorable,
        (true, false) => ErrorBucket::Critical,
        (false, false) => ErrorBucket::Fatal,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MagnitudeBucket {
    #[serde(rename = "lt_1e6")]
    BelowMillion,
    #[serde(rename = "1e6_to_1e9")]
    Millions,
    #[serde(rename = "ge_1e9")]
    BillionsAndUp,
}

impl MagnitudeBucket {
    /// Bucket of a number with `digits` decimal digits.
    pub fn from_digit_count(digits: u32) -> Self {
        match digits {
            0..=6 => MagnitudeBucket::BelowMillion,
            7..=9 => MagnitudeBucket::Millions,
            _ => MagnitudeBucket::BillionsAndUp,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MagnitudeBucket::BelowMillion => "< 10^6",
            MagnitudeBucket::Millions => "[10^6, 10^9)",
            MagnitudeBucket::BillionsAndUp => ">= 10^9",
        }
    }
}

/// Trim and collapse internal whitespace runs to single spaces.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn exact_match_accuracy(items: &[EvalItem]) -> Result<f64, EvalError> {
    if items.is_empty() {
        return Err(EvalError::EmptyEvaluation);
    }
    let matches = items.iter().filter(|i| i.is_match()).count();
    Ok(matches as f64 / items.len() as f64)
}

/// Unweighted mean of `per_class` over `include`.
pub fn macro_average<S: AsRef<str>>(
    per_class: &BTreeMap<String, f64>,
    include: &[S],
) -> Result<f64, EvalError> {
    if include.is_empty() {
        return Err(EvalError::EmptyClassList);
    }
    let mut sum = 0.0;
    for class in include {
        let class = class.as_ref();
        sum += per_class
            .get(class)
            .ok_or_else(|| EvalError::MissingClass(class.to_string()))?;
    }
    Ok(sum / include.len() as f64)
}

pub fn magnitude_bucket_report(
    items: &[EvalItem],
) -> Result<BTreeMap<MagnitudeBucket, f64>, EvalError> {
    let mut tally: BTreeMap<MagnitudeBucket, (usize, usize)> = BTreeMap::new();
    for (idx, item) in items.iter().enumerate() {
        let digits = item.magnitude.ok_or(EvalError::MissingMagnitude(idx))?;
        let entry = tally
            .entry(MagnitudeBucket::from_digit_count(digits))
            .or_default();
        entry.0 += usize::from(item.is_match());
        entry.1 += 1;
    }
    Ok(tally
        .into_iter()
        .map(|(b, (hit, n))| (b, hit as f64 / n as f64))
        .collect())
}

/// Digit count of the longest digit run in `source` (by value, leading
/// zeros ignored; ties go to the larger value). `None` without digits.
pub fn sentence_magnitude(source: &str) -> Option<u32> {
    source
        .split(|c: char| !c.is_ascii_digit())
        .filter(|run| !run.is_empty())
        .map(|run| {
            let trimmed = run.trim_start_matches('0');
            if trimmed.is_empty() {
                "0"
            } else {
                trimmed
            }
        })
        .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .map(|run| run.len() as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusMode {
    Raw,
    Pds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Census {
    pub distinct_number_sequences: usize,
    pub distinct_pairs: usize,
    pub token_type_count: usize,
}

/// Count how many distinct things a model has to learn about numbers.
///
/// Raw mode counts distinct digit-run strings. PDS mode decodes every group
/// and counts distinct numbers, distinct (facevalue, placevalue) pairs and
/// distinct token texts (boundary, facevalues, placevalues).
pub fn vocabulary_census<S: AsRef<str>>(
    lines: impl IntoIterator<Item = S>,
    mode: CensusMode,
    config: &PdsConfig,
) -> Result<Census, EvalError> {
    let mut numbers: BTreeSet<String> = BTreeSet::new();
    let mut pairs: BTreeSet<(u8, usize)> = BTreeSet::new();
    let mut token_types: BTreeSet<String> = BTreeSet::new();
    for line in lines {
        let line = line.as_ref();
        match mode {
            CensusMode::Raw => {
                for run in line
                    .split(|c: char| !c.is_ascii_digit())
                    .filter(|r| !r.is_empty())
                {
                    if !numbers.contains(run) {
                        numbers.insert(run.to_string());
                    }
                }
            }
            CensusMode::Pds => {
                for group in find_groups(line, config)? {
                    let len = group.digits.len();
                    token_types.insert(config.boundary().to_string());
                    for (idx, face) in group.digits.digit_values().enumerate() {
                        let place = len - idx;
                        if pairs.insert((face, place)) {
                            token_types.insert(face.to_string());
                            token_types.insert(config.render_placevalue(place));
                        }
                    }
                    numbers.insert(group.digits.into_string());
                }
            }
        }
    }
    Ok(Census {
        distinct_number_sequences: numbers.len(),
        distinct_pairs: pairs.len(),
        token_type_count: token_types.len(),
    })
}

/// Which classes enter the macro average.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ClassSelection {
    /// Every class present, minus [`UNRELIABLE_CLASSES`].
    #[default]
    Default,
    /// Exactly these; a missing one is an error.
    Explicit(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub n_items: usize,
    pub overall_accuracy: f64,
    pub sentence_error_rate: f64,
    pub per_class: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub macro_average: Option<f64>,
    pub macro_classes: Vec<String>,
    pub magnitude_buckets: BTreeMap<MagnitudeBucket, f64>,
    pub error_counts: BTreeMap<ErrorBucket, usize>,
}

/// Aggregate every metric over `items`.
///
/// Items without a class label are left out of the per-class table; with no
/// labels at all the macro average is absent rather than zero. Magnitude
/// buckets cover the items that carry a magnitude. An item without a class
/// judgment is bucketed as if its class were right.
pub fn build_report(items: &[EvalItem], classes: &ClassSelection) -> Result<EvalReport, EvalError> {
    let overall = exact_match_accuracy(items)?;

    let mut class_tally: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for item in items {
        if let Some(class) = &item.semiotic_class {
            let entry = class_tally.entry(class.clone()).or_default();
            entry.0 += usize::from(item.is_match());
            entry.1 += 1;
        }
    }
    let per_class: BTreeMap<String, f64> = class_tally
        .into_iter()
        .map(|(c, (hit, n))| (c, hit as f64 / n as f64))
        .collect();

    let macro_classes: Vec<String> = match classes {
        ClassSelection::Explicit(list) => list.clone(),
        ClassSelection::Default => per_class
            .keys()
            .filter(|c| !UNRELIABLE_CLASSES.contains(&c.as_str()))
            .cloned()
            .collect(),
    };
    let macro_avg = match classes {
        ClassSelection::Default if macro_classes.is_empty() => None,
        _ => Some(macro_average(&per_class, &macro_classes)?),
    };

    let with_magnitude: Vec<EvalItem> = items
        .iter()
        .filter(|i| i.magnitude.is_some())
        .cloned()
        .collect();
    let magnitude_buckets = magnitude_bucket_report(&with_magnitude)?;

    let mut error_counts = BTreeMap::new();
    for item in items {
        let bucket = classify_error(item.class_match.unwrap_or(true), item.is_match());
        *error_counts.entry(bucket).or_insert(0) += 1;
    }

    Ok(EvalReport {
        n_items: items.len(),
        overall_accuracy: overall,
        sentence_error_rate: 1.0 - overall,
        per_class,
        macro_average: macro_avg,
        macro_classes,
        magnitude_buckets,
        error_counts,
    })
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "items               {}", self.n_items)?;
        writeln!(f, "exact match         {:.4}", self.overall_accuracy)?;
        writeln!(f, "sentence error rate {:.4}", self.sentence_error_rate)?;
        if !self.per_class.is_empty() {
            writeln!(f)?;
            writeln!(f, "{:<20} accuracy", "class")?;
            for (class, acc) in &self.per_class {
                let marker = if self.macro_classes.contains(class) {
                    ""
                } else {
                    " (excluded)"
                };
                writeln!(f, "{class:<20} {acc:.4}{marker}")?;
            }
        }
        if let Some(m) = self.macro_average {
            writeln!(f, "{:<20} {m:.4}", "macro average")?;
        }
        if !self.magnitude_buckets.is_empty() {
            writeln!(f)?;
            writeln!(f, "{:<20} accuracy", "magnitude")?;
            for (bucket, acc) in &self.magnitude_buckets {
                writeln!(f, "{:<20} {acc:.4}", bucket.label())?;
            }
        }
        writeln!(f)?;
        for (bucket, n) in &self.error_counts {
            writeln!(f, "{:<20} {n}", bucket.to_string())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(gold: &str, pred: &str) -> EvalItem {
        EvalItem::new(gold, pred)
    }

    fn labelled(class: &str, matched: bool) -> EvalItem {
        EvalItem {
            semiotic_class: Some(class.into()),
            ..item("x", if matched { "x" } else { "y" })
        }
    }

    #[test]
    fn exact_match() {
        let all = vec![item("a", "a"); 4];
        assert_eq!(exact_match_accuracy(&all).unwrap(), 1.0);
        let mut one_off = all.clone();
        one_off[2].predicted = "b".into();
        assert_eq!(exact_match_accuracy(&one_off).unwrap(), 0.75);
        assert!(item("a  b", "a b").is_match());
        assert!(item(" a\tb\n", "a b").is_match());
        assert!(!item("A b", "a b").is_match());
        assert_eq!(exact_match_accuracy(&[]), Err(EvalError::EmptyEvaluation));
    }

    #[test]
    fn macro_averages() {
        let per: BTreeMap<String, f64> = [("A".to_string(), 1.0), ("B".to_string(), 0.5)].into();
        assert_eq!(macro_average(&per, &["A", "B"]).unwrap(), 0.75);
        assert_eq!(macro_average(&per, &["B", "A"]).unwrap(), 0.75);
        assert_eq!(
            macro_average::<&str>(&per, &[]),
            Err(EvalError::EmptyClassList)
        );
        assert_eq!(
            macro_average(&per, &["C"]),
            Err(EvalError::MissingClass("C".into()))
        );
    }

    #[test]
    fn error_taxonomy() {
        assert_eq!(classify_error(false, false), ErrorBucket::Fatal);
        assert_eq!(classify_error(true, false), ErrorBucket::Critical);
        assert_eq!(classify_error(false, true), ErrorBucket::Ignorable);
        assert_eq!(classify_error(true, true), ErrorBucket::Correct);
    }

    #[test]
    fn magnitude_buckets() {
        let mut items: Vec<EvalItem> = (0..10)
            .map(|i| EvalItem {
                magnitude: Some(10),
                ..item("g", if i == 0 { "g" } else { "p" })
            })
            .collect();
        let report = magnitude_bucket_report(&items).unwrap();
        assert_eq!(report.len(), 1);
        assert!((report[&MagnitudeBucket::BillionsAndUp] - 0.10).abs() < 1e-12);

        items.push(item("g", "g"));
        assert_eq!(
            magnitude_bucket_report(&items),
            Err(EvalError::MissingMagnitude(10))
        );

        assert_eq!(
            MagnitudeBucket::from_digit_count(7),
            MagnitudeBucket::Millions
        );
        assert_eq!(
            MagnitudeBucket::from_digit_count(6),
            MagnitudeBucket::BelowMillion
        );
        assert_eq!(
            MagnitudeBucket::from_digit_count(9),
            MagnitudeBucket::Millions
        );
    }

    #[test]
    fn sentence_magnitudes() {
        assert_eq!(sentence_magnitude("at 1234567 and 12"), Some(7));
        assert_eq!(sentence_magnitude("code 000012 vs 99"), Some(2));
        assert_eq!(sentence_magnitude("0"), Some(1));
        assert_eq!(sentence_magnitude("none"), None);
    }

    #[test]
    fn census_modes() {
        let cfg = PdsConfig::default();
        let raw = vocabulary_census(["a 1 b", "a 1 b"], CensusMode::Raw, &cfg).unwrap();
        assert_eq!(raw.distinct_number_sequences, 1);
        let empty = vocabulary_census(Vec::<String>::new(), CensusMode::Pds, &cfg).unwrap();
        assert_eq!(empty, Census::default());
        let pds = vocabulary_census(
            ["x _ 1 03 2 02 3 01 _", "_ 1 01 _ y _ 3 01 _"],
            CensusMode::Pds,
            &cfg,
        )
        .unwrap();
        assert_eq!(pds.distinct_number_sequences, 3);
        assert_eq!(pds.distinct_pairs, 4);
        // _ 1 2 3 03 02 01
        assert_eq!(pds.token_type_count, 7);
        assert!(vocabulary_census(["_ 1 02 _"], CensusMode::Pds, &cfg).is_err());
    }

    #[test]
    fn report_aggregates() {
        let items = vec![
            labelled("A", true),
            labelled("A", true),
            labelled("B", true),
            labelled("B", false),
        ];
        let report = build_report(&items, &ClassSelection::Default).unwrap();
        assert_eq!(report.per_class["A"], 1.0);
        assert_eq!(report.per_class["B"], 0.5);
        assert_eq!(report.macro_average, Some(0.75));
        assert_eq!(report.overall_accuracy, 0.75);
        assert!(report.magnitude_buckets.is_empty());

        let single = build_report(&[item("a", "a")], &ClassSelection::Default).unwrap();
        assert_eq!(single.overall_accuracy, 1.0);
        assert_eq!(
            single.error_counts,
            BTreeMap::from([(ErrorBucket::Correct, 1)])
        );
        assert!(single.per_class.is_empty());
        assert_eq!(single.macro_average, None);
        let json = serde_json::to_value(&single).unwrap();
        assert!(json.get("macro_average").is_none());
        assert_eq!(json["error_counts"]["CORRECT"], 1);
    }

    #[test]
    fn report_excludes_unreliable_classes_by_default() {
        let items = vec![labelled("CARDINAL", true), labelled("TELEPHONE", false)];
        let report = build_report(&items, &ClassSelection::Default).unwrap();
        assert_eq!(report.macro_classes, ["CARDINAL"]);
        assert_eq!(report.macro_average, Some(1.0));
        let explicit = ClassSelection::Explicit(vec!["CARDINAL".into(), "DATE".into()]);
        assert_eq!(
            build_report(&items, &explicit),
            Err(EvalError::MissingClass("DATE".into()))
        );
    }

    #[test]
    fn annotations_drive_error_buckets() {
        let mut items = vec![
            item("a", "a"),
            item("a", "b"),
            item("a", "a"),
            item("a", "b"),
        ];
        for (it, class_match) in items.iter_mut().zip([true, true, false, false]) {
            Annotation {
                class_match: Some(class_match),
                ..Default::default()
            }
            .apply(it);
        }
        let report = build_report(&items, &ClassSelection::Default).unwrap();
        for bucket in [
            ErrorBucket::Correct,
            ErrorBucket::Critical,
            ErrorBucket::Ignorable,
            ErrorBucket::Fatal,
        ] {
            assert_eq!(report.error_counts[&bucket], 1, "{bucket}");
        }
        let parsed: Annotation =
            serde_json::from_str(r#"{"class":"TIME","class_match":false,"magnitude":4}"#).unwrap();
        assert_eq!(parsed.class.as_deref(), Some("TIME"));
        assert_eq!(parsed.magnitude, Some(4));
    }

    #[test]
    fn report_renders_as_table() {
        let items = vec![
            EvalItem {
                magnitude: Some(3),
                ..labelled("CARDINAL", true)
            },
            EvalItem {
                magnitude: Some(12),
                ..labelled("CARDINAL", false)
            },
        ];
        let text = build_report(&items, &ClassSelection::Default)
            .unwrap()
            .to_string();
        assert!(text.contains("exact match         0.5000"));
        assert!(text.contains(">= 10^9"));
        assert!(text.contains("CRITICAL"));
    }
}
