//! Published per-dataset p-values from four NLP comparisons, kept verbatim
//! (including entries printed as `0.0`) so analyses can be reproduced.

use alloc::string::String;

use crate::partial_conjunction::{ComparisonSet, Dependence};
use crate::report::{analyze, ReplicabilityReport};
use crate::{Error, Result};

/// A named comparison with its per-dataset p-values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub comparison: &'static str,
    pub dependence: Dependence,
    pub entries: &'static [(&'static str, f64)],
}

impl Fixture {
    pub fn by_name(name: &str) -> Result<&'static Fixture> {
        FIXTURES
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::UnknownFixture(String::from(name)))
    }

    pub fn comparison_set(&self) -> ComparisonSet {
        ComparisonSet::from_pairs(self.entries.iter().copied(), self.dependence)
            .expect("fixture data is valid")
    }

    /// Datasets whose p-value was printed as exactly zero.
    pub fn zero_entries(&self) -> impl Iterator<Item = &'static str> {
        self.entries.iter().filter(|e| e.1 == 0.0).map(|e| e.0)
    }
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "parsing_mate_spacy",
        comparison: "Mate vs SpaCy (multi-domain dependency parsing, UAS)",
        dependence: Dependence::Independent,
        entries: &[
            ("BC", 1e-4),
            ("BN", 1e-4),
            ("MZ", 0.0),
            ("NW", 0.0),
            ("PT", 2e-4),
            ("TC", 9e-4),
            ("WB", 0.0),
        ],
    },
    Fixture {
        name: "parsing_mate_redshift",
        comparison: "Mate vs Redshift (multi-domain dependency parsing, UAS)",
        dependence: Dependence::Independent,
        entries: &[
            ("BC", 0.0979),
            ("BN", 0.1662),
            ("MZ", 0.0046),
            ("NW", 0.0376),
            ("PT", 0.0969),
            ("TC", 0.0912),
            ("WB", 0.0823),
        ],
    },
    Fixture {
        name: "pos_mimick_chartag",
        comparison: "Mimick vs Char->Tag (multilingual POS tagging, accuracy)",
        dependence: Dependence::Independent,
        entries: &[
            ("Kazakh", 0.0944),
            ("Tamil", 0.0001),
            ("Latvian", 0.0623),
            ("Vietnamese", 0.0359),
            ("Hungarian", 1.12e-08),
            ("Turkish", 0.1461),
            ("Greek", 0.0104),
            ("Bulgarian", 0.1957),
            ("Swedish", 0.0939),
            ("Basque", 3.87e-10),
            ("Russian", 0.0081),
            ("Danish", 0.1016),
            ("Indonesian", 0.0008),
            ("Chinese", 0.0),
            ("Persian", 0.4450),
            ("Hebrew", 0.1025),
            ("Romanian", 0.2198),
            ("English", 0.0208),
            ("Arabic", 0.0731),
            ("Hindi", 0.0288),
            ("Italian", 0.4812),
            ("Spanish", 0.1176),
            ("Czech", 2.91e-05),
        ],
    },
    Fixture {
        name: "sentiment_ae_msda",
        comparison: "AE-SCL-SR vs MSDA (cross-domain sentiment, accuracy)",
        dependence: Dependence::DependentUnknown,
        entries: &[
            ("B→K", 0.0268),
            ("B→D", 0.0011),
            ("B→E", 0.0119),
            ("K→B", 0.0038),
            ("K→D", 1.9e-06),
            ("K→E", 0.018),
            ("D→B", 0.0186),
            ("D→K", 0.0014),
            ("D→E", 0.0011),
            ("E→B", 0.4823),
            ("E→K", 0.9507),
            ("E→D", 0.0003),
        ],
    },
    Fixture {
        name: "wordsim_w2v_glove",
        comparison: "word2vec CBOW vs GloVe (word similarity, Spearman)",
        dependence: Dependence::DependentUnknown,
        entries: &[
            ("WS353", 2e-5),
            ("WS353-SIM", 0.0),
            ("WS353-REL", 0.2123),
            ("MC-30", 0.0001),
            ("RG-65", 0.3053),
            ("RW", 0.2426),
            ("MEN", 0.0021),
            ("MTurk-287", 0.2076),
            ("MTurk-771", 0.0425),
            ("YP-130", 0.0),
            ("SimLex999", 0.0015),
            ("Verb-143", 0.0431),
        ],
    },
];

/// Runs [`analyze`] on an embedded fixture.
///
/// Entries printed as `0.0` are analyzed as exact zeros and flagged in the
/// report warnings.
pub fn reproduce_fixture(name: &str, alpha: f64) -> Result<ReplicabilityReport> {
    let fixture = Fixture::by_name(name)?;
    let mut report = analyze(&fixture.comparison_set(), alpha)?;
    report.comparison_name = String::from(fixture.comparison);
    Ok(report)
}
