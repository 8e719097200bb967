//! Known bounds on `K_q(n,r)` shipped with the tool, and the comparison flags
//! used by batch runs.
//!
//! Columns: `tabulated` is the semidefinite value (root of the objective)
//! printed for the instance, `reportedLower` the integer bound derived from
//! it, and `knownLower`/`knownUpper` the best bounds that were known before.
//! Source tags:
//!
//! * `improved`: the semidefinite bound beat the previous lower bound.
//! * `exact`: `K_q(n,r)` is known exactly.
//! * `tabulated`: value printed without an improvement; no separate lower bound recorded.
//! * `shaded`: instances outside the previously tabulated ranges; upper
//!   bound is the trivial `q^(n-r)` and no match/improve comparison is made.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use covbound_core::{BigInt, BigRational};
use serde::Deserialize;

use crate::sdpa::parse_decimal;
use crate::solverio::{ceil_root_minus, default_margin};

pub const SHIPPED: &str = include_str!("../data/fixtures.csv");

/// Small codes whose witness points are checked against the model.
pub const SHIPPED_CODES: [(&str, &str); 3] = [
    ("cube3", include_str!("../data/codes/cube3.code")),
    ("repetition3", include_str!("../data/codes/repetition3.code")),
    ("hamming7", include_str!("../data/codes/hamming7.code")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Improved,
    Exact,
    Tabulated,
    Shaded,
}

impl Source {
    pub fn name(&self) -> &'static str {
        match self {
            Source::Improved => "improved",
            Source::Exact => "exact",
            Source::Tabulated => "tabulated",
            Source::Shaded => "shaded",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "improved" => Some(Source::Improved),
            "exact" => Some(Source::Exact),
            "tabulated" => Some(Source::Tabulated),
            "shaded" => Some(Source::Shaded),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureRow {
    pub q: usize,
    pub n: usize,
    pub r: usize,
    /// Decimal text exactly as printed.
    pub tabulated: Option<String>,
    pub reported_lower: Option<u64>,
    pub known_lower: Option<u64>,
    pub known_upper: u64,
    pub source: Source,
}

impl FixtureRow {
    pub fn tabulated_value(&self) -> Option<BigRational> {
        self.tabulated.as_deref().and_then(parse_decimal)
    }

    pub fn tabulated_f64(&self) -> Option<f64> {
        self.tabulated.as_deref().and_then(|t| t.parse().ok())
    }

    /// Lower bound a computed bound is compared against: the previous lower
    /// bound if recorded, otherwise the rounded-up tabulated value.
    /// Shaded rows have none.
    pub fn reference_lower(&self) -> Option<u64> {
        if self.source == Source::Shaded {
            return None;
        }
        if self.known_lower.is_some() {
            return self.known_lower;
        }
        let v = self.tabulated_value()?;
        u64::try_from(ceil_root_minus(&v, 1, &default_margin())).ok()
    }
}

#[derive(Deserialize)]
struct RawRow {
    q: usize,
    n: usize,
    r: usize,
    tabulated: Option<String>,
    #[serde(rename = "reportedLower")]
    reported_lower: Option<u64>,
    #[serde(rename = "knownLower")]
    known_lower: Option<u64>,
    #[serde(rename = "knownUpper")]
    known_upper: u64,
    source: String,
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("row {row}: {message}")]
    Invalid { row: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Default)]
pub struct KnownBoundsTable {
    rows: BTreeMap<(usize, usize, usize), FixtureRow>,
}

impl KnownBoundsTable {
    pub fn shipped() -> Self {
        Self::parse(SHIPPED).expect("shipped fixtures are valid")
    }

    pub fn load(path: &Path) -> Result<Self, FixtureError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses the CSV and enforces `lower ≤ upper` and unique `(q,n,r)`.
    pub fn parse(text: &str) -> Result<Self, FixtureError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut rows = BTreeMap::new();
        for (i, raw) in reader.deserialize::<RawRow>().enumerate() {
            let raw = raw?;
            let row_no = i + 2;
            let invalid = |message: String| FixtureError::Invalid { row: row_no, message };
            let source = Source::parse(&raw.source).ok_or_else(|| invalid(format!("unknown source {:?}", raw.source)))?;
            let tabulated = raw.tabulated.filter(|t| !t.is_empty());
            if let Some(t) = &tabulated {
                if parse_decimal(t).is_none() {
                    return Err(invalid(format!("tabulated value {t:?} is not a decimal")));
                }
            }
            for (name, lower) in [("knownLower", raw.known_lower), ("reportedLower", raw.reported_lower)] {
                if let Some(l) = lower {
                    if l > raw.known_upper {
                        return Err(invalid(format!("{name} {l} exceeds knownUpper {}", raw.known_upper)));
                    }
                }
            }
            let row = FixtureRow {
                q: raw.q,
                n: raw.n,
                r: raw.r,
                tabulated,
                reported_lower: raw.reported_lower,
                known_lower: raw.known_lower,
                known_upper: raw.known_upper,
                source,
            };
            if rows.insert((row.q, row.n, row.r), row).is_some() {
                return Err(invalid(format!("duplicate instance ({}, {}, {})", raw.q, raw.n, raw.r)));
            }
        }
        Ok(KnownBoundsTable { rows })
    }

    pub fn get(&self, q: usize, n: usize, r: usize) -> Option<&FixtureRow> {
        self.rows.get(&(q, n, r))
    }

    pub fn rows(&self) -> impl Iterator<Item = &FixtureRow> {
        self.rows.values()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flag {
    Match,
    Improve,
    Below,
    /// Computed lower bound exceeds a known upper bound.
    Unsound,
}

impl Flag {
    pub fn name(&self) -> &'static str {
        match self {
            Flag::Match => "match",
            Flag::Improve => "improve",
            Flag::Below => "below",
            Flag::Unsound => "UNSOUND",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Compares a computed integer bound with a fixture row. `None` when there is
/// nothing to compare against.
pub fn classify(bound: &BigInt, row: &FixtureRow) -> Option<Flag> {
    if *bound > BigInt::from(row.known_upper) {
        return Some(Flag::Unsound);
    }
    let reference = BigInt::from(row.reference_lower()?);
    Some(match bound.cmp(&reference) {
        std::cmp::Ordering::Equal => Flag::Match,
        std::cmp::Ordering::Greater => Flag::Improve,
        std::cmp::Ordering::Less => Flag::Below,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_table_is_consistent() {
        let table = KnownBoundsTable::shipped();
        assert_eq!(table.len(), 135);
        let row = table.get(2, 13, 1).unwrap();
        assert_eq!(row.source, Source::Improved);
        assert_eq!(row.reported_lower, Some(607));
        for row in table.rows() {
            assert!(row.known_lower.unwrap_or(0) <= row.known_upper);
            assert!(row.tabulated_value().is_some(), "{row:?}");
        }
    }

    #[test]
    fn reported_bounds_follow_from_tabulated_values() {
        // The printed integer is the rounded-up printed value.
        for row in KnownBoundsTable::shipped().rows() {
            if let Some(reported) = row.reported_lower {
                let v = row.tabulated_value().unwrap();
                assert_eq!(ceil_root_minus(&v, 1, &default_margin()), BigInt::from(reported), "{row:?}");
            }
        }
    }

    #[test]
    fn rejects_duplicates_and_inverted_bounds() {
        let head = "q,n,r,tabulated,reportedLower,knownLower,knownUpper,source\n";
        let dup = format!("{head}2,4,1,3.9999,,4,4,exact\n2,4,1,3.9999,,4,4,exact\n");
        assert!(KnownBoundsTable::parse(&dup).is_err());
        let inverted = format!("{head}2,4,1,3.9999,,5,4,exact\n");
        assert!(KnownBoundsTable::parse(&inverted).is_err());
        let unknown = format!("{head}2,4,1,3.9999,,4,4,elsewhere\n");
        assert!(KnownBoundsTable::parse(&unknown).is_err());
    }

    #[test]
    fn flags() {
        let table = KnownBoundsTable::shipped();
        let row = table.get(2, 12, 3).unwrap();
        assert_eq!(classify(&BigInt::from(19), row), Some(Flag::Improve));
        assert_eq!(classify(&BigInt::from(18), row), Some(Flag::Match));
        assert_eq!(classify(&BigInt::from(17), row), Some(Flag::Below));
        assert_eq!(classify(&BigInt::from(29), row), Some(Flag::Unsound));
        let tab = table.get(3, 6, 1).unwrap();
        assert_eq!(classify(&BigInt::from(61), tab), Some(Flag::Match));
        let shaded = table.get(3, 15, 1).unwrap();
        assert_eq!(classify(&BigInt::from(466050), shaded), None);
        assert_eq!(classify(&BigInt::from(10_000_000), shaded), Some(Flag::Unsound));
    }
}
