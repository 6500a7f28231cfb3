//! Singularity classes of branch curves and the count profiles built from them.
//!
//! A branch curve of an almost generic cover has only three kinds of singular
//! points. Each kind is indexed by `k`:
//!
//! | family    | curve type  | local monodromy | δ      | (virtual cusps, virtual nodes) |
//! |-----------|-------------|-----------------|--------|--------------------------------|
//! | `S2`      | `A_{2k-1}`  | `Z2 x Z2`       | `k`    | `(0, k)`                       |
//! | `S3Odd`   | `A_{6k+2}`  | `S3`            | `3k+1` | `(1, 3k)`                      |
//! | `S3Even`  | `A_{6k-1}`  | `S3`            | `3k`   | `(0, 3k)`                      |
//!
//! A [`SingularProfile`] records how many points of each class the curve has,
//! together with the half-degree `d` of the curve and the degree `N` of the cover.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::big_int;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProfileError {
    #[error("class index k={k} is out of range for family {family}")]
    IndexOutOfRange { family: Family, k: u32 },
    #[error("malformed profile JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Points with two commuting transpositions as local monodromy.
    S2,
    /// Points with `S3` monodromy and odd normal-form index `n = 2k+1`.
    S3Odd,
    /// Points with `S3` monodromy and even normal-form index `n = 2k`.
    S3Even,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::S3Odd, Family::S3Even, Family::S2];

    pub fn min_index(self) -> u32 {
        match self {
            Family::S3Odd => 0,
            Family::S2 | Family::S3Even => 1,
        }
    }

    /// Smallest cover degree whose symmetric group contains the local monodromy group.
    pub fn min_cover_degree(self) -> u64 {
        match self {
            Family::S2 => 4,
            Family::S3Odd | Family::S3Even => 3,
        }
    }

    pub fn json_key(self) -> &'static str {
        match self {
            Family::S2 => "s2",
            Family::S3Odd => "s3_odd",
            Family::S3Even => "s3_even",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::S2 => "S2",
            Family::S3Odd => "S3_odd",
            Family::S3Even => "S3_even",
        })
    }
}

/// One singular-point type of the branch curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SingularityClass {
    family: Family,
    k: u32,
}

impl SingularityClass {
    pub fn new(family: Family, k: u32) -> Result<Self, ProfileError> {
        if k < family.min_index() {
            return Err(ProfileError::IndexOutOfRange { family, k });
        }
        Ok(Self { family, k })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Normal-form index `n` of the local cover (`n = 2k+1` or `n = 2k`; `k` for `S2`).
    pub fn normal_form_index(&self) -> u64 {
        let k = u64::from(self.k);
        match self.family {
            Family::S2 => k,
            Family::S3Odd => 2 * k + 1,
            Family::S3Even => 2 * k,
        }
    }

    /// Index `m` of the underlying curve singularity `A_m`.
    pub fn curve_index(&self) -> u64 {
        let k = u64::from(self.k);
        match self.family {
            Family::S2 => 2 * k - 1,
            Family::S3Odd => 6 * k + 2,
            Family::S3Even => 6 * k - 1,
        }
    }

    pub fn delta_invariant(&self) -> u64 {
        let k = u64::from(self.k);
        match self.family {
            Family::S2 => k,
            Family::S3Odd => 3 * k + 1,
            Family::S3Even => 3 * k,
        }
    }

    /// `(virtual cusps, virtual nodes)` the point contributes to the class formula.
    pub fn virtual_counts(&self) -> (u64, u64) {
        let k = u64::from(self.k);
        match self.family {
            Family::S2 => (0, k),
            Family::S3Odd => (1, 3 * k),
            Family::S3Even => (0, 3 * k),
        }
    }
}

impl fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.k)
    }
}

pub fn make_class(family: Family, k: u32) -> Result<SingularityClass, ProfileError> {
    SingularityClass::new(family, k)
}

/// Pseudo-cusps, pseudo-nodes and superabundance of a profile.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Aggregates {
    #[serde(with = "big_int")]
    pub c_pseudo: BigInt,
    #[serde(with = "big_int")]
    pub n_pseudo: BigInt,
    #[serde(with = "big_int")]
    pub s_super: BigInt,
}

impl Aggregates {
    /// Σδ over all singular points, equal to `c + n + s`.
    pub fn total_delta(&self) -> BigInt {
        &self.c_pseudo + &self.n_pseudo + &self.s_super
    }
}

impl Add for Aggregates {
    type Output = Aggregates;

    fn add(self, rhs: Aggregates) -> Aggregates {
        Aggregates {
            c_pseudo: self.c_pseudo + rhs.c_pseudo,
            n_pseudo: self.n_pseudo + rhs.n_pseudo,
            s_super: self.s_super + rhs.s_super,
        }
    }
}

/// Counts of singular points of a branch curve of degree `2d` of a degree `N` cover.
///
/// Counts are keyed by the class index `k` and kept sorted; zero counts are
/// never stored, so two profiles with the same nonzero counts compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SingularProfile {
    pub d: u64,
    #[serde(rename = "N")]
    pub cover_degree: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    s3_odd: BTreeMap<u32, u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    s3_even: BTreeMap<u32, u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    s2: BTreeMap<u32, u64>,
}

impl SingularProfile {
    /// Profile of a smooth branch curve.
    pub fn new(d: u64, cover_degree: u64) -> Self {
        Self {
            d,
            cover_degree,
            s3_odd: BTreeMap::new(),
            s3_even: BTreeMap::new(),
            s2: BTreeMap::new(),
        }
    }

    /// Sets the count of `family` points with index `k` (a zero count removes the entry).
    ///
    /// The index is not range-checked here; use [`validate_profile`] for that.
    pub fn with(mut self, family: Family, k: u32, count: u64) -> Self {
        self.set(family, k, count);
        self
    }

    pub fn set(&mut self, family: Family, k: u32, count: u64) {
        let map = self.map_mut(family);
        if count == 0 {
            map.remove(&k);
        } else {
            map.insert(k, count);
        }
    }

    pub fn count(&self, family: Family, k: u32) -> u64 {
        self.map(family).get(&k).copied().unwrap_or(0)
    }

    /// `n_k` in the usual notation.
    pub fn n(&self, k: u32) -> u64 {
        self.count(Family::S3Odd, k)
    }

    /// `m_k` in the usual notation.
    pub fn m(&self, k: u32) -> u64 {
        self.count(Family::S3Even, k)
    }

    /// `t_k` in the usual notation.
    pub fn t(&self, k: u32) -> u64 {
        self.count(Family::S2, k)
    }

    pub fn counts(&self, family: Family) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.map(family).iter().map(|(&k, &c)| (k, c))
    }

    /// Nonzero `(family, k, count)` triples in deterministic order.
    pub fn entries(&self) -> impl Iterator<Item = (Family, u32, u64)> + '_ {
        Family::ALL
            .into_iter()
            .flat_map(move |f| self.counts(f).map(move |(k, c)| (f, k, c)))
    }

    pub fn is_smooth(&self) -> bool {
        self.s3_odd.is_empty() && self.s3_even.is_empty() && self.s2.is_empty()
    }

    /// Number of singular points of the branch curve.
    pub fn point_count(&self) -> BigInt {
        self.entries().map(|(_, _, c)| BigInt::from(c)).sum()
    }

    /// Disjoint union of the singular points of two profiles, keeping `self`'s `d` and `N`.
    pub fn merge(&self, other: &SingularProfile) -> SingularProfile {
        let mut out = self.clone();
        for (f, k, c) in other.entries() {
            let sum = out.count(f, k) + c;
            out.set(f, k, sum);
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self, ProfileError> {
        let mut p: SingularProfile =
            serde_json::from_str(text).map_err(|e| ProfileError::Json(e.to_string()))?;
        for f in Family::ALL {
            p.map_mut(f).retain(|_, c| *c != 0);
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serialization is infallible")
    }

    fn map(&self, family: Family) -> &BTreeMap<u32, u64> {
        match family {
            Family::S2 => &self.s2,
            Family::S3Odd => &self.s3_odd,
            Family::S3Even => &self.s3_even,
        }
    }

    fn map_mut(&mut self, family: Family) -> &mut BTreeMap<u32, u64> {
        match family {
            Family::S2 => &mut self.s2,
            Family::S3Odd => &mut self.s3_odd,
            Family::S3Even => &mut self.s3_even,
        }
    }
}

impl fmt::Display for SingularProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{d={}, N={}", self.d, self.cover_degree)?;
        for (fam, k, c) in self.entries() {
            let letter = match fam {
                Family::S3Odd => 'n',
                Family::S3Even => 'm',
                Family::S2 => 't',
            };
            write!(f, ", {letter}_{k}={c}")?;
        }
        f.write_str("}")
    }
}

pub fn aggregates(p: &SingularProfile) -> Aggregates {
    let mut agg = Aggregates::default();
    for (k, c) in p.counts(Family::S3Odd) {
        let (k, c) = (BigInt::from(k), BigInt::from(c));
        agg.c_pseudo += (2 * &k + 1) * &c;
        agg.s_super += k * c;
    }
    for (k, c) in p.counts(Family::S3Even) {
        let (k, c) = (BigInt::from(k), BigInt::from(c));
        agg.c_pseudo += 2 * &k * &c;
        agg.s_super += k * c;
    }
    for (k, c) in p.counts(Family::S2) {
        agg.n_pseudo += BigInt::from(k) * BigInt::from(c);
    }
    agg
}

/// A failed structural invariant of a profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DegreeNotPositive,
    CoverDegreeBelowTwo,
    IndexOutOfRange { family: Family, k: u32 },
    S3RequiresN3,
    S2RequiresN4,
}

impl Violation {
    pub fn name(&self) -> &'static str {
        match self {
            Violation::DegreeNotPositive => "d-positive",
            Violation::CoverDegreeBelowTwo => "N≥2",
            Violation::IndexOutOfRange { .. } => "class-index-range",
            Violation::S3RequiresN3 => "S3-requires-N≥3",
            Violation::S2RequiresN4 => "S2-requires-N≥4",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IndexOutOfRange { family, k } => {
                write!(f, "{} ({family} with k={k})", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

pub fn validate_profile(p: &SingularProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    if p.d == 0 {
        out.push(Violation::DegreeNotPositive);
    }
    if p.cover_degree < 2 {
        out.push(Violation::CoverDegreeBelowTwo);
    }
    for (family, k, _) in p.entries() {
        if k < family.min_index() {
            out.push(Violation::IndexOutOfRange { family, k });
        }
    }
    let has = |f: Family| p.counts(f).next().is_some();
    if (has(Family::S3Odd) || has(Family::S3Even)) && p.cover_degree < 3 {
        out.push(Violation::S3RequiresN3);
    }
    if has(Family::S2) && p.cover_degree < 4 {
        out.push(Violation::S2RequiresN4);
    }
    out
}

pub fn is_valid(p: &SingularProfile) -> bool {
    validate_profile(p).is_empty()
}
