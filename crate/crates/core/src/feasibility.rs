//! Necessary conditions on a profile and enumeration of the profiles passing them.
//!
//! Passing every check does not mean a cover with that profile exists; the
//! checks are necessary conditions only.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::{
    chi_structure, dual_degree, genus_branch, hodge_bound, ram_self_intersection,
};
use crate::profile::{aggregates, validate_profile, Family, SingularProfile, SingularityClass};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeasibilityError {
    #[error("search visits more than {limit} nodes")]
    BudgetExceeded { limit: u64 },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub checks: Vec<Check>,
    pub admissible: bool,
}

impl ConstraintReport {
    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.passed)
    }

    pub fn failed_names(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }
}

pub fn check_constraints(p: &SingularProfile) -> ConstraintReport {
    let agg = aggregates(p);
    let mut checks = Vec::with_capacity(9);
    let mut add = |name: &str, passed: bool, detail: String| {
        checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        })
    };

    let g = genus_branch(p);
    add("genus_nonneg", !g.is_negative(), format!("g(B) = {g}"));
    let dual = dual_degree(p);
    add(
        "dual_degree_positive",
        dual.is_positive(),
        format!("class = {dual}"),
    );
    let r2 = ram_self_intersection(p);
    add("R2_positive", r2.is_positive(), format!("R^2 = {r2}"));
    let c_mod = agg.c_pseudo.mod_floor(&BigInt::from(3));
    add(
        "cusp_divisibility",
        c_mod.is_zero(),
        format!("c = {} ≡ {c_mod} mod 3", agg.c_pseudo),
    );
    let n_mod = agg.n_pseudo.mod_floor(&BigInt::from(4));
    add(
        "node_divisibility",
        n_mod.is_zero(),
        format!("n = {} ≡ {n_mod} mod 4", agg.n_pseudo),
    );
    let chi = chi_structure(p);
    add(
        "chi_integral",
        chi.is_integer(),
        format!("chi = {}", crate::json::ratio_text(&chi)),
    );
    match hodge_bound(p) {
        Ok(h) => add(
            "hodge_inequality",
            h.satisfied,
            format!(
                "N = {} vs bound {}{}",
                p.cover_degree,
                crate::json::ratio_text(&h.bound),
                if h.equality { " (equality)" } else { "" }
            ),
        ),
        Err(e) => add("hodge_inequality", false, e.to_string()),
    }
    let rule = crate::invariants::pseudo_node_rule(p);
    add(
        "pseudo_node_rule",
        rule,
        format!("N = {}, n = {}", p.cover_degree, agg.n_pseudo),
    );
    let violations = validate_profile(p);
    let detail = if violations.is_empty() {
        "ok".to_string()
    } else {
        violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    };
    add("structural_validity", violations.is_empty(), detail);

    let admissible = checks.iter().all(|c| c.passed);
    ConstraintReport { checks, admissible }
}

/// Per-class count bound of the search box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountCap {
    /// Each count ranges over `0..=cap`.
    PerClass(u64),
    /// Each count is bounded only by the genus budget `(2d-1)(d-1)`.
    DeltaBudget,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationQuery {
    pub d: u64,
    /// `None` searches every `N` in `2..=4d^2`.
    pub cover_degree: Option<u64>,
    pub k_max: u32,
    pub cap: CountCap,
    /// Largest number of search nodes before giving up.
    pub node_limit: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl EnumerationQuery {
    pub fn new(d: u64, cover_degree: Option<u64>, k_max: u32, cap: CountCap) -> Self {
        Self {
            d,
            cover_degree,
            k_max,
            cap,
            node_limit: 50_000_000,
            jobs: None,
        }
    }

    fn validate(&self) -> Result<(), FeasibilityError> {
        if self.d == 0 {
            return Err(FeasibilityError::InvalidQuery("d must be positive".into()));
        }
        if matches!(self.cover_degree, Some(n) if n < 2) {
            return Err(FeasibilityError::InvalidQuery(
                "N must be at least 2".into(),
            ));
        }
        if self.cap == CountCap::PerClass(0) {
            return Err(FeasibilityError::InvalidQuery(
                "count cap must be positive".into(),
            ));
        }
        if self.jobs == Some(0) {
            return Err(FeasibilityError::InvalidQuery(
                "jobs must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Classes with index at most `k_max`, in the canonical order.
    pub fn slots(&self) -> Vec<SingularityClass> {
        Family::ALL
            .into_iter()
            .flat_map(|f| {
                (f.min_index()..=self.k_max)
                    .map(move |k| SingularityClass::new(f, k).expect("in range"))
            })
            .collect()
    }

    /// `(2d-1)(d-1)`: the largest total δ of an irreducible curve of degree `2d`.
    pub fn delta_budget(&self) -> u64 {
        (2 * self.d - 1) * (self.d - 1)
    }

    fn cover_degrees(&self) -> Vec<u64> {
        match self.cover_degree {
            Some(n) => vec![n],
            None => (2..=4 * self.d * self.d).collect(),
        }
    }

    fn slot_max(&self, cls: &SingularityClass) -> u64 {
        let by_budget = self.delta_budget() / cls.delta_invariant();
        match self.cap {
            CountCap::PerClass(c) => c,
            CountCap::DeltaBudget => by_budget,
        }
    }
}

fn run_in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

fn build_profile(d: u64, n: u64, slots: &[SingularityClass], counts: &[u64]) -> SingularProfile {
    let mut p = SingularProfile::new(d, n);
    for (cls, &c) in slots.iter().zip(counts) {
        p.set(cls.family(), cls.k(), c);
    }
    p
}

/// Deterministic output order: total δ, then counts in slot order, then `N`.
fn sort_profiles(slots: &[SingularityClass], out: &mut [SingularProfile]) {
    out.sort_by_cached_key(|p| {
        let delta = aggregates(p).total_delta();
        let counts: Vec<u64> = slots.iter().map(|c| p.count(c.family(), c.k())).collect();
        (delta, counts, p.cover_degree)
    });
}

/// Admissible profiles in the search box, found by depth-first search pruned by
/// the genus budget, the structural `N` bounds and the Hodge bound on `N`.
pub fn enumerate_profiles(q: &EnumerationQuery) -> Result<Vec<SingularProfile>, FeasibilityError> {
    q.validate()?;
    let degrees = q.cover_degrees();
    let max_n = *degrees.iter().max().expect("nonempty");
    // drop classes no cover degree in range can carry
    let slots: Vec<SingularityClass> = q
        .slots()
        .into_iter()
        .filter(|c| c.family().min_cover_degree() <= max_n)
        .collect();
    let budget = q.delta_budget();
    let visited = AtomicU64::new(0);

    let first_range = slots
        .first()
        .map(|c| 0..=q.slot_max(c).min(budget / c.delta_invariant()))
        .unwrap_or(0..=0);

    let mut out = run_in_pool(q.jobs, || {
        first_range
            .into_par_iter()
            .map(|first| {
                let mut found = Vec::new();
                let mut counts = vec![0u64; slots.len()];
                let used = slots.first().map_or(0, |c| first * c.delta_invariant());
                if let Some(c) = counts.first_mut() {
                    *c = first;
                }
                let start = usize::from(!slots.is_empty());
                dfs(
                    q,
                    &slots,
                    &degrees,
                    start,
                    used,
                    &mut counts,
                    &visited,
                    &mut found,
                )?;
                Ok(found)
            })
            .collect::<Result<Vec<Vec<SingularProfile>>, FeasibilityError>>()
    })?
    .into_iter()
    .flatten()
    .collect::<Vec<_>>();
    sort_profiles(&slots, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    q: &EnumerationQuery,
    slots: &[SingularityClass],
    degrees: &[u64],
    idx: usize,
    used: u64,
    counts: &mut Vec<u64>,
    visited: &AtomicU64,
    found: &mut Vec<SingularProfile>,
) -> Result<(), FeasibilityError> {
    if visited.fetch_add(1, Ordering::Relaxed) >= q.node_limit {
        return Err(FeasibilityError::BudgetExceeded {
            limit: q.node_limit,
        });
    }
    if idx == slots.len() {
        emit_leaf(q, slots, degrees, counts, found);
        return Ok(());
    }
    let cls = &slots[idx];
    let remaining = q.delta_budget() - used;
    let max = q.slot_max(cls).min(remaining / cls.delta_invariant());
    for c in 0..=max {
        counts[idx] = c;
        dfs(
            q,
            slots,
            degrees,
            idx + 1,
            used + c * cls.delta_invariant(),
            counts,
            visited,
            found,
        )?;
    }
    counts[idx] = 0;
    Ok(())
}

fn emit_leaf(
    q: &EnumerationQuery,
    slots: &[SingularityClass],
    degrees: &[u64],
    counts: &[u64],
    found: &mut Vec<SingularProfile>,
) {
    let template = build_profile(q.d, degrees[0], slots, counts);
    let needs = template
        .entries()
        .map(|(f, _, _)| f.min_cover_degree())
        .max()
        .unwrap_or(2);
    let r2 = ram_self_intersection(&template);
    if !r2.is_positive() {
        return;
    }
    // Hodge: N <= 4d^2 / R^2
    let hodge_max = (BigInt::from(4 * q.d * q.d) / &r2)
        .to_u64()
        .unwrap_or(u64::MAX);
    for &n in degrees {
        if n < needs || n > hodge_max {
            continue;
        }
        let mut p = template.clone();
        p.cover_degree = n;
        if check_constraints(&p).admissible {
            found.push(p);
        }
    }
}

/// Reference enumerator: every point of the box, filtered by [`check_constraints`].
pub fn enumerate_brute_force(
    q: &EnumerationQuery,
) -> Result<Vec<SingularProfile>, FeasibilityError> {
    q.validate()?;
    let slots = q.slots();
    let degrees = q.cover_degrees();
    let ranges: Vec<u64> = slots.iter().map(|c| q.slot_max(c) + 1).collect();
    let size = ranges
        .iter()
        .try_fold(degrees.len() as u64, |acc, &r| acc.checked_mul(r))
        .unwrap_or(u64::MAX);
    if size > q.node_limit {
        return Err(FeasibilityError::BudgetExceeded {
            limit: q.node_limit,
        });
    }
    let mut out: Vec<SingularProfile> = run_in_pool(q.jobs, || {
        (0..size)
            .into_par_iter()
            .filter_map(|mut index| {
                let n = degrees[(index % degrees.len() as u64) as usize];
                index /= degrees.len() as u64;
                let counts: Vec<u64> = ranges
                    .iter()
                    .map(|&r| {
                        let c = index % r;
                        index /= r;
                        c
                    })
                    .collect();
                let p = build_profile(q.d, n, &slots, &counts);
                check_constraints(&p).admissible.then_some(p)
            })
            .collect()
    });
    sort_profiles(&slots, &mut out);
    Ok(out)
}
