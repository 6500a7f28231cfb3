//! Closed-form invariants of the covering surface `X` and of the branch curve `B`.
//!
//! Every function here is pure formula evaluation. Values are returned even
//! when they are negative or fractional; deciding what that means for the
//! existence of a cover is left to [`crate::feasibility`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::{big_int, opt_ratio, ratio};
use crate::profile::{aggregates, Aggregates, Family, SingularProfile};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InvariantError {
    #[error("2d^2 - c - n = {0} is not positive")]
    NonPositiveDenominator(BigInt),
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

fn parts(p: &SingularProfile) -> (BigInt, BigInt, Aggregates) {
    (big(p.d), big(p.cover_degree), aggregates(p))
}

/// Geometric genus `(2d-1)(d-1) - c - n - s` of the branch curve.
pub fn genus_branch(p: &SingularProfile) -> BigInt {
    let (d, _, a) = parts(p);
    (2 * &d - 1) * (d - 1) - a.total_delta()
}

/// Class of the branch curve, `2d(2d-1) - 3c - 2n`.
pub fn dual_degree(p: &SingularProfile) -> BigInt {
    let (d, _, a) = parts(p);
    2 * &d * (2 * &d - 1) - 3 * a.c_pseudo - 2 * a.n_pseudo
}

/// Self-intersection of the ramification curve on `X`, `2d^2 - c - n`.
pub fn ram_self_intersection(p: &SingularProfile) -> BigInt {
    let (d, _, a) = parts(p);
    2 * &d * &d - a.c_pseudo - a.n_pseudo
}

pub fn canonical_square(p: &SingularProfile) -> BigInt {
    let (d, n, a) = parts(p);
    9 * n + 2 * (&d * &d - 6 * &d) - a.c_pseudo - a.n_pseudo
}

pub fn euler_x(p: &SingularProfile) -> BigInt {
    let (d, n, a) = parts(p);
    3 * n + 2 * &d * (2 * &d - 3) - 3 * a.c_pseudo - 2 * a.n_pseudo
}

/// Topological Euler numbers of `B`, `B \ Sing B` and `Sing B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchCurveEuler {
    pub curve: BigInt,
    pub smooth_part: BigInt,
    pub singular_set: BigInt,
}

/// Splits `e(B)` by stratum.
///
/// Unibranch points (`n_k`) do not change `e(B)` relative to the normalization;
/// every two-branch point (`m_k`, `t_k`) lowers it by one.
pub fn branch_curve_euler(p: &SingularProfile) -> BranchCurveEuler {
    let g = genus_branch(p);
    let normalization = 2 - 2 * g;
    let sum = |f: Family| -> BigInt { p.counts(f).map(|(_, c)| big(c)).sum() };
    let (n_all, m_all, t_all) = (sum(Family::S3Odd), sum(Family::S3Even), sum(Family::S2));
    let n0 = big(p.n(0));
    let n_pos = &n_all - &n0;
    BranchCurveEuler {
        curve: &normalization - &m_all - &t_all,
        smooth_part: &normalization - &n0 - (n_pos + 2 * &m_all + 2 * &t_all),
        singular_set: n_all + m_all + t_all,
    }
}

/// `e(X)` assembled stratum by stratum: `N` sheets over `P2 \ B`, `N-1` over
/// smooth branch points and `N-2` over singular ones.
pub fn euler_x_assembled(p: &SingularProfile) -> BigInt {
    let n = big(p.cover_degree);
    let e = branch_curve_euler(p);
    &n * (3 - e.curve) + (&n - 1) * e.smooth_part + (n - 2) * e.singular_set
}

/// `chi(O_X) = N + d(d-3)/2 - c/3 - n/4`, exactly.
pub fn chi_structure(p: &SingularProfile) -> BigRational {
    let (d, n, a) = parts(p);
    let r = |num: BigInt, den: i64| BigRational::new(num, BigInt::from(den));
    BigRational::from_integer(n) + r(&d * (&d - 3), 2) - r(a.c_pseudo, 3) - r(a.n_pseudo, 4)
}

/// Noether's formula `K^2 + e = 12 chi` evaluated on the three closed forms.
pub fn noether_check(p: &SingularProfile) -> bool {
    let lhs = BigRational::from_integer(canonical_square(p) + euler_x(p));
    lhs == chi_structure(p) * BigRational::from_integer(BigInt::from(12))
}

/// Outcome of the Hodge-index inequality `N (2d^2 - c - n) <= 4d^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeBound {
    pub bound: BigRational,
    pub satisfied: bool,
    pub equality: bool,
}

pub fn hodge_bound(p: &SingularProfile) -> Result<HodgeBound, InvariantError> {
    let r2 = ram_self_intersection(p);
    if !r2.is_positive() {
        return Err(InvariantError::NonPositiveDenominator(r2));
    }
    let four_d2: BigInt = 4 * big(p.d) * big(p.d);
    let lhs = big(p.cover_degree) * &r2;
    Ok(HodgeBound {
        bound: BigRational::new(four_d2.clone(), r2),
        satisfied: lhs <= four_d2,
        equality: lhs == four_d2,
    })
}

/// A cover of degree at least six must have a pseudo-node.
pub fn pseudo_node_rule(p: &SingularProfile) -> bool {
    p.cover_degree < 6 || aggregates(p).n_pseudo.is_positive()
}

/// All invariants of `X` and `B` for one profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    #[serde(rename = "genus_B", with = "big_int")]
    pub genus_b: BigInt,
    #[serde(with = "big_int")]
    pub dual_degree: BigInt,
    #[serde(rename = "R_square", with = "big_int")]
    pub r_square: BigInt,
    #[serde(rename = "K_square", with = "big_int")]
    pub k_square: BigInt,
    #[serde(rename = "euler_X", with = "big_int")]
    pub euler_x: BigInt,
    #[serde(rename = "chi_OX", with = "ratio")]
    pub chi_ox: BigRational,
    pub chi_integral: bool,
    pub noether_ok: bool,
    /// `None` when `R^2 <= 0` and the bound is undefined.
    #[serde(with = "opt_ratio")]
    pub hodge_bound: Option<BigRational>,
    pub hodge_ok: bool,
}

impl InvariantReport {
    pub fn compute(p: &SingularProfile) -> Self {
        let chi = chi_structure(p);
        let k_square = canonical_square(p);
        let euler = euler_x(p);
        let hodge = hodge_bound(p).ok();
        InvariantReport {
            genus_b: genus_branch(p),
            dual_degree: dual_degree(p),
            r_square: ram_self_intersection(p),
            noether_ok: BigRational::from_integer(&k_square + &euler)
                == &chi * BigRational::from_integer(12.into()),
            chi_integral: chi.denom().is_one(),
            k_square,
            euler_x: euler,
            chi_ox: chi,
            hodge_ok: hodge.as_ref().is_some_and(|h| h.satisfied),
            hodge_bound: hodge.map(|h| h.bound),
        }
    }
}

/// Class formula rebuilt from per-point virtual cusps and nodes.
pub fn dual_degree_from_virtual(p: &SingularProfile) -> BigInt {
    let d = big(p.d);
    let (mut cusps, mut nodes) = (BigInt::zero(), BigInt::zero());
    for (f, k, c) in p.entries() {
        let (kappa, nu) = crate::profile::SingularityClass::new(f, k)
            .map(|cls| cls.virtual_counts())
            .unwrap_or((0, 0));
        cusps += big(kappa) * big(c);
        nodes += big(nu) * big(c);
    }
    2 * &d * (2 * &d - 1) - 2 * nodes - 3 * cusps
}
