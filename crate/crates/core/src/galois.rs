//! Invariants of the Galois closure `Y` of the cover and of its minimal resolution `Z`.
//!
//! Several quantities come in two versions. The `printed` values evaluate the
//! published closed forms term by term. The `chain` and `assembled` values are
//! rebuilt from the local surface germs over each singular point: an `A_j`
//! germ resolves to a chain of `j` rational `(-2)`-curves, whose Euler number
//! is `j + 1`. The two versions disagree on `t_k` terms and on `e(Z)`; the
//! report carries both and names every mismatch in `discrepancy_flags`.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::branch_curve_euler;
use crate::json::{big_int, ratio};
use crate::profile::{validate_profile, Family, SingularProfile, SingularityClass, Violation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaloisError {
    #[error("profile violates structural invariants: {0:?}")]
    InvalidProfile(Vec<Violation>),
}

pub const FLAG_M_T: &str = "M_t_coefficient";
pub const FLAG_ES_T: &str = "eS_t_coefficient";
pub const FLAG_EZ: &str = "eZ_closed_vs_assembled";
pub const FLAG_CHI_ASSEMBLED: &str = "chiZ_assembled_nonintegral";
pub const FLAG_CHI_CLOSED: &str = "chiZ_closed_nonintegral";

static FACTORIALS: OnceLock<RwLock<Vec<BigInt>>> = OnceLock::new();

/// `n!`, memoized.
pub fn factorial(n: u64) -> BigInt {
    let cache = FACTORIALS.get_or_init(|| RwLock::new(vec![BigInt::one()]));
    let idx = n as usize;
    if let Some(v) = cache.read().expect("factorial cache poisoned").get(idx) {
        return v.clone();
    }
    let mut table = cache.write().expect("factorial cache poisoned");
    while table.len() <= idx {
        let next = table.last().expect("nonempty") * BigInt::from(table.len());
        table.push(next);
    }
    table[idx].clone()
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn frac(n: impl Into<BigInt>, d: i64) -> BigRational {
    BigRational::new(n.into(), BigInt::from(d))
}

/// Order of the local Galois group over a point of the class.
pub fn local_group_order(family: Family) -> u64 {
    match family {
        Family::S2 => 4,
        Family::S3Odd | Family::S3Even => 6,
    }
}

/// Length of the `(-2)`-chain over one preimage of a point of the class.
///
/// `S2(k)` gives an `A_{k-1}` germ, `S3_odd(k)` an `A_{2k}` germ and
/// `S3_even(k)` an `A_{2k-1}` germ; a smooth preimage has chain length zero.
pub fn chain_length(class: SingularityClass) -> u64 {
    let k = u64::from(class.k());
    match class.family() {
        Family::S2 => k - 1,
        Family::S3Odd => 2 * k,
        Family::S3Even => 2 * k - 1,
    }
}

/// Sum of `count * N!/|G| * weight(class)` over the profile.
fn preimage_sum(p: &SingularProfile, weight: impl Fn(SingularityClass) -> BigInt) -> BigRational {
    let nf = factorial(p.cover_degree);
    p.entries()
        .filter_map(|(f, k, c)| SingularityClass::new(f, k).ok().map(|cls| (cls, c)))
        .map(|(cls, c)| {
            let order = local_group_order(cls.family()) as i64;
            frac(&nf * weight(cls) * BigInt::from(c), order)
        })
        .fold(BigRational::zero(), |a, b| a + b)
}

fn sum_counts(p: &SingularProfile, family: Family, from: u32, w: impl Fn(u32) -> i64) -> BigInt {
    p.counts(family)
        .filter(|&(k, _)| k >= from)
        .map(|(k, c)| BigInt::from(w(k)) * BigInt::from(c))
        .sum()
}

/// Number of singular points of `Y`.
pub fn galois_singular_count(p: &SingularProfile) -> BigRational {
    let nf = rat(factorial(p.cover_degree));
    let s3 = sum_counts(p, Family::S3Odd, 1, |_| 1) + sum_counts(p, Family::S3Even, 1, |_| 1);
    let s2 = sum_counts(p, Family::S2, 2, |_| 1);
    nf * (frac(s3, 6) + frac(s2, 4))
}

/// `(printed, chain)` counts of `(-2)`-curves contracted by the resolution `Z -> Y`.
pub fn exceptional_curve_count(p: &SingularProfile) -> (BigRational, BigRational) {
    let nf = factorial(p.cover_degree);
    let s3 = sum_counts(p, Family::S3Odd, 1, |k| 2 * k as i64)
        + sum_counts(p, Family::S3Even, 1, |k| 2 * k as i64 - 1);
    let s2 = sum_counts(p, Family::S2, 2, |k| 2 * k as i64 - 1);
    let printed = frac(&nf * s3, 6) + frac(&nf * s2, 4);
    let chain = preimage_sum(p, |cls| BigInt::from(chain_length(cls)));
    (printed, chain)
}

/// `(printed, chain)` Euler number of the preimage of `Sing B` in `Z`.
pub fn euler_preimage_sing(p: &SingularProfile) -> (BigRational, BigRational) {
    let nf = factorial(p.cover_degree);
    let s3 = sum_counts(p, Family::S3Odd, 0, |k| 2 * k as i64 + 1)
        + sum_counts(p, Family::S3Even, 1, |k| 2 * k as i64);
    let s2 = BigInt::from(p.t(1)) + sum_counts(p, Family::S2, 2, |k| 2 * k as i64);
    let printed = frac(&nf * s3, 6) + frac(&nf * s2, 4);
    let chain = preimage_sum(p, |cls| BigInt::from(chain_length(cls) + 1));
    (printed, chain)
}

/// `K_Z^2 = (d-3)^2 N!`.
pub fn canonical_square_z(p: &SingularProfile) -> BigInt {
    let shift = BigInt::from(p.d) - 3;
    &shift * &shift * factorial(p.cover_degree)
}

/// `(closed, assembled)` Euler number of `Z`.
///
/// The closed form is evaluated as published. The assembled value adds
/// `N!` sheets over `P2 \ B`, `N!/2` over smooth branch points, and the
/// printed preimage of `Sing B`.
pub fn euler_z(p: &SingularProfile) -> (BigRational, BigRational) {
    let nf = factorial(p.cover_degree);
    let d = BigInt::from(p.d);

    let n_terms = sum_counts(p, Family::S3Odd, 0, |k| 19 * k as i64 + 5)
        + sum_counts(p, Family::S3Even, 1, |k| 16 * k as i64);
    let bracket = rat(3 + &d * (2 * &d - 3))
        - frac(n_terms, 6)
        - frac(3 * BigInt::from(p.t(1)), 4)
        - frac(sum_counts(p, Family::S2, 2, |k| k as i64), 2);
    let closed = rat(nf.clone()) * bracket;

    let e = branch_curve_euler(p);
    let assembled =
        rat(&nf * (3 - e.curve)) + frac(&nf * e.smooth_part, 2) + euler_preimage_sing(p).0;
    (closed, assembled)
}

/// `chi(O_Z)` by Noether's formula from `K_Z^2` and the given `e(Z)`.
pub fn chi_z(p: &SingularProfile, euler: &BigRational) -> (BigRational, bool) {
    let value = (rat(canonical_square_z(p)) + euler) / rat(12);
    let integral = value.is_integer();
    (value, integral)
}

/// Full Galois-closure report with both evaluation routes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisReport {
    #[serde(rename = "S_sing", with = "big_int")]
    pub s_sing: BigInt,
    #[serde(rename = "M_printed", with = "big_int")]
    pub m_printed: BigInt,
    #[serde(rename = "M_chain", with = "big_int")]
    pub m_chain: BigInt,
    #[serde(with = "ratio")]
    pub e_presing_printed: BigRational,
    #[serde(with = "ratio")]
    pub e_presing_chain: BigRational,
    #[serde(rename = "KZ_square", with = "big_int")]
    pub kz_square: BigInt,
    #[serde(rename = "eZ_closed", with = "ratio")]
    pub ez_closed: BigRational,
    #[serde(rename = "eZ_assembled", with = "ratio")]
    pub ez_assembled: BigRational,
    #[serde(rename = "chiZ_from_assembled", with = "ratio")]
    pub chiz_from_assembled: BigRational,
    #[serde(rename = "chiZ_from_closed", with = "ratio")]
    pub chiz_from_closed: BigRational,
    pub discrepancy_flags: Vec<String>,
}

impl GaloisReport {
    pub fn compute(p: &SingularProfile) -> Result<Self, GaloisError> {
        let violations = validate_profile(p);
        if !violations.is_empty() {
            return Err(GaloisError::InvalidProfile(violations));
        }
        // N! is divisible by 6 (resp. 4) whenever S3 (resp. S2) points are allowed.
        let int = |r: BigRational| -> BigInt {
            debug_assert!(r.is_integer(), "non-integral count {r} on a valid profile");
            r.to_integer()
        };
        let (m_printed, m_chain) = exceptional_curve_count(p);
        let (e_printed, e_chain) = euler_preimage_sing(p);
        let (ez_closed, ez_assembled) = euler_z(p);
        let (chi_assembled, assembled_integral) = chi_z(p, &ez_assembled);
        let (chi_closed, closed_integral) = chi_z(p, &ez_closed);

        let mut flags = Vec::new();
        if m_printed != m_chain {
            flags.push(FLAG_M_T.to_string());
        }
        if e_printed != e_chain {
            flags.push(FLAG_ES_T.to_string());
        }
        if ez_closed != ez_assembled {
            flags.push(FLAG_EZ.to_string());
        }
        if !assembled_integral {
            flags.push(FLAG_CHI_ASSEMBLED.to_string());
        }
        if !closed_integral {
            flags.push(FLAG_CHI_CLOSED.to_string());
        }

        Ok(GaloisReport {
            s_sing: int(galois_singular_count(p)),
            m_printed: int(m_printed),
            m_chain: int(m_chain),
            e_presing_printed: e_printed,
            e_presing_chain: e_chain,
            kz_square: canonical_square_z(p),
            ez_closed,
            ez_assembled,
            chiz_from_assembled: chi_assembled,
            chiz_from_closed: chi_closed,
            discrepancy_flags: flags,
        })
    }

    pub fn has_flag(&self, name: &str) -> bool {
        self.discrepancy_flags.iter().any(|f| f == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_models::{galois_local_type, GaloisCase, GermClassification};

    fn r(n: i64) -> BigRational {
        rat(n)
    }

    fn q(n: i64, d: i64) -> BigRational {
        frac(n, d)
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1.into());
        assert_eq!(factorial(4), 24.into());
        assert_eq!(factorial(3), 6.into());
        assert_eq!(factorial(21).to_string(), "51090942171709440000");
    }

    #[test]
    fn singular_count_examples() {
        let p = SingularProfile::new(3, 3).with(Family::S3Odd, 0, 6);
        assert_eq!(galois_singular_count(&p), r(0));
        let p = SingularProfile::new(3, 3).with(Family::S3Odd, 1, 1);
        assert_eq!(galois_singular_count(&p), r(1));
        let p = SingularProfile::new(3, 4).with(Family::S2, 2, 1);
        assert_eq!(galois_singular_count(&p), r(6));
    }

    #[test]
    fn exceptional_curve_examples() {
        let p = SingularProfile::new(3, 3).with(Family::S3Odd, 1, 1);
        assert_eq!(exceptional_curve_count(&p), (r(2), r(2)));
        let p = SingularProfile::new(3, 4).with(Family::S2, 2, 1);
        assert_eq!(exceptional_curve_count(&p), (r(18), r(6)));
        assert_eq!(
            exceptional_curve_count(&SingularProfile::new(3, 3)),
            (r(0), r(0))
        );
    }

    #[test]
    fn preimage_euler_examples() {
        let p = SingularProfile::new(3, 3).with(Family::S3Odd, 0, 6);
        assert_eq!(euler_preimage_sing(&p), (r(6), r(6)));
        let p = SingularProfile::new(3, 4).with(Family::S2, 2, 1);
        assert_eq!(euler_preimage_sing(&p), (r(24), r(12)));
        let p = SingularProfile::new(3, 3).with(Family::S3Even, 1, 1);
        assert_eq!(euler_preimage_sing(&p), (r(2), r(2)));
    }

    #[test]
    fn canonical_square_examples() {
        assert_eq!(canonical_square_z(&SingularProfile::new(3, 3)), 0.into());
        assert_eq!(canonical_square_z(&SingularProfile::new(4, 3)), 6.into());
        assert_eq!(canonical_square_z(&SingularProfile::new(6, 4)), 216.into());
        assert_eq!(canonical_square_z(&SingularProfile::new(1, 2)), 8.into());
    }

    #[test]
    fn euler_z_examples() {
        let cubic = SingularProfile::new(3, 3).with(Family::S3Odd, 0, 6);
        assert_eq!(euler_z(&cubic), (r(42), r(24)));
        assert_eq!(euler_z(&SingularProfile::new(3, 2)), (r(24), r(24)));
        assert_eq!(euler_z(&SingularProfile::new(1, 2)), (r(4), r(4)));
    }

    #[test]
    fn chi_z_examples() {
        let cubic = SingularProfile::new(3, 3).with(Family::S3Odd, 0, 6);
        let (closed, assembled) = euler_z(&cubic);
        assert_eq!(chi_z(&cubic, &assembled), (r(2), true));
        assert_eq!(chi_z(&cubic, &closed), (q(42, 12), false));
        let p = SingularProfile::new(3, 2);
        assert_eq!(chi_z(&p, &euler_z(&p).1), (r(2), true));
    }

    #[test]
    fn report_flags() {
        let cubic = SingularProfile::new(3, 3).with(Family::S3Odd, 0, 6);
        let rep = GaloisReport::compute(&cubic).unwrap();
        assert_eq!(rep.ez_assembled, r(24));
        assert_eq!(rep.chiz_from_assembled, r(2));
        assert_eq!(
            rep.discrepancy_flags,
            vec![FLAG_EZ.to_string(), FLAG_CHI_CLOSED.to_string()]
        );
        let p = SingularProfile::new(3, 4).with(Family::S2, 2, 1);
        let rep = GaloisReport::compute(&p).unwrap();
        assert!(rep.has_flag(FLAG_M_T) && rep.has_flag(FLAG_ES_T));
        assert!(GaloisReport::compute(&SingularProfile::new(3, 2).with(Family::S2, 1, 1)).is_err());
    }

    #[test]
    fn empty_profiles_agree() {
        for d in 1..=10 {
            for n in 2..=6 {
                let p = SingularProfile::new(d, n);
                let (closed, assembled) = euler_z(&p);
                assert_eq!(closed, assembled, "d={d} N={n}");
                let dd = BigInt::from(d);
                assert_eq!(closed, rat(factorial(n) * (3 + &dd * (2 * &dd - 3))));
            }
        }
    }

    #[test]
    fn canonical_square_z_sign() {
        for d in 1..=12 {
            let k = canonical_square_z(&SingularProfile::new(d, 4));
            assert!(k >= BigInt::zero());
            assert_eq!(k.is_zero(), d == 3);
        }
    }

    #[test]
    fn printed_and_chain_agree_without_higher_s2_or_n() {
        for n0 in 0..5 {
            for k in 1..5 {
                for m in 0..4 {
                    let p = SingularProfile::new(5, 5)
                        .with(Family::S3Odd, 0, n0)
                        .with(Family::S3Even, k, m)
                        .with(Family::S2, 1, m + 1);
                    let (printed, chain) = euler_preimage_sing(&p);
                    assert_eq!(printed, chain, "{p}");
                }
            }
        }
    }

    #[test]
    fn no_singular_points_iff_only_smooth_preimages() {
        let cases = [
            (
                SingularProfile::new(4, 4)
                    .with(Family::S3Odd, 0, 3)
                    .with(Family::S2, 1, 4),
                true,
            ),
            (SingularProfile::new(4, 4).with(Family::S3Odd, 1, 1), false),
            (SingularProfile::new(4, 4).with(Family::S3Even, 1, 1), false),
            (SingularProfile::new(4, 4).with(Family::S2, 2, 1), false),
            (SingularProfile::new(4, 4), true),
        ];
        for (p, smooth) in cases {
            assert_eq!(galois_singular_count(&p).is_zero(), smooth, "{p}");
        }
    }

    #[test]
    fn chain_table_matches_local_germs() {
        for k in 1..=6u32 {
            let checks = [
                (Family::S2, GaloisCase::S2, u64::from(k)),
                (Family::S3Odd, GaloisCase::S3, 2 * u64::from(k) + 1),
                (Family::S3Even, GaloisCase::S3, 2 * u64::from(k)),
            ];
            for (family, case, n) in checks {
                let cls = SingularityClass::new(family, k).unwrap();
                let expected = match galois_local_type(case, n).unwrap() {
                    GermClassification::Smooth => 0,
                    GermClassification::A(m) => m,
                    GermClassification::NotRecognized => panic!("unrecognized germ"),
                };
                assert_eq!(chain_length(cls), expected, "{cls}");
            }
        }
        let cusp = SingularityClass::new(Family::S3Odd, 0).unwrap();
        assert_eq!(
            galois_local_type(GaloisCase::S3, 1).unwrap(),
            GermClassification::Smooth
        );
        assert_eq!(chain_length(cusp), 0);
    }
}
