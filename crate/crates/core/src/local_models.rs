//! Symbolic verification of the local normal-form covers
//! `f_n : (z, w) -> (u, v) = (z, w^3 - 3 z^n w)`, with `f_0 = (z, w^3)`.
//!
//! All computations are exact over the integers: the ramification curve from
//! the Jacobian, the branch curve as a discriminant computed by a
//! Sylvester/Bareiss resultant, the residual curve left after removing the
//! doubled ramification curve from the pulled-back branch curve, and the
//! surface germs sitting over branch points in the Galois closure.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{resultant, BivariatePolynomial, PolyError};

pub const ZW: [&str; 2] = ["z", "w"];
pub const UV: [&str; 2] = ["u", "v"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocalError {
    #[error("germ is not quadratic in the distinguished variable with unit leading coefficient")]
    UnsupportedShape,
    #[error("residual curve division is not exact: {0}")]
    InexactDivision(String),
    #[error("index n={0} is outside the supported range")]
    InvalidIndex(u64),
}

impl From<PolyError> for LocalError {
    fn from(e: PolyError) -> Self {
        LocalError::InexactDivision(e.to_string())
    }
}

/// The normal-form cover `f_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverGerm {
    pub n: u32,
}

impl CoverGerm {
    pub fn new(n: u32) -> Self {
        Self { n }
    }

    /// `u(z, w) = z`.
    pub fn u_component(&self) -> BivariatePolynomial {
        BivariatePolynomial::monomial(ZW, 1, 1, 0)
    }

    /// `v(z, w) = w^3 - 3 z^n w`, or `w^3` when `n = 0`.
    pub fn v_component(&self) -> BivariatePolynomial {
        let cube = BivariatePolynomial::monomial(ZW, 1, 0, 3);
        if self.n == 0 {
            cube
        } else {
            &cube - &BivariatePolynomial::monomial(ZW, 3, self.n, 1)
        }
    }
}

/// Surface or curve germ type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GermClassification {
    Smooth,
    A(u64),
    NotRecognized,
}

impl fmt::Display for GermClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GermClassification::Smooth => f.write_str("smooth"),
            GermClassification::A(m) => write!(f, "A{m}"),
            GermClassification::NotRecognized => f.write_str("not recognized"),
        }
    }
}

/// Ramification curve of `f_n`: the Jacobian determinant divided by its content.
pub fn jacobian_ramification(g: CoverGerm) -> BivariatePolynomial {
    let (u, v) = (g.u_component(), g.v_component());
    let det = &(&u.partial(0) * &v.partial(1)) - &(&u.partial(1) * &v.partial(0));
    det.primitive()
}

/// Branch curve of `f_n` computed as a discriminant in `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminantCurve {
    /// `Res_w(F, dF/dw)` for `F = w^3 - 3u^n w - v`.
    pub resultant: BivariatePolynomial,
    /// The discriminant of `F` in `w`, `-Res_w(F, dF/dw)` for a monic cubic.
    pub discriminant: BivariatePolynomial,
    /// Primitive form with positive `v^2` coefficient.
    pub normalized: BivariatePolynomial,
}

pub fn discriminant_curve(n: u32) -> DiscriminantCurve {
    let c = |coef: i64, i: u32, j: u32| BivariatePolynomial::monomial(UV, coef, i, j);
    let zero = BivariatePolynomial::zero(UV);
    let linear = if n == 0 { zero.clone() } else { c(-3, n, 0) };
    let cubic = vec![c(-1, 0, 1), linear.clone(), zero.clone(), c(1, 0, 0)];
    let derivative = vec![linear.clone(), zero, c(3, 0, 0)];

    let res = resultant(&cubic, &derivative);
    // disc = (-1)^{d(d-1)/2} Res(F, F') / lc(F) with d = 3 and lc = 1
    let discriminant = -&res;
    let normalized = discriminant.primitive();
    DiscriminantCurve {
        resultant: res,
        discriminant,
        normalized,
    }
}

/// `v^2 - 4 u^{3n}`, the expected branch curve.
pub fn expected_branch_curve(n: u32) -> BivariatePolynomial {
    let sq = BivariatePolynomial::monomial(UV, 1, 0, 2);
    if n == 0 {
        sq
    } else {
        &sq - &BivariatePolynomial::monomial(UV, 4, 3 * n, 0)
    }
}

fn order_univariate(coeffs: &BivariatePolynomial) -> Option<u32> {
    coeffs.terms().map(|(i, _, _)| i).min()
}

/// Type of a plane curve germ `F(u, v) = 0` at the origin that is quadratic in `v`.
///
/// Writing `F = c(u) v^2 + a(u) v + b(u)` with `c(0) != 0`, the germ is
/// `A_m` with `m + 1 = ord_0(a^2 - 4bc)`. A vanishing discriminant means `F`
/// is a square of a smooth germ.
pub fn classify_plane_am(f: &BivariatePolynomial) -> Result<GermClassification, LocalError> {
    if f.degree_in(1) != Some(2) {
        return Err(LocalError::UnsupportedShape);
    }
    let coeffs = f.coefficients_in_second();
    let (b, a, c) = (&coeffs[0], &coeffs[1], &coeffs[2]);
    if c.coeff(0, 0).is_zero() {
        return Err(LocalError::UnsupportedShape);
    }
    let mult = f.order_at_origin().expect("nonzero polynomial");
    if mult < 2 {
        return Ok(GermClassification::Smooth);
    }
    if mult > 2 {
        return Ok(GermClassification::NotRecognized);
    }
    let four = BigInt::from(4);
    let disc = &(a * a) - &(b * c).scale(&four);
    Ok(match order_univariate(&disc) {
        None => GermClassification::Smooth,
        Some(ord) if ord >= 2 => GermClassification::A(u64::from(ord) - 1),
        Some(_) => GermClassification::NotRecognized,
    })
}

/// Residual curve `F_n` with `(v(z,w))^2 - 4 z^{3n} = (w^2 - z^n)^2 F_n`.
pub fn residual_curve(n: u32) -> Result<BivariatePolynomial, LocalError> {
    if n == 0 {
        return Err(LocalError::InvalidIndex(0));
    }
    let germ = CoverGerm::new(n);
    let pullback = &germ.v_component().pow(2) - &BivariatePolynomial::monomial(ZW, 4, 3 * n, 0);
    let ramification = jacobian_ramification(germ);
    Ok(pullback.div_exact(&ramification.pow(2))?)
}

/// Which local Galois group sits over the branch point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaloisCase {
    /// `Z2 x Z2`: germ `w^2 = z^2 - v^n`.
    S2,
    /// `S3`: germ `y^2 = w^2 - 4 z^n`.
    S3,
}

/// Hypersurface germ `G(x0, x1, x2) = 0` in three variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SurfaceGerm {
    terms: BTreeMap<[u32; 3], BigInt>,
}

impl SurfaceGerm {
    pub fn from_terms(terms: impl IntoIterator<Item = ([u32; 3], i64)>) -> Self {
        let mut g = SurfaceGerm::default();
        for (e, c) in terms {
            *g.terms.entry(e).or_insert_with(BigInt::zero) += c;
        }
        g.terms.retain(|_, c| !c.is_zero());
        g
    }

    /// Hessian of the quadratic part.
    fn hessian(&self) -> [[BigInt; 3]; 3] {
        let mut h: [[BigInt; 3]; 3] = Default::default();
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() != 2 {
                continue;
            }
            let vars: Vec<usize> = (0..3).filter(|&i| e[i] > 0).collect();
            match vars[..] {
                [i] => h[i][i] = c * BigInt::from(2),
                [i, j] => {
                    h[i][j] = c.clone();
                    h[j][i] = c.clone();
                }
                _ => unreachable!(),
            }
        }
        h
    }

    /// Classifies germs of the shape `Q(x_i, x_j) + c x_t^m` plus a possible linear part.
    ///
    /// A linear term makes the germ smooth; a nondegenerate quadratic part gives
    /// `A1`; a rank-two quadratic part whose kernel is a coordinate axis `x_t`,
    /// completed only by pure powers of `x_t`, gives `A_{m-1}`.
    pub fn classify(&self) -> GermClassification {
        if self.terms.keys().any(|e| e.iter().sum::<u32>() == 1) {
            return GermClassification::Smooth;
        }
        if self.terms.is_empty() || self.terms.contains_key(&[0, 0, 0]) {
            return GermClassification::NotRecognized;
        }
        let h = self.hessian();
        let minor = |r: [usize; 2], c: [usize; 2]| {
            &h[r[0]][c[0]] * &h[r[1]][c[1]] - &h[r[0]][c[1]] * &h[r[1]][c[0]]
        };
        let det = (0..3).fold(BigInt::zero(), |acc, j| {
            let cols: Vec<usize> = (0..3).filter(|&c| c != j).collect();
            let term = &h[0][j] * minor([1, 2], [cols[0], cols[1]]);
            if j % 2 == 0 {
                acc + term
            } else {
                acc - term
            }
        });
        if !det.is_zero() {
            return GermClassification::A(1);
        }
        let kernel_axis = (0..3).find(|&t| (0..3).all(|i| h[t][i].is_zero()));
        let Some(t) = kernel_axis else {
            return GermClassification::NotRecognized;
        };
        let others: Vec<usize> = (0..3).filter(|&i| i != t).collect();
        if minor([others[0], others[1]], [others[0], others[1]]).is_zero() {
            return GermClassification::NotRecognized;
        }
        let mut pure_power = None;
        for e in self.terms.keys() {
            let degree: u32 = e.iter().sum();
            if degree == 2 {
                continue;
            }
            if e[others[0]] != 0 || e[others[1]] != 0 {
                return GermClassification::NotRecognized;
            }
            pure_power = Some(pure_power.map_or(e[t], |m: u32| m.min(e[t])));
        }
        match pure_power {
            Some(m) => GermClassification::A(u64::from(m) - 1),
            None => GermClassification::NotRecognized,
        }
    }
}

/// The surface germ of the Galois closure over a branch point with index `n`.
pub fn galois_local_germ(case: GaloisCase, n: u64) -> Result<SurfaceGerm, LocalError> {
    if n == 0 || n > u64::from(u32::MAX) {
        return Err(LocalError::InvalidIndex(n));
    }
    let n = n as u32;
    Ok(match case {
        // variables (w, z, v): w^2 - z^2 + v^n
        GaloisCase::S2 => {
            SurfaceGerm::from_terms([([2, 0, 0], 1), ([0, 2, 0], -1), ([0, 0, n], 1)])
        }
        // variables (y, w, z): y^2 - w^2 + 4 z^n
        GaloisCase::S3 => {
            SurfaceGerm::from_terms([([2, 0, 0], 1), ([0, 2, 0], -1), ([0, 0, n], 4)])
        }
    })
}

pub fn galois_local_type(case: GaloisCase, n: u64) -> Result<GermClassification, LocalError> {
    Ok(galois_local_germ(case, n)?.classify())
}

/// Pushes the standard parametrization of the ramification curve through `f_n`
/// and checks it lands on `v^2 - 4u^{3n} = 0`.
///
/// Odd `n`: `(z, w) = (t^2, t^n)`, image `(t^2, -2 t^{3n})`.
/// Even `n = 2k`: `(z, w) = (z, ±z^k)`, image `(z, ∓2 z^{3k})`.
pub fn branch_parametrization_check(n: u32) -> bool {
    if n == 0 {
        return false;
    }
    let germ = CoverGerm::new(n);
    let ramification = jacobian_ramification(germ);
    let branch = discriminant_curve(n).normalized;
    let tv = ["t", "_"];
    let mono = |c: i64, e: u32| BivariatePolynomial::monomial(tv, c, e, 0);

    let branches: Vec<(
        BivariatePolynomial,
        BivariatePolynomial,
        BivariatePolynomial,
    )> = if n % 2 == 1 {
        vec![(mono(1, 2), mono(1, n), mono(-2, 3 * n))]
    } else {
        let k = n / 2;
        vec![
            (mono(1, 1), mono(1, k), mono(-2, 3 * k)),
            (mono(1, 1), mono(-1, k), mono(2, 3 * k)),
        ]
    };
    branches.iter().all(|(z, w, v_expected)| {
        let on_ramification = ramification.compose(z, w).is_zero();
        let u = germ.u_component().compose(z, w);
        let v = germ.v_component().compose(z, w);
        on_ramification && &v == v_expected && branch.compose(&u, &v).is_zero()
    })
}

/// One named verification step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalModelReport {
    pub n: u32,
    pub ramification: BivariatePolynomial,
    pub discriminant: BivariatePolynomial,
    pub branch_curve: BivariatePolynomial,
    pub branch_type: GermClassification,
    pub residual: Option<BivariatePolynomial>,
    pub checks: Vec<LocalCheck>,
}

impl LocalModelReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs every symbolic check for `f_n`.
pub fn verify_local_model(n: u32) -> LocalModelReport {
    let mut checks = Vec::new();
    let mut check = |name: &str, passed: bool, detail: String| {
        checks.push(LocalCheck {
            name: name.to_string(),
            passed,
            detail,
        })
    };

    let germ = CoverGerm::new(n);
    let ramification = jacobian_ramification(germ);
    let expected_ram = if n == 0 {
        BivariatePolynomial::monomial(ZW, 1, 0, 2)
    } else {
        &BivariatePolynomial::monomial(ZW, 1, 0, 2) - &BivariatePolynomial::monomial(ZW, 1, n, 0)
    };
    check(
        "jacobian",
        ramification == expected_ram,
        format!("J/3 = {ramification}"),
    );

    let disc = discriminant_curve(n);
    let expected = expected_branch_curve(n);
    check(
        "discriminant_normalized",
        disc.normalized == expected,
        format!("{} ~ {}", disc.discriminant, disc.normalized),
    );
    let closed_form = expected.scale(&BigInt::from(-27));
    check(
        "discriminant_closed_form",
        disc.discriminant == closed_form,
        format!("-4p^3 - 27q^2 = {closed_form}"),
    );

    let branch_type =
        classify_plane_am(&disc.normalized).unwrap_or(GermClassification::NotRecognized);
    let expected_type = if n == 0 {
        GermClassification::Smooth
    } else {
        GermClassification::A(3 * u64::from(n) - 1)
    };
    check(
        "branch_type",
        branch_type == expected_type,
        format!("{branch_type}, expected {expected_type}"),
    );

    let mut residual = None;
    if n >= 1 {
        let res = residual_curve(n);
        let expected_res = &BivariatePolynomial::monomial(ZW, 1, 0, 2)
            - &BivariatePolynomial::monomial(ZW, 4, n, 0);
        let (ok, detail) = match &res {
            Ok(r) => (r == &expected_res, format!("F_n = {r}")),
            Err(e) => (false, e.to_string()),
        };
        check("residual_curve", ok, detail);
        residual = res.ok();

        check(
            "branch_parametrization",
            branch_parametrization_check(n),
            "ramification curve maps onto the branch curve".to_string(),
        );

        let expected_galois = if n == 1 {
            GermClassification::Smooth
        } else {
            GermClassification::A(u64::from(n) - 1)
        };
        for (case, name) in [
            (GaloisCase::S2, "galois_germ_s2"),
            (GaloisCase::S3, "galois_germ_s3"),
        ] {
            let ty =
                galois_local_type(case, u64::from(n)).unwrap_or(GermClassification::NotRecognized);
            check(name, ty == expected_galois, format!("{ty}"));
        }
    }

    LocalModelReport {
        n,
        ramification,
        discriminant: disc.discriminant,
        branch_curve: disc.normalized,
        branch_type,
        residual,
        checks,
    }
}

/// `δ = ⌈m/2⌉` of an `A_m` curve germ.
pub fn am_delta(m: u64) -> u64 {
    m.div_ceil(2)
}

/// Whether `c` divides every coefficient; used to confirm the Jacobian scale.
pub fn divisible_by(p: &BivariatePolynomial, c: i64) -> bool {
    let c = BigInt::from(c);
    p.terms().all(|(_, _, v)| (v % &c).is_zero())
}
