//! Exact sparse polynomials in two variables over the integers.
//!
//! Terms are stored in a `BTreeMap` keyed by the exponent pair `(i, j)` of
//! `x^i y^j`, where `x` and `y` are the first and second variable. Zero
//! coefficients are never stored. Division uses lex order with `y > x`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division is not exact: remainder {0}")]
    InexactDivision(String),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("malformed polynomial: {0}")]
    Malformed(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct BivariatePolynomial {
    vars: [String; 2],
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BivariatePolynomial {
    pub fn zero(vars: [&str; 2]) -> Self {
        Self {
            vars: vars.map(String::from),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: [&str; 2], c: impl Into<BigInt>) -> Self {
        Self::monomial(vars, c, 0, 0)
    }

    /// `c * x^i * y^j`.
    pub fn monomial(vars: [&str; 2], c: impl Into<BigInt>, i: u32, j: u32) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(i, j, c.into());
        p
    }

    /// Builds a polynomial from `(i, j, coefficient)` triples; repeated exponents are summed.
    pub fn from_terms(vars: [&str; 2], terms: impl IntoIterator<Item = (u32, u32, i64)>) -> Self {
        let mut p = Self::zero(vars);
        for (i, j, c) in terms {
            p.add_term(i, j, BigInt::from(c));
        }
        p
    }

    pub fn vars(&self) -> [&str; 2] {
        [self.vars[0].as_str(), self.vars[1].as_str()]
    }

    fn var_names(&self) -> [&str; 2] {
        self.vars()
    }

    /// Same terms under new variable names.
    pub fn renamed(mut self, vars: [&str; 2]) -> Self {
        self.vars = vars.map(String::from);
        self
    }

    fn add_term(&mut self, i: u32, j: u32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &BigInt)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree in the first (`var = 0`) or second (`var = 1`) variable; `None` for zero.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms
            .keys()
            .map(|&(i, j)| if var == 0 { i } else { j })
            .max()
    }

    /// Lowest total degree of a term, i.e. the multiplicity at the origin.
    pub fn order_at_origin(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    /// Coefficients of the expansion in the second variable: `p = sum c_j(x) y^j`.
    pub fn coefficients_in_second(&self) -> Vec<BivariatePolynomial> {
        let vars = self.var_names();
        let deg = self.degree_in(1).map_or(0, |d| d as usize + 1);
        let mut out = vec![Self::zero(vars); deg];
        for (&(i, j), c) in &self.terms {
            out[j as usize].add_term(i, 0, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero(self.var_names());
        for (&(i, j), v) in &self.terms {
            out.add_term(i, j, v * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::constant(self.var_names(), 1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides by the content and fixes the sign so that the lex-leading
    /// coefficient is positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().1.is_negative() {
            g = -g;
        }
        let mut out = Self::zero(self.var_names());
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, c / &g);
        }
        out
    }

    /// Leading exponent and coefficient in lex order with the second variable first.
    fn leading(&self) -> ((u32, u32), &BigInt) {
        self.terms
            .iter()
            .max_by_key(|(&(i, j), _)| (j, i))
            .map(|(&e, c)| (e, c))
            .expect("leading term of zero polynomial")
    }

    /// Multivariate division in lex order: returns `(q, r)` with `self = q*div + r`
    /// and no term of `r` divisible by the leading term of `div`.
    pub fn div_rem(&self, div: &Self) -> Result<(Self, Self), PolyError> {
        if div.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let ((li, lj), lc) = div.leading();
        let lc = lc.clone();
        let vars = self.var_names();
        let mut q = Self::zero(vars);
        let mut r = Self::zero(vars);
        let mut p = self.clone();
        while !p.is_zero() {
            let ((pi, pj), pc) = p.leading();
            let pc = pc.clone();
            if pi >= li && pj >= lj && (&pc % &lc).is_zero() {
                let t = Self::monomial(vars, &pc / &lc, pi - li, pj - lj);
                p = &p - &(&t * div);
                q = &q + &t;
            } else {
                r.add_term(pi, pj, pc);
                p.terms.remove(&(pi, pj));
            }
        }
        Ok((q, r))
    }

    /// Exact quotient; fails if `div` does not divide `self` in `Z[x, y]`.
    pub fn div_exact(&self, div: &Self) -> Result<Self, PolyError> {
        let (q, r) = self.div_rem(div)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::InexactDivision(r.to_string()))
        }
    }

    /// Partial derivative in the first (`var = 0`) or second (`var = 1`) variable.
    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.var_names());
        for (&(i, j), c) in &self.terms {
            let (e, di, dj) = if var == 0 { (i, 1, 0) } else { (j, 0, 1) };
            if e > 0 {
                out.add_term(i - di, j - dj, c * BigInt::from(e));
            }
        }
        out
    }

    /// Substitutes `x -> xs`, `y -> ys`; the result lives in the ring of the substitutes.
    pub fn compose(&self, xs: &Self, ys: &Self) -> Self {
        let vars = xs.var_names();
        let mut out = Self::zero(vars);
        for (&(i, j), c) in &self.terms {
            let term = &xs.pow(i) * &ys.pow(j);
            out = &out + &term.scale(c);
        }
        out
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut order: Vec<_> = self.terms.iter().collect();
        order.sort_by_key(|(&(i, j), _)| std::cmp::Reverse((j, i)));
        for (n, (&(i, j), c)) in order.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors = Vec::new();
            for (e, name) in [(j, &self.vars[1]), (i, &self.vars[0])] {
                match e {
                    0 => {}
                    1 => factors.push(name.clone()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn add(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn sub(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, -c);
        }
        out
    }
}

impl Mul for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn mul(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = BivariatePolynomial::zero(self.var_names());
        for (&(a, b), c) in &self.terms {
            for (&(x, y), d) in &rhs.terms {
                out.add_term(a + x, b + y, c * d);
            }
        }
        out
    }
}

impl Neg for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn neg(self) -> BivariatePolynomial {
        self.scale(&BigInt::from(-1))
    }
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    vars: [String; 2],
    terms: Vec<(u32, u32, String)>,
}

impl Serialize for BivariatePolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| (i, j, c.to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BivariatePolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        let mut p = BivariatePolynomial {
            vars: repr.vars,
            terms: BTreeMap::new(),
        };
        for (i, j, c) in repr.terms {
            let c: BigInt = c
                .parse()
                .map_err(|_| serde::de::Error::custom(PolyError::Malformed(c.clone())))?;
            p.add_term(i, j, c);
        }
        Ok(p)
    }
}

/// Determinant by fraction-free Bareiss elimination.
///
/// Every intermediate division is exact in `Z[x, y]`; a failure here means the
/// input was not a polynomial matrix over an integral domain, which cannot happen.
pub fn bareiss_determinant(matrix: &[Vec<BivariatePolynomial>]) -> BivariatePolynomial {
    let n = matrix.len();
    assert!(
        matrix.iter().all(|row| row.len() == n),
        "matrix must be square"
    );
    let vars = matrix
        .first()
        .and_then(|r| r.first())
        .map(|p| p.var_names())
        .unwrap_or(["x", "y"]);
    if n == 0 {
        return BivariatePolynomial::constant(vars, 1);
    }
    let mut m: Vec<Vec<BivariatePolynomial>> = matrix.to_vec();
    let mut negate = false;
    let mut prev = BivariatePolynomial::constant(vars, 1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return BivariatePolynomial::zero(vars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step division is exact");
            }
            m[i][k] = BivariatePolynomial::zero(vars);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

/// Sylvester matrix of `f` and `g`, given as coefficient lists from the
/// constant term upward in an eliminated variable.
pub fn sylvester_matrix(
    f: &[BivariatePolynomial],
    g: &[BivariatePolynomial],
) -> Vec<Vec<BivariatePolynomial>> {
    assert!(
        f.len() >= 2 && g.len() >= 2,
        "inputs must have positive degree"
    );
    let vars = f[0].var_names();
    let (df, dg) = (f.len() - 1, g.len() - 1);
    let size = df + dg;
    let mut m = vec![vec![BivariatePolynomial::zero(vars); size]; size];
    for row in 0..dg {
        for (idx, c) in f.iter().rev().enumerate() {
            m[row][row + idx] = c.clone();
        }
    }
    for row in 0..df {
        for (idx, c) in g.iter().rev().enumerate() {
            m[dg + row][row + idx] = c.clone();
        }
    }
    m
}

/// Resultant of two polynomials in an eliminated variable whose coefficients lie in `Z[x, y]`.
pub fn resultant(f: &[BivariatePolynomial], g: &[BivariatePolynomial]) -> BivariatePolynomial {
    bareiss_determinant(&sylvester_matrix(f, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const UV: [&str; 2] = ["u", "v"];

    fn p(terms: &[(u32, u32, i64)]) -> BivariatePolynomial {
        BivariatePolynomial::from_terms(UV, terms.iter().copied())
    }

    /// Leibniz expansion, independent of the elimination route.
    fn leibniz(m: &[Vec<BivariatePolynomial>]) -> BivariatePolynomial {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for rest in perms(n - 1) {
                for pos in 0..=rest.len() {
                    let mut q = rest.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.len();
        let mut total = BivariatePolynomial::zero(UV);
        for perm in perms(n) {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            let mut term = BivariatePolynomial::constant(UV, 1);
            for (row, &col) in perm.iter().enumerate() {
                term = &term * &m[row][col];
            }
            total = if inversions % 2 == 0 {
                &total + &term
            } else {
                &total - &term
            };
        }
        total
    }

    #[test]
    fn display() {
        assert_eq!(p(&[(3, 0, -4), (0, 2, 1)]).to_string(), "v^2 - 4*u^3");
        assert_eq!(p(&[(0, 0, -27)]).to_string(), "-27");
        assert_eq!(BivariatePolynomial::zero(UV).to_string(), "0");
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let a = p(&[(1, 0, 2), (0, 1, 1)]);
        let b = p(&[(1, 0, -2)]);
        let s = &a + &b;
        assert_eq!(s, p(&[(0, 1, 1)]));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn exact_division() {
        // (v - u)(v + u^2) / (v - u)
        let a = p(&[(0, 1, 1), (1, 0, -1)]);
        let b = p(&[(0, 1, 1), (2, 0, 1)]);
        assert_eq!((&a * &b).div_exact(&a).unwrap(), b);
        let err = (&(&a * &b) + &p(&[(0, 0, 1)])).div_exact(&a);
        assert!(matches!(err, Err(PolyError::InexactDivision(_))));
        assert_eq!(
            a.div_exact(&BivariatePolynomial::zero(UV)),
            Err(PolyError::DivisionByZero)
        );
    }

    #[test]
    fn primitive_normalization() {
        let a = p(&[(3, 0, 108), (0, 2, -27)]);
        assert_eq!(a.primitive(), p(&[(3, 0, -4), (0, 2, 1)]));
    }

    #[test]
    fn resultant_of_linear_forms() {
        // Res_w(w - u, w - v) = v - u up to sign convention: det [[1, -u], [1, -v]] = u - v
        let f = vec![p(&[(1, 0, -1)]), p(&[(0, 0, 1)])];
        let g = vec![p(&[(0, 1, -1)]), p(&[(0, 0, 1)])];
        assert_eq!(resultant(&f, &g), p(&[(1, 0, 1), (0, 1, -1)]));
    }

    #[test]
    fn bareiss_handles_zero_pivots() {
        let m = vec![
            vec![p(&[]), p(&[(0, 0, 1)]), p(&[(1, 0, 1)])],
            vec![p(&[(0, 0, 2)]), p(&[(0, 1, 1)]), p(&[])],
            vec![p(&[(0, 0, 1)]), p(&[]), p(&[(0, 0, 3)])],
        ];
        assert_eq!(bareiss_determinant(&m), leibniz(&m));
    }

    #[test]
    fn sylvester_determinant_matches_leibniz() {
        for n in 0..4 {
            let f = vec![p(&[(0, 1, -1)]), p(&[(n, 0, -3)]), p(&[]), p(&[(0, 0, 1)])];
            let g = vec![p(&[(n, 0, -3)]), p(&[]), p(&[(0, 0, 3)])];
            let m = sylvester_matrix(&f, &g);
            assert_eq!(bareiss_determinant(&m), leibniz(&m));
        }
    }

    fn arb_poly() -> impl Strategy<Value = BivariatePolynomial> {
        proptest::collection::vec((0u32..3, 0u32..3, -4i64..5), 0..4)
            .prop_map(|t| BivariatePolynomial::from_terms(UV, t))
    }

    proptest! {
        #[test]
        fn bareiss_equals_leibniz(entries in proptest::collection::vec(arb_poly(), 9)) {
            let m: Vec<Vec<_>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            prop_assert_eq!(bareiss_determinant(&m), leibniz(&m));
        }

        #[test]
        fn product_divides_exactly(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!a.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&a).unwrap(), b);
        }

        #[test]
        fn json_round_trip(a in arb_poly()) {
            let text = serde_json::to_string(&a).unwrap();
            let back: BivariatePolynomial = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
