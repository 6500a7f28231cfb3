//! Numerical continuation of fiber roots along loops in a line section.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::perm::Permutation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackError {
    #[error("fiber roots came within {separation:.3e} of each other at parameter {at}")]
    PathTooClose { separation: f64, at: Complex64 },
    #[error("Newton correction did not converge at parameter {at}")]
    NoConvergence { at: Complex64 },
    #[error("loop passes within {distance:.3e} of a branch point (clearance {clearance:.3e})")]
    InsufficientClearance { distance: f64, clearance: f64 },
    #[error("end roots do not match start roots (gap {0:.3e})")]
    MatchingFailed(f64),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// Which local cover a fiber model realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    /// `w^2 - u` over the `u`-line.
    Smooth2,
    /// `(w^2 - u)(w^2 - (u - v^k))` on the line `v = v0`, parametrized by `u`.
    S2Pair(u32),
    /// `w^3 - 3 u0^n w - v` on the line `u = u0`, parametrized by `v`.
    S3Cover(u32),
}

/// A fiber polynomial in `w` over a complex line, with a basepoint on that line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberModel {
    pub kind: ModelKind,
    /// Fixed coordinate of the line (`v0` for `S2Pair`, `u0` for `S3Cover`, unused for `Smooth2`).
    pub line: Complex64,
    pub basepoint: Complex64,
}

impl FiberModel {
    pub fn smooth2() -> Self {
        Self {
            kind: ModelKind::Smooth2,
            line: Complex64::new(0.0, 0.0),
            basepoint: Complex64::new(1.0, 0.0),
        }
    }

    /// Line `v = 1.1`; branch points `u = 0` and `u = 1.1^k`.
    pub fn s2_pair(k: u32) -> Self {
        let line = Complex64::new(1.1, 0.0);
        let c = line.powu(k);
        Self {
            kind: ModelKind::S2Pair(k),
            line,
            basepoint: c * Complex64::new(0.5, -0.5),
        }
    }

    /// Line `u = 1`; branch points `v = ±2`, basepoint `v = 0`.
    pub fn s3_cover(n: u32) -> Self {
        Self::s3_cover_at(n, Complex64::new(1.0, 0.0))
    }

    pub fn s3_cover_at(n: u32, u0: Complex64) -> Self {
        Self {
            kind: ModelKind::S3Cover(n),
            line: u0,
            basepoint: Complex64::new(0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<(), TrackError> {
        match self.kind {
            ModelKind::S2Pair(0) | ModelKind::S3Cover(0) => {
                Err(TrackError::InvalidModel("index must be positive".into()))
            }
            ModelKind::S2Pair(_) | ModelKind::S3Cover(_) if self.line.norm() < 1e-9 => Err(
                TrackError::InvalidModel("line passes through the singular point".into()),
            ),
            _ => {
                let scale = 1.0 + self.basepoint.norm();
                let near = self
                    .branch_points()
                    .iter()
                    .map(|b| (b - self.basepoint).norm())
                    .fold(f64::INFINITY, f64::min);
                if near < 1e-9 * scale {
                    Err(TrackError::InvalidModel(
                        "basepoint lies on the branch locus".into(),
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn fiber_degree(&self) -> usize {
        match self.kind {
            ModelKind::Smooth2 => 2,
            ModelKind::S2Pair(_) => 4,
            ModelKind::S3Cover(_) => 3,
        }
    }

    /// Coefficients in `w` (constant term first) at line parameter `s`, and their `s`-derivatives.
    pub fn coefficients(&self, s: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let c = |re: f64| Complex64::new(re, 0.0);
        let zero = c(0.0);
        match self.kind {
            ModelKind::Smooth2 => (vec![-s, zero, c(1.0)], vec![c(-1.0), zero, zero]),
            ModelKind::S2Pair(k) => {
                let shift = self.line.powu(k);
                (
                    vec![s * (s - shift), zero, shift - 2.0 * s, zero, c(1.0)],
                    vec![2.0 * s - shift, zero, c(-2.0), zero, zero],
                )
            }
            ModelKind::S3Cover(n) => {
                let a = self.line.powu(n);
                (
                    vec![-s, -3.0 * a, zero, c(1.0)],
                    vec![c(-1.0), zero, zero, zero],
                )
            }
        }
    }

    /// Discriminant of the fiber polynomial as a polynomial in the line parameter,
    /// up to a nonzero constant factor (constant term first).
    pub fn discriminant_coefficients(&self) -> Vec<Complex64> {
        let c = |re: f64| Complex64::new(re, 0.0);
        match self.kind {
            ModelKind::Smooth2 => vec![c(0.0), c(1.0)],
            // disc(w^2-u) disc(w^2-u+c) Res^2 ~ u (u - c)
            ModelKind::S2Pair(k) => vec![c(0.0), -self.line.powu(k), c(1.0)],
            // 108 u0^{3n} - 27 v^2 ~ v^2 - 4 u0^{3n}
            ModelKind::S3Cover(n) => vec![-4.0 * self.line.powu(3 * n), c(0.0), c(1.0)],
        }
    }

    /// Branch points on the line, found numerically from the discriminant, sorted.
    pub fn branch_points(&self) -> Vec<Complex64> {
        let mut pts = polynomial_roots(&self.discriminant_coefficients());
        sort_points(&mut pts);
        pts
    }

    pub fn roots_at(&self, s: Complex64) -> Result<Vec<Complex64>, TrackError> {
        let (coeffs, _) = self.coefficients(s);
        let mut roots = polynomial_roots(&coeffs);
        for r in roots.iter_mut() {
            *r = newton(&coeffs, *r, 1e-12).ok_or(TrackError::NoConvergence { at: s })?;
        }
        sort_points(&mut roots);
        Ok(roots)
    }

    /// One loop per branch point, all based at the basepoint.
    pub fn standard_loops(&self) -> Vec<Loop> {
        let pts = self.branch_points();
        let spacing = if pts.len() > 1 {
            pairwise_min(&pts)
        } else {
            (self.basepoint - pts[0]).norm()
        };
        pts.iter()
            .map(|&p| Loop::around(self.basepoint, p, 0.25 * spacing))
            .collect()
    }

    /// Default clearance: a tenth of the spacing between branch points.
    pub fn default_clearance(&self) -> f64 {
        let pts = self.branch_points();
        if pts.len() > 1 {
            0.1 * pairwise_min(&pts)
        } else {
            0.1 * (self.basepoint - pts[0]).norm()
        }
    }
}

fn sort_points(pts: &mut [Complex64]) {
    pts.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

fn pairwise_min(pts: &[Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            m = m.min((pts[i] - pts[j]).norm());
        }
    }
    m
}

fn min_gap(roots: &[Complex64]) -> f64 {
    pairwise_min(roots)
}

fn eval(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
}

fn eval_derivative(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (i, &c)| {
            acc * w + c * i as f64
        })
}

/// Newton iteration until `|p(w)| < tol`, plus one polishing step if it helps.
fn newton(coeffs: &[Complex64], mut w: Complex64, tol: f64) -> Option<Complex64> {
    for _ in 0..60 {
        let val = eval(coeffs, w);
        if val.norm() < tol {
            let der = eval_derivative(coeffs, w);
            if der.norm() > 0.0 {
                let polished = w - val / der;
                if eval(coeffs, polished).norm() < val.norm() {
                    return Some(polished);
                }
            }
            return Some(w);
        }
        let der = eval_derivative(coeffs, w);
        if der.norm() == 0.0 {
            return None;
        }
        w -= val / der;
    }
    (eval(coeffs, w).norm() < tol).then_some(w)
}

/// All roots of a polynomial (constant term first) by Durand-Kerner iteration.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.iter().rposition(|c| c.norm() > 0.0).unwrap_or(0);
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs[..=deg].iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|i| seed.powu(i as u32) * radius).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(&monic, roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    roots
}

/// A piece of a loop, traversed for `σ ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Segment {
        from: Complex64,
        to: Complex64,
    },
    /// Full-angle arc `center + radius e^{i(start + sweep σ)}`.
    Arc {
        center: Complex64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Piece {
    pub fn point(&self, sigma: f64) -> Complex64 {
        match *self {
            Piece::Segment { from, to } => from + (to - from) * sigma,
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + Complex64::from_polar(radius, start + sweep * sigma),
        }
    }

    fn reversed(&self) -> Piece {
        match *self {
            Piece::Segment { from, to } => Piece::Segment { from: to, to: from },
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => Piece::Arc {
                center,
                radius,
                start: start + sweep,
                sweep: -sweep,
            },
        }
    }

    fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Piece::Segment { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    ((p - from) * d.conj()).re / len2
                };
                (from + d * t.clamp(0.0, 1.0) - p).norm()
            }
            Piece::Arc {
                center,
                radius,
                start: _,
                sweep,
            } => {
                if sweep.abs() >= TAU - 1e-12 {
                    ((p - center).norm() - radius).abs()
                } else {
                    (0..=720)
                        .map(|i| (self.point(i as f64 / 720.0) - p).norm())
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }
}

/// A closed path in the line parameter, starting and ending at the basepoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    pub pieces: Vec<Piece>,
}

impl Loop {
    /// Spoke from `base` to the circle of `radius` around `center`, one
    /// counterclockwise turn, and back.
    ///
    /// When `base` is the center itself the spoke leaves in the `+i` direction.
    pub fn around(base: Complex64, center: Complex64, radius: f64) -> Self {
        let offset = base - center;
        let dir = if offset.norm() < 1e-14 {
            Complex64::new(0.0, 1.0)
        } else {
            offset / offset.norm()
        };
        let entry = center + dir * radius;
        let mut pieces = Vec::new();
        if (entry - base).norm() > 0.0 {
            pieces.push(Piece::Segment {
                from: base,
                to: entry,
            });
        }
        pieces.push(Piece::Arc {
            center,
            radius,
            start: dir.arg(),
            sweep: TAU,
        });
        if (entry - base).norm() > 0.0 {
            pieces.push(Piece::Segment {
                from: entry,
                to: base,
            });
        }
        Self { pieces }
    }

    pub fn reversed(&self) -> Self {
        Self {
            pieces: self.pieces.iter().rev().map(Piece::reversed).collect(),
        }
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Loop) -> Self {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().copied());
        Self { pieces }
    }

    pub fn distance_to(&self, p: Complex64) -> f64 {
        self.pieces
            .iter()
            .map(|piece| piece.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn start(&self) -> Complex64 {
        self.pieces[0].point(0.0)
    }
}

/// Step and tolerance settings for [`track_fiber`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackingParams {
    /// Largest step, as a fraction of one loop piece.
    pub max_step: f64,
    /// Bound on root motion per step relative to the smallest root gap.
    pub motion_fraction: f64,
    pub newton_tol: f64,
    /// Smallest admissible root separation along the path.
    pub min_separation: f64,
    /// Smallest admissible step before giving up.
    pub min_step: f64,
}

impl Default for TrackingParams {
    fn default() -> Self {
        Self {
            max_step: 1.0 / 64.0,
            motion_fraction: 0.2,
            newton_tol: 1e-12,
            min_separation: 1e-9,
            min_step: 1e-12,
        }
    }
}

impl TrackingParams {
    pub fn halved(&self) -> Self {
        Self {
            max_step: self.max_step / 2.0,
            ..*self
        }
    }
}

/// Outcome of tracking one loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub permutation: Permutation,
    pub steps: usize,
    /// Largest `|p(w)|` left after any Newton correction.
    pub max_residual: f64,
}

/// Continues the fiber over `lp` and returns the induced permutation of the
/// basepoint fiber (sheet `i` ends on sheet `permutation(i)`).
pub fn track_fiber(
    model: &FiberModel,
    lp: &Loop,
    params: &TrackingParams,
    clearance: f64,
) -> Result<Track, TrackError> {
    for b in model.branch_points() {
        let distance = lp.distance_to(b);
        if distance < clearance {
            return Err(TrackError::InsufficientClearance {
                distance,
                clearance,
            });
        }
    }
    let start_roots = model.roots_at(lp.start())?;
    let mut roots = start_roots.clone();
    let mut steps = 0;
    let mut max_residual = 0.0f64;

    for piece in &lp.pieces {
        let mut sigma = 0.0;
        let mut h = params.max_step;
        while sigma < 1.0 {
            let step = h.min(1.0 - sigma);
            let s_old = piece.point(sigma);
            let s_new = piece.point(sigma + step);
            let gap = min_gap(&roots);
            if gap < params.min_separation {
                return Err(TrackError::PathTooClose {
                    separation: gap,
                    at: s_old,
                });
            }
            match corrector_step(model, &roots, s_old, s_new, gap, params) {
                Some((next, residual)) => {
                    roots = next;
                    max_residual = max_residual.max(residual);
                    sigma += step;
                    steps += 1;
                    h = (h * 1.5).min(params.max_step);
                }
                None => {
                    h /= 2.0;
                    if h < params.min_step {
                        return Err(TrackError::NoConvergence { at: s_old });
                    }
                }
            }
        }
    }

    let (permutation, mismatch) = match_roots(&start_roots, &roots);
    if mismatch > 1e-6 * (1.0 + start_roots.iter().map(|r| r.norm()).fold(0.0, f64::max)) {
        return Err(TrackError::MatchingFailed(mismatch));
    }
    Ok(Track {
        permutation,
        steps,
        max_residual,
    })
}

/// Euler predictor along `dw/ds = -(dp/ds)/(dp/dw)`, then Newton; `None` asks for a smaller step.
fn corrector_step(
    model: &FiberModel,
    roots: &[Complex64],
    s_old: Complex64,
    s_new: Complex64,
    gap: f64,
    params: &TrackingParams,
) -> Option<(Vec<Complex64>, f64)> {
    let (coeffs_old, dcoeffs) = model.coefficients(s_old);
    let (coeffs_new, _) = model.coefficients(s_new);
    let ds = s_new - s_old;
    let limit = params.motion_fraction * gap;
    let mut out = Vec::with_capacity(roots.len());
    let mut worst = 0.0f64;
    for &w in roots {
        let dw = -eval(&dcoeffs, w) / eval_derivative(&coeffs_old, w) * ds;
        if !dw.norm().is_finite() || dw.norm() > limit {
            return None;
        }
        let corrected = newton(&coeffs_new, w + dw, params.newton_tol)?;
        if (corrected - w).norm() > limit {
            return None;
        }
        worst = worst.max(eval(&coeffs_new, corrected).norm());
        out.push(corrected);
    }
    // every root moved less than 0.2 * gap, so no two can have landed on the same root
    Some((out, worst))
}

/// Minimal-total-distance assignment of `end` roots to `start` roots.
///
/// Returns the permutation sending start index `i` to the start index its
/// continued root landed on, and the largest matched distance.
fn match_roots(start: &[Complex64], end: &[Complex64]) -> (Permutation, f64) {
    let n = start.len();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let cost: f64 = (0..n).map(|i| (end[i] - start[p[i]]).norm()).sum();
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, p.to_vec()));
        }
    });
    let (_, images) = best.expect("at least one assignment");
    let worst = (0..n)
        .map(|i| (end[i] - start[images[i]]).norm())
        .fold(0.0, f64::max);
    (
        Permutation::from_images(images).expect("assignment is a bijection"),
        worst,
    )
}

fn permute(v: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, visit);
        v.swap(k, i);
    }
}
