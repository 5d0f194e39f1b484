//! Admissible potentials `F >= 0` and the one-dimensional profile machinery
//! built from `H(u) = ∫ (2F)^{-1/2}`.
//!
//! All potentials handled here are polynomials. The balanced double well is
//! evaluated in product form so that `F` keeps full relative accuracy near
//! both wells; the imbalanced family is evaluated as `(u - z)^2 Q(u)` around
//! its zero well `z`.

use crate::error::{Error, Result};
use crate::quadrature;

/// Number of points used for the sign scans that locate zeros and extrema.
const SCAN_POINTS: usize = 20_000;

/// Values of `F` below this floor are treated as zeros by the quadrature.
pub const QUADRATURE_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PotentialKind {
    /// `F ≡ 0`: the plain heat / mean-curvature flow.
    Zero,
    /// Double well with `F'(u) = (u^2 - 1)(u - beta)`.
    DoubleWell { beta: f64 },
    /// A user-supplied polynomial.
    Polynomial,
}

/// `(F, F', F'')` at one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triple {
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
}

#[derive(Clone, Debug)]
pub struct Nonlinearity {
    kind: PotentialKind,
    /// `F(u) = Σ coeffs[k] u^k`.
    coeffs: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    /// `F(u) = (u - z)^2 Q(u)` for evaluation near the zero well.
    factored: Option<(f64, Vec<f64>)>,
    scale: f64,
    zero_set: Vec<f64>,
    f2_bound: f64,
    working_range: (f64, f64),
}

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// Divides `p` by `(u - z)`, discarding the remainder.
fn deflate(p: &[f64], z: f64) -> Vec<f64> {
    let n = p.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut q = vec![0.0; n - 1];
    let mut carry = 0.0;
    for k in (1..n).rev() {
        carry = p[k] + carry * z;
        q[k - 1] = carry;
    }
    q
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Roots of `f` on `[lo, hi]` found by a dense sign scan plus bisection.
fn scan_roots<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Vec<f64> {
    let step = (hi - lo) / SCAN_POINTS as f64;
    let mut roots: Vec<f64> = Vec::new();
    let mut prev_x = lo;
    let mut prev = f(lo);
    if prev == 0.0 {
        roots.push(lo);
    }
    for i in 1..=SCAN_POINTS {
        let x = lo + step * i as f64;
        let v = f(x);
        if v == 0.0 {
            roots.push(x);
        } else if prev != 0.0 && (v < 0.0) != (prev < 0.0) {
            roots.push(bisect(f, prev_x, x));
        }
        prev_x = x;
        prev = v;
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    roots
}

/// Max of `|p|` on `[lo, hi]` over endpoints and interior critical points.
fn abs_max_on(p: &[f64], lo: f64, hi: f64) -> f64 {
    let dp = derivative(p);
    let mut best = horner(p, lo).abs().max(horner(p, hi).abs());
    if dp.iter().any(|&c| c != 0.0) {
        for r in scan_roots(&|u| horner(&dp, u), lo, hi) {
            best = best.max(horner(p, r).abs());
        }
    }
    best
}

impl Nonlinearity {
    /// The bistable family with `F'(u) = (u^2 - 1)(u - beta)`, shifted so
    /// that `min F = 0`. At `beta = 0` this is `F(u) = (1 - u^2)^2 / 4`.
    pub fn double_well(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta.abs() >= 1.0 {
            return Err(Error::NotBistable(beta));
        }
        // Antiderivative of u^3 - beta u^2 - u + beta.
        let mut coeffs = vec![0.0, beta, -0.5, -beta / 3.0, 0.25];
        let (zero_set, factored) = if beta == 0.0 {
            coeffs[0] = 0.25;
            (vec![-1.0, 1.0], None)
        } else {
            let z = -beta.signum();
            coeffs[0] = -horner(&coeffs, z);
            let q = deflate(&deflate(&coeffs, z), z);
            (vec![z], Some((z, q)))
        };
        let mut nl = Self {
            kind: PotentialKind::DoubleWell { beta },
            d1: derivative(&coeffs),
            d2: derivative(&derivative(&coeffs)),
            coeffs,
            factored,
            scale: 1.0,
            zero_set,
            f2_bound: 0.0,
            working_range: (-2.0, 2.0),
        };
        nl.f2_bound = nl.compute_f2_bound();
        Ok(nl)
    }

    /// `F ≡ 0`.
    pub fn zero() -> Self {
        Self {
            kind: PotentialKind::Zero,
            coeffs: vec![0.0],
            d1: Vec::new(),
            d2: Vec::new(),
            factored: None,
            scale: 1.0,
            zero_set: Vec::new(),
            f2_bound: 0.0,
            working_range: (-2.0, 2.0),
        }
    }

    /// A custom polynomial potential `F(u) = Σ coeffs[k] u^k`, validated for
    /// nonnegativity on `range`.
    pub fn polynomial(coeffs: Vec<f64>, range: (f64, f64)) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPotential(
                "coefficient list must be nonempty and finite".into(),
            ));
        }
        if !(range.0 < range.1) {
            return Err(Error::InvalidPotential(format!(
                "working range [{}, {}] is empty",
                range.0, range.1
            )));
        }
        let mut nl = Self {
            kind: PotentialKind::Polynomial,
            d1: derivative(&coeffs),
            d2: derivative(&derivative(&coeffs)),
            coeffs,
            factored: None,
            scale: 1.0,
            zero_set: Vec::new(),
            f2_bound: 0.0,
            working_range: range,
        };
        nl.check_nonnegative()?;
        nl.zero_set = nl.detect_zero_set();
        nl.f2_bound = nl.compute_f2_bound();
        Ok(nl)
    }

    /// Same potential on a different working range.
    pub fn with_working_range(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidPotential(format!(
                "working range [{lo}, {hi}] is empty"
            )));
        }
        self.working_range = (lo, hi);
        self.check_nonnegative()?;
        if self.kind == PotentialKind::Polynomial {
            self.zero_set = self.detect_zero_set();
        } else {
            self.zero_set.retain(|&z| z >= lo && z <= hi);
        }
        self.f2_bound = self.compute_f2_bound();
        Ok(self)
    }

    /// `λ F` for `λ > 0`; zero set unchanged.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "potential scale must be positive, got {lambda}"
            )));
        }
        let mut nl = self.clone();
        nl.scale *= lambda;
        nl.f2_bound *= lambda;
        Ok(nl)
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn zero_set(&self) -> &[f64] {
        &self.zero_set
    }

    pub fn f2_bound(&self) -> f64 {
        self.f2_bound
    }

    pub fn working_range(&self) -> (f64, f64) {
        self.working_range
    }

    pub fn is_identically_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Coefficients of the unscaled polynomial `F`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c * self.scale).collect()
    }

    /// `F(u)` without the working-range check.
    pub fn f(&self, u: f64) -> f64 {
        let raw = match (self.kind, &self.factored) {
            (PotentialKind::Zero, _) => 0.0,
            (PotentialKind::DoubleWell { beta: 0.0 }, _) => {
                let w = (1.0 - u) * (1.0 + u);
                0.25 * w * w
            }
            (_, Some((z, q))) => (u - z) * (u - z) * horner(q, u),
            _ => horner(&self.coeffs, u),
        };
        self.scale * raw
    }

    /// `F'(u)` without the working-range check.
    pub fn f1(&self, u: f64) -> f64 {
        let raw = match self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::DoubleWell { beta } => (u - 1.0) * (u + 1.0) * (u - beta),
            PotentialKind::Polynomial => horner(&self.d1, u),
        };
        self.scale * raw
    }

    /// `F''(u)` without the working-range check.
    pub fn f2(&self, u: f64) -> f64 {
        let raw = match self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::DoubleWell { beta } => 3.0 * u * u - 2.0 * beta * u - 1.0,
            PotentialKind::Polynomial => horner(&self.d2, u),
        };
        self.scale * raw
    }

    /// Range-checked evaluation of the triple.
    pub fn evaluate(&self, u: f64) -> Result<Triple> {
        let (lo, hi) = self.working_range;
        if !(u >= lo && u <= hi) {
            return Err(Error::OutOfRange { u, lo, hi });
        }
        Ok(Triple {
            f: self.f(u),
            f1: self.f1(u),
            f2: self.f2(u),
        })
    }

    /// Strict local minimizers of `F` inside the working range, ascending.
    pub fn local_minima(&self) -> Vec<f64> {
        if self.is_identically_zero() {
            return Vec::new();
        }
        let (lo, hi) = self.working_range;
        scan_roots(&|u| self.f1(u), lo, hi)
            .into_iter()
            .filter(|&z| self.f2(z) > 0.0)
            .collect()
    }

    fn check_nonnegative(&self) -> Result<()> {
        let (lo, hi) = self.working_range;
        let n = 10_000;
        for i in 0..=n {
            let u = lo + (hi - lo) * i as f64 / n as f64;
            let v = self.f(u);
            if v < -1e-12 {
                return Err(Error::NegativePotential { u, value: v });
            }
        }
        Ok(())
    }

    /// Zeros of `F` are critical points (`F >= 0`), so they are the roots of
    /// `F'` at which `F` vanishes.
    fn detect_zero_set(&self) -> Vec<f64> {
        if self.is_identically_zero() {
            return Vec::new();
        }
        let (lo, hi) = self.working_range;
        let mut zeros: Vec<f64> = scan_roots(&|u| self.f1(u), lo, hi)
            .into_iter()
            .filter(|&z| self.f(z).abs() <= 1e-12)
            .collect();
        for end in [lo, hi] {
            if self.f(end).abs() <= 1e-14 && !zeros.iter().any(|z| (z - end).abs() < 1e-9) {
                zeros.push(end);
            }
        }
        zeros.sort_by(f64::total_cmp);
        zeros
    }

    fn compute_f2_bound(&self) -> f64 {
        if self.is_identically_zero() {
            return 0.0;
        }
        let (lo, hi) = self.working_range;
        if self.d2.is_empty() {
            return 0.0;
        }
        self.scale * abs_max_on(&self.d2, lo, hi)
    }
}

/// The quadrature `H(u) = ∫_{u0}^{u} (2F(s))^{-1/2} ds` on the interval
/// between two consecutive zeros of `F`, and its inverse `g = H^{-1}`.
///
/// The integral is tabulated on panels inside the region where
/// `F >= QUADRATURE_FLOOR`; beyond that the profile is continued by the
/// exponential approach to a nondegenerate well.
#[derive(Clone, Debug)]
pub struct ProfileQuadrature {
    nl: Nonlinearity,
    base: f64,
    interval: (f64, f64),
    cutoff: (f64, f64),
    knots: Vec<f64>,
    cumulative: Vec<f64>,
    tails: [Option<Tail>; 2],
}

#[derive(Clone, Copy, Debug)]
struct Tail {
    well: f64,
    rate: f64,
    u_edge: f64,
    nu_edge: f64,
}

const PANELS_PER_SIDE: usize = 512;

impl ProfileQuadrature {
    pub fn build(nl: &Nonlinearity, u0: f64) -> Result<Self> {
        let (lo, hi) = nl.working_range();
        if !(u0 > lo && u0 < hi) {
            return Err(Error::OutOfRange { u: u0, lo, hi });
        }
        if !(nl.f(u0) > QUADRATURE_FLOOR) {
            return Err(Error::SingularBasePoint(u0));
        }
        let left = nl
            .zero_set()
            .iter()
            .copied()
            .filter(|&z| z < u0)
            .fold(f64::NEG_INFINITY, f64::max);
        let right = nl
            .zero_set()
            .iter()
            .copied()
            .filter(|&z| z > u0)
            .fold(f64::INFINITY, f64::min);
        let interval = (left, right);

        // Locate the floor crossings between the base point and each end.
        let floor_gap = |u: f64| nl.f(u) - QUADRATURE_FLOOR;
        let cut_lo = if left.is_finite() {
            bisect(&floor_gap, left, u0)
        } else {
            lo
        };
        let cut_hi = if right.is_finite() {
            bisect(&floor_gap, u0, hi.min(right))
        } else {
            hi
        };
        let cut_lo = if floor_gap(cut_lo) < 0.0 {
            nudge_inside(&floor_gap, cut_lo, u0)
        } else {
            cut_lo
        };
        let cut_hi = if floor_gap(cut_hi) < 0.0 {
            nudge_inside(&floor_gap, cut_hi, u0)
        } else {
            cut_hi
        };

        let integrand = |s: f64| 1.0 / (2.0 * nl.f(s)).sqrt();
        let tol = 1e-15;
        // Panel ends from u0 to the cutoff: geometric in the distance to a
        // finite well, where the integrand grows like 1/|u - z|; uniform
        // otherwise.
        let knot = |well: f64, cut: f64, i: usize| -> f64 {
            if i == PANELS_PER_SIDE {
                return cut;
            }
            let t = i as f64 / PANELS_PER_SIDE as f64;
            if well.is_finite() {
                let (d0, d1) = (u0 - well, cut - well);
                well + d0 * (d1 / d0).powf(t)
            } else {
                u0 + (cut - u0) * t
            }
        };
        let mut knots = Vec::with_capacity(2 * PANELS_PER_SIDE + 1);
        let mut cumulative = Vec::with_capacity(2 * PANELS_PER_SIDE + 1);
        // Left of the base point, descending, then reversed.
        let mut acc = 0.0;
        let mut left_knots = vec![(u0, 0.0)];
        for i in 1..=PANELS_PER_SIDE {
            let a = knot(left, cut_lo, i - 1);
            let b = knot(left, cut_lo, i);
            acc += quadrature::integrate(&integrand, a, b, tol);
            left_knots.push((b, acc));
        }
        for &(u, h) in left_knots.iter().rev() {
            knots.push(u);
            cumulative.push(h);
        }
        acc = 0.0;
        for i in 1..=PANELS_PER_SIDE {
            let a = knot(right, cut_hi, i - 1);
            let b = knot(right, cut_hi, i);
            acc += quadrature::integrate(&integrand, a, b, tol);
            knots.push(b);
            cumulative.push(acc);
        }

        let make_tail = |well: f64, edge: f64, nu: f64| -> Option<Tail> {
            if !well.is_finite() {
                return None;
            }
            let curvature = nl.f2(well);
            (curvature > 0.0).then(|| Tail {
                well,
                rate: curvature.sqrt(),
                u_edge: edge,
                nu_edge: nu,
            })
        };
        let tails = [
            make_tail(left, cut_lo, cumulative[0]),
            make_tail(right, cut_hi, *cumulative.last().unwrap()),
        ];

        Ok(Self {
            nl: nl.clone(),
            base: u0,
            interval,
            cutoff: (cut_lo, cut_hi),
            knots,
            cumulative,
            tails,
        })
    }

    pub fn base_point(&self) -> f64 {
        self.base
    }

    /// The open interval between consecutive zeros of `F` (infinite ends
    /// when there is no zero on that side).
    pub fn valid_interval(&self) -> (f64, f64) {
        self.interval
    }

    /// Sub-interval where `F >= QUADRATURE_FLOOR` and `H` is tabulated.
    pub fn quadrature_interval(&self) -> (f64, f64) {
        self.cutoff
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    fn integrand(&self, s: f64) -> f64 {
        1.0 / (2.0 * self.nl.f(s)).sqrt()
    }

    fn panel_of(&self, u: f64) -> usize {
        let j = self.knots.partition_point(|&k| k <= u);
        j.clamp(1, self.knots.len() - 1) - 1
    }

    fn h_tabulated(&self, u: f64) -> f64 {
        let j = self.panel_of(u);
        self.cumulative[j] + quadrature::integrate(&|s| self.integrand(s), self.knots[j], u, 1e-15)
    }

    /// `H(u)`.
    pub fn h(&self, u: f64) -> Result<f64> {
        let (a, b) = self.interval;
        let (lo_cut, hi_cut) = self.cutoff;
        let outside = || Error::OutsideQuadrature { u, lo: a, hi: b };
        if !(u > a && u < b) {
            return Err(outside());
        }
        if u >= lo_cut && u <= hi_cut {
            return Ok(self.h_tabulated(u));
        }
        let tail = if u < lo_cut {
            self.tails[0]
        } else {
            self.tails[1]
        };
        let tail = tail.ok_or_else(outside)?;
        let ratio = ((tail.u_edge - tail.well) / (u - tail.well)).ln();
        if u < lo_cut {
            Ok(tail.nu_edge - ratio / tail.rate)
        } else {
            Ok(tail.nu_edge + ratio / tail.rate)
        }
    }

    /// `H'(u) = (2F(u))^{-1/2}`.
    pub fn h_prime(&self, u: f64) -> f64 {
        self.integrand(u)
    }

    /// `g(ν) = H^{-1}(ν)`.
    pub fn g(&self, nu: f64) -> Result<f64> {
        let nu_lo = self.cumulative[0];
        let nu_hi = *self.cumulative.last().unwrap();
        if nu < nu_lo || nu > nu_hi {
            let tail = if nu < nu_lo {
                self.tails[0]
            } else {
                self.tails[1]
            };
            return match tail {
                Some(t) => {
                    let decay = (-t.rate * (nu - t.nu_edge).abs()).exp();
                    Ok(t.well + (t.u_edge - t.well) * decay)
                }
                None => Err(Error::InvalidArgument(format!(
                    "nu = {nu} outside the range [{nu_lo}, {nu_hi}] of H"
                ))),
            };
        }
        let j = self
            .cumulative
            .partition_point(|&c| c <= nu)
            .clamp(1, self.knots.len() - 1)
            - 1;
        let (mut a, mut b) = (self.knots[j], self.knots[j + 1]);
        let (ca, cb) = (self.cumulative[j], self.cumulative[j + 1]);
        let mut u = if cb > ca {
            a + (b - a) * (nu - ca) / (cb - ca)
        } else {
            a
        };
        let scale = 1.0 + nu.abs();
        for _ in 0..100 {
            let residual = self.cumulative[j]
                + quadrature::integrate(&|s| self.integrand(s), self.knots[j], u, 1e-15)
                - nu;
            if residual.abs() <= 4e-16 * scale {
                break;
            }
            if residual > 0.0 {
                b = u;
            } else {
                a = u;
            }
            let newton = u - residual * (2.0 * self.nl.f(u)).sqrt();
            let next = if newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if (next - u).abs() <= 4.0 * f64::EPSILON * u.abs().max(f64::MIN_POSITIVE) {
                u = next;
                break;
            }
            u = next;
        }
        Ok(u)
    }

    /// `g'(ν) = (2F(g(ν)))^{1/2}`.
    pub fn g_prime(&self, nu: f64) -> Result<f64> {
        Ok((2.0 * self.nl.f(self.g(nu)?)).sqrt())
    }
}

fn nudge_inside<F: Fn(f64) -> f64>(gap: &F, from: f64, toward: f64) -> f64 {
    let mut x = from;
    for k in 1..=60 {
        x = from + (toward - from) * (k as f64 * 1e-12);
        if gap(x) >= 0.0 {
            return x;
        }
    }
    x
}

/// Convenience wrapper for [`ProfileQuadrature::build`].
pub fn build_quadrature(nl: &Nonlinearity, u0: f64) -> Result<ProfileQuadrature> {
    ProfileQuadrature::build(nl, u0)
}

/// The planar stationary solution `x ↦ g(<a, x> + α)`.
#[derive(Clone, Debug)]
pub struct ExactProfile {
    quadrature: ProfileQuadrature,
    direction: Vec<f64>,
    offset: f64,
}

impl ExactProfile {
    pub fn new(q: &ProfileQuadrature, direction: &[f64], offset: f64) -> Result<Self> {
        let norm = direction.iter().map(|a| a * a).sum::<f64>().sqrt();
        if direction.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitDirection(norm));
        }
        Ok(Self {
            quadrature: q.clone(),
            direction: direction.to_vec(),
            offset,
        })
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn quadrature(&self) -> &ProfileQuadrature {
        &self.quadrature
    }

    fn phase(&self, x: &[f64]) -> f64 {
        self.direction
            .iter()
            .zip(x)
            .map(|(a, xi)| a * xi)
            .sum::<f64>()
            + self.offset
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.quadrature
            .g(self.phase(x))
            .expect("profile phase outside the quadrature range")
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let slope = self
            .quadrature
            .g_prime(self.phase(x))
            .expect("profile phase outside the quadrature range");
        self.direction.iter().map(|a| a * slope).collect()
    }
}

/// Sampler `x ↦ g(<a, x> + α)` built from a quadrature.
pub fn exact_profile(
    q: &ProfileQuadrature,
    direction: &[f64],
    offset: f64,
) -> Result<ExactProfile> {
    ExactProfile::new(q, direction, offset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn balanced_well_values() {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let t = nl.evaluate(0.0).unwrap();
        assert_eq!((t.f, t.f1, t.f2), (0.25, 0.0, -1.0));
        let t = nl.evaluate(1.0).unwrap();
        assert_eq!((t.f, t.f1), (0.0, 0.0));
        assert_eq!(nl.evaluate(0.5).unwrap().f, 0.140625);
        assert_eq!(nl.zero_set(), &[-1.0, 1.0]);
        // max |3u^2 - 1| on [-2, 2]
        assert_eq!(nl.f2_bound(), 11.0);
    }

    #[test]
    fn rejects_non_bistable() {
        assert!(matches!(
            Nonlinearity::double_well(1.0),
            Err(Error::NotBistable(_))
        ));
        assert!(Nonlinearity::double_well(-1.5).is_err());
    }

    #[test]
    fn out_of_range_is_reported() {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        assert!(matches!(nl.evaluate(2.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn imbalanced_minimum_is_zero() {
        let nl = Nonlinearity::double_well(0.3).unwrap();
        // Dense-sample oracle for min F over [-1.5, 1.5].
        let min = (0..=300_000)
            .map(|i| nl.f(-1.5 + 3.0 * i as f64 / 300_000.0))
            .fold(f64::INFINITY, f64::min);
        assert!(min.abs() <= 1e-12, "min F = {min}");
        assert_eq!(nl.zero_set(), &[-1.0]);
        // F(1) - F(-1) = 4 beta / 3
        assert!((nl.f(1.0) - 0.4).abs() < 1e-14);
        let minima = nl.local_minima();
        assert_eq!(minima.len(), 2);
        assert!((minima[0] + 1.0).abs() < 1e-12 && (minima[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polynomial_matches_double_well() {
        let nl = Nonlinearity::polynomial(vec![0.25, 0.0, -0.5, 0.0, 0.25], (-2.0, 2.0)).unwrap();
        assert_eq!(nl.zero_set().len(), 2);
        assert!((nl.zero_set()[0] + 1.0).abs() < 1e-9);
        assert!((nl.f2_bound() - 11.0).abs() < 1e-9);
        for u in [-1.7, -0.3, 0.0, 0.8] {
            assert!((nl.f1(u) - (u * u * u - u)).abs() < 1e-14);
            assert!((nl.f2(u) - (3.0 * u * u - 1.0)).abs() < 1e-14);
        }
        assert!(Nonlinearity::polynomial(vec![-1.0, 0.0, 1.0], (-2.0, 2.0)).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for nl in [
            Nonlinearity::double_well(0.0).unwrap(),
            Nonlinearity::double_well(0.3).unwrap(),
            Nonlinearity::double_well(-0.7).unwrap(),
        ] {
            let d = 1e-5;
            for i in 0..=400 {
                let u = -1.9 + 3.8 * i as f64 / 400.0;
                let fd1 = (nl.f(u + d) - nl.f(u - d)) / (2.0 * d);
                let fd2 = (nl.f1(u + d) - nl.f1(u - d)) / (2.0 * d);
                assert!((fd1 - nl.f1(u)).abs() <= 1e-6 * (1.0 + nl.f1(u).abs()));
                assert!((fd2 - nl.f2(u)).abs() <= 1e-6 * (1.0 + nl.f2(u).abs()));
            }
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let q = build_quadrature(&nl, 0.0).unwrap();
        assert_eq!(q.h(0.0).unwrap(), 0.0);
        for u in [-0.95, -0.5, 0.25, 0.5, 0.9, 0.999] {
            let exact = SQRT_2 * f64::atanh(u);
            assert!((q.h(u).unwrap() - exact).abs() < 1e-12, "u = {u}");
        }
        assert!((q.h(0.5).unwrap() - 0.776_836_199_212_093_2).abs() < 1e-12);
        assert!((q.g(q.h(0.5).unwrap()).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn inverse_matches_tanh_including_tails() {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let q = build_quadrature(&nl, 0.0).unwrap();
        for i in 0..=240 {
            let nu = -12.0 + 0.1 * i as f64;
            let exact = (nu / SQRT_2).tanh();
            let got = q.g(nu).unwrap();
            assert!((got - exact).abs() < 1e-12, "nu = {nu}: {got} vs {exact}");
        }
    }

    #[test]
    fn singular_base_point_rejected() {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        assert!(matches!(
            build_quadrature(&nl, 1.0),
            Err(Error::SingularBasePoint(_))
        ));
        let q = build_quadrature(&nl, 0.0).unwrap();
        assert!(matches!(q.h(1.2), Err(Error::OutsideQuadrature { .. })));
    }

    #[test]
    fn exact_profile_equipartition_at_origin() {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let q = build_quadrature(&nl, 0.0).unwrap();
        let p = exact_profile(&q, &[1.0], 0.0).unwrap();
        assert!(p.value(&[0.0]).abs() < 1e-15);
        let grad = p.gradient(&[0.0]);
        assert!((grad[0] * grad[0] - 0.5).abs() < 1e-14);
        let shifted = exact_profile(&q, &[0.6, 0.8], 0.0).unwrap();
        let x = [0.6 * q.h(0.3).unwrap(), 0.8 * q.h(0.3).unwrap()];
        assert!((shifted.value(&x) - 0.3).abs() < 1e-12);
        assert!(matches!(
            exact_profile(&q, &[1.0, 1.0], 0.0),
            Err(Error::NonUnitDirection(_))
        ));
    }
}
