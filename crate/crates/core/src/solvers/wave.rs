//! Traveling waves `u(x - ct)` of `u_t = Δu - F'(u)`: heteroclinic orbits of
//! `u'' + c u' = F'(u)` found by shooting on `c`.
//!
//! Orientation: the profile leaves the well with the smaller `F` at `-∞` and
//! reaches the other well at `+∞`. With this choice the lower well invades
//! and `c >= 0`. For balanced wells the lower of the two states is taken as
//! the left limit.

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;

/// RK4 step, also the sample spacing of the returned profile.
pub const WAVE_STEP: f64 = 1e-3;
/// Distance from the left well at which shooting starts.
const MANIFOLD_OFFSET: f64 = 1e-6;
/// Gap to the right well below which the linear tail is spliced in.
const SPLICE_GAP: f64 = 1e-5;
const TAIL_TOL: f64 = 1e-6;
const MAX_SPEED: f64 = 64.0;
/// Upper limit on the length of one shot.
const MAX_SHOT: f64 = 400.0;

#[derive(Clone, Debug)]
pub struct TravelingWave {
    pub xi: Vec<f64>,
    pub profile: Vec<f64>,
    pub speed: f64,
    /// `(u(-∞), u(+∞))`.
    pub wells: (f64, f64),
    pub spacing: f64,
    /// Max of `|u'' + c u' - F'(u)|` over interior samples (centered
    /// differences).
    pub residual: f64,
}

impl TravelingWave {
    /// Linear interpolation of the profile; constant beyond the ends.
    pub fn value(&self, xi: f64) -> f64 {
        let n = self.profile.len();
        let s = (xi - self.xi[0]) / self.spacing;
        if s <= 0.0 {
            return self.profile[0];
        }
        let j = s.floor() as usize;
        if j + 1 >= n {
            return self.profile[n - 1];
        }
        let w = s - j as f64;
        (1.0 - w) * self.profile[j] + w * self.profile[j + 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shot {
    Overshoot,
    Undershoot,
    Landed,
}

struct Ode<'a> {
    nl: &'a Nonlinearity,
    c: f64,
}

impl Ode<'_> {
    fn rhs(&self, y: [f64; 2]) -> [f64; 2] {
        [y[1], self.nl.f1(y[0]) - self.c * y[1]]
    }

    fn rk4(&self, y: [f64; 2], h: f64) -> [f64; 2] {
        let add = |a: [f64; 2], b: [f64; 2], s: f64| [a[0] + s * b[0], a[1] + s * b[1]];
        let k1 = self.rhs(y);
        let k2 = self.rhs(add(y, k1, h / 2.0));
        let k3 = self.rhs(add(y, k2, h / 2.0));
        let k4 = self.rhs(add(y, k3, h));
        [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    }
}

/// Unstable rate at the left well and stable rate at the right well.
fn rates(nl: &Nonlinearity, c: f64, zl: f64, zr: f64) -> (f64, f64) {
    let lam = 0.5 * (-c + (c * c + 4.0 * nl.f2(zl)).sqrt());
    let mu = 0.5 * (-c - (c * c + 4.0 * nl.f2(zr)).sqrt());
    (lam, mu)
}

fn shoot(nl: &Nonlinearity, c: f64, zl: f64, zr: f64) -> Shot {
    let s = (zr - zl).signum();
    let (lam, _) = rates(nl, c, zl, zr);
    let ode = Ode { nl, c };
    let mut y = [zl + s * MANIFOLD_OFFSET, s * MANIFOLD_OFFSET * lam];
    let steps = (MAX_SHOT / WAVE_STEP) as usize;
    for _ in 0..steps {
        y = ode.rk4(y, WAVE_STEP);
        if s * (y[0] - zr) > 0.0 {
            return Shot::Overshoot;
        }
        if s * y[1] < 0.0 {
            return Shot::Undershoot;
        }
    }
    Shot::Landed
}

/// Bisection on `c`: too little damping overshoots the right well, too
/// much turns back before reaching it.
fn find_speed(nl: &Nonlinearity, zl: f64, zr: f64) -> Result<f64> {
    let mut width = 1.0;
    let (mut lo, mut hi) = loop {
        let (a, b) = (shoot(nl, -width, zl, zr), shoot(nl, width, zl, zr));
        if a == Shot::Landed {
            return Ok(-width);
        }
        if b == Shot::Landed {
            return Ok(width);
        }
        if a == Shot::Overshoot && b == Shot::Undershoot {
            break (-width, width);
        }
        width *= 2.0;
        if width > MAX_SPEED {
            return Err(Error::NoBracket {
                lo: -MAX_SPEED,
                hi: MAX_SPEED,
            });
        }
    };
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        match shoot(nl, mid, zl, zr) {
            Shot::Overshoot => lo = mid,
            Shot::Undershoot => hi = mid,
            Shot::Landed => return Ok(mid),
        }
    }
}

/// Crossing of `level` by the cubic Hermite interpolant on one step.
fn hermite_crossing(y0: [f64; 2], y1: [f64; 2], h: f64, level: f64) -> f64 {
    let eval = |t: f64| {
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0[0]
            + (t3 - 2.0 * t2 + t) * h * y0[1]
            + (-2.0 * t3 + 3.0 * t2) * y1[0]
            + (t3 - t2) * h * y1[1]
            - level
    };
    let (mut a, mut b) = (0.0, 1.0);
    let fa = eval(a);
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if (eval(m) < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b) * h
}

/// Solves for the wave between the two outermost local minima of `F` on
/// `[-halfwidth, halfwidth]`, centered so that the profile crosses the
/// midpoint of the wells at `ξ = 0`.
pub fn solve_traveling_wave(nl: &Nonlinearity, halfwidth: f64, tol: f64) -> Result<TravelingWave> {
    let minima = nl.local_minima();
    if minima.len() < 2 {
        return Err(Error::InvalidPotential(format!(
            "a traveling wave needs two wells, found {minima:?}"
        )));
    }
    if !(halfwidth > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "halfwidth {halfwidth} and tol {tol} must be positive"
        )));
    }
    let (a, b) = (minima[0], minima[minima.len() - 1]);
    let (zl, zr) = if nl.f(b) < nl.f(a) { (b, a) } else { (a, b) };
    let s = (zr - zl).signum();
    let mid = 0.5 * (zl + zr);
    let c = find_speed(nl, zl, zr)?;
    let (lam, mu) = rates(nl, c, zl, zr);
    let ode = Ode { nl, c };
    let h = WAVE_STEP;

    // Pass 1: local time of the midpoint crossing.
    let mut y = [zl + s * MANIFOLD_OFFSET, s * MANIFOLD_OFFSET * lam];
    let mut t = 0.0;
    let crossing = loop {
        let next = ode.rk4(y, h);
        if s * (next[0] - mid) >= 0.0 {
            break t + hermite_crossing(y, next, h, mid);
        }
        y = next;
        t += h;
        if t > MAX_SHOT {
            return Err(Error::TailNotConverged {
                side: "right",
                gap: (y[0] - zr).abs(),
            });
        }
    };

    // Grid ξ_j = -L + j h. The shot starts at ξ_start = -crossing; move the
    // start to the next grid point along the linear manifold.
    let n = (2.0 * halfwidth / h).round() as usize + 1;
    let xi: Vec<f64> = (0..n).map(|j| -halfwidth + j as f64 * h).collect();
    let xi_start = -crossing;
    let j0 = (((xi_start + halfwidth) / h).ceil().max(0.0)) as usize;
    if j0 >= n {
        return Err(Error::InvalidArgument(format!(
            "halfwidth {halfwidth} is shorter than the front ({crossing:.3})"
        )));
    }
    let eps = MANIFOLD_OFFSET * (lam * (xi[j0] - xi_start)).exp();
    let mut profile = vec![0.0; n];
    for j in 0..j0 {
        profile[j] = zl + s * eps * (lam * (xi[j] - xi[j0])).exp();
    }
    let mut y = [zl + s * eps, s * eps * lam];
    profile[j0] = y[0];
    let mut passed_mid = false;
    let mut j = j0;
    while j + 1 < n {
        if passed_mid && (zr - y[0]).abs() < SPLICE_GAP {
            break;
        }
        y = ode.rk4(y, h);
        j += 1;
        profile[j] = y[0];
        passed_mid |= s * (y[0] - mid) >= 0.0;
    }
    let splice = j;
    for k in splice + 1..n {
        profile[k] = zr + (profile[splice] - zr) * (mu * (xi[k] - xi[splice])).exp();
    }

    let left_gap = (profile[0] - zl).abs();
    if left_gap > TAIL_TOL {
        return Err(Error::TailNotConverged {
            side: "left",
            gap: left_gap,
        });
    }
    let right_gap = (profile[n - 1] - zr).abs();
    if right_gap > TAIL_TOL {
        return Err(Error::TailNotConverged {
            side: "right",
            gap: right_gap,
        });
    }

    let residual = (1..n - 1)
        .map(|j| {
            let d2 = (profile[j + 1] - 2.0 * profile[j] + profile[j - 1]) / (h * h);
            let d1 = (profile[j + 1] - profile[j - 1]) / (2.0 * h);
            (d2 + c * d1 - nl.f1(profile[j])).abs()
        })
        .fold(0.0, f64::max);
    if residual > tol {
        return Err(Error::ResidualTooLarge { residual, tol });
    }
    Ok(TravelingWave {
        xi,
        profile,
        speed: c,
        wells: (zl, zr),
        spacing: h,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_wave_is_standing_kink() {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        let w = solve_traveling_wave(&nl, 20.0, 1e-5).unwrap();
        assert!(w.speed.abs() <= 1e-8, "c = {}", w.speed);
        assert_eq!(w.wells, (-1.0, 1.0));
        let err =
            w.xi.iter()
                .zip(&w.profile)
                .map(|(x, u)| (u - (x / 2f64.sqrt()).tanh()).abs())
                .fold(0.0, f64::max);
        assert!(err <= 1e-6, "sup error {err}");
        assert!(w.profile.windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn imbalanced_speed_matches_closed_form() {
        // u = ±tanh(ξ/√2) solves u'' + c u' = (u^2-1)(u-β) with c = √2|β|.
        for beta in [0.3, -0.3, 0.6] {
            let nl = Nonlinearity::double_well(beta).unwrap();
            let w = solve_traveling_wave(&nl, 20.0, 1e-5).unwrap();
            assert!(
                (w.speed - 2f64.sqrt() * beta.abs()).abs() < 1e-8,
                "beta {beta}: c = {}",
                w.speed
            );
            let sign = if beta > 0.0 { 1.0 } else { -1.0 };
            let err =
                w.xi.iter()
                    .zip(&w.profile)
                    .map(|(x, u)| (u - sign * (x / 2f64.sqrt()).tanh()).abs())
                    .fold(0.0, f64::max);
            assert!(err <= 1e-6, "beta {beta}: sup error {err}");
        }
    }

    #[test]
    fn short_domain_reports_tail() {
        let nl = Nonlinearity::double_well(0.0).unwrap();
        assert!(matches!(
            solve_traveling_wave(&nl, 4.0, 1e-5),
            Err(Error::TailNotConverged { .. })
        ));
    }

    #[test]
    fn single_well_rejected() {
        let nl = Nonlinearity::polynomial(vec![0.0, 0.0, 1.0], (-2.0, 2.0)).unwrap();
        assert!(solve_traveling_wave(&nl, 10.0, 1e-5).is_err());
    }
}
