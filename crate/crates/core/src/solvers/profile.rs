use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The integrand machinery `φ(s)` with `s = |Du|^2`, together with
/// `ξ(s) = 2sφ'(s) - φ(s)` and `Λ = ξ'`.
#[derive(Clone)]
pub struct QuasilinearProfile {
    name: String,
    phi: ScalarFn,
    phi1: ScalarFn,
    phi2: ScalarFn,
    xi: ScalarFn,
    lambda: ScalarFn,
}

impl fmt::Debug for QuasilinearProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuasilinearProfile")
            .field("name", &self.name)
            .finish()
    }
}

impl QuasilinearProfile {
    /// `φ(s) = 2((1+s)^{1/2} - 1)`: `φ' = (1+s)^{-1/2}`,
    /// `ξ(s) = 2 - 2(1+s)^{-1/2}`, `Λ(s) = (1+s)^{-3/2}`.
    pub fn minimal_surface() -> Self {
        Self {
            name: "minimal_surface".into(),
            phi: Arc::new(|s| 2.0 * ((1.0 + s).sqrt() - 1.0)),
            phi1: Arc::new(|s| 1.0 / (1.0 + s).sqrt()),
            phi2: Arc::new(|s| {
                let r = 1.0 / (1.0 + s).sqrt();
                -0.5 * r * r * r
            }),
            xi: Arc::new(|s| 2.0 - 2.0 / (1.0 + s).sqrt()),
            lambda: Arc::new(|s| {
                let r = 1.0 / (1.0 + s).sqrt();
                r * r * r
            }),
        }
    }

    /// `φ(s) = s`, the Laplacian: `ξ(s) = s`, `Λ ≡ 1`.
    pub fn identity() -> Self {
        Self {
            name: "identity".into(),
            phi: Arc::new(|s| s),
            phi1: Arc::new(|_| 1.0),
            phi2: Arc::new(|_| 0.0),
            xi: Arc::new(|s| s),
            lambda: Arc::new(|_| 1.0),
        }
    }

    /// Profile from `φ` and its first two derivatives; `ξ` and `Λ` are
    /// derived.
    pub fn from_phi<P, P1, P2>(name: impl Into<String>, phi: P, phi1: P1, phi2: P2) -> Self
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        P1: Fn(f64) -> f64 + Send + Sync + 'static,
        P2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let phi: ScalarFn = Arc::new(phi);
        let phi1: ScalarFn = Arc::new(phi1);
        let phi2: ScalarFn = Arc::new(phi2);
        let xi = {
            let (phi, phi1) = (Arc::clone(&phi), Arc::clone(&phi1));
            Arc::new(move |s: f64| 2.0 * s * phi1(s) - phi(s))
        };
        let lambda = {
            let (phi1, phi2) = (Arc::clone(&phi1), Arc::clone(&phi2));
            Arc::new(move |s: f64| phi1(s) + 2.0 * s * phi2(s))
        };
        Self {
            name: name.into(),
            phi,
            phi1,
            phi2,
            xi,
            lambda,
        }
    }

    /// Same profile with `ξ` replaced; used to build test doubles.
    pub fn with_xi<X>(mut self, name: impl Into<String>, xi: X) -> Self
    where
        X: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.name = name.into();
        self.xi = Arc::new(xi);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn phi(&self, s: f64) -> f64 {
        (self.phi)(s)
    }

    pub fn phi1(&self, s: f64) -> f64 {
        (self.phi1)(s)
    }

    pub fn phi2(&self, s: f64) -> f64 {
        (self.phi2)(s)
    }

    pub fn xi(&self, s: f64) -> f64 {
        (self.xi)(s)
    }

    pub fn lambda(&self, s: f64) -> f64 {
        (self.lambda)(s)
    }

    /// Samples `[0, s_max]` and checks `ξ = 2sφ' - φ` and `Λ > 0`.
    pub fn check(&self, s_max: f64) -> Result<()> {
        let n = 256;
        for i in 0..=n {
            let s = s_max * i as f64 / n as f64;
            let expected = 2.0 * s * self.phi1(s) - self.phi(s);
            if (self.xi(s) - expected).abs() > 1e-12 * (1.0 + expected.abs()) {
                return Err(Error::InvalidArgument(format!(
                    "profile {}: xi({s}) = {} but 2s phi' - phi = {expected}",
                    self.name,
                    self.xi(s)
                )));
            }
            if !(self.lambda(s) > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "profile {}: Lambda({s}) = {} is not positive",
                    self.name,
                    self.lambda(s)
                )));
            }
            if !(self.phi1(s) > 0.0) {
                return Err(Error::DegenerateProfile {
                    s,
                    value: self.phi1(s),
                });
            }
        }
        Ok(())
    }
}

/// The minimal-surface profile.
pub fn make_minimal_surface_profile() -> QuasilinearProfile {
    QuasilinearProfile::minimal_surface()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_surface_values() {
        let p = make_minimal_surface_profile();
        assert_eq!(p.xi(0.0), 0.0);
        assert!((p.xi(3.0) - 1.0).abs() < 1e-15);
        assert_eq!(p.lambda(0.0), 1.0);
        assert_eq!(p.phi(0.0), 0.0);
        p.check(100.0).unwrap();
    }

    #[test]
    fn derived_profile_agrees_with_closed_forms() {
        let derived = QuasilinearProfile::from_phi(
            "ms",
            |s| 2.0 * ((1.0 + s).sqrt() - 1.0),
            |s| 1.0 / (1.0 + s).sqrt(),
            |s| -0.5 / (1.0 + s).powf(1.5),
        );
        let closed = QuasilinearProfile::minimal_surface();
        for i in 0..100 {
            let s = 0.37 * i as f64;
            assert!((derived.xi(s) - closed.xi(s)).abs() < 1e-14);
            assert!((derived.lambda(s) - closed.lambda(s)).abs() < 1e-14);
        }
        // Λ = ξ' by finite differences.
        for i in 1..50 {
            let s = 0.2 * i as f64;
            let fd = (closed.xi(s + 1e-6) - closed.xi(s - 1e-6)) / 2e-6;
            assert!((fd - closed.lambda(s)).abs() < 1e-8);
        }
    }

    #[test]
    fn corrupted_xi_fails_check() {
        let bad = QuasilinearProfile::minimal_surface()
            .with_xi("negated", |s| -(2.0 - 2.0 / (1.0 + s).sqrt()));
        assert!(bad.check(4.0).is_err());
        QuasilinearProfile::identity().check(10.0).unwrap();
    }
}
