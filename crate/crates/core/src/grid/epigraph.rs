use std::fmt;
use std::sync::Arc;

/// Geometric slack for the nonnegative-curvature check on sampled graphs.
pub const CURVATURE_SLACK: f64 = 1e-8;

type GraphFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Boundary graph `x_n = h(x')` of an epigraph `{x_n > h(x')}`.
#[derive(Clone)]
pub struct EpigraphSpec {
    graph: Arc<GraphFn>,
    slope_bound: f64,
    label: String,
}

impl fmt::Debug for EpigraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EpigraphSpec")
            .field("label", &self.label)
            .field("slope_bound", &self.slope_bound)
            .finish()
    }
}

impl EpigraphSpec {
    pub fn new<F>(graph: F, slope_bound: f64, label: impl Into<String>) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            graph: Arc::new(graph),
            slope_bound,
            label: label.into(),
        }
    }

    /// `h ≡ 0`.
    pub fn flat() -> Self {
        Self::new(|_| 0.0, 0.0, "flat")
    }

    /// `h(x') = κ |x'|^2 / 2`; the slope bound is for `|x'| <= radius`.
    pub fn paraboloid(kappa: f64, radius: f64) -> Self {
        Self::new(
            move |x: &[f64]| 0.5 * kappa * x.iter().map(|v| v * v).sum::<f64>(),
            kappa.abs() * radius,
            format!("paraboloid kappa={kappa}"),
        )
    }

    pub fn height(&self, x: &[f64]) -> f64 {
        (self.graph)(x)
    }

    pub fn slope_bound(&self) -> f64 {
        self.slope_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `|Dh(x')|` by centered differences.
    pub fn slope(&self, x: &[f64]) -> f64 {
        let d = 1e-6;
        let mut y = x.to_vec();
        let mut sq = 0.0;
        for a in 0..x.len() {
            y[a] = x[a] + d;
            let fp = self.height(&y);
            y[a] = x[a] - d;
            let fm = self.height(&y);
            y[a] = x[a];
            sq += ((fp - fm) / (2.0 * d)).powi(2);
        }
        sq.sqrt()
    }
}

/// Mean curvature `div(Dh / (1 + |Dh|^2)^{1/2})` of the graph at each point,
/// with convex `h` giving nonnegative values. Derivatives are taken by
/// fourth-order finite differences of the graph function.
pub fn epigraph_mean_curvature(spec: &EpigraphSpec, points: &[Vec<f64>]) -> Vec<f64> {
    points.iter().map(|x| mean_curvature_at(spec, x)).collect()
}

fn mean_curvature_at(spec: &EpigraphSpec, x: &[f64]) -> f64 {
    let m = x.len();
    if m == 0 {
        return 0.0;
    }
    let d = 1e-3;
    let mut y = x.to_vec();
    let mut eval = |shift: &[(usize, f64)]| {
        y.copy_from_slice(x);
        for &(a, s) in shift {
            y[a] += s;
        }
        spec.height(&y)
    };
    let center = eval(&[]);
    let mut grad = vec![0.0; m];
    let mut hess = vec![0.0; m * m];
    for a in 0..m {
        let p1 = eval(&[(a, d)]);
        let m1 = eval(&[(a, -d)]);
        let p2 = eval(&[(a, 2.0 * d)]);
        let m2 = eval(&[(a, -2.0 * d)]);
        grad[a] = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * d);
        hess[a * m + a] = (-p2 + 16.0 * p1 - 30.0 * center + 16.0 * m1 - m2) / (12.0 * d * d);
        for b in (a + 1)..m {
            let pp = eval(&[(a, d), (b, d)]);
            let pm = eval(&[(a, d), (b, -d)]);
            let mp = eval(&[(a, -d), (b, d)]);
            let mm = eval(&[(a, -d), (b, -d)]);
            let pp2 = eval(&[(a, 2.0 * d), (b, 2.0 * d)]);
            let pm2 = eval(&[(a, 2.0 * d), (b, -2.0 * d)]);
            let mp2 = eval(&[(a, -2.0 * d), (b, 2.0 * d)]);
            let mm2 = eval(&[(a, -2.0 * d), (b, -2.0 * d)]);
            let coarse = (pp2 - pm2 - mp2 + mm2) / (16.0 * d * d);
            let fine = (pp - pm - mp + mm) / (4.0 * d * d);
            // Richardson combination of the two cross stencils.
            let hab = (4.0 * fine - coarse) / 3.0;
            hess[a * m + b] = hab;
            hess[b * m + a] = hab;
        }
    }
    let grad_sq: f64 = grad.iter().map(|g| g * g).sum();
    let laplacian: f64 = (0..m).map(|a| hess[a * m + a]).sum();
    let mut hgg = 0.0;
    for a in 0..m {
        for b in 0..m {
            hgg += grad[a] * grad[b] * hess[a * m + b];
        }
    }
    ((1.0 + grad_sq) * laplacian - hgg) / (1.0 + grad_sq).powf(1.5)
}
