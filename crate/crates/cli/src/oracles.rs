//! Reference computations that share no code path with the quantities
//! they check.

use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use gevrey_core::boundary::AlmostAnalyticExtension;
use gevrey_core::testfun::BumpFunction;
use gevrey_core::GevreyParams;

/// `max_{0 <= p <= p_max} (p^σ ln h + p ln k - τ p^σ ln p)` and its
/// smallest maximizer, by direct enumeration.
pub fn brute_t(params: &GevreyParams, k: f64, p_max: u64) -> (f64, u64) {
    let mut best = (0.0, 0);
    for p in 1..=p_max {
        let pf = p as f64;
        let ps = pf.powf(params.sigma());
        let v = ps * params.h().ln() + pf * k.ln() - params.tau() * ps * pf.ln();
        if v > best.0 {
            best = (v, p);
        }
    }
    best
}

fn stencil(ext: &AlmostAnalyticExtension, z: &[Complex64], j: usize, h: f64) -> Complex64 {
    let at = |dx: f64, dy: f64| -> Complex64 {
        let mut p = z.to_vec();
        p[j] += Complex64::new(dx, dy);
        ext.evaluate(&p).expect("evaluation inside the tube")
    };
    let dx = (8.0 * (at(h, 0.0) - at(-h, 0.0)) - (at(2.0 * h, 0.0) - at(-2.0 * h, 0.0))) / (12.0 * h);
    let dy = (8.0 * (at(0.0, h) - at(0.0, -h)) - (at(0.0, 2.0 * h) - at(0.0, -2.0 * h))) / (12.0 * h);
    0.5 * (dx + Complex64::new(0.0, 1.0) * dy)
}

/// `∂/∂z̄_j` of the extension by five-point central differences at steps
/// `h` and `h/2` combined by one Richardson step.
pub fn wirtinger_fd(ext: &AlmostAnalyticExtension, z: &[Complex64], j: usize, h: f64) -> Complex64 {
    (16.0 * stencil(ext, z, j, 0.5 * h) - stencil(ext, z, j, h)) / 15.0
}

/// DFT magnitude of the sampled windowed unit step `φ(x_j) H(x_j) Δx`
/// (with `H(0) = 1/2` and `x = 0` on the grid) at frequency `ξ`.
///
/// Poisson summation splits the sum into the alias series of
/// `φ(0)/(iη)`, which is `(Δx/2i) cot(ξΔx/2)`, plus the smooth remainder
/// `R(η) = (1/(iη)) ∫_0^b φ'(x) e^{-ixη} dx` at `η = ξ + 2πm/Δx`, |m| <= 4.
pub struct StepOracle {
    dx: f64,
    nodes: Vec<f64>,
    weighted: Vec<f64>,
}

impl StepOracle {
    pub fn new(phi: &BumpFunction, dx: f64) -> Self {
        assert_eq!(phi.center(), &[0.0], "window centered at the jump");
        let (a, b) = (phi.r_plateau(), phi.axis_support());
        let rule = GaussLegendre::new(std::num::NonZeroUsize::new(32).unwrap());
        // fine enough for |η| up to 5 * 2π/Δx
        let eta_max = 10.0 * PI / dx;
        let panels = ((b - a) * eta_max / 8.0).ceil().max(8.0) as usize;
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(32 * panels);
        let mut weighted = Vec::with_capacity(32 * panels);
        for k in 0..panels {
            let mid = a + (k as f64 + 0.5) * width;
            for &(x, w) in rule.iter() {
                let x = mid + 0.5 * width * x;
                nodes.push(x);
                weighted.push(0.5 * width * w * phi.gradient(&[x])[0]);
            }
        }
        Self { dx, nodes, weighted }
    }

    fn remainder(&self, eta: f64) -> Complex64 {
        let s: Complex64 = self
            .nodes
            .iter()
            .zip(&self.weighted)
            .map(|(&x, &w)| Complex64::from_polar(w, -x * eta))
            .sum();
        s / Complex64::new(0.0, eta)
    }

    pub fn magnitude(&self, xi: f64) -> f64 {
        let half = 0.5 * xi * self.dx;
        let mut total = Complex64::new(0.0, -0.5 * self.dx * half.cos() / half.sin());
        for m in -4..=4 {
            total += self.remainder(xi + 2.0 * PI * m as f64 / self.dx);
        }
        total.norm()
    }
}

/// Round-off level of [`wirtinger_fd`] at `z`: the stencil weights sum to
/// about `3.3/h` in absolute value, applied to evaluation errors taken as
/// `100 ε |Φ|`.
pub fn wirtinger_fd_noise(ext: &AlmostAnalyticExtension, z: &[Complex64], h: f64) -> f64 {
    let phi = ext.evaluate(z).expect("evaluation inside the tube").norm();
    3.3 * 100.0 * f64::EPSILON * phi / h
}
