//! Numerical integration rules shared by the other modules.
//!
//! Every rule is a list of nodes with strictly positive weights and a
//! polynomial exactness guarantee. Gaussian rules come from the
//! Golub–Welsch construction: nodes are the eigenvalues of the Jacobi matrix
//! of the three-term recurrence, weights are reciprocal Christoffel sums of
//! the orthonormal polynomials at each node.

use std::f64::consts::PI;
use std::ops::{AddAssign, Mul};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scale::PlanckScale;

/// Largest Gauss–Hermite order whose extreme weights stay representable.
pub const MAX_HERMITE_NODES: usize = 300;

/// Default half-width of the real window of a ν_ℏ rule, in units of √ℏ.
pub const DEFAULT_NU_HALF_WIDTH: f64 = 12.0;

/// The measure a rule integrates against. Not serialized; a rule read back
/// from JSON carries [`Measure::Unspecified`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Measure {
    #[default]
    Unspecified,
    /// ρ_σ(x) = (2πσ)^{-1/2} e^{-x²/2σ} on ℝ.
    Gaussian { variance: f64 },
    /// Lebesgue measure on an interval.
    Interval { lo: f64, hi: f64 },
    /// μ_t(z) = (πt)^{-1} e^{-|z|²/t} on ℂ.
    ComplexGaussian { t: f64 },
    /// ν_ℏ(z) = (πℏ)^{-1/2} e^{-(Im z)²/ℏ} on the strip |Re z| ≤ half_width.
    Nu { hbar: f64, half_width: f64 },
    /// (1-|z|²)^a dA on the unit disk.
    Disk { a: f64 },
    /// dθ on the unit circle.
    Circle,
    /// Normalized Haar measure on SU(2) restricted to class functions.
    Su2Class,
    /// Normalized Haar measure on SU(2).
    Su2Haar,
}

impl Measure {
    /// Density of a measure on ℝ with respect to dx.
    pub fn line_density(&self, x: f64) -> Option<f64> {
        match *self {
            Measure::Gaussian { variance } => {
                Some((-x * x / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt())
            }
            Measure::Interval { .. } => Some(1.0),
            _ => None,
        }
    }

    /// Density of a measure on ℂ with respect to area measure.
    pub fn plane_density(&self, z: Complex64) -> Option<f64> {
        match *self {
            Measure::ComplexGaussian { t } => Some((-z.norm_sqr() / t).exp() / (PI * t)),
            Measure::Nu { hbar, .. } => Some((-z.im * z.im / hbar).exp() / (PI * hbar).sqrt()),
            Measure::Disk { a } => Some((1.0 - z.norm_sqr()).powf(a)),
            _ => None,
        }
    }
}

/// Which Gaussian weight a complex rule integrates against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexWeight {
    Mu,
    Nu,
}

impl std::str::FromStr for ComplexWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mu" => Ok(ComplexWeight::Mu),
            "nu" => Ok(ComplexWeight::Nu),
            other => Err(Error::invalid(format!("unknown weight tag {other:?}; expected mu or nu"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureRule<N> {
    pub nodes: Vec<N>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
    #[serde(skip)]
    pub measure: Measure,
}

impl<N> QuadratureRule<N> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&N, f64)> {
        self.nodes.iter().zip(self.weights.iter().copied())
    }

    /// Σ wᵢ f(nodeᵢ), summed in node order.
    pub fn integrate<T, F>(&self, mut f: F) -> T
    where
        F: FnMut(&N) -> T,
        T: Default + AddAssign + Mul<f64, Output = T>,
    {
        let mut acc = T::default();
        for (node, w) in self.iter() {
            acc += f(node) * w;
        }
        acc
    }

    /// Tensor product rule on pairs of nodes.
    pub fn product<M: Clone>(&self, other: &QuadratureRule<M>) -> QuadratureRule<(N, M)>
    where
        N: Clone,
    {
        let mut nodes = Vec::with_capacity(self.len() * other.len());
        let mut weights = Vec::with_capacity(self.len() * other.len());
        for (a, wa) in self.iter() {
            for (b, wb) in other.iter() {
                nodes.push((a.clone(), b.clone()));
                weights.push(wa * wb);
            }
        }
        QuadratureRule {
            nodes,
            weights,
            exact_degree: self.exact_degree.min(other.exact_degree),
            measure: Measure::Unspecified,
        }
    }
}

impl QuadratureRule<f64> {
    /// Σ wᵢ g(xᵢ)/ρ(xᵢ): integrates g against Lebesgue measure using the
    /// rule's own density. Fails for rules without a known line density.
    pub fn integrate_lebesgue<T, F>(&self, mut g: F) -> Result<T>
    where
        F: FnMut(f64) -> T,
        T: Default + AddAssign + Mul<f64, Output = T>,
    {
        let measure = self.measure;
        if measure.line_density(0.0).is_none() {
            return Err(Error::invalid("rule has no known density on the real line"));
        }
        let mut acc = T::default();
        for (&x, w) in self.iter() {
            let rho = measure.line_density(x).unwrap_or(1.0);
            acc += g(x) * (w / rho);
        }
        Ok(acc)
    }
}

impl QuadratureRule<Complex64> {
    /// Σ wᵢ g(zᵢ)/α(zᵢ): integrates g against area measure.
    pub fn integrate_area<T, F>(&self, mut g: F) -> Result<T>
    where
        F: FnMut(Complex64) -> T,
        T: Default + AddAssign + Mul<f64, Output = T>,
    {
        let measure = self.measure;
        if measure.plane_density(Complex64::new(0.0, 0.0)).is_none() {
            return Err(Error::invalid("rule has no known density on the plane"));
        }
        let mut acc = T::default();
        for (&z, w) in self.iter() {
            let alpha = measure.plane_density(z).unwrap_or(1.0);
            acc += g(z) * (w / alpha);
        }
        Ok(acc)
    }
}

/// Gauss rule from monic recurrence coefficients `alpha[0..n]`, `beta[1..n]`
/// (`beta[0]` unused) and total mass `mu0`.
fn golub_welsch(alpha: &[f64], beta: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = alpha.len();
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jacobi[(k, k)] = alpha[k];
        if k + 1 < n {
            let off = beta[k + 1].sqrt();
            jacobi[(k, k + 1)] = off;
            jacobi[(k + 1, k)] = off;
        }
    }
    let mut nodes: Vec<f64> = if n == 1 {
        vec![alpha[0]]
    } else {
        SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect()
    };
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let weights = nodes
        .iter()
        .map(|&x| {
            // orthonormal polynomials p̂_k(x); weight = mu0 / Σ p̂_k²
            let mut prev = 0.0;
            let mut cur = 1.0;
            let mut sum = 1.0;
            for k in 0..n - 1 {
                let sb_prev = if k == 0 { 0.0 } else { beta[k].sqrt() };
                let next = ((x - alpha[k]) * cur - sb_prev * prev) / beta[k + 1].sqrt();
                prev = cur;
                cur = next;
                sum += cur * cur;
            }
            mu0 / sum
        })
        .collect();
    (nodes, weights)
}

fn gauss_hermite_variance(n: usize, variance: f64) -> Result<QuadratureRule<f64>> {
    if n == 0 {
        return Err(Error::invalid("Gauss–Hermite rule needs n ≥ 1"));
    }
    if n > MAX_HERMITE_NODES {
        return Err(Error::invalid(format!(
            "Gauss–Hermite rule limited to n ≤ {MAX_HERMITE_NODES}, got {n}"
        )));
    }
    // probabilists' Hermite: α_k = 0, β_k = k
    let alpha = vec![0.0; n];
    let beta: Vec<f64> = (0..n).map(|k| k as f64).collect();
    let (mut x, mut w) = golub_welsch(&alpha, &beta, 1.0);

    // enforce exact reflection symmetry
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let xs = 0.5 * (x[j] - x[i]);
        let ws = 0.5 * (w[i] + w[j]);
        x[i] = -xs;
        x[j] = xs;
        w[i] = ws;
        w[j] = ws;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    let s = variance.sqrt();
    for xi in &mut x {
        *xi *= s;
    }
    Ok(QuadratureRule {
        nodes: x,
        weights: w,
        exact_degree: 2 * n - 1,
        measure: Measure::Gaussian { variance },
    })
}

/// n-point Gauss–Hermite rule for ρ_ℏ(x) = (2πℏ)^{-1/2} e^{-x²/2ℏ}.
pub fn gauss_hermite(n: usize, scale: PlanckScale) -> Result<QuadratureRule<f64>> {
    gauss_hermite_variance(n, scale.value())
}

/// n-point Gauss–Jacobi rule on [-1, 1] for (1-u)^α (1+u)^β.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<QuadratureRule<f64>> {
    if n == 0 {
        return Err(Error::invalid("Gauss–Jacobi rule needs n ≥ 1"));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::invalid(format!(
            "Jacobi exponents must exceed -1, got ({alpha}, {beta})"
        )));
    }
    let ab = alpha + beta;
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    a[0] = (beta - alpha) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        a[k] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
        b[k] = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
    }
    let mu0 = 2f64.powf(ab + 1.0) * (ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0) - ln_gamma(ab + 2.0)).exp();
    let (nodes, weights) = golub_welsch(&a, &b, mu0);
    Ok(QuadratureRule {
        nodes,
        weights,
        exact_degree: 2 * n - 1,
        measure: Measure::Unspecified,
    })
}

/// n-point Gauss–Legendre rule on [lo, hi].
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Result<QuadratureRule<f64>> {
    if !(hi > lo) {
        return Err(Error::invalid(format!("empty interval [{lo}, {hi}]")));
    }
    let base = gauss_jacobi(n, 0.0, 0.0)?;
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    Ok(QuadratureRule {
        nodes: base.nodes.iter().map(|u| mid + half * u).collect(),
        weights: base.weights.iter().map(|w| w * half).collect(),
        exact_degree: base.exact_degree,
        measure: Measure::Interval { lo, hi },
    })
}

/// Window and real-direction resolution of a ν_ℏ rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuWindow {
    /// Half-width W of the window in Re z, in units of √ℏ.
    pub half_width: f64,
    /// Gauss–Legendre order in Re z.
    pub real_nodes: usize,
}

impl Default for NuWindow {
    fn default() -> Self {
        NuWindow {
            half_width: DEFAULT_NU_HALF_WIDTH,
            real_nodes: 128,
        }
    }
}

/// Tensor rule on ℂ for μ_t or ν_ℏ.
///
/// For μ_t each coordinate carries an n-point Gauss–Hermite rule of variance
/// t/2, so z^a z̄^b is integrated exactly when a + b ≤ 2n-1. For ν_ℏ the
/// imaginary direction is Gauss–Hermite of variance ℏ/2 and the real
/// direction is Gauss–Legendre on the default window; the total mass is then
/// the window length 2W rather than infinity.
pub fn complex_gaussian(n: usize, scale: PlanckScale, weight: ComplexWeight) -> Result<QuadratureRule<Complex64>> {
    complex_gaussian_with(n, scale, weight, NuWindow::default())
}

pub fn complex_gaussian_with(
    n: usize,
    scale: PlanckScale,
    weight: ComplexWeight,
    window: NuWindow,
) -> Result<QuadratureRule<Complex64>> {
    let t = scale.value();
    let im_rule = gauss_hermite_variance(n, t / 2.0)?;
    let (re_nodes, re_weights, measure, exact) = match weight {
        ComplexWeight::Mu => {
            let r = gauss_hermite_variance(n, t / 2.0)?;
            (r.nodes, r.weights, Measure::ComplexGaussian { t }, r.exact_degree)
        }
        ComplexWeight::Nu => {
            if !(window.half_width > 0.0) || window.real_nodes == 0 {
                return Err(Error::invalid("ν window needs positive width and at least one node"));
            }
            let half = window.half_width * t.sqrt();
            let r = gauss_legendre(window.real_nodes, -half, half)?;
            (
                r.nodes,
                r.weights,
                Measure::Nu { hbar: t, half_width: half },
                im_rule.exact_degree.min(r.exact_degree),
            )
        }
    };
    let mut nodes = Vec::with_capacity(re_nodes.len() * im_rule.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (&x, &wx) in re_nodes.iter().zip(&re_weights) {
        for (&y, wy) in im_rule.iter() {
            nodes.push(Complex64::new(x, y));
            weights.push(wx * wy);
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        exact_degree: exact,
        measure,
    })
}

/// Rule for ∫_D f(z) (1-|z|²)^a dA: Gauss–Jacobi in s = |z|² times an
/// equispaced angular rule.
pub fn disk_rule(n_radial: usize, n_angular: usize, a: f64) -> Result<QuadratureRule<Complex64>> {
    if !(a > -1.0) {
        return Err(Error::invalid(format!("disk weight exponent must satisfy a > -1, got {a}")));
    }
    if n_radial == 0 || n_angular == 0 {
        return Err(Error::invalid("disk rule needs at least one radial and one angular node"));
    }
    // ∫_0^1 g(s)(1-s)^a ds with s = (u+1)/2
    let jac = gauss_jacobi(n_radial, a, 0.0)?;
    let scale = 2f64.powf(-a - 1.0);
    let dtheta = 2.0 * PI / n_angular as f64;
    let mut nodes = Vec::with_capacity(n_radial * n_angular);
    let mut weights = Vec::with_capacity(n_radial * n_angular);
    for (&u, wu) in jac.iter() {
        let r = (0.5 * (u + 1.0)).sqrt();
        for k in 0..n_angular {
            nodes.push(Complex64::from_polar(r, k as f64 * dtheta));
            // r dr dθ = ds dθ / 2
            weights.push(wu * scale * dtheta * 0.5);
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        exact_degree: (2 * n_radial - 1).min(n_angular - 1),
        measure: Measure::Disk { a },
    })
}

/// Equispaced rule for ∫_0^{2π} f(e^{iθ}) dθ; exact for e^{ikθ}, |k| < n.
pub fn circle_rule(n: usize) -> Result<QuadratureRule<Complex64>> {
    if n == 0 {
        return Err(Error::invalid("circle rule needs n ≥ 1"));
    }
    let dtheta = 2.0 * PI / n as f64;
    Ok(QuadratureRule {
        nodes: (0..n).map(|k| Complex64::from_polar(1.0, k as f64 * dtheta)).collect(),
        weights: vec![dtheta; n],
        exact_degree: n - 1,
        measure: Measure::Circle,
    })
}

/// Rule on the class angle θ ∈ (0, π) of SU(2) implementing
/// (2/π)∫₀^π f(θ) sin²θ dθ. Nodes θⱼ = jπ/(n+1) are Gauss–Chebyshev nodes of
/// the second kind in cos θ, so trigonometric polynomials of degree ≤ 2n-1
/// are integrated exactly.
pub fn su2_class_rule(n: usize) -> Result<QuadratureRule<f64>> {
    if n == 0 {
        return Err(Error::invalid("class rule needs n ≥ 1"));
    }
    let h = PI / (n as f64 + 1.0);
    let nodes: Vec<f64> = (1..=n).map(|j| j as f64 * h).collect();
    let weights = nodes.iter().map(|&th| 2.0 / (n as f64 + 1.0) * th.sin().powi(2)).collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        exact_degree: 2 * n - 1,
        measure: Measure::Su2Class,
    })
}

/// Lanczos approximation of ln Γ(x) for x > 0 (g = 7, n = 9).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hbar(v: f64) -> PlanckScale {
        PlanckScale::new(v).unwrap()
    }

    /// Trapezoid on a wide uniform grid; independent of any Gauss rule.
    fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        let mut s = 0.5 * (f(lo) + f(hi));
        for k in 1..n {
            s += f(lo + k as f64 * h);
        }
        s * h
    }

    #[test]
    fn gauss_hermite_single_node() {
        let r = gauss_hermite(1, hbar(1.0)).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_relative_eq!(r.weights[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gauss_hermite_rejects_zero() {
        assert!(matches!(gauss_hermite(0, hbar(1.0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn gauss_hermite_second_moment_matches_trapezoid() {
        // oracle: dense trapezoid of x² ρ_1(x) on [-20, 20]
        let oracle = trapezoid(|x| x * x * (-x * x / 2.0).exp() / (2.0 * PI).sqrt(), -20.0, 20.0, 40_000);
        assert_relative_eq!(oracle, 1.0, epsilon = 1e-12);
        let r = gauss_hermite(2, hbar(1.0)).unwrap();
        let v: f64 = r.integrate(|x| x * x);
        assert_relative_eq!(v, oracle, epsilon = 1e-12);
    }

    #[test]
    fn gauss_hermite_odd_moments_vanish() {
        for &h in &[0.5, 1.0, 2.0] {
            for n in 1..=40 {
                let r = gauss_hermite(n, hbar(h)).unwrap();
                // paired summation: reflected nodes cancel exactly
                let deg = 2 * n as i32 - 1;
                let mut paired = 0.0;
                for i in 0..n / 2 {
                    let j = n - 1 - i;
                    paired += r.weights[i] * r.nodes[i].powi(deg) + r.weights[j] * r.nodes[j].powi(deg);
                }
                if n % 2 == 1 {
                    paired += r.weights[n / 2] * r.nodes[n / 2].powi(deg);
                }
                assert_eq!(paired, 0.0, "n = {n}");
                let first: f64 = r.integrate(|x| *x);
                assert!(first.abs() < 1e-14 * h.sqrt());
            }
        }
    }

    #[test]
    fn gauss_hermite_even_moments_and_mass() {
        // E[x^{2k}] = (2k-1)!! ℏ^k
        for &h in &[0.5, 1.0, 2.0] {
            for n in [3usize, 10, 50, 200] {
                let r = gauss_hermite(n, hbar(h)).unwrap();
                assert!(r.weights.iter().all(|&w| w > 0.0));
                assert_relative_eq!(r.total_weight(), 1.0, max_relative = 1e-12);
                let mut dfact = 1.0;
                for k in 1..n.min(12) {
                    dfact *= (2 * k - 1) as f64;
                    let exact = dfact * h.powi(k as i32);
                    let got: f64 = r.integrate(|x| x.powi(2 * k as i32));
                    assert_relative_eq!(got, exact, max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn mu_rule_moment_table() {
        for &t in &[0.5, 1.0, 2.0] {
            let n = 8;
            let r = complex_gaussian(n, hbar(t), ComplexWeight::Mu).unwrap();
            assert_relative_eq!(r.total_weight(), 1.0, max_relative = 1e-12);
            let mut fact = 1.0;
            for a in 0..n {
                if a > 0 {
                    fact *= a as f64;
                }
                for b in 0..n {
                    if a + b > 2 * n - 1 {
                        continue;
                    }
                    let v: Complex64 = r.integrate(|z| z.powu(a as u32) * z.conj().powu(b as u32));
                    if a == b {
                        let exact = fact * t.powi(a as i32);
                        assert_relative_eq!(v.re, exact, max_relative = 1e-10);
                        assert!(v.im.abs() < 1e-10 * exact);
                    } else {
                        assert!(v.norm() < 1e-10 * (1.0 + t.powi((a + b) as i32)), "a={a} b={b} v={v}");
                    }
                }
            }
        }
    }

    #[test]
    fn mu_rule_examples() {
        let r = complex_gaussian(4, hbar(1.5), ComplexWeight::Mu).unwrap();
        let one: Complex64 = r.integrate(|_| Complex64::new(1.0, 0.0));
        let z2: Complex64 = r.integrate(|z| Complex64::new(z.norm_sqr(), 0.0));
        let z1: Complex64 = r.integrate(|z| *z);
        assert_relative_eq!(one.re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(z2.re, 1.5, epsilon = 1e-13);
        assert!(z1.norm() < 1e-14);
    }

    #[test]
    fn weight_tag_parsing() {
        assert_eq!("MU".parse::<ComplexWeight>().unwrap(), ComplexWeight::Mu);
        assert_eq!("nu".parse::<ComplexWeight>().unwrap(), ComplexWeight::Nu);
        assert!(matches!("sigma".parse::<ComplexWeight>(), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn nu_rule_integrates_gaussian_in_both_directions() {
        // ∫ e^{-x²/2ℏ} ν_ℏ dA = √(2πℏ)
        for &h in &[0.5, 1.0, 2.0] {
            let r = complex_gaussian(30, hbar(h), ComplexWeight::Nu).unwrap();
            let v: f64 = r.integrate(|z| (-z.re * z.re / (2.0 * h)).exp());
            assert_relative_eq!(v, (2.0 * PI * h).sqrt(), max_relative = 1e-12);
            let half = DEFAULT_NU_HALF_WIDTH * h.sqrt();
            assert_relative_eq!(r.total_weight(), 2.0 * half, max_relative = 1e-12);
        }
    }

    #[test]
    fn disk_rule_examples() {
        let r = disk_rule(8, 16, 0.0).unwrap();
        let area: f64 = r.integrate(|_| 1.0);
        assert_relative_eq!(area, PI, max_relative = 1e-13);
        let second: f64 = r.integrate(|z| z.norm_sqr());
        assert_relative_eq!(second, PI / 2.0, max_relative = 1e-13);
        let odd: Complex64 = r.integrate(|z| z * z.conj() * z.conj());
        assert!(odd.norm() < 1e-14);
    }

    #[test]
    fn disk_rule_weighted_moments() {
        // ‖zⁿ‖² = π Γ(n+1)Γ(a+1)/Γ(n+a+2)
        for &a in &[-0.5, 0.0, 1.0, 2.5] {
            let r = disk_rule(10, 24, a).unwrap();
            assert_relative_eq!(r.total_weight(), PI / (a + 1.0), max_relative = 1e-12);
            for n in 0..10 {
                let exact = PI * (ln_gamma(n as f64 + 1.0) + ln_gamma(a + 1.0) - ln_gamma(n as f64 + a + 2.0)).exp();
                let got: f64 = r.integrate(|z| z.norm_sqr().powi(n));
                assert_relative_eq!(got, exact, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn disk_rule_rejects_bad_exponent() {
        assert!(matches!(disk_rule(4, 4, -1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(disk_rule(4, 4, -2.0), Err(Error::InvalidArgument(_))));
        assert!(disk_rule(0, 4, 0.0).is_err());
    }

    fn character(doubled_l: u32, theta: f64) -> f64 {
        let d = doubled_l as f64 + 1.0;
        if theta.sin().abs() < 1e-300 {
            d
        } else {
            (d * theta).sin() / theta.sin()
        }
    }

    #[test]
    fn su2_class_rule_against_trapezoid_oracle() {
        // oracle: dense trapezoid of (2/π)∫ f sin²θ dθ
        let oracle = |f: &dyn Fn(f64) -> f64| {
            trapezoid(|th| 2.0 / PI * f(th) * th.sin().powi(2), 0.0, PI, 20_000)
        };
        let r = su2_class_rule(6).unwrap();
        assert_relative_eq!(r.total_weight(), 1.0, max_relative = 1e-14);
        assert!(r.nodes.iter().all(|&t| t > 0.0 && t < PI));

        let sq = |th: f64| character(1, th).powi(2);
        assert_relative_eq!(oracle(&sq), 1.0, epsilon = 1e-10);
        assert_relative_eq!(r.integrate(|&th| sq(th)), 1.0, epsilon = 1e-13);

        let chi1 = |th: f64| character(2, th);
        assert!(oracle(&chi1).abs() < 1e-10);
        assert!(r.integrate(|&th| chi1(th)).abs() < 1e-13);
    }

    #[test]
    fn su2_class_rule_schur_orthogonality() {
        let r = su2_class_rule(12).unwrap();
        for a in 0..8u32 {
            for b in 0..8u32 {
                let v: f64 = r.integrate(|&th| character(a, th) * character(b, th));
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-12, "χ_{a}/2 χ_{b}/2: {v}");
            }
        }
    }

    #[test]
    fn legendre_and_lebesgue_helper() {
        let r = gauss_legendre(5, 0.0, 2.0).unwrap();
        let v: f64 = r.integrate(|x| x.powi(9));
        assert_relative_eq!(v, 2f64.powi(10) / 10.0, max_relative = 1e-13);
        let g = gauss_hermite(40, hbar(0.5)).unwrap();
        let v: f64 = g.integrate_lebesgue(|x| (-x * x).exp()).unwrap();
        assert_relative_eq!(v, PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn rule_json_shape() {
        let r = gauss_hermite(2, hbar(1.0)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let obj = v.as_object().unwrap();
        let mut keys: Vec<_> = obj.keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, vec!["exact_degree", "nodes", "weights"]);
        let back: QuadratureRule<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back.nodes, r.nodes);
        assert_eq!(back.measure, Measure::Unspecified);
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut f = 1.0f64;
        for n in 1..30 {
            f *= n as f64;
            assert_relative_eq!(ln_gamma(n as f64 + 1.0), f.ln(), max_relative = 1e-13);
        }
        assert_relative_eq!(ln_gamma(0.5), PI.sqrt().ln(), max_relative = 1e-13);
    }
}
