//! Segal–Bargmann transforms in one dimension.
//!
//! Wave functions are finite Hermite expansions. The A form is applied to
//! coefficients; the B and C forms are Gaussian convolutions evaluated after
//! shifting the contour to the real line, which turns them into Gaussian
//! expectations of polynomials that a Gauss–Hermite rule computes exactly.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::hermite_all;
use crate::holospace::{HoloFunction, SpaceSpec};
use crate::quadrature::{gauss_hermite, QuadratureRule};
use crate::scale::PlanckScale;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which L² space the Hermite coefficients refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    /// L²(ℝ, dx) with basis the normalized Hermite functions hₙ.
    Lebesgue,
    /// L²(ℝ, ρ_ℏ) with basis uₙ(y) = Heₙ(y/√ℏ)/√n!, the image of hₙ under
    /// the ground-state transform followed by y = √2 x.
    GaussianWeight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFunction {
    coeffs: Vec<Complex64>,
    scale: PlanckScale,
    representation: Representation,
}

impl WaveFunction {
    pub fn new(coeffs: Vec<Complex64>, scale: PlanckScale, representation: Representation) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("wave function needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("non-finite Hermite coefficient"));
        }
        Ok(WaveFunction {
            coeffs,
            scale,
            representation,
        })
    }

    pub fn lebesgue(coeffs: Vec<Complex64>, scale: PlanckScale) -> Result<Self> {
        WaveFunction::new(coeffs, scale, Representation::Lebesgue)
    }

    /// The n-th basis vector.
    pub fn basis(n: usize, scale: PlanckScale, representation: Representation) -> Self {
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[n] = ONE;
        WaveFunction {
            coeffs,
            scale,
            representation,
        }
    }

    pub fn ground_state(scale: PlanckScale) -> Self {
        WaveFunction::basis(0, scale, Representation::Lebesgue)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn scale(&self) -> PlanckScale {
        self.scale
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.scale != other.scale || self.representation != other.representation {
            return Err(Error::invalid("inner product across different spaces"));
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq().sqrt();
        if n == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        Ok(WaveFunction {
            coeffs: self.coeffs.iter().map(|c| c / n).collect(),
            ..self.clone()
        })
    }

    /// G_ℏ followed by y = √2 x: the same coefficients in the basis uₙ.
    pub fn ground_state_transform(&self) -> Result<Self> {
        if self.representation != Representation::Lebesgue {
            return Err(Error::invalid("ground-state transform expects a Lebesgue wave function"));
        }
        Ok(WaveFunction {
            representation: Representation::GaussianWeight,
            ..self.clone()
        })
    }

    /// Value at a real point by Hermite synthesis.
    pub fn eval(&self, x: f64) -> Complex64 {
        match self.representation {
            Representation::Lebesgue => {
                let h = hermite_all(self.coeffs.len(), x, self.scale);
                self.coeffs.iter().zip(h).map(|(c, v)| c * v).sum()
            }
            Representation::GaussianWeight => self.eval_polynomial(Complex64::new(x, 0.0)),
        }
    }

    /// Σ cₙ uₙ(y) at a complex point (GaussianWeight), or the polynomial part
    /// Σ cₙ hₙ/f₀ (Lebesgue).
    fn eval_polynomial(&self, y: Complex64) -> Complex64 {
        let vals = match self.representation {
            Representation::Lebesgue => hermite_ratio_all(self.coeffs.len(), y, self.scale),
            Representation::GaussianWeight => scaled_he_all(self.coeffs.len(), y, self.scale),
        };
        self.coeffs.iter().zip(vals).map(|(c, v)| c * v).sum()
    }
}

/// hₙ(x)/f₀(x) for n < count, at complex x.
pub fn hermite_ratio_all(count: usize, x: Complex64, scale: PlanckScale) -> Vec<Complex64> {
    let h = scale.value();
    let mut out = Vec::with_capacity(count);
    let mut prev = ZERO;
    let mut cur = ONE;
    for k in 0..count {
        out.push(cur);
        let kf = k as f64;
        let next = x * cur * (2.0 / (h * (kf + 1.0))).sqrt() - prev * (kf / (kf + 1.0)).sqrt();
        prev = cur;
        cur = next;
    }
    out
}

/// uₙ(y) = Heₙ(y/√ℏ)/√n! for n < count.
pub fn scaled_he_all(count: usize, y: Complex64, scale: PlanckScale) -> Vec<Complex64> {
    let s = y / scale.sqrt();
    let mut out = Vec::with_capacity(count);
    let mut prev = ZERO;
    let mut cur = ONE;
    for k in 0..count {
        out.push(cur);
        let kf = k as f64;
        let next = (s * cur - prev * kf.sqrt()) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    out
}

fn scale_of(space_t: PlanckScale) -> Result<SpaceSpec> {
    SpaceSpec::segal_bargmann(space_t, 1)
}

/// A_ℏψ as an element of ℋL²(ℂ, μ_ℏ): hₙ ↦ zⁿ/√(ℏⁿ n!).
pub fn transform_a(psi: &WaveFunction) -> Result<HoloFunction> {
    if psi.representation != Representation::Lebesgue {
        return Err(Error::invalid("A expects a Lebesgue wave function"));
    }
    let h = psi.scale.value();
    let mut ln_norm = 0.0;
    let coeffs = psi
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &c)| {
            if n > 0 {
                ln_norm += (h * n as f64).ln();
            }
            c * (-0.5 * ln_norm).exp()
        })
        .collect();
    HoloFunction::new(scale_of(psi.scale)?, coeffs)
}

/// Kernel of A_ℏ: (πℏ)^{-1/4} e^{(-z² + 2√2 xz - x²)/2ℏ}.
pub fn transform_a_kernel(z: Complex64, x: f64, scale: PlanckScale) -> Complex64 {
    let h = scale.value();
    ((-z * z + 2.0 * SQRT_2 * x * z - x * x) / (2.0 * h)).exp() * (PI * h).powf(-0.25)
}

/// The defining integral of A_ℏψ(z), evaluated literally on a rule over ℝ
/// with known density.
pub fn transform_a_integral(psi: &WaveFunction, z: Complex64, rule: &QuadratureRule<f64>) -> Result<Complex64> {
    if psi.representation != Representation::Lebesgue {
        return Err(Error::invalid("A expects a Lebesgue wave function"));
    }
    rule.integrate_lebesgue(|x| transform_a_kernel(z, x, psi.scale) * psi.eval(x))
}

/// A_ℏ* G(x) = ∫ conj(k(w, x)) G(w) μ_ℏ(w) dw on a μ_ℏ rule.
pub fn transform_a_adjoint<G>(g: G, x: f64, scale: PlanckScale, rule: &QuadratureRule<Complex64>) -> Complex64
where
    G: Fn(Complex64) -> Complex64,
{
    rule.integrate(|&w| transform_a_kernel(w, x, scale).conj() * g(w))
}

fn rule_for_degree(degree: usize, variance: f64) -> Result<QuadratureRule<f64>> {
    gauss_hermite(degree / 2 + 2, PlanckScale::new(variance)?)
}

/// B_ℏf(z) = ∫ ρ_ℏ(z - x) f(x) dx = E[f(z + s)], s ~ ρ_ℏ, exact on a
/// Gauss–Hermite rule because f is a polynomial in the GaussianWeight
/// representation.
pub fn transform_b(psi: &WaveFunction, z: Complex64) -> Result<Complex64> {
    if psi.representation != Representation::GaussianWeight {
        return Err(Error::invalid("B expects a GaussianWeight wave function"));
    }
    let rule = rule_for_degree(psi.degree(), psi.scale.value())?;
    Ok(rule.integrate(|&s| psi.eval_polynomial(z + s)))
}

/// B_ℏf(z) = e^{-z²/2ℏ} ∫ e^{zx/ℏ} f(x) ρ_ℏ(x) dx on a ρ_ℏ rule. Not exact:
/// the integrand carries e^{zx/ℏ}.
pub fn transform_b_alternate(psi: &WaveFunction, z: Complex64, rule: &QuadratureRule<f64>) -> Result<Complex64> {
    if psi.representation != Representation::GaussianWeight {
        return Err(Error::invalid("B expects a GaussianWeight wave function"));
    }
    let h = psi.scale.value();
    let inner: Complex64 = rule.integrate(|&x| (z * x / h).exp() * psi.eval_polynomial(Complex64::new(x, 0.0)));
    Ok((-z * z / (2.0 * h)).exp() * inner)
}

/// C_ℏψ(z) = ∫ ρ_ℏ(z - x) ψ(x) dx for Lebesgue ψ = f₀·P. Completing the
/// square gives (4πℏ)^{-1/4} e^{-z²/4ℏ} E[P(s + z/2)] with s ~ N(0, ℏ/2).
pub fn transform_c(psi: &WaveFunction, z: Complex64) -> Result<Complex64> {
    let rule = rule_for_degree(psi.degree(), psi.scale.value() / 2.0)?;
    transform_c_with(psi, z, &rule)
}

/// As [`transform_c`] with a caller-supplied N(0, ℏ/2) rule, which must
/// have at least deg ψ/2 + 1 nodes for exactness.
pub fn transform_c_with(psi: &WaveFunction, z: Complex64, rule: &QuadratureRule<f64>) -> Result<Complex64> {
    if psi.representation != Representation::Lebesgue {
        return Err(Error::invalid("C expects a Lebesgue wave function"));
    }
    let h = psi.scale.value();
    let half = z / 2.0;
    let e: Complex64 = rule.integrate(|&s| psi.eval_polynomial(half + s));
    Ok((4.0 * PI * h).powf(-0.25) * (-z * z / (4.0 * h)).exp() * e)
}

/// ψ(x) = (2πℏ)^{-1/2} ∫ C_ℏψ(x + ip) e^{-p²/2ℏ} dp, on a rule over p with
/// known density. The integrand decays like e^{-p²/4ℏ}, so a Gaussian rule
/// of variance 2ℏ fits it best.
pub fn invert_c<F>(c_psi: F, x: f64, scale: PlanckScale, rule: &QuadratureRule<f64>) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let h = scale.value();
    let norm = (2.0 * PI * h).sqrt();
    rule.integrate_lebesgue(|p| c_psi(Complex64::new(x, p)) * ((-p * p / (2.0 * h)).exp() / norm))
}

/// Default p-rule for [`invert_c`].
pub fn default_inversion_rule(scale: PlanckScale) -> Result<QuadratureRule<f64>> {
    gauss_hermite(80, PlanckScale::new(2.0 * scale.value())?)
}

/// C_ℏeₙ(z) for n < count, via (4πℏ)^{-1/4} e^{-z²/4ℏ} (z/√2)ⁿ/√(ℏⁿ n!).
pub fn c_basis_values(count: usize, z: Complex64, scale: PlanckScale) -> Vec<Complex64> {
    let h = scale.value();
    let w = z / SQRT_2;
    let mut out = Vec::with_capacity(count);
    let mut v = (4.0 * PI * h).powf(-0.25) * (-z * z / (4.0 * h)).exp();
    for n in 0..count {
        out.push(v);
        v *= w / (h * (n as f64 + 1.0)).sqrt();
    }
    out
}

/// ψ_z truncated to Hermite degree < truncation: cₙ = conj(C_ℏeₙ(z)), so
/// that ⟨ψ_z, f⟩ = C_ℏf(z).
pub fn coherent_state(z: Complex64, scale: PlanckScale, truncation: usize) -> Result<WaveFunction> {
    if truncation == 0 {
        return Err(Error::invalid("coherent state truncation must be ≥ 1"));
    }
    let coeffs = c_basis_values(truncation, z, scale).into_iter().map(|c| c.conj()).collect();
    WaveFunction::lebesgue(coeffs, scale)
}

/// Closed form ψ_z(x) = (2πℏ)^{-1/2} e^{-(z̄ - x)²/2ℏ}.
pub fn coherent_state_value(z: Complex64, x: f64, scale: PlanckScale) -> Complex64 {
    let h = scale.value();
    let d = z.conj() - x;
    (-d * d / (2.0 * h)).exp() / (2.0 * PI * h).sqrt()
}

fn check_normalized(psi: &WaveFunction) -> Result<()> {
    let n = psi.norm_sq();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("Husimi function needs a unit vector, ‖ψ‖² = {n}")));
    }
    if psi.representation != Representation::Lebesgue {
        return Err(Error::invalid("Husimi function expects a Lebesgue wave function"));
    }
    Ok(())
}

/// H_ψ(x, p) = |C_ℏψ(x - ip)|² (πℏ)^{-1/2} e^{-p²/ℏ}; the factor is the ν_ℏ
/// density at x - ip, which makes ∫H_ψ dx dp = ‖ψ‖² = 1. Equivalently
/// |A_ℏψ(w)|² e^{-|w|²/ℏ}/(2πℏ) with w = (x - ip)/√2, which is how it is
/// evaluated here.
pub fn husimi(psi: &WaveFunction, points: &[(f64, f64)]) -> Result<Vec<f64>> {
    check_normalized(psi)?;
    Ok(points.iter().map(|&(x, p)| husimi_unchecked(psi, x, p)).collect())
}

pub(crate) fn husimi_unchecked(psi: &WaveFunction, x: f64, p: f64) -> f64 {
    let h = psi.scale.value();
    let w = Complex64::new(x, -p) / SQRT_2;
    // tₙ = wⁿ/√(ℏⁿ n!) e^{-|w|²/2ℏ}
    let mut t = Complex64::new((-w.norm_sqr() / (2.0 * h)).exp(), 0.0);
    let mut acc = ZERO;
    for (n, &c) in psi.coeffs.iter().enumerate() {
        acc += c * t;
        t *= w / (h * (n as f64 + 1.0)).sqrt();
    }
    acc.norm_sqr() / (2.0 * PI * h)
}

/// Uniform phase-space grid, row-major in x then p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl PhaseGrid {
    /// Square grid of half-width `half_width`·√ℏ with n points per axis.
    pub fn centered(scale: PlanckScale, half_width: f64, n: usize) -> Self {
        let w = half_width * scale.sqrt();
        PhaseGrid {
            x_min: -w,
            x_max: w,
            nx: n,
            p_min: -w,
            p_max: w,
            np: n,
        }
    }

    fn step(lo: f64, hi: f64, n: usize) -> f64 {
        if n > 1 {
            (hi - lo) / (n - 1) as f64
        } else {
            0.0
        }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let dx = Self::step(self.x_min, self.x_max, self.nx);
        let dp = Self::step(self.p_min, self.p_max, self.np);
        let mut out = Vec::with_capacity(self.nx * self.np);
        for i in 0..self.nx {
            for j in 0..self.np {
                out.push((self.x_min + i as f64 * dx, self.p_min + j as f64 * dp));
            }
        }
        out
    }

    pub fn cell_area(&self) -> f64 {
        Self::step(self.x_min, self.x_max, self.nx) * Self::step(self.p_min, self.p_max, self.np)
    }
}

/// Σ H·cell area over the grid. For smooth Gaussian-decaying H the plain
/// sum is spectrally accurate; the truncation error at half-width W√ℏ is of
/// order e^{-W²/2} times a polynomial in W.
pub fn husimi_grid_mass(psi: &WaveFunction, grid: &PhaseGrid) -> Result<f64> {
    let values = husimi(psi, &grid.points())?;
    Ok(values.iter().sum::<f64>() * grid.cell_area())
}

/// |∫⟨f, ψ_z⟩⟨ψ_z, g⟩ ν_ℏ(z) dz - ⟨f, g⟩| on a ν_ℏ rule.
pub fn resolution_check(f: &WaveFunction, g: &WaveFunction, rule: &QuadratureRule<Complex64>) -> Result<f64> {
    if f.scale != g.scale || f.representation != Representation::Lebesgue || g.representation != Representation::Lebesgue {
        return Err(Error::invalid("resolution check needs two Lebesgue wave functions at one scale"));
    }
    let count = f.coeffs.len().max(g.coeffs.len());
    let integral: Complex64 = rule.integrate(|&z| {
        let basis = c_basis_values(count, z, f.scale);
        let cf: Complex64 = f.coeffs.iter().zip(&basis).map(|(c, b)| c * b).sum();
        let cg: Complex64 = g.coeffs.iter().zip(&basis).map(|(c, b)| c * b).sum();
        cf.conj() * cg
    });
    Ok((integral - f.inner(g)?).norm())
}

/// Finite-difference ∂̄ of z ↦ F(z) at z with step h, Richardson-extrapolated
/// from h and h/2 so the holomorphic error is O(h⁴).
pub fn cauchy_riemann_residual<F>(f: F, z: Complex64, h: f64) -> f64
where
    F: Fn(Complex64) -> Complex64,
{
    let dbar = |s: f64| {
        let fx = (f(z + s) - f(z - s)) / (2.0 * s);
        let fy = (f(z + Complex64::new(0.0, s)) - f(z - Complex64::new(0.0, s))) / (2.0 * s);
        (fx + Complex64::new(0.0, 1.0) * fy) / 2.0
    };
    ((4.0 * dbar(h / 2.0) - dbar(h)) / 3.0).norm()
}
