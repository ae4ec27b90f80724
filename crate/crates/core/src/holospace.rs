//! Holomorphic L² spaces with monomial orthogonal bases and their
//! reproducing kernels.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::scale::PlanckScale;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which space, with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceKind {
    /// ℋL²(ℂᵈ, μ_t)
    SegalBargmann { t: PlanckScale },
    /// Unweighted Bergman space of the unit disk.
    Bergman,
    /// Bergman space of the disk with weight (1-|z|²)^a.
    WeightedBergman { a: f64 },
    /// Hardy space of the disk, ‖F‖² = sup_r ∫|F(re^{iθ})|² dθ.
    Hardy,
    /// ℋL²(ℂᵈ, ν_ℏ). Monomials are not in this space, so norms are only
    /// available through quadrature.
    Nu { hbar: PlanckScale },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpaceSpec")]
pub struct SpaceSpec {
    #[serde(flatten)]
    kind: SpaceKind,
    dim: usize,
}

#[derive(Deserialize)]
struct RawSpaceSpec {
    #[serde(flatten)]
    kind: SpaceKind,
    dim: usize,
}

impl TryFrom<RawSpaceSpec> for SpaceSpec {
    type Error = Error;

    fn try_from(raw: RawSpaceSpec) -> Result<Self> {
        SpaceSpec::new(raw.kind, raw.dim)
    }
}

impl SpaceSpec {
    pub fn new(kind: SpaceKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be ≥ 1"));
        }
        match kind {
            SpaceKind::WeightedBergman { a } if !(a > -1.0) || !a.is_finite() => {
                return Err(Error::invalid(format!("weighted Bergman exponent must satisfy a > -1, got {a}")))
            }
            SpaceKind::Bergman | SpaceKind::WeightedBergman { .. } | SpaceKind::Hardy if dim != 1 => {
                return Err(Error::invalid("disk spaces are one-dimensional"))
            }
            _ => {}
        }
        Ok(SpaceSpec { kind, dim })
    }

    pub fn segal_bargmann(t: PlanckScale, dim: usize) -> Result<Self> {
        SpaceSpec::new(SpaceKind::SegalBargmann { t }, dim)
    }

    pub fn bergman() -> Self {
        SpaceSpec {
            kind: SpaceKind::Bergman,
            dim: 1,
        }
    }

    pub fn weighted_bergman(a: f64) -> Result<Self> {
        SpaceSpec::new(SpaceKind::WeightedBergman { a }, 1)
    }

    pub fn hardy() -> Self {
        SpaceSpec {
            kind: SpaceKind::Hardy,
            dim: 1,
        }
    }

    pub fn nu(hbar: PlanckScale, dim: usize) -> Result<Self> {
        SpaceSpec::new(SpaceKind::Nu { hbar }, dim)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True for spaces of functions on the unit disk.
    pub fn on_disk(&self) -> bool {
        matches!(self.kind, SpaceKind::Bergman | SpaceKind::WeightedBergman { .. } | SpaceKind::Hardy)
    }

    /// Bergman spaces are weighted Bergman spaces with a = 0.
    pub fn disk_weight(&self) -> Option<f64> {
        match self.kind {
            SpaceKind::Bergman => Some(0.0),
            SpaceKind::WeightedBergman { a } => Some(a),
            _ => None,
        }
    }

    fn check_point(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::invalid(format!("point has {} coordinates, space has dimension {}", z.len(), self.dim)));
        }
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("point has non-finite coordinates"));
        }
        if self.on_disk() && z[0].norm() >= 1.0 {
            return Err(Error::invalid(format!("point {} lies outside the unit disk", z[0])));
        }
        Ok(())
    }

    /// ln ‖zⁿ‖² for n = 0..=degree along one axis, or `None` for ν_ℏ.
    pub fn ln_monomial_norms(&self, degree: usize) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(degree + 1);
        match self.kind {
            SpaceKind::SegalBargmann { t } => {
                let lt = t.value().ln();
                let mut acc = 0.0;
                out.push(0.0);
                for n in 1..=degree {
                    acc += (n as f64).ln() + lt;
                    out.push(acc);
                }
            }
            SpaceKind::Bergman | SpaceKind::WeightedBergman { .. } => {
                let a = self.disk_weight().unwrap_or(0.0);
                let mut acc = (PI / (a + 1.0)).ln();
                out.push(acc);
                for n in 1..=degree {
                    let nf = n as f64;
                    acc += (nf / (nf + a + 1.0)).ln();
                    out.push(acc);
                }
            }
            SpaceKind::Hardy => out.resize(degree + 1, (2.0 * PI).ln()),
            SpaceKind::Nu { .. } => return None,
        }
        Some(out)
    }

    /// ‖zⁿ‖² for a single multi-index.
    pub fn monomial_norm_sq(&self, n: &[usize]) -> Option<f64> {
        let top = n.iter().copied().max().unwrap_or(0);
        let table = self.ln_monomial_norms(top)?;
        Some(n.iter().map(|&k| table[k]).sum::<f64>().exp())
    }
}

/// Dense Taylor coefficients c_n for multi-indices with every entry ≤ degree,
/// stored row-major (the last axis varies fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHoloFunction")]
pub struct HoloFunction {
    space: SpaceSpec,
    degree: usize,
    coeffs: Vec<Complex64>,
}

#[derive(Deserialize)]
struct RawHoloFunction {
    space: SpaceSpec,
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TryFrom<RawHoloFunction> for HoloFunction {
    type Error = Error;

    fn try_from(raw: RawHoloFunction) -> Result<Self> {
        if raw.space.dim > 4 {
            return Err(Error::invalid("dimension above 4 is not supported"));
        }
        let len = (raw.degree + 1)
            .checked_pow(raw.space.dim as u32)
            .ok_or_else(|| Error::invalid("coefficient tensor too large"))?;
        if len != raw.coeffs.len() {
            return Err(Error::invalid(format!("expected {len} coefficients, got {}", raw.coeffs.len())));
        }
        if raw.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        Ok(HoloFunction {
            space: raw.space,
            degree: raw.degree,
            coeffs: raw.coeffs,
        })
    }
}

impl HoloFunction {
    /// One-variable function from c_0..c_M.
    pub fn new(space: SpaceSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if space.dim != 1 {
            return Err(Error::invalid("HoloFunction::new is for one variable; use from_tensor"));
        }
        if coeffs.is_empty() {
            return Err(Error::invalid("need at least one coefficient"));
        }
        Ok(HoloFunction {
            space,
            degree: coeffs.len() - 1,
            coeffs,
        })
    }

    /// Function from a dense row-major tensor of (degree+1)^d coefficients.
    pub fn from_tensor(space: SpaceSpec, degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = (degree + 1).pow(space.dim as u32);
        if coeffs.len() != expected {
            return Err(Error::invalid(format!("expected {expected} coefficients, got {}", coeffs.len())));
        }
        Ok(HoloFunction { space, degree, coeffs })
    }

    pub fn zero(space: SpaceSpec, degree: usize) -> Self {
        HoloFunction {
            space,
            degree,
            coeffs: vec![ZERO; (degree + 1).pow(space.dim as u32)],
        }
    }

    pub fn constant(space: SpaceSpec, c: Complex64) -> Self {
        let mut f = HoloFunction::zero(space, 0);
        f.coeffs[0] = c;
        f
    }

    /// zⁿ for a multi-index n.
    pub fn monomial(space: SpaceSpec, n: &[usize]) -> Result<Self> {
        if n.len() != space.dim {
            return Err(Error::invalid("multi-index length must equal the dimension"));
        }
        let degree = n.iter().copied().max().unwrap_or(0);
        let mut f = HoloFunction::zero(space, degree);
        let idx = f.flat_index(n);
        f.coeffs[idx] = ONE;
        Ok(f)
    }

    /// zⁿ/‖zⁿ‖.
    pub fn normalized_monomial(space: SpaceSpec, n: &[usize]) -> Result<Self> {
        let norm = space
            .monomial_norm_sq(n)
            .ok_or_else(|| Error::UnsupportedOperation("monomials have no norm in this space".into()))?;
        let mut f = HoloFunction::monomial(space, n)?;
        for c in &mut f.coeffs {
            *c /= norm.sqrt();
        }
        Ok(f)
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn flat_index(&self, n: &[usize]) -> usize {
        n.iter().fold(0, |acc, &k| acc * (self.degree + 1) + k)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let m1 = self.degree + 1;
        let mut out = vec![0; self.space.dim];
        for slot in out.iter_mut().rev() {
            *slot = flat % m1;
            flat /= m1;
        }
        out
    }

    /// Coefficient of zⁿ; zero beyond the stored degree.
    pub fn coefficient(&self, n: &[usize]) -> Complex64 {
        if n.len() != self.space.dim || n.iter().any(|&k| k > self.degree) {
            return ZERO;
        }
        self.coeffs[self.flat_index(n)]
    }

    /// Same function with stored degree raised to `degree` (zero padding).
    pub fn padded(&self, degree: usize) -> Self {
        if degree <= self.degree {
            return self.clone();
        }
        let mut out = HoloFunction::zero(self.space, degree);
        for (flat, &c) in self.coeffs.iter().enumerate() {
            let n = self.multi_index(flat);
            let idx = out.flat_index(&n);
            out.coeffs[idx] = c;
        }
        out
    }

    /// Same coefficients regarded as an element of another space.
    pub fn with_space(&self, space: SpaceSpec) -> Result<Self> {
        if space.dim != self.space.dim {
            return Err(Error::invalid("dimension mismatch"));
        }
        Ok(HoloFunction {
            space,
            degree: self.degree,
            coeffs: self.coeffs.clone(),
        })
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.space.dim {
            return Err(Error::invalid("point dimension mismatch"));
        }
        if self.space.dim == 1 {
            return Ok(horner(&self.coeffs, z[0]));
        }
        let powers: Vec<Vec<Complex64>> = z.iter().map(|&zk| power_table(zk, self.degree)).collect();
        let mut acc = ZERO;
        for (flat, &c) in self.coeffs.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            let n = self.multi_index(flat);
            let mut term = c;
            for (k, &nk) in n.iter().enumerate() {
                term *= powers[k][nk];
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Σ |c_n|² ‖zⁿ‖², summed in log space so high-degree terms neither
    /// overflow nor produce 0·∞.
    pub fn norm_sq(&self) -> Result<f64> {
        let table = self
            .space
            .ln_monomial_norms(self.degree)
            .ok_or_else(|| Error::UnsupportedOperation("no coefficient norm in this space; use norm_sq_by_quadrature".into()))?;
        let mut acc = 0.0;
        for (flat, &c) in self.coeffs.iter().enumerate() {
            let a = c.norm();
            if a == 0.0 {
                continue;
            }
            let ln_norm: f64 = self.multi_index(flat).iter().map(|&k| table[k]).sum();
            acc += (2.0 * a.ln() + ln_norm).exp();
        }
        Ok(acc)
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.norm_sq()?.sqrt())
    }

    /// ⟨self, other⟩, antilinear in the first slot.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.space != other.space {
            return Err(Error::invalid("inner product across different spaces"));
        }
        let degree = self.degree.max(other.degree);
        let a = self.padded(degree);
        let b = other.padded(degree);
        let table = self
            .space
            .ln_monomial_norms(degree)
            .ok_or_else(|| Error::UnsupportedOperation("no coefficient inner product in this space".into()))?;
        let mut acc = ZERO;
        for (flat, (&x, &y)) in a.coeffs.iter().zip(&b.coeffs).enumerate() {
            if x == ZERO || y == ZERO {
                continue;
            }
            let ln_norm: f64 = a.multi_index(flat).iter().map(|&k| table[k]).sum();
            acc += x.conj() * y * ln_norm.exp();
        }
        Ok(acc)
    }

    /// ∫ |F|² against the rule's own weight (one variable).
    pub fn norm_sq_by_quadrature(&self, rule: &QuadratureRule<Complex64>) -> Result<f64> {
        if self.space.dim != 1 {
            return Err(Error::invalid("quadrature norms are implemented for one variable"));
        }
        Ok(rule.integrate(|&z| horner(&self.coeffs, z).norm_sqr()))
    }

    fn map_coeffs(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        HoloFunction {
            space: self.space,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        self.map_coeffs(|c| c * s)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::invalid("difference across different spaces"));
        }
        let degree = self.degree.max(other.degree);
        let mut a = self.padded(degree);
        let b = other.padded(degree);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        Ok(a)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

fn power_table(z: Complex64, degree: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(degree + 1);
    let mut p = ONE;
    for _ in 0..=degree {
        out.push(p);
        p *= z;
    }
    out
}

fn dot_conj(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

/// Closed-form reproducing kernel K(z, w).
pub fn kernel(space: SpaceSpec, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    space.check_point(z)?;
    space.check_point(w)?;
    let s = dot_conj(z, w);
    Ok(match space.kind {
        SpaceKind::SegalBargmann { t } => (s / t.value()).exp(),
        SpaceKind::Bergman => 1.0 / (PI * (ONE - s) * (ONE - s)),
        SpaceKind::WeightedBergman { a } => (ONE - s).powf(-(a + 2.0)) * ((a + 1.0) / PI),
        SpaceKind::Hardy => 1.0 / (2.0 * PI * (ONE - s)),
        SpaceKind::Nu { hbar } => {
            let h = hbar.value();
            let mut acc = ONE;
            for (zk, wk) in z.iter().zip(w) {
                let d = zk - wk.conj();
                acc *= (-(d * d) / (4.0 * h)).exp() / (4.0 * PI * h).sqrt();
            }
            acc
        }
    })
}

/// Σ_{n ≤ M} e_n(z) conj(e_n(w)) over the orthonormal monomial basis, with
/// every multi-index entry ≤ M. For ν_ℏ the basis is the image of the
/// Hermite basis, (4πℏ)^{-1/4} e^{-z²/4ℏ} (z/√2)ⁿ/√(ℏⁿ n!).
pub fn kernel_from_basis(space: SpaceSpec, z: &[Complex64], w: &[Complex64], m: usize) -> Result<Complex64> {
    space.check_point(z)?;
    space.check_point(w)?;
    let mut acc = ONE;
    for (&zk, &wk) in z.iter().zip(w) {
        acc *= axis_partial_sum(space, zk, wk, m);
    }
    Ok(acc)
}

fn axis_partial_sum(space: SpaceSpec, z: Complex64, w: Complex64, m: usize) -> Complex64 {
    let x = z * w.conj();
    match space.kind {
        SpaceKind::Nu { hbar } => {
            let h = hbar.value();
            let pre = (-(z * z + w.conj() * w.conj()) / (4.0 * h)).exp() / (4.0 * PI * h).sqrt();
            // Σ (x/2ℏ)ⁿ/n!
            let mut term = ONE;
            let mut sum = ONE;
            for n in 1..=m {
                term *= x / (2.0 * h * n as f64);
                sum += term;
            }
            pre * sum
        }
        SpaceKind::SegalBargmann { t } => {
            let mut term = ONE;
            let mut sum = ONE;
            for n in 1..=m {
                term *= x / (t.value() * n as f64);
                sum += term;
            }
            sum
        }
        _ => {
            let table = space.ln_monomial_norms(m).unwrap_or_default();
            let mut pow = ONE;
            let mut sum = ZERO;
            for ln_norm in table {
                sum += pow / ln_norm.exp();
                pow *= x;
            }
            sum
        }
    }
}

/// The truncated kernel section K_M(·, z) as a function, i.e. Taylor
/// coefficients conj(z)ⁿ/‖zⁿ‖² for n ≤ M. One variable.
pub fn kernel_section(space: SpaceSpec, z: Complex64, m: usize) -> Result<HoloFunction> {
    space.check_point(&[z])?;
    let table = space
        .ln_monomial_norms(m)
        .ok_or_else(|| Error::UnsupportedOperation("kernel sections need a monomial basis".into()))?;
    let zb = z.conj();
    let mut pow = ONE;
    let mut coeffs = Vec::with_capacity(m + 1);
    for ln_norm in table {
        coeffs.push(pow / ln_norm.exp());
        pow *= zb;
    }
    HoloFunction::new(space, coeffs)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointwiseBound {
    pub value_sq: f64,
    pub kernel_diag: f64,
    pub norm_sq: f64,
    /// |F(z)|² / (K(z,z) ‖F‖²)
    pub ratio: f64,
    pub holds: bool,
}

/// Checks |F(z)|² ≤ K(z,z) ‖F‖².
pub fn pointwise_bound_check(space: SpaceSpec, f: &HoloFunction, z: &[Complex64]) -> Result<PointwiseBound> {
    if f.space != space {
        return Err(Error::invalid("function belongs to a different space"));
    }
    let value_sq = f.eval(z)?.norm_sqr();
    let kernel_diag = kernel(space, z, z)?.re;
    let norm_sq = f.norm_sq()?;
    let ratio = if norm_sq == 0.0 { 0.0 } else { value_sq / (kernel_diag * norm_sq) };
    Ok(PointwiseBound {
        value_sq,
        kernel_diag,
        norm_sq,
        ratio,
        holds: ratio <= 1.0 + 1e-10,
    })
}

/// ∫ K(z, w) g(w) α(w) dw by the rule, whose weights carry α. With
/// `kernel_truncation = Some(M)` the kernel is replaced by its basis partial
/// sum, a polynomial of degree M in w̄, so the rule's exactness decides the
/// error; with `None` the closed form is used.
pub fn project_at<G>(
    space: SpaceSpec,
    g: G,
    z: Complex64,
    rule: &QuadratureRule<Complex64>,
    kernel_truncation: Option<usize>,
) -> Result<Complex64>
where
    G: Fn(Complex64) -> Complex64,
{
    if space.dim != 1 {
        return Err(Error::invalid("projection by quadrature is implemented for one variable"));
    }
    space.check_point(&[z])?;
    let mut acc = ZERO;
    for (&w, weight) in rule.iter() {
        let k = match kernel_truncation {
            Some(m) => axis_partial_sum(space, z, w, m),
            None => match space.kind {
                // boundary nodes of the circle rule are outside the open disk
                SpaceKind::Hardy => 1.0 / (2.0 * PI * (ONE - z * w.conj())),
                _ => kernel(space, &[z], &[w])?,
            },
        };
        acc += k * g(w) * weight;
    }
    Ok(acc)
}

/// F(z) recovered as ∫ K(z, w) F(w) α(w) dw.
pub fn reproduce(
    space: SpaceSpec,
    f: &HoloFunction,
    z: Complex64,
    rule: &QuadratureRule<Complex64>,
    kernel_truncation: Option<usize>,
) -> Result<Complex64> {
    if f.space != space {
        return Err(Error::invalid("function belongs to a different space"));
    }
    project_at(space, |w| horner(&f.coeffs, w), z, rule, kernel_truncation)
}

/// Length of the e^{ā z/t} series kept by [`translate`]:
/// ⌈growth·|a|²/t⌉ + margin terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslateOptions {
    pub growth: f64,
    pub margin: usize,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            growth: 40.0,
            margin: 30,
        }
    }
}

/// T_aF(z) = e^{-|a|²/2t} e^{ā·z/t} F(z - a) on the Segal–Bargmann space.
pub fn translate(a: &[Complex64], f: &HoloFunction) -> Result<HoloFunction> {
    translate_with(a, f, TranslateOptions::default())
}

pub fn translate_with(a: &[Complex64], f: &HoloFunction, opts: TranslateOptions) -> Result<HoloFunction> {
    let t = match f.space.kind {
        SpaceKind::SegalBargmann { t } => t.value(),
        _ => {
            return Err(Error::UnsupportedOperation(
                "unitarized translations are defined on the Segal-Bargmann space".into(),
            ))
        }
    };
    if a.len() != f.space.dim {
        return Err(Error::invalid("translation vector dimension mismatch"));
    }
    let a_sq: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    if a_sq == 0.0 {
        return Ok(f.clone());
    }
    let x = a_sq / t;
    let extra = (opts.growth * x).ceil() as usize + opts.margin;
    let out_degree = f.degree + extra;
    // first omitted exponential term, relative to the full e^{|a|²/t}
    let tail = (((extra + 1) as f64) * x.ln() - crate::quadrature::ln_gamma(extra as f64 + 2.0) - x).exp();
    log::debug!("translate: kept {extra} exponential terms, relative tail ≈ {tail:e}");

    let mut g = f.padded(out_degree);
    let m1 = out_degree + 1;
    for (axis, &ak) in a.iter().enumerate() {
        if ak == ZERO {
            continue;
        }
        let expo = exp_series(ak.conj() / t, extra);
        let pre = (-ak.norm_sqr() / (2.0 * t)).exp();
        apply_along_axis(&mut g.coeffs, f.space.dim, m1, axis, |line| {
            taylor_shift(line, -ak);
            let shifted = line.to_vec();
            for (m, slot) in line.iter_mut().enumerate() {
                let mut acc = ZERO;
                for j in 0..=m.min(extra) {
                    acc += shifted[m - j] * expo[j];
                }
                *slot = acc * pre;
            }
        });
    }
    Ok(g)
}

fn exp_series(c: Complex64, terms: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(terms + 1);
    let mut term = ONE;
    out.push(term);
    for j in 1..=terms {
        term *= c / j as f64;
        out.push(term);
    }
    out
}

/// In place: coefficients of p(z) become those of p(z + s).
fn taylor_shift(c: &mut [Complex64], s: Complex64) {
    let n = c.len();
    if n < 2 {
        return;
    }
    for i in 0..n - 1 {
        for j in (i..n - 1).rev() {
            let next = c[j + 1];
            c[j] += s * next;
        }
    }
}

fn apply_along_axis<F>(coeffs: &mut [Complex64], dim: usize, m1: usize, axis: usize, mut f: F)
where
    F: FnMut(&mut [Complex64]),
{
    let stride = m1.pow((dim - 1 - axis) as u32);
    let outer = m1.pow(axis as u32);
    let mut line = vec![ZERO; m1];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * m1 * stride + inner;
            for k in 0..m1 {
                line[k] = coeffs[base + k * stride];
            }
            f(&mut line);
            for k in 0..m1 {
                coeffs[base + k * stride] = line[k];
            }
        }
    }
}

/// An element of SU(1,1): [[α, β], [β̄, ᾱ]] with |α|² - |β|² = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11 {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Su11 {
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let tol = 1e-12;
        let (alpha, beta) = (m[0][0], m[0][1]);
        let shape = (m[1][0] - beta.conj()).norm().max((m[1][1] - alpha.conj()).norm());
        let det = alpha.norm_sqr() - beta.norm_sqr();
        if shape > tol || (det - 1.0).abs() > tol {
            return Err(Error::invalid("matrix is not in SU(1,1)"));
        }
        Ok(Su11 { alpha, beta })
    }

    pub fn boost(s: f64) -> Self {
        Su11 {
            alpha: Complex64::new(s.cosh(), 0.0),
            beta: Complex64::new(s.sinh(), 0.0),
        }
    }

    pub fn rotation(theta: f64) -> Self {
        Su11 {
            alpha: Complex64::from_polar(1.0, theta / 2.0),
            beta: ZERO,
        }
    }

    pub fn compose(&self, other: &Su11) -> Su11 {
        Su11 {
            alpha: self.alpha * other.alpha + self.beta * other.beta.conj(),
            beta: self.alpha * other.beta + self.beta * other.alpha.conj(),
        }
    }

    /// g·z = (αz + β)/(β̄z + ᾱ)
    pub fn act(&self, z: Complex64) -> Complex64 {
        (self.alpha * z + self.beta) / (self.beta.conj() * z + self.alpha.conj())
    }

    pub fn inverse(&self) -> Su11 {
        Su11 {
            alpha: self.alpha.conj(),
            beta: -self.beta,
        }
    }
}

/// U_gF(z) = φ_g(z) F(g⁻¹·z) with φ_g(z) = (α - β̄z)^{-(a+2)}, principal
/// branch, on the (weighted) Bergman space. The result is the Taylor
/// polynomial of degree `out_degree`.
pub fn su11_act(g: &Su11, f: &HoloFunction, out_degree: usize) -> Result<HoloFunction> {
    let a = f
        .space
        .disk_weight()
        .ok_or_else(|| Error::UnsupportedOperation("SU(1,1) acts on the (weighted) Bergman spaces".into()))?;
    Su11::from_matrix([[g.alpha, g.beta], [g.beta.conj(), g.alpha.conj()]])?;
    let d = out_degree;
    let alpha = g.alpha;
    let q = g.beta.conj() / alpha;
    // 1/(α - β̄z) = (1/α) Σ qⁿ zⁿ
    let geom: Vec<Complex64> = (0..=d).map(|n| q.powu(n as u32) / alpha).collect();
    // u(z) = (ᾱz - β)/(α - β̄z)
    let mut u = vec![ZERO; d + 1];
    for n in 0..=d {
        u[n] -= g.beta * geom[n];
        if n >= 1 {
            u[n] += alpha.conj() * geom[n - 1];
        }
    }
    // F(u(z)) by Horner with truncated products
    let mut acc = vec![ZERO; d + 1];
    for &c in f.coeffs.iter().rev() {
        acc = truncated_product(&acc, &u, d);
        acc[0] += c;
    }
    // φ_g(z) = α^{-(a+2)} (1 - qz)^{-(a+2)}
    let s = a + 2.0;
    let mut mult = Vec::with_capacity(d + 1);
    let mut coef = alpha.powf(-s);
    for n in 0..=d {
        mult.push(coef);
        coef *= q * ((s + n as f64) / (n as f64 + 1.0));
    }
    HoloFunction::new(f.space, truncated_product(&mult, &acc, d))
}

fn truncated_product(a: &[Complex64], b: &[Complex64], degree: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; degree + 1];
    for (i, &x) in a.iter().enumerate().take(degree + 1) {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(degree + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// F ↦ φF into `target`, after checking φ has no zero on `nodes`.
/// One variable; the product is truncated at deg φ + deg F (exact).
pub fn holo_equiv(phi: &HoloFunction, f: &HoloFunction, target: SpaceSpec, nodes: &[Complex64]) -> Result<HoloFunction> {
    if phi.space.dim != 1 || f.space.dim != 1 || target.dim != 1 {
        return Err(Error::invalid("holomorphic equivalence is implemented for one variable"));
    }
    for &z in nodes {
        let v = horner(&phi.coeffs, z);
        if !(v.norm() >= f64::MIN_POSITIVE) {
            return Err(Error::DegenerateEquivalence(format!("multiplier vanishes at {z}")));
        }
    }
    let degree = phi.degree + f.degree;
    HoloFunction::new(target, truncated_product(&phi.coeffs, &f.coeffs, degree))
}

/// Taylor coefficients of (4πℏ)^{-1/4} e^{-z²/4ℏ} up to `degree`: the
/// multiplier taking ℋL²(ℂ, μ_{2ℏ}) onto ℋL²(ℂ, ν_ℏ).
pub fn sb_to_nu_multiplier(hbar: PlanckScale, degree: usize) -> Result<HoloFunction> {
    let h = hbar.value();
    let mut coeffs = vec![ZERO; degree + 1];
    let mut term = (4.0 * PI * h).powf(-0.25);
    let mut k = 0usize;
    while 2 * k <= degree {
        coeffs[2 * k] = Complex64::new(term, 0.0);
        k += 1;
        term *= -1.0 / (4.0 * h * k as f64);
    }
    HoloFunction::new(SpaceSpec::segal_bargmann(PlanckScale::new(2.0 * h)?, 1)?, coeffs)
}

/// Five-point finite-difference Laplacian of log|φ|² at z; zero exactly when
/// the weight |φ|² is log-harmonic there.
pub fn log_harmonic_residual(phi: impl Fn(Complex64) -> Complex64, z: Complex64, step: f64) -> f64 {
    let l = |w: Complex64| phi(w).norm_sqr().ln();
    let c = l(z);
    let sum = l(z + step) + l(z - step) + l(z + Complex64::new(0.0, step)) + l(z - Complex64::new(0.0, step));
    (sum - 4.0 * c) / (step * step)
}

/// r ↦ ∫₀^{2π} |F(re^{iθ})|² dθ on the given radii, by an equispaced rule
/// of `n_angle` points (exact once n_angle > 2 deg F).
pub fn hardy_radial_integrals(f: &HoloFunction, radii: &[f64], n_angle: usize) -> Result<Vec<f64>> {
    if f.space.dim != 1 {
        return Err(Error::invalid("radial integrals are for one variable"));
    }
    if n_angle == 0 {
        return Err(Error::invalid("need at least one angular node"));
    }
    let dtheta = 2.0 * PI / n_angle as f64;
    Ok(radii
        .iter()
        .map(|&r| {
            (0..n_angle)
                .map(|k| horner(&f.coeffs, Complex64::from_polar(r, k as f64 * dtheta)).norm_sqr())
                .sum::<f64>()
                * dtheta
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{circle_rule, complex_gaussian, complex_gaussian_with, disk_rule, ComplexWeight, NuWindow};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sb(t: f64) -> SpaceSpec {
        SpaceSpec::segal_bargmann(PlanckScale::new(t).unwrap(), 1).unwrap()
    }

    fn random_disk_point(rng: &mut impl Rng, r: f64) -> Complex64 {
        let rad = r * rng.gen::<f64>().sqrt();
        Complex64::from_polar(rad, rng.gen_range(0.0..2.0 * PI))
    }

    fn random_poly(rng: &mut impl Rng, space: SpaceSpec, degree: usize) -> HoloFunction {
        let coeffs = (0..=degree).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        HoloFunction::new(space, coeffs).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let k = kernel(SpaceSpec::bergman(), &[ZERO], &[ZERO]).unwrap();
        assert_relative_eq!(k.re, 1.0 / PI, epsilon = 1e-15);
        let k = kernel(sb(1.0), &[ZERO], &[c(3.0, -1.0)]).unwrap();
        assert_eq!(k, ONE);
        let k = kernel(SpaceSpec::hardy(), &[ZERO], &[ZERO]).unwrap();
        assert_relative_eq!(k.re, 1.0 / (2.0 * PI), epsilon = 1e-15);
        assert!(kernel(SpaceSpec::bergman(), &[c(1.0, 0.0)], &[ZERO]).is_err());
    }

    #[test]
    fn weighted_bergman_kernel_against_quadrature_norms() {
        // oracle: basis sum with ‖zⁿ‖² from disk quadrature
        for &a in &[1.0, -0.5, 2.5] {
            let space = SpaceSpec::weighted_bergman(a).unwrap();
            let rule = disk_rule(40, 90, a).unwrap();
            let norms: Vec<f64> = (0..=40).map(|n| rule.integrate(|z| z.norm_sqr().powi(n))).collect();
            let z = c(0.3, -0.2);
            let w = c(-0.1, 0.5);
            let x = z * w.conj();
            let oracle: Complex64 = norms.iter().enumerate().map(|(n, m)| x.powu(n as u32) / *m).sum();
            let closed = kernel(space, &[z], &[w]).unwrap();
            assert!((oracle - closed).norm() < 1e-12, "a={a}");
            if a == 1.0 {
                let k0 = kernel(space, &[ZERO], &[ZERO]).unwrap();
                assert_relative_eq!(k0.re, 2.0 / PI, epsilon = 1e-14);
                assert_relative_eq!(norms[0], PI / 2.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn hardy_kernel_against_basis() {
        let rule = circle_rule(64).unwrap();
        for n in 0..10 {
            let v = rule.integrate(|z| z.norm_sqr().powi(n));
            assert_relative_eq!(v, 2.0 * PI, epsilon = 1e-12);
        }
        let z = c(0.4, 0.1);
        let w = c(0.2, -0.6);
        let diff = kernel_from_basis(SpaceSpec::hardy(), &[z], &[w], 200).unwrap() - kernel(SpaceSpec::hardy(), &[z], &[w]).unwrap();
        assert!(diff.norm() < 1e-14);
    }

    #[test]
    fn kernel_conjugate_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spaces = [
            sb(0.7),
            SpaceSpec::bergman(),
            SpaceSpec::weighted_bergman(0.5).unwrap(),
            SpaceSpec::hardy(),
            SpaceSpec::nu(PlanckScale::new(1.3).unwrap(), 1).unwrap(),
        ];
        for space in spaces {
            for _ in 0..2000 {
                let r = if space.on_disk() { 0.95 } else { 2.0 };
                let z = random_disk_point(&mut rng, r);
                let w = random_disk_point(&mut rng, r);
                let kzw = kernel(space, &[z], &[w]).unwrap();
                let kwz = kernel(space, &[w], &[z]).unwrap();
                assert!((kwz - kzw.conj()).norm() <= 1e-14 * kzw.norm().max(1.0));
            }
        }
    }

    #[test]
    fn kernel_from_basis_examples() {
        for m in 0..5 {
            let k = kernel_from_basis(SpaceSpec::bergman(), &[ZERO], &[ZERO], m).unwrap();
            assert_eq!(k.re, 1.0 / PI);
        }
        let k = kernel_from_basis(sb(1.0), &[ONE], &[ONE], 40).unwrap();
        assert!((k.re - 1f64.exp()).abs() < 1e-12);
        // monotone in M on the diagonal
        let z = c(0.6, 0.3);
        for space in [sb(1.0), SpaceSpec::bergman(), SpaceSpec::hardy()] {
            let mut prev = 0.0;
            for m in 0..30 {
                let k = kernel_from_basis(space, &[z], &[z], m).unwrap();
                assert!(k.re >= prev && k.im.abs() < 1e-15);
                prev = k.re;
            }
        }
    }

    #[test]
    fn nu_kernel_basis_sum() {
        let space = SpaceSpec::nu(PlanckScale::new(0.8).unwrap(), 1).unwrap();
        let z = c(0.9, -0.4);
        let w = c(-0.3, 0.7);
        let diff = kernel_from_basis(space, &[z], &[w], 80).unwrap() - kernel(space, &[z], &[w]).unwrap();
        assert!(diff.norm() < 1e-14);
    }

    #[test]
    fn sb_tail_decays_monotonically() {
        let space = sb(1.0);
        let z = c(1.0, 0.5);
        let w = c(-0.5, 1.2);
        let exact = kernel(space, &[z], &[w]).unwrap();
        let x = (z * w.conj()).norm();
        let start = (2.0 * x).ceil() as usize;
        let mut prev = f64::INFINITY;
        for m in start..40 {
            let err = (kernel_from_basis(space, &[z], &[w], m).unwrap() - exact).norm();
            if err < 1e-14 {
                break;
            }
            assert!(err <= prev);
            prev = err;
        }
    }

    #[test]
    fn two_dimensional_sb_kernel() {
        let space = SpaceSpec::segal_bargmann(PlanckScale::new(0.5).unwrap(), 2).unwrap();
        let z = [c(0.3, 0.1), c(-0.2, 0.4)];
        let w = [c(0.5, -0.3), c(0.1, 0.2)];
        let diff = kernel_from_basis(space, &z, &w, 50).unwrap() - kernel(space, &z, &w).unwrap();
        assert!(diff.norm() < 1e-13);
        let f = HoloFunction::monomial(space, &[1, 2]).unwrap();
        assert_relative_eq!(f.norm_sq().unwrap(), 0.5 * 2.0 * 0.25, epsilon = 1e-15);
        let v = f.eval(&z).unwrap();
        assert!((v - z[0] * z[1] * z[1]).norm() < 1e-15);
    }

    #[test]
    fn norms_match_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_poly(&mut rng, sb(1.5), 8);
        let rule = complex_gaussian(12, PlanckScale::new(1.5).unwrap(), ComplexWeight::Mu).unwrap();
        assert_relative_eq!(f.norm_sq().unwrap(), f.norm_sq_by_quadrature(&rule).unwrap(), max_relative = 1e-10);
        let g = random_poly(&mut rng, SpaceSpec::weighted_bergman(0.7).unwrap(), 8);
        let rule = disk_rule(12, 24, 0.7).unwrap();
        assert_relative_eq!(g.norm_sq().unwrap(), g.norm_sq_by_quadrature(&rule).unwrap(), max_relative = 1e-10);
    }

    #[test]
    fn pointwise_bound_examples() {
        let one = HoloFunction::constant(sb(1.0), ONE);
        let r = pointwise_bound_check(sb(1.0), &one, &[ZERO]).unwrap();
        assert_relative_eq!(r.ratio, 1.0, epsilon = 1e-15);
        let zf = HoloFunction::monomial(SpaceSpec::bergman(), &[1]).unwrap();
        let r = pointwise_bound_check(SpaceSpec::bergman(), &zf, &[c(0.5, 0.0)]).unwrap();
        assert!(r.holds && r.ratio < 1.0);
        // coherent section attains the bound
        let z = c(0.4, 0.3);
        let sec = kernel_section(SpaceSpec::bergman(), z, 200).unwrap();
        let r = pointwise_bound_check(SpaceSpec::bergman(), &sec, &[z]).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12, "{r:?}");
        let sec = kernel_section(sb(1.0), c(1.0, -0.5), 80).unwrap();
        let r = pointwise_bound_check(sb(1.0), &sec, &[c(1.0, -0.5)]).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reproduce_examples() {
        let space = sb(1.0);
        let f = HoloFunction::monomial(space, &[3]).unwrap();
        let z = c(0.7, 0.2);
        let rule = complex_gaussian(20, PlanckScale::new(1.0).unwrap(), ComplexWeight::Mu).unwrap();
        for trunc in [None, Some(3), Some(10)] {
            let v = reproduce(space, &f, z, &rule, trunc).unwrap();
            assert!((v - z * z * z).norm() < 1e-9, "{trunc:?}");
        }
        let one = HoloFunction::constant(space, ONE);
        assert!((reproduce(space, &one, c(1.5, -1.0), &rule, None).unwrap() - ONE).norm() < 1e-9);
        // projection of w̄ vanishes
        let p = project_at(space, |w| w.conj(), z, &rule, Some(10)).unwrap();
        assert!(p.norm() < 1e-12);
        // disk spaces
        let drule = disk_rule(12, 30, 0.0).unwrap();
        let b = SpaceSpec::bergman();
        let f = HoloFunction::new(b, vec![c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.1)]).unwrap();
        let v = reproduce(b, &f, c(0.3, 0.4), &drule, Some(2)).unwrap();
        assert!((v - f.eval(&[c(0.3, 0.4)]).unwrap()).norm() < 1e-12);
        let h = SpaceSpec::hardy();
        let f = f.with_space(h).unwrap();
        let v = reproduce(h, &f, c(0.3, 0.4), &circle_rule(16).unwrap(), Some(4)).unwrap();
        assert!((v - f.eval(&[c(0.3, 0.4)]).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn kernel_idempotence() {
        // ∫ K(z,w) K(w,u) α(w) dw = K(z,u)
        let space = sb(1.0);
        let rule = complex_gaussian(40, PlanckScale::new(1.0).unwrap(), ComplexWeight::Mu).unwrap();
        let z = c(0.3, -0.4);
        let u = c(-0.2, 0.5);
        let v = project_at(space, |w| kernel(space, &[w], &[u]).unwrap(), z, &rule, None).unwrap();
        assert!((v - kernel(space, &[z], &[u]).unwrap()).norm() < 1e-8);
        let b = SpaceSpec::bergman();
        let rule = disk_rule(60, 130, 0.0).unwrap();
        let m = 100;
        let v = project_at(b, |w| axis_partial_sum(b, w, u, m), z, &rule, Some(m)).unwrap();
        assert!((v - kernel(b, &[z], &[u]).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn translate_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let space = sb(0.8);
        let f = random_poly(&mut rng, space, 6);
        assert_eq!(translate(&[ZERO], &f).unwrap(), f);
        let a = c(0.4, -0.3);
        let g = translate(&[a], &f).unwrap();
        assert_relative_eq!(g.norm().unwrap(), f.norm().unwrap(), max_relative = 1e-12);
        let back = translate(&[-a], &g).unwrap();
        assert!(back.sub(&f).unwrap().max_abs_coeff() < 1e-10);
        // e^{|a|²/2t} T_a 1 (u) = e^{ā u/t}
        let one = HoloFunction::constant(space, ONE);
        let ta = translate(&[a], &one).unwrap();
        let u = c(0.7, 1.1);
        let lhs = ta.eval(&[u]).unwrap() * (a.norm_sqr() / 1.6).exp();
        assert!((lhs - (a.conj() * u / 0.8).exp()).norm() < 1e-12);
        assert!(matches!(
            translate(&[a], &f.with_space(SpaceSpec::bergman()).unwrap()),
            Err(Error::UnsupportedOperation(_))
        ));
    }

    #[test]
    fn translate_pointwise_definition() {
        let space = sb(1.2);
        let f = HoloFunction::new(space, vec![c(1.0, 0.5), c(-0.3, 0.0), c(0.2, 0.2), c(0.0, -0.1)]).unwrap();
        let a = c(-0.6, 0.9);
        let g = translate(&[a], &f).unwrap();
        for &z in &[c(0.1, 0.2), c(-1.0, 0.4), c(0.5, -0.8)] {
            let direct = (-a.norm_sqr() / 2.4).exp() * (a.conj() * z / 1.2).exp() * f.eval(&[z - a]).unwrap();
            assert!((g.eval(&[z]).unwrap() - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn translate_phase_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = 0.9;
        let space = sb(t);
        for _ in 0..10 {
            let f = random_poly(&mut rng, space, 5);
            let a = random_disk_point(&mut rng, 0.8);
            let b = random_disk_point(&mut rng, 0.8);
            let lhs = translate(&[a], &translate(&[b], &f).unwrap()).unwrap();
            let phase = Complex64::from_polar(1.0, -(a * b.conj()).im / t);
            let rhs = translate(&[a + b], &f).unwrap().scaled(phase);
            assert!(lhs.sub(&rhs).unwrap().max_abs_coeff() < 1e-9);
        }
    }

    #[test]
    fn translate_two_dimensional() {
        let space = SpaceSpec::segal_bargmann(PlanckScale::new(1.0).unwrap(), 2).unwrap();
        let mut coeffs = vec![ZERO; 9];
        coeffs[4] = ONE; // z1 z2
        coeffs[2] = c(0.5, 0.0); // z2²
        let f = HoloFunction::from_tensor(space, 2, coeffs).unwrap();
        let a = [c(0.2, 0.1), c(-0.3, 0.2)];
        let g = translate(&a, &f).unwrap();
        assert_relative_eq!(g.norm().unwrap(), f.norm().unwrap(), max_relative = 1e-12);
        let z = [c(0.3, 0.3), c(-0.1, 0.6)];
        let pre = (-(a[0].norm_sqr() + a[1].norm_sqr()) / 2.0).exp() * ((a[0].conj() * z[0] + a[1].conj() * z[1])).exp();
        let direct = pre * f.eval(&[z[0] - a[0], z[1] - a[1]]).unwrap();
        assert!((g.eval(&z).unwrap() - direct).norm() < 1e-12);
    }

    #[test]
    fn exponentiated_ccr() {
        let h = 1.1;
        let space = sb(h);
        let f = HoloFunction::new(space, vec![c(0.3, 0.0), c(0.0, 1.0), c(0.5, -0.5)]).unwrap();
        let (r, s) = (0.7, -0.4);
        let v = |g: &HoloFunction| translate(&[c(0.0, -r / 2f64.sqrt())], g).unwrap();
        let w = |g: &HoloFunction| translate(&[c(-s / 2f64.sqrt(), 0.0)], g).unwrap();
        let lhs = v(&w(&f));
        let rhs = w(&v(&f)).scaled(Complex64::from_polar(1.0, -r * s / h));
        assert!(lhs.sub(&rhs).unwrap().max_abs_coeff() < 1e-9);
    }

    #[test]
    fn su11_identity_and_isometry() {
        let b = SpaceSpec::bergman();
        let f = HoloFunction::monomial(b, &[2]).unwrap();
        let id = Su11 { alpha: ONE, beta: ZERO };
        let g = su11_act(&id, &f, 2).unwrap();
        assert!(g.sub(&f).unwrap().max_abs_coeff() < 1e-15);
        let boost = Su11::boost(0.3);
        let u = su11_act(&boost, &f, 80).unwrap();
        let rule = disk_rule(60, 170, 0.0).unwrap();
        let q = u.norm_sq_by_quadrature(&rule).unwrap();
        assert_relative_eq!(q, f.norm_sq().unwrap(), max_relative = 1e-8);
        assert_relative_eq!(u.norm_sq().unwrap(), f.norm_sq().unwrap(), max_relative = 1e-8);
    }

    #[test]
    fn su11_pointwise_and_weighted() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for &a in &[0.0, 0.5, 2.0] {
            let space = SpaceSpec::weighted_bergman(a).unwrap();
            let f = random_poly(&mut rng, space, 4);
            let g = Su11 {
                alpha: c(1.1, 0.3),
                beta: Complex64::from_polar((1.1f64 * 1.1 + 0.09 - 1.0).sqrt(), 0.7),
            };
            let u = su11_act(&g, &f, 120).unwrap();
            assert_relative_eq!(u.norm_sq().unwrap(), f.norm_sq().unwrap(), max_relative = 1e-9);
            let z = c(0.2, -0.3);
            let direct = (g.alpha - g.beta.conj() * z).powf(-(a + 2.0)) * f.eval(&[g.inverse().act(z)]).unwrap();
            assert!((u.eval(&[z]).unwrap() - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn su11_projective_composition() {
        let space = SpaceSpec::weighted_bergman(0.5).unwrap();
        let f = HoloFunction::new(space, vec![c(0.2, 0.1), c(1.0, 0.0), c(0.0, -0.4)]).unwrap();
        let g = Su11::boost(0.25);
        let h = Su11 {
            alpha: Complex64::from_polar(0.2f64.cosh(), 0.4),
            beta: Complex64::from_polar(0.2f64.sinh(), -1.0),
        };
        let d = 120;
        let lhs = su11_act(&g, &su11_act(&h, &f, d).unwrap(), d).unwrap();
        let rhs = su11_act(&g.compose(&h), &f, d).unwrap();
        let z = c(0.1, 0.3);
        let ratio = lhs.eval(&[z]).unwrap() / rhs.eval(&[z]).unwrap();
        assert!((ratio.norm() - 1.0).abs() < 1e-10);
        let diff = lhs.sub(&rhs.scaled(ratio)).unwrap();
        assert!(diff.max_abs_coeff() < 1e-10);
    }

    #[test]
    fn su11_rejects_non_group() {
        let f = HoloFunction::monomial(SpaceSpec::bergman(), &[1]).unwrap();
        let bad = Su11 { alpha: c(2.0, 0.0), beta: c(1.0, 0.0) };
        assert!(matches!(su11_act(&bad, &f, 5), Err(Error::InvalidArgument(_))));
        assert!(Su11::from_matrix([[ONE, ZERO], [c(0.1, 0.0), ONE]]).is_err());
    }

    #[test]
    fn sb_nu_equivalence_isometry() {
        let h = 0.7;
        let hb = PlanckScale::new(h).unwrap();
        let phi = sb_to_nu_multiplier(hb, 200).unwrap();
        let target = SpaceSpec::nu(hb, 1).unwrap();
        let src_space = SpaceSpec::segal_bargmann(PlanckScale::new(2.0 * h).unwrap(), 1).unwrap();
        let f = HoloFunction::new(src_space, vec![c(0.5, 0.0), c(0.0, 0.3), c(-0.2, 0.1), c(0.05, 0.0)]).unwrap();
        let window = NuWindow {
            half_width: 8.0,
            real_nodes: 200,
        };
        let rule = complex_gaussian_with(40, hb, ComplexWeight::Nu, window).unwrap();
        let out = holo_equiv(&phi, &f, target, &rule.nodes).unwrap();
        let q = out.norm_sq_by_quadrature(&rule).unwrap();
        assert_relative_eq!(q, f.norm_sq().unwrap(), max_relative = 1e-8);
        assert!(out.norm_sq().is_err());
    }

    #[test]
    fn holo_equiv_identity_and_degenerate() {
        let space = sb(1.0);
        let f = HoloFunction::new(space, vec![ONE, c(0.0, 2.0)]).unwrap();
        let one = HoloFunction::constant(space, ONE);
        let g = holo_equiv(&one, &f, space, &[c(0.5, 0.5)]).unwrap();
        assert!(g.sub(&f).unwrap().max_abs_coeff() == 0.0);
        let z = HoloFunction::monomial(space, &[1]).unwrap();
        assert!(matches!(
            holo_equiv(&z, &f, space, &[c(1.0, 0.0), ZERO]),
            Err(Error::DegenerateEquivalence(_))
        ));
    }

    #[test]
    fn log_harmonic_check() {
        let cc = c(0.7, -1.3);
        for &z in &[c(0.1, 0.2), c(-1.0, 0.5)] {
            let r = log_harmonic_residual(|w| (cc * w).exp(), z, 1e-3);
            assert!(r.abs() < 1e-5, "{r}");
        }
        // not log-harmonic: log e^{-|z|²} has Laplacian -4
        let r = log_harmonic_residual(|w| Complex64::new((-w.norm_sqr() / 2.0).exp(), 0.0), c(0.3, 0.1), 1e-3);
        assert!((r + 4.0).abs() < 1e-5);
    }

    #[test]
    fn hardy_radial_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f = random_poly(&mut rng, SpaceSpec::hardy(), 7);
        let radii: Vec<f64> = (0..=50).map(|k| k as f64 / 50.0 * 0.999).collect();
        let vals = hardy_radial_integrals(&f, &radii, 32).unwrap();
        for pair in vals.windows(2) {
            assert!(pair[1] >= pair[0]);
        }
        assert!(vals.last().unwrap() <= &f.norm_sq().unwrap());
    }

    #[test]
    fn space_spec_validation_and_serde() {
        assert!(SpaceSpec::weighted_bergman(-1.0).is_err());
        assert!(SpaceSpec::new(SpaceKind::Bergman, 2).is_err());
        let s = sb(2.0);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"kind":"segal-bargmann","t":2.0,"dim":1}"#);
        let back: SpaceSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<SpaceSpec>(r#"{"kind":"weighted-bergman","a":-3.0,"dim":1}"#).is_err());
        let f = HoloFunction::new(s, vec![ONE, c(0.0, 2.0)]).unwrap();
        let back: HoloFunction = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"space":{"kind":"hardy","dim":1},"degree":3,"coeffs":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<HoloFunction>(bad).is_err());
    }
}
