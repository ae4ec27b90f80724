//! SU(2), its complexification SL(2,ℂ), irreducible representations, the
//! heat kernel as a character series, and the heat-kernel transform acting
//! on Peter–Weyl coefficients.
//!
//! Spins are stored doubled: `Spin(3)` is l = 3/2.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{max_abs, CMatrix};
use crate::quadrature::{gauss_legendre, Measure, QuadratureRule};
use crate::scale::PlanckScale;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest 2l for representation matrices.
pub const MAX_REP_TWICE: u32 = 60;
/// Largest 2l the heat-kernel series may reach.
pub const MAX_HEAT_TWICE: u32 = 2000;
/// Default relative tail tolerance for the heat-kernel series.
pub const DEFAULT_HEAT_TOL: f64 = 1e-13;

const DET_TOL: f64 = 1e-12;

pub type M2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Spin(pub u32);

impl Spin {
    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// l(l+1)
    pub fn casimir(self) -> f64 {
        let k = self.0 as f64;
        k * (k + 2.0) / 4.0
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let twice = if let Some((num, den)) = s.split_once('/') {
            match (num.trim().parse::<u32>(), den.trim()) {
                (Ok(n), "2") => Some(n),
                _ => None,
            }
        } else {
            s.parse::<f64>().ok().filter(|v| *v >= 0.0 && (2.0 * v).fract() == 0.0 && *v < 1e6).map(|v| (2.0 * v) as u32)
        };
        twice.map(Spin).ok_or_else(|| Error::invalid(format!("{s:?} is not a nonnegative half-integer")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupTag {
    Su2,
    Sl2c,
}

fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn det(a: &M2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn adjoint(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn scale(a: &M2, c: Complex64) -> M2 {
    [[a[0][0] * c, a[0][1] * c], [a[1][0] * c, a[1][1] * c]]
}

fn add(a: &M2, b: &M2) -> M2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

fn identity() -> M2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn matrix_distance(a: &M2, b: &M2) -> f64 {
    (0..4).map(|k| (a[k / 2][k % 2] - b[k / 2][k % 2]).norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    matrix: M2,
    tag: GroupTag,
}

impl GroupElement {
    /// An element of SL(2,ℂ); det must be 1 within 1e-12.
    pub fn sl2c(matrix: M2) -> Result<Self> {
        if matrix.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        let d = det(&matrix);
        if (d - ONE).norm() > DET_TOL {
            return Err(Error::invalid(format!("det = {d}, expected 1")));
        }
        Ok(GroupElement {
            matrix,
            tag: GroupTag::Sl2c,
        })
    }

    /// Rows (α, -β̄), (β, ᾱ) with |α|² + |β|² = 1 within 1e-12.
    pub fn su2(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if (n - 1.0).abs() > DET_TOL {
            return Err(Error::invalid(format!("|α|² + |β|² = {n}, expected 1")));
        }
        Ok(GroupElement {
            matrix: [[alpha, -beta.conj()], [beta, alpha.conj()]],
            tag: GroupTag::Su2,
        })
    }

    /// Tags the matrix SU2 when it has the SU(2) shape, SL2C otherwise.
    pub fn classify(matrix: M2) -> Result<Self> {
        let g = GroupElement::sl2c(matrix)?;
        if g.has_su2_shape() {
            return Ok(GroupElement {
                matrix,
                tag: GroupTag::Su2,
            });
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        GroupElement {
            matrix: identity(),
            tag: GroupTag::Su2,
        }
    }

    /// e^{aH}, H = diag(1, -1).
    pub fn exp_h(a: Complex64) -> Self {
        let tag = if a.re == 0.0 { GroupTag::Su2 } else { GroupTag::Sl2c };
        GroupElement {
            matrix: [[a.exp(), ZERO], [ZERO, (-a).exp()]],
            tag,
        }
    }

    /// diag(e^{iθ}, e^{-iθ}), a representative of each conjugacy class.
    pub fn class_point(theta: f64) -> Self {
        GroupElement::exp_h(Complex64::new(0.0, theta))
    }

    pub fn matrix(&self) -> &M2 {
        &self.matrix
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn has_su2_shape(&self) -> bool {
        let m = &self.matrix;
        (m[1][1] - m[0][0].conj()).norm() <= DET_TOL
            && (m[0][1] + m[1][0].conj()).norm() <= DET_TOL
            && (m[0][0].norm_sqr() + m[1][0].norm_sqr() - 1.0).abs() <= DET_TOL
    }

    pub fn compose(&self, other: &Self) -> Self {
        let tag = if self.tag == GroupTag::Su2 && other.tag == GroupTag::Su2 {
            GroupTag::Su2
        } else {
            GroupTag::Sl2c
        };
        GroupElement {
            matrix: mul(&self.matrix, &other.matrix),
            tag,
        }
    }

    /// Inverse via the adjugate, which is exact for det = 1.
    pub fn inverse(&self) -> Self {
        let m = &self.matrix;
        GroupElement {
            matrix: [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]],
            tag: self.tag,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix[0][0] + self.matrix[1][1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement {
    matrix: M2,
}

impl AlgebraElement {
    pub fn new(matrix: M2) -> Result<Self> {
        let tr = matrix[0][0] + matrix[1][1];
        if tr.norm() > 1e-14 {
            return Err(Error::invalid(format!("trace = {tr}, expected 0")));
        }
        Ok(AlgebraElement { matrix })
    }

    pub fn zero() -> Self {
        AlgebraElement { matrix: [[ZERO; 2]; 2] }
    }

    pub fn matrix(&self) -> &M2 {
        &self.matrix
    }

    /// Y* = -Y within `tol`.
    pub fn is_su2(&self, tol: f64) -> bool {
        let a = adjoint(&self.matrix);
        matrix_distance(&a, &scale(&self.matrix, -ONE)) <= tol
    }

    /// exp(cY) from Y² = -det(Y)·I.
    pub fn exp_scaled(&self, c: Complex64) -> M2 {
        let y = scale(&self.matrix, c);
        let q = (-det(&y)).sqrt();
        let (ch, sh_q) = if q.norm() < 1e-4 {
            let q2 = q * q;
            (ONE + q2 / 2.0 + q2 * q2 / 24.0, ONE + q2 / 6.0 + q2 * q2 / 120.0)
        } else {
            (q.cosh(), q.sinh() / q)
        };
        add(&scale(&identity(), ch), &scale(&y, sh_q))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Polar {
    pub x: GroupElement,
    pub y: AlgebraElement,
    /// The KAK parameter: exp(iY) has eigenvalues e^{±a}, a ≥ 0.
    pub a: f64,
}

/// g = x·exp(iY), x ∈ SU(2), iY the self-adjoint logarithm of (g*g)^{1/2}.
pub fn polar_decompose(g: &GroupElement) -> Result<Polar> {
    let m = g.matrix();
    if (det(m) - ONE).norm() > DET_TOL {
        return Err(Error::invalid("polar decomposition expects det g = 1"));
    }
    let h = mul(&adjoint(m), m);
    let (h11, h22, h12) = (h[0][0].re, h[1][1].re, h[0][1]);
    // eigenvalues e^{±2a}; sinh 2a from the discriminant, which has no
    // cancellation near a = 0
    let sinh2a = 0.5 * ((h11 - h22).powi(2) + 4.0 * h12.norm_sqr()).sqrt();
    let a = 0.5 * sinh2a.asinh();
    let cosh2a = (1.0 + sinh2a * sinh2a).sqrt();
    let centered = add(&h, &scale(&identity(), Complex64::new(-cosh2a, 0.0)));
    // p = cosh a·I + sinh a·N, N = (H - cosh 2a)/sinh 2a
    let ch = a.cosh();
    let p_inv = add(&scale(&identity(), Complex64::new(ch, 0.0)), &scale(&centered, Complex64::new(-1.0 / (2.0 * ch), 0.0)));
    let x = mul(m, &p_inv);
    let ratio = if sinh2a < 1e-8 { 0.5 } else { a / sinh2a };
    // iY = aN, so Y = -iaN
    let y = scale(&centered, Complex64::new(0.0, -ratio));
    let x = GroupElement {
        matrix: x,
        tag: GroupTag::Su2,
    };
    let y_el = AlgebraElement {
        matrix: [[y[0][0], y[0][1]], [y[1][0], -y[0][0]]],
    };
    Ok(Polar { x, y: y_el, a })
}

fn check_spin(l: Spin) -> Result<()> {
    if l.0 > MAX_REP_TWICE {
        return Err(Error::invalid(format!("2l = {} exceeds the cap {MAX_REP_TWICE}", l.0)));
    }
    Ok(())
}

fn binom_row(n: u32) -> Vec<f64> {
    let mut row = vec![1.0; n as usize + 1];
    for k in 1..n as usize {
        row[k] = row[k - 1] * (n as f64 - k as f64 + 1.0) / k as f64;
    }
    row
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(base: &[Complex64], k: u32) -> Vec<Complex64> {
    (0..k).fold(vec![ONE], |acc, _| poly_mul(&acc, base))
}

/// π_l(g) on homogeneous polynomials of degree 2l in (u, v), acting by
/// f(w) ↦ f(w·g) for the row vector w = (u, v), in the orthonormal basis
/// √C(2l,k)·u^{2l-k}v^k. Unitary for g ∈ SU(2); π_{1/2}(g) = g.
pub fn rep_matrix(l: Spin, g: &GroupElement) -> Result<CMatrix> {
    check_spin(l)?;
    let n = l.0;
    let m = g.matrix();
    // u ↦ a u + c v, v ↦ b u + d v, as coefficient vectors in powers of v
    let u_img = [m[0][0], m[1][0]];
    let v_img = [m[0][1], m[1][1]];
    let binom = binom_row(n);
    let dim = l.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let col = poly_mul(&poly_pow(&u_img, n - k as u32), &poly_pow(&v_img, k as u32));
        for (j, &c) in col.iter().enumerate() {
            out[(j, k)] = c * (binom[k] / binom[j]).sqrt();
        }
    }
    Ok(out)
}

/// χ_l(g) = U_{2l}(tr g / 2), the Chebyshev form of sin((2l+1)θ)/sin θ; it
/// has no singularity at θ = 0 and is valid for any g ∈ SL(2,ℂ).
pub fn character(l: Spin, g: &GroupElement) -> Complex64 {
    characters_upto(l.0, g.trace()).pop().unwrap_or(ONE)
}

/// χ_0, χ_{1/2}, …, χ_{L} from the trace.
fn characters_upto(twice: u32, trace: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(twice as usize + 1);
    out.push(ONE);
    if twice >= 1 {
        out.push(trace);
    }
    for k in 2..=twice as usize {
        let next = trace * out[k - 1] - out[k - 2];
        out.push(next);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatKernelValue {
    pub value: Complex64,
    /// 2L of the last term summed.
    pub cutoff_twice: u32,
    /// Bound on Σ_{l > L} (2l+1)² e^{-tl(l+1)/2} e^{2l|a|}.
    pub tail_bound: f64,
}

fn ln_term_bound(k: u32, t: f64, a: f64) -> f64 {
    let kf = k as f64;
    2.0 * (kf + 1.0).ln() - t * kf * (kf + 2.0) / 8.0 + kf * a
}

/// Tail of the bound series after 2l = `twice`.
pub fn heat_tail_bound(t: f64, a: f64, twice: u32) -> f64 {
    let mut sum = 0.0;
    let mut k = twice + 1;
    let mut prev = f64::INFINITY;
    loop {
        let ln = ln_term_bound(k, t, a);
        let term = ln.exp();
        sum += term;
        // terms are log-concave in k: once decreasing they stay decreasing
        if (term < prev && term <= sum * 1e-18) || term == 0.0 || k > 1_000_000 {
            break;
        }
        prev = term;
        k += 1;
    }
    sum
}

/// ρ_t(g) = Σ_l (2l+1) e^{-tl(l+1)/2} χ_l(g).
///
/// With `cutoff_twice = None` the series stops at the first L whose tail
/// bound is below `DEFAULT_HEAT_TOL·max(1, |partial sum|)`, and fails with
/// `ConvergenceFailure` if that needs 2L > `MAX_HEAT_TWICE`.
pub fn heat_kernel(t: PlanckScale, g: &GroupElement, cutoff_twice: Option<u32>) -> Result<HeatKernelValue> {
    heat_kernel_tol(t, g, cutoff_twice, DEFAULT_HEAT_TOL)
}

pub fn heat_kernel_tol(t: PlanckScale, g: &GroupElement, cutoff_twice: Option<u32>, tol: f64) -> Result<HeatKernelValue> {
    let tv = t.value();
    let a = polar_decompose(g)?.a;
    let sum_to = |twice: u32| -> Complex64 {
        let chars = characters_upto(twice, g.trace());
        let mut acc = ZERO;
        for (k, chi) in chars.iter().enumerate() {
            let s = Spin(k as u32);
            acc += *chi * ((k as f64 + 1.0) * (-tv * s.casimir() / 2.0).exp());
        }
        acc
    };
    if let Some(c) = cutoff_twice {
        if c > MAX_HEAT_TWICE {
            return Err(Error::invalid(format!("cutoff 2L = {c} exceeds the cap {MAX_HEAT_TWICE}")));
        }
        return Ok(HeatKernelValue {
            value: sum_to(c),
            cutoff_twice: c,
            tail_bound: heat_tail_bound(tv, a, c),
        });
    }
    let scale_est = |twice: u32| sum_to(twice).norm().max(1.0);
    let mut twice = 0;
    loop {
        let tail = heat_tail_bound(tv, a, twice);
        let est = scale_est(twice);
        if !tail.is_finite() || !est.is_finite() {
            return Err(Error::ConvergenceFailure {
                tail_bound: tail,
                required_doubled: required_cutoff(tv, a, tol),
            });
        }
        if tail <= tol * est {
            return Ok(HeatKernelValue {
                value: sum_to(twice),
                cutoff_twice: twice,
                tail_bound: tail,
            });
        }
        if twice == MAX_HEAT_TWICE {
            return Err(Error::ConvergenceFailure {
                tail_bound: tail,
                required_doubled: required_cutoff(tv, a, tol),
            });
        }
        twice += 1;
    }
}

/// Smallest 2L past the peak of the bound series whose next term is below
/// `tol` in log space, where the values themselves may overflow.
fn required_cutoff(t: f64, a: f64, tol: f64) -> u32 {
    let mut k = 0u32;
    while k < u32::MAX / 2 {
        let here = ln_term_bound(k + 1, t, a);
        if here < tol.ln() && here < ln_term_bound(k, t, a) {
            return k;
        }
        k += 1;
    }
    k
}

/// Peter–Weyl coefficients: f(x) = Σ_l √(2l+1) Σ_{mn} c^l_{mn} π_l(x)_{mn},
/// so that ‖f‖² in L²(SU(2), Haar) is Σ |c^l_{mn}|².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoeffs", into = "RawCoeffs")]
pub struct PeterWeylCoeffs {
    blocks: Vec<CMatrix>,
}

/// JSON form: `{"cutoff_twice": 2L, "blocks": [[[[re, im], ...], ...], ...]}`
/// with block k a (k+1)×(k+1) matrix given row by row.
#[derive(Serialize, Deserialize)]
struct RawCoeffs {
    cutoff_twice: u32,
    blocks: Vec<Vec<Vec<Complex64>>>,
}

impl TryFrom<RawCoeffs> for PeterWeylCoeffs {
    type Error = Error;

    fn try_from(raw: RawCoeffs) -> Result<Self> {
        if raw.blocks.len() != raw.cutoff_twice as usize + 1 {
            return Err(Error::invalid("expected one block per 2l = 0..=cutoff_twice"));
        }
        check_spin(Spin(raw.cutoff_twice))?;
        let mut blocks = Vec::with_capacity(raw.blocks.len());
        for (k, rows) in raw.blocks.into_iter().enumerate() {
            let d = k + 1;
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::invalid(format!("block 2l = {k} must be {d}×{d}")));
            }
            if rows.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::invalid("coefficients must be finite"));
            }
            blocks.push(CMatrix::from_fn(d, d, |i, j| rows[i][j]));
        }
        Ok(PeterWeylCoeffs { blocks })
    }
}

impl From<PeterWeylCoeffs> for RawCoeffs {
    fn from(c: PeterWeylCoeffs) -> Self {
        RawCoeffs {
            cutoff_twice: c.cutoff_twice(),
            blocks: c
                .blocks
                .iter()
                .map(|b| (0..b.nrows()).map(|i| (0..b.ncols()).map(|j| b[(i, j)]).collect()).collect())
                .collect(),
        }
    }
}

impl PeterWeylCoeffs {
    pub fn zero(cutoff: Spin) -> Result<Self> {
        check_spin(cutoff)?;
        Ok(PeterWeylCoeffs {
            blocks: (0..=cutoff.0 as usize).map(|k| CMatrix::zeros(k + 1, k + 1)).collect(),
        })
    }

    /// Coefficients of χ_l: c^l = I/√(2l+1).
    pub fn character(l: Spin) -> Result<Self> {
        let mut c = PeterWeylCoeffs::zero(l)?;
        let d = l.dim();
        c.blocks[l.0 as usize] = CMatrix::identity(d, d) / Complex64::new((d as f64).sqrt(), 0.0);
        Ok(c)
    }

    pub fn cutoff_twice(&self) -> u32 {
        self.blocks.len() as u32 - 1
    }

    pub fn block(&self, l: Spin) -> Option<&CMatrix> {
        self.blocks.get(l.0 as usize)
    }

    pub fn block_mut(&mut self, l: Spin) -> Option<&mut CMatrix> {
        self.blocks.get_mut(l.0 as usize)
    }

    pub fn norm_sq(&self) -> f64 {
        self.blocks.iter().map(|b| b.iter().map(|c| c.norm_sqr()).sum::<f64>()).sum()
    }

    /// f(g), by analytic continuation when g ∈ SL(2,ℂ).
    pub fn eval(&self, g: &GroupElement) -> Result<Complex64> {
        let mut acc = ZERO;
        for (k, block) in self.blocks.iter().enumerate() {
            if block.iter().all(|c| *c == ZERO) {
                continue;
            }
            let pi = rep_matrix(Spin(k as u32), g)?;
            let s: Complex64 = block.iter().zip(pi.iter()).map(|(c, p)| c * p).sum();
            acc += s * ((k + 1) as f64).sqrt();
        }
        Ok(acc)
    }

    /// Each block times e^{-ℏl(l+1)/2}.
    pub fn heat_multiplied(&self, hbar: PlanckScale) -> Self {
        PeterWeylCoeffs {
            blocks: self
                .blocks
                .iter()
                .enumerate()
                .map(|(k, b)| b * Complex64::new((-hbar.value() * Spin(k as u32).casimir() / 2.0).exp(), 0.0))
                .collect(),
        }
    }

    /// c^l_{mn} = √(2l+1) ∫ f(x) conj(π_l(x)_{mn}) dx on a Haar rule.
    pub fn project<F>(f: F, cutoff: Spin, rule: &QuadratureRule<GroupElement>) -> Result<Self>
    where
        F: Fn(&GroupElement) -> Complex64,
    {
        let mut c = PeterWeylCoeffs::zero(cutoff)?;
        for (x, w) in rule.iter() {
            let fx = f(x) * w;
            for k in 0..=cutoff.0 {
                let pi = rep_matrix(Spin(k), x)?;
                let sq = ((k + 1) as f64).sqrt();
                c.blocks[k as usize].zip_apply(&pi, |cv, p| *cv += fx * p.conj() * sq);
            }
        }
        Ok(c)
    }
}

/// (C_ℏf)(g) from the coefficients: each block damped by e^{-ℏl(l+1)/2},
/// then resynthesized at g.
pub fn transform_group(f: &PeterWeylCoeffs, g: &GroupElement, hbar: PlanckScale) -> Result<Complex64> {
    f.heat_multiplied(hbar).eval(g)
}

/// (C_ℏf)(g) = ∫ ρ_ℏ(g x⁻¹) f(x) dx by direct quadrature on a Haar rule.
pub fn transform_group_by_convolution(
    f: &PeterWeylCoeffs,
    g: &GroupElement,
    hbar: PlanckScale,
    rule: &QuadratureRule<GroupElement>,
) -> Result<Complex64> {
    let mut acc = ZERO;
    for (x, w) in rule.iter() {
        let rho = heat_kernel(hbar, &g.compose(&x.inverse()), None)?.value;
        acc += rho * f.eval(x)? * w;
    }
    Ok(acc)
}

/// Haar rule on SU(2) in Hopf coordinates α = √(1-u)e^{iξ₁}, β = √u e^{iξ₂}:
/// Gauss–Legendre in u ∈ [0, 1] and trapezoid rules in ξ₁, ξ₂. Total mass 1.
/// Integrates a polynomial of degree d in (α, ᾱ, β, β̄) exactly when the
/// trapezoid orders exceed d and the Legendre order is at least d/2 + 1.
pub fn euler_quadrature(orders: [usize; 3]) -> Result<QuadratureRule<GroupElement>> {
    if orders.iter().any(|&o| o == 0) {
        return Err(Error::invalid("each angle needs at least one node"));
    }
    let u_rule = gauss_legendre(orders[0], 0.0, 1.0)?;
    let mut nodes = Vec::with_capacity(orders.iter().product());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (&u, wu) in u_rule.iter() {
        for j1 in 0..orders[1] {
            let xi1 = 2.0 * PI * j1 as f64 / orders[1] as f64;
            for j2 in 0..orders[2] {
                let xi2 = 2.0 * PI * j2 as f64 / orders[2] as f64;
                let alpha = Complex64::from_polar((1.0 - u).sqrt(), xi1);
                let beta = Complex64::from_polar(u.sqrt(), xi2);
                nodes.push(GroupElement {
                    matrix: [[alpha, -beta.conj()], [beta, alpha.conj()]],
                    tag: GroupTag::Su2,
                });
                weights.push(wu / (orders[1] * orders[2]) as f64);
            }
        }
    }
    let exact = orders[1].min(orders[2]).saturating_sub(1).min(2 * orders[0] - 1);
    Ok(QuadratureRule {
        nodes,
        weights,
        exact_degree: exact,
        measure: Measure::Su2Haar,
    })
}

/// max |π_l(gh) - π_l(g)π_l(h)|
pub fn homomorphism_residual(l: Spin, g: &GroupElement, h: &GroupElement) -> Result<f64> {
    let lhs = rep_matrix(l, &g.compose(h))?;
    let rhs = rep_matrix(l, g)? * rep_matrix(l, h)?;
    Ok(max_abs(&(lhs - rhs)))
}

/// A unit quaternion as an SU(2) element.
pub fn su2_from_unit(q: [f64; 4]) -> Result<GroupElement> {
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::invalid("quaternion must be nonzero and finite"));
    }
    GroupElement::su2(Complex64::new(q[0] / n, q[1] / n), Complex64::new(q[2] / n, q[3] / n))
}

/// exp(iY), the positive factor of a polar decomposition.
pub fn exp_i(y: &AlgebraElement) -> M2 {
    y.exp_scaled(I)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::su2_class_rule;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_su2(rng: &mut ChaCha8Rng) -> GroupElement {
        // normalized Gaussian 4-vector is uniform on S³
        let q: [f64; 4] = std::array::from_fn(|_| {
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
        });
        su2_from_unit(q).unwrap()
    }

    fn random_sl2c(rng: &mut ChaCha8Rng) -> GroupElement {
        let a = rng.gen_range(-1.0..1.0);
        let x1 = random_su2(rng);
        let x2 = random_su2(rng);
        x1.compose(&GroupElement::exp_h(c(a, 0.0))).compose(&x2)
    }

    #[test]
    fn spin_parsing() {
        assert_eq!("3/2".parse::<Spin>().unwrap(), Spin(3));
        assert_eq!("1".parse::<Spin>().unwrap(), Spin(2));
        assert_eq!("0.5".parse::<Spin>().unwrap(), Spin(1));
        assert!("1/3".parse::<Spin>().is_err());
        assert!("-1".parse::<Spin>().is_err());
        assert_eq!(Spin(3).to_string(), "3/2");
        assert_eq!(Spin(4).to_string(), "2");
    }

    #[test]
    fn group_validation_and_closure() {
        assert!(GroupElement::sl2c([[ONE, ONE], [ZERO, c(2.0, 0.0)]]).is_err());
        assert!(GroupElement::su2(c(0.6, 0.0), c(0.6, 0.0)).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let g = random_su2(&mut rng);
            let h = random_su2(&mut rng);
            assert!(g.compose(&h).has_su2_shape());
            assert!(g.inverse().has_su2_shape());
            assert!(matrix_distance(g.compose(&g.inverse()).matrix(), &identity()) < 1e-14);
        }
    }

    #[test]
    fn polar_examples() {
        let g = GroupElement::su2(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let p = polar_decompose(&g).unwrap();
        assert!(p.a.abs() < 1e-15);
        assert!(matrix_distance(p.x.matrix(), g.matrix()) < 1e-15);
        assert!(matrix_distance(p.y.matrix(), &[[ZERO; 2]; 2]) < 1e-15);

        let g = GroupElement::exp_h(c(0.5, 0.0));
        let p = polar_decompose(&g).unwrap();
        assert!(matrix_distance(p.x.matrix(), &identity()) < 1e-14);
        // iY = aH
        let iy = scale(p.y.matrix(), I);
        assert!(matrix_distance(&iy, &[[c(0.5, 0.0), ZERO], [ZERO, c(-0.5, 0.0)]]) < 1e-14);
        assert!((p.a - 0.5).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let g = random_sl2c(&mut rng);
            let p = polar_decompose(&g).unwrap();
            let back = mul(p.x.matrix(), &exp_i(&p.y));
            assert!(matrix_distance(&back, g.matrix()) < 1e-10);
            assert!((det(p.x.matrix()) - ONE).norm() < 1e-12);
            assert!(p.x.has_su2_shape());
            assert!(p.y.is_su2(1e-12));
            let tr = p.y.matrix()[0][0] + p.y.matrix()[1][1];
            assert!(tr.norm() < 1e-14);
        }
    }

    #[test]
    fn rep_matrix_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_sl2c(&mut rng);
        let pi = rep_matrix(Spin(1), &g).unwrap();
        let m = g.matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!((pi[(i, j)] - m[i][j]).norm() < 1e-15);
            }
        }
        for k in 0..6 {
            let id = rep_matrix(Spin(k), &GroupElement::identity()).unwrap();
            assert!(max_abs(&(id - CMatrix::identity(k as usize + 1, k as usize + 1))) < 1e-15);
        }
        assert!(rep_matrix(Spin(61), &g).is_err());
        assert!(rep_matrix(Spin(60), &g).is_ok());
    }

    #[test]
    fn rep_homomorphism_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let g = random_su2(&mut rng);
            let h = random_sl2c(&mut rng);
            for k in 0..=6 {
                assert!(homomorphism_residual(Spin(k), &g, &h).unwrap() < 1e-10);
                let u = rep_matrix(Spin(k), &g).unwrap();
                let d = k as usize + 1;
                assert!(max_abs(&(u.adjoint() * &u - CMatrix::identity(d, d))) < 1e-12);
            }
        }
    }

    #[test]
    fn eigenvalue_law() {
        let a = 0.37;
        for k in 0..=6u32 {
            let pi = rep_matrix(Spin(k), &GroupElement::exp_h(c(a, 0.0))).unwrap();
            let l = k as f64 / 2.0;
            // diagonal in the monomial basis, entries e^{2a(l - j)}
            for j in 0..=k as usize {
                let expect = (2.0 * a * (l - j as f64)).exp();
                assert!((pi[(j, j)].re - expect).abs() < 1e-13 * expect);
            }
            let off: f64 = (0..=k as usize)
                .flat_map(|i| (0..=k as usize).map(move |j| (i, j)))
                .filter(|(i, j)| i != j)
                .map(|(i, j)| pi[(i, j)].norm())
                .fold(0.0, f64::max);
            assert_eq!(off, 0.0);
        }
    }

    #[test]
    fn characters() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for k in 0..8 {
            assert_eq!(character(Spin(k), &GroupElement::identity()).re, (k + 1) as f64);
        }
        let g = random_sl2c(&mut rng);
        assert!((character(Spin(1), &g) - g.trace()).norm() < 1e-15);
        let a = 0.7;
        let chi = character(Spin(2), &GroupElement::exp_h(c(a, 0.0)));
        assert!((chi.re - (3.0 * a).sinh() / a.sinh()).abs() < 1e-13);
        for k in 0..=6 {
            let g = random_sl2c(&mut rng);
            let h = random_su2(&mut rng);
            let tr = rep_matrix(Spin(k), &g).unwrap().trace();
            assert!((tr - character(Spin(k), &g)).norm() < 1e-11 * tr.norm().max(1.0));
            let conj = h.compose(&g).compose(&h.inverse());
            assert!((character(Spin(k), &conj) - character(Spin(k), &g)).norm() < 1e-12 * tr.norm().max(1.0));
        }
        // sin((2l+1)θ)/sin θ on class points, including θ → 0
        for &th in &[1e-9, 0.3, 2.0, PI - 1e-7] {
            let chi = character(Spin(5), &GroupElement::class_point(th));
            let expect = (6.0 * th).sin() / th.sin();
            assert!((chi.re - expect).abs() < 1e-8 && chi.im.abs() < 1e-12);
        }
    }

    #[test]
    fn heat_kernel_mass_and_positivity() {
        let rule = su2_class_rule(40).unwrap();
        for &t in &[0.3, 1.0, 2.5] {
            let ts = PlanckScale::new(t).unwrap();
            let mass: f64 = rule.integrate(|&th| heat_kernel(ts, &GroupElement::class_point(th), None).unwrap().value.re);
            assert!((mass - 1.0).abs() < 1e-8, "t={t}: {mass}");
            for &th in &rule.nodes {
                let v = heat_kernel(ts, &GroupElement::class_point(th), None).unwrap();
                // positive up to the tail bound and roundoff in the sum
                assert!(v.value.re > -(v.tail_bound + 1e-13), "t={t} th={th}: {v:?}");
                assert!(v.value.im.abs() < 1e-14);
                assert!(v.tail_bound <= DEFAULT_HEAT_TOL * v.value.norm().max(1.0));
            }
        }
        // oracle for the mass: ∫χ_l = δ_{l0} on a dense class rule
        let dense = su2_class_rule(400).unwrap();
        for k in 0..6 {
            let v: f64 = dense.integrate(|&th| character(Spin(k), &GroupElement::class_point(th)).re);
            assert!((v - if k == 0 { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_kernel_concentrates() {
        let mut prev = 0.0;
        for &t in &[2.0, 1.0, 0.5, 0.25, 0.1] {
            let v = heat_kernel(PlanckScale::new(t).unwrap(), &GroupElement::identity(), None).unwrap().value.re;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn heat_kernel_convergence_failure() {
        let g = GroupElement::exp_h(c(40.0, 0.0));
        let err = heat_kernel(PlanckScale::new(1e-3).unwrap(), &g, None).unwrap_err();
        match err {
            Error::ConvergenceFailure { required_doubled, .. } => assert!(required_doubled > MAX_HEAT_TWICE),
            other => panic!("{other:?}"),
        }
        let fixed = heat_kernel(PlanckScale::new(1.0).unwrap(), &GroupElement::identity(), Some(4)).unwrap();
        assert_eq!(fixed.cutoff_twice, 4);
        assert!(fixed.tail_bound > 1e-6);
    }

    #[test]
    fn heat_kernel_depends_on_class_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let t = PlanckScale::new(0.8).unwrap();
        for _ in 0..20 {
            let a = c(rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0));
            let base = heat_kernel(t, &GroupElement::exp_h(a), None).unwrap().value;
            let x1 = random_su2(&mut rng);
            // x₁e^{aH}x₁⁻¹ shares the eigenvalues
            let g = x1.compose(&GroupElement::exp_h(a)).compose(&x1.inverse());
            let v = heat_kernel(t, &g, None).unwrap().value;
            assert!((v - base).norm() < 1e-10 * base.norm().max(1.0));
        }
    }

    #[test]
    fn semigroup() {
        let rule = euler_quadrature([12, 24, 24]).unwrap();
        let (t, s) = (PlanckScale::new(0.7).unwrap(), PlanckScale::new(1.1).unwrap());
        let ts = PlanckScale::new(1.8).unwrap();
        for j in 0..10 {
            let x = GroupElement::class_point(0.1 + 0.3 * j as f64);
            let conv: Complex64 = rule.integrate(|y| {
                heat_kernel(t, &x.compose(&y.inverse()), None).unwrap().value * heat_kernel(s, y, None).unwrap().value
            });
            let direct = heat_kernel(ts, &x, None).unwrap().value;
            assert!((conv - direct).norm() < 1e-8, "{conv} vs {direct}");
        }
    }

    #[test]
    fn haar_rule_schur_orthogonality() {
        let rule = euler_quadrature([8, 14, 14]).unwrap();
        assert!((rule.total_weight() - 1.0).abs() < 1e-14);
        let mats: Vec<Vec<CMatrix>> = (0..=6u32)
            .map(|k| rule.nodes.iter().map(|g| rep_matrix(Spin(k), g).unwrap()).collect())
            .collect();
        for k in 0..=6usize {
            for k2 in 0..=6usize {
                for (m, n, m2, n2) in [(0, 0, 0, 0), (0, k, 0, k2), (k / 2, 0, k2 / 2, 0), (k, k, k2, k2)] {
                    let v: Complex64 = rule
                        .weights
                        .iter()
                        .enumerate()
                        .map(|(i, &w)| mats[k][i][(m, n)] * mats[k2][i][(m2, n2)].conj() * w)
                        .sum();
                    let expect = if k == k2 && m == m2 && n == n2 { 1.0 / (k + 1) as f64 } else { 0.0 };
                    assert!((v - c(expect, 0.0)).norm() < 1e-9, "{k} {k2} {m}{n}{m2}{n2}: {v}");
                }
            }
        }
        let chi_half: Complex64 = rule.integrate(|g| character(Spin(1), g));
        assert!(chi_half.norm() < 1e-12);
        let chi1_sq: f64 = rule.integrate(|g| character(Spin(2), g).norm_sqr());
        assert!((chi1_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transform_group_paths() {
        let hbar = PlanckScale::new(0.6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let one = PeterWeylCoeffs::character(Spin(0)).unwrap();
        let g = random_sl2c(&mut rng);
        assert!((transform_group(&one, &g, hbar).unwrap() - ONE).norm() < 1e-14);

        for k in 0..=4u32 {
            let chi = PeterWeylCoeffs::character(Spin(k)).unwrap();
            let g = random_sl2c(&mut rng);
            let v = transform_group(&chi, &g, hbar).unwrap();
            let expect = character(Spin(k), &g) * (-0.6 * Spin(k).casimir() / 2.0).exp();
            assert!((v - expect).norm() < 1e-12 * expect.norm().max(1.0));
        }

        // random band-limited f, L = 2
        let mut f = PeterWeylCoeffs::zero(Spin(4)).unwrap();
        for k in 0..=4u32 {
            let b = f.block_mut(Spin(k)).unwrap();
            for v in b.iter_mut() {
                *v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let rule = euler_quadrature([16, 30, 30]).unwrap();
        for _ in 0..3 {
            let g = random_sl2c(&mut rng);
            let a = transform_group(&f, &g, hbar).unwrap();
            let b = transform_group_by_convolution(&f, &g, hbar, &rule).unwrap();
            assert!((a - b).norm() < 1e-7 * a.norm().max(1.0), "{a} vs {b}");
        }
        // restriction to SU(2) is e^{ℏΔ/2}f: projection of the transform
        // recovers the damped coefficients
        let proj = PeterWeylCoeffs::project(|x| transform_group(&f, x, hbar).unwrap(), Spin(4), &euler_quadrature([8, 12, 12]).unwrap()).unwrap();
        let damped = f.heat_multiplied(hbar);
        for k in 0..=4u32 {
            let d = proj.block(Spin(k)).unwrap() - damped.block(Spin(k)).unwrap();
            assert!(max_abs(&d) < 1e-12);
        }
        // Plancherel on the coefficient side
        let rule = euler_quadrature([8, 12, 12]).unwrap();
        let l2: f64 = rule.integrate(|x| f.eval(x).unwrap().norm_sqr());
        assert!((l2 - f.norm_sq()).abs() < 1e-10 * f.norm_sq());
    }

    #[test]
    fn coefficients_json_round_trip() {
        let f = PeterWeylCoeffs::character(Spin(3)).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: PeterWeylCoeffs = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<PeterWeylCoeffs>(r#"{"cutoff_twice":1,"blocks":[[[[1,0]]]]}"#).is_err());
        assert!(serde_json::from_str::<PeterWeylCoeffs>(r#"{"cutoff_twice":0,"blocks":[[[[1,0],[0,0]]]]}"#).is_err());
    }

    #[test]
    fn algebra_exp() {
        let y = AlgebraElement::new([[c(0.0, 0.3), c(0.2, 0.1)], [c(-0.2, 0.1), c(0.0, -0.3)]]).unwrap();
        assert!(y.is_su2(1e-15));
        let e = y.exp_scaled(ONE);
        // exp of skew-adjoint traceless is in SU(2)
        let g = GroupElement::classify(e).unwrap();
        assert_eq!(g.tag(), GroupTag::Su2);
        // oracle: truncated power series
        let mut term = identity();
        let mut sum = identity();
        for k in 1..30 {
            term = scale(&mul(&term, y.matrix()), c(1.0 / k as f64, 0.0));
            sum = add(&sum, &term);
        }
        assert!(matrix_distance(&sum, &e) < 1e-15);
        assert!(AlgebraElement::new([[ONE, ZERO], [ZERO, ZERO]]).is_err());
    }
}
