//! Quantization orderings, Toeplitz operators on the Segal–Bargmann space,
//! and phase-space moment functionals.
//!
//! Operators are truncated Hermite-basis matrices. A product of k factors
//! of X, P or the ladder operators is exact on indices below N - k, so every
//! comparison here is made on the multi-indices whose entries are all below
//! N - degree (see [`exact_indices`]).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{exact_block_size, max_abs, position_momentum, CMatrix, FockOperator, HermiteBasisSpec};
use crate::holospace::{kernel_section, HoloFunction, SpaceKind};
use crate::quadrature::{gauss_hermite, QuadratureRule};
use crate::scale::PlanckScale;
use crate::symbol::{binomial, poisson, PhaseSymbol};
use crate::transform::{husimi_unchecked, Representation, WaveFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingScheme {
    /// xⁿpᵐ ↦ XⁿPᵐ
    PdoStandard,
    /// xⁿpᵐ ↦ PᵐXⁿ
    PdoReverse,
    Weyl,
    /// (x-ip)ʲ(x+ip)ˡ ↦ (X-iP)ʲ(X+iP)ˡ
    Wick,
    /// (x-ip)ʲ(x+ip)ˡ ↦ (X+iP)ˡ(X-iP)ʲ
    AntiWick,
}

impl OrderingScheme {
    pub const ALL: [OrderingScheme; 5] = [
        OrderingScheme::PdoStandard,
        OrderingScheme::PdoReverse,
        OrderingScheme::Weyl,
        OrderingScheme::Wick,
        OrderingScheme::AntiWick,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderingScheme::PdoStandard => "pdo-standard",
            OrderingScheme::PdoReverse => "pdo-reverse",
            OrderingScheme::Weyl => "weyl",
            OrderingScheme::Wick => "wick",
            OrderingScheme::AntiWick => "anti-wick",
        }
    }
}

impl fmt::Display for OrderingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "pdo-standard" | "pdo" | "standard" => Ok(OrderingScheme::PdoStandard),
            "pdo-reverse" | "reverse" => Ok(OrderingScheme::PdoReverse),
            "weyl" | "symmetric" => Ok(OrderingScheme::Weyl),
            "wick" | "normal" => Ok(OrderingScheme::Wick),
            "anti-wick" | "antiwick" | "anti-normal" => Ok(OrderingScheme::AntiWick),
            other => Err(Error::invalid(format!("unknown ordering scheme {other:?}"))),
        }
    }
}

/// Flat indices of the tensor basis (axis 0 most significant) whose every
/// component lies below N - degree. For one axis this is the leading block.
pub fn exact_indices(truncation: usize, dim: usize, degree: usize) -> Result<Vec<usize>> {
    let block = exact_block_size(truncation, degree)?;
    let total = truncation.pow(dim as u32);
    Ok((0..total)
        .filter(|&flat| {
            let mut r = flat;
            (0..dim).all(|_| {
                let k = r % truncation;
                r /= truncation;
                k < block
            })
        })
        .collect())
}

pub fn restrict(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// One-axis operator tables with cached powers and Weyl words.
struct Axis {
    n: usize,
    x_pow: Vec<CMatrix>,
    p_pow: Vec<CMatrix>,
    w_pow: Vec<CMatrix>,
    wb_pow: Vec<CMatrix>,
    weyl_words: HashMap<(u32, u32), CMatrix>,
}

impl Axis {
    fn new(spec: HermiteBasisSpec) -> Self {
        let (x, p) = position_momentum(spec);
        let x = x.into_entries();
        let p = p.into_entries();
        let i = Complex64::new(0.0, 1.0);
        let w = &x + &p * i;
        let wb = &x - &p * i;
        let n = spec.truncation();
        let id = CMatrix::identity(n, n);
        Axis {
            n,
            x_pow: vec![id.clone(), x],
            p_pow: vec![id.clone(), p],
            w_pow: vec![id.clone(), w],
            wb_pow: vec![id, wb],
            weyl_words: HashMap::new(),
        }
    }

    fn pow(table: &mut Vec<CMatrix>, k: u32) -> CMatrix {
        while table.len() <= k as usize {
            let next = &table[table.len() - 1] * &table[1];
            table.push(next);
        }
        table[k as usize].clone()
    }

    /// Sum of every distinct word in n X's and m P's.
    fn words(&mut self, n: u32, m: u32) -> CMatrix {
        if n == 0 {
            return Self::pow(&mut self.p_pow, m);
        }
        if m == 0 {
            return Self::pow(&mut self.x_pow, n);
        }
        if let Some(s) = self.weyl_words.get(&(n, m)) {
            return s.clone();
        }
        let left = self.words(n - 1, m);
        let right = self.words(n, m - 1);
        let s = &self.x_pow[1] * left + &self.p_pow[1] * right;
        self.weyl_words.insert((n, m), s.clone());
        s
    }

    fn xp_monomial(&mut self, scheme: OrderingScheme, n: u32, m: u32) -> CMatrix {
        match scheme {
            OrderingScheme::PdoStandard => Self::pow(&mut self.x_pow, n) * Self::pow(&mut self.p_pow, m),
            OrderingScheme::PdoReverse => Self::pow(&mut self.p_pow, m) * Self::pow(&mut self.x_pow, n),
            // each of the C(n+m, n) distinct orderings appears n!m! times
            // among the (n+m)! permutations
            OrderingScheme::Weyl => self.words(n, m) / Complex64::new(binomial(n + m, n), 0.0),
            OrderingScheme::Wick | OrderingScheme::AntiWick => {
                unreachable!("complex orderings act on (x-ip, x+ip) monomials")
            }
        }
    }

    /// Operator for w̄ʲwˡ, w = x + ip.
    fn complex_monomial(&mut self, scheme: OrderingScheme, j: u32, l: u32) -> CMatrix {
        let wb = Self::pow(&mut self.wb_pow, j);
        let w = Self::pow(&mut self.w_pow, l);
        match scheme {
            OrderingScheme::Wick => wb * w,
            _ => w * wb,
        }
    }
}

fn kron_all(factors: Vec<CMatrix>) -> CMatrix {
    let mut it = factors.into_iter();
    let first = it.next().unwrap_or_else(|| CMatrix::identity(1, 1));
    it.fold(first, |acc, m| acc.kronecker(&m))
}

/// Q(f) for the given ordering on the N^d-dimensional tensor basis.
///
/// Fails with `InsufficientTruncation` when deg f ≥ N, since then no entry
/// of the truncated result is guaranteed exact.
pub fn quantize(scheme: OrderingScheme, f: &PhaseSymbol, spec: HermiteBasisSpec) -> Result<FockOperator> {
    let n = spec.truncation();
    exact_block_size(n, f.degree() as usize)?;
    let dim = f.dim();
    let size = n.pow(dim as u32);
    if size > 4096 {
        return Err(Error::invalid(format!("tensor basis of size {size} is too large")));
    }
    let mut axis = Axis::new(spec);
    let mut out = CMatrix::zeros(size, size);
    match scheme {
        OrderingScheme::Wick | OrderingScheme::AntiWick => {
            for ((wb, w), c) in f.to_complex_coordinates() {
                let factors = (0..dim).map(|k| axis.complex_monomial(scheme, wb[k], w[k])).collect();
                out += kron_all(factors) * c;
            }
        }
        _ => {
            for (m, &c) in f.terms() {
                let factors = (0..dim).map(|k| axis.xp_monomial(scheme, m.x[k], m.p[k])).collect();
                out += kron_all(factors) * c;
            }
        }
    }
    debug_assert_eq!(axis.n, n);
    FockOperator::new(out, spec.scale())
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketReport {
    pub scheme: OrderingScheme,
    /// Leading block size per axis.
    pub block: usize,
    /// (1/iℏ)[Q(f), Q(g)] on the exact indices.
    #[serde(skip)]
    pub lhs: CMatrix,
    /// Q({f, g}) on the exact indices.
    #[serde(skip)]
    pub rhs: CMatrix,
    #[serde(skip)]
    pub diff: CMatrix,
    pub max_abs: f64,
}

/// Compares (1/iℏ)[Q(f), Q(g)] with Q({f, g}) on the block of size
/// N - deg f - deg g, where both sides are exact.
pub fn commutator_vs_poisson(
    scheme: OrderingScheme,
    f: &PhaseSymbol,
    g: &PhaseSymbol,
    spec: HermiteBasisSpec,
) -> Result<BracketReport> {
    let degree = (f.degree() + g.degree()) as usize;
    let idx = exact_indices(spec.truncation(), f.dim(), degree)?;
    let qf = quantize(scheme, f, spec)?;
    let qg = quantize(scheme, g, spec)?;
    let bracket = poisson(f, g)?;
    let qb = quantize(scheme, &bracket, spec)?;
    let comm = qf.compose(&qg)?.sub(&qg.compose(&qf)?)?;
    let ih = Complex64::new(0.0, spec.scale().value());
    let lhs = restrict(comm.entries(), &idx) / ih;
    let rhs = restrict(qb.entries(), &idx);
    let diff = &lhs - &rhs;
    Ok(BracketReport {
        scheme,
        block: exact_block_size(spec.truncation(), degree)?,
        max_abs: max_abs(&diff),
        lhs,
        rhs,
        diff,
    })
}

/// Polynomial symbol on ℂ: (z-degree, z̄-degree) ↦ coefficient.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SBSymbol {
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl SBSymbol {
    pub fn new() -> Self {
        SBSymbol::default()
    }

    /// c·zᵇz̄ᵃ
    pub fn monomial(z_deg: u32, zb_deg: u32, c: Complex64) -> Self {
        let mut s = SBSymbol::new();
        s.add(z_deg, zb_deg, c);
        s
    }

    pub fn add(&mut self, z_deg: u32, zb_deg: u32, c: Complex64) {
        let e = self.terms.entry((z_deg, zb_deg)).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.terms.remove(&(z_deg, zb_deg));
        }
    }

    /// Reads a one-dimensional phase symbol as a function of z = x + ip.
    pub fn from_phase(f: &PhaseSymbol) -> Result<Self> {
        if f.dim() != 1 {
            return Err(Error::invalid("Toeplitz symbols are implemented in one variable"));
        }
        let mut s = SBSymbol::new();
        for ((wb, w), c) in f.to_complex_coordinates() {
            s.add(w[0], wb[0], c);
        }
        Ok(s)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Complex64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(a, b), &c)| c * z.powu(a) * z.conj().powu(b))
            .sum()
    }
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// T_φ on the orthonormal monomials zⁿ/√(n!tⁿ) of ℋL²(ℂ, μ_t), from
/// T_{z̄ᵃzᵇ} = (t d/dz)ᵃ zᵇ. Every entry is exact; no block restriction.
pub fn toeplitz(phi: &SBSymbol, truncation: usize, scale: PlanckScale) -> Result<FockOperator> {
    let spec = HermiteBasisSpec::new(truncation, scale)?;
    let t = scale.value();
    let mut out = CMatrix::zeros(truncation, truncation);
    for (&(b, a), &c) in phi.terms() {
        for n in 0..truncation {
            let top = n as u32 + b;
            if a > top {
                continue;
            }
            let m = (top - a) as usize;
            if m >= truncation {
                continue;
            }
            // t^a (n+b)!/m! · √(m! t^m / (n! t^n))
            let ln = a as f64 * t.ln() + ln_factorial(top) - ln_factorial(m as u32)
                + 0.5 * (ln_factorial(m as u32) - ln_factorial(n as u32) + (m as f64 - n as f64) * t.ln());
            out[(m, n)] += c * ln.exp();
        }
    }
    FockOperator::new(out, spec.scale())
}

/// The same matrix with every entry ⟨e_m, φ e_n⟩ integrated on a μ_t rule.
pub fn toeplitz_by_quadrature(
    phi: &SBSymbol,
    truncation: usize,
    scale: PlanckScale,
    rule: &QuadratureRule<Complex64>,
) -> Result<FockOperator> {
    let t = scale.value();
    let mut out = CMatrix::zeros(truncation, truncation);
    for (&z, w) in rule.iter() {
        let mut e = Vec::with_capacity(truncation);
        let mut v = ONE;
        for n in 0..truncation {
            e.push(v);
            v *= z / (t * (n as f64 + 1.0)).sqrt();
        }
        let fz = phi.eval(z) * w;
        for m in 0..truncation {
            let em = e[m].conj() * fz;
            for n in 0..truncation {
                out[(m, n)] += em * e[n];
            }
        }
    }
    FockOperator::new(out, scale)
}

/// φ'(z) = φ(√2 z̄) as a Toeplitz symbol.
fn primed(phi: &PhaseSymbol) -> Result<SBSymbol> {
    let s = SBSymbol::from_phase(phi)?;
    let mut out = SBSymbol::new();
    for (&(a, b), &c) in s.terms() {
        // (√2 z̄)ᵃ (√2 z)ᵇ
        out.add(b, a, c * 2f64.powf((a + b) as f64 / 2.0));
    }
    Ok(out)
}

/// Max-abs of A⁻¹T_{φ'}A - Q_antiWick(φ) on the leading block, with the
/// Toeplitz operator built on raw monomial coefficients and A acting on
/// coefficients as hₙ ↦ zⁿ/√(ℏⁿn!).
pub fn antiwick_toeplitz_bridge(phi: &PhaseSymbol, spec: HermiteBasisSpec) -> Result<f64> {
    let n = spec.truncation();
    let h = spec.scale().value();
    let block = exact_block_size(n, phi.degree() as usize)?;
    let sym = primed(phi)?;
    // T on the basis zⁿ: z̄ᵃzᵇ zⁿ ↦ hᵃ (n+b)!/(n+b-a)! z^{n+b-a}
    let mut raw = CMatrix::zeros(n, n);
    for (&(b, a), &c) in sym.terms() {
        for col in 0..n {
            let top = col as u32 + b;
            if a > top || (top - a) as usize >= n {
                continue;
            }
            let row = (top - a) as usize;
            let v = h.powi(a as i32) * (ln_factorial(top) - ln_factorial(row as u32)).exp();
            raw[(row, col)] += c * v;
        }
    }
    let a_diag: Vec<f64> = (0..n).map(|k| (-0.5 * (k as f64 * h.ln() + ln_factorial(k as u32))).exp()).collect();
    let a_mat = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, a_diag.iter().map(|&v| Complex64::new(v, 0.0))));
    let a_inv = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, a_diag.iter().map(|&v| Complex64::new(1.0 / v, 0.0))));
    let conj = &a_inv * raw * &a_mat;
    let aw = quantize(OrderingScheme::AntiWick, phi, spec)?;
    Ok(max_abs(&(conj.view((0, 0), (block, block)) - aw.entries().view((0, 0), (block, block)))))
}

fn check_state(psi: &WaveFunction) -> Result<()> {
    if psi.representation() != Representation::Lebesgue {
        return Err(Error::invalid("moments expect a Lebesgue wave function"));
    }
    let n = psi.norm_sq();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("moments need a unit vector, ‖ψ‖² = {n}")));
    }
    Ok(())
}

fn phase_dim_one(f: &PhaseSymbol) -> Result<()> {
    if f.dim() != 1 {
        return Err(Error::invalid("moments are implemented in one dimension"));
    }
    Ok(())
}

/// ⟨ψ, Q_Weyl(f)ψ⟩, on a truncation large enough that every entry used is exact.
pub fn weyl_moment(psi: &WaveFunction, f: &PhaseSymbol) -> Result<Complex64> {
    check_state(psi)?;
    phase_dim_one(f)?;
    let len = psi.coefficients().len();
    let n = len + f.degree() as usize + 1;
    let spec = HermiteBasisSpec::new(n.max(2), psi.scale())?;
    let q = quantize(OrderingScheme::Weyl, f, spec)?;
    let mut v = psi.coefficients().to_vec();
    v.resize(spec.truncation(), ZERO);
    let qv = q.apply(&v)?;
    Ok(v.iter().zip(&qv).map(|(a, b)| a.conj() * b).sum())
}

/// Gauss–Hermite rule of variance ℏ with enough nodes to integrate f·H_ψ
/// exactly against the Gaussian factor of H_ψ.
pub fn default_husimi_rule(psi: &WaveFunction, f: &PhaseSymbol) -> Result<QuadratureRule<f64>> {
    let degree = f.degree() as usize + 2 * psi.degree();
    gauss_hermite(degree / 2 + 2, psi.scale())
}

/// ∫ f·H_ψ dx dp on the product of `rule` with itself, against Lebesgue
/// measure through the rule's density.
pub fn husimi_moment(psi: &WaveFunction, f: &PhaseSymbol, rule: &QuadratureRule<f64>) -> Result<Complex64> {
    check_state(psi)?;
    phase_dim_one(f)?;
    let mut acc = ZERO;
    for (&p, wp) in rule.iter() {
        let inner: Result<Complex64> = rule.integrate_lebesgue(|x| {
            let fx = f.eval(&[x], &[p]).unwrap_or(ZERO);
            fx * husimi_unchecked(psi, x, p)
        });
        let rho = rule
            .measure
            .line_density(p)
            .ok_or_else(|| Error::invalid("rule has no known density on the real line"))?;
        acc += inner? * (wp / rho);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoherentFormReport {
    pub matrix: Complex64,
    pub direct: Complex64,
    pub coherent: Complex64,
    pub residual: f64,
}

/// ⟨F, T_φG⟩ three ways: the Toeplitz matrix, ∫ conj(F) φ G dμ_t on the
/// rule, and ∫ φ(z)⟨F, K_z⟩⟨K_z, G⟩ dμ_t with kernel sections K_z.
pub fn toeplitz_coherent_form(
    phi: &SBSymbol,
    f: &HoloFunction,
    g: &HoloFunction,
    rule: &QuadratureRule<Complex64>,
) -> Result<CoherentFormReport> {
    let space = f.space();
    let t = match space.kind() {
        SpaceKind::SegalBargmann { t } if space.dim() == 1 => t,
        _ => return Err(Error::invalid("coherent forms need a one-variable Segal–Bargmann space")),
    };
    if g.space() != space {
        return Err(Error::invalid("F and G must live in the same space"));
    }
    let degree = f.degree().max(g.degree());
    let m = degree + phi.degree() as usize + 2;
    let to_on = |h: &HoloFunction| -> Vec<Complex64> {
        let mut out = vec![ZERO; m];
        for (n, slot) in out.iter_mut().enumerate() {
            if n <= h.degree() {
                let scale = (0.5 * (ln_factorial(n as u32) + n as f64 * t.value().ln())).exp();
                *slot = h.coefficient(&[n]) * scale;
            }
        }
        out
    };
    let tm = toeplitz(phi, m, t)?;
    let fv = to_on(f);
    let tg = tm.apply(&to_on(g))?;
    let matrix: Complex64 = fv.iter().zip(&tg).map(|(a, b)| a.conj() * b).sum();

    let mut direct = ZERO;
    let mut coherent = ZERO;
    for (&z, w) in rule.iter() {
        let fz = f.eval(&[z])?;
        let gz = g.eval(&[z])?;
        let pz = phi.eval(z);
        direct += fz.conj() * pz * gz * w;
        let kz = kernel_section(space, z, degree)?;
        coherent += pz * f.inner(&kz)? * kz.inner(g)? * w;
    }
    let residual = (matrix - direct).norm().max((matrix - coherent).norm()).max((direct - coherent).norm());
    Ok(CoherentFormReport {
        matrix,
        direct,
        coherent,
        residual,
    })
}

/// Table of max-abs differences between every pair of schemes on the
/// exact block.
pub fn scheme_differences(f: &PhaseSymbol, spec: HermiteBasisSpec) -> Result<Vec<(OrderingScheme, OrderingScheme, f64)>> {
    let idx = exact_indices(spec.truncation(), f.dim(), f.degree() as usize)?;
    let ops: Vec<CMatrix> = OrderingScheme::ALL
        .iter()
        .map(|&s| quantize(s, f, spec).map(|q| restrict(q.entries(), &idx)))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            out.push((OrderingScheme::ALL[i], OrderingScheme::ALL[j], max_abs(&(&ops[i] - &ops[j]))));
        }
    }
    Ok(out)
}

/// Leading-block helper used by tests and the CLI.
pub fn leading(m: &CMatrix, size: usize) -> CMatrix {
    m.view((0, 0), (size, size)).into_owned()
}
