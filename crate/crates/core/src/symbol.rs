//! Polynomial phase-space symbols and their text form.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! symbol := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := number ['i'] | 'i' | var ['^' integer]
//! var    := ('x'|'p'|'z'|'zb') [index]
//! ```
//!
//! `z` stands for x + ip and `zb` for x - ip. An index starts at 1; a bare
//! variable is index 1. Parentheses and division are not part of the
//! grammar.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest exponent accepted by the parser.
pub const MAX_EXPONENT: u32 = 64;
/// Largest variable index accepted by the parser.
pub const MAX_DIMENSION: usize = 4;

/// Exponents of x₁..x_d and p₁..p_d.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub x: Vec<u32>,
    pub p: Vec<u32>,
}

impl Monomial {
    pub fn one(dim: usize) -> Self {
        Monomial {
            x: vec![0; dim],
            p: vec![0; dim],
        }
    }

    pub fn degree(&self) -> u32 {
        self.x.iter().chain(&self.p).sum()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect(),
            p: self.p.iter().zip(&other.p).map(|(a, b)| a + b).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSymbol {
    dim: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl PhaseSymbol {
    pub fn zero(dim: usize) -> Self {
        PhaseSymbol {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut s = PhaseSymbol::zero(dim);
        s.add_term(Monomial::one(dim), c);
        s
    }

    /// c·Π x_k^{n_k} p_k^{m_k}
    pub fn monomial(x: &[u32], p: &[u32], c: Complex64) -> Result<Self> {
        if x.len() != p.len() || x.is_empty() {
            return Err(Error::invalid("exponent vectors must be non-empty and of equal length"));
        }
        let mut s = PhaseSymbol::zero(x.len());
        s.add_term(
            Monomial {
                x: x.to_vec(),
                p: p.to_vec(),
            },
            c,
        );
        Ok(s)
    }

    /// xⁿpᵐ in one dimension.
    pub fn xp(n: u32, m: u32) -> Self {
        let mut s = PhaseSymbol::zero(1);
        s.add_term(Monomial { x: vec![n], p: vec![m] }, ONE);
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or(ZERO)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// All coefficients real in the x, p monomial basis.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    fn add_term(&mut self, m: Monomial, c: Complex64) {
        if c == ZERO {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.terms.remove(&m);
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::invalid(format!("dimension mismatch: {} vs {}", self.dim, other.dim)));
        }
        Ok(())
    }

    /// Same symbol regarded in a higher dimension.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        if dim < self.dim {
            return Err(Error::invalid("cannot embed into a lower dimension"));
        }
        let mut out = PhaseSymbol::zero(dim);
        for (m, &c) in &self.terms {
            let mut x = m.x.clone();
            let mut p = m.p.clone();
            x.resize(dim, 0);
            p.resize(dim, 0);
            out.add_term(Monomial { x, p }, c);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = PhaseSymbol::zero(self.dim);
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = PhaseSymbol::zero(self.dim);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// ∂/∂x_k (`momentum = false`) or ∂/∂p_k (`momentum = true`), k from 0.
    pub fn partial(&self, k: usize, momentum: bool) -> Self {
        let mut out = PhaseSymbol::zero(self.dim);
        for (m, &c) in &self.terms {
            let e = if momentum { m.p[k] } else { m.x[k] };
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            if momentum {
                m2.p[k] -= 1;
            } else {
                m2.x[k] -= 1;
            }
            out.add_term(m2, c * e as f64);
        }
        out
    }

    /// Value at a real phase-space point.
    pub fn eval(&self, x: &[f64], p: &[f64]) -> Result<Complex64> {
        if x.len() != self.dim || p.len() != self.dim {
            return Err(Error::invalid(format!("expected {} coordinates per axis", self.dim)));
        }
        let mut acc = ZERO;
        for (m, &c) in &self.terms {
            let mut v = c;
            for k in 0..self.dim {
                v *= x[k].powi(m.x[k] as i32) * p[k].powi(m.p[k] as i32);
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Laplacian on ℝ^{2d}.
    pub fn laplacian(&self) -> Self {
        let mut out = PhaseSymbol::zero(self.dim);
        for k in 0..self.dim {
            for momentum in [false, true] {
                let d2 = self.partial(k, momentum).partial(k, momentum);
                for (m, &c) in &d2.terms {
                    out.add_term(m.clone(), c);
                }
            }
        }
        out
    }

    /// Degree of each term after substituting x = (w + w̄)/2 and
    /// p = (w - w̄)/2i, as a map (w̄ exponents, w exponents) ↦ coefficient.
    pub fn to_complex_coordinates(&self) -> BTreeMap<(Vec<u32>, Vec<u32>), Complex64> {
        let mut out: BTreeMap<(Vec<u32>, Vec<u32>), Complex64> = BTreeMap::new();
        for (m, &c) in &self.terms {
            // per-axis expansions, then a product over axes
            let mut acc: Vec<(Vec<u32>, Vec<u32>, Complex64)> = vec![(vec![], vec![], c)];
            for k in 0..self.dim {
                let axis = expand_axis(m.x[k], m.p[k]);
                let mut next = Vec::with_capacity(acc.len() * axis.len());
                for (wb, w, ca) in &acc {
                    for &(j, l, cb) in &axis {
                        let mut wb2 = wb.clone();
                        let mut w2 = w.clone();
                        wb2.push(j);
                        w2.push(l);
                        next.push((wb2, w2, ca * cb));
                    }
                }
                acc = next;
            }
            for (wb, w, v) in acc {
                *out.entry((wb, w)).or_insert(ZERO) += v;
            }
        }
        out.retain(|_, v| *v != ZERO);
        out
    }
}

/// xⁿpᵐ = Σ c_{j,l} w̄ʲ wˡ with x = (w + w̄)/2, p = (w - w̄)/2i.
fn expand_axis(n: u32, m: u32) -> Vec<(u32, u32, Complex64)> {
    // (w + w̄)ⁿ (w - w̄)ᵐ / (2ⁿ (2i)ᵐ)
    let mut coeffs: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
    for a in 0..=n {
        let ca = binomial(n, a);
        for b in 0..=m {
            let cb = binomial(m, b) * if (m - b) % 2 == 1 { -1.0 } else { 1.0 };
            // w^{a+b} w̄^{(n-a)+(m-b)}
            *coeffs.entry((n - a + m - b, a + b)).or_insert(ZERO) += Complex64::new(ca * cb, 0.0);
        }
    }
    let denom = Complex64::new(2f64.powi(n as i32), 0.0) * Complex64::new(0.0, 2.0).powu(m);
    coeffs
        .into_iter()
        .filter(|(_, v)| *v != ZERO)
        .map(|((j, l), v)| (j, l, v / denom))
        .collect()
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// {f, g} = Σ_k ∂f/∂x_k ∂g/∂p_k - ∂f/∂p_k ∂g/∂x_k
pub fn poisson(f: &PhaseSymbol, g: &PhaseSymbol) -> Result<PhaseSymbol> {
    f.check_dim(g)?;
    let mut out = PhaseSymbol::zero(f.dim);
    for k in 0..f.dim {
        let a = f.partial(k, false).mul(&g.partial(k, true))?;
        let b = f.partial(k, true).mul(&g.partial(k, false))?;
        out = out.add(&a)?.sub(&b)?;
    }
    Ok(out)
}

/// e^{ℏΔ/4} f = Σ_k (ℏ/4)ᵏ Δᵏ f / k!, a finite sum for polynomials.
pub fn heat_smooth(f: &PhaseSymbol, hbar: crate::scale::PlanckScale) -> PhaseSymbol {
    let mut out = f.clone();
    let mut term = f.clone();
    let mut k = 0u32;
    loop {
        term = term.laplacian();
        if term.is_empty() {
            break;
        }
        k += 1;
        term = term.scale(Complex64::new(hbar.value() / (4.0 * k as f64), 0.0));
        for (m, &c) in &term.terms {
            out.add_term(m.clone(), c);
        }
    }
    out
}

impl fmt::Display for PhaseSymbol {
    /// Canonical text: terms in monomial order, complex coefficients split
    /// into a real and an imaginary term. Parses back to the same symbol.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces: Vec<(f64, bool, String)> = Vec::new();
        for (m, c) in &self.terms {
            let vars = format_vars(m, self.dim);
            if c.re != 0.0 {
                pieces.push((c.re, false, vars.clone()));
            }
            if c.im != 0.0 {
                pieces.push((c.im, true, vars));
            }
        }
        if pieces.is_empty() {
            return write!(f, "0");
        }
        for (idx, (v, imag, vars)) in pieces.iter().enumerate() {
            let neg = v.is_sign_negative();
            let mag = v.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let coef = match (*imag, mag == 1.0, vars.is_empty()) {
                (false, true, false) => String::new(),
                (false, _, _) => format!("{mag:?}"),
                (true, true, _) => "i".to_string(),
                (true, false, _) => format!("{mag:?}i"),
            };
            match (coef.is_empty(), vars.is_empty()) {
                (true, _) => write!(f, "{vars}")?,
                (false, true) => write!(f, "{coef}")?,
                (false, false) => write!(f, "{coef}*{vars}")?,
            }
        }
        Ok(())
    }
}

fn format_vars(m: &Monomial, dim: usize) -> String {
    let mut parts = Vec::new();
    for (name, exps) in [("x", &m.x), ("p", &m.p)] {
        for (k, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let var = if dim == 1 { name.to_string() } else { format!("{name}{}", k + 1) };
            parts.push(if e == 1 { var } else { format!("{var}^{e}") });
        }
    }
    parts.join("*")
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, bool),
    Imag,
    Var(char, bool, usize),
    Plus,
    Minus,
    Star,
    Caret,
    Int(u64),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn index_suffix(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(1);
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<usize>() {
            Ok(k) if (1..=MAX_DIMENSION).contains(&k) => Ok(k),
            _ => Err(Error::parse(start, format!("variable index must be 1..={MAX_DIMENSION}"))),
        }
    }

    /// Next token with its starting byte offset. After '^' digits lex as an
    /// integer exponent.
    fn next(&mut self, after_caret: bool) -> Result<Option<(usize, Tok)>> {
        self.skip_ws();
        let start = self.pos;
        let Some(&b) = self.src.get(self.pos) else {
            return Ok(None);
        };
        let tok = match b {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'0'..=b'9' if after_caret => {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                let v = text.parse::<u64>().map_err(|_| Error::parse(start, "exponent out of range"))?;
                Tok::Int(v)
            }
            b'0'..=b'9' | b'.' => {
                self.number_end()?;
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                let v: f64 = text.parse().map_err(|_| Error::parse(start, format!("malformed number {text:?}")))?;
                if !v.is_finite() {
                    return Err(Error::parse(start, "number out of range"));
                }
                let imag = self.src.get(self.pos) == Some(&b'i');
                if imag {
                    self.pos += 1;
                }
                Tok::Num(v, imag)
            }
            b'i' => {
                self.pos += 1;
                Tok::Imag
            }
            b'x' | b'p' => {
                self.pos += 1;
                let k = self.index_suffix()?;
                Tok::Var(b as char, false, k)
            }
            b'z' => {
                self.pos += 1;
                let bar = self.src.get(self.pos) == Some(&b'b');
                if bar {
                    self.pos += 1;
                }
                let k = self.index_suffix()?;
                Tok::Var('z', bar, k)
            }
            b'(' | b')' => return Err(Error::parse(start, "parentheses are not supported; write a sum of monomials")),
            b'/' => return Err(Error::parse(start, "division is not supported; write coefficients as decimals")),
            _ => {
                let ch = std::str::from_utf8(&self.src[start..]).ok().and_then(|s| s.chars().next()).unwrap_or('?');
                return Err(Error::parse(start, format!("unexpected character {ch:?}")));
            }
        };
        // a letter glued to a number or variable is malformed, e.g. "2x" or "xp"
        if matches!(tok, Tok::Num(..) | Tok::Var(..) | Tok::Imag) {
            if let Some(&c) = self.src.get(self.pos) {
                if c.is_ascii_alphanumeric() || c == b'.' {
                    return Err(Error::parse(self.pos, "missing '*' between factors"));
                }
            }
        }
        Ok(Some((start, tok)))
    }

    fn number_end(&mut self) -> Result<()> {
        let s = self.src;
        let digits = |p: &mut usize| {
            let st = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p - st
        };
        let start = self.pos;
        let mut n = digits(&mut self.pos);
        if self.pos < s.len() && s[self.pos] == b'.' {
            self.pos += 1;
            n += digits(&mut self.pos);
        }
        if n == 0 {
            return Err(Error::parse(start, "malformed number"));
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < s.len() && (s[self.pos] == b'+' || s[self.pos] == b'-') {
                self.pos += 1;
            }
            if digits(&mut self.pos) == 0 {
                self.pos = save;
                return Err(Error::parse(save, "malformed exponent in number"));
            }
        }
        Ok(())
    }
}

/// Parses a symbol. The dimension is the largest variable index used, and
/// at least `min_dim`.
pub fn parse_symbol_dim(text: &str, min_dim: usize) -> Result<PhaseSymbol> {
    let mut toks = Vec::new();
    let mut lexer = Lexer { src: text.as_bytes(), pos: 0 };
    let mut after_caret = false;
    while let Some((pos, t)) = lexer.next(after_caret)? {
        after_caret = t == Tok::Caret;
        toks.push((pos, t));
    }
    let end = text.len();
    if toks.is_empty() {
        return Err(Error::parse(0, "empty symbol"));
    }
    let dim = toks
        .iter()
        .filter_map(|(_, t)| match t {
            Tok::Var(_, _, k) => Some(*k),
            _ => None,
        })
        .max()
        .unwrap_or(1)
        .max(min_dim.max(1));
    if dim > MAX_DIMENSION {
        return Err(Error::parse(0, format!("dimension above {MAX_DIMENSION}")));
    }

    let mut out = PhaseSymbol::zero(dim);
    let mut i = 0;
    let mut first = true;
    while i < toks.len() {
        let mut sign = 1.0;
        match toks[i].1 {
            Tok::Plus => i += 1,
            Tok::Minus => {
                sign = -1.0;
                i += 1;
            }
            _ if first => {}
            _ => return Err(Error::parse(toks[i].0, "expected '+' or '-' between terms")),
        }
        first = false;
        // term
        let mut term = PhaseSymbol::constant(dim, Complex64::new(sign, 0.0));
        loop {
            let (pos, tok) = toks.get(i).cloned().ok_or_else(|| Error::parse(end, "expected a factor"))?;
            i += 1;
            let factor = match tok {
                Tok::Num(v, imag) => {
                    let c = if imag { Complex64::new(0.0, v) } else { Complex64::new(v, 0.0) };
                    PhaseSymbol::constant(dim, c)
                }
                Tok::Imag => PhaseSymbol::constant(dim, Complex64::new(0.0, 1.0)),
                Tok::Var(name, bar, k) => {
                    let mut exp = 1u32;
                    if let Some((_, Tok::Caret)) = toks.get(i) {
                        let (epos, etok) = toks.get(i + 1).cloned().ok_or_else(|| Error::parse(end, "expected an exponent"))?;
                        match etok {
                            Tok::Int(v) if v <= MAX_EXPONENT as u64 => exp = v as u32,
                            Tok::Int(_) => return Err(Error::parse(epos, format!("exponent above {MAX_EXPONENT}"))),
                            _ => return Err(Error::parse(epos, "expected a non-negative integer exponent")),
                        }
                        i += 2;
                    }
                    variable_power(dim, name, bar, k - 1, exp)
                }
                Tok::Caret => return Err(Error::parse(pos, "'^' must follow a variable")),
                Tok::Int(_) => return Err(Error::parse(pos, "unexpected integer")),
                Tok::Plus | Tok::Minus | Tok::Star => return Err(Error::parse(pos, "expected a factor")),
            };
            term = term.mul(&factor)?;
            if term.degree() > MAX_EXPONENT * 2 {
                return Err(Error::parse(pos, "term degree too large"));
            }
            match toks.get(i) {
                Some((_, Tok::Star)) => i += 1,
                Some((_, Tok::Plus | Tok::Minus)) | None => break,
                Some((p, Tok::Caret)) => return Err(Error::parse(*p, "'^' must follow a variable")),
                Some((p, _)) => return Err(Error::parse(*p, "missing '*' between factors")),
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

pub fn parse_symbol(text: &str) -> Result<PhaseSymbol> {
    parse_symbol_dim(text, 1)
}

impl std::str::FromStr for PhaseSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_symbol(s)
    }
}

fn variable_power(dim: usize, name: char, bar: bool, k: usize, exp: u32) -> PhaseSymbol {
    let mut x = vec![0; dim];
    let mut p = vec![0; dim];
    match name {
        'x' => {
            x[k] = exp;
            PhaseSymbol::monomial(&x, &p, ONE).unwrap_or_else(|_| PhaseSymbol::zero(dim))
        }
        'p' => {
            p[k] = exp;
            PhaseSymbol::monomial(&x, &p, ONE).unwrap_or_else(|_| PhaseSymbol::zero(dim))
        }
        _ => {
            // (x ± ip)^exp
            let s = if bar { -1.0 } else { 1.0 };
            let mut out = PhaseSymbol::zero(dim);
            for j in 0..=exp {
                let mut xe = vec![0; dim];
                let mut pe = vec![0; dim];
                xe[k] = exp - j;
                pe[k] = j;
                let c = Complex64::new(0.0, s).powu(j) * binomial(exp, j);
                out.add_term(Monomial { x: xe, p: pe }, c);
            }
            out
        }
    }
}
