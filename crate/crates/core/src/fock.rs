//! Truncated harmonic-oscillator operators.
//!
//! Operators are dense N×N complex matrices in the orthonormal Hermite basis
//! e_n = (a*)ⁿ f₀ / √(ℏⁿ n!). Finite matrices cannot satisfy [A, B] = cI, so
//! every commutation identity holds only on a leading block; see
//! [`exact_block_size`].

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scale::PlanckScale;

pub type CMatrix = DMatrix<Complex64>;

/// Largest Hermite index accepted by [`hermite_eval`].
pub const MAX_HERMITE_INDEX: usize = 512;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
#[cfg(test)]
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteBasisSpec {
    truncation: usize,
    scale: PlanckScale,
}

impl HermiteBasisSpec {
    pub fn new(truncation: usize, scale: PlanckScale) -> Result<Self> {
        if truncation < 2 {
            return Err(Error::invalid(format!("truncation must be ≥ 2, got {truncation}")));
        }
        Ok(HermiteBasisSpec { truncation, scale })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn scale(&self) -> PlanckScale {
        self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    entries: CMatrix,
    scale: PlanckScale,
}

impl FockOperator {
    pub fn new(entries: CMatrix, scale: PlanckScale) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::invalid("operator matrix must be square"));
        }
        if entries.nrows() < 2 {
            return Err(Error::invalid("operator truncation must be ≥ 2"));
        }
        Ok(FockOperator { entries, scale })
    }

    pub fn zeros(spec: HermiteBasisSpec) -> Self {
        let n = spec.truncation;
        FockOperator {
            entries: CMatrix::zeros(n, n),
            scale: spec.scale,
        }
    }

    pub fn identity(spec: HermiteBasisSpec) -> Self {
        let n = spec.truncation;
        FockOperator {
            entries: CMatrix::identity(n, n),
            scale: spec.scale,
        }
    }

    pub fn truncation(&self) -> usize {
        self.entries.nrows()
    }

    pub fn scale(&self) -> PlanckScale {
        self.scale
    }

    pub fn spec(&self) -> HermiteBasisSpec {
        HermiteBasisSpec {
            truncation: self.truncation(),
            scale: self.scale,
        }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        FockOperator {
            entries: self.entries.adjoint(),
            scale: self.scale,
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.truncation() != other.truncation() {
            return Err(Error::invalid(format!(
                "truncation mismatch: {} vs {}",
                self.truncation(),
                other.truncation()
            )));
        }
        if self.scale != other.scale {
            return Err(Error::invalid(format!("scale mismatch: {} vs {}", self.scale, other.scale)));
        }
        Ok(())
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(FockOperator {
            entries: &self.entries * &other.entries,
            scale: self.scale,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(FockOperator {
            entries: &self.entries + &other.entries,
            scale: self.scale,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(FockOperator {
            entries: &self.entries - &other.entries,
            scale: self.scale,
        })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        FockOperator {
            entries: &self.entries * c,
            scale: self.scale,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let n = self.truncation();
        let mut out = CMatrix::identity(n, n);
        for _ in 0..k {
            out = &out * &self.entries;
        }
        FockOperator {
            entries: out,
            scale: self.scale,
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.truncation();
        if v.len() > n {
            return Err(Error::invalid(format!("vector length {} exceeds truncation {n}", v.len())));
        }
        let mut out = vec![ZERO; n];
        for (j, &vj) in v.iter().enumerate() {
            if vj == ZERO {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.entries[(i, j)] * vj;
            }
        }
        Ok(out)
    }

    /// Upper-left `size`×`size` block.
    pub fn leading_block(&self, size: usize) -> CMatrix {
        let size = size.min(self.truncation());
        self.entries.view((0, 0), (size, size)).into_owned()
    }

    /// Kronecker product A ⊗ B, the operator on the two-mode truncation.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.scale != other.scale {
            return Err(Error::invalid("scale mismatch in Kronecker product"));
        }
        Ok(FockOperator {
            entries: self.entries.kronecker(&other.entries),
            scale: self.scale,
        })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs(&(&self.entries - self.entries.adjoint())) <= tol
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Side length of the leading block on which a product of operators of total
/// polynomial degree `degree` agrees with the untruncated operator.
pub fn exact_block_size(truncation: usize, degree: usize) -> Result<usize> {
    if degree >= truncation {
        return Err(Error::InsufficientTruncation {
            needed: degree + 1,
            got: truncation,
        });
    }
    Ok(truncation - degree)
}

/// Annihilation and creation matrices: a eₙ = √(ℏn) eₙ₋₁, a* eₙ = √(ℏ(n+1)) eₙ₊₁.
pub fn ladder(spec: HermiteBasisSpec) -> (FockOperator, FockOperator) {
    let n = spec.truncation;
    let h = spec.scale.value();
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = Complex64::new((h * k as f64).sqrt(), 0.0);
    }
    let a_dag = a.adjoint();
    (
        FockOperator {
            entries: a,
            scale: spec.scale,
        },
        FockOperator {
            entries: a_dag,
            scale: spec.scale,
        },
    )
}

/// X = (a + a*)/√2 and P = (a - a*)/(i√2), built entrywise.
pub fn position_momentum(spec: HermiteBasisSpec) -> (FockOperator, FockOperator) {
    let n = spec.truncation;
    let h = spec.scale.value();
    let mut x = CMatrix::zeros(n, n);
    let mut p = CMatrix::zeros(n, n);
    for k in 1..n {
        let s = (h * k as f64 / 2.0).sqrt();
        x[(k - 1, k)] = Complex64::new(s, 0.0);
        x[(k, k - 1)] = Complex64::new(s, 0.0);
        // P = -i(a - a*)/√2
        p[(k - 1, k)] = Complex64::new(0.0, -s);
        p[(k, k - 1)] = Complex64::new(0.0, s);
    }
    (
        FockOperator {
            entries: x,
            scale: spec.scale,
        },
        FockOperator {
            entries: p,
            scale: spec.scale,
        },
    )
}

pub fn commutator(a: &FockOperator, b: &FockOperator) -> Result<FockOperator> {
    a.check_compatible(b)?;
    Ok(FockOperator {
        entries: &a.entries * &b.entries - &b.entries * &a.entries,
        scale: a.scale,
    })
}

/// Normalized Hermite function hₙ(x) for scale ℏ, by the three-term
/// recurrence on normalized functions with running rescaling, so large n
/// neither overflows nor underflows before the Gaussian factor is applied.
pub fn hermite_eval(n: usize, x: f64, scale: PlanckScale) -> Result<f64> {
    if n >= MAX_HERMITE_INDEX {
        return Err(Error::invalid(format!("Hermite index {n} ≥ {MAX_HERMITE_INDEX}")));
    }
    Ok(hermite_all(n + 1, x, scale)[n])
}

/// h₀(x), …, h_{count-1}(x).
pub fn hermite_all(count: usize, x: f64, scale: PlanckScale) -> Vec<f64> {
    let h = scale.value();
    let mut out = vec![0.0; count];
    if count == 0 {
        return out;
    }
    // polynomial parts with a shared log-scale, Gaussian applied at the end
    let mut log_scale = 0.0f64;
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    let mut raw = Vec::with_capacity(count);
    let mut scales = Vec::with_capacity(count);
    raw.push(cur);
    scales.push(log_scale);
    for k in 0..count.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (h * (kf + 1.0))).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            prev *= 1e-150;
            cur *= 1e-150;
            log_scale += 150.0 * std::f64::consts::LN_10;
        }
        raw.push(cur);
        scales.push(log_scale);
    }
    let base = -0.25 * (PI * h).ln() - x * x / (2.0 * h);
    for k in 0..count {
        out[k] = raw[k] * (base + scales[k]).exp();
    }
    out
}

/// Residuals of the ladder identities on the truncation, with u = e₀ and
/// E = a*a.
#[derive(Debug, Clone, Serialize)]
pub struct LadderReport {
    /// max ‖E eₙ - ℏn eₙ‖
    pub number_residual: f64,
    /// max ‖a (a*)ⁿ e₀ - ℏn (a*)ⁿ⁻¹ e₀‖, relative to the right side
    pub lowering_residual: f64,
    /// max |⟨(a*)ⁿe₀, (a*)ᵐe₀⟩ - δₙₘ ℏⁿ n!|, relative to ℏⁿ n!
    pub gram_residual: f64,
    pub max_residual: f64,
}

pub fn svn_ladder_identities(spec: HermiteBasisSpec) -> LadderReport {
    let n = spec.truncation;
    let h = spec.scale.value();
    let (a, a_dag) = ladder(spec);
    let number = a_dag.entries() * a.entries();

    let mut number_residual = 0.0f64;
    for k in 0..n {
        let col = number.column(k);
        for i in 0..n {
            let expect = if i == k { h * k as f64 } else { 0.0 };
            number_residual = number_residual.max((col[i] - expect).norm());
        }
    }

    // raised states (a*)ᵏ e₀ for k < N-1; the top index is cut by truncation
    let top = n - 1;
    let mut raised: Vec<nalgebra::DVector<Complex64>> = Vec::with_capacity(top);
    let mut v = nalgebra::DVector::<Complex64>::zeros(n);
    v[0] = ONE;
    for _ in 0..top {
        raised.push(v.clone());
        v = a_dag.entries() * &v;
    }

    let mut lowering_residual = 0.0f64;
    for k in 1..top {
        let lhs = a.entries() * &raised[k];
        let rhs = &raised[k - 1] * Complex64::new(h * k as f64, 0.0);
        let size = rhs.norm().max(1.0);
        lowering_residual = lowering_residual.max((lhs - rhs).norm() / size);
    }
    let lhs0 = a.entries() * &raised[0];
    lowering_residual = lowering_residual.max(lhs0.iter().map(|c| c.norm()).fold(0.0, f64::max));

    let mut gram_residual = 0.0f64;
    let mut norm_k = 1.0;
    for k in 0..top {
        if k > 0 {
            norm_k *= h * k as f64;
        }
        for m in 0..top {
            let ip = raised[k].dotc(&raised[m]);
            let expect = if k == m { norm_k } else { 0.0 };
            gram_residual = gram_residual.max((ip - expect).norm() / norm_k.max(1.0));
        }
    }
    LadderReport {
        number_residual,
        lowering_residual,
        gram_residual,
        max_residual: number_residual.max(lowering_residual).max(gram_residual),
    }
}

/// ⟨(a*)ⁿ e₀, (a*)ⁿ e₀⟩ computed from the matrices.
pub fn raised_norm_sq(spec: HermiteBasisSpec, n: usize) -> Result<f64> {
    if n + 1 > spec.truncation {
        return Err(Error::InsufficientTruncation {
            needed: n + 1,
            got: spec.truncation,
        });
    }
    let (_, a_dag) = ladder(spec);
    let mut v = vec![ZERO; spec.truncation];
    v[0] = ONE;
    for _ in 0..n {
        v = a_dag.apply(&v)?;
    }
    Ok(v.iter().map(|c| c.norm_sqr()).sum())
}
