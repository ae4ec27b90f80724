//! Registry of invariant checks run by `holoquant selftest`.
//!
//! Each check returns a residual; it passes when the residual is finite and
//! at most the check's tolerance. All randomness is seeded, so a given build
//! produces identical residuals on every run.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fock::{commutator, ladder, max_abs, position_momentum, CMatrix, HermiteBasisSpec};
use crate::holospace::{
    hardy_radial_integrals, kernel, kernel_from_basis, project_at, translate, HoloFunction, SpaceSpec,
};
use crate::quadrature::{
    circle_rule, complex_gaussian, disk_rule, gauss_hermite, su2_class_rule, ComplexWeight,
    DEFAULT_NU_HALF_WIDTH,
};
use crate::quantize::{
    antiwick_toeplitz_bridge, leading, quantize, scheme_differences, OrderingScheme,
};
use crate::scale::PlanckScale;
use crate::su2::{
    character, euler_quadrature, heat_kernel, homomorphism_residual, su2_from_unit, transform_group, GroupElement,
    PeterWeylCoeffs, Spin,
};
use crate::symbol::{parse_symbol, poisson, PhaseSymbol};
use crate::transform::{
    cauchy_riemann_residual, husimi, transform_a, transform_a_adjoint, transform_a_integral, transform_c, PhaseGrid,
    Representation, WaveFunction,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub struct Check {
    pub name: &'static str,
    pub module: &'static str,
    pub tol: f64,
    pub summary: &'static str,
    run: fn() -> Result<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: &'static str,
    pub module: &'static str,
    pub tol: f64,
    pub residual: f64,
    pub error: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.residual.is_finite() && self.residual <= self.tol
    }
}

impl Check {
    pub fn run(&self) -> Outcome {
        let (residual, error) = match (self.run)() {
            Ok(r) => (r, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        Outcome {
            name: self.name,
            module: self.module,
            tol: self.tol,
            residual,
            error,
        }
    }
}

macro_rules! check {
    ($module:literal, $name:literal, $tol:expr, $summary:literal, $run:path) => {
        Check {
            name: $name,
            module: $module,
            tol: $tol,
            summary: $summary,
            run: $run,
        }
    };
}

pub static REGISTRY: &[Check] = &[
    check!("quadrature", "rule-total-mass", 1e-12, "every rule integrates 1 to its documented mass", rule_total_mass),
    check!("quadrature", "hermite-odd-symmetry", 0.0, "n-node Gauss-Hermite integrates x^(2n-1) to exactly 0", hermite_odd_symmetry),
    check!("quadrature", "mu-moment-table", 1e-10, "mu_t moments of z^n zb^m are delta n! t^n", mu_moment_table),
    check!("fock", "ladder-sparsity", 0.0, "a is a pure index-lowering shift, a_dag its transpose, X and P tridiagonal", ladder_sparsity),
    check!("fock", "trivial-commutators", 0.0, "[X,X] = [P,P] = 0 exactly", trivial_commutators),
    check!("fock", "ladder-commutator-edge", 1e-12, "[a,a_dag] = hbar I except the corner hbar(1-N)", ladder_commutator_edge),
    check!("fock", "ccr-leading-block", 1e-12, "[X,P] = i hbar I on the leading block", ccr_leading_block),
    check!("fock", "self-adjoint-xp", 0.0, "X and P equal their adjoints entrywise", self_adjoint_xp),
    check!("holospace", "kernel-conjugate-symmetry", 1e-14, "K(w,z) = conj K(z,w) at 10^6 point pairs", kernel_conjugate_symmetry),
    check!("holospace", "kernel-idempotence", 1e-8, "integral of K(z,w)K(w,u) is K(z,u)", kernel_idempotence),
    check!("holospace", "hardy-radial-monotone", 0.0, "radial Hardy integrals are nondecreasing", hardy_radial_monotone),
    check!("holospace", "sb-kernel-tail-monotone", 0.0, "basis partial sums of the SB kernel converge monotonically", sb_kernel_tail_monotone),
    check!("holospace", "translate-phase-law", 1e-9, "T_a T_b = exp(-i Im(a conj b)/t) T_(a+b)", translate_phase_law),
    check!("holospace", "exponentiated-ccr", 1e-9, "V_r W_s = exp(-i r s/hbar) W_s V_r", exponentiated_ccr),
    check!("transform", "a-isometry", 1e-8, "A is an isometry and integral/coefficient paths agree", a_isometry),
    check!("transform", "cauchy-riemann", 1e-6, "C psi is holomorphic: CR residual / step^2", cauchy_riemann),
    check!("transform", "ground-state-isometry", 1e-12, "ground-state transform preserves the norm", ground_state_isometry),
    check!("transform", "adjoint-reproduces-kernel", 1e-8, "A A* reproduces exp(z conj w/hbar), A* A = I", adjoint_reproduces_kernel),
    check!("transform", "husimi-nonnegative", 0.0, "Husimi values are nonnegative", husimi_nonnegative),
    check!("quantize", "poisson-identities", 0.0, "antisymmetry, bilinearity, Jacobi, Leibniz", poisson_identities),
    check!("quantize", "commutator-identities", 1e-10, "matrix Jacobi and Leibniz identities", commutator_identities),
    check!("quantize", "linear-symbols-agree", 1e-13, "all schemes agree on degree <= 1", linear_symbols_agree),
    check!("quantize", "real-symbols-self-adjoint", 1e-12, "Weyl, Wick, anti-Wick of real f are self-adjoint", real_symbols_self_adjoint),
    check!("quantize", "pdo-xp-not-self-adjoint", 1e-12, "PDO(xp) - PDO(xp)* has size hbar", pdo_xp_asymmetry),
    check!("quantize", "wick-antiwick-gap", 1e-13, "anti-Wick(x^2) - Wick(x^2) = hbar I", wick_antiwick_gap),
    check!("quantize", "antiwick-toeplitz-bridge", 1e-9, "anti-Wick equals Toeplitz for x^n p^m, n+m <= 4", antiwick_toeplitz),
    check!("su2", "group-closure", 1e-12, "SU(2) products and inverses keep the SU(2) shape", group_closure),
    check!("su2", "rep-homomorphism", 1e-10, "pi_l(gh) = pi_l(g) pi_l(h), l <= 3", rep_homomorphism),
    check!("su2", "character-class-function", 1e-12, "chi_l(h g h^-1) = chi_l(g)", character_class_function),
    check!("su2", "heat-kernel-class-only", 1e-10, "rho_t depends only on the eigenvalue pair", heat_kernel_class_only),
    check!("su2", "laplacian-eigenvalue", 1e-12, "chi_l is scaled by exp(-hbar l(l+1)/2)", laplacian_eigenvalue),
];

pub fn run_all() -> Vec<Outcome> {
    REGISTRY.iter().map(Check::run).collect()
}

fn sc(h: f64) -> PlanckScale {
    PlanckScale::new(h).expect("positive constant")
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn disk_point(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    let rad = r * rng.gen::<f64>().sqrt();
    Complex64::from_polar(rad, rng.gen_range(0.0..2.0 * PI))
}

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn random_psi(rng: &mut ChaCha8Rng, degree: usize, h: f64) -> Result<WaveFunction> {
    WaveFunction::lebesgue(random_coeffs(rng, degree + 1), sc(h))?.normalized()
}

fn random_su2(rng: &mut ChaCha8Rng) -> Result<GroupElement> {
    let q: [f64; 4] = std::array::from_fn(|_| {
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    });
    su2_from_unit(q)
}

fn random_sl2c(rng: &mut ChaCha8Rng) -> Result<GroupElement> {
    let a = rng.gen_range(-1.0..1.0);
    let x1 = random_su2(rng)?;
    let x2 = random_su2(rng)?;
    Ok(x1.compose(&GroupElement::exp_h(c(a, 0.0))).compose(&x2))
}

fn spec(n: usize, h: f64) -> Result<HermiteBasisSpec> {
    HermiteBasisSpec::new(n, sc(h))
}

fn rel(got: f64, expect: f64) -> f64 {
    (got - expect).abs() / expect.abs()
}

fn rule_total_mass() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &h in &[0.5, 1.0, 2.0] {
        for n in [1, 7, 40, 200] {
            worst = worst.max(rel(gauss_hermite(n, sc(h))?.total_weight(), 1.0));
        }
        worst = worst.max(rel(complex_gaussian(12, sc(h), ComplexWeight::Mu)?.total_weight(), 1.0));
        let nu = complex_gaussian(12, sc(h), ComplexWeight::Nu)?;
        worst = worst.max(rel(nu.total_weight(), 2.0 * DEFAULT_NU_HALF_WIDTH * h.sqrt()));
    }
    for &a in &[0.0, 1.0, -0.5, 2.5] {
        worst = worst.max(rel(disk_rule(20, 40, a)?.total_weight(), PI / (a + 1.0)));
    }
    worst = worst.max(rel(circle_rule(33)?.total_weight(), 2.0 * PI));
    worst = worst.max(rel(su2_class_rule(25)?.total_weight(), 1.0));
    worst = worst.max(rel(euler_quadrature([6, 10, 10])?.total_weight(), 1.0));
    Ok(worst)
}

fn hermite_odd_symmetry() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &h in &[0.5, 1.0, 2.0] {
        for n in 1..=40 {
            let r = gauss_hermite(n, sc(h))?;
            let deg = 2 * n as i32 - 1;
            // reflected nodes are summed in pairs
            let mut s = 0.0;
            for i in 0..n / 2 {
                let j = n - 1 - i;
                s += r.weights[i] * r.nodes[i].powi(deg) + r.weights[j] * r.nodes[j].powi(deg);
            }
            if n % 2 == 1 {
                s += r.weights[n / 2] * r.nodes[n / 2].powi(deg);
            }
            worst = worst.max(s.abs());
        }
    }
    Ok(worst)
}

fn mu_moment_table() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in &[0.5, 1.0, 2.0] {
        let n = 8;
        let r = complex_gaussian(n, sc(t), ComplexWeight::Mu)?;
        let mut fact = 1.0;
        for a in 0..n {
            if a > 0 {
                fact *= a as f64;
            }
            for b in 0..n {
                if a + b > r.exact_degree {
                    continue;
                }
                let v: Complex64 = r.integrate(|z| z.powu(a as u32) * z.conj().powu(b as u32));
                let err = if a == b {
                    let exact = fact * t.powi(a as i32);
                    (v - exact).norm() / exact
                } else {
                    v.norm() / (1.0 + t.powi((a + b) as i32))
                };
                worst = worst.max(err);
            }
        }
    }
    Ok(worst)
}

fn ladder_sparsity() -> Result<f64> {
    let n = 12;
    let s = spec(n, 1.3)?;
    let (a, a_dag) = ladder(s);
    let (x, p) = position_momentum(s);
    let mut stray = 0.0;
    for i in 0..n {
        for j in 0..n {
            if j != i + 1 {
                stray += a.entries()[(i, j)].norm();
            } else if a.entries()[(i, j)] == ZERO {
                stray += 1.0;
            }
            stray += (a_dag.entries()[(i, j)] - a.entries()[(j, i)].conj()).norm();
            if i.abs_diff(j) > 1 {
                stray += x.entries()[(i, j)].norm() + p.entries()[(i, j)].norm();
            }
        }
    }
    Ok(stray)
}

fn trivial_commutators() -> Result<f64> {
    let (x, p) = position_momentum(spec(16, 0.7)?);
    Ok(max_abs(commutator(&x, &x)?.entries()).max(max_abs(commutator(&p, &p)?.entries())))
}

fn ladder_commutator_edge() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &h in &[0.5, 1.0, 2.0] {
        let n = 32;
        let (a, a_dag) = ladder(spec(n, h)?);
        let m = commutator(&a, &a_dag)?.into_entries();
        let mut expect = CMatrix::identity(n, n) * c(h, 0.0);
        expect[(n - 1, n - 1)] = c(h * (1.0 - n as f64), 0.0);
        worst = worst.max(max_abs(&(m - expect)));
    }
    Ok(worst)
}

fn ccr_leading_block() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &h in &[0.5, 1.0, 2.0] {
        let n = 32;
        let (x, p) = position_momentum(spec(n, h)?);
        let m = leading(commutator(&x, &p)?.entries(), n - 1);
        worst = worst.max(max_abs(&(m - CMatrix::identity(n - 1, n - 1) * c(0.0, h))));
    }
    Ok(worst)
}

fn self_adjoint_xp() -> Result<f64> {
    let (x, p) = position_momentum(spec(20, 1.7)?);
    Ok(max_abs(&(x.entries() - x.entries().adjoint())).max(max_abs(&(p.entries() - p.entries().adjoint()))))
}

fn kernel_conjugate_symmetry() -> Result<f64> {
    let mut r = rng(11);
    let spaces = [
        SpaceSpec::segal_bargmann(sc(0.7), 1)?,
        SpaceSpec::bergman(),
        SpaceSpec::weighted_bergman(0.5)?,
        SpaceSpec::hardy(),
        SpaceSpec::nu(sc(1.3), 1)?,
    ];
    let mut worst: f64 = 0.0;
    for k in 0..1_000_000 {
        let space = spaces[k % spaces.len()];
        let rad = if space.on_disk() { 0.95 } else { 2.0 };
        let z = disk_point(&mut r, rad);
        let w = disk_point(&mut r, rad);
        let kzw = kernel(space, &[z], &[w])?;
        let kwz = kernel(space, &[w], &[z])?;
        worst = worst.max((kwz - kzw.conj()).norm() / kzw.norm().max(1.0));
    }
    Ok(worst)
}

fn kernel_idempotence() -> Result<f64> {
    let space = SpaceSpec::segal_bargmann(sc(1.0), 1)?;
    let rule = complex_gaussian(40, sc(1.0), ComplexWeight::Mu)?;
    let points = [(c(0.3, -0.4), c(-0.2, 0.5)), (c(0.0, 0.1), c(0.45, 0.0)), (c(-0.35, -0.3), c(0.1, -0.4))];
    let mut worst: f64 = 0.0;
    for &(z, u) in &points {
        let v = project_at(space, |w| kernel(space, &[w], &[u]).unwrap_or(ZERO), z, &rule, None)?;
        worst = worst.max((v - kernel(space, &[z], &[u])?).norm());
    }
    let b = SpaceSpec::bergman();
    let rule = disk_rule(60, 130, 0.0)?;
    let m = 100;
    for &(z, u) in &points {
        let v = project_at(b, |w| kernel_from_basis(b, &[w], &[u], m).unwrap_or(ZERO), z, &rule, Some(m))?;
        worst = worst.max((v - kernel(b, &[z], &[u])?).norm());
    }
    Ok(worst)
}

fn hardy_radial_monotone() -> Result<f64> {
    let mut r = rng(17);
    let mut violations = 0.0;
    for degree in [1, 4, 7] {
        let f = HoloFunction::new(SpaceSpec::hardy(), random_coeffs(&mut r, degree + 1))?;
        let radii: Vec<f64> = (0..=50).map(|k| k as f64 / 50.0 * 0.999).collect();
        let vals = hardy_radial_integrals(&f, &radii, 32)?;
        violations += vals.windows(2).filter(|p| p[1] < p[0]).count() as f64;
    }
    Ok(violations)
}

fn sb_kernel_tail_monotone() -> Result<f64> {
    let space = SpaceSpec::segal_bargmann(sc(1.0), 1)?;
    let mut violations = 0.0;
    for &(z, w) in &[(c(1.0, 0.5), c(-0.5, 1.2)), (c(0.2, 0.1), c(0.3, -0.3)), (c(-1.5, 0.0), c(0.0, 1.5))] {
        let exact = kernel(space, &[z], &[w])?;
        // beyond m ≥ 2|z w̄|/t the terms shrink geometrically
        let start = (2.0 * (z * w.conj()).norm()).ceil() as usize;
        let mut prev = f64::INFINITY;
        for m in start..60 {
            let err = (kernel_from_basis(space, &[z], &[w], m)? - exact).norm();
            if err < 1e-14 * exact.norm().max(1.0) {
                break;
            }
            if err > prev {
                violations += 1.0;
            }
            prev = err;
        }
    }
    Ok(violations)
}

fn translate_phase_law() -> Result<f64> {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let t = [0.5, 0.9, 2.0][k % 3];
        let space = SpaceSpec::segal_bargmann(sc(t), 1)?;
        let f = HoloFunction::new(space, random_coeffs(&mut r, 6))?;
        let a = disk_point(&mut r, 0.8);
        let b = disk_point(&mut r, 0.8);
        let lhs = translate(&[a], &translate(&[b], &f)?)?;
        let phase = Complex64::from_polar(1.0, -(a * b.conj()).im / t);
        let rhs = translate(&[a + b], &f)?.scaled(phase);
        worst = worst.max(lhs.sub(&rhs)?.max_abs_coeff());
        worst = worst.max((translate(&[a], &f)?.norm()? - f.norm()?).abs());
    }
    Ok(worst)
}

fn exponentiated_ccr() -> Result<f64> {
    let mut r = rng(10);
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let h = [0.6, 1.1][k % 2];
        let space = SpaceSpec::segal_bargmann(sc(h), 1)?;
        let f = HoloFunction::new(space, random_coeffs(&mut r, 4))?;
        let (rr, s) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let v = |g: &HoloFunction| translate(&[c(0.0, -rr / 2f64.sqrt())], g);
        let w = |g: &HoloFunction| translate(&[c(-s / 2f64.sqrt(), 0.0)], g);
        let lhs = v(&w(&f)?)?;
        let rhs = w(&v(&f)?)?.scaled(Complex64::from_polar(1.0, -rr * s / h));
        worst = worst.max(lhs.sub(&rhs)?.max_abs_coeff());
    }
    Ok(worst)
}

fn a_isometry() -> Result<f64> {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for &h in &[0.5, 1.0, 2.0] {
        let rule = gauss_hermite(120, sc(h / 2.0))?;
        let psi = random_psi(&mut r, 20, h)?;
        let a = transform_a(&psi)?;
        worst = worst.max((a.norm_sq()? - psi.norm_sq()).abs());
        for _ in 0..5 {
            let z = c(r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5)) * h.sqrt();
            let lhs = transform_a_integral(&psi, z, &rule)?;
            let rhs = a.eval(&[z])?;
            worst = worst.max((lhs - rhs).norm() / rhs.norm().max(1.0));
        }
    }
    Ok(worst)
}

fn cauchy_riemann() -> Result<f64> {
    let mut r = rng(15);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let psi = random_psi(&mut r, 6, 1.0)?;
        let z = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        for &step in &[0.02, 0.01] {
            let res = cauchy_riemann_residual(|z| transform_c(&psi, z).unwrap_or(ZERO), z, step);
            worst = worst.max(res / (step * step));
        }
    }
    Ok(worst)
}

fn ground_state_isometry() -> Result<f64> {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for &h in &[0.5, 1.0, 2.0] {
        let psi = random_psi(&mut r, 10, h)?;
        let g = psi.ground_state_transform()?;
        // L²(ρ_ℏ) norm of Σ cₙuₙ by exact Gauss-Hermite quadrature
        let rule = gauss_hermite(12, sc(h))?;
        let n: f64 = rule.integrate(|&y| g.eval(y).norm_sqr());
        worst = worst.max(rel(n, psi.norm_sq()));
    }
    Ok(worst)
}

fn adjoint_reproduces_kernel() -> Result<f64> {
    let h = 0.9;
    let rule = gauss_hermite(80, sc(h / 2.0))?;
    let mut worst: f64 = 0.0;
    for &(z, w) in &[(c(0.4, -0.3), c(-0.2, 0.5)), (c(1.0, 0.2), c(0.5, 0.5))] {
        let v = rule.integrate_lebesgue(|x| {
            crate::transform::transform_a_kernel(z, x, sc(h)) * crate::transform::transform_a_kernel(w, x, sc(h)).conj()
        })?;
        worst = worst.max((v - (z * w.conj() / h).exp()).norm());
    }
    let mu = complex_gaussian(20, sc(h), ComplexWeight::Mu)?;
    for n in 0..5 {
        let image = transform_a(&WaveFunction::basis(n, sc(h), Representation::Lebesgue))?;
        for &x in &[-0.8, 0.1, 1.2] {
            let back = transform_a_adjoint(|w| image.eval(&[w]).unwrap_or(ZERO), x, sc(h), &mu);
            worst = worst.max((back - crate::fock::hermite_eval(n, x, sc(h))?).norm());
        }
    }
    Ok(worst)
}

fn husimi_nonnegative() -> Result<f64> {
    let mut r = rng(14);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let h = [0.5, 1.0, 2.0][k % 3];
        let psi = random_psi(&mut r, 8, h)?;
        let vals = husimi(&psi, &PhaseGrid::centered(sc(h), 5.0, 41).points())?;
        worst = vals.iter().fold(worst, |m, &v| m.max(-v));
    }
    Ok(worst)
}

fn random_symbol(r: &mut ChaCha8Rng) -> Result<PhaseSymbol> {
    let mut s = PhaseSymbol::zero(1);
    for _ in 0..r.gen_range(0..5) {
        let n = r.gen_range(0..=2u32);
        let m = r.gen_range(0..=2 - n);
        let k = r.gen_range(-3i32..=3) as f64;
        s = s.add(&PhaseSymbol::monomial(&[n], &[m], c(k, 0.0))?)?;
    }
    Ok(s)
}

fn poisson_identities() -> Result<f64> {
    let mut r = rng(5);
    let mut failures = 0.0;
    for _ in 0..200 {
        let f = random_symbol(&mut r)?;
        let g = random_symbol(&mut r)?;
        let h = random_symbol(&mut r)?;
        let fg = poisson(&f, &g)?;
        if fg != poisson(&g, &f)?.scale(-ONE) {
            failures += 1.0;
        }
        if poisson(&f.add(&h)?, &g)? != fg.add(&poisson(&h, &g)?)? {
            failures += 1.0;
        }
        let jac = poisson(&f, &poisson(&g, &h)?)?
            .add(&poisson(&g, &poisson(&h, &f)?)?)?
            .add(&poisson(&h, &fg)?)?;
        if !jac.is_empty() {
            failures += 1.0;
        }
        let leib = poisson(&f, &g.mul(&h)?)?;
        if leib != fg.mul(&h)?.add(&g.mul(&poisson(&f, &h)?)?)? {
            failures += 1.0;
        }
    }
    Ok(failures)
}

fn commutator_identities() -> Result<f64> {
    let s = spec(10, 1.0)?;
    let q = |t: &str| -> Result<_> { quantize(OrderingScheme::Weyl, &parse_symbol(t)?, s) };
    let (a, b, d) = (q("x^2 + p")?, q("x*p")?, q("p^2 - x")?);
    let jac = commutator(&a, &commutator(&b, &d)?)?
        .add(&commutator(&b, &commutator(&d, &a)?)?)?
        .add(&commutator(&d, &commutator(&a, &b)?)?)?;
    let lhs = commutator(&a, &b.compose(&d)?)?;
    let rhs = commutator(&a, &b)?.compose(&d)?.add(&b.compose(&commutator(&a, &d)?)?)?;
    Ok(max_abs(jac.entries()).max(max_abs(&(lhs.entries() - rhs.entries()))))
}

fn linear_symbols_agree() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for text in ["2*x - 0.5*p + 3 + i*x", "p", "x1 - 4*p2 + 0.5"] {
        let f = parse_symbol(text)?;
        for (_, _, d) in scheme_differences(&f, spec(8, 0.7)?)? {
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

fn real_symbols_self_adjoint() -> Result<f64> {
    let s = spec(14, 1.3)?;
    let f = parse_symbol("x^2*p + p^3 - x*p + 2*x^2")?;
    let mut worst: f64 = 0.0;
    for scheme in [OrderingScheme::Weyl, OrderingScheme::Wick, OrderingScheme::AntiWick] {
        let q = leading(quantize(scheme, &f, s)?.entries(), 14 - 3);
        worst = worst.max(max_abs(&(&q - q.adjoint())));
    }
    Ok(worst)
}

fn pdo_xp_asymmetry() -> Result<f64> {
    // XP - (XP)* = XP - PX = iℏ, so the gap is ℏ rather than 0
    let h = 1.3;
    let q = leading(quantize(OrderingScheme::PdoStandard, &PhaseSymbol::xp(1, 1), spec(14, h)?)?.entries(), 12);
    let gap = max_abs(&(&q - q.adjoint()));
    Ok((gap - h).abs())
}

fn wick_antiwick_gap() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &h in &[0.5, 0.8, 2.0] {
        let s = spec(12, h)?;
        let x2 = PhaseSymbol::xp(2, 0);
        let w = quantize(OrderingScheme::Wick, &x2, s)?;
        let a = quantize(OrderingScheme::AntiWick, &x2, s)?;
        let gap = leading(&(a.entries() - w.entries()), 10);
        worst = worst.max(max_abs(&(gap - CMatrix::identity(10, 10) * c(h, 0.0))));
    }
    Ok(worst)
}

fn antiwick_toeplitz() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &h in &[0.5, 1.0, 2.0] {
        let s = spec(24, h)?;
        for n in 0..=4u32 {
            for m in 0..=4 - n {
                worst = worst.max(antiwick_toeplitz_bridge(&PhaseSymbol::xp(n, m), s)?);
            }
        }
    }
    Ok(worst)
}

fn su2_shape_defect(g: &GroupElement) -> f64 {
    let m = g.matrix();
    (m[1][1] - m[0][0].conj())
        .norm()
        .max((m[0][1] + m[1][0].conj()).norm())
        .max((m[0][0].norm_sqr() + m[1][0].norm_sqr() - 1.0).abs())
}

fn group_closure() -> Result<f64> {
    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let g = random_su2(&mut r)?;
        let h = random_su2(&mut r)?;
        worst = worst.max(su2_shape_defect(&g.compose(&h))).max(su2_shape_defect(&g.inverse()));
    }
    Ok(worst)
}

fn rep_homomorphism() -> Result<f64> {
    let mut r = rng(21);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let g = random_su2(&mut r)?;
        let h = if k % 2 == 0 { random_su2(&mut r)? } else { random_sl2c(&mut r)? };
        for twice in 0..=6 {
            worst = worst.max(homomorphism_residual(Spin(twice), &g, &h)?);
        }
    }
    Ok(worst)
}

fn character_class_function() -> Result<f64> {
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let g = random_su2(&mut r)?;
        let h = random_su2(&mut r)?;
        let conj = h.compose(&g).compose(&h.inverse());
        for twice in 0..=6 {
            let d = (character(Spin(twice), &conj) - character(Spin(twice), &g)).norm();
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

fn heat_kernel_class_only() -> Result<f64> {
    let mut r = rng(77);
    let t = sc(0.8);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = c(r.gen_range(-1.5..1.5), r.gen_range(-3.0..3.0));
        let base = heat_kernel(t, &GroupElement::exp_h(a), None)?.value;
        let x = random_su2(&mut r)?;
        let g = x.compose(&GroupElement::exp_h(a)).compose(&x.inverse());
        let v = heat_kernel(t, &g, None)?.value;
        worst = worst.max((v - base).norm() / base.norm().max(1.0));
    }
    Ok(worst)
}

fn laplacian_eigenvalue() -> Result<f64> {
    let mut r = rng(99);
    let hbar = sc(0.6);
    let mut worst: f64 = 0.0;
    for twice in 0..=8u32 {
        let l = Spin(twice);
        let factor = (-0.6 * l.casimir() / 2.0).exp();
        let chi = PeterWeylCoeffs::character(l)?;
        let damped = chi.heat_multiplied(hbar);
        for k in 0..=twice {
            let (Some(a), Some(b)) = (damped.block(Spin(k)), chi.block(Spin(k))) else {
                continue;
            };
            worst = worst.max(max_abs(&(a - b * c(factor, 0.0))));
        }
        let g = random_sl2c(&mut r)?;
        let v = transform_group(&chi, &g, hbar)?;
        let expect = character(l, &g) * factor;
        worst = worst.max((v - expect).norm() / expect.norm().max(1.0));
    }
    Ok(worst)
}
