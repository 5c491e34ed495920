//! Master polynomials and the generic evaluators of `F_p`-Selberg
//! integrals: brute-force coefficient extraction, the `O(c)` binomial sum
//! for two variables, the one-variable beta closed form, the
//! `n`-dimensional product formula, and the moment integrals used by the
//! parameter recurrences.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::formula::FactorialFormula;
use crate::modp::{Fp, FpContext};
use crate::poly::{CoeffRing, Cycle, Integers, MultiPoly, PrimeField};

/// Environment variable overriding [`ResourceLimits::max_terms`].
pub const MAX_TERMS_ENV: &str = "FPSELBERG_MAX_TERMS";

/// Size caps for the brute-force expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceLimits {
    /// Upper bound on the dense term count `(deg + 1)^n` of a master
    /// polynomial.
    pub max_terms: u64,
    /// Largest dimension expanded by brute force.
    pub max_dimension: usize,
    /// Largest prime allowed for expansions in three or more variables.
    pub max_prime_multivariate: u32,
}

impl Default for ResourceLimits {
    fn default() -> Self {
        ResourceLimits {
            max_terms: 4_000_000,
            max_dimension: 3,
            max_prime_multivariate: 11,
        }
    }
}

impl ResourceLimits {
    /// Defaults, with `max_terms` taken from `FPSELBERG_MAX_TERMS` when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = ResourceLimits::default();
        if let Ok(raw) = std::env::var(MAX_TERMS_ENV) {
            limits.max_terms = raw.trim().parse().map_err(|_| {
                Error::Resource(format!("{MAX_TERMS_ENV}={raw:?} is not a term count"))
            })?;
        }
        Ok(limits)
    }
}

/// `(a, b, c)` with `0 < a, b, c < p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SelbergParams {
    p: u32,
    a: u32,
    b: u32,
    c: u32,
}

impl SelbergParams {
    pub fn new(p: u32, a: u32, b: u32, c: u32) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if v == 0 || v >= p {
                return Err(Error::param(name, v as i64, format!("0 < {name} < p = {p}")));
            }
        }
        Ok(SelbergParams { p, a, b, c })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn a(&self) -> u32 {
        self.a
    }
    pub fn b(&self) -> u32 {
        self.b
    }
    pub fn c(&self) -> u32 {
        self.c
    }

    /// `delta = a + b + 2c + 1 - 2p`.
    pub fn delta(&self) -> i64 {
        self.a as i64 + self.b as i64 + 2 * self.c as i64 + 1 - 2 * self.p as i64
    }

    /// Every triple `0 < a, b, c < p` in lexicographic order.
    pub fn all(p: u32) -> impl Iterator<Item = SelbergParams> {
        (1..p).flat_map(move |a| {
            (1..p).flat_map(move |b| (1..p).map(move |c| SelbergParams { p, a, b, c }))
        })
    }

    pub(crate) fn check_context(&self, ctx: &FpContext) -> Result<()> {
        if ctx.p() != self.p {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }
}

/// `Phi_n = prod_{i<j} (x_i - x_j)^{2c} prod_i x_i^a (1 - x_i)^b`.
///
/// The exponents are only required to be non-negative here, which is the
/// domain of the `n`-dimensional product formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MasterPolySpec {
    pub n: usize,
    pub p: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl MasterPolySpec {
    pub fn new(n: usize, p: u32, a: u32, b: u32, c: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", 0, "n >= 1"));
        }
        Ok(MasterPolySpec { n, p, a, b, c })
    }

    pub fn from_params(n: usize, params: &SelbergParams) -> Result<Self> {
        Self::new(n, params.p, params.a, params.b, params.c)
    }

    fn degree_per_variable(&self) -> u64 {
        self.a as u64 + self.b as u64 + 2 * (self.n as u64 - 1) * self.c as u64
    }

    fn check_limits(&self, limits: &ResourceLimits) -> Result<()> {
        if self.n > limits.max_dimension {
            return Err(Error::Resource(format!(
                "dimension {} exceeds the brute-force cap {}",
                self.n, limits.max_dimension
            )));
        }
        if self.n >= 3 && self.p > limits.max_prime_multivariate {
            return Err(Error::Resource(format!(
                "p = {} exceeds {} for a {}-variable expansion",
                self.p, limits.max_prime_multivariate, self.n
            )));
        }
        let side = self.degree_per_variable() + 1;
        let terms = side.checked_pow(self.n as u32).unwrap_or(u64::MAX);
        if terms > limits.max_terms {
            return Err(Error::Resource(format!(
                "master polynomial could reach {terms} terms (cap {})",
                limits.max_terms
            )));
        }
        Ok(())
    }
}

/// `(x_i - x_j)^e` style binomial `sum_k (-1)^k C(e,k) x_i^{e-k} x_j^k`,
/// obtained by repeated squaring of `x_i - x_j`.
fn difference_power<R: CoeffRing>(ring: &R, n: usize, i: usize, j: usize, e: u64) -> Result<MultiPoly<R>> {
    let xi = MultiPoly::variable(ring.clone(), n, i)?;
    let xj = MultiPoly::variable(ring.clone(), n, j)?;
    Ok(xi.sub(&xj)?.power(e))
}

fn beta_factor<R: CoeffRing>(ring: &R, n: usize, i: usize, a: u32, b: u32) -> Result<MultiPoly<R>> {
    let x = MultiPoly::variable(ring.clone(), n, i)?;
    let one_minus_x = MultiPoly::one(ring.clone(), n).sub(&x)?;
    x.power(a as u64).multiply(&one_minus_x.power(b as u64))
}

/// `prod_{i<j} (x_i - x_j)^{diff_exp} prod_i x_i^a (1 - x_i)^b`, fully
/// expanded in `ring`.
pub(crate) fn product_polynomial<R: CoeffRing>(
    ring: &R,
    n: usize,
    a: u32,
    b: u32,
    diff_exp: u64,
) -> Result<MultiPoly<R>> {
    let mut acc = MultiPoly::one(ring.clone(), n);
    for i in 0..n {
        acc = acc.multiply(&beta_factor(ring, n, i, a, b)?)?;
    }
    for i in 0..n {
        for j in i + 1..n {
            acc = acc.multiply(&difference_power(ring, n, i, j, diff_exp)?)?;
        }
    }
    Ok(acc)
}

/// Expands `Phi_n` in the requested coefficient ring.
pub fn master_polynomial<R: CoeffRing>(
    spec: &MasterPolySpec,
    ring: &R,
    limits: &ResourceLimits,
) -> Result<MultiPoly<R>> {
    spec.check_limits(limits)?;
    product_polynomial(ring, spec.n, spec.a, spec.b, 2 * spec.c as u64)
}

pub fn master_polynomial_fp(spec: &MasterPolySpec, limits: &ResourceLimits) -> Result<MultiPoly<PrimeField>> {
    master_polynomial(spec, &PrimeField::from_prime(spec.p), limits)
}

fn check_cycle(spec: &MasterPolySpec, cycle: &Cycle) -> Result<()> {
    if cycle.len() != spec.n {
        return Err(Error::Arity {
            expected: spec.n,
            got: cycle.len(),
        });
    }
    Ok(())
}

/// Ground truth: expand `Phi_n` over `F_p` and read off the coefficient
/// named by `cycle`.
pub fn selberg_bruteforce(spec: &MasterPolySpec, cycle: &Cycle, limits: &ResourceLimits) -> Result<Fp> {
    check_cycle(spec, cycle)?;
    master_polynomial_fp(spec, limits)?.fp_integral(cycle)
}

/// Integer version of [`selberg_bruteforce`]: the coefficient of `Phi_n`
/// in `Z[x]`, before reduction.
pub fn selberg_bruteforce_integer(
    spec: &MasterPolySpec,
    cycle: &Cycle,
    limits: &ResourceLimits,
) -> Result<BigInt> {
    check_cycle(spec, cycle)?;
    master_polynomial(spec, &Integers, limits)?.cycle_coefficient(spec.p, cycle)
}

/// Coefficient of `x^{lp-1}` in `x^alpha (1-x)^b`:
/// `(-1)^j C(b, j)` with `j = lp - 1 - alpha`, zero unless `0 <= j <= b`.
pub fn beta_kernel(ctx: &FpContext, alpha: i64, b: u32, l: u32) -> Fp {
    let j = l as i64 * ctx.p() as i64 - 1 - alpha;
    if j < 0 || j > b as i64 {
        return ctx.zero();
    }
    Fp::sign(j, ctx.p()) * ctx.binomial_lucas(b as u64, j as u64)
}

/// Two-dimensional integral by expanding `(x_1 - x_2)^{2c}` alone:
/// `sum_k (-1)^k C(2c, k) A(a + 2c - k; l_1) A(a + k; l_2)`.
pub fn selberg_direct_2d(ctx: &FpContext, params: &SelbergParams, l1: u32, l2: u32) -> Result<Fp> {
    params.check_context(ctx)?;
    if l1 == 0 || l2 == 0 {
        return Err(Error::param("cycle entry", 0, "l >= 1"));
    }
    let (a, b, c) = (params.a as i64, params.b, params.c as u64);
    let p = ctx.p();
    let mut acc = ctx.zero();
    for k in 0..=2 * c {
        let left = beta_kernel(ctx, a + 2 * c as i64 - k as i64, b, l1);
        if left.is_zero() {
            continue;
        }
        let right = beta_kernel(ctx, a + k as i64, b, l2);
        acc += Fp::sign(k as i64, p) * ctx.binomial_lucas(2 * c, k) * left * right;
    }
    Ok(acc)
}

/// `F_p`-beta integral `int_{[1]} x^a (1-x)^b dx`:
/// `-a! b! / (a + b - p + 1)!` when `a + b >= p - 1`, zero otherwise.
pub fn beta_closed(ctx: &FpContext, a: u32, b: u32) -> Result<Fp> {
    let p = ctx.p();
    for (name, v) in [("a", a), ("b", b)] {
        if v >= p {
            return Err(Error::param(name, v as i64, format!("0 <= {name} < p = {p}")));
        }
    }
    if a + b < p - 1 {
        return Ok(ctx.zero());
    }
    FactorialFormula::new(
        "beta",
        true,
        vec![a as i64, b as i64],
        vec![(a + b + 1) as i64 - p as i64],
    )
    .evaluate(ctx)
}

/// The `n`-dimensional product formula as a [`FactorialFormula`]. The
/// `j = 1` factor `c!/c!` is cancelled.
pub fn selberg_nd_formula(ctx: &FpContext, n: usize, a: u32, b: u32, c: u32) -> Result<FactorialFormula> {
    if n == 0 {
        return Err(Error::param("n", 0, "n >= 1"));
    }
    let p = ctx.p() as i64;
    let (a, b, c, nn) = (a as i64, b as i64, c as i64, n as i64);
    if a + b + (nn - 1) * c < p - 1 {
        return Err(Error::Domain(format!(
            "a + b + (n-1)c = {} < p - 1 = {}",
            a + b + (nn - 1) * c,
            p - 1
        )));
    }
    if a + b + (2 * nn - 2) * c >= 2 * p - 1 {
        return Err(Error::Domain(format!(
            "a + b + (2n-2)c = {} >= 2p - 1 = {}",
            a + b + (2 * nn - 2) * c,
            2 * p - 1
        )));
    }
    let mut numerator = Vec::new();
    let mut denominator = Vec::new();
    for j in 1..=nn {
        if j > 1 {
            numerator.push(j * c);
            denominator.push(c);
        }
        numerator.push(a + (j - 1) * c);
        numerator.push(b + (j - 1) * c);
        denominator.push(a + b + (nn + j - 2) * c + 1 - p);
    }
    Ok(FactorialFormula::new("n-dim product", n % 2 == 1, numerator, denominator))
}

/// Closed form of the `n`-dimensional integral over `[1, ..., 1]`,
/// valid when `p - 1 <= a + b + (n-1)c` and `a + b + (2n-2)c < 2p - 1`.
pub fn selberg_nd_closed(ctx: &FpContext, n: usize, a: u32, b: u32, c: u32) -> Result<Fp> {
    selberg_nd_formula(ctx, n, a, b, c)?.evaluate(ctx)
}

/// Which symmetric linear factor multiplies `Phi` in a moment integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// `x_1 + x_2`
    S1,
    /// `(1 - x_1) + (1 - x_2)`
    S2,
}

/// `int_{cycle} w(x) Phi dx` for `w` chosen by `kind`.
pub fn moment_integral(
    params: &SelbergParams,
    cycle: &Cycle,
    kind: MomentKind,
    limits: &ResourceLimits,
) -> Result<Fp> {
    let spec = MasterPolySpec::from_params(2, params)?;
    check_cycle(&spec, cycle)?;
    let phi = master_polynomial_fp(&spec, limits)?;
    let ring = *phi.ring();
    let x1 = MultiPoly::variable(ring, 2, 0)?;
    let x2 = MultiPoly::variable(ring, 2, 1)?;
    let sum = x1.add(&x2)?;
    let weight = match kind {
        MomentKind::S1 => sum,
        MomentKind::S2 => MultiPoly::constant(ring, 2, ring.embed(2)).sub(&sum)?,
    };
    weight.multiply(&phi)?.fp_integral(cycle)
}
