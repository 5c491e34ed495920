//! Morris' constant-term identity over the integers.
//!
//! ```text
//! CT prod_i (1 - x_i)^alpha (1 - 1/x_i)^beta prod_{j != k} (1 - x_j/x_k)^gamma
//!   = prod_{j=1}^n (j gamma)!/gamma! * (alpha + beta + (j-1)gamma)!
//!                  / ((alpha + (j-1)gamma)! (beta + (j-1)gamma)!)
//! ```
//!
//! Both sides are computed exactly, and the substitutions that turn the
//! `[1,1]` and `[2,2]` Selberg integrals into such constant terms are
//! provided so the bridge can be checked numerically.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::selberg::SelbergParams;

/// Laurent polynomial with integer coefficients; exponents may be negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    num_vars: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl LaurentPoly {
    pub fn one(num_vars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; num_vars], BigInt::one());
        LaurentPoly { num_vars, terms }
    }

    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, BigInt)>,
    {
        let mut acc: BTreeMap<Vec<i64>, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::Arity {
                    expected: num_vars,
                    got: e.len(),
                });
            }
            *acc.entry(e).or_default() += c;
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(LaurentPoly {
            num_vars,
            terms: acc,
        })
    }

    /// `1 - x^{e}` for an exponent vector `e`.
    pub fn one_minus_monomial(e: Vec<i64>) -> Self {
        let k = e.len();
        Self::from_terms(k, [(vec![0; k], BigInt::one()), (e, -BigInt::one())])
            .expect("arity matches")
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &[i64]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&vec![0; self.num_vars])
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.num_vars != other.num_vars {
            return Err(Error::Arity {
                expected: self.num_vars,
                got: other.num_vars,
            });
        }
        let mut acc: HashMap<Vec<i64>, BigInt> = HashMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_default() += ca * cb;
            }
        }
        Ok(LaurentPoly {
            num_vars: self.num_vars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn power(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.num_vars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base).expect("same arity");
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base).expect("same arity");
            }
        }
        acc
    }
}

/// `(n, alpha, beta, gamma)`, all non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MorrisParams {
    pub n: usize,
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
}

/// Largest dimension and exponent expanded by the brute-force sides.
pub const MORRIS_MAX_N: usize = 3;
pub const MORRIS_MAX_EXPONENT: u32 = 4;

impl MorrisParams {
    pub fn new(n: usize, alpha: u32, beta: u32, gamma: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", 0, "n >= 1"));
        }
        Ok(MorrisParams {
            n,
            alpha,
            beta,
            gamma,
        })
    }

    fn check_guard(&self) -> Result<()> {
        let max = self.alpha.max(self.beta).max(self.gamma);
        if self.n > MORRIS_MAX_N || max > MORRIS_MAX_EXPONENT {
            return Err(Error::Resource(format!(
                "constant-term expansion limited to n <= {MORRIS_MAX_N} and exponents <= {MORRIS_MAX_EXPONENT}, got n = {} and max exponent {max}",
                self.n
            )));
        }
        Ok(())
    }

    /// Largest `|exponent|` any intermediate term can reach.
    pub fn exponent_bound(&self) -> i64 {
        let n = self.n as i64;
        n * (self.alpha as i64 + self.beta as i64 + 2 * (n - 1) * self.gamma as i64)
    }
}

fn unit(n: usize, i: usize, v: i64) -> Vec<i64> {
    let mut e = vec![0; n];
    e[i] = v;
    e
}

/// Constant term of the product form, by exact Laurent expansion.
pub fn morris_ct_bruteforce(mp: &MorrisParams) -> Result<BigInt> {
    mp.check_guard()?;
    let n = mp.n;
    let mut acc = LaurentPoly::one(n);
    for i in 0..n {
        acc = acc.multiply(&LaurentPoly::one_minus_monomial(unit(n, i, 1)).power(mp.alpha))?;
        acc = acc.multiply(&LaurentPoly::one_minus_monomial(unit(n, i, -1)).power(mp.beta))?;
    }
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let mut e = vec![0; n];
                e[j] = 1;
                e[k] = -1;
                acc = acc.multiply(&LaurentPoly::one_minus_monomial(e).power(mp.gamma))?;
            }
        }
    }
    debug_assert!(acc
        .terms
        .keys()
        .all(|e| e.iter().all(|x| x.abs() <= mp.exponent_bound())));
    Ok(acc.constant_term())
}

/// Constant term of the symmetric form
/// `(-1)^{C(n,2) gamma + n beta} prod_{i<j} (x_i - x_j)^{2 gamma}
///  prod_i x_i^{-beta - (n-1) gamma} (1 - x_i)^{alpha + beta}`.
pub fn morris_lhs_symmetric_form(mp: &MorrisParams) -> Result<BigInt> {
    mp.check_guard()?;
    let n = mp.n;
    let shift = -(mp.beta as i64) - (n as i64 - 1) * mp.gamma as i64;
    let mut acc = LaurentPoly::from_terms(n, [(vec![shift; n], BigInt::one())])?;
    for i in 0..n {
        acc = acc.multiply(&LaurentPoly::one_minus_monomial(unit(n, i, 1)).power(mp.alpha + mp.beta))?;
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut e_i = vec![0; n];
            e_i[i] = 1;
            let mut e_j = vec![0; n];
            e_j[j] = 1;
            let diff = LaurentPoly::from_terms(n, [(e_i, BigInt::one()), (e_j, -BigInt::one())])?;
            acc = acc.multiply(&diff.power(2 * mp.gamma))?;
        }
    }
    let sign_exp = (n * (n - 1) / 2) as u64 * mp.gamma as u64 + n as u64 * mp.beta as u64;
    let ct = acc.constant_term();
    Ok(if sign_exp % 2 == 1 { -ct } else { ct })
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// The product side of the identity, exactly.
pub fn morris_rhs(mp: &MorrisParams) -> BigInt {
    let (a, b, g) = (mp.alpha as u64, mp.beta as u64, mp.gamma as u64);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 1..=mp.n as u64 {
        num *= factorial(j * g) * factorial(a + b + (j - 1) * g);
        den *= factorial(g) * factorial(a + (j - 1) * g) * factorial(b + (j - 1) * g);
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// Substitution `(alpha, beta, gamma)` that turns `S(a,b,c; l, l)` into a
/// two-variable Morris constant term, for `l` in `{1, 2}`:
///
/// * `[1,1]`: `(a+b+c+1-p, p-1-a-c, c)`
/// * `[2,2]`: `(a+b+c+1-2p, 2p-1-a-c, c)`
///
/// `None` when a component would be negative.
pub fn morris_substitution(params: &SelbergParams, l: u32) -> Option<MorrisParams> {
    if !(1..=2).contains(&l) {
        return None;
    }
    let (p, a, b, c) = (
        params.p() as i64,
        params.a() as i64,
        params.b() as i64,
        params.c() as i64,
    );
    let lp = l as i64 * p;
    let alpha = a + b + c + 1 - lp;
    let beta = lp - 1 - a - c;
    if alpha < 0 || beta < 0 {
        return None;
    }
    Some(MorrisParams {
        n: 2,
        alpha: alpha as u32,
        beta: beta as u32,
        gamma: c as u32,
    })
}

/// `S(a,b,c; l,l)` in `Z` as `(-1)^c` times the Morris product, when the
/// substitution applies.
pub fn selberg_via_morris(params: &SelbergParams, l: u32) -> Option<BigInt> {
    let mp = morris_substitution(params, l)?;
    let rhs = morris_rhs(&mp);
    Some(if params.c() % 2 == 1 { -rhs } else { rhs })
}
