//! Sparse multivariate polynomials over `F_p` or over the integers, and the
//! coefficient-extraction functional that plays the role of integration
//! over a `p`-cycle.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::modp::{Fp, FpContext};

/// A coefficient ring. Implemented for `F_p` ([`PrimeField`]) and for
/// arbitrary-precision integers ([`Integers`]).
pub trait CoeffRing: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn embed(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;

    /// `acc += x * y`.
    fn mul_add_assign(&self, acc: &mut Self::Elem, x: &Self::Elem, y: &Self::Elem) {
        *acc = self.add(acc, &self.mul(x, y));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(ctx: &FpContext) -> Self {
        PrimeField { p: ctx.p() }
    }

    pub(crate) fn from_prime(p: u32) -> Self {
        PrimeField { p }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
}

impl CoeffRing for PrimeField {
    type Elem = Fp;

    fn zero(&self) -> Fp {
        Fp::zero(self.p)
    }
    fn one(&self) -> Fp {
        Fp::one(self.p)
    }
    fn embed(&self, v: i64) -> Fp {
        Fp::new(v, self.p)
    }
    fn is_zero(&self, x: &Fp) -> bool {
        x.is_zero()
    }
    fn add(&self, x: &Fp, y: &Fp) -> Fp {
        *x + *y
    }
    fn mul(&self, x: &Fp, y: &Fp) -> Fp {
        *x * *y
    }
    fn neg(&self, x: &Fp) -> Fp {
        -*x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Integers;

impl CoeffRing for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn embed(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn is_zero(&self, x: &BigInt) -> bool {
        x.is_zero()
    }
    fn add(&self, x: &BigInt, y: &BigInt) -> BigInt {
        x + y
    }
    fn mul(&self, x: &BigInt, y: &BigInt) -> BigInt {
        x * y
    }
    fn neg(&self, x: &BigInt) -> BigInt {
        -x
    }
    fn mul_add_assign(&self, acc: &mut BigInt, x: &BigInt, y: &BigInt) {
        *acc += x * y;
    }
}

/// Reduce an integer into `F_p`.
pub fn reduce_bigint(x: &BigInt, p: u32) -> Fp {
    let r = x % BigInt::from(p);
    let r = if r.is_negative() { r + BigInt::from(p) } else { r };
    Fp::new(r.to_i64().expect("residue fits"), p)
}

/// A `p`-cycle `[l_1, ..., l_k]`, naming the coefficient of
/// `x_1^{l_1 p - 1} ... x_k^{l_k p - 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle(Vec<u32>);

impl Cycle {
    pub fn new(l: Vec<u32>) -> Result<Self> {
        if l.is_empty() {
            return Err(Error::param("cycle length", 0, "at least one entry"));
        }
        if let Some(&bad) = l.iter().find(|&&x| x == 0) {
            return Err(Error::param("cycle entry", bad as i64, "l >= 1"));
        }
        Ok(Cycle(l))
    }

    pub fn pair(l1: u32, l2: u32) -> Result<Self> {
        Cycle::new(vec![l1, l2])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The exponent vector `(l_i p - 1)_i`.
    pub fn exponents(&self, p: u32) -> Vec<u32> {
        self.0.iter().map(|&l| l * p - 1).collect()
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Sparse polynomial in `num_vars` variables. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<R: CoeffRing> {
    ring: R,
    num_vars: usize,
    terms: BTreeMap<Vec<u32>, R::Elem>,
}

impl<R: CoeffRing> fmt::Debug for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiPoly")
            .field("num_vars", &self.num_vars)
            .field("terms", &self.terms)
            .finish()
    }
}

impl<R: CoeffRing> MultiPoly<R> {
    pub fn zero(ring: R, num_vars: usize) -> Self {
        assert!(num_vars >= 1, "polynomials need at least one variable");
        MultiPoly {
            ring,
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: R, num_vars: usize, c: R::Elem) -> Self {
        let mut p = Self::zero(ring, num_vars);
        if !p.ring.is_zero(&c) {
            p.terms.insert(vec![0; num_vars], c);
        }
        p
    }

    pub fn one(ring: R, num_vars: usize) -> Self {
        let one = ring.one();
        Self::constant(ring, num_vars, one)
    }

    /// The variable `x_i` (0-based).
    pub fn variable(ring: R, num_vars: usize, i: usize) -> Result<Self> {
        if i >= num_vars {
            return Err(Error::VariableIndex { index: i, num_vars });
        }
        let mut e = vec![0; num_vars];
        e[i] = 1;
        let one = ring.one();
        Self::from_terms(ring, num_vars, [(e, one)])
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// repeated monomials and dropping zeros.
    pub fn from_terms<I>(ring: R, num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, R::Elem)>,
    {
        let mut p = Self::zero(ring, num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::Arity {
                    expected: num_vars,
                    got: e.len(),
                });
            }
            p.add_term(e, &c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: &R::Elem) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                if !self.ring.is_zero(c) {
                    v.insert(c.clone());
                }
            }
            Entry::Occupied(mut o) => {
                let s = self.ring.add(o.get(), c);
                if self.ring.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Number of non-zero terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &R::Elem)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Coefficient of the monomial with exponent vector `e` (zero if absent).
    pub fn coefficient(&self, e: &[u32]) -> R::Elem {
        self.terms
            .get(e)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    /// Degree in the variable `x_i` (0 for the zero polynomial).
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::Arity {
                expected: self.num_vars,
                got: other.num_vars,
            });
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let ring = self.ring.clone();
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), ring.neg(c)))
                .collect(),
            ring,
            num_vars: self.num_vars,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &R::Elem) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.num_vars);
        for (e, c) in &self.terms {
            let v = self.ring.mul(c, k);
            if !self.ring.is_zero(&v) {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }

    /// Product of two polynomials. Two-variable operands are accumulated in
    /// a dense grid, larger arities in a hash map.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ring.clone(), self.num_vars));
        }
        if self.num_vars <= 2 {
            Ok(self.multiply_dense(other))
        } else {
            Ok(self.multiply_sparse(other))
        }
    }

    fn multiply_dense(&self, other: &Self) -> Self {
        let k = self.num_vars;
        let dim = |i: usize| -> usize {
            if i < k {
                (self.degree_in(i) + other.degree_in(i)) as usize + 1
            } else {
                1
            }
        };
        let (w0, w1) = (dim(0), dim(1));
        let zero = self.ring.zero();
        let mut grid = vec![zero; w0 * w1];
        let index = |e: &[u32]| -> (usize, usize) { (e[0] as usize, if k > 1 { e[1] as usize } else { 0 }) };

        let rhs: Vec<((usize, usize), &R::Elem)> =
            other.terms.iter().map(|(e, c)| (index(e), c)).collect();
        for (ea, ca) in &self.terms {
            let (i0, i1) = index(ea);
            for &((j0, j1), cb) in &rhs {
                let slot = &mut grid[(i0 + j0) * w1 + (i1 + j1)];
                self.ring.mul_add_assign(slot, ca, cb);
            }
        }

        let mut out = Self::zero(self.ring.clone(), k);
        for (idx, c) in grid.into_iter().enumerate() {
            if !self.ring.is_zero(&c) {
                let (d0, d1) = (idx / w1, idx % w1);
                let e = if k > 1 {
                    vec![d0 as u32, d1 as u32]
                } else {
                    vec![d0 as u32]
                };
                out.terms.insert(e, c);
            }
        }
        out
    }

    fn multiply_sparse(&self, other: &Self) -> Self {
        let mut acc: HashMap<Vec<u32>, R::Elem> = HashMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let slot = acc.entry(e).or_insert_with(|| self.ring.zero());
                self.ring.mul_add_assign(slot, ca, cb);
            }
        }
        MultiPoly {
            terms: acc
                .into_iter()
                .filter(|(_, c)| !self.ring.is_zero(c))
                .collect(),
            ring: self.ring.clone(),
            num_vars: self.num_vars,
        }
    }

    /// `self^e` by repeated squaring; `power(0)` is the constant 1.
    pub fn power(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.ring.clone(), self.num_vars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base).expect("same ring");
            }
        }
        acc
    }

    /// Formal partial derivative with respect to `x_i` (0-based).
    pub fn partial_derivative(&self, i: usize) -> Result<Self> {
        if i >= self.num_vars {
            return Err(Error::VariableIndex {
                index: i,
                num_vars: self.num_vars,
            });
        }
        let mut out = Self::zero(self.ring.clone(), self.num_vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let v = self.ring.mul(c, &self.ring.embed(e[i] as i64));
            if !self.ring.is_zero(&v) {
                let mut d = e.clone();
                d[i] -= 1;
                out.terms.insert(d, v);
            }
        }
        Ok(out)
    }

    /// Swap two variables.
    pub fn swap_vars(&self, i: usize, j: usize) -> Result<Self> {
        for idx in [i, j] {
            if idx >= self.num_vars {
                return Err(Error::VariableIndex {
                    index: idx,
                    num_vars: self.num_vars,
                });
            }
        }
        let mut out = Self::zero(self.ring.clone(), self.num_vars);
        for (e, c) in &self.terms {
            let mut d = e.clone();
            d.swap(i, j);
            out.terms.insert(d, c.clone());
        }
        Ok(out)
    }

    /// Coefficient of `x_1^{l_1 p - 1} ... x_k^{l_k p - 1}`.
    pub fn cycle_coefficient(&self, p: u32, cycle: &Cycle) -> Result<R::Elem> {
        if cycle.len() != self.num_vars {
            return Err(Error::Arity {
                expected: self.num_vars,
                got: cycle.len(),
            });
        }
        Ok(self.coefficient(&cycle.exponents(p)))
    }
}

impl MultiPoly<PrimeField> {
    /// The `F_p`-integral over `cycle`: the coefficient of
    /// `x_1^{l_1 p - 1} ... x_k^{l_k p - 1}`.
    pub fn fp_integral(&self, cycle: &Cycle) -> Result<Fp> {
        self.cycle_coefficient(self.ring.p(), cycle)
    }
}

impl MultiPoly<Integers> {
    /// Coefficient-wise reduction modulo `p`.
    pub fn reduce(&self, ctx: &FpContext) -> MultiPoly<PrimeField> {
        let ring = PrimeField::new(ctx);
        let mut out = MultiPoly::zero(ring, self.num_vars);
        for (e, c) in &self.terms {
            let v = reduce_bigint(c, ctx.p());
            if !v.is_zero() {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field(p: u64) -> (FpContext, PrimeField) {
        let ctx = FpContext::new(p).unwrap();
        let ring = PrimeField::new(&ctx);
        (ctx, ring)
    }

    fn int_poly(num_vars: usize, terms: &[(&[u32], i64)]) -> MultiPoly<Integers> {
        MultiPoly::from_terms(
            Integers,
            num_vars,
            terms.iter().map(|(e, c)| (e.to_vec(), BigInt::from(*c))),
        )
        .unwrap()
    }

    fn fp_poly(ring: PrimeField, terms: &[(Vec<u32>, i64)]) -> MultiPoly<PrimeField> {
        let p = ring.p();
        let k = terms.first().map_or(1, |t| t.0.len());
        MultiPoly::from_terms(ring, k, terms.iter().map(|(e, c)| (e.clone(), Fp::new(*c, p)))).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let d = int_poly(2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        let s = int_poly(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(d.multiply(&s).unwrap(), int_poly(2, &[(&[2, 0], 1), (&[0, 2], -1)]));
    }

    #[test]
    fn binomial_powers() {
        let one_minus_x = int_poly(1, &[(&[0], 1), (&[1], -1)]);
        assert_eq!(one_minus_x.power(6).coefficient(&[3]), BigInt::from(-20));
        let diff = int_poly(2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        assert_eq!(diff.power(6).coefficient(&[3, 3]), BigInt::from(-20));
        assert_eq!(diff.power(0), MultiPoly::one(Integers, 2));
    }

    #[test]
    fn integral_examples() {
        let (_, r5) = field(5);
        let one = Cycle::new(vec![1]).unwrap();
        assert_eq!(fp_poly(r5, &[(vec![4], 1)]).fp_integral(&one).unwrap().value(), 1);
        assert_eq!(fp_poly(r5, &[(vec![3], 1)]).fp_integral(&one).unwrap().value(), 0);

        let (ctx, r7) = field(7);
        let x = MultiPoly::variable(r7, 1, 0).unwrap();
        let one_minus_x = MultiPoly::one(r7, 1).sub(&x).unwrap();
        let f = x.power(3).multiply(&one_minus_x.power(3)).unwrap();
        assert_eq!(f.fp_integral(&one).unwrap(), ctx.elem(6));
        assert!(matches!(
            f.fp_integral(&Cycle::pair(1, 1).unwrap()),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn derivatives() {
        let (_, r5) = field(5);
        let xp = fp_poly(r5, &[(vec![5], 1)]);
        assert!(xp.partial_derivative(0).unwrap().is_zero());
        let sq = fp_poly(r5, &[(vec![2], 1)]);
        assert_eq!(sq.partial_derivative(0).unwrap(), fp_poly(r5, &[(vec![1], 2)]));

        let (_, r3) = field(3);
        let f = fp_poly(r3, &[(vec![3, 1], 1)]);
        assert!(f.partial_derivative(0).unwrap().is_zero());
        assert!(!f.partial_derivative(1).unwrap().is_zero());
        assert!(matches!(f.partial_derivative(2), Err(Error::VariableIndex { .. })));
    }

    #[test]
    fn incompatible_operands() {
        let (_, r5) = field(5);
        let (_, r7) = field(7);
        let a = MultiPoly::one(r5, 1);
        assert!(a.multiply(&MultiPoly::one(r5, 2)).is_err());
        assert!(a.multiply(&MultiPoly::one(r7, 1)).is_err());
        assert!(MultiPoly::variable(r5, 2, 2).is_err());
        assert!(Cycle::new(vec![]).is_err());
        assert!(Cycle::pair(0, 1).is_err());
    }

    /// Schoolbook product over `F_p`, no dense-grid shortcut.
    fn naive_product(x: &MultiPoly<PrimeField>, y: &MultiPoly<PrimeField>) -> BTreeMap<Vec<u32>, u32> {
        let p = x.ring().p();
        let mut acc: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (e1, c1) in x.terms() {
            for (e2, c2) in y.terms() {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_default() += c1.value() as u64 * c2.value() as u64;
            }
        }
        acc.into_iter()
            .map(|(e, c)| (e, (c % p as u64) as u32))
            .filter(|(_, c)| *c != 0)
            .collect()
    }

    fn terms_strategy(k: usize) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
        prop::collection::vec((prop::collection::vec(0u32..12, k), -40i64..40), 0..10)
    }

    proptest! {
        #[test]
        fn multiply_matches_naive(
            (k, x, y) in (1usize..=3).prop_flat_map(|k| (Just(k), terms_strategy(k), terms_strategy(k))),
            p in prop::sample::select(vec![3u64, 5, 7, 11]),
        ) {
            let (ctx, ring) = field(p);
            let px = MultiPoly::from_terms(ring, k, x.iter().map(|(e, c)| (e.clone(), ctx.elem(*c)))).unwrap();
            let py = MultiPoly::from_terms(ring, k, y.iter().map(|(e, c)| (e.clone(), ctx.elem(*c)))).unwrap();
            let got: BTreeMap<Vec<u32>, u32> =
                px.multiply(&py).unwrap().terms().map(|(e, c)| (e.to_vec(), c.value())).collect();
            prop_assert_eq!(got, naive_product(&px, &py));
        }

        #[test]
        fn reduction_commutes_with_product(
            x in terms_strategy(2),
            y in terms_strategy(2),
            p in prop::sample::select(vec![3u64, 5, 7, 13]),
        ) {
            let ctx = FpContext::new(p).unwrap();
            let ix = MultiPoly::from_terms(Integers, 2, x.iter().map(|(e, c)| (e.clone(), BigInt::from(*c)))).unwrap();
            let iy = MultiPoly::from_terms(Integers, 2, y.iter().map(|(e, c)| (e.clone(), BigInt::from(*c)))).unwrap();
            let left = ix.multiply(&iy).unwrap().reduce(&ctx);
            let right = ix.reduce(&ctx).multiply(&iy.reduce(&ctx)).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn integral_is_linear(
            x in terms_strategy(2),
            y in terms_strategy(2),
            s in -20i64..20,
            t in -20i64..20,
            l1 in 1u32..=3,
            l2 in 1u32..=3,
        ) {
            let (ctx, ring) = field(5);
            let px = MultiPoly::from_terms(ring, 2, x.iter().map(|(e, c)| (e.clone(), ctx.elem(*c)))).unwrap();
            let py = MultiPoly::from_terms(ring, 2, y.iter().map(|(e, c)| (e.clone(), ctx.elem(*c)))).unwrap();
            let cycle = Cycle::pair(l1, l2).unwrap();
            let combo = px.scale(&ctx.elem(s)).add(&py.scale(&ctx.elem(t))).unwrap();
            prop_assert_eq!(
                combo.fp_integral(&cycle).unwrap(),
                ctx.elem(s) * px.fp_integral(&cycle).unwrap() + ctx.elem(t) * py.fp_integral(&cycle).unwrap()
            );
        }

        #[test]
        fn power_matches_repeated_product(x in terms_strategy(2), e in 0u64..5) {
            let (_, ring) = field(7);
            let px = MultiPoly::from_terms(ring, 2, x.iter().map(|(v, c)| (v.clone(), Fp::new(*c, 7)))).unwrap();
            let mut expected = MultiPoly::one(ring, 2);
            for _ in 0..e {
                expected = expected.multiply(&px).unwrap();
            }
            prop_assert_eq!(px.power(e), expected);
        }
    }
}
