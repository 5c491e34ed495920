use fpselberg_core::{
    beta_closed, selberg_bruteforce, Cycle, Fp, FpContext, MasterPolySpec, ResourceLimits,
};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

const PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

fn big_binomial(n: u64, m: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..m {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn sign(k: u64, ctx: &FpContext) -> Fp {
    if k.is_multiple_of(2) {
        ctx.one()
    } else {
        ctx.elem(-1)
    }
}

#[test]
fn wilson() {
    for p in PRIMES {
        let ctx = FpContext::new(p).unwrap();
        assert_eq!(ctx.factorial(p - 1).unwrap(), ctx.elem(-1), "p = {p}");
    }
}

#[test]
fn complementary_factorials() {
    // a! b! = (-1)^{a+1} when a + b = p - 1
    for p in PRIMES {
        let ctx = FpContext::new(p).unwrap();
        for a in 0..p {
            let b = p - 1 - a;
            let lhs = ctx.factorial(a).unwrap() * ctx.factorial(b).unwrap();
            assert_eq!(lhs, sign(a + 1, &ctx), "p = {p}, a = {a}");
        }
    }
}

#[test]
fn shifted_binomial() {
    // b C(b-1, p-a-1) = (-1)^{a+1} a! b! / (a+b-p)!  for a + b >= p
    for p in PRIMES {
        let ctx = FpContext::new(p).unwrap();
        for a in 1..p {
            for b in (p - a)..p {
                let lhs = ctx.elem(b as i64) * ctx.binomial_lucas(b - 1, p - a - 1);
                let rhs = sign(a + 1, &ctx)
                    * ctx.factorial(a).unwrap()
                    * ctx.factorial(b).unwrap()
                    * ctx.inv_factorial(a + b - p).unwrap();
                assert_eq!(lhs, rhs, "p = {p}, a = {a}, b = {b}");
            }
        }
    }
}

#[test]
fn lucas_matches_bignum() {
    for p in PRIMES {
        let ctx = FpContext::new(p).unwrap();
        for n in 0..=4 * p {
            for m in 0..=n + 1 {
                let want = if m > n {
                    0
                } else {
                    (big_binomial(n, m) % p).to_u32().unwrap()
                };
                assert_eq!(ctx.binomial_lucas(n, m).value(), want, "C({n},{m}) mod {p}");
            }
        }
    }
}

#[test]
fn beta_matches_one_dimensional_expansion() {
    let limits = ResourceLimits::default();
    let cycle = Cycle::new(vec![1]).unwrap();
    for p in PRIMES {
        let ctx = FpContext::new(p).unwrap();
        for a in 0..p as u32 {
            for b in 0..p as u32 {
                let spec = MasterPolySpec::new(1, p as u32, a, b, 0).unwrap();
                let brute = selberg_bruteforce(&spec, &cycle, &limits).unwrap();
                // coefficient of x^{p-1} in x^a (1-x)^b, straight from the binomial theorem
                let k = p as i64 - 1 - a as i64;
                let exact = if (0..=b as i64).contains(&k) {
                    let c = BigInt::from(big_binomial(b as u64, k as u64));
                    if k % 2 == 0 { c } else { -c }
                } else {
                    BigInt::from(0)
                };
                assert_eq!(brute, fpselberg_core::poly::reduce_bigint(&exact, p as u32));
                assert_eq!(beta_closed(&ctx, a, b).unwrap(), brute, "p = {p}, a = {a}, b = {b}");
            }
        }
    }
}

proptest! {
    #[test]
    fn field_axioms(x in any::<i64>(), y in any::<i64>(), z in any::<i64>(), idx in 0usize..5) {
        let p = PRIMES[idx] as u32;
        let (x, y, z) = (Fp::new(x, p), Fp::new(y, p), Fp::new(z, p));
        prop_assert_eq!(x * (y + z), x * y + x * z);
        prop_assert_eq!((x * y) * z, x * (y * z));
        prop_assert_eq!(x - x, Fp::zero(p));
        prop_assert_eq!(x + (-x), Fp::zero(p));
        match x.inv() {
            Some(inv) => prop_assert_eq!(x * inv, Fp::one(p)),
            None => prop_assert!(x.is_zero()),
        }
    }

    #[test]
    fn fermat(x in 1i64..1_000_000, idx in 0usize..5) {
        let p = PRIMES[idx];
        let v = Fp::new(x, p as u32);
        prop_assume!(!v.is_zero());
        prop_assert_eq!(v.pow(p - 1), Fp::one(p as u32));
    }

    #[test]
    fn factorial_inverse(idx in 0usize..5, n in 0u64..13) {
        let ctx = FpContext::new(PRIMES[idx]).unwrap();
        prop_assume!(n < ctx.p() as u64);
        prop_assert_eq!(ctx.factorial(n).unwrap() * ctx.inv_factorial(n).unwrap(), ctx.one());
    }
}
