//! Signed ratios of factorials, the common shape of every closed form in
//! this crate.

use std::fmt;

use crate::error::{Error, Result};
use crate::modp::{Fp, FpContext};

/// `sign * prod(numerator[i]!) / prod(denominator[j]!)` in `F_p`.
///
/// Numerator arguments may be `>= p` (their factorial is then zero).
/// Denominator arguments must lie in `0..p`; anything else trips
/// [`Error::Guard`] instead of dividing by zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorialFormula {
    pub label: &'static str,
    pub negative: bool,
    pub numerator: Vec<i64>,
    pub denominator: Vec<i64>,
}

impl FactorialFormula {
    pub fn new(label: &'static str, negative: bool, numerator: Vec<i64>, denominator: Vec<i64>) -> Self {
        FactorialFormula {
            label,
            negative,
            numerator,
            denominator,
        }
    }

    pub fn evaluate(&self, ctx: &FpContext) -> Result<Fp> {
        let p = ctx.p() as i64;
        let mut acc = if self.negative {
            ctx.elem(-1)
        } else {
            ctx.one()
        };
        for &n in &self.numerator {
            if n < 0 {
                return Err(Error::Guard(format!(
                    "{}: negative numerator factorial argument {n}",
                    self.label
                )));
            }
            acc *= ctx.factorial(n as u64)?;
        }
        for &d in &self.denominator {
            if !(0..p).contains(&d) {
                return Err(Error::Guard(format!(
                    "{}: denominator factorial argument {d} outside [0, {}]",
                    self.label,
                    p - 1
                )));
            }
            acc *= ctx.inv_factorial(d as u64)?;
        }
        Ok(acc)
    }
}

fn factorials(args: &[i64]) -> String {
    if args.is_empty() {
        return "1".to_owned();
    }
    args.iter()
        .map(|a| format!("{a}!"))
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for FactorialFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}{} / ({})",
            self.label,
            if self.negative { "-" } else { "" },
            factorials(&self.numerator),
            factorials(&self.denominator)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_and_guards() {
        let ctx = FpContext::new(7).unwrap();
        // -3! 3! / 0! = -36 = 6 (mod 7)
        let f = FactorialFormula::new("beta", true, vec![3, 3], vec![0]);
        assert_eq!(f.evaluate(&ctx).unwrap().value(), 6);
        assert_eq!(f.to_string(), "beta: -3!*3! / (0!)");

        let vanishing = FactorialFormula::new("v", false, vec![9], vec![2]);
        assert!(vanishing.evaluate(&ctx).unwrap().is_zero());

        let bad = FactorialFormula::new("bad", false, vec![1], vec![7]);
        assert!(matches!(bad.evaluate(&ctx), Err(Error::Guard(_))));
        let bad = FactorialFormula::new("bad", false, vec![-1], vec![]);
        assert!(matches!(bad.evaluate(&ctx), Err(Error::Guard(_))));
    }
}
