//! Exhaustive verification suites and parameter sweeps.
//!
//! Work is fanned out over parameter triples with rayon; results are
//! collected in input order, so reports and sweep tables do not depend on
//! the worker count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::closed2d::{
    classify, condition_set, eval_closed, formula_c11_i, in_condition_set, relations_check,
    skew_symmetry_check, Branch, ConditionSet,
};
use crate::error::{Error, Result};
use crate::golden::GOLDEN_VALUES;
use crate::modp::{is_prime, Fp, FpContext};
use crate::morris::{
    morris_ct_bruteforce, morris_lhs_symmetric_form, morris_rhs, selberg_via_morris, MorrisParams,
};
use crate::poly::{reduce_bigint, Cycle, Integers, MultiPoly, PrimeField};
use crate::selberg::{
    beta_closed, master_polynomial, master_polynomial_fp, moment_integral, selberg_bruteforce,
    selberg_direct_2d, selberg_nd_closed, MasterPolySpec, MomentKind, ResourceLimits,
    SelbergParams,
};

/// Bit-exact header of the sweep CSV.
pub const SWEEP_CSV_HEADER: &str = "p,a,b,c,l1,l2,branch,value,in_R1,in_R2,in_R3";

/// Version of the JSON layouts written by this module.
pub const SCHEMA_VERSION: u32 = 1;

/// Counterexamples kept per suite; the counts are always complete.
const MAX_COUNTEREXAMPLES: usize = 64;

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                $name::ALL
                    .iter()
                    .copied()
                    .find(|v| v.name() == s)
                    .ok_or_else(|| {
                        let names: Vec<&str> = $name::ALL.iter().map(|v| v.name()).collect();
                        format!("unknown value {s:?}, expected one of {}", names.join(", "))
                    })
            }
        }
    };
}

named_enum!(
    /// Verification suites run by [`run_verify`].
    Suite {
        OracleEquiv => "oracle_equiv",
        Recurrences => "recurrences",
        Relations => "relations",
        Vanishing => "vanishing",
        Morris => "morris",
        Stokes => "stokes",
        Nd => "nd",
    }
);

named_enum!(
    /// Evaluation routes for two-dimensional integrals.
    Method {
        Bruteforce => "bruteforce",
        Direct => "direct",
        Closed => "closed",
    }
);

named_enum!(
    OutputFormat {
        Json => "json",
        Csv => "csv",
        Text => "text",
    }
);

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub primes: Vec<u32>,
    pub cycle_bound: u32,
    pub methods: Vec<Method>,
    pub suites: Vec<Suite>,
    pub integer_mode: bool,
    pub output_format: OutputFormat,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub limits: ResourceLimits,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            primes: vec![3, 5, 7, 11, 13],
            cycle_bound: 4,
            methods: Method::ALL.to_vec(),
            suites: Suite::ALL.to_vec(),
            integer_mode: false,
            output_format: OutputFormat::Json,
            jobs: 0,
            limits: ResourceLimits::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::param("primes", 0, "at least one prime"));
        }
        for &p in &self.primes {
            if p < 3 || !is_prime(p as u64) {
                return Err(Error::NotOddPrime(p as u64));
            }
        }
        if self.cycle_bound == 0 {
            return Err(Error::param("cycle_bound", 0, "cycle_bound >= 1"));
        }
        if self.suites.is_empty() && self.methods.is_empty() {
            return Err(Error::param("suites", 0, "at least one suite or method"));
        }
        Ok(())
    }

    fn sorted_primes(&self) -> Vec<u32> {
        let mut ps = self.primes.clone();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::Resource(format!("thread pool: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub suite: &'static str,
    pub p: Option<u32>,
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub c: Option<u32>,
    pub l1: Option<u32>,
    pub l2: Option<u32>,
    pub branch: Option<String>,
    pub check: String,
    pub expected: String,
    pub got: String,
}

impl Counterexample {
    fn at(suite: Suite, s: &SelbergParams, l: Option<(u32, u32)>, check: impl Into<String>) -> Self {
        Counterexample {
            suite: suite.name(),
            p: Some(s.p()),
            a: Some(s.a()),
            b: Some(s.b()),
            c: Some(s.c()),
            l1: l.map(|x| x.0),
            l2: l.map(|x| x.1),
            branch: None,
            check: check.into(),
            expected: String::new(),
            got: String::new(),
        }
    }

    fn bare(suite: Suite, check: impl Into<String>) -> Self {
        Counterexample {
            suite: suite.name(),
            p: None,
            a: None,
            b: None,
            c: None,
            l1: None,
            l2: None,
            branch: None,
            check: check.into(),
            expected: String::new(),
            got: String::new(),
        }
    }

    fn values(mut self, expected: impl fmt::Display, got: impl fmt::Display) -> Self {
        self.expected = expected.to_string();
        self.got = got.to_string();
        self
    }

    fn branch(mut self, b: Branch) -> Self {
        self.branch = Some(b.name().to_owned());
        self
    }
}

#[derive(Debug, Default, Clone)]
struct Tally {
    checked: u64,
    failed: u64,
    skipped: u64,
    counterexamples: Vec<Counterexample>,
}

impl Tally {
    fn check(&mut self, ok: bool, cx: impl FnOnce() -> Counterexample) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(cx());
            }
        }
    }

    /// Folds an evaluation error in: resource trips become skips, anything
    /// else a failure.
    fn error(&mut self, err: &Error, cx: impl FnOnce() -> Counterexample) {
        match err {
            Error::Resource(_) => self.skipped += 1,
            _ => self.check(false, || {
                let mut c = cx();
                c.got = format!("error: {err}");
                c
            }),
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.failed += other.failed;
        self.skipped += other.skipped;
        let room = MAX_COUNTEREXAMPLES.saturating_sub(self.counterexamples.len());
        self.counterexamples
            .extend(other.counterexamples.into_iter().take(room));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checked: u64,
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
    pub millis: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub primes: Vec<u32>,
    pub cycle_bound: u32,
    pub integer_mode: bool,
    pub suites: Vec<SuiteReport>,
    pub counterexamples: Vec<Counterexample>,
    /// Reference values that disagree with the computed value.
    pub discrepancies: Vec<crate::golden::GoldenValue>,
    pub total_millis: u128,
}

impl VerificationReport {
    pub fn failed(&self) -> u64 {
        self.suites.iter().map(|s| s.failed).sum()
    }

    pub fn suite(&self, suite: Suite) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == suite.name())
    }
}

/// Runs every selected suite.
pub fn run_verify(config: &SweepConfig) -> Result<VerificationReport> {
    config.validate()?;
    let pool = config.pool()?;
    let start = Instant::now();
    let mut suites = Vec::new();
    let mut counterexamples = Vec::new();
    let mut discrepancies = Vec::new();

    let mut selected = config.suites.clone();
    selected.sort();
    selected.dedup();
    for suite in selected {
        let t0 = Instant::now();
        let tally = pool.install(|| run_suite(suite, config))?;
        if suite == Suite::OracleEquiv && config.primes.contains(&7) {
            discrepancies.extend(GOLDEN_VALUES.iter().filter(|g| g.paper_discrepancy).copied());
        }
        suites.push(SuiteReport {
            suite: suite.name(),
            checked: tally.checked,
            passed: tally.checked - tally.failed,
            failed: tally.failed,
            skipped: tally.skipped,
            millis: t0.elapsed().as_millis(),
        });
        counterexamples.extend(tally.counterexamples);
    }

    Ok(VerificationReport {
        schema: SCHEMA_VERSION,
        primes: config.sorted_primes(),
        cycle_bound: config.cycle_bound,
        integer_mode: config.integer_mode,
        suites,
        counterexamples,
        discrepancies,
        total_millis: start.elapsed().as_millis(),
    })
}

fn run_suite(suite: Suite, config: &SweepConfig) -> Result<Tally> {
    match suite {
        Suite::OracleEquiv => {
            let t = per_triple(config, oracle_equiv_triple)?;
            Ok(t.merge(golden_values(config)))
        }
        Suite::Vanishing => per_triple(config, vanishing_triple),
        Suite::Relations => per_triple(config, relations_triple),
        Suite::Recurrences => per_triple(config, recurrences_triple),
        Suite::Morris => morris_suite(config),
        Suite::Stokes => Ok(stokes_suite(config)),
        Suite::Nd => nd_suite(config),
    }
}

fn per_triple<F>(config: &SweepConfig, f: F) -> Result<Tally>
where
    F: Fn(&FpContext, &SelbergParams, &SweepConfig) -> Tally + Sync,
{
    let mut total = Tally::default();
    for p in config.sorted_primes() {
        let ctx = FpContext::new(p as u64)?;
        let triples: Vec<SelbergParams> = SelbergParams::all(p).collect();
        let tallies: Vec<Tally> = triples.par_iter().map(|s| f(&ctx, s, config)).collect();
        total = tallies.into_iter().fold(total, Tally::merge);
    }
    Ok(total)
}

fn ordered_cycles(bound: u32) -> impl Iterator<Item = (u32, u32)> {
    (1..=bound).flat_map(move |l1| (l1..=bound).map(move |l2| (l1, l2)))
}

/// Brute-force values for every ordered cycle, in `F_p` and optionally
/// over the integers.
struct Expansion {
    fp: MultiPoly<PrimeField>,
    int: Option<MultiPoly<Integers>>,
}

impl Expansion {
    fn new(s: &SelbergParams, config: &SweepConfig) -> Result<Self> {
        let spec = MasterPolySpec::from_params(2, s)?;
        if config.integer_mode {
            let int = master_polynomial(&spec, &Integers, &config.limits)?;
            let ctx = FpContext::new(s.p() as u64)?;
            Ok(Expansion {
                fp: int.reduce(&ctx),
                int: Some(int),
            })
        } else {
            Ok(Expansion {
                fp: master_polynomial_fp(&spec, &config.limits)?,
                int: None,
            })
        }
    }

    fn value(&self, l1: u32, l2: u32) -> Result<Fp> {
        self.fp.fp_integral(&Cycle::pair(l1, l2)?)
    }

    fn integer(&self, l1: u32, l2: u32) -> Option<BigInt> {
        let p = self.fp.ring().p();
        self.int
            .as_ref()
            .map(|int| int.coefficient(&Cycle::pair(l1, l2).expect("l >= 1").exponents(p)))
    }
}

fn oracle_equiv_triple(ctx: &FpContext, s: &SelbergParams, config: &SweepConfig) -> Tally {
    let mut t = Tally::default();
    let suite = Suite::OracleEquiv;
    let expansion = if config.methods.contains(&Method::Bruteforce) {
        match Expansion::new(s, config) {
            Ok(e) => Some(e),
            Err(e) => {
                t.error(&e, || Counterexample::at(suite, s, None, "expansion"));
                return t;
            }
        }
    } else {
        None
    };

    for (l1, l2) in ordered_cycles(config.cycle_bound) {
        let mut values: Vec<(Method, Fp)> = Vec::new();
        for &m in &config.methods {
            let v = match m {
                Method::Bruteforce => expansion.as_ref().expect("expanded").value(l1, l2),
                Method::Direct => selberg_direct_2d(ctx, s, l1, l2),
                Method::Closed => eval_closed(ctx, s, l1, l2),
            };
            match v {
                Ok(v) => values.push((m, v)),
                Err(e) => {
                    t.error(&e, || Counterexample::at(suite, s, Some((l1, l2)), m.name()));
                }
            }
        }
        if let Some(e) = &expansion {
            match e.value(l2, l1) {
                Ok(v) => values.push((Method::Bruteforce, v)),
                Err(err) => t.error(&err, || Counterexample::at(suite, s, Some((l2, l1)), "symmetry")),
            }
        }
        if let Some(&(m0, v0)) = values.first() {
            let bad = values.iter().find(|(_, v)| *v != v0).copied();
            t.check(bad.is_none(), || {
                let (m, v) = bad.expect("mismatch");
                let mut cx = Counterexample::at(suite, s, Some((l1, l2)), format!("{m0} vs {m}"))
                    .values(v0, v);
                if let Ok(tag) = classify(s, l1, l2) {
                    cx = cx.branch(tag.branch);
                }
                cx
            });
        }
    }
    t
}

/// Reference values: closed form and brute force must both give
/// the computed value.
fn golden_values(config: &SweepConfig) -> Tally {
    let mut t = Tally::default();
    for g in GOLDEN_VALUES.iter().filter(|g| config.primes.contains(&g.p)) {
        let ctx = FpContext::new(g.p as u64).expect("golden prime");
        let s = SelbergParams::new(g.p, g.a, g.b, g.c).expect("golden params");
        let spec = MasterPolySpec::from_params(2, &s).expect("n = 2");
        let cycle = Cycle::pair(g.l1, g.l2).expect("l >= 1");
        let closed = eval_closed(&ctx, &s, g.l1, g.l2);
        let brute = selberg_bruteforce(&spec, &cycle, &config.limits);
        let ok = matches!((&closed, &brute), (Ok(x), Ok(y)) if x.value() == g.expected && y.value() == g.expected);
        t.check(ok, || {
            Counterexample::at(Suite::OracleEquiv, &s, Some((g.l1, g.l2)), "golden value")
                .values(g.expected, format!("closed {closed:?}, bruteforce {brute:?}"))
        });
    }
    t
}

/// Branches whose vanishing holds already for the integer coefficient.
fn integer_vanishing(branch: Branch) -> bool {
    matches!(
        branch,
        Branch::NotApplicableZero | Branch::C12DeltaNegZero | Branch::C12Delta0Zero | Branch::C13Zero
    )
}

fn vanishing_triple(_ctx: &FpContext, s: &SelbergParams, config: &SweepConfig) -> Tally {
    let mut t = Tally::default();
    let suite = Suite::Vanishing;
    let expansion = match Expansion::new(s, config) {
        Ok(e) => e,
        Err(e) => {
            t.error(&e, || Counterexample::at(suite, s, None, "expansion"));
            return t;
        }
    };
    let small_c = 2 * s.c() < s.p();
    for (l1, l2) in ordered_cycles(config.cycle_bound) {
        let tag = match classify(s, l1, l2) {
            Ok(tag) => tag,
            Err(e) => {
                t.error(&e, || Counterexample::at(suite, s, Some((l1, l2)), "classify"));
                continue;
            }
        };
        let value = match expansion.value(l1, l2) {
            Ok(v) => v,
            Err(e) => {
                t.error(&e, || Counterexample::at(suite, s, Some((l1, l2)), "bruteforce"));
                continue;
            }
        };
        let cx = |check: &str| Counterexample::at(suite, s, Some((l1, l2)), check).branch(tag.branch);
        let b = tag.branch;
        if b.is_zero_branch() {
            t.check(value.is_zero(), || cx("vanishing").values(0, value));
            if integer_vanishing(b) {
                if let Some(int) = expansion.integer(l1, l2) {
                    t.check(int.is_zero(), || cx("integer vanishing").values(0, &int));
                }
            }
        } else if matches!(b, Branch::C11I | Branch::C11II | Branch::C22I) {
            t.check(value.is_zero() != small_c, || {
                cx("non-zero iff 2c < p").values(if small_c { "non-zero" } else { "0" }, value)
            });
        } else if b == Branch::C22II {
            t.check(!value.is_zero(), || cx("non-zero").values("non-zero", value));
        }
    }
    t
}

fn relations_triple(ctx: &FpContext, s: &SelbergParams, config: &SweepConfig) -> Tally {
    let mut t = Tally::default();
    let suite = Suite::Relations;
    match relations_check(ctx, s, &config.limits) {
        Ok(r) => {
            let what = match r.condition {
                Some(set) => format!("relation {}", set.name()),
                None => "at most one non-zero cycle".to_owned(),
            };
            t.check(r.passed(), || {
                Counterexample::at(suite, s, None, what)
                    .values("holds", format!("{:?} nonzero={:?}", r.values, r.nonzero_pairs))
            });
        }
        Err(e) => t.error(&e, || Counterexample::at(suite, s, None, "relations")),
    }
    if in_condition_set(s, ConditionSet::R3) {
        match skew_symmetry_check(ctx, s, &config.limits) {
            Ok(ok) => t.check(ok, || {
                Counterexample::at(suite, s, None, "skew-symmetry coefficients").values(true, false)
            }),
            Err(e) => t.error(&e, || Counterexample::at(suite, s, None, "skew-symmetry")),
        }
    }
    t
}

/// Cycles on which the parameter recurrences are checked.
pub const RECURRENCE_CYCLES: [(u32, u32); 4] = [(1, 1), (1, 2), (2, 2), (1, 3)];

fn recurrences_triple(ctx: &FpContext, s: &SelbergParams, config: &SweepConfig) -> Tally {
    let mut t = Tally::default();
    let suite = Suite::Recurrences;
    let p = s.p();
    let (a, b, c) = (s.a() as i64, s.b() as i64, s.c() as i64);
    let e = |v: i64| ctx.elem(v);
    let limits = &config.limits;

    let shifted = |da: i64, db: i64| -> Option<SelbergParams> {
        SelbergParams::new(p, (a + da) as u32, (b + db) as u32, c as u32).ok()
    };
    let expand = |sp: Option<SelbergParams>| -> Result<Option<MultiPoly<PrimeField>>> {
        sp.map(|sp| master_polynomial_fp(&MasterPolySpec::from_params(2, &sp)?, limits))
            .transpose()
    };
    let phis = (|| -> Result<_> {
        Ok((
            expand(Some(*s))?.expect("base"),
            expand(shifted(1, 0))?,
            expand(shifted(0, 1))?,
            expand(shifted(-1, 0))?,
            expand(shifted(0, -1))?,
        ))
    })();
    let (phi, phi_a1, phi_b1, phi_am1, phi_bm1) = match phis {
        Ok(x) => x,
        Err(err) => {
            t.error(&err, || Counterexample::at(suite, s, None, "expansion"));
            return t;
        }
    };

    for (l1, l2) in RECURRENCE_CYCLES {
        let cycle = Cycle::pair(l1, l2).expect("l >= 1");
        let at = |poly: &MultiPoly<PrimeField>| poly.fp_integral(&cycle).expect("arity 2");
        let moments = moment_integral(s, &cycle, MomentKind::S1, limits)
            .and_then(|s1| Ok((s1, moment_integral(s, &cycle, MomentKind::S2, limits)?)));
        let (s1, s2) = match moments {
            Ok(x) => x,
            Err(err) => {
                t.error(&err, || Counterexample::at(suite, s, Some((l1, l2)), "moments"));
                continue;
            }
        };
        let base = at(&phi);
        let cx = |name: &str, lhs: Fp, rhs: Fp| {
            Counterexample::at(suite, s, Some((l1, l2)), name).values(lhs, rhs)
        };

        if let Some(next) = &phi_a1 {
            let (lhs, rhs) = (e(a + 1) * s1, e(2 * (a + b + c + 2)) * at(next));
            t.check(lhs == rhs, || cx("(a+1) S1 = 2(a+b+c+2) S(a+1)", lhs, rhs));
        }
        let (lhs, rhs) = (e(2 * (a + c + 1)) * base, e(a + b + 2 * c + 2) * s1);
        t.check(lhs == rhs, || cx("2(a+c+1) S = (a+b+2c+2) S1", lhs, rhs));
        if let Some(next) = &phi_b1 {
            let (lhs, rhs) = (e(b + 1) * s2, e(2 * (a + b + c + 2)) * at(next));
            t.check(lhs == rhs, || cx("(b+1) S2 = 2(a+b+c+2) S(b+1)", lhs, rhs));
        }
        let (lhs, rhs) = (e(2 * (b + c + 1)) * base, e(a + b + 2 * c + 2) * s2);
        t.check(lhs == rhs, || cx("2(b+c+1) S = (a+b+2c+2) S2", lhs, rhs));

        let den = e(a + b + c + 1) * e(a + b + 2 * c + 1);
        if let (Some(prev), Some(inv)) = (&phi_am1, den.inv()) {
            let rhs = at(prev) * e(a) * e(a + c) * inv;
            t.check(base == rhs, || cx("S = S(a-1) a(a+c)/den", base, rhs));
        }
        if let (Some(prev), Some(inv)) = (&phi_bm1, den.inv()) {
            let rhs = at(prev) * e(b) * e(b + c) * inv;
            t.check(base == rhs, || cx("S = S(b-1) b(b+c)/den", base, rhs));
        }
    }
    t
}

/// Grid of the Morris identity check: `n <= 3`, exponents `<= 3`.
pub fn morris_grid() -> Vec<MorrisParams> {
    let mut grid = Vec::new();
    for n in 1..=3 {
        for alpha in 0..=3 {
            for beta in 0..=3 {
                for gamma in 0..=3 {
                    grid.push(MorrisParams {
                        n,
                        alpha,
                        beta,
                        gamma,
                    });
                }
            }
        }
    }
    grid
}

fn morris_suite(config: &SweepConfig) -> Result<Tally> {
    let suite = Suite::Morris;
    let grid = morris_grid();
    let identity: Vec<Tally> = grid
        .par_iter()
        .map(|mp| {
            let mut t = Tally::default();
            let cx = |check: &str| {
                let mut c = Counterexample::bare(suite, check);
                c.check = format!(
                    "{check} (n={}, alpha={}, beta={}, gamma={})",
                    mp.n, mp.alpha, mp.beta, mp.gamma
                );
                c
            };
            match (morris_ct_bruteforce(mp), morris_lhs_symmetric_form(mp)) {
                (Ok(ct), Ok(sym)) => {
                    let rhs = morris_rhs(mp);
                    t.check(ct == rhs, || cx("constant term = product").values(&rhs, &ct));
                    t.check(sym == ct, || cx("symmetric form").values(&ct, &sym));
                }
                (Err(e), _) | (_, Err(e)) => t.error(&e, || cx("expansion")),
            }
            t
        })
        .collect();
    let mut total = identity.into_iter().fold(Tally::default(), Tally::merge);

    let bridge = per_triple(config, |ctx, s, config| {
        let mut t = Tally::default();
        let (p, a, b, c) = (s.p() as i64, s.a() as i64, s.b() as i64, s.c() as i64);
        let spec = MasterPolySpec::from_params(2, s).expect("n = 2");
        let applies = [
            (1, a + c < p && a + b + c >= p - 1),
            (2, a + b + c >= 2 * p - 1),
        ];
        if applies.iter().all(|&(_, ok)| !ok) {
            return t;
        }
        let int = match master_polynomial(&spec, &Integers, &config.limits) {
            Ok(x) => x,
            Err(e) => {
                t.error(&e, || Counterexample::at(suite, s, None, "integer expansion"));
                return t;
            }
        };
        for (l, ok) in applies {
            if !ok {
                continue;
            }
            let exact = int.coefficient(&[l * s.p() - 1, l * s.p() - 1]);
            let Some(via) = selberg_via_morris(s, l) else {
                t.check(false, || Counterexample::at(suite, s, Some((l, l)), "substitution"));
                continue;
            };
            t.check(exact == via, || {
                Counterexample::at(suite, s, Some((l, l)), "integer bridge").values(&via, &exact)
            });
            let reduced = reduce_bigint(&via, s.p());
            let fp = int.reduce(ctx).coefficient(&[l * s.p() - 1, l * s.p() - 1]);
            t.check(reduced == fp, || {
                Counterexample::at(suite, s, Some((l, l)), "bridge mod p").values(fp, reduced)
            });
        }
        t
    })?;
    total = total.merge(bridge);
    Ok(total)
}

/// Number of random polynomials in the derivative-vanishing check.
pub const STOKES_SAMPLES: usize = 200;

fn stokes_suite(config: &SweepConfig) -> Tally {
    let suite = Suite::Stokes;
    let primes = config.sorted_primes();
    let mut rng = StdRng::seed_from_u64(0x5e1b_e2c0);
    let mut t = Tally::default();
    for sample in 0..STOKES_SAMPLES {
        let p = primes[rng.random_range(0..primes.len())];
        let ctx = FpContext::new(p as u64).expect("validated prime");
        let k = rng.random_range(1..=2usize);
        let ring = PrimeField::new(&ctx);
        let random_poly = |rng: &mut StdRng| {
            let n_terms = rng.random_range(1..=24);
            let terms: Vec<(Vec<u32>, Fp)> = (0..n_terms)
                .map(|_| {
                    let e = (0..k).map(|_| rng.random_range(0..3 * p)).collect();
                    (e, ctx.elem(rng.random_range(0..p as i64)))
                })
                .collect();
            MultiPoly::from_terms(ring, k, terms).expect("arity k")
        };
        let poly = random_poly(&mut rng);
        let other = random_poly(&mut rng);
        let cycle = Cycle::new((0..k).map(|_| rng.random_range(1..=3)).collect()).expect("l >= 1");
        let cx = |check: &str| {
            let mut c = Counterexample::bare(suite, format!("{check} (sample {sample}, cycle {cycle})"));
            c.p = Some(p);
            c
        };
        for i in 0..k {
            let d = poly.partial_derivative(i).expect("index < k");
            let v = d.fp_integral(&cycle).expect("arity k");
            t.check(v.is_zero(), || cx("integral of derivative").values(0, v));
        }
        let (x, y) = (ctx.elem(rng.random_range(0..p as i64)), ctx.elem(rng.random_range(0..p as i64)));
        let combo = poly.scale(&x).add(&other.scale(&y)).expect("same ring");
        let lhs = combo.fp_integral(&cycle).expect("arity k");
        let rhs = x * poly.fp_integral(&cycle).expect("arity k") + y * other.fp_integral(&cycle).expect("arity k");
        t.check(lhs == rhs, || cx("linearity").values(rhs, lhs));
    }
    t
}

/// All `(a, b, c)` with `0 <= a, b < 2p`, `0 <= c < p` satisfying the
/// hypotheses of the `n`-dimensional product formula.
pub fn nd_domain(p: u32, n: usize) -> Vec<(u32, u32, u32)> {
    let (pi, ni) = (p as i64, n as i64);
    let mut out = Vec::new();
    for a in 0..2 * p {
        for b in 0..2 * p {
            for c in 0..p {
                let (ai, bi, ci) = (a as i64, b as i64, c as i64);
                if pi - 1 <= ai + bi + (ni - 1) * ci && ai + bi + (2 * ni - 2) * ci < 2 * pi - 1 {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

fn nd_suite(config: &SweepConfig) -> Result<Tally> {
    let suite = Suite::Nd;
    let mut total = Tally::default();
    for p in config.sorted_primes() {
        let ctx = FpContext::new(p as u64)?;
        let cx = |check: String| {
            let mut c = Counterexample::bare(suite, check);
            c.p = Some(p);
            c
        };

        // n = 1 against the beta closed form.
        for a in 0..p {
            for b in 0..p {
                if a + b + 1 < p {
                    continue;
                }
                let nd = selberg_nd_closed(&ctx, 1, a, b, 0);
                let beta = beta_closed(&ctx, a, b);
                let ok = matches!((&nd, &beta), (Ok(x), Ok(y)) if x == y);
                total.check(ok, || cx(format!("n=1 a={a} b={b}")).values(format!("{beta:?}"), format!("{nd:?}")));
            }
        }

        // n = 2 against the [1,1] closed form, part (i).
        for s in SelbergParams::all(p) {
            let (a, b, c) = (s.a(), s.b(), s.c());
            let part_i = a + c < p && b + c < p && a + b + c + 1 >= p;
            let nd_ok = a + b + c + 1 >= p && a + b + 2 * c + 1 < 2 * p;
            if !(part_i && nd_ok) {
                continue;
            }
            let nd = selberg_nd_closed(&ctx, 2, a, b, c);
            let closed = formula_c11_i(&s).evaluate(&ctx);
            let ok = matches!((&nd, &closed), (Ok(x), Ok(y)) if x == y);
            total.check(ok, || {
                cx(format!("n=2 a={a} b={b} c={c}")).values(format!("{closed:?}"), format!("{nd:?}"))
            });
        }

        // n = 3 against a three-variable expansion.
        let domain = nd_domain(p, 3);
        let tallies: Vec<Tally> = domain
            .par_iter()
            .map(|&(a, b, c)| {
                let mut t = Tally::default();
                let label = || cx(format!("n=3 a={a} b={b} c={c}"));
                let spec = match MasterPolySpec::new(3, p, a, b, c) {
                    Ok(s) => s,
                    Err(e) => {
                        t.error(&e, label);
                        return t;
                    }
                };
                let cycle = Cycle::new(vec![1, 1, 1]).expect("l >= 1");
                match (
                    selberg_bruteforce(&spec, &cycle, &config.limits),
                    selberg_nd_closed(&ctx, 3, a, b, c),
                ) {
                    (Ok(bf), Ok(nd)) => t.check(bf == nd, || label().values(bf, nd)),
                    (Err(e), _) | (_, Err(e)) => t.error(&e, label),
                }
                t
            })
            .collect();
        total = tallies.into_iter().fold(total, Tally::merge);
    }
    Ok(total)
}

/// One line of a sweep table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub p: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub l1: u32,
    pub l2: u32,
    pub branch: &'static str,
    pub value: u32,
    pub in_r1: bool,
    pub in_r2: bool,
    pub in_r3: bool,
}

/// Evaluates every `(p, a, b, c, l1, l2)` with `l1 <= l2 <= cycle_bound`,
/// using the first selected method (closed form if none is selected).
/// Rows come out in lexicographic order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let method = config.methods.first().copied().unwrap_or(Method::Closed);
    let pool = config.pool()?;
    let mut rows = Vec::new();
    for p in config.sorted_primes() {
        let ctx = FpContext::new(p as u64)?;
        let triples: Vec<SelbergParams> = SelbergParams::all(p).collect();
        let chunks: Vec<Result<Vec<SweepRow>>> = pool.install(|| {
            triples
                .par_iter()
                .map(|s| sweep_triple(&ctx, s, method, config))
                .collect()
        });
        for chunk in chunks {
            rows.extend(chunk?);
        }
    }
    Ok(rows)
}

fn sweep_triple(ctx: &FpContext, s: &SelbergParams, method: Method, config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let expansion = match method {
        Method::Bruteforce => Some(Expansion::new(s, config)?),
        _ => None,
    };
    let set = condition_set(s);
    ordered_cycles(config.cycle_bound)
        .map(|(l1, l2)| {
            let tag = classify(s, l1, l2)?;
            let value = match method {
                Method::Bruteforce => expansion.as_ref().expect("expanded").value(l1, l2)?,
                Method::Direct => selberg_direct_2d(ctx, s, l1, l2)?,
                Method::Closed => eval_closed(ctx, s, l1, l2)?,
            };
            Ok(SweepRow {
                p: s.p(),
                a: s.a(),
                b: s.b(),
                c: s.c(),
                l1,
                l2,
                branch: tag.branch.name(),
                value: value.value(),
                in_r1: set == Some(ConditionSet::R1),
                in_r2: set == Some(ConditionSet::R2),
                in_r3: set == Some(ConditionSet::R3),
            })
        })
        .collect()
}

/// `sum_p (p-1)^3 * #{l1 <= l2 <= bound}`.
pub fn expected_sweep_rows(config: &SweepConfig) -> usize {
    let cycles = ordered_cycles(config.cycle_bound).count();
    config
        .sorted_primes()
        .iter()
        .map(|&p| (p as usize - 1).pow(3) * cycles)
        .sum()
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    schema: u32,
    rows: &'a [SweepRow],
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], format: OutputFormat, mut out: W) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{SWEEP_CSV_HEADER}")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.p, r.a, r.b, r.c, r.l1, r.l2, r.branch, r.value, r.in_r1, r.in_r2, r.in_r3
                )?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(
                &mut out,
                &SweepDocument {
                    schema: SCHEMA_VERSION,
                    rows,
                },
            )?;
            writeln!(out)?;
        }
        OutputFormat::Text => {
            writeln!(
                out,
                "{:>3} {:>3} {:>3} {:>3} {:>3} {:>3}  {:<20} {:>5}  condition",
                "p", "a", "b", "c", "l1", "l2", "branch", "value"
            )?;
            for r in rows {
                let cond = match (r.in_r1, r.in_r2, r.in_r3) {
                    (true, _, _) => "R1",
                    (_, true, _) => "R2",
                    (_, _, true) => "R3",
                    _ => "-",
                };
                writeln!(
                    out,
                    "{:>3} {:>3} {:>3} {:>3} {:>3} {:>3}  {:<20} {:>5}  {}",
                    r.p, r.a, r.b, r.c, r.l1, r.l2, r.branch, r.value, cond
                )?;
            }
        }
    }
    Ok(())
}

pub fn write_report<W: Write>(report: &VerificationReport, format: OutputFormat, mut out: W) -> std::io::Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "suite,checked,passed,failed,skipped,millis")?;
            for s in &report.suites {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    s.suite, s.checked, s.passed, s.failed, s.skipped, s.millis
                )?;
            }
        }
        OutputFormat::Text => {
            for s in &report.suites {
                writeln!(
                    out,
                    "{:<14} {} checked={} passed={} failed={} skipped={} ({} ms)",
                    s.suite,
                    if s.failed == 0 { "ok  " } else { "FAIL" },
                    s.checked,
                    s.passed,
                    s.failed,
                    s.skipped,
                    s.millis
                )?;
            }
            for cx in &report.counterexamples {
                writeln!(out, "counterexample: {}", serde_json::to_string(cx)?)?;
            }
            for g in &report.discrepancies {
                writeln!(
                    out,
                    "note: p={} (a,b,c)=({},{},{}) cycle [{},{}] computes {} where the reference table lists {}",
                    g.p, g.a, g.b, g.c, g.l1, g.l2, g.expected, g.printed
                )?;
            }
        }
    }
    Ok(())
}
