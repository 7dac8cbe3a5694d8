//! Operation counting and wall-clock micro-benchmarks for the update
//! kernels.
//!
//! Counting works by running the ordinary generic code with the [`Counted`]
//! scalar, a transparent `f64` wrapper that tallies every arithmetic
//! operation into a thread-local [`OpCount`]. Plain `f64`/`f32` runs touch
//! no counter at all, so normal use has zero instrumentation overhead, and
//! a counted run produces bitwise-identical numerical results — the
//! instrumentation is purely observational.
//!
//! ## Accounting
//!
//! ```text
//! tallied as mults        ×, multiply-accumulate (one fused unit), x^k
//! tallied as adds         +, −
//! tallied as divs_sqrts   ÷, %, 1/x, √x, ∛x
//! hypot(x, y)             2 mults + 1 add + 1 div/sqrt
//! mul_add                 1 mult + 1 add
//! not tallied             negation, abs, signum, rounding, comparisons,
//!                         min/max, classification, and transcendentals
//!                         (exp/log/trig families)
//! ```
//!
//! A multiply-accumulate counts as a single multiplication: it is the unit
//! all O(np) kernels are written in, and splitting it would double-count
//! the linear terms the complexity statements are phrased in. Vector
//! normalizations land partly outside the mult/add families — the squared
//! norm is `len` multiply-accumulates, but the root and the reciprocal go
//! to `divs_sqrts` — so statements about `mults + adds` carry a small
//! slack covering those normalization operations.

use std::cell::Cell;
use std::fmt;
use std::hint::black_box;
use std::num::FpCategory;
use std::time::Instant;

use num_traits::{Float, Num, NumCast, One, ToPrimitive, Zero};

use crate::baselines::{brand_update, full_refactor, kaufman_update};
use crate::error::{Error, Result};
use crate::instances::{random_factorization, random_update, rng_from_seed};
use crate::linalg::rank_one_accumulate;
use crate::scalar::Scalar;
use crate::streaming::Method;
use crate::update::{rank_one_update, OutcomeKind};

// ─── operation counts ────────────────────────────────────────────────────

/// Tally of arithmetic operations observed in counting mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCount {
    /// Multiplications, including each multiply-accumulate as one unit.
    pub mults: u64,
    /// Additions and subtractions.
    pub adds: u64,
    /// Divisions, remainders, reciprocals, and roots.
    pub divs_sqrts: u64,
}

impl OpCount {
    /// The empty tally.
    pub const ZERO: OpCount = OpCount {
        mults: 0,
        adds: 0,
        divs_sqrts: 0,
    };

    /// Sum over all operation classes.
    pub fn total(&self) -> u64 {
        self.mults + self.adds + self.divs_sqrts
    }

    /// Sum of the multiplication and addition classes — the unit in which
    /// the O(np) complexity statements are phrased.
    pub fn mults_adds(&self) -> u64 {
        self.mults + self.adds
    }
}

thread_local! {
    static TALLY: Cell<OpCount> = const { Cell::new(OpCount::ZERO) };
}

#[inline]
fn bump(mults: u64, adds: u64, divs_sqrts: u64) {
    TALLY.with(|t| {
        let c = t.get();
        t.set(OpCount {
            mults: c.mults + mults,
            adds: c.adds + adds,
            divs_sqrts: c.divs_sqrts + divs_sqrts,
        });
    });
}

/// Clears this thread's operation tally.
///
/// Counters are thread-local: counted work on other threads is invisible
/// here, and counting is therefore meaningful single-threaded only.
pub fn reset_op_counts() {
    TALLY.with(|t| t.set(OpCount::ZERO));
}

/// This thread's operation tally accumulated since the last reset.
pub fn current_op_counts() -> OpCount {
    TALLY.with(Cell::get)
}

// ─── the counting scalar ─────────────────────────────────────────────────

/// A transparent `f64` that tallies its arithmetic into the thread-local
/// [`OpCount`] (see the module docs for what counts as what).
///
/// Every operation delegates to the identical `f64` operation, so a
/// counted run computes bit-for-bit the same values as a plain one.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Counted(pub f64);

impl fmt::Display for Counted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::ops::Add for Counted {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        bump(0, 1, 0);
        Counted(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Counted {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        bump(0, 1, 0);
        Counted(self.0 - rhs.0)
    }
}

impl std::ops::Mul for Counted {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        bump(1, 0, 0);
        Counted(self.0 * rhs.0)
    }
}

impl std::ops::Div for Counted {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        bump(0, 0, 1);
        Counted(self.0 / rhs.0)
    }
}

impl std::ops::Rem for Counted {
    type Output = Self;
    #[inline]
    fn rem(self, rhs: Self) -> Self {
        bump(0, 0, 1);
        Counted(self.0 % rhs.0)
    }
}

impl std::ops::Neg for Counted {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Counted(-self.0)
    }
}

impl Zero for Counted {
    #[inline]
    fn zero() -> Self {
        Counted(0.0)
    }
    #[inline]
    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

impl One for Counted {
    #[inline]
    fn one() -> Self {
        Counted(1.0)
    }
}

impl ToPrimitive for Counted {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.0)
    }
}

impl NumCast for Counted {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        n.to_f64().map(Counted)
    }
}

impl Num for Counted {
    type FromStrRadixErr = <f64 as Num>::FromStrRadixErr;

    fn from_str_radix(str: &str, radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(str, radix).map(Counted)
    }
}

/// Free unary delegations: value-preserving or transcendental operations
/// that the accounting deliberately ignores.
macro_rules! free_unary {
    ($($name:ident),* $(,)?) => {
        $(
            #[inline]
            fn $name(self) -> Self {
                Counted(self.0.$name())
            }
        )*
    };
}

impl Float for Counted {
    fn nan() -> Self {
        Counted(f64::NAN)
    }
    fn infinity() -> Self {
        Counted(f64::INFINITY)
    }
    fn neg_infinity() -> Self {
        Counted(f64::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Counted(-0.0)
    }
    fn min_value() -> Self {
        Counted(f64::MIN)
    }
    fn min_positive_value() -> Self {
        Counted(f64::MIN_POSITIVE)
    }
    fn max_value() -> Self {
        Counted(f64::MAX)
    }
    /// Overridden: the trait's default would report `f32`'s epsilon, which
    /// would silently loosen every tolerance computed through
    /// [`Scalar::calibrated`].
    fn epsilon() -> Self {
        Counted(f64::EPSILON)
    }

    fn is_nan(self) -> bool {
        self.0.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.0.is_finite()
    }
    fn is_normal(self) -> bool {
        self.0.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.0.classify()
    }
    fn is_sign_positive(self) -> bool {
        self.0.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.0.is_sign_negative()
    }

    free_unary!(
        floor, ceil, round, trunc, fract, abs, signum, exp, exp2, ln, log2, log10, sin, cos,
        tan, asin, acos, atan, exp_m1, ln_1p, sinh, cosh, tanh, asinh, acosh, atanh,
        to_degrees, to_radians,
    );

    #[inline]
    fn mul_add(self, a: Self, b: Self) -> Self {
        bump(1, 1, 0);
        Counted(self.0.mul_add(a.0, b.0))
    }
    #[inline]
    fn recip(self) -> Self {
        bump(0, 0, 1);
        Counted(self.0.recip())
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        bump(1, 0, 0);
        Counted(self.0.powi(n))
    }
    #[inline]
    fn powf(self, n: Self) -> Self {
        Counted(self.0.powf(n.0))
    }
    #[inline]
    fn sqrt(self) -> Self {
        bump(0, 0, 1);
        Counted(self.0.sqrt())
    }
    #[inline]
    fn cbrt(self) -> Self {
        bump(0, 0, 1);
        Counted(self.0.cbrt())
    }
    #[inline]
    fn hypot(self, other: Self) -> Self {
        bump(2, 1, 1);
        Counted(self.0.hypot(other.0))
    }

    fn max(self, other: Self) -> Self {
        Counted(self.0.max(other.0))
    }
    fn min(self, other: Self) -> Self {
        Counted(self.0.min(other.0))
    }
    #[inline]
    fn abs_sub(self, other: Self) -> Self {
        bump(0, 1, 0);
        Counted((self.0 - other.0).max(0.0))
    }
    fn copysign(self, sign: Self) -> Self {
        Counted(self.0.copysign(sign.0))
    }
    fn atan2(self, other: Self) -> Self {
        Counted(self.0.atan2(other.0))
    }
    fn log(self, base: Self) -> Self {
        Counted(self.0.log(base.0))
    }
    fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.0.sin_cos();
        (Counted(s), Counted(c))
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.0.integer_decode()
    }
}

impl Scalar for Counted {
    #[inline]
    fn mac(self, x: Self, y: Self) -> Self {
        bump(1, 0, 0);
        Counted(self.0 + x.0 * y.0)
    }

    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        Counted(v)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.0
    }
}

// ─── counted update runs ─────────────────────────────────────────────────

/// Operation counts of one closed-form rank-one update on a random n×p
/// instance.
///
/// The instance is generated in plain `f64` (untallied) and converted; the
/// tally covers exactly one [`rank_one_update`] call. The linear-in-`n`
/// part of the count is `(4p + 4)·n` in `mults + adds`: four O(np) passes
/// (projection coefficients, residual, rotated direction, rank-one
/// accumulation) plus four O(n) vector operations (two norms, one
/// normalization, one scaled addition). Differencing two counts at the
/// same `p` isolates it; see the tests.
///
/// # Example
/// ```
/// use orthup::bench::count_update_flops;
///
/// let c = count_update_flops(64, 2);
/// assert!(c.mults_adds() >= 4 * 64 * 2 + 4 * 64);
/// assert!(c.divs_sqrts < 64, "only normalizations and the W solve divide");
/// ```
///
/// # Panics
/// Panics unless `n > p ≥ 1`.
pub fn count_update_flops(n: usize, p: usize) -> OpCount {
    assert!(
        p >= 1 && n > p,
        "count_update_flops requires n > p >= 1, got n = {n}, p = {p}"
    );
    let mut rng = rng_from_seed(0x00C0_FFEE ^ ((n as u64) << 24) ^ (p as u64));
    let f = random_factorization(&mut rng, n, p).convert::<Counted>();
    let up = random_update(&mut rng, n, p).convert::<Counted>();
    reset_op_counts();
    let outcome = rank_one_update(&f, &up)
        .expect("a gaussian update of a random factorization is generic");
    let counts = current_op_counts();
    reset_op_counts();
    assert_eq!(
        outcome.kind,
        OutcomeKind::Generic,
        "counting is defined for the generic update path"
    );
    counts
}

// ─── wall-clock timing ───────────────────────────────────────────────────

/// Wall-time summary over repeated update runs, in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchStats {
    /// Upper median of the per-repetition times.
    pub median_ns: u64,
    /// Arithmetic mean of the per-repetition times.
    pub mean_ns: u64,
}

/// Times `reps` independent single-update runs of `method` on fresh
/// random n×p instances.
///
/// Instance generation happens outside the timed region; each timed region
/// covers exactly one update call (for [`Method::Refactor`]: the dense
/// rank-one accumulation plus the full re-factorization, its honest
/// per-step cost). Timings are not deterministic; everything else about
/// the run is, via `seed`.
///
/// # Errors
/// [`Error::InvalidConfig`] when `reps == 0` or the dimensions do not
/// satisfy `n > p ≥ 1`; method errors (for example [`Error::TooLarge`]
/// from the brand baseline at p > 63) are propagated.
pub fn time_update(n: usize, p: usize, method: Method, reps: usize, seed: u64) -> Result<BenchStats> {
    if reps == 0 {
        return Err(Error::InvalidConfig {
            message: "reps must be at least 1".into(),
        });
    }
    if p == 0 || n <= p {
        return Err(Error::InvalidConfig {
            message: format!("timing requires n > p >= 1, got n = {n}, p = {p}"),
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut times_ns = Vec::with_capacity(reps);
    for _ in 0..reps {
        let f = random_factorization(&mut rng, n, p);
        let up = random_update(&mut rng, n, p);
        let x = if method == Method::Refactor {
            Some(f.reconstruct())
        } else {
            None
        };
        let timer = Instant::now();
        match method {
            Method::Geodesic => {
                black_box(rank_one_update(&f, &up)?);
            }
            Method::Brand => {
                black_box(brand_update(&f, &up)?);
            }
            Method::Kaufman => {
                black_box(kaufman_update(&f, &up)?);
            }
            Method::Refactor => {
                let x = x.expect("reconstructed above");
                let bumped = rank_one_accumulate(x, &up.a, &up.b, 1.0)?;
                black_box(full_refactor(&bumped)?);
            }
        }
        times_ns.push(u64::try_from(timer.elapsed().as_nanos()).unwrap_or(u64::MAX));
    }
    let mean_ns = (times_ns.iter().map(|&t| t as u128).sum::<u128>() / reps as u128) as u64;
    times_ns.sort_unstable();
    Ok(BenchStats {
        median_ns: times_ns[reps / 2],
        mean_ns,
    })
}

// ─── tests ───────────────────────────────────────────────────────────────
