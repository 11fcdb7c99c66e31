//! Arbitrary-precision numeric kernel.
//!
//! Wraps a binary big-float type behind [`Real`] and a [`PrecisionCtx`]
//! that fixes the working precision, caches classical constants, and
//! provides the summation machinery the series evaluators build on:
//! Euler-Maclaurin evaluation of log-power tail sums, the digamma
//! function, and convergence acceleration for alternating series.
//!
//! Exact integer sequences (Bernoulli numbers, Euler numbers, binomials)
//! live here as well since both the symbolic and numeric layers need them.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Mutex;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::None;

pub const DEFAULT_DIGITS: usize = 50;
pub const MIN_DIGITS: usize = 20;
pub const GUARD_DIGITS: usize = 10;

// ---------------------------------------------------------------------------
// Exact integer sequences
// ---------------------------------------------------------------------------

static BERNOULLI: Lazy<Mutex<Vec<BigRational>>> = Lazy::new(|| {
    Mutex::new(vec![BigRational::one()])
});

/// Bernoulli number B_n with B_1 = -1/2.
pub fn bernoulli(n: u32) -> BigRational {
    let n = n as usize;
    let mut cache = BERNOULLI.lock().unwrap();
    while cache.len() <= n {
        let m = cache.len();
        // B_m = -1/(m+1) * sum_{k<m} C(m+1, k) B_k
        let mut acc = BigRational::zero();
        for (k, b) in cache.iter().enumerate() {
            acc += b * BigRational::from(binom_int((m + 1) as u64, k as u64));
        }
        let val = -acc / BigRational::from(BigInt::from(m + 1));
        cache.push(val);
    }
    cache[n].clone()
}

static EULER: Lazy<Mutex<Vec<BigInt>>> = Lazy::new(|| Mutex::new(vec![BigInt::one()]));

/// Euler number E_n for even n (E_0 = 1, E_2 = -1, E_4 = 5, ...).
pub fn euler_number(n: u32) -> BigInt {
    assert!(n % 2 == 0, "Euler numbers of odd index vanish");
    let idx = (n / 2) as usize;
    let mut cache = EULER.lock().unwrap();
    while cache.len() <= idx {
        let k = cache.len();
        // sum_{j<=k} C(2k, 2j) E_{2j} = 0
        let mut acc = BigInt::zero();
        for (j, e) in cache.iter().enumerate() {
            acc += e * binom_int(2 * k as u64, 2 * j as u64);
        }
        cache.push(-acc);
    }
    cache[idx].clone()
}

/// Binomial coefficient as a big integer; zero when r > n.
pub fn binom_int(n: u64, r: u64) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..r {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

/// Binomial coefficient with the extended convention C(n, r) = 0 for
/// n < r or r < 0, as the closed-form engines expect.
pub fn binom(n: i64, r: i64) -> BigRational {
    if r < 0 || n < 0 || n < r {
        return BigRational::zero();
    }
    BigRational::from(binom_int(n as u64, r as u64))
}

pub fn factorial(n: u32) -> BigInt {
    let mut f = BigInt::one();
    for i in 1..=n {
        f *= i;
    }
    f
}

// ---------------------------------------------------------------------------
// Real numbers at fixed working precision
// ---------------------------------------------------------------------------

/// A big float tagged with its mantissa precision in bits. All operator
/// arithmetic keeps the larger operand precision.
#[derive(Clone, Debug)]
pub struct Real {
    x: BigFloat,
    p: usize,
}

impl Real {
    fn new(x: BigFloat, p: usize) -> Real {
        Real { x, p }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.x.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.x.is_positive()
    }

    pub fn abs(&self) -> Real {
        Real::new(self.x.abs(), self.p)
    }

    pub fn sqrt(&self) -> Real {
        Real::new(self.x.sqrt(self.p, RM), self.p)
    }

    /// Integer power with negative exponents via the reciprocal.
    pub fn powi(&self, n: i64) -> Real {
        if n >= 0 {
            Real::new(self.x.powi(n as usize, self.p, RM), self.p)
        } else {
            let pos = self.x.powi((-n) as usize, self.p, RM);
            Real::new(pos.reciprocal(self.p, RM), self.p)
        }
    }

    pub fn recip(&self) -> Real {
        Real::new(self.x.reciprocal(self.p, RM), self.p)
    }

    /// Floor of log2 |x|, or None for zero.
    pub fn floor_log2_abs(&self) -> Option<i64> {
        if self.x.is_zero() {
            return None;
        }
        self.x.exponent().map(|e| e as i64 - 1)
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.p.max(rhs.p);
                Real::new(self.x.$method(&rhs.x, p, RM), p)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        self.clone().neg()
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        let p = self.p;
        Real::new(self.x.neg(), p)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.x.partial_cmp(&other.x)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.x)
    }
}

/// Round a big float to the nearest integer, exactly.
fn round_to_bigint(y: &BigFloat) -> BigInt {
    if y.is_zero() {
        return BigInt::zero();
    }
    let (words, nbits, sign, e, _) = y.as_raw_parts().expect("finite value");
    let mut bytes = Vec::with_capacity(words.len() * 8);
    for w in words {
        bytes.extend_from_slice(&w.to_le_bytes()[..std::mem::size_of_val(w)]);
    }
    let m = BigUint::from_bytes_le(&bytes);
    // value = m * 2^(e - nbits)
    let shift = nbits as i64 - e as i64;
    let mag = if shift <= 0 {
        m << ((-shift) as usize)
    } else {
        let s = shift as usize;
        let mut q = &m >> s;
        if m.bit((s - 1) as u64) {
            q += 1u32;
        }
        q
    };
    let mag = BigInt::from(mag);
    if sign == astro_float::Sign::Neg {
        -mag
    } else {
        mag
    }
}

// ---------------------------------------------------------------------------
// Precision context
// ---------------------------------------------------------------------------

/// Fixes the requested decimal precision and owns the shared caches. All
/// numeric entry points hang off this type; results are accurate to the
/// requested digits with the guard digits absorbing roundoff.
pub struct PrecisionCtx {
    digits: usize,
    bits: usize,
    cc: RefCell<Consts>,
    consts: RefCell<BTreeMap<String, Real>>,
    bern_fact: RefCell<Vec<Real>>,
}

impl PrecisionCtx {
    pub fn new(digits: usize) -> Result<PrecisionCtx> {
        if digits < MIN_DIGITS {
            return Err(Error::Semantic(format!(
                "precision must be at least {MIN_DIGITS} digits, got {digits}"
            )));
        }
        let work = digits + GUARD_DIGITS + 15;
        let bits = (work as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
        let bits = (bits + 63) / 64 * 64;
        let cc = Consts::new().map_err(|e| Error::Semantic(format!("constants cache: {e:?}")))?;
        Ok(PrecisionCtx {
            digits,
            bits,
            cc: RefCell::new(cc),
            consts: RefCell::new(BTreeMap::new()),
            bern_fact: RefCell::new(Vec::new()),
        })
    }

    pub fn with_default() -> PrecisionCtx {
        PrecisionCtx::new(DEFAULT_DIGITS).expect("default precision is valid")
    }

    /// Requested decimal digits.
    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn guard(&self) -> usize {
        GUARD_DIGITS
    }

    /// Internal decimal digits actually carried.
    pub fn work_digits(&self) -> usize {
        self.digits + GUARD_DIGITS + 15
    }

    /// Significant digits shown to the user.
    pub fn display_digits(&self) -> usize {
        self.digits - GUARD_DIGITS
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    // -- constructors -------------------------------------------------------

    pub fn zero(&self) -> Real {
        Real::new(BigFloat::new(self.bits), self.bits)
    }

    pub fn int(&self, i: i64) -> Real {
        Real::new(BigFloat::from_i64(i, self.bits), self.bits)
    }

    pub fn uint(&self, u: u64) -> Real {
        Real::new(BigFloat::from_u64(u, self.bits), self.bits)
    }

    pub fn from_f64(&self, f: f64) -> Real {
        Real::new(BigFloat::from_f64(f, self.bits), self.bits)
    }

    pub fn bigint(&self, n: &BigInt) -> Real {
        if let Some(i) = n.to_i64() {
            return self.int(i);
        }
        self.parse(&n.to_string()).expect("integer literal parses")
    }

    pub fn rational(&self, r: &BigRational) -> Real {
        self.bigint(r.numer()) / self.bigint(r.denom())
    }

    pub fn parse(&self, s: &str) -> Result<Real> {
        let mut cc = self.cc.borrow_mut();
        let x = BigFloat::parse(s, Radix::Dec, self.bits, RM, &mut cc);
        if x.is_nan() {
            return Err(Error::Parse { pos: 0, msg: format!("bad numeric literal {s:?}") });
        }
        Ok(Real::new(x, self.bits))
    }

    /// 10^k for any integer k.
    pub fn pow10(&self, k: i64) -> Real {
        self.int(10).powi(k)
    }

    /// The comparison tolerance 10^-digits for a digit count.
    pub fn tol(&self, digits: usize) -> Real {
        self.pow10(-(digits as i64))
    }

    // -- elementary functions ----------------------------------------------

    pub fn pi(&self) -> Real {
        let mut cc = self.cc.borrow_mut();
        Real::new(cc.pi(self.bits, RM), self.bits)
    }

    pub fn ln2(&self) -> Real {
        let mut cc = self.cc.borrow_mut();
        Real::new(cc.ln_2(self.bits, RM), self.bits)
    }

    pub fn ln(&self, x: &Real) -> Real {
        let mut cc = self.cc.borrow_mut();
        Real::new(x.x.ln(self.bits, RM, &mut cc), self.bits)
    }

    pub fn exp(&self, x: &Real) -> Real {
        let mut cc = self.cc.borrow_mut();
        Real::new(x.x.exp(self.bits, RM, &mut cc), self.bits)
    }

    // -- inspection and formatting -----------------------------------------

    pub fn to_f64(&self, x: &Real) -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        let e2 = x.floor_log2_abs().unwrap();
        if e2 > 1060 {
            return if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        if e2 < -1060 {
            return 0.0;
        }
        let e10 = self.floor_log10_abs(x).unwrap();
        let scaled = x * self.pow10(16 - e10);
        let m = round_to_bigint(&scaled.x);
        m.to_f64().unwrap_or(0.0) * 10f64.powi((e10 - 16) as i32)
    }

    /// Floor of log10 |x|, exact; None for zero.
    pub fn floor_log10_abs(&self, x: &Real) -> Option<i64> {
        let e2 = x.floor_log2_abs()?;
        let mut e10 = (e2 as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let a = x.abs();
        while a < self.pow10(e10) {
            e10 -= 1;
        }
        while a >= self.pow10(e10 + 1) {
            e10 += 1;
        }
        Some(e10)
    }

    /// Round x * 10^k to the nearest big integer. Negative k divides by
    /// the exact power with correct rounding; multiplying by the inexact
    /// binary reciprocal would lose ties.
    pub fn round_scaled(&self, x: &Real, k: i64) -> BigInt {
        let y = if k >= 0 {
            x * self.pow10(k)
        } else {
            let p10 = self.pow10(-k);
            let p = x.p.max(p10.p);
            Real::new(x.x.div(&p10.x, p, RoundingMode::ToEven), p)
        };
        round_to_bigint(&y.x)
    }

    /// Decimal digits to which a and b agree, relative to the scale
    /// max(|a|, |b|, 1). Capped at twice the working digit count.
    pub fn agreed_digits(&self, a: &Real, b: &Real) -> usize {
        let cap = 2 * self.work_digits();
        let diff = (a - b).abs();
        if diff.is_zero() {
            return cap;
        }
        let mut scale = a.abs();
        let babs = b.abs();
        if babs > scale {
            scale = babs;
        }
        let one = self.int(1);
        if one > scale {
            scale = one;
        }
        let rel = diff / scale;
        match self.floor_log10_abs(&rel) {
            None => cap,
            Some(e) => {
                let agreed = -e - 1;
                agreed.clamp(0, cap as i64) as usize
            }
        }
    }

    /// Format with `sig` significant digits, plain decimal for moderate
    /// exponents and scientific notation otherwise.
    pub fn format_sig(&self, x: &Real, sig: usize) -> String {
        let sig = sig.max(1);
        if x.is_zero() {
            return "0".into();
        }
        let neg = x.is_negative();
        let a = x.abs();
        let mut e10 = self.floor_log10_abs(&a).unwrap();
        let mut digits;
        loop {
            let k = sig as i64 - 1 - e10;
            let m = self.round_scaled(&a, k);
            digits = m.to_string();
            if digits.len() == sig {
                break;
            }
            // rounding can carry into one more digit
            e10 += digits.len() as i64 - sig as i64;
        }
        let body = if (-4..=(sig as i64 + 4)).contains(&e10) {
            let point = e10 + 1; // digits before the decimal point
            if point <= 0 {
                format!("0.{}{}", "0".repeat((-point) as usize), digits)
            } else if (point as usize) >= sig {
                format!("{}{}", digits, "0".repeat(point as usize - sig))
            } else {
                format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
            }
        } else if sig == 1 {
            format!("{}e{}", digits, e10)
        } else {
            format!("{}.{}e{}", &digits[..1], &digits[1..], e10)
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    // -- cached classical constants ----------------------------------------

    fn cached(&self, key: &str, compute: impl FnOnce() -> Real) -> Real {
        if let Some(v) = self.consts.borrow().get(key) {
            return v.clone();
        }
        let v = compute();
        self.consts.borrow_mut().insert(key.to_string(), v.clone());
        v
    }

    /// Memoize an expensive fallible computation under a caller-chosen key.
    /// Errors are not cached.
    pub fn memo_try(
        &self,
        key: &str,
        compute: impl FnOnce() -> Result<Real>,
    ) -> Result<Real> {
        if let Some(v) = self.consts.borrow().get(key) {
            return Ok(v.clone());
        }
        let v = compute()?;
        self.consts.borrow_mut().insert(key.to_string(), v.clone());
        Ok(v)
    }

    /// zeta(s) for integer s >= 2.
    pub fn zeta_int(&self, s: i64) -> Real {
        assert!(s >= 2);
        self.cached(&format!("zeta({s})"), || self.hurwitz_zeta(s, &self.int(1)))
    }

    /// Dirichlet beta(s) for integer s >= 1.
    pub fn beta_int(&self, s: i64) -> Real {
        assert!(s >= 1);
        self.cached(&format!("beta({s})"), || {
            if s == 1 {
                return self.pi() / self.int(4);
            }
            let quarter = self.int(1) / self.int(4);
            let three_quarter = self.int(3) / self.int(4);
            let diff = self.hurwitz_zeta(s, &quarter) - self.hurwitz_zeta(s, &three_quarter);
            diff * self.int(4).powi(-s)
        })
    }

    pub fn catalan(&self) -> Real {
        self.beta_int(2)
    }

    /// Li_s(1/2) by direct summation.
    pub fn li_half(&self, s: u32) -> Real {
        self.cached(&format!("li({s})"), || {
            let kmax = (self.work_digits() as f64 * 3.33).ceil() as u64 + 8;
            let mut acc = self.zero();
            let half = self.int(1) / self.int(2);
            let mut hp = self.int(1);
            for k in 1..=kmax {
                hp = hp * &half;
                acc = acc + &hp * self.uint(k).powi(-(s as i64));
            }
            acc
        })
    }

    /// Im Li_s((1+i)/2) by direct summation.
    pub fn im_li_half_i(&self, s: u32) -> Real {
        self.cached(&format!("imli({s})"), || {
            let kmax = (self.work_digits() as f64 * 6.65).ceil() as u64 + 8;
            let half = self.int(1) / self.int(2);
            let z = ComplexReal { re: half.clone(), im: half };
            let mut zp = ComplexReal { re: self.int(1), im: self.zero() };
            let mut acc = self.zero();
            for k in 1..=kmax {
                zp = zp.mul(&z);
                acc = acc + &zp.im * self.uint(k).powi(-(s as i64));
            }
            acc
        })
    }

    // -- Euler-Maclaurin machinery -----------------------------------------

    /// B_{2k}/(2k)! as a cached Real.
    pub fn bern_over_fact(&self, k: usize) -> Real {
        {
            let cache = self.bern_fact.borrow();
            if k <= cache.len() {
                return cache[k - 1].clone();
            }
        }
        let mut cache = self.bern_fact.borrow_mut();
        while cache.len() < k {
            let kk = (cache.len() + 1) as u32;
            let r = bernoulli(2 * kk) / BigRational::from(factorial(2 * kk));
            cache.push(self.rational(&r));
        }
        cache[k - 1].clone()
    }

    fn em_orders(&self) -> (usize, usize) {
        let dw = self.work_digits();
        let j = (11 * dw + 9) / 10; // number of Bernoulli correction terms
        let n = (22 * dw + 9) / 10; // head terms before the tail expansion
        (n, j)
    }

    /// Hurwitz zeta(s, a) for integer s >= 2 and real a > 0.
    pub fn hurwitz_zeta(&self, s: i64, a: &Real) -> Real {
        assert!(s >= 2, "Hurwitz zeta needs s >= 2, got {s}");
        let mut out = self.log_power_tails(a, &[(s, 0)]);
        out.remove(&(s, 0)).unwrap()
    }

    /// Digamma psi(a) for real a > 0.
    pub fn psi(&self, a: &Real) -> Real {
        let (n_em, jb) = self.em_orders();
        let af = self.to_f64(a);
        let shift = if af >= n_em as f64 { 0 } else { (n_em as f64 - af).ceil() as u64 + 1 };
        let mut head = self.zero();
        for m in 0..shift {
            head = head + (a + self.uint(m)).recip();
        }
        let x = a + self.uint(shift);
        let inv = x.recip();
        let inv2 = &inv * &inv;
        // psi(x) = ln x - 1/(2x) - sum_k B_{2k}/(2k) x^(-2k)
        let mut acc = self.ln(&x) - &inv * (self.int(1) / self.int(2));
        let mut p = inv2.clone();
        let tol = self.tol(self.work_digits() + 5) * acc.abs();
        for k in 1..=jb {
            let b = bernoulli(2 * k as u32) / BigRational::from(BigInt::from(2 * k));
            let term = self.rational(&b) * &p;
            acc = acc - &term;
            if term.abs() < tol {
                break;
            }
            p = p * &inv2;
        }
        acc - head
    }

    /// Tail sums sum_{m>=0} ln^j(a+m) / (a+m)^t for every requested pair
    /// (t, j), t >= 2, j <= 3, in one Euler-Maclaurin sweep that shares
    /// the head powers across t.
    pub fn log_power_tails(
        &self,
        a: &Real,
        needs: &[(i64, u32)],
    ) -> BTreeMap<(i64, u32), Real> {
        let mut out = BTreeMap::new();
        if needs.is_empty() {
            return out;
        }
        let jmax_all = needs.iter().map(|&(_, j)| j).max().unwrap() as usize;
        let tmax = needs.iter().map(|&(t, _)| t).max().unwrap();
        let tmin = needs.iter().map(|&(t, _)| t).min().unwrap();
        assert!(tmin >= 2, "tail sums need t >= 2");
        let (n_base, jb) = self.em_orders();
        let n_em = n_base.max(tmax as usize + 2);

        // per-t list of j values, ascending t
        let mut by_t: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
        for &(t, j) in needs {
            let js = by_t.entry(t).or_default();
            if !js.contains(&j) {
                js.push(j);
            }
        }

        // head tables
        let mut inv: Vec<Real> = Vec::with_capacity(n_em);
        let mut lpow: Vec<Vec<Real>> = Vec::with_capacity(n_em);
        for m in 0..n_em {
            let x = a + self.uint(m as u64);
            inv.push(x.recip());
            let mut row = vec![self.int(1)];
            if jmax_all > 0 {
                let lx = self.ln(&x);
                for j in 1..=jmax_all {
                    let prev = row[j - 1].clone();
                    row.push(prev * &lx);
                }
            }
            lpow.push(row);
        }

        let mut pw: Vec<Real> = inv.iter().map(|v| v.powi(tmin)).collect();
        let mut cur_t = tmin;
        let mut heads: BTreeMap<(i64, u32), Real> = BTreeMap::new();
        for (&t, js) in &by_t {
            while cur_t < t {
                for (p, v) in pw.iter_mut().zip(inv.iter()) {
                    *p = &*p * v;
                }
                cur_t += 1;
            }
            for &j in js {
                let mut acc = self.zero();
                if j == 0 {
                    for p in &pw {
                        acc = acc + p;
                    }
                } else {
                    for (p, row) in pw.iter().zip(lpow.iter()) {
                        acc = acc + p * &row[j as usize];
                    }
                }
                heads.insert((t, j), acc);
            }
        }

        // tail point
        let x = a + self.uint(n_em as u64);
        let invx = x.recip();
        let lx = self.ln(&x);
        let mut lxp = vec![self.int(1)];
        for j in 1..=jmax_all.max(1) {
            let prev = lxp[j - 1].clone();
            lxp.push(prev * &lx);
        }
        let tol = self.tol(self.work_digits() + 5);

        for &(t, j) in needs.iter() {
            if out.contains_key(&(t, j)) {
                continue;
            }
            let head = heads[&(t, j)].clone();
            let xpt = invx.powi(t); // x^-t
            // integral: I_0 = x^(1-t)/(t-1); I_i adds the log powers
            let tm1 = self.int(t - 1);
            let x1t = &xpt * &x;
            let mut integral = &x1t / &tm1;
            for i in 1..=(j as usize) {
                integral = (&x1t * &lxp[i] + self.uint(i as u64) * integral) / &tm1;
            }
            let mid = &xpt * &lxp[j as usize] / self.int(2);
            let mut total = head + integral + mid;

            // Bernoulli corrections: - sum_k B_{2k}/(2k)! f^(2k-1)(x)
            // where f^(r)(x) = x^(-t-r) * sum_i c_i ln^i x.
            let mut c: Vec<BigInt> = vec![BigInt::zero(); j as usize + 1];
            c[j as usize] = BigInt::one();
            let mut order: i64 = 0;
            let mut xpow = xpt;
            let ref_mag = total.abs() + self.int(1);
            for k in 1..=jb {
                while order < 2 * k as i64 - 1 {
                    let mut next = vec![BigInt::zero(); c.len()];
                    for (i, ni) in next.iter_mut().enumerate() {
                        if i + 1 < c.len() {
                            *ni = &c[i + 1] * BigInt::from(i + 1);
                        }
                        *ni -= &c[i] * BigInt::from(t + order);
                    }
                    c = next;
                    xpow = xpow * &invx;
                    order += 1;
                }
                let mut poly = self.zero();
                for (i, ci) in c.iter().enumerate() {
                    if !ci.is_zero() {
                        poly = poly + self.bigint(ci) * &lxp[i];
                    }
                }
                let term = self.bern_over_fact(k) * poly * &xpow;
                total = total - &term;
                if term.abs() < &tol * &ref_mag {
                    break;
                }
            }
            out.insert((t, j), total);
        }
        out
    }

    // -- alternating series acceleration -----------------------------------

    /// Sum of the alternating series sum_{k>=0} (-1)^k f(k) for positive
    /// decreasing f, by Chebyshev-weighted acceleration. Needs O(digits)
    /// term evaluations.
    pub fn alt_accel(&self, mut f: impl FnMut(u64) -> Result<Real>) -> Result<Real> {
        let n = (131 * self.work_digits()) / 100 + 8;
        let p2 = self.bits + 64;
        let up = |v: &Real| Real::new(v.x.clone(), p2);
        let sqrt8 = Real::new(BigFloat::from_u64(8, p2), p2).sqrt();
        let three = Real::new(BigFloat::from_u64(3, p2), p2);
        let mut d = (three + sqrt8).powi(n as i64);
        d = (&d + d.recip()) * Real::new(BigFloat::from_f64(0.5, p2), p2);
        let mut b = -Real::new(BigFloat::from_u64(1, p2), p2);
        let mut c = -d.clone();
        let mut s = Real::new(BigFloat::new(p2), p2);
        for k in 0..n {
            c = &b - &c;
            let ak = f(k as u64)?;
            if ak.is_negative() {
                return Err(Error::NonAlternating(format!(
                    "term {k} of the alternating series has negative magnitude"
                )));
            }
            s = s + &c * up(&ak);
            // b *= (k+n)(k-n) / ((k+1/2)(k+1))
            let num = Real::new(
                BigFloat::from_i64((k as i64 + n as i64) * (k as i64 - n as i64), p2),
                p2,
            );
            let den = Real::new(
                BigFloat::from_i64((2 * k as i64 + 1) * (k as i64 + 1), p2),
                p2,
            );
            b = b * num * Real::new(BigFloat::from_u64(2, p2), p2) / den;
        }
        let r = s / d;
        Ok(Real::new(r.x, self.bits))
    }
}

// ---------------------------------------------------------------------------
// Complex helper
// ---------------------------------------------------------------------------

/// Minimal complex pair used for unit phases and polylogarithms at
/// complex arguments.
#[derive(Clone, Debug)]
pub struct ComplexReal {
    pub re: Real,
    pub im: Real,
}

impl ComplexReal {
    pub fn add(&self, o: &ComplexReal) -> ComplexReal {
        ComplexReal { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &ComplexReal) -> ComplexReal {
        ComplexReal { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &ComplexReal) -> ComplexReal {
        // real-by-real products dominate in practice; skip the zero limbs
        if self.im.is_zero() {
            return o.scale(&self.re);
        }
        if o.im.is_zero() {
            return self.scale(&o.re);
        }
        ComplexReal {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn scale(&self, r: &Real) -> ComplexReal {
        ComplexReal { re: &self.re * r, im: &self.im * r }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::with_default()
    }

    fn close(ctx: &PrecisionCtx, got: &Real, want: &str, digits: usize) {
        let w = ctx.parse(want).unwrap();
        let d = ctx.agreed_digits(got, &w);
        assert!(d >= digits, "agreed only to {d} digits: got {got}, want {want}");
    }

    #[test]
    fn exact_sequences() {
        assert_eq!(bernoulli(0), BigRational::one());
        assert_eq!(bernoulli(1), BigRational::new((-1).into(), 2.into()));
        assert_eq!(bernoulli(2), BigRational::new(1.into(), 6.into()));
        assert_eq!(bernoulli(12), BigRational::new((-691).into(), 2730.into()));
        assert!(bernoulli(3).is_zero());
        assert_eq!(euler_number(0), BigInt::from(1));
        assert_eq!(euler_number(2), BigInt::from(-1));
        assert_eq!(euler_number(4), BigInt::from(5));
        assert_eq!(euler_number(6), BigInt::from(-61));
        assert_eq!(euler_number(8), BigInt::from(1385));
        assert_eq!(binom_int(10, 3), BigInt::from(120));
        assert!(binom(3, 5).is_zero());
        assert!(binom(-1, 0).is_zero());
        assert_eq!(binom(6, 2), BigRational::from(BigInt::from(15)));
    }

    #[test]
    fn classical_constants() {
        let c = ctx();
        close(&c, &c.pi(), "3.141592653589793238462643383279502884197169399375105821", 52);
        close(&c, &c.ln2(), "0.6931471805599453094172321214581765680755001343602552541", 52);
        close(&c, &c.catalan(), "0.9159655941772190150546035149323841107741493742816721343", 52);
        close(&c, &c.zeta_int(3), "1.202056903159594285399738161511449990764986292340498882", 52);
        close(&c, &c.zeta_int(5), "1.036927755143369926331365486457034168057080919501912812", 52);
        close(&c, &c.beta_int(4), "0.9889445517411053361084226332283778213158608870627339108", 52);
        close(&c, &c.beta_int(6), "0.9986852222184381354416007878602065496783645461265144114", 52);
        close(&c, &c.li_half(4), "0.5174790616738993863307581618988629456223774751413792582", 52);
        close(&c, &c.li_half(5), "0.5084005792422687074591088492585899413195411256648216487", 52);
        close(&c, &c.im_li_half_i(3), "0.5700774070887689781956097575900745510631458099187287329", 52);
        close(&c, &c.im_li_half_i(4), "0.534022384079753549960238042252776636733042349389877306", 52);
    }

    #[test]
    fn hurwitz_and_psi() {
        let c = ctx();
        let q = c.int(1) / c.int(4);
        close(&c, &c.hurwitz_zeta(3, &q), "64.66386996876846016666898358942199494364490475141907638", 52);
        let a = c.int(7) / c.int(2);
        close(&c, &c.psi(&a), "1.10315664064524318722569033366791109947350706200623256", 52);
        // zeta(2) = pi^2/6
        let z2 = c.zeta_int(2);
        let want = c.pi().powi(2) / c.int(6);
        assert!(c.agreed_digits(&z2, &want) >= 70);
    }

    #[test]
    fn log_power_tail_sums() {
        let c = ctx();
        let a = c.int(11) / c.int(2);
        let out = c.log_power_tails(&a, &[(3, 2), (2, 3)]);
        close(&c, &out[&(3, 2)], "0.093693283856990504248762982193697994339785549141296748736105", 52);
        close(&c, &out[&(2, 3)], "5.5190850394770936629477010684425291221034331399986614948106", 52);
    }

    #[test]
    fn alternating_acceleration() {
        let c = ctx();
        // sum (-1)^k/(k+1) = ln 2
        let s = c.alt_accel(|k| Ok(c.uint(k + 1).recip())).unwrap();
        assert!(c.agreed_digits(&s, &c.ln2()) >= c.digits());
        // sum (-1)^k/(2k+1) = pi/4
        let s = c.alt_accel(|k| Ok(c.uint(2 * k + 1).recip())).unwrap();
        let want = c.pi() / c.int(4);
        assert!(c.agreed_digits(&s, &want) >= c.digits());
        let err = c.alt_accel(|k| Ok(if k == 3 { c.int(-1) } else { c.uint(k + 1).recip() }));
        assert!(matches!(err, Err(Error::NonAlternating(_))));
    }

    #[test]
    fn formatting() {
        let c = ctx();
        assert_eq!(c.format_sig(&c.pi(), 10), "3.141592654");
        assert_eq!(c.format_sig(&c.zero(), 12), "0");
        let x = c.int(-1) / c.int(300);
        assert_eq!(c.format_sig(&x, 6), "-0.00333333");
        let y = c.int(123450);
        assert_eq!(c.format_sig(&y, 4), "123500");
        let tiny = c.pow10(-30);
        assert_eq!(c.format_sig(&tiny, 3), "1.00e-30");
        // carry across the leading digit
        let z = c.parse("0.99999997").unwrap();
        assert_eq!(c.format_sig(&z, 3), "1.00");
    }

    #[test]
    fn round_trip_and_digits() {
        let c = ctx();
        let x = c.parse("-1.2337005501361698273543113749845188919142124259050880").unwrap();
        let y = c.parse(&c.format_sig(&x, 45)).unwrap();
        assert!(c.agreed_digits(&x, &y) >= 44);
        assert_eq!(c.floor_log10_abs(&c.int(999)), Some(2));
        assert_eq!(c.floor_log10_abs(&c.int(1000)), Some(3));
        assert_eq!(c.floor_log10_abs(&c.pow10(-7)), Some(-7));
        let f = c.to_f64(&c.pi());
        assert!((f - std::f64::consts::PI).abs() < 1e-14);
    }
}
