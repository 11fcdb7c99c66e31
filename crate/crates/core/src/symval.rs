//! Exact symbolic values: rational linear combinations of monomials in a
//! fixed basis of classical constants.
//!
//! A [`SymbolicValue`] is kept canonical at all times: factors inside a
//! monomial sorted ascending by constant, terms sorted descending by
//! monomial, no zero coefficients, no repeated monomials. Two values are
//! equal iff their canonical forms are identical, so `==` is exact
//! coefficient-level equality.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numkernel::{bernoulli, euler_number};
use crate::seriesnum::{MultiValueSpec, Sign, SumSpec};

pub type Rational = BigRational;

/// Constants of the canonical basis plus the pre-basis constants that
/// [`sv_normalize`] eliminates. Declaration order is the canonical sort
/// order; the derived `Ord` is the ordering contract for monomials.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Pi,
    Ln2,
    /// Catalan's constant G = beta(2).
    Catalan,
    /// zeta(s) for odd s >= 3.
    ZetaOdd(u32),
    /// beta(s) for even s >= 4.
    BetaEven(u32),
    /// Li_s(1/2) for s >= 4.
    LiHalf(u32),
    /// Im Li_3((1+i)/2).
    ImLi3HalfPlusHalfI,
    /// Im Li_4((1+i)/2).
    ImLi4HalfPlusHalfI,
    /// Alternating multiple zeta value by canonical argument string,
    /// e.g. "5bar,1".
    AltMZV(String),
    /// A sum left unevaluated, kept by its spec.
    FormalSum(SumSpec),
    /// A multiple zeta-like value left unevaluated, kept by its spec.
    FormalDoubleT(MultiValueSpec),
    // Pre-basis constants produced by the closed-form engines and removed
    // by normalization.
    PreZeta { s: u32, alt: bool },
    PreTtilde { s: u32, alt: bool },
    PreT { s: u32, alt: bool },
    PreBeta(u32),
}

impl Constant {
    pub fn zeta(s: u32, sign: Sign) -> Constant {
        Constant::PreZeta { s, alt: sign == Sign::Minus }
    }

    pub fn ttilde(s: u32, sign: Sign) -> Constant {
        Constant::PreTtilde { s, alt: sign == Sign::Minus }
    }

    /// Spell the constant the way the JSON schema and text output do.
    pub fn spell(&self) -> String {
        match self {
            Constant::Pi => "pi".into(),
            Constant::Ln2 => "ln2".into(),
            Constant::Catalan => "G".into(),
            Constant::ZetaOdd(s) => format!("zeta({s})"),
            Constant::BetaEven(s) => format!("beta({s})"),
            Constant::LiHalf(s) => format!("Li{s}(1/2)"),
            Constant::ImLi3HalfPlusHalfI => "ImLi3((1+i)/2)".into(),
            Constant::ImLi4HalfPlusHalfI => "ImLi4((1+i)/2)".into(),
            Constant::AltMZV(name) => format!("zetaalt({name})"),
            Constant::FormalSum(spec) => spec.to_string(),
            Constant::FormalDoubleT(mv) => mv.to_string(),
            Constant::PreZeta { s, alt } => format!("zeta({s}{})", bar(*alt)),
            Constant::PreTtilde { s, alt } => format!("tTilde({s}{})", bar(*alt)),
            Constant::PreT { s, alt } => format!("t({s}{})", bar(*alt)),
            Constant::PreBeta(s) => format!("beta({s})"),
        }
    }

    /// Inverse of [`Constant::spell`].
    pub fn parse(s: &str) -> Result<Constant> {
        let fail = |msg: &str| Error::Parse { pos: 0, msg: format!("{msg}: {s:?}") };
        match s {
            "pi" => return Ok(Constant::Pi),
            "ln2" => return Ok(Constant::Ln2),
            "G" => return Ok(Constant::Catalan),
            "ImLi3((1+i)/2)" => return Ok(Constant::ImLi3HalfPlusHalfI),
            "ImLi4((1+i)/2)" => return Ok(Constant::ImLi4HalfPlusHalfI),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("Li").and_then(|r| r.strip_suffix("(1/2)")) {
            let n: u32 = rest.parse().map_err(|_| fail("bad polylog order"))?;
            if n < 4 {
                return Err(Error::UnsupportedConstant(format!(
                    "Li{n}(1/2) is below the basis cutoff"
                )));
            }
            return Ok(Constant::LiHalf(n));
        }
        if let Some(inner) = strip_call(s, "zetaalt") {
            parse_mv_args(inner)?; // validates shape only
            return Ok(Constant::AltMZV(inner.to_string()));
        }
        for (name, kind) in [("zeta", 'z'), ("tTilde", 'T'), ("t", 't')] {
            if let Some(inner) = strip_call(s, name) {
                let args = parse_mv_args(inner)?;
                if args.len() == 1 {
                    let (n, sign) = args[0];
                    let alt = sign == Sign::Minus;
                    return Ok(match kind {
                        'z' if !alt && n >= 3 && n % 2 == 1 => Constant::ZetaOdd(n),
                        'z' => Constant::PreZeta { s: n, alt },
                        'T' => Constant::PreTtilde { s: n, alt },
                        _ => Constant::PreT { s: n, alt },
                    });
                }
                return Ok(Constant::FormalDoubleT(MultiValueSpec::new(
                    match kind {
                        'z' => crate::seriesnum::MvKind::Zeta,
                        'T' => crate::seriesnum::MvKind::TTilde,
                        _ => crate::seriesnum::MvKind::T,
                    },
                    args,
                )?));
            }
        }
        if let Some(inner) = strip_call(s, "TT") {
            let args = parse_mv_args(inner)?;
            return Ok(Constant::FormalDoubleT(MultiValueSpec::new(
                crate::seriesnum::MvKind::TT,
                args,
            )?));
        }
        if let Some(inner) = strip_call(s, "beta") {
            let args = parse_mv_args(inner)?;
            if let [(n, Sign::Plus)] = args[..] {
                return Ok(if n >= 4 && n % 2 == 0 {
                    Constant::BetaEven(n)
                } else {
                    Constant::PreBeta(n)
                });
            }
            return Err(fail("bad beta argument"));
        }
        if s.starts_with("T[") || s.starts_with("S[") || s.starts_with("R[") {
            return Ok(Constant::FormalSum(SumSpec::parse(s)?));
        }
        Err(fail("unknown constant"))
    }

    /// True for constants that survive normalization.
    pub fn is_canonical(&self) -> bool {
        !matches!(
            self,
            Constant::PreZeta { .. }
                | Constant::PreTtilde { .. }
                | Constant::PreT { .. }
                | Constant::PreBeta(_)
        )
    }
}

fn bar(alt: bool) -> &'static str {
    if alt {
        "bar"
    } else {
        ""
    }
}

fn strip_call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
}

pub(crate) fn parse_mv_args(inner: &str) -> Result<Vec<(u32, Sign)>> {
    let mut out = Vec::new();
    for part in inner.split(',') {
        let part = part.trim();
        let (digits, sign) = match part.strip_suffix("bar") {
            Some(d) => (d, Sign::Minus),
            None => (part, Sign::Plus),
        };
        let n: u32 = digits.parse().map_err(|_| Error::Parse {
            pos: 0,
            msg: format!("bad argument {part:?}"),
        })?;
        out.push((n, sign));
    }
    Ok(out)
}

/// Product of constant powers; factors sorted ascending, exponents >= 1.
pub type Monomial = Vec<(Constant, u32)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rational,
    pub mono: Monomial,
}

/// Canonical rational linear combination of constant monomials.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymbolicValue {
    terms: Vec<Term>,
}

impl SymbolicValue {
    pub fn zero() -> SymbolicValue {
        SymbolicValue::default()
    }

    pub fn one() -> SymbolicValue {
        SymbolicValue::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> SymbolicValue {
        SymbolicValue::single(r, Vec::new())
    }

    pub fn from_int(n: i64) -> SymbolicValue {
        SymbolicValue::from_rational(rat(n, 1))
    }

    pub fn constant(c: Constant) -> SymbolicValue {
        SymbolicValue::single(Rational::one(), vec![(c, 1)])
    }

    /// Build a single-term value; factors may arrive unsorted or repeated.
    pub fn single(coeff: Rational, factors: Vec<(Constant, u32)>) -> SymbolicValue {
        let mut map: BTreeMap<Constant, u32> = BTreeMap::new();
        for (c, e) in factors {
            if e > 0 {
                *map.entry(c).or_insert(0) += e;
            }
        }
        let mono: Monomial = map.into_iter().collect();
        let mut sv = SymbolicValue::zero();
        if !coeff.is_zero() {
            sv.terms.push(Term { coeff, mono });
        }
        sv
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The constants that occur anywhere in the value.
    pub fn constants(&self) -> Vec<&Constant> {
        let mut out = Vec::new();
        for t in &self.terms {
            for (c, _) in &t.mono {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Formal factors (unevaluated sums) present in the value.
    pub fn formal_constants(&self) -> Vec<Constant> {
        self.constants()
            .into_iter()
            .filter(|c| matches!(c, Constant::FormalSum(_) | Constant::FormalDoubleT(_)))
            .cloned()
            .collect()
    }

    fn from_map(map: BTreeMap<Monomial, Rational>) -> SymbolicValue {
        let mut terms: Vec<Term> = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(mono, coeff)| Term { coeff, mono })
            .collect();
        terms.sort_by(|a, b| b.mono.cmp(&a.mono));
        SymbolicValue { terms }
    }

    fn to_map(&self) -> BTreeMap<Monomial, Rational> {
        self.terms
            .iter()
            .map(|t| (t.mono.clone(), t.coeff.clone()))
            .collect()
    }

    pub fn add(&self, other: &SymbolicValue) -> SymbolicValue {
        let mut map = self.to_map();
        for t in &other.terms {
            let entry = map.entry(t.mono.clone()).or_insert_with(Rational::zero);
            *entry += &t.coeff;
        }
        SymbolicValue::from_map(map)
    }

    pub fn sub(&self, other: &SymbolicValue) -> SymbolicValue {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SymbolicValue {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coeff: -t.coeff.clone(), mono: t.mono.clone() })
            .collect();
        SymbolicValue { terms }
    }

    pub fn scale(&self, r: &Rational) -> SymbolicValue {
        if r.is_zero() {
            return SymbolicValue::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coeff: &t.coeff * r, mono: t.mono.clone() })
            .collect();
        SymbolicValue { terms }
    }

    pub fn scale_int(&self, n: i64) -> SymbolicValue {
        self.scale(&rat(n, 1))
    }

    pub fn mul(&self, other: &SymbolicValue) -> SymbolicValue {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut fac: BTreeMap<Constant, u32> = BTreeMap::new();
                for (c, e) in a.mono.iter().chain(b.mono.iter()) {
                    *fac.entry(c.clone()).or_insert(0) += e;
                }
                let mono: Monomial = fac.into_iter().collect();
                let entry = map.entry(mono).or_insert_with(Rational::zero);
                *entry += &a.coeff * &b.coeff;
            }
        }
        SymbolicValue::from_map(map)
    }

    pub fn pow(&self, k: u32) -> SymbolicValue {
        let mut acc = SymbolicValue::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// The rational coefficient of the empty monomial.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .iter()
            .find(|t| t.mono.is_empty())
            .map(|t| t.coeff.clone())
            .unwrap_or_else(Rational::zero)
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// zeta(2k) / pi^(2k) as an exact rational.
fn zeta_even_over_pi(s: u32) -> Rational {
    debug_assert!(s >= 2 && s % 2 == 0);
    let k = s / 2;
    // zeta(2k) = (-1)^(k+1) B_{2k} (2 pi)^{2k} / (2 (2k)!)
    let mut fact = BigInt::one();
    for i in 1..=s {
        fact *= i;
    }
    let sign = if k % 2 == 1 { 1 } else { -1 };
    let two_pow = BigInt::from(2u32).pow(s - 1);
    bernoulli(s) * Rational::new(sign * two_pow, fact)
}

/// beta(2k+1) / pi^(2k+1) as an exact rational.
fn beta_odd_over_pi(s: u32) -> Rational {
    debug_assert!(s % 2 == 1);
    let k = s / 2;
    // beta(2k+1) = (-1)^k E_{2k} pi^{2k+1} / (4^{k+1} (2k)!)
    let mut fact = BigInt::one();
    for i in 1..=(2 * k) {
        fact *= i;
    }
    let sign: BigInt = if k % 2 == 0 { 1.into() } else { BigInt::from(-1) };
    let den = BigInt::from(4u32).pow(k + 1) * fact;
    Rational::new(sign * euler_number(2 * k), den)
}

/// One rewrite step toward the canonical basis, or `None` if the constant
/// is already canonical. Returns the rational multiplier and replacement
/// factors.
fn rewrite(c: &Constant) -> Result<Option<(Rational, Vec<(Constant, u32)>)>> {
    let out = match c {
        Constant::PreZeta { s: 0, .. } => Some((rat(-1, 2), vec![])),
        Constant::PreZeta { s: 1, alt: false } => Some((Rational::zero(), vec![])),
        Constant::PreZeta { s: 1, alt: true } => Some((rat(-1, 1), vec![(Constant::Ln2, 1)])),
        Constant::PreZeta { s, alt: true } => {
            // zeta(s bar) = (2^(1-s) - 1) zeta(s)
            let m = rat(1, 1 << (s - 1)) - Rational::one();
            Some((m, vec![(Constant::PreZeta { s: *s, alt: false }, 1)]))
        }
        Constant::PreZeta { s, alt: false } => {
            if s % 2 == 0 {
                Some((zeta_even_over_pi(*s), vec![(Constant::Pi, *s)]))
            } else {
                Some((Rational::one(), vec![(Constant::ZetaOdd(*s), 1)]))
            }
        }
        Constant::PreTtilde { s: 1, alt: false } => Some((rat(2, 1), vec![(Constant::Ln2, 1)])),
        Constant::PreTtilde { s, alt: false } => {
            // tTilde(s) = (2^s - 1) zeta(s)
            let m = rat((1i64 << s) - 1, 1);
            Some((m, vec![(Constant::PreZeta { s: *s, alt: false }, 1)]))
        }
        Constant::PreTtilde { s, alt: true } => {
            // tTilde(s bar) = -2^s beta(s)
            Some((rat(-(1i64 << s), 1), vec![(Constant::PreBeta(*s), 1)]))
        }
        Constant::PreT { s: 1, alt: false } => {
            return Err(Error::Divergent("t(1) diverges".into()));
        }
        Constant::PreT { s, alt: false } => {
            // t(s) = (1 - 2^(-s)) zeta(s)
            let m = Rational::one() - rat(1, 1 << s);
            Some((m, vec![(Constant::PreZeta { s: *s, alt: false }, 1)]))
        }
        Constant::PreT { s, alt: true } => {
            // t(s bar) = -beta(s)
            Some((rat(-1, 1), vec![(Constant::PreBeta(*s), 1)]))
        }
        Constant::PreBeta(2) => Some((Rational::one(), vec![(Constant::Catalan, 1)])),
        Constant::PreBeta(s) if s % 2 == 1 => {
            Some((beta_odd_over_pi(*s), vec![(Constant::Pi, *s)]))
        }
        Constant::PreBeta(s) => Some((Rational::one(), vec![(Constant::BetaEven(*s), 1)])),
        _ => None,
    };
    Ok(out)
}

/// Rewrite every pre-basis constant to the canonical basis, folding the
/// rational multipliers into the coefficients. Idempotent.
pub fn sv_normalize(sv: &SymbolicValue) -> Result<SymbolicValue> {
    let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
    for term in sv.terms() {
        let mut coeff = term.coeff.clone();
        let mut queue: Vec<(Constant, u32)> = term.mono.clone();
        let mut done: BTreeMap<Constant, u32> = BTreeMap::new();
        while let Some((c, e)) = queue.pop() {
            match rewrite(&c)? {
                None => *done.entry(c).or_insert(0) += e,
                Some((mult, facs)) => {
                    let mut m = Rational::one();
                    for _ in 0..e {
                        m *= &mult;
                    }
                    coeff *= m;
                    if coeff.is_zero() {
                        queue.clear();
                        done.clear();
                        break;
                    }
                    for (fc, fe) in facs {
                        queue.push((fc, fe * e));
                    }
                }
            }
        }
        if coeff.is_zero() {
            continue;
        }
        let mono: Monomial = done.into_iter().collect();
        let entry = map.entry(mono).or_insert_with(Rational::zero);
        *entry += coeff;
    }
    Ok(SymbolicValue::from_map(map))
}

fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_factor(c: &Constant, e: u32) -> String {
    if e == 1 {
        c.spell()
    } else {
        format!("{}^{}", c.spell(), e)
    }
}

impl fmt::Display for SymbolicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = t.coeff.abs();
            let mut parts: Vec<String> = Vec::new();
            if t.mono.is_empty() || !mag.is_one() {
                parts.push(fmt_rational(&mag));
            }
            for (c, e) in &t.mono {
                parts.push(fmt_factor(c, *e));
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

// Constants serialize as their spelled form.
impl Serialize for Constant {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.spell())
    }
}

// JSON schema: array of {"coeff": "num/den", "monomial": ["pi^2", "ln2"]}.
impl Serialize for SymbolicValue {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(self.terms.len()))?;
        for t in &self.terms {
            seq.serialize_element(&TermRepr(t))?;
        }
        seq.end()
    }
}

struct TermRepr<'a>(&'a Term);

impl Serialize for TermRepr<'_> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let t = self.0;
        let mut map = ser.serialize_map(Some(2))?;
        map.serialize_entry("coeff", &format!("{}/{}", t.coeff.numer(), t.coeff.denom()))?;
        let mono: Vec<String> = t.mono.iter().map(|(c, e)| fmt_factor(c, *e)).collect();
        map.serialize_entry("monomial", &mono)?;
        map.end()
    }
}

#[derive(Deserialize)]
struct TermWire {
    coeff: String,
    monomial: Vec<String>,
}

impl<'de> Deserialize<'de> for SymbolicValue {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct SvVisitor;
        impl<'de> Visitor<'de> for SvVisitor {
            type Value = SymbolicValue;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a list of coeff/monomial terms")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<SymbolicValue, A::Error> {
                use serde::de::Error as DeError;
                let mut acc = SymbolicValue::zero();
                while let Some(tw) = seq.next_element::<TermWire>()? {
                    let coeff: Rational = tw
                        .coeff
                        .parse()
                        .map_err(|e| A::Error::custom(format!("bad coeff {:?}: {e}", tw.coeff)))?;
                    let mut factors = Vec::new();
                    for f in &tw.monomial {
                        let (c, e) = parse_factor(f).map_err(|e| A::Error::custom(e.to_string()))?;
                        factors.push((c, e));
                    }
                    acc = acc.add(&SymbolicValue::single(coeff, factors));
                }
                Ok(acc)
            }
        }
        de.deserialize_seq(SvVisitor)
    }
}

/// Parse a spelled factor like "pi^2" or "zeta(3)" into constant and power.
pub fn parse_factor(s: &str) -> Result<(Constant, u32)> {
    let (base, exp) = match s.rfind('^') {
        Some(pos) if s[pos + 1..].chars().all(|c| c.is_ascii_digit())
            && !s[pos + 1..].is_empty() =>
        {
            let e: u32 = s[pos + 1..].parse().map_err(|_| Error::Parse {
                pos,
                msg: format!("bad exponent in {s:?}"),
            })?;
            (&s[..pos], e)
        }
        _ => (s, 1),
    };
    if exp == 0 {
        return Err(Error::Parse { pos: 0, msg: format!("zero exponent in {s:?}") });
    }
    Ok((Constant::parse(base)?, exp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv_text(sv: &SymbolicValue) -> String {
        sv.to_string()
    }

    #[test]
    fn worked_example_ordering() {
        // -7/2 zeta(3) + pi^2 ln2 must print with zeta(3) first.
        let v = SymbolicValue::single(rat(-7, 2), vec![(Constant::ZetaOdd(3), 1)]).add(
            &SymbolicValue::single(rat(1, 1), vec![(Constant::Pi, 2), (Constant::Ln2, 1)]),
        );
        assert_eq!(sv_text(&v), "-7/2*zeta(3) + pi^2*ln2");
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(
            json,
            serde_json::json!([
                {"coeff": "-7/2", "monomial": ["zeta(3)"]},
                {"coeff": "1/1", "monomial": ["pi^2", "ln2"]}
            ])
        );
    }

    #[test]
    fn json_round_trip() {
        let v = SymbolicValue::single(rat(-16, 1), vec![(Constant::LiHalf(4), 1)])
            .add(&SymbolicValue::single(rat(23, 360), vec![(Constant::Pi, 4)]))
            .add(&SymbolicValue::single(
                rat(2, 3),
                vec![(Constant::Pi, 2), (Constant::Ln2, 2)],
            ));
        let s = serde_json::to_string(&v).unwrap();
        let back: SymbolicValue = serde_json::from_str(&s).unwrap();
        assert_eq!(v, back);
        assert_eq!(s, serde_json::to_string(&back).unwrap());
    }

    #[test]
    fn normalize_even_zeta_and_beta() {
        // zeta(2) = pi^2/6, zeta(4) = pi^4/90, zeta(6) = pi^6/945
        for (s, num, den) in [(2u32, 1i64, 6i64), (4, 1, 90), (6, 1, 945), (8, 1, 9450)] {
            let v = sv_normalize(&SymbolicValue::constant(Constant::PreZeta { s, alt: false }))
                .unwrap();
            let expect = SymbolicValue::single(rat(num, den), vec![(Constant::Pi, s)]);
            assert_eq!(v, expect, "zeta({s})");
        }
        // beta(1) = pi/4, beta(3) = pi^3/32, beta(5) = 5 pi^5/1536
        for (s, num, den) in [(1u32, 1i64, 4i64), (3, 1, 32), (5, 5, 1536)] {
            let v = sv_normalize(&SymbolicValue::constant(Constant::PreBeta(s))).unwrap();
            let expect = SymbolicValue::single(rat(num, den), vec![(Constant::Pi, s)]);
            assert_eq!(v, expect, "beta({s})");
        }
    }

    #[test]
    fn normalize_special_values() {
        // zeta(1) := 0
        let z1 = SymbolicValue::constant(Constant::PreZeta { s: 1, alt: false });
        assert!(sv_normalize(&z1).unwrap().is_zero());
        // zeta(1 bar) = -ln2
        let z1b = sv_normalize(&SymbolicValue::constant(Constant::PreZeta { s: 1, alt: true }))
            .unwrap();
        assert_eq!(z1b, SymbolicValue::single(rat(-1, 1), vec![(Constant::Ln2, 1)]));
        // tTilde(1) := 2 ln2
        let t1 = sv_normalize(&SymbolicValue::constant(Constant::PreTtilde { s: 1, alt: false }))
            .unwrap();
        assert_eq!(t1, SymbolicValue::single(rat(2, 1), vec![(Constant::Ln2, 1)]));
        // tTilde(1 bar) = -pi/2
        let t1b = sv_normalize(&SymbolicValue::constant(Constant::PreTtilde { s: 1, alt: true }))
            .unwrap();
        assert_eq!(t1b, SymbolicValue::single(rat(-1, 2), vec![(Constant::Pi, 1)]));
        // tTilde(3) = 7 zeta(3)
        let t3 = sv_normalize(&SymbolicValue::constant(Constant::PreTtilde { s: 3, alt: false }))
            .unwrap();
        assert_eq!(t3, SymbolicValue::single(rat(7, 1), vec![(Constant::ZetaOdd(3), 1)]));
        // tTilde(2 bar) = -4 G
        let t2b = sv_normalize(&SymbolicValue::constant(Constant::PreTtilde { s: 2, alt: true }))
            .unwrap();
        assert_eq!(t2b, SymbolicValue::single(rat(-4, 1), vec![(Constant::Catalan, 1)]));
        // zeta(3 bar) = -3/4 zeta(3)
        let z3b = sv_normalize(&SymbolicValue::constant(Constant::PreZeta { s: 3, alt: true }))
            .unwrap();
        assert_eq!(z3b, SymbolicValue::single(rat(-3, 4), vec![(Constant::ZetaOdd(3), 1)]));
        // zeta(0) := -1/2
        let z0 = sv_normalize(&SymbolicValue::constant(Constant::PreZeta { s: 0, alt: false }))
            .unwrap();
        assert_eq!(z0, SymbolicValue::from_rational(rat(-1, 2)));
        // t(2 bar) = -G
        let t2bar = sv_normalize(&SymbolicValue::constant(Constant::PreT { s: 2, alt: true }))
            .unwrap();
        assert_eq!(t2bar, SymbolicValue::single(rat(-1, 1), vec![(Constant::Catalan, 1)]));
    }

    #[test]
    fn normalize_is_idempotent_on_products() {
        // (zeta(2))^2 -> pi^4/36
        let v = SymbolicValue::single(
            rat(3, 5),
            vec![(Constant::PreZeta { s: 2, alt: false }, 2), (Constant::Ln2, 1)],
        );
        let n1 = sv_normalize(&v).unwrap();
        let expect =
            SymbolicValue::single(rat(3, 5 * 36), vec![(Constant::Pi, 4), (Constant::Ln2, 1)]);
        assert_eq!(n1, expect);
        assert_eq!(sv_normalize(&n1).unwrap(), n1);
    }

    #[test]
    fn factor_round_trip() {
        for spelled in [
            "pi", "ln2", "G", "zeta(3)", "zeta(9)", "beta(4)", "beta(8)", "Li4(1/2)",
            "Li5(1/2)", "ImLi3((1+i)/2)", "ImLi4((1+i)/2)", "zetaalt(5bar,1)",
            "zetaalt(3bar,3,1)", "pi^11", "ln2^4", "zeta(3)^2", "T[2;2]", "S[1,~1;~3]",
            "zeta(3bar,1)", "zeta(4)", "zeta(2bar)", "tTilde(3)", "tTilde(1bar)", "t(2bar)",
            "TT(2,1)",
        ] {
            let (c, e) = parse_factor(spelled).unwrap();
            assert_eq!(fmt_factor(&c, e), spelled);
        }
    }

    #[test]
    fn ring_ops_cancel() {
        let a = SymbolicValue::single(rat(2, 3), vec![(Constant::Catalan, 1)]);
        let b = SymbolicValue::single(rat(-2, 3), vec![(Constant::Catalan, 1)]);
        assert!(a.add(&b).is_zero());
        let p = a.mul(&a);
        assert_eq!(p, SymbolicValue::single(rat(4, 9), vec![(Constant::Catalan, 2)]));
    }
}
