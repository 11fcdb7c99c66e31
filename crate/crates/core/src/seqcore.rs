//! Exact harmonic-number families and the sequence-sum primitives for the
//! constant sequence (a_k = 1) and the alternating sequence (a_k = (-1)^k).
//!
//! Each primitive has two independent faces: a closed form returning an
//! exact [`SymbolicValue`] over pre-basis symbols, and a numeric evaluation
//! straight from the defining series. Their agreement is a property test.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numkernel::{PrecisionCtx, Real};
use crate::seriesnum::Sign;
use crate::symval::{Constant, SymbolicValue};

/// The two base sequences the primitives are specialized to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqTag {
    /// a_k = 1 for all k.
    Ones,
    /// a_k = (-1)^k for all k.
    Alt,
}

/// Harmonic-number families; `SmallH` denotes the half-integer-denominator
/// family h_n^(r) = sum 1/(k-1/2)^r.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmonicKind {
    /// H_n^(r) = sum_{k<=n} 1/k^r.
    H,
    /// Hbar_n^(r) = sum_{k<=n} (-1)^(k-1)/k^r.
    Hbar,
    /// h_n^(r) = sum_{k<=n} 1/(k-1/2)^r.
    SmallH,
    /// hbar_n^(r) = sum_{k<=n} (-1)^(k-1)/(k-1/2)^r.
    SmallHbar,
    /// O_n^(r) = sum_{k<=n} 1/(2k-1)^r = h_n^(r)/2^r.
    O,
}

/// The primitives with published closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimName {
    D,
    M,
    Mbar,
    N,
    Nbar,
    R,
    S,
    THat,
    TT,
    TCheck,
}

/// The intermediate families, defined but reduced away by the closed forms;
/// available through numeric evaluation only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefName {
    E,
    Ebar,
    Ehat,
    Etilde,
    F,
    Fbar,
    Fhat,
    Ftilde,
    G,
    L,
}

/// Any primitive acceptable to `seq_prim_numeric`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumName {
    Prim(PrimName),
    Def(DefName),
}

impl From<PrimName> for NumName {
    fn from(p: PrimName) -> NumName {
        NumName::Prim(p)
    }
}

impl From<DefName> for NumName {
    fn from(d: DefName) -> NumName {
        NumName::Def(d)
    }
}

/// delta_sigma^k = 1 - sigma * (-1)^k; always 0 or 2.
pub fn delta_sigma(sigma: Sign, k: i64) -> i64 {
    let par = if k.rem_euclid(2) == 0 { 1 } else { -1 };
    1 - sigma.as_i64() * par
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact harmonic number of the requested family.
pub fn harmonic(kind: HarmonicKind, r: u32, n: u64) -> BigRational {
    assert!(r >= 1, "harmonic order must be at least 1");
    let mut acc = BigRational::zero();
    for k in 1..=n {
        let (num, den): (BigInt, BigInt) = match kind {
            HarmonicKind::H => (BigInt::one(), BigInt::from(k).pow(r)),
            HarmonicKind::Hbar => {
                let s = if k % 2 == 1 { 1 } else { -1 };
                (BigInt::from(s), BigInt::from(k).pow(r))
            }
            // 1/(k-1/2)^r = 2^r/(2k-1)^r
            HarmonicKind::SmallH => {
                (BigInt::from(2).pow(r), BigInt::from(2 * k - 1).pow(r))
            }
            HarmonicKind::SmallHbar => {
                let s: BigInt = if k % 2 == 1 { 1.into() } else { (-1).into() };
                (s * BigInt::from(2).pow(r), BigInt::from(2 * k - 1).pow(r))
            }
            HarmonicKind::O => (BigInt::one(), BigInt::from(2 * k - 1).pow(r)),
        };
        acc += BigRational::new(num, den);
    }
    acc
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

fn zeta_c(j: u32, alt: bool) -> Constant {
    Constant::PreZeta { s: j, alt }
}

fn ttilde_c(j: u32, alt: bool) -> Constant {
    Constant::PreTtilde { s: j, alt }
}

fn sv_rat(r: BigRational) -> SymbolicValue {
    SymbolicValue::from_rational(r)
}

fn sv_c(coeff: i64, c: Constant) -> SymbolicValue {
    SymbolicValue::single(big(coeff), vec![(c, 1)])
}

fn need_n1(name: PrimName, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::UndefinedPrimitive(format!(
            "{name:?} is undefined at n = 0"
        )));
    }
    Ok(())
}

/// Closed form of a primitive as an exact symbolic value over pre-basis
/// symbols; harmonic-number contributions are expanded to rationals, the
/// zeta / t-tilde symbols are left for normalization.
pub fn seq_prim_closed(name: PrimName, tag: SeqTag, n: u64, j: u32) -> Result<SymbolicValue> {
    if j == 0 {
        return Err(Error::UndefinedPrimitive("order j must be at least 1".into()));
    }
    let pj = if j % 2 == 0 { 1 } else { -1 }; // (-1)^j
    let d1 = if j == 1 { 1 } else { 0 }; // Kronecker delta_{j,1}
    match tag {
        SeqTag::Ones => Ok(match name {
            PrimName::D => SymbolicValue::constant(zeta_c(j, false)),
            PrimName::M => {
                sv_rat(harmonic(HarmonicKind::H, j, n)).add(&sv_c(pj, zeta_c(j, false)))
            }
            PrimName::Mbar => {
                need_n1(name, n)?;
                sv_c(1, zeta_c(j, false)).sub(&sv_rat(harmonic(HarmonicKind::H, j, n - 1)))
            }
            PrimName::N => {
                need_n1(name, n)?;
                sv_rat(harmonic(HarmonicKind::SmallH, j, n)).add(&sv_c(pj, ttilde_c(j, false)))
            }
            PrimName::Nbar => {
                need_n1(name, n)?;
                sv_c(1, ttilde_c(j, false))
                    .sub(&sv_rat(harmonic(HarmonicKind::SmallH, j, n - 1)))
            }
            PrimName::R => sv_c(1 + pj, zeta_c(j, false)),
            PrimName::S => {
                need_n1(name, n)?;
                sv_c(1 + pj, ttilde_c(j, false))
            }
            PrimName::THat | PrimName::TT => sv_c(1, ttilde_c(j, false)),
            PrimName::TCheck => sv_c(-(1 + pj), ttilde_c(j, false)),
        }),
        SeqTag::Alt => {
            let pn = if n % 2 == 0 { 1 } else { -1 }; // (-1)^n
            let ln2 = |coeff: i64| {
                if coeff == 0 || d1 == 0 {
                    SymbolicValue::zero()
                } else {
                    SymbolicValue::single(big(coeff), vec![(Constant::Ln2, 1)])
                }
            };
            Ok(match name {
                PrimName::D => sv_c(1, zeta_c(j, true)).add(&ln2(1)),
                PrimName::M => sv_rat(harmonic(HarmonicKind::Hbar, j, n) * big(-pn))
                    .add(&sv_c(pn * pj, zeta_c(j, true)))
                    .add(&ln2(-1)),
                PrimName::Mbar => {
                    need_n1(name, n)?;
                    sv_rat(harmonic(HarmonicKind::Hbar, j, n - 1) * big(pn))
                        .add(&sv_c(pn, zeta_c(j, true)))
                        .add(&ln2(1))
                }
                PrimName::N => {
                    need_n1(name, n)?;
                    sv_rat(harmonic(HarmonicKind::SmallHbar, j, n) * big(-pn))
                        .add(&sv_c(-pn * pj, ttilde_c(j, true)))
                        .add(&ln2(-1))
                }
                PrimName::Nbar => {
                    need_n1(name, n)?;
                    sv_rat(harmonic(HarmonicKind::SmallHbar, j, n - 1) * big(pn))
                        .add(&sv_c(pn, ttilde_c(j, true)))
                        .add(&ln2(1))
                }
                PrimName::R => sv_c(pn * (1 + pj), zeta_c(j, true)),
                PrimName::S => {
                    need_n1(name, n)?;
                    sv_c(pn * (1 - pj), ttilde_c(j, true))
                }
                PrimName::THat => sv_c(-1, ttilde_c(j, true)).add(&ln2(1)),
                PrimName::TT => sv_c(1, ttilde_c(j, true)).add(&ln2(1)),
                PrimName::TCheck => sv_c(-(1 - pj), ttilde_c(j, true)),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Numeric evaluation from the definitions
// ---------------------------------------------------------------------------

/// a_k of the tagged sequence, for any integer k.
fn a_val(tag: SeqTag, k: i64) -> i64 {
    match tag {
        SeqTag::Ones => 1,
        SeqTag::Alt => {
            if k.rem_euclid(2) == 0 {
                1
            } else {
                -1
            }
        }
    }
}

/// Finite partial sums of the E family, exact.
fn e_fin(tag: SeqTag, n: u64, j: u32, shift_fwd: bool, half: bool) -> BigRational {
    let mut acc = BigRational::zero();
    for k in 1..=n {
        // forward: a_{n-k}; backward: a_{k-n-1}
        let idx = if shift_fwd {
            n as i64 - k as i64
        } else {
            k as i64 - n as i64 - 1
        };
        let a = a_val(tag, idx);
        let den: BigRational = if half {
            BigRational::new(BigInt::from(2 * k - 1), BigInt::from(2)).pow(j as i32)
        } else {
            big(k as i64).pow(j as i32)
        };
        acc += big(a) / den;
    }
    acc
}

/// sum_{k>=1} (-1)^k / (k + c)^j, j >= 1; c in (-1, 0].
fn alt_tail(ctx: &PrecisionCtx, j: u32, c: &Real) -> Result<Real> {
    let s = ctx.alt_accel(|m| Ok((ctx.uint(m + 1) + c).powi(-(j as i64))))?;
    Ok(-s)
}

/// sum_{k>=1} a_{k+s}/k^j, with the compensated a_{k+s}-a_k numerator at
/// j = 1.
fn f_plain(ctx: &PrecisionCtx, tag: SeqTag, s: i64, j: u32) -> Result<Real> {
    match tag {
        SeqTag::Ones => {
            if j >= 2 {
                Ok(ctx.hurwitz_zeta(j as i64, &ctx.int(1)))
            } else {
                Ok(ctx.zero())
            }
        }
        SeqTag::Alt => {
            let sgn = a_val(SeqTag::Alt, s);
            let base = alt_tail(ctx, j, &ctx.zero())?;
            if j >= 2 {
                Ok(ctx.int(sgn) * base)
            } else {
                Ok(ctx.int(sgn - 1) * base)
            }
        }
    }
}

/// sum_{k>=1} a_{k+s}/(k-1/2)^j, with the a_{k+s}/(k-1/2) - a_k/k
/// compensation at j = 1.
fn f_half(ctx: &PrecisionCtx, tag: SeqTag, s: i64, j: u32) -> Result<Real> {
    let mhalf = ctx.int(-1) / ctx.int(2);
    match tag {
        SeqTag::Ones => {
            if j >= 2 {
                Ok(ctx.hurwitz_zeta(j as i64, &(ctx.int(1) / ctx.int(2))))
            } else {
                let one = ctx.int(1);
                let half = ctx.int(1) / ctx.int(2);
                Ok(ctx.psi(&one) - ctx.psi(&half))
            }
        }
        SeqTag::Alt => {
            let sgn = ctx.int(a_val(SeqTag::Alt, s));
            let base = alt_tail(ctx, j, &mhalf)?;
            if j >= 2 {
                Ok(sgn * base)
            } else {
                Ok(sgn * base - alt_tail(ctx, 1, &ctx.zero())?)
            }
        }
    }
}

fn num_undefined(name: impl std::fmt::Debug) -> Error {
    Error::UndefinedPrimitive(format!("{name:?} is undefined at n = 0"))
}

/// Direct numeric evaluation of any primitive or intermediate from its
/// defining series.
pub fn seq_prim_numeric(
    name: impl Into<NumName>,
    tag: SeqTag,
    n: u64,
    j: u32,
    ctx: &PrecisionCtx,
) -> Result<Real> {
    let name = name.into();
    if j == 0 {
        return Err(Error::UndefinedPrimitive("order j must be at least 1".into()));
    }
    let pj = if j % 2 == 0 { 1 } else { -1 };
    let rr = |r: BigRational| ctx.rational(&r);
    match name {
        NumName::Def(d) => match d {
            DefName::E => Ok(rr(e_fin(tag, n, j, true, false))),
            DefName::Ebar => Ok(rr(e_fin(tag, n, j, false, false))),
            DefName::Ehat => Ok(rr(e_fin(tag, n, j, true, true))),
            DefName::Etilde => Ok(rr(e_fin(tag, n, j, false, true))),
            DefName::F => f_plain(ctx, tag, n as i64, j),
            DefName::Fbar => f_plain(ctx, tag, -(n as i64), j),
            DefName::Fhat => f_half(ctx, tag, n as i64, j),
            DefName::Ftilde => f_half(ctx, tag, -(n as i64), j),
            DefName::G => {
                if n == 0 {
                    return Ok(ctx.zero());
                }
                let e = e_fin(tag, n, j, true, false);
                let eb = e_fin(tag, n - 1, j, false, false);
                let corr = big(a_val(tag, 0)) / big(n as i64).pow(j as i32);
                Ok(rr(e - eb - corr))
            }
            DefName::L => {
                let f = f_plain(ctx, tag, n as i64, j)?;
                let fb = f_plain(ctx, tag, -(n as i64), j)?;
                Ok(f + ctx.int(pj) * fb)
            }
        },
        NumName::Prim(p) => match p {
            PrimName::D => {
                if j == 1 {
                    return Ok(ctx.zero());
                }
                match tag {
                    SeqTag::Ones => Ok(ctx.hurwitz_zeta(j as i64, &ctx.int(1))),
                    SeqTag::Alt => alt_tail(ctx, j, &ctx.zero()),
                }
            }
            PrimName::M => {
                let e = rr(e_fin(tag, n, j, true, false));
                let f = f_plain(ctx, tag, n as i64, j)?;
                Ok(e + ctx.int(pj) * f)
            }
            PrimName::Mbar => {
                if n == 0 {
                    return Err(num_undefined(p));
                }
                let fb = f_plain(ctx, tag, -(n as i64), j)?;
                Ok(fb - rr(e_fin(tag, n - 1, j, false, false)))
            }
            PrimName::N => {
                if n == 0 {
                    return Err(num_undefined(p));
                }
                let eh = rr(e_fin(tag, n, j, true, true));
                let fh = f_half(ctx, tag, n as i64 - 1, j)?;
                Ok(eh + ctx.int(pj) * fh)
            }
            PrimName::Nbar => {
                if n == 0 {
                    return Err(num_undefined(p));
                }
                let ft = f_half(ctx, tag, -(n as i64), j)?;
                Ok(ft - rr(e_fin(tag, n - 1, j, false, true)))
            }
            PrimName::R => {
                let g = seq_prim_numeric(DefName::G, tag, n, j, ctx)?;
                let l = seq_prim_numeric(DefName::L, tag, n, j, ctx)?;
                Ok(g + ctx.int(pj) * l)
            }
            PrimName::S => {
                if n == 0 {
                    return Err(num_undefined(p));
                }
                let nn = seq_prim_numeric(PrimName::N, tag, n, j, ctx)?;
                let nb = seq_prim_numeric(PrimName::Nbar, tag, n, j, ctx)?;
                let half_den =
                    BigRational::new(BigInt::from(2 * n - 1), BigInt::from(2)).pow(j as i32);
                let corr = big(a_val(tag, 0)) / half_den;
                Ok(nn + nb - rr(corr))
            }
            PrimName::THat => f_half(ctx, tag, -1, j),
            PrimName::TT => f_half(ctx, tag, 0, j),
            PrimName::TCheck => {
                let th = f_half(ctx, tag, -1, j)?;
                let tt = f_half(ctx, tag, 0, j)?;
                Ok(ctx.int(-pj) * th - tt)
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seriesnum::sv_numeric;
    use crate::symval::sv_normalize;

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(HarmonicKind::SmallH, 1, 0), BigRational::zero());
        assert_eq!(harmonic(HarmonicKind::SmallH, 1, 2), BigRational::new(8.into(), 3.into()));
        assert_eq!(
            harmonic(HarmonicKind::SmallHbar, 1, 2),
            BigRational::new(4.into(), 3.into())
        );
        assert_eq!(harmonic(HarmonicKind::H, 1, 3), BigRational::new(11.into(), 6.into()));
        assert_eq!(harmonic(HarmonicKind::Hbar, 1, 2), BigRational::new(1.into(), 2.into()));
        // recurrence h_n - h_{n-1} = (n - 1/2)^(-r)
        for n in 1..=6u64 {
            for r in 1..=3u32 {
                let d = harmonic(HarmonicKind::SmallH, r, n)
                    - harmonic(HarmonicKind::SmallH, r, n - 1);
                let w = BigRational::new(BigInt::from(2).pow(r), BigInt::from(2 * n - 1).pow(r));
                assert_eq!(d, w);
                // O-normalization
                let o = harmonic(HarmonicKind::O, r, n);
                let h = harmonic(HarmonicKind::SmallH, r, n);
                assert_eq!(
                    o * BigRational::from_integer(BigInt::from(2).pow(r)),
                    h
                );
            }
        }
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta_sigma(Sign::Plus, 2), 0);
        assert_eq!(delta_sigma(Sign::Plus, 3), 2);
        assert_eq!(delta_sigma(Sign::Minus, 2), 2);
        assert_eq!(delta_sigma(Sign::Minus, -1), 0);
    }

    #[test]
    fn closed_form_examples() {
        // S vanishes at odd j for the constant sequence
        let s = seq_prim_closed(PrimName::S, SeqTag::Ones, 5, 3).unwrap();
        assert!(s.is_zero());
        // N at (Ones, n=2, j=2) keeps the t-tilde symbol
        let n = seq_prim_closed(PrimName::N, SeqTag::Ones, 2, 2).unwrap();
        let want = sv_rat(BigRational::new(40.into(), 9.into()))
            .add(&sv_c(1, ttilde_c(2, false)));
        assert_eq!(n, want);
        // R at (Alt, n=3, j=2) = -2 zeta(2bar)
        let r = seq_prim_closed(PrimName::R, SeqTag::Alt, 3, 2).unwrap();
        assert_eq!(r, sv_c(-2, zeta_c(2, true)));
        assert!(matches!(
            seq_prim_closed(PrimName::Mbar, SeqTag::Ones, 0, 2),
            Err(Error::UndefinedPrimitive(_))
        ));
    }

    #[test]
    fn numeric_examples() {
        let ctx = PrecisionCtx::new(25).unwrap();
        let e = seq_prim_numeric(DefName::E, SeqTag::Ones, 0, 1, &ctx).unwrap();
        assert!(e.is_zero());
        let d = seq_prim_numeric(PrimName::D, SeqTag::Ones, 0, 2, &ctx).unwrap();
        let z2 = ctx.pi().powi(2) / ctx.int(6);
        assert!(ctx.agreed_digits(&d, &z2) >= 24);
        let f = seq_prim_numeric(DefName::F, SeqTag::Ones, 2, 1, &ctx).unwrap();
        assert!(f.is_zero());
        // D(1) = 0 for both sequences by convention
        for tag in [SeqTag::Ones, SeqTag::Alt] {
            let d1 = seq_prim_numeric(PrimName::D, tag, 0, 1, &ctx).unwrap();
            assert!(d1.is_zero());
        }
    }

    #[test]
    fn closed_matches_definition() {
        let ctx = PrecisionCtx::new(30).unwrap();
        let names = [
            PrimName::D,
            PrimName::M,
            PrimName::Mbar,
            PrimName::N,
            PrimName::Nbar,
            PrimName::R,
            PrimName::S,
            PrimName::THat,
            PrimName::TT,
            PrimName::TCheck,
        ];
        let tol = ctx.pow10(10 - ctx.digits() as i64);
        for tag in [SeqTag::Ones, SeqTag::Alt] {
            for &name in &names {
                for n in 1..=4u64 {
                    for j in 1..=3u32 {
                        let closed = seq_prim_closed(name, tag, n, j).unwrap();
                        let sym = sv_numeric(&ctx, &sv_normalize(&closed).unwrap()).unwrap();
                        let num = seq_prim_numeric(name, tag, n, j, &ctx).unwrap();
                        let diff = (sym - num).abs();
                        assert!(
                            diff < tol,
                            "{tag:?} {name:?} n={n} j={j}: |closed - def| = {diff}"
                        );
                    }
                }
            }
        }
    }
}
