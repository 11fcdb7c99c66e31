//! Cross-verification layer.
//!
//! Three services on top of the engines and the summation oracle:
//! dual-route evaluation of a single spec ([`verify_spec`]), finite-stage
//! numeric checks of the general symmetric identities with free parameters
//! ([`verify_general_identity`]), and batch regression over the golden
//! tables and transformation grids ([`run_regression`]).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::identities::{
    reduce_spec, transform, transform_lhs, KnownValuesTable, TransformId, TransformLhs,
};
use crate::numkernel::{binom, PrecisionCtx, Real};
use crate::seqcore::SeqTag;
use crate::seriesnum::{
    mzv_numeric, product_series_numeric, sum_spec_numeric, sv_numeric, PartialFactor, Sign,
    SumSpec,
};
use crate::symval::{sv_normalize, SymbolicValue};

/// Digits of slack below the working precision still accepted as a match:
/// weight-9 closed forms carry coefficients near 2^14, which costs a few
/// digits of cancellation against the direct sum.
pub const MATCH_SLACK_DIGITS: usize = 10;

/// Agreement bar for the numeric leg of every golden-table and transform
/// check, independent of the working precision.
pub const REGRESSION_NUMERIC_DIGITS: usize = 25;

// ---------------------------------------------------------------------------
// single-spec reports
// ---------------------------------------------------------------------------

/// Outcome of comparing a closed form against direct summation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyStatus {
    /// Fully reduced and numerically confirmed.
    Match,
    /// A closed form was produced but disagrees with the direct sum.
    Mismatch,
    /// No constructive reduction applies; only the direct sum is reported.
    NotReducible,
    /// Reduced up to formal constants; confirmed numerically.
    FormalResidue,
}

impl VerifyStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerifyStatus::Match => "match",
            VerifyStatus::Mismatch => "mismatch",
            VerifyStatus::NotReducible => "not-reducible",
            VerifyStatus::FormalResidue => "formal-residue",
        }
    }
}

impl fmt::Display for VerifyStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dual-route evaluation of one sum spec.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub spec: SumSpec,
    /// Closed form, when an engine applies.
    pub symbolic: Option<SymbolicValue>,
    /// Which engine produced the closed form.
    pub provenance: Option<String>,
    /// Direct summation of the defining series.
    pub numeric_series: Real,
    /// The closed form evaluated numerically.
    pub numeric_symbolic: Option<Real>,
    /// Leading decimal digits on which the two routes agree.
    pub matched_digits: usize,
    pub status: VerifyStatus,
}

/// Evaluate `spec` by direct summation and, when an engine applies, by
/// closed form, and compare the two routes. Engines that do not cover the
/// spec yield status `NotReducible` with the direct sum still reported;
/// divergent specs propagate as errors.
pub fn verify_spec(
    ctx: &PrecisionCtx,
    spec: &SumSpec,
    table: &KnownValuesTable,
) -> Result<EvalReport> {
    let numeric_series = sum_spec_numeric(ctx, spec)?;
    match reduce_spec(spec, table) {
        Ok(red) => {
            let numeric_symbolic = sv_numeric(ctx, &red.value)?;
            let matched_digits = ctx.agreed_digits(&numeric_series, &numeric_symbolic);
            let status = if matched_digits + MATCH_SLACK_DIGITS < ctx.digits() {
                VerifyStatus::Mismatch
            } else if red.is_fully_reduced() {
                VerifyStatus::Match
            } else {
                VerifyStatus::FormalResidue
            };
            Ok(EvalReport {
                spec: spec.clone(),
                symbolic: Some(red.value),
                provenance: Some(red.provenance),
                numeric_series,
                numeric_symbolic: Some(numeric_symbolic),
                matched_digits,
                status,
            })
        }
        Err(Error::NotReducibleByParity(_)) | Err(Error::UnsupportedDegree(_)) => Ok(EvalReport {
            spec: spec.clone(),
            symbolic: None,
            provenance: None,
            numeric_series,
            numeric_symbolic: None,
            matched_digits: 0,
            status: VerifyStatus::NotReducible,
        }),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// golden tables
// ---------------------------------------------------------------------------

/// One externally sourced evaluation: a spec, its expected closed form in
/// the canonical basis, and a citation for where the value is stated.
#[derive(Debug, Clone)]
pub struct GoldenEntry {
    pub spec: SumSpec,
    pub expected: SymbolicValue,
    pub location: String,
}

#[derive(Deserialize)]
struct RawGolden {
    spec: String,
    expected: SymbolicValue,
    location: String,
}

/// Load a golden table. Every expected value must already be in the
/// canonical basis (normalization is the identity on it and it contains no
/// formal constants); specs must be unique.
pub fn load_golden(path: &Path) -> Result<Vec<GoldenEntry>> {
    if !path.exists() {
        return Err(Error::MissingGoldenData(format!(
            "no golden table at {}",
            path.display()
        )));
    }
    let text = fs::read_to_string(path)?;
    let raw: Vec<RawGolden> = serde_json::from_str(&text)
        .map_err(|e| Error::Data(format!("golden table {}: {e}", path.display())))?;
    let mut out: Vec<GoldenEntry> = Vec::with_capacity(raw.len());
    for r in raw {
        let spec = SumSpec::parse(&r.spec)?;
        if out.iter().any(|e| e.spec == spec) {
            return Err(Error::Data(format!("duplicate golden entry for {spec}")));
        }
        if sv_normalize(&r.expected)? != r.expected || !r.expected.formal_constants().is_empty()
        {
            return Err(Error::Data(format!(
                "golden value for {spec} is not in the canonical basis"
            )));
        }
        out.push(GoldenEntry { spec, expected: r.expected, location: r.location });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// general identities at free parameters
// ---------------------------------------------------------------------------

/// Names one of the four general symmetric-sum identities. The spellings
/// accepted by [`GeneralIdentity::parse`] match the `--theorem` values of
/// the command-line interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneralIdentity {
    /// Linear identity with half-integer outer denominators.
    Thm31,
    /// Linear identity with integer outer denominators.
    Thm34,
    /// Quadratic identity with half-integer outer denominators.
    Thm41,
    /// Quadratic identity with integer outer denominators.
    Thm44,
}

impl GeneralIdentity {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneralIdentity::Thm31 => "Thm3.1",
            GeneralIdentity::Thm34 => "Thm3.4",
            GeneralIdentity::Thm41 => "Thm4.1",
            GeneralIdentity::Thm44 => "Thm4.4",
        }
    }

    pub fn parse(s: &str) -> Result<GeneralIdentity> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.strip_prefix("thm").unwrap_or(&t).trim_start();
        match t {
            "3.1" => Ok(GeneralIdentity::Thm31),
            "3.4" => Ok(GeneralIdentity::Thm34),
            "4.1" => Ok(GeneralIdentity::Thm41),
            "4.4" => Ok(GeneralIdentity::Thm44),
            _ => Err(Error::Semantic(format!(
                "unknown identity {s:?}; expected Thm3.1, Thm3.4, Thm4.1 or Thm4.4"
            ))),
        }
    }

    /// Number of order parameters, which equals the number of sequence tags.
    pub fn arity(self) -> usize {
        match self {
            GeneralIdentity::Thm31 | GeneralIdentity::Thm34 => 2,
            GeneralIdentity::Thm41 | GeneralIdentity::Thm44 => 3,
        }
    }
}

impl fmt::Display for GeneralIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Residual bound the finite-stage checks are expected to meet at the
/// current precision.
pub fn identity_tolerance(ctx: &PrecisionCtx) -> Real {
    ctx.pow10(10 - ctx.digits() as i64)
}

/// Assemble both sides of the named identity at the given orders and
/// weight sequences, entirely numerically, and return the signed residual.
/// Orders must be positive with the outer order at least 2.
pub fn verify_general_identity(
    ctx: &PrecisionCtx,
    which: GeneralIdentity,
    params: &[u32],
    tags: &[SeqTag],
) -> Result<Real> {
    let n = which.arity();
    if params.len() != n || tags.len() != n {
        return Err(Error::Semantic(format!(
            "{which} takes {n} orders and {n} sequence tags"
        )));
    }
    if params.iter().any(|&p| p == 0) {
        return Err(Error::DomainViolation("orders must be at least 1".into()));
    }
    if params[n - 1] < 2 {
        return Err(Error::DomainViolation(
            "the outer order must be at least 2".into(),
        ));
    }
    let p = params[..n - 1].iter().map(|&v| v as i64).collect::<Vec<_>>();
    let q = params[n - 1] as i64;
    match which {
        GeneralIdentity::Thm31 => thm31_residual(ctx, p[0], q, tags[0], tags[1]),
        GeneralIdentity::Thm34 => thm34_residual(ctx, p[0], q, tags[0], tags[1]),
        GeneralIdentity::Thm41 => thm41_residual(ctx, p[0], p[1], q, tags[0], tags[1], tags[2]),
        GeneralIdentity::Thm44 => thm44_residual(ctx, p[0], p[1], q, tags[0], tags[1], tags[2]),
    }
}

/// One additive component of a weighted partial-sum factor: the factor
/// value at outer index n is the sum over components of
/// scalar * i^(phase n) * P(n), with P an optional partial-sum block.
#[derive(Clone)]
struct Comp {
    phase: u8,
    scalar: Real,
    factor: Option<PartialFactor>,
}

fn comp(phase: u8, scalar: Real, factor: Option<PartialFactor>) -> Comp {
    Comp { phase, scalar, factor }
}

fn pf(half: bool, s: i64, phase: u8, shift: u64) -> Option<PartialFactor> {
    Some(PartialFactor { half, s, phase, shift })
}

/// (-1)^k * v.
fn signed(v: Real, k: i64) -> Real {
    if k.rem_euclid(2) == 0 {
        v
    } else {
        -v
    }
}

fn sgn(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn rbinom(ctx: &PrecisionCtx, n: i64, r: i64) -> Real {
    ctx.rational(&binom(n, r))
}

/// zeta(j) with zeta(0) = -1/2, zeta(1) = 0; alternating branch with
/// value -ln2 at j = 1.
fn uzeta(ctx: &PrecisionCtx, j: i64, alt: bool) -> Real {
    assert!(j >= 0);
    if j == 0 {
        return ctx.int(-1) / ctx.int(2);
    }
    if !alt {
        if j == 1 {
            ctx.zero()
        } else {
            ctx.zeta_int(j)
        }
    } else if j == 1 {
        -ctx.ln2()
    } else {
        (ctx.int(2).powi(1 - j) - ctx.int(1)) * ctx.zeta_int(j)
    }
}

/// (2^j - 1) zeta(j) with value 2 ln2 at j = 1; alternating branch
/// -2^j beta(j).
fn uttilde(ctx: &PrecisionCtx, j: i64, alt: bool) -> Real {
    assert!(j >= 1);
    if !alt {
        if j == 1 {
            ctx.int(2) * ctx.ln2()
        } else {
            (ctx.int(2).powi(j) - ctx.int(1)) * ctx.zeta_int(j)
        }
    } else {
        -(ctx.int(2).powi(j) * ctx.beta_int(j))
    }
}

/// Weighted half-integer partial sum over k <= n, as components.
fn f_n(ctx: &PrecisionCtx, tag: SeqTag, j: i64) -> Vec<Comp> {
    match tag {
        SeqTag::Ones => vec![
            comp(0, ctx.int(1), pf(true, j, 0, 1)),
            comp(0, signed(uttilde(ctx, j, false), j), None),
        ],
        SeqTag::Alt => {
            let mut out = vec![
                comp(2, ctx.int(1), pf(true, j, 2, 1)),
                comp(2, signed(uttilde(ctx, j, true), j - 1), None),
            ];
            if j == 1 {
                out.push(comp(0, -ctx.ln2(), None));
            }
            out
        }
    }
}

/// Weighted half-integer tail over k > n, as components.
fn f_nbar(ctx: &PrecisionCtx, tag: SeqTag, j: i64) -> Vec<Comp> {
    match tag {
        SeqTag::Ones => vec![
            comp(0, uttilde(ctx, j, false), None),
            comp(0, ctx.int(-1), pf(true, j, 0, 0)),
        ],
        SeqTag::Alt => {
            let mut out = vec![
                comp(2, ctx.int(-1), pf(true, j, 2, 0)),
                comp(2, uttilde(ctx, j, true), None),
            ];
            if j == 1 {
                out.push(comp(0, ctx.ln2(), None));
            }
            out
        }
    }
}

/// Weighted integer partial sum over k <= n, as components.
fn f_m(ctx: &PrecisionCtx, tag: SeqTag, j: i64) -> Vec<Comp> {
    match tag {
        SeqTag::Ones => vec![
            comp(0, ctx.int(1), pf(false, j, 0, 1)),
            comp(0, signed(uzeta(ctx, j, false), j), None),
        ],
        SeqTag::Alt => {
            let mut out = vec![
                comp(2, ctx.int(1), pf(false, j, 2, 1)),
                comp(2, signed(uzeta(ctx, j, true), j), None),
            ];
            if j == 1 {
                out.push(comp(0, -ctx.ln2(), None));
            }
            out
        }
    }
}

/// Symmetrized constant block, as components.
fn f_s(ctx: &PrecisionCtx, tag: SeqTag, j: i64) -> Vec<Comp> {
    match tag {
        SeqTag::Ones => {
            let v = if j % 2 == 0 {
                ctx.int(2) * uttilde(ctx, j, false)
            } else {
                ctx.zero()
            };
            vec![comp(0, v, None)]
        }
        SeqTag::Alt => {
            let v = if j % 2 == 1 {
                ctx.int(2) * uttilde(ctx, j, true)
            } else {
                ctx.zero()
            };
            vec![comp(2, v, None)]
        }
    }
}

/// The outer weight a_(n+off) as (phase, scalar).
fn f_outer(ctx: &PrecisionCtx, tag: SeqTag, off: i64) -> (u8, Real) {
    match tag {
        SeqTag::Ones => (0, ctx.int(1)),
        SeqTag::Alt => (2, ctx.int(sgn(off))),
    }
}

/// Limit constant of the integer partial-sum block.
fn const_d(ctx: &PrecisionCtx, tag: SeqTag, j: i64) -> Real {
    match tag {
        SeqTag::Ones => {
            if j == 1 {
                ctx.zero()
            } else {
                uzeta(ctx, j, false)
            }
        }
        SeqTag::Alt => {
            let v = uzeta(ctx, j, true);
            if j == 1 {
                v + ctx.ln2()
            } else {
                v
            }
        }
    }
}

/// Limit constant of the shifted half-integer block.
fn const_t_hat(ctx: &PrecisionCtx, tag: SeqTag, j: i64) -> Real {
    match tag {
        SeqTag::Ones => uttilde(ctx, j, false),
        SeqTag::Alt => {
            let v = -uttilde(ctx, j, true);
            if j == 1 {
                v + ctx.ln2()
            } else {
                v
            }
        }
    }
}

/// Limit constant of the unshifted half-integer block.
fn const_t_up(ctx: &PrecisionCtx, tag: SeqTag, j: i64) -> Real {
    match tag {
        SeqTag::Ones => uttilde(ctx, j, false),
        SeqTag::Alt => {
            let v = uttilde(ctx, j, true);
            if j == 1 {
                v + ctx.ln2()
            } else {
                v
            }
        }
    }
}

/// Limit constant of the symmetrized block, negated.
fn const_t_check(ctx: &PrecisionCtx, tag: SeqTag, j: i64) -> Real {
    match tag {
        SeqTag::Ones => {
            if j % 2 == 0 {
                ctx.int(-2) * uttilde(ctx, j, false)
            } else {
                ctx.zero()
            }
        }
        SeqTag::Alt => {
            if j % 2 == 1 {
                ctx.int(-2) * uttilde(ctx, j, true)
            } else {
                ctx.zero()
            }
        }
    }
}

/// Re-index components from n to n + off: i^(phase off) folds into the
/// scalar (phases are even, so it is real) and partial-sum bounds shift.
fn shift_comps(comps: &[Comp], off: i64) -> Vec<Comp> {
    comps
        .iter()
        .map(|c| {
            assert!(c.phase % 2 == 0);
            let scalar = signed(c.scalar.clone(), (c.phase as i64 / 2) * off);
            let factor = c.factor.clone().map(|mut f| {
                let ns = f.shift as i64 + off;
                assert!(ns >= 0, "partial-sum bound went negative");
                f.shift = ns as u64;
                f
            });
            comp(c.phase, scalar, factor)
        })
        .collect()
}

/// Memoized product series: factor order is canonicalized so permuted
/// combos share one evaluation.
fn memo_product(
    ctx: &PrecisionCtx,
    c0: u8,
    den_half: bool,
    q: i64,
    pfs: &mut Vec<PartialFactor>,
) -> Result<Real> {
    pfs.sort_by_key(|f| (f.half, f.s, f.phase, f.shift));
    let mut key = format!("pser:{c0}:{}:{q}", den_half as u8);
    for f in pfs.iter() {
        key.push_str(&format!(";{},{},{},{}", f.half as u8, f.s, f.phase, f.shift));
    }
    ctx.memo_try(&key, || product_series_numeric(ctx, c0, den_half, q, pfs))
}

/// sum_n a_n * prod(factors) / (n + b0)^q over the component expansion of
/// each factor list; b0 = -1/2 when `den_half`.
fn fm_series(
    ctx: &PrecisionCtx,
    outer: (u8, Real),
    den_half: bool,
    q: i64,
    lists: &[Vec<Comp>],
) -> Result<Real> {
    let mut total = ctx.zero();
    let mut idx = vec![0usize; lists.len()];
    loop {
        let mut c = outer.0 % 4;
        let mut scal = outer.1.clone();
        let mut pfs: Vec<PartialFactor> = Vec::new();
        for (list, &ci) in lists.iter().zip(idx.iter()) {
            let cp = &list[ci];
            c = (c + cp.phase) % 4;
            scal = scal * &cp.scalar;
            if let Some(f) = &cp.factor {
                pfs.push(f.clone());
            }
        }
        if !scal.is_zero() {
            total = total + scal * memo_product(ctx, c, den_half, q, &mut pfs)?;
        }
        let mut i = 0;
        loop {
            if i == lists.len() {
                return Ok(total);
            }
            idx[i] += 1;
            if idx[i] < lists[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn thm31_residual(ctx: &PrecisionCtx, p: i64, q: i64, ta: SeqTag, tb: SeqTag) -> Result<Real> {
    let s1 = fm_series(ctx, f_outer(ctx, ta, -1), true, q, &[f_nbar(ctx, tb, p)])?;
    let s2 = fm_series(ctx, f_outer(ctx, ta, 0), true, q, &[f_n(ctx, tb, p)])?;
    let mut s3 = ctx.zero();
    for k in 0..p {
        let fs = shift_comps(&f_s(ctx, ta, k + 1), 1);
        s3 = s3
            + rbinom(ctx, p + q - k - 2, q - 1)
                * fm_series(ctx, f_outer(ctx, tb, 0), false, p + q - k - 1, &[fs])?;
    }
    let mut rhs = ctx.zero();
    for k in 1..=q {
        rhs = rhs
            - rbinom(ctx, p + k - 2, p - 1)
                * const_d(ctx, tb, p + k - 1)
                * const_t_check(ctx, ta, q - k + 1);
    }
    rhs = rhs
        + signed(const_t_hat(ctx, ta, p + q), q)
        + signed(const_t_up(ctx, ta, p + q), p);
    Ok(signed(s1, q) + signed(s2, p) - s3 - rhs)
}

fn thm34_residual(ctx: &PrecisionCtx, p: i64, q: i64, ta: SeqTag, tb: SeqTag) -> Result<Real> {
    let nb = shift_comps(&f_nbar(ctx, tb, p), 1);
    let s1 = fm_series(ctx, f_outer(ctx, ta, 0), false, q, &[nb])?;
    let s2 = fm_series(ctx, f_outer(ctx, ta, 0), false, q, &[f_n(ctx, tb, p)])?;
    let mut s3 = ctx.zero();
    for k in 0..p {
        s3 = s3
            + rbinom(ctx, p + q - k - 2, q - 1)
                * fm_series(
                    ctx,
                    f_outer(ctx, tb, -1),
                    true,
                    p + q - k - 1,
                    &[f_s(ctx, ta, k + 1)],
                )?;
    }
    let mut rhs = -(rbinom(ctx, p + q - 1, p - 1) * const_t_hat(ctx, tb, p + q));
    for j in 1..=q / 2 {
        rhs = rhs
            + ctx.int(2)
                * rbinom(ctx, p + q - 2 * j - 1, p - 1)
                * const_d(ctx, ta, 2 * j)
                * const_t_hat(ctx, tb, p + q - 2 * j);
    }
    Ok(signed(s1, q) + signed(s2, p) - s3 - rhs)
}

#[allow(clippy::too_many_arguments)]
fn thm41_residual(
    ctx: &PrecisionCtx,
    m: i64,
    p: i64,
    q: i64,
    ta: SeqTag,
    tb: SeqTag,
    tc: SeqTag,
) -> Result<Real> {
    let s1 = fm_series(
        ctx,
        f_outer(ctx, ta, -1),
        true,
        q,
        &[f_nbar(ctx, tb, m), f_nbar(ctx, tc, p)],
    )?;
    let s2 = fm_series(
        ctx,
        f_outer(ctx, ta, 0),
        true,
        q,
        &[f_n(ctx, tb, m), f_n(ctx, tc, p)],
    )?;
    let (ob, oc) = (f_outer(ctx, tb, 0), f_outer(ctx, tc, 0));
    let obc = ((ob.0 + oc.0) % 4, ob.1 * oc.1);
    let mut s3 = ctx.zero();
    for k in 0..m + p {
        let fs = shift_comps(&f_s(ctx, ta, k + 1), 1);
        s3 = s3
            + rbinom(ctx, m + p + q - k - 2, q - 1)
                * fm_series(ctx, obc.clone(), false, m + p + q - k - 1, &[fs])?;
    }
    let mut s4 = ctx.zero();
    for j in 1..=m {
        for k in 0..=m - j {
            let fs = shift_comps(&f_s(ctx, ta, k + 1), 1);
            s4 = s4
                + rbinom(ctx, p + j - 2, p - 1)
                    * rbinom(ctx, m + q - j - k - 1, q - 1)
                    * fm_series(
                        ctx,
                        f_outer(ctx, tb, 0),
                        false,
                        m + q - j - k,
                        &[f_m(ctx, tc, p + j - 1), fs],
                    )?;
        }
    }
    let mut s5 = ctx.zero();
    for j in 1..=p {
        for k in 0..=p - j {
            let fs = shift_comps(&f_s(ctx, ta, k + 1), 1);
            s5 = s5
                + rbinom(ctx, m + j - 2, m - 1)
                    * rbinom(ctx, p + q - j - k - 1, q - 1)
                    * fm_series(
                        ctx,
                        f_outer(ctx, tc, 0),
                        false,
                        p + q - j - k,
                        &[f_m(ctx, tb, m + j - 1), fs],
                    )?;
        }
    }
    let mut g0 = -(signed(const_t_hat(ctx, ta, m + p + q), m + p + q)
        + const_t_up(ctx, ta, m + p + q));
    for j in 1..=m + q {
        g0 = g0
            + signed(
                rbinom(ctx, p + j - 2, p - 1)
                    * const_d(ctx, tc, p + j - 1)
                    * const_t_check(ctx, ta, m + q - j + 1),
                p,
            );
    }
    for j in 1..=p + q {
        g0 = g0
            + signed(
                rbinom(ctx, m + j - 2, m - 1)
                    * const_d(ctx, tb, m + j - 1)
                    * const_t_check(ctx, ta, p + q - j + 1),
                m,
            );
    }
    let mut acc = ctx.zero();
    for j1 in 1..=q {
        for j2 in 1..=q + 1 - j1 {
            let j3 = q + 2 - j1 - j2;
            acc = acc
                + rbinom(ctx, m + j1 - 2, m - 1)
                    * rbinom(ctx, p + j2 - 2, p - 1)
                    * const_d(ctx, tb, m + j1 - 1)
                    * const_d(ctx, tc, p + j2 - 1)
                    * const_t_check(ctx, ta, j3);
        }
    }
    g0 = g0 + signed(acc, m + p);
    let lhs = signed(s1, m + p + q) + s2 - signed(s3, m + p) - signed(s4, m) - signed(s5, p);
    Ok(lhs + g0)
}

#[allow(clippy::too_many_arguments)]
fn thm44_residual(
    ctx: &PrecisionCtx,
    m: i64,
    p: i64,
    q: i64,
    ta: SeqTag,
    tb: SeqTag,
    tc: SeqTag,
) -> Result<Real> {
    let nbm = shift_comps(&f_nbar(ctx, tb, m), 1);
    let nbp = shift_comps(&f_nbar(ctx, tc, p), 1);
    let s1 = fm_series(ctx, f_outer(ctx, ta, 0), false, q, &[nbm, nbp])?;
    let s2 = fm_series(
        ctx,
        f_outer(ctx, ta, 0),
        false,
        q,
        &[f_n(ctx, tb, m), f_n(ctx, tc, p)],
    )?;
    let (ob, oc) = (f_outer(ctx, tb, -1), f_outer(ctx, tc, -1));
    let obc = ((ob.0 + oc.0) % 4, ob.1 * oc.1);
    let mut s3 = ctx.zero();
    for k in 0..m + p {
        s3 = s3
            + rbinom(ctx, m + p + q - k - 2, q - 1)
                * fm_series(
                    ctx,
                    obc.clone(),
                    true,
                    m + p + q - k - 1,
                    &[f_s(ctx, ta, k + 1)],
                )?;
    }
    let mut s4 = ctx.zero();
    for j in 1..=m {
        for k in 0..=m - j {
            let fm = shift_comps(&f_m(ctx, tc, p + j - 1), -1);
            s4 = s4
                + rbinom(ctx, p + j - 2, p - 1)
                    * rbinom(ctx, m + q - j - k - 1, q - 1)
                    * fm_series(
                        ctx,
                        f_outer(ctx, tb, -1),
                        true,
                        m + q - j - k,
                        &[fm, f_s(ctx, ta, k + 1)],
                    )?;
        }
    }
    let mut s5 = ctx.zero();
    for j in 1..=p {
        for k in 0..=p - j {
            let fm = shift_comps(&f_m(ctx, tb, m + j - 1), -1);
            s5 = s5
                + rbinom(ctx, m + j - 2, m - 1)
                    * rbinom(ctx, p + q - j - k - 1, q - 1)
                    * fm_series(
                        ctx,
                        f_outer(ctx, tc, -1),
                        true,
                        p + q - j - k,
                        &[fm, f_s(ctx, ta, k + 1)],
                    )?;
        }
    }
    let mut h0 = ctx.zero();
    for k1 in 0..=q {
        let k2 = q - k1;
        h0 = h0
            + rbinom(ctx, m + k1 - 1, m - 1)
                * rbinom(ctx, p + k2 - 1, p - 1)
                * const_t_hat(ctx, tb, m + k1)
                * const_t_hat(ctx, tc, p + k2);
    }
    h0 = signed(h0, m + p);
    let mut acc = ctx.zero();
    for j in 1..=q / 2 {
        for k1 in 0..=q - 2 * j {
            let k2 = q - 2 * j - k1;
            acc = acc
                + rbinom(ctx, m + k1 - 1, m - 1)
                    * rbinom(ctx, p + k2 - 1, p - 1)
                    * const_d(ctx, ta, 2 * j)
                    * const_t_hat(ctx, tb, m + k1)
                    * const_t_hat(ctx, tc, p + k2);
        }
    }
    h0 = h0 - ctx.int(2) * signed(acc, m + p);
    let lhs = signed(s1, m + p + q) + s2 - signed(s3, m + p) - signed(s4, m) - signed(s5, p);
    Ok(lhs + h0)
}

// ---------------------------------------------------------------------------
// regression suites
// ---------------------------------------------------------------------------

/// The batch suites runnable through [`run_regression`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Appendix tables: engine output must match coefficient-exactly.
    Appendix,
    /// Linear in-text evaluations, including parity-irreducible ones.
    IntextLinear,
    /// Quadratic and cubic in-text evaluations.
    IntextQuadratic,
    /// Transformation formulas over parameter grids, numeric only.
    Transforms,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Appendix => "appendix",
            Suite::IntextLinear => "intext-linear",
            Suite::IntextQuadratic => "intext-quadratic",
            Suite::Transforms => "transforms",
        }
    }

    pub fn parse(s: &str) -> Result<Suite> {
        match s.trim() {
            "appendix" => Ok(Suite::Appendix),
            "intext-linear" => Ok(Suite::IntextLinear),
            "intext-quadratic" => Ok(Suite::IntextQuadratic),
            "transforms" => Ok(Suite::Transforms),
            _ => Err(Error::Semantic(format!(
                "unknown suite {s:?}; expected appendix, intext-linear, \
                 intext-quadratic or transforms"
            ))),
        }
    }

    /// Golden-table file for the suite, if it is file-backed.
    pub fn golden_file(self) -> Option<&'static str> {
        match self {
            Suite::Appendix => Some("golden_appendix.json"),
            Suite::IntextLinear => Some("golden_intext_linear.json"),
            Suite::IntextQuadratic => Some("golden_intext_quadratic.json"),
            Suite::Transforms => None,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Path of the golden table for a file-backed suite.
pub fn golden_path(dir: &Path, suite: Suite) -> Option<PathBuf> {
    suite.golden_file().map(|f| dir.join(f))
}

/// One regression check with a stable label.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub label: String,
    pub ok: bool,
    pub detail: String,
}

/// Results of one suite, in entry order.
#[derive(Debug, Clone)]
pub struct RegressionSummary {
    pub suite: Suite,
    pub outcomes: Vec<CheckOutcome>,
}

impl RegressionSummary {
    pub fn total(&self) -> usize {
        self.outcomes.len()
    }

    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.ok).count()
    }

    pub fn failed(&self) -> usize {
        self.total() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| !o.ok)
    }

    /// "56/56 pass" style line.
    pub fn headline(&self) -> String {
        format!("{}/{} pass", self.passed(), self.total())
    }
}

/// Run one suite. File-backed suites read their golden table from
/// `golden_dir`; the transforms suite is generated from parameter grids.
pub fn run_regression(
    ctx: &PrecisionCtx,
    suite: Suite,
    table: &KnownValuesTable,
    golden_dir: &Path,
) -> Result<RegressionSummary> {
    let outcomes = match suite {
        Suite::Transforms => transform_checks(ctx)?,
        _ => {
            let path = golden_path(golden_dir, suite).unwrap();
            let entries = load_golden(&path)?;
            entries
                .iter()
                .map(|e| golden_check(ctx, suite, table, e))
                .collect()
        }
    };
    Ok(RegressionSummary { suite, outcomes })
}

/// Numeric leg shared by every golden check: both routes must agree on at
/// least [`REGRESSION_NUMERIC_DIGITS`] digits.
fn numeric_leg(
    ctx: &PrecisionCtx,
    spec: &SumSpec,
    expected: &SymbolicValue,
) -> Result<(usize, bool)> {
    let direct = sum_spec_numeric(ctx, spec)?;
    let closed = sv_numeric(ctx, expected)?;
    let agreed = ctx.agreed_digits(&direct, &closed);
    Ok((agreed, agreed >= REGRESSION_NUMERIC_DIGITS))
}

fn golden_check(
    ctx: &PrecisionCtx,
    suite: Suite,
    table: &KnownValuesTable,
    entry: &GoldenEntry,
) -> CheckOutcome {
    let label = format!("{} ({})", entry.spec, entry.location);
    let fail = |detail: String| CheckOutcome { label: label.clone(), ok: false, detail };

    // Closed-form leg: what it must deliver depends on the suite.
    let reduced = reduce_spec(&entry.spec, table);
    let symbolic_note = match (suite, &reduced) {
        (Suite::Appendix, Ok(red)) if !red.is_fully_reduced() => {
            return fail(format!(
                "engine left formal constants: {}",
                red.value
            ));
        }
        (Suite::Appendix, Err(e)) => {
            return fail(format!("engine failed: {e}"));
        }
        (_, Ok(red)) if red.is_fully_reduced() => {
            if !red.value.sub(&entry.expected).is_zero() {
                return fail(format!(
                    "symbolic mismatch via {}: engine {} vs expected {}",
                    red.provenance, red.value, entry.expected
                ));
            }
            format!("exact via {}", red.provenance)
        }
        (_, Ok(red)) => format!(
            "numeric only; {} formal constants left by {}",
            red.residual_formals.len(),
            red.provenance
        ),
        (_, Err(Error::NotReducibleByParity(_))) => "numeric only; parity-irreducible".into(),
        (_, Err(Error::UnsupportedDegree(_))) => "numeric only; no engine at this degree".into(),
        (_, Err(e)) => {
            return fail(format!("engine failed: {e}"));
        }
    };

    match numeric_leg(ctx, &entry.spec, &entry.expected) {
        Ok((agreed, true)) => CheckOutcome {
            label,
            ok: true,
            detail: format!("{symbolic_note}; routes agree to {agreed} digits"),
        },
        Ok((agreed, false)) => fail(format!(
            "{symbolic_note}; numeric agreement only {agreed} digits"
        )),
        Err(e) => fail(format!("numeric evaluation failed: {e}")),
    }
}

/// Sign choices for one order slot, restricted to convergent/in-domain
/// combinations: order 1 with the plus sign is excluded when `strict`.
fn slot_signs(n: u32, strict: bool) -> Vec<Sign> {
    if strict && n == 1 {
        vec![Sign::Minus]
    } else {
        vec![Sign::Plus, Sign::Minus]
    }
}

fn transform_checks(ctx: &PrecisionCtx) -> Result<Vec<CheckOutcome>> {
    let mut checks: Vec<(TransformId, Vec<(u32, Sign)>)> = Vec::new();

    // Double-value rewrites of the linear families. The lhs spec itself
    // must converge, which excludes outer (1, +).
    for id in [TransformId::TToDoubleT, TransformId::SToDoubleT] {
        let pm = if id == TransformId::TToDoubleT { 4 } else { 3 };
        for p in 1..=pm {
            for q in 1..=pm {
                for s1 in slot_signs(p, false) {
                    for s2 in slot_signs(q, true) {
                        checks.push((id, vec![(p, s1), (q, s2)]));
                    }
                }
            }
        }
    }
    // Remainder-sum rewrite: additionally excludes the first slot (1, +).
    for p in 1..=3u32 {
        for q in 1..=3u32 {
            for s1 in slot_signs(p, true) {
                for s2 in slot_signs(q, true) {
                    checks.push((TransformId::RToDoubleT, vec![(p, s1), (q, s2)]));
                }
            }
        }
    }
    // Classical double-zeta route: all-plus signs only.
    for p in 1..=4u32 {
        for q in 2..=4u32 {
            checks.push((
                TransformId::SViaClassical,
                vec![(p, Sign::Plus), (q, Sign::Plus)],
            ));
        }
    }
    // Triple-value relations: every slot must avoid (1, +).
    let triple_grid = |max: u32| {
        let mut out = Vec::new();
        for m in 1..=max {
            for p in 1..=max {
                for q in 1..=max {
                    for sa in slot_signs(m, true) {
                        for sb in slot_signs(p, true) {
                            for sc in slot_signs(q, true) {
                                out.push(vec![(m, sa), (p, sb), (q, sc)]);
                            }
                        }
                    }
                }
            }
        }
        out
    };
    for args in triple_grid(2) {
        checks.push((TransformId::TripleTtReduce, args));
    }
    for args in triple_grid(3) {
        checks.push((TransformId::TripleTtCycle, args));
    }
    for args in triple_grid(2) {
        checks.push((TransformId::TripleTTReduce, args));
    }

    let mut outcomes = Vec::with_capacity(checks.len());
    for (id, args) in checks {
        outcomes.push(transform_check(ctx, id, &args));
    }
    Ok(outcomes)
}

fn transform_check(ctx: &PrecisionCtx, id: TransformId, args: &[(u32, Sign)]) -> CheckOutcome {
    let argstr = args
        .iter()
        .map(|(n, s)| format!("{}{n}", if *s == Sign::Plus { "" } else { "~" }))
        .collect::<Vec<_>>()
        .join(",");
    let label = format!("{id}({argstr})");
    let fail = |detail: String| CheckOutcome { label: label.clone(), ok: false, detail };
    let run = || -> Result<(String, usize)> {
        let rhs = transform(id, args)?;
        let rhs_num = sv_numeric(ctx, &rhs.value)?;
        let (lhs_label, lhs_num) = match transform_lhs(id, args)? {
            TransformLhs::Sum(s) => {
                let v = sum_spec_numeric(ctx, &s)?;
                (s.to_string(), v)
            }
            TransformLhs::Mv(mv) => {
                let v = mzv_numeric(ctx, &mv)?;
                (mv.to_string(), v)
            }
        };
        Ok((lhs_label, ctx.agreed_digits(&lhs_num, &rhs_num)))
    };
    match run() {
        Ok((lhs_label, agreed)) if agreed >= REGRESSION_NUMERIC_DIGITS => CheckOutcome {
            label,
            ok: true,
            detail: format!("{lhs_label} vs rewrite agree to {agreed} digits"),
        },
        Ok((lhs_label, agreed)) => fail(format!(
            "{lhs_label} vs rewrite agree only to {agreed} digits"
        )),
        Err(e) => fail(format!("evaluation failed: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seriesnum::Family;
    use std::sync::OnceLock;

    fn data_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
    }

    fn table() -> &'static KnownValuesTable {
        static TABLE: OnceLock<KnownValuesTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            KnownValuesTable::load(&data_dir().join("known_values.json")).unwrap()
        })
    }

    #[test]
    fn product_series_matches_direct_specs() {
        let ctx = PrecisionCtx::new(30).unwrap();
        // T[1;2]: plain outer, one half-integer factor, no shift.
        let t = product_series_numeric(
            &ctx,
            0,
            true,
            2,
            &[PartialFactor { half: true, s: 1, phase: 0, shift: 0 }],
        )
        .unwrap();
        let spec = SumSpec::parse("T[1;2]").unwrap();
        let direct = sum_spec_numeric(&ctx, &spec).unwrap();
        assert!(ctx.agreed_digits(&t, &direct) >= 28);
        // S[2;~2] carries coeff s2 = -1 and shifted factors.
        let s = product_series_numeric(
            &ctx,
            2,
            false,
            2,
            &[PartialFactor { half: true, s: 2, phase: 0, shift: 1 }],
        )
        .unwrap();
        let spec = SumSpec::parse("S[2;~2]").unwrap();
        let direct = sum_spec_numeric(&ctx, &spec).unwrap();
        assert!(ctx.agreed_digits(&(-s), &direct) >= 28);
    }

    #[test]
    fn verify_spec_statuses() {
        let ctx = PrecisionCtx::new(40).unwrap();
        let kv = table();

        let r = verify_spec(&ctx, &SumSpec::parse("T[1;2]").unwrap(), kv).unwrap();
        assert_eq!(r.status, VerifyStatus::Match);
        assert!(r.matched_digits >= 30);
        assert!(r.symbolic.is_some());
        assert_eq!(r.provenance.as_deref(), Some("Thm 3.2"));

        let r = verify_spec(&ctx, &SumSpec::parse("T[2;2]").unwrap(), kv).unwrap();
        assert_eq!(r.status, VerifyStatus::NotReducible);
        assert!(r.symbolic.is_none());
        assert_eq!(r.matched_digits, 0);

        // Weight 8 with a mixed sign pattern leaves double zetas beyond the
        // table, but the numeric routes still agree.
        let r = verify_spec(&ctx, &SumSpec::parse("T[2,3;3]").unwrap(), kv).unwrap();
        assert_eq!(r.status, VerifyStatus::FormalResidue);
        assert!(r.matched_digits >= 30);

        // Degree 3 has no engine.
        let r = verify_spec(&ctx, &SumSpec::parse("S[1,1,1;2]").unwrap(), kv).unwrap();
        assert_eq!(r.status, VerifyStatus::NotReducible);
    }

    #[test]
    fn golden_tables_load_and_validate() {
        let entries = load_golden(&data_dir().join("golden_appendix.json")).unwrap();
        assert_eq!(entries.len(), 56);
        assert!(entries.iter().all(|e| e.spec.family == Family::T
            || e.spec.family == Family::S));
        assert!(entries.iter().all(|e| e.location.starts_with("Appendix")));

        let missing = load_golden(&data_dir().join("golden_nope.json"));
        assert!(matches!(missing, Err(Error::MissingGoldenData(_))));
    }

    #[test]
    fn identity_parsing_and_domain() {
        assert_eq!(GeneralIdentity::parse("Thm3.1").unwrap(), GeneralIdentity::Thm31);
        assert_eq!(GeneralIdentity::parse("thm4.4").unwrap(), GeneralIdentity::Thm44);
        assert_eq!(GeneralIdentity::parse("3.4").unwrap(), GeneralIdentity::Thm34);
        assert!(GeneralIdentity::parse("Thm5.1").is_err());

        let ctx = PrecisionCtx::new(20).unwrap();
        let bad = verify_general_identity(
            &ctx,
            GeneralIdentity::Thm31,
            &[2, 1],
            &[SeqTag::Ones, SeqTag::Ones],
        );
        assert!(matches!(bad, Err(Error::DomainViolation(_))));
        let bad = verify_general_identity(&ctx, GeneralIdentity::Thm41, &[2, 3], &[]);
        assert!(matches!(bad, Err(Error::Semantic(_))));
    }

    #[test]
    fn linear_identity_residuals_vanish() {
        let ctx = PrecisionCtx::new(30).unwrap();
        let tol = identity_tolerance(&ctx);
        for which in [GeneralIdentity::Thm31, GeneralIdentity::Thm34] {
            for (p, q) in [(1, 2), (2, 3), (3, 2)] {
                for ta in [SeqTag::Ones, SeqTag::Alt] {
                    for tb in [SeqTag::Ones, SeqTag::Alt] {
                        let r =
                            verify_general_identity(&ctx, which, &[p, q], &[ta, tb]).unwrap();
                        assert!(
                            r.abs() < tol,
                            "{which} p={p} q={q} {ta:?}/{tb:?}: residual {r:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn quadratic_identity_residuals_vanish() {
        let ctx = PrecisionCtx::new(30).unwrap();
        let tol = identity_tolerance(&ctx);
        let cases = [
            (GeneralIdentity::Thm41, [1, 1, 2], [SeqTag::Ones, SeqTag::Ones, SeqTag::Ones]),
            (GeneralIdentity::Thm41, [2, 1, 3], [SeqTag::Alt, SeqTag::Ones, SeqTag::Alt]),
            (GeneralIdentity::Thm44, [1, 2, 2], [SeqTag::Ones, SeqTag::Alt, SeqTag::Ones]),
            (GeneralIdentity::Thm44, [2, 2, 2], [SeqTag::Alt, SeqTag::Alt, SeqTag::Alt]),
        ];
        for (which, params, tags) in cases {
            let r = verify_general_identity(&ctx, which, &params, &tags).unwrap();
            assert!(r.abs() < tol, "{which} {params:?} {tags:?}: residual {r:?}");
        }
    }

    #[test]
    fn regression_appendix_suite_passes() {
        let ctx = PrecisionCtx::new(30).unwrap();
        let s = run_regression(&ctx, Suite::Appendix, table(), &data_dir()).unwrap();
        assert_eq!(s.total(), 56);
        assert!(s.all_pass(), "first failure: {:?}", s.first_failure());
        assert_eq!(s.headline(), "56/56 pass");
    }

    #[test]
    fn regression_intext_suites_pass() {
        let ctx = PrecisionCtx::new(30).unwrap();
        for suite in [Suite::IntextLinear, Suite::IntextQuadratic] {
            let s = run_regression(&ctx, suite, table(), &data_dir()).unwrap();
            assert!(
                s.all_pass(),
                "{suite}: {} failures, first: {:?}",
                s.failed(),
                s.first_failure()
            );
        }
    }

    #[test]
    fn regression_transforms_suite_passes() {
        let ctx = PrecisionCtx::new(28).unwrap();
        let s = run_regression(&ctx, Suite::Transforms, table(), &data_dir()).unwrap();
        assert!(s.total() > 250);
        assert!(
            s.all_pass(),
            "{} failures, first: {:?}",
            s.failed(),
            s.first_failure()
        );
    }

    #[test]
    fn suite_parsing_round_trips() {
        for s in [
            Suite::Appendix,
            Suite::IntextLinear,
            Suite::IntextQuadratic,
            Suite::Transforms,
        ] {
            assert_eq!(Suite::parse(s.as_str()).unwrap(), s);
        }
        assert!(Suite::parse("everything").is_err());
    }
}
