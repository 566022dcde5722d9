//! Closed-form diameter bounds for direct powers of solvable groups, and
//! the report comparing them with computed diameters.

use serde::Serialize;

use crate::gensets::{
    abelianization_rank, max_diameters, rank_with_budget, DiameterCertificate, GensetError,
    SearchOptions, Strategy, DEFAULT_BUDGET, REAL_GUARD,
};
use crate::group::{
    derived_series, is_nilpotent, ElemId, FiniteGroup, GroupError, DEFAULT_MAX_ELEMENTS,
};

pub const REPORT_SCHEMA: &str = "diamlab/1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundsError {
    #[error("{0} is abelian; use the abelian power bound")]
    Abelian(String),
    #[error("{0} is not solvable")]
    NotSolvable(String),
    #[error("{0} is not abelian")]
    NotAbelian(String),
    #[error("exponent n must be at least 1")]
    ZeroPower,
    #[error("group order must exceed 1 (ln|G| = 0 makes the bound vacuous)")]
    DegenerateOrder,
    #[error("generating set must be non-empty")]
    NoGenerators,
    #[error("integer overflow evaluating {0}")]
    Overflow(&'static str),
    #[error(
        "BOUND FALSIFIED? sampled lower bound {value} for {quantity} of {group}^{n} exceeds the claimed upper bound {bound} ({which})"
    )]
    LowerBoundExceedsBound {
        group: String,
        n: u32,
        which: &'static str,
        quantity: &'static str,
        value: u32,
        bound: String,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Genset(#[from] GensetError),
}

/// Structural data every bound is evaluated from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupProfile {
    pub name: String,
    pub order: u64,
    /// `|G^(0)|, |G^(1)|, …` down to the trivial term (or the perfect core).
    pub derived_orders: Vec<u64>,
    pub derived_length: Option<u32>,
    pub abelian: bool,
    pub nilpotent: bool,
    /// The prime `p` when `G` is a non-trivial p-group.
    pub prime: Option<u32>,
    /// `rank(G)`.
    pub alpha: u32,
    /// `rank(G/G')`.
    pub beta: u32,
    pub quaternion: bool,
}

impl GroupProfile {
    pub fn compute(group: &FiniteGroup) -> Result<Self, BoundsError> {
        Self::compute_with_budget(group, DEFAULT_BUDGET)
    }

    pub fn compute_with_budget(group: &FiniteGroup, budget: u64) -> Result<Self, BoundsError> {
        let series = derived_series(group);
        let abelian = group.is_abelian();
        Ok(GroupProfile {
            name: group.name().to_string(),
            order: group.order() as u64,
            derived_orders: series.orders().into_iter().map(|o| o as u64).collect(),
            derived_length: series.derived_length().ok(),
            abelian,
            nilpotent: is_nilpotent(group),
            prime: group.prime_power_base(),
            alpha: rank_with_budget(group, budget)?,
            beta: abelianization_rank(group)?,
            quaternion: is_quaternion8(group),
        })
    }

    fn solvable_nonabelian(&self) -> Result<u32, BoundsError> {
        match self.derived_length {
            None => Err(BoundsError::NotSolvable(self.name.clone())),
            Some(_) if self.abelian => Err(BoundsError::Abelian(self.name.clone())),
            Some(l) => Ok(l),
        }
    }
}

/// Order 8, non-abelian, a single involution.
fn is_quaternion8(group: &FiniteGroup) -> bool {
    group.order() == 8
        && !group.is_abelian()
        && group
            .elements()
            .filter(|&a| group.element_order(a) == Ok(2))
            .count()
            == 1
}

/// An upper bound together with whether `n` lies in its stated domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound<T> {
    pub value: T,
    pub valid: bool,
}

fn checked_pow(base: u128, exp: u32, what: &'static str) -> Result<u128, BoundsError> {
    base.checked_pow(exp).ok_or(BoundsError::Overflow(what))
}

/// `Dˢ(Gⁿ) ≤ (4n)^l |G| / 4` for non-abelian solvable `G`.
pub fn bound_sym_power(profile: &GroupProfile, n: u32) -> Result<u128, BoundsError> {
    let l = profile.solvable_nonabelian()?;
    if n == 0 {
        return Err(BoundsError::ZeroPower);
    }
    let what = "bound_sym";
    let scaled = checked_pow(4 * n as u128, l, what)?
        .checked_mul(profile.order as u128)
        .ok_or(BoundsError::Overflow(what))?;
    Ok(scaled / 4)
}

/// `D(Gⁿ) ≤ n^l |G| ∏_{i=0}^{l-2} (|G^(i)| + 1)`, stated for `n ≥ 2`.
pub fn bound_diam_power(profile: &GroupProfile, n: u32) -> Result<Bound<u128>, BoundsError> {
    let l = profile.solvable_nonabelian()?;
    if n == 0 {
        return Err(BoundsError::ZeroPower);
    }
    let what = "bound_diam";
    let mut value = checked_pow(n as u128, l, what)?
        .checked_mul(profile.order as u128)
        .ok_or(BoundsError::Overflow(what))?;
    for &o in &profile.derived_orders[..(l as usize - 1)] {
        value = value
            .checked_mul(o as u128 + 1)
            .ok_or(BoundsError::Overflow(what))?;
    }
    Ok(Bound {
        value,
        valid: n >= 2,
    })
}

/// `D(Gⁿ) ≤ 2((4n)^l|G|/4 + 1)(nβ + 1)·n·ln|G|`. Unconditional for
/// p-groups; otherwise stated for minimum-size generating sets when
/// `n ≥ α/β`.
pub fn bound_pgroup(profile: &GroupProfile, n: u32) -> Result<Bound<f64>, BoundsError> {
    let sym = bound_sym_power(profile, n)? as f64;
    let n_f = n as f64;
    let value =
        2.0 * (sym + 1.0) * (n_f * profile.beta as f64 + 1.0) * n_f * (profile.order as f64).ln();
    let valid = profile.prime.is_some() || (profile.beta > 0 && n * profile.beta >= profile.alpha);
    Ok(Bound { value, valid })
}

/// `diam(G,X) ≤ 2(diamˢ(G,X) + 1)(|X| + 1) ln|G|`.
pub fn bound_babai(diam_s: u32, gens: u32, order: u32) -> Result<f64, BoundsError> {
    if order <= 1 {
        return Err(BoundsError::DegenerateOrder);
    }
    if gens == 0 {
        return Err(BoundsError::NoGenerators);
    }
    Ok(2.0 * (diam_s as f64 + 1.0) * (gens as f64 + 1.0) * (order as f64).ln())
}

/// `D(Aⁿ) ≤ n(|A| − rank(A))` for abelian `A`.
pub fn bound_abelian_power(profile: &GroupProfile, n: u32) -> Result<u128, BoundsError> {
    if !profile.abelian {
        return Err(BoundsError::NotAbelian(profile.name.clone()));
    }
    if n == 0 {
        return Err(BoundsError::ZeroPower);
    }
    Ok(n as u128 * (profile.order as u128 - profile.alpha as u128))
}

/// `D(Q₈ⁿ) ≤ 8n² + 3n`.
pub fn bound_q8_example(n: u32) -> u128 {
    let n = n as u128;
    8 * n * n + 3 * n
}

/// `Dˢ(G) ≤ 2Dˢ(G/N)Dˢ(N) + Dˢ(G/N) + Dˢ(N) ≤ 4Dˢ(G/N)Dˢ(N)` for a
/// normal subgroup `N` with both factors non-trivial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BreakDiameter {
    pub ds_group: u32,
    pub ds_quotient: u32,
    pub ds_normal: u32,
    pub middle: u64,
    pub upper: u64,
}

impl BreakDiameter {
    pub fn new(ds_group: u32, ds_quotient: u32, ds_normal: u32) -> Self {
        let (q, n) = (ds_quotient as u64, ds_normal as u64);
        BreakDiameter {
            ds_group,
            ds_quotient,
            ds_normal,
            middle: 2 * q * n + q + n,
            upper: 4 * q * n,
        }
    }

    pub fn first_holds(&self) -> bool {
        self.ds_group as u64 <= self.middle
    }

    pub fn second_holds(&self) -> bool {
        self.middle <= self.upper
    }

    pub fn holds(&self) -> bool {
        self.first_holds() && self.second_holds()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    LowerBoundPass,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        !matches!(self, Verdict::Fail)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::LowerBoundPass => "lower-bound-pass",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub bound_sym: Option<Verdict>,
    pub bound_diam: Option<Verdict>,
    pub bound_pgroup: Option<Verdict>,
    pub bound_q8: Option<Verdict>,
    pub bound_abelian: Option<Verdict>,
    pub babai: Option<Verdict>,
}

impl Verdicts {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, Verdict)> {
        [
            ("bound_sym", self.bound_sym),
            ("bound_diam", self.bound_diam),
            ("bound_pgroup", self.bound_pgroup),
            ("bound_q8", self.bound_q8),
            ("bound_abelian", self.bound_abelian),
            ("babai", self.babai),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
    }

    pub fn all_pass(&self) -> bool {
        self.iter().all(|(_, v)| v.is_pass())
    }
}

/// One `(G, n)` comparison of computed diameters against every applicable bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub schema: &'static str,
    pub group: String,
    pub n: u32,
    pub order: u64,
    pub power_order: u64,
    pub derived_length: Option<u32>,
    pub derived_orders: Vec<u64>,
    pub abelian: bool,
    pub p_group: Option<u32>,
    pub alpha: u32,
    pub beta: u32,
    pub d_positive: u32,
    pub d_symmetric: u32,
    pub exhaustive: bool,
    pub argmax_positive: Vec<ElemId>,
    pub argmax_symmetric: Vec<ElemId>,
    pub gensets_visited: u64,
    pub seed: Option<u64>,
    pub bound_sym: Option<u128>,
    pub bound_diam: Option<u128>,
    pub valid_from_n: Option<u32>,
    pub bound_pgroup: Option<f64>,
    pub bound_pgroup_valid: Option<bool>,
    pub bound_q8: Option<u128>,
    pub bound_abelian: Option<u128>,
    pub babai_checked: u64,
    pub babai_violations: u64,
    pub babai_max_ratio: f64,
    pub verdicts: Verdicts,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.all_pass()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub max_elements: u64,
    pub budget: u64,
    pub samples: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Skip exact enumeration and go straight to sampling.
    pub force_sampling: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_elements: DEFAULT_MAX_ELEMENTS,
            budget: DEFAULT_BUDGET,
            samples: 200,
            seed: 0x5EED,
            threads: None,
            force_sampling: false,
        }
    }
}

struct Judge<'a> {
    group: &'a str,
    n: u32,
    exhaustive: bool,
}

impl Judge<'_> {
    fn int(
        &self,
        which: &'static str,
        quantity: &'static str,
        value: u32,
        bound: u128,
    ) -> Result<Verdict, BoundsError> {
        self.decide(
            which,
            quantity,
            value,
            value as u128 <= bound,
            bound.to_string(),
        )
    }

    fn real(
        &self,
        which: &'static str,
        quantity: &'static str,
        value: u32,
        bound: f64,
    ) -> Result<Verdict, BoundsError> {
        self.decide(
            which,
            quantity,
            value,
            value as f64 <= bound * (1.0 + REAL_GUARD),
            format!("{bound:.6}"),
        )
    }

    fn decide(
        &self,
        which: &'static str,
        quantity: &'static str,
        value: u32,
        holds: bool,
        bound: String,
    ) -> Result<Verdict, BoundsError> {
        match (holds, self.exhaustive) {
            (true, true) => Ok(Verdict::Pass),
            (true, false) => Ok(Verdict::LowerBoundPass),
            (false, true) => Ok(Verdict::Fail),
            (false, false) => {
                let err = BoundsError::LowerBoundExceedsBound {
                    group: self.group.to_string(),
                    n: self.n,
                    which,
                    quantity,
                    value,
                    bound,
                };
                log::error!("{err}");
                Err(err)
            }
        }
    }
}

/// Computes `D(Gⁿ)` and `Dˢ(Gⁿ)` (exactly when the budget allows,
/// otherwise seeded lower bounds) and compares them with every applicable
/// bound.
pub fn verify_report(
    group: &FiniteGroup,
    n: u32,
    options: &VerifyOptions,
) -> Result<BoundReport, BoundsError> {
    if n == 0 {
        return Err(BoundsError::ZeroPower);
    }
    let profile = GroupProfile::compute_with_budget(group, options.budget)?;
    if profile.derived_length.is_none() {
        return Err(BoundsError::NotSolvable(profile.name));
    }
    let power = if n == 1 {
        group.clone()
    } else {
        FiniteGroup::direct_power(group, n, options.max_elements)?
    };
    let search = SearchOptions {
        budget: options.budget,
        size_cap: None,
        threads: options.threads,
    };
    let sampled = Strategy::Sampled {
        samples: options.samples,
        seed: options.seed,
    };
    let cert = if options.force_sampling {
        max_diameters(&power, sampled, &search)?
    } else {
        match max_diameters(&power, Strategy::Exact, &search) {
            Ok(c) => c,
            Err(GensetError::BudgetExceeded { candidates, budget }) => {
                log::info!(
                    "{}: {candidates} candidates exceed budget {budget}; sampling",
                    power.name()
                );
                max_diameters(&power, sampled, &search)?
            }
            Err(e) => return Err(e.into()),
        }
    };
    build_report(&profile, n, &power, cert)
}

fn build_report(
    profile: &GroupProfile,
    n: u32,
    power: &FiniteGroup,
    cert: DiameterCertificate,
) -> Result<BoundReport, BoundsError> {
    let judge = Judge {
        group: &profile.name,
        n,
        exhaustive: cert.exhaustive,
    };
    let (dp, ds) = (cert.value_positive, cert.value_symmetric);
    let mut verdicts = Verdicts::default();
    let mut notes = Vec::new();
    let (mut bound_sym, mut bound_diam, mut valid_from_n) = (None, None, None);
    let (mut bound_pg, mut bound_pg_valid, mut bound_q8, mut bound_ab) = (None, None, None, None);
    if profile.abelian {
        let b = bound_abelian_power(profile, n)?;
        bound_ab = Some(b);
        let pos = judge.int("bound_abelian", "D", dp, b)?;
        let sym = judge.int("bound_abelian", "Ds", ds, b)?;
        verdicts.bound_abelian = Some(if pos.is_pass() { sym } else { pos });
        notes.push("abelian group: only n(|A| - rank(A)) applies".to_string());
    } else {
        let s = bound_sym_power(profile, n)?;
        bound_sym = Some(s);
        verdicts.bound_sym = Some(judge.int("bound_sym", "Ds", ds, s)?);
        notes.push("bound_sym is read as the upper bound Ds(G^n) <= (4n)^l |G| / 4".to_string());
        let d = bound_diam_power(profile, n)?;
        bound_diam = Some(d.value);
        valid_from_n = Some(2);
        verdicts.bound_diam = Some(judge.int("bound_diam", "D", dp, d.value)?);
        if !d.valid {
            notes.push("bound_diam is stated for n >= 2; value shown for reference".to_string());
        }
        let p = bound_pgroup(profile, n)?;
        bound_pg = Some(p.value);
        bound_pg_valid = Some(p.valid);
        verdicts.bound_pgroup = Some(judge.real("bound_pgroup", "D", dp, p.value)?);
        if profile.quaternion {
            let q = bound_q8_example(n);
            bound_q8 = Some(q);
            verdicts.bound_q8 = Some(judge.int("bound_q8", "D", dp, q)?);
        }
    }
    if cert.babai.checked > 0 {
        verdicts.babai = Some(if cert.babai.violations == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        });
    }
    if !cert.exhaustive {
        notes.push(format!(
            "diameters are lower bounds from {} sampled minimal generating sets",
            cert.gensets_visited
        ));
    }
    Ok(BoundReport {
        schema: REPORT_SCHEMA,
        group: profile.name.clone(),
        n,
        order: profile.order,
        power_order: power.order() as u64,
        derived_length: profile.derived_length,
        derived_orders: profile.derived_orders.clone(),
        abelian: profile.abelian,
        p_group: profile.prime,
        alpha: profile.alpha,
        beta: profile.beta,
        d_positive: dp,
        d_symmetric: ds,
        exhaustive: cert.exhaustive,
        argmax_positive: cert.argmax_positive.elements,
        argmax_symmetric: cert.argmax_symmetric.elements,
        gensets_visited: cert.gensets_visited,
        seed: cert.seed,
        bound_sym,
        bound_diam,
        valid_from_n,
        bound_pgroup: bound_pg,
        bound_pgroup_valid: bound_pg_valid,
        bound_q8,
        bound_abelian: bound_ab,
        babai_checked: cert.babai.checked,
        babai_violations: cert.babai.violations,
        babai_max_ratio: cert.babai.max_ratio,
        verdicts,
        notes,
    })
}
