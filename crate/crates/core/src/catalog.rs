//! Built-in groups and the named catalog used by the CLI and test suites.

use std::fmt;

use crate::gensets::rank;
use crate::group::{derived_series, ElemId, FiniteGroup, GroupError, MAX_TABLE_ORDER};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown group `{0}`")]
    Unknown(String),
    #[error("bad parameters for {name}: {reason}")]
    BadParams { name: String, reason: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("catalog entry {name}: expected {field} = {expected}, computed {actual}")]
    SelfCheck {
        name: String,
        field: &'static str,
        expected: String,
        actual: String,
    },
}

/// Constructor recipe for a built-in group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(u32),
    /// Dihedral group of the given order (`2n` for the `n`-gon).
    Dihedral(u32),
    Quaternion,
    Symmetric(u32),
    Alternating(u32),
    ElementaryAbelian {
        p: u32,
        k: u32,
    },
    Product(Vec<GroupSpec>),
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic({n})"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral({n})"),
            GroupSpec::Quaternion => write!(f, "quaternion(8)"),
            GroupSpec::Symmetric(n) => write!(f, "symmetric({n})"),
            GroupSpec::Alternating(n) => write!(f, "alternating({n})"),
            GroupSpec::ElementaryAbelian { p, k } => write!(f, "elementary_abelian({p},{k})"),
            GroupSpec::Product(parts) => {
                let inner: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "product({})", inner.join(","))
            }
        }
    }
}

impl GroupSpec {
    /// Parses `name(args)` syntax, e.g. `dihedral(8)` or
    /// `product(cyclic(4),cyclic(2))`. `quaternion` may omit its argument.
    pub fn parse(text: &str) -> Result<GroupSpec, CatalogError> {
        let text = text.trim();
        let unknown = || CatalogError::Unknown(text.to_string());
        let (head, args) = match text.find('(') {
            Some(open) => {
                let inner = text[open + 1..].strip_suffix(')').ok_or_else(unknown)?;
                (
                    text[..open].trim().to_ascii_lowercase(),
                    crate::group::split_top_level(inner, ','),
                )
            }
            None => (text.to_ascii_lowercase(), Vec::new()),
        };
        let bad = |reason: &str| CatalogError::BadParams {
            name: head.clone(),
            reason: reason.to_string(),
        };
        let ints = || -> Result<Vec<u32>, CatalogError> {
            args.iter()
                .map(|a| {
                    a.parse::<u32>()
                        .map_err(|_| bad("expected integer arguments"))
                })
                .collect()
        };
        let one = || -> Result<u32, CatalogError> {
            match ints()?.as_slice() {
                [n] => Ok(*n),
                _ => Err(bad("expected one integer argument")),
            }
        };
        match head.as_str() {
            "cyclic" => Ok(GroupSpec::Cyclic(one()?)),
            "dihedral" => Ok(GroupSpec::Dihedral(one()?)),
            "quaternion" => match ints()?.as_slice() {
                [] | [8] => Ok(GroupSpec::Quaternion),
                _ => Err(bad("only quaternion(8) is supported")),
            },
            "symmetric" => Ok(GroupSpec::Symmetric(one()?)),
            "alternating" => Ok(GroupSpec::Alternating(one()?)),
            "elementary_abelian" => match ints()?.as_slice() {
                [p, k] => Ok(GroupSpec::ElementaryAbelian { p: *p, k: *k }),
                _ => Err(bad("expected (p,k)")),
            },
            "product" => {
                if args.is_empty() || args.iter().any(|a| a.is_empty()) {
                    return Err(bad("expected a non-empty factor list"));
                }
                Ok(GroupSpec::Product(
                    args.iter()
                        .map(|a| resolve_spec(a))
                        .collect::<Result<_, _>>()?,
                ))
            }
            _ => Err(unknown()),
        }
    }
}

/// Looks up a catalog name first (case-insensitive), then parses
/// constructor syntax.
pub fn resolve_spec(text: &str) -> Result<GroupSpec, CatalogError> {
    let trimmed = text.trim();
    if let Some(entry) = catalog()
        .into_iter()
        .find(|e| e.name.eq_ignore_ascii_case(trimmed))
    {
        return Ok(entry.spec);
    }
    GroupSpec::parse(trimmed)
}

/// Resolves and builds a group; catalog names keep their short name.
pub fn resolve_group(text: &str) -> Result<FiniteGroup, CatalogError> {
    let trimmed = text.trim();
    if let Some(entry) = catalog()
        .into_iter()
        .find(|e| e.name.eq_ignore_ascii_case(trimmed))
    {
        return entry.build();
    }
    builtin_group(&GroupSpec::parse(trimmed)?)
}

pub fn builtin_group(spec: &GroupSpec) -> Result<FiniteGroup, CatalogError> {
    let bad = |name: &str, reason: &str| CatalogError::BadParams {
        name: name.into(),
        reason: reason.into(),
    };
    let group = match spec {
        GroupSpec::Cyclic(n) => {
            if *n == 0 || *n as usize > MAX_TABLE_ORDER {
                return Err(bad("cyclic", "order must be in 1..=4096"));
            }
            cyclic(*n)?
        }
        GroupSpec::Dihedral(order) => {
            if *order < 2 || order % 2 != 0 || *order as usize > MAX_TABLE_ORDER {
                return Err(bad("dihedral", "order must be even, at least 2"));
            }
            dihedral(order / 2)?
        }
        GroupSpec::Quaternion => quaternion()?,
        GroupSpec::Symmetric(n) => {
            if !(1..=5).contains(n) {
                return Err(bad("symmetric", "degree must be in 1..=5"));
            }
            permutation_group(*n, false)?
        }
        GroupSpec::Alternating(n) => {
            if !(1..=5).contains(n) {
                return Err(bad("alternating", "degree must be in 1..=5"));
            }
            permutation_group(*n, true)?
        }
        GroupSpec::ElementaryAbelian { p, k } => {
            if crate::group::prime_power_base(*p as u64) != Some(*p as u64) || *k == 0 {
                return Err(bad("elementary_abelian", "p must be prime and k ≥ 1"));
            }
            let factors = vec![cyclic(*p)?; *k as usize];
            product(&factors)?
        }
        GroupSpec::Product(parts) => {
            let factors = parts
                .iter()
                .map(builtin_group)
                .collect::<Result<Vec<_>, _>>()?;
            product(&factors)?
        }
    };
    Ok(group.with_name(spec.to_string()))
}

fn cyclic(n: u32) -> Result<FiniteGroup, GroupError> {
    let table = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a + b) % n))
        .collect();
    FiniteGroup::from_table(format!("cyclic({n})"), n as usize, table)
}

/// `r^a s^b` has id `a + n·b`.
fn dihedral(n: u32) -> Result<FiniteGroup, GroupError> {
    let elements: Vec<(u32, u32)> = (0..2).flat_map(|b| (0..n).map(move |a| (a, b))).collect();
    let group = FiniteGroup::from_elements(
        format!("dihedral({})", 2 * n),
        elements.clone(),
        |&(a1, b1), &(a2, b2)| {
            let a = if b1 == 0 { a1 + a2 } else { a1 + n - a2 };
            (a % n, (b1 + b2) % 2)
        },
    )?;
    let labels = elements
        .iter()
        .map(|&(a, b)| {
            let r = match a {
                0 => String::new(),
                1 => "r".to_string(),
                _ => format!("r^{a}"),
            };
            match (r.is_empty(), b) {
                (true, 0) => "1".to_string(),
                (false, 0) => r,
                (_, _) => format!("{r}s"),
            }
        })
        .collect();
    Ok(group.with_labels(labels))
}

const Q8_LABELS: [&str; 8] = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];

/// Ids: 0=1, 1=−1, 2=i, 3=−i, 4=j, 5=−j, 6=k, 7=−k.
fn quaternion() -> Result<FiniteGroup, GroupError> {
    // Units 0=1, 1=i, 2=j, 3=k; returns (negated, unit).
    fn unit_mul(a: u32, b: u32) -> (bool, u32) {
        match (a, b) {
            (0, x) | (x, 0) => (false, x),
            (x, y) if x == y => (true, 0),
            (1, 2) => (false, 3),
            (2, 3) => (false, 1),
            (3, 1) => (false, 2),
            (2, 1) => (true, 3),
            (3, 2) => (true, 1),
            (1, 3) => (true, 2),
            _ => unreachable!("units are 0..4"),
        }
    }
    let group = FiniteGroup::from_elements("quaternion(8)", (0..8u32).collect(), |&a, &b| {
        let (neg, unit) = unit_mul(a / 2, b / 2);
        unit * 2 + u32::from((a % 2 == 1) ^ (b % 2 == 1) ^ neg)
    })?;
    Ok(group.with_labels(Q8_LABELS.iter().map(ToString::to_string).collect()))
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    fn extend(prefix: &mut Vec<u8>, n: usize, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for x in 0..n as u8 {
            if !prefix.contains(&x) {
                prefix.push(x);
                extend(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), n, &mut out);
    out
}

fn is_even(perm: &[u8]) -> bool {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    inversions % 2 == 0
}

/// Cycle notation on points 1..n; the identity is `()`.
pub fn cycle_notation(perm: &[u8]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] as usize == start {
            continue;
        }
        out.push('(');
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            out.push_str(&(x + 1).to_string());
            x = perm[x] as usize;
        }
        out.push(')');
    }
    if out.is_empty() {
        "()".to_string()
    } else {
        out
    }
}

/// Permutations in lexicographic image order (identity first). Products
/// act left to right: `(a·b)(x) = b(a(x))`.
fn permutation_group(n: u32, even_only: bool) -> Result<FiniteGroup, GroupError> {
    let perms: Vec<Vec<u8>> = permutations(n as usize)
        .into_iter()
        .filter(|p| !even_only || is_even(p))
        .collect();
    let labels = perms.iter().map(|p| cycle_notation(p)).collect();
    let name = if even_only {
        format!("alternating({n})")
    } else {
        format!("symmetric({n})")
    };
    let group = FiniteGroup::from_elements(name, perms, |a, b| {
        a.iter().map(|&x| b[x as usize]).collect()
    })?;
    Ok(group.with_labels(labels))
}

/// Dense-table direct product; component 0 is the least significant digit.
fn product(factors: &[FiniteGroup]) -> Result<FiniteGroup, GroupError> {
    let order = factors
        .iter()
        .try_fold(1usize, |acc, f| acc.checked_mul(f.len()));
    let order = match order {
        Some(o) if o <= MAX_TABLE_ORDER => o,
        _ => {
            return Err(GroupError::TableTooLarge {
                order: factors.iter().map(|f| f.order() as u64).product(),
                cap: MAX_TABLE_ORDER,
            })
        }
    };
    let decode = |mut x: usize| -> Vec<ElemId> {
        factors
            .iter()
            .map(|f| {
                let c = x % f.len();
                x /= f.len();
                c as ElemId
            })
            .collect()
    };
    let encode = |comps: &[ElemId]| -> ElemId {
        factors
            .iter()
            .zip(comps)
            .rev()
            .fold(0, |acc, (f, &c)| acc * f.order() + c)
    };
    let digits: Vec<Vec<ElemId>> = (0..order).map(decode).collect();
    let mut table = Vec::with_capacity(order * order);
    for a in &digits {
        for b in &digits {
            let c: Vec<ElemId> = factors
                .iter()
                .zip(a.iter().zip(b))
                .map(|(f, (&x, &y))| f.mul(x, y))
                .collect();
            table.push(encode(&c));
        }
    }
    let names: Vec<&str> = factors.iter().map(|f| f.name()).collect();
    let group = FiniteGroup::from_table(format!("product({})", names.join(",")), order, table)?;
    let labels = digits
        .iter()
        .map(|d| {
            let parts: Vec<String> = factors.iter().zip(d).map(|(f, &c)| f.label(c)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    Ok(group.with_labels(labels))
}

/// Invariant data a catalog entry must reproduce on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedInvariants {
    pub order: u32,
    pub solvable: bool,
    pub derived_length: Option<u32>,
    pub rank: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub spec: GroupSpec,
    pub expected: ExpectedInvariants,
}

impl CatalogEntry {
    pub fn build(&self) -> Result<FiniteGroup, CatalogError> {
        Ok(builtin_group(&self.spec)?.with_name(self.name))
    }

    /// Recomputes order, solvability, derived length and rank.
    pub fn self_check(&self, group: &FiniteGroup) -> Result<(), CatalogError> {
        let mismatch =
            |field: &'static str, expected: String, actual: String| CatalogError::SelfCheck {
                name: self.name.to_string(),
                field,
                expected,
                actual,
            };
        let e = &self.expected;
        if group.order() != e.order {
            return Err(mismatch(
                "order",
                e.order.to_string(),
                group.order().to_string(),
            ));
        }
        let series = derived_series(group);
        if series.is_solvable() != e.solvable {
            return Err(mismatch(
                "solvable",
                e.solvable.to_string(),
                series.is_solvable().to_string(),
            ));
        }
        let l = series.derived_length().ok();
        if l != e.derived_length {
            return Err(mismatch(
                "derived_length",
                format!("{:?}", e.derived_length),
                format!("{l:?}"),
            ));
        }
        let r = rank(group);
        if r != e.rank {
            return Err(mismatch("rank", e.rank.to_string(), r.to_string()));
        }
        Ok(())
    }
}

fn entry(
    name: &'static str,
    spec: GroupSpec,
    order: u32,
    derived_length: Option<u32>,
    rank: u32,
) -> CatalogEntry {
    CatalogEntry {
        name,
        spec,
        expected: ExpectedInvariants {
            order,
            solvable: derived_length.is_some(),
            derived_length,
            rank,
        },
    }
}

/// The named catalog, in increasing order.
pub fn catalog() -> Vec<CatalogEntry> {
    use GroupSpec::*;
    let z = Cyclic;
    vec![
        entry("Z2", z(2), 2, Some(1), 1),
        entry("Z3", z(3), 3, Some(1), 1),
        entry("Z4", z(4), 4, Some(1), 1),
        entry("Z2xZ2", ElementaryAbelian { p: 2, k: 2 }, 4, Some(1), 2),
        entry("Z5", z(5), 5, Some(1), 1),
        entry("Z6", z(6), 6, Some(1), 1),
        entry("S3", Symmetric(3), 6, Some(2), 2),
        entry("Z7", z(7), 7, Some(1), 1),
        entry("Z8", z(8), 8, Some(1), 1),
        entry("Z4xZ2", Product(vec![z(4), z(2)]), 8, Some(1), 2),
        entry("Z2^3", ElementaryAbelian { p: 2, k: 3 }, 8, Some(1), 3),
        entry("D4", Dihedral(8), 8, Some(2), 2),
        entry("Q8", Quaternion, 8, Some(2), 2),
        entry("Z9", z(9), 9, Some(1), 1),
        entry("Z3xZ3", ElementaryAbelian { p: 3, k: 2 }, 9, Some(1), 2),
        entry("Z10", z(10), 10, Some(1), 1),
        entry("D5", Dihedral(10), 10, Some(2), 2),
        entry("Z12", z(12), 12, Some(1), 1),
        entry("Z2xZ6", Product(vec![z(2), z(6)]), 12, Some(1), 2),
        entry("D6", Dihedral(12), 12, Some(2), 2),
        entry("A4", Alternating(4), 12, Some(2), 2),
        entry("Z2xS3", Product(vec![z(2), Symmetric(3)]), 12, Some(2), 2),
        entry("Z16", z(16), 16, Some(1), 1),
        entry("Z4xZ4", Product(vec![z(4), z(4)]), 16, Some(1), 2),
        entry("Z2^4", ElementaryAbelian { p: 2, k: 4 }, 16, Some(1), 4),
        entry("D8", Dihedral(16), 16, Some(2), 2),
        entry("Z2xQ8", Product(vec![z(2), Quaternion]), 16, Some(2), 3),
        entry("Z2xD4", Product(vec![z(2), Dihedral(8)]), 16, Some(2), 3),
        entry("S4", Symmetric(4), 24, Some(3), 2),
        entry("A5", Alternating(5), 60, None, 2),
        entry("S5", Symmetric(5), 120, None, 2),
    ]
}
