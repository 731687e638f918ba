//! Finite groups given by Cayley tables, subgroup closure, coset witnesses,
//! and the subgroup lattice of the integers.
//!
//! Elements are dense indices `0..N`. Family constructors fix the element
//! order:
//!
//! * cyclic `n`: residues `0..n`, operation is addition mod `n`;
//! * dihedral `n`: index `f * n + k` is `r^k s^f`, with `s r s = r^-1`;
//! * symmetric `n`: permutations of `0..n` in lexicographic order of their
//!   one-line notation, composed as `(σ·τ)(x) = σ(τ(x))`;
//! * product: lexicographic tuples, index `a * |B| + b` for `(a, b)`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on group order accepted by [`build_group`].
pub const DEFAULT_ORDER_CAP: usize = 5040;
/// Largest order for which the full associativity check runs.
pub const FULL_ASSOCIATIVITY_ORDER: usize = 64;
/// Largest order for which subgroups are enumerated by brute force.
pub const SUBGROUP_ENUMERATION_CAP: usize = 120;

const ASSOCIATIVITY_SAMPLES: usize = 20_000;

/// Group description as it appears in scenario files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Product(Vec<GroupSpec>),
    Table(Vec<Vec<usize>>),
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "Z{n}"),
            GroupSpec::Dihedral(n) => write!(f, "D{n}"),
            GroupSpec::Symmetric(n) => write!(f, "S{n}"),
            GroupSpec::Product(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str("x")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            GroupSpec::Table(rows) => write!(f, "table({})", rows.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    label: String,
    /// Orders of the cyclic factors when the group was built as a product of
    /// cyclic groups; element coordinates follow the lexicographic order.
    cyclic_factors: Option<Vec<usize>>,
}

impl FiniteGroup {
    /// Validates an explicit row-major Cayley table.
    pub fn from_table(rows: Vec<Vec<usize>>, label: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::TableInvalid("empty table".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::TableInvalid(format!(
                "row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        let table: Vec<usize> = rows.into_iter().flatten().collect();
        Self::from_flat(n, table, label.into(), None)
    }

    fn from_flat(
        order: usize,
        table: Vec<usize>,
        label: String,
        cyclic_factors: Option<Vec<usize>>,
    ) -> Result<Self> {
        let (identity, inverses) = validate_table(order, &table)?;
        Ok(FiniteGroup {
            order,
            table,
            identity,
            inverses,
            label,
            cyclic_factors,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverses
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn cyclic_factors(&self) -> Option<&[usize]> {
        self.cyclic_factors.as_deref()
    }

    /// Coordinates of `g` in the product of cyclic factors.
    pub fn coordinates(&self, g: usize) -> Option<Vec<usize>> {
        let factors = self.cyclic_factors.as_ref()?;
        let mut coords = vec![0; factors.len()];
        let mut rest = g;
        for (slot, &n) in coords.iter_mut().zip(factors).rev() {
            *slot = rest % n;
            rest /= n;
        }
        Some(coords)
    }

    /// Re-runs the construction validator on the stored table.
    pub fn validate(&self) -> Result<()> {
        validate_table(self.order, &self.table).map(|_| ())
    }

    fn check_index(&self, g: usize) -> Result<()> {
        if g < self.order {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: g,
                len: self.order,
            })
        }
    }

    fn check_indices(&self, set: &[usize]) -> Result<()> {
        set.iter().try_for_each(|&g| self.check_index(g))
    }
}

/// Checks the Latin square property, identity, inverses and associativity.
/// Returns the identity and the inverse table.
fn validate_table(n: usize, table: &[usize]) -> Result<(usize, Vec<usize>)> {
    if table.len() != n * n {
        return Err(Error::TableInvalid(format!(
            "expected {} entries, found {}",
            n * n,
            table.len()
        )));
    }
    if let Some(&bad) = table.iter().find(|&&x| x >= n) {
        return Err(Error::TableInvalid(format!("entry {bad} out of range")));
    }
    let mut seen = vec![false; n];
    for r in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        for c in 0..n {
            let x = table[r * n + c];
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::TableInvalid(format!("row {r} repeats {x}")));
            }
        }
    }
    for c in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        for r in 0..n {
            let x = table[r * n + c];
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::TableInvalid(format!("column {c} repeats {x}")));
            }
        }
    }

    let identity = (0..n)
        .find(|&e| (0..n).all(|g| table[e * n + g] == g && table[g * n + e] == g))
        .ok_or_else(|| Error::TableInvalid("no two-sided identity".into()))?;

    // Latin rows make the right inverse unique.
    let inverses: Vec<usize> = (0..n)
        .map(|g| (0..n).find(|&h| table[g * n + h] == identity).unwrap_or(identity))
        .collect();
    for g in 0..n {
        if table[inverses[g] * n + g] != identity {
            return Err(Error::TableInvalid(format!("element {g} has no two-sided inverse")));
        }
    }

    let assoc = |a: usize, b: usize, c: usize| {
        table[table[a * n + b] * n + c] == table[a * n + table[b * n + c]]
    };
    if n <= FULL_ASSOCIATIVITY_ORDER {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if !assoc(a, b, c) {
                        return Err(Error::TableInvalid(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..ASSOCIATIVITY_SAMPLES {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if !assoc(a, b, c) {
                return Err(Error::TableInvalid(format!(
                    "not associative at ({a}, {b}, {c})"
                )));
            }
        }
    }
    Ok((identity, inverses))
}

pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup> {
    build_group_capped(spec, DEFAULT_ORDER_CAP)
}

pub fn build_group_capped(spec: &GroupSpec, cap: usize) -> Result<FiniteGroup> {
    let order = spec_order(spec)?;
    if order > cap {
        return Err(Error::SizeLimit {
            what: "group order",
            size: order,
            cap,
        });
    }
    let label = spec.to_string();
    match spec {
        GroupSpec::Cyclic(n) => {
            let n = *n;
            let table = (0..n).flat_map(|a| (0..n).map(move |b| (a + b) % n)).collect();
            FiniteGroup::from_flat(n, table, label, Some(vec![n]))
        }
        GroupSpec::Dihedral(n) => {
            let n = *n;
            let decode = |x: usize| (x % n, x / n);
            let mut table = Vec::with_capacity(4 * n * n);
            for x in 0..2 * n {
                let (a, f) = decode(x);
                for y in 0..2 * n {
                    let (b, g) = decode(y);
                    let k = if f == 0 { (a + b) % n } else { (a + n - b) % n };
                    table.push(((f + g) % 2) * n + k);
                }
            }
            FiniteGroup::from_flat(2 * n, table, label, None)
        }
        GroupSpec::Symmetric(n) => {
            let perms = permutations(*n);
            let index: std::collections::HashMap<&[usize], usize> =
                perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
            let mut table = Vec::with_capacity(perms.len() * perms.len());
            let mut buf = vec![0; *n];
            for s in &perms {
                for t in &perms {
                    for (x, slot) in buf.iter_mut().enumerate() {
                        *slot = s[t[x]];
                    }
                    table.push(index[buf.as_slice()]);
                }
            }
            FiniteGroup::from_flat(perms.len(), table, label, None)
        }
        GroupSpec::Product(parts) => {
            let mut iter = parts.iter();
            let first = iter
                .next()
                .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
            let mut acc = build_group_capped(first, cap)?;
            for p in iter {
                let g = build_group_capped(p, cap)?;
                acc = direct_product(&acc, &g, cap)?;
            }
            acc.label = label;
            Ok(acc)
        }
        GroupSpec::Table(rows) => FiniteGroup::from_table(rows.clone(), label),
    }
}

/// The built-in family list up to `max_order`: cyclic groups, dihedral groups
/// `D_n` for `n ≥ 3`, `S_3`..`S_5`, and products of two or three cyclic groups
/// that are not themselves cyclic.
pub fn builtin_families(max_order: usize) -> Vec<GroupSpec> {
    let mut out: Vec<GroupSpec> = (1..=max_order).map(GroupSpec::Cyclic).collect();
    out.extend((3..).take_while(|n| 2 * n <= max_order).map(GroupSpec::Dihedral));
    out.extend(
        (3..=5)
            .filter(|&n| (1..=n).product::<usize>() <= max_order)
            .map(GroupSpec::Symmetric),
    );
    for a in 2..=max_order {
        for b in a..=max_order / a {
            if gcd(a as u64, b as u64) > 1 {
                out.push(GroupSpec::Product(vec![GroupSpec::Cyclic(a), GroupSpec::Cyclic(b)]));
            }
        }
    }
    if max_order >= 8 {
        out.push(GroupSpec::Product(vec![GroupSpec::Cyclic(2); 3]));
    }
    out
}

/// Result of comparing the difference-subgroup test with the coset search
/// over every nonempty subset of a group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepResult {
    pub group: String,
    pub subsets: usize,
    pub aperiodic: usize,
    pub disagreements: Vec<Vec<usize>>,
}

/// Largest order for which [`aperiodicity_sweep`] enumerates all subsets.
pub const SWEEP_ORDER_CAP: usize = 16;

/// For every nonempty `S ⊆ G`, checks that `difference_subgroup(G, S) = G`
/// exactly when no proper subgroup has a left coset containing `S`.
pub fn aperiodicity_sweep(group: &FiniteGroup) -> Result<SweepResult> {
    let n = group.order();
    if n > SWEEP_ORDER_CAP {
        return Err(Error::SizeLimit {
            what: "subset sweep order",
            size: n,
            cap: SWEEP_ORDER_CAP,
        });
    }
    let subgroups = all_subgroups(group)?;
    let mut result = SweepResult {
        group: group.label().to_string(),
        subsets: 0,
        aperiodic: 0,
        disagreements: Vec::new(),
    };
    for mask in 1u32..(1u32 << n) {
        let set: Vec<usize> = (0..n).filter(|&g| mask >> g & 1 == 1).collect();
        let fast = difference_subgroup(group, &set)?.is_whole();
        let oracle = find_witness(group, &set, &subgroups).is_none();
        result.subsets += 1;
        result.aperiodic += usize::from(fast);
        if fast != oracle {
            result.disagreements.push(set);
        }
    }
    Ok(result)
}

fn spec_order(spec: &GroupSpec) -> Result<usize> {
    let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
    match spec {
        GroupSpec::Cyclic(0) | GroupSpec::Dihedral(0) | GroupSpec::Symmetric(0) => {
            bad("group parameter must be at least 1")
        }
        GroupSpec::Cyclic(n) => Ok(*n),
        GroupSpec::Dihedral(n) => n
            .checked_mul(2)
            .ok_or_else(|| Error::InvalidArgument("dihedral order overflows".into())),
        GroupSpec::Symmetric(n) if *n > 5 => bad("symmetric groups are supported up to n = 5"),
        GroupSpec::Symmetric(n) => Ok((1..=*n).product()),
        GroupSpec::Product(parts) => parts.iter().try_fold(1usize, |acc, p| {
            acc.checked_mul(spec_order(p)?)
                .ok_or_else(|| Error::InvalidArgument("product order overflows".into()))
        }),
        GroupSpec::Table(rows) => Ok(rows.len()),
    }
}

fn direct_product(a: &FiniteGroup, b: &FiniteGroup, cap: usize) -> Result<FiniteGroup> {
    let (na, nb) = (a.order, b.order);
    let n = na * nb;
    if n > cap {
        return Err(Error::SizeLimit {
            what: "group order",
            size: n,
            cap,
        });
    }
    let mut table = Vec::with_capacity(n * n);
    for x in 0..n {
        let (xa, xb) = (x / nb, x % nb);
        for y in 0..n {
            let (ya, yb) = (y / nb, y % nb);
            table.push(a.mul(xa, ya) * nb + b.mul(xb, yb));
        }
    }
    let factors = match (&a.cyclic_factors, &b.cyclic_factors) {
        (Some(fa), Some(fb)) => Some(fa.iter().chain(fb).copied().collect()),
        _ => None,
    };
    FiniteGroup::from_flat(n, table, format!("{}x{}", a.label, b.label), factors)
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Index of a permutation (one-line notation) in the symmetric-group order.
pub fn permutation_index(perm: &[usize]) -> Option<usize> {
    permutations(perm.len()).iter().position(|p| p == perm)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Subgroup {
    parent_order: usize,
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn parent_order(&self) -> usize {
        self.parent_order
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_whole(&self) -> bool {
        self.elements.len() == self.parent_order
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Subgroup {
            parent_order: group.order,
            elements: group.elements().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetWitness {
    pub representative: usize,
    pub subgroup: Subgroup,
}

impl CosetWitness {
    pub fn coset(&self, group: &FiniteGroup) -> Vec<usize> {
        let mut c: Vec<usize> = self
            .subgroup
            .elements
            .iter()
            .map(|&h| group.mul(self.representative, h))
            .collect();
        c.sort_unstable();
        c
    }
}

/// Closure of `{identity} ∪ gens` under right multiplication by the
/// generators; in a finite group this is the generated subgroup.
fn closure(group: &FiniteGroup, gens: &[usize]) -> Vec<usize> {
    let mut member = vec![false; group.order];
    let mut queue = VecDeque::new();
    member[group.identity] = true;
    queue.push_back(group.identity);
    while let Some(x) = queue.pop_front() {
        for &s in gens {
            let y = group.mul(x, s);
            if !member[y] {
                member[y] = true;
                queue.push_back(y);
            }
        }
    }
    member
        .iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect()
}

pub fn generated_subgroup(group: &FiniteGroup, set: &[usize]) -> Result<Subgroup> {
    group.check_indices(set)?;
    let elements = closure(group, set);
    debug_assert_eq!(group.order % elements.len(), 0, "Lagrange");
    Ok(Subgroup {
        parent_order: group.order,
        elements,
    })
}

/// `[S⁻¹S]`, the subgroup generated by all quotients `s⁻¹t` with `s, t ∈ S`.
pub fn difference_subgroup(group: &FiniteGroup, set: &[usize]) -> Result<Subgroup> {
    group.check_indices(set)?;
    let &base = set.first().ok_or(Error::EmptySupport)?;
    let quotients: BTreeSet<usize> = set
        .iter()
        .flat_map(|&s| set.iter().map(move |&t| group.mul(group.inv(s), t)))
        .collect();
    let quotients: Vec<usize> = quotients.into_iter().collect();
    let h = generated_subgroup(group, &quotients)?;
    debug_assert_eq!(
        h,
        generated_subgroup(
            group,
            &set.iter().map(|&t| group.mul(group.inv(base), t)).collect::<Vec<_>>()
        )?,
        "difference subgroup depends on the base point"
    );
    Ok(h)
}

/// Every subgroup of `group`, sorted by increasing size and then by element
/// list. Only available for orders up to [`SUBGROUP_ENUMERATION_CAP`].
pub fn all_subgroups(group: &FiniteGroup) -> Result<Vec<Subgroup>> {
    if group.order > SUBGROUP_ENUMERATION_CAP {
        return Err(Error::SizeLimit {
            what: "subgroup enumeration",
            size: group.order,
            cap: SUBGROUP_ENUMERATION_CAP,
        });
    }
    // Each subgroup is reached from the trivial one by adjoining elements one
    // at a time; keep a short generating list per subgroup so closures stay cheap.
    let trivial = vec![group.identity];
    let mut seen: HashSet<Vec<usize>> = HashSet::from([trivial.clone()]);
    let mut frontier: Vec<(Vec<usize>, Vec<usize>)> = vec![(trivial, Vec::new())];
    let mut found = Vec::new();
    while let Some((elements, gens)) = frontier.pop() {
        let member: Vec<bool> = {
            let mut m = vec![false; group.order];
            elements.iter().for_each(|&g| m[g] = true);
            m
        };
        for g in group.elements().filter(|&g| !member[g]) {
            let mut next_gens = gens.clone();
            next_gens.push(g);
            let next = closure(group, &next_gens);
            if seen.insert(next.clone()) {
                frontier.push((next, next_gens));
            }
        }
        found.push(elements);
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(found
        .into_iter()
        .map(|elements| Subgroup {
            parent_order: group.order,
            elements,
        })
        .collect())
}

/// Brute-force search for a proper subgroup `H` and representative `g` with
/// `S ⊆ gH`. Subgroups are tried by increasing size, representatives by
/// index, so the first hit is deterministic.
pub fn coset_containment_witness(group: &FiniteGroup, set: &[usize]) -> Result<Option<CosetWitness>> {
    group.check_indices(set)?;
    if set.is_empty() {
        return Err(Error::EmptySupport);
    }
    let subgroups = all_subgroups(group)?;
    Ok(find_witness(group, set, &subgroups))
}

/// Same as [`coset_containment_witness`] with a precomputed subgroup list.
pub fn find_witness(group: &FiniteGroup, set: &[usize], subgroups: &[Subgroup]) -> Option<CosetWitness> {
    for h in subgroups.iter().filter(|h| !h.is_whole() && h.order() >= set.len()) {
        for g in group.elements() {
            let ginv = group.inv(g);
            if set.iter().all(|&s| h.contains(group.mul(ginv, s))) {
                return Some(CosetWitness {
                    representative: g,
                    subgroup: h.clone(),
                });
            }
        }
    }
    None
}

/// The subgroup `dℤ`; `d = 0` is the trivial subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ZSubgroup {
    pub d: u64,
}

impl ZSubgroup {
    /// `dℤ` is non-compact (infinite) exactly when `d ≥ 1`.
    pub fn is_noncompact(&self) -> bool {
        self.d >= 1
    }

    pub fn is_whole(&self) -> bool {
        self.d == 1
    }

    pub fn contains(&self, x: i64) -> bool {
        match self.d {
            0 => x == 0,
            d => x.unsigned_abs() % d == 0,
        }
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn z_subgroup(set: &[i64]) -> Result<ZSubgroup> {
    if set.is_empty() {
        return Err(Error::EmptySupport);
    }
    Ok(ZSubgroup {
        d: set.iter().fold(0, |acc, &x| gcd(acc, x.unsigned_abs())),
    })
}

/// The ℤ analogue of [`difference_subgroup`].
pub fn z_difference_subgroup(set: &[i64]) -> Result<ZSubgroup> {
    let &base = set.first().ok_or(Error::EmptySupport)?;
    z_subgroup(&set.iter().map(|&x| x - base).collect::<Vec<_>>())
}

/// Brute-force ℤ coset witness `(g, m)` with `S ⊆ g + mℤ` and `mℤ` proper:
/// `m = 0` for a single point, otherwise the smallest `m ≥ 2` that works.
pub fn z_coset_witness(set: &[i64]) -> Result<Option<(i64, u64)>> {
    let (&lo, &hi) = match (set.iter().min(), set.iter().max()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(Error::EmptySupport),
    };
    if lo == hi {
        return Ok(Some((lo, 0)));
    }
    let span = (hi - lo) as u64;
    Ok((2..=span)
        .find(|&m| set.iter().all(|&s| (s - lo).unsigned_abs() % m == 0))
        .map(|m| (lo.rem_euclid(m as i64), m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(spec: GroupSpec) -> FiniteGroup {
        build_group(&spec).unwrap()
    }

    fn s3_index(perm: [usize; 3]) -> usize {
        permutation_index(&perm).unwrap()
    }

    #[test]
    fn cyclic_inverse() {
        let z4 = g(GroupSpec::Cyclic(4));
        assert_eq!(z4.order(), 4);
        assert_eq!(z4.inv(3), 1);
        assert!(z4.is_abelian());
    }

    #[test]
    fn symmetric_three_is_nonabelian() {
        let s3 = g(GroupSpec::Symmetric(3));
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        // (σ·τ)(x) = σ(τ(x)): (12)·(23) maps 0→1, 1→2, 2→0.
        let a = s3_index([1, 0, 2]);
        let b = s3_index([0, 2, 1]);
        assert_eq!(s3.mul(a, b), s3_index([1, 2, 0]));
    }

    #[test]
    fn klein_four() {
        let v = g(GroupSpec::Product(vec![GroupSpec::Cyclic(2), GroupSpec::Cyclic(2)]));
        assert_eq!(v.order(), 4);
        assert!(v.elements().all(|x| v.inv(x) == x));
        assert_eq!(v.cyclic_factors(), Some(&[2, 2][..]));
        assert_eq!(v.coordinates(3), Some(vec![1, 1]));
    }

    #[test]
    fn dihedral_relations() {
        let d4 = g(GroupSpec::Dihedral(4));
        assert_eq!(d4.order(), 8);
        let (r, s) = (1, 4);
        assert_eq!(d4.mul(d4.mul(s, r), s), d4.inv(r));
        assert!(!d4.is_abelian());
    }

    #[test]
    fn size_cap_and_bad_tables() {
        assert!(matches!(
            build_group_capped(&GroupSpec::Cyclic(10), 8),
            Err(Error::SizeLimit { .. })
        ));
        assert!(matches!(
            FiniteGroup::from_table(vec![vec![0, 1], vec![1]], "x"),
            Err(Error::TableInvalid(_))
        ));
        // Latin square without identity.
        assert!(matches!(
            FiniteGroup::from_table(vec![vec![0, 2, 1], vec![2, 1, 0], vec![1, 0, 2]], "x"),
            Err(Error::TableInvalid(_))
        ));
        // Latin square with identity 0 that is not associative (order 5 loop).
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            FiniteGroup::from_table(loop5, "loop"),
            Err(Error::TableInvalid(_))
        ));
        assert!(build_group(&GroupSpec::Symmetric(6)).is_err());
    }

    #[test]
    fn generated_subgroup_examples() {
        let z6 = g(GroupSpec::Cyclic(6));
        assert_eq!(generated_subgroup(&z6, &[2]).unwrap().elements(), &[0, 2, 4]);
        let s3 = g(GroupSpec::Symmetric(3));
        let t12 = s3_index([1, 0, 2]);
        let t13 = s3_index([2, 1, 0]);
        assert!(generated_subgroup(&s3, &[t12, t13]).unwrap().is_whole());
        let z4 = g(GroupSpec::Cyclic(4));
        assert_eq!(generated_subgroup(&z4, &[]).unwrap().elements(), &[0]);
        assert!(matches!(
            generated_subgroup(&z4, &[7]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn difference_subgroup_examples() {
        let z4 = g(GroupSpec::Cyclic(4));
        assert_eq!(difference_subgroup(&z4, &[1, 3]).unwrap().elements(), &[0, 2]);
        let z2 = g(GroupSpec::Cyclic(2));
        assert!(difference_subgroup(&z2, &[0, 1]).unwrap().is_whole());
        let s3 = g(GroupSpec::Symmetric(3));
        let t12 = s3_index([1, 0, 2]);
        let t13 = s3_index([2, 1, 0]);
        let mut a3 = vec![s3.identity(), s3_index([1, 2, 0]), s3_index([2, 0, 1])];
        a3.sort_unstable();
        assert_eq!(difference_subgroup(&s3, &[t12, t13]).unwrap().elements(), &a3[..]);
        assert_eq!(difference_subgroup(&z4, &[]), Err(Error::EmptySupport));
    }

    #[test]
    fn coset_witness_examples() {
        let z4 = g(GroupSpec::Cyclic(4));
        let w = coset_containment_witness(&z4, &[1, 3]).unwrap().unwrap();
        assert_eq!(w.representative, 1);
        assert_eq!(w.subgroup.elements(), &[0, 2]);
        assert_eq!(w.coset(&z4), vec![1, 3]);
        let z2 = g(GroupSpec::Cyclic(2));
        assert_eq!(coset_containment_witness(&z2, &[0, 1]).unwrap(), None);
        let z3 = g(GroupSpec::Cyclic(3));
        let w = coset_containment_witness(&z3, &[1]).unwrap().unwrap();
        assert_eq!((w.representative, w.subgroup.elements()), (1, &[0][..]));
        let big = g(GroupSpec::Product(vec![GroupSpec::Symmetric(5), GroupSpec::Cyclic(2)]));
        assert!(matches!(
            coset_containment_witness(&big, &[0]),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn subgroup_counts() {
        // Known subgroup counts: S3 has 6, D4 has 10, S4 has 30, Z12 has 6.
        for (spec, count) in [
            (GroupSpec::Symmetric(3), 6),
            (GroupSpec::Dihedral(4), 10),
            (GroupSpec::Symmetric(4), 30),
            (GroupSpec::Cyclic(12), 6),
        ] {
            let grp = g(spec.clone());
            assert_eq!(all_subgroups(&grp).unwrap().len(), count, "{spec}");
        }
    }

    #[test]
    fn family_list_up_to_ten() {
        let names: Vec<String> = builtin_families(10).iter().map(|s| s.to_string()).collect();
        assert_eq!(names.len(), 10 + 3 + 1 + 4);
        for name in ["Z2xZ2", "Z2xZ4", "Z2xZ2xZ2", "D5", "S3"] {
            assert!(names.iter().any(|n| n == name), "{name}");
        }
        for spec in builtin_families(10) {
            let g = build_group(&spec).unwrap();
            assert!(g.order() <= 10);
            g.validate().unwrap();
        }
    }

    #[test]
    fn z_subgroup_examples() {
        assert_eq!(z_subgroup(&[2, -2, 0]).unwrap().d, 2);
        assert_eq!(z_subgroup(&[6, 10]).unwrap().d, 2);
        assert_eq!(z_subgroup(&[0]).unwrap().d, 0);
        assert_eq!(z_subgroup(&[]), Err(Error::EmptySupport));
        assert_eq!(z_difference_subgroup(&[-1, 1]).unwrap().d, 2);
        assert_eq!(z_coset_witness(&[-1, 1]).unwrap(), Some((1, 2)));
        assert_eq!(z_coset_witness(&[0, 1]).unwrap(), None);
    }
}
