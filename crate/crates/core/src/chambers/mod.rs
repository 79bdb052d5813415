//! Walls `sum_{i in I} A(i) = 1` in the weight box `(0,1]^n`, chamber
//! signatures, and exact enumeration of fine and coarse chambers.

pub mod feasibility;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{Rational, WeightData};
use crate::error::{Error, Result};
use feasibility::{find_point, Inequality};

/// Largest label count accepted by [`enumerate_chambers`].
pub const MAX_ENUMERATION_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WallKind {
    /// Walls with `|I| >= 2`.
    Fine,
    /// Walls with `|I| > 2`.
    Coarse,
}

impl WallKind {
    pub fn min_size(self) -> u32 {
        match self {
            WallKind::Fine => 2,
            WallKind::Coarse => 3,
        }
    }
}

impl std::str::FromStr for WallKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fine" => Ok(WallKind::Fine),
            "coarse" => Ok(WallKind::Coarse),
            _ => Err(Error::Usage(format!("unknown wall kind `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    On,
    Above,
}

impl Side {
    fn of(sum: &Rational) -> Side {
        match sum.cmp_one() {
            Ordering::Less => Side::Below,
            Ordering::Equal => Side::On,
            Ordering::Greater => Side::Above,
        }
    }

    fn symbol(self) -> char {
        match self {
            Side::Below => '-',
            Side::On => '0',
            Side::Above => '+',
        }
    }
}

/// Label subsets of size at least `kind.min_size()`, ordered by size and then
/// lexicographically by their sorted elements.
pub fn wall_subsets(n: usize, kind: WallKind) -> Vec<u64> {
    let mut out: Vec<u64> = (0u64..1 << n).filter(|m| m.count_ones() >= kind.min_size()).collect();
    out.sort_by_key(|&m| (m.count_ones(), subset_elements(m)));
    out
}

pub fn subset_elements(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Formats a subset with the label names of `weights`, e.g. `{1,2}`.
pub fn format_subset(mask: u64, labels: &[String]) -> String {
    let names: Vec<&str> = subset_elements(mask).into_iter().map(|i| labels[i].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

/// Which side of every wall of one kind a weight point lies on.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChamberSignature {
    pub n: usize,
    pub kind: WallKind,
    /// Aligned with `wall_subsets(n, kind)`.
    pub sides: Vec<Side>,
}

impl ChamberSignature {
    pub fn walls(&self) -> Vec<u64> {
        wall_subsets(self.n, self.kind)
    }

    pub fn side(&self, mask: u64) -> Option<Side> {
        self.walls().iter().position(|&m| m == mask).map(|i| self.sides[i])
    }

    pub fn is_strict(&self) -> bool {
        !self.sides.contains(&Side::On)
    }

    /// Forget the walls of size two.
    pub fn to_coarse(&self) -> ChamberSignature {
        let sides = self
            .walls()
            .iter()
            .zip(&self.sides)
            .filter(|(m, _)| m.count_ones() >= 3)
            .map(|(_, s)| *s)
            .collect();
        ChamberSignature { n: self.n, kind: WallKind::Coarse, sides }
    }

    /// `-`, `0`, `+` per wall in wall order.
    pub fn code(&self) -> String {
        self.sides.iter().map(|s| s.symbol()).collect()
    }
}

impl fmt::Debug for ChamberSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{}]", self.kind, self.code())
    }
}

fn check_positive(weights: &WeightData) -> Result<()> {
    match weights.weights().iter().position(|w| !w.is_positive()) {
        Some(i) => Err(Error::ZeroWeight(weights.label(i).to_string())),
        None => Ok(()),
    }
}

/// Signature of a weight point against all walls of `kind`.
pub fn signature_of_kind(weights: &WeightData, kind: WallKind) -> Result<ChamberSignature> {
    check_positive(weights)?;
    let n = weights.len();
    let sides = wall_subsets(n, kind).into_iter().map(|m| Side::of(&weights.subset_sum(m))).collect();
    Ok(ChamberSignature { n, kind, sides })
}

/// Fine signature: every subset with at least two labels.
pub fn signature_of(weights: &WeightData) -> Result<ChamberSignature> {
    signature_of_kind(weights, WallKind::Fine)
}

/// Subsets `I`, `|I| >= 2`, with `sum_I A = 1`.
pub fn walls_through(weights: &WeightData, kind: WallKind) -> Vec<u64> {
    wall_subsets(weights.len(), kind)
        .into_iter()
        .filter(|&m| weights.subset_sum(m).is_one())
        .collect()
}

/// Walls whose strict sides differ between `a` and `b`, or that contain
/// either point.
pub fn walls_between(a: &WeightData, b: &WeightData, kind: WallKind) -> Result<Vec<u64>> {
    if a.labels() != b.labels() {
        return Err(Error::Mismatch("weight data on different label sets".into()));
    }
    let sa = signature_of_kind(a, kind)?;
    let sb = signature_of_kind(b, kind)?;
    Ok(sa
        .walls()
        .into_iter()
        .zip(sa.sides.iter().zip(&sb.sides))
        .filter(|(_, (x, y))| x != y || **x == Side::On)
        .map(|(m, _)| m)
        .collect())
}

/// Whether two interior points lie in the same chamber of `kind`.
///
/// A chamber is the intersection of the box with open half-spaces, so it is
/// convex: equal strict signatures already force the connecting segment to
/// avoid every wall.
pub fn same_chamber(a: &WeightData, b: &WeightData, kind: WallKind) -> Result<bool> {
    if a.labels() != b.labels() {
        return Err(Error::Mismatch("weight data on different label sets".into()));
    }
    let sa = signature_of_kind(a, kind)?;
    let sb = signature_of_kind(b, kind)?;
    for (s, w) in [(&sa, a), (&sb, b)] {
        if let Some(i) = s.sides.iter().position(|x| *x == Side::On) {
            return Err(Error::OnWall(format_subset(s.walls()[i], w.labels())));
        }
    }
    Ok(sa == sb)
}

/// No wall of the fine decomposition passes through the point.
pub fn is_fine_interior(weights: &WeightData) -> bool {
    walls_through(weights, WallKind::Fine).is_empty()
}

/// Whether sliding the weight of `t` down to zero crosses no fine wall.
///
/// Scaling `A(t)` by `lambda in (0,1]` moves `sum_I A` for `I` containing `t`
/// through the interval `(sum_{I\t} A, sum_I A]`, so the wall of `I` is met
/// exactly when `sum_{I\t} A < 1 <= sum_I A`.
pub fn is_small_tail(weights: &WeightData, t: &str) -> Result<bool> {
    check_positive(weights)?;
    let ti = weights.index_of(t)?;
    Ok(is_small_tail_index(weights, ti))
}

pub(crate) fn is_small_tail_index(weights: &WeightData, ti: usize) -> bool {
    if !is_fine_interior(weights) {
        return false;
    }
    let bit = 1u64 << ti;
    wall_subsets(weights.len(), WallKind::Fine)
        .into_iter()
        .filter(|m| m & bit != 0)
        .all(|m| weights.subset_sum(m).cmp_one() == Ordering::Less || weights.subset_sum(m & !bit).cmp_one() != Ordering::Less)
}

/// A chamber together with an exact interior witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chamber {
    pub signature: ChamberSignature,
    pub witness: Vec<Rational>,
}

/// Options for [`enumerate_chambers_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChamberQuery {
    pub n: usize,
    pub kind: WallKind,
    /// Restrict to the curve domain `sum A > 2 - 2g`.
    pub genus: Option<u32>,
}

pub fn enumerate_chambers(n: usize, kind: WallKind) -> Result<Vec<Chamber>> {
    enumerate_chambers_with(ChamberQuery { n, kind, genus: None })
}

/// Every feasible strict signature over the weight domain, each exactly once,
/// in lexicographic order of signatures.
///
/// Signs are assigned depth-first to walls ordered by size. A wall containing
/// a smaller wall already marked `Above` is forced `Above`; otherwise the side
/// of the current witness is kept for free and the opposite side is decided
/// by exact elimination.
pub fn enumerate_chambers_with(q: ChamberQuery) -> Result<Vec<Chamber>> {
    if q.n == 0 || q.n > MAX_ENUMERATION_N {
        return Err(Error::TooLarge { n: q.n, max: MAX_ENUMERATION_N });
    }
    let n = q.n;
    let walls = wall_subsets(n, q.kind);
    let one = Rational::one();
    let zero = Rational::zero();
    let unit = |i: usize| -> Vec<Rational> {
        (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()
    };
    let mut base = Vec::new();
    for i in 0..n {
        base.push(Inequality::ge(unit(i), zero.clone(), true));
        base.push(Inequality::le(unit(i), one.clone()));
    }
    if let Some(g) = q.genus {
        let bound = Rational::from_integer(2 - 2 * g as i64);
        base.push(Inequality::ge(vec![one.clone(); n], bound, true));
    }
    let Some(start) = find_point(n, &base) else {
        return Ok(Vec::new());
    };

    // immediate sub-walls of each wall, as positions in `walls`
    let index_of = |m: u64| walls.iter().position(|&w| w == m);
    let parents: Vec<Vec<usize>> = walls
        .iter()
        .map(|&m| subset_elements(m).into_iter().filter_map(|i| index_of(m & !(1 << i))).collect())
        .collect();

    let mut ctx = Search { n, walls: &walls, parents: &parents, out: Vec::new(), kind: q.kind };
    let mut sides = Vec::with_capacity(walls.len());
    ctx.dfs(&mut base, &mut sides, start);
    Ok(ctx.out)
}

struct Search<'a> {
    n: usize,
    kind: WallKind,
    walls: &'a [u64],
    parents: &'a [Vec<usize>],
    out: Vec<Chamber>,
}

impl Search<'_> {
    fn wall_row(&self, mask: u64, side: Side) -> Inequality {
        let coeffs: Vec<Rational> =
            (0..self.n).map(|i| if mask >> i & 1 == 1 { Rational::one() } else { Rational::zero() }).collect();
        match side {
            Side::Below => Inequality::lt(coeffs, Rational::one()),
            Side::Above => Inequality::ge(coeffs, Rational::one(), true),
            Side::On => unreachable!("enumeration only assigns strict sides"),
        }
    }

    fn dfs(&mut self, system: &mut Vec<Inequality>, sides: &mut Vec<Side>, witness: Vec<Rational>) {
        let depth = sides.len();
        if depth == self.walls.len() {
            self.out.push(Chamber {
                signature: ChamberSignature { n: self.n, kind: self.kind, sides: sides.clone() },
                witness,
            });
            return;
        }
        let mask = self.walls[depth];
        let forced_above = self.parents[depth].iter().any(|&p| sides[p] == Side::Above);
        let sum: Rational = (0..self.n).filter(|i| mask >> i & 1 == 1).map(|i| &witness[i]).sum();
        let here = Side::of(&sum);
        for side in [Side::Below, Side::Above] {
            if forced_above && side == Side::Below {
                continue;
            }
            let row = self.wall_row(mask, side);
            let next = if here == side {
                Some(witness.clone())
            } else {
                system.push(row.clone());
                let p = find_point(self.n, system);
                system.pop();
                p
            };
            if let Some(p) = next {
                system.push(row);
                sides.push(side);
                self.dfs(system, sides, p);
                sides.pop();
                system.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wd(s: &str) -> WeightData {
        WeightData::parse(s).unwrap()
    }

    #[test]
    fn wall_order_is_size_then_lex() {
        assert_eq!(wall_subsets(3, WallKind::Fine), vec![0b011, 0b101, 0b110, 0b111]);
        assert_eq!(wall_subsets(3, WallKind::Coarse), vec![0b111]);
        assert!(wall_subsets(2, WallKind::Coarse).is_empty());
    }

    #[test]
    fn signature_examples() {
        use Side::*;
        assert_eq!(signature_of(&wd("1,1,1")).unwrap().sides, vec![Above; 4]);
        assert_eq!(signature_of(&wd("1/3,1/3,1/3")).unwrap().sides, vec![Below, Below, Below, On]);
        assert_eq!(signature_of(&wd("1/2,1/2,3/4")).unwrap().sides, vec![On, Above, Above, Above]);
        assert!(matches!(signature_of(&WeightData::parse_allow_zero("1,0").unwrap()), Err(Error::ZeroWeight(_))));
    }

    #[test]
    fn same_chamber_examples() {
        assert!(same_chamber(&wd("1,1,1"), &wd("0.9,0.9,0.9"), WallKind::Fine).unwrap());
        assert!(!same_chamber(&wd("1,1,1"), &wd("0.4,0.4,0.4"), WallKind::Fine).unwrap());
        assert!(same_chamber(&wd("1/5,2/7,1"), &wd("1/5,2/7,1"), WallKind::Fine).unwrap());
        assert!(matches!(same_chamber(&wd("1/2,1/2,1"), &wd("1,1,1"), WallKind::Fine), Err(Error::OnWall(_))));
        // pair walls are invisible to the coarse decomposition
        assert!(same_chamber(&wd("1/2,1/2,1"), &wd("1,1,1"), WallKind::Coarse).unwrap());
    }

    #[test]
    fn fine_interior_examples() {
        assert!(is_fine_interior(&wd("1,1,1")));
        assert!(!is_fine_interior(&wd("1/2,1/2")));
        assert!(!is_fine_interior(&wd("1/3,1/3,1/3")));
    }

    #[test]
    fn small_tail_examples() {
        assert!(is_small_tail(&wd("1,1,1/100"), "3").unwrap());
        // {1,2,3}: 13/12 > 1 while {1,2}: 5/6 < 1, so the wall is crossed
        assert!(!is_small_tail(&wd("1/2,1/3,1/4"), "3").unwrap());
        assert!(is_small_tail(&wd("1/5,1/5"), "2").unwrap());
        assert!(is_small_tail(&wd("1/5,1/5"), "7").is_err());
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_chambers(1, WallKind::Fine).unwrap().len(), 1);
        let two = enumerate_chambers(2, WallKind::Fine).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(enumerate_chambers(2, WallKind::Coarse).unwrap().len(), 1);
        for c in &two {
            let w = WeightData::from_weights(c.witness.clone()).unwrap();
            assert_eq!(signature_of(&w).unwrap(), c.signature);
        }
        assert!(matches!(enumerate_chambers(7, WallKind::Fine), Err(Error::TooLarge { .. })));
        assert!(matches!(enumerate_chambers(0, WallKind::Fine), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn curve_domain_drops_small_total_weight() {
        // genus 0 needs sum > 2: with two labels in (0,1] that is empty
        let q = ChamberQuery { n: 2, kind: WallKind::Fine, genus: Some(0) };
        assert!(enumerate_chambers_with(q).unwrap().is_empty());
        // three labels: x_i + x_j = total - x_k > 1, so every wall is above
        let q = ChamberQuery { n: 3, kind: WallKind::Fine, genus: Some(0) };
        let chambers = enumerate_chambers_with(q).unwrap();
        assert_eq!(chambers.len(), 1);
        let total: Rational = chambers[0].witness.iter().sum();
        assert!(total > Rational::from_integer(2));
        assert!(chambers[0].signature.sides.iter().all(|s| *s == Side::Above));
    }
}
