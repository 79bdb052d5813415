use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{Error, Result};

/// Exact weights on an ordered finite label set.
///
/// Internally a label is its index; names only matter at the boundary.
/// Zero weights are rejected unless the data was built with
/// [`WeightData::with_zero_allowed`].
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct WeightData {
    labels: Vec<String>,
    weights: Vec<Rational>,
    #[serde(skip)]
    allow_zero: bool,
}

impl WeightData {
    pub fn new(pairs: Vec<(String, Rational)>) -> Result<Self> {
        Self::build(pairs, false)
    }

    pub fn with_zero_allowed(pairs: Vec<(String, Rational)>) -> Result<Self> {
        Self::build(pairs, true)
    }

    /// Labels `1..=n` in order.
    pub fn from_weights(weights: Vec<Rational>) -> Result<Self> {
        Self::new(
            weights
                .into_iter()
                .enumerate()
                .map(|(i, w)| ((i + 1).to_string(), w))
                .collect(),
        )
    }

    /// Parses `w1,w2,...` (labels `1..=n`) or `name=w,name=w,...`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_inner(text, false)
    }

    pub fn parse_allow_zero(text: &str) -> Result<Self> {
        Self::parse_inner(text, true)
    }

    fn parse_inner(text: &str, allow_zero: bool) -> Result<Self> {
        let text = text.trim();
        let mut pairs = Vec::new();
        if !text.is_empty() {
            for (i, item) in text.split(',').enumerate() {
                let (name, w) = match item.split_once('=') {
                    Some((n, w)) => (n.trim().to_string(), w),
                    None => ((i + 1).to_string(), item),
                };
                pairs.push((name, w.parse::<Rational>()?));
            }
        }
        Self::build(pairs, allow_zero)
    }

    fn build(pairs: Vec<(String, Rational)>, allow_zero: bool) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut labels = Vec::with_capacity(pairs.len());
        let mut weights = Vec::with_capacity(pairs.len());
        for (label, w) in pairs {
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label));
            }
            if w.is_negative() || w > Rational::one() {
                return Err(Error::WeightOutOfRange { label, value: w.to_string() });
            }
            if w.is_zero() && !allow_zero {
                return Err(Error::ZeroWeight(label));
            }
            labels.push(label);
            weights.push(w);
        }
        Ok(WeightData { labels, weights, allow_zero })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> &Rational {
        &self.weights[index]
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn zero_allowed(&self) -> bool {
        self.allow_zero
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn weight_of(&self, label: &str) -> Result<&Rational> {
        Ok(&self.weights[self.index_of(label)?])
    }

    pub fn all_positive(&self) -> bool {
        self.weights.iter().all(Rational::is_positive)
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().sum()
    }

    /// Sum of the weights whose index bit is set in `mask`.
    pub fn subset_sum(&self, mask: u64) -> Rational {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    /// Bitmask of a set of label names.
    pub fn mask_of<S: AsRef<str>>(&self, group: &[S]) -> Result<u64> {
        let mut mask = 0u64;
        for l in group {
            mask |= 1 << self.index_of(l.as_ref())?;
        }
        Ok(mask)
    }

    /// Same labels, and every weight of `self` is at least the matching weight of `other`.
    pub fn dominates(&self, other: &WeightData) -> bool {
        self.labels == other.labels
            && self.weights.iter().zip(&other.weights).all(|(a, b)| a >= b)
    }

    /// Copy with one weight replaced; the zero-weight permission is kept.
    pub fn with_weight(&self, index: usize, w: Rational) -> Result<WeightData> {
        let mut pairs: Vec<_> = self.labels.iter().cloned().zip(self.weights.iter().cloned()).collect();
        pairs[index].1 = w;
        Self::build(pairs, self.allow_zero)
    }

    /// Restriction to the labels whose bit is clear in `mask`.
    pub fn without(&self, mask: u64) -> WeightData {
        let (labels, weights) = self
            .labels
            .iter()
            .zip(&self.weights)
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 0)
            .map(|(_, (l, w))| (l.clone(), w.clone()))
            .unzip();
        WeightData { labels, weights, allow_zero: self.allow_zero }
    }

    /// `(1 - t) * self + t * other`, used along reduction segments.
    pub fn interpolate(&self, other: &WeightData, t: &Rational) -> WeightData {
        let s = Rational::one() - t;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| &(&s * a) + &(t * b))
            .collect();
        WeightData { labels: self.labels.clone(), weights, allow_zero: true }
    }

    pub fn to_list_string(&self) -> String {
        self.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Debug for WeightData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.labels.iter().zip(&self.weights)).finish()
    }
}

/// Element of the semigroup `N^k` standing in for effective curve classes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurveClass(pub Vec<u64>);

impl CurveClass {
    pub fn zero(rank: usize) -> Self {
        CurveClass(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn add(&self, other: &CurveClass) -> CurveClass {
        assert_eq!(self.rank(), other.rank(), "curve class rank mismatch");
        CurveClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, other: &CurveClass) -> Option<CurveClass> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(CurveClass)
    }

    pub fn le(&self, other: &CurveClass) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn coordinate_sum(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a CurveClass>>(rank: usize, items: I) -> CurveClass {
        items.into_iter().fold(CurveClass::zero(rank), |acc, c| acc.add(c))
    }

    /// Parses `2` or `1,0,3`; the empty string is the rank-0 class.
    pub fn parse(text: &str) -> Result<CurveClass> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(CurveClass(Vec::new()));
        }
        text.split(',')
            .map(|c| {
                c.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Usage(format!("bad curve class coordinate `{c}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(CurveClass)
    }

    /// Every class `c` with `0 <= c <= self` componentwise, in lexicographic order.
    pub fn below(&self) -> Vec<CurveClass> {
        let mut out = vec![Vec::with_capacity(self.rank())];
        for &bound in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u64>| {
                    (0..=bound).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(CurveClass).collect()
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Dimension of the target and the pairing vector of its canonical class,
/// so that `K_V . beta = kappa . beta`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TargetProfile {
    pub dim_v: u32,
    pub kappa: Vec<i64>,
}

impl TargetProfile {
    pub fn new(dim_v: u32, kappa: Vec<i64>) -> Self {
        TargetProfile { dim_v, kappa }
    }

    /// A point: dimension 0, rank 0.
    pub fn point() -> Self {
        TargetProfile { dim_v: 0, kappa: Vec::new() }
    }

    /// Projective space `P^n`, with `K . line = -(n + 1)`.
    pub fn projective(n: u32) -> Self {
        TargetProfile { dim_v: n, kappa: vec![-(n as i64 + 1)] }
    }

    pub fn rank(&self) -> usize {
        self.kappa.len()
    }

    pub fn pairing(&self, beta: &CurveClass) -> Result<i64> {
        self.check_rank(beta)?;
        Ok(self.kappa.iter().zip(&beta.0).map(|(k, b)| k * *b as i64).sum())
    }

    pub fn check_rank(&self, beta: &CurveClass) -> Result<()> {
        if beta.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), found: beta.rank() });
        }
        Ok(())
    }

    /// `dim=3;kappa=-4` or `P3` / `point`.
    pub fn parse(text: &str) -> Result<TargetProfile> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("point") {
            return Ok(Self::point());
        }
        if let Some(n) = t.strip_prefix('P').or_else(|| t.strip_prefix('p')) {
            if let Ok(n) = n.parse::<u32>() {
                return Ok(Self::projective(n));
            }
        }
        let mut dim = None;
        let mut kappa = Vec::new();
        for part in t.split(';') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("bad profile `{text}`")))?;
            match k.trim() {
                "dim" => {
                    dim = Some(v.trim().parse::<u32>().map_err(|_| Error::Usage(format!("bad dim `{v}`")))?)
                }
                "kappa" => {
                    kappa = v
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| s.trim().parse::<i64>().map_err(|_| Error::Usage(format!("bad kappa `{s}`"))))
                        .collect::<Result<_>>()?
                }
                other => return Err(Error::Usage(format!("unknown profile key `{other}`"))),
            }
        }
        let dim_v = dim.ok_or_else(|| Error::Usage(format!("profile `{text}` lacks dim")))?;
        Ok(TargetProfile { dim_v, kappa })
    }
}

/// Genus, weights and class of a moduli problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleData {
    pub genus: u32,
    pub weights: WeightData,
    pub beta: CurveClass,
}

/// `beta != 0` or `2g - 2 + sum of weights > 0`.
pub fn is_admissible(d: &AdmissibleData) -> bool {
    vertex_ample(d.genus, d.weights.weights(), &d.beta)
}

/// Whether the sections indexed by `group` may coincide.
pub fn coincidence_ok<S: AsRef<str>>(weights: &WeightData, group: &[S]) -> Result<bool> {
    let mask = weights.mask_of(group)?;
    Ok(weights.subset_sum(mask) <= Rational::one())
}

/// Vertex stability: `beta != 0` or `2g - 2 + sum of flag weights > 0`.
/// Edge flags enter with weight one.
pub fn vertex_ample(genus: u32, flag_weights: &[Rational], beta: &CurveClass) -> bool {
    if !beta.is_zero() {
        return true;
    }
    let total: Rational = flag_weights.iter().sum();
    (Rational::from_integer(2 * genus as i64 - 2) + total).is_positive()
}
