//! Exact feasibility of systems of strict and non-strict linear inequalities
//! by Fourier–Motzkin elimination, with a witness recovered by back
//! substitution.

use std::collections::HashMap;

use crate::arith::Rational;

/// `coeffs . x < rhs` when `strict`, otherwise `coeffs . x <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
    pub strict: bool,
}

impl Inequality {
    pub fn le(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Inequality { coeffs, rhs, strict: false }
    }

    pub fn lt(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Inequality { coeffs, rhs, strict: true }
    }

    /// `coeffs . x >= rhs` (or `>` when strict), stored negated.
    pub fn ge(coeffs: Vec<Rational>, rhs: Rational, strict: bool) -> Self {
        Inequality { coeffs: coeffs.into_iter().map(|c| -c).collect(), rhs: -rhs, strict }
    }

    pub fn holds_at(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
        if self.strict {
            lhs < self.rhs
        } else {
            lhs <= self.rhs
        }
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    fn trivially_true(&self) -> bool {
        if self.strict {
            self.rhs.is_positive()
        } else {
            !self.rhs.is_negative()
        }
    }

    /// Scale so the first nonzero coefficient is +1 or -1.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).cloned() {
            let scale = lead.abs().recip();
            if !scale.is_one() {
                for c in &mut self.coeffs {
                    *c = &*c * &scale;
                }
                self.rhs = &self.rhs * &scale;
            }
        }
        self
    }
}

/// Drops duplicates and parallel rows dominated by a tighter one.
fn prune(rows: Vec<Inequality>) -> Vec<Inequality> {
    let mut best: HashMap<Vec<Rational>, (Rational, bool)> = HashMap::new();
    let mut order = Vec::new();
    for row in rows {
        let row = row.normalized();
        match best.get_mut(&row.coeffs) {
            Some((rhs, strict)) => {
                if row.rhs < *rhs || (row.rhs == *rhs && row.strict && !*strict) {
                    *rhs = row.rhs;
                    *strict = row.strict;
                }
            }
            None => {
                order.push(row.coeffs.clone());
                best.insert(row.coeffs, (row.rhs, row.strict));
            }
        }
    }
    order
        .into_iter()
        .map(|coeffs| {
            let (rhs, strict) = best.remove(&coeffs).expect("row recorded");
            Inequality { coeffs, rhs, strict }
        })
        .collect()
}

/// Returns a point satisfying every inequality, or `None` when the system is
/// infeasible. `nvars` is the number of unknowns.
pub fn find_point(nvars: usize, system: &[Inequality]) -> Option<Vec<Rational>> {
    match integer_rows(system) {
        Some(rows) => match eliminate_int(nvars, rows) {
            Ok(stages) => stages.map(|s| {
                let stages: Vec<Vec<Inequality>> =
                    s.into_iter().map(|rows| rows.into_iter().map(IntRow::to_inequality).collect()).collect();
                back_substitute(&stages)
            })?,
            Err(Overflow) => find_point_rational(nvars, system),
        },
        None => find_point_rational(nvars, system),
    }
}

struct Overflow;

/// Integer form of a row: `coeffs . x (<|<=) rhs` with coprime entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct IntRow {
    coeffs: Vec<i128>,
    rhs: i128,
    strict: bool,
}

impl IntRow {
    fn to_inequality(self) -> Inequality {
        let conv = |v: i128| Rational::from(num_rational::BigRational::from_integer(num_bigint::BigInt::from(v)));
        Inequality { coeffs: self.coeffs.into_iter().map(conv).collect(), rhs: conv(self.rhs), strict: self.strict }
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn trivially_true(&self) -> bool {
        if self.strict {
            self.rhs > 0
        } else {
            self.rhs >= 0
        }
    }

    fn normalize(&mut self) {
        let g = self.coeffs.iter().fold(self.rhs.unsigned_abs(), |g, &c| gcd(g, c.unsigned_abs()));
        if g > 1 {
            let g = g as i128;
            for c in &mut self.coeffs {
                *c /= g;
            }
            self.rhs /= g;
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn integer_rows(system: &[Inequality]) -> Option<Vec<IntRow>> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    system
        .iter()
        .map(|row| {
            let lcm = row
                .coeffs
                .iter()
                .chain(std::iter::once(&row.rhs))
                .fold(num_bigint::BigInt::from(1), |acc, q| acc.lcm(q.denom()));
            let scale = |q: &Rational| (q.numer() * (&lcm / q.denom())).to_i128();
            let coeffs = row.coeffs.iter().map(scale).collect::<Option<Vec<_>>>()?;
            let mut r = IntRow { coeffs, rhs: scale(&row.rhs)?, strict: row.strict };
            r.normalize();
            Some(r)
        })
        .collect()
}

fn prune_int(rows: Vec<IntRow>) -> Vec<IntRow> {
    // rows are gcd-normalized, so parallel rows share identical coefficients
    let mut best: HashMap<Vec<i128>, (i128, bool)> = HashMap::with_capacity(rows.len());
    let mut order = Vec::new();
    for row in rows {
        match best.get_mut(&row.coeffs) {
            Some((rhs, strict)) => {
                if row.rhs < *rhs || (row.rhs == *rhs && row.strict && !*strict) {
                    *rhs = row.rhs;
                    *strict = row.strict;
                }
            }
            None => {
                order.push(row.coeffs.clone());
                best.insert(row.coeffs, (row.rhs, row.strict));
            }
        }
    }
    order
        .into_iter()
        .map(|coeffs| {
            let (rhs, strict) = best.remove(&coeffs).expect("row recorded");
            IntRow { coeffs, rhs, strict }
        })
        .collect()
}

/// `Ok(None)` when infeasible, otherwise the per-variable bound rows.
fn eliminate_int(nvars: usize, rows: Vec<IntRow>) -> Result<Option<Vec<Vec<IntRow>>>, Overflow> {
    let mut stages: Vec<Vec<IntRow>> = vec![Vec::new(); nvars];
    let mut current = Vec::with_capacity(rows.len());
    for row in rows {
        if row.is_trivial() {
            if !row.trivially_true() {
                return Ok(None);
            }
        } else {
            current.push(row);
        }
    }
    current = prune_int(current);
    for var in (0..nvars).rev() {
        let (with, without): (Vec<_>, Vec<_>) = current.into_iter().partition(|r| r.coeffs[var] != 0);
        let mut next = without;
        for u in with.iter().filter(|r| r.coeffs[var] > 0) {
            let cu = u.coeffs[var];
            for l in with.iter().filter(|r| r.coeffs[var] < 0) {
                let cl = -l.coeffs[var];
                let mut coeffs = Vec::with_capacity(nvars);
                for (a, b) in u.coeffs.iter().zip(&l.coeffs) {
                    let v = cl.checked_mul(*a).and_then(|x| cu.checked_mul(*b).and_then(|y| x.checked_add(y)));
                    coeffs.push(v.ok_or(Overflow)?);
                }
                let rhs = cl
                    .checked_mul(u.rhs)
                    .and_then(|x| cu.checked_mul(l.rhs).and_then(|y| x.checked_add(y)))
                    .ok_or(Overflow)?;
                let mut row = IntRow { coeffs, rhs, strict: u.strict || l.strict };
                if row.is_trivial() {
                    if !row.trivially_true() {
                        return Ok(None);
                    }
                } else {
                    row.normalize();
                    next.push(row);
                }
            }
        }
        stages[var] = with;
        current = prune_int(next);
    }
    Ok(Some(stages))
}

fn find_point_rational(nvars: usize, system: &[Inequality]) -> Option<Vec<Rational>> {
    // stages[k] involves only variables 0..=k
    let mut stages: Vec<Vec<Inequality>> = vec![Vec::new(); nvars];
    let mut current = Vec::new();
    for row in system {
        debug_assert_eq!(row.coeffs.len(), nvars);
        if row.is_trivial() {
            if !row.trivially_true() {
                return None;
            }
        } else {
            current.push(row.clone());
        }
    }
    current = prune(current);

    for var in (0..nvars).rev() {
        let (with, without): (Vec<_>, Vec<_>) = current.into_iter().partition(|r| !r.coeffs[var].is_zero());
        let (upper, lower): (Vec<_>, Vec<_>) = with.iter().cloned().partition(|r| r.coeffs[var].is_positive());
        let mut next = without;
        for u in &upper {
            let cu = u.coeffs[var].clone();
            for l in &lower {
                let cl = l.coeffs[var].abs();
                // cl * u + cu * l cancels the variable
                let coeffs: Vec<Rational> =
                    u.coeffs.iter().zip(&l.coeffs).map(|(a, b)| &(&cl * a) + &(&cu * b)).collect();
                let row = Inequality { coeffs, rhs: &(&cl * &u.rhs) + &(&cu * &l.rhs), strict: u.strict || l.strict };
                if row.is_trivial() {
                    if !row.trivially_true() {
                        return None;
                    }
                } else {
                    next.push(row);
                }
            }
        }
        stages[var] = with;
        current = prune(next);
    }
    debug_assert!(current.is_empty());
    let point = back_substitute(&stages)?;
    debug_assert!(system.iter().all(|r| r.holds_at(&point)));
    Some(point)
}

/// Picks each variable in turn inside the interval its stage rows allow.
fn back_substitute(stages: &[Vec<Inequality>]) -> Option<Vec<Rational>> {
    let mut point: Vec<Rational> = Vec::with_capacity(stages.len());
    for (var, rows) in stages.iter().enumerate() {
        let mut lo: Option<(Rational, bool)> = None;
        let mut hi: Option<(Rational, bool)> = None;
        for r in rows {
            // c * x_var (<|<=) rhs - sum_{j<var} c_j x_j
            let rest: Rational = r.coeffs[..var].iter().zip(&point).map(|(c, v)| c * v).sum();
            let c = &r.coeffs[var];
            let bound = &(&r.rhs - &rest) / c;
            if c.is_positive() {
                let tighter = match &hi {
                    None => true,
                    Some((b, s)) => bound < *b || (bound == *b && r.strict && !*s),
                };
                if tighter {
                    hi = Some((bound, r.strict));
                }
            } else {
                let tighter = match &lo {
                    None => true,
                    Some((b, s)) => bound > *b || (bound == *b && r.strict && !*s),
                };
                if tighter {
                    lo = Some((bound, r.strict));
                }
            }
        }
        let value = match (lo, hi) {
            (None, None) => Rational::zero(),
            (Some((l, _)), None) => l + Rational::one(),
            (None, Some((h, _))) => h - Rational::one(),
            (Some((l, ls)), Some((h, hs))) => {
                if l < h {
                    l.midpoint(&h)
                } else if l == h && !ls && !hs {
                    l
                } else {
                    return None;
                }
            }
        };
        point.push(value);
    }
    Some(point)
}

pub fn is_feasible(nvars: usize, system: &[Inequality]) -> bool {
    find_point(nvars, system).is_some()
}
