//! Exact-rational asymptotic symbol calculus for expansions
//! `sum_k a_k(t) (+-x)^{beta_k}` with an optional `a_* log(+-x)` term.
//!
//! Exponents are exact rationals and every match in the evolution recursion
//! is exact equality -- floats would mis-bin lattice terms. Exponent sets
//! carry a mandatory truncation floor (the underlying sets descend without
//! bound; floors make them finite with controlled truncation order).
//! Coefficient functions of t are either constants or samples on the
//! caller's uniform t-grid.

use crate::error::{Error, Result};
use crate::field::cubic_interp;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Default truncation floor for exponent sets and symbols.
pub const DEFAULT_FLOOR: i64 = -6;

// ---------------------------------------------------------------------------
// exact rational exponents
// ---------------------------------------------------------------------------

/// Reduced rational exponent with positive denominator and exact ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Exponent {
    num: i64,
    den: i64,
}

impl Exponent {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let s = if den < 0 { -1 } else { 1 };
        let (mut n, mut d) = (num * s, den * s);
        let g = gcd(n.unsigned_abs(), d.unsigned_abs()).max(1) as i64;
        n /= g;
        d /= g;
        Exponent { num: n, den: d }
    }

    pub fn int(v: i64) -> Self {
        Exponent { num: v, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn add(&self, o: &Exponent) -> Exponent {
        let n = (self.num as i128) * (o.den as i128) + (o.num as i128) * (self.den as i128);
        let d = (self.den as i128) * (o.den as i128);
        let g = gcd128(n.unsigned_abs(), d.unsigned_abs()).max(1) as i128;
        Exponent {
            num: i64::try_from(n / g).expect("exponent overflow"),
            den: i64::try_from(d / g).expect("exponent overflow"),
        }
    }

    pub fn sub_int(&self, v: i64) -> Exponent {
        self.add(&Exponent::int(-v))
    }

    pub fn add_int(&self, v: i64) -> Exponent {
        self.add(&Exponent::int(v))
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_minus_one(&self) -> bool {
        self.num == -1 && self.den == 1
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact comparison against a rational given as num/den.
    pub fn cmp_rational(&self, num: i64, den: i64) -> std::cmp::Ordering {
        let lhs = (self.num as i128) * (den as i128);
        let rhs = (num as i128) * (self.den as i128);
        if den > 0 {
            lhs.cmp(&rhs)
        } else {
            rhs.cmp(&lhs)
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        ((self.num as i128) * (other.den as i128)).cmp(&((other.num as i128) * (self.den as i128)))
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// ---------------------------------------------------------------------------
// exponent sets and their closures
// ---------------------------------------------------------------------------

/// Finite, strictly decreasing set of exact exponents above a floor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentSet {
    elems: Vec<Exponent>, // strictly decreasing
    floor: Exponent,
}

impl ExponentSet {
    pub fn new(mut elems: Vec<Exponent>, floor: Exponent) -> Self {
        elems.retain(|e| *e >= floor);
        elems.sort_by(|a, b| b.cmp(a));
        elems.dedup();
        ExponentSet { elems, floor }
    }

    pub fn elems(&self) -> &[Exponent] {
        &self.elems
    }

    pub fn floor(&self) -> Exponent {
        self.floor
    }

    pub fn max(&self) -> Option<Exponent> {
        self.elems.first().copied()
    }

    pub fn contains(&self, e: &Exponent) -> bool {
        self.elems.binary_search_by(|p| e.cmp(p)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
}

/// Safety cap on generated set sizes.
const CLOSURE_CAP: usize = 100_000;

/// Smallest superset of `delta` (above its floor) closed under
/// (d', d'') -> d' + d'' - 1 and d' -> d' - 1, with unchanged maximum.
/// Requires max delta < 1; generated elements are strictly smaller than
/// their generators, so truncation at the floor is exact.
pub fn closure_delta(delta: &ExponentSet) -> Result<ExponentSet> {
    closure_delta_at(delta, delta.floor())
}

/// Same closure with an explicit (possibly deeper) truncation floor.
pub fn closure_delta_at(delta: &ExponentSet, floor: Exponent) -> Result<ExponentSet> {
    if let Some(max) = delta.max() {
        if max.cmp_rational(1, 1) != std::cmp::Ordering::Less {
            return Err(Error::ExponentSet(format!("max {} of the input must be < 1", max)));
        }
    }
    let mut set: BTreeSet<Exponent> = delta.elems().iter().copied().filter(|e| *e >= floor).collect();
    let mut work: Vec<Exponent> = set.iter().copied().collect();
    while let Some(d) = work.pop() {
        let mut candidates: Vec<Exponent> = Vec::with_capacity(set.len() + 1);
        candidates.push(d.sub_int(1));
        for e in set.iter() {
            candidates.push(d.add(e).sub_int(1));
        }
        for c in candidates {
            if c >= floor && set.insert(c) {
                work.push(c);
                if set.len() > CLOSURE_CAP {
                    return Err(Error::ExponentSet("closure exceeds the size cap".into()));
                }
            }
        }
    }
    Ok(ExponentSet::new(set.into_iter().collect(), floor))
}

/// The evolution lattice: `{b' + d'} U delta_bar U {b' + 1}` truncated at
/// the floor of `b`, where `delta_bar` is re-closed deep enough that the
/// truncated union is exact. The three structural properties are asserted:
/// (i) max = beta + 1, (ii) d' + b' - 1 stays inside above the floor,
/// (iii) the shift of delta_bar by -1 is contained.
pub fn build_bar_b(b: &ExponentSet, delta_bar: &ExponentSet) -> Result<ExponentSet> {
    let floor = b.floor();
    if let Some(dmax) = delta_bar.max() {
        if dmax.cmp_rational(1, 1) != std::cmp::Ordering::Less {
            return Err(Error::ExponentSet(format!("max {} of delta-bar must be < 1", dmax)));
        }
    }
    // deep enough that every union element above `floor` is generated
    let mut deep = floor.min(delta_bar.floor());
    if let Some(bmax) = b.max() {
        deep = deep.min(floor.add(&bmax.neg_of()));
    }
    let delta_deep = closure_delta_at(delta_bar, deep)?;

    let mut elems: Vec<Exponent> = Vec::new();
    for bp in b.elems() {
        elems.push(bp.add_int(1));
        for dp in delta_deep.elems() {
            elems.push(bp.add(dp));
        }
    }
    elems.extend_from_slice(delta_deep.elems());
    let bar = ExponentSet::new(elems, floor);

    // (i)
    if let Some(bmax) = b.max() {
        let expect = bmax.add_int(1);
        if bar.max() != Some(expect) {
            return Err(Error::SymbolInternal(format!(
                "max of the lattice is {:?}, expected {}",
                bar.max(),
                expect
            )));
        }
    }
    // (ii)
    for dp in delta_deep.elems().iter().filter(|e| **e >= delta_bar.floor()) {
        for bp in bar.elems() {
            let z = dp.add(bp).sub_int(1);
            if z >= floor && !bar.contains(&z) {
                return Err(Error::SymbolInternal(format!(
                    "{} + {} - 1 = {} escaped the lattice",
                    dp, bp, z
                )));
            }
        }
    }
    // (iii)
    for dp in delta_bar.elems() {
        let z = dp.sub_int(1);
        if z >= floor && !bar.contains(&z) {
            return Err(Error::SymbolInternal(format!("{} - 1 = {} escaped the lattice", dp, z)));
        }
    }
    Ok(bar)
}

impl Exponent {
    fn neg_of(&self) -> Exponent {
        Exponent { num: -self.num, den: self.den }
    }

    fn min(self, other: Exponent) -> Exponent {
        if self <= other {
            self
        } else {
            other
        }
    }
}

// ---------------------------------------------------------------------------
// symbols
// ---------------------------------------------------------------------------

/// Side of the expansion: behavior as x -> +infinity or x -> -infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Side {
    /// d/dx (side x)^e = sign * e * (side x)^{e-1}.
    pub fn sign(&self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// Coefficient function of t: a constant or samples on the caller's grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Const(f64),
    Sampled(Vec<f64>),
}

impl Coefficient {
    pub fn initial(&self) -> f64 {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::Sampled(v) => v.first().copied().unwrap_or(0.0),
        }
    }

    pub fn at_index(&self, i: usize) -> f64 {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::Sampled(v) => v[i],
        }
    }

    /// Value at fractional sample index (cubic interpolation).
    pub fn at_frac(&self, f: f64) -> f64 {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::Sampled(v) => {
                if v.len() < 4 {
                    v[f.round() as usize]
                } else {
                    cubic_interp(v, f)
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Const(c) => *c == 0.0,
            Coefficient::Sampled(v) => v.iter().all(|x| *x == 0.0),
        }
    }

    fn scale(&self, s: f64) -> Coefficient {
        match self {
            Coefficient::Const(c) => Coefficient::Const(c * s),
            Coefficient::Sampled(v) => Coefficient::Sampled(v.iter().map(|x| x * s).collect()),
        }
    }

    fn add_assign(&mut self, other: &Coefficient, factor: f64) {
        match (&mut *self, other) {
            (Coefficient::Const(a), Coefficient::Const(b)) => *a += b * factor,
            (Coefficient::Sampled(a), Coefficient::Const(b)) => {
                for x in a.iter_mut() {
                    *x += b * factor;
                }
            }
            (me @ Coefficient::Const(_), Coefficient::Sampled(b)) => {
                let base = me.initial();
                *me = Coefficient::Sampled(b.iter().map(|x| base + x * factor).collect());
            }
            (Coefficient::Sampled(a), Coefficient::Sampled(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y * factor;
                }
            }
        }
    }

    fn mul(&self, other: &Coefficient) -> Coefficient {
        match (self, other) {
            (Coefficient::Const(a), Coefficient::Const(b)) => Coefficient::Const(a * b),
            (Coefficient::Const(a), Coefficient::Sampled(b)) => {
                Coefficient::Sampled(b.iter().map(|x| a * x).collect())
            }
            (Coefficient::Sampled(a), Coefficient::Const(b)) => {
                Coefficient::Sampled(a.iter().map(|x| x * b).collect())
            }
            (Coefficient::Sampled(a), Coefficient::Sampled(b)) => {
                Coefficient::Sampled(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
        }
    }
}

/// One term coeff(t) * (side x)^{exponent}.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTerm {
    pub exponent: Exponent,
    pub coeff: Coefficient,
}

/// Finite truncation of an expansion sum a_k(t) (side x)^{beta_k};
/// exponents strictly decreasing, everything at or above the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub side: Side,
    pub floor: Exponent,
    terms: Vec<SymbolTerm>,
}

impl Symbol {
    pub fn new(side: Side, floor: Exponent, mut terms: Vec<SymbolTerm>) -> Symbol {
        terms.retain(|t| t.exponent >= floor && !t.coeff.is_zero());
        terms.sort_by_key(|t| std::cmp::Reverse(t.exponent));
        // merge duplicates
        let mut merged: Vec<SymbolTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.exponent == t.exponent => last.coeff.add_assign(&t.coeff, 1.0),
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Symbol { side, floor, terms: merged }
    }

    pub fn zero(side: Side) -> Symbol {
        Symbol { side, floor: Exponent::int(DEFAULT_FLOOR), terms: Vec::new() }
    }

    pub fn single(side: Side, exponent: Exponent, coeff: f64) -> Symbol {
        Symbol::new(
            side,
            Exponent::int(DEFAULT_FLOOR),
            vec![SymbolTerm { exponent, coeff: Coefficient::Const(coeff) }],
        )
    }

    pub fn terms(&self) -> &[SymbolTerm] {
        &self.terms
    }

    pub fn leading(&self) -> Option<&SymbolTerm> {
        self.terms.first()
    }

    pub fn exponents(&self) -> ExponentSet {
        ExponentSet::new(self.terms.iter().map(|t| t.exponent).collect(), self.floor)
    }

    pub fn coeff_at(&self, e: &Exponent) -> Option<&Coefficient> {
        self.terms.iter().find(|t| t.exponent == *e).map(|t| &t.coeff)
    }

    /// Term-wise x-derivative (side-aware). The truncation floor drops by
    /// one: knowing f mod O(x^floor) determines f' mod O(x^{floor-1}).
    pub fn derivative(&self) -> Symbol {
        let s = self.side.sign();
        let terms = self
            .terms
            .iter()
            .filter(|t| !t.exponent.is_zero())
            .map(|t| SymbolTerm {
                exponent: t.exponent.sub_int(1),
                coeff: t.coeff.scale(s * t.exponent.to_f64()),
            })
            .collect();
        Symbol::new(self.side, self.floor.sub_int(1), terms)
    }

    /// Cauchy product truncated at the floor.
    pub fn product(&self, other: &Symbol) -> Symbol {
        assert_eq!(self.side, other.side, "sides must match");
        let floor = self.floor.min(other.floor);
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let e = a.exponent.add(&b.exponent);
                if e >= floor {
                    terms.push(SymbolTerm { exponent: e, coeff: a.coeff.mul(&b.coeff) });
                }
            }
        }
        Symbol::new(self.side, floor, terms)
    }
}

/// Antiderivative-class expansion: power terms (exponents shifted by +1)
/// plus `log_coeff * log(side x)` plus a constant slot.
#[derive(Debug, Clone, PartialEq)]
pub struct StarSymbol {
    pub power: Symbol,
    pub log_coeff: Coefficient,
    pub constant: Coefficient,
}

impl StarSymbol {
    pub fn side(&self) -> Side {
        self.power.side
    }
}

/// Symbol of B(r) = r_x + r^2; leading exponent max{2 beta, beta - 1}.
/// Gated on beta < 1/2 like the evolution itself.
pub fn miura_symbol(r: &Symbol) -> Result<Symbol> {
    match beta_gate(r, false) {
        GateOutcome::Pass => {}
        GateOutcome::Reject { witness, bound } => {
            return Err(Error::NoFormalSolution {
                witness: witness.to_string(),
                bound: bound.to_string(),
            })
        }
    }
    let dr = r.derivative();
    let sq = r.product(r);
    let mut terms = dr.terms.clone();
    terms.extend(sq.terms.iter().cloned());
    Ok(Symbol::new(r.side, r.floor.min(dr.floor), terms))
}

/// Term-wise antiderivative: exponent e -> e+1 with coefficient/(e+1); the
/// exponent -1 term feeds the log coefficient. The constant slot stays zero
/// (the caller owns the normalization).
pub fn integrate_symbol(f: &Symbol) -> StarSymbol {
    let s = f.side.sign();
    let mut log_coeff = Coefficient::Const(0.0);
    let mut terms = Vec::new();
    for t in &f.terms {
        if t.exponent.is_minus_one() {
            log_coeff.add_assign(&t.coeff.scale(s), 1.0);
        } else {
            let e1 = t.exponent.add_int(1);
            terms.push(SymbolTerm {
                exponent: e1,
                coeff: t.coeff.scale(s / e1.to_f64()),
            });
        }
    }
    StarSymbol {
        power: Symbol::new(f.side, f.floor.add_int(1), terms),
        log_coeff,
        constant: Coefficient::Const(0.0),
    }
}

/// x-derivative of a star symbol, landing back in the plain symbol class.
pub fn derivative_star(f: &StarSymbol) -> Symbol {
    let s = f.side().sign();
    let mut d = f.power.derivative();
    if !f.log_coeff.is_zero() {
        let mut terms = d.terms.clone();
        terms.push(SymbolTerm {
            exponent: Exponent::int(-1),
            coeff: f.log_coeff.scale(s),
        });
        d = Symbol::new(d.side, d.floor, terms);
    }
    d
}

// ---------------------------------------------------------------------------
// the beta gate
// ---------------------------------------------------------------------------

/// Outcome of the admissibility gate on the leading exponent.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOutcome {
    Pass,
    /// The 2 q p_x term produces exponent 3 beta, exceeding beta + 1.
    Reject { witness: Exponent, bound: Exponent },
}

/// Pass iff the leading exponent beta < 1/2; o-class callers may pass
/// beta = 1/2 with the flag. The rejection carries the obstruction witness.
pub fn beta_gate(r0: &Symbol, o_class: bool) -> GateOutcome {
    let Some(lead) = r0.leading() else {
        return GateOutcome::Pass;
    };
    let beta = lead.exponent;
    match beta.cmp_rational(1, 2) {
        std::cmp::Ordering::Less => GateOutcome::Pass,
        std::cmp::Ordering::Equal if o_class => GateOutcome::Pass,
        _ => {
            let three_beta = beta.add(&beta).add(&beta);
            GateOutcome::Reject { witness: three_beta, bound: beta.add_int(1) }
        }
    }
}

// ---------------------------------------------------------------------------
// formal evolution
// ---------------------------------------------------------------------------

/// One right-hand-side contribution to a lattice row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowTerm {
    /// Constant factor multiplying c_{q_index}(t).
    pub factor: f64,
    /// Index into the q symbol's terms.
    pub q_index: usize,
    /// State index n with adot_k += factor * c_i(t) * a_n(t); None for the
    /// forcing terms (log coefficient and -q_x), which carry no state.
    pub state: Option<usize>,
}

/// The assembled strictly lower-triangular system.
#[derive(Debug, Clone)]
pub struct EvolutionSystem {
    /// Lattice exponents of the unknowns, strictly decreasing.
    pub exponents: Vec<Exponent>,
    /// `rows[k]` feeds adot_k; every state index referenced is < k.
    pub rows: Vec<Vec<RowTerm>>,
}

/// Result of the formal evolution: the evolved star symbol (coefficients
/// sampled on the t-grid) and the assembled system for inspection.
#[derive(Debug, Clone)]
pub struct FormalEvolution {
    pub chi: StarSymbol,
    pub system: EvolutionSystem,
}

/// Evolve p_t = 2 q p_x - q_x formally: build the exponent lattice, match
/// exponents exactly to assemble the triangular coefficient system, assert
/// that the leading and log rows are structurally empty, and integrate with
/// RK4 on the caller's t-grid.
pub fn formal_evolution(p0: &StarSymbol, q: &Symbol, t_grid: &[f64]) -> Result<FormalEvolution> {
    if p0.side() != q.side {
        return Err(Error::SymbolEval("p0 and q must live on the same side".into()));
    }
    if t_grid.len() < 2 {
        return Err(Error::InvalidGrid("t grid needs at least 2 samples".into()));
    }
    let dt = t_grid[1] - t_grid[0];
    for w in t_grid.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-12 * dt.abs().max(1.0) {
            return Err(Error::InvalidGrid("t grid must be uniform".into()));
        }
    }
    let side_sign = q.side.sign();

    // gates: beta < 1/2 on the initial data, delta < 1 on the background
    let b_exponents: Vec<Exponent> =
        p0.power.terms().iter().map(|t| t.exponent.sub_int(1)).collect();
    let b_set = ExponentSet::new(b_exponents, p0.power.floor.sub_int(1));
    if let Some(beta) = b_set.max() {
        if beta.cmp_rational(1, 2) != std::cmp::Ordering::Less {
            let witness = beta.add(&beta).add(&beta);
            return Err(Error::NoFormalSolution {
                witness: witness.to_string(),
                bound: beta.add_int(1).to_string(),
            });
        }
        if let Some(delta) = q.exponents().max() {
            // RHS exponent delta + (beta+1) - 1 may not exceed beta + 1
            if delta.cmp_rational(1, 1) != std::cmp::Ordering::Less {
                return Err(Error::NoFormalSolution {
                    witness: delta.add(&beta).to_string(),
                    bound: beta.add_int(1).to_string(),
                });
            }
        }
    }

    let chi_floor = p0.power.floor;
    let delta_bar = closure_delta_at(&q.exponents(), chi_floor.min(q.floor))?;
    let lattice = if b_set.is_empty() {
        // no power terms: the lattice is driven by the forcing alone
        let mut elems: Vec<Exponent> = delta_bar.elems().iter().map(|e| e.sub_int(1)).collect();
        elems.extend(delta_bar.elems().iter().copied());
        ExponentSet::new(elems, chi_floor)
    } else {
        let bar = build_bar_b(&b_set, &delta_bar)?;
        ExponentSet::new(bar.elems().to_vec(), chi_floor)
    };

    let exponents: Vec<Exponent> = lattice.elems().to_vec();
    let index_of = |e: &Exponent| exponents.binary_search_by(|p| e.cmp(p)).ok();

    let a_star = p0.log_coeff.initial();
    let q_terms = q.terms();
    let mut rows: Vec<Vec<RowTerm>> = vec![Vec::new(); exponents.len()];

    for (qi, qt) in q_terms.iter().enumerate() {
        let delta_i = qt.exponent;
        // 2 q p_x power-power products: target = delta_i + e_n - 1
        for (n, e_n) in exponents.iter().enumerate() {
            if e_n.is_zero() {
                continue; // constant lattice entry has zero derivative
            }
            let target = delta_i.add(e_n).sub_int(1);
            if let Some(max) = lattice.max() {
                if target > max {
                    return Err(Error::NoFormalSolution {
                        witness: target.to_string(),
                        bound: max.to_string(),
                    });
                }
            }
            if target < chi_floor {
                continue;
            }
            let Some(k) = index_of(&target) else {
                return Err(Error::SymbolInternal(format!(
                    "product exponent {} missing from the lattice",
                    target
                )));
            };
            if n >= k {
                return Err(Error::SymbolInternal(format!(
                    "triangularity violated: row {} references state {}",
                    k, n
                )));
            }
            rows[k].push(RowTerm {
                factor: side_sign * 2.0 * e_n.to_f64(),
                q_index: qi,
                state: Some(n),
            });
        }
        // log-derivative and -q_x forcings: target = delta_i - 1
        let target = delta_i.sub_int(1);
        if target >= chi_floor {
            let Some(k) = index_of(&target) else {
                return Err(Error::SymbolInternal(format!(
                    "forcing exponent {} missing from the lattice",
                    target
                )));
            };
            rows[k].push(RowTerm {
                factor: side_sign * (2.0 * a_star - delta_i.to_f64()),
                q_index: qi,
                state: None,
            });
        }
    }

    // structural constancy of the leading row (the log row is structurally
    // empty by construction: nothing on the right produces a log term)
    if !b_set.is_empty() && !rows.is_empty() && !rows[0].is_empty() {
        return Err(Error::SymbolInternal(
            "leading row must be structurally empty".into(),
        ));
    }

    // initial state from p0
    let mut state: Vec<f64> = exponents
        .iter()
        .map(|e| p0.power.coeff_at(e).map(|c| c.initial()).unwrap_or(0.0))
        .collect();

    // simultaneous RK4 march; triangularity makes the order irrelevant
    let nt = t_grid.len();
    let mut trajectories: Vec<Vec<f64>> = vec![Vec::with_capacity(nt); exponents.len()];
    for (k, tr) in trajectories.iter_mut().enumerate() {
        tr.push(state[k]);
    }
    let eval_rhs = |frac: f64, state: &[f64], out: &mut Vec<f64>| {
        out.clear();
        for row in &rows {
            let mut acc = 0.0;
            for term in row {
                let c = q_terms[term.q_index].coeff.at_frac(frac);
                match term.state {
                    Some(n) => acc += term.factor * c * state[n],
                    None => acc += term.factor * c,
                }
            }
            out.push(acc);
        }
    };
    let mut k1 = Vec::new();
    let mut k2 = Vec::new();
    let mut k3 = Vec::new();
    let mut k4 = Vec::new();
    let mut tmp = vec![0.0; state.len()];
    for step in 0..nt - 1 {
        let f = step as f64;
        eval_rhs(f, &state, &mut k1);
        for i in 0..state.len() {
            tmp[i] = state[i] + 0.5 * dt * k1[i];
        }
        eval_rhs(f + 0.5, &tmp, &mut k2);
        for i in 0..state.len() {
            tmp[i] = state[i] + 0.5 * dt * k2[i];
        }
        eval_rhs(f + 0.5, &tmp, &mut k3);
        for i in 0..state.len() {
            tmp[i] = state[i] + dt * k3[i];
        }
        eval_rhs(f + 1.0, &tmp, &mut k4);
        for i in 0..state.len() {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        for (k, tr) in trajectories.iter_mut().enumerate() {
            tr.push(state[k]);
        }
    }

    let terms: Vec<SymbolTerm> = exponents
        .iter()
        .zip(trajectories)
        .map(|(e, tr)| SymbolTerm { exponent: *e, coeff: Coefficient::Sampled(tr) })
        .collect();
    let chi = StarSymbol {
        power: Symbol::new(q.side, chi_floor, terms),
        log_coeff: p0.log_coeff.clone(),
        constant: Coefficient::Const(0.0),
    };
    Ok(FormalEvolution { chi, system: EvolutionSystem { exponents, rows } })
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

/// Partial sum of a symbol at (t-sample index, x). The sign of x must match
/// the symbol's side and |x| >= 1.
pub fn symbol_eval(s: &Symbol, t_index: usize, x: f64, n_terms: usize) -> Result<f64> {
    let y = side_coordinate(s.side, x)?;
    let mut acc = 0.0;
    for t in s.terms.iter().take(n_terms) {
        acc += t.coeff.at_index(t_index) * y.powf(t.exponent.to_f64());
    }
    Ok(acc)
}

/// Partial sum of a star symbol including the log and constant slots.
pub fn star_eval(s: &StarSymbol, t_index: usize, x: f64, n_terms: usize) -> Result<f64> {
    let y = side_coordinate(s.side(), x)?;
    let mut acc = symbol_eval(&s.power, t_index, x, n_terms)?;
    acc += s.log_coeff.at_index(t_index) * y.ln();
    acc += s.constant.at_index(t_index);
    Ok(acc)
}

fn side_coordinate(side: Side, x: f64) -> Result<f64> {
    let y = side.sign() * x;
    if y < 1.0 {
        return Err(Error::SymbolEval(format!(
            "x = {x} is not on the {side:?} side with |x| >= 1"
        )));
    }
    Ok(y)
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffJson {
    Number(f64),
    Samples(Vec<f64>),
}

impl From<&Coefficient> for CoeffJson {
    fn from(c: &Coefficient) -> Self {
        match c {
            Coefficient::Const(v) => CoeffJson::Number(*v),
            Coefficient::Sampled(v) => CoeffJson::Samples(v.clone()),
        }
    }
}

impl From<CoeffJson> for Coefficient {
    fn from(c: CoeffJson) -> Self {
        match c {
            CoeffJson::Number(v) => Coefficient::Const(v),
            CoeffJson::Samples(v) => Coefficient::Sampled(v),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Exponent,
    coeff: CoeffJson,
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    side: Side,
    floor: Exponent,
    terms: Vec<TermJson>,
    #[serde(default)]
    log: Option<CoeffJson>,
    #[serde(rename = "const", default)]
    constant: Option<CoeffJson>,
}

impl StarSymbol {
    pub fn to_json(&self) -> String {
        let j = SymbolJson {
            side: self.side(),
            floor: self.power.floor,
            terms: self
                .power
                .terms()
                .iter()
                .map(|t| TermJson { exp: t.exponent, coeff: (&t.coeff).into() })
                .collect(),
            log: Some((&self.log_coeff).into()),
            constant: Some((&self.constant).into()),
        };
        serde_json::to_string_pretty(&j).expect("symbol serialization")
    }

    pub fn from_json(text: &str) -> Result<StarSymbol> {
        let j: SymbolJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("symbol json: {e}")))?;
        Ok(StarSymbol {
            power: Symbol::new(
                j.side,
                j.floor,
                j.terms
                    .into_iter()
                    .map(|t| SymbolTerm { exponent: t.exp, coeff: t.coeff.into() })
                    .collect(),
            ),
            log_coeff: j.log.map(Coefficient::from).unwrap_or(Coefficient::Const(0.0)),
            constant: j.constant.map(Coefficient::from).unwrap_or(Coefficient::Const(0.0)),
        })
    }
}

impl Symbol {
    pub fn to_json(&self) -> String {
        StarSymbol {
            power: self.clone(),
            log_coeff: Coefficient::Const(0.0),
            constant: Coefficient::Const(0.0),
        }
        .to_json()
    }

    pub fn from_json(text: &str) -> Result<Symbol> {
        let star = StarSymbol::from_json(text)?;
        if !star.log_coeff.is_zero() || !star.constant.is_zero() {
            return Err(Error::Parse(
                "plain symbol must not carry log or const slots".into(),
            ));
        }
        Ok(star.power)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exp(n: i64, d: i64) -> Exponent {
        Exponent::new(n, d)
    }

    fn set(elems: &[(i64, i64)], floor: i64) -> ExponentSet {
        ExponentSet::new(
            elems.iter().map(|&(n, d)| exp(n, d)).collect(),
            Exponent::int(floor),
        )
    }

    /// Slow oracle: repeatedly scan the full cross product until stable.
    fn closure_brute(elems: &[(i64, i64)], floor: i64) -> Vec<Exponent> {
        let fl = Exponent::int(floor);
        let mut v: Vec<Exponent> = elems
            .iter()
            .map(|&(n, d)| exp(n, d))
            .filter(|e| *e >= fl)
            .collect();
        loop {
            let mut added = false;
            let snapshot = v.clone();
            for a in &snapshot {
                let c = a.sub_int(1);
                if c >= fl && !v.contains(&c) {
                    v.push(c);
                    added = true;
                }
                for b in &snapshot {
                    let c = a.add(b).sub_int(1);
                    if c >= fl && !v.contains(&c) {
                        v.push(c);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        v.sort_by(|a, b| b.cmp(a));
        v
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        assert_eq!(exp(2, 4), exp(1, 2));
        assert_eq!(exp(1, 3).add(&exp(1, 6)), exp(1, 2));
        assert_eq!(exp(-2, -4), exp(1, 2));
        assert!(exp(1, 3) > exp(-1, 2));
        assert_eq!(exp(1, 3).sub_int(1), exp(-2, 3));
        assert_eq!(exp(7, 3).to_string(), "7/3");
    }

    #[test]
    fn closure_matches_spec_examples() {
        let c = closure_delta(&set(&[(0, 1)], -3)).unwrap();
        assert_eq!(c.elems(), &[exp(0, 1), exp(-1, 1), exp(-2, 1), exp(-3, 1)]);
        let c = closure_delta(&set(&[(-1, 1)], -3)).unwrap();
        assert_eq!(c.elems(), &[exp(-1, 1), exp(-2, 1), exp(-3, 1)]);
        // max is preserved
        let c = closure_delta(&set(&[(1, 3), (-1, 2)], -6)).unwrap();
        assert_eq!(c.max(), Some(exp(1, 3)));
    }

    #[test]
    fn closure_matches_brute_force_exactly() {
        for (elems, floor) in [
            (vec![(0i64, 1i64)], -3i64),
            (vec![(-1, 1)], -3),
            (vec![(1, 3), (-1, 2)], -5),
            (vec![(2, 3), (-2, 3)], -6),
            (vec![(1, 2), (1, 3), (-3, 4)], -4),
        ] {
            let fast = closure_delta(&set(&elems, floor)).unwrap();
            let brute = closure_brute(&elems, floor);
            assert_eq!(fast.elems(), &brute[..], "input {elems:?}");
        }
    }

    #[test]
    fn closure_rejects_max_at_least_one() {
        assert!(closure_delta(&set(&[(1, 1)], -3)).is_err());
        assert!(closure_delta(&set(&[(3, 2)], -3)).is_err());
    }

    proptest! {
        #[test]
        fn closure_is_idempotent(nums in proptest::collection::vec(-9i64..=0, 1..4),
                                 dens in proptest::collection::vec(1i64..=4, 1..4)) {
            let elems: Vec<(i64, i64)> = nums.iter().zip(&dens).map(|(&n, &d)| (n, d)).collect();
            let s = set(&elems, -5);
            let once = closure_delta(&s).unwrap();
            let twice = closure_delta(&once).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn closure_is_closed_above_the_floor(nums in proptest::collection::vec(-6i64..=0, 1..4),
                                             dens in proptest::collection::vec(1i64..=3, 1..4)) {
            let elems: Vec<(i64, i64)> = nums.iter().zip(&dens).map(|(&n, &d)| (n, d)).collect();
            let c = closure_delta(&set(&elems, -5)).unwrap();
            for a in c.elems() {
                let shift = a.sub_int(1);
                prop_assert!(shift < c.floor() || c.contains(&shift));
                for b in c.elems() {
                    let sum = a.add(b).sub_int(1);
                    prop_assert!(sum < c.floor() || c.contains(&sum));
                }
            }
        }
    }

    #[test]
    fn bar_b_examples() {
        // B = {-1/2}: max of the lattice is beta + 1 = 1/2
        let b = set(&[(-1, 2)], -3);
        let dbar = closure_delta(&set(&[(-1, 1)], -3)).unwrap();
        let bar = build_bar_b(&b, &dbar).unwrap();
        assert_eq!(bar.max(), Some(exp(1, 2)));
        // B = {0}: lattice contains 1, 0, -1, ... with max 1
        let b = set(&[(0, 1)], -3);
        let dbar = closure_delta(&set(&[(0, 1)], -3)).unwrap();
        let bar = build_bar_b(&b, &dbar).unwrap();
        assert_eq!(bar.max(), Some(exp(1, 1)));
        for k in -3..=1 {
            assert!(bar.contains(&exp(k, 1)), "missing {k}");
        }
        // property (iii): the -1 shift of delta-bar is inside
        for dp in dbar.elems() {
            let z = dp.sub_int(1);
            if z >= bar.floor() {
                assert!(bar.contains(&z));
            }
        }
    }

    #[test]
    fn miura_symbol_examples() {
        // r = 0 -> 0
        let q = miura_symbol(&Symbol::zero(Side::Plus)).unwrap();
        assert!(q.terms().is_empty());
        // r = a0 x^{1/3} -> a0^2 x^{2/3} + (a0/3) x^{-2/3}
        let a0 = 1.7;
        let r = Symbol::single(Side::Plus, exp(1, 3), a0);
        let q = miura_symbol(&r).unwrap();
        assert_eq!(q.terms().len(), 2);
        assert_eq!(q.terms()[0].exponent, exp(2, 3));
        assert!((q.terms()[0].coeff.initial() - a0 * a0).abs() < 1e-15);
        assert_eq!(q.terms()[1].exponent, exp(-2, 3));
        assert!((q.terms()[1].coeff.initial() - a0 / 3.0).abs() < 1e-15);
        // r = c x^{-1} -> (c^2 - c) x^{-2}
        let c = 0.4;
        let r = Symbol::single(Side::Plus, exp(-1, 1), c);
        let q = miura_symbol(&r).unwrap();
        assert_eq!(q.terms().len(), 1);
        assert_eq!(q.terms()[0].exponent, exp(-2, 1));
        assert!((q.terms()[0].coeff.initial() - (c * c - c)).abs() < 1e-15);
        // minus side: r = a0 (-x)^{1/3} -> a0^2 (-x)^{2/3} - (a0/3) (-x)^{-2/3}
        let r = Symbol::single(Side::Minus, exp(1, 3), a0);
        let q = miura_symbol(&r).unwrap();
        assert!((q.coeff_at(&exp(2, 3)).unwrap().initial() - a0 * a0).abs() < 1e-15);
        assert!((q.coeff_at(&exp(-2, 3)).unwrap().initial() + a0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn integrate_symbol_examples() {
        // b0 x^{1/2} -> (2 b0/3) x^{3/2}
        let s = Symbol::single(Side::Plus, exp(1, 2), 0.9);
        let star = integrate_symbol(&s);
        assert_eq!(star.power.terms()[0].exponent, exp(3, 2));
        assert!((star.power.terms()[0].coeff.initial() - 0.6).abs() < 1e-15);
        assert!(star.log_coeff.is_zero());
        // x^{-1} -> log
        let s = Symbol::single(Side::Plus, exp(-1, 1), 1.0);
        let star = integrate_symbol(&s);
        assert!(star.power.terms().is_empty());
        assert!((star.log_coeff.initial() - 1.0).abs() < 1e-15);
        // x^{-2} -> -x^{-1}, const slot 0
        let s = Symbol::single(Side::Plus, exp(-2, 1), 1.0);
        let star = integrate_symbol(&s);
        assert_eq!(star.power.terms()[0].exponent, exp(-1, 1));
        assert!((star.power.terms()[0].coeff.initial() + 1.0).abs() < 1e-15);
        assert!(star.constant.is_zero());
    }

    proptest! {
        #[test]
        fn derivative_undoes_integration(
            nums in proptest::collection::vec(-8i64..=1, 1..5),
            dens in proptest::collection::vec(1i64..=3, 1..5),
            coeffs in proptest::collection::vec(-2.0f64..2.0, 1..5),
        ) {
            let terms: Vec<SymbolTerm> = nums
                .iter()
                .zip(&dens)
                .zip(&coeffs)
                .map(|((&n, &d), &c)| SymbolTerm { exponent: exp(n, d), coeff: Coefficient::Const(c) })
                .collect();
            let s = Symbol::new(Side::Plus, Exponent::int(-8), terms);
            let back = derivative_star(&integrate_symbol(&s));
            // exponent matching is exact; coefficients are floats
            prop_assert_eq!(back.terms().len(), s.terms().len());
            for (a, b) in back.terms().iter().zip(s.terms()) {
                prop_assert_eq!(a.exponent, b.exponent);
                prop_assert!((a.coeff.initial() - b.coeff.initial()).abs() <= 1e-15 * b.coeff.initial().abs());
            }
        }
    }

    #[test]
    fn beta_gate_examples() {
        let r = Symbol::single(Side::Plus, exp(1, 3), 1.0);
        assert_eq!(beta_gate(&r, false), GateOutcome::Pass);
        // beta = 3/5: witness 9/5 > 8/5
        let r = Symbol::single(Side::Plus, exp(3, 5), 1.0);
        match beta_gate(&r, false) {
            GateOutcome::Reject { witness, bound } => {
                assert_eq!(witness, exp(9, 5));
                assert_eq!(bound, exp(8, 5));
            }
            GateOutcome::Pass => panic!("must reject"),
        }
        // beta = 1/2 passes only with the o-class flag
        let r = Symbol::single(Side::Plus, exp(1, 2), 1.0);
        assert!(matches!(beta_gate(&r, false), GateOutcome::Reject { .. }));
        assert_eq!(beta_gate(&r, true), GateOutcome::Pass);
    }

    fn t_grid(nt: usize, t_max: f64) -> Vec<f64> {
        (0..nt).map(|i| t_max * i as f64 / (nt - 1) as f64).collect()
    }

    #[test]
    fn evolution_with_zero_background_is_constant() {
        let r0 = Symbol::single(Side::Plus, exp(1, 3), 1.3);
        let p0 = integrate_symbol(&r0);
        let q = Symbol::zero(Side::Plus);
        let ev = formal_evolution(&p0, &q, &t_grid(11, 1.0)).unwrap();
        for term in ev.chi.power.terms() {
            if let Coefficient::Sampled(v) = &term.coeff {
                for w in v.windows(2) {
                    assert_eq!(w[0], w[1]);
                }
            }
        }
        assert!(ev.system.rows.iter().all(|r| r.is_empty()));
    }

    #[test]
    fn evolution_of_cube_root_data_matches_quadrature_oracle() {
        // r0 = x^{1/3}: p0 has leading (3/4) x^{4/3}; q = x^{2/3} + (1/3) x^{-2/3}
        let r0 = Symbol::single(Side::Plus, exp(1, 3), 1.0);
        let p0 = integrate_symbol(&r0);
        assert_eq!(p0.power.terms()[0].exponent, exp(4, 3));
        assert!((p0.power.terms()[0].coeff.initial() - 0.75).abs() < 1e-15);
        let q = miura_symbol(&r0).unwrap();
        let grid = t_grid(101, 1.0);
        let ev = formal_evolution(&p0, &q, &grid).unwrap();

        // leading coefficient is independent of t (structurally empty row)
        assert!(ev.system.rows[0].is_empty());
        let lead = ev.chi.power.coeff_at(&exp(4, 3)).unwrap();
        for i in 0..grid.len() {
            assert_eq!(lead.at_index(i), 0.75);
        }

        // independent oracle for the x^1 row: brute-force scan of all
        // exponent products, then Simpson quadrature of the assembled rhs
        let mut rhs_const = 0.0;
        for qt in q.terms() {
            for ct in ev.chi.power.terms() {
                if qt.exponent.add(&ct.exponent).sub_int(1) == exp(1, 1) {
                    // contribution 2 c_i e_n a_n with a_n constant = initial
                    rhs_const +=
                        2.0 * qt.coeff.initial() * ct.exponent.to_f64() * ct.coeff.initial();
                }
            }
            if qt.exponent.sub_int(1) == exp(1, 1) {
                rhs_const += 2.0 * qt.coeff.initial() * 0.0 - qt.exponent.to_f64() * qt.coeff.initial();
            }
        }
        assert!((rhs_const - 2.0).abs() < 1e-14, "assembled rhs {rhs_const}");
        let a1 = ev.chi.power.coeff_at(&exp(1, 1)).unwrap();
        for (i, &t) in grid.iter().enumerate() {
            let oracle = rhs_const * t; // quadrature of a constant rhs
            assert!(
                (a1.at_index(i) - oracle).abs() <= 1e-10,
                "t = {t}: {} vs {oracle}",
                a1.at_index(i)
            );
        }
    }

    #[test]
    fn evolution_minus_side_mirrors_plus() {
        let r0 = Symbol::single(Side::Minus, exp(1, 3), 1.0);
        let p0 = integrate_symbol(&r0);
        assert!((p0.power.terms()[0].coeff.initial() + 0.75).abs() < 1e-15);
        let q = miura_symbol(&r0).unwrap();
        let grid = t_grid(51, 0.5);
        let ev = formal_evolution(&p0, &q, &grid).unwrap();
        let a1 = ev.chi.power.coeff_at(&exp(1, 1)).unwrap();
        // rhs = -2 c_{2/3} (4/3) a_{4/3} = -2 (4/3)(-3/4) = 2, so a_1 = 2t
        assert!((a1.at_index(50) - 2.0 * 0.5).abs() < 1e-10);
    }

    #[test]
    fn evolution_system_is_strictly_triangular() {
        let r0 = Symbol::new(
            Side::Plus,
            Exponent::int(-5),
            vec![
                SymbolTerm { exponent: exp(1, 3), coeff: Coefficient::Const(0.8) },
                SymbolTerm { exponent: exp(-1, 2), coeff: Coefficient::Const(-0.4) },
            ],
        );
        let p0 = integrate_symbol(&r0);
        let q = miura_symbol(&r0).unwrap();
        let ev = formal_evolution(&p0, &q, &t_grid(21, 0.2)).unwrap();
        for (k, row) in ev.system.rows.iter().enumerate() {
            for term in row {
                if let Some(n) = term.state {
                    assert!(n < k, "row {k} references state {n}");
                }
            }
        }
        assert!(ev.system.rows[0].is_empty());
    }

    #[test]
    fn evolution_rejects_beta_above_half() {
        let r0 = Symbol::single(Side::Plus, exp(3, 5), 1.0);
        let p0 = integrate_symbol(&r0);
        // an off-fiber background with delta < 1 so only the beta gate fires
        let q = Symbol::single(Side::Plus, exp(1, 2), 1.0);
        match formal_evolution(&p0, &q, &t_grid(11, 1.0)) {
            Err(Error::NoFormalSolution { witness, bound }) => {
                assert_eq!(witness, "9/5");
                assert_eq!(bound, "8/5");
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn log_coefficient_drives_forcing_and_stays_constant() {
        // p0 = log x (a_* = 1), q = c x^{-1}: the forcing row at x^{-2}
        // gets (2 a_* - delta) c = (2 + 1) c, and a_* itself never moves
        let p0 = StarSymbol {
            power: Symbol::zero(Side::Plus),
            log_coeff: Coefficient::Const(1.0),
            constant: Coefficient::Const(0.0),
        };
        let c = 0.3;
        let q = Symbol::single(Side::Plus, exp(-1, 1), c);
        let grid = t_grid(41, 1.0);
        let ev = formal_evolution(&p0, &q, &grid).unwrap();
        assert_eq!(ev.chi.log_coeff.initial(), 1.0);
        let a = ev.chi.power.coeff_at(&exp(-2, 1)).unwrap();
        let expect = (2.0 * 1.0 + 1.0) * c; // delta = -1
        assert!((a.at_index(40) - expect).abs() < 1e-12);
    }

    #[test]
    fn symbol_eval_and_sides() {
        let z = Symbol::zero(Side::Plus);
        assert_eq!(symbol_eval(&z, 0, 3.0, 10).unwrap(), 0.0);
        let s = Symbol::single(Side::Plus, exp(1, 2), 2.0);
        assert!((symbol_eval(&s, 0, 4.0, 1).unwrap() - 4.0).abs() < 1e-15);
        assert!(symbol_eval(&s, 0, -4.0, 1).is_err());
        assert!(symbol_eval(&s, 0, 0.5, 1).is_err());
        let m = Symbol::single(Side::Minus, exp(2, 1), 1.5);
        assert!((symbol_eval(&m, 0, -3.0, 1).unwrap() - 13.5).abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip_matches_schema() {
        let text = r#"{"side":"+","floor":{"num":-6,"den":1},
            "terms":[{"exp":{"num":1,"den":3},"coeff":[0.5,0.6,0.7]}],
            "log":0.0,"const":0.0}"#;
        let star = StarSymbol::from_json(text).unwrap();
        assert_eq!(star.power.terms().len(), 1);
        assert_eq!(star.power.terms()[0].exponent, exp(1, 3));
        assert_eq!(star.power.terms()[0].coeff.at_index(2), 0.7);
        let back = StarSymbol::from_json(&star.to_json()).unwrap();
        assert_eq!(back, star);
        // plain symbols reject log/const payloads
        let with_log = r#"{"side":"+","floor":{"num":-6,"den":1},
            "terms":[],"log":1.0,"const":0.0}"#;
        assert!(Symbol::from_json(with_log).is_err());
    }
}
