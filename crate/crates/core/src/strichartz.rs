//! Admissible pairs and discrete mixed space-time norms.
//!
//! Time integrals use the trapezoid rule on `‖f(t)‖_{L^r}^q` over the
//! snapshot times. Interval endpoints that fall between snapshots are
//! handled by linear interpolation of that same integrand, so an interval
//! split at any point is exactly additive.

use std::fmt;
use std::str::FromStr;

pub use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::equations::EquationSpec;
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::integrator::Trajectory;
use crate::spectral::{density_lp_norm, gradient_magnitude};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational64),
    Infinite,
}

impl Exponent {
    pub fn int(n: i64) -> Self {
        Exponent::Finite(Rational64::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent::Finite(Rational64::new(num, den))
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> Rational64 {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinite => Rational64::from_integer(0),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => *p.numer() as f64 / *p.denom() as f64,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// Hölder conjugate `p' = p/(p-1)`; `1' = ∞`.
    pub fn dual(&self) -> Self {
        let one = Rational64::from_integer(1);
        let inv = one - self.reciprocal();
        if inv == Rational64::from_integer(0) {
            Exponent::Infinite
        } else {
            Exponent::Finite(inv.recip())
        }
    }

    fn at_least(&self, bound: i64) -> bool {
        match self {
            Exponent::Finite(p) => *p >= Rational64::from_integer(bound),
            Exponent::Infinite => true,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) if *p.denom() == 1 => write!(f, "{}", p.numer()),
            Exponent::Finite(p) => write!(f, "{}/{}", p.numer(), p.denom()),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinite);
        }
        let bad = || Error::Format(format!("bad exponent `{s}`"));
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => (s.parse().map_err(|_| bad())?, 1),
        };
        if den == 0 {
            return Err(bad());
        }
        Ok(Exponent::ratio(num, den))
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Time exponent `q`, space exponent `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LebesguePair {
    pub q: Exponent,
    pub r: Exponent,
}

impl LebesguePair {
    pub const fn new(q: Exponent, r: Exponent) -> Self {
        Self { q, r }
    }

    pub fn dual(&self) -> Self {
        Self::new(self.q.dual(), self.r.dual())
    }
}

impl fmt::Display for LebesguePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.r)
    }
}

/// `2/q + n/r = n/2`, `q, r ≥ 2`, and `(q, r, n) ≠ (2, ∞, 2)`.
pub fn is_admissible(q: Exponent, r: Exponent, n: usize) -> bool {
    if n == 0 || !q.at_least(2) || !r.at_least(2) {
        return false;
    }
    if n == 2 && q == Exponent::int(2) && r == Exponent::Infinite {
        return false;
    }
    let n = Rational64::from_integer(n as i64);
    Rational64::from_integer(2) * q.reciprocal() + n * r.reciprocal() == n / 2
}

/// The pairs used for `n = 4`.
pub fn pairs_n4() -> Vec<LebesguePair> {
    vec![
        LebesguePair::new(Exponent::int(2), Exponent::int(4)),
        LebesguePair::new(Exponent::int(6), Exponent::ratio(12, 5)),
        LebesguePair::new(Exponent::Infinite, Exponent::int(2)),
    ]
}

/// The pairs used for `n = 3`.
pub fn pairs_n3() -> Vec<LebesguePair> {
    vec![
        LebesguePair::new(Exponent::int(2), Exponent::int(6)),
        LebesguePair::new(Exponent::ratio(8, 3), Exponent::int(4)),
        LebesguePair::new(Exponent::ratio(20, 7), Exponent::ratio(30, 8)),
        LebesguePair::new(Exponent::int(5), Exponent::ratio(30, 11)),
        LebesguePair::new(Exponent::int(10), Exponent::ratio(30, 13)),
        LebesguePair::new(Exponent::int(20), Exponent::ratio(15, 7)),
        LebesguePair::new(Exponent::Infinite, Exponent::int(2)),
    ]
}

pub fn pairs_for(dim: usize) -> Result<Vec<LebesguePair>> {
    match dim {
        3 => Ok(pairs_n3()),
        4 => Ok(pairs_n4()),
        _ => Err(Error::param("dim", format!("no pair list for n = {dim}"))),
    }
}

/// The pair defining `Ẋ¹`: `(6, 12/5)` for `n = 4`, `(10, 30/13)` for `n = 3`.
pub fn x1_pair(dim: usize) -> Result<LebesguePair> {
    match dim {
        3 => Ok(LebesguePair::new(Exponent::int(10), Exponent::ratio(30, 13))),
        4 => Ok(LebesguePair::new(Exponent::int(6), Exponent::ratio(12, 5))),
        _ => Err(Error::param("dim", format!("no Ẋ¹ pair for n = {dim}"))),
    }
}

/// `L^p_{t,x}` with `p = 2(n+2)/(n-2)`.
pub fn critical_pair(dim: usize) -> Result<LebesguePair> {
    if !(3..=4).contains(&dim) {
        return Err(Error::param("dim", format!("no critical pair for n = {dim}")));
    }
    let p = Exponent::ratio(2 * (dim as i64 + 2), dim as i64 - 2);
    Ok(LebesguePair::new(p, p))
}

fn finite_q(q: Exponent) -> Result<Option<f64>> {
    match q {
        Exponent::Infinite => Ok(None),
        Exponent::Finite(_) => {
            let v = q.to_f64();
            if v < 1.0 {
                return Err(Error::InvalidExponent(v));
            }
            Ok(Some(v))
        }
    }
}

/// Running `∫‖f(t)‖^q dt` over appended samples.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedNormAccumulator {
    pair: LebesguePair,
    times: Vec<f64>,
    values: Vec<f64>,
    integrated: f64,
}

impl MixedNormAccumulator {
    pub fn new(pair: LebesguePair) -> Result<Self> {
        finite_q(pair.q)?;
        if !pair.r.at_least(1) {
            return Err(Error::InvalidExponent(pair.r.to_f64()));
        }
        Ok(Self {
            pair,
            times: Vec::new(),
            values: Vec::new(),
            integrated: 0.0,
        })
    }

    pub fn pair(&self) -> LebesguePair {
        self.pair
    }

    /// Append the spatial norm at time `t`.
    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::param("value", format!("spatial norm must be finite and nonnegative, got {value}")));
        }
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::param("t", format!("times must increase, got {t} after {last}")));
            }
            match finite_q(self.pair.q)? {
                Some(q) => {
                    let prev = *self.values.last().expect("nonempty");
                    self.integrated += 0.5 * (t - last) * (prev.powf(q) + value.powf(q));
                }
                None => self.integrated = self.integrated.max(value),
            }
        } else if self.pair.q == Exponent::Infinite {
            self.integrated = value;
        }
        self.times.push(t);
        self.values.push(value);
        Ok(())
    }

    pub fn samples(&self) -> (&[f64], &[f64]) {
        (&self.times, &self.values)
    }

    /// `∫‖f‖^q dt` so far (the running max for `q = ∞`).
    pub fn integrated(&self) -> f64 {
        self.integrated
    }

    pub fn norm(&self) -> Result<f64> {
        match finite_q(self.pair.q)? {
            None if self.times.is_empty() => Err(Error::InsufficientSampling("no samples".into())),
            None => Ok(self.integrated),
            Some(_) if self.times.len() < 2 => Err(Error::InsufficientSampling(format!(
                "{} sample(s); a finite time exponent needs at least 2",
                self.times.len()
            ))),
            Some(q) => Ok(self.integrated.powf(1.0 / q)),
        }
    }
}

fn time_tol(times: &[f64]) -> f64 {
    let span = times.last().copied().unwrap_or(0.0) - times.first().copied().unwrap_or(0.0);
    1e-9 * span.abs().max(f64::MIN_POSITIVE)
}

/// Indices `lo..=hi` of the snapshots bracketing `[a, b]`.
fn bracket(times: &[f64], a: f64, b: f64) -> Result<(usize, usize)> {
    let (lo_t, hi_t) = match (times.first(), times.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(Error::InsufficientSampling("empty trajectory".into())),
    };
    let tol = time_tol(times);
    if !(a <= b) || a < lo_t - tol || b > hi_t + tol {
        return Err(Error::IntervalOutOfRange { a, b, lo: lo_t, hi: hi_t });
    }
    let lo = times.iter().rposition(|&t| t <= a + tol).unwrap_or(0);
    let hi = times.iter().position(|&t| t >= b - tol).unwrap_or(times.len() - 1);
    Ok((lo, hi))
}

fn count_inside(times: &[f64], a: f64, b: f64) -> usize {
    let tol = time_tol(times);
    times.iter().filter(|&&t| t >= a - tol && t <= b + tol).count()
}

/// Time integral of a sampled profile `g ≥ 0` over `[a, b]` by the
/// trapezoid rule, interpolating `g` linearly at interior endpoints.
pub fn trapezoid_on(times: &[f64], g: &[f64], a: f64, b: f64) -> Result<f64> {
    if times.len() != g.len() {
        return Err(Error::Format("times and samples differ in length".into()));
    }
    let (lo, hi) = bracket(times, a, b)?;
    let tol = time_tol(times);
    let at = |t: f64, i: usize| -> f64 {
        if i + 1 >= times.len() || (t - times[i]).abs() <= tol {
            g[i]
        } else if (t - times[i + 1]).abs() <= tol {
            g[i + 1]
        } else {
            let s = (t - times[i]) / (times[i + 1] - times[i]);
            g[i] + s * (g[i + 1] - g[i])
        }
    };
    let mut total = 0.0;
    for i in lo..hi {
        let t0 = times[i].max(a);
        let t1 = times[i + 1].min(b);
        if t1 > t0 {
            total += 0.5 * (t1 - t0) * (at(t0, i) + at(t1, i));
        }
    }
    Ok(total)
}

/// `(∫_a^b n(t)^q dt)^{1/q}` from sampled spatial norms `n(t)`; the max
/// over samples in `[a, b]` when `q = ∞`.
pub fn mixed_norm_samples(times: &[f64], norms: &[f64], q: Exponent, a: f64, b: f64) -> Result<f64> {
    bracket(times, a, b)?;
    let inside = count_inside(times, a, b);
    match finite_q(q)? {
        None => {
            if inside == 0 {
                return Err(Error::InsufficientSampling(format!("no snapshot in [{a}, {b}]")));
            }
            let tol = time_tol(times);
            Ok(times
                .iter()
                .zip(norms)
                .filter(|(&t, _)| t >= a - tol && t <= b + tol)
                .map(|(_, &v)| v)
                .fold(0.0, f64::max))
        }
        Some(qf) => {
            if inside < 2 {
                return Err(Error::InsufficientSampling(format!(
                    "{inside} snapshot(s) in [{a}, {b}]; a finite time exponent needs at least 2"
                )));
            }
            let g: Vec<f64> = norms.iter().map(|v| v.powf(qf)).collect();
            Ok(trapezoid_on(times, &g, a, b)?.powf(1.0 / qf))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldSelector {
    Value,
    Gradient,
}

/// Pointwise densities (|v| or |∇v|) of the snapshots bracketing `[a, b]`,
/// reduced to one spatial norm per requested exponent.
fn norm_table<F>(traj: &Trajectory, interval: (f64, f64), rs: &[Exponent], density: F) -> Result<(Vec<f64>, Vec<Vec<f64>>)>
where
    F: Fn(&ComplexField) -> Vec<f64>,
{
    traj.require_fields()?;
    let (a, b) = interval;
    let (lo, hi) = bracket(traj.timestamps(), a, b)?;
    let grid = traj.grid();
    let mut table = vec![Vec::with_capacity(hi - lo + 1); rs.len()];
    for snap in &traj.snapshots()[lo..=hi] {
        let d = density(snap);
        for (row, r) in table.iter_mut().zip(rs) {
            row.push(density_lp_norm(grid, &d, r.to_f64())?);
        }
    }
    Ok((traj.timestamps()[lo..=hi].to_vec(), table))
}

fn selector_density(selector: FieldSelector) -> impl Fn(&ComplexField) -> Vec<f64> {
    move |f| match selector {
        FieldSelector::Value => f.values().iter().map(|z| z.norm()).collect(),
        FieldSelector::Gradient => gradient_magnitude(f),
    }
}

/// `‖f‖_{L^q_t L^r_x([a,b])}` with `f = v` or `f = |∇v|`.
pub fn mixed_norm(traj: &Trajectory, selector: FieldSelector, pair: LebesguePair, interval: (f64, f64)) -> Result<f64> {
    finite_q(pair.q)?;
    let (times, table) = norm_table(traj, interval, &[pair.r], selector_density(selector))?;
    mixed_norm_samples(&times, &table[0], pair.q, interval.0, interval.1)
}

pub fn x1_norm(traj: &Trajectory, interval: (f64, f64)) -> Result<f64> {
    mixed_norm(traj, FieldSelector::Gradient, x1_pair(traj.grid().dim())?, interval)
}

/// `‖∇v‖_{L^q_t L^r_x}` for each pair, sharing one gradient per snapshot.
pub fn gradient_pair_norms(traj: &Trajectory, pairs: &[LebesguePair], interval: (f64, f64)) -> Result<Vec<f64>> {
    for p in pairs {
        finite_q(p.q)?;
    }
    let rs: Vec<Exponent> = pairs.iter().map(|p| p.r).collect();
    let (times, table) = norm_table(traj, interval, &rs, gradient_magnitude)?;
    pairs
        .iter()
        .zip(&table)
        .map(|(pair, row)| mixed_norm_samples(&times, row, pair.q, interval.0, interval.1))
        .collect()
}

/// Max over the dimension's pair list of `‖∇v‖_{L^q_t L^r_x}`.
pub fn s1_finite_norm(traj: &Trajectory, interval: (f64, f64)) -> Result<f64> {
    let pairs = pairs_for(traj.grid().dim())?;
    Ok(gradient_pair_norms(traj, &pairs, interval)?.into_iter().fold(0.0, f64::max))
}

/// One term `‖ |v|^power |∇v| ‖` of the Ṅ⁰ proxy, with its dual pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProxyTerm {
    pub power: u32,
    pub pair: LebesguePair,
    pub value: f64,
}

/// The Hölder decomposition of the forcing gradient used by the proxy:
/// `(power of |v|, dual pair)`.
pub fn proxy_terms(spec: &EquationSpec) -> Result<Vec<(u32, LebesguePair)>> {
    let l1l2 = LebesguePair::new(Exponent::int(1), Exponent::int(2));
    match spec {
        EquationSpec::Gp4 => Ok(vec![
            (1, LebesguePair::new(Exponent::ratio(6, 5), Exponent::ratio(12, 7))),
            (0, l1l2),
        ]),
        EquationSpec::Cq3 { .. } => Ok(vec![
            (3, LebesguePair::new(Exponent::ratio(20, 13), Exponent::ratio(30, 22))),
            (2, LebesguePair::new(Exponent::ratio(5, 4), Exponent::ratio(30, 19))),
            (1, LebesguePair::new(Exponent::ratio(20, 19), Exponent::ratio(30, 16))),
            (0, l1l2),
        ]),
        EquationSpec::EnergyCritical { .. } => Err(Error::param(
            "spec",
            "the Ṅ⁰ proxy is defined for GP4 and CQ3",
        )),
    }
}

/// Per-term values of the Ṅ⁰ proxy over `[a, b]`.
pub fn n0_proxy_terms(traj: &Trajectory, interval: (f64, f64), spec: &EquationSpec) -> Result<Vec<ProxyTerm>> {
    if spec.dim() != traj.grid().dim() {
        return Err(Error::GridMismatch(format!(
            "{} proxy on a {}-dimensional trajectory",
            spec.label(),
            traj.grid().dim()
        )));
    }
    let terms = proxy_terms(spec)?;
    traj.require_fields()?;
    let (a, b) = interval;
    let (lo, hi) = bracket(traj.timestamps(), a, b)?;
    let times = &traj.timestamps()[lo..=hi];
    let grid = traj.grid();
    let mut table = vec![Vec::with_capacity(times.len()); terms.len()];
    for snap in &traj.snapshots()[lo..=hi] {
        let grad = gradient_magnitude(snap);
        for (row, (power, pair)) in table.iter_mut().zip(&terms) {
            let density: Vec<f64> = snap
                .values()
                .iter()
                .zip(&grad)
                .map(|(z, g)| z.norm().powi(*power as i32) * g)
                .collect();
            row.push(density_lp_norm(grid, &density, pair.r.to_f64())?);
        }
    }
    terms
        .iter()
        .zip(&table)
        .map(|(&(power, pair), row)| {
            Ok(ProxyTerm {
                power,
                pair,
                value: mixed_norm_samples(times, row, pair.q, a, b)?,
            })
        })
        .collect()
}

/// Sum of the dual-pair norms of the forcing gradient decomposition.
pub fn n0_proxy(traj: &Trajectory, interval: (f64, f64), spec: &EquationSpec) -> Result<f64> {
    Ok(n0_proxy_terms(traj, interval, spec)?.iter().map(|t| t.value).sum())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub eta: f64,
    pub q: f64,
    pub start: f64,
    /// Right endpoints of the chunks; the last is the end of the record.
    pub breakpoints: Vec<f64>,
    /// `(∫_chunk g)^{1/q}` per chunk.
    pub chunk_norms: Vec<f64>,
    /// `∫ g` per chunk.
    pub chunk_integrals: Vec<f64>,
    /// `∫ g` over the whole record.
    pub total_integral: f64,
}

impl Partition {
    pub fn chunks(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn total_norm(&self) -> f64 {
        self.total_integral.powf(1.0 / self.q)
    }
}

/// Upper limit on the number of chunks a partition may produce.
pub const MAX_CHUNKS: usize = 1_000_000;

/// Greedy split of a sampled, piecewise-linear profile `g(t) = ‖∇w(t)‖^q`
/// into chunks with `∫ g = η^q`; the remainder forms the last chunk.
pub fn partition_samples(times: &[f64], g: &[f64], q: f64, eta: f64) -> Result<Partition> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::param("eta", format!("must be positive, got {eta}")));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidExponent(q));
    }
    if times.len() != g.len() || times.is_empty() {
        return Err(Error::InsufficientSampling("need a nonempty sampled profile".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || g.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::Format("profile must have increasing times and finite nonnegative values".into()));
    }
    let budget = eta.powf(q);
    let whole: f64 = times
        .windows(2)
        .zip(g.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum();
    if whole / budget > MAX_CHUNKS as f64 {
        return Err(Error::param(
            "eta",
            format!(
                "{eta} would split the record into about {:.3e} chunks (limit {MAX_CHUNKS})",
                whole / budget
            ),
        ));
    }
    let end = *times.last().expect("nonempty");
    let tol = time_tol(times);
    let mut breakpoints = Vec::new();
    let mut chunk_integrals = Vec::new();
    let mut acc = 0.0;
    let mut total = 0.0;
    for i in 0..times.len() - 1 {
        let (mut t0, t1) = (times[i], times[i + 1]);
        let mut g0 = g[i];
        let slope = (g[i + 1] - g0) / (t1 - t0);
        loop {
            let seg = 0.5 * (t1 - t0) * (g0 + g[i + 1]);
            if acc + seg < budget {
                acc += seg;
                total += seg;
                break;
            }
            // Solve g0 τ + slope τ²/2 = budget - acc for τ in [0, t1 - t0].
            let need = budget - acc;
            let disc = (g0 * g0 + 2.0 * slope * need).max(0.0);
            let tau = (2.0 * need / (g0 + disc.sqrt())).min(t1 - t0);
            let tb = t0 + tau;
            breakpoints.push(tb);
            chunk_integrals.push(budget);
            total += need;
            acc = 0.0;
            g0 += slope * tau;
            t0 = tb;
            if t1 - t0 <= tol {
                break;
            }
        }
    }
    match breakpoints.last() {
        Some(&last) if end - last <= tol => {
            *breakpoints.last_mut().expect("nonempty") = end;
            if acc > 0.0 {
                *chunk_integrals.last_mut().expect("nonempty") += acc;
            }
        }
        _ => {
            breakpoints.push(end);
            chunk_integrals.push(acc);
        }
    }
    let chunk_norms = chunk_integrals.iter().map(|c| c.powf(1.0 / q)).collect();
    Ok(Partition {
        eta,
        q,
        start: times[0],
        breakpoints,
        chunk_norms,
        chunk_integrals,
        total_integral: total,
    })
}

/// Partition the whole record of `w` into chunks of `Ẋ¹` size `η`.
pub fn partition_by_x1(traj: &Trajectory, eta: f64) -> Result<Partition> {
    let pair = x1_pair(traj.grid().dim())?;
    let interval = (traj.start_time(), traj.end_time());
    let (times, table) = norm_table(traj, interval, &[pair.r], gradient_magnitude)?;
    let q = pair.q.to_f64();
    let g: Vec<f64> = table[0].iter().map(|v| v.powf(q)).collect();
    partition_samples(&times, &g, q, eta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_pairs_are_admissible() {
        for p in pairs_n4() {
            assert!(is_admissible(p.q, p.r, 4), "{p}");
        }
        for p in pairs_n3() {
            assert!(is_admissible(p.q, p.r, 3), "{p}");
        }
        assert!(!is_admissible(Exponent::int(2), Exponent::Infinite, 2));
        assert!(is_admissible(Exponent::int(4), Exponent::Infinite, 1));
    }

    #[test]
    fn perturbed_pairs_fail() {
        let bump = Rational64::new(1, 100);
        for (n, pairs) in [(4, pairs_n4()), (3, pairs_n3())] {
            for p in pairs {
                if let Exponent::Finite(q) = p.q {
                    assert!(!is_admissible(Exponent::Finite(q + bump), p.r, n));
                    assert!(!is_admissible(Exponent::Finite(q - bump), p.r, n));
                }
            }
        }
    }

    #[test]
    fn exponent_text_round_trip() {
        for e in [Exponent::ratio(12, 5), Exponent::int(6), Exponent::Infinite, Exponent::ratio(30, 8)] {
            assert_eq!(e.to_string().parse::<Exponent>().unwrap(), e);
        }
        assert!("1/0".parse::<Exponent>().is_err());
        assert_eq!(Exponent::ratio(12, 5).dual(), Exponent::ratio(12, 7));
        assert_eq!(Exponent::int(1).dual(), Exponent::Infinite);
    }

    #[test]
    fn critical_pairs() {
        assert_eq!(critical_pair(4).unwrap().q, Exponent::int(6));
        assert_eq!(critical_pair(3).unwrap().r, Exponent::int(10));
        assert!(x1_pair(5).is_err());
    }

    #[test]
    fn constant_profile() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let norms = vec![3.0; times.len()];
        let v = mixed_norm_samples(&times, &norms, Exponent::int(4), 0.0, 1.0).unwrap();
        assert!((v - 3.0).abs() < 1e-14);
        let v = mixed_norm_samples(&times, &norms, Exponent::int(2), 0.2, 0.6).unwrap();
        assert!((v - 3.0 * 0.4f64.sqrt()).abs() < 1e-14);
        let v = mixed_norm_samples(&times, &norms, Exponent::Infinite, 0.25, 0.55).unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn linear_profile_converges() {
        let n = 1000;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let v = mixed_norm_samples(&times, &times, Exponent::int(6), 0.0, 1.0).unwrap();
        let exact = (1.0f64 / 7.0).powf(1.0 / 6.0);
        assert!((v - exact).abs() < 1e-3 * exact);
    }

    #[test]
    fn sampling_errors() {
        let times = [0.0, 1.0, 2.0];
        let norms = [1.0, 1.0, 1.0];
        assert!(matches!(
            mixed_norm_samples(&times, &norms, Exponent::int(2), 0.0, 3.0),
            Err(Error::IntervalOutOfRange { .. })
        ));
        assert!(matches!(
            mixed_norm_samples(&times, &norms, Exponent::int(2), 0.2, 0.8),
            Err(Error::InsufficientSampling(_))
        ));
        assert!(matches!(
            mixed_norm_samples(&times, &norms, Exponent::ratio(1, 2), 0.0, 2.0),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn accumulator_matches_batch() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.02).collect();
        let norms: Vec<f64> = times.iter().map(|t| 1.0 + t * t).collect();
        let mut acc = MixedNormAccumulator::new(LebesguePair::new(Exponent::int(3), Exponent::int(2))).unwrap();
        let mut last = 0.0;
        for (&t, &v) in times.iter().zip(&norms) {
            acc.push(t, v).unwrap();
            assert!(acc.integrated() >= last);
            last = acc.integrated();
        }
        let batch = mixed_norm_samples(&times, &norms, Exponent::int(3), 0.0, times[49]).unwrap();
        assert!((acc.norm().unwrap() - batch).abs() < 1e-13 * batch);
        assert!(acc.push(0.5, 1.0).is_err());
    }

    #[test]
    fn synthetic_partition_breakpoints() {
        let n = 10_000;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let g: Vec<f64> = times.iter().map(|t| 2.0 * t).collect();
        let q = 6.0;
        let p = partition_samples(&times, &g, q, 0.25f64.powf(1.0 / q)).unwrap();
        let want = [0.5, 0.5f64.sqrt(), 0.75f64.sqrt(), 1.0];
        assert_eq!(p.chunks(), 4);
        for (b, w) in p.breakpoints.iter().zip(want) {
            assert!((b - w).abs() < 1e-3, "{b} vs {w}");
        }
        let sum: f64 = p.chunk_integrals.iter().sum();
        assert!((sum - 1.0).abs() < 1e-10);
        assert!((p.total_integral - 1.0).abs() < 1e-10);
    }

    #[test]
    fn uniform_partition_and_single_chunk() {
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        let g = vec![4.0; times.len()];
        let p = partition_samples(&times, &g, 2.0, 1.0).unwrap();
        // Breakpoints every η^q / a = 0.25.
        for (j, b) in p.breakpoints.iter().enumerate() {
            assert!((b - 0.25 * (j + 1) as f64).abs() < 1e-12);
        }
        let p = partition_samples(&times, &g, 2.0, 10.0).unwrap();
        assert_eq!(p.breakpoints, vec![1.0]);
        assert!(p.chunk_norms[0] < 10.0);
        assert!(partition_samples(&times, &g, 2.0, 1e-4).is_err());
    }
}
