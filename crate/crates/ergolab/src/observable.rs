//! Exact observables: rational step functions on `[0,1)` and finitely
//! supported trigonometric polynomials on the torus character lattice.
//!
//! Step functions pair with the one-dimensional systems (identity, cyclic
//! shift, rotation, rank-one tower), trigonometric polynomials with torus
//! automorphisms; each class is closed under its system family's Koopman
//! action with no approximation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::IntervalSet;
use crate::rat::{
    conj, crat, int_from_json, int_to_json, norm_sqr, rat_from_json, rat_to_json, CRat, Rat,
};

/// Piecewise-constant rational function on `[0,1)`.
///
/// Canonical form: `breakpoints[0] == 0`, breakpoints strictly increasing
/// in `[0,1)`, and no two consecutive pieces share a value. Piece `j`
/// covers `[breakpoints[j], breakpoints[j+1])` with the final piece running
/// to 1. Canonical form makes equality structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFunction {
    breakpoints: Vec<Rat>,
    values: Vec<Rat>,
}

impl StepFunction {
    pub fn constant(c: Rat) -> Self {
        StepFunction { breakpoints: vec![Rat::zero()], values: vec![c] }
    }

    pub fn zero() -> Self {
        Self::constant(Rat::zero())
    }

    pub fn indicator(set: &IntervalSet) -> Self {
        let mut breakpoints = vec![Rat::zero()];
        let mut values = vec![Rat::zero()];
        for (lo, hi) in set.pieces() {
            if lo.is_zero() {
                values[0] = Rat::one();
            } else {
                breakpoints.push(lo.clone());
                values.push(Rat::one());
            }
            if hi < &Rat::one() {
                breakpoints.push(hi.clone());
                values.push(Rat::zero());
            }
        }
        StepFunction { breakpoints, values }.canonicalized()
    }

    /// Build from raw piece data; breakpoints must start at 0 and be
    /// strictly increasing inside `[0,1)`.
    pub fn from_pieces(breakpoints: Vec<Rat>, values: Vec<Rat>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidParameter(
                "step function needs equally many breakpoints and values".into(),
            ));
        }
        if !breakpoints[0].is_zero() {
            return Err(Error::InvalidParameter(
                "first breakpoint must be 0".into(),
            ));
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidParameter(
                    "breakpoints must be strictly increasing".into(),
                ));
            }
        }
        if breakpoints.last().unwrap() >= &Rat::one() {
            return Err(Error::InvalidParameter(
                "breakpoints must lie in [0,1)".into(),
            ));
        }
        Ok(StepFunction { breakpoints, values }.canonicalized())
    }

    fn canonicalized(self) -> Self {
        let mut breakpoints = Vec::with_capacity(self.breakpoints.len());
        let mut values: Vec<Rat> = Vec::with_capacity(self.values.len());
        for (bp, v) in self.breakpoints.into_iter().zip(self.values) {
            match values.last() {
                Some(last) if *last == v => {}
                _ => {
                    breakpoints.push(bp);
                    values.push(v);
                }
            }
        }
        StepFunction { breakpoints, values }
    }

    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn eval(&self, x: &Rat) -> &Rat {
        debug_assert!(!x.is_negative() && x < &Rat::one());
        // last breakpoint <= x
        let mut lo = 0usize;
        let mut hi = self.breakpoints.len();
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if &self.breakpoints[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        &self.values[lo]
    }

    fn combine(&self, other: &StepFunction, op: impl Fn(&Rat, &Rat) -> Rat) -> StepFunction {
        let mut breakpoints = Vec::with_capacity(self.breakpoints.len() + other.breakpoints.len());
        let mut values = Vec::with_capacity(breakpoints.capacity());
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.breakpoints.len() || j < other.breakpoints.len() {
            let bp = match (self.breakpoints.get(i), other.breakpoints.get(j)) {
                (Some(a), Some(b)) => {
                    if a <= b {
                        a.clone()
                    } else {
                        b.clone()
                    }
                }
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            while i < self.breakpoints.len() && self.breakpoints[i] == bp {
                i += 1;
            }
            while j < other.breakpoints.len() && other.breakpoints[j] == bp {
                j += 1;
            }
            let left = &self.values[i - 1];
            let right = &other.values[j - 1];
            breakpoints.push(bp);
            values.push(op(left, right));
        }
        StepFunction { breakpoints, values }.canonicalized()
    }

    pub fn add(&self, other: &StepFunction) -> StepFunction {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &StepFunction) -> StepFunction {
        self.combine(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &StepFunction) -> StepFunction {
        self.combine(other, |a, b| a * b)
    }

    pub fn scale(&self, c: &Rat) -> StepFunction {
        StepFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
        .canonicalized()
    }

    pub fn integrate(&self) -> Rat {
        let mut acc = Rat::zero();
        for j in 0..self.values.len() {
            let hi = self
                .breakpoints
                .get(j + 1)
                .cloned()
                .unwrap_or_else(Rat::one);
            acc += &self.values[j] * (hi - &self.breakpoints[j]);
        }
        acc
    }

    /// Exact `∫ f·g` by a single merge sweep, without materializing `f·g`.
    pub fn integrate_product(&self, other: &StepFunction) -> Rat {
        let mut acc = Rat::zero();
        let (mut i, mut j) = (0usize, 0usize);
        let mut cursor = Rat::zero();
        loop {
            let next_i = self.breakpoints.get(i + 1);
            let next_j = other.breakpoints.get(j + 1);
            let next = match (next_i, next_j) {
                (Some(a), Some(b)) => a.min(b).clone(),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => Rat::one(),
            };
            acc += &self.values[i] * &other.values[j] * (&next - &cursor);
            if next == Rat::one() {
                return acc;
            }
            if let Some(a) = self.breakpoints.get(i + 1) {
                if *a == next {
                    i += 1;
                }
            }
            if let Some(b) = other.breakpoints.get(j + 1) {
                if *b == next {
                    j += 1;
                }
            }
            cursor = next;
        }
    }

    /// Shift the graph right by `t` on the circle: result(x) = self(x − t mod 1).
    pub fn translate_mod1(&self, t: &Rat) -> StepFunction {
        let shift = crate::rat::frac_mod1(t);
        if shift.is_zero() {
            return self.clone();
        }
        let one = Rat::one();
        let m = self.breakpoints.len();
        // new breakpoints = old + shift (mod 1); find the wrap split point
        let mut pairs: Vec<(Rat, Rat)> = Vec::with_capacity(m + 1);
        for (bp, v) in self.breakpoints.iter().zip(&self.values) {
            let nb = bp + &shift;
            let nb = if nb >= one { nb - &one } else { nb };
            pairs.push((nb, v.clone()));
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        // value on [0, first new breakpoint) comes from the piece wrapping across 1,
        // i.e. the piece whose shifted start is the largest
        if pairs[0].0 != Rat::zero() {
            let wrap_value = pairs.last().unwrap().1.clone();
            pairs.insert(0, (Rat::zero(), wrap_value));
        }
        let (breakpoints, values) = pairs.into_iter().unzip();
        StepFunction { breakpoints, values }.canonicalized()
    }

    pub fn sup_norm(&self) -> Rat {
        self.values
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn l2_norm_sq(&self) -> Rat {
        self.integrate_product(self)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// True when the function equals `c` everywhere on `[lo, hi)`.
    pub fn is_constant_on(&self, lo: &Rat, hi: &Rat, c: &Rat) -> bool {
        // first piece containing lo
        let mut j = match self.breakpoints.binary_search(lo) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        loop {
            if &self.values[j] != c {
                return false;
            }
            match self.breakpoints.get(j + 1) {
                Some(next) if next < hi => j += 1,
                _ => return true,
            }
        }
    }

    /// Nonzero cells of the function on the uniform grid of `cells` pieces,
    /// or `None` if some breakpoint is off-grid.
    pub fn grid_support(&self, cells: u64) -> Option<Vec<(u64, Rat)>> {
        let n = BigInt::from(cells);
        let mut out = Vec::new();
        let mut idx: Vec<u64> = Vec::with_capacity(self.breakpoints.len());
        for bp in &self.breakpoints {
            let scaled = bp * Rat::from_integer(n.clone());
            if !scaled.is_integer() {
                return None;
            }
            idx.push(u64::try_from(scaled.to_integer()).ok()?);
        }
        for j in 0..self.values.len() {
            if self.values[j].is_zero() {
                continue;
            }
            let hi = idx.get(j + 1).copied().unwrap_or(cells);
            for cell in idx[j]..hi {
                out.push((cell, self.values[j].clone()));
            }
        }
        Some(out)
    }
}

/// Lattice index of a character; one or two coordinates.
pub type LatticePoint = Vec<BigInt>;

pub fn lattice_point(coords: &[i64]) -> LatticePoint {
    coords.iter().map(|&c| BigInt::from(c)).collect()
}

/// Finitely supported function on the character lattice of the d-torus,
/// d ∈ {1, 2}; represents `f(x) = Σ_a c_a e^{2πi a·x}` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigPolynomial {
    dim: usize,
    coeffs: BTreeMap<LatticePoint, CRat>,
}

impl TrigPolynomial {
    pub fn zero(dim: usize) -> Self {
        TrigPolynomial { dim, coeffs: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: CRat) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![BigInt::zero(); dim], c);
        p
    }

    pub fn character(index: LatticePoint, coeff: CRat) -> Self {
        let dim = index.len();
        let mut p = Self::zero(dim);
        p.add_term(index, coeff);
        p
    }

    /// Real combination `c·(χ_a + χ_{−a})`, handy for zero-mean real tests.
    pub fn real_cosine(index: LatticePoint, c: Rat) -> Self {
        let dim = index.len();
        let mut p = Self::zero(dim);
        let neg: LatticePoint = index.iter().map(|x| -x).collect();
        p.add_term(index, crat(c.clone(), Rat::zero()));
        p.add_term(neg, crat(c, Rat::zero()));
        p
    }

    pub fn add_term(&mut self, index: LatticePoint, coeff: CRat) {
        assert_eq!(index.len(), self.dim, "lattice dimension mismatch");
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(index) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &BTreeMap<LatticePoint, CRat> {
        &self.coeffs
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &TrigPolynomial) -> Result<TrigPolynomial> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CRat) -> TrigPolynomial {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        TrigPolynomial {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(a, v)| (a.clone(), v.clone() * c.clone()))
                .collect(),
        }
    }

    /// Exact coefficient convolution: characters multiply by adding indices.
    pub fn mul(&self, other: &TrigPolynomial) -> Result<TrigPolynomial> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let idx: LatticePoint = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(idx, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn conjugate(&self) -> TrigPolynomial {
        TrigPolynomial {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(a, c)| (a.iter().map(|x| -x).collect(), conj(c)))
                .collect(),
        }
    }

    /// `∫ f dμ` is the coefficient at the zero lattice point.
    pub fn integrate(&self) -> CRat {
        let zero_idx = vec![BigInt::zero(); self.dim];
        self.coeffs
            .get(&zero_idx)
            .cloned()
            .unwrap_or_else(crate::rat::crat_zero)
    }

    /// Exact `∫ f·g` (no conjugation): ∫χ_a χ_b = [a + b = 0].
    pub fn integrate_product(&self, other: &TrigPolynomial) -> Result<CRat> {
        self.check_dim(other)?;
        let (small, large) = if self.term_count() <= other.term_count() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = crate::rat::crat_zero();
        for (a, ca) in &small.coeffs {
            let neg: LatticePoint = a.iter().map(|x| -x).collect();
            if let Some(cb) = large.coeffs.get(&neg) {
                acc = acc + ca.clone() * cb.clone();
            }
        }
        Ok(acc)
    }

    /// Hermitian inner product `⟨f, g⟩ = ∫ f·conj(g)` (Parseval, exact).
    pub fn inner(&self, other: &TrigPolynomial) -> Result<CRat> {
        self.check_dim(other)?;
        let mut acc = crate::rat::crat_zero();
        for (a, ca) in &self.coeffs {
            if let Some(cb) = other.coeffs.get(a) {
                acc = acc + ca.clone() * conj(cb);
            }
        }
        Ok(acc)
    }

    pub fn l2_norm_sq(&self) -> Rat {
        self.coeffs.values().map(norm_sqr).fold(Rat::zero(), |a, b| a + b)
    }

    /// Rational upper bound for the sup norm: the coefficient ℓ1 bound
    /// Σ (|Re c| + |Im c|) ≥ sup |f|. Exact sup norms of trig polynomials
    /// are transcendental in general; every inequality in this crate that
    /// consumes a sup norm remains valid with an upper bound.
    pub fn sup_norm_bound(&self) -> Rat {
        self.coeffs
            .values()
            .map(|c| c.re.abs() + c.im.abs())
            .fold(Rat::zero(), |a, b| a + b)
    }

    /// True when coefficients satisfy c(−a) = conj(c(a)).
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|(a, c)| {
            let neg: LatticePoint = a.iter().map(|x| -x).collect();
            match self.coeffs.get(&neg) {
                Some(d) => *d == conj(c),
                None => false,
            }
        })
    }

    fn check_dim(&self, other: &TrigPolynomial) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::ClassMismatch(format!(
                "lattice dimensions differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

/// An exact observable of either class.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    Step(StepFunction),
    Trig(TrigPolynomial),
}

impl Observable {
    pub fn indicator(set: &IntervalSet) -> Observable {
        Observable::Step(StepFunction::indicator(set))
    }

    /// χ_A − μ(A), the zero-mean indicator.
    pub fn centered_indicator(set: &IntervalSet) -> Observable {
        let ind = StepFunction::indicator(set);
        let mean = StepFunction::constant(set.measure());
        Observable::Step(ind.sub(&mean))
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            Observable::Step(_) => "step",
            Observable::Trig(_) => "trig",
        }
    }

    pub fn integrate(&self) -> CRat {
        match self {
            Observable::Step(f) => crat(f.integrate(), Rat::zero()),
            Observable::Trig(f) => f.integrate(),
        }
    }

    pub fn multiply(&self, other: &Observable) -> Result<Observable> {
        match (self, other) {
            (Observable::Step(a), Observable::Step(b)) => Ok(Observable::Step(a.mul(b))),
            (Observable::Trig(a), Observable::Trig(b)) => Ok(Observable::Trig(a.mul(b)?)),
            _ => Err(Error::ClassMismatch(
                "cannot multiply a step function by a trigonometric polynomial".into(),
            )),
        }
    }

    pub fn add(&self, other: &Observable) -> Result<Observable> {
        match (self, other) {
            (Observable::Step(a), Observable::Step(b)) => Ok(Observable::Step(a.add(b))),
            (Observable::Trig(a), Observable::Trig(b)) => Ok(Observable::Trig(a.add(b)?)),
            _ => Err(Error::ClassMismatch(
                "cannot add observables of different classes".into(),
            )),
        }
    }

    /// Exact `∫ f·g`, complex in general.
    pub fn integrate_product(&self, other: &Observable) -> Result<CRat> {
        match (self, other) {
            (Observable::Step(a), Observable::Step(b)) => {
                Ok(crat(a.integrate_product(b), Rat::zero()))
            }
            (Observable::Trig(a), Observable::Trig(b)) => a.integrate_product(b),
            _ => Err(Error::ClassMismatch(
                "cannot integrate a mixed-class product".into(),
            )),
        }
    }

    /// Hermitian inner product `⟨f, g⟩ = ∫ f·conj(g)`.
    pub fn inner(&self, other: &Observable) -> Result<CRat> {
        match (self, other) {
            (Observable::Step(a), Observable::Step(b)) => {
                Ok(crat(a.integrate_product(b), Rat::zero()))
            }
            (Observable::Trig(a), Observable::Trig(b)) => a.inner(b),
            _ => Err(Error::ClassMismatch(
                "cannot pair observables of different classes".into(),
            )),
        }
    }

    pub fn conjugate(&self) -> Observable {
        match self {
            Observable::Step(f) => Observable::Step(f.clone()),
            Observable::Trig(f) => Observable::Trig(f.conjugate()),
        }
    }

    pub fn l2_norm_sq(&self) -> Rat {
        match self {
            Observable::Step(f) => f.l2_norm_sq(),
            Observable::Trig(f) => f.l2_norm_sq(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        crate::rat::sqrt_to_f64(&self.l2_norm_sq())
    }

    /// Exact sup norm for step functions; coefficient ℓ1 upper bound for
    /// trigonometric polynomials (see [`TrigPolynomial::sup_norm_bound`]).
    pub fn sup_norm(&self) -> Rat {
        match self {
            Observable::Step(f) => f.sup_norm(),
            Observable::Trig(f) => f.sup_norm_bound(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Observable::Step(f) => f.is_zero(),
            Observable::Trig(f) => f.is_zero(),
        }
    }
}

impl serde::Serialize for StepFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = serde_json::json!({
            "breakpoints": self.breakpoints.iter().map(rat_to_json).collect::<Vec<_>>(),
            "values": self.values.iter().map(rat_to_json).collect::<Vec<_>>(),
        });
        v.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for StepFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let v = serde_json::Value::deserialize(d)?;
        let bps = v
            .get("breakpoints")
            .and_then(|x| x.as_array())
            .ok_or_else(|| D::Error::custom("step function needs breakpoints array"))?;
        let vals = v
            .get("values")
            .and_then(|x| x.as_array())
            .ok_or_else(|| D::Error::custom("step function needs values array"))?;
        let breakpoints: Vec<Rat> = bps
            .iter()
            .map(|x| rat_from_json(x).map_err(D::Error::custom))
            .collect::<std::result::Result<_, _>>()?;
        let values: Vec<Rat> = vals
            .iter()
            .map(|x| rat_from_json(x).map_err(D::Error::custom))
            .collect::<std::result::Result<_, _>>()?;
        StepFunction::from_pieces(breakpoints, values).map_err(D::Error::custom)
    }
}

fn lattice_key(index: &LatticePoint) -> String {
    index
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn lattice_from_key(key: &str, dim: usize) -> Result<LatticePoint> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != dim {
        return Err(Error::Descriptor(format!(
            "lattice key {key:?} does not have {dim} coordinates"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<BigInt>()
                .map_err(|e| Error::Descriptor(format!("bad lattice coordinate {p:?}: {e}")))
        })
        .collect()
}

impl serde::Serialize for TrigPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: serde_json::Map<String, serde_json::Value> = self
            .coeffs
            .iter()
            .map(|(a, c)| {
                (
                    lattice_key(a),
                    serde_json::Value::Array(vec![
                        int_to_json(c.re.numer()),
                        int_to_json(c.re.denom()),
                        int_to_json(c.im.numer()),
                        int_to_json(c.im.denom()),
                    ]),
                )
            })
            .collect();
        serde_json::json!({ "dim": self.dim, "coefficients": coeffs }).serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for TrigPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let v = serde_json::Value::deserialize(d)?;
        let dim = v
            .get("dim")
            .and_then(|x| x.as_u64())
            .filter(|&d| d == 1 || d == 2)
            .ok_or_else(|| D::Error::custom("trig polynomial needs dim 1 or 2"))? as usize;
        let coeffs = v
            .get("coefficients")
            .and_then(|x| x.as_object())
            .ok_or_else(|| D::Error::custom("trig polynomial needs coefficients map"))?;
        let mut poly = TrigPolynomial::zero(dim);
        for (key, val) in coeffs {
            let idx = lattice_from_key(key, dim).map_err(D::Error::custom)?;
            let arr = val
                .as_array()
                .filter(|a| a.len() == 4)
                .ok_or_else(|| D::Error::custom("coefficient must be [re_num, re_den, im_num, im_den]"))?;
            let re = Rat::new(
                int_from_json(&arr[0]).map_err(D::Error::custom)?,
                int_from_json(&arr[1]).map_err(D::Error::custom)?,
            );
            let im = Rat::new(
                int_from_json(&arr[2]).map_err(D::Error::custom)?,
                int_from_json(&arr[3]).map_err(D::Error::custom)?,
            );
            poly.add_term(idx, crat(re, im));
        }
        Ok(poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{crat_one, rat};

    fn interval(a: i64, b: i64, c: i64, d: i64) -> IntervalSet {
        IntervalSet::interval(rat(a, b), rat(c, d)).unwrap()
    }

    #[test]
    fn indicator_integrates_to_measure() {
        let a = interval(0, 1, 1, 4);
        let f = StepFunction::indicator(&a);
        assert_eq!(f.integrate(), rat(1, 4));
        assert_eq!(StepFunction::constant(rat(1, 1)).integrate(), rat(1, 1));
    }

    #[test]
    fn product_of_indicators_is_intersection_indicator() {
        let a = interval(0, 1, 1, 2);
        let b = interval(1, 4, 3, 4);
        let fa = StepFunction::indicator(&a);
        let fb = StepFunction::indicator(&b);
        assert_eq!(fa.mul(&fb), StepFunction::indicator(&a.intersect(&b)));
    }

    #[test]
    fn translate_matches_set_translation() {
        let a = interval(1, 8, 3, 8);
        let f = StepFunction::indicator(&a);
        for t in [rat(1, 3), rat(7, 8), rat(0, 1), rat(5, 6)] {
            let lhs = f.translate_mod1(&t);
            let rhs = StepFunction::indicator(&a.translate_mod1(&t));
            assert_eq!(lhs, rhs, "t = {t}");
        }
    }

    #[test]
    fn integrate_product_matches_materialized_product() {
        let f = StepFunction::from_pieces(
            vec![rat(0, 1), rat(1, 3), rat(2, 3)],
            vec![rat(1, 2), rat(-1, 1), rat(3, 4)],
        )
        .unwrap();
        let g = StepFunction::indicator(&interval(1, 4, 5, 6));
        assert_eq!(f.integrate_product(&g), f.mul(&g).integrate());
    }

    #[test]
    fn l2_norm_of_quarter_indicator() {
        let f = Observable::indicator(&interval(0, 1, 1, 4));
        assert_eq!(f.l2_norm_sq(), rat(1, 4));
        assert!((f.l2_norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn character_multiplication_adds_indices() {
        let a = TrigPolynomial::character(lattice_point(&[1, 0]), crat_one());
        let b = TrigPolynomial::character(lattice_point(&[0, 1]), crat_one());
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.term_count(), 1);
        assert!(ab.coeffs().contains_key(&lattice_point(&[1, 1])));
    }

    #[test]
    fn character_orthogonality() {
        let a = TrigPolynomial::character(lattice_point(&[3]), crat_one());
        assert!(a.integrate().is_zero());
        let b = TrigPolynomial::character(lattice_point(&[-3]), crat_one());
        assert_eq!(a.integrate_product(&b).unwrap(), crat_one());
        assert_eq!(a.inner(&a).unwrap(), crat_one());
        assert!(a.integrate_product(&a).unwrap().is_zero());
    }

    #[test]
    fn real_flag_detects_conjugate_symmetry() {
        let p = TrigPolynomial::real_cosine(lattice_point(&[2, -1]), rat(1, 2));
        assert!(p.is_real());
        let q = TrigPolynomial::character(lattice_point(&[2, -1]), crat_one());
        assert!(!q.is_real());
        assert_eq!(p.integrate(), crate::rat::crat_zero());
    }

    #[test]
    fn mixed_class_operations_rejected() {
        let f = Observable::indicator(&interval(0, 1, 1, 2));
        let g = Observable::Trig(TrigPolynomial::character(lattice_point(&[1]), crat_one()));
        assert!(f.multiply(&g).is_err());
        assert!(f.inner(&g).is_err());
    }

    #[test]
    fn grid_support_detects_alignment() {
        let f = StepFunction::indicator(&interval(1, 4, 1, 2));
        let cells = f.grid_support(8).unwrap();
        assert_eq!(
            cells,
            vec![(2, rat(1, 1)), (3, rat(1, 1))]
        );
        assert!(f.grid_support(3).is_none());
    }

    #[test]
    fn serde_roundtrip_both_classes() {
        let f = StepFunction::indicator(&interval(1, 8, 5, 8));
        let back: StepFunction =
            serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(f, back);
        let mut p = TrigPolynomial::zero(2);
        p.add_term(lattice_point(&[5, -7]), crat(rat(2, 3), rat(-1, 9)));
        let back: TrigPolynomial =
            serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(p, back);
    }
}
