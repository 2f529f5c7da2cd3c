//! Cesàro multicorrelation engines and the recurrence positivity certificate.
//!
//! Every engine sweeps the full range i = 1..N and reports values at an
//! increasing list of checkpoints, reusing partial sums; no subsequence
//! selection happens anywhere. Wherever inputs are exact the sums are exact
//! rationals; square roots (for L2 norms) are the only float step and are
//! taken after the exact arithmetic is finished.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::IntervalSet;
use crate::observable::Observable;
use crate::rat::{conj, crat, norm_sqr, rat, rat_to_json, sqrt_to_f64, to_f64, CRat, Rat};
use crate::spectral::{syndetic_return_bound, ReturnBound};
use crate::systems::{CellShift, System};

/// Breakpoint budget for materialized step-function partial sums.
pub const PARTIAL_SUM_BREAKPOINT_GUARD: usize = 1_000_000;
/// Checkpoint budget for the materialized trig-polynomial partial sum.
pub const TRIG_PARTIAL_SUM_GUARD: u64 = 1 << 13;

/// Dyadic checkpoint schedule 2^min_exp, …, 2^max_exp.
pub fn dyadic_schedule(min_exp: u32, max_exp: u32) -> Vec<u64> {
    (min_exp..=max_exp).map(|e| 1u64 << e).collect()
}

/// The default schedule N ∈ {2^7, …, 2^20}.
pub fn default_schedule() -> Vec<u64> {
    dyadic_schedule(7, 20)
}

fn validate_schedule(checkpoints: &[u64]) -> Result<()> {
    if checkpoints.is_empty() {
        return Err(Error::InvalidParameter("empty checkpoint schedule".into()));
    }
    if checkpoints[0] == 0 {
        return Err(Error::InvalidParameter("checkpoints must be >= 1".into()));
    }
    for w in checkpoints.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidParameter(
                "checkpoints must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}

/// One reported value: exact rational where the computation is exact, a
/// float where a square root intervened.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesValue {
    Exact(Rat),
    Float(f64),
}

impl SeriesValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            SeriesValue::Exact(r) => to_f64(r),
            SeriesValue::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            SeriesValue::Exact(r) => Some(r),
            SeriesValue::Float(_) => None,
        }
    }
}

/// Cesàro average values at increasing checkpoints.
#[derive(Debug, Clone)]
pub struct AverageSeries {
    pub descriptor: String,
    pub checkpoints: Vec<u64>,
    pub values: Vec<SeriesValue>,
}

impl AverageSeries {
    pub fn len(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checkpoints.is_empty()
    }

    pub fn value_at(&self, checkpoint: u64) -> Option<&SeriesValue> {
        self.checkpoints
            .iter()
            .position(|&c| c == checkpoint)
            .map(|k| &self.values[k])
    }

    /// CSV rows `N,value,exact_num,exact_den`; exact columns are blank for
    /// float-valued entries. Byte-deterministic for a fixed series.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,value,exact_num,exact_den\n");
        for (n, v) in self.checkpoints.iter().zip(&self.values) {
            match v {
                SeriesValue::Exact(r) => {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        n,
                        to_f64(r),
                        r.numer(),
                        r.denom()
                    ));
                }
                SeriesValue::Float(x) => {
                    out.push_str(&format!("{},{},,\n", n, x));
                }
            }
        }
        out
    }

    /// Two-column whitespace-separated plot data.
    pub fn to_plot_data(&self) -> String {
        let mut out = String::new();
        for (n, v) in self.checkpoints.iter().zip(&self.values) {
            out.push_str(&format!("{} {}\n", n, v.to_f64()));
        }
        out
    }
}

/// Exact Cesàro partial sums of a stateless term function, evaluated in
/// parallel per checkpoint segment. Terms are exact and the combination
/// order fixed, so the result is independent of the partition.
fn cesaro_sums<T>(
    checkpoints: &[u64],
    zero: T,
    term: impl Fn(u64) -> Result<T> + Sync,
) -> Result<Vec<(u64, T)>>
where
    T: Clone + Send + std::ops::Add<Output = T>,
{
    validate_schedule(checkpoints)?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut acc = zero.clone();
    let mut prev = 0u64;
    for &ck in checkpoints {
        let segment: Vec<u64> = (prev + 1..=ck).collect();
        let partials: Result<Vec<T>> = segment
            .par_chunks(4096)
            .map(|chunk| {
                let mut local = zero.clone();
                for &i in chunk {
                    local = local + term(i)?;
                }
                Ok(local)
            })
            .collect();
        for p in partials? {
            acc = acc + p;
        }
        prev = ck;
        out.push((ck, acc.clone()));
    }
    Ok(out)
}

/// The Roth recurrence average `(1/N) Σ_{i=1..N} μ(A ∩ T^i A ∩ T^{2i} A)`,
/// exact at every checkpoint.
pub fn roth_average(sys: &System, a: &IntervalSet, checkpoints: &[u64]) -> Result<AverageSeries> {
    let sums = cesaro_sums(checkpoints, Rat::zero(), |i| {
        let i = i64::try_from(i).map_err(|_| Error::InvalidParameter("i overflows i64".into()))?;
        let t1 = sys.apply_set(a, i)?;
        let t2 = sys.apply_set(a, 2 * i)?;
        Ok(a.intersect(&t1).intersect(&t2).measure())
    })?;
    let values = sums
        .iter()
        .map(|(n, s)| SeriesValue::Exact(s / Rat::from_integer(BigInt::from(*n))))
        .collect();
    Ok(AverageSeries {
        descriptor: format!(
            "roth_average system={} set_measure={}",
            sys.kind_name(),
            a.measure()
        ),
        checkpoints: checkpoints.to_vec(),
        values,
    })
}

/// Sparse cell-coefficient view of a step observable under a cell shift.
struct AlignedSlot {
    exponent: u64,
    coeffs: HashMap<u64, Rat>,
    support: Vec<u64>,
    max_index: u64,
}

enum SweepPlan {
    /// exact index bookkeeping on a finite cell permutation
    Aligned {
        cells: u64,
        width: Rat,
        cyclic_step: Option<u64>, // Some(s) = mod cells, None = tower (bounded)
        slots: Vec<AlignedSlot>,
    },
    /// per-i Koopman stepping on whole observables
    Generic { slots: Vec<(u64, Observable)> },
}

fn plan_sweep(sys: &System, slots: &[(u64, Observable)]) -> Result<SweepPlan> {
    if let Some(shift) = sys.cell_shift() {
        let (cells, cyclic_step, tower) = match &shift {
            CellShift::Cyclic { cells, step } => (*cells, Some(*step), None),
            CellShift::Tower(t) => (t.height(), None, Some(t.clone())),
        };
        let mut aligned = Vec::with_capacity(slots.len());
        let mut ok = true;
        for (exponent, obs) in slots {
            let Observable::Step(f) = obs else {
                ok = false;
                break;
            };
            let Some(support) = f.grid_support(cells) else {
                ok = false;
                break;
            };
            // tower systems act by a shift in tower coordinates
            let support: Vec<(u64, Rat)> = match &tower {
                Some(t) => support
                    .into_iter()
                    .map(|(cell, v)| (t.level_of_cell(cell), v))
                    .collect(),
                None => support,
            };
            let max_index = support.iter().map(|(c, _)| *c).max().unwrap_or(0);
            aligned.push(AlignedSlot {
                exponent: *exponent,
                coeffs: support.iter().cloned().collect(),
                support: support.iter().map(|(c, _)| *c).collect(),
                max_index,
            });
        }
        if ok {
            return Ok(SweepPlan::Aligned {
                cells,
                width: Rat::new(BigInt::one(), BigInt::from(cells)),
                cyclic_step,
                slots: aligned,
            });
        }
    }
    Ok(SweepPlan::Generic { slots: slots.to_vec() })
}

impl SweepPlan {
    /// Coefficient of the shifted slot function at position `idx` after i
    /// sweep steps: slot p carries `T^{p·i}`, so the coefficient lives at
    /// `idx − p·i·step` (wrapped for cyclic shifts, bounded for towers).
    fn slot_lookup<'a>(
        slot: &'a AlignedSlot,
        cells: u64,
        cyclic_step: Option<u64>,
        idx: u64,
        i: u64,
    ) -> Option<&'a Rat> {
        match cyclic_step {
            Some(s) => {
                let shift = (slot.exponent % cells) * (i % cells) % cells * (s % cells) % cells;
                let back = (idx + cells - shift) % cells;
                slot.coeffs.get(&back)
            }
            None => idx
                .checked_sub(slot.exponent * i)
                .and_then(|b| slot.coeffs.get(&b)),
        }
    }

    /// Position of a slot's support cell after i sweep steps.
    fn slot_forward(
        slot: &AlignedSlot,
        cells: u64,
        cyclic_step: Option<u64>,
        base: u64,
        i: u64,
    ) -> u64 {
        match cyclic_step {
            Some(s) => {
                let shift = (slot.exponent % cells) * (i % cells) % cells * (s % cells) % cells;
                (base + shift) % cells
            }
            None => base + slot.exponent * i,
        }
    }

    fn check_tower_horizon(&self, i: u64) -> Result<()> {
        if let SweepPlan::Aligned { cells, cyclic_step: None, slots, .. } = self {
            for slot in slots {
                if slot.exponent == 0 || slot.coeffs.is_empty() {
                    continue;
                }
                if slot.max_index + slot.exponent * i >= *cells {
                    return Err(Error::Horizon(format!(
                        "support reaches tower level {} at i = {i}; deepen the stage",
                        slot.max_index + slot.exponent * i
                    )));
                }
            }
        }
        Ok(())
    }
}

fn observables_one_class(fs: &[Observable]) -> Result<()> {
    if fs.is_empty() {
        return Err(Error::InvalidParameter("no observables given".into()));
    }
    let class = fs[0].class_name();
    if fs.iter().any(|f| f.class_name() != class) {
        return Err(Error::ClassMismatch(
            "all observables must be of one class".into(),
        ));
    }
    Ok(())
}

fn aligned_term(
    plan: &SweepPlan,
    pivot: usize,
    i: u64,
) -> Result<Rat> {
    let SweepPlan::Aligned { cells, width, cyclic_step, slots } = plan else {
        unreachable!()
    };
    plan.check_tower_horizon(i)?;
    let mut sum = Rat::zero();
    let pv = &slots[pivot];
    for &base in &pv.support {
        let idx = SweepPlan::slot_forward(pv, *cells, *cyclic_step, base, i);
        let mut prod = Rat::one();
        let mut alive = true;
        for slot in slots.iter() {
            match SweepPlan::slot_lookup(slot, *cells, *cyclic_step, idx, i) {
                Some(v) => prod *= v,
                None => {
                    alive = false;
                    break;
                }
            }
        }
        if alive {
            sum += prod;
        }
    }
    Ok(sum * width)
}

fn smallest_support(slots: &[AlignedSlot]) -> usize {
    slots
        .iter()
        .enumerate()
        .min_by_key(|(_, s)| s.support.len())
        .map(|(k, _)| k)
        .unwrap_or(0)
}

/// `(1/N) Σ_{i=1..N} ∫ f_0 · Π_{p=1..m} T^{pi} f_p dμ` at each checkpoint,
/// exact and complex-valued in general.
pub fn scalar_multicorrelation_values(
    sys: &System,
    fs: &[Observable],
    checkpoints: &[u64],
) -> Result<Vec<(u64, CRat)>> {
    if fs.len() < 2 {
        return Err(Error::InvalidParameter(
            "scalar multicorrelation needs at least two observables".into(),
        ));
    }
    observables_one_class(fs)?;
    validate_schedule(checkpoints)?;
    let slots: Vec<(u64, Observable)> = fs
        .iter()
        .enumerate()
        .map(|(p, f)| (p as u64, f.clone()))
        .collect();
    match plan_sweep(sys, &slots)? {
        plan @ SweepPlan::Aligned { .. } => {
            let pivot = match &plan {
                SweepPlan::Aligned { slots, .. } => smallest_support(slots),
                _ => unreachable!(),
            };
            let sums = cesaro_sums(checkpoints, Rat::zero(), |i| aligned_term(&plan, pivot, i))?;
            Ok(sums
                .into_iter()
                .map(|(n, s)| {
                    (n, crat(s / Rat::from_integer(BigInt::from(n)), Rat::zero()))
                })
                .collect())
        }
        SweepPlan::Generic { slots } => {
            // sequential incremental stepping: transported observables can
            // grow with i, so each i advances the previous state by one step
            let mut states: Vec<Observable> = slots.iter().map(|(_, f)| f.clone()).collect();
            let mut acc = crate::rat::crat_zero();
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut next_ck = 0usize;
            let max_n = *checkpoints.last().unwrap();
            for i in 1..=max_n {
                for (k, (p, _)) in slots.iter().enumerate() {
                    if *p > 0 {
                        states[k] = sys.koopman_apply(&states[k], *p as i64)?;
                    }
                }
                let mut prod = states[0].clone();
                for state in states.iter().skip(1) {
                    prod = prod.multiply(state)?;
                }
                acc = acc + prod.integrate();
                if checkpoints[next_ck] == i {
                    let n_rat = crat(Rat::from_integer(BigInt::from(i)), Rat::zero());
                    out.push((i, acc.clone() / n_rat));
                    next_ck += 1;
                    if next_ck == checkpoints.len() {
                        break;
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Real-valued scalar multicorrelation series. All in-scope experiments are
/// real-valued; a surviving imaginary part is an error rather than a silent
/// truncation.
pub fn scalar_multicorrelation(
    sys: &System,
    fs: &[Observable],
    checkpoints: &[u64],
) -> Result<AverageSeries> {
    let values = scalar_multicorrelation_values(sys, fs, checkpoints)?;
    let mut out = Vec::with_capacity(values.len());
    for (_, v) in &values {
        if !v.im.is_zero() {
            return Err(Error::Unsupported(
                "scalar multicorrelation has a nonzero imaginary part; \
                 use real-valued observables or scalar_multicorrelation_values"
                    .into(),
            ));
        }
        out.push(SeriesValue::Exact(v.re.clone()));
    }
    Ok(AverageSeries {
        descriptor: format!(
            "scalar_multicorrelation system={} m={}",
            sys.kind_name(),
            fs.len() - 1
        ),
        checkpoints: checkpoints.to_vec(),
        values: out,
    })
}

/// Exact squared L2 defect
/// `‖(1/N) Σ_{i=1..N} Π_{p=1..m} T^{pi} f_p − Π_p ∫ f_p dμ‖²` per checkpoint.
pub fn l2_multicorrelation_defect_sq(
    sys: &System,
    fs: &[Observable],
    checkpoints: &[u64],
) -> Result<Vec<(u64, Rat)>> {
    if fs.len() < 2 {
        return Err(Error::InvalidParameter(
            "the L2 multicorrelation defect needs m >= 2 observables".into(),
        ));
    }
    observables_one_class(fs)?;
    validate_schedule(checkpoints)?;
    let target: CRat = fs
        .iter()
        .map(|f| f.integrate())
        .fold(crate::rat::crat_one(), |a, b| a * b);
    let slots: Vec<(u64, Observable)> = fs
        .iter()
        .enumerate()
        .map(|(p, f)| (p as u64 + 1, f.clone()))
        .collect();

    match plan_sweep(sys, &slots)? {
        plan @ SweepPlan::Aligned { .. } => {
            let SweepPlan::Aligned { cells, width, cyclic_step, slots } = &plan else {
                unreachable!()
            };
            // step inputs are real-valued, so the target is too
            let c_re = target.re.clone();
            // accumulate the partial-sum function as sparse cell coefficients
            let mut acc: HashMap<u64, Rat> = HashMap::new();
            let pivot = smallest_support(slots);
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut next_ck = 0usize;
            let max_n = *checkpoints.last().unwrap();
            for i in 1..=max_n {
                plan.check_tower_horizon(i)?;
                let pv = &slots[pivot];
                for &base in &pv.support {
                    let idx = SweepPlan::slot_forward(pv, *cells, *cyclic_step, base, i);
                    let mut prod = Rat::one();
                    let mut alive = true;
                    for slot in slots.iter() {
                        match SweepPlan::slot_lookup(slot, *cells, *cyclic_step, idx, i) {
                            Some(v) => prod *= v,
                            None => {
                                alive = false;
                                break;
                            }
                        }
                    }
                    if alive && !prod.is_zero() {
                        let entry = acc.entry(idx).or_insert_with(Rat::zero);
                        *entry += prod;
                        if entry.is_zero() {
                            acc.remove(&idx);
                        }
                    }
                }
                if checkpoints[next_ck] == i {
                    let n_rat = Rat::from_integer(BigInt::from(i));
                    let mut sq = Rat::zero();
                    for v in acc.values() {
                        let d = v / &n_rat - &c_re;
                        sq += &d * &d;
                    }
                    let untouched = *cells - acc.len() as u64;
                    sq += Rat::from_integer(BigInt::from(untouched)) * &c_re * &c_re;
                    out.push((i, sq * width));
                    next_ck += 1;
                    if next_ck == checkpoints.len() {
                        break;
                    }
                }
            }
            Ok(out)
        }
        SweepPlan::Generic { slots } => l2_defect_generic(sys, &slots, &target, checkpoints),
    }
}

fn l2_defect_generic(
    sys: &System,
    slots: &[(u64, Observable)],
    target: &CRat,
    checkpoints: &[u64],
) -> Result<Vec<(u64, Rat)>> {
    let max_n = *checkpoints.last().unwrap();
    let is_trig = matches!(slots[0].1, Observable::Trig(_));
    if is_trig && max_n > TRIG_PARTIAL_SUM_GUARD {
        return Err(Error::CostGuard(format!(
            "trig-polynomial L2 defect materializes the partial sum; \
             N = {max_n} exceeds the budget {TRIG_PARTIAL_SUM_GUARD}"
        )));
    }
    let mut states: Vec<Observable> = slots.iter().map(|(_, f)| f.clone()).collect();
    // partial sum S_N = Σ_i Π_p T^{pi} f_p, materialized exactly
    let mut partial: Option<Observable> = None;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next_ck = 0usize;
    for i in 1..=max_n {
        for (k, (p, _)) in slots.iter().enumerate() {
            states[k] = sys.koopman_apply(&states[k], *p as i64)?;
        }
        let mut prod = states[0].clone();
        for state in states.iter().skip(1) {
            prod = prod.multiply(state)?;
        }
        partial = Some(match partial {
            None => prod,
            Some(s) => s.add(&prod)?,
        });
        if let Some(Observable::Step(f)) = &partial {
            if f.piece_count() > PARTIAL_SUM_BREAKPOINT_GUARD {
                return Err(Error::BreakpointGuard(
                    f.piece_count(),
                    PARTIAL_SUM_BREAKPOINT_GUARD,
                ));
            }
        }
        if checkpoints[next_ck] == i {
            let s = partial.as_ref().unwrap();
            let n_rat = Rat::from_integer(BigInt::from(i));
            // ‖S/N − c‖² = ‖S‖²/N² − (2/N)·Re(conj(c)·∫S) + |c|²
            let s_norm_sq = s.l2_norm_sq();
            let s_int = s.integrate();
            let cross = (conj(target) * s_int).re;
            let sq = s_norm_sq / (&n_rat * &n_rat) - rat(2, 1) * cross / &n_rat
                + norm_sqr(target);
            out.push((i, sq));
            next_ck += 1;
            if next_ck == checkpoints.len() {
                break;
            }
        }
    }
    Ok(out)
}

/// L2 defect series (the norm itself); exact squared defects are exposed by
/// [`l2_multicorrelation_defect_sq`].
pub fn l2_multicorrelation_defect(
    sys: &System,
    fs: &[Observable],
    checkpoints: &[u64],
) -> Result<AverageSeries> {
    let sq = l2_multicorrelation_defect_sq(sys, fs, checkpoints)?;
    Ok(AverageSeries {
        descriptor: format!(
            "l2_multicorrelation_defect system={} m={}",
            sys.kind_name(),
            fs.len()
        ),
        checkpoints: checkpoints.to_vec(),
        values: sq
            .into_iter()
            .map(|(_, s)| SeriesValue::Float(sqrt_to_f64(&s)))
            .collect(),
    })
}

/// A sound, fully explicit lower bound for the Roth recurrence liminf on a
/// rotation.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub epsilon: Rat,
    pub l: u64,
    pub cube_integral: Rat,
    pub lower_bound: Rat,
    pub system: System,
    pub set: IntervalSet,
    pub return_bound: Option<ReturnBound>,
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "epsilon": rat_to_json(&self.epsilon),
            "L": self.l,
            "cube_integral": rat_to_json(&self.cube_integral),
            "lower_bound": rat_to_json(&self.lower_bound),
            "system": serde_json::to_value(&self.system).unwrap(),
            "set": serde_json::to_value(&self.set).unwrap(),
            "return_bound": self.return_bound.as_ref().map(|rb| rb.to_json()),
        })
    }
}

/// Certificate that `liminf (1/N) Σ μ(A ∩ T^i A ∩ T^{2i} A) ≥ (μ(A) − 3ε)/L > 0`
/// on a rotation.
///
/// Rotations have pure point spectrum: the projection onto the closed span
/// of eigenfunctions is the identity, so the cube integral `∫ (Pχ_A)³ dμ`
/// equals `μ(A)`. The window length L comes from the continued-fraction
/// return bound at `δ = ε²/(2k)` (k = number of components of A):
/// translating a k-component interval union by t changes its indicator on a
/// set of measure at most 2kt, so `‖iα‖ < δ` forces `‖T^iχ_A − χ_A‖ < ε`,
/// and with `‖T^{2i}f − f‖ ≤ 2‖T^if − f‖` each return contributes at least
/// `μ(A) − 3ε` to the recurrence average.
pub fn positivity_certificate(
    sys: &System,
    a: &IntervalSet,
    epsilon: &Rat,
) -> Result<Certificate> {
    let System::Rotation { alpha } = sys else {
        return Err(Error::Unsupported(
            "the positivity certificate applies to rotation systems".into(),
        ));
    };
    let mass = a.measure();
    if !epsilon.is_positive() || epsilon * rat(3, 1) >= mass {
        return Err(Error::NoPositiveBound(format!(
            "need 0 < epsilon < mu(A)/3, got epsilon = {epsilon}, mu(A) = {mass}"
        )));
    }
    // exact-return shortcut: a set invariant under the one-step translation
    // returns exactly at every i
    let (l, return_bound) = if sys.apply_set(a, 1)? == *a {
        (1u64, None)
    } else {
        let k = a.component_count().max(1) as i64;
        let delta = epsilon * epsilon / rat(2 * k, 1);
        let rb = syndetic_return_bound(alpha, &delta)?;
        (rb.l, Some(rb))
    };
    let lower_bound = (&mass - rat(3, 1) * epsilon) / Rat::from_integer(BigInt::from(l));
    debug_assert!(lower_bound.is_positive());
    Ok(Certificate {
        epsilon: epsilon.clone(),
        l,
        cube_integral: mass,
        lower_bound,
        system: sys.clone(),
        set: a.clone(),
        return_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observable::{lattice_point, StepFunction, TrigPolynomial};
    use crate::rat::crat_one;

    fn interval(a: i64, b: i64, c: i64, d: i64) -> IntervalSet {
        IntervalSet::interval(rat(a, b), rat(c, d)).unwrap()
    }

    #[test]
    fn roth_on_identity_is_the_measure() {
        let a = interval(0, 1, 1, 3);
        let series = roth_average(&System::Identity, &a, &dyadic_schedule(3, 8)).unwrap();
        for v in &series.values {
            assert_eq!(v.exact().unwrap(), &rat(1, 3));
        }
    }

    #[test]
    fn roth_on_empty_set_is_zero() {
        let series =
            roth_average(&System::rotation(rat(2, 7)).unwrap(), &IntervalSet::empty(), &[4, 16])
                .unwrap();
        for v in &series.values {
            assert!(v.exact().unwrap().is_zero());
        }
    }

    #[test]
    fn roth_prefix_consistency() {
        let sys = System::rotation(rat(5, 17)).unwrap();
        let a = interval(1, 5, 3, 5);
        let full = roth_average(&sys, &a, &[8, 32, 128]).unwrap();
        let single = roth_average(&sys, &a, &[128]).unwrap();
        assert_eq!(full.values[2], single.values[0]);
    }

    #[test]
    fn scalar_multicorrelation_of_constants_is_one() {
        let ones = vec![Observable::Step(StepFunction::constant(rat(1, 1))); 3];
        let series =
            scalar_multicorrelation(&System::rotation(rat(3, 11)).unwrap(), &ones, &[16, 64])
                .unwrap();
        for v in &series.values {
            assert_eq!(v.exact().unwrap(), &rat(1, 1));
        }
    }

    #[test]
    fn cat_character_average_counts_lattice_hits() {
        // designed triple with exactly one transported-index solution, at i = 3
        let sys = System::cat_map();
        let fs = vec![
            Observable::Trig(TrigPolynomial::character(
                lattice_point(&[63, -102]),
                crat_one(),
            )),
            Observable::Trig(TrigPolynomial::character(lattice_point(&[0, 1]), crat_one())),
            Observable::Trig(TrigPolynomial::character(lattice_point(&[1, 1]), crat_one())),
        ];
        let series = scalar_multicorrelation(&sys, &fs, &[2, 8, 64]).unwrap();
        assert!(series.values[0].exact().unwrap().is_zero()); // no hit by N = 2
        assert_eq!(series.values[1].exact().unwrap(), &rat(1, 8));
        assert_eq!(series.values[2].exact().unwrap(), &rat(1, 64));
    }

    #[test]
    fn aligned_and_generic_scalar_paths_agree() {
        // same rotation by 1/12: the cyclic-shift system takes the aligned
        // fast path, the rotation with an equal angle the generic one
        let a = interval(0, 1, 1, 4);
        let f = Observable::centered_indicator(&a);
        let fs = vec![f.clone(), f.clone(), f.clone()];
        let fast =
            scalar_multicorrelation_values(&System::CyclicShift { modulus: 12 }, &fs, &[24])
                .unwrap();
        let generic =
            scalar_multicorrelation_values(&System::rotation(rat(1, 12)).unwrap(), &fs, &[24])
                .unwrap();
        assert_eq!(fast[0].1, generic[0].1);
    }

    #[test]
    fn l2_defect_of_constants_vanishes() {
        let ones = vec![Observable::Step(StepFunction::constant(rat(2, 3))); 2];
        let sq =
            l2_multicorrelation_defect_sq(&System::rotation(rat(1, 5)).unwrap(), &ones, &[8, 32])
                .unwrap();
        for (_, v) in sq {
            assert!(v.is_zero());
        }
    }

    #[test]
    fn l2_defect_on_identity_is_constant_in_n() {
        // with T = Id every Cesàro term equals the i = 1 term
        let f = Observable::centered_indicator(&interval(0, 1, 2, 5));
        let fs = vec![f.clone(), f.clone()];
        let sq = l2_multicorrelation_defect_sq(&System::Identity, &fs, &[4, 64]).unwrap();
        assert_eq!(sq[0].1, sq[1].1);
        assert!(!sq[0].1.is_zero());
    }

    #[test]
    fn aligned_and_generic_l2_paths_agree() {
        let a = interval(0, 1, 1, 4);
        let f = Observable::centered_indicator(&a);
        let fs = vec![f.clone(), f.clone()];
        let fast = l2_multicorrelation_defect_sq(&System::CyclicShift { modulus: 12 }, &fs, &[16])
            .unwrap();
        let slow =
            l2_multicorrelation_defect_sq(&System::rotation(rat(1, 12)).unwrap(), &fs, &[16])
                .unwrap();
        assert_eq!(fast[0].1, slow[0].1);
    }

    #[test]
    fn certificate_full_space_returns_every_step() {
        let sys = System::rotation(rat(1, 2)).unwrap();
        let cert = positivity_certificate(&sys, &IntervalSet::full(), &rat(1, 20)).unwrap();
        assert_eq!(cert.l, 1);
        assert_eq!(cert.lower_bound, rat(1, 1) - rat(3, 20));
    }

    #[test]
    fn certificate_rejects_oversized_epsilon() {
        let sys = System::rotation(rat(1, 2)).unwrap();
        let a = interval(0, 1, 1, 4);
        assert!(matches!(
            positivity_certificate(&sys, &a, &rat(1, 4)),
            Err(Error::NoPositiveBound(_))
        ));
    }

    #[test]
    fn telescoping_shift_bound_holds() {
        // |value_N(f_p) − value_N(T^p f_p)| ≤ (2/N) Π sup norms
        let sys = System::rotation(rat(3, 13)).unwrap();
        let f = Observable::centered_indicator(&interval(0, 1, 5, 13));
        let g = Observable::indicator(&interval(2, 13, 6, 13));
        let h = Observable::centered_indicator(&interval(1, 13, 9, 13));
        let n = 32u64;
        let base = scalar_multicorrelation_values(&sys, &[f.clone(), g.clone(), h.clone()], &[n])
            .unwrap()[0]
            .1
            .clone();
        let shifted_inputs = vec![
            f.clone(),
            sys.koopman_apply(&g, 1).unwrap(),
            sys.koopman_apply(&h, 2).unwrap(),
        ];
        let shifted = scalar_multicorrelation_values(&sys, &shifted_inputs, &[n]).unwrap()[0]
            .1
            .clone();
        let defect_sq = norm_sqr(&(base - shifted));
        let bound = rat(2, n as i64) * f.sup_norm() * g.sup_norm() * h.sup_norm();
        assert!(defect_sq <= &bound * &bound);
    }
}
