//! Explicit invertible measure-preserving systems with exact actions.
//!
//! The Koopman convention is fixed once: `T^i f = f ∘ T^{−i}`, so that
//! `T^i χ_A = χ_{T^i A}` and set expressions and functional expressions are
//! literally the same computation. Finite-N averages depend on this choice;
//! all Cesàro limits do not.

pub mod chacon;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::IntervalSet;
use crate::observable::{LatticePoint, Observable, StepFunction, TrigPolynomial};
use crate::rat::{frac_mod1, rat_from_json, rat_to_json, Rat};
pub use chacon::{stage_height, ChaconTower, MAX_STAGE};

/// 2×2 integer matrix with exact arithmetic; |det| must be 1 wherever a
/// system uses it, so inverses stay integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub entries: [[BigInt; 2]; 2],
}

impl Mat2 {
    pub fn from_i64(m: [[i64; 2]; 2]) -> Mat2 {
        Mat2 {
            entries: [
                [BigInt::from(m[0][0]), BigInt::from(m[0][1])],
                [BigInt::from(m[1][0]), BigInt::from(m[1][1])],
            ],
        }
    }

    pub fn identity() -> Mat2 {
        Mat2::from_i64([[1, 0], [0, 1]])
    }

    pub fn det(&self) -> BigInt {
        &self.entries[0][0] * &self.entries[1][1] - &self.entries[0][1] * &self.entries[1][0]
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2 {
            entries: [
                [self.entries[0][0].clone(), self.entries[1][0].clone()],
                [self.entries[0][1].clone(), self.entries[1][1].clone()],
            ],
        }
    }

    /// Exact inverse for |det| = 1: adjugate divided by det.
    pub fn inverse_unimodular(&self) -> Result<Mat2> {
        let det = self.det();
        if det.magnitude() != &BigInt::one().magnitude().clone() {
            return Err(Error::InvalidParameter(format!(
                "matrix determinant {det} is not ±1"
            )));
        }
        let adj = Mat2 {
            entries: [
                [self.entries[1][1].clone(), -self.entries[0][1].clone()],
                [-self.entries[1][0].clone(), self.entries[0][0].clone()],
            ],
        };
        Ok(if det == BigInt::one() {
            adj
        } else {
            Mat2 {
                entries: [
                    [-adj.entries[0][0].clone(), -adj.entries[0][1].clone()],
                    [-adj.entries[1][0].clone(), -adj.entries[1][1].clone()],
                ],
            }
        })
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let e = &self.entries;
        let f = &other.entries;
        Mat2 {
            entries: [
                [
                    &e[0][0] * &f[0][0] + &e[0][1] * &f[1][0],
                    &e[0][0] * &f[0][1] + &e[0][1] * &f[1][1],
                ],
                [
                    &e[1][0] * &f[0][0] + &e[1][1] * &f[1][0],
                    &e[1][0] * &f[0][1] + &e[1][1] * &f[1][1],
                ],
            ],
        }
    }

    pub fn apply(&self, v: &[BigInt; 2]) -> [BigInt; 2] {
        [
            &self.entries[0][0] * &v[0] + &self.entries[0][1] * &v[1],
            &self.entries[1][0] * &v[0] + &self.entries[1][1] * &v[1],
        ]
    }

    /// Exact power by squaring; negative exponents use the unimodular inverse.
    pub fn pow(&self, i: i64) -> Result<Mat2> {
        let base = if i < 0 { self.inverse_unimodular()? } else { self.clone() };
        let mut exp = i.unsigned_abs();
        let mut acc = Mat2::identity();
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }
}

/// Exact integer-matrix orbit of a lattice point: `M^i a`, invertible in i.
pub fn character_orbit(matrix: [[i64; 2]; 2], point: &LatticePoint, i: i64) -> Result<LatticePoint> {
    if point.len() != 2 {
        return Err(Error::ClassMismatch(
            "character orbit needs a 2-d lattice point".into(),
        ));
    }
    let m = Mat2::from_i64(matrix);
    if m.det().magnitude() != &BigInt::one().magnitude().clone() {
        return Err(Error::InvalidParameter(
            "torus automorphism needs |det| = 1".into(),
        ));
    }
    let p = m.pow(i)?;
    let out = p.apply(&[point[0].clone(), point[1].clone()]);
    Ok(vec![out[0].clone(), out[1].clone()])
}

/// An explicit measure-preserving system.
#[derive(Debug, Clone)]
pub enum System {
    Identity,
    /// Rotation of Z/n embedded as the rotation by 1/n of `[0,1)`.
    CyclicShift { modulus: u64 },
    Rotation { alpha: Rat },
    TorusAutomorphism { matrix: [[i64; 2]; 2] },
    Product(Box<System>, Box<System>),
    RankOneTower(Arc<ChaconTower>),
}

impl PartialEq for System {
    fn eq(&self, other: &Self) -> bool {
        use System::*;
        match (self, other) {
            (Identity, Identity) => true,
            (CyclicShift { modulus: a }, CyclicShift { modulus: b }) => a == b,
            (Rotation { alpha: a }, Rotation { alpha: b }) => a == b,
            (TorusAutomorphism { matrix: a }, TorusAutomorphism { matrix: b }) => a == b,
            (Product(a, b), Product(c, d)) => a == c && b == d,
            (RankOneTower(a), RankOneTower(b)) => a.stage() == b.stage(),
            _ => false,
        }
    }
}

/// Shift structure shared by the systems whose action is an exact
/// permutation of equal-width grid cells; the average engines exploit it.
#[derive(Debug, Clone)]
pub enum CellShift {
    /// cells `k/q`; `T^i` sends cell k to k + i·step (mod q)
    Cyclic { cells: u64, step: u64 },
    /// tower coordinates; `T^i` adds i, bounded by the constructed height
    Tower(Arc<ChaconTower>),
}

impl System {
    pub fn rotation(alpha: Rat) -> Result<System> {
        if alpha.is_negative() || alpha >= Rat::one() {
            return Err(Error::InvalidParameter(format!(
                "rotation angle {alpha} outside [0,1)"
            )));
        }
        Ok(System::Rotation { alpha })
    }

    /// Continued-fraction convergent of `[0; a, a, a, …]` with denominator
    /// of at least `min_bits` bits; exact stand-in for a quadratic
    /// irrational rotation angle.
    pub fn quadratic_approximant(partial_quotient: u64, min_bits: u64) -> Rat {
        let a = BigInt::from(partial_quotient);
        let (mut p_prev, mut p) = (BigInt::one(), BigInt::zero());
        let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
        while q.bits() < min_bits {
            let p_next = &a * &p + &p_prev;
            let q_next = &a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
        }
        Rat::new(p, q)
    }

    /// Golden-mean rotation stand-in: Fibonacci convergent with a
    /// denominator of at least 2^128.
    pub fn rotation_golden() -> System {
        System::Rotation { alpha: Self::quadratic_approximant(1, 129) }
    }

    pub fn cat_map() -> System {
        System::TorusAutomorphism { matrix: [[2, 1], [1, 1]] }
    }

    pub fn torus_automorphism(matrix: [[i64; 2]; 2]) -> Result<System> {
        let det = (matrix[0][0] as i128 * matrix[1][1] as i128
            - matrix[0][1] as i128 * matrix[1][0] as i128)
            .abs();
        if det != 1 {
            return Err(Error::InvalidParameter(format!(
                "torus automorphism needs |det| = 1, got {det}"
            )));
        }
        Ok(System::TorusAutomorphism { matrix })
    }

    pub fn chacon(stage: usize) -> Result<System> {
        Ok(System::RankOneTower(Arc::new(ChaconTower::build(stage)?)))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            System::Identity => "identity",
            System::CyclicShift { .. } => "cyclic",
            System::Rotation { .. } => "rotation",
            System::TorusAutomorphism { .. } => "cat",
            System::Product(_, _) => "product",
            System::RankOneTower(_) => "chacon",
        }
    }

    /// Exact rotation amount of `T^i` for the translation-like systems.
    pub fn translation_amount(&self, i: i64) -> Option<Rat> {
        match self {
            System::Identity => Some(Rat::zero()),
            System::CyclicShift { modulus } => Some(frac_mod1(&Rat::new(
                BigInt::from(i),
                BigInt::from(*modulus),
            ))),
            System::Rotation { alpha } => {
                Some(frac_mod1(&(alpha * Rat::from_integer(BigInt::from(i)))))
            }
            _ => None,
        }
    }

    pub fn cell_shift(&self) -> Option<CellShift> {
        match self {
            System::Identity => Some(CellShift::Cyclic { cells: 1, step: 0 }),
            System::CyclicShift { modulus } => {
                Some(CellShift::Cyclic { cells: *modulus, step: 1 })
            }
            System::Rotation { alpha } => {
                let q = u64::try_from(alpha.denom()).ok()?;
                let p = u64::try_from(alpha.numer()).ok()?;
                // only worthwhile for genuinely small denominators
                if q <= 1 << 22 {
                    Some(CellShift::Cyclic { cells: q, step: p % q })
                } else {
                    None
                }
            }
            System::RankOneTower(t) => Some(CellShift::Tower(t.clone())),
            _ => None,
        }
    }

    /// The Koopman transport matrix for characters: index a of `T^1 χ_a`
    /// is `(M^T)^{−1} a`.
    pub fn character_transport(&self) -> Result<Mat2> {
        match self {
            System::TorusAutomorphism { matrix } => {
                Mat2::from_i64(*matrix).transpose().inverse_unimodular()
            }
            _ => Err(Error::ClassMismatch(format!(
                "{} has no character lattice transport",
                self.kind_name()
            ))),
        }
    }

    /// Exact image `T^i A` for the systems whose set algebra is closed.
    pub fn apply_set(&self, a: &IntervalSet, i: i64) -> Result<IntervalSet> {
        match self {
            System::Identity => Ok(a.clone()),
            System::CyclicShift { .. } | System::Rotation { .. } => {
                Ok(a.translate_mod1(&self.translation_amount(i).unwrap()))
            }
            System::RankOneTower(tower) => tower_apply_set(tower, a, i),
            System::TorusAutomorphism { .. } => Err(Error::Unsupported(
                "torus automorphisms shear intervals; use trigonometric observables".into(),
            )),
            System::Product(_, _) => Err(Error::Unsupported(
                "product systems carry no interval algebra".into(),
            )),
        }
    }

    /// `T^i f = f ∘ T^{−i}`, exact within the matching observable class.
    pub fn koopman_apply(&self, f: &Observable, i: i64) -> Result<Observable> {
        match (self, f) {
            (System::Identity, _) => Ok(f.clone()),
            (System::CyclicShift { .. }, Observable::Step(sf))
            | (System::Rotation { .. }, Observable::Step(sf)) => Ok(Observable::Step(
                sf.translate_mod1(&self.translation_amount(i).unwrap()),
            )),
            (System::RankOneTower(tower), Observable::Step(sf)) => {
                Ok(Observable::Step(tower_koopman(tower, sf, i)?))
            }
            (System::TorusAutomorphism { .. }, Observable::Trig(p)) => {
                let transport = self.character_transport()?.pow(i)?;
                Ok(Observable::Trig(transport_poly(p, &transport)?))
            }
            (System::Product(_, _), _) => Err(Error::Unsupported(
                "product systems are analyzed through their Koopman matrices; \
                 no exact observable class covers their pointwise action"
                    .into(),
            )),
            _ => Err(Error::ClassMismatch(format!(
                "system {} does not act on {} observables",
                self.kind_name(),
                f.class_name()
            ))),
        }
    }

    /// One-step transport state for incremental sweeps over characters.
    pub fn koopman_step_matrix(&self, steps: i64) -> Result<Mat2> {
        self.character_transport()?.pow(steps)
    }
}

fn transport_poly(p: &TrigPolynomial, transport: &Mat2) -> Result<TrigPolynomial> {
    if p.dim() != 2 {
        return Err(Error::ClassMismatch(
            "torus automorphisms act on 2-d lattices".into(),
        ));
    }
    let mut out = TrigPolynomial::zero(2);
    for (a, c) in p.coeffs() {
        let v = transport.apply(&[a[0].clone(), a[1].clone()]);
        out.add_term(vec![v[0].clone(), v[1].clone()], c.clone());
    }
    Ok(out)
}

/// Split an interval set into per-cell pieces `(cell, lo_offset, hi_offset)`
/// on the grid of `cells` equal cells.
fn grid_pieces(a: &IntervalSet, cells: u64) -> Vec<(u64, Rat, Rat)> {
    let n = Rat::from_integer(BigInt::from(cells));
    let mut out = Vec::new();
    for (lo, hi) in a.pieces() {
        let first = (lo * &n).floor().to_integer();
        let mut cell = u64::try_from(first).expect("set inside [0,1)");
        loop {
            let cell_lo = Rat::new(BigInt::from(cell), BigInt::from(cells));
            let cell_hi = Rat::new(BigInt::from(cell + 1), BigInt::from(cells));
            let piece_lo = lo.max(&cell_lo).clone();
            let piece_hi = hi.min(&cell_hi).clone();
            if piece_lo < piece_hi {
                out.push((cell, piece_lo - &cell_lo, piece_hi - &cell_lo));
            }
            if *hi <= cell_hi {
                break;
            }
            cell += 1;
        }
    }
    out
}

fn tower_apply_set(tower: &ChaconTower, a: &IntervalSet, i: i64) -> Result<IntervalSet> {
    let h = tower.height();
    if h as i64 <= i.abs() + 1 {
        return Err(Error::Horizon(format!(
            "stage height {h} does not cover |i| = {} (need h > |i| + 1); construct a deeper stage",
            i.abs()
        )));
    }
    if i == 0 || a.is_empty() {
        return Ok(a.clone());
    }
    let mut raw = Vec::new();
    for (cell, off_lo, off_hi) in grid_pieces(a, h) {
        let level = tower.level_of_cell(cell);
        let target = tower.step_level(level, i)?;
        let base = Rat::new(BigInt::from(tower.cell_of_level(target)), BigInt::from(h));
        raw.push((&base + off_lo, base + off_hi));
    }
    IntervalSet::normalize(raw)
}

fn tower_koopman(tower: &ChaconTower, f: &StepFunction, i: i64) -> Result<StepFunction> {
    let h = tower.height();
    if h as i64 <= i.abs() + 1 {
        return Err(Error::Horizon(format!(
            "stage height {h} does not cover |i| = {} (need h > |i| + 1); construct a deeper stage",
            i.abs()
        )));
    }
    if i == 0 {
        return Ok(f.clone());
    }
    // Levels whose i-step image is deferred to deeper stages. T^i f is still
    // exact when f is constant across them: the unresolved mass carries that
    // constant wherever the limit system puts it.
    let steps = i.unsigned_abs();
    let region = if i > 0 { (h - steps)..h } else { 0..steps };
    let cell_bounds = |cell: u64| {
        let lo = Rat::new(BigInt::from(cell), BigInt::from(h));
        let hi = Rat::new(BigInt::from(cell + 1), BigInt::from(h));
        (lo, hi)
    };
    let (first_lo, _) = cell_bounds(tower.cell_of_level(region.start));
    let background = f.eval(&first_lo).clone();
    for level in region {
        let (lo, hi) = cell_bounds(tower.cell_of_level(level));
        if !f.is_constant_on(&lo, &hi, &background) {
            return Err(Error::Horizon(format!(
                "observable varies on tower levels whose {i}-step image is \
                 unresolved at stage {}; construct a deeper stage",
                tower.stage()
            )));
        }
    }
    // Transport every piece deviating from the background value.
    let mut shifted: Vec<(Rat, Rat, Rat)> = Vec::new(); // (lo, hi, value)
    let bps = f.breakpoints();
    let vals = f.values();
    for j in 0..vals.len() {
        if vals[j] == background {
            continue;
        }
        let lo = bps[j].clone();
        let hi = bps.get(j + 1).cloned().unwrap_or_else(Rat::one);
        let piece = IntervalSet::interval(lo, hi).expect("piece in range");
        for (cell, off_lo, off_hi) in grid_pieces(&piece, h) {
            let level = tower.level_of_cell(cell);
            let target = tower.step_level(level, i)?;
            let base = Rat::new(BigInt::from(tower.cell_of_level(target)), BigInt::from(h));
            shifted.push((&base + off_lo, base + off_hi, vals[j].clone()));
        }
    }
    shifted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut breakpoints = vec![Rat::zero()];
    let mut values = vec![background.clone()];
    for (lo, hi, v) in shifted {
        if lo.is_zero() {
            values[0] = v.clone();
        } else {
            breakpoints.push(lo);
            values.push(v);
        }
        if hi < Rat::one() {
            breakpoints.push(hi);
            values.push(background.clone());
        }
    }
    StepFunction::from_pieces(breakpoints, values)
}

/// Stage view exposing the construction data of one Chacon stage.
#[derive(Debug, Clone)]
pub struct RankOneStage {
    pub stage: usize,
    pub height: u64,
    pub level_width: Rat,
    pub levels: Vec<IntervalSet>,
}

/// Build the stage-`n` tower view: exact rational levels, ambient measure
/// normalized to 1 at stage `n`.
pub fn chacon_stage(n: usize) -> Result<RankOneStage> {
    let tower = ChaconTower::build(n)?;
    Ok(RankOneStage {
        stage: n,
        height: tower.height(),
        level_width: tower.level_width(),
        levels: tower.level_intervals(),
    })
}

impl serde::Serialize for System {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = match self {
            System::Identity => serde_json::json!({"kind": "identity"}),
            System::CyclicShift { modulus } => {
                serde_json::json!({"kind": "cyclic", "modulus": modulus})
            }
            System::Rotation { alpha } => {
                serde_json::json!({"kind": "rotation", "alpha": rat_to_json(alpha)})
            }
            System::TorusAutomorphism { matrix } => {
                serde_json::json!({"kind": "cat", "matrix": matrix})
            }
            System::Product(l, r) => serde_json::json!({
                "kind": "product",
                "left": serde_json::to_value(l).map_err(serde::ser::Error::custom)?,
                "right": serde_json::to_value(r).map_err(serde::ser::Error::custom)?,
            }),
            System::RankOneTower(t) => {
                serde_json::json!({"kind": "chacon", "stage": t.stage()})
            }
        };
        v.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for System {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let v = serde_json::Value::deserialize(d)?;
        system_from_json(&v).map_err(D::Error::custom)
    }
}

pub fn system_from_json(v: &serde_json::Value) -> Result<System> {
    let kind = v
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::Descriptor("system descriptor needs a \"kind\"".into()))?;
    match kind {
        "identity" => Ok(System::Identity),
        "cyclic" => {
            let modulus = v
                .get("modulus")
                .and_then(|m| m.as_u64())
                .filter(|&m| m >= 1)
                .ok_or_else(|| Error::Descriptor("cyclic shift needs modulus >= 1".into()))?;
            Ok(System::CyclicShift { modulus })
        }
        "rotation" => {
            let alpha_v = v
                .get("alpha")
                .ok_or_else(|| Error::Descriptor("rotation needs alpha".into()))?;
            if alpha_v.as_str() == Some("golden") {
                return Ok(System::rotation_golden());
            }
            if alpha_v.as_str() == Some("silver") {
                return System::rotation(System::quadratic_approximant(2, 129));
            }
            let alpha = frac_mod1(&rat_from_json(alpha_v)?);
            System::rotation(alpha)
        }
        "cat" => {
            let m = v
                .get("matrix")
                .ok_or_else(|| Error::Descriptor("cat needs matrix".into()))?;
            let rows: Vec<Vec<i64>> = serde_json::from_value(m.clone())
                .map_err(|e| Error::Descriptor(format!("bad matrix: {e}")))?;
            if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
                return Err(Error::Descriptor("matrix must be 2×2".into()));
            }
            System::torus_automorphism([[rows[0][0], rows[0][1]], [rows[1][0], rows[1][1]]])
        }
        "chacon" => {
            let stage = v
                .get("stage")
                .and_then(|s| s.as_u64())
                .ok_or_else(|| Error::Descriptor("chacon needs stage".into()))?;
            System::chacon(stage as usize)
        }
        "product" => {
            let left = system_from_json(
                v.get("left")
                    .ok_or_else(|| Error::Descriptor("product needs left".into()))?,
            )?;
            let right = system_from_json(
                v.get("right")
                    .ok_or_else(|| Error::Descriptor("product needs right".into()))?,
            )?;
            Ok(System::Product(Box::new(left), Box::new(right)))
        }
        other => Err(Error::Descriptor(format!("unknown system kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{crat_one, rat};
    use crate::observable::lattice_point;

    #[test]
    fn identity_fixes_sets() {
        let a = IntervalSet::interval(rat(1, 5), rat(2, 3)).unwrap();
        assert_eq!(System::Identity.apply_set(&a, 17).unwrap(), a);
    }

    #[test]
    fn rotation_translates_mod_one() {
        let sys = System::rotation(rat(1, 3)).unwrap();
        let a = IntervalSet::interval(rat(0, 1), rat(1, 3)).unwrap();
        let moved = sys.apply_set(&a, 1).unwrap();
        assert_eq!(
            moved,
            IntervalSet::interval(rat(1, 3), rat(2, 3)).unwrap()
        );
        // group law and invertibility
        let two = sys.apply_set(&sys.apply_set(&a, 5).unwrap(), 7).unwrap();
        assert_eq!(two, sys.apply_set(&a, 12).unwrap());
        assert_eq!(sys.apply_set(&moved, -1).unwrap(), a);
    }

    #[test]
    fn koopman_matches_set_action_on_indicators() {
        let sys = System::rotation(rat(3, 7)).unwrap();
        let a = IntervalSet::interval(rat(1, 7), rat(3, 7)).unwrap();
        for i in [-3i64, 0, 1, 9] {
            let lhs = sys.koopman_apply(&Observable::indicator(&a), i).unwrap();
            let rhs = Observable::indicator(&sys.apply_set(&a, i).unwrap());
            assert_eq!(lhs, rhs, "i = {i}");
        }
    }

    #[test]
    fn koopman_fixes_constants() {
        let sys = System::chacon(3).unwrap();
        let c = Observable::Step(StepFunction::constant(rat(5, 9)));
        assert_eq!(sys.koopman_apply(&c, 7).unwrap(), c);
    }

    #[test]
    fn cat_transports_characters_exactly() {
        let sys = System::cat_map();
        let chi = Observable::Trig(TrigPolynomial::character(
            lattice_point(&[1, 0]),
            crat_one(),
        ));
        let moved = sys.koopman_apply(&chi, 1).unwrap();
        // (M^T)^{-1} (1,0) with M = [[2,1],[1,1]]: M^T = M, M^{-1} = [[1,-1],[-1,2]]
        if let Observable::Trig(p) = moved {
            assert!(p.coeffs().contains_key(&lattice_point(&[1, -1])));
        } else {
            panic!("expected trig polynomial");
        }
        // invertible
        let back = sys
            .koopman_apply(&sys.koopman_apply(&chi, 11).unwrap(), -11)
            .unwrap();
        assert_eq!(back, chi);
    }

    #[test]
    fn character_orbit_matches_repeated_multiplication() {
        let m = [[2i64, 1], [1, 1]];
        let a = lattice_point(&[1, 0]);
        let mut expect = a.clone();
        let mat = Mat2::from_i64(m);
        for i in 1..=12i64 {
            let v = mat.apply(&[expect[0].clone(), expect[1].clone()]);
            expect = vec![v[0].clone(), v[1].clone()];
            assert_eq!(character_orbit(m, &a, i).unwrap(), expect, "i = {i}");
        }
        // identity matrix fixes everything; zero character is always fixed
        assert_eq!(
            character_orbit([[1, 0], [0, 1]], &lattice_point(&[9, -4]), 55).unwrap(),
            lattice_point(&[9, -4])
        );
        assert_eq!(
            character_orbit(m, &lattice_point(&[0, 0]), -97).unwrap(),
            lattice_point(&[0, 0])
        );
    }

    #[test]
    fn tower_action_preserves_measure_and_inverts() {
        let tower = ChaconTower::build(4).unwrap(); // height 121
        let sys = System::chacon(4).unwrap();
        // a set straddling parts of two mid-tower levels
        let a = tower
            .level_interval(60)
            .union(&tower.level_interval(61))
            .union(&tower.level_interval(33));
        for i in [1i64, 7, 50, -23] {
            let img = sys.apply_set(&a, i).unwrap();
            assert_eq!(img.measure(), a.measure(), "i = {i}");
            assert_eq!(sys.apply_set(&img, -i).unwrap(), a, "i = {i}");
        }
        // group law
        let lhs = sys.apply_set(&sys.apply_set(&a, 13).unwrap(), -5).unwrap();
        assert_eq!(lhs, sys.apply_set(&a, 8).unwrap());
    }

    #[test]
    fn tower_horizon_is_enforced() {
        let sys = System::chacon(2).unwrap(); // height 13
        let a = IntervalSet::interval(rat(0, 1), rat(1, 13)).unwrap();
        assert!(sys.apply_set(&a, 12).is_err());
        assert!(sys.apply_set(&a, -1).is_err());
        // a set near the top errors even for small positive i
        let tower = ChaconTower::build(2).unwrap();
        let top = tower.level_interval(12);
        assert!(sys.apply_set(&top, 1).is_err());
    }

    #[test]
    fn tower_bottom_level_climbs_the_tower() {
        let tower = ChaconTower::build(6).unwrap();
        let sys = System::RankOneTower(Arc::new(ChaconTower::build(6).unwrap()));
        let bottom = tower.level_interval(0);
        let h5 = stage_height(5) as i64;
        let img = sys.apply_set(&bottom, h5).unwrap();
        assert_eq!(img, tower.level_interval(h5 as u64));
    }

    #[test]
    fn rotation_rejects_bad_angles() {
        assert!(System::rotation(rat(5, 4)).is_err());
        assert!(System::rotation(rat(-1, 4)).is_err());
        assert!(System::torus_automorphism([[2, 0], [0, 1]]).is_err());
    }

    #[test]
    fn golden_approximant_has_huge_denominator() {
        if let System::Rotation { alpha } = System::rotation_golden() {
            assert!(alpha.denom().bits() >= 129);
        } else {
            panic!();
        }
    }

    #[test]
    fn descriptors_roundtrip() {
        let systems = vec![
            System::Identity,
            System::CyclicShift { modulus: 12 },
            System::rotation(rat(2, 7)).unwrap(),
            System::cat_map(),
            System::chacon(3).unwrap(),
            System::Product(
                Box::new(System::rotation(rat(1, 4)).unwrap()),
                Box::new(System::cat_map()),
            ),
        ];
        for sys in systems {
            let text = serde_json::to_string(&sys).unwrap();
            let back: System = serde_json::from_str(&text).unwrap();
            assert_eq!(back, sys, "{text}");
        }
        let golden: System = serde_json::from_str(r#"{"kind":"rotation","alpha":"golden"}"#).unwrap();
        assert_eq!(golden, System::rotation_golden());
    }
}
