//! Chacon's rank-one cutting-and-stacking construction.
//!
//! Each stage cuts the current tower into three equal-width columns, adds a
//! single spacer level above the middle column, and stacks the columns left
//! to right. Heights follow h_{n+1} = 3·h_n + 1 from h_0 = 1, so the stage-n
//! tower has h_n = (3^{n+1} − 1)/2 levels.
//!
//! After normalizing the ambient mass to 1 at the configured stage, the
//! stage-n levels are exactly the cells `[k/h_n, (k+1)/h_n)` of a uniform
//! grid, and the tower is a bijection from level order to grid position.
//! The transformation acts by "go up one level": in tower coordinates it is
//! the shift `ℓ ↦ ℓ+1`, undefined on the top level only. Every set and
//! Koopman operation reduces to exact grid bookkeeping.

use crate::error::{Error, Result};
use crate::measure::IntervalSet;
use crate::rat::Rat;
use num_bigint::BigInt;
use num_traits::One;

/// Largest stage the constructor will build; h_14 = 7 174 453 levels.
pub const MAX_STAGE: usize = 14;

/// Height of the stage-n tower: 1, 4, 13, 40, 121, …
pub fn stage_height(n: usize) -> u64 {
    (3u64.pow(n as u32 + 1) - 1) / 2
}

/// Immutable description of one constructed stage.
#[derive(Debug, Clone)]
pub struct ChaconTower {
    stage: usize,
    /// grid cell occupied by tower level ℓ
    level_to_cell: Vec<u32>,
    /// tower level occupying grid cell k
    cell_to_level: Vec<u32>,
}

impl ChaconTower {
    /// Build the stage-`n` tower. Cost and memory are O(h_n).
    pub fn build(n: usize) -> Result<ChaconTower> {
        if n > MAX_STAGE {
            return Err(Error::InvalidParameter(format!(
                "Chacon stage {n} exceeds the configured maximum {MAX_STAGE}"
            )));
        }
        let mut level_to_cell: Vec<u32> = vec![0];
        for _ in 0..n {
            let h = level_to_cell.len() as u32;
            let mut next = Vec::with_capacity(3 * level_to_cell.len() + 1);
            // column 1: left thirds of the old cells, in level order
            for &c in &level_to_cell {
                next.push(3 * c);
            }
            // column 2: middle thirds
            for &c in &level_to_cell {
                next.push(3 * c + 1);
            }
            // the new spacer occupies the cell appended past the old ambient
            next.push(3 * h);
            // column 3: right thirds
            for &c in &level_to_cell {
                next.push(3 * c + 2);
            }
            level_to_cell = next;
        }
        let h = level_to_cell.len();
        let mut cell_to_level = vec![0u32; h];
        for (level, &cell) in level_to_cell.iter().enumerate() {
            cell_to_level[cell as usize] = level as u32;
        }
        Ok(ChaconTower { stage: n, level_to_cell, cell_to_level })
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    /// Number of levels (= number of grid cells).
    pub fn height(&self) -> u64 {
        self.level_to_cell.len() as u64
    }

    /// Exact width of one level after normalization.
    pub fn level_width(&self) -> Rat {
        Rat::new(BigInt::one(), BigInt::from(self.height()))
    }

    pub fn cell_of_level(&self, level: u64) -> u64 {
        self.level_to_cell[level as usize] as u64
    }

    pub fn level_of_cell(&self, cell: u64) -> u64 {
        self.cell_to_level[cell as usize] as u64
    }

    /// The level-ℓ interval `[c/h, (c+1)/h)` with c the level's grid cell.
    pub fn level_interval(&self, level: u64) -> IntervalSet {
        let h = BigInt::from(self.height());
        let c = BigInt::from(self.cell_of_level(level));
        IntervalSet::interval(
            Rat::new(c.clone(), h.clone()),
            Rat::new(c + BigInt::one(), h),
        )
        .expect("level interval inside [0,1)")
    }

    /// All level intervals in tower order (bottom to top).
    pub fn level_intervals(&self) -> Vec<IntervalSet> {
        (0..self.height()).map(|l| self.level_interval(l)).collect()
    }

    /// Advance a tower level by `steps` (possibly negative); errors when the
    /// orbit leaves the constructed tower.
    pub fn step_level(&self, level: u64, steps: i64) -> Result<u64> {
        let target = level as i64 + steps;
        if target < 0 || target >= self.height() as i64 {
            return Err(Error::Horizon(format!(
                "level {level} + {steps} leaves the stage-{} tower (height {})",
                self.stage,
                self.height()
            )));
        }
        Ok(target as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heights_follow_the_recurrence() {
        assert_eq!(stage_height(0), 1);
        assert_eq!(stage_height(1), 4);
        assert_eq!(stage_height(2), 13);
        assert_eq!(stage_height(3), 40);
        let mut h = 1u64;
        for n in 1..=MAX_STAGE {
            h = 3 * h + 1;
            assert_eq!(stage_height(n), h);
        }
    }

    #[test]
    fn tower_is_a_permutation_of_cells() {
        let t = ChaconTower::build(5).unwrap();
        assert_eq!(t.height(), 364);
        let mut seen = vec![false; 364];
        for l in 0..t.height() {
            let c = t.cell_of_level(l);
            assert!(!seen[c as usize]);
            seen[c as usize] = true;
            assert_eq!(t.level_of_cell(c), l);
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn levels_partition_the_unit_interval() {
        let t = ChaconTower::build(4).unwrap();
        let mut union = IntervalSet::empty();
        for l in 0..t.height() {
            let level = t.level_interval(l);
            assert!(union.intersect(&level).is_empty());
            union = union.union(&level);
        }
        assert_eq!(union, IntervalSet::full());
    }

    #[test]
    fn stage_zero_is_a_single_level() {
        let t = ChaconTower::build(0).unwrap();
        assert_eq!(t.height(), 1);
        assert_eq!(t.level_interval(0), IntervalSet::full());
        assert!(t.step_level(0, 1).is_err());
    }

    #[test]
    fn refinement_reproduces_the_previous_stage() {
        // stage n+1 maps the three thirds of level j onto the matching
        // thirds of level j+1, for all non-top levels j of stage n
        for n in 0..=6usize {
            let coarse = ChaconTower::build(n).unwrap();
            let fine = ChaconTower::build(n + 1).unwrap();
            for j in 0..coarse.height() - 1 {
                let c = coarse.cell_of_level(j);
                let c_next = coarse.cell_of_level(j + 1);
                for r in 0..3u64 {
                    let sub = 3 * c + r;
                    let sub_next = 3 * c_next + r;
                    let l = fine.level_of_cell(sub);
                    let stepped = fine.step_level(l, 1).unwrap();
                    assert_eq!(fine.cell_of_level(stepped), sub_next);
                }
            }
        }
    }
}
