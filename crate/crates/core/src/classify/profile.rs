//! The two admissible weight enumerators of extremal self-dual `[44,22,8]`
//! codes, parameterized by `beta` through `A_8 = 44 + 4 beta`.

use std::fmt;
use std::str::FromStr;

use crate::gf2core::WeightDistribution;

use super::ClassifyError;

pub const EXTREMAL_LENGTH: usize = 44;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    W1,
    W2,
}

impl Family {
    /// `(A_10, A_12)` offsets at `beta = 0`, and the admissible `beta` range.
    fn coefficients(self) -> (i64, i64, std::ops::RangeInclusive<i64>) {
        match self {
            Family::W1 => (976, 12289, 10..=122),
            Family::W2 => (1232, 10241, 0..=154),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::W1 => "W1",
            Family::W2 => "W2",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "W1" | "w1" => Ok(Family::W1),
            "W2" | "w2" => Ok(Family::W2),
            _ => Err(format!("unknown weight enumerator family {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtremalProfile {
    pub family: Family,
    pub beta: u32,
}

impl ExtremalProfile {
    pub fn a8(&self) -> u64 {
        44 + 4 * self.beta as u64
    }

    pub fn a10(&self) -> u64 {
        let (a10, _, _) = self.family.coefficients();
        (a10 - 8 * self.beta as i64) as u64
    }

    pub fn a12(&self) -> u64 {
        let (_, a12, _) = self.family.coefficients();
        (a12 - 20 * self.beta as i64) as u64
    }
}

impl fmt::Display for ExtremalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} beta={}", self.family, self.beta)
    }
}

/// Resolves `(family, beta)` from a weight distribution of length 44.
pub fn beta_profile(wd: &WeightDistribution) -> Result<ExtremalProfile, ClassifyError> {
    let bad = |msg: String| ClassifyError::NotExtremal(msg);
    if wd.n() != EXTREMAL_LENGTH {
        return Err(bad(format!("length {} instead of 44", wd.n())));
    }
    if wd.get(0) != 1 {
        return Err(bad(format!("A_0 = {}", wd.get(0))));
    }
    if let Some(w) = (1..8).find(|&w| wd.get(w) != 0) {
        return Err(bad(format!(
            "A_{w} = {} but the minimum weight must be 8",
            wd.get(w)
        )));
    }
    if let Some(w) = (9..=EXTREMAL_LENGTH).step_by(2).find(|&w| wd.get(w) != 0) {
        return Err(bad(format!("odd weight {w} occurs")));
    }
    let a8 = wd.get(8) as i64;
    if a8 < 44 || (a8 - 44) % 4 != 0 {
        return Err(bad(format!("A_8 = {a8} is not 44 + 4 beta")));
    }
    let beta = (a8 - 44) / 4;
    let (a10, a12) = (wd.get(10) as i64, wd.get(12) as i64);
    for family in [Family::W1, Family::W2] {
        let (c10, c12, range) = family.coefficients();
        if a10 == c10 - 8 * beta && a12 == c12 - 20 * beta && range.contains(&beta) {
            return Ok(ExtremalProfile {
                family,
                beta: beta as u32,
            });
        }
    }
    Err(bad(format!(
        "A_8 = {a8}, A_10 = {a10}, A_12 = {a12} match neither family"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wd(a8: u64, a10: u64, a12: u64) -> WeightDistribution {
        let mut counts = vec![0u64; 45];
        counts[0] = 1;
        counts[8] = a8;
        counts[10] = a10;
        counts[12] = a12;
        WeightDistribution::from_counts(counts)
    }

    #[test]
    fn resolves_both_families() {
        let p = beta_profile(&wd(532, 0, 12289 - 20 * 122)).unwrap();
        assert_eq!((p.family, p.beta), (Family::W1, 122));
        let p = beta_profile(&wd(44, 1232, 10241)).unwrap();
        assert_eq!((p.family, p.beta), (Family::W2, 0));
        assert_eq!((p.a8(), p.a10(), p.a12()), (44, 1232, 10241));
    }

    #[test]
    fn rejects_inconsistent_distributions() {
        assert!(beta_profile(&wd(45, 1232, 10241)).is_err());
        // W1 needs beta >= 10.
        assert!(beta_profile(&wd(44, 976, 12289)).is_err());
        assert!(beta_profile(&wd(44, 1000, 10241)).is_err());
        let mut counts = vec![0u64; 45];
        counts[0] = 1;
        counts[6] = 3;
        assert!(beta_profile(&WeightDistribution::from_counts(counts)).is_err());
    }
}
