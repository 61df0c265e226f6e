use std::fmt;

use super::EdgeError;
use crate::measures::{LimitMeasure, Region};

/// The supports `S1 = Supp(mu|[chi, b])`, `S2 = Supp((lambda - mu)|[chi + eta - 1, chi])`
/// and `S3 = Supp(mu|[a, chi + eta - 1])`, each as sorted closed intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSets {
    pub s1: Vec<(f64, f64)>,
    pub s2: Vec<(f64, f64)>,
    pub s3: Vec<(f64, f64)>,
    pub chi: f64,
    pub eta: f64,
}

impl SupportSets {
    fn tagged(&self) -> Vec<(f64, f64, u8)> {
        let mut v: Vec<(f64, f64, u8)> = Vec::new();
        for (k, set) in [(1u8, &self.s1), (2, &self.s2), (3, &self.s3)] {
            v.extend(set.iter().map(|&(lo, hi)| (lo, hi, k)));
        }
        v
    }

    pub fn contains(&self, x: f64) -> bool {
        self.tagged().iter().any(|&(lo, hi, _)| x >= lo - 1e-12 && x <= hi + 1e-12)
    }
}

/// The maximal open interval of the complement of `S1 u S2 u S3` holding `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtKind {
    /// `(sup S1, inf)`.
    J1,
    /// `(-inf, inf S3)`.
    J2,
    /// `(sup S2, inf S1)`.
    J3,
    /// `(sup S3, inf S2)`.
    J4,
    /// A bounded gap inside `S_i`.
    Gap(u8),
}

impl fmt::Display for LtKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LtKind::J1 => write!(f, "J1"),
            LtKind::J2 => write!(f, "J2"),
            LtKind::J3 => write!(f, "J3"),
            LtKind::J4 => write!(f, "J4"),
            LtKind::Gap(i) => write!(f, "K{i}"),
        }
    }
}

fn clip(intervals: &[(f64, f64)], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    if hi < lo {
        return Vec::new();
    }
    intervals
        .iter()
        .filter_map(|&(a, b)| {
            let (a, b) = (a.max(lo), b.min(hi));
            (a <= b).then_some((a, b))
        })
        .collect()
}

/// `[lo, hi]` minus the open full blocks, as closed (possibly degenerate)
/// intervals.
fn complement_of_blocks(blocks: &[(f64, f64)], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    if hi < lo {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = lo;
    for &(a, b) in blocks {
        if b <= cur || a > hi {
            continue;
        }
        if a >= cur {
            out.push((cur, a.min(hi)));
        }
        cur = cur.max(b);
    }
    if cur <= hi {
        out.push((cur, hi));
    }
    out
}

pub fn support_sets(mu: &LimitMeasure, chi: f64, eta: f64) -> SupportSets {
    let sup = mu.support();
    let lower = chi + eta - 1.0;
    SupportSets {
        s1: clip(&sup, chi, mu.b()),
        s2: complement_of_blocks(&mu.full_blocks(), lower, chi),
        s3: clip(&sup, mu.a(), lower),
        chi,
        eta,
    }
}

/// Kind of `L_t`, or [`EdgeError::TOnSupport`] when `t` lies in `S1 u S2 u S3`.
pub fn locate_lt(sets: &SupportSets, t: f64) -> Result<LtKind, EdgeError> {
    let tagged = sets.tagged();
    if sets.contains(t) {
        return Err(EdgeError::TOnSupport(t));
    }
    // Spatial order is S3 <= S2 <= S1; on ties the nearer set wins.
    let left = tagged
        .iter()
        .filter(|iv| iv.1 < t)
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.2.cmp(&a.2)))
        .map(|iv| iv.2);
    let right = tagged
        .iter()
        .filter(|iv| iv.0 > t)
        .min_by(|a, b| a.0.total_cmp(&b.0).then(b.2.cmp(&a.2)))
        .map(|iv| iv.2);
    Ok(match (left, right) {
        (_, None) => LtKind::J1,
        (None, _) => LtKind::J2,
        (Some(l), Some(r)) if l == r => LtKind::Gap(l),
        (Some(2), Some(1)) => LtKind::J3,
        (Some(3), Some(2)) => LtKind::J4,
        (Some(3), Some(1)) => {
            if t >= sets.chi {
                LtKind::J3
            } else {
                LtKind::J4
            }
        }
        (Some(l), Some(r)) => {
            return Err(EdgeError::Inconsistent(format!("left set S{l} right of set S{r}")));
        }
    })
}

/// Case number 1..=12 from the region, the kind of `L_t` and the sign of
/// `f'''(t)`. Cases 4, 5, 8 and 9 additionally require an endpoint of the
/// middle segment to avoid a support, and fail with
/// [`EdgeError::AssumptionViolated`] otherwise.
pub fn case_id(
    mu: &LimitMeasure,
    region: Region,
    sets: &SupportSets,
    t: f64,
    f3: f64,
) -> Result<u8, EdgeError> {
    let kind = locate_lt(sets, t)?;
    let pos = f3 > 0.0;
    let (chi, lower) = (sets.chi, sets.chi + sets.eta - 1.0);
    let placed = match region {
        Region::MuPlus => t > chi,
        Region::LambdaMinusMu => lower < t && t < chi,
        Region::MuMinus => t < lower,
    };
    if !placed {
        return Err(EdgeError::Inconsistent(format!("t = {t} misplaced for region {region}")));
    }
    let id = match (region, kind, pos) {
        (Region::MuPlus, LtKind::J1, true) => 1,
        (Region::MuPlus, LtKind::Gap(1), true) => 2,
        (Region::MuPlus, LtKind::Gap(1), false) => 3,
        (Region::MuPlus, LtKind::J3, false) => 4,
        (Region::LambdaMinusMu, LtKind::J3, false) => 5,
        (Region::LambdaMinusMu, LtKind::Gap(2), false) => 6,
        (Region::LambdaMinusMu, LtKind::Gap(2), true) => 7,
        (Region::LambdaMinusMu, LtKind::J4, true) => 8,
        (Region::MuMinus, LtKind::J4, true) => 9,
        (Region::MuMinus, LtKind::Gap(3), true) => 10,
        (Region::MuMinus, LtKind::Gap(3), false) => 11,
        (Region::MuMinus, LtKind::J2, false) => 12,
        _ => {
            return Err(EdgeError::Inconsistent(format!(
                "region {region}, L_t = {kind}, f''' = {f3:e}"
            )))
        }
    };
    let in_mu = |x: f64| mu.support().iter().any(|&(lo, hi)| x >= lo && x <= hi);
    let in_hole = |x: f64| !mu.full_blocks().iter().any(|&(lo, hi)| lo < x && x < hi);
    let violated = match id {
        4 => in_mu(chi).then_some(chi),
        5 => in_hole(chi).then_some(chi),
        8 => in_hole(lower).then_some(lower),
        9 => in_mu(lower).then_some(lower),
        _ => None,
    };
    match violated {
        Some(point) => Err(EdgeError::AssumptionViolated { case: id, point }),
        None => Ok(id),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_corner_gives_degenerate_s1() {
        let mu = LimitMeasure::piecewise_constant(&[(-1.0, 1.0, 0.5)]).unwrap();
        let sets = support_sets(&mu, 1.0, 1.0);
        assert_eq!(sets.s1, vec![(1.0, 1.0)]);
        assert_eq!(sets.s2, vec![(1.0, 1.0)]);
        assert_eq!(sets.s3, vec![(-1.0, 1.0)]);
    }

    #[test]
    fn gaps_are_labelled() {
        let mu = LimitMeasure::piecewise_constant(&[(0.0, 0.5, 1.0), (1.0, 1.5, 1.0)]).unwrap();
        let sets = support_sets(&mu, 1.2, 0.6);
        assert_eq!(sets.s1, vec![(1.2, 1.5)]);
        assert!((sets.s2[0].0 - 0.8).abs() < 1e-15 && sets.s2[0].1 == 1.0);
        assert_eq!(sets.s3, vec![(0.0, 0.5)]);
        assert_eq!(locate_lt(&sets, 2.0), Ok(LtKind::J1));
        assert_eq!(locate_lt(&sets, -1.0), Ok(LtKind::J2));
        assert_eq!(locate_lt(&sets, 1.1), Ok(LtKind::J3));
        assert_eq!(locate_lt(&sets, 0.3), Err(EdgeError::TOnSupport(0.3)));
        let sets = support_sets(&mu, 1.45, 0.5);
        // [0.95, 1.45] minus the full block (1, 1.5)
        assert_eq!(sets.s2, vec![(0.95, 1.0)]);
        assert_eq!(locate_lt(&sets, 1.2), Ok(LtKind::J3));
    }
}
