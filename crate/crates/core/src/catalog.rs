//! One entry point for every density the crate constructs.

use crate::backlund::{build_backlund_onegap, build_backlund_twogap, TwoGapBranch};
use crate::density::{Branch, Density, Family};
use crate::elliptic::LatticeParams;
use crate::error::{Error, Result};
use crate::onegap::{build_cusp, build_onegap, soliton_limit};
use crate::real::{lit, Real};
use crate::twogap::{build_twogap_alpha, build_twogap_pm, Sign};

pub const FAMILIES: [Family; 8] = [
    Family::Onegap,
    Family::OnegapCusp,
    Family::TwogapPm,
    Family::TwogapAlpha,
    Family::BacklundOnegap,
    Family::BacklundTwogapPm,
    Family::BacklundTwogapAlpha,
    Family::Soliton,
];

/// Branches accepted by `family`.
pub fn branches(family: Family) -> &'static [Branch] {
    use Branch::*;
    match family {
        Family::Onegap | Family::TwogapAlpha | Family::BacklundOnegap | Family::BacklundTwogapAlpha => {
            &[Alpha(1), Alpha(2), Alpha(3)]
        }
        Family::OnegapCusp => &[Alpha(1), Alpha(2)],
        Family::TwogapPm | Family::BacklundTwogapPm => &[Plus, Minus],
        Family::Soliton => &[None],
    }
}

/// Builds the density of `family` on lattice `l`.
///
/// The soliton ignores the branch and uses `gamma = e1 / 2`, the value
/// reached by the cusp family as `e2 - e3 -> 0`.
pub fn build<T: Real>(family: Family, branch: Branch, l: &LatticeParams<T>) -> Result<Density<T>> {
    if family != Family::Soliton && !branches(family).contains(&branch) {
        return Err(Error::InvalidBranch(format!("{branch} for family {}", family.name())));
    }
    let sign = |b| if b == Branch::Plus { Sign::Plus } else { Sign::Minus };
    match (family, branch) {
        (Family::Onegap, Branch::Alpha(a)) => build_onegap(a, l),
        (Family::OnegapCusp, Branch::Alpha(a)) => build_cusp(a, l),
        (Family::TwogapPm, b) => build_twogap_pm(sign(b), l),
        (Family::TwogapAlpha, Branch::Alpha(a)) => build_twogap_alpha(a, l),
        (Family::BacklundOnegap, Branch::Alpha(a)) => build_backlund_onegap(a, l),
        (Family::BacklundTwogapPm, b) => build_backlund_twogap(TwoGapBranch::Pm(sign(b)), l),
        (Family::BacklundTwogapAlpha, Branch::Alpha(a)) => build_backlund_twogap(TwoGapBranch::Alpha(a), l),
        (Family::Soliton, _) => soliton_limit(l.e1 / lit(2.0)),
        _ => unreachable!("branch validated above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_branch_builds_or_degenerates() {
        let l: LatticeParams<f64> = LatticeParams::from_roots(1.0, 0.0, -1.0).unwrap();
        for f in FAMILIES {
            for &b in branches(f) {
                match build(f, b, &l) {
                    Ok(d) => assert_eq!(d.family, f),
                    Err(Error::ZeroEalpha { alpha }) => assert_eq!(alpha, 2),
                    Err(e) => panic!("{} {b}: {e}", f.name()),
                }
            }
        }
        assert!(matches!(build(Family::TwogapPm, Branch::Alpha(1), &l), Err(Error::InvalidBranch(_))));
    }
}
