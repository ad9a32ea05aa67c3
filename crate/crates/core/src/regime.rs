//! Classification of `(α, β)` against the known global-regularity regions of
//! the 2D generalized MHD system.
//!
//! Inequalities are evaluated exactly on the given doubles, strict or closed
//! as each region states them. The verdict's `margin` is the smallest slack
//! among the matched region's inequality conditions (equality conditions
//! such as `β = 1` do not contribute), so near-boundary cases show up as
//! small margins rather than being absorbed by an epsilon.

use std::fmt;

use serde::{Deserialize, Serialize};

const THIRD: f64 = 1.0 / 3.0;

/// Regularity regions in precedence order; the first match wins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `1/3 < α < 1/2`, `β = 1`.
    FullDiffusionThirdAlpha,
    /// `0 < α ≤ 1/3`, `1 < β ≤ 3/2`, `3 < 2β + 2α/(1−α)`.
    FractionalDiffusionLowAlpha,
    /// `α ≥ 1/2`, `β ≥ 1`.
    HalfAlphaFullDiffusion,
    /// `α ≥ 2`, `β = 0`.
    StrongDissipationNoDiffusion,
    /// `0 ≤ α < 1/2`, `2α + β > 2`.
    TwoAlphaPlusBeta,
    /// `α = 0`, `β > 3/2`.
    InviscidBetaThreeHalves,
    /// `0 < α < 1/2`, `5/4 < β ≤ 3/2`, `α + 2β > 3`.
    AlphaPlusTwoBeta,
    /// `α = 0`, `β > 1`.
    InviscidBetaAboveOne,
    Uncovered,
}

impl Region {
    /// All covering regions, in precedence order.
    pub const COVERING: [Region; 8] = [
        Region::FullDiffusionThirdAlpha,
        Region::FractionalDiffusionLowAlpha,
        Region::HalfAlphaFullDiffusion,
        Region::StrongDissipationNoDiffusion,
        Region::TwoAlphaPlusBeta,
        Region::InviscidBetaThreeHalves,
        Region::AlphaPlusTwoBeta,
        Region::InviscidBetaAboveOne,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Region::FullDiffusionThirdAlpha => "full_diffusion_third_alpha",
            Region::FractionalDiffusionLowAlpha => "fractional_diffusion_low_alpha",
            Region::HalfAlphaFullDiffusion => "half_alpha_full_diffusion",
            Region::StrongDissipationNoDiffusion => "strong_dissipation_no_diffusion",
            Region::TwoAlphaPlusBeta => "two_alpha_plus_beta",
            Region::InviscidBetaThreeHalves => "inviscid_beta_three_halves",
            Region::AlphaPlusTwoBeta => "alpha_plus_two_beta",
            Region::InviscidBetaAboveOne => "inviscid_beta_above_one",
            Region::Uncovered => "uncovered",
        }
    }

    /// Whether `(α, β)` satisfies every condition of the region.
    pub fn contains(&self, alpha: f64, beta: f64) -> bool {
        self.conditions(alpha, beta).iter().all(Condition::holds)
    }

    fn conditions(&self, a: f64, b: f64) -> Vec<Condition> {
        use Condition::*;
        match self {
            Region::FullDiffusionThirdAlpha => vec![Gt(a, THIRD), Gt(0.5, a), Eq(b, 1.0)],
            Region::FractionalDiffusionLowAlpha => {
                // 2α/(1−α) is only meaningful below α = 1; α ≤ 1/3 is checked first.
                let lhs = if a < 1.0 { 2.0 * b + 2.0 * a / (1.0 - a) } else { f64::NAN };
                vec![Gt(a, 0.0), Ge(THIRD, a), Gt(b, 1.0), Ge(1.5, b), Gt(lhs, 3.0)]
            }
            Region::HalfAlphaFullDiffusion => vec![Ge(a, 0.5), Ge(b, 1.0)],
            Region::StrongDissipationNoDiffusion => vec![Ge(a, 2.0), Eq(b, 0.0)],
            Region::TwoAlphaPlusBeta => vec![Ge(a, 0.0), Gt(0.5, a), Gt(2.0 * a + b, 2.0)],
            Region::InviscidBetaThreeHalves => vec![Eq(a, 0.0), Gt(b, 1.5)],
            Region::AlphaPlusTwoBeta => vec![
                Gt(a, 0.0),
                Gt(0.5, a),
                Gt(b, 1.25),
                Ge(1.5, b),
                Gt(a + 2.0 * b, 3.0),
            ],
            Region::InviscidBetaAboveOne => vec![Eq(a, 0.0), Gt(b, 1.0)],
            Region::Uncovered => vec![],
        }
    }

    /// Smallest inequality slack; negative when some inequality fails.
    fn inequality_margin(&self, alpha: f64, beta: f64) -> f64 {
        self.conditions(alpha, beta)
            .iter()
            .filter_map(Condition::slack)
            .fold(f64::INFINITY, f64::min)
    }

    /// Signed distance over all conditions, counting equalities as `−|diff|`.
    fn signed_distance(&self, alpha: f64, beta: f64) -> f64 {
        self.conditions(alpha, beta)
            .iter()
            .map(|c| c.slack().unwrap_or_else(|| c.equality_gap()))
            .fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug)]
enum Condition {
    /// `x > y`
    Gt(f64, f64),
    /// `x ≥ y`
    Ge(f64, f64),
    /// `x = y`
    Eq(f64, f64),
}

impl Condition {
    fn holds(&self) -> bool {
        match *self {
            Condition::Gt(x, y) => x > y,
            Condition::Ge(x, y) => x >= y,
            Condition::Eq(x, y) => x == y,
        }
    }

    fn slack(&self) -> Option<f64> {
        match *self {
            Condition::Gt(x, y) | Condition::Ge(x, y) => Some(if x.is_nan() { f64::NEG_INFINITY } else { x - y }),
            Condition::Eq(..) => None,
        }
    }

    fn equality_gap(&self) -> f64 {
        match *self {
            Condition::Eq(x, y) => -(x - y).abs(),
            _ => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeVerdict {
    pub alpha: f64,
    pub beta: f64,
    pub covered: bool,
    pub source: Region,
    /// Slack of the binding inequality; for uncovered pairs, the largest
    /// (least negative) signed distance to any region.
    pub margin: f64,
    pub notes: String,
}

/// First covering region for `(α, β)`, or `Uncovered`.
pub fn classify(alpha: f64, beta: f64) -> RegimeVerdict {
    let hit = Region::COVERING
        .iter()
        .copied()
        .find(|r| r.contains(alpha, beta));
    match hit {
        Some(region) => RegimeVerdict {
            alpha,
            beta,
            covered: true,
            source: region,
            margin: region.inequality_margin(alpha, beta),
            notes: region_note(region).to_string(),
        },
        None => {
            let margin = Region::COVERING
                .iter()
                .map(|r| r.signed_distance(alpha, beta))
                .fold(f64::NEG_INFINITY, f64::max);
            let notes = if alpha == 0.0 && beta == 1.0 {
                "open endpoint alpha = 0, beta = 1; only numerical studies are available"
            } else {
                "no known global regularity result"
            };
            RegimeVerdict {
                alpha,
                beta,
                covered: false,
                source: Region::Uncovered,
                margin,
                notes: notes.to_string(),
            }
        }
    }
}

/// Every covering region containing `(α, β)`, in precedence order.
pub fn matching_regions(alpha: f64, beta: f64) -> Vec<Region> {
    Region::COVERING
        .iter()
        .copied()
        .filter(|r| r.contains(alpha, beta))
        .collect()
}

fn region_note(region: Region) -> &'static str {
    match region {
        Region::FullDiffusionThirdAlpha => "alpha > 1/3 with full magnetic diffusion",
        Region::FractionalDiffusionLowAlpha => "3 < 2 beta + 2 alpha / (1 - alpha)",
        Region::HalfAlphaFullDiffusion => "alpha >= 1/2, beta >= 1",
        Region::StrongDissipationNoDiffusion => "alpha >= 2 without magnetic diffusion",
        Region::TwoAlphaPlusBeta => "2 alpha + beta > 2",
        Region::InviscidBetaThreeHalves => "alpha = 0, beta > 3/2",
        Region::AlphaPlusTwoBeta => "alpha + 2 beta > 3",
        Region::InviscidBetaAboveOne => "alpha = 0, beta > 1",
        Region::Uncovered => "",
    }
}

/// Lower bounds on `β` for a given `α ∈ [0, 1/3]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundsRow {
    pub alpha: f64,
    /// `2 − 2α`
    pub two_alpha_plus_beta: f64,
    /// `(3 − α)/2`
    pub alpha_plus_two_beta: f64,
    /// `3/2 − α/(1−α)`
    pub fractional_diffusion: f64,
}

impl BoundsRow {
    pub const CSV_HEADER: &'static str =
        "alpha,bound_two_alpha_plus_beta,bound_alpha_plus_two_beta,bound_fractional_diffusion";

    pub fn at(alpha: f64) -> Self {
        BoundsRow {
            alpha,
            two_alpha_plus_beta: 2.0 - 2.0 * alpha,
            alpha_plus_two_beta: (3.0 - alpha) / 2.0,
            fractional_diffusion: 1.5 - alpha / (1.0 - alpha),
        }
    }

    /// The fractional-diffusion bound lies strictly below both older bounds.
    pub fn improves(&self) -> bool {
        self.fractional_diffusion < self.two_alpha_plus_beta.min(self.alpha_plus_two_beta)
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e}",
            self.alpha, self.two_alpha_plus_beta, self.alpha_plus_two_beta, self.fractional_diffusion
        )
    }
}

/// `resolution` rows with `α` uniform on `[0, 1/3]`, endpoints included.
pub fn region_boundary_table(resolution: usize) -> Vec<BoundsRow> {
    assert!(resolution >= 2, "resolution must be at least 2");
    (0..resolution)
        .map(|i| {
            let alpha = if i + 1 == resolution {
                THIRD
            } else {
                THIRD * i as f64 / (resolution - 1) as f64
            };
            BoundsRow::at(alpha)
        })
        .collect()
}
