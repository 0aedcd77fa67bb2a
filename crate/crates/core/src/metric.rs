//! Exact distance between configurations of one ball.
//!
//! Two configurations are close when they agree on a deep central ball.
//! Each ring carries total weight 2^-l, split evenly among its tiles, so
//! disagreeing on all of ring l costs exactly 2^-l, and agreement through
//! ring n caps the distance at 2^-n minus the tail the ball cannot see.
//! Weights shrink outward, which gives the converse too: a distance below
//! ring n's tile weight forces agreement through ring n.  All arithmetic
//! is exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ca_engine::Configuration;
use crate::fib_coords::GridKind;
use crate::tiling::TilingBall;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("grids differ: {0} vs {1}")]
    MismatchedGrids(GridKind, GridKind),
    #[error("configuration does not fit this ball")]
    WrongBall,
}

fn power_of_two(exp: u32) -> BigInt {
    BigInt::one() << (exp as usize)
}

/// Per-tile weights, one entry per ring of a ball.
#[derive(Debug, Clone)]
pub struct LevelWeights {
    weights: Vec<BigRational>,
}

impl LevelWeights {
    /// Ring l of the ball holds its tile count; each of its tiles weighs
    /// 2^-l divided by that count.
    pub fn for_ball(ball: &TilingBall) -> LevelWeights {
        let weights = (0..=ball.radius())
            .map(|l| {
                let count = ball.ring_cells(l).len();
                BigRational::new(BigInt::one(), power_of_two(l) * BigInt::from(count))
            })
            .collect();
        LevelWeights { weights }
    }

    pub fn weight(&self, ring: u32) -> &BigRational {
        &self.weights[ring as usize]
    }

    pub fn deepest_ring(&self) -> u32 {
        (self.weights.len() - 1) as u32
    }
}

/// Sum the weights of every tile on which the two configurations differ.
/// All stored states take part, whatever the valid radii say.
pub fn distance(
    ball: &TilingBall,
    weights: &LevelWeights,
    a: &Configuration,
    b: &Configuration,
) -> Result<BigRational, MetricError> {
    for c in [a, b] {
        if c.grid() != ball.grid() {
            return Err(MetricError::MismatchedGrids(c.grid(), ball.grid()));
        }
        if c.len() != ball.tile_count() {
            return Err(MetricError::WrongBall);
        }
    }
    let mut acc = BigRational::zero();
    for t in ball.tiles() {
        if a.state(t) != b.state(t) {
            acc += weights.weight(ball.ring_of(t));
        }
    }
    Ok(acc)
}

/// Largest possible distance between configurations that agree on every
/// ring up to and including `n`: the geometric tail 2^-n - 2^-radius.
pub fn ball_agreement_bound(ball: &TilingBall, n: u32) -> BigRational {
    let radius = ball.radius();
    if n >= radius {
        return BigRational::zero();
    }
    BigRational::new(BigInt::one(), power_of_two(n))
        - BigRational::new(BigInt::one(), power_of_two(radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca_engine::StateId;
    use crate::fib_coords::GridKind;
    use crate::tiling::build_ball;
    use proptest::prelude::*;

    fn ball() -> TilingBall {
        build_ball(GridKind::Pentagrid, 3).unwrap()
    }

    #[test]
    fn each_ring_carries_half_the_previous_total() {
        for grid in [GridKind::Pentagrid, GridKind::Heptagrid] {
            let ball = build_ball(grid, 4).unwrap();
            let w = LevelWeights::for_ball(&ball);
            for l in 0..=4u32 {
                let ring_total: BigRational = ball
                    .ring_cells(l)
                    .iter()
                    .map(|_| w.weight(l).clone())
                    .sum();
                let want = BigRational::new(BigInt::one(), power_of_two(l));
                assert_eq!(ring_total, want, "{grid}: ring {l}");
            }
            for l in 1..=4u32 {
                assert!(w.weight(l) < w.weight(l - 1), "{grid}: weights must shrink");
            }
        }
    }

    #[test]
    fn one_flipped_tile_costs_its_ring_weight() {
        let ball = ball();
        let w = LevelWeights::for_ball(&ball);
        let a = Configuration::quiescent(&ball);
        for ring in 0..=3u32 {
            let mut b = a.clone();
            b.set_state(ball.ring_cells(ring)[0], StateId(1));
            assert_eq!(distance(&ball, &w, &a, &b).unwrap(), *w.weight(ring));
        }
    }

    #[test]
    fn total_disagreement_beyond_a_ring_meets_the_bound_exactly() {
        let ball = ball();
        let w = LevelWeights::for_ball(&ball);
        let a = Configuration::quiescent(&ball);
        for n in 0..=3u32 {
            let mut b = a.clone();
            for t in ball.tiles() {
                if ball.ring_of(t) > n {
                    b.set_state(t, StateId(1));
                }
            }
            assert_eq!(
                distance(&ball, &w, &a, &b).unwrap(),
                ball_agreement_bound(&ball, n),
                "agreement through ring {n}"
            );
        }
        assert_eq!(ball_agreement_bound(&ball, 3), BigRational::zero());
        assert_eq!(ball_agreement_bound(&ball, 9), BigRational::zero());
    }

    #[test]
    fn mismatched_inputs_are_refused() {
        let penta = ball();
        let hepta = build_ball(GridKind::Heptagrid, 3).unwrap();
        let w = LevelWeights::for_ball(&penta);
        let a = Configuration::quiescent(&penta);
        let b = Configuration::quiescent(&hepta);
        assert!(matches!(
            distance(&penta, &w, &a, &b),
            Err(MetricError::MismatchedGrids(..))
        ));
        let small = Configuration::quiescent(&build_ball(GridKind::Pentagrid, 2).unwrap());
        assert!(matches!(
            distance(&penta, &w, &a, &small),
            Err(MetricError::WrongBall)
        ));
    }

    fn config_strategy(len: usize) -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(0..3u8, len)
    }

    fn make(ball: &TilingBall, states: &[u8]) -> Configuration {
        let mut c = Configuration::quiescent(ball);
        for (i, &s) in states.iter().enumerate() {
            c.set_state(crate::tiling::TileId(i as u32), StateId(s));
        }
        c
    }

    proptest! {
        #[test]
        fn distances_behave_like_a_metric(
            xs in config_strategy(61),
            ys in config_strategy(61),
            zs in config_strategy(61),
        ) {
            let ball = ball();
            prop_assert_eq!(ball.tile_count(), 61);
            let w = LevelWeights::for_ball(&ball);
            let a = make(&ball, &xs);
            let b = make(&ball, &ys);
            let c = make(&ball, &zs);
            let dab = distance(&ball, &w, &a, &b).unwrap();
            let dba = distance(&ball, &w, &b, &a).unwrap();
            prop_assert_eq!(&dab, &dba);
            prop_assert_eq!(distance(&ball, &w, &a, &a).unwrap(), BigRational::zero());
            prop_assert_eq!(dab == BigRational::zero(), a == b);
            let dac = distance(&ball, &w, &a, &c).unwrap();
            let dbc = distance(&ball, &w, &b, &c).unwrap();
            prop_assert!(dac <= dab.clone() + dbc);
        }

        #[test]
        fn small_distances_force_deep_agreement(
            xs in config_strategy(61),
            ys in config_strategy(61),
            n in 0..3u32,
        ) {
            let ball = ball();
            let w = LevelWeights::for_ball(&ball);
            let a = make(&ball, &xs);
            let b = make(&ball, &ys);
            let d = distance(&ball, &w, &a, &b).unwrap();
            // agreement through ring n keeps the distance under the bound,
            // and a distance under ring n's tile weight forces agreement
            let agree_through_n = ball
                .tiles()
                .filter(|&t| ball.ring_of(t) <= n)
                .all(|t| a.state(t) == b.state(t));
            if agree_through_n {
                prop_assert!(d <= ball_agreement_bound(&ball, n));
            }
            if d < *w.weight(n) {
                prop_assert!(agree_through_n);
            }
        }
    }
}
