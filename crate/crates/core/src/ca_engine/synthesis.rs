//! Learned labelling schedules.
//!
//! A schedule fixes, for every tile and every time, the state an intended
//! labelling wave should show: the centre is seeded, information spreads one
//! ring per step, and tiles settle into their structural states.  Synthesis
//! simulates that trajectory on a ball and reads the induced local rules off
//! it; a schedule is only realisable when no two occurrences of the same
//! reading demand different answers.
//!
//! The ring-synchronous schedule — every tile adopts its final state the
//! moment the wave arrives — is not realisable: the two undecided white sons
//! of a white father see identical readings but need different states.  The
//! staged schedule keeps those tiles in a pending state for two steps, until
//! the next ring's black tiles reveal which son is which, and is realisable.

use thiserror::Error;

use crate::ca_engine::structure::{staged_alphabet, structure_alphabet};
use crate::ca_engine::{CaError, Configuration, DefaultPolicy, Rule, RuleTable, StateId};
use crate::fib_coords::ExtendedStatus;
use crate::tiling::{TileId, TilingBall, TilingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthesisSchedule {
    /// Every tile adopts its final state when the wave reaches its ring.
    RingSync,
    /// Undecided white tiles hold a pending state for two steps first.
    Staged,
}

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error(
        "schedule is ambiguous at step {time}: tile {tile} needs [{context}] -> {want}, \
         but -> {have} is already required"
    )]
    Ambiguity {
        time: u32,
        tile: TileId,
        context: String,
        want: String,
        have: String,
    },
    #[error("ball radius {radius} is too small to learn from; need at least {need}")]
    BallTooSmall { radius: u32, need: u32 },
    #[error(transparent)]
    Ca(#[from] CaError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
}

#[derive(Clone, Copy)]
enum Role {
    Center,
    Root,
    /// Settles into its state the moment the wave arrives.
    Prompt(StateId),
    /// Pends for two steps, then settles.
    Delayed(StateId),
}

struct Plan {
    ring: u32,
    role: Role,
}

fn plans(ball: &TilingBall, alphabet: &crate::ca_engine::Alphabet) -> Result<Vec<Plan>, SynthesisError> {
    ball.tiles()
        .map(|t| {
            let ring = ball.ring_of(t);
            let role = match ball.extended_status_of(t)? {
                ExtendedStatus::CentralMark => Role::Center,
                ExtendedStatus::RootMark => Role::Root,
                s @ (ExtendedStatus::Wwm | ExtendedStatus::Wwr) => {
                    Role::Delayed(alphabet.index_of(s.name())?)
                }
                s => Role::Prompt(alphabet.index_of(s.name())?),
            };
            Ok(Plan { ring, role })
        })
        .collect()
}

fn schedule_state(plan: &Plan, schedule: SynthesisSchedule, time: u32, seed: StateId, root: StateId, pending: StateId) -> StateId {
    let q = StateId(0);
    match schedule {
        SynthesisSchedule::RingSync => match plan.role {
            Role::Center => seed,
            Role::Root => {
                if time >= 1 {
                    seed
                } else {
                    q
                }
            }
            Role::Prompt(f) | Role::Delayed(f) => {
                if time >= plan.ring {
                    f
                } else {
                    q
                }
            }
        },
        SynthesisSchedule::Staged => match plan.role {
            Role::Center => seed,
            Role::Root => {
                if time >= 1 {
                    root
                } else {
                    q
                }
            }
            Role::Prompt(f) => {
                if time >= plan.ring {
                    f
                } else {
                    q
                }
            }
            Role::Delayed(f) => {
                if time < plan.ring {
                    q
                } else if time < plan.ring + 2 {
                    pending
                } else {
                    f
                }
            }
        },
    }
}

fn schedule_alphabet(schedule: SynthesisSchedule) -> crate::ca_engine::Alphabet {
    match schedule {
        SynthesisSchedule::RingSync => structure_alphabet(),
        SynthesisSchedule::Staged => staged_alphabet(),
    }
}

/// The intended labelling wave at one instant, as a full configuration.
pub fn schedule_labeling(
    ball: &TilingBall,
    schedule: SynthesisSchedule,
    time: u32,
) -> Result<Configuration, SynthesisError> {
    let alphabet = schedule_alphabet(schedule);
    let seed = alphabet.index_of("seed")?;
    let (root, pending) = match schedule {
        SynthesisSchedule::RingSync => (seed, seed), // unused
        SynthesisSchedule::Staged => (alphabet.index_of("root")?, alphabet.index_of("Wp")?),
    };
    let plans = plans(ball, &alphabet)?;
    let mut config = Configuration::quiescent(ball);
    for t in ball.tiles() {
        config.set_state(
            t,
            schedule_state(&plans[t.0 as usize], schedule, time, seed, root, pending),
        );
    }
    Ok(config)
}

/// Read the local rules a schedule induces off a ball.  The returned table
/// rejects unknown readings, so replaying it doubles as a coverage check.
pub fn synthesize_propagation_table(
    ball: &TilingBall,
    schedule: SynthesisSchedule,
) -> Result<RuleTable, SynthesisError> {
    if ball.radius() < 3 {
        return Err(SynthesisError::BallTooSmall {
            radius: ball.radius(),
            need: 3,
        });
    }
    let alphabet = schedule_alphabet(schedule);
    let seed = alphabet.index_of("seed")?;
    let (root, pending) = match schedule {
        SynthesisSchedule::RingSync => (seed, seed),
        SynthesisSchedule::Staged => (alphabet.index_of("root")?, alphabet.index_of("Wp")?),
    };
    let plans = plans(ball, &alphabet)?;
    let state_at = |t: TileId, time: u32| {
        schedule_state(&plans[t.0 as usize], schedule, time, seed, root, pending)
    };
    let mut table = RuleTable::new(ball.grid(), alphabet.clone(), DefaultPolicy::Reject)?;
    // every tile has settled by radius + 1; a little beyond that only
    // replays known readings
    let horizon = ball.radius() + 3;
    let mut nb: Vec<StateId> = Vec::with_capacity(ball.p() as usize);
    for time in 0..horizon {
        for t in ball.tiles() {
            if ball.ring_of(t) + 1 > ball.radius() {
                continue;
            }
            let neighbors = ball.neighbors_ordered(t)?;
            nb.clear();
            nb.extend(neighbors.iter().map(|&u| state_at(u, time)));
            let own = state_at(t, time);
            let want = state_at(t, time + 1);
            if let Some(have) = table.get(&nb, own) {
                if have != want {
                    return Err(SynthesisError::Ambiguity {
                        time: time + 1,
                        tile: t,
                        context: nb
                            .iter()
                            .chain([&own])
                            .map(|&s| alphabet.name(s).unwrap_or("?"))
                            .collect::<Vec<_>>()
                            .join(" "),
                        want: alphabet.name(want)?.to_string(),
                        have: alphabet.name(have)?.to_string(),
                    });
                }
            } else {
                table.insert(Rule {
                    neighbors: nb.clone(),
                    own,
                    result: want,
                })?;
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca_engine::step;
    use crate::fib_coords::GridKind;
    use crate::tiling::build_ball;

    #[test]
    fn ring_synchronous_learning_reports_the_white_son_clash() {
        for grid in [GridKind::Pentagrid, GridKind::Heptagrid] {
            let ball = build_ball(grid, 4).unwrap();
            match synthesize_propagation_table(&ball, SynthesisSchedule::RingSync) {
                Err(SynthesisError::Ambiguity {
                    time,
                    tile,
                    want,
                    have,
                    ..
                }) => {
                    assert_eq!(time, 2, "{grid}");
                    assert_eq!(have, "seed", "{grid}");
                    let status = ball.extended_status_of(tile).unwrap();
                    assert!(
                        matches!(status, ExtendedStatus::Wwm | ExtendedStatus::Wwr),
                        "{grid}: witness tile is {status:?}"
                    );
                    assert_eq!(want, status.name(), "{grid}");
                }
                other => panic!("{grid}: expected an ambiguity, got {other:?}"),
            }
        }
    }

    #[test]
    fn staged_learning_succeeds_and_replays_its_own_wave() {
        for grid in [GridKind::Pentagrid, GridKind::Heptagrid] {
            let ball = build_ball(grid, 6).unwrap();
            let table = synthesize_propagation_table(&ball, SynthesisSchedule::Staged).unwrap();
            assert_eq!(table.default_policy(), DefaultPolicy::Reject);
            let mut x = schedule_labeling(&ball, SynthesisSchedule::Staged, 0).unwrap();
            for k in 1..=4u32 {
                // a rejected reading here would mean the learnt rules do
                // not even cover their own trajectory
                x = step(&ball, &table, &x).unwrap();
                assert_eq!(x.valid_radius(), ball.radius() - k);
                let want = schedule_labeling(&ball, SynthesisSchedule::Staged, k).unwrap();
                for t in ball.tiles() {
                    if ball.ring_of(t) <= x.valid_radius() {
                        assert_eq!(x.state(t), want.state(t), "{grid}: tile {t} at step {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn staged_wave_starts_from_a_seeded_centre() {
        let ball = build_ball(GridKind::Pentagrid, 3).unwrap();
        let x0 = schedule_labeling(&ball, SynthesisSchedule::Staged, 0).unwrap();
        let a = staged_alphabet();
        assert_eq!(x0.state(ball.center()), a.index_of("seed").unwrap());
        for t in ball.tiles() {
            if t != ball.center() {
                assert_eq!(x0.state(t), StateId(0));
            }
        }
    }

    #[test]
    fn staged_wave_settles_into_the_ground_truth() {
        for grid in [GridKind::Pentagrid, GridKind::Heptagrid] {
            let ball = build_ball(grid, 8).unwrap();
            let table = synthesize_propagation_table(&ball, SynthesisSchedule::Staged).unwrap();
            let truth = crate::ca_engine::structure::ground_truth_labeling(&ball).unwrap();
            let staged = staged_alphabet();
            let structure = structure_alphabet();
            let mut x = schedule_labeling(&ball, SynthesisSchedule::Staged, 0).unwrap();
            let k = 5;
            for _ in 0..k {
                x = step(&ball, &table, &x).unwrap();
            }
            // rings up to k-2 have settled and are still inside the valid
            // radius; their names must match the ground truth, with the
            // first ring's distinct root state mapping to the seed
            let settled = (k - 2).min(ball.radius() - k);
            assert_eq!(settled, 3);
            for t in ball.tiles() {
                let ring = ball.ring_of(t);
                if ring > settled {
                    continue;
                }
                let got = staged.name(x.state(t)).unwrap();
                let want = structure.name(truth.state(t)).unwrap();
                if ring == 1 {
                    assert_eq!(got, "root", "{grid}: tile {t}");
                    assert_eq!(want, "seed");
                } else {
                    assert_eq!(got, want, "{grid}: tile {t} at ring {ring}");
                }
            }
        }
    }

    #[test]
    fn learning_needs_a_ball_of_radius_three() {
        let ball = build_ball(GridKind::Pentagrid, 2).unwrap();
        assert!(matches!(
            synthesize_propagation_table(&ball, SynthesisSchedule::Staged),
            Err(SynthesisError::BallTooSmall { radius: 2, need: 3 })
        ));
    }

    #[test]
    fn staged_rules_include_the_expected_sparks() {
        let ball = build_ball(GridKind::Pentagrid, 5).unwrap();
        let table = synthesize_propagation_table(&ball, SynthesisSchedule::Staged).unwrap();
        let a = table.alphabet().clone();
        let q = StateId(0);
        let seed = a.index_of("seed").unwrap();
        let root = a.index_of("root").unwrap();
        // the first ring lights up from the seeded centre
        let mut nb = vec![q; 5];
        nb[0] = seed;
        assert_eq!(table.get(&nb, q), Some(root));
        // and stays lit once the second ring is still dark
        let mut keep = vec![q; 5];
        keep[0] = seed;
        assert_eq!(table.get(&keep, root), Some(root));
    }
}
