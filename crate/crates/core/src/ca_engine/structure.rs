//! Conservation tables that encode the combinatorial structure of a grid.
//!
//! Every tile deep enough in a ball (ring 3 and beyond) sees a neighbourhood
//! whose refined colours are fully determined by its own refined colour and
//! its father's.  Reading those neighbourhoods off a ball yields a small
//! fixed family of contexts — five neighbours give fourteen, and so do
//! seven — and conserving each context's own state turns the family into a
//! rule table whose fixed points include the labelling itself.

use crate::ca_engine::{Alphabet, CaError, Configuration, Rule, RuleTable, StateId};
use crate::fib_coords::{ExtendedStatus, GridKind};
use crate::tiling::{TilingBall, TilingError};

/// State names for structure labellings: quiescent, the five refined tile
/// colours, and a seed for the centre.
pub const STRUCTURE_STATES: [&str; 7] = ["q", "Bb", "Bw", "Wwm", "Wwr", "Wb", "seed"];

/// Extra states used by the staged labelling schedule: a distinct state for
/// the first ring and a pending marker for undecided white tiles.
pub const STAGED_EXTRA_STATES: [&str; 2] = ["root", "Wp"];

pub fn structure_alphabet() -> Alphabet {
    Alphabet::new(STRUCTURE_STATES.iter().map(|s| s.to_string()).collect())
        .expect("fixed names are valid")
}

pub fn staged_alphabet() -> Alphabet {
    Alphabet::new(
        STRUCTURE_STATES
            .iter()
            .chain(STAGED_EXTRA_STATES.iter())
            .map(|s| s.to_string())
            .collect(),
    )
    .expect("fixed names are valid")
}

/// Radius of the ball structure tables are read from; rings 3..radius-1
/// exhibit every context.
const OBSERVATION_RADIUS: u32 = 6;

fn status_state(alphabet: &Alphabet, status: ExtendedStatus) -> Result<StateId, CaError> {
    match status {
        ExtendedStatus::CentralMark | ExtendedStatus::RootMark => alphabet.index_of("seed"),
        other => alphabet.index_of(other.name()),
    }
}

/// Label every tile of a ball with its structural state: refined colours on
/// rings two and deeper, the seed on the centre and the first ring.
pub fn ground_truth_labeling(ball: &TilingBall) -> Result<Configuration, CaError> {
    let alphabet = structure_alphabet();
    let mut config = Configuration::quiescent(ball);
    for t in ball.tiles() {
        let status = ball.extended_status_of(t)?;
        config.set_state(t, status_state(&alphabet, status)?);
    }
    Ok(config)
}

/// Read the conservation table off a freshly built ball: one rule per
/// distinct deep-tile context, each conserving the tile's own state.
pub fn structure_table(grid: GridKind) -> Result<RuleTable, CaError> {
    if !grid.has_addresses() {
        return Err(CaError::Tiling(TilingError::NoAddresses(grid)));
    }
    let ball = crate::tiling::build_ball(grid, OBSERVATION_RADIUS)?;
    let alphabet = structure_alphabet();
    let mut table = RuleTable::new(grid, alphabet.clone(), super::DefaultPolicy::Identity)?;
    for t in ball.tiles() {
        let ring = ball.ring_of(t);
        if ring < 3 || ring > ball.radius() - 1 {
            continue;
        }
        let own = status_state(&alphabet, ball.extended_status_of(t)?)?;
        let neighbors = ball
            .neighbors_ordered(t)?
            .into_iter()
            .map(|u| status_state(&alphabet, ball.extended_status_of(u)?))
            .collect::<Result<Vec<_>, _>>()?;
        table.insert(Rule {
            neighbors,
            own,
            result: own,
        })?;
    }
    Ok(table)
}
