//! Commutation with tile transports, and recovery of local rules from
//! global maps.
//!
//! A global map eats whole configurations; a table induces one by
//! stepping.  Moving a configuration along a partial automorphism and then
//! applying the map should match applying the map first and moving the
//! result, on every tile where both sides are defined — checking that, and
//! reading a one-step neighbourhood rule back out of a black-box map, are
//! the two operations here.  Extraction plants every possible neighbourhood
//! reading at two differently-oriented anchor tiles under two paddings; a
//! map that answers inconsistently is not generated by any one-step rule.

use thiserror::Error;

use crate::ca_engine::{step, Alphabet, CaError, Configuration, Rule, RuleTable, StateId, StepError};
use crate::tiling::{Automorphism, TileId, TilingBall, TilingError};

#[derive(Debug, Error)]
pub enum HedlundError {
    #[error("no tile supports a comparison: the domain or the valid radius is too thin")]
    EmptyRegion,
    #[error("ball radius {radius} is too small; need at least {need}")]
    BallTooSmall { radius: u32, need: u32 },
    #[error(
        "not a one-step neighbourhood rule: reading [{context}] answers {have} \
         ({first}) but {got} ({second})"
    )]
    NotRadiusOne {
        context: String,
        first: String,
        second: String,
        have: String,
        got: String,
    },
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Ca(#[from] CaError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
}

/// A map from configurations of one ball to configurations of the same
/// ball, consuming one ring of validity per application.
pub trait GlobalMap {
    fn ball(&self) -> &TilingBall;
    fn alphabet(&self) -> &Alphabet;
    /// How many rings of validity one application consumes.
    fn shrink_per_step(&self) -> u32 {
        1
    }
    fn apply(&self, config: &Configuration) -> Result<Configuration, StepError>;
}

/// The global map a rule table induces by stepping.
pub struct TableGlobalMap<'a> {
    ball: &'a TilingBall,
    table: &'a RuleTable,
}

impl<'a> TableGlobalMap<'a> {
    pub fn new(ball: &'a TilingBall, table: &'a RuleTable) -> Result<TableGlobalMap<'a>, CaError> {
        if ball.grid() != table.grid() {
            return Err(CaError::GridMismatch(ball.grid(), table.grid()));
        }
        Ok(TableGlobalMap { ball, table })
    }

    pub fn table(&self) -> &RuleTable {
        self.table
    }
}

impl GlobalMap for TableGlobalMap<'_> {
    fn ball(&self) -> &TilingBall {
        self.ball
    }

    fn alphabet(&self) -> &Alphabet {
        self.table.alphabet()
    }

    fn apply(&self, config: &Configuration) -> Result<Configuration, StepError> {
        step(self.ball, self.table, config)
    }
}

/// A tile where map-then-move and move-then-map disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommutationCounterexample {
    /// Image tile, where the moved side was read.
    pub tile: TileId,
    /// Pre-image tile, where the unmoved side was read.
    pub source: TileId,
    /// Value of applying the map first and moving the result.
    pub expected: StateId,
    /// Value of moving first and applying the map.
    pub got: StateId,
}

/// Pull a configuration through an automorphism: the image of a tile shows
/// the tile's old state.  Tiles outside the image read quiescent.
pub fn transported_configuration(
    ball: &TilingBall,
    auto: &Automorphism,
    config: &Configuration,
) -> Result<Configuration, HedlundError> {
    let inv = auto.invert()?;
    let mut moved = Configuration::quiescent(ball);
    for v in ball.tiles() {
        if let Some(u) = inv.apply(v) {
            moved.set_state(v, config.state(u));
        }
    }
    Ok(moved)
}

/// Compare map-then-move against move-then-map on every tile of the
/// comparison region: tiles deep enough for the map to answer, mapped with
/// their whole neighbourhood.  Returns the first disagreement, `None` when
/// the two sides agree everywhere, and an error when no tile qualifies.
pub fn check_commutation(
    map: &dyn GlobalMap,
    auto: &Automorphism,
    config: &Configuration,
) -> Result<Option<CommutationCounterexample>, HedlundError> {
    let ball = map.ball();
    if config.grid() != ball.grid() {
        return Err(CaError::GridMismatch(config.grid(), ball.grid()).into());
    }
    if config.len() != ball.tile_count() {
        return Err(CaError::WrongBall.into());
    }
    let shrink = map.shrink_per_step();
    let vr = config.valid_radius().min(ball.radius());
    if vr < shrink {
        return Err(HedlundError::EmptyRegion);
    }
    let fx = map.apply(config)?;
    let moved = transported_configuration(ball, auto, config)?;
    let fmoved = map.apply(&moved)?;
    let mut compared = false;
    for t in ball.tiles() {
        if ball.ring_of(t) + shrink > vr {
            continue;
        }
        let Some(u) = auto.apply(t) else { continue };
        let whole_star = ball
            .neighbors_ordered(t)?
            .into_iter()
            .all(|n| auto.apply(n).is_some());
        if !whole_star {
            continue;
        }
        compared = true;
        let expected = fx.state(t);
        let got = fmoved.state(u);
        if expected != got {
            return Ok(Some(CommutationCounterexample {
                tile: u,
                source: t,
                expected,
                got,
            }));
        }
    }
    if !compared {
        return Err(HedlundError::EmptyRegion);
    }
    Ok(None)
}

/// Result of one commutation check within a sweep.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub word: String,
    pub trial: usize,
    pub counterexample: Option<CommutationCounterexample>,
}

/// Check every named automorphism against every trial configuration, in
/// order; one outcome per pair.
pub fn commutation_sweep(
    map: &dyn GlobalMap,
    autos: &[(String, Automorphism)],
    configs: &[Configuration],
) -> Result<Vec<SweepOutcome>, HedlundError> {
    let mut outcomes = Vec::with_capacity(autos.len() * configs.len());
    for (word, auto) in autos {
        for (trial, config) in configs.iter().enumerate() {
            outcomes.push(SweepOutcome {
                word: word.clone(),
                trial,
                counterexample: check_commutation(map, auto, config)?,
            });
        }
    }
    Ok(outcomes)
}

/// Deterministic filler state for tiles no reading is planted on.
fn padding_state(t: TileId, states: usize) -> StateId {
    StateId(((t.0.wrapping_mul(2_654_435_761) >> 16) % states as u32) as u8)
}

fn plant(
    ball: &TilingBall,
    anchor: TileId,
    reading: &[StateId],
    own: StateId,
    hashed_padding: bool,
    states: usize,
) -> Result<Configuration, HedlundError> {
    let mut config = Configuration::quiescent(ball);
    if hashed_padding {
        for t in ball.tiles() {
            config.set_state(t, padding_state(t, states));
        }
    }
    config.set_state(anchor, own);
    for (i, n) in ball.neighbors_ordered(anchor)?.into_iter().enumerate() {
        config.set_state(n, reading[i]);
    }
    Ok(config)
}

/// Read a one-step rule table off a global map by planting every possible
/// neighbourhood reading at two anchors — a first-ring tile and a
/// second-ring tile attached to its father through a different edge —
/// under a quiescent and a hashed padding.  Any disagreement between the
/// four answers disqualifies the map.
pub fn extract_local_rule(map: &dyn GlobalMap) -> Result<RuleTable, HedlundError> {
    let ball = map.ball();
    if ball.radius() < 3 {
        return Err(HedlundError::BallTooSmall {
            radius: ball.radius(),
            need: 3,
        });
    }
    let alphabet = map.alphabet().clone();
    let states = alphabet.len();
    let alpha = ball.p() as usize;
    let first = ball.ring_cells(1)[0];
    let first_edge = ball.father_edge(first);
    let second = ball
        .ring_cells(2)
        .iter()
        .copied()
        .find(|&t| ball.father_edge(t) != first_edge)
        .unwrap_or(ball.ring_cells(2)[0]);
    let anchors = [
        (first, false, "first-ring anchor, quiescent padding"),
        (first, true, "first-ring anchor, hashed padding"),
        (second, false, "second-ring anchor, quiescent padding"),
        (second, true, "second-ring anchor, hashed padding"),
    ];
    let mut table = RuleTable::new(
        ball.grid(),
        alphabet.clone(),
        crate::ca_engine::DefaultPolicy::Reject,
    )?;
    let mut first_seen: std::collections::HashMap<u64, &'static str> =
        std::collections::HashMap::new();
    let total = (states as u64).pow(alpha as u32 + 1);
    let mut reading = vec![StateId(0); alpha];
    for code in 0..total {
        let mut rest = code;
        for slot in reading.iter_mut() {
            *slot = StateId((rest % states as u64) as u8);
            rest /= states as u64;
        }
        let own = StateId(rest as u8);
        for (anchor, hashed, label) in anchors {
            let planted = plant(ball, anchor, &reading, own, hashed, states)?;
            let image = map.apply(&planted)?;
            let answer = image.state(anchor);
            let key_context = || {
                reading
                    .iter()
                    .chain([&own])
                    .map(|&s| alphabet.name(s).unwrap_or("?"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            if let Some(have) = table.get(&reading, own) {
                if have != answer {
                    let code_key = code;
                    return Err(HedlundError::NotRadiusOne {
                        context: key_context(),
                        first: first_seen
                            .get(&code_key)
                            .copied()
                            .unwrap_or("an earlier planting")
                            .to_string(),
                        second: label.to_string(),
                        have: alphabet.name(have)?.to_string(),
                        got: alphabet.name(answer)?.to_string(),
                    });
                }
            } else {
                first_seen.insert(code, label);
                table.insert(Rule {
                    neighbors: reading.clone(),
                    own,
                    result: answer,
                })?;
            }
        }
    }
    Ok(table)
}
