//! Table-driven cellular automata on tessellation balls.
//!
//! States are indices into a named alphabet whose index 0 is the quiescent
//! state.  A rule maps the father-first clockwise reading of a tile's
//! neighbourhood plus the tile's own state to a new state; a table is a
//! finite set of such rules together with a policy for unmatched readings.
//! Stepping a configuration computes every tile whose neighbourhood is
//! complete and known, so the radius of reliable information shrinks by one
//! per step.

pub mod product;
pub mod structure;
pub mod synthesis;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::fib_coords::GridKind;
use crate::tiling::{TileId, TilingBall, TilingError};

#[derive(Debug, Error)]
pub enum CaError {
    #[error("bad alphabet: {0}")]
    BadAlphabet(String),
    #[error("state {0} is outside the alphabet")]
    BadState(StateId),
    #[error("unknown state name {0:?}")]
    UnknownStateName(String),
    #[error("rule has {got} neighbours, the grid wants {want}")]
    BadArity { got: usize, want: usize },
    #[error("neighbourhood arity {0} exceeds the 7 supported by the rule encoding")]
    ArityTooLarge(u32),
    #[error("conflicting rule: context [{context}] maps to both {old} and {new}")]
    ConflictingRule {
        context: String,
        old: String,
        new: String,
    },
    #[error("cannot parse table: {0}")]
    ParseTable(String),
    #[error("cannot parse configuration: {0}")]
    ParseConfig(String),
    #[error("grids differ: {0} vs {1}")]
    GridMismatch(GridKind, GridKind),
    #[error("configuration does not fit this ball")]
    WrongBall,
    #[error(transparent)]
    Tiling(#[from] TilingError),
}

#[derive(Debug, Error)]
pub enum StepError {
    #[error("valid radius is exhausted; no tile has a fully known neighbourhood")]
    ExhaustedRadius,
    #[error("no rule for tile {tile} reading [{context}]")]
    MissingRule { tile: TileId, context: String },
    #[error(transparent)]
    Ca(#[from] CaError),
}

impl From<TilingError> for StepError {
    fn from(e: TilingError) -> StepError {
        StepError::Ca(CaError::Tiling(e))
    }
}

/// Index of a state in its alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u8);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Named state set; index 0 is always the quiescent state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, u8>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Result<Alphabet, CaError> {
        if names.is_empty() || names.len() > 256 {
            return Err(CaError::BadAlphabet(format!(
                "need 1..=256 states, got {}",
                names.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if n.is_empty()
                || n == "->"
                || n.chars()
                    .any(|c| c.is_whitespace() || c == ',' || c == '|' || c == '#')
            {
                return Err(CaError::BadAlphabet(format!("unusable state name {n:?}")));
            }
            if index.insert(n.clone(), i as u8).is_some() {
                return Err(CaError::BadAlphabet(format!("duplicate state name {n:?}")));
            }
        }
        Ok(Alphabet { names, index })
    }

    pub fn quiescent(&self) -> StateId {
        StateId(0)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one state
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: StateId) -> Result<&str, CaError> {
        self.names
            .get(s.0 as usize)
            .map(String::as_str)
            .ok_or(CaError::BadState(s))
    }

    pub fn index_of(&self, name: &str) -> Result<StateId, CaError> {
        self.index
            .get(name)
            .map(|&i| StateId(i))
            .ok_or_else(|| CaError::UnknownStateName(name.to_string()))
    }
}

/// One local rule: the father-first clockwise neighbour reading, the own
/// state, and the state written next step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub neighbors: Vec<StateId>,
    pub own: StateId,
    pub result: StateId,
}

/// Turn a rule's reading frame by `j` positions: the state previously read
/// at slot `i` appears at slot `i + j`.  Own state and result are kept.
pub fn rotate_rule(rule: &Rule, j: u32) -> Rule {
    let alpha = rule.neighbors.len();
    let j = j as usize % alpha;
    let neighbors = (0..alpha)
        .map(|i| rule.neighbors[(i + alpha - j) % alpha])
        .collect();
    Rule {
        neighbors,
        own: rule.own,
        result: rule.result,
    }
}

/// What a table does on a reading no rule covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefaultPolicy {
    /// Keep the tile's own state.
    Identity,
    /// Write the quiescent state.
    Quiescent,
    /// Fail the step.
    Reject,
}

impl fmt::Display for DefaultPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DefaultPolicy::Identity => "identity",
            DefaultPolicy::Quiescent => "quiescent",
            DefaultPolicy::Reject => "reject",
        })
    }
}

impl FromStr for DefaultPolicy {
    type Err = CaError;

    fn from_str(s: &str) -> Result<Self, CaError> {
        match s {
            "identity" => Ok(DefaultPolicy::Identity),
            "quiescent" => Ok(DefaultPolicy::Quiescent),
            "reject" => Ok(DefaultPolicy::Reject),
            _ => Err(CaError::ParseTable(format!("unknown default policy {s:?}"))),
        }
    }
}

fn encode_key(neighbors: &[StateId], own: StateId) -> u64 {
    debug_assert!(neighbors.len() <= 7);
    let mut k = u64::from(own.0) << 56;
    for (i, s) in neighbors.iter().enumerate() {
        k |= u64::from(s.0) << (8 * i);
    }
    k
}

fn decode_key(key: u64, alpha: usize) -> (Vec<StateId>, StateId) {
    let neighbors = (0..alpha)
        .map(|i| StateId((key >> (8 * i)) as u8))
        .collect();
    (neighbors, StateId((key >> 56) as u8))
}

/// A finite rule set over one grid and alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleTable {
    grid: GridKind,
    alphabet: Alphabet,
    default: DefaultPolicy,
    rules: HashMap<u64, StateId>,
}

impl RuleTable {
    pub fn new(
        grid: GridKind,
        alphabet: Alphabet,
        default: DefaultPolicy,
    ) -> Result<RuleTable, CaError> {
        if grid.alpha() > 7 {
            return Err(CaError::ArityTooLarge(grid.alpha()));
        }
        Ok(RuleTable {
            grid,
            alphabet,
            default,
            rules: HashMap::new(),
        })
    }

    pub fn grid(&self) -> GridKind {
        self.grid
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn default_policy(&self) -> DefaultPolicy {
        self.default
    }

    pub fn set_default_policy(&mut self, policy: DefaultPolicy) {
        self.default = policy;
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn check_states(&self, rule: &Rule) -> Result<(), CaError> {
        let want = self.grid.alpha() as usize;
        if rule.neighbors.len() != want {
            return Err(CaError::BadArity {
                got: rule.neighbors.len(),
                want,
            });
        }
        for &s in rule.neighbors.iter().chain([&rule.own, &rule.result]) {
            if s.0 as usize >= self.alphabet.len() {
                return Err(CaError::BadState(s));
            }
        }
        Ok(())
    }

    fn context_string(&self, neighbors: &[StateId], own: StateId) -> String {
        let mut parts: Vec<&str> = Vec::with_capacity(neighbors.len() + 2);
        for &s in neighbors {
            parts.push(self.alphabet.name(s).unwrap_or("?"));
        }
        parts.push("|");
        parts.push(self.alphabet.name(own).unwrap_or("?"));
        parts.join(" ")
    }

    /// Insert a rule; re-inserting the identical rule is fine, a different
    /// result for a present context is a conflict.
    pub fn insert(&mut self, rule: Rule) -> Result<(), CaError> {
        self.check_states(&rule)?;
        let key = encode_key(&rule.neighbors, rule.own);
        match self.rules.get(&key) {
            None => {
                self.rules.insert(key, rule.result);
                Ok(())
            }
            Some(&old) if old == rule.result => Ok(()),
            Some(&old) => Err(CaError::ConflictingRule {
                context: self.context_string(&rule.neighbors, rule.own),
                old: self.alphabet.name(old).unwrap_or("?").to_string(),
                new: self.alphabet.name(rule.result).unwrap_or("?").to_string(),
            }),
        }
    }

    pub fn get(&self, neighbors: &[StateId], own: StateId) -> Option<StateId> {
        self.rules.get(&encode_key(neighbors, own)).copied()
    }

    /// Table answer under the default policy; `None` means the policy is
    /// [`DefaultPolicy::Reject`] and the context is uncovered.
    pub fn apply(&self, neighbors: &[StateId], own: StateId) -> Option<StateId> {
        self.get(neighbors, own).or(match self.default {
            DefaultPolicy::Identity => Some(own),
            DefaultPolicy::Quiescent => Some(StateId(0)),
            DefaultPolicy::Reject => None,
        })
    }

    /// All rules, sorted by encoded context for deterministic output.
    pub fn rules_sorted(&self) -> Vec<Rule> {
        let alpha = self.grid.alpha() as usize;
        let mut keys: Vec<u64> = self.rules.keys().copied().collect();
        keys.sort_unstable();
        keys.into_iter()
            .map(|k| {
                let (neighbors, own) = decode_key(k, alpha);
                Rule {
                    neighbors,
                    own,
                    result: self.rules[&k],
                }
            })
            .collect()
    }

    /// Close the table under rotations of the reading frame; fails when two
    /// rotations of covered contexts demand different results.
    pub fn rotation_closure(&self) -> Result<RuleTable, CaError> {
        let mut out = RuleTable::new(self.grid, self.alphabet.clone(), self.default)?;
        let alpha = self.grid.alpha();
        for rule in self.rules_sorted() {
            for j in 0..alpha {
                out.insert(rotate_rule(&rule, j))?;
            }
        }
        Ok(out)
    }

    /// First rule whose rotation is missing or answers differently, with
    /// the offending rotation amount; `None` means rotation invariant.
    pub fn rotation_invariance_witness(&self) -> Option<(Rule, u32)> {
        let alpha = self.grid.alpha();
        for rule in self.rules_sorted() {
            for j in 1..alpha {
                let rot = rotate_rule(&rule, j);
                if self.get(&rot.neighbors, rot.own) != Some(rule.result) {
                    return Some((rule, j));
                }
            }
        }
        None
    }

    pub fn is_rotation_invariant(&self) -> bool {
        self.rotation_invariance_witness().is_none()
    }

    /// Header line `grid=.. alphabet=a,b,c default=..`, then one line per
    /// rule, `n0 n1 .. | own -> result`, sorted by context.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "grid={} alphabet={} default={}\n",
            self.grid,
            self.alphabet.names().join(","),
            self.default
        );
        for rule in self.rules_sorted() {
            let names: Vec<&str> = rule
                .neighbors
                .iter()
                .map(|&s| self.alphabet.name(s).expect("stored states are valid"))
                .collect();
            out.push_str(&format!(
                "{} | {} -> {}\n",
                names.join(" "),
                self.alphabet.name(rule.own).expect("valid"),
                self.alphabet.name(rule.result).expect("valid"),
            ));
        }
        out
    }

    pub fn from_text(s: &str) -> Result<RuleTable, CaError> {
        let mut lines = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| CaError::ParseTable("missing header".into()))?;
        let mut tok = header.split_whitespace();
        let grid_part = tok
            .next()
            .and_then(|t| t.strip_prefix("grid="))
            .ok_or_else(|| CaError::ParseTable("header must start with grid=".into()))?;
        let alpha_part = tok
            .next()
            .and_then(|t| t.strip_prefix("alphabet="))
            .ok_or_else(|| CaError::ParseTable("header lacks alphabet=".into()))?;
        let default_part = tok
            .next()
            .and_then(|t| t.strip_prefix("default="))
            .ok_or_else(|| CaError::ParseTable("header lacks default=".into()))?;
        if tok.next().is_some() {
            return Err(CaError::ParseTable("trailing tokens in header".into()));
        }
        let grid: GridKind = grid_part
            .parse()
            .map_err(|e| CaError::ParseTable(format!("bad grid: {e}")))?;
        let alphabet = Alphabet::new(alpha_part.split(',').map(str::to_string).collect())?;
        let default: DefaultPolicy = default_part.parse()?;
        let mut table = RuleTable::new(grid, alphabet, default)?;
        for line in lines {
            let (lhs, rest) = line
                .split_once('|')
                .ok_or_else(|| CaError::ParseTable(format!("rule line lacks '|': {line:?}")))?;
            let neighbors = lhs
                .split_whitespace()
                .map(|n| table.alphabet.index_of(n))
                .collect::<Result<Vec<_>, _>>()?;
            let mut rhs = rest.split_whitespace();
            let own = table
                .alphabet
                .index_of(rhs.next().ok_or_else(|| {
                    CaError::ParseTable(format!("rule line lacks own state: {line:?}"))
                })?)?;
            if rhs.next() != Some("->") {
                return Err(CaError::ParseTable(format!(
                    "rule line lacks '->': {line:?}"
                )));
            }
            let result = table.alphabet.index_of(rhs.next().ok_or_else(|| {
                CaError::ParseTable(format!("rule line lacks result: {line:?}"))
            })?)?;
            if rhs.next().is_some() {
                return Err(CaError::ParseTable(format!(
                    "trailing tokens in rule line: {line:?}"
                )));
            }
            table.insert(Rule {
                neighbors,
                own,
                result,
            })?;
        }
        Ok(table)
    }
}

/// States of every tile of one ball, with the radius up to which they are
/// reliable.  Tiles beyond the valid radius read as quiescent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    grid: GridKind,
    states: Vec<StateId>,
    valid_radius: u32,
}

impl Configuration {
    pub fn quiescent(ball: &TilingBall) -> Configuration {
        Configuration {
            grid: ball.grid(),
            states: vec![StateId(0); ball.tile_count()],
            valid_radius: ball.radius(),
        }
    }

    pub fn grid(&self) -> GridKind {
        self.grid
    }

    pub fn valid_radius(&self) -> u32 {
        self.valid_radius
    }

    pub fn set_valid_radius(&mut self, r: u32) {
        self.valid_radius = r;
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, t: TileId) -> StateId {
        self.states[t.0 as usize]
    }

    pub fn set_state(&mut self, t: TileId, s: StateId) {
        self.states[t.0 as usize] = s;
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    fn check_ball(&self, ball: &TilingBall) -> Result<(), CaError> {
        if self.grid != ball.grid() {
            return Err(CaError::GridMismatch(self.grid, ball.grid()));
        }
        if self.states.len() != ball.tile_count() {
            return Err(CaError::WrongBall);
        }
        Ok(())
    }

    /// One line per non-quiescent tile inside the valid radius, as
    /// `<address> <state>`, centre first and then sorted by address.
    pub fn to_text(&self, ball: &TilingBall, alphabet: &Alphabet) -> Result<String, CaError> {
        self.check_ball(ball)?;
        let mut cells: Vec<(crate::tiling::CellAddress, TileId)> = ball
            .tiles()
            .map(|t| Ok((ball.address_of(t)?, t)))
            .collect::<Result<_, TilingError>>()?;
        cells.sort_unstable();
        let mut out = String::new();
        for (addr, t) in cells {
            if ball.ring_of(t) > self.valid_radius {
                continue;
            }
            let s = self.state(t);
            if s == StateId(0) {
                continue;
            }
            out.push_str(&format!("{addr} {}\n", alphabet.name(s)?));
        }
        Ok(out)
    }

    pub fn from_text(
        ball: &TilingBall,
        alphabet: &Alphabet,
        s: &str,
    ) -> Result<Configuration, CaError> {
        let mut config = Configuration::quiescent(ball);
        let mut seen = std::collections::HashSet::new();
        for line in s
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
        {
            let mut tok = line.split_whitespace();
            let addr: crate::tiling::CellAddress = tok
                .next()
                .expect("non-empty line")
                .parse()
                .map_err(|e| CaError::ParseConfig(format!("{e}")))?;
            let state = alphabet.index_of(tok.next().ok_or_else(|| {
                CaError::ParseConfig(format!("line lacks a state: {line:?}"))
            })?)?;
            if tok.next().is_some() {
                return Err(CaError::ParseConfig(format!(
                    "trailing tokens in line: {line:?}"
                )));
            }
            let tile = ball.tile_at(addr)?;
            if !seen.insert(tile) {
                return Err(CaError::ParseConfig(format!(
                    "tile {addr} is named twice"
                )));
            }
            config.set_state(tile, state);
        }
        Ok(config)
    }
}

/// Advance one step: every tile whose whole neighbourhood lies inside the
/// valid radius gets the table's answer; the result is valid one ring less
/// deep.
pub fn step(
    ball: &TilingBall,
    table: &RuleTable,
    config: &Configuration,
) -> Result<Configuration, StepError> {
    if table.grid() != ball.grid() {
        return Err(CaError::GridMismatch(table.grid(), ball.grid()).into());
    }
    config.check_ball(ball).map_err(StepError::Ca)?;
    let vr = config.valid_radius.min(ball.radius());
    if vr == 0 {
        return Err(StepError::ExhaustedRadius);
    }
    let mut out = Configuration {
        grid: config.grid,
        states: vec![StateId(0); config.states.len()],
        valid_radius: vr - 1,
    };
    let mut nb: Vec<StateId> = Vec::with_capacity(ball.p() as usize);
    for t in ball.tiles() {
        if ball.ring_of(t) > vr - 1 {
            continue;
        }
        let neighbors = ball.neighbors_ordered(t)?;
        nb.clear();
        nb.extend(neighbors.iter().map(|&u| config.states[u.0 as usize]));
        let own = config.states[t.0 as usize];
        let res = match table.apply(&nb, own) {
            Some(r) => r,
            None => {
                return Err(StepError::MissingRule {
                    tile: t,
                    context: table.context_string(&nb, own),
                })
            }
        };
        out.states[t.0 as usize] = res;
    }
    Ok(out)
}
