//! Product of an arbitrary rule with a conserving structure layer.
//!
//! Pairing every state of a rule table with the structural state of its tile
//! yields a table over pair states.  The structure component of a reading
//! tells the rule which neighbour is the father even when the reading frame
//! is turned: for each conserved structural context and each base rule, the
//! product contains every turned copy of the paired reading, and the answer
//! is always taken from the un-turned arrangement.  One mode keeps the
//! structure component alongside that answer and yields a rotation invariant
//! table; the other deliberately drops it on turned readings and does not.

use crate::ca_engine::{Alphabet, CaError, Configuration, Rule, RuleTable, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductMode {
    /// Turned readings answer exactly like the un-turned one.
    RotationInvariant,
    /// Turned readings drop the structure component of the answer.
    NonInvariant,
}

/// Maps between pair states and their two components.
#[derive(Debug, Clone, Copy)]
pub struct ProductProjection {
    a_len: u8,
    p_len: u8,
}

impl ProductProjection {
    pub fn a_len(&self) -> usize {
        self.a_len as usize
    }

    pub fn p_len(&self) -> usize {
        self.p_len as usize
    }

    pub fn pair(&self, a: StateId, p: StateId) -> Result<StateId, CaError> {
        if a.0 >= self.a_len {
            return Err(CaError::BadState(a));
        }
        if p.0 >= self.p_len {
            return Err(CaError::BadState(p));
        }
        Ok(StateId(a.0 * self.p_len + p.0))
    }

    pub fn a_component(&self, s: StateId) -> StateId {
        StateId(s.0 / self.p_len)
    }

    pub fn p_component(&self, s: StateId) -> StateId {
        StateId(s.0 % self.p_len)
    }

    /// Pair two configurations statewise; the result is valid as deep as
    /// both inputs are.
    pub fn embed(
        &self,
        a_config: &Configuration,
        p_config: &Configuration,
    ) -> Result<Configuration, CaError> {
        if a_config.grid() != p_config.grid() {
            return Err(CaError::GridMismatch(a_config.grid(), p_config.grid()));
        }
        if a_config.len() != p_config.len() {
            return Err(CaError::WrongBall);
        }
        let mut out = a_config.clone();
        out.set_valid_radius(a_config.valid_radius().min(p_config.valid_radius()));
        for i in 0..a_config.len() {
            let t = crate::tiling::TileId(i as u32);
            out.set_state(t, self.pair(a_config.state(t), p_config.state(t))?);
        }
        Ok(out)
    }

    /// Keep only the first component of every pair state.
    pub fn project(&self, config: &Configuration) -> Configuration {
        let mut out = config.clone();
        for i in 0..config.len() {
            let t = crate::tiling::TileId(i as u32);
            out.set_state(t, self.a_component(config.state(t)));
        }
        out
    }
}

fn pair_name(a: &str, p: &str) -> String {
    format!("{a}.{p}")
}

/// Build the product of `table_a` with the conserving contexts of
/// `table_p`.  Pair states are numbered `a * |P| + p`, so the quiescent
/// pair is state 0 and projection to the first component is a division.
pub fn product_table(
    table_a: &RuleTable,
    table_p: &RuleTable,
    mode: ProductMode,
) -> Result<(RuleTable, ProductProjection), CaError> {
    if table_a.grid() != table_p.grid() {
        return Err(CaError::GridMismatch(table_a.grid(), table_p.grid()));
    }
    let grid = table_a.grid();
    let alpha = grid.alpha() as usize;
    let a_len = table_a.alphabet().len();
    let p_len = table_p.alphabet().len();
    if a_len * p_len > 256 {
        return Err(CaError::BadAlphabet(format!(
            "{a_len} x {p_len} pair states exceed 256"
        )));
    }
    let projection = ProductProjection {
        a_len: a_len as u8,
        p_len: p_len as u8,
    };
    let mut names = Vec::with_capacity(a_len * p_len);
    for a in table_a.alphabet().names() {
        for p in table_p.alphabet().names() {
            names.push(pair_name(a, p));
        }
    }
    let alphabet = Alphabet::new(names)?;
    let mut out = RuleTable::new(grid, alphabet, crate::ca_engine::DefaultPolicy::Quiescent)?;
    let q = StateId(0);
    // the product stays quiescent wherever the base rule does
    if let Some(aq) = table_a.apply(&vec![q; alpha], q) {
        out.insert(Rule {
            neighbors: vec![q; alpha],
            own: q,
            result: projection.pair(aq, q)?,
        })?;
    }
    for p_rule in table_p.rules_sorted() {
        if p_rule.result != p_rule.own {
            return Err(CaError::ConflictingRule {
                context: format!("{:?}", p_rule.neighbors),
                old: "a conserved context".into(),
                new: "a structure rule that rewrites its own state".into(),
            });
        }
        for a_rule in table_a.rules_sorted() {
            for j in 0..alpha {
                let neighbors = (0..alpha)
                    .map(|i| {
                        let src = (i + alpha - j) % alpha;
                        projection.pair(a_rule.neighbors[src], p_rule.neighbors[src])
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let own = projection.pair(a_rule.own, p_rule.own)?;
                let keep_p = j == 0 || mode == ProductMode::RotationInvariant;
                let result = projection.pair(
                    a_rule.result,
                    if keep_p { p_rule.own } else { q },
                )?;
                out.insert(Rule {
                    neighbors,
                    own,
                    result,
                })?;
            }
        }
    }
    Ok((out, projection))
}
