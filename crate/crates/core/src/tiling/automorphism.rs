//! Adjacency-preserving partial maps of a ball, built by flag transport.
//!
//! A map is seeded by one flag pair and propagated: when tile `t` maps to
//! `u` with edge offset `r`, the neighbour of `t` across edge `e` must map
//! to the neighbour of `u` across edge `e+r`.  Propagation stops where the
//! image would leave the ball, so translations become partial maps with a
//! smaller domain while rotations about the centre stay total.

use std::collections::VecDeque;

use super::{Flag, TileId, TilingBall, TilingError};
use crate::fib_coords::GridKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    p: u8,
    map: Vec<Option<(TileId, u8)>>,
}

impl Automorphism {
    pub fn identity(ball: &TilingBall) -> Automorphism {
        Automorphism {
            p: ball.p(),
            map: ball.tiles().map(|t| Some((t, 0))).collect(),
        }
    }

    pub fn apply(&self, t: TileId) -> Option<TileId> {
        self.map.get(t.0 as usize).copied().flatten().map(|(u, _)| u)
    }

    /// Edge offset at `t`: edge `e` of `t` maps to edge `e + offset` of the
    /// image tile.
    pub fn offset(&self, t: TileId) -> Option<u8> {
        self.map.get(t.0 as usize).copied().flatten().map(|(_, r)| r)
    }

    pub fn apply_flag(&self, f: Flag) -> Option<Flag> {
        let (u, r) = self.map.get(f.tile.0 as usize).copied().flatten()?;
        Some(Flag {
            tile: u,
            edge: ((u16::from(f.edge) + u16::from(r)) % u16::from(self.p)) as u8,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.map.iter().filter(|m| m.is_some()).count()
    }

    pub fn domain(&self) -> impl Iterator<Item = TileId> + '_ {
        self.map
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|_| TileId(i as u32)))
    }

    /// `self ∘ other`: `other` applies first.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism, TilingError> {
        let p = u16::from(self.p);
        let mut map = vec![None; other.map.len()];
        for (i, m) in other.map.iter().enumerate() {
            if let Some((mid, r1)) = m {
                if let Some(Some((end, r2))) = self.map.get(mid.0 as usize) {
                    map[i] = Some((*end, ((u16::from(*r1) + u16::from(*r2)) % p) as u8));
                }
            }
        }
        let out = Automorphism { p: self.p, map };
        if out.domain_size() == 0 {
            return Err(TilingError::EmptyDomain);
        }
        Ok(out)
    }

    pub fn invert(&self) -> Result<Automorphism, TilingError> {
        let p = u16::from(self.p);
        let mut map = vec![None; self.map.len()];
        let mut any = false;
        for (i, m) in self.map.iter().enumerate() {
            if let Some((u, r)) = m {
                let slot = &mut map[u.0 as usize];
                if slot.is_some() {
                    return Err(TilingError::NotInjective);
                }
                *slot = Some((TileId(i as u32), ((p - u16::from(*r)) % p) as u8));
                any = true;
            }
        }
        if !any {
            return Err(TilingError::EmptyDomain);
        }
        Ok(Automorphism { p: self.p, map })
    }

    /// `by ∘ self ∘ by⁻¹`.
    pub fn conjugate(&self, by: &Automorphism) -> Result<Automorphism, TilingError> {
        by.compose(&self.compose(&by.invert()?)?)
    }

    pub fn has_fixed_tile(&self) -> bool {
        self.map
            .iter()
            .enumerate()
            .any(|(i, m)| matches!(m, Some((u, _)) if u.0 as usize == i))
    }

    /// True when no power up to the vertex degree fixes a tile.  Rotations
    /// about a tile centre fix that tile at once; rotations about an edge
    /// midpoint or a vertex become the identity within `q` powers; plane
    /// translations pass.  A power whose domain collapses rejects the map.
    pub fn is_plane_fixed_point_free(&self, vertex_degree: u32) -> bool {
        let mut power = self.clone();
        for k in 1..=vertex_degree {
            if power.has_fixed_tile() {
                return false;
            }
            if k < vertex_degree {
                match power.compose(self) {
                    Ok(next) => power = next,
                    Err(_) => return false,
                }
            }
        }
        true
    }
}

/// Extend the flag pair `src -> dst` to an adjacency-preserving map of the
/// ball.  Fails when the seeds are not related by a symmetry of the grid.
pub fn transport(ball: &TilingBall, src: Flag, dst: Flag) -> Result<Automorphism, TilingError> {
    let p = ball.p();
    let n = ball.tile_count();
    for f in [src, dst] {
        if f.tile.0 as usize >= n {
            return Err(TilingError::UnknownTile(f.tile));
        }
        if f.edge >= p {
            return Err(TilingError::Inconsistent(format!(
                "flag edge {} out of range for p={p}",
                f.edge
            )));
        }
    }
    let pw = u16::from(p);
    let mut map: Vec<Option<(TileId, u8)>> = vec![None; n];
    let r0 = ((u16::from(dst.edge) + pw - u16::from(src.edge)) % pw) as u8;
    map[src.tile.0 as usize] = Some((dst.tile, r0));
    let mut queue = VecDeque::from([src.tile]);
    while let Some(t) = queue.pop_front() {
        let (u, r) = map[t.0 as usize].expect("queued tiles are mapped");
        for e in 0..p {
            let Some(f) = ball.neighbor(t, e) else { continue };
            let ie = ((u16::from(e) + u16::from(r)) % pw) as u8;
            let Some(g) = ball.neighbor(u, ie) else { continue };
            let r2 = ((u16::from(g.edge) + pw - u16::from(f.edge)) % pw) as u8;
            let entry = (g.tile, r2);
            match map[f.tile.0 as usize] {
                None => {
                    map[f.tile.0 as usize] = Some(entry);
                    queue.push_back(f.tile);
                }
                Some(old) if old == entry => {}
                Some(_) => return Err(TilingError::NotAnAutomorphism),
            }
        }
    }
    // A transport of a plane symmetry is injective; anything else is rejected.
    let a = Automorphism { p, map };
    let mut seen = vec![false; n];
    for t in a.domain() {
        let u = a.apply(t).expect("domain tiles have images");
        if std::mem::replace(&mut seen[u.0 as usize], true) {
            return Err(TilingError::NotInjective);
        }
    }
    Ok(a)
}

/// The total automorphism turning the ball by `j` edges about its centre.
pub fn rotation_about_center(ball: &TilingBall, j: u8) -> Result<Automorphism, TilingError> {
    let j = j % ball.p();
    transport(
        ball,
        Flag { tile: ball.center(), edge: 0 },
        Flag { tile: ball.center(), edge: j },
    )
}

/// A pair of independent translations together with any derived maps that
/// come out of their defining relations.
pub struct ShiftGenerators {
    pub tau1: Automorphism,
    pub tau2: Automorphism,
    pub derived: Vec<(String, Automorphism)>,
}

impl ShiftGenerators {
    pub fn named(&self) -> Vec<(String, Automorphism)> {
        let mut v = vec![
            ("t1".to_string(), self.tau1.clone()),
            ("t2".to_string(), self.tau2.clone()),
        ];
        v.extend(self.derived.iter().cloned());
        v
    }
}

pub fn shift_generators(ball: &TilingBall) -> Result<ShiftGenerators, TilingError> {
    if ball.radius() < 3 {
        return Err(TilingError::GeneratorSearchFailed(
            "ball radius must be at least 3".into(),
        ));
    }
    match ball.grid() {
        GridKind::Pentagrid => pentagrid_generators(ball),
        GridKind::Heptagrid => heptagrid_generators(ball),
        g => Err(TilingError::UnsupportedGrid(g)),
    }
}

fn plane_fpf_transports(ball: &TilingBall, target: TileId) -> Vec<Automorphism> {
    let src = Flag { tile: ball.center(), edge: 0 };
    (0..ball.p())
        .filter_map(|m| transport(ball, src, Flag { tile: target, edge: m }).ok())
        .filter(|a| a.is_plane_fixed_point_free(u32::from(ball.q())))
        .collect()
}

/// First plane-fpf pair, in lexicographic seed order, whose words of length
/// at most 8 move the centre onto every tile of the radius-2 sub-ball.
fn pentagrid_generators(ball: &TilingBall) -> Result<ShiftGenerators, TilingError> {
    let mut candidates = Vec::new();
    for &t in ball.ring_cells(1) {
        candidates.extend(plane_fpf_transports(ball, t));
    }
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            if words_cover_small_ball(ball, &candidates[i], &candidates[j], 8, 2)? {
                return Ok(ShiftGenerators {
                    tau1: candidates[i].clone(),
                    tau2: candidates[j].clone(),
                    derived: Vec::new(),
                });
            }
        }
    }
    Err(TilingError::GeneratorSearchFailed(
        "no plane-fpf pair moves the centre across the radius-2 sub-ball".into(),
    ))
}

fn words_cover_small_ball(
    ball: &TilingBall,
    a: &Automorphism,
    b: &Automorphism,
    max_len: u32,
    target_radius: u32,
) -> Result<bool, TilingError> {
    let gens = [a.clone(), a.invert()?, b.clone(), b.invert()?];
    let mut reached = vec![false; ball.tile_count()];
    reached[0] = true;
    let mut frontier = vec![ball.center()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &t in &frontier {
            for g in &gens {
                if let Some(u) = g.apply(t) {
                    if !std::mem::replace(&mut reached[u.0 as usize], true) {
                        next.push(u);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(ball
        .tiles()
        .all(|t| ball.ring_of(t) > target_radius || reached[t.0 as usize]))
}

/// Fixed seeds towards the first and fourth centre neighbours, then solve
/// the conjugation relations that pin the remaining generator images.
fn heptagrid_generators(ball: &TilingBall) -> Result<ShiftGenerators, TilingError> {
    let ring1 = ball.ring_cells(1).to_vec();
    let image = |a: &Automorphism| a.apply(ball.center());
    for tau1 in plane_fpf_transports(ball, ring1[0]) {
        for tau2 in plane_fpf_transports(ball, ring1[3]) {
            let Ok(c21) = tau2.conjugate(&tau1) else { continue };
            if image(&c21) != Some(ring1[2]) {
                continue;
            }
            let Ok(c12) = tau1.conjugate(&tau2) else { continue };
            if image(&c12) != Some(ring1[1]) {
                continue;
            }
            let Ok(xi1) = c21.invert() else { continue };
            if image(&xi1) != Some(ring1[6]) {
                continue;
            }
            let Ok(xi2) = c12.invert() else { continue };
            if image(&xi2) != Some(ring1[4]) {
                continue;
            }
            return Ok(ShiftGenerators {
                tau1,
                tau2,
                derived: vec![("xi1".to_string(), xi1), ("xi2".to_string(), xi2)],
            });
        }
    }
    Err(TilingError::GeneratorSearchFailed(
        "no candidate pair satisfies the conjugation relations".into(),
    ))
}

/// Evaluate a `*`-separated word such as `t1*t2^-1*r2`; the rightmost
/// factor applies first.  `id` names the identity and `rJ` the rotation by
/// `J` edges about the centre; other atoms come from `named`.
pub fn evaluate_word(
    ball: &TilingBall,
    named: &[(String, Automorphism)],
    word: &str,
) -> Result<Automorphism, TilingError> {
    let mut acc = Automorphism::identity(ball);
    for atom in word.split('*') {
        let atom = atom.trim();
        if atom.is_empty() {
            return Err(TilingError::BadWord(word.to_string()));
        }
        let (name, inverted) = match atom.strip_suffix("^-1") {
            Some(base) => (base, true),
            None => (atom, false),
        };
        let base = if name == "id" {
            Automorphism::identity(ball)
        } else if let Some((_, a)) = named.iter().find(|(n, _)| n == name) {
            a.clone()
        } else if let Some(j) = name
            .strip_prefix('r')
            .and_then(|d| d.parse::<u8>().ok())
        {
            rotation_about_center(ball, j)?
        } else {
            return Err(TilingError::BadWord(atom.to_string()));
        };
        let factor = if inverted { base.invert()? } else { base };
        acc = acc.compose(&factor)?;
    }
    Ok(acc)
}
