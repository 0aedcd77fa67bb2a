//! Finite balls of hyperbolic `{p,q}` tessellations.
//!
//! A ball of radius `r` holds every tile at tile-graph distance at most `r`
//! from a central tile.  Construction grows tiles breadth-first and closes
//! each vertex as soon as the `q` tiles around it exist, so the adjacency is
//! exactly that of the tessellation restricted to the ball.  Rings are the
//! breadth-first distance classes; on the pentagrid and the ternary
//! heptagrid each ring is kept in clockwise order, every tile gets a sector
//! number and a Fibonacci-tree address, and the tree's structural
//! predictions (node status, father links, son order) are cross-checked
//! against the glued adjacency while the ball is finished.

mod automorphism;

pub use automorphism::{
    evaluate_word, rotation_about_center, shift_generators, transport, Automorphism,
    ShiftGenerators,
};

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::fib_coords::{
    default_tree, level_size, level_start, ExtendedStatus, FibError, FibTree, GridKind, NodeStatus,
};

/// Identifier of a tile inside one ball; the central tile is always 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileId(pub u32);

impl fmt::Display for TileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A tile together with one of its edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flag {
    pub tile: TileId,
    pub edge: u8,
}

/// Position of a tile in sector coordinates: the centre itself, or a
/// Fibonacci-tree node number inside one of the `p` sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellAddress {
    Center,
    Sector { sector: u8, nu: u64 },
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellAddress::Center => write!(f, "C"),
            CellAddress::Sector { sector, nu } => write!(f, "{sector}:{nu}"),
        }
    }
}

impl FromStr for CellAddress {
    type Err = TilingError;

    fn from_str(s: &str) -> Result<Self, TilingError> {
        if s == "C" {
            return Ok(CellAddress::Center);
        }
        let bad = || TilingError::BadAddress(s.to_string());
        let (sec, nu) = s.split_once(':').ok_or_else(bad)?;
        let sector: u8 = sec.parse().map_err(|_| bad())?;
        let nu: u64 = nu.parse().map_err(|_| bad())?;
        if sector == 0 || nu == 0 {
            return Err(bad());
        }
        Ok(CellAddress::Sector { sector, nu })
    }
}

#[derive(Debug, Error)]
pub enum TilingError {
    #[error("radius {radius} exceeds the configured cap {cap}")]
    RadiusTooLarge { radius: u32, cap: u32 },
    #[error("ball would exceed {0} tiles")]
    TooManyTiles(usize),
    #[error("cannot parse ball text: {0}")]
    Parse(String),
    #[error("inconsistent tiling: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Fib(#[from] FibError),
    #[error("tile {0} is outside this ball")]
    UnknownTile(TileId),
    #[error("address {0} does not name a tile of this ball")]
    UnknownAddress(String),
    #[error("grid {0} does not carry sector addresses")]
    NoAddresses(GridKind),
    #[error("cannot parse address {0:?} (want \"C\" or \"sector:node\")")]
    BadAddress(String),
    #[error("tile {0} touches the boundary; its neighbourhood is incomplete")]
    IncompleteNeighborhood(TileId),
    #[error("seed flags do not extend to an adjacency-preserving map")]
    NotAnAutomorphism,
    #[error("map is not injective on its domain")]
    NotInjective,
    #[error("map has an empty domain")]
    EmptyDomain,
    #[error("cannot parse word atom {0:?}")]
    BadWord(String),
    #[error("generator search failed: {0}")]
    GeneratorSearchFailed(String),
    #[error("grid {0} has no generator construction")]
    UnsupportedGrid(GridKind),
}

struct AddressData {
    sector: Vec<u8>,
    addr_of: Vec<CellAddress>,
    id_of: HashMap<CellAddress, TileId>,
    ext: Vec<ExtendedStatus>,
}

/// A radius-`r` ball of a `{p,q}` tessellation with its glued adjacency.
pub struct TilingBall {
    grid: GridKind,
    radius: u32,
    p: u8,
    q: u8,
    adjacency: Vec<Option<Flag>>, // indexed tile * p + edge
    ring: Vec<u32>,
    rings: Vec<Vec<TileId>>,
    father: Vec<TileId>,
    father_edge: Vec<u8>,
    addresses: Option<AddressData>,
}

/// Default limit on [`build_ball`]; raise it with [`build_ball_with_cap`].
pub const DEFAULT_RADIUS_CAP: u32 = 10;

const MAX_TILES: usize = 5_000_000;

pub fn build_ball(grid: GridKind, radius: u32) -> Result<TilingBall, TilingError> {
    build_ball_with_cap(grid, radius, DEFAULT_RADIUS_CAP)
}

pub fn build_ball_with_cap(
    grid: GridKind,
    radius: u32,
    cap: u32,
) -> Result<TilingBall, TilingError> {
    if radius > cap {
        return Err(TilingError::RadiusTooLarge { radius, cap });
    }
    let p = grid.p() as usize;
    let q = grid.q();
    let mut adjacency: Vec<Option<Flag>> = vec![None; p];
    let mut ring: Vec<u32> = vec![0];
    let mut t = 0usize;
    while t < ring.len() {
        for e in 0..p {
            if adjacency[t * p + e].is_some() {
                continue;
            }
            // The missing neighbour shares both endpoints of edge e; walking
            // around either endpoint finds it whenever the other q-1 tiles
            // around that vertex already exist.
            let hit = walk_close(&adjacency, p, q, t, e, true)
                .or_else(|| walk_close(&adjacency, p, q, t, e, false));
            if let Some(found) = hit {
                let slot = found.tile.0 as usize * p + found.edge as usize;
                if adjacency[slot].is_some() {
                    return Err(TilingError::Inconsistent(format!(
                        "vertex walk from tile {t} edge {e} landed on an occupied slot"
                    )));
                }
                adjacency[t * p + e] = Some(found);
                adjacency[slot] = Some(Flag {
                    tile: TileId(t as u32),
                    edge: e as u8,
                });
                continue;
            }
            if ring[t] < radius {
                let new = ring.len();
                if new >= MAX_TILES {
                    return Err(TilingError::TooManyTiles(MAX_TILES));
                }
                ring.push(ring[t] + 1);
                adjacency.extend(std::iter::repeat(None).take(p));
                adjacency[t * p + e] = Some(Flag {
                    tile: TileId(new as u32),
                    edge: 0,
                });
                adjacency[new * p] = Some(Flag {
                    tile: TileId(t as u32),
                    edge: e as u8,
                });
            }
        }
        t += 1;
    }
    finish(grid, radius, adjacency)
}

/// Walk around one endpoint of edge `e` of tile `t`.  With `cw` true the
/// walk circles the vertex shared by edges `e` and `e+1`, otherwise the one
/// shared by `e-1` and `e`.  Returns the far side of the missing gluing if
/// the other `q-1` tiles around that vertex are already connected.
fn walk_close(
    adjacency: &[Option<Flag>],
    p: usize,
    q: u32,
    t: usize,
    e: usize,
    cw: bool,
) -> Option<Flag> {
    let mut cur = t;
    let mut cross = if cw { (e + 1) % p } else { (e + p - 1) % p };
    for _ in 0..q - 1 {
        let f = adjacency[cur * p + cross]?;
        cur = f.tile.0 as usize;
        cross = if cw {
            (f.edge as usize + 1) % p
        } else {
            (f.edge as usize + p - 1) % p
        };
    }
    Some(Flag {
        tile: TileId(cur as u32),
        edge: cross as u8,
    })
}

fn finish(
    grid: GridKind,
    radius: u32,
    adjacency: Vec<Option<Flag>>,
) -> Result<TilingBall, TilingError> {
    let p = grid.p() as usize;
    let n_tiles = adjacency.len() / p;
    debug_assert_eq!(adjacency.len(), n_tiles * p);

    let mut ring = vec![u32::MAX; n_tiles];
    ring[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        for e in 0..p {
            if let Some(f) = adjacency[t * p + e] {
                let u = f.tile.0 as usize;
                if ring[u] == u32::MAX {
                    ring[u] = ring[t] + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    let mut max_ring = 0;
    for (t, &r) in ring.iter().enumerate() {
        if r == u32::MAX {
            return Err(TilingError::Inconsistent(format!(
                "tile {t} is unreachable from the centre"
            )));
        }
        max_ring = max_ring.max(r);
    }
    if max_ring != radius {
        return Err(TilingError::Inconsistent(format!(
            "deepest tile sits at ring {max_ring}, but the radius claims {radius}"
        )));
    }
    for t in 0..n_tiles {
        if ring[t] < radius {
            for e in 0..p {
                if adjacency[t * p + e].is_none() {
                    return Err(TilingError::Inconsistent(format!(
                        "interior tile {t} has an unglued edge {e}"
                    )));
                }
            }
        }
    }

    let mut rings: Vec<Vec<TileId>> = vec![Vec::new(); radius as usize + 1];
    rings[0].push(TileId(0));
    let mut father: Vec<TileId> = vec![TileId(0); n_tiles];
    let mut father_edge: Vec<u8> = vec![0u8; n_tiles];
    if radius >= 1 {
        let mut seen = HashSet::new();
        for e in 0..p {
            let f = adjacency[e].expect("interior centre is fully glued");
            let u = f.tile.0 as usize;
            if ring[u] != 1 || !seen.insert(u) {
                return Err(TilingError::Inconsistent(
                    "centre neighbours must be distinct ring-1 tiles".into(),
                ));
            }
            rings[1].push(f.tile);
            father_edge[u] = f.edge;
        }
    }
    for n in 1..radius {
        let here = rings[n as usize].clone();
        let len = here.len();
        // tile at ring n+1 -> (father position, father's edge, tile's edge)
        let mut uplinks: HashMap<usize, Vec<(usize, u8, u8)>> = HashMap::new();
        for (pos, &t) in here.iter().enumerate() {
            let ti = t.0 as usize;
            let fe = father_edge[ti] as usize;
            for k in 1..p {
                let e = (fe + k) % p;
                if let Some(f) = adjacency[ti * p + e] {
                    if ring[f.tile.0 as usize] == n + 1 {
                        uplinks
                            .entry(f.tile.0 as usize)
                            .or_default()
                            .push((pos, e as u8, f.edge));
                    }
                }
            }
        }
        let expected = ring.iter().filter(|&&r| r == n + 1).count();
        let mut sons: Vec<Vec<(u8, TileId)>> = vec![Vec::new(); len];
        for (&u, links) in &uplinks {
            // A tile hanging from two ring-n tiles belongs to the clockwise
            // later of the two; at the wrap-around the list head wins.
            let (pos, e, b) = match links[..] {
                [only] => only,
                [first, second] => {
                    debug_assert!(first.0 < second.0);
                    if second.0 == first.0 + 1 {
                        second
                    } else if first.0 == 0 && second.0 == len - 1 {
                        first
                    } else {
                        return Err(TilingError::Inconsistent(format!(
                            "tile {u} hangs from two non-consecutive ring-{n} tiles"
                        )));
                    }
                }
                _ => {
                    return Err(TilingError::Inconsistent(format!(
                        "tile {u} hangs from {} ring-{n} tiles",
                        links.len()
                    )))
                }
            };
            let fi = here[pos].0 as usize;
            father[u] = here[pos];
            father_edge[u] = b;
            let rel = (e as usize + p - father_edge[fi] as usize) % p;
            sons[pos].push((rel as u8, TileId(u as u32)));
        }
        let mut next = Vec::with_capacity(expected);
        for mut list in sons {
            list.sort_unstable();
            next.extend(list.into_iter().map(|(_, u)| u));
        }
        if next.len() != expected {
            return Err(TilingError::Inconsistent(format!(
                "ring {} collects {} tiles, expected {}",
                n + 1,
                next.len(),
                expected
            )));
        }
        rings[n as usize + 1] = next;
    }

    let addresses = if grid.has_addresses() {
        Some(build_addresses(
            p, radius, &adjacency, &ring, &rings, &father, n_tiles,
        )?)
    } else {
        None
    };

    Ok(TilingBall {
        grid,
        radius,
        p: p as u8,
        q: grid.q() as u8,
        adjacency,
        ring,
        rings,
        father,
        father_edge,
        addresses,
    })
}

fn build_addresses(
    p: usize,
    radius: u32,
    adjacency: &[Option<Flag>],
    ring: &[u32],
    rings: &[Vec<TileId>],
    father: &[TileId],
    n_tiles: usize,
) -> Result<AddressData, TilingError> {
    let mut sector = vec![0u8; n_tiles];
    let mut nu = vec![0u64; n_tiles];
    let mut addr_of = vec![CellAddress::Center; n_tiles];
    let mut ext = vec![ExtendedStatus::CentralMark; n_tiles];
    if radius >= 1 {
        let level_needed = radius - 1;
        let local;
        let tree: &FibTree = if level_needed <= FibTree::DEFAULT_LEVEL_CAP {
            default_tree()
        } else {
            local = FibTree::new(level_needed)?;
            &local
        };
        for (i, &t) in rings[1].iter().enumerate() {
            sector[t.0 as usize] = (i + 1) as u8;
        }
        for n in 2..=radius {
            for &t in &rings[n as usize] {
                let ti = t.0 as usize;
                sector[ti] = sector[father[ti].0 as usize];
            }
        }
        for n in 1..=radius {
            let base = level_start(n - 1)?;
            let size = level_size(n - 1)?;
            let mut cur_sector = 0u8;
            let mut idx = 0u64;
            for &t in &rings[n as usize] {
                let ti = t.0 as usize;
                let s = sector[ti];
                if s != cur_sector {
                    if (cur_sector != 0 && idx != size) || s != cur_sector + 1 {
                        return Err(TilingError::Inconsistent(format!(
                            "ring {n} does not split into clockwise sector blocks"
                        )));
                    }
                    cur_sector = s;
                    idx = 0;
                }
                nu[ti] = base + idx;
                idx += 1;
                addr_of[ti] = CellAddress::Sector { sector: s, nu: nu[ti] };
            }
            if cur_sector as usize != p || idx != size {
                return Err(TilingError::Inconsistent(format!(
                    "ring {n} does not contain {p} sectors of {size} tiles"
                )));
            }
        }
        // Every tree prediction must agree with the glued adjacency.
        for ti in 1..n_tiles {
            let node = nu[ti];
            let ups = (0..p)
                .filter_map(|e| adjacency[ti * p + e])
                .filter(|f| ring[f.tile.0 as usize] + 1 == ring[ti])
                .count();
            let want = if ups == 2 {
                NodeStatus::Black
            } else {
                NodeStatus::White
            };
            if tree.status_of(node)? != want {
                return Err(TilingError::Inconsistent(format!(
                    "tile {ti} has {ups} up-neighbours, which contradicts its node status"
                )));
            }
            if ring[ti] >= 2 {
                let fa = father[ti].0 as usize;
                if tree.father_of(node)? != nu[fa] || sector[fa] != sector[ti] {
                    return Err(TilingError::Inconsistent(format!(
                        "tile {ti}: tree father and ball father disagree"
                    )));
                }
                ext[ti] = tree.extended_status(node)?;
            } else {
                ext[ti] = ExtendedStatus::RootMark;
            }
        }
    }
    let mut id_of = HashMap::with_capacity(n_tiles);
    for ti in 0..n_tiles {
        id_of.insert(addr_of[ti], TileId(ti as u32));
    }
    Ok(AddressData {
        sector,
        addr_of,
        id_of,
        ext,
    })
}

impl TilingBall {
    pub fn grid(&self) -> GridKind {
        self.grid
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn tile_count(&self) -> usize {
        self.ring.len()
    }

    pub fn center(&self) -> TileId {
        TileId(0)
    }

    pub fn tiles(&self) -> impl Iterator<Item = TileId> {
        (0..self.tile_count() as u32).map(TileId)
    }

    fn index(&self, t: TileId) -> Result<usize, TilingError> {
        let i = t.0 as usize;
        if i < self.tile_count() {
            Ok(i)
        } else {
            Err(TilingError::UnknownTile(t))
        }
    }

    /// The far side of edge `e` of tile `t`, or `None` past the boundary.
    pub fn neighbor(&self, t: TileId, e: u8) -> Option<Flag> {
        let i = t.0 as usize;
        if i >= self.tile_count() || e >= self.p {
            return None;
        }
        self.adjacency[i * self.p as usize + e as usize]
    }

    pub fn ring_of(&self, t: TileId) -> u32 {
        self.ring[t.0 as usize]
    }

    /// Tiles of ring `n`, clockwise for addressed grids.
    pub fn ring_cells(&self, n: u32) -> &[TileId] {
        static EMPTY: [TileId; 0] = [];
        self.rings.get(n as usize).map_or(&EMPTY, |v| v.as_slice())
    }

    pub fn father_of(&self, t: TileId) -> Option<TileId> {
        if t.0 == 0 {
            None
        } else {
            Some(self.father[t.0 as usize])
        }
    }

    /// Edge of `t` that leads to its father; 0 for the centre.
    pub fn father_edge(&self, t: TileId) -> u8 {
        self.father_edge[t.0 as usize]
    }

    /// Neighbour tiles in the tile's reading order: the father first, then
    /// clockwise; the centre reads its edges 0..p in order.  Fails when any
    /// neighbour lies past the boundary.
    pub fn neighbors_ordered(&self, t: TileId) -> Result<Vec<TileId>, TilingError> {
        let i = self.index(t)?;
        let p = self.p as usize;
        let start = if i == 0 { 0 } else { self.father_edge[i] as usize };
        let mut out = Vec::with_capacity(p);
        for k in 0..p {
            let e = (start + k) % p;
            match self.adjacency[i * p + e] {
                Some(f) => out.push(f.tile),
                None => return Err(TilingError::IncompleteNeighborhood(t)),
            }
        }
        Ok(out)
    }

    pub fn sector_of(&self, t: TileId) -> Result<u8, TilingError> {
        let i = self.index(t)?;
        let data = self
            .addresses
            .as_ref()
            .ok_or(TilingError::NoAddresses(self.grid))?;
        Ok(data.sector[i])
    }

    pub fn address_of(&self, t: TileId) -> Result<CellAddress, TilingError> {
        let i = self.index(t)?;
        let data = self
            .addresses
            .as_ref()
            .ok_or(TilingError::NoAddresses(self.grid))?;
        Ok(data.addr_of[i])
    }

    pub fn tile_at(&self, addr: CellAddress) -> Result<TileId, TilingError> {
        let data = self
            .addresses
            .as_ref()
            .ok_or(TilingError::NoAddresses(self.grid))?;
        data.id_of
            .get(&addr)
            .copied()
            .ok_or_else(|| TilingError::UnknownAddress(addr.to_string()))
    }

    /// Refined status of a tile: the centre and the sector roots carry their
    /// marks, deeper tiles the five regular statuses.
    pub fn extended_status_of(&self, t: TileId) -> Result<ExtendedStatus, TilingError> {
        let i = self.index(t)?;
        let data = self
            .addresses
            .as_ref()
            .ok_or(TilingError::NoAddresses(self.grid))?;
        Ok(data.ext[i])
    }

    /// Walks every vertex fan and checks that closed vertices carry exactly
    /// `q` tiles.  Returns `(closed vertices, boundary arcs)`.
    pub fn verify_vertex_closure(&self) -> Result<(usize, usize), TilingError> {
        let p = self.p as usize;
        let q = self.q as u32;
        let mut closed = 0usize;
        let mut open = 0usize;
        for t in 0..self.tile_count() {
            for e in 0..p {
                // Canonical representative of a closed fan: its minimal flag.
                let mut cur = t;
                let mut cross = (e + 1) % p;
                let mut cycle = true;
                let mut min_flag = (t, e);
                for _ in 0..q {
                    match self.adjacency[cur * p + cross] {
                        Some(f) => {
                            cur = f.tile.0 as usize;
                            cross = (f.edge as usize + 1) % p;
                            let corner = (cross + p - 1) % p;
                            min_flag = min_flag.min((cur, corner));
                        }
                        None => {
                            cycle = false;
                            break;
                        }
                    }
                }
                if cycle {
                    if cur != t || cross != (e + 1) % p {
                        return Err(TilingError::Inconsistent(format!(
                            "vertex fan at tile {t} edge {e} does not close after {q} steps"
                        )));
                    }
                    if min_flag == (t, e) {
                        closed += 1;
                    }
                } else if self.adjacency[t * p + e].is_none() {
                    // A missing gluing on edge e means the fan around the
                    // clockwise endpoint of e starts here.
                    open += 1;
                }
            }
        }
        Ok((closed, open))
    }

    /// Serialize as a header line `p q radius` followed by one line per
    /// gluing, `t e -> u f`, listing each gluing once from its lower flag.
    pub fn to_text(&self) -> String {
        let p = self.p as usize;
        let mut out = format!("{} {} {}\n", self.p, self.q, self.radius);
        for t in 0..self.tile_count() {
            for e in 0..p {
                if let Some(f) = self.adjacency[t * p + e] {
                    if (t as u32, e as u8) < (f.tile.0, f.edge) {
                        out.push_str(&format!("{} {} -> {} {}\n", t, e, f.tile.0, f.edge));
                    }
                }
            }
        }
        out
    }

    pub fn from_text(s: &str) -> Result<TilingBall, TilingError> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| TilingError::Parse("missing header".into()))?;
        let mut parts = header.split_whitespace();
        let mut next_num = |what: &str| -> Result<u32, TilingError> {
            parts
                .next()
                .ok_or_else(|| TilingError::Parse(format!("header lacks {what}")))?
                .parse::<u32>()
                .map_err(|_| TilingError::Parse(format!("bad {what} in header")))
        };
        let p = next_num("p")?;
        let q = next_num("q")?;
        let radius = next_num("radius")?;
        if parts.next().is_some() {
            return Err(TilingError::Parse("trailing tokens in header".into()));
        }
        let grid = GridKind::generic(p, q)?;
        let mut pairs: Vec<(u32, u8, u32, u8)> = Vec::new();
        let mut max_tile = 0u32;
        for line in lines {
            let tok: Vec<&str> = line.split_whitespace().collect();
            if tok.len() != 5 || tok[2] != "->" {
                return Err(TilingError::Parse(format!("bad gluing line {line:?}")));
            }
            let t: u32 = tok[0]
                .parse()
                .map_err(|_| TilingError::Parse(format!("bad tile in {line:?}")))?;
            let e: u8 = tok[1]
                .parse()
                .map_err(|_| TilingError::Parse(format!("bad edge in {line:?}")))?;
            let u: u32 = tok[3]
                .parse()
                .map_err(|_| TilingError::Parse(format!("bad tile in {line:?}")))?;
            let f: u8 = tok[4]
                .parse()
                .map_err(|_| TilingError::Parse(format!("bad edge in {line:?}")))?;
            if u32::from(e) >= p || u32::from(f) >= p {
                return Err(TilingError::Parse(format!("edge out of range in {line:?}")));
            }
            if t == u {
                return Err(TilingError::Parse(format!("self-gluing in {line:?}")));
            }
            max_tile = max_tile.max(t).max(u);
            pairs.push((t, e, u, f));
        }
        let n_tiles = max_tile as usize + 1;
        if n_tiles > MAX_TILES {
            return Err(TilingError::TooManyTiles(MAX_TILES));
        }
        let mut adjacency: Vec<Option<Flag>> = vec![None; n_tiles * p as usize];
        for (t, e, u, f) in pairs {
            for (a, ae, b, be) in [(t, e, u, f), (u, f, t, e)] {
                let slot = a as usize * p as usize + ae as usize;
                let flag = Flag {
                    tile: TileId(b),
                    edge: be,
                };
                match adjacency[slot] {
                    None => adjacency[slot] = Some(flag),
                    Some(old) if old == flag => {}
                    Some(_) => {
                        return Err(TilingError::Parse(format!(
                            "tile {a} edge {ae} is glued twice"
                        )))
                    }
                }
            }
        }
        finish(grid, radius, adjacency)
    }
}
