//! Fibonacci-tree coordinates for sectors of hyperbolic tessellations.
//!
//! One sector of the pentagrid (and of the ternary heptagrid) is in
//! bijection with a Fibonacci tree: black nodes carry two sons, white nodes
//! three, sons listed clockwise with the black son first.  Numbering the
//! nodes level by level, left to right, starting from 1 at the root, ties
//! the tree to the sequence `f(1)=1, f(2)=2, f(k)=f(k-1)+f(k-2)`: level `n`
//! holds `f(2n+1)` nodes and starts at node `f(2n)`.  The greedy `f`-digit
//! representation of a node number then behaves like a path address — each
//! node has exactly one son whose word is its own word with `00` appended.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

/// Errors from coordinate arithmetic, word parsing, and tree lookups.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FibError {
    #[error("index 0 is outside the sequence (indices start at 1)")]
    ZeroIndex,
    #[error("value does not fit in 64 bits")]
    IndexOverflow,
    #[error("node {nu} lies beyond the table's level cap {cap}")]
    LevelCapExceeded { nu: u64, cap: u32 },
    #[error("the root has no father")]
    RootFather,
    #[error("word has a leading zero")]
    LeadingZero,
    #[error("word contains adjacent ones")]
    AdjacentOnes,
    #[error("invalid digit {0:?} in word")]
    BadDigit(char),
    #[error("empty word")]
    EmptyWord,
    #[error("{0:?} is not a grid name (want \"pentagrid\", \"heptagrid\", or \"p,q\")")]
    BadGrid(String),
    #[error("{{{p},{q}}} does not tessellate the hyperbolic plane")]
    NotHyperbolic { p: u32, q: u32 },
}

/// Tessellation selector: `{5,4}`, `{7,3}`, or another hyperbolic `{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridKind {
    /// `{5,4}`: right-angled pentagons, four around each vertex.
    Pentagrid,
    /// `{7,3}`: heptagons, three around each vertex.
    Heptagrid,
    /// Any other hyperbolic `{p,q}`.
    Generic { p: u32, q: u32 },
}

impl GridKind {
    /// Canonical grid for Schläfli parameters `{p,q}`; `{5,4}` and `{7,3}`
    /// normalize to their named variants.
    pub fn generic(p: u32, q: u32) -> Result<Self, FibError> {
        if p < 3 || q < 3 || 2 * (u64::from(p) + u64::from(q)) >= u64::from(p) * u64::from(q) {
            return Err(FibError::NotHyperbolic { p, q });
        }
        Ok(match (p, q) {
            (5, 4) => GridKind::Pentagrid,
            (7, 3) => GridKind::Heptagrid,
            _ => GridKind::Generic { p, q },
        })
    }

    /// Number of sides of a tile.
    pub fn p(self) -> u32 {
        match self {
            GridKind::Pentagrid => 5,
            GridKind::Heptagrid => 7,
            GridKind::Generic { p, .. } => p,
        }
    }

    /// Number of tiles around a vertex.
    pub fn q(self) -> u32 {
        match self {
            GridKind::Pentagrid => 4,
            GridKind::Heptagrid => 3,
            GridKind::Generic { q, .. } => q,
        }
    }

    /// Neighbourhood size: one neighbour per side.
    pub fn alpha(self) -> u32 {
        self.p()
    }

    /// Number of sectors the central tile splits a ball into.
    pub fn sector_count(self) -> u32 {
        self.p()
    }

    /// Whether tiles carry Fibonacci-tree addresses on this grid.
    pub fn has_addresses(self) -> bool {
        matches!(self, GridKind::Pentagrid | GridKind::Heptagrid)
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridKind::Pentagrid => write!(f, "pentagrid"),
            GridKind::Heptagrid => write!(f, "heptagrid"),
            GridKind::Generic { p, q } => write!(f, "{{{p},{q}}}"),
        }
    }
}

impl FromStr for GridKind {
    type Err = FibError;

    fn from_str(s: &str) -> Result<Self, FibError> {
        match s {
            "pentagrid" => return Ok(GridKind::Pentagrid),
            "heptagrid" => return Ok(GridKind::Heptagrid),
            _ => {}
        }
        let body = s
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .unwrap_or(s);
        let mut parts = body.split(',');
        let bad = || FibError::BadGrid(s.to_string());
        let p = parts.next().ok_or_else(bad)?.trim();
        let q = parts.next().ok_or_else(bad)?.trim();
        if parts.next().is_some() {
            return Err(bad());
        }
        let p: u32 = p.parse().map_err(|_| bad())?;
        let q: u32 = q.parse().map_err(|_| bad())?;
        GridKind::generic(p, q)
    }
}

/// `f(1) = 1`, `f(2) = 2`, `f(k) = f(k-1) + f(k-2)`.
pub fn fibonacci(k: u32) -> Result<u64, FibError> {
    if k == 0 {
        return Err(FibError::ZeroIndex);
    }
    if k == 1 {
        return Ok(1);
    }
    let (mut a, mut b) = (1u64, 2u64);
    for _ in 2..k {
        let c = a.checked_add(b).ok_or(FibError::IndexOverflow)?;
        a = b;
        b = c;
    }
    Ok(b)
}

/// A word over `{0,1}` with no leading zero and no two adjacent ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitWord(Vec<u8>);

impl BitWord {
    pub fn new(digits: Vec<u8>) -> Result<Self, FibError> {
        if digits.is_empty() {
            return Err(FibError::EmptyWord);
        }
        if let Some(&d) = digits.iter().find(|&&d| d > 1) {
            let c = char::from_digit(u32::from(d.min(9)), 10).unwrap_or('?');
            return Err(FibError::BadDigit(c));
        }
        if digits[0] == 0 {
            return Err(FibError::LeadingZero);
        }
        if digits.windows(2).any(|w| w == [1, 1]) {
            return Err(FibError::AdjacentOnes);
        }
        Ok(BitWord(digits))
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a validated word has at least one digit
    }

    /// This word with `00` appended — the address of the preferred son.
    pub fn extended_by_two_zeros(&self) -> BitWord {
        let mut digits = self.0.clone();
        digits.extend_from_slice(&[0, 0]);
        BitWord(digits)
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for BitWord {
    type Err = FibError;

    fn from_str(s: &str) -> Result<Self, FibError> {
        let mut digits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => digits.push(0),
                '1' => digits.push(1),
                _ => return Err(FibError::BadDigit(c)),
            }
        }
        BitWord::new(digits)
    }
}

/// Greedy `f`-digit representation of `nu ≥ 1`: repeatedly take the largest
/// `f(k)` that still fits.  The result never has two adjacent ones.
pub fn greedy_representation(nu: u64) -> Result<BitWord, FibError> {
    if nu == 0 {
        return Err(FibError::ZeroIndex);
    }
    let mut fibs = vec![1u64, 2u64];
    loop {
        let len = fibs.len();
        match fibs[len - 1].checked_add(fibs[len - 2]) {
            Some(next) if next <= nu => fibs.push(next),
            _ => break,
        }
    }
    let mut digits = Vec::new();
    let mut rest = nu;
    for &f in fibs.iter().rev() {
        if digits.is_empty() && f > rest {
            continue;
        }
        if f <= rest {
            digits.push(1);
            rest -= f;
        } else {
            digits.push(0);
        }
    }
    debug_assert_eq!(rest, 0, "greedy expansion must terminate exactly");
    BitWord::new(digits)
}

/// Numeric value of a word: digit `i` of a length-`n` word weighs `f(n-i)`.
pub fn evaluate(word: &BitWord) -> Result<u64, FibError> {
    let n = word.len();
    let mut total = 0u64;
    for (i, &d) in word.digits().iter().enumerate() {
        if d == 1 {
            let f = fibonacci((n - i) as u32)?;
            total = total.checked_add(f).ok_or(FibError::IndexOverflow)?;
        }
    }
    Ok(total)
}

/// Level of node `nu`: the root 1 sits at level 0; level `n ≥ 1` holds
/// nodes `f(2n) ..= f(2n+2) - 1`.
pub fn level_of(nu: u64) -> Result<u32, FibError> {
    if nu == 0 {
        return Err(FibError::ZeroIndex);
    }
    if nu == 1 {
        return Ok(0);
    }
    let mut n = 1u32;
    loop {
        match fibonacci(2 * n + 2) {
            Ok(hi) if nu < hi => return Ok(n),
            Ok(_) => n += 1,
            // The next boundary exceeds u64, so every remaining nu sits here.
            Err(_) => return Ok(n),
        }
    }
}

/// First node number at `level`.
pub fn level_start(level: u32) -> Result<u64, FibError> {
    if level == 0 {
        Ok(1)
    } else {
        fibonacci(2 * level)
    }
}

/// Number of nodes at `level`.
pub fn level_size(level: u32) -> Result<u64, FibError> {
    fibonacci(2 * level + 1)
}

/// Black or white node of the Fibonacci tree (two or three sons).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    Black,
    White,
}

/// Node status refined by the father's status and the node's rank among
/// its father's sons; the sector root and the central tile carry marks of
/// their own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtendedStatus {
    /// Black son of a black father.
    Bb,
    /// Black son of a white father.
    Bw,
    /// Middle (white) son of a white father.
    Wwm,
    /// Rightmost (white) son of a white father.
    Wwr,
    /// White son of a black father.
    Wb,
    /// The root of a sector tree.
    RootMark,
    /// The central tile of a ball.
    CentralMark,
}

impl ExtendedStatus {
    pub fn name(self) -> &'static str {
        match self {
            ExtendedStatus::Bb => "Bb",
            ExtendedStatus::Bw => "Bw",
            ExtendedStatus::Wwm => "Wwm",
            ExtendedStatus::Wwr => "Wwr",
            ExtendedStatus::Wb => "Wb",
            ExtendedStatus::RootMark => "root",
            ExtendedStatus::CentralMark => "center",
        }
    }
}

impl fmt::Display for ExtendedStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Breadth-first table of the Fibonacci tree up to a level cap.
///
/// Sons of one node are numbered contiguously, so a single `first_son`
/// entry per node recovers them; nodes at the cap level store 0 there.
#[derive(Debug, Clone)]
pub struct FibTree {
    level_cap: u32,
    level_start: Vec<u64>,
    status: Vec<NodeStatus>,
    father: Vec<u64>,
    first_son: Vec<u64>,
}

impl FibTree {
    /// Cap of the shared [`default_tree`]: 196_417 nodes.
    pub const DEFAULT_LEVEL_CAP: u32 = 12;

    pub fn new(level_cap: u32) -> Result<Self, FibError> {
        let total = fibonacci(2 * level_cap + 2)? - 1;
        let total_usize = usize::try_from(total).map_err(|_| FibError::IndexOverflow)?;
        let mut level_start_tbl = Vec::with_capacity(level_cap as usize + 2);
        for n in 0..=level_cap + 1 {
            level_start_tbl.push(level_start(n)?);
        }
        let mut status = Vec::with_capacity(total_usize);
        let mut father = Vec::with_capacity(total_usize);
        let mut first_son = vec![0u64; total_usize];
        status.push(NodeStatus::White);
        father.push(0);
        if level_cap > 0 {
            let last_internal = level_start_tbl[level_cap as usize] - 1;
            let mut next = 2u64;
            for nu in 1..=last_internal {
                let idx = (nu - 1) as usize;
                first_son[idx] = next;
                let arity = match status[idx] {
                    NodeStatus::Black => 2,
                    NodeStatus::White => 3,
                };
                for rank in 0..arity {
                    status.push(if rank == 0 {
                        NodeStatus::Black
                    } else {
                        NodeStatus::White
                    });
                    father.push(nu);
                }
                next += arity;
            }
            debug_assert_eq!(next, total + 1, "son allocation must fill every level");
        }
        Ok(FibTree {
            level_cap,
            level_start: level_start_tbl,
            status,
            father,
            first_son,
        })
    }

    pub fn level_cap(&self) -> u32 {
        self.level_cap
    }

    pub fn node_count(&self) -> u64 {
        self.status.len() as u64
    }

    fn index(&self, nu: u64) -> Result<usize, FibError> {
        if nu == 0 {
            return Err(FibError::ZeroIndex);
        }
        if nu > self.node_count() {
            return Err(FibError::LevelCapExceeded {
                nu,
                cap: self.level_cap,
            });
        }
        Ok((nu - 1) as usize)
    }

    pub fn status_of(&self, nu: u64) -> Result<NodeStatus, FibError> {
        Ok(self.status[self.index(nu)?])
    }

    pub fn father_of(&self, nu: u64) -> Result<u64, FibError> {
        let idx = self.index(nu)?;
        if nu == 1 {
            return Err(FibError::RootFather);
        }
        Ok(self.father[idx])
    }

    /// Sons in clockwise order (black son first).
    pub fn sons_of(&self, nu: u64) -> Result<Vec<u64>, FibError> {
        let idx = self.index(nu)?;
        let first = self.first_son[idx];
        if first == 0 {
            return Err(FibError::LevelCapExceeded {
                nu,
                cap: self.level_cap,
            });
        }
        let arity = match self.status[idx] {
            NodeStatus::Black => 2,
            NodeStatus::White => 3,
        };
        Ok((first..first + arity).collect())
    }

    /// 0-based position of `nu` among its father's sons.
    pub fn son_rank(&self, nu: u64) -> Result<u8, FibError> {
        let idx = self.index(nu)?;
        if nu == 1 {
            return Err(FibError::RootFather);
        }
        let fa_idx = (self.father[idx] - 1) as usize;
        Ok((nu - self.first_son[fa_idx]) as u8)
    }

    pub fn level_of_node(&self, nu: u64) -> Result<u32, FibError> {
        self.index(nu)?;
        let n = self.level_start.partition_point(|&s| s <= nu) - 1;
        Ok(n as u32)
    }

    /// Refined status of a node; the root's sons are classified as if the
    /// root were an ordinary white node.
    pub fn extended_status(&self, nu: u64) -> Result<ExtendedStatus, FibError> {
        let idx = self.index(nu)?;
        if nu == 1 {
            return Ok(ExtendedStatus::RootMark);
        }
        let fa_idx = (self.father[idx] - 1) as usize;
        let fa_status = self.status[fa_idx];
        let rank = nu - self.first_son[fa_idx];
        Ok(match (self.status[idx], fa_status, rank) {
            (NodeStatus::Black, NodeStatus::Black, _) => ExtendedStatus::Bb,
            (NodeStatus::Black, NodeStatus::White, _) => ExtendedStatus::Bw,
            (NodeStatus::White, NodeStatus::Black, _) => ExtendedStatus::Wb,
            (NodeStatus::White, NodeStatus::White, 1) => ExtendedStatus::Wwm,
            (NodeStatus::White, NodeStatus::White, _) => ExtendedStatus::Wwr,
        })
    }
}

static DEFAULT_TREE: OnceLock<FibTree> = OnceLock::new();

/// Shared tree at [`FibTree::DEFAULT_LEVEL_CAP`].
pub fn default_tree() -> &'static FibTree {
    DEFAULT_TREE.get_or_init(|| {
        FibTree::new(FibTree::DEFAULT_LEVEL_CAP).expect("default level cap fits in u64")
    })
}
