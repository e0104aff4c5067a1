//! Direction words, tile geometry, the equivalence action and canonical enumeration.
//!
//! A configuration of `n` tiles lying flat and face up is encoded by a cyclic word
//! `s_1 .. s_n` over the four cardinal directions: `s_i` is the plan step from
//! tile `T_{i-1}` to tile `T_i`. Internally the word is stored 0-based, so
//! `symbols[j]` is the step *into* tile `T_{j+1}` (and `symbols[n-1]` is the step
//! into `T_0`).

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest and largest supported tile counts.
pub const MIN_TILES: usize = 4;
pub const MAX_TILES: usize = 20;

/// A plan position in units of one tile side.
pub type Cell = (i32, i32);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("bad character {0:?} in sequence (expected one of E, N, W, S)")]
    BadCharacter(char),
    #[error("sequence length {0} is odd")]
    OddLength(usize),
    #[error("sequence length {0} is out of range {MIN_TILES}..={MAX_TILES}")]
    OutOfRange(usize),
    #[error("sequence does not close: E={e} W={w} N={n} S={s}")]
    NotClosed { e: usize, n: usize, w: usize, s: usize },
}

/// Cardinal direction. The declaration order is the canonical ordering `E < N < W < S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    E,
    N,
    W,
    S,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::E, Direction::N, Direction::W, Direction::S];

    /// Quarter turns counterclockwise from east.
    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(i: u8) -> Direction {
        Self::ALL[(i % 4) as usize]
    }

    pub fn step(self) -> (i32, i32) {
        match self {
            Direction::E => (1, 0),
            Direction::N => (0, 1),
            Direction::W => (-1, 0),
            Direction::S => (0, -1),
        }
    }

    pub fn from_step(v: (i32, i32)) -> Option<Direction> {
        match v {
            (1, 0) => Some(Direction::E),
            (0, 1) => Some(Direction::N),
            (-1, 0) => Some(Direction::W),
            (0, -1) => Some(Direction::S),
            _ => None,
        }
    }

    pub fn opposite(self) -> Direction {
        Direction::from_index(self.index() + 2)
    }

    /// E and W steps cross a vertical side.
    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::E | Direction::W)
    }

    pub fn letter(self) -> char {
        match self {
            Direction::E => 'E',
            Direction::N => 'N',
            Direction::W => 'W',
            Direction::S => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<Direction> {
        match c {
            'E' => Some(Direction::E),
            'N' => Some(Direction::N),
            'W' => Some(Direction::W),
            'S' => Some(Direction::S),
            _ => None,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// One of the eight symmetries of the square, acting on directions.
///
/// `d ↦ rot + d` when `reflect` is false, `d ↦ rot - d` otherwise (indices mod 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dihedral {
    pub rot: u8,
    pub reflect: bool,
}

impl Dihedral {
    pub const IDENTITY: Dihedral = Dihedral { rot: 0, reflect: false };

    pub fn all() -> impl Iterator<Item = Dihedral> {
        [false, true]
            .into_iter()
            .flat_map(|reflect| (0..4).map(move |rot| Dihedral { rot, reflect }))
    }

    pub fn apply(self, d: Direction) -> Direction {
        let i = d.index();
        if self.reflect {
            Direction::from_index(self.rot + 4 - i)
        } else {
            Direction::from_index(self.rot + i)
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Dihedral) -> Dihedral {
        let img_e = self.apply(other.apply(Direction::E));
        let img_n = self.apply(other.apply(Direction::N));
        Dihedral::all()
            .find(|g| g.apply(Direction::E) == img_e && g.apply(Direction::N) == img_n)
            .expect("dihedral group is closed")
    }

    pub fn inverse(self) -> Dihedral {
        Dihedral::all()
            .find(|g| g.compose(self) == Dihedral::IDENTITY)
            .expect("dihedral group has inverses")
    }

    /// The half turn.
    pub fn half_turn() -> Dihedral {
        Dihedral { rot: 2, reflect: false }
    }

    /// Linear action on plan vectors.
    pub fn apply_vec(self, v: (i32, i32)) -> (i32, i32) {
        let ex = self.apply(Direction::E).step();
        let ny = self.apply(Direction::N).step();
        (v.0 * ex.0 + v.1 * ny.0, v.0 * ex.1 + v.1 * ny.1)
    }

    /// Whether the isometry exchanges the two diagonals of a square.
    pub fn swaps_diagonals(self) -> bool {
        let img = self.apply_vec((1, 1));
        img != (1, 1) && img != (-1, -1)
    }
}

/// Element of the equivalence group acting on words of length `n`:
/// `t[j] = D(s[j + shift])`, or `t[j] = D(s[shift - j])` when reversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transform {
    pub shift: usize,
    pub reverse: bool,
    pub dihedral: Dihedral,
}

impl Transform {
    pub fn identity() -> Transform {
        Transform { shift: 0, reverse: false, dihedral: Dihedral::IDENTITY }
    }

    /// All `16 n` group elements in a fixed order.
    pub fn all(n: usize) -> Vec<Transform> {
        let mut out = Vec::with_capacity(16 * n);
        for reverse in [false, true] {
            for shift in 0..n {
                for dihedral in Dihedral::all() {
                    out.push(Transform { shift, reverse, dihedral });
                }
            }
        }
        out
    }

    #[inline]
    fn source_index(&self, j: usize, n: usize) -> usize {
        if self.reverse {
            (self.shift + n - j % n) % n
        } else {
            (j + self.shift) % n
        }
    }

    /// `self.then(next)` applies `self` first, then `next`.
    pub fn then(self, next: Transform, n: usize) -> Transform {
        let (k1, k2) = (self.shift % n, next.shift % n);
        let (shift, reverse) = match (self.reverse, next.reverse) {
            (false, false) => ((k1 + k2) % n, false),
            (false, true) => ((k1 + k2) % n, true),
            (true, false) => ((k1 + n - k2) % n, true),
            (true, true) => ((k1 + n - k2) % n, false),
        };
        Transform { shift, reverse, dihedral: next.dihedral.compose(self.dihedral) }
    }

    pub fn inverse(self, n: usize) -> Transform {
        let dihedral = self.dihedral.inverse();
        if self.reverse {
            Transform { shift: self.shift % n, reverse: true, dihedral }
        } else {
            Transform { shift: (n - self.shift % n) % n, reverse: false, dihedral }
        }
    }

    /// Tile correspondence: tile `j` of the image is tile `map[j]` of the source.
    pub fn tile_map(&self, n: usize) -> Vec<usize> {
        (0..n)
            .map(|j| {
                if self.reverse {
                    (self.shift + 1 + n - j) % n
                } else {
                    (j + self.shift) % n
                }
            })
            .collect()
    }

    /// Plan isometry carrying source cells to image cells (up to translation).
    pub fn plan_isometry(&self) -> Dihedral {
        if self.reverse {
            Dihedral::half_turn().compose(self.dihedral)
        } else {
            self.dihedral
        }
    }
}

/// Slash runs NE–SW on the visible face, backslash NW–SE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TileType {
    Slash,
    Backslash,
}

impl TileType {
    pub fn flipped(self) -> TileType {
        match self {
            TileType::Slash => TileType::Backslash,
            TileType::Backslash => TileType::Slash,
        }
    }

    pub fn of_index(i: usize, first: TileType) -> TileType {
        if i.is_multiple_of(2) {
            first
        } else {
            first.flipped()
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            TileType::Slash => 1,
            TileType::Backslash => -1,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            TileType::Slash => "sla",
            TileType::Backslash => "bsla",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlapAxis {
    /// Hinged at a vertical (E or W) side.
    Horizontal,
    /// Hinged at a horizontal (N or S) side.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TileClass {
    Straight,
    CurvingLeft,
    CurvingRight,
    Flap(FlapAxis),
}

impl TileClass {
    pub fn is_flap(self) -> bool {
        matches!(self, TileClass::Flap(_))
    }

    pub fn is_curving(self) -> bool {
        matches!(self, TileClass::CurvingLeft | TileClass::CurvingRight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileNode {
    pub index: usize,
    pub cell: Cell,
    pub tile_type: TileType,
    pub class: TileClass,
    /// Side facing the previous tile.
    pub hinge_in: Direction,
    /// Side facing the next tile.
    pub hinge_out: Direction,
}

/// An admissible direction word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sequence {
    symbols: Vec<Direction>,
}

impl Sequence {
    pub fn new(symbols: Vec<Direction>) -> Result<Sequence, SequenceError> {
        let n = symbols.len();
        if n % 2 == 1 {
            return Err(SequenceError::OddLength(n));
        }
        if !(MIN_TILES..=MAX_TILES).contains(&n) {
            return Err(SequenceError::OutOfRange(n));
        }
        let count = |d| symbols.iter().filter(|&&x| x == d).count();
        let (e, nn, w, s) =
            (count(Direction::E), count(Direction::N), count(Direction::W), count(Direction::S));
        if e != w || nn != s {
            return Err(SequenceError::NotClosed { e, n: nn, w, s });
        }
        Ok(Sequence { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Direction] {
        &self.symbols
    }

    /// `s_i`: step from `T_{i-1}` into `T_i`.
    pub fn step_into(&self, tile: usize) -> Direction {
        let n = self.len();
        self.symbols[(tile + n - 1) % n]
    }

    /// `s_{i+1}`: step from `T_i` into `T_{i+1}`.
    pub fn step_out(&self, tile: usize) -> Direction {
        self.symbols[tile % self.len()]
    }

    pub fn apply(&self, g: &Transform) -> Sequence {
        let n = self.len();
        let symbols =
            (0..n).map(|j| g.dihedral.apply(self.symbols[g.source_index(j, n)])).collect();
        Sequence { symbols }
    }

    /// Lexicographic comparison of `g·self` against `self` without materializing it.
    fn compare_image(&self, g: &Transform) -> Ordering {
        let n = self.len();
        for j in 0..n {
            let a = g.dihedral.apply(self.symbols[g.source_index(j, n)]);
            match a.cmp(&self.symbols[j]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    pub fn cells(&self) -> Vec<Cell> {
        let n = self.len();
        let mut cells = Vec::with_capacity(n);
        let mut p = (0, 0);
        cells.push(p);
        for j in 0..n - 1 {
            let (dx, dy) = self.symbols[j].step();
            p = (p.0 + dx, p.1 + dy);
            cells.push(p);
        }
        cells
    }

    pub fn tile_nodes(&self) -> Vec<TileNode> {
        self.tile_nodes_with(TileType::Slash)
    }

    pub fn tile_nodes_with(&self, first: TileType) -> Vec<TileNode> {
        let cells = self.cells();
        (0..self.len())
            .map(|i| {
                let s_in = self.step_into(i);
                let s_out = self.step_out(i);
                TileNode {
                    index: i,
                    cell: cells[i],
                    tile_type: TileType::of_index(i, first),
                    class: classify_tile(s_in, s_out),
                    hinge_in: s_in.opposite(),
                    hinge_out: s_out,
                }
            })
            .collect()
    }

    pub fn area(&self) -> usize {
        self.cells().into_iter().collect::<HashSet<_>>().len()
    }

    pub fn flap_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.step_out(i) == self.step_into(i).opposite()).count()
    }

    /// Curving-tile part of the metric invariant, with `T_0` of type slash.
    pub fn delta_c(&self) -> i32 {
        self.tile_nodes()
            .iter()
            .map(|t| match t.class {
                TileClass::CurvingLeft => -t.tile_type.sign(),
                TileClass::CurvingRight => t.tile_type.sign(),
                _ => 0,
            })
            .sum()
    }

    /// Lexicographic minimum of the orbit, with a transform reaching it.
    pub fn canonical_representative(&self) -> (Sequence, Transform) {
        let n = self.len();
        let mut best: Option<(Sequence, Transform)> = None;
        for g in Transform::all(n) {
            let img = self.apply(&g);
            if best.as_ref().is_none_or(|(b, _)| img < *b) {
                best = Some((img, g));
            }
        }
        best.expect("group is non-empty")
    }

    pub fn is_canonical(&self) -> bool {
        Transform::all(self.len()).iter().all(|g| self.compare_image(g) != Ordering::Less)
    }

    /// Stabilizer of the word.
    pub fn symmetry_group(&self) -> Vec<Transform> {
        Transform::all(self.len())
            .into_iter()
            .filter(|g| self.compare_image(g) == Ordering::Equal)
            .collect()
    }

    pub fn orbit(&self) -> BTreeSet<Sequence> {
        Transform::all(self.len()).iter().map(|g| self.apply(g)).collect()
    }
}

fn classify_tile(s_in: Direction, s_out: Direction) -> TileClass {
    if s_in == s_out {
        TileClass::Straight
    } else if s_out == s_in.opposite() {
        if s_in.is_horizontal() {
            TileClass::Flap(FlapAxis::Horizontal)
        } else {
            TileClass::Flap(FlapAxis::Vertical)
        }
    } else {
        let (a, b) = (s_in.step(), s_out.step());
        if a.0 * b.1 - a.1 * b.0 > 0 {
            TileClass::CurvingLeft
        } else {
            TileClass::CurvingRight
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.symbols {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for Sequence {
    type Err = SequenceError;

    fn from_str(text: &str) -> Result<Sequence, SequenceError> {
        let symbols = text
            .trim()
            .chars()
            .map(|c| Direction::from_letter(c).ok_or(SequenceError::BadCharacter(c)))
            .collect::<Result<Vec<_>, _>>()?;
        Sequence::new(symbols)
    }
}

pub fn parse_sequence(text: &str) -> Result<Sequence, SequenceError> {
    text.parse()
}

pub fn check_tile_count(n: usize) -> Result<(), SequenceError> {
    if n % 2 == 1 {
        Err(SequenceError::OddLength(n))
    } else if !(MIN_TILES..=MAX_TILES).contains(&n) {
        Err(SequenceError::OutOfRange(n))
    } else {
        Ok(())
    }
}

/// All canonical representatives for `n` tiles, in lexicographic order.
///
/// Words are generated depth-first in lexicographic order. A prefix is abandoned
/// when the remaining steps cannot close the walk, or when some direction
/// symmetry already maps the prefix below itself. Complete words are kept only
/// if no element of the group maps them lower.
pub fn enumerate_canonical(n: usize) -> Result<Vec<Sequence>, SequenceError> {
    check_tile_count(n)?;
    // canonical words start with E and the second symbol is never S
    let seconds = [Direction::E, Direction::N, Direction::W];
    let transforms = Transform::all(n);
    let mut chunks: Vec<Vec<Sequence>> = seconds
        .par_iter()
        .map(|&second| {
            let mut out = Vec::new();
            let mut word = vec![Direction::E, second];
            let mut counts = [0i32; 4];
            counts[0] += 1;
            counts[second.index() as usize] += 1;
            extend(&mut word, &mut counts, n, &transforms, &mut out);
            out
        })
        .collect();
    let mut all = Vec::new();
    for c in chunks.iter_mut() {
        all.append(c);
    }
    Ok(all)
}

fn extend(
    word: &mut Vec<Direction>,
    counts: &mut [i32; 4],
    n: usize,
    transforms: &[Transform],
    out: &mut Vec<Sequence>,
) {
    let remaining = (n - word.len()) as i32;
    let imbalance = (counts[0] - counts[2]).abs() + (counts[1] - counts[3]).abs();
    if imbalance > remaining {
        return;
    }
    if !prefix_may_be_canonical(word) {
        return;
    }
    if remaining == 0 {
        let seq = Sequence { symbols: word.clone() };
        if transforms.iter().all(|g| seq.compare_image(g) != Ordering::Less) {
            out.push(seq);
        }
        return;
    }
    for d in Direction::ALL {
        word.push(d);
        counts[d.index() as usize] += 1;
        extend(word, counts, n, transforms, out);
        counts[d.index() as usize] -= 1;
        word.pop();
    }
}

/// A shift-free symmetry that lowers the prefix lowers every completion.
fn prefix_may_be_canonical(prefix: &[Direction]) -> bool {
    Dihedral::all().all(|d| {
        for &x in prefix {
            match d.apply(x).cmp(&x) {
                Ordering::Less => return false,
                Ordering::Greater => return true,
                Ordering::Equal => {}
            }
        }
        true
    })
}
