//! Stackings of superposed tiles and the metric invariant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sequence::{
    Cell, Direction, FlapAxis, Sequence, SequenceError, TileClass, TileType, Transform,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssemblageError {
    #[error("expected prefix \"sla\" or \"bsla\", found {0:?}")]
    BadPrefix(String),
    #[error("bad level at tile {tile}: {reason}")]
    BadLevel { tile: usize, reason: String },
    #[error("bad token {0:?}")]
    BadToken(String),
    #[error("tile {0} is not a flap")]
    NotAFlap(usize),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// A sequence together with the height of every tile within its cell (1 = bottom).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assemblage {
    seq: Sequence,
    first: TileType,
    levels: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlapSense {
    Ascending,
    Descending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlapAttitude {
    pub axis: FlapAxis,
    pub sense: FlapSense,
}

impl FlapAttitude {
    /// Horizontal-ascending and vertical-descending flaps are skipped by the ribbon.
    pub fn ribbon_skips(self) -> bool {
        matches!(
            (self.axis, self.sense),
            (FlapAxis::Horizontal, FlapSense::Ascending) | (FlapAxis::Vertical, FlapSense::Descending)
        )
    }

    pub fn delta(self) -> i32 {
        if self.ribbon_skips() {
            -2
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MetricReport {
    pub delta_c: i32,
    pub delta_f: i32,
    pub delta: i32,
}

/// Tiles grouped by cell, cells in order of first visit.
pub fn cell_stacks(seq: &Sequence) -> Vec<(Cell, Vec<usize>)> {
    let mut order: Vec<(Cell, Vec<usize>)> = Vec::new();
    for (i, c) in seq.cells().into_iter().enumerate() {
        match order.iter_mut().find(|(cell, _)| *cell == c) {
            Some((_, tiles)) => tiles.push(i),
            None => order.push((c, vec![i])),
        }
    }
    order
}

/// A hinge between consecutive tiles, oriented across its edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Link {
    /// Tile on the lower-left side of the edge.
    low: usize,
    /// Tile on the upper-right side.
    high: usize,
}

impl Link {
    fn shares_tile(&self, other: &Link) -> bool {
        self.low == other.low || self.high == other.high
    }
}

/// Edge key: the lower-left cell and whether the edge is vertical (E/W neighbours).
type EdgeKey = (Cell, bool);

fn links_by_edge(seq: &Sequence) -> BTreeMap<EdgeKey, Vec<Link>> {
    let cells = seq.cells();
    let n = seq.len();
    let mut map: BTreeMap<EdgeKey, Vec<Link>> = BTreeMap::new();
    for i in 0..n {
        let j = (i + 1) % n;
        let d = seq.step_out(i);
        let (low, high) = match d {
            Direction::E | Direction::N => (i, j),
            Direction::W | Direction::S => (j, i),
        };
        map.entry((cells[low], d.is_horizontal())).or_default().push(Link { low, high });
    }
    map
}

/// Pairs of hinges across a common edge that share no tile.
fn constrained_pairs(seq: &Sequence) -> Vec<(Link, Link)> {
    let mut out = Vec::new();
    for links in links_by_edge(seq).values() {
        for (a, la) in links.iter().enumerate() {
            for lb in &links[a + 1..] {
                if !la.shares_tile(lb) {
                    out.push((*la, *lb));
                }
            }
        }
    }
    out
}

fn pair_ok(levels: &[u32], a: &Link, b: &Link) -> bool {
    (levels[a.low] < levels[b.low]) == (levels[a.high] < levels[b.high])
}

fn levels_are_permutations(seq: &Sequence, levels: &[u32]) -> bool {
    levels.len() == seq.len()
        && cell_stacks(seq).iter().all(|(_, tiles)| {
            let got: BTreeSet<u32> = tiles.iter().map(|&t| levels[t]).collect();
            got.len() == tiles.len() && got.iter().copied().eq(1..=tiles.len() as u32)
        })
}

/// Whether the stacking is realizable: two hinges across the same edge that
/// share no tile keep their relative order on both sides of the edge.
pub fn is_admissible_assemblage(seq: &Sequence, levels: &[u32]) -> bool {
    levels_are_permutations(seq, levels)
        && constrained_pairs(seq).iter().all(|(a, b)| pair_ok(levels, a, b))
}

/// Inverts the order within every cell.
fn turned_over(seq: &Sequence, levels: &[u32]) -> Vec<u32> {
    let mut out = levels.to_vec();
    for (_, tiles) in cell_stacks(seq) {
        let k = tiles.len() as u32;
        for t in tiles {
            out[t] = k + 1 - levels[t];
        }
    }
    out
}

impl Assemblage {
    pub fn new(seq: Sequence, first: TileType, levels: Vec<u32>) -> Result<Assemblage, AssemblageError> {
        if levels.len() != seq.len() {
            return Err(AssemblageError::BadLevel {
                tile: levels.len().min(seq.len()),
                reason: format!("expected {} levels, got {}", seq.len(), levels.len()),
            });
        }
        for (cell, tiles) in cell_stacks(&seq) {
            let k = tiles.len() as u32;
            let mut seen = BTreeSet::new();
            for &t in &tiles {
                let l = levels[t];
                if l == 0 || l > k {
                    return Err(AssemblageError::BadLevel {
                        tile: t,
                        reason: format!("level {l} outside 1..={k} for cell {cell:?}"),
                    });
                }
                if !seen.insert(l) {
                    return Err(AssemblageError::BadLevel {
                        tile: t,
                        reason: format!("level {l} repeated in cell {cell:?}"),
                    });
                }
            }
        }
        Ok(Assemblage { seq, first, levels })
    }

    pub fn sequence(&self) -> &Sequence {
        &self.seq
    }

    pub fn first_type(&self) -> TileType {
        self.first
    }

    pub fn tile_type(&self, i: usize) -> TileType {
        TileType::of_index(i, self.first)
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> u32 {
        self.levels[i % self.levels.len()]
    }

    pub fn is_admissible(&self) -> bool {
        is_admissible_assemblage(&self.seq, &self.levels)
    }

    /// Mirror image in a horizontal plane: stacks inverted, tile types exchanged.
    pub fn turned_over(&self) -> Assemblage {
        Assemblage {
            seq: self.seq.clone(),
            first: self.first.flipped(),
            levels: turned_over(&self.seq, &self.levels),
        }
    }

    /// Image under `g`, an assemblage of `g·seq`, turned over if needed so that
    /// its first tile keeps the type of `self`'s first tile.
    pub fn transported(&self, g: &Transform) -> Assemblage {
        let n = self.seq.len();
        let seq = self.seq.apply(g);
        let map = g.tile_map(n);
        let levels: Vec<u32> = map.iter().map(|&src| self.levels[src]).collect();
        let mut first = self.tile_type(map[0]);
        if g.plan_isometry().swaps_diagonals() {
            first = first.flipped();
        }
        let img = Assemblage { seq, first, levels };
        if img.first == self.first {
            img
        } else {
            img.turned_over()
        }
    }

    /// Levels listed in print order: `T_1, .., T_{n-1}, T_0`.
    fn print_order(&self) -> Vec<u32> {
        let n = self.levels.len();
        (1..=n).map(|i| self.levels[i % n]).collect()
    }

    /// Orbit representative under the sequence's symmetries: the image whose
    /// printed levels are lexicographically largest.
    pub fn canonical(&self) -> Assemblage {
        self.seq
            .symmetry_group()
            .iter()
            .map(|g| self.transported(g))
            .max_by(|a, b| a.print_order().cmp(&b.print_order()))
            .expect("stabilizer contains the identity")
    }

    pub fn flap_attitude(&self, i: usize) -> Result<FlapAttitude, AssemblageError> {
        let n = self.seq.len();
        let i = i % n;
        let axis = match self.seq.tile_nodes()[i].class {
            TileClass::Flap(axis) => axis,
            _ => return Err(AssemblageError::NotAFlap(i)),
        };
        let prev = self.levels[(i + n - 1) % n];
        let next = self.levels[(i + 1) % n];
        let sense = if prev < next { FlapSense::Ascending } else { FlapSense::Descending };
        Ok(FlapAttitude { axis, sense })
    }

    /// Per-tile excess of ribbon sections over two.
    pub fn delta_per_tile(&self) -> Vec<i32> {
        self.seq
            .tile_nodes_with(self.first)
            .iter()
            .map(|t| match t.class {
                TileClass::Straight => 0,
                TileClass::CurvingLeft => -t.tile_type.sign(),
                TileClass::CurvingRight => t.tile_type.sign(),
                TileClass::Flap(_) => self.flap_attitude(t.index).expect("flap").delta(),
            })
            .collect()
    }

    pub fn metric_invariant(&self) -> MetricReport {
        let nodes = self.seq.tile_nodes_with(self.first);
        let per = self.delta_per_tile();
        let (mut delta_c, mut delta_f) = (0, 0);
        for (t, d) in nodes.iter().zip(per) {
            if t.class.is_flap() {
                delta_f += d;
            } else {
                delta_c += d;
            }
        }
        MetricReport { delta_c, delta_f, delta: delta_c + delta_f }
    }
}

impl fmt::Display for Assemblage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.first.tag())?;
        let n = self.seq.len();
        for i in 1..=n {
            write!(f, " {}{}", self.seq.step_into(i % n), self.levels[i % n])?;
        }
        Ok(())
    }
}

pub fn format_assemblage(asm: &Assemblage) -> String {
    asm.to_string()
}

/// Parses `sla E3 E2 W2 ...`. A token without digits means level 1.
pub fn parse_assemblage(text: &str) -> Result<Assemblage, AssemblageError> {
    let mut tokens = text.split_whitespace();
    let first = match tokens.next() {
        Some("sla") => TileType::Slash,
        Some("bsla") => TileType::Backslash,
        other => return Err(AssemblageError::BadPrefix(other.unwrap_or("").to_string())),
    };
    let mut dirs = Vec::new();
    let mut printed = Vec::new();
    for tok in tokens {
        let mut chars = tok.chars();
        let d = chars
            .next()
            .and_then(Direction::from_letter)
            .ok_or_else(|| AssemblageError::BadToken(tok.to_string()))?;
        let digits = chars.as_str();
        let level = if digits.is_empty() {
            1
        } else {
            digits.parse::<u32>().map_err(|_| AssemblageError::BadToken(tok.to_string()))?
        };
        dirs.push(d);
        printed.push(level);
    }
    let seq = Sequence::new(dirs)?;
    let n = seq.len();
    let mut levels = vec![0; n];
    for (k, l) in printed.into_iter().enumerate() {
        levels[(k + 1) % n] = l;
    }
    Assemblage::new(seq, first, levels)
}

impl FromStr for Assemblage {
    type Err = AssemblageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_assemblage(s)
    }
}

/// Every admissible level assignment with `T_0` of type slash, by backtracking
/// over per-cell permutations.
pub fn admissible_level_assignments(seq: &Sequence) -> Vec<Vec<u32>> {
    let stacks = cell_stacks(seq);
    let n = seq.len();
    let mut slot = vec![0usize; n];
    for (k, (_, tiles)) in stacks.iter().enumerate() {
        for &t in tiles {
            slot[t] = k;
        }
    }
    // each constraint is checked once the last of its cells is assigned
    let mut checks: Vec<Vec<(Link, Link)>> = vec![Vec::new(); stacks.len()];
    for (a, b) in constrained_pairs(seq) {
        let last = [a.low, a.high, b.low, b.high].iter().map(|&t| slot[t]).max().unwrap();
        checks[last].push((a, b));
    }
    let mut out = Vec::new();
    let mut levels = vec![0u32; n];
    assign(0, &stacks, &checks, &mut levels, &mut out);
    out
}

fn assign(
    k: usize,
    stacks: &[(Cell, Vec<usize>)],
    checks: &[Vec<(Link, Link)>],
    levels: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if k == stacks.len() {
        out.push(levels.clone());
        return;
    }
    let tiles = &stacks[k].1;
    let mut perm: Vec<u32> = (1..=tiles.len() as u32).collect();
    loop {
        for (t, &l) in tiles.iter().zip(&perm) {
            levels[*t] = l;
        }
        if checks[k].iter().all(|(a, b)| pair_ok(levels, a, b)) {
            assign(k + 1, stacks, checks, levels, out);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Admissible assemblages of `seq` with `T_0` of type slash, one per class
/// under the sequence's symmetries, listed by decreasing printed levels.
pub fn enumerate_assemblages(seq: &Sequence) -> Vec<Assemblage> {
    let group = seq.symmetry_group();
    let mut reps: Vec<Assemblage> = admissible_level_assignments(seq)
        .into_iter()
        .filter_map(|levels| {
            let a = Assemblage { seq: seq.clone(), first: TileType::Slash, levels };
            let mine = a.print_order();
            let is_rep = group.iter().all(|g| a.transported(g).print_order() <= mine);
            is_rep.then_some(a)
        })
        .collect();
    reps.sort_by_key(|a| std::cmp::Reverse(a.print_order()));
    reps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> Sequence {
        s.parse().unwrap()
    }

    #[test]
    fn predicate_examples() {
        let s = seq("EEENWWWS");
        assert!(is_admissible_assemblage(&s, &[1; 8]));
        assert!(admissible_level_assignments(&seq("ENSWENSW")).is_empty());
        assert!(admissible_level_assignments(&seq("EWEWEWEW")).is_empty());
        assert!(admissible_level_assignments(&seq("ENWSENWS")).is_empty());
        // levels that are not a permutation within a cell
        assert!(!is_admissible_assemblage(&seq("EEEEWWWW"), &[1; 8]));
    }

    #[test]
    fn counts_from_reference_tool() {
        assert_eq!(enumerate_assemblages(&seq("EEWENWSW")).len(), 6);
        assert_eq!(enumerate_assemblages(&seq("EEENWWSW")).len(), 2);
        assert_eq!(enumerate_assemblages(&seq("EEEEWWWW")).len(), 1);
    }

    #[test]
    fn reference_lines_have_zero_delta() {
        let zero: Vec<String> = enumerate_assemblages(&seq("EEWENWSW"))
            .into_iter()
            .filter(|a| a.metric_invariant().delta == 0)
            .map(|a| a.to_string())
            .collect();
        assert_eq!(zero, vec!["sla E3 E2 W2 E1 N1 W1 S1 W1", "sla E3 E2 W1 E1 N1 W1 S2 W1"]);
    }

    #[test]
    fn metric_examples() {
        let window = parse_assemblage("sla E E N N W W S S").unwrap();
        assert_eq!(window.metric_invariant(), MetricReport { delta_c: -4, delta_f: 0, delta: -4 });
        let rect = parse_assemblage("sla E E E N W W W S").unwrap();
        assert_eq!(rect.metric_invariant().delta, 0);
        for a in enumerate_assemblages(&seq("EEENWWSW")) {
            assert_eq!(a.metric_invariant().delta_c, -2);
        }
    }

    #[test]
    fn flap_attitudes() {
        // T_0 is a horizontal flap between T_7 and T_1
        let s = seq("EEENWWSW");
        let all = enumerate_assemblages(&s);
        let senses: BTreeSet<_> = all
            .iter()
            .map(|a| {
                let att = a.flap_attitude(0).unwrap();
                assert_eq!(att.axis, FlapAxis::Horizontal);
                (a.level(7) < a.level(1), att.sense == FlapSense::Ascending)
            })
            .collect();
        assert!(senses.iter().all(|(x, y)| x == y));
        assert_eq!(senses.len(), 2);
        assert_eq!(all[0].flap_attitude(1), Err(AssemblageError::NotAFlap(1)));
    }

    #[test]
    fn parse_and_format() {
        let a = parse_assemblage("sla E3 E2 W2 E1 N1 W1 S1 W1").unwrap();
        assert_eq!(a.to_string(), "sla E3 E2 W2 E1 N1 W1 S1 W1");
        assert_eq!(a.level(0), 1);
        assert_eq!(a.level(1), 3);
        assert!(matches!(parse_assemblage("xla E E E N W W W S"), Err(AssemblageError::BadPrefix(_))));
        assert!(matches!(
            parse_assemblage("sla E2 E E N W W W S"),
            Err(AssemblageError::BadLevel { .. })
        ));
        assert!(matches!(parse_assemblage("sla E E E N W W W"), Err(AssemblageError::Sequence(_))));
    }

    #[test]
    fn transport_preserves_admissibility() {
        for text in ["EEWENWSW", "ENEWSNWS", "EENWSEWW", "EEWEWWEW"] {
            let s = seq(text);
            for a in enumerate_assemblages(&s) {
                for g in Transform::all(8) {
                    let b = a.transported(&g);
                    assert!(b.is_admissible(), "{a} under {g:?}");
                    assert_eq!(b.metric_invariant().delta == 0, a.metric_invariant().delta == 0);
                }
            }
        }
    }
}
