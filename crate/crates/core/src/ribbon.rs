//! The closed ribbon threaded through the grooves of a face-up assemblage.

use std::fmt;
use std::ops::{Add, Neg};

use serde::{Deserialize, Serialize};

use crate::assemblage::{Assemblage, MetricReport};
use crate::sequence::{Direction, FlapAxis, TileClass, TileType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Face {
    Front,
    Back,
}

impl Face {
    /// Face carrying a section that leaves from `side`.
    pub fn leaving(side: Direction) -> Face {
        if side.is_horizontal() {
            Face::Front
        } else {
            Face::Back
        }
    }

    pub fn other(self) -> Face {
        match self {
            Face::Front => Face::Back,
            Face::Back => Face::Front,
        }
    }
}

/// Sides of a tile are named by the outward direction across them.
pub type Side = Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RibbonEvent {
    /// A straight section of length √2/2 joining two side midpoints.
    FaceSegment { tile: usize, face: Face, from: Side, to: Side },
    /// The ribbon folds around `side` of `tile` onto the other face.
    Bounce { tile: usize, side: Side },
    /// The ribbon crosses the hinge between `tile_a` and `tile_b` through `side` of `tile_a`.
    HingePass { tile_a: usize, face_a: Face, tile_b: usize, face_b: Face, side: Side },
    /// The `flaps` flap tiles between `prev` and `next` are not touched. An odd run
    /// folds around the shared side; an even run crosses it like a hinge passage.
    FlapSkip { prev: usize, next: usize, side: Side, flaps: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RibbonPath {
    pub events: Vec<RibbonEvent>,
    pub segment_count: usize,
    pub per_tile: Vec<usize>,
}

/// The next side midpoint along the groove on the front face.
pub fn groove_next(tile_type: TileType, side: Side) -> Side {
    use Direction::*;
    match (tile_type, side) {
        (TileType::Slash, W) => N,
        (TileType::Slash, N) => E,
        (TileType::Slash, E) => S,
        (TileType::Slash, S) => W,
        (TileType::Backslash, W) => S,
        (TileType::Backslash, S) => E,
        (TileType::Backslash, E) => N,
        (TileType::Backslash, N) => W,
    }
}

fn skips(asm: &Assemblage, tile: usize) -> bool {
    asm.flap_attitude(tile).map(|a| a.ribbon_skips()).unwrap_or(false)
}

/// Walks the ribbon once around, starting where it enters `T_0`
/// (or the first untouched-flap neighbour when `T_0` is skipped).
pub fn build_ribbon(asm: &Assemblage) -> RibbonPath {
    let seq = asm.sequence();
    let n = seq.len();
    let nodes = seq.tile_nodes_with(asm.first_type());
    let mut events = Vec::new();
    let mut per_tile = vec![0; n];
    let start = (0..n).find(|&i| !skips(asm, i)).expect("not every tile is a skipped flap");
    let mut face = None;
    for k in 0..n {
        let i = (start + k) % n;
        if skips(asm, i) {
            continue;
        }
        let node = &nodes[i];
        let mut side = node.hinge_in;
        let mut first = true;
        loop {
            if !first {
                events.push(RibbonEvent::Bounce { tile: i, side });
            }
            let to = groove_next(node.tile_type, side);
            let f = Face::leaving(side);
            if let Some(prev) = face {
                debug_assert_ne!(prev, f);
            }
            face = Some(f);
            events.push(RibbonEvent::FaceSegment { tile: i, face: f, from: side, to });
            per_tile[i] += 1;
            side = to;
            first = false;
            if side == node.hinge_out {
                break;
            }
        }
        let next = (i + 1) % n;
        let flaps = (0..n).take_while(|&k| skips(asm, (next + k) % n)).count();
        if flaps > 0 {
            let after = (next + flaps) % n;
            events.push(RibbonEvent::FlapSkip { prev: i, next: after, side, flaps });
        } else {
            let face_a = face.expect("segment emitted");
            events.push(RibbonEvent::HingePass {
                tile_a: i,
                face_a,
                tile_b: next,
                face_b: face_a.other(),
                side,
            });
        }
    }
    let segment_count = per_tile.iter().sum();
    RibbonPath { events, segment_count, per_tile }
}

pub fn check_length(path: &RibbonPath, report: &MetricReport) -> bool {
    path.segment_count as i64 == 2 * path.per_tile.len() as i64 + report.delta as i64
}

/// A multiple of one half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);

    pub fn from_halves(h: i32) -> HalfInt {
        HalfInt(h)
    }

    pub fn from_int(k: i32) -> HalfInt {
        HalfInt(2 * k)
    }

    pub fn halves(self) -> i32 {
        self.0
    }

    pub fn to_int(self) -> Option<i32> {
        (self.0 % 2 == 0).then_some(self.0 / 2)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;

    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;

    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl std::iter::Sum for HalfInt {
    fn sum<I: Iterator<Item = HalfInt>>(iter: I) -> HalfInt {
        iter.fold(HalfInt::ZERO, Add::add)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_int() {
            Some(k) => write!(f, "{k}"),
            None => write!(f, "{}/2", self.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistReport {
    pub per_tile: Vec<HalfInt>,
    pub l_t: HalfInt,
}

/// Twist of the ribbon against the surface of each tile.
pub fn twist(asm: &Assemblage) -> TwistReport {
    let per_tile: Vec<HalfInt> = asm
        .sequence()
        .tile_nodes_with(asm.first_type())
        .iter()
        .map(|t| {
            let slash = t.tile_type == TileType::Slash;
            let positive = match t.class {
                TileClass::CurvingLeft | TileClass::CurvingRight => return HalfInt::ZERO,
                // a vertical tile is hinged through its N and S sides
                TileClass::Straight => t.hinge_in.is_horizontal() != slash,
                TileClass::Flap(FlapAxis::Vertical) => slash,
                TileClass::Flap(FlapAxis::Horizontal) => !slash,
            };
            if positive {
                HalfInt::HALF
            } else {
                -HalfInt::HALF
            }
        })
        .collect();
    let l_t = per_tile.iter().copied().sum();
    TwistReport { per_tile, l_t }
}

fn face_name(f: Face) -> &'static str {
    match f {
        Face::Front => "front",
        Face::Back => "back",
    }
}

impl fmt::Display for RibbonEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RibbonEvent::FaceSegment { tile, face, from, to } => {
                write!(f, "segment T{tile} {} {from}->{to}", face_name(face))
            }
            RibbonEvent::Bounce { tile, side } => write!(f, "bounce T{tile} {side}"),
            RibbonEvent::HingePass { tile_a, face_a, tile_b, face_b, side } => write!(
                f,
                "pass T{tile_a} {} -> T{tile_b} {} via {side}",
                face_name(face_a),
                face_name(face_b)
            ),
            RibbonEvent::FlapSkip { prev, next, side, flaps } => {
                write!(f, "skip {flaps} T{prev} -> T{next} via {side}")
            }
        }
    }
}

/// One event per line, prefixed with its ordinal.
pub fn debug_dump(path: &RibbonPath) -> String {
    let mut out = String::new();
    for (k, e) in path.events.iter().enumerate() {
        out.push_str(&format!("{k:3} {e}\n"));
    }
    out
}
