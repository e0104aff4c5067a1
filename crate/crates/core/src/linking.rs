//! Explicit 3D embedding of the ribbon and its linking number.
//!
//! Everything is exact: coordinates are rationals and every incidence or
//! depth comparison is decided without rounding.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assemblage::Assemblage;
use crate::ribbon::{build_ribbon, twist, Face, HalfInt, RibbonEvent, RibbonPath};
use crate::sequence::{Cell, Direction};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkingError {
    #[error("invalid embedding parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate embedding: {0}")]
    EmbeddingDegenerate(String),
    #[error("no generic projection found after {0} tilts")]
    NonGenericProjection(usize),
    #[error("unknown parameter {0:?}")]
    UnknownParam(String),
    #[error("bad value {value:?} for parameter {key}")]
    BadParamValue { key: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vec3 {
    pub x: Q,
    pub y: Q,
    pub z: Q,
}

impl Vec3 {
    pub fn new(x: Q, y: Q, z: Q) -> Vec3 {
        Vec3 { x, y, z }
    }

    fn add(&self, o: &Vec3) -> Vec3 {
        Vec3::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }

    fn sub(&self, o: &Vec3) -> Vec3 {
        Vec3::new(&self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }

    fn scale(&self, k: &Q) -> Vec3 {
        Vec3::new(&self.x * k, &self.y * k, &self.z * k)
    }

    fn neg(&self) -> Vec3 {
        Vec3::new(-&self.x, -&self.y, -&self.z)
    }

    fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3::new(
            &self.y * &o.z - &self.z * &o.y,
            &self.z * &o.x - &self.x * &o.z,
            &self.x * &o.y - &self.y * &o.x,
        )
    }

    fn dot(&self, o: &Vec3) -> Q {
        &self.x * &o.x + &self.y * &o.y + &self.z * &o.z
    }

    fn l1(&self) -> Q {
        self.x.abs() + self.y.abs() + self.z.abs()
    }

    fn to_f64(&self) -> [f64; 3] {
        [f(&self.x), f(&self.y), f(&self.z)]
    }
}

fn f(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// A closed polygon; the last vertex joins the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polyline3 {
    pub points: Vec<Vec3>,
}

impl Polyline3 {
    pub fn new(points: Vec<Vec3>) -> Polyline3 {
        Polyline3 { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn segment(&self, i: usize) -> (&Vec3, &Vec3) {
        (&self.points[i], &self.points[(i + 1) % self.points.len()])
    }
}

/// Geometry of the embedding, in units of the tile side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingParams {
    /// Vertical distance between consecutive levels of a stack.
    pub stack_gap: Q,
    /// Height of the ribbon above the front face and below the back face.
    pub face_offset: Q,
    /// Distance from a side at which face sections stop.
    pub edge_margin: Q,
    /// Length of the level run that starts every hinge passage.
    pub pass_stub: Q,
    /// Radius of the innermost wrap around a side.
    pub wrap_radius: Q,
    /// Radius increment per nesting rank.
    pub wrap_step: Q,
    pub half_width: Q,
    /// Largest offset along a side given to a connector.
    pub edge_jitter: Q,
    pub tilt: (Q, Q),
}

impl Default for EmbeddingParams {
    fn default() -> Self {
        EmbeddingParams {
            stack_gap: q(1, 1),
            face_offset: q(1, 5),
            edge_margin: q(3, 20),
            pass_stub: q(1, 20),
            wrap_radius: q(1, 400),
            wrap_step: q(1, 400),
            half_width: q(1, 4000),
            edge_jitter: q(1, 2000),
            tilt: (q(3, 1000), q(7, 1000)),
        }
    }
}

pub const PARAM_KEYS: [&str; 10] = [
    "stack_gap",
    "face_offset",
    "edge_margin",
    "pass_stub",
    "wrap_radius",
    "wrap_step",
    "half_width",
    "edge_jitter",
    "tilt_x",
    "tilt_y",
];

/// Parses `0.25`, `-3`, `1/8` or `1e-3` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Q> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once('/') {
        let a = BigInt::from_str(a.trim()).ok()?;
        let b = BigInt::from_str(b.trim()).ok()?;
        return (!b.is_zero()).then(|| Q::new(a, b));
    }
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = BigInt::from_str(&format!("0{int}{frac}")).ok()?;
    let ten = BigInt::from(10);
    let scale = exp - frac.len() as i32;
    let mut v = Q::from_integer(digits);
    if scale >= 0 {
        v *= Q::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= Q::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -v } else { v })
}

impl EmbeddingParams {
    pub fn get(&self, key: &str) -> Option<&Q> {
        Some(match key {
            "stack_gap" => &self.stack_gap,
            "face_offset" => &self.face_offset,
            "edge_margin" => &self.edge_margin,
            "pass_stub" => &self.pass_stub,
            "wrap_radius" => &self.wrap_radius,
            "wrap_step" => &self.wrap_step,
            "half_width" => &self.half_width,
            "edge_jitter" => &self.edge_jitter,
            "tilt_x" => &self.tilt.0,
            "tilt_y" => &self.tilt.1,
            _ => return None,
        })
    }

    fn get_mut(&mut self, key: &str) -> Option<&mut Q> {
        Some(match key {
            "stack_gap" => &mut self.stack_gap,
            "face_offset" => &mut self.face_offset,
            "edge_margin" => &mut self.edge_margin,
            "pass_stub" => &mut self.pass_stub,
            "wrap_radius" => &mut self.wrap_radius,
            "wrap_step" => &mut self.wrap_step,
            "half_width" => &mut self.half_width,
            "edge_jitter" => &mut self.edge_jitter,
            "tilt_x" => &mut self.tilt.0,
            "tilt_y" => &mut self.tilt.1,
            _ => return None,
        })
    }

    pub fn set(&mut self, key: &str, value: Q) -> Result<(), LinkingError> {
        *self.get_mut(key).ok_or_else(|| LinkingError::UnknownParam(key.to_string()))? = value;
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<(), LinkingError> {
        let (key, value) =
            kv.split_once('=').ok_or_else(|| LinkingError::UnknownParam(kv.to_string()))?;
        let v = parse_rational(value).ok_or_else(|| LinkingError::BadParamValue {
            key: key.to_string(),
            value: value.to_string(),
        })?;
        self.set(key.trim(), v)
    }

    pub fn scaled(&self, key: &str, factor: &Q) -> Result<EmbeddingParams, LinkingError> {
        let mut p = self.clone();
        let v = p.get_mut(key).ok_or_else(|| LinkingError::UnknownParam(key.to_string()))?;
        *v = &*v * factor;
        Ok(p)
    }

    /// Checks the separations that keep the ribbon clear of itself for a
    /// wrap nesting depth of `max_rank`.
    pub fn validate(&self, max_rank: usize) -> Result<(), LinkingError> {
        let bad = |m: &str| Err(LinkingError::InvalidParams(m.to_string()));
        let two = q(2, 1);
        if !self.stack_gap.is_positive() {
            return bad("stack_gap must be positive");
        }
        if !self.face_offset.is_positive() || &self.face_offset * &two >= self.stack_gap {
            return bad("face_offset must lie in (0, stack_gap/2)");
        }
        if !self.edge_margin.is_positive() || self.edge_margin >= q(1, 4) {
            return bad("edge_margin must lie in (0, 1/4)");
        }
        if !self.pass_stub.is_positive() || self.pass_stub >= self.edge_margin {
            return bad("pass_stub must lie in (0, edge_margin)");
        }
        let widest = &self.wrap_radius + &self.wrap_step * Q::from_integer(BigInt::from(max_rank));
        if !self.wrap_radius.is_positive() || !self.wrap_step.is_positive() || widest >= self.pass_stub {
            return bad("wrap radii must be positive and below pass_stub");
        }
        if !self.half_width.is_positive() || &self.half_width * &two >= self.wrap_step {
            return bad("half_width must lie in (0, wrap_step/2)");
        }
        if self.edge_jitter.is_negative() || self.edge_jitter >= &self.edge_margin - &self.pass_stub {
            return bad("edge_jitter must lie in [0, edge_margin - pass_stub)");
        }
        let steep = q(1, 20);
        if self.tilt.0.abs() >= steep || self.tilt.1.abs() >= steep {
            return bad("tilt components must stay below 1/20");
        }
        Ok(())
    }
}

/// The three curves of an embedded ribbon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedRibbon {
    pub centerline: Polyline3,
    pub boundary_pos: Polyline3,
    pub boundary_neg: Polyline3,
}

fn dir_vec(d: Direction) -> (i64, i64) {
    let (x, y) = d.step();
    (x as i64, y as i64)
}

fn side_mid(cell: Cell, side: Direction) -> (Q, Q) {
    let (dx, dy) = dir_vec(side);
    (
        Q::from_integer(BigInt::from(cell.0)) + q(1 + dx, 2),
        Q::from_integer(BigInt::from(cell.1)) + q(1 + dy, 2),
    )
}

struct FaceRun {
    start: Vec3,
    end: Vec3,
    normal: i64,
}

struct Wrap {
    cell: Cell,
    side: Direction,
    lo: Q,
    hi: Q,
}

/// Builds centerline and boundary polylines.
pub fn embed(
    path: &RibbonPath,
    asm: &Assemblage,
    params: &EmbeddingParams,
) -> Result<EmbeddedRibbon, LinkingError> {
    let cells = asm.sequence().cells();
    let eps = &params.edge_margin;
    let two_eps = eps * q(2, 1);
    let z_of = |tile: usize, face: Face| -> Q {
        let base = Q::from_integer(BigInt::from(asm.level(tile))) * &params.stack_gap;
        match face {
            Face::Front => base + &params.face_offset,
            Face::Back => base - &params.face_offset,
        }
    };

    let mut runs: Vec<FaceRun> = Vec::new();
    let mut connectors: Vec<&RibbonEvent> = Vec::new();
    for e in &path.events {
        match e {
            RibbonEvent::FaceSegment { tile, face, from, to } => {
                let z = z_of(*tile, *face);
                let a = side_mid(cells[*tile], *from);
                let b = side_mid(cells[*tile], *to);
                let start = Vec3::new(
                    &a.0 + &two_eps * (&b.0 - &a.0),
                    &a.1 + &two_eps * (&b.1 - &a.1),
                    z.clone(),
                );
                let end = Vec3::new(
                    &b.0 + &two_eps * (&a.0 - &b.0),
                    &b.1 + &two_eps * (&a.1 - &b.1),
                    z,
                );
                let normal = if *face == Face::Front { 1 } else { -1 };
                runs.push(FaceRun { start, end, normal });
            }
            other => connectors.push(other),
        }
    }
    if runs.is_empty() || runs.len() != connectors.len() {
        return Err(LinkingError::EmbeddingDegenerate("ribbon events do not alternate".into()));
    }

    // wraps sharing a side nest; inner ones get smaller radii
    let m = runs.len();
    let mut wraps: Vec<Option<Wrap>> = Vec::with_capacity(m);
    for (k, c) in connectors.iter().enumerate() {
        let (za, zb) = (&runs[k].end.z, &runs[(k + 1) % m].start.z);
        let (lo, hi) = if za < zb { (za.clone(), zb.clone()) } else { (zb.clone(), za.clone()) };
        wraps.push(match **c {
            RibbonEvent::Bounce { tile, side } => Some(Wrap { cell: cells[tile], side, lo, hi }),
            RibbonEvent::FlapSkip { prev, side, flaps, .. } if flaps % 2 == 1 => {
                Some(Wrap { cell: cells[prev], side, lo, hi })
            }
            _ => None,
        });
    }
    let mut rank = vec![0usize; m];
    for (k, w) in wraps.iter().enumerate() {
        let Some(w) = w else { continue };
        for (l, v) in wraps.iter().enumerate() {
            let Some(v) = v else { continue };
            if k == l || v.cell != w.cell || v.side != w.side {
                continue;
            }
            let inside = v.lo >= w.lo && v.hi <= w.hi;
            let outside = v.lo <= w.lo && v.hi >= w.hi;
            let apart = v.hi < w.lo || v.lo > w.hi;
            if inside {
                rank[k] += 1;
            } else if !(outside || apart) {
                return Err(LinkingError::EmbeddingDegenerate(format!(
                    "wraps around side {} of cell {:?} interleave",
                    w.side, w.cell
                )));
            }
        }
    }
    params.validate(rank.iter().copied().max().unwrap_or(0))?;

    let mut points: Vec<Vec3> = Vec::new();
    let mut normals: Vec<Vec3> = Vec::new();
    let zhat = Vec3::new(Q::zero(), Q::zero(), Q::one());
    let mut nu = zhat.scale(&Q::from_integer(BigInt::from(runs[0].normal)));
    let jitter_unit = &params.edge_jitter / Q::from_integer(BigInt::from(m as i64));
    for k in 0..m {
        let run = &runs[k];
        let next = &runs[(k + 1) % m];
        points.push(run.start.clone());
        normals.push(nu.clone());
        points.push(run.end.clone());
        normals.push(nu.clone());

        let (cell, side) = match *connectors[k] {
            RibbonEvent::Bounce { tile, side } => (cells[tile], side),
            RibbonEvent::FlapSkip { prev, side, .. } => (cells[prev], side),
            RibbonEvent::HingePass { tile_a, side, .. } => (cells[tile_a], side),
            RibbonEvent::FaceSegment { .. } => unreachable!(),
        };
        let mid = side_mid(cell, side);
        let (ox, oy) = dir_vec(side);
        let o = Vec3::new(q(ox, 1), q(oy, 1), Q::zero());
        let e = Vec3::new(q(-oy, 1), q(ox, 1), Q::zero());
        let origin = Vec3::new(mid.0, mid.1, Q::zero());
        let local_u = |p: &Vec3| p.sub(&origin).dot(&e);
        let at = |x: &Q, u: &Q, z: &Q| {
            let mut p = origin.add(&o.scale(x)).add(&e.scale(u));
            p.z = z.clone();
            p
        };
        let jitter = &jitter_unit * Q::from_integer(BigInt::from(k as i64));
        let u_in = local_u(&run.end);
        let u_out = local_u(&next.start);
        let (za, zb) = (&run.end.z, &next.start.z);
        let passes = match *connectors[k] {
            RibbonEvent::HingePass { .. } => true,
            RibbonEvent::FlapSkip { flaps, .. } => flaps % 2 == 0,
            _ => false,
        };
        match passes {
            true => {
                let x = eps - &params.pass_stub;
                let shrink = &x / eps;
                points.push(at(&-&x, &(&u_in * &shrink + &jitter), za));
                points.push(at(&x, &(&u_out * &shrink + &jitter), zb));
                normals.push(nu.clone());
                normals.push(nu.clone());
            }
            false => {
                let r = &params.wrap_radius + &params.wrap_step * Q::from_integer(BigInt::from(rank[k] as i64));
                let x = -(eps - &r);
                let shrink = (eps - &r) / eps;
                let n_in = zhat.scale(&Q::from_integer(BigInt::from(run.normal)));
                let sigma = nu.dot(&n_in);
                let out = o.scale(&sigma);
                points.push(at(&x, &(&u_in * &shrink + &jitter), za));
                normals.push(nu.add(&out));
                points.push(at(&x, &(&u_out * &shrink + &jitter), zb));
                normals.push(out.sub(&nu));
                nu = nu.neg();
            }
        }
        let n_next = zhat.scale(&Q::from_integer(BigInt::from(next.normal)));
        if nu.dot(&n_next).is_zero() {
            return Err(LinkingError::EmbeddingDegenerate("ribbon normal left the face".into()));
        }
    }
    if nu != normals[0] {
        return Err(LinkingError::EmbeddingDegenerate("ribbon frame does not close".into()));
    }

    let np = points.len();
    let mut pos = Vec::with_capacity(np);
    let mut neg = Vec::with_capacity(np);
    for i in 0..np {
        let t = points[(i + 1) % np].sub(&points[(i + np - 1) % np]);
        let v = normals[i].cross(&t);
        let len = v.l1();
        if len.is_zero() {
            return Err(LinkingError::EmbeddingDegenerate(format!("no ribbon frame at vertex {i}")));
        }
        let off = v.scale(&(&params.half_width / len));
        pos.push(points[i].add(&off));
        neg.push(points[i].sub(&off));
    }
    Ok(EmbeddedRibbon {
        centerline: Polyline3::new(points),
        boundary_pos: Polyline3::new(pos),
        boundary_neg: Polyline3::new(neg),
    })
}

/// A segment of one of several polylines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StrandRef {
    pub component: usize,
    pub segment: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub position: (Q, Q),
    pub over: StrandRef,
    pub under: StrandRef,
    pub sign: i32,
}

struct Seg2 {
    id: StrandRef,
    p: (Q, Q),
    q: (Q, Q),
    pz: Q,
    qz: Q,
    pf: (f64, f64),
    qf: (f64, f64),
    bbox: [f64; 4],
}

fn orient_f(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// True when floating point already proves `t` lies strictly on one side of the line through `s`.
fn clearly_apart(s: &Seg2, t: &Seg2) -> bool {
    const TOL: f64 = 1e-10;
    let o1 = orient_f(s.pf, s.qf, t.pf);
    let o2 = orient_f(s.pf, s.qf, t.qf);
    (o1 > TOL && o2 > TOL) || (o1 < -TOL && o2 < -TOL)
}

fn orient(a: &(Q, Q), b: &(Q, Q), c: &(Q, Q)) -> Q {
    (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0)
}

fn cross2(a: &(Q, Q), b: &(Q, Q)) -> Q {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn sub2(a: &(Q, Q), b: &(Q, Q)) -> (Q, Q) {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn on_segment(a: &(Q, Q), b: &(Q, Q), c: &(Q, Q)) -> bool {
    let within = |x: &Q, y: &Q, v: &Q| (x <= v && v <= y) || (y <= v && v <= x);
    within(&a.0, &b.0, &c.0) && within(&a.1, &b.1, &c.1)
}

fn project(p: &Vec3, tilt: &(Q, Q)) -> (Q, Q) {
    (&p.x + &tilt.0 * &p.z, &p.y + &tilt.1 * &p.z)
}

/// Internal outcome of a crossing search.
enum Outcome {
    Crossings(Vec<Crossing>),
    /// Projection not generic; another tilt may work.
    Retry,
}

fn crossings_for_tilt(curves: &[&Polyline3], tilt: &(Q, Q)) -> Result<Outcome, LinkingError> {
    let mut segs = Vec::new();
    for (c, line) in curves.iter().enumerate() {
        for i in 0..line.len() {
            let (a, b) = line.segment(i);
            let p = project(a, tilt);
            let qq = project(b, tilt);
            let (px, py, qx, qy) = (f(&p.0), f(&p.1), f(&qq.0), f(&qq.1));
            let bbox = [px.min(qx), px.max(qx), py.min(qy), py.max(qy)];
            segs.push(Seg2 {
                id: StrandRef { component: c, segment: i },
                p,
                q: qq,
                pz: a.z.clone(),
                qz: b.z.clone(),
                pf: (px, py),
                qf: (qx, qy),
                bbox,
            });
        }
    }
    let slack = 1e-9;
    let mut out = Vec::new();
    for (i, s) in segs.iter().enumerate() {
        for t in &segs[i + 1..] {
            if s.bbox[1] + slack < t.bbox[0]
                || t.bbox[1] + slack < s.bbox[0]
                || s.bbox[3] + slack < t.bbox[2]
                || t.bbox[3] + slack < s.bbox[2]
            {
                continue;
            }
            let same = s.id.component == t.id.component;
            let len = curves[s.id.component].len();
            let adjacent = same
                && ((s.id.segment + 1) % len == t.id.segment || (t.id.segment + 1) % len == s.id.segment);
            if adjacent {
                // consecutive segments meet at their shared vertex unless they fold back
                let (d1, d2) = (sub2(&s.q, &s.p), sub2(&t.q, &t.p));
                if cross2(&d1, &d2).is_zero() && (&d1.0 * &d2.0 + &d1.1 * &d2.1).is_negative() {
                    return Ok(Outcome::Retry);
                }
                continue;
            }
            if clearly_apart(s, t) || clearly_apart(t, s) {
                continue;
            }
            let o1 = orient(&s.p, &s.q, &t.p);
            let o2 = orient(&s.p, &s.q, &t.q);
            let o3 = orient(&t.p, &t.q, &s.p);
            let o4 = orient(&t.p, &t.q, &s.q);
            let touches = (o1.is_zero() && on_segment(&s.p, &s.q, &t.p))
                || (o2.is_zero() && on_segment(&s.p, &s.q, &t.q))
                || (o3.is_zero() && on_segment(&t.p, &t.q, &s.p))
                || (o4.is_zero() && on_segment(&t.p, &t.q, &s.q));
            if touches {
                return Ok(Outcome::Retry);
            }
            let proper = (o1.is_positive() != o2.is_positive()) && !o1.is_zero() && !o2.is_zero()
                && (o3.is_positive() != o4.is_positive()) && !o3.is_zero() && !o4.is_zero();
            if !proper {
                continue;
            }
            let a = &o3 / (&o3 - &o4);
            let b = &o1 / (&o1 - &o2);
            let zs = &s.pz + &a * (&s.qz - &s.pz);
            let zt = &t.pz + &b * (&t.qz - &t.pz);
            if zs == zt {
                return Err(LinkingError::EmbeddingDegenerate(format!(
                    "strands {:?} and {:?} meet in space",
                    s.id, t.id
                )));
            }
            let (over, under) = if zs > zt { (s, t) } else { (t, s) };
            let d_over = sub2(&over.q, &over.p);
            let d_under = sub2(&under.q, &under.p);
            let sign = if cross2(&d_over, &d_under).is_positive() { 1 } else { -1 };
            let position = (&s.p.0 + &a * (&s.q.0 - &s.p.0), &s.p.1 + &a * (&s.q.1 - &s.p.1));
            out.push(Crossing { position, over: over.id, under: under.id, sign });
        }
    }
    Ok(Outcome::Crossings(out))
}

/// Tilts tried after the requested one when a projection is not generic.
fn fallback_tilts(first: &(Q, Q)) -> Vec<(Q, Q)> {
    let mut tilts = vec![first.clone()];
    for (a, b) in [(5, -2), (-4, 3), (-6, -5), (2, 9), (7, 1), (-1, -8)] {
        tilts.push((q(a, 1000), q(b, 1000)));
    }
    tilts
}

/// Crossings among the given curves (component ids follow slice order),
/// retrying with other tilts when the projection is not generic.
pub fn crossings_among(
    curves: &[&Polyline3],
    tilt: &(Q, Q),
) -> Result<(Vec<Crossing>, (Q, Q)), LinkingError> {
    let tilts = fallback_tilts(tilt);
    for t in &tilts {
        if let Outcome::Crossings(c) = crossings_for_tilt(curves, t)? {
            return Ok((c, t.clone()));
        }
    }
    Err(LinkingError::NonGenericProjection(tilts.len()))
}

/// Signed crossings of `a` with itself (`b = None`) or with `b`.
pub fn signed_crossings(
    a: &Polyline3,
    b: Option<&Polyline3>,
    params: &EmbeddingParams,
) -> Result<Vec<Crossing>, LinkingError> {
    match b {
        None => Ok(crossings_among(&[a], &params.tilt)?.0),
        Some(b) => Ok(crossings_among(&[a, b], &params.tilt)?
            .0
            .into_iter()
            .filter(|c| c.over.component != c.under.component)
            .collect()),
    }
}

pub fn linking_number(b1: &Polyline3, b2: &Polyline3, params: &EmbeddingParams) -> Result<i64, LinkingError> {
    let total: i64 = signed_crossings(b1, Some(b2), params)?.iter().map(|c| c.sign as i64).sum();
    if total % 2 != 0 {
        return Err(LinkingError::EmbeddingDegenerate("odd number of crossings between closed curves".into()));
    }
    Ok(total / 2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkReport {
    pub l_t: HalfInt,
    pub writhe: i64,
    pub self_crossings: usize,
    pub l: i64,
    pub method_agreement: bool,
}

/// Crossings of one embedded ribbon for a single generic projection.
pub struct Diagram {
    pub ribbon: EmbeddedRibbon,
    pub crossings: Vec<Crossing>,
    pub tilt: (Q, Q),
}

pub fn diagram(asm: &Assemblage, params: &EmbeddingParams) -> Result<Diagram, LinkingError> {
    let path = build_ribbon(asm);
    let ribbon = embed(&path, asm, params)?;
    let (crossings, tilt) = crossings_among(
        &[&ribbon.centerline, &ribbon.boundary_pos, &ribbon.boundary_neg],
        &params.tilt,
    )?;
    Ok(Diagram { ribbon, crossings, tilt })
}

/// Directions (in thousandths) of the extra projections used to count centerline crossings.
const VIEW_TILTS: [(i64, i64); 12] = [
    (5, 1),
    (1, 5),
    (-1, 5),
    (-5, 1),
    (-5, -1),
    (-1, -5),
    (1, -5),
    (5, -1),
    (3, 7),
    (-3, 7),
    (-3, -7),
    (3, -7),
];

/// Writhe and crossing count of the centerline under one projection, if generic.
fn centerline_view(line: &Polyline3, tilt: &(Q, Q)) -> Result<Option<(i64, usize)>, LinkingError> {
    match crossings_for_tilt(&[line], tilt)? {
        Outcome::Retry => Ok(None),
        Outcome::Crossings(cs) => Ok(Some((cs.iter().map(|c| c.sign as i64).sum(), cs.len()))),
    }
}

/// `self_crossings` is the fewest centerline crossings seen over the primary
/// projection and a fixed family of nearby ones.
pub fn link_report(asm: &Assemblage, params: &EmbeddingParams) -> Result<LinkReport, LinkingError> {
    let d = diagram(asm, params)?;
    let mut writhe = 0i64;
    let mut self_crossings = 0usize;
    let mut between = 0i64;
    for c in &d.crossings {
        match (c.over.component, c.under.component) {
            (0, 0) => {
                writhe += c.sign as i64;
                self_crossings += 1;
            }
            (1, 2) | (2, 1) => between += c.sign as i64,
            _ => {}
        }
    }
    if between % 2 != 0 {
        return Err(LinkingError::EmbeddingDegenerate("odd number of boundary crossings".into()));
    }
    for (a, b) in VIEW_TILTS {
        if let Some((w, n)) = centerline_view(&d.ribbon.centerline, &(q(a, 1000), q(b, 1000)))? {
            if w != writhe {
                return Err(LinkingError::EmbeddingDegenerate(format!(
                    "writhe {w} under tilt ({a},{b})/1000 differs from {writhe}"
                )));
            }
            self_crossings = self_crossings.min(n);
        }
    }
    let l = between / 2;
    let l_t = twist(asm).l_t;
    let method_agreement = l_t.halves() as i64 + 2 * writhe == 2 * l;
    Ok(LinkReport { l_t, writhe, self_crossings, l, method_agreement })
}

/// Line-oriented dump: `v <component> <index> <x> <y> <z>` per vertex, then
/// `c <over> <under> <sign> <x> <y>` per crossing, strands as `component:segment`.
pub fn debug_export(d: &Diagram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "tilt {} {}", d.tilt.0, d.tilt.1);
    let curves = [&d.ribbon.centerline, &d.ribbon.boundary_pos, &d.ribbon.boundary_neg];
    for (c, line) in curves.iter().enumerate() {
        for (i, p) in line.points.iter().enumerate() {
            let [x, y, z] = p.to_f64();
            let _ = writeln!(out, "v {c} {i} {x:.6} {y:.6} {z:.6}");
        }
    }
    for c in &d.crossings {
        let _ = writeln!(
            out,
            "c {}:{} {}:{} {:+} {:.6} {:.6}",
            c.over.component,
            c.over.segment,
            c.under.component,
            c.under.segment,
            c.sign,
            f(&c.position.0),
            f(&c.position.1)
        );
    }
    out
}

impl fmt::Display for LinkReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L={} Lt={} writhe={} selfcrossings={}",
            self.l, self.l_t, self.writhe, self.self_crossings
        )
    }
}

/// Number of wraps around each side, for inspection.
pub fn wrap_counts(path: &RibbonPath, asm: &Assemblage) -> BTreeMap<(Cell, Direction), usize> {
    let cells = asm.sequence().cells();
    let mut out = BTreeMap::new();
    for e in &path.events {
        let key = match *e {
            RibbonEvent::Bounce { tile, side } => (cells[tile], side),
            RibbonEvent::FlapSkip { prev, side, flaps, .. } if flaps % 2 == 1 => (cells[prev], side),
            _ => continue,
        };
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assemblage::parse_assemblage;

    fn square(cx: i64, cy: i64, z: i64, upright: bool) -> Polyline3 {
        let pts = [(-1, -1), (1, -1), (1, 1), (-1, 1)];
        Polyline3::new(
            pts.iter()
                .map(|&(a, b)| {
                    if upright {
                        Vec3::new(q(cx + a, 1), q(cy, 1), q(z + b, 1))
                    } else {
                        Vec3::new(q(cx + a, 1), q(cy + b, 1), q(z, 1))
                    }
                })
                .collect(),
        )
    }

    #[test]
    fn unlinked_and_hopf() {
        let p = EmbeddingParams::default();
        let a = square(0, 0, 0, false);
        let far = square(10, 0, 0, false);
        assert!(signed_crossings(&a, Some(&far), &p).unwrap().is_empty());
        assert_eq!(linking_number(&a, &far, &p).unwrap(), 0);
        let hopf = square(1, 0, 0, true);
        let cs = signed_crossings(&a, Some(&hopf), &p).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].sign, cs[1].sign);
        assert_eq!(linking_number(&a, &hopf, &p).unwrap().abs(), 1);
        // reversing one component negates the linking number
        let mut rev = hopf.clone();
        rev.points.reverse();
        assert_eq!(linking_number(&a, &rev, &p).unwrap(), -linking_number(&a, &hopf, &p).unwrap());
    }

    #[test]
    fn right_handed_crossing_is_positive() {
        // over strand from (-1,-1) to (1,1) above, under from (1,-1) to (-1,1)
        let over = Polyline3::new(vec![
            Vec3::new(q(-1, 1), q(-1, 1), q(1, 1)),
            Vec3::new(q(1, 1), q(1, 1), q(1, 1)),
            Vec3::new(q(0, 1), q(5, 1), q(1, 1)),
        ]);
        let under = Polyline3::new(vec![
            Vec3::new(q(1, 1), q(-1, 1), q(0, 1)),
            Vec3::new(q(-1, 1), q(1, 1), q(0, 1)),
            Vec3::new(q(0, 1), q(-5, 1), q(0, 1)),
        ]);
        let cs = signed_crossings(&over, Some(&under), &EmbeddingParams::default()).unwrap();
        let first = cs.iter().find(|c| c.over.segment == 0 && c.under.segment == 0).unwrap();
        assert_eq!(first.sign, 1);
    }

    #[test]
    fn rectangle_is_unlinked() {
        let a = parse_assemblage("sla E E E N W W W S").unwrap();
        let r = link_report(&a, &EmbeddingParams::default()).unwrap();
        assert_eq!(r.self_crossings, 0);
        assert_eq!(r.l, 0);
        assert!(r.method_agreement);
    }

    #[test]
    fn decimal_parameters() {
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("-3"), Some(q(-3, 1)));
        assert_eq!(parse_rational("1/8"), Some(q(1, 8)));
        assert_eq!(parse_rational("2e-3"), Some(q(1, 500)));
        assert_eq!(parse_rational("abc"), None);
        let mut p = EmbeddingParams::default();
        p.apply_override("face_offset=0.1").unwrap();
        assert_eq!(p.face_offset, q(1, 10));
        assert!(p.apply_override("nope=1").is_err());
    }
}
