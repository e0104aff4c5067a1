//! Brute-force enumeration of word classes and assemblage classes, using
//! explicit tile coordinates only.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rubiks_magic::assemblage::admissible_level_assignments;
use rubiks_magic::{enumerate_assemblages, enumerate_canonical, is_admissible_assemblage};

const STEPS: [(i32, i32); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
const LETTERS: [char; 4] = ['E', 'N', 'W', 'S'];

/// The eight integer orthogonal matrices, row-major.
fn isometries() -> Vec<[i32; 4]> {
    let mut out = Vec::new();
    for &(a, b, c, d) in &[(1, 0, 0, 1), (0, -1, 1, 0), (-1, 0, 0, -1), (0, 1, -1, 0)] {
        out.push([a, b, c, d]);
        // followed by the reflection y -> -y
        out.push([a, b, -c, -d]);
    }
    out
}

fn apply(m: &[i32; 4], v: (i32, i32)) -> (i32, i32) {
    (m[0] * v.0 + m[1] * v.1, m[2] * v.0 + m[3] * v.1)
}

/// Whether the image of the (1,1) diagonal is the other diagonal.
fn swaps_diagonals(m: &[i32; 4]) -> bool {
    let (x, y) = apply(m, (1, 1));
    x != y
}

fn letter_of(v: (i32, i32)) -> u8 {
    STEPS.iter().position(|&s| s == v).expect("unit step") as u8
}

pub fn word_string(w: &[u8]) -> String {
    w.iter().map(|&d| LETTERS[d as usize]).collect()
}

fn closed(w: &[u8]) -> bool {
    let (x, y) = w.iter().fold((0, 0), |(x, y), &d| (x + STEPS[d as usize].0, y + STEPS[d as usize].1));
    x == 0 && y == 0
}

/// Tile positions, `T_0` at the origin; `w[j]` leads from `T_j` to `T_{j+1}`.
fn positions(w: &[u8]) -> Vec<(i32, i32)> {
    let mut p = (0, 0);
    let mut out = vec![p];
    for &d in &w[..w.len() - 1] {
        p = (p.0 + STEPS[d as usize].0, p.1 + STEPS[d as usize].1);
        out.push(p);
    }
    out
}

/// A configuration described tile by tile.
#[derive(Clone)]
struct Chain {
    pos: Vec<(i32, i32)>,
    slash: Vec<bool>,
    level: Vec<u32>,
}

impl Chain {
    fn word(&self) -> Vec<u8> {
        let n = self.pos.len();
        (0..n)
            .map(|j| {
                let (a, b) = (self.pos[j], self.pos[(j + 1) % n]);
                letter_of((b.0 - a.0, b.1 - a.1))
            })
            .collect()
    }

    /// Every relabelling of the chain combined with every plane isometry.
    fn images(&self) -> Vec<Chain> {
        let n = self.pos.len();
        let mut out = Vec::new();
        for m in isometries() {
            for start in 0..n {
                for reversed in [false, true] {
                    let src = |k: usize| if reversed { (start + n - k) % n } else { (start + k) % n };
                    out.push(Chain {
                        pos: (0..n).map(|k| apply(&m, self.pos[src(k)])).collect(),
                        slash: (0..n).map(|k| self.slash[src(k)] != swaps_diagonals(&m)).collect(),
                        level: (0..n).map(|k| self.level[src(k)]).collect(),
                    });
                }
            }
        }
        out
    }

    /// Reflected in a horizontal plane: stacks reversed, grooves of the other face up.
    fn turned_over(&self) -> Chain {
        let mut height: BTreeMap<(i32, i32), u32> = BTreeMap::new();
        for p in &self.pos {
            *height.entry(*p).or_default() += 1;
        }
        Chain {
            pos: self.pos.clone(),
            slash: self.slash.iter().map(|s| !s).collect(),
            level: self.pos.iter().zip(&self.level).map(|(p, &l)| height[p] + 1 - l).collect(),
        }
    }

    /// Word and levels once the first tile is made a slash tile.
    fn key(&self) -> (Vec<u8>, Vec<u32>) {
        let c = if self.slash[0] { self.clone() } else { self.turned_over() };
        assert!(c.slash[0]);
        (c.word(), c.level)
    }
}

fn chain(w: &[u8], levels: &[u32]) -> Chain {
    Chain {
        pos: positions(w),
        slash: (0..w.len()).map(|i| i % 2 == 0).collect(),
        level: levels.to_vec(),
    }
}

pub fn all_closed_words(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for code in 0..4usize.pow(n as u32) {
        let w: Vec<u8> = (0..n).map(|k| ((code >> (2 * k)) & 3) as u8).collect();
        if closed(&w) {
            out.push(w);
        }
    }
    out
}

/// Classes of closed words under relabelling and isometries, keyed by their
/// smallest member in the order E < N < W < S.
pub fn word_classes(n: usize) -> BTreeMap<Vec<u8>, usize> {
    let mut classes: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for w in all_closed_words(n) {
        let c = chain(&w, &vec![1; n]);
        let min = c.images().iter().map(Chain::word).min().unwrap();
        *classes.entry(min).or_default() += 1;
    }
    classes
}

/// Level vectors that put a permutation of `1..=k` on every cell of height k.
fn all_stackings(w: &[u8]) -> Vec<Vec<u32>> {
    let pos = positions(w);
    let mut out = vec![vec![0u32; w.len()]];
    let mut cells: BTreeMap<(i32, i32), Vec<usize>> = BTreeMap::new();
    for (i, p) in pos.iter().enumerate() {
        cells.entry(*p).or_default().push(i);
    }
    for tiles in cells.values() {
        let mut next = Vec::new();
        for partial in &out {
            for perm in permutations(tiles.len()) {
                let mut l = partial.clone();
                for (&t, &v) in tiles.iter().zip(&perm) {
                    l[t] = v;
                }
                next.push(l);
            }
        }
        out = next;
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for slot in 0..k {
            let mut q = p.clone();
            q.insert(slot, k as u32);
            out.push(q);
        }
    }
    out
}

pub fn check_assemblage_classes(n: usize) -> Result<(usize, usize), String> {
    let mut total = 0;
    let mut seqs = 0;
    for s in enumerate_canonical(n).map_err(|e| e.to_string())? {
        let w: Vec<u8> = s.symbols().iter().map(|d| d.index()).collect();
        let admissible: Vec<Vec<u32>> =
            all_stackings(&w).into_iter().filter(|l| is_admissible_assemblage(&s, l)).collect();
        let mut lib_all = admissible_level_assignments(&s);
        lib_all.sort();
        let mut sorted = admissible.clone();
        sorted.sort();
        if lib_all != sorted {
            return Err(format!("{s}: admissible stackings differ"));
        }
        // merge by explicit images that keep the word
        let mut classes: BTreeSet<Vec<Vec<u32>>> = BTreeSet::new();
        for l in &admissible {
            let orbit: BTreeSet<Vec<u32>> = chain(&w, l)
                .images()
                .iter()
                .map(Chain::key)
                .filter(|(word, _)| *word == w)
                .map(|(_, levels)| levels)
                .collect();
            if !orbit.iter().all(|o| admissible.contains(o)) {
                return Err(format!("{s}: orbit leaves the admissible set"));
            }
            classes.insert(orbit.into_iter().collect());
        }
        let lib = enumerate_assemblages(&s);
        if lib.len() != classes.len() {
            return Err(format!("{s}: {} representatives, {} classes", lib.len(), classes.len()));
        }
        let mut hit = BTreeSet::new();
        for a in &lib {
            let class = classes.iter().position(|c| c.contains(&a.levels().to_vec()));
            match class {
                Some(c) if hit.insert(c) => {}
                Some(_) => return Err(format!("{s}: two representatives in one class")),
                None => return Err(format!("{s}: {a} lies in no class")),
            }
        }
        total += lib.len();
        seqs += 1;
    }
    Ok((seqs, total))
}

/// Oracle class representatives, spelled out, in increasing order.
pub fn canonical_words(n: usize) -> Vec<String> {
    word_classes(n).keys().map(|w| word_string(w)).collect()
}
