//! Quadriculated planar disks: parsing, validation and cell structure.
//!
//! Cells live on the integer lattice. A cell `(x, y)` is black when `x + y`
//! is odd and white otherwise; the same parity rule extends to cubes
//! `(x, y, z)` so colorings agree across every layer of a cylinder.
//!
//! Cells are stored in column-major order (`x` first, then `y`); that order
//! fixes the bit positions of every plug bitset built on top of a disk.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DiskError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn of(x: i64, y: i64) -> Color {
        if (x + y).rem_euclid(2) == 1 {
            Color::Black
        } else {
            Color::White
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i64,
    pub y: i64,
    pub color: Color,
}

impl Cell {
    pub fn new(x: i64, y: i64) -> Cell {
        Cell {
            x,
            y,
            color: Color::of(x, y),
        }
    }
}

/// A validated, balanced, simply connected quadriculated disk.
#[derive(Clone, PartialEq, Eq)]
pub struct Disk {
    cells: Vec<Cell>,
    index: HashMap<(i64, i64), usize>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    nontrivial: bool,
}

impl fmt::Debug for Disk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Disk({} cells)\n{}", self.cells.len(), self.render())
    }
}

impl Disk {
    /// Builds a disk from cell coordinates, validating every structural invariant.
    pub fn from_cells<I>(coords: I) -> Result<Disk, DiskError>
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        let set: BTreeSet<(i64, i64)> = coords.into_iter().collect();
        if set.is_empty() {
            return Err(DiskError::Empty);
        }
        let white = set
            .iter()
            .filter(|&&(x, y)| Color::of(x, y) == Color::White)
            .count();
        let black = set.len() - white;
        if white != black {
            return Err(DiskError::Unbalanced { white, black });
        }

        // BTreeSet order on (x, y) is column-major.
        let cells: Vec<Cell> = set.iter().map(|&(x, y)| Cell::new(x, y)).collect();
        let index: HashMap<(i64, i64), usize> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| ((c.x, c.y), i))
            .collect();

        let mut adjacency = vec![Vec::new(); cells.len()];
        let mut edges = Vec::new();
        for (i, c) in cells.iter().enumerate() {
            for (dx, dy) in [(1, 0), (0, 1)] {
                if let Some(&j) = index.get(&(c.x + dx, c.y + dy)) {
                    edges.push((i.min(j), i.max(j)));
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        edges.sort_unstable();

        let components = count_components(&adjacency);
        if components != 1 {
            return Err(DiskError::Disconnected { components });
        }

        let euler = euler_characteristic(&set);
        let pinches = pinch_points(&set);
        if euler != 1 || pinches != 0 {
            return Err(DiskError::NotSimplyConnected { euler, pinches });
        }

        let nontrivial = cells.len() >= 6 && adjacency.iter().any(|a| a.len() >= 3);
        Ok(Disk {
            cells,
            index,
            adjacency,
            edges,
            nontrivial,
        })
    }

    /// Axis-aligned `width × height` rectangle with its lower corner at the origin.
    pub fn rectangle(width: i64, height: i64) -> Result<Disk, DiskError> {
        Disk::from_cells((0..width).flat_map(|x| (0..height).map(move |y| (x, y))))
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, i: usize) -> Cell {
        self.cells[i]
    }

    pub fn index_of(&self, x: i64, y: i64) -> Option<usize> {
        self.index.get(&(x, y)).copied()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Unordered edges `(i, j)` with `i < j`, sorted; edge ids index this list.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).ok()
    }

    pub fn is_nontrivial(&self) -> bool {
        self.nontrivial
    }

    /// Bitmask of the white cells (bit `i` is cell `i`); only meaningful for
    /// disks with at most 64 cells.
    pub fn white_mask(&self) -> u64 {
        self.mask_where(|c| c.color == Color::White)
    }

    pub fn black_mask(&self) -> u64 {
        self.mask_where(|c| c.color == Color::Black)
    }

    pub fn full_mask(&self) -> u64 {
        if self.cells.len() >= 64 {
            u64::MAX
        } else {
            (1u64 << self.cells.len()) - 1
        }
    }

    fn mask_where(&self, pred: impl Fn(&Cell) -> bool) -> u64 {
        self.cells
            .iter()
            .enumerate()
            .filter(|(i, c)| *i < 64 && pred(c))
            .fold(0u64, |m, (i, _)| m | (1u64 << i))
    }

    pub fn bounds(&self) -> (i64, i64, i64, i64) {
        let min_x = self.cells.iter().map(|c| c.x).min().unwrap_or(0);
        let max_x = self.cells.iter().map(|c| c.x).max().unwrap_or(0);
        let min_y = self.cells.iter().map(|c| c.y).min().unwrap_or(0);
        let max_y = self.cells.iter().map(|c| c.y).max().unwrap_or(0);
        (min_x, max_x, min_y, max_y)
    }

    /// Canonical ASCII form: line `y` (from 0) lists columns `0..=max_x`,
    /// `#` for cells and `.` for holes, each line newline-terminated.
    pub fn render(&self) -> String {
        let (_, max_x, _, max_y) = self.bounds();
        let mut out = String::new();
        for y in 0..=max_y.max(0) {
            let line: String = (0..=max_x.max(0))
                .map(|x| {
                    if self.index.contains_key(&(x, y)) {
                        '#'
                    } else {
                        '.'
                    }
                })
                .collect();
            out.push_str(line.trim_end_matches('.'));
            out.push('\n');
        }
        out
    }

    /// Whether `other` is this disk shifted by some lattice vector.
    pub fn translation_equivalent(&self, other: &Disk) -> bool {
        if self.n_cells() != other.n_cells() {
            return false;
        }
        let (ax, _, ay, _) = self.bounds();
        let (bx, _, by, _) = other.bounds();
        let norm = |d: &Disk, ox: i64, oy: i64| -> BTreeSet<(i64, i64)> {
            d.cells.iter().map(|c| (c.x - ox, c.y - oy)).collect()
        };
        norm(self, ax, ay) == norm(other, bx, by)
    }
}

impl fmt::Display for Disk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Parses an ASCII grid: `#` marks a cell, `.` or space a hole. Line `k` of the
/// text is row `y = k`, character `j` is column `x = j`.
pub fn parse_disk(text: &str) -> Result<Disk, DiskError> {
    let mut coords = Vec::new();
    for (y, line) in text.lines().enumerate() {
        for (x, ch) in line.trim_end_matches('\r').chars().enumerate() {
            match ch {
                '#' => coords.push((x as i64, y as i64)),
                '.' | ' ' => {}
                other => {
                    return Err(DiskError::BadCharacter {
                        ch: other,
                        line: y + 1,
                        column: x + 1,
                    })
                }
            }
        }
    }
    Disk::from_cells(coords)
}

/// Mirror image across a vertical axis inside the same bounding box.
pub fn reflect_disk(d: &Disk) -> Disk {
    let (min_x, max_x, _, _) = d.bounds();
    Disk::from_cells(d.cells.iter().map(|c| (min_x + max_x - c.x, c.y)))
        .expect("mirror of a valid disk is valid")
}

fn count_components(adjacency: &[Vec<usize>]) -> usize {
    let mut seen = vec![false; adjacency.len()];
    let mut components = 0;
    for start in 0..adjacency.len() {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            for &j in &adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    components
}

/// V − E + F of the closed square complex.
fn euler_characteristic(cells: &BTreeSet<(i64, i64)>) -> i64 {
    let mut vertices = HashSet::new();
    let mut edges = HashSet::new();
    for &(x, y) in cells {
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            vertices.insert((x + dx, y + dy));
        }
        // horizontal edges keyed by left endpoint, vertical by bottom endpoint
        edges.insert((x, y, 0));
        edges.insert((x, y + 1, 0));
        edges.insert((x, y, 1));
        edges.insert((x + 1, y, 1));
    }
    vertices.len() as i64 - edges.len() as i64 + cells.len() as i64
}

/// Lattice vertices where exactly two diagonally opposite squares meet.
fn pinch_points(cells: &BTreeSet<(i64, i64)>) -> usize {
    let mut candidates = HashSet::new();
    for &(x, y) in cells {
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            candidates.insert((x + dx, y + dy));
        }
    }
    candidates
        .into_iter()
        .filter(|&(vx, vy)| {
            let sw = cells.contains(&(vx - 1, vy - 1));
            let se = cells.contains(&(vx, vy - 1));
            let nw = cells.contains(&(vx - 1, vy));
            let ne = cells.contains(&(vx, vy));
            (sw && ne && !se && !nw) || (se && nw && !sw && !ne)
        })
        .count()
}
