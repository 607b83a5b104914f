//! Geometry of the square grid: ℓ1 diamonds, dihedral symmetry and the
//! packing-coloring validity check.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point of ℤ². Ordering is lexicographic on `(x, y)`, which is the
/// canonical vertex order used for variable numbering and serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub x: i32,
    pub y: i32,
}

impl Vertex {
    pub const ORIGIN: Vertex = Vertex { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Vertex { x, y }
    }

    /// ℓ1 norm, i.e. the distance to the origin.
    pub fn norm(self) -> u32 {
        self.x.unsigned_abs() + self.y.unsigned_abs()
    }

    pub fn offset(self, dx: i32, dy: i32) -> Vertex {
        Vertex::new(self.x + dx, self.y + dy)
    }

    /// The vertex together with its four orthogonal neighbors, center first.
    pub fn plus_shape(self) -> [Vertex; 5] {
        [
            self,
            self.offset(1, 0),
            self.offset(-1, 0),
            self.offset(0, 1),
            self.offset(0, -1),
        ]
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(i32, i32)> for Vertex {
    fn from((x, y): (i32, i32)) -> Self {
        Vertex::new(x, y)
    }
}

pub fn l1_distance(u: Vertex, v: Vertex) -> u32 {
    u.x.abs_diff(v.x) + u.y.abs_diff(v.y)
}

/// Closed-form size of the diamond of radius `r`: `2r² + 2r + 1`.
pub fn diamond_size(r: u32) -> usize {
    let r = r as usize;
    2 * r * r + 2 * r + 1
}

/// The ℓ1 ball of radius `r` around the origin, vertices in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diamond {
    radius: u32,
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
}

impl Diamond {
    pub fn new(radius: u32) -> Self {
        let r = radius as i32;
        let mut vertices = Vec::with_capacity(diamond_size(radius));
        for x in -r..=r {
            let span = r - x.abs();
            for y in -span..=span {
                vertices.push(Vertex::new(x, y));
            }
        }
        let index = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        Diamond {
            radius,
            vertices,
            index,
        }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.norm() <= self.radius
    }

    /// Position of `v` in the canonical order.
    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.index.get(&v).copied()
    }
}

pub fn diamond_vertices(r: u32) -> Diamond {
    Diamond::new(r)
}

/// The orbit of `v` under the eight symmetries of the square that fix the
/// origin.
pub fn dihedral_images(v: Vertex) -> BTreeSet<Vertex> {
    DIHEDRAL.iter().map(|g| g(v)).collect()
}

/// The eight elements of the dihedral group acting on ℤ².
pub const DIHEDRAL: [fn(Vertex) -> Vertex; 8] = [
    |v| Vertex::new(v.x, v.y),
    |v| Vertex::new(-v.x, v.y),
    |v| Vertex::new(v.x, -v.y),
    |v| Vertex::new(-v.x, -v.y),
    |v| Vertex::new(v.y, v.x),
    |v| Vertex::new(-v.y, v.x),
    |v| Vertex::new(v.y, -v.x),
    |v| Vertex::new(-v.y, -v.x),
];

/// `x ≥ 0 ∧ y ≥ x`: the representative octant kept by symmetry breaking.
pub fn in_fundamental_octant(v: Vertex) -> bool {
    v.x >= 0 && v.y >= v.x
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("vertex {0} lies outside the diamond of radius {1}")]
    OutsideDiamond(Vertex, u32),
    #[error("vertex {0} has no color")]
    Uncolored(Vertex),
    #[error("vertex {0} is colored twice")]
    DuplicateVertex(Vertex),
    #[error("color {color} of vertex {vertex} is outside 1..={max}")]
    ColorOutOfRange { vertex: Vertex, color: u32, max: u32 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid coloring json: {0}")]
    Json(String),
}

/// A total assignment of colors to the vertices of a diamond.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    diamond: Diamond,
    colors: Vec<u32>,
}

/// Outcome of [`verify_coloring`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// Two vertices `u < v` share `color` at distance at most `color`.
    Violation { u: Vertex, v: Vertex, color: u32 },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

impl Coloring {
    /// Builds a coloring from per-vertex colors listed in canonical order.
    pub fn from_colors(radius: u32, colors: Vec<u32>) -> Result<Self, GridError> {
        let diamond = Diamond::new(radius);
        if colors.len() != diamond.len() {
            let missing = diamond.vertices()[colors.len().min(diamond.len() - 1)];
            return Err(GridError::Uncolored(missing));
        }
        for (&v, &c) in diamond.vertices().iter().zip(&colors) {
            if c == 0 {
                return Err(GridError::Uncolored(v));
            }
        }
        Ok(Coloring { diamond, colors })
    }

    pub fn from_map(radius: u32, map: &BTreeMap<Vertex, u32>) -> Result<Self, GridError> {
        let diamond = Diamond::new(radius);
        if let Some(&v) = map.keys().find(|v| !diamond.contains(**v)) {
            return Err(GridError::OutsideDiamond(v, radius));
        }
        let colors = diamond
            .vertices()
            .iter()
            .map(|v| map.get(v).copied().ok_or(GridError::Uncolored(*v)))
            .collect::<Result<Vec<_>, _>>()?;
        Coloring::from_colors(radius, colors)
    }

    pub fn radius(&self) -> u32 {
        self.diamond.radius()
    }

    pub fn diamond(&self) -> &Diamond {
        &self.diamond
    }

    pub fn color(&self, v: Vertex) -> Option<u32> {
        self.diamond.index_of(v).map(|i| self.colors[i])
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn max_color(&self) -> u32 {
        self.colors.iter().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, u32)> + '_ {
        self.diamond.vertices().iter().copied().zip(self.colors.iter().copied())
    }

    /// Rejects colors above `k`.
    pub fn check_range(&self, k: u32) -> Result<(), GridError> {
        match self.iter().find(|&(_, c)| c > k) {
            Some((vertex, color)) => Err(GridError::ColorOutOfRange {
                vertex,
                color,
                max: k,
            }),
            None => Ok(()),
        }
    }

    /// Image of the coloring under a symmetry of the diamond.
    pub fn transformed(&self, g: fn(Vertex) -> Vertex) -> Coloring {
        let mut colors = vec![0; self.colors.len()];
        for (v, c) in self.iter() {
            let i = self.diamond.index_of(g(v)).expect("symmetries preserve the diamond");
            colors[i] = c;
        }
        Coloring {
            diamond: self.diamond.clone(),
            colors,
        }
    }

    /// One `x y color` line per vertex, canonical order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, c) in self.iter() {
            out.push_str(&format!("{} {} {}\n", v.x, v.y, c));
        }
        out
    }

    /// Parses the line format; the radius is recovered from the largest norm.
    pub fn from_text(text: &str) -> Result<Self, GridError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| GridError::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            let [x, y, c] = nums[..] else {
                return Err(GridError::Parse {
                    line: i + 1,
                    msg: format!("expected 3 fields, found {}", nums.len()),
                });
            };
            if c < 1 || c > u32::MAX as i64 {
                return Err(GridError::Parse {
                    line: i + 1,
                    msg: format!("bad color {c}"),
                });
            }
            let v = Vertex::new(x as i32, y as i32);
            if map.insert(v, c as u32).is_some() {
                return Err(GridError::DuplicateVertex(v));
            }
        }
        let radius = map.keys().map(|v| v.norm()).max().unwrap_or(0);
        Coloring::from_map(radius, &map)
    }

    pub fn to_json(&self) -> String {
        let doc = ColoringJson {
            radius: self.radius(),
            cells: self.iter().map(|(v, c)| [v.x as i64, v.y as i64, c as i64]).collect(),
        };
        serde_json::to_string(&doc).expect("coloring serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GridError> {
        let doc: ColoringJson =
            serde_json::from_str(text).map_err(|e| GridError::Json(e.to_string()))?;
        let mut map = BTreeMap::new();
        for [x, y, c] in doc.cells {
            let v = Vertex::new(x as i32, y as i32);
            if c < 1 {
                return Err(GridError::Uncolored(v));
            }
            if map.insert(v, c as u32).is_some() {
                return Err(GridError::DuplicateVertex(v));
            }
        }
        Coloring::from_map(doc.radius, &map)
    }
}

#[derive(Serialize, Deserialize)]
struct ColoringJson {
    radius: u32,
    cells: Vec<[i64; 3]>,
}

/// Checks the packing condition: equal colors `c` must be more than `c`
/// apart. Returns the lexicographically smallest violation `(u, v, c)`.
pub fn verify_coloring(col: &Coloring) -> Verdict {
    let verts = col.diamond.vertices();
    // Canonical order is sorted, so the first hit in (u, v) order is minimal.
    for (i, &u) in verts.iter().enumerate() {
        let cu = col.colors[i];
        let reach = cu as i32;
        for (j, &v) in verts.iter().enumerate().skip(i + 1) {
            if v.x - u.x > reach {
                break;
            }
            if col.colors[j] == cu && l1_distance(u, v) <= cu {
                return Verdict::Violation { u, v, color: cu };
            }
        }
    }
    Verdict::Valid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_sizes() {
        assert_eq!(diamond_vertices(0).vertices(), &[Vertex::ORIGIN]);
        assert_eq!(diamond_vertices(3).len(), 25);
        assert_eq!(diamond_vertices(6).len(), 85);
        for r in 0..20 {
            assert_eq!(diamond_vertices(r).len(), diamond_size(r));
        }
    }

    #[test]
    fn diamond_is_sorted_and_indexed() {
        let d = diamond_vertices(4);
        assert!(d.vertices().windows(2).all(|w| w[0] < w[1]));
        for (i, &v) in d.vertices().iter().enumerate() {
            assert_eq!(d.index_of(v), Some(i));
        }
        assert_eq!(d.index_of(Vertex::new(5, 0)), None);
    }

    #[test]
    fn distances() {
        assert_eq!(l1_distance(Vertex::ORIGIN, Vertex::ORIGIN), 0);
        assert_eq!(l1_distance((1, 2).into(), (-1, 3).into()), 3);
        assert_eq!(l1_distance((5, 0).into(), (-5, 0).into()), 10);
    }

    #[test]
    fn orbits() {
        assert_eq!(dihedral_images(Vertex::ORIGIN).len(), 1);
        let axis: BTreeSet<Vertex> = [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .into_iter()
            .map(Vertex::from)
            .collect();
        assert_eq!(dihedral_images((1, 0).into()), axis);
        let generic = dihedral_images((1, 2).into());
        assert_eq!(generic.len(), 8);
        for v in [(2, 1), (-1, 2), (-2, -1)] {
            assert!(generic.contains(&v.into()));
        }
    }

    #[test]
    fn octant() {
        assert!(in_fundamental_octant(Vertex::ORIGIN));
        assert!(in_fundamental_octant((2, 3).into()));
        assert!(!in_fundamental_octant((3, 2).into()));
        let d5 = diamond_vertices(5);
        let kept = d5.vertices().iter().filter(|v| in_fundamental_octant(**v)).count();
        assert_eq!(kept, 12);
        assert_eq!(d5.len() - kept, 49);
    }

    /// Left coloring of the D(3, 7, 3) illustration, rows from y = 3 down.
    pub(crate) fn fig2_left() -> Coloring {
        let rows: [(i32, &[u32]); 7] = [
            (3, &[1]),
            (2, &[1, 2, 1]),
            (1, &[1, 6, 1, 7, 1]),
            (0, &[1, 2, 1, 3, 1, 2, 1]),
            (-1, &[1, 4, 1, 5, 1]),
            (-2, &[1, 2, 1]),
            (-3, &[1]),
        ];
        let mut map = BTreeMap::new();
        for (y, cols) in rows {
            let half = cols.len() as i32 / 2;
            for (i, &c) in cols.iter().enumerate() {
                map.insert(Vertex::new(i as i32 - half, y), c);
            }
        }
        Coloring::from_map(3, &map).unwrap()
    }

    #[test]
    fn figure_coloring_is_valid() {
        let col = fig2_left();
        assert_eq!(col.color(Vertex::ORIGIN), Some(3));
        assert_eq!(col.max_color(), 7);
        assert_eq!(verify_coloring(&col), Verdict::Valid);
    }

    #[test]
    fn close_twos_are_rejected() {
        let mut colors = vec![1; diamond_size(2)];
        let d = diamond_vertices(2);
        let a = d.index_of((0, -1).into()).unwrap();
        let b = d.index_of((1, 0).into()).unwrap();
        colors[a] = 2;
        colors[b] = 2;
        let col = Coloring::from_colors(2, colors).unwrap();
        // the ones are adjacent too; the smallest violation is reported
        let Verdict::Violation { u, v, color } = verify_coloring(&col) else {
            panic!("expected a violation");
        };
        assert!(u < v && l1_distance(u, v) <= color);
    }

    #[test]
    fn two_twos_at_distance_two() {
        // centre 3, the rest distinct colors so only the twos clash
        let d = diamond_vertices(1);
        let mut colors = vec![0; 5];
        for (i, v) in d.vertices().iter().enumerate() {
            colors[i] = match (v.x, v.y) {
                (0, 0) => 3,
                (-1, 0) => 2,
                (1, 0) => 2,
                (0, 1) => 4,
                _ => 5,
            };
        }
        let col = Coloring::from_colors(1, colors).unwrap();
        assert_eq!(
            verify_coloring(&col),
            Verdict::Violation {
                u: (-1, 0).into(),
                v: (1, 0).into(),
                color: 2
            }
        );
    }

    #[test]
    fn all_distinct_on_d1() {
        let colors = vec![1, 2, 3, 4, 5];
        let col = Coloring::from_colors(1, colors).unwrap();
        // colors are distinct so no pair can clash
        assert!(verify_coloring(&col).is_valid());
    }

    #[test]
    fn partial_colorings_are_rejected() {
        let mut map = BTreeMap::new();
        map.insert(Vertex::ORIGIN, 1);
        assert!(matches!(
            Coloring::from_map(1, &map),
            Err(GridError::Uncolored(_))
        ));
        map.insert(Vertex::new(4, 0), 1);
        assert!(matches!(
            Coloring::from_map(1, &map),
            Err(GridError::OutsideDiamond(..))
        ));
    }

    #[test]
    fn text_and_json_formats() {
        let col = fig2_left();
        let text = col.to_text();
        assert!(text.starts_with("-3 0 1\n-2 -1 1\n"));
        assert_eq!(Coloring::from_text(&text).unwrap(), col);
        let json = col.to_json();
        assert_eq!(Coloring::from_json(&json).unwrap(), col);
        assert!(Coloring::from_text("0 0\n").is_err());
    }

    #[test]
    fn symmetric_images_stay_valid() {
        let col = fig2_left();
        for g in DIHEDRAL {
            assert!(verify_coloring(&col.transformed(g)).is_valid());
        }
    }
}
