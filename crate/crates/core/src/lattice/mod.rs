//! Bravais lattice generation inside an image-sized window, and the
//! non-negative factorization of the resulting point matrix.
//!
//! The lattice basis is drawn from the triple-LCG stream, every lattice
//! point `n1*v0 + n2*v1` falling inside `[0, L1) x [0, L2)` becomes one row
//! `(x, y)` of the point matrix, and the left factor of its rank-2 NMF is the
//! key of the text layer.

mod matrix;
mod nmf;

pub use matrix::Matrix;
pub use nmf::{
    multiplicative_step, nmf_from, nmf_multiplicative, parse_w, reconstruction_error,
    regularized_step, serialize_w, FactorPair, NmfConfig, NmfRun, MONOTONE_SLACK,
};

use thiserror::Error;

use crate::prng::{PrngError, TlcgState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("lattice window must be at least 1x1, got {width}x{height}")]
    EmptyWindow { width: u64, height: u64 },
    #[error("basis vectors {v0:?} and {v1:?} are degenerate")]
    DegenerateBasis { v0: [i64; 2], v1: [i64; 2] },
    #[error("no usable basis after {0} consecutive draws")]
    DegenerateVectors(usize),
    #[error("cannot factorize an empty matrix")]
    EmptyMatrix,
    #[error("matrix to factorize has a negative or non-finite entry")]
    NegativeInput,
    #[error("matrix shapes do not match: {0}")]
    ShapeMismatch(String),
    #[error("invalid NMF configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("OEA key line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Prng(#[from] PrngError),
}

/// Width `L1` and height `L2` of the clipping window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    width: u64,
    height: u64,
}

impl WindowSpec {
    pub fn new(width: u64, height: u64) -> Result<Self, LatticeError> {
        if width == 0 || height == 0 {
            return Err(LatticeError::EmptyWindow { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> u64 {
        self.width
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    /// Largest absolute basis component drawn for this window:
    /// `max(4, ceil(max(L1, L2) / 25))`.
    pub fn component_bound(&self) -> i64 {
        let longest = self.width.max(self.height);
        (longest.div_ceil(25) as i64).max(4)
    }
}

/// Primitive translation vectors of a 2D lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeVectors {
    v0: [i64; 2],
    v1: [i64; 2],
}

impl LatticeVectors {
    pub fn new(v0: [i64; 2], v1: [i64; 2]) -> Result<Self, LatticeError> {
        let det = v0[0] as i128 * v1[1] as i128 - v0[1] as i128 * v1[0] as i128;
        if det == 0 {
            return Err(LatticeError::DegenerateBasis { v0, v1 });
        }
        Ok(Self { v0, v1 })
    }

    pub fn v0(&self) -> [i64; 2] {
        self.v0
    }

    pub fn v1(&self) -> [i64; 2] {
        self.v1
    }

    pub fn determinant(&self) -> i128 {
        self.v0[0] as i128 * self.v1[1] as i128 - self.v0[1] as i128 * self.v1[0] as i128
    }

    /// Euclidean lengths of `v0` and `v1`.
    pub fn sizes(&self) -> (f64, f64) {
        let norm = |v: [i64; 2]| (v[0] as f64).hypot(v[1] as f64);
        (norm(self.v0), norm(self.v1))
    }

    /// Angle between the vectors, in `(0, pi)`.
    pub fn obliquity(&self) -> f64 {
        let dot = (self.v0[0] * self.v1[0] + self.v0[1] * self.v1[1]) as f64;
        let (g0, g1) = self.sizes();
        (dot / (g0 * g1)).clamp(-1.0, 1.0).acos()
    }
}

/// Maximum consecutive rejected candidate bases before giving up.
pub const MAX_BASIS_REJECTIONS: usize = 64;

/// Draws a basis from the triple-LCG stream, components uniform in
/// `[-B, B]` with `B` from [`WindowSpec::component_bound`].
pub fn derive_lattice_vectors(
    tlcg: &mut TlcgState,
    window: WindowSpec,
) -> Result<LatticeVectors, LatticeError> {
    let bound = window.component_bound();
    // The stream range is half-open, hence `bound + 1`.
    derive_lattice_vectors_with(|| Ok(tlcg.next_in(-bound, bound + 1)?))
}

/// Same as [`derive_lattice_vectors`] with an arbitrary component source,
/// called four times per candidate in the order `v0.x, v0.y, v1.x, v1.y`.
pub fn derive_lattice_vectors_with<F>(mut draw: F) -> Result<LatticeVectors, LatticeError>
where
    F: FnMut() -> Result<i64, LatticeError>,
{
    for _ in 0..MAX_BASIS_REJECTIONS {
        let v0 = [draw()?, draw()?];
        let v1 = [draw()?, draw()?];
        if v0 == [0, 0] || v1 == [0, 0] {
            continue;
        }
        if let Ok(vectors) = LatticeVectors::new(v0, v1) {
            return Ok(vectors);
        }
    }
    Err(LatticeError::DegenerateVectors(MAX_BASIS_REJECTIONS))
}

/// Lattice points inside a window, one `(x, y)` row each, sorted by `(y, x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointMatrix {
    points: Vec<[u64; 2]>,
}

impl PointMatrix {
    pub fn points(&self) -> &[[u64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The points as an `m x 2` real matrix.
    pub fn to_matrix(&self) -> Matrix {
        let data = self
            .points
            .iter()
            .flat_map(|p| [p[0] as f64, p[1] as f64])
            .collect();
        Matrix::from_vec(self.points.len(), 2, data).expect("m x 2 data")
    }
}

/// Enumerates every lattice point with `0 <= x < L1` and `0 <= y < L2`.
///
/// The index range of `n2` comes from mapping the window corners through the
/// inverse basis (with a margin of 2); for each `n2` the admissible `n1`
/// values are bracketed from the two coordinate constraints and then checked
/// exactly in integer arithmetic.
pub fn generate_lattice_points(vectors: &LatticeVectors, window: WindowSpec) -> PointMatrix {
    let [ax, ay] = vectors.v0;
    let [bx, by] = vectors.v1;
    let det = vectors.determinant() as f64;
    let (l1, l2) = (window.width as i64, window.height as i64);

    let corners = [
        (0.0, 0.0),
        (l1 as f64, 0.0),
        (0.0, l2 as f64),
        (l1 as f64, l2 as f64),
    ];
    let n2_of = |(x, y): (f64, f64)| (ax as f64 * y - ay as f64 * x) / det;
    let (n2_lo, n2_hi) = corners
        .iter()
        .map(|&c| n2_of(c))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    let n2_lo = n2_lo.floor() as i64 - 2;
    let n2_hi = n2_hi.ceil() as i64 + 2;

    let mut points = Vec::new();
    for n2 in n2_lo..=n2_hi {
        let bx_n2 = bx * n2;
        let by_n2 = by * n2;
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (coef, offset, limit) in [(ax, bx_n2, l1), (ay, by_n2, l2)] {
            if coef == 0 {
                if offset < 0 || offset >= limit {
                    lo = f64::INFINITY;
                }
                continue;
            }
            // 0 <= coef*n1 + offset < limit
            let a = (-offset) as f64 / coef as f64;
            let b = (limit - offset) as f64 / coef as f64;
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
        if lo > hi {
            continue;
        }
        for n1 in (lo.floor() as i64 - 1)..=(hi.ceil() as i64 + 1) {
            let x = n1 * ax + bx_n2;
            let y = n1 * ay + by_n2;
            if (0..l1).contains(&x) && (0..l2).contains(&y) {
                points.push([x as u64, y as u64]);
            }
        }
    }
    points.sort_unstable_by_key(|p| (p[1], p[0]));
    points.dedup();
    PointMatrix { points }
}
