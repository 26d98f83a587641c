//! Halfspace-representation polyhedra: construction, hyperplane splitting,
//! emptiness and interior tests.
//!
//! A [`Polyhedron`] is `{x : A x ≤ b}` with every nonzero row of `A` scaled
//! to unit Euclidean norm, so row residuals read directly as distances.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg_lp::{chebyshev_center, Chebyshev};

/// Rows with Euclidean norm below this are treated as all-zero.
const ZERO_ROW_TOL: f64 = 1e-12;

/// Default interior-radius threshold below which a region counts as a
/// lower-dimensional boundary.
pub const DEFAULT_R_MIN: f64 = 1e-8;

/// `{x : A x ≤ b}` with unit-norm rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawPolyhedron", into = "RawPolyhedron")]
pub struct Polyhedron {
    a: Array2<f64>,
    b: Array1<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPolyhedron {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl TryFrom<RawPolyhedron> for Polyhedron {
    type Error = Error;
    fn try_from(raw: RawPolyhedron) -> Result<Self> {
        let m = raw.a.len();
        let n = raw.a.first().map_or(0, |r| r.len());
        if raw.a.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("ragged rows in polyhedron matrix A".into()));
        }
        if raw.b.len() != m {
            return Err(Error::DimMismatch(format!(
                "polyhedron has {m} rows in A but {} entries in b",
                raw.b.len()
            )));
        }
        let a = Array2::from_shape_vec((m, n), raw.a.concat())
            .map_err(|e| Error::Invalid(e.to_string()))?;
        Polyhedron::new(a, Array1::from_vec(raw.b))
    }
}

impl From<Polyhedron> for RawPolyhedron {
    fn from(p: Polyhedron) -> Self {
        RawPolyhedron {
            a: p.a.rows().into_iter().map(|r| r.to_vec()).collect(),
            b: p.b.to_vec(),
        }
    }
}

impl Polyhedron {
    /// Builds `{x : A x ≤ b}`, normalizing each nonzero row to unit norm.
    pub fn new(a: Array2<f64>, b: Array1<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimMismatch(format!(
                "A has {} rows but b has {} entries",
                a.nrows(),
                b.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid(
                "polyhedron data contains non-finite entries".into(),
            ));
        }
        let mut p = Polyhedron { a, b };
        p.normalize();
        Ok(p)
    }

    fn normalize(&mut self) {
        for i in 0..self.a.nrows() {
            let norm = self.a.row(i).dot(&self.a.row(i)).sqrt();
            if norm > ZERO_ROW_TOL && (norm - 1.0).abs() > f64::EPSILON {
                let inv = 1.0 / norm;
                for v in self.a.row_mut(i) {
                    *v *= inv;
                }
                self.b[i] *= inv;
            }
        }
    }

    /// Axis-aligned box `lo ≤ x ≤ hi` as 2n halfspaces.
    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Result<Self> {
        BoundingBox::new(lo.to_vec(), hi.to_vec()).map(|b| b.to_polyhedron())
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn b(&self) -> &Array1<f64> {
        &self.b
    }

    /// True iff `A x ≤ b + tol` componentwise.
    pub fn contains(&self, x: &Array1<f64>, tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let res = self.a.dot(x) - &self.b;
        res.iter().all(|&r| r <= tol)
    }

    /// Largest violation of `A x ≤ b` at `x` (≤ 0 means inside).
    pub fn max_violation(&self, x: &Array1<f64>) -> f64 {
        let res = self.a.dot(x) - &self.b;
        res.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Chebyshev center/radius; `Empty` when the polyhedron has no point.
    pub fn chebyshev(&self) -> Result<Chebyshev> {
        chebyshev_center(&self.a, &self.b)
    }

    /// True iff the inscribed-ball radius exceeds `r_min`.
    pub fn is_full_dim(&self, r_min: f64) -> Result<bool> {
        Ok(match self.chebyshev()? {
            Chebyshev::Center { radius, .. } => radius > r_min,
            Chebyshev::Empty => false,
        })
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(matches!(self.chebyshev()?, Chebyshev::Empty))
    }

    /// Appends the halfspace `wᵀx ≤ rhs` (normalized).
    pub fn with_halfspace(&self, w: &Array1<f64>, rhs: f64) -> Result<Polyhedron> {
        if w.len() != self.dim() {
            return Err(Error::DimMismatch(format!(
                "halfspace normal has {} entries for a {}-dimensional polyhedron",
                w.len(),
                self.dim()
            )));
        }
        let m = self.num_rows();
        let mut a = Array2::zeros((m + 1, self.dim()));
        let mut b = Array1::zeros(m + 1);
        a.slice_mut(ndarray::s![..m, ..]).assign(&self.a);
        b.slice_mut(ndarray::s![..m]).assign(&self.b);
        a.row_mut(m).assign(w);
        b[m] = rhs;
        Polyhedron::new(a, b)
    }

    /// Cuts by the hyperplane `wᵀx + beta = 0`, returning
    /// `(P ∩ {wᵀx + beta ≤ 0}, P ∩ {wᵀx + beta ≥ 0})`.
    ///
    /// With `w = 0` the hyperplane degenerates: the side consistent with the
    /// sign of `beta` is `P` itself and the other side is explicitly empty
    /// (`beta = 0` counts as the "≤" side, matching the strict-inequality
    /// activation rule).
    pub fn split(&self, w: &Array1<f64>, beta: f64) -> Result<(Polyhedron, Polyhedron)> {
        if w.len() != self.dim() {
            return Err(Error::DimMismatch(format!(
                "split normal has {} entries for a {}-dimensional polyhedron",
                w.len(),
                self.dim()
            )));
        }
        let norm = w.dot(w).sqrt();
        if norm <= ZERO_ROW_TOL {
            let empty = self.explicit_empty();
            return Ok(if beta > 0.0 {
                (empty, self.clone())
            } else {
                (self.clone(), empty)
            });
        }
        let le = self.with_halfspace(w, -beta)?;
        let ge = self.with_halfspace(&w.mapv(|v| -v), beta)?;
        Ok((le, ge))
    }

    /// Same dimension, no points: the contradiction `0ᵀx ≤ −1`.
    fn explicit_empty(&self) -> Polyhedron {
        let a = Array2::zeros((1, self.dim()));
        let b = Array1::from_elem(1, -1.0);
        Polyhedron { a, b }
    }

    /// Intersection by row concatenation.
    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch(format!(
                "intersecting polyhedra of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        let m = self.num_rows() + other.num_rows();
        let mut a = Array2::zeros((m, self.dim()));
        let mut b = Array1::zeros(m);
        a.slice_mut(ndarray::s![..self.num_rows(), ..]).assign(&self.a);
        a.slice_mut(ndarray::s![self.num_rows().., ..]).assign(&other.a);
        b.slice_mut(ndarray::s![..self.num_rows()]).assign(&self.b);
        b.slice_mut(ndarray::s![self.num_rows()..]).assign(&other.b);
        Polyhedron::new(a, b)
    }

    /// Drops rows that are implied by the others (LP test per row). Only
    /// used on export paths; correctness never depends on irredundancy.
    pub fn reduce(&self) -> Result<Polyhedron> {
        let mut keep: Vec<usize> = (0..self.num_rows()).collect();
        let mut i = 0;
        while i < keep.len() {
            if keep.len() == 1 {
                break;
            }
            let row = keep[i];
            let others: Vec<usize> = keep.iter().copied().filter(|&r| r != row).collect();
            let mut a = Array2::zeros((others.len(), self.dim()));
            let mut b = Array1::zeros(others.len());
            for (k, &r) in others.iter().enumerate() {
                a.row_mut(k).assign(&self.a.row(r));
                b[k] = self.b[r];
            }
            // maximize a_rowᵀ x over the others; redundant iff max ≤ b_row
            let cost = self.a.row(row).mapv(|v| -v);
            let lp = crate::linalg_lp::LinearProgram::new(cost, a, b)?;
            let redundant = match crate::linalg_lp::solve_lp(&lp)? {
                crate::linalg_lp::LpOutcome::Optimal { value, .. } => {
                    -value <= self.b[row] + 1e-9
                }
                _ => false,
            };
            if redundant {
                keep.remove(i);
            } else {
                i += 1;
            }
        }
        let mut a = Array2::zeros((keep.len(), self.dim()));
        let mut b = Array1::zeros(keep.len());
        for (k, &r) in keep.iter().enumerate() {
            a.row_mut(k).assign(&self.a.row(r));
            b[k] = self.b[r];
        }
        Polyhedron::new(a, b)
    }
}

/// Axis-aligned box, the working domain for all region analysis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundingBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimMismatch(format!(
                "box has {} lower bounds but {} upper bounds",
                lo.len(),
                hi.len()
            )));
        }
        if lo.is_empty() {
            return Err(Error::Invalid("box must have at least one axis".into()));
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(l, h)| !l.is_finite() || !h.is_finite() || l >= h)
        {
            return Err(Error::Invalid(
                "box bounds must be finite with lo < hi on every axis".into(),
            ));
        }
        Ok(BoundingBox { lo, hi })
    }

    /// The same interval on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        BoundingBox::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn contains(&self, x: &Array1<f64>, tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(i, &v)| v >= self.lo[i] - tol && v <= self.hi[i] + tol)
    }

    /// Maps a point of the unit cube into the box.
    pub fn lerp(&self, unit: &[f64]) -> Array1<f64> {
        Array1::from_iter(
            unit.iter()
                .enumerate()
                .map(|(i, &t)| self.lo[i] + t * (self.hi[i] - self.lo[i])),
        )
    }

    pub fn to_polyhedron(&self) -> Polyhedron {
        let n = self.dim();
        let mut a = Array2::zeros((2 * n, n));
        let mut b = Array1::zeros(2 * n);
        for i in 0..n {
            a[[2 * i, i]] = 1.0;
            b[2 * i] = self.hi[i];
            a[[2 * i + 1, i]] = -1.0;
            b[2 * i + 1] = -self.lo[i];
        }
        Polyhedron { a, b }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr1;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn interval(lo: f64, hi: f64) -> Polyhedron {
        Polyhedron::from_bounds(&[lo], &[hi]).unwrap()
    }

    #[test]
    fn split_interval_at_one() {
        // [0,3] split by x − 1 = 0
        let p = interval(0.0, 3.0);
        let (le, ge) = p.split(&arr1(&[1.0]), -1.0).unwrap();
        assert!(le.contains(&arr1(&[0.5]), 1e-9));
        assert!(!le.contains(&arr1(&[1.5]), 1e-9));
        assert!(ge.contains(&arr1(&[2.0]), 1e-9));
        assert!(!ge.contains(&arr1(&[0.5]), 1e-9));
        // shared boundary point belongs to both
        assert!(le.contains(&arr1(&[1.0]), 1e-9));
        assert!(ge.contains(&arr1(&[1.0]), 1e-9));
    }

    #[test]
    fn split_missing_the_box_leaves_one_side_empty() {
        // [0,1]² split by x₁ − 2 = 0: everything on the "≤" side
        let p = Polyhedron::from_bounds(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let (le, ge) = p.split(&arr1(&[1.0, 0.0]), -2.0).unwrap();
        assert!(!le.is_empty().unwrap());
        assert!(le.is_full_dim(1e-8).unwrap());
        assert!(!ge.is_full_dim(1e-8).unwrap());
    }

    #[test]
    fn split_at_eq13_breakpoints() {
        // [0,3] at x = 2/3, then the right part at x = 1
        let p = interval(0.0, 3.0);
        let (left, right) = p.split(&arr1(&[1.0]), -2.0 / 3.0).unwrap();
        let (mid, rest) = right.split(&arr1(&[1.0]), -1.0).unwrap();
        for (piece, inside, outside) in [
            (&left, 0.3, 0.9),
            (&mid, 0.8, 1.5),
            (&rest, 2.0, 0.8),
        ] {
            assert!(piece.contains(&arr1(&[inside]), 1e-9));
            assert!(!piece.contains(&arr1(&[outside]), 1e-9));
        }
    }

    #[test]
    fn zero_normal_split() {
        let p = interval(0.0, 1.0);
        let (le, ge) = p.split(&arr1(&[0.0]), 2.0).unwrap();
        assert!(le.is_empty().unwrap());
        assert!(!ge.is_empty().unwrap());
        let (le, ge) = p.split(&arr1(&[0.0]), -2.0).unwrap();
        assert!(!le.is_empty().unwrap());
        assert!(ge.is_empty().unwrap());
        let (le, ge) = p.split(&arr1(&[0.0]), 0.0).unwrap();
        assert!(!le.is_empty().unwrap());
        assert!(ge.is_empty().unwrap());
    }

    #[test]
    fn full_dim_checks() {
        let square = Polyhedron::from_bounds(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(square.is_full_dim(1e-8).unwrap());
        let slab = Polyhedron::from_bounds(&[0.0], &[1.0])
            .unwrap()
            .with_halfspace(&arr1(&[1.0]), 0.0)
            .unwrap()
            .with_halfspace(&arr1(&[-1.0]), 0.0)
            .unwrap();
        assert!(!slab.is_full_dim(1e-8).unwrap());
        assert!(interval(2.0 / 3.0, 1.0).is_full_dim(1e-8).unwrap());
    }

    #[test]
    fn containment() {
        let square = Polyhedron::from_bounds(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(square.contains(&arr1(&[0.5, 0.5]), 1e-9));
        assert!(!square.contains(&arr1(&[2.0, 0.0]), 1e-9));
        assert!(square.contains(&arr1(&[1.0, 1.0]), 1e-9));
    }

    #[test]
    fn reduce_drops_implied_rows() {
        let p = interval(0.0, 1.0)
            .with_halfspace(&arr1(&[1.0]), 5.0)
            .unwrap();
        assert_eq!(p.num_rows(), 3);
        let r = p.reduce().unwrap();
        assert_eq!(r.num_rows(), 2);
        assert!(r.contains(&arr1(&[0.5]), 1e-9));
        assert!(!r.contains(&arr1(&[1.5]), 1e-9));
    }

    #[test]
    fn normalization_is_idempotent() {
        let a = ndarray::arr2(&[[3.0, 4.0], [0.0, 0.0], [-2.0, 0.0]]);
        let b = arr1(&[10.0, 1.0, 4.0]);
        let once = Polyhedron::new(a, b).unwrap();
        let twice = Polyhedron::new(once.a().clone(), once.b().clone()).unwrap();
        assert_eq!(once.a(), twice.a());
        assert_eq!(once.b(), twice.b());
        // 3-4-5 row scaled to unit norm
        assert!((once.a()[[0, 0]] - 0.6).abs() < 1e-15);
        assert!((once.b()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn split_coverage_on_random_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bx = BoundingBox::cube(2, -3.0, 3.0).unwrap();
        for _ in 0..40 {
            let p = bx
                .to_polyhedron()
                .with_halfspace(
                    &arr1(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]),
                    rng.random_range(-1.0..1.0),
                )
                .unwrap();
            let w = arr1(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
            let beta = rng.random_range(-2.0..2.0);
            let (le, ge) = p.split(&w, beta).unwrap();
            for _ in 0..50 {
                let x = arr1(&[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]);
                let in_p = p.contains(&x, 1e-9);
                let in_parts = le.contains(&x, 1e-9) || ge.contains(&x, 1e-9);
                assert_eq!(in_p, in_parts, "coverage mismatch at {x}");
            }
        }
    }

    proptest! {
        #[test]
        fn normalize_rows_have_unit_norm(
            rows in proptest::collection::vec(
                proptest::collection::vec(-10.0f64..10.0, 3), 1..6),
            rhs in proptest::collection::vec(-10.0f64..10.0, 6)
        ) {
            let m = rows.len();
            let a = Array2::from_shape_vec((m, 3), rows.concat()).unwrap();
            let b = Array1::from_vec(rhs[..m].to_vec());
            let p = Polyhedron::new(a, b).unwrap();
            for i in 0..m {
                let n = p.a().row(i).dot(&p.a().row(i)).sqrt();
                prop_assert!(n < 1e-10 || (n - 1.0).abs() < 1e-12);
            }
        }
    }
}
