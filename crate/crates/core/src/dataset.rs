//! Validated datasets and their chord-slope / discrete-curvature profile.

use alloc::vec::Vec;
use core::fmt;

/// Relative threshold below which a slope change counts as zero curvature.
pub const DEFAULT_CURVATURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetError {
    /// Two points share the same abscissa.
    DuplicateX(f64),
    /// Fewer than two points.
    TooFewPoints(usize),
    /// A coordinate is NaN or infinite; `index` is the position in the input.
    NonFinite { index: usize },
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::DuplicateX(x) => write!(f, "duplicate abscissa x = {x}"),
            DatasetError::TooFewPoints(m) => {
                write!(f, "dataset needs at least 2 points, got {m}")
            }
            DatasetError::NonFinite { index } => {
                write!(f, "non-finite coordinate in point {index}")
            }
        }
    }
}

impl core::error::Error for DatasetError {}

/// Points `(x_i, y_i)` sorted by strictly increasing `x`, at least two of them.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<(f64, f64)>,
}

impl Dataset {
    /// Sorts the points by abscissa and validates them.
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self, DatasetError> {
        if let Some(index) = points
            .iter()
            .position(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(DatasetError::NonFinite { index });
        }
        if points.len() < 2 {
            return Err(DatasetError::TooFewPoints(points.len()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(DatasetError::DuplicateX(w[0].0));
        }
        Ok(Self { points })
    }

    pub fn from_xy(xs: &[f64], ys: &[f64]) -> Result<Self, DatasetError> {
        assert_eq!(xs.len(), ys.len(), "abscissae and ordinates differ in length");
        Self::new(xs.iter().copied().zip(ys.iter().copied()).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; a dataset holds at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn x(&self, i: usize) -> f64 {
        self.points[i].0
    }

    pub fn y(&self, i: usize) -> f64 {
        self.points[i].1
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    /// Chord slope between knots `i` and `i + 1`.
    pub fn slope(&self, i: usize) -> f64 {
        let (x0, y0) = self.points[i];
        let (x1, y1) = self.points[i + 1];
        (y1 - y0) / (x1 - x0)
    }

    pub fn slope_profile(&self) -> SlopeProfile {
        self.slope_profile_with_tol(DEFAULT_CURVATURE_TOL)
    }

    pub fn slope_profile_with_tol(&self, curvature_tol: f64) -> SlopeProfile {
        let slopes: Vec<f64> = (0..self.len() - 1).map(|i| self.slope(i)).collect();
        let curvatures = slopes
            .windows(2)
            .map(|w| Curvature::classify(w[0], w[1], curvature_tol))
            .collect();
        SlopeProfile { slopes, curvatures }
    }
}

/// Sign of the discrete second derivative at an interior knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Curvature {
    Concave,
    Flat,
    Convex,
}

impl Curvature {
    /// Classifies the slope change `prev -> next` with a relative tolerance.
    pub fn classify(prev: f64, next: f64, tol: f64) -> Self {
        let scale = 1.0_f64.max(prev.abs()).max(next.abs());
        let d = next - prev;
        if d.abs() <= tol * scale {
            Curvature::Flat
        } else if d > 0.0 {
            Curvature::Convex
        } else {
            Curvature::Concave
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Curvature::Concave => -1,
            Curvature::Flat => 0,
            Curvature::Convex => 1,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Curvature::Concave => Curvature::Convex,
            Curvature::Flat => Curvature::Flat,
            Curvature::Convex => Curvature::Concave,
        }
    }
}

/// Chord slopes `s_0..s_{m-2}` and curvature signs at the interior knots `1..m-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeProfile {
    pub slopes: Vec<f64>,
    /// `curvatures[k]` belongs to knot `k + 1`.
    pub curvatures: Vec<Curvature>,
}

impl SlopeProfile {
    /// Curvature at knot `k`; `None` for the two end knots.
    pub fn curvature_at(&self, k: usize) -> Option<Curvature> {
        if k == 0 {
            None
        } else {
            self.curvatures.get(k - 1).copied()
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        self.curvatures.iter().map(|c| c.sign()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn sorts_on_construction() {
        let d = Dataset::new(vec![(1.0, 1.0), (0.0, 0.0)]).unwrap();
        assert_eq!(d.points(), &[(0.0, 0.0), (1.0, 1.0)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            Dataset::new(vec![(0.0, 0.0), (0.0, 1.0)]),
            Err(DatasetError::DuplicateX(0.0))
        );
        assert_eq!(
            Dataset::new(vec![(0.0, 0.0)]),
            Err(DatasetError::TooFewPoints(1))
        );
        assert_eq!(
            Dataset::new(vec![(0.0, 0.0), (1.0, f64::NAN)]),
            Err(DatasetError::NonFinite { index: 1 })
        );
    }

    #[test]
    fn profile_examples() {
        let d = Dataset::from_xy(&[0., 1., 2., 3.], &[0., 0., 1., 3.]).unwrap();
        let p = d.slope_profile();
        assert_eq!(p.slopes, vec![0.0, 1.0, 2.0]);
        assert_eq!(p.signs(), vec![1, 1]);

        let d = Dataset::from_xy(&[0., 1., 2., 3.], &[0., 1., 0., 1.]).unwrap();
        let p = d.slope_profile();
        assert_eq!(p.slopes, vec![1.0, -1.0, 1.0]);
        assert_eq!(p.signs(), vec![-1, 1]);

        let d = Dataset::from_xy(&[0., 1., 2.], &[1., 3., 5.]).unwrap();
        let p = d.slope_profile();
        assert_eq!(p.slopes, vec![2.0, 2.0]);
        assert_eq!(p.curvatures, vec![Curvature::Flat]);
    }

    #[test]
    fn two_points_have_no_curvature() {
        let d = Dataset::from_xy(&[0., 1.], &[0., 1.]).unwrap();
        let p = d.slope_profile();
        assert_eq!(p.slopes.len(), 1);
        assert!(p.curvatures.is_empty());
        assert_eq!(p.curvature_at(0), None);
        assert_eq!(p.curvature_at(1), None);
    }

    #[test]
    fn tolerance_absorbs_rounding_on_collinear_data() {
        // 0.1 steps are not exact in binary; the slopes differ in the last bits
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 0.7).collect();
        let p = Dataset::from_xy(&xs, &ys).unwrap().slope_profile();
        assert!(p.curvatures.iter().all(|c| *c == Curvature::Flat));
    }
}
