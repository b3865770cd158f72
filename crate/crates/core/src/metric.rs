//! Dense pseudometrics, validation, and shortest-path completion of partially
//! specified distance graphs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default finite stand-in for an infinite distance.
pub const DEFAULT_BIG: f64 = 1e6;

/// Relative tolerance applied to the metric axioms.
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// Symmetric, row-major distance matrix over `size` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    size: usize,
    entries: Vec<f64>,
    big_value: f64,
}

impl DistanceMatrix {
    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            entries: vec![0.0; size * size],
            big_value: DEFAULT_BIG,
        }
    }

    /// Builds a matrix from rows. Only the shape is checked here; use
    /// [`validate_pseudometric`] for the axioms.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut entries = Vec::with_capacity(size * size);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != size {
                return Err(Error::NonSquare {
                    row,
                    len: r.len(),
                    expected: size,
                });
            }
            entries.extend_from_slice(r);
        }
        Ok(Self {
            size,
            entries,
            big_value: DEFAULT_BIG,
        })
    }

    /// Builds a matrix by evaluating `f` on every ordered pair.
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(size * size);
        for x in 0..size {
            for y in 0..size {
                entries.push(f(x, y));
            }
        }
        Self {
            size,
            entries,
            big_value: DEFAULT_BIG,
        }
    }

    /// Euclidean (L2) distances between coordinate vectors.
    pub fn euclidean(points: &[Vec<f64>]) -> Self {
        Self::from_fn(points.len(), |x, y| {
            if x == y {
                return 0.0;
            }
            points[x]
                .iter()
                .zip(&points[y])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
    }

    pub fn with_big_value(mut self, big_value: f64) -> Self {
        self.big_value = big_value;
        self
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.size + y]
    }

    pub fn big_value(&self) -> f64 {
        self.big_value
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.entries[x * self.size..(x + 1) * self.size]
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Largest entry strictly below the big value.
    pub fn max_finite_entry(&self) -> f64 {
        self.entries
            .iter()
            .copied()
            .filter(|&v| v < self.big_value)
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            size: self.size,
            entries: self.entries.iter().map(|v| v * s).collect(),
            big_value: self.big_value * s,
        }
    }

    /// Restriction to the given points, in the given order.
    pub fn submatrix(&self, points: &[usize]) -> Self {
        Self {
            size: points.len(),
            entries: points
                .iter()
                .flat_map(|&x| points.iter().map(move |&y| (x, y)))
                .map(|(x, y)| self.get(x, y))
                .collect(),
            big_value: self.big_value,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.size).map(|x| self.row(x).to_vec()).collect()
    }
}

/// Checks nonnegativity, zero diagonal, symmetry and the triangle inequality,
/// each up to `1e-9` times the largest entry. Reports the first violation in
/// row-major order.
pub fn validate_pseudometric(m: &DistanceMatrix) -> Result<()> {
    let n = m.size();
    let tol = METRIC_TOLERANCE * m.max_entry().max(1.0);
    for x in 0..n {
        for y in 0..n {
            let v = m.get(x, y);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NegativeEntry { x, y, value: v });
            }
        }
    }
    for x in 0..n {
        let v = m.get(x, x);
        if v.abs() > tol {
            return Err(Error::NonzeroDiagonal { x, value: v });
        }
    }
    for x in 0..n {
        for y in (x + 1)..n {
            if (m.get(x, y) - m.get(y, x)).abs() > tol {
                return Err(Error::AsymmetricEntry { x, y });
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let direct = m.get(x, y);
            for z in 0..n {
                if direct > m.get(x, z) + m.get(z, y) + tol {
                    return Err(Error::TriangleViolation { x, z, y });
                }
            }
        }
    }
    Ok(())
}

/// Completes a partially specified distance graph into the largest
/// pseudometric dominated by the given edges: every pair gets its
/// shortest-path length. Pairs with no connecting path get `big_value`
/// (a direct edge of that length is assumed), or fail if it is `None`.
pub fn complete_metric(
    edges: &[(usize, usize, f64)],
    points: usize,
    big_value: Option<f64>,
) -> Result<DistanceMatrix> {
    let mut given = vec![None::<f64>; points * points];
    for &(x, y, w) in edges {
        for p in [x, y] {
            if p >= points {
                return Err(Error::PointOutOfRange { point: p, points });
            }
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::NegativeEntry { x, y, value: w });
        }
        for (a, b) in [(x, y), (y, x)] {
            match given[a * points + b] {
                Some(prev) if prev != w => return Err(Error::InconsistentEdges { x, y }),
                _ => given[a * points + b] = Some(w),
            }
        }
    }

    let mut dist = vec![f64::INFINITY; points * points];
    for x in 0..points {
        dist[x * points + x] = 0.0;
    }
    for (idx, g) in given.iter().enumerate() {
        if let Some(w) = *g {
            let (x, y) = (idx / points, idx % points);
            if x != y {
                dist[idx] = dist[idx].min(w);
            }
        }
    }
    floyd_warshall(&mut dist, points);

    if dist.iter().any(|v| v.is_infinite()) {
        let Some(big) = big_value else {
            let idx = dist.iter().position(|v| v.is_infinite()).unwrap();
            return Err(Error::DisconnectedWithNoBig {
                x: idx / points,
                y: idx % points,
            });
        };
        // Unreachable pairs become direct edges of length `big`; re-close so
        // the triangle inequality holds across components.
        for v in dist.iter_mut().filter(|v| v.is_infinite()) {
            *v = big;
        }
        floyd_warshall(&mut dist, points);
    }

    for x in 0..points {
        for y in 0..points {
            if let Some(w) = given[x * points + y] {
                let shortest = dist[x * points + y];
                if x != y && shortest < w {
                    return Err(Error::NonMetricEdge {
                        x,
                        y,
                        given: w,
                        shortest,
                    });
                }
            }
        }
    }

    Ok(DistanceMatrix {
        size: points,
        entries: dist,
        big_value: big_value.unwrap_or(DEFAULT_BIG),
    })
}

fn floyd_warshall(dist: &mut [f64], n: usize) {
    for via in 0..n {
        for x in 0..n {
            let dxv = dist[x * n + via];
            if dxv.is_infinite() {
                continue;
            }
            for y in 0..n {
                let through = dxv + dist[via * n + y];
                if through < dist[x * n + y] {
                    dist[x * n + y] = through;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_matrix_is_valid() {
        assert!(validate_pseudometric(&DistanceMatrix::zeros(4)).is_ok());
    }

    #[test]
    fn reports_first_triangle_violation() {
        let m = DistanceMatrix::from_rows(&[
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(
            validate_pseudometric(&m),
            Err(Error::TriangleViolation { x: 0, z: 1, y: 2 })
        );
    }

    #[test]
    fn rejects_shape_sign_and_symmetry_errors() {
        assert!(matches!(
            DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0]]),
            Err(Error::NonSquare { row: 1, .. })
        ));
        let neg = DistanceMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(matches!(
            validate_pseudometric(&neg),
            Err(Error::NegativeEntry { x: 0, y: 1, .. })
        ));
        let asym = DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(
            validate_pseudometric(&asym),
            Err(Error::AsymmetricEntry { x: 0, y: 1 })
        );
    }

    #[test]
    fn single_zero_edge_gives_zero_matrix() {
        let m = complete_metric(&[(0, 1, 0.0)], 2, None).unwrap();
        assert_eq!(m.to_rows(), vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn two_triangle_completion() {
        let (p, big) = (10.0, 1e6);
        let edges = [
            (0, 1, 1.0),
            (0, 2, p),
            (1, 2, p),
            (2, 3, big),
            (3, 4, p),
            (3, 5, p),
            (4, 5, 1.0),
        ];
        let m = complete_metric(&edges, 6, Some(big)).unwrap();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(0, 2), 10.0);
        assert_eq!(m.get(2, 3), 1e6);
        assert_eq!(m.get(0, 3), 10.0 + 1e6);
        assert_eq!(m.get(0, 5), 10.0 + 1e6 + 10.0);
        validate_pseudometric(&m).unwrap();
    }

    #[test]
    fn completion_errors() {
        assert_eq!(
            complete_metric(&[(0, 1, 1.0), (1, 0, 2.0)], 2, None),
            Err(Error::InconsistentEdges { x: 1, y: 0 })
        );
        assert_eq!(
            complete_metric(&[(0, 1, 1.0)], 3, None),
            Err(Error::DisconnectedWithNoBig { x: 0, y: 2 })
        );
        assert!(matches!(
            complete_metric(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)], 3, None),
            Err(Error::NonMetricEdge { x: 0, y: 2, .. })
        ));
    }

    #[test]
    fn disconnected_components_get_big_distance() {
        let m = complete_metric(&[(0, 1, 2.0), (2, 3, 1.0)], 4, Some(100.0)).unwrap();
        assert_eq!(m.get(0, 2), 100.0);
        assert_eq!(m.get(1, 3), 100.0);
        validate_pseudometric(&m).unwrap();
    }

    proptest! {
        #[test]
        fn completion_is_always_a_pseudometric(
            points in 2usize..9,
            raw in proptest::collection::vec((0usize..9, 0usize..9, 0.0f64..50.0), 0..30),
        ) {
            // keep the first length of each unordered pair so the edge list is consistent
            let mut seen = std::collections::HashSet::new();
            let edges: Vec<_> = raw
                .into_iter()
                .map(|(x, y, w)| (x % points, y % points, w))
                .filter(|&(x, y, _)| x != y && seen.insert((x.min(y), x.max(y))))
                .collect();
            match complete_metric(&edges, points, Some(1e3)) {
                Ok(m) => prop_assert!(validate_pseudometric(&m).is_ok()),
                Err(Error::NonMetricEdge { .. }) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
