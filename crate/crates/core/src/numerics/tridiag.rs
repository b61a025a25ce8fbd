//! Tridiagonal solves (Thomas algorithm) and the cyclic variant.

/// LU factors of a tridiagonal matrix, reusable for many right-hand sides.
///
/// Row `i` reads `lower[i-1] x[i-1] + diag[i] x[i] + upper[i] x[i+1]`.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    upper_scaled: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl Tridiagonal {
    /// Factor without pivoting. Returns `None` on a zero pivot.
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Option<Self> {
        let n = diag.len();
        assert!(n >= 1 && lower.len() + 1 == n && upper.len() + 1 == n);
        let mut upper_scaled = vec![0.0; n.saturating_sub(1)];
        let mut inv_pivot = vec![0.0; n];
        let mut pivot = diag[0];
        for i in 0..n {
            if i > 0 {
                pivot = diag[i] - lower[i - 1] * upper_scaled[i - 1];
            }
            if pivot == 0.0 || !pivot.is_finite() {
                return None;
            }
            inv_pivot[i] = 1.0 / pivot;
            if i + 1 < n {
                upper_scaled[i] = upper[i] * inv_pivot[i];
            }
        }
        Some(Self {
            lower: lower.to_vec(),
            upper_scaled,
            inv_pivot,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrite `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i - 1] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper_scaled[i] * rhs[i + 1];
        }
    }
}

/// Solve a periodic tridiagonal system by Sherman-Morrison.
///
/// `top_right` is the entry at `(0, n-1)`, `bottom_left` the one at `(n-1, 0)`.
pub fn solve_cyclic(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    top_right: f64,
    bottom_left: f64,
    rhs: &[f64],
) -> Option<Vec<f64>> {
    let n = diag.len();
    assert!(n >= 3);
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= bottom_left * top_right / gamma;
    let lu = Tridiagonal::factor(lower, &d, upper)?;
    let mut y = rhs.to_vec();
    lu.solve_in_place(&mut y);
    let mut z = vec![0.0; n];
    z[0] = gamma;
    z[n - 1] = bottom_left;
    lu.solve_in_place(&mut z);
    let scale = top_right / gamma;
    let vy = y[0] + scale * y[n - 1];
    let vz = z[0] + scale * z[n - 1];
    let denom = 1.0 + vz;
    if denom == 0.0 || !denom.is_finite() {
        return None;
    }
    let factor = vy / denom;
    Some(y.iter().zip(&z).map(|(yi, zi)| yi - factor * zi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64]) -> Vec<f64> {
        let n = diag.len();
        (0..n)
            .map(|i| {
                let mut s = diag[i] * x[i];
                if i > 0 {
                    s += lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    #[test]
    fn thomas_round_trip() {
        let n = 12;
        let lower: Vec<f64> = (0..n - 1).map(|i| -1.0 - 0.1 * i as f64).collect();
        let upper: Vec<f64> = (0..n - 1).map(|i| -0.5 + 0.01 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 3.0 + (i as f64).sin()).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let mut b = apply(&lower, &diag, &upper, &x);
        Tridiagonal::factor(&lower, &diag, &upper)
            .unwrap()
            .solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn cyclic_round_trip() {
        let n = 9;
        let lower = vec![-1.0; n - 1];
        let upper = vec![-0.7; n - 1];
        let diag = vec![2.5; n];
        let (tr, bl) = (-0.7, -1.0);
        let x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 0.3).collect();
        let mut b = apply(&lower, &diag, &upper, &x);
        b[0] += tr * x[n - 1];
        b[n - 1] += bl * x[0];
        let sol = solve_cyclic(&lower, &diag, &upper, tr, bl, &b).unwrap();
        for (u, v) in sol.iter().zip(&x) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
