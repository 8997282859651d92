use gauss_quad::GaussLegendre;

use super::{NumericsError, Result};

/// Nodes and weights of the `order`-point Gauss-Legendre rule on [-1, 1],
/// nodes ascending.
pub fn gauss_legendre_rule(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = GaussLegendre::new(order).map_err(|e| NumericsError::InvalidArgument(e.to_string()))?;
    let mut pairs = rule.into_node_weight_pairs();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// A one-dimensional quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid1D {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(NumericsError::InvalidArgument(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.is_empty() {
            return Err(NumericsError::InvalidArgument("grid is empty".into()));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) || points.iter().any(|p| !p.is_finite()) {
            return Err(NumericsError::InvalidArgument("grid points must be finite and strictly increasing".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(NumericsError::InvalidArgument("grid weights must be finite and positive".into()));
        }
        Ok(Self { points, weights })
    }

    /// Composite Gauss-Legendre grid with `order` nodes on each panel
    /// `[breaks[k], breaks[k+1]]`.
    pub fn composite(breaks: &[f64], order: usize) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(NumericsError::InvalidArgument("need at least one panel".into()));
        }
        let (nodes, weights) = gauss_legendre_rule(order)?;
        let mut p = Vec::with_capacity((breaks.len() - 1) * order);
        let mut w = Vec::with_capacity(p.capacity());
        for panel in breaks.windows(2) {
            let (a, b) = (panel[0], panel[1]);
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, wx) in nodes.iter().zip(&weights) {
                p.push(mid + half * x);
                w.push(half * wx);
            }
        }
        Self::new(p, w)
    }

    /// `panels` equal-width panels on `[a, b]`.
    pub fn uniform_composite(a: f64, b: f64, panels: usize, order: usize) -> Result<Self> {
        if !(a < b) || panels == 0 {
            return Err(NumericsError::InvalidArgument(format!("invalid interval [{a}, {b}] with {panels} panels")));
        }
        let breaks: Vec<f64> = (0..=panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect();
        Self::composite(&breaks, order)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rule_is_exact_for_high_degree_polynomials() {
        let (x, w) = gauss_legendre_rule(8).unwrap();
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        let sum: f64 = w.iter().sum();
        assert_abs_diff_eq!(sum, 2.0, epsilon = 1e-14);
        let m14: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert_abs_diff_eq!(m14, 2.0 / 15.0, epsilon = 1e-14);
    }

    #[test]
    fn composite_grid_integrates_smooth_function() {
        let g = Grid1D::uniform_composite(0.0, 50.0, 100, 8).unwrap();
        assert_eq!(g.len(), 800);
        assert_abs_diff_eq!(g.integrate(|x| (-x).exp()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid1D::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Grid1D::new(vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Grid1D::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(Grid1D::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }
}
