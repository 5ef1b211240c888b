//! Yamabe energy, the subcritical quotient `Q_s`, the Euler–Lagrange
//! residual and the sphere constants `Y_d`.

use std::f64::consts::PI;

use crate::domain::{dirichlet_energy, gamma_half, lp_norm, ConformalExponents, Field, ProductGrid};
use crate::error::{Error, Result};

/// Numerator, denominator and value of `Q_s(u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuotientValue {
    /// `a·‖∇u‖₂² + Σ w·S·u²`
    pub numerator: f64,
    /// `‖u‖_s²`
    pub denominator: f64,
    pub value: f64,
    pub s: f64,
}

pub(crate) fn curvature_term(grid: &ProductGrid, values: &[f64]) -> f64 {
    let cells = grid.cell_count();
    grid.weights()
        .iter()
        .zip(values)
        .enumerate()
        .map(|(idx, (w, v))| w * grid.manifold().curvature(idx / cells) * v * v)
        .sum()
}

/// `a·‖∇u‖₂² + Σ w_i vol_k S_i u_ik²`.
pub fn energy(u: &Field, ce: &ConformalExponents) -> f64 {
    ce.a() * dirichlet_energy(u) + curvature_term(u.grid(), u.values())
}

/// Admissible exponents for the quotient: `2 < s ≤ p`.
pub(crate) fn check_quotient_exponent(s: f64, ce: &ConformalExponents) -> Result<()> {
    // p = 2d/(d-2) is not always representable; allow the rounding slack
    if s > 2.0 && s <= ce.p() * (1.0 + 4.0 * f64::EPSILON) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "quotient exponent must satisfy 2 < s <= p = {}, got {s}",
            ce.p()
        )))
    }
}

/// `Q_s(u) = energy(u) / ‖u‖_s²`.
pub fn yamabe_quotient(u: &Field, s: f64, ce: &ConformalExponents) -> Result<QuotientValue> {
    check_quotient_exponent(s, ce)?;
    if u.is_zero() {
        return Err(Error::Domain("quotient of the zero field".into()));
    }
    let numerator = energy(u, ce);
    let norm = lp_norm(u, s)?;
    let denominator = norm * norm;
    Ok(QuotientValue {
        numerator,
        denominator,
        value: numerator / denominator,
        s,
    })
}

/// Positive discrete Laplacian of a raw value array, `Δ = -div∘grad`.
///
/// Assembled from the same difference edges as the gradient norm, so that
/// `Σ w·u·Δu = ‖∇u‖₂²` holds exactly up to rounding.
pub fn laplacian_values(grid: &ProductGrid, values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    for e in grid.edges() {
        let flux = e.stiffness() * (values[e.a] - values[e.b]);
        out[e.a] += flux;
        out[e.b] -= flux;
    }
    for (o, w) in out.iter_mut().zip(grid.weights()) {
        *o /= w;
    }
    out
}

pub fn laplacian(u: &Field) -> Vec<f64> {
    laplacian_values(u.grid(), u.values())
}

/// Pointwise `a·Δu + S·u - λ·u^{s-1}`.
pub(crate) fn el_defect(grid: &ProductGrid, values: &[f64], s: f64, lambda: f64, a: f64) -> Vec<f64> {
    let lap = laplacian_values(grid, values);
    let cells = grid.cell_count();
    lap.iter()
        .zip(values)
        .enumerate()
        .map(|(idx, (l, v))| {
            a * l + grid.manifold().curvature(idx / cells) * v - lambda * v.powf(s - 1.0)
        })
        .collect()
}

/// Weighted `L²` norm of `a·Δu + S·u - λ·u^{s-1}`.
pub fn el_residual(u: &Field, s: f64, lambda: f64, ce: &ConformalExponents) -> f64 {
    let defect = el_defect(u.grid(), u.values(), s, lambda, ce.a());
    crate::domain::weighted_norm(u.grid(), &defect, 2.0)
}

/// Volume of the round unit sphere `S^d`.
pub fn sphere_volume(d: u32) -> Result<f64> {
    if d < 1 {
        return Err(Error::Dimension("sphere dimension must be >= 1".into()));
    }
    Ok(2.0 * PI.powf(f64::from(d + 1) / 2.0) / gamma_half(d + 1))
}

/// Yamabe constant of the round sphere, `Y_d = d(d-1)·Vol(S^d)^{2/d}`.
pub fn yamabe_sphere_constant(d: u32) -> Result<f64> {
    if d < 3 {
        return Err(Error::Dimension(format!(
            "the sphere constant is used for d >= 3, got d = {d}"
        )));
    }
    let df = f64::from(d);
    Ok(df * (df - 1.0) * sphere_volume(d)?.powf(2.0 / df))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{conformal_exponents, EuclideanFactor, ManifoldFactor, GraphEdge};
    use std::sync::Arc;

    fn grid(curv: f64) -> Arc<ProductGrid> {
        ProductGrid::new(
            ManifoldFactor::homogeneous(1.0, curv).unwrap(),
            EuclideanFactor::line(1, 1.0).unwrap(),
        )
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn energy_examples() {
        let ce = conformal_exponents(2, 1).unwrap();
        let one = Field::new(grid(2.0), vec![1.0; 3]).unwrap();
        assert_eq!(energy(&one, &ce), 6.0);
        let bump = Field::new(grid(2.0), vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(energy(&bump, &ce), 18.0);
        assert_eq!(energy(&Field::zeros(grid(2.0)), &ce), 0.0);
    }

    #[test]
    fn quotient_examples() {
        let ce = conformal_exponents(2, 1).unwrap();
        let one = Field::new(grid(2.0), vec![1.0; 3]).unwrap();
        let q = yamabe_quotient(&one, 4.0, &ce).unwrap();
        assert!(rel(q.value, 2.0 * 3f64.sqrt()) < 1e-15);
        assert_eq!(q.value, q.numerator / q.denominator);

        let u = Field::new(grid(2.0), vec![0.0, 0.7, 0.2]).unwrap();
        let q1 = yamabe_quotient(&u, 5.0, &ce).unwrap().value;
        let q3 = yamabe_quotient(&u.scaled(3.0).unwrap(), 5.0, &ce).unwrap().value;
        assert!(rel(q3, q1) < 1e-13);

        assert!(yamabe_quotient(&Field::zeros(grid(2.0)), 4.0, &ce).is_err());
        assert!(yamabe_quotient(&u, 2.0, &ce).is_err());
        assert!(yamabe_quotient(&u, 6.5, &ce).is_err());
        assert!(yamabe_quotient(&u, 6.0, &ce).is_ok());
    }

    #[test]
    fn residual_examples() {
        let ce = conformal_exponents(2, 1).unwrap();
        let one = Field::new(grid(2.0), vec![1.0; 3]).unwrap();
        for s in [3.0, 4.5, 6.0] {
            assert!(el_residual(&one, s, 2.0, &ce) < 1e-15);
        }
        assert!(rel(el_residual(&one, 4.0, 0.0, &ce), 2.0 * 3f64.sqrt()) < 1e-15);
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let m = ManifoldFactor::weighted_graph(
            vec![0.3, 0.9, 1.4],
            vec![1.0, 2.0, 0.5],
            vec![
                GraphEdge { a: 0, b: 1, conductance: 0.7 },
                GraphEdge { a: 1, b: 2, conductance: 1.9 },
            ],
        )
        .unwrap();
        let g = ProductGrid::new(m, EuclideanFactor::line(3, 0.25).unwrap());
        let c = Field::new(g, vec![1.75; 21]).unwrap();
        assert!(laplacian(&c).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn summation_by_parts() {
        let g = grid(1.0);
        let u = Field::new(g.clone(), vec![0.25, 1.5, 0.5]).unwrap();
        let lap = laplacian(&u);
        let pairing: f64 = g.weights().iter().zip(u.values()).zip(&lap).map(|((w, a), b)| w * a * b).sum();
        assert!(rel(pairing, dirichlet_energy(&u)) < 1e-14);
    }

    #[test]
    fn sphere_constants() {
        assert!(rel(sphere_volume(1).unwrap(), 2.0 * PI) < 1e-15);
        assert!(rel(sphere_volume(2).unwrap(), 4.0 * PI) < 1e-15);
        assert!(rel(sphere_volume(3).unwrap(), 2.0 * PI * PI) < 1e-15);
        assert!((sphere_volume(3).unwrap() - 19.739_208_8).abs() < 1e-7);
        assert!(rel(sphere_volume(4).unwrap(), 8.0 * PI * PI / 3.0) < 1e-15);

        let y3 = yamabe_sphere_constant(3).unwrap();
        assert!(rel(y3, 6.0 * (2.0 * PI * PI).powf(2.0 / 3.0)) < 1e-15);
        assert!((y3 - 43.823).abs() < 1e-3);
        let y4 = yamabe_sphere_constant(4).unwrap();
        assert!(rel(y4, 12.0 * (8.0 * PI * PI / 3.0).sqrt()) < 1e-15);
        assert!(matches!(yamabe_sphere_constant(2), Err(Error::Dimension(_))));
    }
}
