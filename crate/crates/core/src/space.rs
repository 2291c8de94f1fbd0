//! Finite-dimensional ℓp norms, their moduli of convexity, Clarkson angles
//! and the strong triangle inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which member of the ℓp family measures distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Norm {
    /// `1 < p < ∞`.
    Lp { p: f64 },
    L1,
    Linf,
}

impl Norm {
    pub fn euclidean() -> Self {
        Norm::Lp { p: 2.0 }
    }

    /// Hölder conjugate of the norm, used for distances to hyperplanes.
    pub fn dual(self) -> Norm {
        match self {
            Norm::Lp { p } => Norm::Lp { p: p / (p - 1.0) },
            Norm::L1 => Norm::Linf,
            Norm::Linf => Norm::L1,
        }
    }

    #[inline]
    pub fn eval(self, x: &[f64]) -> f64 {
        self.eval_iter(x.iter().copied())
    }

    #[inline]
    pub fn eval_iter(self, xs: impl Iterator<Item = f64>) -> f64 {
        match self {
            Norm::L1 => xs.map(f64::abs).sum(),
            Norm::Linf => xs.fold(0.0, |m, v| m.max(v.abs())),
            Norm::Lp { p } => lp_norm(p, xs),
        }
    }

    #[inline]
    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        self.eval_iter(a.iter().zip(b).map(|(x, y)| x - y))
    }
}

#[inline]
fn lp_norm(p: f64, xs: impl Iterator<Item = f64>) -> f64 {
    if p == 2.0 {
        xs.map(|v| v * v).sum::<f64>().sqrt()
    } else if p == 3.0 {
        xs.map(|v| {
            let a = v.abs();
            a * a * a
        })
        .sum::<f64>()
        .cbrt()
    } else {
        xs.map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// A norm on ℝ^d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormedSpace {
    pub norm: Norm,
    pub dim: usize,
}

/// Both sides of the strong triangle inequality for one pair of vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrongTriangle {
    pub lhs: f64,
    pub rhs: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl StrongTriangle {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

impl NormedSpace {
    pub fn new(norm: Norm, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DomainError("dimension must be positive".into()));
        }
        if let Norm::Lp { p } = norm {
            if !(p > 1.0 && p.is_finite()) {
                return Err(Error::DomainError(format!(
                    "lp exponent must satisfy 1 < p < inf, got {p}"
                )));
            }
        }
        Ok(Self { norm, dim })
    }

    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        Self::new(Norm::Lp { p }, dim)
    }

    pub fn euclidean(dim: usize) -> Self {
        Self {
            norm: Norm::euclidean(),
            dim,
        }
    }

    pub fn linf(dim: usize) -> Self {
        Self {
            norm: Norm::Linf,
            dim,
        }
    }

    pub fn l1(dim: usize) -> Self {
        Self {
            norm: Norm::L1,
            dim,
        }
    }

    pub fn is_uniformly_convex(&self) -> bool {
        matches!(self.norm, Norm::Lp { .. })
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            })
        }
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.norm.eval(x))
    }

    /// Unchecked distance for hot loops; callers guarantee matching lengths.
    #[inline]
    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        self.norm.dist(a, b)
    }

    /// `x / |x|`.
    pub fn normalize(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let n = self.norm.eval(x);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(x.iter().map(|v| v / n).collect())
    }

    /// Closed-form ℓp modulus of convexity. The `p >= 2` form uses the
    /// exponent itself; for `1 < p <= 2` the conjugate exponent is used.
    pub fn modulus_of_convexity(&self, epsilon: f64) -> Result<f64> {
        let p = match self.norm {
            Norm::Lp { p } => p,
            _ => return Err(Error::NotUniformlyConvex),
        };
        if !(0.0..=2.0).contains(&epsilon) {
            return Err(Error::DomainError(format!(
                "epsilon must lie in [0, 2], got {epsilon}"
            )));
        }
        let exponent = if p >= 2.0 { p } else { p / (p - 1.0) };
        Ok(lp_modulus(exponent, epsilon))
    }

    /// Norm distance between the directions of `x` and `y`.
    pub fn clarkson_angle(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let ux = self.normalize(x)?;
        let uy = self.normalize(y)?;
        Ok(self.dist(&ux, &uy))
    }

    pub fn check_strong_triangle(&self, x1: &[f64], x2: &[f64]) -> Result<StrongTriangle> {
        if !self.is_uniformly_convex() {
            return Err(Error::NotUniformlyConvex);
        }
        self.check_dim(x1)?;
        self.check_dim(x2)?;
        let n1 = self.norm.eval(x1);
        let n2 = self.norm.eval(x2);
        if n1 == 0.0 || n2 == 0.0 {
            return Err(Error::ZeroVector);
        }
        let sum: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a + b).collect();
        let ns = self.norm.eval(&sum);
        if ns == 0.0 {
            return Err(Error::ZeroSum);
        }
        // rounding can push an angle a hair past 2
        let alpha1 = self.clarkson_angle(x1, &sum)?.min(2.0);
        let alpha2 = self.clarkson_angle(x2, &sum)?.min(2.0);
        let rhs = n1 + n2
            - 2.0 * self.modulus_of_convexity(alpha1)? * n1
            - 2.0 * self.modulus_of_convexity(alpha2)? * n2;
        Ok(StrongTriangle {
            lhs: ns,
            rhs,
            alpha1,
            alpha2,
        })
    }
}

/// `1 - (1 - (eps/2)^r)^(1/r)`, evaluated without cancellation near 0.
fn lp_modulus(r: f64, epsilon: f64) -> f64 {
    let u = (epsilon / 2.0).powf(r);
    -((-u).ln_1p() / r).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let e = NormedSpace::euclidean(2);
        assert_eq!(e.norm(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(NormedSpace::linf(2).norm(&[3.0, -4.0]).unwrap(), 4.0);
        let l3 = NormedSpace::lp(3.0, 2).unwrap();
        // 2^(1/3), 30-digit reference
        assert!((l3.norm(&[1.0, 1.0]).unwrap() - 1.259_921_049_894_873_2).abs() < 1e-15);
        let l3_general = NormedSpace::lp(3.000_000_000_000_001, 2).unwrap();
        assert!((l3_general.norm(&[1.0, 1.0]).unwrap() - 1.259_921_049_894_873_2).abs() < 1e-12);
    }

    #[test]
    fn norm_dimension_mismatch() {
        let e = NormedSpace::euclidean(3);
        assert!(matches!(
            e.norm(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn bad_exponents_rejected() {
        assert!(NormedSpace::lp(1.0, 2).is_err());
        assert!(NormedSpace::lp(f64::INFINITY, 2).is_err());
        assert!(NormedSpace::lp(0.5, 2).is_err());
    }

    #[test]
    fn modulus_examples() {
        let e = NormedSpace::euclidean(2);
        assert_eq!(e.modulus_of_convexity(2.0).unwrap(), 1.0);
        assert_eq!(e.modulus_of_convexity(0.0).unwrap(), 0.0);
        let l3 = NormedSpace::lp(3.0, 2).unwrap();
        // 1 - (7/8)^(1/3), 30-digit reference
        assert!((l3.modulus_of_convexity(1.0).unwrap() - 0.043_534_408_613_805_45).abs() < 1e-15);
    }

    #[test]
    fn modulus_rejects_non_uniformly_convex_and_bad_epsilon() {
        assert_eq!(
            NormedSpace::linf(2).modulus_of_convexity(1.0),
            Err(Error::NotUniformlyConvex)
        );
        assert_eq!(
            NormedSpace::l1(2).modulus_of_convexity(1.0),
            Err(Error::NotUniformlyConvex)
        );
        let e = NormedSpace::euclidean(2);
        assert!(matches!(e.modulus_of_convexity(2.5), Err(Error::DomainError(_))));
        assert!(matches!(e.modulus_of_convexity(-0.1), Err(Error::DomainError(_))));
    }

    #[test]
    fn modulus_small_argument_keeps_precision() {
        // 1 - sqrt(1 - 1e-20) = 5e-21 to leading order
        let e = NormedSpace::euclidean(2);
        let d = e.modulus_of_convexity(2e-10).unwrap();
        assert!((d / 5e-21 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn modulus_branches_agree_at_p2() {
        for i in 0..=200 {
            let eps = 2.0 * i as f64 / 200.0;
            assert_eq!(lp_modulus(2.0, eps), lp_modulus(2.0 / (2.0 - 1.0), eps));
        }
    }

    #[test]
    fn modulus_nondecreasing_grid() {
        for p in [1.2, 1.5, 2.0, 3.0, 4.0, 7.5] {
            let s = NormedSpace::lp(p, 2).unwrap();
            let mut prev = 0.0;
            for i in 0..=1000 {
                let d = s.modulus_of_convexity(2.0 * i as f64 / 1000.0).unwrap();
                assert!(d >= prev, "p={p} i={i}");
                assert!((0.0..=1.0).contains(&d));
                if i > 0 {
                    assert!(d > 0.0);
                }
                prev = d;
            }
        }
    }

    #[test]
    fn clarkson_angle_examples() {
        let e = NormedSpace::euclidean(2);
        let x = [0.3, -1.7];
        assert_eq!(e.clarkson_angle(&x, &x).unwrap(), 0.0);
        assert!((e.clarkson_angle(&x, &[-0.3, 1.7]).unwrap() - 2.0).abs() < 1e-15);
        assert!(
            (e.clarkson_angle(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - std::f64::consts::SQRT_2).abs()
                < 1e-15
        );
        assert_eq!(
            e.clarkson_angle(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn strong_triangle_examples() {
        let e = NormedSpace::euclidean(2);
        let w = e.check_strong_triangle(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!((w.lhs, w.rhs), (2.0, 2.0));

        let w = e.check_strong_triangle(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((w.lhs - std::f64::consts::SQRT_2).abs() < 1e-15);
        // independent evaluation of the right-hand side
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let alpha = ((1.0 - s) * (1.0 - s) + s * s).sqrt();
        let delta = 1.0 - (1.0 - (alpha / 2.0) * (alpha / 2.0)).sqrt();
        let rhs = 2.0 - 4.0 * delta;
        assert!((w.rhs - rhs).abs() < 1e-14);
        assert!((w.alpha1 - alpha).abs() < 1e-15);
        assert!(w.holds(0.0));

        assert_eq!(
            e.check_strong_triangle(&[1.0, 0.0], &[-1.0, 0.0]),
            Err(Error::ZeroSum)
        );
        assert_eq!(
            e.check_strong_triangle(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroVector)
        );
        assert_eq!(
            NormedSpace::linf(2).check_strong_triangle(&[1.0, 0.0], &[0.0, 1.0]),
            Err(Error::NotUniformlyConvex)
        );
    }
}
