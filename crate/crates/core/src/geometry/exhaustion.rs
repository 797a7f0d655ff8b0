//! The exhaustion `rho(z) = sum_j (log|z_j|)^2` of `(C^*)^n`, its Levi form, real Hessian,
//! the radial contraction onto the torus, and the tube `G_eps = {rho < eps}`.

use std::f64::consts::{E, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::region::{BBox, Constraint, Region};
use super::scalar::ScalarExpr;
use crate::error::{Error, Result};
use crate::point::CPoint;

fn nonzero_moduli(z: &CPoint) -> Result<Vec<f64>> {
    z.coords()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let r = c.norm();
            if r == 0.0 {
                Err(Error::Domain(format!("z_{} = 0", j + 1)))
            } else {
                Ok(r)
            }
        })
        .collect()
}

pub fn rho(z: &CPoint) -> Result<f64> {
    Ok(nonzero_moduli(z)?.iter().map(|r| r.ln().powi(2)).sum())
}

/// Levi form `sum_{j,k} d^2 rho / dz_j d\bar z_k  w_j \bar w_k = sum_j |w_j|^2 / (2 |z_j|^2)`.
pub fn levi_form(z: &CPoint, w: &[Complex64]) -> Result<f64> {
    if w.len() != z.dim() {
        return Err(Error::Invalid("tangent vector dimension mismatch".into()));
    }
    let r = nonzero_moduli(z)?;
    Ok(w.iter()
        .zip(&r)
        .map(|(wj, rj)| wj.norm_sqr() / (2.0 * rj * rj))
        .sum())
}

/// Lower bound of the Levi form on `partial G_eps`: `|w|^2 / (2 e^{2 sqrt(eps)})`.
pub fn levi_lower_bound(eps: f64, w: &[Complex64]) -> f64 {
    w.iter().map(|c| c.norm_sqr()).sum::<f64>() / (2.0 * (2.0 * eps.sqrt()).exp())
}

/// `(d rho / d z_j)_j = (log|z_j| / z_j)_j`; complex tangent vectors of a level set are its
/// kernel.
pub fn complex_gradient(z: &CPoint) -> Result<Vec<Complex64>> {
    let r = nonzero_moduli(z)?;
    Ok(z.coords()
        .iter()
        .zip(&r)
        .map(|(c, rj)| Complex64::new(rj.ln(), 0.0) / c)
        .collect())
}

/// One `2 x 2` diagonal block of the real Hessian, in the `(x_j, y_j)` variables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianBlock {
    /// Unscaled block; the Hessian block is `scale * unscaled`.
    pub unscaled: [[f64; 2]; 2],
    /// `2 / |z_j|^4`.
    pub scale: f64,
    /// Closed form `x_j^2 + y_j^2` of the unscaled trace.
    pub trace: f64,
    /// Closed form `(x_j^2 + y_j^2)^2 (log|z_j| - (log|z_j|)^2)` of the unscaled determinant.
    pub det: f64,
}

impl HessianBlock {
    pub fn is_positive_definite(&self) -> bool {
        self.trace > 0.0 && self.det > 0.0
    }

    pub fn scaled(&self) -> [[f64; 2]; 2] {
        let s = self.scale;
        let m = self.unscaled;
        [[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]]
    }
}

/// Block-diagonal real Hessian of `rho`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealHessian {
    pub blocks: Vec<HessianBlock>,
}

impl RealHessian {
    pub fn is_positive_definite(&self) -> bool {
        self.blocks.iter().all(HessianBlock::is_positive_definite)
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.blocks.len();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for (j, b) in self.blocks.iter().enumerate() {
            let s = b.scaled();
            for a in 0..2 {
                for c in 0..2 {
                    m[(2 * j + a, 2 * j + c)] = s[a][c];
                }
            }
        }
        m
    }
}

pub fn hessian_block(c: Complex64) -> Result<HessianBlock> {
    let (x, y) = (c.re, c.im);
    let r2 = x * x + y * y;
    if r2 == 0.0 {
        return Err(Error::Domain("Hessian block at z_j = 0".into()));
    }
    let l = 0.5 * r2.ln();
    let off = x * y * (1.0 - 2.0 * l);
    Ok(HessianBlock {
        unscaled: [
            [(y * y - x * x) * l + x * x, off],
            [off, (x * x - y * y) * l + y * y],
        ],
        scale: 2.0 / (r2 * r2),
        trace: r2,
        det: r2 * r2 * (l - l * l),
    })
}

pub fn real_hessian(z: &CPoint) -> Result<RealHessian> {
    Ok(RealHessian {
        blocks: z.coords().iter().map(|c| hessian_block(*c)).collect::<Result<_>>()?,
    })
}

/// Central second-difference Hessian of `rho` with step `h` over the `2n` real coordinates.
pub fn hessian_fd(z: &CPoint, h: f64) -> Result<DMatrix<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Invalid(format!("finite-difference step must be positive, got {h}")));
    }
    if z.coords().iter().any(|c| c.norm() <= 2.0 * h) {
        return Err(Error::Domain("finite differences too close to a coordinate axis".into()));
    }
    let d = 2 * z.dim();
    let f0 = rho(z)?;
    let mut m = DMatrix::zeros(d, d);
    for a in 0..d {
        let fp = rho(&z.shifted_real(a, h))?;
        let fm = rho(&z.shifted_real(a, -h))?;
        m[(a, a)] = (fp - 2.0 * f0 + fm) / (h * h);
        for b in (a + 1)..d {
            let fpp = rho(&z.shifted_real(a, h).shifted_real(b, h))?;
            let fpm = rho(&z.shifted_real(a, h).shifted_real(b, -h))?;
            let fmp = rho(&z.shifted_real(a, -h).shifted_real(b, h))?;
            let fmm = rho(&z.shifted_real(a, -h).shifted_real(b, -h))?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    Ok(m)
}

/// Max-entry difference between the closed-form Hessian and central differences.
pub fn hessian_fd_residual(z: &CPoint, h: f64) -> Result<f64> {
    let fd = hessian_fd(z, h)?;
    let exact = real_hessian(z)?.to_matrix();
    Ok((fd - exact).abs().max())
}

/// `H(z, t) = (|z_1|^{-t} z_1, ..., |z_n|^{-t} z_n)`.
pub fn contraction(z: &CPoint, t: f64) -> Result<CPoint> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Invalid(format!("contraction time {t} outside [0, 1]")));
    }
    let r = nonzero_moduli(z)?;
    CPoint::new(
        z.coords()
            .iter()
            .zip(&r)
            .map(|(c, rj)| c * rj.powf(-t))
            .collect(),
    )
}

/// `|rho(H(z,t)) - (1 - t)^2 rho(z)|`.
pub fn contraction_residual(z: &CPoint, t: f64) -> Result<f64> {
    let h = contraction(z, t)?;
    Ok((rho(&h)? - (1.0 - t).powi(2) * rho(z)?).abs())
}

/// The boundary point `p = (e^{sqrt(eps/n)}, ..., e^{sqrt(eps/n)})` of `G_eps`.
pub fn boundary_point(n: usize, eps: f64) -> Result<CPoint> {
    if n == 0 || !(eps > 0.0) {
        return Err(Error::Invalid("need n >= 1 and eps > 0".into()));
    }
    CPoint::real_diagonal(n, (eps / n as f64).sqrt().exp())
}

/// Radius of the ball `U_p` about `p`: `safety * min(e - e^{sqrt(eps/n)}, e^{sqrt(eps/n)} - 1)`.
///
/// The closed ball of this radius lies in `{1 < |z_j| < e}`, where every Hessian block is
/// positive definite. No such ball exists once `eps >= n`.
pub fn up_radius(n: usize, eps: f64, safety: f64) -> Result<f64> {
    if n == 0 || !(eps > 0.0) {
        return Err(Error::Invalid("need n >= 1 and eps > 0".into()));
    }
    if !(safety > 0.0 && safety < 1.0) {
        return Err(Error::Invalid(format!("safety factor {safety} outside (0, 1)")));
    }
    if eps >= n as f64 {
        return Err(Error::Invalid(format!(
            "eps = {eps} >= n = {n}: every boundary point has a coordinate with |log|z_j|| >= 1, \
             so no boundary point has a positive definite real Hessian"
        )));
    }
    let m = (eps / n as f64).sqrt().exp();
    Ok(safety * (E - m).min(m - 1.0))
}

/// `G_eps = {rho < eps}` with the box `|x_j|, |y_j| <= e^{sqrt(eps)}`.
pub fn tube(n: usize, eps: f64) -> Region {
    Region::new(
        Constraint::lt(ScalarExpr::Rho, ScalarExpr::Const(eps)),
        BBox::symmetric(n, eps.sqrt().exp()),
    )
}

/// Open ball about the origin.
pub fn origin_ball(n: usize, radius: f64) -> Region {
    Region::new(
        Constraint::lt(ScalarExpr::NormSq, ScalarExpr::Const(radius * radius)),
        BBox::symmetric(n, radius),
    )
}

/// `Omega = B(2 sqrt(n) e^{sqrt(eps)})`.
pub fn omega_ball(n: usize, eps: f64) -> Region {
    origin_ball(n, 2.0 * (n as f64).sqrt() * eps.sqrt().exp())
}

/// Uniform direction on the unit sphere of `R^n`.
pub fn unit_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Point of `G_eps` drawn with log-moduli uniform in the ball of radius `sqrt(eps)` and
/// uniform arguments.
pub fn sample_tube<R: Rng + ?Sized>(rng: &mut R, n: usize, eps: f64) -> CPoint {
    let dir = unit_direction(rng, n);
    let radius = eps.sqrt() * rng.gen::<f64>().powf(1.0 / n as f64);
    let u: Vec<f64> = dir.iter().map(|d| d * radius).collect();
    let theta: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
    CPoint::from_log_polar(&u, &theta).expect("finite")
}

/// Point of `partial G_eps = {rho = eps}`.
pub fn sample_tube_boundary<R: Rng + ?Sized>(rng: &mut R, n: usize, eps: f64) -> CPoint {
    let dir = unit_direction(rng, n);
    let u: Vec<f64> = dir.iter().map(|d| d * eps.sqrt()).collect();
    let theta: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
    CPoint::from_log_polar(&u, &theta).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(xy: &[f64]) -> CPoint {
        CPoint::from_real(xy).unwrap()
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&pt(&[1.0, 0.0, 1.0, 0.0])).unwrap(), 0.0);
        assert!((rho(&pt(&[E, 0.0, 1.0, 0.0])).unwrap() - 1.0).abs() < 1e-15);
        for (n, eps) in [(2, 1.0), (3, 1.5), (4, 0.3)] {
            let p = boundary_point(n, eps).unwrap();
            assert!((rho(&p).unwrap() - eps).abs() < 1e-12);
        }
        assert!(matches!(rho(&pt(&[0.0, 0.0, 1.0, 0.0])), Err(Error::Domain(_))));
    }

    #[test]
    fn levi_examples() {
        let z = pt(&[1.0, 0.0, 1.0, 0.0]);
        let w = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(levi_form(&z, &w).unwrap(), 0.5);
        assert_eq!(levi_form(&z, &[Complex64::new(0.0, 0.0); 2]).unwrap(), 0.0);
        assert!(levi_form(&pt(&[0.0, 0.0, 1.0, 0.0]), &w).is_err());
    }

    #[test]
    fn levi_form_is_a_quarter_of_the_real_laplacian_per_block() {
        // d^2/dz dzbar = (d_xx + d_yy) / 4, an independent route through the real Hessian.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let z = sample_tube(&mut rng, 3, 2.0);
            let h = real_hessian(&z).unwrap();
            for j in 0..3 {
                let mut w = vec![Complex64::new(0.0, 0.0); 3];
                w[j] = Complex64::new(1.0, 0.0);
                let s = h.blocks[j].scaled();
                let lap = 0.25 * (s[0][0] + s[1][1]);
                assert!((levi_form(&z, &w).unwrap() - lap).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hessian_block_at_unit_modulus_is_degenerate() {
        let b = hessian_block(Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(b.unscaled, [[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(b.det, 0.0);
        let b = hessian_block(Complex64::new(E, 0.0)).unwrap();
        assert!(b.det.abs() < 1e-12);
    }

    #[test]
    fn closed_form_trace_and_det_match_block_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let c = Complex64::from_polar(rng.gen_range(0.3..4.0), rng.gen_range(-PI..PI));
            let b = hessian_block(c).unwrap();
            let m = b.unscaled;
            assert!((m[0][0] + m[1][1] - b.trace).abs() < 1e-12 * b.trace.max(1.0));
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            assert!((det - b.det).abs() < 1e-10 * b.trace.powi(2).max(1.0));
        }
    }

    #[test]
    fn fd_residual_examples() {
        let z = pt(&[1.0, 0.0, 1.0, 0.0]);
        assert!(hessian_fd_residual(&z, 1e-4).unwrap() < 1e-5);
        let p = boundary_point(2, 1.0).unwrap();
        assert!(hessian_fd_residual(&p, 1e-4).unwrap() < 1e-5);
        assert!(matches!(hessian_fd_residual(&z, 0.0), Err(Error::Invalid(_))));
        assert!(matches!(
            hessian_fd_residual(&pt(&[1e-5, 0.0, 1.0, 0.0]), 1e-4),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn contraction_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z = sample_tube(&mut rng, 2, 1.0);
        assert_eq!(contraction(&z, 0.0).unwrap(), z);
        assert_eq!(contraction_residual(&z, 0.0).unwrap(), 0.0);
        assert!(rho(&contraction(&z, 1.0).unwrap()).unwrap() < 1e-28);
        assert!(contraction_residual(&z, 0.37).unwrap() < 1e-12);
        assert!(contraction(&z, 1.5).is_err());
    }

    #[test]
    fn up_radius_examples() {
        let r = up_radius(2, 1.0, 0.5).unwrap();
        let expected = 0.5 * (E - (1.0f64 / 2.0f64.sqrt()).exp());
        assert!((r - expected).abs() < 1e-15);
        assert!((r - 0.345).abs() < 1e-3);
        assert!(up_radius(2, 2.0, 0.5).is_err());
        assert!(up_radius(2, 2.5, 0.5).is_err());
        assert!(up_radius(2, 1.0, 1e-9).unwrap() < 1e-8);
    }

    #[test]
    fn tube_samples_are_inside_and_boundary_samples_are_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = tube(3, 1.5);
        for _ in 0..1000 {
            let z = sample_tube(&mut rng, 3, 1.5);
            assert!(g.contains(&z).unwrap());
            assert!(g.bbox.contains(&z));
            let b = sample_tube_boundary(&mut rng, 3, 1.5);
            assert!((rho(&b).unwrap() - 1.5).abs() < 1e-12);
        }
    }
}
