//! Vector-valued theta series Theta = (theta_a)_{a in P/Q}.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::context::LatticeContext;
use crate::lattice::{rational_to_f64, LatticeError, NormSpectrum, Rational};
use crate::linalg::{sup_diff, sup_norm};
use crate::numerics::upper_incomplete_gamma_real;
use crate::weil::{invariance_residual, pattern_with_symbol};

/// Smallest Re xi (= Im tau) accepted.
pub const MIN_DECAY: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("point {0} is too close to the boundary (need Im tau = Re xi >= {MIN_DECAY})")]
    Domain(Complex64),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Where the series is evaluated: tau in the upper half plane or xi = -i tau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaPoint {
    Tau(Complex64),
    Xi(Complex64),
}

impl ThetaPoint {
    pub fn xi(&self) -> Complex64 {
        match *self {
            ThetaPoint::Tau(t) => Complex64::new(t.im, -t.re),
            ThetaPoint::Xi(x) => x,
        }
    }

    pub fn tau(&self) -> Complex64 {
        match *self {
            ThetaPoint::Tau(t) => t,
            ThetaPoint::Xi(x) => Complex64::new(-x.im, x.re),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaEvaluation {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub xi: Complex64,
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub values: Vec<Complex64>,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub truncation_bound: Rational,
    /// Bound on |theta_a - partial sum| valid for every coset.
    pub tail_bound: f64,
}

fn binomial(n: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Upper bound for sum over vectors of one coset with norm > bound of
/// exp(-pi y norm), from N(t) <= V (sqrt t + mu)^r / sqrt(l).
pub fn tail_bound(ctx: &LatticeContext, bound: f64, y: f64) -> f64 {
    let r = ctx.rank();
    let mu = ctx.covering_radius_sq().sqrt();
    let x = PI * y * bound;
    let mut acc = 0.0;
    for j in 0..=r {
        let jh = j as f64 / 2.0;
        let g = upper_incomplete_gamma_real(jh + 1.0, x).unwrap_or(f64::INFINITY);
        acc += binomial(r, j) * mu.powi((r - j) as i32) * (PI * y).powf(-jh) * g;
    }
    ctx.ball_volume() / (ctx.l() as f64).sqrt() * acc
}

/// Smallest integer bound whose tail bound at decay `y` is below `tol`.
pub fn choose_bound(ctx: &LatticeContext, y: f64, tol: f64) -> Rational {
    let mut b = 1i64;
    while tail_bound(ctx, b as f64, y) > tol && b < 1 << 40 {
        b = if b < 64 { b + 1 } else { b + b / 8 };
    }
    Rational::from_integer(b)
}

/// Partial sums of every theta_a at xi over a fixed spectrum.
pub fn theta_from_spectrum(spectrum: &NormSpectrum, xi: Complex64) -> Vec<Complex64> {
    spectrum
        .cosets
        .iter()
        .enumerate()
        .map(|(a, entries)| {
            let mut acc = Complex64::new(if a == 0 { 1.0 } else { 0.0 }, 0.0);
            for e in entries {
                acc += (xi * (-PI * rational_to_f64(e.norm))).exp() * e.count as f64;
            }
            acc
        })
        .collect()
}

/// Theta at `point` with tail below `tol` (bound chosen automatically).
pub fn theta_vector(
    ctx: &LatticeContext,
    point: ThetaPoint,
    tol: f64,
) -> Result<ThetaEvaluation, ThetaError> {
    let xi = point.xi();
    if !(xi.re >= MIN_DECAY) {
        return Err(ThetaError::Domain(point.tau()));
    }
    theta_with_bound(ctx, point, choose_bound(ctx, xi.re, tol))
}

/// Theta at `point` truncated at an explicit norm bound.
pub fn theta_with_bound(
    ctx: &LatticeContext,
    point: ThetaPoint,
    bound: Rational,
) -> Result<ThetaEvaluation, ThetaError> {
    let xi = point.xi();
    if !(xi.re >= MIN_DECAY) {
        return Err(ThetaError::Domain(point.tau()));
    }
    let spectrum = ctx.spectrum(bound)?;
    let used = spectrum.bound;
    Ok(ThetaEvaluation {
        xi,
        values: theta_from_spectrum(&spectrum, xi),
        truncation_bound: used,
        tail_bound: tail_bound(ctx, used.to_f64().unwrap_or(0.0), xi.re),
    })
}

/// (-i tau)^k on the principal branch.
pub fn weight_factor(tau: Complex64, k: f64) -> Complex64 {
    (Complex64::new(tau.im, -tau.re).ln() * k).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformCheck {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub tau: Complex64,
    pub residual: f64,
    /// Truncation error carried into the residual.
    pub tail_bound: f64,
}

/// Theta(-1/tau) against (-i tau)^k rho_s^{-1} Theta(tau).
pub fn verify_s_transform(
    ctx: &LatticeContext,
    tau: Complex64,
    tol: f64,
) -> Result<TransformCheck, ThetaError> {
    let at = theta_vector(ctx, ThetaPoint::Tau(tau), tol)?;
    let image = theta_vector(ctx, ThetaPoint::Tau(-tau.inv()), tol)?;
    let w = weight_factor(tau, ctx.k());
    let rhs: Vec<Complex64> = ctx
        .weil
        .rho_s_inv()
        .apply(&at.values)
        .iter()
        .map(|z| z * w)
        .collect();
    Ok(TransformCheck {
        tau,
        residual: sup_diff(&image.values, &rhs),
        tail_bound: image.tail_bound + w.norm() * at.tail_bound * (ctx.l() as f64).sqrt(),
    })
}

/// Theta(tau + 1) against rho_t^{-1} Theta(tau).
pub fn verify_t_transform(
    ctx: &LatticeContext,
    tau: Complex64,
    tol: f64,
) -> Result<TransformCheck, ThetaError> {
    let at = theta_vector(ctx, ThetaPoint::Tau(tau), tol)?;
    let shifted = theta_vector(ctx, ThetaPoint::Tau(tau + 1.0), tol)?;
    let rhs = ctx.weil.rho_t_inv().apply(&at.values);
    Ok(TransformCheck {
        tau,
        residual: sup_diff(&shifted.values, &rhs),
        tail_bound: shifted.tail_bound + at.tail_bound,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubleSCheck {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub tau: Complex64,
    /// S-transform residual at tau
    pub first: f64,
    /// S-transform residual at -1/tau
    pub second: f64,
    /// |S applied twice to Theta(tau) - rho_c Theta(tau)|
    pub c_action: f64,
}

/// Applies the S relation twice and compares with the action of the centre.
pub fn verify_double_s(
    ctx: &LatticeContext,
    tau: Complex64,
    tol: f64,
) -> Result<DoubleSCheck, ThetaError> {
    let first = verify_s_transform(ctx, tau, tol)?;
    let tau2 = -tau.inv();
    let second = verify_s_transform(ctx, tau2, tol)?;
    let at = theta_vector(ctx, ThetaPoint::Tau(tau), tol)?;
    let inv = ctx.weil.rho_s_inv();
    let w1 = weight_factor(tau, ctx.k());
    let w2 = weight_factor(tau2, ctx.k());
    let once: Vec<Complex64> = inv.apply(&at.values).iter().map(|z| z * w1).collect();
    let twice: Vec<Complex64> = inv.apply(&once).iter().map(|z| z * w2).collect();
    let c_image = ctx.weil.rho_c.apply(&at.values);
    Ok(DoubleSCheck {
        tau,
        first: first.residual,
        second: second.residual,
        c_action: sup_diff(&twice, &c_image),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleCheck {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub tau: Complex64,
    /// |Psi - pi(S) Psi - c(S)| with Psi = Theta - e0
    pub s_residual: f64,
    /// |Psi - pi(T) Psi - c(T)|, c(T) = 0
    pub t_residual: f64,
}

/// Inhomogeneous transformation of Psi = Theta - e0 under
/// pi(S)F(tau) = (-i tau)^{-k} rho_s F(-1/tau) and pi(T)F(tau) = rho_t F(tau+1).
pub fn verify_cocycle(
    ctx: &LatticeContext,
    tau: Complex64,
    tol: f64,
) -> Result<CocycleCheck, ThetaError> {
    let l = ctx.l();
    let e0 = |v: &mut Vec<Complex64>| v[0] -= 1.0;
    let mut psi = theta_vector(ctx, ThetaPoint::Tau(tau), tol)?.values;
    e0(&mut psi);
    let mut psi_s = theta_vector(ctx, ThetaPoint::Tau(-tau.inv()), tol)?.values;
    e0(&mut psi_s);
    let mut psi_t = theta_vector(ctx, ThetaPoint::Tau(tau + 1.0), tol)?.values;
    e0(&mut psi_t);
    let winv = weight_factor(tau, ctx.k()).inv();
    let pi_s: Vec<Complex64> = ctx
        .weil
        .rho_s
        .apply(&psi_s)
        .iter()
        .map(|z| z * winv)
        .collect();
    let mut unit = vec![Complex64::new(0.0, 0.0); l];
    unit[0] = Complex64::new(1.0, 0.0);
    let c_s: Vec<Complex64> = ctx
        .weil
        .rho_s
        .apply(&unit)
        .iter()
        .zip(&unit)
        .map(|(z, u)| z * winv - u)
        .collect();
    let lhs_s: Vec<Complex64> = psi.iter().zip(&pi_s).map(|(a, b)| a - b).collect();
    let pi_t = ctx.weil.rho_t.apply(&psi_t);
    let lhs_t: Vec<Complex64> = psi.iter().zip(&pi_t).map(|(a, b)| a - b).collect();
    Ok(CocycleCheck {
        tau,
        s_residual: sup_diff(&lhs_s, &c_s),
        t_residual: sup_norm(&lhs_t),
    })
}

/// The C-invariant projection of Theta.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantTheta {
    pub dimension: usize,
    pub pattern: String,
    /// The projection is zero as a function (theta_a = theta_{-a}).
    pub vanishes_identically: bool,
    /// Invariance residual of the projection at xi = 1.
    pub invariance_residual: f64,
}

pub fn invariant_theta(ctx: &LatticeContext) -> Result<InvariantTheta, ThetaError> {
    let inv = &ctx.invariant;
    let th = theta_vector(ctx, ThetaPoint::Xi(Complex64::new(1.0, 0.0)), 1e-14)?;
    let projected = inv.project(&th.values);
    Ok(InvariantTheta {
        dimension: inv.dimension,
        pattern: pattern_with_symbol(&ctx.weil, "theta"),
        vanishes_identically: inv.dimension > 0
            && sup_norm(&projected) < 1e-12 * sup_norm(&th.values),
        invariance_residual: invariance_residual(&ctx.weil, &projected),
    })
}

/// Standard evaluation points for the transformation checks.
pub fn tau_samples() -> [Complex64; 4] {
    [
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, 2.0),
        Complex64::new(0.5, 1.0),
        Complex64::new(0.5, 1.5),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(s: &str) -> LatticeContext {
        LatticeContext::new(s.parse().unwrap())
    }

    #[test]
    fn a1_at_xi_one() {
        let c = ctx("A1");
        let t = theta_vector(&c, ThetaPoint::Xi(Complex64::new(1.0, 0.0)), 1e-14).unwrap();
        let direct = |shift: f64| -> f64 {
            (-10..=10)
                .map(|n| (-2.0 * PI * (n as f64 + shift).powi(2)).exp())
                .sum()
        };
        assert!((t.values[0].re - direct(0.0)).abs() < 1e-12);
        assert!((t.values[1].re - direct(0.5)).abs() < 1e-12);
        assert!((t.values[0].re - 1.003_734_9).abs() < 1e-7);
        assert!(t.tail_bound < 1e-14);
    }

    #[test]
    fn tail_bound_dominates_true_tail() {
        let c = ctx("D4");
        let y = 0.7;
        let full = c.spectrum(Rational::from_integer(40)).unwrap();
        for b in [2i64, 4, 8, 12] {
            let bound = tail_bound(&c, b as f64, y);
            for entries in &full.cosets {
                let tail: f64 = entries
                    .iter()
                    .filter(|e| e.norm > Rational::from_integer(b))
                    .map(|e| (-PI * y * rational_to_f64(e.norm)).exp() * e.count as f64)
                    .sum();
                assert!(tail <= bound, "B = {b}: {tail} > {bound}");
            }
        }
    }

    #[test]
    fn boundary_points_rejected() {
        let c = ctx("A2");
        assert!(matches!(
            theta_vector(&c, ThetaPoint::Tau(Complex64::new(0.3, 1e-5)), 1e-10),
            Err(ThetaError::Domain(_))
        ));
    }

    #[test]
    fn theta_is_even_in_the_coset() {
        let c = ctx("A4");
        let t = theta_vector(&c, ThetaPoint::Tau(Complex64::new(0.3, 0.8)), 1e-13).unwrap();
        for a in 0..5 {
            assert!((t.values[a] - t.values[c.weil.negation[a]]).norm() < 1e-13);
        }
    }

    #[test]
    fn s_and_t_transform_small_lattices() {
        for s in ["A1", "A2", "D5", "E6"] {
            let c = ctx(s);
            for tau in tau_samples() {
                let r = verify_s_transform(&c, tau, 1e-12).unwrap();
                assert!(r.residual < 1e-10, "{s} S at {tau}: {}", r.residual);
                let r = verify_t_transform(&c, tau, 1e-12).unwrap();
                assert!(r.residual < 1e-10, "{s} T at {tau}: {}", r.residual);
            }
        }
    }

    #[test]
    fn double_s_and_cocycle() {
        let c = ctx("A3");
        let tau = Complex64::new(0.2, 1.1);
        let d = verify_double_s(&c, tau, 1e-12).unwrap();
        assert!(d.c_action < 1e-12);
        assert!(d.first < 1e-10 && d.second < 1e-10);
        let cc = verify_cocycle(&c, tau, 1e-12).unwrap();
        assert!(cc.s_residual < 1e-10 && cc.t_residual < 1e-10);
    }

    #[test]
    fn invariant_projections() {
        assert!(invariant_theta(&ctx("E6")).unwrap().vanishes_identically);
        assert!(!invariant_theta(&ctx("A4")).unwrap().vanishes_identically);
        let e8 = invariant_theta(&ctx("E8")).unwrap();
        assert_eq!(e8.pattern, "(theta0)");
        assert!(invariant_theta(&ctx("A1")).unwrap().dimension == 0);
    }
}
