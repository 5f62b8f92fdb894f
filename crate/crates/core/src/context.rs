use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_traits::ToPrimitive;

use crate::lattice::{
    covering_radius_sq_bound, discriminant_data, norm_spectrum, DiscriminantData, LatticeError,
    LatticeSpec, NormSpectrum, Rational, DEFAULT_MAX_VECTORS,
};
use crate::numerics::gamma;
use crate::weil::{build_weil, c_invariant_subspace, CInvariantSubspace, WeilRep};

pub const MAX_VECTORS_ENV: &str = "ADEZ_MAX_VECTORS";

/// Everything derived from one lattice spec, with a norm-spectrum cache.
#[derive(Debug)]
pub struct LatticeContext {
    pub data: DiscriminantData,
    pub weil: WeilRep,
    pub invariant: CInvariantSubspace,
    max_vectors: u64,
    mu_sq: f64,
    ball_volume: f64,
    cache: Mutex<Option<Arc<NormSpectrum>>>,
}

impl LatticeContext {
    pub fn new(spec: LatticeSpec) -> Self {
        Self::with_max_vectors(spec, DEFAULT_MAX_VECTORS)
    }

    /// Reads the per-coset vector ceiling from `ADEZ_MAX_VECTORS` when set.
    pub fn from_env(spec: LatticeSpec) -> Self {
        let limit = std::env::var(MAX_VECTORS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| *v >= 1.0)
            .map(|v| v as u64)
            .unwrap_or(DEFAULT_MAX_VECTORS);
        Self::with_max_vectors(spec, limit)
    }

    pub fn with_max_vectors(spec: LatticeSpec, max_vectors: u64) -> Self {
        let data = discriminant_data(spec);
        let weil = build_weil(&data);
        let invariant = c_invariant_subspace(&weil);
        let r = spec.rank() as f64;
        let ball_volume = PI.powf(r / 2.0)
            / gamma(num_complex::Complex64::new(r / 2.0 + 1.0, 0.0))
                .map(|g| g.value.re)
                .unwrap_or(f64::INFINITY);
        LatticeContext {
            mu_sq: covering_radius_sq_bound(&data.gram),
            data,
            weil,
            invariant,
            max_vectors,
            ball_volume,
            cache: Mutex::new(None),
        }
    }

    pub fn spec(&self) -> LatticeSpec {
        self.data.spec
    }

    pub fn l(&self) -> usize {
        self.data.l
    }

    pub fn rank(&self) -> usize {
        self.data.rank()
    }

    pub fn k(&self) -> f64 {
        self.data.k.to_f64().unwrap_or(0.0)
    }

    pub fn max_vectors(&self) -> u64 {
        self.max_vectors
    }

    /// Upper bound mu^2 on the squared covering radius.
    pub fn covering_radius_sq(&self) -> f64 {
        self.mu_sq
    }

    /// Volume of the unit ball in dimension r.
    pub fn ball_volume(&self) -> f64 {
        self.ball_volume
    }

    /// Main term V_r t^{r/2} / sqrt(l) of the per-coset count N(t).
    pub fn weyl_count(&self, t: f64) -> f64 {
        self.ball_volume * t.powf(self.k()) / (self.l() as f64).sqrt()
    }

    /// Spectrum complete at least up to `bound`; reuses a larger cached one.
    pub fn spectrum(&self, bound: Rational) -> Result<Arc<NormSpectrum>, LatticeError> {
        let mut guard = self.cache.lock().expect("spectrum cache poisoned");
        if let Some(s) = guard.as_ref() {
            if s.bound >= bound {
                return Ok(Arc::clone(s));
            }
        }
        let b = bound.to_f64().unwrap_or(f64::INFINITY);
        if self.weyl_count(b) > 1.5 * self.max_vectors as f64 {
            return Err(LatticeError::TooManyVectors {
                bound,
                limit: self.max_vectors,
            });
        }
        let s = Arc::new(norm_spectrum(&self.data, bound, self.max_vectors)?);
        *guard = Some(Arc::clone(&s));
        Ok(s)
    }

    /// Largest bound whose estimated per-coset count stays within `budget`.
    pub fn bound_for_budget(&self, budget: f64) -> f64 {
        let v = self.ball_volume / (self.l() as f64).sqrt();
        (budget / v).powf(1.0 / self.k())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_reuses_larger_spectrum() {
        let ctx = LatticeContext::new("A2".parse().unwrap());
        let big = ctx.spectrum(Rational::from_integer(20)).unwrap();
        let small = ctx.spectrum(Rational::from_integer(5)).unwrap();
        assert!(Arc::ptr_eq(&big, &small));
    }

    #[test]
    fn budget_rejects_huge_bounds() {
        let ctx = LatticeContext::with_max_vectors("E8".parse().unwrap(), 1000);
        assert!(matches!(
            ctx.spectrum(Rational::from_integer(100)),
            Err(LatticeError::TooManyVectors { .. })
        ));
    }

    #[test]
    fn unit_ball_volumes() {
        let v2 = LatticeContext::new("A2".parse().unwrap()).ball_volume();
        assert!((v2 - PI).abs() < 1e-13);
        let v8 = LatticeContext::new("E8".parse().unwrap()).ball_volume();
        assert!((v8 - PI.powi(4) / 24.0).abs() < 1e-13);
    }
}
