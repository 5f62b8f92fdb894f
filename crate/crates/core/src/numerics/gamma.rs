use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::{ComplexValueWithError, NumericsError, EPS};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2n} / (2n (2n - 1)) for n = 1..10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn is_pole(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

/// ln Gamma(s), continuous along Re s >= 1/2, reflected elsewhere.
pub fn log_gamma(s: Complex64) -> Result<ComplexValueWithError, NumericsError> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(NumericsError::Domain(format!("non-finite argument {s}")));
    }
    if is_pole(s) {
        return Err(NumericsError::Pole(s));
    }
    if s.re < 0.5 {
        let sin = (s * PI).sin();
        let refl = log_gamma(Complex64::new(1.0, 0.0) - s)?;
        let v = c(PI.ln(), 0.0) - sin.ln() - refl.value;
        let err = refl.abs_error + 4.0 * EPS * (1.0 + (s * PI).norm() + v.norm());
        return Ok(ComplexValueWithError::new(v, err));
    }
    let mut z = s;
    let mut shift = c(0.0, 0.0);
    let mut shift_mag = 0.0;
    while z.norm() < 15.0 {
        let l = z.ln();
        shift += l;
        shift_mag += l.norm();
        z += 1.0;
    }
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut series = c(0.0, 0.0);
    let mut p = zinv;
    for coef in STIRLING {
        series += p * coef;
        p *= zinv2;
    }
    let main = (z - 0.5) * z.ln() - z + HALF_LN_2PI;
    let v = main + series - shift;
    let err = 4.0 * EPS * (main.norm() + shift_mag + 1.0);
    Ok(ComplexValueWithError::new(v, err))
}

pub fn gamma(s: Complex64) -> Result<ComplexValueWithError, NumericsError> {
    let lg = log_gamma(s)?;
    let v = lg.value.exp();
    Ok(ComplexValueWithError::new(
        v,
        v.norm() * (lg.abs_error + 2.0 * EPS),
    ))
}

/// zeta(k) for k = 0..=60 (entries 0 and 1 unused), via Euler-Maclaurin.
fn zeta_table() -> &'static [f64; 61] {
    static TABLE: OnceLock<[f64; 61]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // B_{2j}/(2j)! for j = 1..7
        const BF: [f64; 7] = [
            1.0 / 12.0,
            -1.0 / 720.0,
            1.0 / 30240.0,
            -1.0 / 1_209_600.0,
            1.0 / 47_900_160.0,
            -691.0 / 1_307_674_368_000.0,
            1.0 / 74_724_249_600.0,
        ];
        let n = 15.0f64;
        let mut t = [0.0; 61];
        for (k, slot) in t.iter_mut().enumerate().skip(2) {
            let kf = k as f64;
            let mut acc = 0.0;
            for m in (1..15).rev() {
                acc += (m as f64).powf(-kf);
            }
            acc += n.powf(1.0 - kf) / (kf - 1.0) + 0.5 * n.powf(-kf);
            let mut rising = kf;
            let mut pw = n.powf(-kf - 1.0);
            for (j, b) in BF.iter().enumerate() {
                acc += b * rising * pw;
                let j2 = 2.0 * j as f64;
                rising *= (kf + j2 + 1.0) * (kf + j2 + 2.0);
                pw /= n * n;
            }
            *slot = acc;
        }
        t
    })
}

/// ln Gamma(1+z)/z for |z| <= 1/2, from the Taylor series with zeta coefficients.
fn lngamma1p_over_z(z: Complex64) -> Complex64 {
    let zt = zeta_table();
    let mut acc = c(-EULER_GAMMA, 0.0);
    let mut p = z;
    for (k, zk) in zt.iter().enumerate().skip(2) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = p * (sign * zk / k as f64);
        acc += term;
        if term.norm() < 1e-18 * acc.norm() {
            break;
        }
        p *= z;
    }
    acc
}

/// (e^z - 1)/z
fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let mut term = c(1.0, 0.0);
        let mut acc = term;
        for n in 2..40 {
            term = term * z / n as f64;
            acc += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        acc
    } else {
        (z.exp() - 1.0) / z
    }
}

/// (Gamma(1+s) - 1)/s, smooth through s = 0.
fn gamma1p_minus_one_over_s(s: Complex64) -> Result<Complex64, NumericsError> {
    if s.norm() <= 0.5 {
        let q = lngamma1p_over_z(s);
        Ok(exprel(q * s) * q)
    } else {
        Ok((gamma(s + 1.0)?.value - 1.0) / s)
    }
}

/// Relative condition number of x^s e^{-x} under rounding of its exponent.
fn power_condition(s: Complex64, x: f64) -> f64 {
    s.norm() * x.ln().abs() + x
}

const MAX_CF_ITERATIONS: usize = 20_000;

/// Legendre continued fraction by the modified Lentz method.
fn upper_cf(s: Complex64, x: f64) -> Result<ComplexValueWithError, NumericsError> {
    let tiny = 1e-300;
    let guard = |v: Complex64| if v.norm() < tiny { c(tiny, 0.0) } else { v };
    let mut b = c(x + 1.0, 0.0) - s;
    let mut f = guard(b);
    let mut cc = f;
    let mut d = c(0.0, 0.0);
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        // a_n = -n (n - s)
        let a = (c(nf, 0.0) - s) * -nf;
        b += 2.0;
        d = guard(b + a * d).inv();
        cc = guard(b + a / cc);
        let delta = cc * d;
        f *= delta;
        if (delta - 1.0).norm() < EPS {
            break;
        }
        n += 1;
        if n > MAX_CF_ITERATIONS {
            return Err(NumericsError::NoConvergence {
                what: "incomplete gamma continued fraction",
                iterations: n,
            });
        }
    }
    let pref = (s * x.ln() - x).exp();
    let v = pref / f;
    let err = v.norm() * EPS * (8.0 + 2.0 * (n as f64).sqrt() + power_condition(s, x));
    Ok(ComplexValueWithError::new(v, err))
}

/// gamma(s, x) = x^s e^{-x} sum_n x^n / (s)_{n+1}; returns value and the
/// magnitude scale of the summed terms.
fn lower_series(s: Complex64, x: f64) -> Result<(Complex64, f64), NumericsError> {
    let mut term = s.inv();
    let mut acc = term;
    let mut mag = term.norm();
    let mut n = 1usize;
    loop {
        term = term * x / (s + n as f64);
        acc += term;
        mag = mag.max(term.norm());
        if n as f64 > x && term.norm() < 1e-17 * acc.norm() {
            break;
        }
        n += 1;
        if n > MAX_CF_ITERATIONS {
            return Err(NumericsError::NoConvergence {
                what: "lower incomplete gamma series",
                iterations: n,
            });
        }
    }
    let pref = (s * x.ln() - x).exp();
    Ok((
        pref * acc,
        pref.norm() * mag * (1.0 + power_condition(s, x)),
    ))
}

/// Gamma(s', x) for |Re s'| <= 1/2 and x < 1 through the form that stays
/// finite as s' -> 0.
fn upper_small_x(s: Complex64, x: f64) -> Result<ComplexValueWithError, NumericsError> {
    let lx = x.ln();
    let first = gamma1p_minus_one_over_s(s)?;
    let second = exprel(s * lx) * lx;
    let mut tail = c(0.0, 0.0);
    let mut mag: f64 = 0.0;
    let mut fact = 1.0;
    let mut xpow = (s * lx).exp();
    for n in 1..200 {
        fact *= n as f64;
        xpow *= x;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = xpow * sign / ((s + n as f64) * fact);
        tail += term;
        mag = mag.max(term.norm());
        if term.norm() < 1e-18 * (1.0 + tail.norm()) {
            break;
        }
    }
    let v = first - second - tail;
    let err =
        8.0 * EPS * (first.norm() + second.norm() * (1.0 + power_condition(s, x)) + mag + v.norm());
    Ok(ComplexValueWithError::new(v, err))
}

/// Upper incomplete gamma Gamma(s, x) for complex s and real x > 0.
pub fn upper_incomplete_gamma(
    s: Complex64,
    x: f64,
) -> Result<ComplexValueWithError, NumericsError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(NumericsError::Domain(format!(
            "x must be positive and finite, got {x}"
        )));
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(NumericsError::Domain(format!("non-finite s = {s}")));
    }
    if x >= s.norm() + 2.0 {
        return upper_cf(s, x);
    }
    if s.re > 0.5 {
        let g = gamma(s)?;
        let (low, mag) = lower_series(s, x)?;
        let v = g.value - low;
        let err = g.abs_error + 8.0 * EPS * (mag + low.norm() + v.norm());
        return Ok(ComplexValueWithError::new(v, err));
    }
    if x >= 1.0 {
        return upper_cf(s, x);
    }
    // shift to |Re s'| <= 1/2 and recur downwards
    let shift = (-s.re - 0.5).ceil().max(0.0) as usize;
    let mut sp = s + shift as f64;
    let base = upper_small_x(sp, x)?;
    let mut v = base.value;
    let mut err = base.abs_error;
    let lx = x.ln();
    for _ in 0..shift {
        let sm1 = sp - 1.0;
        let t = (sm1 * lx - x).exp();
        v = (v - t) / sm1;
        err = (err
            + 2.0 * EPS * (t.norm() * (1.0 + power_condition(sm1, x)) + v.norm() * sm1.norm()))
            / sm1.norm();
        sp = sm1;
    }
    Ok(ComplexValueWithError::new(v, err))
}

/// Real-argument convenience used by truncation bounds.
pub fn upper_incomplete_gamma_real(s: f64, x: f64) -> Result<f64, NumericsError> {
    Ok(upper_incomplete_gamma(Complex64::new(s, 0.0), x)?.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    #[test]
    fn gamma_at_integers_and_half() {
        let mut f = 1.0;
        for n in 1..20 {
            let g = gamma(c(n as f64, 0.0)).unwrap().value;
            assert!(close(g, c(f, 0.0), 1e-13), "Gamma({n})");
            f *= n as f64;
        }
        let h = gamma(c(0.5, 0.0)).unwrap().value;
        assert!(close(h, c(PI.sqrt(), 0.0), 1e-14));
        let m = gamma(c(-0.5, 0.0)).unwrap().value;
        assert!(close(m, c(-2.0 * PI.sqrt(), 0.0), 1e-14));
    }

    #[test]
    fn poles_rejected() {
        assert!(matches!(
            log_gamma(c(0.0, 0.0)),
            Err(NumericsError::Pole(_))
        ));
        assert!(matches!(gamma(c(-3.0, 0.0)), Err(NumericsError::Pole(_))));
        assert!(gamma(c(-3.0, 1e-9)).is_ok());
    }

    #[test]
    fn zeta_values() {
        let z = zeta_table();
        assert!((z[2] - PI * PI / 6.0).abs() < 1e-15);
        assert!((z[4] - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((z[3] - 1.202_056_903_159_594_3).abs() < 1e-15);
        assert!((z[60] - 1.0).abs() < 1e-17);
    }

    #[test]
    fn gamma1p_series_matches_direct() {
        for z in [c(0.3, 0.1), c(-0.4, 0.2), c(0.0, 0.45), c(0.49, 0.0)] {
            let direct = (gamma(z + 1.0).unwrap().value - 1.0) / z;
            assert!(close(gamma1p_minus_one_over_s(z).unwrap(), direct, 1e-13));
        }
        assert!(close(
            gamma1p_minus_one_over_s(c(0.0, 0.0)).unwrap(),
            c(-EULER_GAMMA, 0.0),
            1e-15
        ));
    }

    #[test]
    fn incomplete_gamma_closed_forms() {
        // Gamma(1, x) = e^{-x}
        for x in [0.01, 0.5, 1.0, 3.0, 20.0, 300.0] {
            let v = upper_incomplete_gamma(c(1.0, 0.0), x).unwrap().value;
            assert!(close(v, c((-x).exp(), 0.0), 1e-13), "x = {x}");
        }
        // Gamma(1/2, x) = sqrt(pi) erfc(sqrt x); erfc(1) = 0.157299207050285...
        let v = upper_incomplete_gamma(c(0.5, 0.0), 1.0).unwrap().value;
        assert!(close(
            v,
            c(PI.sqrt() * 0.157_299_207_050_285_13, 0.0),
            1e-13
        ));
        // Gamma(0, 1) = E1(1)
        let v = upper_incomplete_gamma(c(0.0, 0.0), 1.0).unwrap().value;
        assert!(close(v, c(0.219_383_934_395_520_27, 0.0), 1e-13));
        let v = upper_incomplete_gamma(c(0.0, 0.0), 0.1).unwrap().value;
        assert!(close(v, c(1.822_923_958_419_390_7, 0.0), 1e-13));
    }

    #[test]
    fn incomplete_gamma_recurrence() {
        for &(s, x) in &[
            (c(2.3, 1.1), 0.7),
            (c(-1.7, 3.0), 0.2),
            (c(-4.2, -0.5), 2.5),
            (c(0.4, 8.0), 5.0),
        ] {
            let a = upper_incomplete_gamma(s + 1.0, x).unwrap().value;
            let b = upper_incomplete_gamma(s, x).unwrap().value;
            let rhs = s * b + (s * x.ln() - x).exp();
            assert!(close(a, rhs, 1e-12), "s = {s}, x = {x}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(upper_incomplete_gamma(c(1.0, 0.0), 0.0).is_err());
        assert!(upper_incomplete_gamma(c(1.0, 0.0), f64::NAN).is_err());
    }
}
