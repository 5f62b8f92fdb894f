use num_complex::Complex64;

use super::{ComplexValueWithError, NumericsError, EPS};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integration domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ray {
    /// [start, infinity) for integrands with exponential decay.
    ToInfinity {
        start: f64,
    },
    /// (0, 1] after xi = e^{-v}, for integrands with power behaviour at 0.
    UnitInterval,
    Finite {
        a: f64,
        b: f64,
    },
}

const MAX_DEPTH: u32 = 40;
const MAX_PIECES: usize = 80;

fn gk15<F: FnMut(f64) -> Vec<Complex64>>(
    f: &mut F,
    a: f64,
    b: f64,
    dim: usize,
) -> (Vec<Complex64>, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k = vec![Complex64::new(0.0, 0.0); dim];
    let mut g = vec![Complex64::new(0.0, 0.0); dim];
    let fc = f(mid);
    for i in 0..dim {
        k[i] += fc[i] * WGK[7];
        g[i] += fc[i] * WG[3];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        for i in 0..dim {
            let s = f1[i] + f2[i];
            k[i] += s * WGK[j];
            if j % 2 == 1 {
                g[i] += s * WG[j / 2];
            }
        }
    }
    let mut err: f64 = 0.0;
    for i in 0..dim {
        k[i] *= half;
        g[i] *= half;
        err = err.max((k[i] - g[i]).norm());
    }
    (k, err)
}

fn adapt<F: FnMut(f64) -> Vec<Complex64>>(
    f: &mut F,
    a: f64,
    b: f64,
    dim: usize,
    tol: f64,
    depth: u32,
) -> (Vec<Complex64>, f64) {
    let (k, err) = gk15(f, a, b, dim);
    let scale = k.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if err <= tol.max(50.0 * EPS * scale) || depth >= MAX_DEPTH {
        return (k, err);
    }
    let m = 0.5 * (a + b);
    let (mut l, el) = adapt(f, a, m, dim, 0.5 * tol, depth + 1);
    let (r, er) = adapt(f, m, b, dim, 0.5 * tol, depth + 1);
    for (x, y) in l.iter_mut().zip(r) {
        *x += y;
    }
    (l, el + er)
}

fn to_infinity<F: FnMut(f64) -> Vec<Complex64>>(
    f: &mut F,
    start: f64,
    dim: usize,
    tol: f64,
) -> Result<(Vec<Complex64>, f64), NumericsError> {
    let mut total = vec![Complex64::new(0.0, 0.0); dim];
    let mut err = 0.0;
    let mut a = start;
    let mut width = 1.0;
    let mut quiet = 0;
    for _ in 0..MAX_PIECES {
        let (piece, e) = adapt(f, a, a + width, dim, 0.25 * tol, 0);
        let mag = piece.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (t, p) in total.iter_mut().zip(&piece) {
            *t += p;
        }
        err += e;
        a += width;
        width *= 2.0;
        if mag < 1e-3 * tol {
            quiet += 1;
            if quiet >= 2 {
                return Ok((total, err + mag));
            }
        } else {
            quiet = 0;
        }
    }
    Err(NumericsError::NoConvergence {
        what: "integral over a ray",
        iterations: MAX_PIECES,
    })
}

/// Integrates a vector-valued function over `ray` to absolute tolerance `tol`.
pub fn integrate_ray_vec<F: FnMut(f64) -> Vec<Complex64>>(
    mut f: F,
    dim: usize,
    ray: Ray,
    tol: f64,
) -> Result<Vec<ComplexValueWithError>, NumericsError> {
    let (v, err) = match ray {
        Ray::ToInfinity { start } => to_infinity(&mut f, start, dim, tol)?,
        Ray::UnitInterval => {
            let mut g = |v: f64| {
                let w = (-v).exp();
                f(w).into_iter().map(|z| z * w).collect()
            };
            to_infinity(&mut g, 0.0, dim, tol)?
        }
        Ray::Finite { a, b } => adapt(&mut f, a, b, dim, tol, 0),
    };
    Ok(v.into_iter()
        .map(|z| ComplexValueWithError::new(z, err))
        .collect())
}

pub fn integrate_ray<F: FnMut(f64) -> Complex64>(
    mut f: F,
    ray: Ray,
    tol: f64,
) -> Result<ComplexValueWithError, NumericsError> {
    let out = integrate_ray_vec(|x| vec![f(x)], 1, ray, tol)?;
    Ok(out[0])
}
