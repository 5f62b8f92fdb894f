//! Weil representation of SL(2,Z) (or its metaplectic cover) on C^l.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::lattice::{discriminant_data, DiscriminantData, Family, LatticeSpec, Rational};
use crate::linalg::{sup_diff, CMatrix};

/// e(q) = exp(i pi q), exact at multiples of 1/2.
pub fn phase(q: Rational) -> Complex64 {
    let two = Rational::from_integer(2);
    let r = q - (q / two).floor() * two;
    if r.denom() <= &2 {
        return match (r * 2).to_integer() {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let t = PI * r.to_f64().unwrap_or(0.0);
    Complex64::new(t.cos(), t.sin())
}

#[derive(Debug, Clone)]
pub struct WeilRep {
    pub spec: LatticeSpec,
    pub l: usize,
    pub k: Rational,
    pub rho_s: CMatrix,
    pub rho_t: CMatrix,
    pub rho_c: CMatrix,
    /// a -> index of the class of -w_a
    pub negation: Vec<usize>,
}

impl WeilRep {
    pub fn rho_s_inv(&self) -> CMatrix {
        self.rho_s.adjoint()
    }

    pub fn rho_t_inv(&self) -> CMatrix {
        self.rho_t.adjoint()
    }

    /// Reflection matrix of the Mellin continuation, rho_s^{-1} = conj(rho_s).
    pub fn reflection(&self) -> CMatrix {
        self.rho_s_inv()
    }

    pub fn weight_f64(&self) -> f64 {
        self.k.to_f64().unwrap_or(0.0)
    }
}

pub fn build_weil(data: &DiscriminantData) -> WeilRep {
    let l = data.l;
    let inv_sqrt_l = 1.0 / (l as f64).sqrt();
    let rho_s = CMatrix::from_fn(l, |a, b| phase(-data.coset_inner(a, b) * 2) * inv_sqrt_l);
    let rho_t = CMatrix::from_fn(l, |a, b| {
        if a == b {
            phase(-data.coset_inner(a, a))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let negation: Vec<usize> = (0..l).map(|a| data.coset_negation(a)).collect();
    let rho_c = CMatrix::from_fn(l, |a, b| {
        if negation[b] == a {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    WeilRep {
        spec: data.spec,
        l,
        k: data.k,
        rho_s,
        rho_t,
        rho_c,
        negation,
    }
}

pub fn weil_for(spec: LatticeSpec) -> WeilRep {
    build_weil(&discriminant_data(spec))
}

#[derive(Debug, Clone, Serialize)]
pub struct CenterCheck {
    /// max |rho_s^2 - rho_c|
    pub s_squared_vs_c: f64,
    /// max |rho_c^2 - I|
    pub c_squared_vs_identity: f64,
    /// rho_s^2 is a 0/1 matrix with one 1 per row and column
    pub s_squared_is_permutation: bool,
    /// that permutation is a -> -a
    pub permutation_is_negation: bool,
}

impl CenterCheck {
    pub fn residual(&self) -> f64 {
        self.s_squared_vs_c.max(self.c_squared_vs_identity)
    }
}

pub fn verify_center(rep: &WeilRep) -> CenterCheck {
    let s2 = rep.rho_s.pow(2);
    let l = rep.l;
    let mut is_perm = true;
    let mut perm = vec![usize::MAX; l];
    for j in 0..l {
        let hits: Vec<usize> = (0..l)
            .filter(|&i| (s2[(i, j)] - 1.0).norm() < 1e-9)
            .collect();
        let zeros = (0..l).filter(|&i| s2[(i, j)].norm() < 1e-9).count();
        if hits.len() != 1 || zeros != l - 1 {
            is_perm = false;
        } else {
            perm[j] = hits[0];
        }
    }
    CenterCheck {
        s_squared_vs_c: s2.max_abs_diff(&rep.rho_c),
        c_squared_vs_identity: rep.rho_c.pow(2).max_abs_diff(&CMatrix::identity(l)),
        s_squared_is_permutation: is_perm,
        permutation_is_negation: is_perm && perm == rep.negation,
    }
}

/// Relations of the metaplectic group checked on the representation matrices
/// and on the weight-k operators acting on a probe function.
#[derive(Debug, Clone, Serialize)]
pub struct Mp2Check {
    pub unitarity_s: f64,
    pub unitarity_t: f64,
    pub symmetry_s: f64,
    pub c_involution: f64,
    pub s_squared_vs_c: f64,
    /// zeta with (rho_s rho_t)^3 = zeta rho_c
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub braid_scalar: Complex64,
    /// e(-k/2)
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub braid_scalar_expected: Complex64,
    pub braid_residual: f64,
    /// |zeta - e(-k/2)|
    pub braid_scalar_deviation: f64,
    /// zeta' with (rho_s rho_t^{-1})^3 = zeta' rho_c
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub conjugate_braid_scalar: Complex64,
    pub conjugate_braid_residual: f64,
    /// |zeta' - e(k/2)|
    pub conjugate_braid_scalar_deviation: f64,
    /// max over probe points of |(pi(S) pi(T))^3 F - zeta pi(C) F|
    pub operator_residual: f64,
    /// ratio observed between the two sides of the operator identity
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub operator_scalar: Complex64,
}

impl Mp2Check {
    pub fn unitarity(&self) -> f64 {
        self.unitarity_s.max(self.unitarity_t)
    }

    /// Largest deviation in (rho_s rho_t)^3 = zeta rho_c, |zeta| = 1 and the probe.
    pub fn braid(&self) -> f64 {
        self.braid_residual
            .max((self.braid_scalar.norm() - 1.0).abs())
            .max(self.operator_residual)
    }
}

/// Least-squares scalar z with w ~ z p for a permutation matrix p.
fn fit_scalar(w: &CMatrix, p: &CMatrix) -> Complex64 {
    let n = w.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += p[(i, j)].conj() * w[(i, j)];
        }
    }
    acc / n as f64
}

type Probe<'a> = Box<dyn Fn(Complex64) -> Vec<Complex64> + 'a>;

/// tau^{-k} on the principal branch
fn principal_power(tau: Complex64, k: f64) -> Complex64 {
    (tau.ln() * -k).exp()
}

fn op_t<'a>(rep: &'a WeilRep, f: Probe<'a>) -> Probe<'a> {
    Box::new(move |tau| rep.rho_t.apply(&f(tau + 1.0)))
}

fn op_s<'a>(rep: &'a WeilRep, f: Probe<'a>) -> Probe<'a> {
    let k = rep.weight_f64();
    Box::new(move |tau| {
        let v = rep.rho_s.apply(&f(-tau.inv()));
        let p = principal_power(tau, k);
        v.into_iter().map(|z| z * p).collect()
    })
}

fn probe_function(l: usize) -> Probe<'static> {
    Box::new(move |tau| {
        (0..l)
            .map(|a| {
                let af = a as f64;
                Complex64::new(1.0 + af, 0.0)
                    + tau * (0.5 + 0.25 * af)
                    + tau * tau * Complex64::new(0.1, 0.05 * af)
                    + tau.exp() * 0.01
            })
            .collect()
    })
}

pub fn probe_points() -> [Complex64; 3] {
    [
        Complex64::new(0.2, 1.3),
        Complex64::new(0.7, 0.9),
        Complex64::new(-0.4, 1.1),
    ]
}

pub fn verify_mp2_relations(rep: &WeilRep) -> Mp2Check {
    let l = rep.l;
    let id = CMatrix::identity(l);
    let s = &rep.rho_s;
    let t = &rep.rho_t;
    let unitarity_s = (s * &s.adjoint()).max_abs_diff(&id);
    let unitarity_t = (t * &t.adjoint()).max_abs_diff(&id);
    let symmetry_s = s.max_abs_diff(&CMatrix::from_fn(l, |i, j| s[(j, i)]));
    let c_involution = rep.rho_c.pow(2).max_abs_diff(&id);
    let s_squared_vs_c = s.pow(2).max_abs_diff(&rep.rho_c);
    let w = (s * t).pow(3);
    let zeta = fit_scalar(&w, &rep.rho_c);
    let braid_residual = w.max_abs_diff(&rep.rho_c.scale(zeta));
    let expected = phase(-rep.k / 2);
    let wc = (s * &rep.rho_t_inv()).pow(3);
    let zeta_c = fit_scalar(&wc, &rep.rho_c);

    let mut operator_residual: f64 = 0.0;
    let mut ratio_acc = Complex64::new(0.0, 0.0);
    let e_minus_k = phase(-rep.k);
    for tau in probe_points() {
        let mut g: Probe = probe_function(l);
        for _ in 0..3 {
            g = op_s(rep, op_t(rep, g));
        }
        let lhs = g(tau);
        let f = probe_function(l)(tau);
        let cf: Vec<Complex64> = rep
            .rho_c
            .apply(&f)
            .into_iter()
            .map(|z| z * e_minus_k)
            .collect();
        let rhs: Vec<Complex64> = cf.iter().map(|z| z * zeta).collect();
        operator_residual = operator_residual.max(sup_diff(&lhs, &rhs));
        ratio_acc += lhs[0] / cf[0];
    }
    Mp2Check {
        unitarity_s,
        unitarity_t,
        symmetry_s,
        c_involution,
        s_squared_vs_c,
        braid_scalar: zeta,
        braid_scalar_expected: expected,
        braid_residual,
        braid_scalar_deviation: (zeta - expected).norm(),
        conjugate_braid_scalar: zeta_c,
        conjugate_braid_residual: wc.max_abs_diff(&rep.rho_c.scale(zeta_c)),
        conjugate_braid_scalar_deviation: (zeta_c - phase(rep.k / 2)).norm(),
        operator_residual,
        operator_scalar: ratio_acc / probe_points().len() as f64,
    }
}

/// Eigenspace of rho_c for the eigenvalue e(k): vectors with
/// e(k) rho_c^{-1} x = x.
#[derive(Debug, Clone)]
pub struct CInvariantSubspace {
    pub eigenvalue: Complex64,
    pub dimension: usize,
    pub basis: Vec<Vec<Complex64>>,
    pub projector: CMatrix,
    /// Shape of a general invariant vector, e.g. "(x0, x1, x2, x2, x1)".
    pub pattern: String,
}

impl CInvariantSubspace {
    pub fn project(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.projector.apply(v)
    }

    pub fn is_trivial(&self) -> bool {
        self.dimension == 0
    }
}

/// Pattern of a general vector with component a equal to x_{orbit(a)},
/// -x_{orbit(a)} or 0.
fn format_pattern(entries: &[Option<(bool, usize)>], symbol: &str) -> String {
    let parts: Vec<String> = entries
        .iter()
        .map(|e| match e {
            None => "0".to_string(),
            Some((true, i)) => format!("{symbol}{i}"),
            Some((false, i)) => format!("-{symbol}{i}"),
        })
        .collect();
    format!("({})", parts.join(", "))
}

fn invariant_shape(rep: &WeilRep) -> (Complex64, Vec<Option<(bool, usize)>>) {
    let lambda = phase(rep.k);
    let l = rep.l;
    let mut shape = vec![None; l];
    let real = lambda.im == 0.0;
    if real {
        let plus = lambda.re > 0.0;
        for a in 0..l {
            let b = rep.negation[a];
            if a == b {
                if plus {
                    shape[a] = Some((true, a));
                }
            } else {
                let lo = a.min(b);
                shape[a] = Some((plus || a == lo, lo));
            }
        }
    }
    (lambda, shape)
}

pub fn c_invariant_subspace(rep: &WeilRep) -> CInvariantSubspace {
    let l = rep.l;
    let (lambda, shape) = invariant_shape(rep);
    let mut basis = Vec::new();
    for a in 0..l {
        if shape[a] != Some((true, a)) {
            continue;
        }
        let v: Vec<Complex64> = (0..l)
            .map(|j| match shape[j] {
                Some((true, i)) if i == a => Complex64::new(1.0, 0.0),
                Some((false, i)) if i == a => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, 0.0),
            })
            .collect();
        basis.push(v);
    }
    let projector = if lambda.im == 0.0 {
        CMatrix::identity(l)
            .add(&rep.rho_c.scale(lambda))
            .scale(Complex64::new(0.5, 0.0))
    } else {
        CMatrix::zeros(l)
    };
    CInvariantSubspace {
        eigenvalue: lambda,
        dimension: basis.len(),
        basis,
        projector,
        pattern: format_pattern(&shape, "x"),
    }
}

/// Renders the invariant pattern with another symbol, e.g. "theta".
pub fn pattern_with_symbol(rep: &WeilRep, symbol: &str) -> String {
    format_pattern(&invariant_shape(rep).1, symbol)
}

/// Dimension and shape listed by the classification table for each family.
pub fn tabulated_invariants(spec: LatticeSpec) -> (usize, String) {
    let n = spec.rank();
    let xs = |v: Vec<String>| format!("({})", v.join(", "));
    match spec.family() {
        Family::A if n.is_multiple_of(4) => {
            let m2 = n / 2;
            let mut v: Vec<String> = (0..=m2).map(|i| format!("x{i}")).collect();
            v.extend((1..=m2).rev().map(|i| format!("x{i}")));
            (m2 + 1, xs(v))
        }
        Family::A if n % 4 == 2 => {
            let h = n / 2;
            let mut v = vec!["0".to_string()];
            v.extend((1..=h).map(|i| format!("x{i}")));
            v.extend((1..=h).rev().map(|i| format!("-x{i}")));
            (h, xs(v))
        }
        Family::A => (0, xs(vec!["0".to_string(); n + 1])),
        Family::D if n.is_multiple_of(2) => (4, xs((0..4).map(|i| format!("x{i}")).collect())),
        Family::D => (0, xs(vec!["0".to_string(); 4])),
        Family::E => match n {
            6 => (1, "(0, x1, -x1)".to_string()),
            7 => (0, "(0, 0)".to_string()),
            _ => (1, "(x0)".to_string()),
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationRow {
    pub spec: LatticeSpec,
    pub l: usize,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub k: Rational,
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub eigenvalue: Complex64,
    pub dimension: usize,
    pub pattern: String,
    pub tabulated_dimension: usize,
    pub tabulated_pattern: String,
    pub agrees: bool,
}

pub fn classify(spec: LatticeSpec) -> ClassificationRow {
    let rep = weil_for(spec);
    let inv = c_invariant_subspace(&rep);
    let (td, tp) = tabulated_invariants(spec);
    ClassificationRow {
        spec,
        l: rep.l,
        k: rep.k,
        eigenvalue: inv.eigenvalue,
        dimension: inv.dimension,
        agrees: td == inv.dimension && tp == inv.pattern,
        pattern: inv.pattern,
        tabulated_dimension: td,
        tabulated_pattern: tp,
    }
}

/// Every ADE type of rank at most `max_rank`.
pub fn classify_all(max_rank: usize) -> Vec<ClassificationRow> {
    let mut specs = Vec::new();
    for n in 1..=max_rank {
        specs.push(LatticeSpec::new(Family::A, n));
    }
    for n in 3..=max_rank {
        specs.push(LatticeSpec::new(Family::D, n));
    }
    for n in 6..=max_rank.min(8) {
        specs.push(LatticeSpec::new(Family::E, n));
    }
    specs
        .into_iter()
        .filter_map(Result::ok)
        .map(classify)
        .collect()
}

/// Residual of e(k) rho_c^{-1} x = x, used to confirm invariance of a vector.
pub fn invariance_residual(rep: &WeilRep, x: &[Complex64]) -> f64 {
    let lambda = phase(rep.k);
    let y: Vec<Complex64> = rep.rho_c.apply(x).into_iter().map(|z| z * lambda).collect();
    sup_diff(&y, x)
}
