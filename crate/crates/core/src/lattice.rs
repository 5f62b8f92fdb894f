//! ADE root lattices in simple-root coordinates.
//!
//! Everything here is exact: Cartan matrices are integer, weights and coset
//! shifts are `Ratio<i64>`, and norm enumeration runs entirely in integer
//! arithmetic after clearing denominators of the triangular decomposition.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_integer::{Integer, Roots};
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = Ratio<i64>;

/// Default largest rank accepted by [`LatticeSpec::new`].
pub const DEFAULT_RANK_CEILING: usize = 24;

/// Default cap on the number of vectors a single coset enumeration may visit.
pub const DEFAULT_MAX_VECTORS: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("invalid rank {rank} for family {family}: {reason}")]
    InvalidRank {
        family: Family,
        rank: usize,
        reason: String,
    },
    #[error("cannot parse lattice spec {0:?}: expected a family in {{A, D, E}} followed by a rank, e.g. \"A4\", \"D5\", \"E8\"")]
    Parse(String),
    #[error("coset index {index} out of range for a discriminant group of order {order}")]
    CosetOutOfRange { index: usize, order: usize },
    #[error("norm bound must be positive, got {0}")]
    NonPositiveBound(Rational),
    #[error("enumeration up to norm {bound} exceeds the vector ceiling of {limit} vectors")]
    TooManyVectors { bound: Rational, limit: u64 },
    #[error("integer overflow while scaling the quadratic form (bound {0} too large)")]
    Overflow(Rational),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    D,
    E,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::A => "A",
            Family::D => "D",
            Family::E => "E",
        };
        f.write_str(c)
    }
}

/// An ADE type: family tag plus rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeSpec {
    family: Family,
    rank: usize,
}

impl LatticeSpec {
    pub fn new(family: Family, rank: usize) -> Result<Self, LatticeError> {
        Self::with_ceiling(family, rank, DEFAULT_RANK_CEILING)
    }

    pub fn with_ceiling(family: Family, rank: usize, ceiling: usize) -> Result<Self, LatticeError> {
        let bad = |reason: &str| LatticeError::InvalidRank {
            family,
            rank,
            reason: reason.to_string(),
        };
        match family {
            Family::A if rank < 1 => return Err(bad("A_n needs n >= 1")),
            Family::D if rank < 3 => return Err(bad("D_n needs n >= 3")),
            Family::E if !(6..=8).contains(&rank) => return Err(bad("E_n needs n in {6, 7, 8}")),
            _ => {}
        }
        if rank > ceiling {
            return Err(bad(&format!("rank ceiling is {ceiling}")));
        }
        Ok(LatticeSpec { family, rank })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Weight k = r/2.
    pub fn weight(&self) -> Rational {
        Rational::new(self.rank as i64, 2)
    }

    /// The default verification set: A1..A8, D4..D8, E6, E7, E8.
    pub fn default_set() -> Vec<LatticeSpec> {
        let mut out = Vec::new();
        for n in 1..=8 {
            out.push(LatticeSpec {
                family: Family::A,
                rank: n,
            });
        }
        for n in 4..=8 {
            out.push(LatticeSpec {
                family: Family::D,
                rank: n,
            });
        }
        for n in 6..=8 {
            out.push(LatticeSpec {
                family: Family::E,
                rank: n,
            });
        }
        out
    }
}

/// Order of the discriminant group as listed in the standard tables:
/// n + 1 for A_n, 4 for D_n, 3, 2, 1 for E6, E7, E8.
pub fn tabulated_order(spec: LatticeSpec) -> usize {
    match spec.family() {
        Family::A => spec.rank() + 1,
        Family::D => 4,
        Family::E => 9 - spec.rank(),
    }
}

/// Number of roots: n(n+1) for A_n, 2n(n-1) for D_n, 72, 126, 240 for E6, E7, E8.
pub fn tabulated_root_count(spec: LatticeSpec) -> u64 {
    let n = spec.rank() as u64;
    match spec.family() {
        Family::A => n * (n + 1),
        Family::D => 2 * n * (n - 1),
        Family::E => match n {
            6 => 72,
            7 => 126,
            _ => 240,
        },
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

impl FromStr for LatticeSpec {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let mut chars = t.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('D') => Family::D,
            Some('E') => Family::E,
            _ => return Err(LatticeError::Parse(s.to_string())),
        };
        let rank: usize = chars
            .as_str()
            .trim_start_matches('_')
            .parse()
            .map_err(|_| LatticeError::Parse(s.to_string()))?;
        LatticeSpec::new(family, rank)
    }
}

impl Serialize for LatticeSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LatticeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Symmetric integer Gram matrix of the simple roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    entries: Vec<Vec<i64>>,
}

impl GramMatrix {
    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i64 {
        let n = self.rank();
        let mut m: Vec<Vec<i128>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if m[k][k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                    return 0;
                };
                m.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
            }
            prev = m[k][k];
        }
        (sign * m[n - 1][n - 1]) as i64
    }

    /// (x, y) for rational vectors in simple-root coordinates.
    pub fn inner(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                let g = self.entries[i][j];
                if g != 0 {
                    acc += xi * yj * g;
                }
            }
        }
        acc
    }
}

/// Cartan matrix in Bourbaki numbering.
pub fn cartan_matrix(spec: LatticeSpec) -> GramMatrix {
    let n = spec.rank();
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |a: usize, b: usize| {
        m[a][b] = -1;
        m[b][a] = -1;
    };
    match spec.family() {
        Family::A => {
            for i in 0..n - 1 {
                link(i, i + 1);
            }
        }
        Family::D => {
            for i in 0..n - 2 {
                link(i, i + 1);
            }
            // fork: alpha_{n-2} joins both alpha_{n-1} and alpha_n
            link(n - 3, n - 1);
        }
        Family::E => {
            link(0, 2);
            link(1, 3);
            for i in 2..n - 1 {
                link(i, i + 1);
            }
        }
    }
    GramMatrix { entries: m }
}

/// Exact inverse of a nonsingular integer matrix.
fn rational_inverse(g: &GramMatrix) -> Vec<Vec<Rational>> {
    let n = g.rank();
    let mut a: Vec<Vec<Rational>> = g
        .rows()
        .iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
        .collect();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("Cartan matrices are nonsingular");
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let (acj, icj) = (a[col][j], inv[col][j]);
                    a[r][j] -= f * acj;
                    inv[r][j] -= f * icj;
                }
            }
        }
    }
    inv
}

/// Fundamental weights as rows, in simple-root coordinates. Since
/// (alpha_j, w_a) = delta_ja, row a is row a of the inverse Cartan matrix,
/// which is also the weight Gram matrix.
pub fn fundamental_weights(spec: LatticeSpec) -> Vec<Vec<Rational>> {
    rational_inverse(&cartan_matrix(spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupType {
    Cyclic { order: usize },
    KleinFour,
}

/// Root lattice data together with its discriminant group P/Q.
#[derive(Debug, Clone)]
pub struct DiscriminantData {
    pub spec: LatticeSpec,
    pub gram: GramMatrix,
    pub weight_gram: Vec<Vec<Rational>>,
    pub l: usize,
    /// Coset representatives in simple-root coordinates; index 0 is zero.
    pub cosets: Vec<Vec<Rational>>,
    /// Human-readable name of each representative ("0", "w1", ...).
    pub coset_labels: Vec<String>,
    pub group_type: GroupType,
    pub k: Rational,
}

impl DiscriminantData {
    pub fn rank(&self) -> usize {
        self.spec.rank()
    }

    /// (w_a, w_b) for coset representatives.
    pub fn coset_inner(&self, a: usize, b: usize) -> Rational {
        self.gram.inner(&self.cosets[a], &self.cosets[b])
    }

    /// Index c of the class of w_a + w_b, found by exact root-lattice membership.
    pub fn coset_sum(&self, a: usize, b: usize) -> usize {
        let v: Vec<Rational> = self.cosets[a]
            .iter()
            .zip(&self.cosets[b])
            .map(|(x, y)| x + y)
            .collect();
        self.class_of(&v)
            .expect("sum of weights lies in the weight lattice")
    }

    /// Index of the class of -w_a.
    pub fn coset_negation(&self, a: usize) -> usize {
        let v: Vec<Rational> = self.cosets[a].iter().map(|x| -x).collect();
        self.class_of(&v)
            .expect("negated weight lies in the weight lattice")
    }

    /// Class index of a weight-lattice vector, or `None` if it is not in P.
    pub fn class_of(&self, v: &[Rational]) -> Option<usize> {
        (0..self.l).find(|&c| {
            v.iter()
                .zip(&self.cosets[c])
                .all(|(x, y)| (x - y).is_integer())
        })
    }

    pub fn gram_times_weights_is_identity(&self) -> bool {
        let n = self.rank();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let mut acc = Rational::zero();
                for m in 0..n {
                    acc += self.weight_gram[i][m] * self.gram.entry(m, j);
                }
                acc == if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
        })
    }
}

pub fn in_root_lattice(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// Builds the discriminant data with the coset ordering used throughout:
/// A_n by w_1..w_n, D_odd by (0, w_{n-1}, w_1, w_n) so that class a = a*w_{n-1},
/// D_even by (0, w_1, w_{n-1}, w_n), E6 by (0, w_1, w_6), E7 by (0, w_7).
pub fn discriminant_data(spec: LatticeSpec) -> DiscriminantData {
    let gram = cartan_matrix(spec);
    let weights = fundamental_weights(spec);
    let n = spec.rank();
    let l = gram.determinant() as usize;
    // 1-based Bourbaki indices of the nontrivial representatives
    let picks: Vec<usize> = match spec.family() {
        Family::A => (1..=n).collect(),
        Family::D if n % 2 == 1 => vec![n - 1, 1, n],
        Family::D => vec![1, n - 1, n],
        Family::E => match n {
            6 => vec![1, 6],
            7 => vec![7],
            _ => vec![],
        },
    };
    let mut cosets = vec![vec![Rational::zero(); n]];
    let mut coset_labels = vec!["0".to_string()];
    for &i in &picks {
        cosets.push(weights[i - 1].clone());
        coset_labels.push(format!("w{i}"));
    }
    let group_type = if spec.family() == Family::D && n.is_multiple_of(2) {
        GroupType::KleinFour
    } else {
        GroupType::Cyclic { order: l }
    };
    DiscriminantData {
        spec,
        gram,
        weight_gram: weights,
        l,
        cosets,
        coset_labels,
        group_type,
        k: spec.weight(),
    }
}

/// Multiplicity of one shifted norm value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NormCount {
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub norm: Rational,
    pub count: u64,
}

/// Norm/multiplicity pairs for every coset, complete up to `bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSpectrum {
    pub bound: Rational,
    pub cosets: Vec<Vec<NormCount>>,
}

impl NormSpectrum {
    pub fn coset(&self, a: usize) -> &[NormCount] {
        &self.cosets[a]
    }

    /// Total number of vectors counted across all cosets.
    pub fn total_vectors(&self) -> u64 {
        self.cosets.iter().flatten().map(|e| e.count).sum()
    }

    /// Restriction to norms not exceeding `bound`.
    pub fn truncated(&self, bound: Rational) -> NormSpectrum {
        NormSpectrum {
            bound: bound.min(self.bound),
            cosets: self
                .cosets
                .iter()
                .map(|c| c.iter().copied().filter(|e| e.norm <= bound).collect())
                .collect(),
        }
    }
}

/// Exact LDL^T data of the Gram form with denominators cleared.
///
/// Writing x = n + w, Q(x) = sum_k D_k u_k^2 with u_k = x_k + sum_{i>k} L_ik x_i.
/// `scale_u` makes every scale_u * u_k integral for shifts with denominator
/// dividing `l`; `diag[k]` is the integer D_k * lcm(den D) .
struct ScaledForm {
    rank: usize,
    scale_u: i128,
    diag: Vec<i128>,
    /// off[k][i] = scale_u * L_ik for i > k
    off: Vec<Vec<i128>>,
    /// S such that S * Q(x) is an integer
    scale_q: i128,
}

fn ldl(gram: &GramMatrix) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let n = gram.rank();
    let mut d = vec![Rational::zero(); n];
    let mut lo = vec![vec![Rational::zero(); n]; n];
    for j in 0..n {
        let mut dj = Rational::from_integer(gram.entry(j, j));
        for k in 0..j {
            dj -= lo[j][k] * lo[j][k] * d[k];
        }
        d[j] = dj;
        lo[j][j] = Rational::one();
        for i in j + 1..n {
            let mut v = Rational::from_integer(gram.entry(i, j));
            for k in 0..j {
                v -= lo[i][k] * lo[j][k] * d[k];
            }
            lo[i][j] = v / dj;
        }
    }
    (d, lo)
}

/// Diagonal of the exact LDL^T factorisation (squared Gram-Schmidt lengths).
pub fn ldl_diagonal(gram: &GramMatrix) -> Vec<Rational> {
    ldl(gram).0
}

fn lcm_i128(a: i128, b: i128) -> i128 {
    a / a.gcd(&b) * b
}

impl ScaledForm {
    fn new(gram: &GramMatrix, l: usize) -> ScaledForm {
        let n = gram.rank();
        let (d, lo) = ldl(gram);
        let mut den_l = 1i128;
        for i in 0..n {
            for k in 0..i {
                den_l = lcm_i128(den_l, *lo[i][k].denom() as i128);
            }
        }
        let scale_u = den_l * l as i128;
        let mut den_d = 1i128;
        for dk in &d {
            den_d = lcm_i128(den_d, *dk.denom() as i128);
        }
        let diag = d
            .iter()
            .map(|dk| *dk.numer() as i128 * (den_d / *dk.denom() as i128))
            .collect();
        let off = (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        if i > k {
                            let r = lo[i][k];
                            *r.numer() as i128 * (scale_u / *r.denom() as i128)
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        ScaledForm {
            rank: n,
            scale_u,
            diag,
            off,
            scale_q: den_d * scale_u * scale_u,
        }
    }
}

/// Depth-first enumeration of the integer points n with Q(n + shift) <= bound.
struct Enumerator<'a, F: FnMut(&[i64], i128)> {
    form: &'a ScaledForm,
    /// scale_u * shift_k + sum_{i>k} scale_u * L_ik * shift_i, per level
    base: Vec<i128>,
    coords: Vec<i64>,
    visit: F,
    visited: u64,
    limit: u64,
}

impl<'a, F: FnMut(&[i64], i128)> Enumerator<'a, F> {
    fn run(&mut self, level: usize, remaining: i128, bound_scaled: i128) -> bool {
        let f = self.form;
        let mut center = self.base[level];
        for i in level + 1..f.rank {
            center += f.off[level][i] * self.coords[i] as i128;
        }
        let e = f.diag[level];
        let t = (remaining / e).sqrt();
        // U = scale_u * n + center with |U| <= t
        let lo = Integer::div_ceil(&(-center - t), &f.scale_u);
        let hi = Integer::div_floor(&(-center + t), &f.scale_u);
        for n in lo..=hi {
            let u = f.scale_u * n + center;
            let used = e * u * u;
            if used > remaining {
                continue;
            }
            self.coords[level] = n as i64;
            if level == 0 {
                self.visited += 1;
                if self.visited > self.limit {
                    return false;
                }
                (self.visit)(&self.coords, bound_scaled - (remaining - used));
            } else if !self.run(level - 1, remaining - used, bound_scaled) {
                return false;
            }
        }
        true
    }
}

/// Calls `visit(coords, S*norm)` for every gamma in Q with
/// (gamma + shift, gamma + shift) <= bound; returns the scale S.
fn visit_shifted<F: FnMut(&[i64], i128)>(
    data: &DiscriminantData,
    shift: &[Rational],
    bound: Rational,
    limit: u64,
    visit: F,
) -> Result<i128, LatticeError> {
    if bound <= Rational::zero() {
        return Err(LatticeError::NonPositiveBound(bound));
    }
    let form = ScaledForm::new(&data.gram, data.l);
    let n = form.rank;
    let bound_scaled = (*bound.numer() as i128)
        .checked_mul(form.scale_q)
        .map(|x| x / *bound.denom() as i128)
        .ok_or(LatticeError::Overflow(bound))?;
    let (_, lo) = ldl(&data.gram);
    let shift_u: Vec<Rational> = shift.iter().map(|w| w * form.scale_u as i64).collect();
    let mut base = vec![0i128; n];
    for k in 0..n {
        let mut acc = shift_u[k];
        for i in k + 1..n {
            acc += lo[i][k] * shift_u[i];
        }
        debug_assert!(acc.is_integer());
        base[k] = acc.to_integer() as i128;
    }
    let mut en = Enumerator {
        form: &form,
        base,
        coords: vec![0; n],
        visit,
        visited: 0,
        limit,
    };
    if !en.run(n - 1, bound_scaled, bound_scaled) {
        return Err(LatticeError::TooManyVectors { bound, limit });
    }
    Ok(form.scale_q)
}

fn to_rational(num: i128, den: i128) -> Rational {
    let g = num.gcd(&den);
    Rational::new_raw(
        (num / g).to_i64().expect("reduced norm fits in i64"),
        (den / g).to_i64().expect("reduced denominator fits in i64"),
    )
}

/// Norm spectrum of the shifted lattice Q + shift up to `bound`,
/// excluding the zero vector.
pub fn enumerate_shifted(
    data: &DiscriminantData,
    shift: &[Rational],
    bound: Rational,
    limit: u64,
) -> Result<Vec<NormCount>, LatticeError> {
    let mut counts: HashMap<i128, u64> = HashMap::new();
    let scale = visit_shifted(data, shift, bound, limit, |_, q| {
        if q != 0 {
            *counts.entry(q).or_insert(0) += 1;
        }
    })?;
    let mut out: Vec<NormCount> = counts
        .into_iter()
        .map(|(q, c)| NormCount {
            norm: to_rational(q, scale),
            count: c,
        })
        .collect();
    out.sort_by_key(|e| e.norm);
    Ok(out)
}

/// Norm/multiplicity pairs of coset `coset_index` up to `bound`.
pub fn enumerate_norms(
    data: &DiscriminantData,
    coset_index: usize,
    bound: Rational,
    limit: u64,
) -> Result<Vec<NormCount>, LatticeError> {
    if coset_index >= data.l {
        return Err(LatticeError::CosetOutOfRange {
            index: coset_index,
            order: data.l,
        });
    }
    enumerate_shifted(data, &data.cosets[coset_index], bound, limit)
}

/// Every vector gamma + w_a with its exact norm; for small bounds and tests.
pub fn enumerate_vectors(
    data: &DiscriminantData,
    coset_index: usize,
    bound: Rational,
    limit: u64,
) -> Result<Vec<(Vec<Rational>, Rational)>, LatticeError> {
    if coset_index >= data.l {
        return Err(LatticeError::CosetOutOfRange {
            index: coset_index,
            order: data.l,
        });
    }
    let shift = &data.cosets[coset_index];
    let mut out = Vec::new();
    let scale = visit_shifted(data, shift, bound, limit, |n, q| {
        let v: Vec<Rational> = n.iter().zip(shift).map(|(&c, w)| w + c).collect();
        out.push((v, q));
    })?;
    Ok(out
        .into_iter()
        .map(|(v, q)| (v, to_rational(q, scale)))
        .collect())
}

/// Spectrum of every coset up to `bound`.
pub fn norm_spectrum(
    data: &DiscriminantData,
    bound: Rational,
    limit: u64,
) -> Result<NormSpectrum, LatticeError> {
    let cosets = (0..data.l)
        .map(|a| enumerate_norms(data, a, bound, limit))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NormSpectrum { bound, cosets })
}

/// Upper bound on the covering radius squared from the nearest-plane
/// argument: mu^2 <= sum_k D_k / 4.
pub fn covering_radius_sq_bound(gram: &GramMatrix) -> f64 {
    ldl_diagonal(gram)
        .iter()
        .map(|d| d.to_f64().unwrap_or(f64::INFINITY))
        .sum::<f64>()
        / 4.0
}

/// Smallest norm over a spectrum slice, if any.
pub fn min_norm(entries: &[NormCount]) -> Option<Rational> {
    entries.first().map(|e| e.norm)
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Parses "p/q" or "p" into a rational; used by the CLI for bounds.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let q: i64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Rational::new(p.trim().parse().ok()?, q));
    }
    if let Ok(p) = s.parse::<i64>() {
        return Some(Rational::from_integer(p));
    }
    let x: f64 = s.parse().ok()?;
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    Some(Rational::new((x * 1_000_000.0).round() as i64, 1_000_000))
}

pub fn abs_rational(r: Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> LatticeSpec {
        s.parse().unwrap()
    }

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn parse_and_reject() {
        assert_eq!(spec("A4").rank(), 4);
        assert_eq!(spec("e8").family(), Family::E);
        assert!(matches!(
            "Q9".parse::<LatticeSpec>(),
            Err(LatticeError::Parse(_))
        ));
        assert!("D2".parse::<LatticeSpec>().is_err());
        assert!("E9".parse::<LatticeSpec>().is_err());
        assert!("A0".parse::<LatticeSpec>().is_err());
        assert!("A25".parse::<LatticeSpec>().is_err());
        assert!(LatticeSpec::with_ceiling(Family::A, 30, 40).is_ok());
    }

    #[test]
    fn small_cartan_matrices() {
        assert_eq!(cartan_matrix(spec("A1")).rows(), &[vec![2]]);
        assert_eq!(
            cartan_matrix(spec("A2")).rows(),
            &[vec![2, -1], vec![-1, 2]]
        );
        let e8 = cartan_matrix(spec("E8"));
        assert_eq!(e8.determinant(), 1);
        // Bourbaki: alpha_2 attaches to alpha_4
        assert_eq!(e8.entry(1, 3), -1);
        assert_eq!(e8.entry(1, 2), 0);
        assert_eq!(e8.entry(0, 2), -1);
    }

    #[test]
    fn determinants_match_discriminant_orders() {
        for n in 1..=12 {
            assert_eq!(
                cartan_matrix(spec(&format!("A{n}"))).determinant(),
                n as i64 + 1
            );
        }
        for n in 3..=12 {
            assert_eq!(cartan_matrix(spec(&format!("D{n}"))).determinant(), 4);
        }
        assert_eq!(cartan_matrix(spec("E6")).determinant(), 3);
        assert_eq!(cartan_matrix(spec("E7")).determinant(), 2);
    }

    #[test]
    fn weights_of_a1_and_e6() {
        assert_eq!(fundamental_weights(spec("A1")), vec![vec![r(1, 2)]]);
        let d = discriminant_data(spec("E6"));
        assert_eq!(d.coset_inner(1, 1), r(4, 3));
        assert_eq!(d.coset_inner(2, 2), r(4, 3));
        assert_eq!(d.coset_inner(1, 2), r(2, 3));
    }

    #[test]
    fn a_n_weights_match_orthogonal_model() {
        // w_a = (1/(n+1)) (n-a+1 repeated a times, -a repeated n+1-a times)
        // with alpha_j = e_j - e_{j+1}; (w_a, w_b) = min(a,b)(n+1-max(a,b))/(n+1)
        for n in 1..=7usize {
            let d = discriminant_data(spec(&format!("A{n}")));
            for a in 1..=n {
                for b in 1..=n {
                    let expect = r((a.min(b) * (n + 1 - a.max(b))) as i64, (n + 1) as i64);
                    assert_eq!(d.coset_inner(a, b), expect);
                }
            }
        }
    }

    #[test]
    fn d_odd_classes_are_multiples_of_generator() {
        for n in [3usize, 5, 7, 9] {
            let d = discriminant_data(spec(&format!("D{n}")));
            assert_eq!(d.l, 4);
            assert_eq!(d.group_type, GroupType::Cyclic { order: 4 });
            for a in 0..4 {
                let v: Vec<Rational> = d.cosets[1].iter().map(|x| x * a as i64).collect();
                assert_eq!(d.class_of(&v), Some(a));
            }
            // spinor norm n/4, vector norm 1
            assert_eq!(d.coset_inner(1, 1), r(n as i64, 4));
            assert_eq!(d.coset_inner(2, 2), r(1, 1));
        }
    }

    #[test]
    fn e6_class_two_is_twice_class_one() {
        let d = discriminant_data(spec("E6"));
        let v: Vec<Rational> = d.cosets[1].iter().map(|x| x * 2).collect();
        assert_eq!(d.class_of(&v), Some(2));
        assert_eq!(d.coset_negation(1), 2);
    }

    #[test]
    fn discriminant_data_for_e7_e8_d_even() {
        let e7 = discriminant_data(spec("E7"));
        assert_eq!(
            (e7.l, e7.coset_labels.clone()),
            (2, vec!["0".into(), "w7".into()])
        );
        let e8 = discriminant_data(spec("E8"));
        assert_eq!(e8.l, 1);
        assert_eq!(e8.cosets.len(), 1);
        let d6 = discriminant_data(spec("D6"));
        assert_eq!(d6.group_type, GroupType::KleinFour);
        for a in 0..4 {
            assert_eq!(d6.coset_negation(a), a);
        }
    }

    #[test]
    fn cosets_are_distinct_classes() {
        for s in LatticeSpec::default_set() {
            let d = discriminant_data(s);
            assert_eq!(d.cosets.len(), d.l);
            assert!(d.cosets[0].iter().all(|x| x.is_zero()));
            for a in 0..d.l {
                for b in 0..a {
                    let diff: Vec<Rational> = d.cosets[a]
                        .iter()
                        .zip(&d.cosets[b])
                        .map(|(x, y)| x - y)
                        .collect();
                    assert!(!in_root_lattice(&diff), "{s}: cosets {a},{b} coincide");
                }
            }
            assert!(d.gram_times_weights_is_identity());
        }
    }

    #[test]
    fn enumerate_a1_coset_one() {
        let d = discriminant_data(spec("A1"));
        let got = enumerate_norms(&d, 1, r(1, 2), DEFAULT_MAX_VECTORS).unwrap();
        assert_eq!(
            got,
            vec![NormCount {
                norm: r(1, 2),
                count: 2
            }]
        );
    }

    #[test]
    fn enumerate_roots_a2_e8() {
        let a2 = discriminant_data(spec("A2"));
        let got = enumerate_norms(&a2, 0, r(2, 1), DEFAULT_MAX_VECTORS).unwrap();
        assert_eq!(
            got,
            vec![NormCount {
                norm: r(2, 1),
                count: 6
            }]
        );
        let e8 = discriminant_data(spec("E8"));
        let got = enumerate_norms(&e8, 0, r(2, 1), DEFAULT_MAX_VECTORS).unwrap();
        assert_eq!(
            got,
            vec![NormCount {
                norm: r(2, 1),
                count: 240
            }]
        );
    }

    #[test]
    fn errors_are_reported() {
        let a2 = discriminant_data(spec("A2"));
        assert!(matches!(
            enumerate_norms(&a2, 3, r(2, 1), 100),
            Err(LatticeError::CosetOutOfRange { .. })
        ));
        assert!(matches!(
            enumerate_norms(&a2, 0, r(0, 1), 100),
            Err(LatticeError::NonPositiveBound(_))
        ));
        assert!(matches!(
            enumerate_norms(&a2, 0, r(400, 1), 100),
            Err(LatticeError::TooManyVectors { .. })
        ));
    }

    #[test]
    fn enumerated_norms_round_trip() {
        for s in ["A3", "D5", "E6"] {
            let d = discriminant_data(spec(s));
            for a in 0..d.l {
                for (v, norm) in enumerate_vectors(&d, a, r(6, 1), DEFAULT_MAX_VECTORS).unwrap() {
                    assert_eq!(d.gram.inner(&v, &v), norm);
                    assert!(norm <= r(6, 1));
                }
            }
        }
    }

    #[test]
    fn truncation_keeps_lower_norms() {
        let d = discriminant_data(spec("A2"));
        let big = norm_spectrum(&d, r(12, 1), DEFAULT_MAX_VECTORS).unwrap();
        let small = norm_spectrum(&d, r(6, 1), DEFAULT_MAX_VECTORS).unwrap();
        assert_eq!(big.truncated(r(6, 1)), small);
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/4"), Some(r(3, 4)));
        assert_eq!(parse_rational("7"), Some(r(7, 1)));
        assert_eq!(parse_rational("2.5"), Some(r(5, 2)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
