//! Orthonormal polynomial families: three-term recurrences, Golub-Welsch Gauss
//! rules, and a discretized Stieltjes procedure for weights without closed-form
//! coefficients.
//!
//! Weights are described by a [`WeightSpec`]: a canonical family (Jacobi on
//! `[-1,1]`, generalized Hermite on the real line, Laguerre on `[0,inf)`, or a
//! tabulated density) together with an affine map `z = A*zeta + B` onto the
//! physical range. All weights are treated as probability densities: the
//! normalization constant is part of the spec, so `p_0 == 1` and `b[0] == 1`
//! throughout.

use crate::numeric::adaptive_simpson;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Canonical univariate weight family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightFamily {
    /// `w(z) = (1-z)^alpha (1+z)^beta` on `[-1, 1]`, `alpha, beta > -1`.
    Jacobi { alpha: f64, beta: f64 },
    /// `w(z) = |z|^(2 mu) exp(-|z|^exponent)` on the real line,
    /// `exponent >= 1`, `mu > -1/2`.
    GeneralizedHermite { exponent: f64, mu: f64 },
    /// `w(z) = z^s exp(-z)` on `[0, inf)`, `s > -1`.
    Laguerre { s: f64 },
    /// Density sampled on a strictly increasing grid; integrated by the
    /// trapezoid rule on that grid.
    Tabulated { points: Vec<f64>, values: Vec<f64> },
}

/// A univariate weight: canonical family plus the affine map `z = A*zeta + B`
/// from the canonical domain onto the physical one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    family: WeightFamily,
    scale: f64,
    shift: f64,
    /// Mass of the unnormalized canonical weight, fixed at construction.
    mass: f64,
}

impl WeightSpec {
    pub fn new(family: WeightFamily) -> Result<Self> {
        let mass = match &family {
            WeightFamily::Jacobi { alpha, beta } => {
                if !(*alpha > -1.0 && *beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "Jacobi requires alpha, beta > -1, got ({alpha}, {beta})"
                    )));
                }
                // 2^(a+b+1) B(a+1, b+1)
                ((alpha + beta + 1.0) * std::f64::consts::LN_2 + libm::lgamma(alpha + 1.0)
                    + libm::lgamma(beta + 1.0)
                    - libm::lgamma(alpha + beta + 2.0))
                .exp()
            }
            WeightFamily::GeneralizedHermite { exponent, mu } => {
                if !(*exponent >= 1.0) || !(*mu > -0.5) {
                    return Err(Error::InvalidParameter(format!(
                        "generalized Hermite requires exponent >= 1 and mu > -1/2, got ({exponent}, {mu})"
                    )));
                }
                // int |z|^(2mu) exp(-|z|^a) dz = (2/a) Gamma((2mu+1)/a)
                2.0 / exponent * libm::tgamma((2.0 * mu + 1.0) / exponent)
            }
            WeightFamily::Laguerre { s } => {
                if !(*s > -1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "Laguerre requires s > -1, got {s}"
                    )));
                }
                libm::tgamma(s + 1.0)
            }
            WeightFamily::Tabulated { points, values } => {
                if points.len() < 2 || points.len() != values.len() {
                    return Err(Error::InvalidParameter(
                        "tabulated weight needs matching point/value arrays of length >= 2".into(),
                    ));
                }
                if points.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidParameter(
                        "tabulated points must be strictly increasing".into(),
                    ));
                }
                if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "tabulated values must be finite and nonnegative".into(),
                    ));
                }
                let mass = trapezoid_mass(points, values);
                if !(mass > 0.0) {
                    return Err(Error::InvalidParameter(
                        "tabulated weight has zero mass".into(),
                    ));
                }
                mass
            }
        };
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "weight mass is not positive and finite: {mass}"
            )));
        }
        Ok(Self { family, scale: 1.0, shift: 0.0, mass })
    }

    /// Uniform density on `[-1, 1]` (Jacobi with `alpha = beta = 0`).
    pub fn uniform() -> Self {
        Self::new(WeightFamily::Jacobi { alpha: 0.0, beta: 0.0 }).unwrap()
    }

    /// Uniform density on `[lo, hi]`.
    pub fn uniform_on(lo: f64, hi: f64) -> Result<Self> {
        Self::uniform().with_affine(0.5 * (hi - lo), 0.5 * (hi + lo))
    }

    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(WeightFamily::Jacobi { alpha, beta })
    }

    /// Gaussian-type weight `w(z) = exp(-z^2)` on the real line.
    pub fn gaussian() -> Self {
        Self::new(WeightFamily::GeneralizedHermite { exponent: 2.0, mu: 0.0 }).unwrap()
    }

    /// Hermite spec matching a normal distribution `N(mean, sd^2)`:
    /// canonical `exp(-zeta^2)` mapped by `z = sqrt(2) sd zeta + mean`.
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Self::gaussian().with_affine(std::f64::consts::SQRT_2 * sd, mean)
    }

    pub fn generalized_hermite(exponent: f64, mu: f64) -> Result<Self> {
        Self::new(WeightFamily::GeneralizedHermite { exponent, mu })
    }

    pub fn laguerre(s: f64) -> Result<Self> {
        Self::new(WeightFamily::Laguerre { s })
    }

    pub fn tabulated(points: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(WeightFamily::Tabulated { points, values })
    }

    /// Attach an affine map `z = a*zeta + b` from canonical to physical
    /// coordinates. The scale must be positive.
    pub fn with_affine(mut self, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "affine map requires finite b and scale a > 0, got ({a}, {b})"
            )));
        }
        self.scale = a;
        self.shift = b;
        Ok(self)
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    /// Affine map `(A, B)` with `z = A*zeta + B`.
    pub fn affine(&self) -> (f64, f64) {
        (self.scale, self.shift)
    }

    /// Mass of the unnormalized canonical weight.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Canonical domain; half-infinite and infinite domains use `inf`.
    pub fn canonical_domain(&self) -> (f64, f64) {
        match &self.family {
            WeightFamily::Jacobi { .. } => (-1.0, 1.0),
            WeightFamily::GeneralizedHermite { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            WeightFamily::Laguerre { .. } => (0.0, f64::INFINITY),
            WeightFamily::Tabulated { points, .. } => (points[0], points[points.len() - 1]),
        }
    }

    /// Physical domain (canonical domain through the affine map).
    pub fn domain(&self) -> (f64, f64) {
        let (lo, hi) = self.canonical_domain();
        (self.to_physical(lo), self.to_physical(hi))
    }

    pub fn to_physical(&self, zeta: f64) -> f64 {
        self.scale * zeta + self.shift
    }

    pub fn to_canonical(&self, z: f64) -> f64 {
        (z - self.shift) / self.scale
    }

    /// Normalized density at a physical point.
    pub fn pdf(&self, z: f64) -> f64 {
        let zeta = self.to_canonical(z);
        let (lo, hi) = self.canonical_domain();
        if zeta < lo || zeta > hi {
            return 0.0;
        }
        (2.0 * self.log_v(zeta)).exp() / (self.mass * self.scale)
    }

    /// `log v(zeta) = log sqrt(w(zeta))` for the unnormalized canonical weight.
    ///
    /// The Leja objective and the barycentric weights only use `v` up to a
    /// constant factor, so no normalization is applied here. Returns `-inf`
    /// where the weight vanishes.
    pub fn log_v(&self, zeta: f64) -> f64 {
        match &self.family {
            WeightFamily::Jacobi { alpha, beta } => {
                let (um, up) = (1.0 - zeta, 1.0 + zeta);
                if um < 0.0 || up < 0.0 {
                    return f64::NEG_INFINITY;
                }
                let mut s = 0.0;
                if *alpha != 0.0 {
                    s += 0.5 * alpha * um.ln();
                }
                if *beta != 0.0 {
                    s += 0.5 * beta * up.ln();
                }
                s
            }
            WeightFamily::GeneralizedHermite { exponent, mu } => {
                let mut s = -0.5 * zeta.abs().powf(*exponent);
                if *mu != 0.0 {
                    s += mu * zeta.abs().ln();
                }
                s
            }
            WeightFamily::Laguerre { s } => {
                if zeta < 0.0 {
                    return f64::NEG_INFINITY;
                }
                let mut r = -0.5 * zeta;
                if *s != 0.0 {
                    r += 0.5 * s * zeta.ln();
                }
                r
            }
            WeightFamily::Tabulated { points, values } => {
                0.5 * interp_linear(points, values, zeta).ln()
            }
        }
    }

    /// Derivative of `log v` where a closed form exists (`None` for tabulated
    /// weights, which are polished derivative-free).
    pub fn log_v_deriv(&self, zeta: f64) -> Option<f64> {
        match &self.family {
            WeightFamily::Jacobi { alpha, beta } => {
                Some(-0.5 * alpha / (1.0 - zeta) + 0.5 * beta / (1.0 + zeta))
            }
            WeightFamily::GeneralizedHermite { exponent, mu } => {
                let s = zeta.signum();
                Some(mu / zeta - 0.5 * exponent * zeta.abs().powf(exponent - 1.0) * s)
            }
            WeightFamily::Laguerre { s } => Some(0.5 * s / zeta - 0.5),
            WeightFamily::Tabulated { .. } => None,
        }
    }
}

fn trapezoid_mass(points: &[f64], values: &[f64]) -> f64 {
    points
        .windows(2)
        .zip(values.windows(2))
        .map(|(p, v)| 0.5 * (p[1] - p[0]) * (v[0] + v[1]))
        .sum()
}

fn interp_linear(points: &[f64], values: &[f64], z: f64) -> f64 {
    if z < points[0] || z > points[points.len() - 1] {
        return 0.0;
    }
    let i = match points.binary_search_by(|p| p.partial_cmp(&z).unwrap()) {
        Ok(i) => return values[i],
        Err(i) => i,
    };
    let t = (z - points[i - 1]) / (points[i] - points[i - 1]);
    values[i - 1] + t * (values[i] - values[i - 1])
}

/// Three-term recurrence coefficients of the orthonormal family for a weight.
///
/// Conventions follow the monic normalization for the stored coefficients:
/// `pi_{k+1} = (z - a_k) pi_k - b_k pi_{k-1}` with `b_0` equal to the total
/// mass (1 after normalization). The symmetric Jacobi matrix has diagonal
/// `a_k` and off-diagonal `sqrt(b_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recurrence {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Recurrence {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidParameter(
                "recurrence arrays must be nonempty and of equal length".into(),
            ));
        }
        if !(b[0] > 0.0) || b.iter().skip(1).any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidParameter(
                "recurrence requires b_0 > 0 (mass) and b_k > 0 for k >= 1".into(),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

/// Recurrence coefficients for `spec`, `n` of them (`a_0..a_{n-1}`).
///
/// Closed forms cover Jacobi, generalized Hermite with exponent 2, and
/// Laguerre. Other Hermite exponents go through the discretized Stieltjes
/// procedure on an automatically chosen truncated grid (truncation radius set
/// so the discarded tail mass is below 1e-14). Tabulated weights run Stieltjes
/// on their own grid; a table with fewer points than requested coefficients is
/// rejected with a `NeedsStieltjes` error so the caller can supply a finer
/// discretization.
pub fn recurrence_coefficients(spec: &WeightSpec, n: usize) -> Result<Recurrence> {
    if n == 0 {
        return Err(Error::InvalidParameter("recurrence length must be >= 1".into()));
    }
    match spec.family() {
        WeightFamily::Jacobi { alpha, beta } => Ok(jacobi_recurrence(*alpha, *beta, n)),
        WeightFamily::GeneralizedHermite { exponent, mu } => {
            if *exponent == 2.0 {
                let a = vec![0.0; n];
                let mut b = vec![1.0; n];
                for (k, bk) in b.iter_mut().enumerate().skip(1) {
                    *bk = 0.5 * k as f64 + if k % 2 == 1 { *mu } else { 0.0 };
                }
                Ok(Recurrence { a, b })
            } else {
                let (points, masses) = hermite_discretization(*exponent, *mu, n);
                stieltjes_from_measure(&points, &masses, n)
            }
        }
        WeightFamily::Laguerre { s } => {
            let mut a = vec![0.0; n];
            let mut b = vec![1.0; n];
            for k in 0..n {
                a[k] = 2.0 * k as f64 + s + 1.0;
                if k >= 1 {
                    b[k] = k as f64 * (k as f64 + s);
                }
            }
            Ok(Recurrence { a, b })
        }
        WeightFamily::Tabulated { points, values } => {
            if points.len() < n {
                return Err(Error::NeedsStieltjes(format!(
                    "tabulated weight with {} atoms cannot support {} coefficients",
                    points.len(),
                    n
                )));
            }
            stieltjes_discretized(points, values, n)
        }
    }
}

fn jacobi_recurrence(alpha: f64, beta: f64, n: usize) -> Recurrence {
    let mut a = vec![0.0; n];
    let mut b = vec![1.0; n];
    a[0] = (beta - alpha) / (alpha + beta + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + alpha + beta;
        a[k] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
        b[k] = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + alpha + beta).powi(2) * (3.0 + alpha + beta))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + alpha + beta)
                / (s * s * (s + 1.0) * (s - 1.0))
        };
    }
    Recurrence { a, b }
}

/// Graded composite Gauss-Legendre discretization of the generalized Hermite
/// weight for the Stieltjes fallback. Uses the substitution
/// `zeta = u^(1/(2mu+1))` per half-axis to absorb the `|z|^(2mu)` factor, and
/// a truncation radius growing with the requested order.
fn hermite_discretization(exponent: f64, mu: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    // Truncation: exp(-r^a) tail below 1e-14 including the polynomial factor
    // and moments up to degree 2n.
    let radius_pow = 8.0 * (n.max(8) as f64) + 60.0 + 20.0 * mu.max(0.0);
    let r = radius_pow.powf(1.0 / exponent);
    let p = 1.0 / (2.0 * mu + 1.0);
    let u_max = r.powf(1.0 / p);
    // Geometric grading toward zero; depth covers the mass of u^0 du near 0.
    let levels = 64usize;
    let (gl_x, gl_w) = gauss_legendre_panel();
    let mut points = Vec::new();
    let mut masses = Vec::new();
    let mut hi = u_max;
    for lev in 0..levels {
        let lo = if lev + 1 == levels { 0.0 } else { hi * 0.5 };
        for (x, w) in gl_x.iter().zip(&gl_w) {
            let u = lo + 0.5 * (hi - lo) * (x + 1.0);
            let du = 0.5 * (hi - lo) * w;
            let zeta = u.powf(p);
            let dens = p * (-zeta.powf(exponent)).exp();
            points.push(zeta);
            masses.push(dens * du);
        }
        hi = lo;
    }
    // Mirror onto the negative axis.
    let m = points.len();
    let mut all_points = Vec::with_capacity(2 * m);
    let mut all_masses = Vec::with_capacity(2 * m);
    for i in (0..m).rev() {
        all_points.push(-points[i]);
        all_masses.push(masses[i]);
    }
    for i in 0..m {
        all_points.push(points[i]);
        all_masses.push(masses[i]);
    }
    (all_points, all_masses)
}

/// 24-point Gauss-Legendre rule on [-1, 1], computed once via Golub-Welsch.
fn gauss_legendre_panel() -> (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static PANEL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (x, w) = PANEL.get_or_init(|| {
        let rec = jacobi_recurrence(0.0, 0.0, 24);
        let (x, w) = gauss_rule(&rec, 24).expect("Legendre panel");
        // weights normalized to mass 1; rescale to plain dz integration
        (x, w.iter().map(|wi| 2.0 * wi).collect())
    });
    (x.clone(), w.clone())
}

/// Evaluate the orthonormal polynomials `p_0(z)..p_degree(z)` by the forward
/// recurrence. With a unit-mass weight, `p_0 == 1`.
pub fn eval_orthonormal(rec: &Recurrence, degree: usize, z: f64) -> Result<Vec<f64>> {
    if degree >= rec.len() {
        return Err(Error::InvalidParameter(format!(
            "degree {degree} exceeds available coefficients ({})",
            rec.len()
        )));
    }
    let mut p = Vec::with_capacity(degree + 1);
    p.push(1.0 / rec.b[0].sqrt());
    if degree >= 1 {
        p.push((z - rec.a[0]) * p[0] / rec.b[1].sqrt());
    }
    for k in 1..degree {
        let next = ((z - rec.a[k]) * p[k] - rec.b[k].sqrt() * p[k - 1]) / rec.b[k + 1].sqrt();
        p.push(next);
    }
    Ok(p)
}

/// `N`-point Gauss rule by Golub-Welsch: nodes are the eigenvalues of the
/// symmetric tridiagonal Jacobi matrix, weights come from the first components
/// of the eigenvectors. Nodes are returned sorted ascending; weights sum to
/// the total mass `b_0`.
pub fn gauss_rule(rec: &Recurrence, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidParameter("gauss rule needs n >= 1".into()));
    }
    if n > rec.len() {
        return Err(Error::InvalidParameter(format!(
            "gauss rule of size {n} needs {n} coefficients, have {}",
            rec.len()
        )));
    }
    if n == 1 {
        return Ok((vec![rec.a[0]], vec![rec.b[0]]));
    }
    let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jac[(k, k)] = rec.a[k];
        if k + 1 < n {
            let off = rec.b[k + 1].sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = nalgebra::SymmetricEigen::try_new(jac, f64::EPSILON, 0)
        .ok_or_else(|| Error::EigenFailure(format!("no convergence for n = {n}")))?;
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], rec.b[0] * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Ok(pairs.into_iter().unzip())
}

/// Recurrence coefficients from a density sampled on a grid.
///
/// The samples `(points, values)` are turned into a discrete measure by the
/// trapezoid rule on the given grid (a single sample becomes a unit point
/// mass), then the Stieltjes procedure runs against that measure. The
/// discretization must be fine enough that moments up to degree `2n` are
/// resolved; a too-coarse grid surfaces as a `LossOfOrthogonality` error.
pub fn stieltjes_discretized(points: &[f64], values: &[f64], n: usize) -> Result<Recurrence> {
    if points.is_empty() || points.len() != values.len() {
        return Err(Error::InvalidParameter(
            "stieltjes needs matching nonempty point/value arrays".into(),
        ));
    }
    if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParameter("weight values must be nonnegative".into()));
    }
    let masses: Vec<f64> = if points.len() == 1 {
        vec![values[0].max(1.0)]
    } else {
        let m = points.len();
        (0..m)
            .map(|i| {
                let left = if i > 0 { points[i] - points[i - 1] } else { 0.0 };
                let right = if i + 1 < m { points[i + 1] - points[i] } else { 0.0 };
                0.5 * (left + right) * values[i]
            })
            .collect()
    };
    stieltjes_from_measure(points, &masses, n)
}

/// Stieltjes procedure against an explicit discrete measure.
///
/// Runs the three-term recurrence with normalized polynomial vectors on the
/// support atoms, so intermediate values stay O(1) even for long recurrences.
/// The coefficients are normalized to unit mass (`b_0 = 1`).
pub fn stieltjes_from_measure(points: &[f64], masses: &[f64], n: usize) -> Result<Recurrence> {
    if n == 0 {
        return Err(Error::InvalidParameter("recurrence length must be >= 1".into()));
    }
    let total: f64 = masses.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::InvalidParameter(format!("measure has nonpositive mass {total}")));
    }
    let m = points.len();
    let w: Vec<f64> = masses.iter().map(|x| x / total).collect();
    let mut a = vec![0.0; n];
    let mut b = vec![1.0; n];
    // q_prev, q_cur: orthonormal polynomial values on the atoms.
    let mut q_prev = vec![0.0; m];
    let mut q_cur = vec![1.0; m];
    for k in 0..n {
        let ak: f64 = (0..m).map(|i| w[i] * points[i] * q_cur[i] * q_cur[i]).sum();
        a[k] = ak;
        if k + 1 == n {
            break;
        }
        let sqrt_bk = if k == 0 { 0.0 } else { b[k].sqrt() };
        let mut t = vec![0.0; m];
        for i in 0..m {
            t[i] = (points[i] - ak) * q_cur[i] - sqrt_bk * q_prev[i];
        }
        let norm2: f64 = (0..m).map(|i| w[i] * t[i] * t[i]).sum();
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::LossOfOrthogonality { index: k + 1, value: norm2 });
        }
        b[k + 1] = norm2;
        let norm = norm2.sqrt();
        for i in 0..m {
            let next = t[i] / norm;
            q_prev[i] = q_cur[i];
            q_cur[i] = next;
        }
    }
    Ok(Recurrence { a, b })
}

/// Normalization cross-check used by tests and the CLI `--check` paths:
/// integrate the canonical density numerically and compare with the stored
/// closed-form mass.
pub fn quadrature_mass_check(spec: &WeightSpec) -> f64 {
    let f = |z: f64| (2.0 * spec.log_v(z)).exp();
    match spec.family() {
        WeightFamily::Jacobi { .. } => {
            // substitute z = sin(theta) against endpoint singularities
            adaptive_simpson(
                &|th: f64| f(th.sin()) * th.cos(),
                -std::f64::consts::FRAC_PI_2,
                std::f64::consts::FRAC_PI_2,
                1e-12,
            )
        }
        WeightFamily::GeneralizedHermite { exponent, .. } => {
            let r = (80.0f64).powf(1.0 / exponent);
            2.0 * adaptive_simpson(&f, 1e-14, r, 1e-13)
        }
        WeightFamily::Laguerre { .. } => adaptive_simpson(&f, 1e-300, 800.0, 1e-13),
        WeightFamily::Tabulated { points, values } => trapezoid_mass(points, values),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_recurrence_closed_form() {
        let rec = recurrence_coefficients(&WeightSpec::uniform(), 8).unwrap();
        for ak in rec.a() {
            assert_eq!(*ak, 0.0);
        }
        assert_eq!(rec.b()[0], 1.0);
        for k in 1..4 {
            let kf = k as f64;
            assert_abs_diff_eq!(rec.b()[k], kf * kf / (4.0 * kf * kf - 1.0), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(rec.b()[1], 1.0 / 3.0, epsilon = 1e-16);
        assert_abs_diff_eq!(rec.b()[2], 4.0 / 15.0, epsilon = 1e-16);
        assert_abs_diff_eq!(rec.b()[3], 9.0 / 35.0, epsilon = 1e-16);
    }

    #[test]
    fn gaussian_recurrence_closed_form() {
        let rec = recurrence_coefficients(&WeightSpec::gaussian(), 10).unwrap();
        for (k, (ak, bk)) in rec.a().iter().zip(rec.b()).enumerate() {
            assert_eq!(*ak, 0.0);
            if k >= 1 {
                assert_abs_diff_eq!(*bk, k as f64 / 2.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn orthonormal_eval_basics() {
        let rec = recurrence_coefficients(&WeightSpec::uniform(), 6).unwrap();
        for z in [-0.7, 0.0, 0.3, 1.0] {
            let p = eval_orthonormal(&rec, 3, z).unwrap();
            assert_eq!(p[0], 1.0);
            assert_abs_diff_eq!(p[1], 3.0f64.sqrt() * z, epsilon = 1e-14);
        }
        assert!(eval_orthonormal(&rec, 6, 0.0).is_err());
    }

    #[test]
    fn gram_matrix_identity_under_gauss_oracle() {
        for spec in [
            WeightSpec::uniform(),
            WeightSpec::gaussian(),
            WeightSpec::laguerre(0.0).unwrap(),
            WeightSpec::jacobi(1.5, -0.5).unwrap(),
        ] {
            let rec = recurrence_coefficients(&spec, 40).unwrap();
            let (x, w) = gauss_rule(&rec, 30).unwrap();
            for i in 0..=10usize {
                for j in 0..=10usize {
                    let mut s = 0.0;
                    for (xk, wk) in x.iter().zip(&w) {
                        let p = eval_orthonormal(&rec, 10, *xk).unwrap();
                        s += wk * p[i] * p[j];
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(s, expect, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn gauss_rule_small_cases() {
        let rec = recurrence_coefficients(&WeightSpec::uniform(), 4).unwrap();
        let (x, w) = gauss_rule(&rec, 1).unwrap();
        assert_eq!(x, vec![0.0]);
        assert_eq!(w, vec![1.0]);
        let (x, w) = gauss_rule(&rec, 2).unwrap();
        assert_abs_diff_eq!(x[0], -(1.0 / 3.0f64).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], (1.0 / 3.0f64).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(w[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn gauss_weights_are_normalized_and_nodes_stay_in_support() {
        for spec in [
            WeightSpec::uniform(),
            WeightSpec::jacobi(2.0, 0.5).unwrap(),
            WeightSpec::gaussian(),
            WeightSpec::laguerre(0.0).unwrap(),
            WeightSpec::laguerre(1.5).unwrap(),
        ] {
            let rec = recurrence_coefficients(&spec, 50).unwrap();
            let (lo, hi) = spec.canonical_domain();
            for n in 1..=50 {
                let (x, w) = gauss_rule(&rec, n).unwrap();
                let sum: f64 = w.iter().sum();
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
                assert!(w.iter().all(|&wi| wi > 0.0));
                assert!(x.iter().all(|&xi| xi.is_finite() && xi >= lo - 1e-12 && xi <= hi));
            }
        }
    }

    #[test]
    fn gauss_degree_exactness_against_exact_moments() {
        // uniform: E z^k = 1/(k+1) for even k; gaussian: (2k-1)!!/2^k; laguerre s=0: k!
        let specs: Vec<(WeightSpec, Box<dyn Fn(usize) -> f64>)> = vec![
            (
                WeightSpec::uniform(),
                Box::new(|k| if k % 2 == 0 { 1.0 / (k as f64 + 1.0) } else { 0.0 }),
            ),
            (
                WeightSpec::gaussian(),
                Box::new(|k| {
                    if k % 2 == 1 {
                        0.0
                    } else {
                        // (k-1)!! / 2^(k/2)
                        let mut v = 1.0;
                        let mut j = k as i64 - 1;
                        while j > 0 {
                            v *= j as f64 / 2.0;
                            j -= 2;
                        }
                        v
                    }
                }),
            ),
            (
                WeightSpec::laguerre(0.0).unwrap(),
                Box::new(|k| (1..=k).map(|i| i as f64).product()),
            ),
        ];
        for (spec, moment) in &specs {
            let rec = recurrence_coefficients(spec, 25).unwrap();
            for n in 1..=20usize {
                let (x, w) = gauss_rule(&rec, n).unwrap();
                for k in 0..=(2 * n - 1) {
                    let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                    let exact = moment(k);
                    let scale = exact.abs().max(1.0);
                    assert!(
                        (q - exact).abs() <= 1e-10 * scale,
                        "family {:?} n={n} k={k}: {q} vs {exact}",
                        spec.family()
                    );
                }
            }
        }
    }

    #[test]
    fn stieltjes_uniform_matches_legendre() {
        let m = 10_000;
        let points: Vec<f64> = (0..m).map(|i| -1.0 + 2.0 * i as f64 / (m - 1) as f64).collect();
        let values = vec![0.5; m];
        let rec = stieltjes_discretized(&points, &values, 6).unwrap();
        assert_abs_diff_eq!(rec.b()[1], 1.0 / 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(rec.b()[2], 4.0 / 15.0, epsilon = 1e-8);
        assert!(rec.a().iter().all(|ak| ak.abs() < 1e-12));
    }

    #[test]
    fn stieltjes_single_atom() {
        let rec = stieltjes_discretized(&[0.37], &[2.0], 1).unwrap();
        assert_eq!(rec.a()[0], 0.37);
    }

    #[test]
    fn stieltjes_too_coarse_reports_orthogonality_loss() {
        let points = vec![-1.0, 0.0, 1.0];
        let values = vec![1.0, 1.0, 1.0];
        match stieltjes_discretized(&points, &values, 5) {
            Err(Error::LossOfOrthogonality { .. }) => {}
            other => panic!("expected loss of orthogonality, got {other:?}"),
        }
    }

    #[test]
    fn hermite_exponent_one_moments_via_stieltjes() {
        // w = exp(-|z|): even moments are k!, odd vanish.
        let spec = WeightSpec::generalized_hermite(1.0, 0.0).unwrap();
        let rec = recurrence_coefficients(&spec, 24).unwrap();
        assert!(rec.a().iter().all(|ak| ak.abs() < 1e-9));
        let (x, w) = gauss_rule(&rec, 16).unwrap();
        for k in (0..=20usize).step_by(2) {
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
            let exact: f64 = (1..=k).map(|i| i as f64).product();
            assert!((q - exact).abs() <= 1e-8 * exact.max(1.0), "k={k}: {q} vs {exact}");
        }
    }

    #[test]
    fn hermite_stieltjes_matches_closed_form_at_exponent_two() {
        let spec = WeightSpec::generalized_hermite(2.0, 0.7).unwrap();
        let closed = recurrence_coefficients(&spec, 12).unwrap();
        let (points, masses) = hermite_discretization(2.0, 0.7, 12);
        let st = stieltjes_from_measure(&points, &masses, 12).unwrap();
        for k in 0..12 {
            assert_abs_diff_eq!(closed.b()[k], st.b()[k], epsilon = 1e-9);
            assert!(st.a()[k].abs() < 1e-9);
        }
    }

    #[test]
    fn oscillatory_bessel_weight_keeps_positive_coefficients() {
        // w(z) ~ 0.5 I0(1+z) + J0(50+50z) sampled on a fine grid stays a
        // valid weight through 40 recurrence steps.
        fn bessel_i0(x: f64) -> f64 {
            let q = 0.25 * x * x;
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..40 {
                term *= q / ((k * k) as f64);
                sum += term;
                if term < 1e-18 * sum {
                    break;
                }
            }
            sum
        }
        let m = 20_000;
        let points: Vec<f64> = (0..m).map(|i| -1.0 + 2.0 * i as f64 / (m - 1) as f64).collect();
        let values: Vec<f64> = points
            .iter()
            .map(|&z| 0.5 * bessel_i0(1.0 + z) + libm::j0(50.0 + 50.0 * z))
            .collect();
        assert!(values.iter().all(|&v| v > 0.0));
        let rec = stieltjes_discretized(&points, &values, 41).unwrap();
        assert!(rec.b().iter().all(|&bk| bk > 0.0));
    }

    #[test]
    fn mass_closed_forms_match_quadrature() {
        for spec in [
            WeightSpec::uniform(),
            WeightSpec::jacobi(0.5, 2.0).unwrap(),
            WeightSpec::gaussian(),
            WeightSpec::generalized_hermite(1.5, 0.25).unwrap(),
            WeightSpec::laguerre(0.0).unwrap(),
            WeightSpec::laguerre(2.5).unwrap(),
        ] {
            let numeric = quadrature_mass_check(&spec);
            assert!(
                (numeric - spec.mass()).abs() <= 1e-8 * spec.mass(),
                "{:?}: {} vs {}",
                spec.family(),
                numeric,
                spec.mass()
            );
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(WeightSpec::jacobi(-1.0, 0.0).is_err());
        assert!(WeightSpec::generalized_hermite(0.5, 0.0).is_err());
        assert!(WeightSpec::generalized_hermite(2.0, -0.5).is_err());
        assert!(WeightSpec::laguerre(-1.0).is_err());
        assert!(WeightSpec::uniform().with_affine(0.0, 1.0).is_err());
        assert!(WeightSpec::tabulated(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(WeightSpec::tabulated(vec![0.0, 1.0], vec![-1.0, 1.0]).is_err());
    }

    #[test]
    fn normal_spec_has_correct_pdf() {
        let spec = WeightSpec::normal(1.0, 0.005).unwrap();
        let z = 1.002;
        let expect = (-(z - 1.0f64) * (z - 1.0) / (2.0 * 0.005 * 0.005)).exp()
            / (0.005 * (2.0 * std::f64::consts::PI).sqrt());
        assert_abs_diff_eq!(spec.pdf(z), expect, epsilon = 1e-9 * expect);
    }
}
