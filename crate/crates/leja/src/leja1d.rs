//! Univariate weighted Leja sequences, weighted barycentric interpolation,
//! interpolatory quadrature weights, and the nested Clenshaw-Curtis baseline.
//!
//! A weighted Leja sequence maximizes `v(z) * prod |z - z_n|` greedily, where
//! `v = sqrt(w)` is the square root of the weight density. The optimization
//! runs on the log objective, one sub-interval between consecutive sorted
//! nodes at a time (plus the two tail intervals), which makes the construction
//! deterministic to machine accuracy. Ties are resolved toward the smallest
//! magnitude, then toward the nonnegative candidate.

use crate::orthopoly::{eval_orthonormal, Recurrence, WeightSpec};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative tolerance for treating two objective values as tied maximizers.
const TIE_TOL: f64 = 1e-12;
/// Relative tolerance for treating two tied maximizers as equal in magnitude.
const MAGNITUDE_TOL: f64 = 1e-9;

struct Objective<'a> {
    spec: &'a WeightSpec,
    nodes: &'a [f64],
}

impl Objective<'_> {
    /// `log v(z) + sum_n log |z - z_n|`; `-inf` at existing nodes.
    fn value(&self, z: f64) -> f64 {
        let mut g = self.spec.log_v(z);
        for &zn in self.nodes {
            let d = (z - zn).abs();
            if d == 0.0 {
                return f64::NEG_INFINITY;
            }
            g += d.ln();
        }
        g
    }

    fn deriv(&self, z: f64) -> Option<f64> {
        let mut d = self.spec.log_v_deriv(z)?;
        for &zn in self.nodes {
            d += 1.0 / (z - zn);
        }
        Some(d)
    }

    fn has_deriv(&self) -> bool {
        self.spec.has_closed_log_v_deriv()
    }
}

/// Next point of the weighted Leja sequence for `spec` after `nodes`
/// (canonical coordinates). An empty node list yields the sequence start,
/// the maximizer of `v` itself under the same tie-breaking.
pub fn next_leja_point(spec: &WeightSpec, nodes: &[f64]) -> Result<f64> {
    let obj = Objective { spec, nodes };
    let (lo, hi) = spec.canonical_domain();

    let mut sorted = nodes.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Candidate local maxima: one per gap between consecutive sorted nodes,
    // plus the two tail intervals.
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    let mut push_candidate = |cands: &mut Vec<(f64, f64)>, z: f64, g: f64| {
        if g.is_finite() {
            cands.push((z, g));
        }
    };

    let mut breakpoints = Vec::with_capacity(sorted.len() + 2);
    if sorted.is_empty() {
        // Seed breakpoint so tails exist on unbounded domains.
        let seed = if lo.is_finite() && hi.is_finite() { 0.5 * (lo + hi) } else { 0.0f64.max(lo) };
        breakpoints.push(seed);
    } else {
        breakpoints.extend_from_slice(&sorted);
    }

    // Interior gaps.
    for w in breakpoints.windows(2) {
        if let Some((z, g)) = maximize_in_gap(&obj, w[0], w[1]) {
            push_candidate(&mut candidates, z, g);
        }
    }
    // Left tail.
    if lo.is_finite() {
        if let Some((z, g)) = maximize_in_gap(&obj, lo, breakpoints[0]) {
            push_candidate(&mut candidates, z, g);
        }
        let g = obj.value(lo);
        push_candidate(&mut candidates, lo, g);
    } else {
        let bracket = expand_tail(&obj, breakpoints[0], -1.0)?;
        if let Some((z, g)) = maximize_in_gap(&obj, bracket, breakpoints[0]) {
            push_candidate(&mut candidates, z, g);
        }
    }
    // Right tail.
    let last = *breakpoints.last().unwrap();
    if hi.is_finite() {
        if let Some((z, g)) = maximize_in_gap(&obj, last, hi) {
            push_candidate(&mut candidates, z, g);
        }
        let g = obj.value(hi);
        push_candidate(&mut candidates, hi, g);
    } else {
        let bracket = expand_tail(&obj, last, 1.0)?;
        if let Some((z, g)) = maximize_in_gap(&obj, last, bracket) {
            push_candidate(&mut candidates, z, g);
        }
    }
    // The smallest-magnitude domain point is always a candidate so that flat
    // objectives resolve to it (tie-break rule).
    let zmin = 0.0f64.clamp(lo, hi);
    push_candidate(&mut candidates, zmin, obj.value(zmin));
    // When the seed breakpoint is not a node it is a legitimate candidate too.
    if sorted.is_empty() {
        push_candidate(&mut candidates, breakpoints[0], obj.value(breakpoints[0]));
    }

    let best = candidates
        .iter()
        .map(|&(_, g)| g)
        .fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return Err(Error::ObjectiveFailure(
            "objective is -inf everywhere (degenerate weight)".into(),
        ));
    }
    // Ties within relative tolerance of the max (absolute in log space),
    // resolved toward the smallest magnitude, preferring the nonnegative
    // candidate when magnitudes tie.
    let mut ties: Vec<f64> = candidates
        .iter()
        .filter(|&&(_, g)| g >= best - TIE_TOL)
        .map(|&(z, _)| z)
        .collect();
    ties.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    let min_mag = ties[0].abs();
    let window: Vec<f64> = ties
        .iter()
        .copied()
        .filter(|z| z.abs() <= min_mag + MAGNITUDE_TOL * min_mag.max(1.0))
        .collect();
    let winner = window
        .iter()
        .copied()
        .filter(|&z| z >= 0.0)
        .fold(f64::INFINITY, f64::min);
    Ok(if winner.is_finite() { winner } else { window[0] })
}

/// Geometric bracket expansion into an unbounded tail: step outward until the
/// log objective has decreased for three consecutive expansions.
fn expand_tail(obj: &Objective, from: f64, direction: f64) -> Result<f64> {
    let mut step = 0.5f64.max(0.05 * from.abs());
    let mut z = from + direction * step;
    let mut prev = obj.value(z);
    let mut decreasing = 0;
    for _ in 0..200 {
        step *= 2.0;
        z = from + direction * step;
        let g = obj.value(z);
        if g < prev {
            decreasing += 1;
            if decreasing >= 3 {
                return Ok(z);
            }
        } else {
            decreasing = 0;
        }
        prev = g;
    }
    Err(Error::ObjectiveFailure("tail bracket expansion did not terminate".into()))
}

/// Locate the maximum of the log objective inside `(a, b)`.
///
/// `a_open` / `b_open` mark ends that are domain boundaries (where the
/// objective is finite and the boundary itself is handled by the caller);
/// non-open ends sit on nodes where the objective diverges to `-inf`.
fn maximize_in_gap(
    obj: &Objective,
    a: f64,
    b: f64,
    a_is_boundary: bool,
    b_is_boundary: bool,
) -> Option<(f64, f64)> {
    let scale = b.abs().max(a.abs()).max(1.0);
    if !(b - a > 4e-13 * scale) {
        return None;
    }
    let eps = 1e-13 * scale;
    let (ia, ib) = (a + eps, b - eps);
    if ia >= ib {
        return None;
    }

    // Coarse scan to seat the refinement.
    const SCAN: usize = 24;
    let mut best_z = ia;
    let mut best_g = f64::NEG_INFINITY;
    for k in 0..=SCAN {
        let z = ia + (ib - ia) * k as f64 / SCAN as f64;
        let g = obj.value(z);
        if g > best_g {
            best_g = g;
            best_z = z;
        }
    }
    if !best_g.is_finite() {
        return None;
    }

    if obj.has_deriv() {
        // Bisection on g' within a sign-change bracket.
        let mut da = obj.deriv(ia).unwrap_or(f64::INFINITY);
        let mut db = obj.deriv(ib).unwrap_or(f64::NEG_INFINITY);
        if !a_is_boundary && !da.is_finite() {
            da = 1.0; // against a node: slope +inf
        }
        if !b_is_boundary && !db.is_finite() {
            db = -1.0;
        }
        if da <= 0.0 && (a_is_boundary || da == 0.0) {
            // Monotone nonincreasing from the boundary: max at the a side.
            return Some((ia, obj.value(ia)));
        }
        if db >= 0.0 && (b_is_boundary || db == 0.0) {
            return Some((ib, obj.value(ib)));
        }
        if da > 0.0 && db < 0.0 {
            let (mut xa, mut xb) = (ia, ib);
            for _ in 0..80 {
                let m = 0.5 * (xa + xb);
                let dm = obj.deriv(m).unwrap();
                if dm > 0.0 {
                    xa = m;
                } else {
                    xb = m;
                }
                if xb - xa <= 4.0 * f64::EPSILON * scale {
                    break;
                }
            }
            let z = 0.5 * (xa + xb);
            return Some((z, obj.value(z)));
        }
        // Fall back to golden section when the derivative signs are unusual
        // (can happen for Jacobi with negative parameters at the boundary).
    }
    golden_section(obj, ia, ib, best_z).map(|z| (z, obj.value(z)))
}

/// Golden-section ascent followed by one parabolic polish.
fn golden_section(obj: &Objective, a: f64, b: f64, seed: f64) -> Option<f64> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    // restrict to the scan cell around the seed for unimodality
    let cell = (b - a) / 24.0;
    let (mut xa, mut xb) = ((seed - cell).max(a), (seed + cell).min(b));
    let mut x1 = xb - INV_PHI * (xb - xa);
    let mut x2 = xa + INV_PHI * (xb - xa);
    let mut f1 = obj.value(x1);
    let mut f2 = obj.value(x2);
    for _ in 0..120 {
        if f1 < f2 {
            xa = x1;
            x1 = x2;
            f1 = f2;
            x2 = xa + INV_PHI * (xb - xa);
            f2 = obj.value(x2);
        } else {
            xb = x2;
            x2 = x1;
            f2 = f1;
            x1 = xb - INV_PHI * (xb - xa);
            f1 = obj.value(x1);
        }
        if xb - xa <= 8.0 * f64::EPSILON * xb.abs().max(1.0) {
            break;
        }
    }
    let mut z = 0.5 * (xa + xb);
    // parabolic polish through three points
    let h = (xb - xa).max(1e-12 * z.abs().max(1.0));
    let (zl, zr) = (z - h, z + h);
    let (gl, g0, gr) = (obj.value(zl), obj.value(z), obj.value(zr));
    let denom = gl - 2.0 * g0 + gr;
    if denom < 0.0 {
        let shift = 0.5 * h * (gl - gr) / denom;
        if shift.abs() < h {
            let zp = z + shift;
            if obj.value(zp) >= g0 {
                z = zp;
            }
        }
    }
    Some(z)
}

/// An ordered weighted Leja node sequence with cached barycentric weights.
///
/// Nodes are stored in canonical coordinates of the weight family; use
/// [`LejaSequence::physical_nodes`] for the affinely mapped positions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LejaSequence {
    spec: WeightSpec,
    nodes: Vec<f64>,
    /// Renormalized v-weighted barycentric weights, `max |b^v| = 1`.
    #[serde(skip)]
    bary_v: Vec<f64>,
    /// Renormalized plain barycentric weights used for interpolation.
    #[serde(skip)]
    bary_plain: Vec<f64>,
}

/// Greedy construction of the first `n` weighted Leja points for `spec`.
pub fn build_sequence(spec: &WeightSpec, n: usize) -> Result<LejaSequence> {
    LejaSequence::build(spec.clone(), n)
}

impl LejaSequence {
    pub fn build(spec: WeightSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("sequence length must be >= 1".into()));
        }
        let mut seq = Self { spec, nodes: Vec::new(), bary_v: Vec::new(), bary_plain: Vec::new() };
        seq.extend_to(n)?;
        Ok(seq)
    }

    /// Reconstruct a sequence from externally supplied canonical nodes
    /// (e.g. imported from CSV). Nodes must be pairwise distinct and inside
    /// the weight's domain.
    pub fn from_nodes(spec: WeightSpec, nodes: Vec<f64>) -> Result<Self> {
        let (lo, hi) = spec.canonical_domain();
        for (i, &zi) in nodes.iter().enumerate() {
            if !(zi >= lo && zi <= hi) {
                return Err(Error::InvalidParameter(format!("node {zi} outside domain")));
            }
            for &zj in &nodes[..i] {
                if zi == zj {
                    return Err(Error::InvalidParameter(format!("duplicate node {zi}")));
                }
            }
        }
        let mut seq = Self { spec, nodes, bary_v: Vec::new(), bary_plain: Vec::new() };
        seq.refresh_barycentric();
        Ok(seq)
    }

    /// Extend the sequence in place to `n` nodes.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        while self.nodes.len() < n {
            let z = next_leja_point(&self.spec, &self.nodes)?;
            self.nodes.push(z);
        }
        self.refresh_barycentric();
        Ok(())
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in canonical coordinates, construction order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Nodes mapped through the spec's affine map.
    pub fn physical_nodes(&self) -> Vec<f64> {
        self.nodes.iter().map(|&z| self.spec.to_physical(z)).collect()
    }

    /// A sequence consisting of the first `n` nodes (nestedness makes this
    /// exactly the length-`n` greedy sequence).
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.nodes.len() {
            return Err(Error::InvalidParameter(format!(
                "prefix length {n} out of range 1..={}",
                self.nodes.len()
            )));
        }
        let mut seq = Self {
            spec: self.spec.clone(),
            nodes: self.nodes[..n].to_vec(),
            bary_v: Vec::new(),
            bary_plain: Vec::new(),
        };
        seq.refresh_barycentric();
        Ok(seq)
    }

    /// Renormalized v-weighted barycentric weights `b^v_n = b_n / v(z_n)`,
    /// scaled so the largest magnitude is 1.
    pub fn barycentric_weights(&self) -> &[f64] {
        &self.bary_v
    }

    fn refresh_barycentric(&mut self) {
        let n = self.nodes.len();
        let mut log_b = vec![0.0f64; n];
        let mut sign = vec![1.0f64; n];
        for i in 0..n {
            let mut s = 0.0;
            let mut sg = 1.0;
            for j in 0..n {
                if i != j {
                    let d = self.nodes[i] - self.nodes[j];
                    s -= d.abs().ln();
                    sg *= d.signum();
                }
            }
            log_b[i] = s;
            sign[i] = sg;
        }
        let log_v: Vec<f64> = self.nodes.iter().map(|&z| self.spec.log_v(z)).collect();
        let renorm = |logs: Vec<f64>, signs: &[f64]| -> Vec<f64> {
            let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            logs.iter().zip(signs).map(|(&l, &s)| s * (l - m).exp()).collect()
        };
        self.bary_v = renorm(
            log_b.iter().zip(&log_v).map(|(&b, &v)| b - v).collect(),
            &sign,
        );
        self.bary_plain = renorm(log_b, &sign);
    }

    /// Evaluate the weighted barycentric interpolant of `data` at canonical
    /// `z`. Exact at nodes: a query within relative distance 1e-14 of a node
    /// returns that node's datum.
    pub fn interpolate(&self, data: &[f64], z: f64) -> f64 {
        assert_eq!(data.len(), self.nodes.len(), "data length must match node count");
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&zn, &bn), &fn_) in self.nodes.iter().zip(&self.bary_plain).zip(data) {
            let d = z - zn;
            if d.abs() <= 1e-14 * z.abs().max(zn.abs()).max(1.0) {
                return fn_;
            }
            let t = bn / d;
            num += t * fn_;
            den += t;
        }
        num / den
    }

    /// Interpolatory quadrature weights for the full sequence: the solution of
    /// `V^T x = e_1` with `V[n][m] = p_m(z_n)` in the orthonormal basis of the
    /// weight. Weights sum to 1 for a normalized weight.
    pub fn quadrature_weights(&self, rec: &Recurrence) -> Result<Vec<f64>> {
        self.quadrature_weights_prefix(rec, self.nodes.len())
    }

    /// Quadrature weights of the length-`n` prefix rule.
    pub fn quadrature_weights_prefix(&self, rec: &Recurrence, n: usize) -> Result<Vec<f64>> {
        if n == 0 || n > self.nodes.len() {
            return Err(Error::InvalidParameter(format!(
                "prefix length {n} out of range 1..={}",
                self.nodes.len()
            )));
        }
        if rec.len() < n {
            return Err(Error::InvalidParameter(format!(
                "recurrence length {} < node count {n}",
                rec.len()
            )));
        }
        vandermonde_first_row(&self.nodes[..n], rec)
    }
}

/// Solve `V^T x = e_1` for the quadrature weights on arbitrary distinct nodes.
pub(crate) fn vandermonde_first_row(nodes: &[f64], rec: &Recurrence) -> Result<Vec<f64>> {
    let n = nodes.len();
    let mut vt = nalgebra::DMatrix::<f64>::zeros(n, n);
    for (j, &z) in nodes.iter().enumerate() {
        let p = eval_orthonormal(rec, n - 1, z)?;
        for i in 0..n {
            vt[(i, j)] = p[i];
        }
    }
    let mut rhs = nalgebra::DVector::<f64>::zeros(n);
    rhs[0] = 1.0;
    let lu = vt.lu();
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::SingularSystem("orthonormal Vandermonde is singular".into()))?;
    Ok(x.iter().copied().collect())
}

/// Condition number `kappa = sum |w_n| / |sum w_n|` of a quadrature rule.
pub fn condition_number(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::InvalidParameter("condition number of empty rule".into()));
    }
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Err(Error::InvalidParameter("zero weight sum".into()));
    }
    Ok(weights.iter().map(|w| w.abs()).sum::<f64>() / total.abs())
}

/// Nested Clenshaw-Curtis nodes at `level`: the single midpoint at level 0,
/// otherwise the `2^level + 1` extrema of the Chebyshev polynomial, ascending.
pub fn clenshaw_curtis_nodes(level: usize) -> Vec<f64> {
    if level == 0 {
        return vec![0.0];
    }
    let n = (1usize << level) + 1;
    let m = (n - 1) as f64;
    (0..n)
        .map(|j| {
            // cos over [pi, 0] reversed, with exact symmetry
            let theta = (n - 1 - j) as f64 * std::f64::consts::PI / m;
            let c = theta.cos();
            if 2 * j + 1 == n {
                0.0
            } else if j == 0 {
                -1.0
            } else if j + 1 == n {
                1.0
            } else {
                c
            }
        })
        .collect()
}

/// Clenshaw-Curtis rule with `n` points on `[-1, 1]`: ascending cosine nodes
/// and weights normalized to the uniform probability density (mass 1).
pub fn clenshaw_curtis_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "clenshaw_curtis_rule needs n >= 2");
    let m = n - 1;
    let mf = m as f64;
    // cosine table: cos(pi * k / m) for k mod 2m, so inner sums are lookups
    let table: Vec<f64> = (0..2 * m).map(|k| (std::f64::consts::PI * k as f64 / mf).cos()).collect();
    let mut weights = vec![0.0f64; n];
    for j in 0..n {
        let mut s = 0.0;
        for k in 1..=m / 2 {
            let b = if 2 * k == m { 1.0 } else { 2.0 };
            s += b / ((4 * k * k - 1) as f64) * table[(2 * k * j) % (2 * m)];
        }
        let c = if j == 0 || j == m { 1.0 } else { 2.0 };
        weights[j] = c / mf * (1.0 - s);
    }
    let nodes: Vec<f64> = (0..n).map(|j| -table[j % (2 * m)]).collect();
    // total CC mass is 2 (integral of dz); normalize to the uniform PDF
    for w in &mut weights {
        *w *= 0.5;
    }
    (nodes, weights)
}

/// Level-to-point-count growth of a univariate rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthRule {
    /// `m_l = l + 1`: one new point per level (Leja default).
    OnePerLevel,
    /// `m_0 = 1`, `m_l = 2^l + 1`: Clenshaw-Curtis doubling.
    Exponential,
}

impl GrowthRule {
    pub fn points(&self, level: usize) -> usize {
        match self {
            GrowthRule::OnePerLevel => level + 1,
            GrowthRule::Exponential => {
                if level == 0 {
                    1
                } else {
                    (1usize << level) + 1
                }
            }
        }
    }
}

/// Kind of univariate rule backing a sparse grid dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleKind {
    Leja,
    ClenshawCurtis,
}

/// A nested univariate rule: a node sequence whose first `m_l` entries are the
/// level-`l` grid, with cached barycentric weights per level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnivariateRule {
    kind: RuleKind,
    growth: GrowthRule,
    spec: WeightSpec,
    nodes: Vec<f64>,
    #[serde(skip)]
    level_bary: Vec<Vec<f64>>,
}

impl UnivariateRule {
    pub fn new(spec: WeightSpec, kind: RuleKind, growth: GrowthRule) -> Result<Self> {
        if kind == RuleKind::ClenshawCurtis {
            if growth != GrowthRule::Exponential {
                return Err(Error::InvalidParameter(
                    "Clenshaw-Curtis nesting requires exponential growth".into(),
                ));
            }
            if !matches!(spec.family(), crate::orthopoly::WeightFamily::Jacobi { .. }) {
                return Err(Error::InvalidParameter(
                    "Clenshaw-Curtis rules require a bounded Jacobi-type weight".into(),
                ));
            }
        }
        Ok(Self { kind, growth, spec, nodes: Vec::new(), level_bary: Vec::new() })
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn growth(&self) -> GrowthRule {
        self.growth
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn points_at_level(&self, level: usize) -> usize {
        self.growth.points(level)
    }

    /// Make node tables and barycentric caches available through `level`.
    pub fn ensure_level(&mut self, level: usize) -> Result<()> {
        let need = self.growth.points(level);
        if self.nodes.len() < need {
            match self.kind {
                RuleKind::Leja => {
                    let mut seq = if self.nodes.is_empty() {
                        LejaSequence::build(self.spec.clone(), need)?
                    } else {
                        let mut s =
                            LejaSequence::from_nodes(self.spec.clone(), self.nodes.clone())?;
                        s.extend_to(need)?;
                        s
                    };
                    self.nodes = std::mem::take(&mut seq.nodes);
                }
                RuleKind::ClenshawCurtis => {
                    let mut lev = 0usize;
                    while self.growth.points(lev) <= self.nodes.len() && self.nodes.len() > 0 {
                        if self.growth.points(lev) == self.nodes.len() {
                            break;
                        }
                        lev += 1;
                    }
                    // rebuild from scratch; cheap and simple
                    self.nodes.clear();
                    self.nodes.push(0.0);
                    let mut l = 1usize;
                    while self.nodes.len() < need {
                        let cur = clenshaw_curtis_nodes(l);
                        let prev: Vec<f64> = clenshaw_curtis_nodes(l - 1);
                        for &z in &cur {
                            let is_new = if l == 1 {
                                z != 0.0
                            } else {
                                !prev.contains(&z)
                            };
                            if is_new {
                                self.nodes.push(z);
                            }
                        }
                        l += 1;
                    }
                }
            }
        }
        while self.level_bary.len() <= level {
            let l = self.level_bary.len();
            let m = self.growth.points(l);
            self.level_bary.push(plain_barycentric(&self.nodes[..m]));
        }
        Ok(())
    }

    /// First `m_l` nodes (the level-`l` grid, canonical coordinates).
    pub fn nodes_for_level(&self, level: usize) -> &[f64] {
        &self.nodes[..self.growth.points(level)]
    }

    /// Indices of the nodes introduced at `level` (the hierarchical new points).
    pub fn new_node_range(&self, level: usize) -> std::ops::Range<usize> {
        let lo = if level == 0 { 0 } else { self.growth.points(level - 1) };
        lo..self.growth.points(level)
    }

    pub fn node(&self, index: usize) -> f64 {
        self.nodes[index]
    }

    /// Values of all `m_l` Lagrange cardinals of level `level` at canonical `z`.
    pub fn cardinal_values(&self, level: usize, z: f64) -> Vec<f64> {
        let m = self.growth.points(level);
        let nodes = &self.nodes[..m];
        let bary = &self.level_bary[level];
        let mut out = vec![0.0; m];
        let mut den = 0.0;
        for (i, (&zn, &bn)) in nodes.iter().zip(bary).enumerate() {
            let d = z - zn;
            if d.abs() <= 1e-15 * z.abs().max(zn.abs()).max(1.0) {
                out.iter_mut().for_each(|v| *v = 0.0);
                out[i] = 1.0;
                return out;
            }
            let t = bn / d;
            out[i] = t;
            den += t;
        }
        for v in &mut out {
            *v /= den;
        }
        out
    }
}

fn plain_barycentric(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut logs = vec![0.0f64; n];
    let mut signs = vec![1.0f64; n];
    for i in 0..n {
        let mut s = 0.0;
        let mut sg = 1.0;
        for j in 0..n {
            if i != j {
                let d = nodes[i] - nodes[j];
                s -= d.abs().ln();
                sg *= d.signum();
            }
        }
        logs[i] = s;
        signs[i] = sg;
    }
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    logs.iter().zip(&signs).map(|(&l, &s)| s * (l - m).exp()).collect()
}

/// CSV header used by [`sequence_to_csv`].
pub const SEQUENCE_CSV_HEADER: &str =
    "node,barycentric_weight,quadrature_weight,condition_number";

/// Serialize a sequence as CSV: one row per node with its physical position,
/// renormalized barycentric weight, full-rule quadrature weight, and the
/// condition number of the prefix rule ending at that node. Floats carry 17
/// significant digits so parsing reproduces them exactly.
pub fn sequence_to_csv(seq: &LejaSequence, rec: &Recurrence) -> Result<String> {
    let n = seq.len();
    let quad = seq.quadrature_weights(rec)?;
    let mut out = String::from(SEQUENCE_CSV_HEADER);
    out.push('\n');
    let phys = seq.physical_nodes();
    for i in 0..n {
        let kappa = condition_number(&seq.quadrature_weights_prefix(rec, i + 1)?)?;
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            phys[i],
            seq.barycentric_weights()[i],
            quad[i],
            kappa
        ));
    }
    Ok(out)
}

/// Parse the CSV emitted by [`sequence_to_csv`]; returns the columns
/// `(nodes, barycentric, quadrature, condition)`.
pub fn sequence_from_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SEQUENCE_CSV_HEADER => {}
        _ => return Err(Error::Serialization("missing sequence CSV header".into())),
    }
    let mut cols: (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Serialization(format!("row {}: expected 4 fields", ln + 2)));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Serialization(format!("row {}: {e}", ln + 2)))
        };
        cols.0.push(parse(fields[0])?);
        cols.1.push(parse(fields[1])?);
        cols.2.push(parse(fields[2])?);
        cols.3.push(parse(fields[3])?);
    }
    Ok(cols)
}
