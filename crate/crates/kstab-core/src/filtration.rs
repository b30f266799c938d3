//! Graded filtrations of the section ring of a toric Fano model, encoded by
//! a rational PL profile `f` on the moment polytope: the grade-`m` jump
//! values are `m*l0*f(u/(m*l0))` over the lattice points of `m*l0*P`.

use crate::error::{KstabError, Result};
use crate::model::ToricFanoModel;
use crate::pl::{AffinePiece, PlConvexFunction};
use crate::rational::{abs, rat, Int, Ratio};
use crate::vector::{dot_int_int, int_vec_to_qvec, QVec};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

/// Doubling schedule and tolerance used for limit quantities.
#[derive(Clone, Debug)]
pub struct LimitConfig {
    pub m_cap: u32,
    pub tol: Ratio,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig {
            m_cap: 40,
            tol: rat(1, 100),
        }
    }
}

impl LimitConfig {
    /// Levels `8, 16, 32, ...` capped (and terminated) by `m_cap`.
    pub fn schedule(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut m = 8u32.min(self.m_cap.max(1));
        while m < self.m_cap {
            out.push(m);
            m = m.saturating_mul(2);
        }
        out.push(self.m_cap.max(1));
        out.dedup();
        out
    }
}

/// A limit quantity evaluated along the doubling schedule.
#[derive(Clone, Debug)]
pub struct LimitValue {
    pub value: Ratio,
    pub converged: bool,
    pub history: Vec<(u32, Ratio)>,
    pub error_bar: Ratio,
}

impl LimitValue {
    pub fn from_history(history: Vec<(u32, Ratio)>, tol: &Ratio) -> Self {
        let value = history.last().expect("nonempty history").1.clone();
        let error_bar = if history.len() >= 2 {
            abs(&(&history[history.len() - 1].1 - &history[history.len() - 2].1))
        } else {
            Ratio::zero()
        };
        let converged = history.len() >= 2 && error_bar < *tol;
        LimitValue {
            value,
            converged,
            history,
            error_bar,
        }
    }

    pub fn exact(value: Ratio) -> Self {
        LimitValue {
            value,
            converged: true,
            history: Vec::new(),
            error_bar: Ratio::zero(),
        }
    }
}

/// Distribution of jump values: exact atoms at a finite level, or the limit
/// moments of the pushforward of the uniform measure under the profile.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum DhMeasure {
    Atoms {
        level: u32,
        /// `(value, mass)` sorted by decreasing value; masses sum to one.
        atoms: Vec<(Ratio, Ratio)>,
    },
    Moments {
        mean: Ratio,
        second_moment: Ratio,
        support_min: Ratio,
        support_max: Ratio,
    },
}

impl DhMeasure {
    pub fn total_mass(&self) -> Ratio {
        match self {
            DhMeasure::Atoms { atoms, .. } => {
                atoms.iter().map(|(_, m)| m.clone()).sum()
            }
            DhMeasure::Moments { .. } => Ratio::from_integer(Int::from(1)),
        }
    }

    pub fn mean(&self) -> Ratio {
        match self {
            DhMeasure::Atoms { atoms, .. } => {
                atoms.iter().map(|(v, m)| v * m).sum()
            }
            DhMeasure::Moments { mean, .. } => mean.clone(),
        }
    }

    pub fn second_moment(&self) -> Ratio {
        match self {
            DhMeasure::Atoms { atoms, .. } => {
                atoms.iter().map(|(v, m)| v * v * m).sum()
            }
            DhMeasure::Moments { second_moment, .. } => second_moment.clone(),
        }
    }
}

/// Integer-scaled evaluation of a profile on one grade grid: the per-degree
/// value at point `u` is `values[i] / scale`, with all arithmetic cleared of
/// denominators up front.
#[derive(Clone, Debug)]
pub struct ScaledLevel {
    pub points: Vec<Vec<Int>>,
    pub values: Vec<Int>,
    /// Per-degree denominator: `f(u/grade) = values[i] / scale`.
    pub scale: Int,
    pub grade: u32,
}

/// A toric filtration of the anticanonical section ring.
#[derive(Clone, Debug)]
pub struct ToricFiltration {
    model: Arc<ToricFanoModel>,
    profile: PlConvexFunction,
}

impl ToricFiltration {
    pub fn from_profile(model: Arc<ToricFanoModel>, profile: PlConvexFunction) -> Result<Self> {
        if profile.domain().dim() != model.dim() {
            return Err(KstabError::DimensionMismatch {
                expected: model.dim(),
                got: profile.domain().dim(),
            });
        }
        Ok(ToricFiltration { model, profile })
    }

    pub fn from_pieces(model: Arc<ToricFanoModel>, pieces: Vec<AffinePiece>) -> Result<Self> {
        let profile = PlConvexFunction::new(model.polytope().clone(), pieces)?;
        Self::from_profile(model, profile)
    }

    /// The trivial filtration (zero profile).
    pub fn trivial(model: Arc<ToricFanoModel>) -> Result<Self> {
        let profile = PlConvexFunction::constant(model.polytope().clone(), Ratio::zero())?;
        Self::from_profile(model, profile)
    }

    /// Filtration induced by the monomial valuation of `zeta`: the affine
    /// profile `<., zeta> + A(zeta)`, nonnegative with minimum zero.
    pub fn from_valuation(model: Arc<ToricFanoModel>, zeta: &QVec) -> Result<Self> {
        let a = model.log_discrepancy(zeta);
        let pieces = vec![AffinePiece {
            gradient: zeta.clone(),
            constant: a,
        }];
        Self::from_pieces(model, pieces)
    }

    pub fn model(&self) -> &Arc<ToricFanoModel> {
        &self.model
    }

    pub fn profile(&self) -> &PlConvexFunction {
        &self.profile
    }

    /// Upper linear bound: `max_P f`.
    pub fn e_plus(&self) -> Ratio {
        self.profile.max_over_domain()
    }

    /// Lower linear bound: `min_P f`.
    pub fn e_minus(&self) -> Ratio {
        self.profile.min_over_domain()
    }

    fn grade(&self, m: u32) -> Result<u32> {
        m.checked_mul(self.model.ell0())
            .ok_or_else(|| KstabError::InvalidInput("level overflow".into()))
    }

    /// Per-degree grid of level `m`: the points `u/(m*l0)` for lattice
    /// points `u` of `m*l0*P`.
    pub fn level_grid(&self, m: u32) -> Result<Vec<QVec>> {
        let grade = self.grade(m)?;
        let pts = self.model.grade_grid(grade)?;
        let scale = Ratio::new(Int::from(1), Int::from(grade));
        Ok(pts
            .iter()
            .map(|u| int_vec_to_qvec(u).scale(&scale))
            .collect())
    }

    /// Integer-scaled profile values over the grade-`m` grid; all later
    /// per-level arithmetic runs on plain integers.
    pub fn scaled_level(&self, m: u32) -> Result<ScaledLevel> {
        let grade = self.grade(m)?;
        let points = self.model.grade_grid(grade)?;
        if points.is_empty() {
            return Err(KstabError::Internal("empty lattice grade".into()));
        }
        // Common denominator of all piece coefficients.
        let mut denom = Int::one();
        for p in self.profile.pieces() {
            for g in &p.gradient.0 {
                denom = denom.lcm(g.denom());
            }
            denom = denom.lcm(p.constant.denom());
        }
        let grade_int = Int::from(grade);
        // Piece j scaled: <a_j, u> + b_j with a_j = denom * grad_j and
        // b_j = denom * grade * const_j, so value(u) = denom*grade*f(u/grade).
        let scaled_pieces: Vec<(Vec<Int>, Int)> = self
            .profile
            .pieces()
            .iter()
            .map(|p| {
                let a: Vec<Int> = p
                    .gradient
                    .0
                    .iter()
                    .map(|g| g.numer() * (&denom / g.denom()))
                    .collect();
                let b = p.constant.numer() * (&denom / p.constant.denom()) * &grade_int;
                (a, b)
            })
            .collect();
        let values: Vec<Int> = points
            .iter()
            .map(|u| {
                scaled_pieces
                    .iter()
                    .map(|(a, b)| dot_int_int(u, a) + b)
                    .max()
                    .expect("nonempty pieces")
            })
            .collect();
        Ok(ScaledLevel {
            points: points.as_ref().clone(),
            values,
            scale: denom * grade_int,
            grade,
        })
    }

    /// Jump values on grade `m`, sorted decreasingly: the multiset
    /// `{m*l0*f(u/(m*l0))}`.
    pub fn successive_minima(&self, m: u32) -> Result<Vec<Ratio>> {
        let level = self.scaled_level(m)?;
        // Jump value = grade * f(u/grade) = value / (scale / grade).
        let denom = &level.scale / Int::from(level.grade);
        let mut values = level.values;
        values.sort_by(|a, b| b.cmp(a));
        Ok(values
            .into_iter()
            .map(|v| Ratio::new(v, denom.clone()))
            .collect())
    }

    /// Exact mean of the profile against the uniform probability measure.
    pub fn ena(&self) -> Result<Ratio> {
        self.profile.mean()
    }

    /// Finite-level average of the per-degree jump values.
    pub fn ena_m(&self, m: u32) -> Result<Ratio> {
        let level = self.scaled_level(m)?;
        let sum: Int = level.values.iter().fold(Int::zero(), |acc, v| acc + v);
        Ok(Ratio::new(sum, level.scale * Int::from(level.points.len() as u64)))
    }

    /// `max_P f`, the top of the jump-value range per degree.
    pub fn lambda_max(&self) -> Ratio {
        self.profile.max_over_domain()
    }

    /// `lambda_max - ena`; nonnegative, zero exactly for constant profiles.
    pub fn jna(&self) -> Result<Ratio> {
        Ok(self.lambda_max() - self.ena()?)
    }

    /// Shifted filtration: profile `f + c`.
    pub fn shift(&self, c: &Ratio) -> Self {
        ToricFiltration {
            model: Arc::clone(&self.model),
            profile: self.profile.shift(c),
        }
    }

    /// Twisted filtration: profile `f - <., xi>`.
    ///
    /// With the model's obstruction normalization this satisfies, exactly:
    /// `ena(twist(xi)) = ena() - futaki(xi)`,
    /// `phi_value(twist(xi), m, zeta) = phi_value(m, zeta + xi) + theta(xi, zeta)`,
    /// and finite-level threshold invariance.
    pub fn twist(&self, xi: &QVec) -> Self {
        ToricFiltration {
            model: Arc::clone(&self.model),
            profile: self.profile.add_linear(&-xi),
        }
    }

    /// Twist by a validated direction.
    pub fn twist_by(&self, xi: &crate::model::TwistVector) -> Self {
        self.twist(xi.coords())
    }

    /// Whether the filtration is generated by a single monomial valuation
    /// (affine profile); these are exactly the product degenerations.
    pub fn is_product(&self) -> bool {
        self.profile.is_affine()
    }

    /// Metric value at grade `m` against the monomial valuation of `zeta`,
    /// through the graded-ideal realization: the ideal at jump level `x` is
    /// generated by the chart monomials of the sections with value >= x, and
    /// the metric is `max_x [x - wt_zeta(I_x)]` per degree.
    pub fn phi_value(&self, m: u32, zeta: &QVec) -> Result<Ratio> {
        if zeta.dim() != self.model.dim() {
            return Err(KstabError::DimensionMismatch {
                expected: self.model.dim(),
                got: zeta.dim(),
            });
        }
        let level = self.scaled_level(m)?;
        let grade_int = Int::from(level.grade);
        // Clear the valuation's denominators: zeta = zint / zden, and the
        // support minimum is smin_n / smin_d.
        let mut zden = Int::one();
        for c in &zeta.0 {
            zden = zden.lcm(c.denom());
        }
        let zint: Vec<Int> = zeta
            .0
            .iter()
            .map(|c| c.numer() * (&zden / c.denom()))
            .collect();
        let (support_min, _) = self.model.polytope().support_min(zeta);
        // Common denominator of the jump values (values/scale) and the
        // chart-normalized valuations (<u,zint>/(grade*zden) - smin).
        let c = level
            .scale
            .lcm(&(&grade_int * &zden))
            .lcm(support_min.denom());
        let jump_factor = &c / &level.scale;
        let val_factor = &c / (&grade_int * &zden);
        let smin_scaled = support_min.numer() * (&c / support_min.denom());
        // Pairs (jump value, valuation of the generator), on one denominator.
        let mut pairs: Vec<(Int, Int)> = level
            .points
            .iter()
            .zip(&level.values)
            .map(|(u, v)| {
                (
                    v * &jump_factor,
                    dot_int_int(u, &zint) * &val_factor - &smin_scaled,
                )
            })
            .collect();
        pairs.sort_by(|a, b| b.0.cmp(&a.0));
        // Sweep the jump levels downward; the ideal only grows, so its
        // valuation is a running minimum over the sorted prefix.
        let mut best: Option<Int> = None;
        let mut running_min: Option<Int> = None;
        let mut i = 0;
        while i < pairs.len() {
            let jump = pairs[i].0.clone();
            while i < pairs.len() && pairs[i].0 == jump {
                let w = &pairs[i].1;
                running_min = Some(match running_min.take() {
                    None => w.clone(),
                    Some(r) if *w < r => w.clone(),
                    Some(r) => r,
                });
                i += 1;
            }
            let candidate = &jump - running_min.as_ref().expect("nonempty prefix");
            best = Some(match best.take() {
                None => candidate,
                Some(b) if candidate > b => candidate,
                Some(b) => b,
            });
        }
        let best = best.ok_or_else(|| KstabError::Internal("empty lattice grade".into()))?;
        Ok(Ratio::new(best, c))
    }

    /// Exact limit of the metric value: `max_P (f - <., zeta>) - A(zeta)`,
    /// attained at a vertex because the maximand is convex.
    pub fn phi_exact(&self, zeta: &QVec) -> Ratio {
        let shifted = self.profile.add_linear(&-zeta);
        shifted.max_over_domain() - self.model.log_discrepancy(zeta)
    }

    /// Metric limit along the doubling schedule with a Cauchy stopping rule.
    pub fn phi_limit(&self, zeta: &QVec, config: &LimitConfig) -> Result<LimitValue> {
        let mut history = Vec::new();
        for m in config.schedule() {
            history.push((m, self.phi_value(m, zeta)?));
        }
        Ok(LimitValue::from_history(history, &config.tol))
    }

    /// Jump-value distribution at level `m`: equal masses on the per-degree
    /// values over the grade grid.
    pub fn dh(&self, m: u32) -> Result<DhMeasure> {
        let level = self.scaled_level(m)?;
        let n = level.points.len();
        let mut values = level.values;
        values.sort_by(|a, b| b.cmp(a));
        let unit = Ratio::new(Int::from(1), Int::from(n as u64));
        let mut atoms: Vec<(Ratio, Ratio)> = Vec::new();
        for v in values {
            let v = Ratio::new(v, level.scale.clone());
            match atoms.last_mut() {
                Some((value, mass)) if *value == v => {
                    *mass = &*mass + &unit;
                }
                _ => atoms.push((v, unit.clone())),
            }
        }
        Ok(DhMeasure::Atoms { level: m, atoms })
    }

    /// Limit distribution: pushforward of the uniform probability measure
    /// under the profile, described by its first two moments and support.
    pub fn dh_limit(&self) -> Result<DhMeasure> {
        let vol = self.profile.domain().volume()?;
        Ok(DhMeasure::Moments {
            mean: self.ena()?,
            second_moment: self.profile.integral_square()? / vol,
            support_min: self.e_minus(),
            support_max: self.e_plus(),
        })
    }
}

/// Scaling action on metrics: `(b o phi)(zeta) = b * phi(zeta / b)`.
#[derive(Clone, Debug)]
pub struct RescaledMetric {
    filtration: ToricFiltration,
    factor: Ratio,
}

impl RescaledMetric {
    pub fn new(filtration: ToricFiltration, factor: Ratio) -> Result<Self> {
        if !factor.is_positive() {
            return Err(KstabError::InvalidInput(
                "rescaling factor must be positive".into(),
            ));
        }
        Ok(RescaledMetric { filtration, factor })
    }

    pub fn phi_value(&self, m: u32, zeta: &QVec) -> Result<Ratio> {
        let inv = Ratio::from_integer(Int::from(1)) / &self.factor;
        let scaled = zeta.scale(&inv);
        Ok(&self.factor * self.filtration.phi_value(m, &scaled)?)
    }

    pub fn phi_exact(&self, zeta: &QVec) -> Ratio {
        let inv = Ratio::from_integer(Int::from(1)) / &self.factor;
        &self.factor * self.filtration.phi_exact(&zeta.scale(&inv))
    }
}
