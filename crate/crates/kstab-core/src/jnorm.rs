//! Reduced norm of a filtration: the exact minimum of the twisted
//! max-minus-mean energy over all twist directions, with properness
//! certificates for the objective.

use crate::error::{KstabError, Result};
use crate::filtration::ToricFiltration;
use crate::lp::{self, LpProblem, LpStatus, Relation};
use crate::rational::{abs, Int, Ratio};
use crate::vector::QVec;
use num_traits::{One, Signed, Zero};

/// The twist objective `xi -> jna(twist(xi))` in closed form: the mean moves
/// by the obstruction pairing and the max stays a vertex maximum, so the
/// objective is a finite max of affine forms in `xi`.
#[derive(Clone, Debug)]
pub struct TwistObjective {
    /// One form per domain vertex: gradient `bc - V`, constant `f(V)`.
    forms: Vec<(QVec, Ratio)>,
    ena: Ratio,
}

impl TwistObjective {
    pub fn new(filt: &ToricFiltration) -> Result<Self> {
        let bc = filt.model().barycenter();
        let forms = filt
            .profile()
            .domain()
            .vertices()
            .iter()
            .map(|v| (bc - v, filt.profile().eval(v)))
            .collect();
        Ok(TwistObjective {
            forms,
            ena: filt.ena()?,
        })
    }

    /// Exact value of `jna(twist(xi))`.
    pub fn eval(&self, xi: &QVec) -> Ratio {
        let max = self
            .forms
            .iter()
            .map(|(g, c)| g.dot(xi) + c)
            .max()
            .expect("nonempty forms");
        max - &self.ena
    }

    pub fn forms(&self) -> &[(QVec, Ratio)] {
        &self.forms
    }
}

/// Result of the reduced-norm minimization.
#[derive(Clone, Debug)]
pub struct JnormSolution {
    pub min: Ratio,
    /// Lexicographically smallest optimal twist direction.
    pub argmin: QVec,
    /// Number of coordinates free on the optimal face (0 when unique).
    pub free_coords: usize,
}

/// Minimizes `xi -> jna(twist(xi))` exactly. The minimum is nonnegative and
/// vanishes precisely when the profile is affine (a product degeneration);
/// the reported argmin is the lexicographically smallest optimal point.
pub fn jnat(filt: &ToricFiltration) -> Result<JnormSolution> {
    let objective = TwistObjective::new(filt)?;
    let (raw_min, _) = lp::min_of_max_affine(objective.forms())?;
    let min = raw_min.clone() - &objective.ena;
    if min.is_negative() {
        return Err(KstabError::Internal(
            "reduced norm must be nonnegative".into(),
        ));
    }

    // Optimal face: <bc - V, xi> <= raw_min - f(V) for every vertex form.
    let n = filt.model().dim();
    let face: Vec<(Vec<Ratio>, Relation, Ratio)> = objective
        .forms()
        .iter()
        .map(|(g, c)| (g.0.clone(), Relation::Le, &raw_min - c))
        .collect();

    // Free coordinates: those whose range over the face is nontrivial.
    let mut free_coords = 0;
    for k in 0..n {
        let mut lo_obj = vec![Ratio::zero(); n];
        lo_obj[k] = Ratio::one();
        let lo = solve_on_face(&face, n, lo_obj.clone(), None)?;
        let mut hi_obj = lo_obj;
        hi_obj[k] = -Ratio::one();
        let hi = solve_on_face(&face, n, hi_obj, None)?;
        if lo != -hi {
            free_coords += 1;
        }
    }

    // Lexicographic refinement coordinate by coordinate.
    let mut fixed: Vec<Ratio> = Vec::with_capacity(n);
    for k in 0..n {
        let mut obj = vec![Ratio::zero(); n];
        obj[k] = Ratio::one();
        let value = solve_on_face(&face, n, obj, Some(&fixed))?;
        fixed.push(value);
    }
    let argmin = QVec(fixed);
    // The argmin attains the minimum exactly.
    if objective.eval(&argmin) != min {
        return Err(KstabError::Internal(
            "lexicographic refinement left the optimal face".into(),
        ));
    }
    Ok(JnormSolution {
        min,
        argmin,
        free_coords,
    })
}

fn solve_on_face(
    face: &[(Vec<Ratio>, Relation, Ratio)],
    n: usize,
    minimize: Vec<Ratio>,
    fixed_prefix: Option<&[Ratio]>,
) -> Result<Ratio> {
    let mut constraints = face.to_vec();
    if let Some(prefix) = fixed_prefix {
        for (k, value) in prefix.iter().enumerate() {
            let mut row = vec![Ratio::zero(); n];
            row[k] = Ratio::one();
            constraints.push((row, Relation::Eq, value.clone()));
        }
    }
    let sol = lp::solve(&LpProblem {
        num_vars: n,
        minimize,
        constraints,
        free_vars: true,
    })?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective),
        LpStatus::Unbounded => Err(KstabError::UnboundedObjective),
        LpStatus::Infeasible => Err(KstabError::Internal(
            "optimal face of the reduced norm is nonempty by construction".into(),
        )),
    }
}

/// A linear lower bound `jna(twist(xi)) >= c1 * |xi|_1 - c2` certifying
/// properness of the twist objective.
#[derive(Clone, Debug)]
pub struct PropernessCertificate {
    /// Largest scale with the barycenter-centered cross-polytope inside P.
    pub theta: Ratio,
    pub c1: Ratio,
    pub c2: Ratio,
}

impl PropernessCertificate {
    pub fn bound(&self, xi: &QVec) -> Ratio {
        let l1: Ratio = xi.0.iter().map(abs).sum();
        &self.c1 * l1 - &self.c2
    }
}

/// Builds the certificate: `theta` is the largest step so that
/// `bc +/- theta * e_k` stays in the polytope for every coordinate, giving
/// `c1 = theta / dim` and `c2 = ena + |min f|`.
pub fn properness_certificate(filt: &ToricFiltration) -> Result<PropernessCertificate> {
    let model = filt.model();
    let p = model.polytope();
    let n = p.dim();
    let bc = model.barycenter();
    let mut theta: Option<Ratio> = None;
    for k in 0..n {
        for sign in [1i64, -1] {
            let mut dir = QVec::zeros(n);
            dir.0[k] = Ratio::from_integer(Int::from(sign));
            // Largest t with bc + t * dir inside P.
            for facet in p.facets() {
                let along = dir.dot_int(&facet.normal);
                if along.is_negative() {
                    let step = facet.slack(bc) / (-along);
                    theta = Some(match theta.take() {
                        None => step,
                        Some(t) if step < t => step,
                        Some(t) => t,
                    });
                }
            }
        }
    }
    let theta = theta.ok_or_else(|| KstabError::Internal("unbounded polytope".into()))?;
    if !theta.is_positive() {
        return Err(KstabError::Internal(
            "barycenter must be interior".into(),
        ));
    }
    let c1 = &theta / Ratio::from_integer(Int::from(n as i64));
    let c2 = filt.ena()? + abs(&filt.e_minus());
    Ok(PropernessCertificate { theta, c1, c2 })
}
