//! Threshold-type invariants: log-canonical thresholds of monomial ideals,
//! the threshold part and Ding invariant of a filtration, and the
//! boundary-measure weight of a configuration with its normalization pinned
//! on product degenerations.

use crate::error::{KstabError, Result};
use crate::filtration::{LimitConfig, LimitValue, ToricFiltration};
use crate::lp::{self, LpProblem, LpStatus, Relation};
use crate::model::ToricFanoModel;
use crate::pl::PlConvexFunction;
use crate::rational::{rat_int, Int, Ratio};
use crate::vector::QVec;
use num_traits::{One, Signed, Zero};

/// Log-canonical threshold of the monomial ideal generated by the given
/// exponent vectors on an affine chart: the optimum of the halfspace-form
/// program `min sum(zeta)` over `zeta >= 0` with `<a_g, zeta> >= 1` for
/// every generator.
pub fn lct_monomial(exponents: &[Vec<u64>]) -> Result<Ratio> {
    let Some(first) = exponents.first() else {
        return Err(KstabError::InvalidInput("empty generator set".into()));
    };
    let k = first.len();
    if k == 0 {
        return Err(KstabError::InvalidInput("zero-dimensional chart".into()));
    }
    for e in exponents {
        if e.len() != k {
            return Err(KstabError::DimensionMismatch {
                expected: k,
                got: e.len(),
            });
        }
        if e.iter().all(|&x| x == 0) {
            return Err(KstabError::InvalidInput(
                "unit ideal has no threshold".into(),
            ));
        }
    }
    let constraints = exponents
        .iter()
        .map(|e| {
            (
                e.iter().map(|&x| rat_int(x as i64)).collect::<Vec<_>>(),
                Relation::Ge,
                Ratio::one(),
            )
        })
        .collect();
    let problem = LpProblem {
        num_vars: k,
        minimize: vec![Ratio::one(); k],
        constraints,
        free_vars: false,
    };
    let sol = lp::solve(&problem)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective),
        _ => Err(KstabError::Internal(
            "threshold program must be feasible and bounded".into(),
        )),
    }
}

/// Independent vertex-form oracle for the same threshold: the largest `c`
/// with the all-ones vector inside `c` times the exponent polyhedron,
/// computed as a convex-combination program.
pub fn lct_monomial_newton_oracle(exponents: &[Vec<u64>]) -> Result<Ratio> {
    let Some(first) = exponents.first() else {
        return Err(KstabError::InvalidInput("empty generator set".into()));
    };
    let k = first.len();
    // Minimize s with s*(1,..,1) >= sum_g pi_g a_g, sum pi = 1, pi >= 0;
    // the threshold is 1/s.
    let g = exponents.len();
    let mut constraints: Vec<(Vec<Ratio>, Relation, Ratio)> = Vec::new();
    let mut ones = vec![Ratio::zero(); g + 1];
    for x in ones.iter_mut().take(g) {
        *x = Ratio::one();
    }
    constraints.push((ones, Relation::Eq, Ratio::one()));
    for coord in 0..k {
        // s - sum_g pi_g a_g[coord] >= 0.
        let mut row = vec![Ratio::zero(); g + 1];
        for (j, e) in exponents.iter().enumerate() {
            row[j] = -rat_int(e[coord] as i64);
        }
        row[g] = Ratio::one();
        constraints.push((row, Relation::Ge, Ratio::zero()));
    }
    let mut minimize = vec![Ratio::zero(); g + 1];
    minimize[g] = Ratio::one();
    let problem = LpProblem {
        num_vars: g + 1,
        minimize,
        constraints,
        free_vars: false,
    };
    let sol = lp::solve(&problem)?;
    if sol.status != LpStatus::Optimal || !sol.objective.is_positive() {
        return Err(KstabError::InvalidInput(
            "unit ideal has no threshold".into(),
        ));
    }
    Ok(Ratio::one() / sol.objective)
}

/// Threshold of a monomial ideal on `chart x C_t` measured against the
/// divisor `(t)`: generators carry a chart exponent and a rational
/// `t`-exponent. Computed as the halfspace-form program at `w(t) = 1`.
pub fn lct_monomial_rel_t(generators: &[(Vec<u64>, Ratio)]) -> Result<Ratio> {
    let Some(first) = generators.first() else {
        return Err(KstabError::InvalidInput("empty generator set".into()));
    };
    let k = first.0.len();
    for (e, te) in generators {
        if e.len() != k {
            return Err(KstabError::DimensionMismatch {
                expected: k,
                got: e.len(),
            });
        }
        if te.is_negative() {
            return Err(KstabError::InvalidInput(
                "negative t-exponent".into(),
            ));
        }
    }
    // min sum(zeta) + 1 - w  over zeta >= 0, w free,
    // subject to w <= <a_g, zeta> + e_g. Split w = wp - wm.
    let vars = k + 2;
    let mut constraints: Vec<(Vec<Ratio>, Relation, Ratio)> = Vec::new();
    for (e, te) in generators {
        let mut row: Vec<Ratio> = e.iter().map(|&x| rat_int(x as i64)).collect();
        row.push(-Ratio::one());
        row.push(Ratio::one());
        constraints.push((row, Relation::Ge, -te.clone()));
    }
    let mut minimize = vec![Ratio::one(); k];
    minimize.push(-Ratio::one());
    minimize.push(Ratio::one());
    let problem = LpProblem {
        num_vars: vars,
        minimize,
        constraints,
        free_vars: false,
    };
    let sol = lp::solve(&problem)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective + Ratio::one()),
        LpStatus::Unbounded => Err(KstabError::Internal(
            "relative threshold cannot be unbounded for a nonempty ideal".into(),
        )),
        LpStatus::Infeasible => Err(KstabError::Internal(
            "relative threshold program must be feasible".into(),
        )),
    }
}

/// Vertex-form oracle for `lct_monomial_rel_t`: the largest `c` such that
/// the all-ones chart vector at `t`-height one dominates a convex
/// combination of the generators shifted by `c` in the `t`-direction.
pub fn lct_monomial_rel_t_newton_oracle(generators: &[(Vec<u64>, Ratio)]) -> Result<Ratio> {
    let Some(first) = generators.first() else {
        return Err(KstabError::InvalidInput("empty generator set".into()));
    };
    let k = first.0.len();
    let g = generators.len();
    // max c: sum pi = 1, sum_g pi_g a_g[coord] <= 1, sum_g pi_g e_g + c <= 1,
    // with pi >= 0 and c free (thresholds can be negative): c = cp - cm.
    let vars = g + 2;
    let mut constraints: Vec<(Vec<Ratio>, Relation, Ratio)> = Vec::new();
    let mut ones = vec![Ratio::zero(); vars];
    for x in ones.iter_mut().take(g) {
        *x = Ratio::one();
    }
    constraints.push((ones, Relation::Eq, Ratio::one()));
    for coord in 0..k {
        let mut row = vec![Ratio::zero(); vars];
        for (j, (e, _)) in generators.iter().enumerate() {
            row[j] = rat_int(e[coord] as i64);
        }
        constraints.push((row, Relation::Le, Ratio::one()));
    }
    let mut trow = vec![Ratio::zero(); vars];
    for (j, (_, te)) in generators.iter().enumerate() {
        trow[j] = te.clone();
    }
    trow[g] = Ratio::one();
    trow[g + 1] = -Ratio::one();
    constraints.push((trow, Relation::Le, Ratio::one()));
    let mut minimize = vec![Ratio::zero(); vars];
    minimize[g] = -Ratio::one();
    minimize[g + 1] = Ratio::one();
    let problem = LpProblem {
        num_vars: vars,
        minimize,
        constraints,
        free_vars: false,
    };
    let sol = lp::solve(&problem)?;
    if sol.status != LpStatus::Optimal {
        return Err(KstabError::Internal(
            "vertex-form relative threshold must be solvable".into(),
        ));
    }
    Ok(-sol.objective)
}

/// `inf_zeta max_i [value_i - <point_i, zeta>]` over all rational `zeta`:
/// the threshold functional of a sampled profile.
fn threshold_from_samples(samples: &[(QVec, Ratio)]) -> Result<Ratio> {
    let forms: Vec<(QVec, Ratio)> = samples
        .iter()
        .map(|(p, v)| (-p, v.clone()))
        .collect();
    let (value, _) = lp::min_of_max_affine(&forms)?;
    Ok(value)
}

/// The same threshold program over an integer-scaled grade grid: the
/// per-degree sample at `points[i]/grade` has value `values[i]/scale`. An
/// exact active-set loop keeps the simplex subproblems small and runs the
/// violation scans on cleared denominators.
fn threshold_from_scaled(
    points: &[Vec<Int>],
    values: &[Int],
    scale: &Int,
    grade: u32,
) -> Result<Ratio> {
    use num_integer::Integer;
    let n = points[0].len();
    let grade_int = Int::from(grade);
    let mut active: Vec<usize> = Vec::new();
    for k in 0..n {
        let hi = (0..points.len())
            .max_by(|&a, &b| points[a][k].cmp(&points[b][k]))
            .unwrap();
        let lo = (0..points.len())
            .min_by(|&a, &b| points[a][k].cmp(&points[b][k]))
            .unwrap();
        for idx in [hi, lo] {
            if !active.contains(&idx) {
                active.push(idx);
            }
        }
    }
    let top = (0..values.len())
        .max_by(|&a, &b| values[a].cmp(&values[b]))
        .unwrap();
    if !active.contains(&top) {
        active.push(top);
    }

    let form_of = |i: usize| -> (QVec, Ratio) {
        let g = QVec(
            points[i]
                .iter()
                .map(|c| Ratio::new(-c.clone(), grade_int.clone()))
                .collect(),
        );
        (g, Ratio::new(values[i].clone(), scale.clone()))
    };

    loop {
        let subset: Vec<(QVec, Ratio)> = active.iter().map(|&i| form_of(i)).collect();
        match lp::min_of_max_affine(&subset) {
            Ok((value, witness)) => {
                // Violation scan on integers: compare
                // values[j]/scale - <points[j], witness>/grade against value.
                let mut zden = Int::one();
                for c in &witness.0 {
                    zden = zden.lcm(c.denom());
                }
                let zint: Vec<Int> = witness
                    .0
                    .iter()
                    .map(|c| c.numer() * (&zden / c.denom()))
                    .collect();
                let c = scale.lcm(&(&grade_int * &zden)).lcm(value.denom());
                let f_val = &c / scale;
                let f_dot = &c / (&grade_int * &zden);
                let threshold = value.numer() * (&c / value.denom());
                let mut worst: Option<(usize, Int)> = None;
                for (j, (u, v)) in points.iter().zip(values).enumerate() {
                    let at = v * &f_val - crate::vector::dot_int_int(u, &zint) * &f_dot;
                    match &worst {
                        None => worst = Some((j, at)),
                        Some((_, w)) if at > *w => worst = Some((j, at)),
                        _ => {}
                    }
                }
                let (j, peak) = worst.expect("nonempty samples");
                if peak <= threshold {
                    return Ok(value);
                }
                debug_assert!(!active.contains(&j));
                active.push(j);
            }
            Err(KstabError::UnboundedObjective) => {
                // Descent certificate over the active forms, then the most
                // blocking sample along it.
                let constraints = active
                    .iter()
                    .map(|&i| {
                        let row: Vec<Ratio> = points[i]
                            .iter()
                            .map(|c| Ratio::new(-c.clone(), grade_int.clone()))
                            .collect();
                        (row, lp::Relation::Le, -Ratio::one())
                    })
                    .collect();
                let cert = lp::solve(&lp::LpProblem {
                    num_vars: n,
                    minimize: vec![Ratio::zero(); n],
                    constraints,
                    free_vars: true,
                })?;
                if cert.status != lp::LpStatus::Optimal {
                    return Err(KstabError::Internal(
                        "descent certificate must exist for an unbounded subset".into(),
                    ));
                }
                let mut dden = Int::one();
                for c in &cert.point {
                    dden = dden.lcm(c.denom());
                }
                let dint: Vec<Int> = cert
                    .point
                    .iter()
                    .map(|c| c.numer() * (&dden / c.denom()))
                    .collect();
                // Form gradient is -u/grade, so maximizing <g, d> means
                // minimizing <u, d>.
                let mut blocker: Option<(usize, Int)> = None;
                for (j, u) in points.iter().enumerate() {
                    let at = crate::vector::dot_int_int(u, &dint);
                    match &blocker {
                        None => blocker = Some((j, at)),
                        Some((_, b)) if at < *b => blocker = Some((j, at)),
                        _ => {}
                    }
                }
                let (j, along) = blocker.expect("nonempty samples");
                if along.is_positive() {
                    return Err(KstabError::UnboundedObjective);
                }
                debug_assert!(!active.contains(&j));
                active.push(j);
            }
            Err(other) => return Err(other),
        }
    }
}

/// Finite-level threshold part of a filtration: the ideal of each grade is
/// generated by the chart monomials of the sections, and the threshold
/// against the central divisor reduces to an exact program over the grade
/// grid. Twisting leaves every finite level unchanged.
pub fn lna_m(filt: &ToricFiltration, m: u32) -> Result<Ratio> {
    let level = filt.scaled_level(m)?;
    threshold_from_scaled(&level.points, &level.values, &level.scale, level.grade)
}

/// Exact limit of the threshold part: the grade grids refine to the whole
/// polytope and the program stabilizes on the subdivision vertices.
pub fn lna_exact(filt: &ToricFiltration) -> Result<Ratio> {
    let samples: Vec<(QVec, Ratio)> = filt
        .profile()
        .subdivision_vertices()
        .into_iter()
        .map(|v| {
            let val = filt.profile().eval(&v);
            (v, val)
        })
        .collect();
    threshold_from_samples(&samples)
}

/// Threshold part along the doubling schedule with the stopping rule.
pub fn lna(filt: &ToricFiltration, config: &LimitConfig) -> Result<LimitValue> {
    let mut history = Vec::new();
    for m in config.schedule() {
        history.push((m, lna_m(filt, m)?));
    }
    Ok(LimitValue::from_history(history, &config.tol))
}

/// Ding invariant of a filtration: `-ena + lna`, along the schedule.
pub fn dna(filt: &ToricFiltration, config: &LimitConfig) -> Result<LimitValue> {
    let ena = filt.ena()?;
    let lim = lna(filt, config)?;
    let history = lim
        .history
        .iter()
        .map(|(m, v)| (*m, v - &ena))
        .collect();
    Ok(LimitValue::from_history(history, &config.tol))
}

/// Exact-limit Ding invariant of a filtration.
pub fn dna_exact(filt: &ToricFiltration) -> Result<Ratio> {
    Ok(lna_exact(filt)? - filt.ena()?)
}

/// Ding invariant of the test configuration encoded by a convex function
/// `f` on the moment polytope. The associated filtration has per-degree
/// profile `e_plus - f`, so the mean flips sign and the threshold part is
/// sampled on the negated values; the additive shift cancels.
pub fn ding_of_configuration(f: &PlConvexFunction) -> Result<Ratio> {
    let samples: Vec<(QVec, Ratio)> = f
        .subdivision_vertices()
        .into_iter()
        .map(|v| {
            let val = -f.eval(&v);
            (v, val)
        })
        .collect();
    Ok(f.mean()? + threshold_from_samples(&samples)?)
}

/// Finite-level Ding invariant of a configuration, sampling the reflected
/// profile on the grade grid.
pub fn ding_of_configuration_m(
    model: &std::sync::Arc<ToricFanoModel>,
    f: &PlConvexFunction,
    m: u32,
) -> Result<Ratio> {
    let filt = ToricFiltration::from_profile(std::sync::Arc::clone(model), f.clone())?;
    let level = filt.scaled_level(m)?;
    let negated: Vec<Int> = level.values.iter().map(|v| -v).collect();
    Ok(f.mean()? + threshold_from_scaled(&level.points, &negated, &level.scale, level.grade)?)
}

/// The boundary-measure weight of a configuration.
#[derive(Clone, Debug)]
pub struct CmWeight {
    pub value: Ratio,
    /// Normalization constant pinned by the product rule.
    pub kappa: Ratio,
}

/// Integral of a PL function over the boundary of its domain with respect
/// to the lattice-normalized facet measure.
pub fn boundary_integral(f: &PlConvexFunction) -> Result<Ratio> {
    let domain = f.domain();
    let mut total = Ratio::zero();
    for (cell, piece_idx) in f.cells() {
        let piece = &f.pieces()[*piece_idx];
        for (i, cf) in cell.facets().iter().enumerate() {
            let on_boundary = domain
                .facets()
                .iter()
                .any(|df| df.normal == cf.normal && df.offset == cf.offset);
            if on_boundary {
                total += cell.facet_lattice_integral(i, &piece.gradient, &piece.constant)?;
            }
        }
    }
    Ok(total)
}

/// Weight of the configuration encoded by convex `f`:
/// `kappa * [ \int_dP f dsigma - (sigma(dP)/vol) * \int_P f ]`,
/// with `kappa` pinned so that the weight of the product configuration of a
/// lattice direction equals the obstruction functional there. Requires the
/// anticanonical presentation (all facet offsets one), for which the pin
/// forces `kappa = 1/vol` through the exact boundary moment identity.
pub fn cm(model: &ToricFanoModel, f: &PlConvexFunction) -> Result<CmWeight> {
    let p = model.polytope();
    for facet in p.facets() {
        if facet.offset != Ratio::one() {
            return Err(KstabError::InvalidInput(
                "configuration weight needs the anticanonical facet presentation".into(),
            ));
        }
    }
    let vol = model.volume().clone();
    let sigma = p.boundary_lattice_measure()?;
    let n = p.dim();
    // Pin: the bracket of each coordinate direction must equal
    // vol * barycenter, which makes kappa = 1/vol reproduce the
    // obstruction functional on a lattice basis.
    for k in 0..n {
        let mut grad = QVec::zeros(n);
        grad.0[k] = Ratio::one();
        let mut bdry = Ratio::zero();
        for i in 0..p.facets().len() {
            bdry += p.facet_lattice_integral(i, &grad, &Ratio::zero())?;
        }
        let linear_integral = model.barycenter().0[k].clone() * &vol;
        let bracket = bdry - (&sigma / &vol) * &linear_integral;
        if bracket != &vol * &model.barycenter().0[k] {
            return Err(KstabError::Internal(
                "boundary moment identity failed; normalization pin impossible".into(),
            ));
        }
    }
    let kappa = Ratio::one() / &vol;
    let bracket = boundary_integral(f)? - (&sigma / &vol) * f.integral()?;
    Ok(CmWeight {
        value: &kappa * bracket,
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_models::*;
    use crate::pl::AffinePiece;
    use crate::rational::{abs, rat};
    use std::sync::Arc;

    fn arc(m: ToricFanoModel) -> Arc<ToricFanoModel> {
        Arc::new(m)
    }

    fn affine_filt(model: &Arc<ToricFanoModel>, grad: &[i64], c: i64) -> ToricFiltration {
        ToricFiltration::from_pieces(
            Arc::clone(model),
            vec![AffinePiece {
                gradient: QVec::from_ints(grad),
                constant: rat_int(c),
            }],
        )
        .unwrap()
    }

    fn positive_part(model: &Arc<ToricFanoModel>) -> ToricFiltration {
        let dim = model.dim();
        let mut e1 = vec![0i64; dim];
        e1[0] = 1;
        ToricFiltration::from_pieces(
            Arc::clone(model),
            vec![
                AffinePiece {
                    gradient: QVec::zeros(dim),
                    constant: rat_int(0),
                },
                AffinePiece {
                    gradient: QVec::from_ints(&e1),
                    constant: rat_int(0),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn lct_classic_cusp() {
        // (x^2, y^3) has threshold 5/6.
        let lct = lct_monomial(&[vec![2, 0], vec![0, 3]]).unwrap();
        assert_eq!(lct, rat(5, 6));
        assert_eq!(lct_monomial_newton_oracle(&[vec![2, 0], vec![0, 3]]).unwrap(), rat(5, 6));
    }

    #[test]
    fn lct_two_path_agreement() {
        let ideals: Vec<Vec<Vec<u64>>> = vec![
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![3, 0], vec![1, 1], vec![0, 2]],
            vec![vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 5]],
            vec![vec![4]],
        ];
        for gens in ideals {
            let a = lct_monomial(&gens).unwrap();
            let b = lct_monomial_newton_oracle(&gens).unwrap();
            assert_eq!(a, b, "ideal {gens:?}");
        }
    }

    #[test]
    fn lct_rejects_trivial_inputs() {
        assert!(lct_monomial(&[]).is_err());
        assert!(lct_monomial(&[vec![0, 0]]).is_err());
    }

    #[test]
    fn lct_rel_t_examples() {
        // Unit ideal of the trivial filtration: the central fiber is log
        // canonical, threshold one.
        let unit = vec![(vec![0u64], Ratio::zero())];
        assert_eq!(lct_monomial_rel_t(&unit).unwrap(), rat_int(1));
        assert_eq!(lct_monomial_rel_t_newton_oracle(&unit).unwrap(), rat_int(1));
        // (x, t) measured against (t): both paths must agree (the value is
        // the oracle's, not a guessed constant).
        let xt = vec![(vec![1u64], Ratio::zero()), (vec![0u64], Ratio::one())];
        let lp_value = lct_monomial_rel_t(&xt).unwrap();
        let oracle = lct_monomial_rel_t_newton_oracle(&xt).unwrap();
        assert_eq!(lp_value, oracle);
        // (x^2 t^0, t^3): both paths.
        let mixed = vec![(vec![2u64], Ratio::zero()), (vec![0u64], rat_int(3))];
        assert_eq!(
            lct_monomial_rel_t(&mixed).unwrap(),
            lct_monomial_rel_t_newton_oracle(&mixed).unwrap()
        );
    }

    #[test]
    fn lna_trivial_and_product() {
        let m = arc(p2());
        let trivial = ToricFiltration::trivial(Arc::clone(&m)).unwrap();
        assert_eq!(lna_exact(&trivial).unwrap(), rat_int(0));
        assert_eq!(lna_m(&trivial, 1).unwrap(), rat_int(0));
        // Product profile u1 + 1: the threshold part equals the mean at
        // every level because the slope is a lattice direction.
        let f = affine_filt(&m, &[1, 0], 1);
        for level in [1u32, 5, 40] {
            assert_eq!(lna_m(&f, level).unwrap(), rat_int(1));
        }
        assert_eq!(lna_exact(&f).unwrap(), rat_int(1));
        assert_eq!(f.ena().unwrap(), rat_int(1));
    }

    #[test]
    fn lna_twist_invariance_every_level() {
        let b = arc(bl1p2());
        let f = positive_part(&b);
        let xi = QVec(vec![rat(1, 2), rat(-2, 3)]);
        for level in [1u32, 2, 4, 8] {
            assert_eq!(
                lna_m(&f, level).unwrap(),
                lna_m(&f.twist(&xi), level).unwrap(),
                "level {level}"
            );
        }
        assert_eq!(lna_exact(&f).unwrap(), lna_exact(&f.twist(&xi)).unwrap());
    }

    #[test]
    fn lna_monotone_along_nested_levels() {
        let m = arc(p2());
        let f = positive_part(&m);
        let mut prev: Option<Ratio> = None;
        for level in [1u32, 2, 4, 8, 16] {
            let v = lna_m(&f, level).unwrap();
            if let Some(p) = &prev {
                assert!(v >= *p);
            }
            prev = Some(v);
        }
        let exact = lna_exact(&f).unwrap();
        assert!(prev.unwrap() <= exact);
        assert_eq!(exact, rat(2, 3));
    }

    #[test]
    fn dna_values() {
        let m = arc(p2());
        let trivial = ToricFiltration::trivial(Arc::clone(&m)).unwrap();
        assert_eq!(dna_exact(&trivial).unwrap(), rat_int(0));
        // Product configurations on a zero-barycenter model.
        let f = affine_filt(&m, &[1, 0], 1);
        assert_eq!(dna_exact(&f).unwrap(), rat_int(0));
        let lim = dna(&f, &LimitConfig::default()).unwrap();
        assert!(lim.converged);
        assert!(abs(&lim.value) <= rat(1, 20));
        // Valuation filtrations: the Ding invariant equals beta exactly.
        let b = arc(bl1p2());
        let zeta = QVec::from_ints(&[1, 1]);
        let fv = ToricFiltration::from_valuation(Arc::clone(&b), &zeta).unwrap();
        let dv = dna_exact(&fv).unwrap();
        assert_eq!(dv, b.beta(&zeta));
        assert_eq!(dv, rat(-1, 6));
    }

    #[test]
    fn dna_beta_inequality_on_samples() {
        let b = arc(bl1p2());
        for zeta in [
            QVec::from_ints(&[1, 0]),
            QVec(vec![rat(1, 2), rat(1, 3)]),
            QVec::from_ints(&[-1, 2]),
        ] {
            let fv = ToricFiltration::from_valuation(Arc::clone(&b), &zeta).unwrap();
            assert!(dna_exact(&fv).unwrap() <= b.beta(&zeta));
        }
    }

    #[test]
    fn dna_twist_law_consistent_with_mean_law() {
        // The threshold part is twist-invariant and the mean moves by the
        // obstruction, so the Ding invariant moves opposite to the mean.
        let b = arc(bl1p2());
        let f = positive_part(&b);
        let xi = QVec::from_ints(&[1, 1]);
        let lhs = dna_exact(&f.twist(&xi)).unwrap();
        let rhs = dna_exact(&f).unwrap() + b.futaki(&xi);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cm_kills_constants_and_pins_products() {
        let m = arc(p2());
        let constant = PlConvexFunction::constant(m.polytope().clone(), rat(5, 7)).unwrap();
        assert_eq!(cm(&m, &constant).unwrap().value, rat_int(0));
        // Product of a direction on a zero-barycenter model vanishes.
        let product = PlConvexFunction::new(
            m.polytope().clone(),
            vec![AffinePiece {
                gradient: QVec::from_ints(&[1, 0]),
                constant: rat_int(2),
            }],
        )
        .unwrap();
        assert_eq!(cm(&m, &product).unwrap().value, rat_int(0));
        // On a nonzero-barycenter model the pin reproduces the obstruction
        // functional on a lattice basis.
        let b = arc(bl1p2());
        for (k, grad) in [[1i64, 0], [0, 1]].iter().enumerate() {
            let f = PlConvexFunction::new(
                b.polytope().clone(),
                vec![AffinePiece {
                    gradient: QVec::from_ints(grad),
                    constant: rat_int(0),
                }],
            )
            .unwrap();
            let w = cm(&b, &f).unwrap();
            assert_eq!(w.value, b.barycenter().0[k]);
            assert_eq!(w.value, b.futaki(&QVec::from_ints(grad)));
        }
    }

    #[test]
    fn cm_dominates_ding_on_configurations() {
        let models = [arc(p2()), arc(p1xp1()), arc(bl1p2())];
        for m in &models {
            let dim = m.dim();
            let configs: Vec<PlConvexFunction> = vec![
                positive_part(m).profile().clone(),
                PlConvexFunction::new(
                    m.polytope().clone(),
                    vec![
                        AffinePiece {
                            gradient: QVec::from_ints(&vec![1; dim]),
                            constant: rat_int(0),
                        },
                        AffinePiece {
                            gradient: QVec::from_ints(&vec![-1; dim]),
                            constant: rat(1, 2),
                        },
                    ],
                )
                .unwrap(),
            ];
            for f in &configs {
                let weight = cm(m, f).unwrap().value;
                let ding = ding_of_configuration(f).unwrap();
                assert!(
                    weight >= ding,
                    "model {:?}: weight {} < ding {}",
                    m.name(),
                    weight,
                    ding
                );
            }
        }
    }

    #[test]
    fn cm_equals_ding_on_products() {
        let b = arc(bl1p2());
        for grad in [[1i64, 1], [-1, 0], [2, -1]] {
            let f = PlConvexFunction::new(
                b.polytope().clone(),
                vec![AffinePiece {
                    gradient: QVec::from_ints(&grad),
                    constant: rat(1, 3),
                }],
            )
            .unwrap();
            let weight = cm(&b, &f).unwrap().value;
            let ding = ding_of_configuration(&f).unwrap();
            assert_eq!(weight, ding);
            assert_eq!(weight, b.futaki(&QVec::from_ints(&grad)));
        }
    }

    #[test]
    fn ding_of_configuration_finite_levels_converge() {
        let m = arc(p2());
        let f = positive_part(&m).profile().clone();
        let exact = ding_of_configuration(&f).unwrap();
        let mut prev: Option<Ratio> = None;
        for level in [2u32, 4, 8, 16] {
            let v = ding_of_configuration_m(&m, &f, level).unwrap();
            let gap = abs(&(&v - &exact));
            if let Some(p) = prev {
                assert!(gap <= p, "level {level}");
            }
            prev = Some(gap);
        }
    }
}
