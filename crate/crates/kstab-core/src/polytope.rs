//! Exact rational polytopes: dual representations, volumes, barycenters,
//! lattice-point enumeration and facet-measure integrals.

use crate::error::{KstabError, Result};
use crate::linalg;
use crate::rational::{ceil_int, floor_int, Int, Ratio};
use crate::vector::{dot_int_int, int_vec_to_qvec, QVec};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// Supported ambient dimension bound; enforced at construction.
pub const MAX_DIM: usize = 4;

/// Default guard on lattice-point enumeration.
pub const DEFAULT_LATTICE_CAP: usize = 4_000_000;

/// A closed halfspace `<u, normal> >= -offset` with a primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<Int>,
    pub offset: Ratio,
}

impl Facet {
    /// Exact evaluation of `<point, normal> + offset` (nonnegative inside).
    pub fn slack(&self, point: &QVec) -> Ratio {
        point.dot_int(&self.normal) + &self.offset
    }
}

/// A full-dimensional bounded rational polytope carrying both representations.
#[derive(Clone, Debug)]
pub struct RationalPolytope {
    dim: usize,
    vertices: Vec<QVec>,
    facets: Vec<Facet>,
}

/// A supporting hyperplane: primitive inward normal, offset, and the indices
/// of the points lying on it.
type HullFacet = (Vec<Int>, Ratio, Vec<usize>);

/// Facets of the convex hull of a full-dimensional point set, together with
/// the indices of the points lying on each facet.
fn hull_facets(points: &[QVec], dim: usize) -> Result<Vec<HullFacet>> {
    let k = points.len();
    let mut facets: Vec<HullFacet> = Vec::new();
    let mut seen: BTreeSet<(Vec<Int>, Ratio)> = BTreeSet::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        // Hyperplane through the subset, when affinely independent.
        let base = &points[subset[0]];
        let edges: Vec<Vec<Ratio>> = subset[1..]
            .iter()
            .map(|&i| (&points[i] - base).0)
            .collect();
        let normal_q = if dim == 1 {
            vec![Ratio::one()]
        } else {
            linalg::generalized_cross(&edges)
        };
        if !normal_q.iter().all(|c| c.is_zero()) {
            let normal = linalg::primitive_integer(&normal_q);
            let level = base.dot_int(&normal);
            let mut above = false;
            let mut below = false;
            for p in points {
                let v = p.dot_int(&normal);
                if v > level {
                    above = true;
                } else if v < level {
                    below = true;
                }
                if above && below {
                    break;
                }
            }
            if above != below {
                // Orient inward: all points satisfy <p, w> >= level.
                let (normal, level) = if above {
                    (normal, level)
                } else {
                    (normal.iter().map(|c| -c).collect::<Vec<Int>>(), -level)
                };
                let offset = -level;
                let key = (normal.clone(), offset.clone());
                if seen.insert(key) {
                    let on: Vec<usize> = (0..k)
                        .filter(|&i| (points[i].dot_int(&normal) + &offset).is_zero())
                        .collect();
                    facets.push((normal, offset, on));
                }
            }
        }
        // Next dim-subset in lexicographic order.
        let mut idx = dim;
        loop {
            if idx == 0 {
                return Ok(facets);
            }
            idx -= 1;
            if subset[idx] < k - (dim - idx) {
                subset[idx] += 1;
                for j in idx + 1..dim {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Triangulates a full-dimensional point configuration in Q^d, returning
/// index simplices. Fans out from the lexicographically smallest vertex.
fn triangulate_indices(points: &[QVec], dim: usize) -> Result<Vec<Vec<usize>>> {
    if points.len() == dim + 1 {
        return Ok(vec![(0..points.len()).collect()]);
    }
    let anchor = (0..points.len())
        .min_by(|&a, &b| points[a].cmp(&points[b]))
        .expect("nonempty");
    let facets = hull_facets(points, dim)?;
    let mut simplices = Vec::new();
    for (_, _, on) in facets {
        if on.contains(&anchor) {
            continue;
        }
        let sub_points: Vec<QVec> = on.iter().map(|&i| points[i].clone()).collect();
        for simplex in triangulate_in_affine_span(&sub_points, dim - 1)? {
            let mut cone: Vec<usize> = simplex.into_iter().map(|j| on[j]).collect();
            cone.push(anchor);
            simplices.push(cone);
        }
    }
    Ok(simplices)
}

/// Triangulates points lying in a `d`-dimensional affine subspace of Q^D by
/// passing to exact coordinates on the span.
fn triangulate_in_affine_span(points: &[QVec], d: usize) -> Result<Vec<Vec<usize>>> {
    if d == 0 || points.len() == 1 {
        return Ok(vec![vec![0]]);
    }
    if d == 1 {
        // Segment: the two extreme points.
        let lo = (0..points.len())
            .min_by(|&a, &b| points[a].cmp(&points[b]))
            .unwrap();
        let hi = (0..points.len())
            .max_by(|&a, &b| points[a].cmp(&points[b]))
            .unwrap();
        return Ok(vec![vec![lo, hi]]);
    }
    let coords = affine_coordinates(points, d)?;
    triangulate_indices(&coords, d)
}

/// Exact coordinates of affinely d-dimensional points on a basis of their span.
fn affine_coordinates(points: &[QVec], d: usize) -> Result<Vec<QVec>> {
    let base = &points[0];
    let edges: Vec<Vec<Ratio>> = points[1..].iter().map(|p| (p - base).0).collect();
    // Greedy basis among the edges.
    let mut basis: Vec<Vec<Ratio>> = Vec::new();
    for e in &edges {
        if basis.len() == d {
            break;
        }
        let mut trial = basis.clone();
        trial.push(e.clone());
        if linalg::rank(&trial) == trial.len() {
            basis = trial;
        }
    }
    if basis.len() != d {
        return Err(KstabError::Degenerate(format!(
            "expected affine dimension {d}, found {}",
            basis.len()
        )));
    }
    // Solve (B B^T) c = B (p - base); the Gram matrix is invertible.
    let dim = base.dim();
    let mut gram = vec![vec![Ratio::zero(); d]; d];
    for i in 0..d {
        for j in 0..d {
            gram[i][j] = (0..dim).map(|k| &basis[i][k] * &basis[j][k]).sum();
        }
    }
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let delta = (p - base).0;
        let rhs: Vec<Ratio> = (0..d)
            .map(|i| (0..dim).map(|k| &basis[i][k] * &delta[k]).sum())
            .collect();
        let c = linalg::solve(&gram, &rhs)
            .ok_or_else(|| KstabError::Internal("gram matrix singular".into()))?;
        out.push(QVec(c));
    }
    Ok(out)
}

impl RationalPolytope {
    /// Builds a polytope from its vertex list and validates both
    /// representations against each other.
    pub fn from_vertices(dim: usize, points: Vec<QVec>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(KstabError::DimensionCap(dim));
        }
        if points.len() > 48 {
            return Err(KstabError::InvalidInput(format!(
                "vertex list of size {} exceeds the supported bound of 48",
                points.len()
            )));
        }
        if points.len() < dim + 1 {
            return Err(KstabError::Degenerate(
                "fewer vertices than dimension + 1".into(),
            ));
        }
        for p in &points {
            if p.dim() != dim {
                return Err(KstabError::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        let mut vertices = points;
        vertices.sort();
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(KstabError::InvalidInput("duplicate vertex".into()));
            }
        }
        let edges: Vec<Vec<Ratio>> = vertices[1..]
            .iter()
            .map(|p| (p - &vertices[0]).0)
            .collect();
        if linalg::rank(&edges) != dim {
            return Err(KstabError::Degenerate(
                "vertex set is not full-dimensional".into(),
            ));
        }
        let raw = hull_facets(&vertices, dim)?;
        let mut facets: Vec<Facet> = raw
            .iter()
            .map(|(normal, offset, _)| Facet {
                normal: normal.clone(),
                offset: offset.clone(),
            })
            .collect();
        facets.sort_by(|a, b| (&a.normal, &a.offset).cmp(&(&b.normal, &b.offset)));

        // Every input point must be a hull vertex: the facets through it
        // must have normals of full rank.
        for (i, p) in vertices.iter().enumerate() {
            let active: Vec<Vec<Ratio>> = facets
                .iter()
                .filter(|f| f.slack(p).is_zero())
                .map(|f| int_vec_to_qvec(&f.normal).0)
                .collect();
            if linalg::rank(&active) != dim {
                return Err(KstabError::InvalidInput(format!(
                    "point #{i} {p} is not a vertex of the hull"
                )));
            }
        }

        let poly = RationalPolytope {
            dim,
            vertices,
            facets,
        };
        // Round-trip: the H-representation must regenerate the vertex set.
        let regenerated = poly.enumerate_vertices_from_facets()?;
        if regenerated != poly.vertices {
            return Err(KstabError::Internal(
                "V-representation and H-representation disagree".into(),
            ));
        }
        Ok(poly)
    }

    /// Builds the polytope cut out by rational halfspaces `<u, a> >= b`.
    /// Returns `None` when the region is empty or not full-dimensional.
    pub fn from_halfspaces(
        dim: usize,
        halfspaces: &[(QVec, Ratio)],
    ) -> Result<Option<RationalPolytope>> {
        if dim == 0 || dim > MAX_DIM {
            return Err(KstabError::DimensionCap(dim));
        }
        let mut normalized: Vec<Facet> = Vec::new();
        for (a, b) in halfspaces {
            let normal = linalg::primitive_integer(&a.0);
            if normal.iter().all(|c| c.is_zero()) {
                if b.is_positive() {
                    return Ok(None);
                }
                continue;
            }
            // <u, a> >= b scaled by the positive factor s with a = s * normal.
            let k = a
                .0
                .iter()
                .zip(&normal)
                .find(|(c, n)| !c.is_zero() && !n.is_zero())
                .map(|(c, n)| c / Ratio::from_integer((*n).clone()))
                .expect("nonzero normal");
            debug_assert!(k.is_positive());
            normalized.push(Facet {
                normal,
                offset: -(b / &k),
            });
        }
        normalized.sort_by(|a, b| (&a.normal, &a.offset).cmp(&(&b.normal, &b.offset)));
        normalized.dedup();

        // Candidate vertices from all dim-subsets of bounding hyperplanes.
        let m = normalized.len();
        if m < dim {
            return Ok(None);
        }
        let mut candidates: BTreeSet<QVec> = BTreeSet::new();
        let mut subset: Vec<usize> = (0..dim).collect();
        loop {
            let a: Vec<Vec<Ratio>> = subset
                .iter()
                .map(|&i| int_vec_to_qvec(&normalized[i].normal).0)
                .collect();
            let b: Vec<Ratio> = subset
                .iter()
                .map(|&i| -normalized[i].offset.clone())
                .collect();
            if let Some(x) = linalg::solve(&a, &b) {
                let q = QVec(x);
                if normalized.iter().all(|f| !f.slack(&q).is_negative()) {
                    candidates.insert(q);
                }
            }
            let mut idx = dim;
            let done = loop {
                if idx == 0 {
                    break true;
                }
                idx -= 1;
                if subset[idx] < m - (dim - idx) {
                    subset[idx] += 1;
                    for j in idx + 1..dim {
                        subset[j] = subset[j - 1] + 1;
                    }
                    break false;
                }
            };
            if done {
                break;
            }
        }
        let points: Vec<QVec> = candidates.into_iter().collect();
        if points.len() < dim + 1 {
            return Ok(None);
        }
        let edges: Vec<Vec<Ratio>> = points[1..].iter().map(|p| (p - &points[0]).0).collect();
        if linalg::rank(&edges) != dim {
            return Ok(None);
        }
        Self::from_vertices(dim, points).map(Some)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn contains(&self, point: &QVec) -> bool {
        self.facets.iter().all(|f| !f.slack(point).is_negative())
    }

    pub fn strictly_contains(&self, point: &QVec) -> bool {
        self.facets.iter().all(|f| f.slack(point).is_positive())
    }

    fn enumerate_vertices_from_facets(&self) -> Result<Vec<QVec>> {
        let m = self.facets.len();
        let dim = self.dim;
        let mut out: BTreeSet<QVec> = BTreeSet::new();
        let mut subset: Vec<usize> = (0..dim).collect();
        loop {
            let a: Vec<Vec<Ratio>> = subset
                .iter()
                .map(|&i| int_vec_to_qvec(&self.facets[i].normal).0)
                .collect();
            let b: Vec<Ratio> = subset
                .iter()
                .map(|&i| -self.facets[i].offset.clone())
                .collect();
            if let Some(x) = linalg::solve(&a, &b) {
                let q = QVec(x);
                if self.contains(&q) {
                    out.insert(q);
                }
            }
            let mut idx = dim;
            let done = loop {
                if idx == 0 {
                    break true;
                }
                idx -= 1;
                if subset[idx] < m - (dim - idx) {
                    subset[idx] += 1;
                    for j in idx + 1..dim {
                        subset[j] = subset[j - 1] + 1;
                    }
                    break false;
                }
            };
            if done {
                break;
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Deterministic triangulation into simplices (vertex index lists),
    /// fanning out from the lexicographically smallest vertex.
    pub fn triangulation(&self) -> Result<Vec<Vec<usize>>> {
        triangulate_indices(&self.vertices, self.dim)
    }

    fn simplex_volume(&self, simplex: &[usize]) -> Ratio {
        let base = &self.vertices[simplex[0]];
        let edges: Vec<Vec<Ratio>> = simplex[1..]
            .iter()
            .map(|&i| (&self.vertices[i] - base).0)
            .collect();
        let mut d = linalg::det(&edges);
        if d.is_negative() {
            d = -d;
        }
        let mut factorial = Int::one();
        for k in 2..=self.dim {
            factorial *= Int::from(k);
        }
        d / Ratio::from_integer(factorial)
    }

    /// Exact Euclidean volume.
    pub fn volume(&self) -> Result<Ratio> {
        let mut total = Ratio::zero();
        for s in self.triangulation()? {
            total += self.simplex_volume(&s);
        }
        if total.is_zero() {
            return Err(KstabError::Degenerate("zero volume".into()));
        }
        Ok(total)
    }

    /// Exact centroid of the uniform measure, via volume-weighted simplex
    /// centroids.
    pub fn barycenter(&self) -> Result<QVec> {
        let mut total = Ratio::zero();
        let mut acc = QVec::zeros(self.dim);
        for s in self.triangulation()? {
            let vol = self.simplex_volume(&s);
            if vol.is_zero() {
                continue;
            }
            let mut centroid = QVec::zeros(self.dim);
            for &i in &s {
                centroid = &centroid + &self.vertices[i];
            }
            let centroid = centroid.scale(&Ratio::new(Int::one(), Int::from(s.len())));
            acc = &acc + &centroid.scale(&vol);
            total += vol;
        }
        if total.is_zero() {
            return Err(KstabError::Degenerate("zero volume".into()));
        }
        Ok(acc.scale(&(Ratio::one() / total)))
    }

    /// Integer points of the dilate `m * P`, in lexicographic order.
    pub fn lattice_points(&self, m: u32, cap: usize) -> Result<Vec<Vec<Int>>> {
        let m_int = Int::from(m);
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            let min_k = self
                .vertices
                .iter()
                .map(|v| &v.0[k])
                .min()
                .expect("nonempty");
            let max_k = self
                .vertices
                .iter()
                .map(|v| &v.0[k])
                .max()
                .expect("nonempty");
            lo.push(ceil_int(&(min_k * Ratio::from_integer(m_int.clone()))));
            hi.push(floor_int(&(max_k * Ratio::from_integer(m_int.clone()))));
        }
        // Facet test scaled to integers: denom * <u, w> >= -m * numer.
        let scaled: Vec<(Vec<Int>, Int, Int)> = self
            .facets
            .iter()
            .map(|f| {
                (
                    f.normal.clone(),
                    f.offset.denom().clone(),
                    f.offset.numer().clone(),
                )
            })
            .collect();
        let mut out = Vec::new();
        if (0..self.dim).any(|k| lo[k] > hi[k]) {
            return Ok(out);
        }
        let mut u = lo.clone();
        loop {
            let inside = scaled.iter().all(|(w, denom, numer)| {
                let lhs = dot_int_int(&u, w) * denom;
                lhs >= -(numer * &m_int)
            });
            if inside {
                if out.len() == cap {
                    return Err(KstabError::LatticeCapExceeded { cap });
                }
                out.push(u.clone());
            }
            // Odometer increment, least significant coordinate last so the
            // output comes out lexicographically sorted.
            let mut k = self.dim;
            let done = loop {
                if k == 0 {
                    break true;
                }
                k -= 1;
                if u[k] < hi[k] {
                    u[k] += 1;
                    u[(k + 1)..self.dim].clone_from_slice(&lo[(k + 1)..self.dim]);
                    break false;
                }
            };
            if done {
                break;
            }
        }
        Ok(out)
    }

    /// Exact minimum of `<., xi>` over the polytope with the achieving
    /// vertex indices.
    pub fn support_min(&self, xi: &QVec) -> (Ratio, Vec<usize>) {
        let mut best: Option<Ratio> = None;
        for v in &self.vertices {
            let val = v.dot(xi);
            match &best {
                None => best = Some(val),
                Some(b) if val < *b => best = Some(val),
                _ => {}
            }
        }
        let best = best.expect("nonempty vertex set");
        let achieving = (0..self.vertices.len())
            .filter(|&i| self.vertices[i].dot(xi) == best)
            .collect();
        (best, achieving)
    }

    pub fn support_max(&self, xi: &QVec) -> Ratio {
        self.vertices
            .iter()
            .map(|v| v.dot(xi))
            .max()
            .expect("nonempty vertex set")
    }

    /// Vertex indices on facet `i`.
    pub fn facet_vertex_indices(&self, i: usize) -> Vec<usize> {
        let f = &self.facets[i];
        (0..self.vertices.len())
            .filter(|&j| f.slack(&self.vertices[j]).is_zero())
            .collect()
    }

    /// Integral of an affine function over facet `i` with respect to the
    /// lattice-normalized boundary measure (on a facet with primitive normal
    /// `w`, the induced hyperplane lattice has covolume one).
    pub fn facet_lattice_integral(
        &self,
        i: usize,
        gradient: &QVec,
        constant: &Ratio,
    ) -> Result<Ratio> {
        let idx = self.facet_vertex_indices(i);
        let pts: Vec<QVec> = idx.iter().map(|&j| self.vertices[j].clone()).collect();
        let f = &self.facets[i];
        if self.dim == 1 {
            // Zero-dimensional facet: counting measure.
            return Ok(gradient.dot(&pts[0]) + constant);
        }
        let norm_sq: Int = f.normal.iter().map(|c| c * c).sum();
        let mut factorial = Int::one();
        for k in 2..self.dim {
            factorial *= Int::from(k);
        }
        let mut total = Ratio::zero();
        for simplex in triangulate_in_affine_span(&pts, self.dim - 1)? {
            let base = &pts[simplex[0]];
            let mut rows: Vec<Vec<Ratio>> = simplex[1..]
                .iter()
                .map(|&j| (&pts[j] - base).0)
                .collect();
            rows.push(int_vec_to_qvec(&f.normal).0);
            let mut d = linalg::det(&rows);
            if d.is_negative() {
                d = -d;
            }
            let sigma = d / Ratio::from_integer(&factorial * &norm_sq);
            if sigma.is_zero() {
                continue;
            }
            let mut centroid = QVec::zeros(self.dim);
            for &j in &simplex {
                centroid = &centroid + &pts[j];
            }
            let centroid = centroid.scale(&Ratio::new(Int::one(), Int::from(simplex.len())));
            total += sigma * (gradient.dot(&centroid) + constant);
        }
        Ok(total)
    }

    /// Lattice-normalized surface area of the whole boundary.
    pub fn boundary_lattice_measure(&self) -> Result<Ratio> {
        let mut total = Ratio::zero();
        for i in 0..self.facets.len() {
            total += self.facet_lattice_integral(i, &QVec::zeros(self.dim), &Ratio::one())?;
        }
        Ok(total)
    }

    /// Image under an integer matrix (rows act on coordinates); used to test
    /// lattice-automorphism invariance.
    pub fn apply_integer_matrix(&self, mat: &[Vec<i64>]) -> Result<RationalPolytope> {
        let mapped: Vec<QVec> = self
            .vertices
            .iter()
            .map(|v| {
                QVec(
                    mat.iter()
                        .map(|row| {
                            row.iter()
                                .zip(&v.0)
                                .map(|(&a, x)| Ratio::from_integer(Int::from(a)) * x)
                                .sum()
                        })
                        .collect(),
                )
            })
            .collect();
        Self::from_vertices(self.dim, mapped)
    }
}


#[cfg(test)]
mod tests {
    use super::test_polytopes::*;
    use super::*;
    use crate::rational::{rat, rat_int};

    /// Independent 2D area oracle: shoelace over an exact angular ordering.
    fn shoelace(p: &RationalPolytope) -> Ratio {
        let c = p.barycenter().unwrap();
        let mut idx: Vec<usize> = (0..p.vertices().len()).collect();
        let half = |v: &QVec| -> u8 {
            let d = v - &c;
            if d.0[1].is_positive() || (d.0[1].is_zero() && d.0[0].is_positive()) {
                0
            } else {
                1
            }
        };
        idx.sort_by(|&a, &b| {
            let va = &p.vertices()[a] - &c;
            let vb = &p.vertices()[b] - &c;
            let (ha, hb) = (half(&p.vertices()[a]), half(&p.vertices()[b]));
            if ha != hb {
                return ha.cmp(&hb);
            }
            let cross = &va.0[0] * &vb.0[1] - &va.0[1] * &vb.0[0];
            Ratio::zero().cmp(&cross)
        });
        let mut area2 = Ratio::zero();
        let k = idx.len();
        for i in 0..k {
            let a = &p.vertices()[idx[i]];
            let b = &p.vertices()[idx[(i + 1) % k]];
            area2 += &a.0[0] * &b.0[1] - &a.0[1] * &b.0[0];
        }
        let mut area = area2 / rat_int(2);
        if area.is_negative() {
            area = -area;
        }
        area
    }

    #[test]
    fn volume_square_is_edge_product() {
        assert_eq!(square().volume().unwrap(), rat_int(4));
    }

    #[test]
    fn volume_matches_shoelace_oracle() {
        let t = p2_triangle();
        assert_eq!(shoelace(&t), rat(9, 2));
        assert_eq!(t.volume().unwrap(), rat(9, 2));
        let q = bl1_quadrilateral();
        assert_eq!(shoelace(&q), rat_int(4));
        assert_eq!(q.volume().unwrap(), rat_int(4));
    }

    #[test]
    fn barycenters() {
        assert_eq!(square().barycenter().unwrap(), QVec::from_ints(&[0, 0]));
        assert_eq!(p2_triangle().barycenter().unwrap(), QVec::from_ints(&[0, 0]));
        assert_eq!(
            bl1_quadrilateral().barycenter().unwrap(),
            QVec(vec![rat(1, 12), rat(1, 12)])
        );
    }

    #[test]
    fn barycenter_is_interior() {
        for p in [square(), p2_triangle(), bl1_quadrilateral()] {
            assert!(p.strictly_contains(&p.barycenter().unwrap()));
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        let pts: Vec<QVec> = (0..6)
            .map(|i| {
                let mut c = vec![0i64; 5];
                if i > 0 {
                    c[i - 1] = 1;
                }
                QVec::from_ints(&c)
            })
            .collect();
        assert!(matches!(
            RationalPolytope::from_vertices(5, pts),
            Err(KstabError::DimensionCap(5))
        ));
    }

    #[test]
    fn degenerate_vertex_set_rejected() {
        let r = RationalPolytope::from_vertices(
            2,
            vec![
                QVec::from_ints(&[0, 0]),
                QVec::from_ints(&[1, 1]),
                QVec::from_ints(&[2, 2]),
            ],
        );
        assert!(matches!(r, Err(KstabError::Degenerate(_))));
    }

    #[test]
    fn non_vertex_point_rejected() {
        let r = RationalPolytope::from_vertices(
            2,
            vec![
                QVec::from_ints(&[-1, -1]),
                QVec::from_ints(&[2, -1]),
                QVec::from_ints(&[-1, 2]),
                QVec::from_ints(&[0, 0]),
            ],
        );
        assert!(r.is_err());
    }

    #[test]
    fn lattice_points_counts() {
        let pts = segment().lattice_points(1, DEFAULT_LATTICE_CAP).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(square().lattice_points(2, DEFAULT_LATTICE_CAP).unwrap().len(), 25);
        assert_eq!(
            p2_triangle().lattice_points(1, DEFAULT_LATTICE_CAP).unwrap().len(),
            10
        );
    }

    #[test]
    fn lattice_points_match_bounding_box_oracle() {
        // Brute-force oracle over the box, independent of the facet test.
        let p = bl1_quadrilateral();
        for m in 1..=10u32 {
            let fast = p.lattice_points(m, DEFAULT_LATTICE_CAP).unwrap();
            let mut slow = Vec::new();
            let mi = m as i64;
            for x in -mi..=2 * mi {
                for y in -mi..=2 * mi {
                    // Inequalities of m*P, cleared to integers.
                    if x >= -mi && y >= -mi && x + y <= mi && x + y >= -mi {
                        slow.push(vec![Int::from(x), Int::from(y)]);
                    }
                }
            }
            assert_eq!(fast.len(), slow.len(), "m={m}");
        }
        // Monotone counts in m.
        let counts: Vec<usize> = (1..=6u32)
            .map(|m| p.lattice_points(m, DEFAULT_LATTICE_CAP).unwrap().len())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn lattice_cap_enforced() {
        assert!(matches!(
            square().lattice_points(10, 5),
            Err(KstabError::LatticeCapExceeded { .. })
        ));
    }

    #[test]
    fn support_min_examples() {
        let sq = square();
        let (min, _) = sq.support_min(&QVec::from_ints(&[1, 0]));
        assert_eq!(min, rat_int(-1));
        let (min, at) = p2_triangle().support_min(&QVec::from_ints(&[1, 1]));
        assert_eq!(min, rat_int(-2));
        assert_eq!(at.len(), 1);
        let (zero, at) = sq.support_min(&QVec::from_ints(&[0, 0]));
        assert_eq!(zero, rat_int(0));
        assert_eq!(at.len(), 4);
    }

    #[test]
    fn cube_volume_and_facets() {
        let mut pts = Vec::new();
        for x in [-1i64, 1] {
            for y in [-1i64, 1] {
                for z in [-1i64, 1] {
                    pts.push(QVec::from_ints(&[x, y, z]));
                }
            }
        }
        let cube = RationalPolytope::from_vertices(3, pts).unwrap();
        assert_eq!(cube.volume().unwrap(), rat_int(8));
        assert_eq!(cube.facets().len(), 6);
        assert_eq!(cube.barycenter().unwrap(), QVec::from_ints(&[0, 0, 0]));
        assert_eq!(cube.boundary_lattice_measure().unwrap(), rat_int(24));
    }

    #[test]
    fn boundary_measure_reflexive_identity() {
        // A presentation with all offsets equal to one has boundary measure
        // dim * volume.
        for p in [square(), p2_triangle(), bl1_quadrilateral()] {
            assert_eq!(
                p.boundary_lattice_measure().unwrap(),
                rat_int(2) * p.volume().unwrap()
            );
        }
    }

    #[test]
    fn boundary_first_moment_identity() {
        // Offsets-one presentation: integral of the coordinate functions over
        // the boundary equals (dim + 1) * volume * barycenter.
        for p in [square(), p2_triangle(), bl1_quadrilateral()] {
            let n = p.dim();
            let vol = p.volume().unwrap();
            let bc = p.barycenter().unwrap();
            for k in 0..n {
                let mut grad = QVec::zeros(n);
                grad.0[k] = Ratio::one();
                let mut total = Ratio::zero();
                for i in 0..p.facets().len() {
                    total += p.facet_lattice_integral(i, &grad, &Ratio::zero()).unwrap();
                }
                assert_eq!(total, rat_int((n + 1) as i64) * &vol * &bc.0[k]);
            }
        }
    }

    #[test]
    fn halfspace_construction() {
        let hs = vec![
            (QVec::from_ints(&[1, 0]), rat_int(-1)),
            (QVec::from_ints(&[-1, 0]), rat_int(-1)),
            (QVec::from_ints(&[0, 1]), rat_int(-1)),
            (QVec::from_ints(&[0, -1]), rat_int(-1)),
        ];
        let p = RationalPolytope::from_halfspaces(2, &hs).unwrap().unwrap();
        assert_eq!(p.volume().unwrap(), rat_int(4));
        let mut hs2 = hs.clone();
        hs2.push((QVec::from_ints(&[1, 0]), rat_int(2)));
        assert!(RationalPolytope::from_halfspaces(2, &hs2).unwrap().is_none());
    }

    #[test]
    fn unimodular_invariance_example() {
        let p = bl1_quadrilateral();
        let m = vec![vec![1, 1], vec![0, 1]];
        let q = p.apply_integer_matrix(&m).unwrap();
        assert_eq!(p.volume().unwrap(), q.volume().unwrap());
        let bc = p.barycenter().unwrap();
        let expect = QVec(vec![&bc.0[0] + &bc.0[1], bc.0[1].clone()]);
        assert_eq!(q.barycenter().unwrap(), expect);
    }
}
