//! Toric Fano models: a rational polytope with the origin in its interior,
//! presented with primitive facet normals, plus the valuation-level
//! invariants defined on it.

use crate::error::{KstabError, Result};
use crate::polytope::{RationalPolytope, DEFAULT_LATTICE_CAP};
use crate::rational::{Int, Ratio};
use crate::vector::{int_vec_to_qvec, QVec};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

type GridCache = Arc<Mutex<BTreeMap<u32, Arc<Vec<Vec<Int>>>>>>;

/// A cocharacter direction with rational coordinates, validated against a
/// model's dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistVector(pub QVec);

impl TwistVector {
    pub fn coords(&self) -> &QVec {
        &self.0
    }
}

/// A polytope model of a toric Fano variety: the origin is interior, facet
/// normals are primitive, and the anticanonical presentation has all facet
/// offsets equal to one (rational vertices are allowed; `ell0` clears them).
#[derive(Clone, Debug)]
pub struct ToricFanoModel {
    name: Option<String>,
    polytope: RationalPolytope,
    ell0: u32,
    volume: Ratio,
    barycenter: QVec,
    lattice_cap: usize,
    // Grade grids are pure; the cache is shared across clones.
    grid_cache: GridCache,
}

impl ToricFanoModel {
    pub fn new(polytope: RationalPolytope, name: Option<String>) -> Result<Self> {
        let origin = QVec::zeros(polytope.dim());
        if !polytope.strictly_contains(&origin) {
            return Err(KstabError::InvalidInput(
                "origin must be strictly interior to the polytope".into(),
            ));
        }
        // Smallest positive integer clearing all vertex denominators.
        let mut ell0 = Int::one();
        for v in polytope.vertices() {
            for c in &v.0 {
                ell0 = ell0.lcm(c.denom());
            }
        }
        let ell0 = u32::try_from(&ell0)
            .map_err(|_| KstabError::InvalidInput("vertex denominators too large".into()))?;
        let volume = polytope.volume()?;
        let barycenter = polytope.barycenter()?;
        Ok(ToricFanoModel {
            name,
            polytope,
            ell0,
            volume,
            barycenter,
            lattice_cap: DEFAULT_LATTICE_CAP,
            grid_cache: Arc::new(Mutex::new(BTreeMap::new())),
        })
    }

    /// Parses `{"dim": n, "vertices": [[..], ..], "name"?: str}` with
    /// rationals given as integers or `"p/q"` strings.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| KstabError::InvalidInput("expected a JSON object".into()))?;
        let dim = obj
            .get("dim")
            .and_then(|d| d.as_u64())
            .ok_or_else(|| KstabError::InvalidInput("missing integer \"dim\"".into()))?
            as usize;
        let verts = obj
            .get("vertices")
            .and_then(|v| v.as_array())
            .ok_or_else(|| KstabError::InvalidInput("missing \"vertices\" array".into()))?;
        let points = verts
            .iter()
            .map(|v| QVec::parse_json(v, Some(dim)))
            .collect::<Result<Vec<_>>>()?;
        let name = obj
            .get("name")
            .and_then(|n| n.as_str())
            .map(|s| s.to_string());
        let polytope = RationalPolytope::from_vertices(dim, points)?;
        Self::new(polytope, name)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn polytope(&self) -> &RationalPolytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    /// Least `k >= 1` with `k * P` a lattice polytope.
    pub fn ell0(&self) -> u32 {
        self.ell0
    }

    pub fn volume(&self) -> &Ratio {
        &self.volume
    }

    pub fn barycenter(&self) -> &QVec {
        &self.barycenter
    }

    pub fn lattice_cap(&self) -> usize {
        self.lattice_cap
    }

    pub fn with_lattice_cap(mut self, cap: usize) -> Self {
        self.lattice_cap = cap;
        self
    }

    /// Lattice points of `grade * P`, memoized per grade.
    pub fn grade_grid(&self, grade: u32) -> Result<Arc<Vec<Vec<Int>>>> {
        if let Some(hit) = self.grid_cache.lock().expect("grid cache").get(&grade) {
            return Ok(Arc::clone(hit));
        }
        let points = Arc::new(self.polytope.lattice_points(grade, self.lattice_cap)?);
        self.grid_cache
            .lock()
            .expect("grid cache")
            .insert(grade, Arc::clone(&points));
        Ok(points)
    }

    /// The fan rays: primitive facet normals of the polytope.
    pub fn rays(&self) -> Vec<Vec<Int>> {
        self.polytope.facets().iter().map(|f| f.normal.clone()).collect()
    }

    pub fn twist(&self, coords: QVec) -> Result<TwistVector> {
        if coords.dim() != self.dim() {
            return Err(KstabError::DimensionMismatch {
                expected: self.dim(),
                got: coords.dim(),
            });
        }
        Ok(TwistVector(coords))
    }

    /// Log discrepancy of the monomial valuation attached to `xi`:
    /// `A(xi) = -min_P <., xi>`. Nonnegative, and equal to the facet offset
    /// on each ray.
    pub fn log_discrepancy(&self, xi: &QVec) -> Ratio {
        let (min, _) = self.polytope.support_min(xi);
        -min
    }

    /// Expected vanishing order `S(xi) = <bc, xi> - min_P <., xi>`.
    pub fn s_invariant(&self, xi: &QVec) -> Ratio {
        let (min, _) = self.polytope.support_min(xi);
        self.barycenter.dot(xi) - min
    }

    /// Finite-level approximation of `S(xi)`: the average of
    /// `<u, xi> - m*l0*min_P<., xi>` over lattice points of `m*l0*P`,
    /// normalized per degree. Converges to `s_invariant` at rate O(1/m).
    pub fn s_invariant_finite(&self, xi: &QVec, m: u32) -> Result<Ratio> {
        let grade = m
            .checked_mul(self.ell0)
            .ok_or_else(|| KstabError::InvalidInput("level overflow".into()))?;
        let points = self.grade_grid(grade)?;
        let n_m = points.len();
        if n_m == 0 {
            return Err(KstabError::Internal("empty lattice grade".into()));
        }
        let (min, _) = self.polytope.support_min(xi);
        let grade_r = Ratio::from_integer(Int::from(grade));
        let mut acc = Ratio::zero();
        for u in points.iter() {
            let y = int_vec_to_qvec(u);
            acc += y.dot(xi) - &grade_r * &min;
        }
        Ok(acc / (&grade_r * Ratio::from_integer(Int::from(n_m as u64))))
    }

    /// `beta(xi) = A(xi) - S(xi) = -<bc, xi>`.
    pub fn beta(&self, xi: &QVec) -> Ratio {
        self.log_discrepancy(xi) - self.s_invariant(xi)
    }

    /// Obstruction functional, normalized by `beta(wt_xi) = -futaki(xi)`,
    /// which makes the twist law `beta(zeta + xi) = beta(zeta) - futaki(xi)`
    /// exact. Vanishes identically iff the barycenter is zero.
    pub fn futaki(&self, xi: &QVec) -> Ratio {
        self.barycenter.dot(xi)
    }

    pub fn futaki_vanishes(&self) -> bool {
        self.barycenter.is_zero()
    }

    /// Twist cocycle `theta_xi(zeta) = A(zeta + xi) - A(zeta)`.
    pub fn theta(&self, xi: &QVec, zeta: &QVec) -> Ratio {
        self.log_discrepancy(&(zeta + xi)) - self.log_discrepancy(zeta)
    }

    /// `min_i A(ray_i) / S(ray_i)` over the fan rays. The ratio of the two
    /// invariants is linear-fractional on each cone of the normal fan, so
    /// the infimum over all directions is attained on a ray.
    pub fn delta_toric(&self) -> Result<(Ratio, Vec<Int>)> {
        let mut best: Option<(Ratio, Vec<Int>)> = None;
        for ray in self.rays() {
            let xi = int_vec_to_qvec(&ray);
            let a = self.log_discrepancy(&xi);
            let s = self.s_invariant(&xi);
            if !s.is_positive() {
                return Err(KstabError::Internal(
                    "vanishing expected order on a ray of a full-dimensional model".into(),
                ));
            }
            let ratio = a / s;
            match &best {
                None => best = Some((ratio, ray)),
                Some((b, _)) if ratio < *b => best = Some((ratio, ray)),
                _ => {}
            }
        }
        best.ok_or_else(|| KstabError::Internal("model without facets".into()))
    }
}
