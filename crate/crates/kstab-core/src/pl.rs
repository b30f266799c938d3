//! Rational piecewise-linear convex functions on a polytope, represented as
//! a max of affine pieces together with the induced cell subdivision.

use crate::error::{KstabError, Result};
use crate::lp;
use crate::polytope::RationalPolytope;
use crate::rational::{parse_ratio, Int, Ratio};
use crate::vector::QVec;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// One affine piece `y -> <gradient, y> + constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePiece {
    pub gradient: QVec,
    pub constant: Ratio,
}

impl AffinePiece {
    pub fn eval(&self, y: &QVec) -> Ratio {
        self.gradient.dot(y) + &self.constant
    }
}

/// A convex PL function on a full-dimensional polytope, `f = max_j piece_j`,
/// with the regular subdivision into closed linearity cells.
#[derive(Clone, Debug)]
pub struct PlConvexFunction {
    domain: RationalPolytope,
    pieces: Vec<AffinePiece>,
    /// Full-dimensional cells, each tagged with its active piece index.
    cells: Vec<(RationalPolytope, usize)>,
}

impl PlConvexFunction {
    pub fn new(domain: RationalPolytope, pieces: Vec<AffinePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(KstabError::InvalidInput("no affine pieces".into()));
        }
        let dim = domain.dim();
        for p in &pieces {
            if p.gradient.dim() != dim {
                return Err(KstabError::DimensionMismatch {
                    expected: dim,
                    got: p.gradient.dim(),
                });
            }
        }
        let mut dedup: Vec<AffinePiece> = Vec::new();
        for p in pieces {
            if !dedup.contains(&p) {
                dedup.push(p);
            }
        }
        let cells = Self::build_cells(&domain, &dedup)?;
        Ok(PlConvexFunction {
            domain,
            pieces: dedup,
            cells,
        })
    }

    pub fn constant(domain: RationalPolytope, c: Ratio) -> Result<Self> {
        let dim = domain.dim();
        Self::new(
            domain,
            vec![AffinePiece {
                gradient: QVec::zeros(dim),
                constant: c,
            }],
        )
    }

    fn build_cells(
        domain: &RationalPolytope,
        pieces: &[AffinePiece],
    ) -> Result<Vec<(RationalPolytope, usize)>> {
        let dim = domain.dim();
        let base: Vec<(QVec, Ratio)> = domain
            .facets()
            .iter()
            .map(|f| {
                (
                    QVec(
                        f.normal
                            .iter()
                            .map(|c| Ratio::from_integer(c.clone()))
                            .collect(),
                    ),
                    -f.offset.clone(),
                )
            })
            .collect();
        let mut cells = Vec::new();
        let mut covered = Ratio::zero();
        for (j, pj) in pieces.iter().enumerate() {
            let mut halfspaces = base.clone();
            for (i, pi) in pieces.iter().enumerate() {
                if i == j {
                    continue;
                }
                // Active region of piece j: piece_j >= piece_i.
                halfspaces.push((&pj.gradient - &pi.gradient, &pi.constant - &pj.constant));
            }
            if let Some(cell) = RationalPolytope::from_halfspaces(dim, &halfspaces)? {
                covered += cell.volume()?;
                cells.push((cell, j));
            }
        }
        // The closed cells tile the domain; interiors are disjoint because
        // two distinct affine pieces tie only on a hyperplane.
        if covered != domain.volume()? {
            return Err(KstabError::NonConvex(
                "active cells do not tile the domain".into(),
            ));
        }
        Ok(cells)
    }

    /// Parses `[{"gradient": [...], "constant": c}, ...]` or
    /// `{"pieces": [...]}` into affine pieces.
    pub fn pieces_from_json(value: &serde_json::Value, dim: usize) -> Result<Vec<AffinePiece>> {
        let arr = match value {
            serde_json::Value::Array(a) => a,
            serde_json::Value::Object(o) => o
                .get("pieces")
                .and_then(|p| p.as_array())
                .ok_or_else(|| KstabError::InvalidInput("missing \"pieces\" array".into()))?,
            _ => {
                return Err(KstabError::InvalidInput(
                    "expected an array of affine pieces".into(),
                ))
            }
        };
        let mut pieces = Vec::with_capacity(arr.len());
        for item in arr {
            let obj = item
                .as_object()
                .ok_or_else(|| KstabError::InvalidInput("piece must be an object".into()))?;
            let gradient = QVec::parse_json(
                obj.get("gradient")
                    .ok_or_else(|| KstabError::InvalidInput("piece missing gradient".into()))?,
                Some(dim),
            )?;
            let constant = parse_ratio(
                obj.get("constant")
                    .ok_or_else(|| KstabError::InvalidInput("piece missing constant".into()))?,
            )?;
            pieces.push(AffinePiece { gradient, constant });
        }
        Ok(pieces)
    }

    pub fn domain(&self) -> &RationalPolytope {
        &self.domain
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn cells(&self) -> &[(RationalPolytope, usize)] {
        &self.cells
    }

    pub fn eval(&self, y: &QVec) -> Ratio {
        self.pieces
            .iter()
            .map(|p| p.eval(y))
            .max()
            .expect("nonempty pieces")
    }

    /// Maximum over the domain; a convex function attains it at a vertex.
    pub fn max_over_domain(&self) -> Ratio {
        self.domain
            .vertices()
            .iter()
            .map(|v| self.eval(v))
            .max()
            .expect("nonempty vertices")
    }

    /// Minimum over the domain, attained at a subdivision vertex.
    pub fn min_over_domain(&self) -> Ratio {
        self.subdivision_vertices()
            .iter()
            .map(|v| self.eval(v))
            .min()
            .expect("nonempty subdivision")
    }

    /// All vertices of the linearity cells (deduplicated, sorted).
    pub fn subdivision_vertices(&self) -> Vec<QVec> {
        let mut set: BTreeSet<QVec> = BTreeSet::new();
        for (cell, _) in &self.cells {
            for v in cell.vertices() {
                set.insert(v.clone());
            }
        }
        set.into_iter().collect()
    }

    /// Exact `\int_P f`, by cell-wise integration of the active pieces.
    pub fn integral(&self) -> Result<Ratio> {
        let mut total = Ratio::zero();
        for (cell, j) in &self.cells {
            let vol = cell.volume()?;
            let centroid = cell.barycenter()?;
            total += vol * self.pieces[*j].eval(&centroid);
        }
        Ok(total)
    }

    /// Mean of `f` against the uniform probability measure on the domain.
    pub fn mean(&self) -> Result<Ratio> {
        Ok(self.integral()? / self.domain.volume()?)
    }

    /// Exact `\int_P f^2` (for distribution moments).
    pub fn integral_square(&self) -> Result<Ratio> {
        let n = self.domain.dim();
        let pairs = Int::from(((n + 1) * (n + 2) / 2) as i64);
        let mut factorial = Int::one();
        for k in 2..=n {
            factorial *= Int::from(k);
        }
        let mut total = Ratio::zero();
        for (cell, j) in &self.cells {
            let piece = &self.pieces[*j];
            for simplex in cell.triangulation()? {
                let verts: Vec<&QVec> = simplex.iter().map(|&i| &cell.vertices()[i]).collect();
                let base = verts[0];
                let edges: Vec<Vec<Ratio>> = verts[1..].iter().map(|v| (*v - base).0).collect();
                let mut det = crate::linalg::det(&edges);
                if det.is_negative() {
                    det = -det;
                }
                let vol = det / Ratio::from_integer(factorial.clone());
                if vol.is_zero() {
                    continue;
                }
                let values: Vec<Ratio> = verts.iter().map(|v| piece.eval(v)).collect();
                let mut s = Ratio::zero();
                for a in 0..values.len() {
                    for b in a..values.len() {
                        s += &values[a] * &values[b];
                    }
                }
                total += vol * s / Ratio::from_integer(pairs.clone());
            }
        }
        Ok(total)
    }

    /// `f + c`.
    pub fn shift(&self, c: &Ratio) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffinePiece {
                gradient: p.gradient.clone(),
                constant: &p.constant + c,
            })
            .collect();
        PlConvexFunction {
            domain: self.domain.clone(),
            pieces,
            cells: self.cells.clone(),
        }
    }

    /// `f + <., delta>`; the subdivision is unchanged because all pieces
    /// shift by the same affine function.
    pub fn add_linear(&self, delta: &QVec) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffinePiece {
                gradient: &p.gradient + delta,
                constant: p.constant.clone(),
            })
            .collect();
        PlConvexFunction {
            domain: self.domain.clone(),
            pieces,
            cells: self.cells.clone(),
        }
    }

    /// `b * f` for `b > 0`; cells are unchanged.
    pub fn scale(&self, b: &Ratio) -> Result<Self> {
        if !b.is_positive() {
            return Err(KstabError::InvalidInput(
                "scaling factor must be positive".into(),
            ));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffinePiece {
                gradient: p.gradient.scale(b),
                constant: &p.constant * b,
            })
            .collect();
        Ok(PlConvexFunction {
            domain: self.domain.clone(),
            pieces,
            cells: self.cells.clone(),
        })
    }

    /// True when a single affine piece is active on the whole domain.
    pub fn is_affine(&self) -> bool {
        self.cells.len() == 1
    }
}

/// Exact global minimum of a proper `max` of affine forms on Q^n via the
/// epigraph program. Errors with a properness violation when unbounded.
pub fn minimize_pl_convex(forms: &[(QVec, Ratio)]) -> Result<(Ratio, QVec)> {
    lp::min_of_max_affine(forms)
}
