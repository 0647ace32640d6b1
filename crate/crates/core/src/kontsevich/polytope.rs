//! Edge-length polytopes `{l > 0, A l = L}` and uniform sampling on them.
//!
//! Vertices are the basic feasible solutions. Faces are cut out by setting
//! edge lengths to zero, which gives a barycentric triangulation: cone the
//! triangulation of every facet over the centroid, recursively.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::KontsevichError;

const FEAS_TOL: f64 = 1e-11;

/// Null-space basis with orthonormal columns.
pub(crate) fn null_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    let e = a.ncols();
    let pinv = a
        .clone()
        .pseudo_inverse(1e-12)
        .expect("pseudo-inverse with nonnegative epsilon");
    let proj = DMatrix::<f64>::identity(e, e) - &pinv * a;
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for c in 0..e {
        let mut v: DVector<f64> = proj.column(c).into_owned();
        for b in &basis {
            let d = b.dot(&v);
            v -= b * d;
        }
        for b in &basis {
            let d = b.dot(&v);
            v -= b * d;
        }
        let n = v.norm();
        if n > 1e-9 {
            basis.push(v / n);
        }
    }
    if basis.is_empty() {
        DMatrix::zeros(e, 0)
    } else {
        DMatrix::from_columns(&basis)
    }
}

pub(crate) fn numeric_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    sv.iter().filter(|&&s| s > 1e-9 * top.max(1.0)).count()
}

fn affine_dim(points: &[&DVector<f64>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let cols: Vec<DVector<f64>> = points[1..].iter().map(|p| *p - points[0]).collect();
    numeric_rank(&DMatrix::from_columns(&cols))
}

/// Volume of the simplex spanned by `d + 1` points in a `d`-dimensional
/// affine subspace, from the Gram determinant of its edge vectors.
fn simplex_volume(points: &[DVector<f64>]) -> f64 {
    let d = points.len() - 1;
    if d == 0 {
        return 1.0;
    }
    let cols: Vec<DVector<f64>> = points[1..].iter().map(|p| p - &points[0]).collect();
    let v = DMatrix::from_columns(&cols);
    let gram = v.transpose() * v;
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    gram.determinant().max(0.0).sqrt() / fact
}

/// Feasible region of an edge-length system with its triangulation.
#[derive(Clone, Debug)]
pub struct Polytope {
    pub constraint: DMatrix<f64>,
    pub target: DVector<f64>,
    pub dimension: usize,
    pub vertices: Vec<DVector<f64>>,
    simplices: Vec<Vec<DVector<f64>>>,
    cumulative: Vec<f64>,
    volume: f64,
    null: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

impl Polytope {
    pub fn new(constraint: DMatrix<f64>, target: DVector<f64>) -> Result<Self, KontsevichError> {
        let e = constraint.ncols();
        let scale = target.amax().max(1.0);
        let pinv = constraint
            .clone()
            .pseudo_inverse(1e-12)
            .expect("pseudo-inverse with nonnegative epsilon");
        let particular = &pinv * &target;
        if (&constraint * &particular - &target).amax() > 1e-9 * scale {
            return Err(KontsevichError::EmptyCell);
        }
        let rank = numeric_rank(&constraint);
        // Independent rows for the basis solves.
        let mut rows: Vec<usize> = Vec::new();
        for r in 0..constraint.nrows() {
            let mut trial = rows.clone();
            trial.push(r);
            if numeric_rank(&constraint.select_rows(&trial)) == trial.len() {
                rows = trial;
            }
        }
        let a = constraint.select_rows(&rows);
        let b = target.select_rows(&rows);

        let mut vertices: Vec<DVector<f64>> = Vec::new();
        for basis in itertools::Itertools::combinations(0..e, rank) {
            let sub = a.select_columns(&basis);
            let Some(x) = sub.clone().lu().solve(&b) else {
                continue;
            };
            if numeric_rank(&sub) < rank || x.iter().any(|&v| v < -FEAS_TOL * scale || !v.is_finite()) {
                continue;
            }
            let mut full = DVector::zeros(e);
            for (k, &c) in basis.iter().enumerate() {
                full[c] = x[k].max(0.0);
            }
            if !vertices.iter().any(|v| (v - &full).amax() <= 1e-9 * scale) {
                vertices.push(full);
            }
        }
        if vertices.is_empty() {
            return Err(KontsevichError::EmptyCell);
        }
        let centroid = vertices.iter().fold(DVector::zeros(e), |acc, v| acc + v) / vertices.len() as f64;
        if centroid.iter().any(|&c| c <= 1e-9 * scale) {
            return Err(KontsevichError::EmptyCell);
        }
        let dimension = e - rank;
        let all: Vec<usize> = (0..vertices.len()).collect();
        let simplices = triangulate(&vertices, &all, dimension);
        let mut cumulative = Vec::with_capacity(simplices.len());
        let mut volume = 0.0;
        for s in &simplices {
            volume += simplex_volume(s);
            cumulative.push(volume);
        }
        Ok(Self {
            null: null_basis(&constraint),
            constraint,
            target,
            dimension,
            vertices,
            simplices,
            cumulative,
            volume,
            pinv,
        })
    }

    /// Lebesgue volume in the edge-length coordinates restricted to the
    /// affine subspace; `1` for a single point.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn n_simplices(&self) -> usize {
        self.simplices.len()
    }

    pub fn centroid(&self) -> DVector<f64> {
        let e = self.constraint.ncols();
        self.vertices.iter().fold(DVector::zeros(e), |acc, v| acc + v) / self.vertices.len() as f64
    }

    /// Orthonormal basis of the directions inside the affine subspace.
    pub fn null_basis(&self) -> &DMatrix<f64> {
        &self.null
    }

    /// Moves a point back onto `A l = L` along the row space.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        let r = &self.target - &self.constraint * x;
        x + &self.pinv * r
    }

    pub fn contains_strictly(&self, x: &DVector<f64>) -> bool {
        x.iter().all(|&v| v > 0.0)
            && (&self.constraint * x - &self.target).amax() <= 1e-12 * self.target.amax().max(1.0)
    }

    /// The only point of a zero-dimensional polytope.
    pub fn point(&self) -> Option<&DVector<f64>> {
        (self.dimension == 0).then(|| &self.vertices[0])
    }

    /// A uniformly distributed interior point: a simplex of the
    /// triangulation chosen with probability proportional to its volume, then
    /// flat Dirichlet barycentric weights.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DVector<f64>, KontsevichError> {
        if self.dimension == 0 {
            return Err(KontsevichError::ZeroDimensional);
        }
        loop {
            let u: f64 = rng.random::<f64>() * self.volume;
            let idx = self.cumulative.partition_point(|&c| c <= u).min(self.simplices.len() - 1);
            let simplex = &self.simplices[idx];
            let weights: Vec<f64> = (0..simplex.len()).map(|_| Exp1.sample(rng)).collect();
            let total: f64 = weights.iter().sum();
            let mut x = DVector::zeros(self.constraint.ncols());
            for (w, p) in weights.iter().zip(simplex) {
                x += p * (w / total);
            }
            let x = self.project(&x);
            if self.contains_strictly(&x) {
                return Ok(x);
            }
        }
    }

    pub fn hit_and_run(&self, start: DVector<f64>) -> Result<HitAndRun<'_>, KontsevichError> {
        if self.dimension == 0 {
            return Err(KontsevichError::ZeroDimensional);
        }
        Ok(HitAndRun {
            polytope: self,
            current: start,
        })
    }
}

fn triangulate(vertices: &[DVector<f64>], face: &[usize], dim: usize) -> Vec<Vec<DVector<f64>>> {
    if dim == 0 {
        return vec![vec![vertices[face[0]].clone()]];
    }
    let e = vertices[0].len();
    let centroid = face.iter().fold(DVector::zeros(e), |acc, &i| acc + &vertices[i]) / face.len() as f64;
    let scale = centroid.amax().max(1.0);
    let mut facets: Vec<Vec<usize>> = Vec::new();
    for c in 0..e {
        let sub: Vec<usize> = face
            .iter()
            .copied()
            .filter(|&i| vertices[i][c].abs() <= 1e-9 * scale)
            .collect();
        if sub.is_empty() || sub.len() == face.len() || facets.contains(&sub) {
            continue;
        }
        let pts: Vec<&DVector<f64>> = sub.iter().map(|&i| &vertices[i]).collect();
        if affine_dim(&pts) == dim - 1 {
            facets.push(sub);
        }
    }
    let mut out = Vec::new();
    for f in facets {
        for mut s in triangulate(vertices, &f, dim - 1) {
            s.push(centroid.clone());
            out.push(s);
        }
    }
    out
}

/// Hit-and-run Markov chain on a polytope: from the current point pick a
/// uniformly random direction in the subspace and move to a uniform point of
/// the chord through it.
pub struct HitAndRun<'a> {
    polytope: &'a Polytope,
    current: DVector<f64>,
}

impl HitAndRun<'_> {
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &DVector<f64> {
        let null = &self.polytope.null;
        let d = null.ncols();
        let y: DVector<f64> = DVector::from_iterator(d, (0..d).map(|_| StandardNormal.sample(rng)));
        let dir = null * y;
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (x, v) in self.current.iter().zip(dir.iter()) {
            if *v > 0.0 {
                lo = lo.max(-x / v);
            } else if *v < 0.0 {
                hi = hi.min(-x / v);
            }
        }
        let t = lo + (hi - lo) * rng.random::<f64>();
        let next = &self.current + dir * t;
        if next.iter().all(|&v| v > 0.0) {
            self.current = self.polytope.project(&next);
        }
        &self.current
    }

    /// `n` draws after `burn_in` discarded steps, keeping every `thin`-th.
    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R, n: usize, burn_in: usize, thin: usize) -> Vec<DVector<f64>> {
        for _ in 0..burn_in {
            self.step(rng);
        }
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            for _ in 0..thin.max(1) {
                self.step(rng);
            }
            out.push(self.current.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn simplex_polytope(l: f64) -> Polytope {
        Polytope::new(DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]), DVector::from_element(1, l)).unwrap()
    }

    #[test]
    fn triangle_volume_and_vertices() {
        let p = simplex_polytope(1.0);
        assert_eq!(p.vertices.len(), 3);
        assert_eq!(p.dimension, 2);
        // equilateral triangle with side sqrt(2)
        assert!((p.volume() - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_dimensional_cell() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        let p = Polytope::new(a.clone(), DVector::from_element(3, 2.0)).unwrap();
        assert_eq!(p.dimension, 0);
        assert!((p.point().unwrap() - DVector::from_element(3, 1.0)).amax() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(p.sample(&mut rng), Err(KontsevichError::ZeroDimensional)));
        // violates the triangle inequality
        let bad = Polytope::new(a, DVector::from_vec(vec![1.0, 1.0, 5.0]));
        assert!(matches!(bad, Err(KontsevichError::EmptyCell)));
    }

    #[test]
    fn square_cell_volume() {
        // l0 + l1 = 2, l2 + l3 = 3: a product of two segments
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        let p = Polytope::new(a, DVector::from_vec(vec![2.0, 3.0])).unwrap();
        assert_eq!(p.vertices.len(), 4);
        // segments of lengths 2 sqrt 2 and 3 sqrt 2 in orthogonal planes
        assert!((p.volume() - 12.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_means() {
        let p = simplex_polytope(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20000;
        let mut mean = DVector::zeros(3);
        for _ in 0..n {
            let x = p.sample(&mut rng).unwrap();
            assert!((x.sum() - 1.0).abs() < 1e-12);
            mean += x;
        }
        mean /= n as f64;
        for i in 0..3 {
            assert!((mean[i] - 1.0 / 3.0).abs() < 0.01);
        }
    }
}
