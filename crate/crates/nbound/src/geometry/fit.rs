//! Closed-form fits of classic primitives to grid indicators.
//!
//! All fits bound occupied cells *entirely* (their corners, not just their
//! centers), so any region sample landing anywhere in an occupied cell lies
//! inside the fitted primitive. Oriented variants use PCA axes of the
//! occupied-cell centers; the sphere uses Ritter's two-pass approximation
//! followed by a growth pass over all corners.

use super::primitives::{Aabb, Ellipsoid, KDop, Oriented, Rotation, Sphere};
use crate::error::{Error, Result};
use crate::indicator::GridIndicator;
use crate::scalar::Real;
use crate::vecn::{self, MAX_DIM};

/// Tiny relative inflation applied to fitted radii so that the farthest
/// corner stays inside after the square-root round trip.
fn inflate<R: Real>(v: R) -> R {
    v * R::from_f(1.0 + 1e-12)
}

fn require_occupied(ind: &GridIndicator) -> Result<()> {
    if ind.occupied_count() == 0 {
        return Err(Error::EmptyIndicator);
    }
    Ok(())
}

/// Calls `f` with every corner of every occupied cell.
fn for_each_occupied_corner<R: Real>(ind: &GridIndicator, mut f: impl FnMut(&[R])) {
    let dim = ind.dim();
    for cell in ind.occupied_cells() {
        let (lo, hi) = ind.cell_bounds::<R>(&cell);
        for mask in 0..(1usize << dim) {
            let mut p = [R::zero(); MAX_DIM];
            for a in 0..dim {
                p[a] = if mask >> a & 1 == 1 { hi[a] } else { lo[a] };
            }
            f(&p[..dim]);
        }
    }
}

pub fn fit_aabb<R: Real>(ind: &GridIndicator) -> Result<Aabb<R>> {
    require_occupied(ind)?;
    let dim = ind.dim();
    let mut lo = [R::infinity(); MAX_DIM];
    let mut hi = [R::neg_infinity(); MAX_DIM];
    for cell in ind.occupied_cells() {
        let (clo, chi) = ind.cell_bounds::<R>(&cell);
        for a in 0..dim {
            lo[a] = lo[a].min(clo[a]);
            hi[a] = hi[a].max(chi[a]);
        }
    }
    Aabb::new(&lo[..dim], &hi[..dim])
}

pub fn fit_sphere<R: Real>(ind: &GridIndicator) -> Result<Sphere<R>> {
    require_occupied(ind)?;
    let dim = ind.dim();
    let corners = {
        let mut v: Vec<[R; MAX_DIM]> = Vec::new();
        for_each_occupied_corner::<R>(ind, |p| v.push(vecn::pad(p)));
        v
    };
    let farthest_from = |q: &[R]| {
        let mut best = 0;
        let mut best_d = R::neg_infinity();
        for (i, p) in corners.iter().enumerate() {
            let mut d = [R::zero(); MAX_DIM];
            vecn::sub(&p[..dim], q, &mut d[..dim]);
            let d2 = vecn::norm2(&d[..dim]);
            if d2 > best_d {
                best_d = d2;
                best = i;
            }
        }
        best
    };
    // Ritter: two farthest-point passes seed the ball, then grow.
    let a = corners[farthest_from(&corners[0][..dim])];
    let b = corners[farthest_from(&a[..dim])];
    let half = R::from_f(0.5);
    let mut center = [R::zero(); MAX_DIM];
    for i in 0..dim {
        center[i] = (a[i] + b[i]) * half;
    }
    let mut radius = {
        let mut d = [R::zero(); MAX_DIM];
        vecn::sub(&a[..dim], &b[..dim], &mut d[..dim]);
        vecn::norm(&d[..dim]) * half
    };
    for p in &corners {
        let mut d = [R::zero(); MAX_DIM];
        vecn::sub(&p[..dim], &center[..dim], &mut d[..dim]);
        let dist = vecn::norm(&d[..dim]);
        if dist > radius {
            let new_r = (radius + dist) * half;
            let shift = (dist - new_r) / dist;
            for i in 0..dim {
                center[i] = center[i] + d[i] * shift;
            }
            radius = new_r;
        }
    }
    // Growth pass: cover every corner exactly.
    let mut max2 = R::zero();
    for p in &corners {
        let mut d = [R::zero(); MAX_DIM];
        vecn::sub(&p[..dim], &center[..dim], &mut d[..dim]);
        max2 = max2.max(vecn::norm2(&d[..dim]));
    }
    Sphere::new(&center[..dim], inflate(max2.sqrt()))
}

pub fn fit_aaelli<R: Real>(ind: &GridIndicator) -> Result<Ellipsoid<R>> {
    require_occupied(ind)?;
    let aabb = fit_aabb::<R>(ind)?;
    let dim = ind.dim();
    let mut center = [R::zero(); MAX_DIM];
    aabb.center(&mut center);
    let half = R::from_f(0.5);
    let mut h = [R::zero(); MAX_DIM];
    for a in 0..dim {
        h[a] = ((aabb.hi()[a] - aabb.lo()[a]) * half).max(R::from_f(1e-12));
    }
    // Scale the half extents so that every corner satisfies the quadric.
    let mut max_q = R::zero();
    for_each_occupied_corner::<R>(ind, |p| {
        let mut q = R::zero();
        for a in 0..dim {
            let t = (p[a] - center[a]) / h[a];
            q = q + t * t;
        }
        max_q = max_q.max(q);
    });
    let scale = inflate(max_q.sqrt());
    let mut radii = [R::zero(); MAX_DIM];
    for a in 0..dim {
        radii[a] = h[a] * scale;
    }
    Ellipsoid::new(&center[..dim], &radii[..dim])
}

pub fn fit_obox<R: Real>(ind: &GridIndicator) -> Result<Oriented<R, Aabb<R>>> {
    require_occupied(ind)?;
    let rotation = pca_rotation::<R>(ind);
    let dim = ind.dim();
    let mut lo = [R::infinity(); MAX_DIM];
    let mut hi = [R::neg_infinity(); MAX_DIM];
    let mut l = [R::zero(); MAX_DIM];
    for_each_occupied_corner::<R>(ind, |p| {
        rotation.to_local(p, &mut l);
        for a in 0..dim {
            lo[a] = lo[a].min(l[a]);
            hi[a] = hi[a].max(l[a]);
        }
    });
    Ok(Oriented {
        rotation,
        base: Aabb::new(&lo[..dim], &hi[..dim])?,
    })
}

pub fn fit_oelli<R: Real>(ind: &GridIndicator) -> Result<Oriented<R, Ellipsoid<R>>> {
    require_occupied(ind)?;
    let rotation = pca_rotation::<R>(ind);
    let dim = ind.dim();
    let mut lo = [R::infinity(); MAX_DIM];
    let mut hi = [R::neg_infinity(); MAX_DIM];
    let mut l = [R::zero(); MAX_DIM];
    let mut locals: Vec<[R; MAX_DIM]> = Vec::new();
    for_each_occupied_corner::<R>(ind, |p| {
        rotation.to_local(p, &mut l);
        for a in 0..dim {
            lo[a] = lo[a].min(l[a]);
            hi[a] = hi[a].max(l[a]);
        }
        locals.push(l);
    });
    let half = R::from_f(0.5);
    let mut center = [R::zero(); MAX_DIM];
    let mut h = [R::zero(); MAX_DIM];
    for a in 0..dim {
        center[a] = (lo[a] + hi[a]) * half;
        h[a] = ((hi[a] - lo[a]) * half).max(R::from_f(1e-12));
    }
    let mut max_q = R::zero();
    for p in &locals {
        let mut q = R::zero();
        for a in 0..dim {
            let t = (p[a] - center[a]) / h[a];
            q = q + t * t;
        }
        max_q = max_q.max(q);
    }
    let scale = inflate(max_q.sqrt());
    let mut radii = [R::zero(); MAX_DIM];
    for a in 0..dim {
        radii[a] = h[a] * scale;
    }
    Ok(Oriented {
        rotation,
        base: Ellipsoid::new(&center[..dim], &radii[..dim])?,
    })
}

/// Canonical slab direction set: the coordinate axes first, then main
/// diagonals `(1, ±1, ..)/sqrt(n)` in lexicographic order, truncated to
/// `n_dirs`. `n_dirs` directions bound with `2 * n_dirs` planes.
pub fn default_directions<R: Real>(dim: usize, n_dirs: usize) -> Result<Vec<R>> {
    let max_dirs = dim + (1 << (dim - 1));
    if n_dirs < dim || n_dirs > max_dirs {
        return Err(Error::Invalid(format!(
            "direction count must be in {dim}..={max_dirs} for dimension {dim}"
        )));
    }
    let mut dirs: Vec<R> = Vec::with_capacity(n_dirs * dim);
    for a in 0..dim {
        for b in 0..dim {
            dirs.push(if a == b { R::one() } else { R::zero() });
        }
    }
    let inv = R::from_f(1.0 / (dim as f64).sqrt());
    let mut diagonals: Vec<Vec<R>> = Vec::new();
    for mask in 0..(1usize << (dim - 1)) {
        let mut d = vec![inv; dim];
        for a in 1..dim {
            if mask >> (a - 1) & 1 == 1 {
                d[a] = -inv;
            }
        }
        diagonals.push(d);
    }
    diagonals.sort_by(|x, y| {
        x.iter()
            .zip(y)
            .map(|(a, b)| a.partial_cmp(b).unwrap())
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for d in diagonals.into_iter().take(n_dirs - dim) {
        dirs.extend_from_slice(&d);
    }
    Ok(dirs)
}

/// Default plane count: `4n` planes, i.e. `2n` slab directions.
pub fn default_plane_count(dim: usize) -> usize {
    4 * dim
}

pub fn fit_kdop<R: Real>(ind: &GridIndicator, planes: usize) -> Result<KDop<R>> {
    if planes % 2 != 0 {
        return Err(Error::Invalid("plane count must be even (two per slab)".into()));
    }
    let dirs = default_directions::<R>(ind.dim(), planes / 2)?;
    fit_kdop_with_directions(ind, dirs)
}

/// Fits slab intervals as min/max projections of occupied-cell corners onto
/// the given directions.
pub fn fit_kdop_with_directions<R: Real>(ind: &GridIndicator, dirs: Vec<R>) -> Result<KDop<R>> {
    require_occupied(ind)?;
    let dim = ind.dim();
    if dirs.len() % dim != 0 {
        return Err(Error::Invalid("direction buffer length mismatch".into()));
    }
    let n_dirs = dirs.len() / dim;
    let mut intervals = vec![(R::infinity(), R::neg_infinity()); n_dirs];
    for_each_occupied_corner::<R>(ind, |p| {
        for (i, iv) in intervals.iter_mut().enumerate() {
            let proj = vecn::dot(&dirs[i * dim..(i + 1) * dim], p);
            iv.0 = iv.0.min(proj);
            iv.1 = iv.1.max(proj);
        }
    });
    KDop::new(dim, dirs, intervals)
}

/// PCA frame of the occupied-cell centers: eigenvectors of the covariance,
/// sorted by decreasing eigenvalue, signs fixed for determinism. Degenerate
/// covariances fall back to the identity.
fn pca_rotation<R: Real>(ind: &GridIndicator) -> Rotation<R> {
    let dim = ind.dim();
    let mut mean = [0.0f64; MAX_DIM];
    let mut count = 0.0f64;
    for cell in ind.occupied_cells() {
        let c = ind.cell_center::<f64>(&cell);
        for a in 0..dim {
            mean[a] += c[a];
        }
        count += 1.0;
    }
    for m in &mut mean {
        *m /= count;
    }
    let mut cov = [[0.0f64; MAX_DIM]; MAX_DIM];
    for cell in ind.occupied_cells() {
        let c = ind.cell_center::<f64>(&cell);
        for a in 0..dim {
            for b in 0..dim {
                cov[a][b] += (c[a] - mean[a]) * (c[b] - mean[b]);
            }
        }
    }
    for row in &mut cov {
        for v in row {
            *v /= count;
        }
    }
    let (vectors, values) = jacobi_eigen(cov, dim);

    // Rows = eigenvectors, sorted by decreasing eigenvalue.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
    let mut rows = [[R::zero(); MAX_DIM]; MAX_DIM];
    for (r, &src) in order.iter().enumerate() {
        // Column `src` of the Jacobi eigenvector matrix.
        let mut row = [0.0f64; MAX_DIM];
        for a in 0..dim {
            row[a] = vectors[a][src];
        }
        // Deterministic sign: first non-tiny component positive.
        if let Some(lead) = row[..dim].iter().find(|v| v.abs() > 1e-9) {
            if *lead < 0.0 {
                for v in &mut row[..dim] {
                    *v = -*v;
                }
            }
        }
        for a in 0..dim {
            rows[r][a] = R::from_f(row[a]);
        }
    }
    for r in dim..MAX_DIM {
        rows[r][r] = R::one();
    }
    let rot = Rotation::from_rows_unchecked(rows, dim);
    debug_assert!(rot.is_orthonormal(R::from_f(1e-6)));
    rot
}

/// Cyclic Jacobi eigendecomposition for small symmetric matrices.
/// Returns (eigenvector matrix with eigenvectors as columns, eigenvalues).
fn jacobi_eigen(mut a: [[f64; MAX_DIM]; MAX_DIM], dim: usize) -> ([[f64; MAX_DIM]; MAX_DIM], [f64; MAX_DIM]) {
    let mut v = [[0.0f64; MAX_DIM]; MAX_DIM];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..dim {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut values = [0.0f64; MAX_DIM];
    for i in 0..dim {
        values[i] = a[i][i];
    }
    (v, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Primitive;
    use crate::indicator::ProceduralIndicator;

    fn grid_with(cells: &[[usize; 2]], shape: [usize; 2]) -> GridIndicator {
        let mut g = GridIndicator::zeros(&shape).unwrap();
        for c in cells {
            g.set(c, true);
        }
        g
    }

    #[test]
    fn single_cell_aabb_is_the_cell_extent() {
        let g = grid_with(&[[1, 1]], [4, 4]);
        let b = fit_aabb::<f64>(&g).unwrap();
        assert_eq!(b.lo(), &[0.25, 0.25]);
        assert_eq!(b.hi(), &[0.5, 0.5]);
    }

    #[test]
    fn full_grid_aabb_is_the_unit_cube() {
        let mut g = GridIndicator::zeros(&[4, 4]).unwrap();
        for c in 0..16 {
            g.set_cell(c, true);
        }
        let b = fit_aabb::<f64>(&g).unwrap();
        assert_eq!(b.lo(), &[0.0, 0.0]);
        assert_eq!(b.hi(), &[1.0, 1.0]);
        // k-DOP slabs are the projection ranges of the unit cube.
        let k = fit_kdop::<f64>(&g, 8).unwrap();
        assert_eq!(k.interval(0), (0.0, 1.0));
        assert_eq!(k.interval(1), (0.0, 1.0));
        let s = 1.0 / 2.0f64.sqrt();
        let (lo, hi) = k.interval(2); // diagonal (1, -1)/sqrt(2) sorts first
        assert!((lo - -s).abs() < 1e-12 && (hi - s).abs() < 1e-12);
        let (lo, hi) = k.interval(3); // then (1, 1)/sqrt(2)
        assert!(lo.abs() < 1e-12 && (hi - 2.0 * s).abs() < 1e-12);
    }

    #[test]
    fn two_diagonal_cells_kdop_matches_hand_projection() {
        // Cells (0,0) and (3,3) of a 4x4 grid: corners span [0,0.25] and
        // [0.75,1]; the (1,1)/sqrt(2) slab runs from 0 to sqrt(2).
        let g = grid_with(&[[0, 0], [3, 3]], [4, 4]);
        let b = fit_aabb::<f64>(&g).unwrap();
        assert_eq!(b.lo(), &[0.0, 0.0]);
        assert_eq!(b.hi(), &[1.0, 1.0]);
        let k = fit_kdop::<f64>(&g, 8).unwrap();
        let (lo, hi) = k.interval(3);
        assert!(lo.abs() < 1e-12);
        assert!((hi - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_indicator_has_nothing_to_bound() {
        let g = GridIndicator::zeros(&[4, 4]).unwrap();
        assert!(matches!(fit_aabb::<f64>(&g), Err(Error::EmptyIndicator)));
        assert!(matches!(fit_sphere::<f64>(&g), Err(Error::EmptyIndicator)));
        assert!(matches!(fit_kdop::<f64>(&g, 8), Err(Error::EmptyIndicator)));
    }

    #[test]
    fn fits_cover_every_occupied_cell_corner() {
        let disk = ProceduralIndicator::disk(&[0.45f64, 0.55], 0.28).unwrap();
        let g = GridIndicator::rasterize(&disk, &[16, 16]).unwrap();
        let aabb = fit_aabb::<f64>(&g).unwrap();
        let sphere = fit_sphere::<f64>(&g).unwrap();
        let aaelli = fit_aaelli::<f64>(&g).unwrap();
        let obox = fit_obox::<f64>(&g).unwrap();
        let oelli = fit_oelli::<f64>(&g).unwrap();
        let kdop = fit_kdop::<f64>(&g, 8).unwrap();
        let prims: [&dyn Primitive<f64>; 6] = [&aabb, &sphere, &aaelli, &obox, &oelli, &kdop];
        for_each_occupied_corner::<f64>(&g, |p| {
            for prim in prims {
                assert!(prim.test_point(p), "corner {p:?} escaped a fit");
            }
        });
    }

    #[test]
    fn pca_frame_aligns_with_an_elongated_shape() {
        // Diagonal line of cells: leading PCA axis should be the diagonal.
        let cells: Vec<[usize; 2]> = (0..16).map(|i| [i, i]).collect();
        let g = grid_with(&cells, [16, 16]);
        let obox = fit_obox::<f64>(&g).unwrap();
        let lead = obox.rotation.row(0);
        let s = 1.0 / 2.0f64.sqrt();
        assert!((lead[0].abs() - s).abs() < 1e-6);
        assert!((lead[1].abs() - s).abs() < 1e-6);
        // The oriented box is much tighter than the axis-aligned one.
        let aabb = fit_aabb::<f64>(&g).unwrap();
        assert!(obox.base.volume() < 0.5 * aabb.volume());
    }

    #[test]
    fn default_directions_cover_axes_first() {
        let d3 = default_directions::<f64>(3, 6).unwrap();
        assert_eq!(&d3[0..3], &[1.0, 0.0, 0.0]);
        assert_eq!(&d3[3..6], &[0.0, 1.0, 0.0]);
        assert_eq!(&d3[6..9], &[0.0, 0.0, 1.0]);
        // 3 diagonals kept out of 4, lexicographically smallest first.
        let inv = 1.0 / 3.0f64.sqrt();
        assert_eq!(&d3[9..12], &[inv, -inv, -inv]);
        assert!(default_directions::<f64>(2, 5).is_err());
        assert!(default_directions::<f64>(2, 1).is_err());
    }
}
