//! Primitive types and their analytic region tests.

use crate::error::{Error, Result};
use crate::query::{QueryKind, Region};
use crate::scalar::Real;
use crate::vecn::{self, MAX_DIM};

/// A bounding primitive answering all four query types.
///
/// Tests are conservative with respect to the primitive's own geometry:
/// 1 whenever the region intersects the primitive, possibly 1 when it does
/// not. Dimension mismatches are programmer errors and panic.
pub trait Primitive<R: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn test_point(&self, p: &[R]) -> bool;
    /// `dir` need not be normalized, but must be nonzero; the ray parameter
    /// runs over `t >= 0`.
    fn test_ray(&self, origin: &[R], dir: &[R]) -> bool;
    /// `normal` must be unit length.
    fn test_plane(&self, p0: &[R], normal: &[R]) -> bool;
    fn test_aabox(&self, lo: &[R], hi: &[R]) -> bool;

    fn test(&self, region: &Region<R>) -> bool {
        assert_eq!(region.dim(), self.dim(), "region dimension mismatch");
        match region.kind() {
            QueryKind::Point => self.test_point(region.first()),
            QueryKind::Ray => self.test_ray(region.first(), region.second()),
            QueryKind::Plane => self.test_plane(region.first(), region.second()),
            QueryKind::Box => self.test_aabox(region.first(), region.second()),
        }
    }
}

// ---------------------------------------------------------------------------
// Axis-aligned box

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb<R: Real> {
    lo: [R; MAX_DIM],
    hi: [R; MAX_DIM],
    dim: u8,
}

impl<R: Real> Aabb<R> {
    pub fn new(lo: &[R], hi: &[R]) -> Result<Self> {
        assert_eq!(lo.len(), hi.len());
        if lo.iter().zip(hi).any(|(a, b)| a > b) {
            return Err(Error::Invalid("box needs lo <= hi componentwise".into()));
        }
        Ok(Self {
            lo: vecn::pad(lo),
            hi: vecn::pad(hi),
            dim: lo.len() as u8,
        })
    }

    pub fn lo(&self) -> &[R] {
        &self.lo[..self.dim as usize]
    }

    pub fn hi(&self) -> &[R] {
        &self.hi[..self.dim as usize]
    }

    pub fn center(&self, out: &mut [R]) {
        let half = R::from_f(0.5);
        for a in 0..self.dim as usize {
            out[a] = (self.lo[a] + self.hi[a]) * half;
        }
    }

    pub fn union(&self, other: &Aabb<R>) -> Aabb<R> {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for a in 0..self.dim as usize {
            out.lo[a] = out.lo[a].min(other.lo[a]);
            out.hi[a] = out.hi[a].max(other.hi[a]);
        }
        out
    }

    pub fn volume(&self) -> R {
        let mut v = R::one();
        for a in 0..self.dim as usize {
            v = v * (self.hi[a] - self.lo[a]);
        }
        v
    }
}

impl<R: Real> Primitive<R> for Aabb<R> {
    fn dim(&self) -> usize {
        self.dim as usize
    }

    fn test_point(&self, p: &[R]) -> bool {
        (0..self.dim as usize).all(|a| p[a] >= self.lo[a] && p[a] <= self.hi[a])
    }

    fn test_ray(&self, origin: &[R], dir: &[R]) -> bool {
        ray_hits_box(origin, dir, self.lo(), self.hi())
    }

    fn test_plane(&self, p0: &[R], normal: &[R]) -> bool {
        plane_hits_box(p0, normal, self.lo(), self.hi())
    }

    fn test_aabox(&self, lo: &[R], hi: &[R]) -> bool {
        (0..self.dim as usize).all(|a| lo[a] <= self.hi[a] && hi[a] >= self.lo[a])
    }
}

/// Slab test over `t >= 0`.
pub(crate) fn ray_hits_box<R: Real>(origin: &[R], dir: &[R], lo: &[R], hi: &[R]) -> bool {
    let mut t0 = R::zero();
    let mut t1 = R::infinity();
    for a in 0..origin.len() {
        if dir[a].to_f().abs() < 1e-300 {
            if origin[a] < lo[a] || origin[a] > hi[a] {
                return false;
            }
        } else {
            let inv = dir[a].recip();
            let mut ta = (lo[a] - origin[a]) * inv;
            let mut tb = (hi[a] - origin[a]) * inv;
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
        }
    }
    t1 >= t0
}

/// Signed-distance straddle: the plane meets the box iff the distance from
/// the box center is at most the box's support radius along the normal.
pub(crate) fn plane_hits_box<R: Real>(p0: &[R], normal: &[R], lo: &[R], hi: &[R]) -> bool {
    let half = R::from_f(0.5);
    let mut dist = R::zero();
    let mut ext = R::zero();
    for a in 0..p0.len() {
        let c = (lo[a] + hi[a]) * half;
        let h = (hi[a] - lo[a]) * half;
        dist = dist + normal[a] * (c - p0[a]);
        ext = ext + normal[a].abs() * h;
    }
    dist.abs() <= ext
}

// ---------------------------------------------------------------------------
// Sphere

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sphere<R: Real> {
    center: [R; MAX_DIM],
    radius: R,
    dim: u8,
}

impl<R: Real> Sphere<R> {
    pub fn new(center: &[R], radius: R) -> Result<Self> {
        if radius < R::zero() {
            return Err(Error::Invalid("sphere radius must be >= 0".into()));
        }
        Ok(Self {
            center: vecn::pad(center),
            radius,
            dim: center.len() as u8,
        })
    }

    pub fn center(&self) -> &[R] {
        &self.center[..self.dim as usize]
    }

    pub fn radius(&self) -> R {
        self.radius
    }
}

impl<R: Real> Primitive<R> for Sphere<R> {
    fn dim(&self) -> usize {
        self.dim as usize
    }

    fn test_point(&self, p: &[R]) -> bool {
        let mut d = [R::zero(); MAX_DIM];
        vecn::sub(p, self.center(), &mut d[..p.len()]);
        vecn::norm2(&d[..p.len()]) <= self.radius * self.radius
    }

    fn test_ray(&self, origin: &[R], dir: &[R]) -> bool {
        ray_hits_sphere(origin, dir, self.center(), self.radius)
    }

    fn test_plane(&self, p0: &[R], normal: &[R]) -> bool {
        let mut d = [R::zero(); MAX_DIM];
        vecn::sub(self.center(), p0, &mut d[..p0.len()]);
        vecn::dot(normal, &d[..p0.len()]).abs() <= self.radius
    }

    fn test_aabox(&self, lo: &[R], hi: &[R]) -> bool {
        // Distance from the center to the box after clamping.
        let mut d2 = R::zero();
        for a in 0..self.dim as usize {
            let c = self.center[a].max(lo[a]).min(hi[a]);
            let d = self.center[a] - c;
            d2 = d2 + d * d;
        }
        d2 <= self.radius * self.radius
    }
}

/// Quadratic ray-sphere test over `t >= 0`; `dir` may be non-unit.
pub(crate) fn ray_hits_sphere<R: Real>(origin: &[R], dir: &[R], center: &[R], radius: R) -> bool {
    let mut oc = [R::zero(); MAX_DIM];
    vecn::sub(origin, center, &mut oc[..origin.len()]);
    let oc = &oc[..origin.len()];
    let a = vecn::norm2(dir);
    let b = vecn::dot(dir, oc);
    let c = vecn::norm2(oc) - radius * radius;
    if c <= R::zero() {
        return true; // origin inside or on the sphere
    }
    let disc = b * b - a * c;
    if disc < R::zero() {
        return false;
    }
    // Roots t = (-b ± sqrt(disc)) / a; with c > 0 both share the sign of -b.
    b <= R::zero()
}

// ---------------------------------------------------------------------------
// Axis-aligned ellipsoid

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipsoid<R: Real> {
    center: [R; MAX_DIM],
    radii: [R; MAX_DIM],
    dim: u8,
}

impl<R: Real> Ellipsoid<R> {
    pub fn new(center: &[R], radii: &[R]) -> Result<Self> {
        assert_eq!(center.len(), radii.len());
        if radii.iter().any(|r| *r <= R::zero()) {
            return Err(Error::Invalid("ellipsoid radii must be positive".into()));
        }
        Ok(Self {
            center: vecn::pad(center),
            radii: vecn::pad(radii),
            dim: center.len() as u8,
        })
    }

    pub fn center(&self) -> &[R] {
        &self.center[..self.dim as usize]
    }

    pub fn radii(&self) -> &[R] {
        &self.radii[..self.dim as usize]
    }

    /// Maps a point into the frame where the ellipsoid is the unit sphere.
    #[inline]
    fn to_unit(&self, p: &[R], out: &mut [R]) {
        for a in 0..self.dim as usize {
            out[a] = (p[a] - self.center[a]) / self.radii[a];
        }
    }
}

impl<R: Real> Primitive<R> for Ellipsoid<R> {
    fn dim(&self) -> usize {
        self.dim as usize
    }

    fn test_point(&self, p: &[R]) -> bool {
        let mut q = [R::zero(); MAX_DIM];
        self.to_unit(p, &mut q);
        vecn::norm2(&q[..p.len()]) <= R::one()
    }

    fn test_ray(&self, origin: &[R], dir: &[R]) -> bool {
        let dim = self.dim as usize;
        let mut o = [R::zero(); MAX_DIM];
        let mut d = [R::zero(); MAX_DIM];
        self.to_unit(origin, &mut o);
        for a in 0..dim {
            d[a] = dir[a] / self.radii[a];
        }
        let zero = [R::zero(); MAX_DIM];
        ray_hits_sphere(&o[..dim], &d[..dim], &zero[..dim], R::one())
    }

    fn test_plane(&self, p0: &[R], normal: &[R]) -> bool {
        // In the unit-sphere frame the plane normal scales by the radii.
        let dim = self.dim as usize;
        let mut m = [R::zero(); MAX_DIM];
        let mut w = R::zero();
        for a in 0..dim {
            m[a] = normal[a] * self.radii[a];
            w = w + normal[a] * (p0[a] - self.center[a]);
        }
        let mlen = vecn::norm(&m[..dim]);
        w.abs() <= mlen
    }

    fn test_aabox(&self, lo: &[R], hi: &[R]) -> bool {
        // The box stays a box under the axis-aligned scaling.
        let dim = self.dim as usize;
        let mut d2 = R::zero();
        for a in 0..dim {
            let l = (lo[a] - self.center[a]) / self.radii[a];
            let h = (hi[a] - self.center[a]) / self.radii[a];
            let c = R::zero().max(l).min(h);
            d2 = d2 + c * c;
        }
        d2 <= R::one()
    }
}

// ---------------------------------------------------------------------------
// Rotation and oriented primitives

/// Orthonormal rotation; rows are the local frame axes in world coordinates,
/// so `local = M * world` and `world = M^T * local`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation<R: Real> {
    rows: [[R; MAX_DIM]; MAX_DIM],
    dim: u8,
}

impl<R: Real> Rotation<R> {
    pub fn identity(dim: usize) -> Self {
        let mut rows = [[R::zero(); MAX_DIM]; MAX_DIM];
        for (a, row) in rows.iter_mut().enumerate().take(dim) {
            row[a] = R::one();
        }
        Self {
            rows,
            dim: dim as u8,
        }
    }

    pub fn from_rows(rows: &[Vec<R>]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::identity(dim);
        for (a, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim);
            m.rows[a][..dim].copy_from_slice(row);
        }
        if !m.is_orthonormal(R::from_f(1e-6)) {
            return Err(Error::Invalid("rotation rows are not orthonormal".into()));
        }
        Ok(m)
    }

    pub(crate) fn from_rows_unchecked(rows: [[R; MAX_DIM]; MAX_DIM], dim: usize) -> Self {
        Self {
            rows,
            dim: dim as u8,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn row(&self, a: usize) -> &[R] {
        &self.rows[a][..self.dim as usize]
    }

    pub fn is_orthonormal(&self, tol: R) -> bool {
        let dim = self.dim as usize;
        for i in 0..dim {
            for j in 0..dim {
                let d = vecn::dot(self.row(i), self.row(j));
                let want = if i == j { R::one() } else { R::zero() };
                if (d - want).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `local = M * world`
    #[inline]
    pub fn to_local(&self, world: &[R], out: &mut [R]) {
        let dim = self.dim as usize;
        for a in 0..dim {
            out[a] = vecn::dot(self.row(a), world);
        }
    }
}

/// A primitive expressed in a rotated local frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Oriented<R: Real, P> {
    pub rotation: Rotation<R>,
    pub base: P,
}

impl<R: Real, P: Primitive<R>> Primitive<R> for Oriented<R, P> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn test_point(&self, p: &[R]) -> bool {
        let mut l = [R::zero(); MAX_DIM];
        self.rotation.to_local(p, &mut l);
        self.base.test_point(&l[..p.len()])
    }

    fn test_ray(&self, origin: &[R], dir: &[R]) -> bool {
        let dim = origin.len();
        let mut o = [R::zero(); MAX_DIM];
        let mut d = [R::zero(); MAX_DIM];
        self.rotation.to_local(origin, &mut o);
        self.rotation.to_local(dir, &mut d);
        self.base.test_ray(&o[..dim], &d[..dim])
    }

    fn test_plane(&self, p0: &[R], normal: &[R]) -> bool {
        let dim = p0.len();
        let mut q = [R::zero(); MAX_DIM];
        let mut n = [R::zero(); MAX_DIM];
        self.rotation.to_local(p0, &mut q);
        self.rotation.to_local(normal, &mut n);
        self.base.test_plane(&q[..dim], &n[..dim])
    }

    fn test_aabox(&self, lo: &[R], hi: &[R]) -> bool {
        // The world box becomes oriented in the local frame; test its
        // axis-aligned hull there (over-approximates, never misses).
        let dim = lo.len();
        let half = R::from_f(0.5);
        let mut wc = [R::zero(); MAX_DIM];
        let mut wh = [R::zero(); MAX_DIM];
        for a in 0..dim {
            wc[a] = (lo[a] + hi[a]) * half;
            wh[a] = (hi[a] - lo[a]) * half;
        }
        let mut lc = [R::zero(); MAX_DIM];
        self.rotation.to_local(&wc[..dim], &mut lc);
        let mut llo = [R::zero(); MAX_DIM];
        let mut lhi = [R::zero(); MAX_DIM];
        for a in 0..dim {
            let mut ext = R::zero();
            for b in 0..dim {
                ext = ext + self.rotation.rows[a][b].abs() * wh[b];
            }
            llo[a] = lc[a] - ext;
            lhi[a] = lc[a] + ext;
        }
        self.base.test_aabox(&llo[..dim], &lhi[..dim])
    }
}

// ---------------------------------------------------------------------------
// k-DOP

/// Discrete oriented polytope: the intersection of slabs
/// `lo_i <= d_i . x <= hi_i` along fixed unit directions. Each slab
/// contributes two bounding planes, so a polytope with `k` planes stores
/// `k/2` directions. The direction set must include all coordinate axes
/// (up to sign); plane queries are answered through the axis-slab hull.
#[derive(Clone, Debug, PartialEq)]
pub struct KDop<R: Real> {
    dim: u8,
    /// `n_dirs x dim`, row-major.
    dirs: Vec<R>,
    intervals: Vec<(R, R)>,
    /// Per spatial axis: (slab index, sign of the direction along that axis).
    axis_slabs: [(u32, bool); MAX_DIM],
}

impl<R: Real> KDop<R> {
    pub fn new(dim: usize, dirs: Vec<R>, intervals: Vec<(R, R)>) -> Result<Self> {
        assert!(dim >= 1 && dim <= MAX_DIM);
        if dirs.len() != intervals.len() * dim {
            return Err(Error::Invalid("direction/interval count mismatch".into()));
        }
        if intervals.iter().any(|(lo, hi)| lo > hi) {
            return Err(Error::Invalid("slab needs lo <= hi".into()));
        }
        let tol = 1e-9;
        for d in dirs.chunks(dim) {
            if (vecn::norm2(d).to_f() - 1.0).abs() > tol {
                return Err(Error::Invalid("slab directions must be unit length".into()));
            }
        }
        let mut axis_slabs = [(u32::MAX, true); MAX_DIM];
        for (i, d) in dirs.chunks(dim).enumerate() {
            for a in 0..dim {
                if (d[a].to_f().abs() - 1.0).abs() < tol {
                    axis_slabs[a] = (i as u32, d[a] > R::zero());
                }
            }
        }
        for (a, slot) in axis_slabs.iter().enumerate().take(dim) {
            if slot.0 == u32::MAX {
                return Err(Error::Invalid(format!(
                    "direction set must include coordinate axis {a}"
                )));
            }
        }
        Ok(Self {
            dim: dim as u8,
            dirs,
            intervals,
            axis_slabs,
        })
    }

    pub fn n_directions(&self) -> usize {
        self.intervals.len()
    }

    pub fn n_planes(&self) -> usize {
        2 * self.intervals.len()
    }

    pub fn direction(&self, i: usize) -> &[R] {
        &self.dirs[i * self.dim as usize..(i + 1) * self.dim as usize]
    }

    pub fn interval(&self, i: usize) -> (R, R) {
        self.intervals[i]
    }

    pub fn directions_flat(&self) -> &[R] {
        &self.dirs
    }

    pub fn intervals(&self) -> &[(R, R)] {
        &self.intervals
    }

    /// Axis-aligned hull recovered from the coordinate-axis slabs.
    pub fn aabb_hull(&self) -> Aabb<R> {
        let dim = self.dim as usize;
        let mut lo = [R::zero(); MAX_DIM];
        let mut hi = [R::zero(); MAX_DIM];
        for a in 0..dim {
            let (idx, positive) = self.axis_slabs[a];
            let (l, h) = self.intervals[idx as usize];
            if positive {
                lo[a] = l;
                hi[a] = h;
            } else {
                lo[a] = -h;
                hi[a] = -l;
            }
        }
        Aabb::new(&lo[..dim], &hi[..dim]).expect("axis slabs are ordered")
    }
}

impl<R: Real> Primitive<R> for KDop<R> {
    fn dim(&self) -> usize {
        self.dim as usize
    }

    fn test_point(&self, p: &[R]) -> bool {
        self.intervals.iter().enumerate().all(|(i, (lo, hi))| {
            let proj = vecn::dot(self.direction(i), p);
            proj >= *lo && proj <= *hi
        })
    }

    fn test_ray(&self, origin: &[R], dir: &[R]) -> bool {
        // Generalized slab test over all directions, t >= 0.
        let mut t0 = R::zero();
        let mut t1 = R::infinity();
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            let d = self.direction(i);
            let v = vecn::dot(d, dir);
            let o = vecn::dot(d, origin);
            if v.to_f().abs() < 1e-300 {
                if o < *lo || o > *hi {
                    return false;
                }
            } else {
                let inv = v.recip();
                let mut ta = (*lo - o) * inv;
                let mut tb = (*hi - o) * inv;
                if ta > tb {
                    std::mem::swap(&mut ta, &mut tb);
                }
                t0 = t0.max(ta);
                t1 = t1.min(tb);
            }
        }
        t1 >= t0
    }

    fn test_plane(&self, p0: &[R], normal: &[R]) -> bool {
        // Conservative: test the axis-slab hull, a superset of the polytope.
        self.aabb_hull().test_plane(p0, normal)
    }

    fn test_aabox(&self, lo: &[R], hi: &[R]) -> bool {
        // Separating-axis test restricted to the slab directions.
        let dim = self.dim as usize;
        let half = R::from_f(0.5);
        for (i, (slo, shi)) in self.intervals.iter().enumerate() {
            let d = self.direction(i);
            let mut pc = R::zero();
            let mut ext = R::zero();
            for a in 0..dim {
                let c = (lo[a] + hi[a]) * half;
                let h = (hi[a] - lo[a]) * half;
                pc = pc + d[a] * c;
                ext = ext + d[a].abs() * h;
            }
            if pc + ext < *slo || pc - ext > *shi {
                return false;
            }
        }
        true
    }
}
