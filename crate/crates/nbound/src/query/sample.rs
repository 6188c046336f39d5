//! Uniform query generation and region point sampling.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{QueryKind, Region};
use crate::rng::{unit, unit_vector};
use crate::scalar::Real;
use crate::vecn::MAX_DIM;

/// Draws one region uniformly: points, box corners, ray origins and plane
/// support points uniform in `[0,1]^n`; ray directions and plane normals
/// uniform on the unit sphere.
pub fn uniform_region<R: Real>(rng: &mut impl Rng, kind: QueryKind, dim: usize) -> Region<R> {
    let mut a = [R::zero(); MAX_DIM];
    for v in a.iter_mut().take(dim) {
        *v = unit(rng);
    }
    match kind {
        QueryKind::Point => Region::point(&a[..dim]),
        QueryKind::Ray => {
            let mut d = [R::zero(); MAX_DIM];
            unit_vector(rng, dim, &mut d);
            Region::ray(&a[..dim], &d[..dim]).expect("unit direction")
        }
        QueryKind::Plane => {
            let mut n = [R::zero(); MAX_DIM];
            unit_vector(rng, dim, &mut n);
            Region::plane(&a[..dim], &n[..dim]).expect("unit normal")
        }
        QueryKind::Box => {
            let mut b = [R::zero(); MAX_DIM];
            for v in b.iter_mut().take(dim) {
                *v = unit(rng);
            }
            Region::aabox(&a[..dim], &b[..dim])
        }
    }
}

/// Samples up to `s` points across the region, clipped to the domain:
///
/// * Point: the point itself (`s` ignored).
/// * Ray: `s` stratified points along the segment of the ray inside
///   `[0,1]^n`; empty if the ray misses the domain.
/// * Plane: up to `s` accepted points from rejection sampling of the
///   dominant-axis parameterization of plane-within-domain.
/// * Box: `s` stratified-uniform (Latin hypercube) points inside the box.
///
/// An empty result means the region misses the domain and is labeled free.
pub fn sample_region_into<R: Real>(
    rng: &mut impl Rng,
    region: &Region<R>,
    s: usize,
    out: &mut Vec<[R; MAX_DIM]>,
) {
    assert!(s >= 1, "sample count must be >= 1");
    out.clear();
    let dim = region.dim();
    match region.kind() {
        QueryKind::Point => {
            let mut p = [R::zero(); MAX_DIM];
            p[..dim].copy_from_slice(region.first());
            out.push(p);
        }
        QueryKind::Ray => {
            let origin = region.first();
            let d = region.second();
            let Some((t0, t1)) = clip_ray_to_unit_cube(origin, d) else {
                return;
            };
            let span = t1 - t0;
            for i in 0..s {
                let jitter: R = unit(rng);
                let t = t0 + span * (R::from_f(i as f64) + jitter) / R::from_f(s as f64);
                let mut p = [R::zero(); MAX_DIM];
                for a in 0..dim {
                    p[a] = clamp01(origin[a] + d[a] * t);
                }
                out.push(p);
            }
        }
        QueryKind::Plane => {
            let p0 = region.first();
            let n = region.second();
            let mut axis = 0;
            for a in 1..dim {
                if n[a].abs() > n[axis].abs() {
                    axis = a;
                }
            }
            let w = crate::vecn::dot(n, p0);
            let max_tries = 64 * s;
            let mut tries = 0;
            while out.len() < s && tries < max_tries {
                tries += 1;
                let mut p = [R::zero(); MAX_DIM];
                let mut rest = R::zero();
                for a in 0..dim {
                    if a != axis {
                        p[a] = unit(rng);
                        rest = rest + n[a] * p[a];
                    }
                }
                let solved = (w - rest) / n[axis];
                if solved >= R::zero() && solved <= R::one() {
                    p[axis] = solved;
                    out.push(p);
                }
            }
        }
        QueryKind::Box => {
            let lo = region.first();
            let hi = region.second();
            // Latin hypercube: stratified per axis with shuffled strata.
            let mut strata: Vec<Vec<u32>> = Vec::with_capacity(dim);
            for _ in 0..dim {
                let mut perm: Vec<u32> = (0..s as u32).collect();
                perm.shuffle(rng);
                strata.push(perm);
            }
            for i in 0..s {
                let mut p = [R::zero(); MAX_DIM];
                for a in 0..dim {
                    let jitter: R = unit(rng);
                    let frac =
                        (R::from_f(strata[a][i] as f64) + jitter) / R::from_f(s as f64);
                    p[a] = lo[a] + (hi[a] - lo[a]) * frac;
                }
                out.push(p);
            }
        }
    }
}

pub fn sample_region<R: Real>(
    rng: &mut impl Rng,
    region: &Region<R>,
    s: usize,
) -> Vec<[R; MAX_DIM]> {
    let mut out = Vec::with_capacity(s);
    sample_region_into(rng, region, s, &mut out);
    out
}

#[inline]
fn clamp01<R: Real>(v: R) -> R {
    v.max(R::zero()).min(R::one())
}

/// Parameter interval `[t0, t1]` (t >= 0) of the ray inside the unit cube,
/// or `None` if it misses.
fn clip_ray_to_unit_cube<R: Real>(origin: &[R], dir: &[R]) -> Option<(R, R)> {
    let mut t0 = R::zero();
    let mut t1 = R::infinity();
    for a in 0..origin.len() {
        let d = dir[a].to_f();
        if d.abs() < 1e-15 {
            let o = origin[a].to_f();
            if !(0.0..=1.0).contains(&o) {
                return None;
            }
        } else {
            let inv = dir[a].recip();
            let mut ta = (R::zero() - origin[a]) * inv;
            let mut tb = (R::one() - origin[a]) * inv;
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
        }
    }
    (t1 >= t0).then_some((t0, t1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn fixed_seed_reproduces_regions() {
        for kind in QueryKind::ALL {
            let a: Region<f64> = uniform_region(&mut stream(5, 0), kind, 3);
            let b: Region<f64> = uniform_region(&mut stream(5, 0), kind, 3);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn box_corner_coordinate_means() {
        // Sorted corners have E[min]=1/3 and E[max]=2/3; their average is
        // E[(u1+u2)/2] = 0.5 with variance 1/24 per axis.
        let n = 100_000;
        let mut rng = stream(6, 0);
        let dim = 2;
        let mut mean = [0.0f64; 2];
        for _ in 0..n {
            let r: Region<f64> = uniform_region(&mut rng, QueryKind::Box, dim);
            for a in 0..dim {
                mean[a] += 0.5 * (r.first()[a] + r.second()[a]);
            }
        }
        let sigma = (1.0f64 / 24.0 / n as f64).sqrt();
        for m in mean {
            let m = m / n as f64;
            assert!((m - 0.5).abs() < 3.0 * sigma, "mean {m}, 3 sigma {}", 3.0 * sigma);
        }
    }

    #[test]
    fn ray_direction_components_have_zero_mean() {
        let n = 100_000;
        let dim = 3;
        let mut rng = stream(7, 0);
        let mut mean = [0.0f64; 3];
        for _ in 0..n {
            let r: Region<f64> = uniform_region(&mut rng, QueryKind::Ray, dim);
            for a in 0..dim {
                mean[a] += r.second()[a];
            }
        }
        // E[d_i^2] = 1/dim on the unit sphere.
        let sigma = (1.0 / dim as f64 / n as f64).sqrt();
        for m in mean {
            let m = m / n as f64;
            assert!(m.abs() < 3.0 * sigma, "mean {m}, 3 sigma {}", 3.0 * sigma);
        }
    }

    #[test]
    fn point_region_returns_the_point() {
        let r = Region::point(&[0.3f64, 0.7]);
        let pts = sample_region(&mut stream(8, 0), &r, 17);
        assert_eq!(pts.len(), 1);
        assert_eq!(&pts[0][..2], &[0.3, 0.7]);
    }

    #[test]
    fn ray_samples_lie_on_the_clipped_segment() {
        // Origin outside the domain; clipped segment is x in [0,1] at y=0.5.
        let r = Region::ray(&[-1.0f64, 0.5], &[1.0, 0.0]).unwrap();
        let pts = sample_region(&mut stream(9, 0), &r, 64);
        assert_eq!(pts.len(), 64);
        for p in &pts {
            assert_eq!(p[1], 0.5);
            assert!((0.0..=1.0).contains(&p[0]));
        }
        // A ray that misses the domain yields no samples.
        let miss = Region::ray(&[-1.0f64, 1.5], &[1.0, 0.0]).unwrap();
        assert!(sample_region(&mut stream(9, 1), &miss, 16).is_empty());
    }

    #[test]
    fn box_samples_stay_inside_the_box() {
        let r = Region::aabox(&[0.2f64, 0.2], &[0.4, 0.4]);
        let pts = sample_region(&mut stream(10, 0), &r, 100);
        assert_eq!(pts.len(), 100);
        for p in &pts {
            assert!((0.2..=0.4).contains(&p[0]) && (0.2..=0.4).contains(&p[1]));
        }
    }

    #[test]
    fn plane_samples_lie_on_the_plane_inside_the_domain() {
        let r = Region::plane(&[0.5f64, 0.5], &[0.8, 0.6]).unwrap();
        let pts = sample_region(&mut stream(11, 0), &r, 64);
        assert!(!pts.is_empty());
        for p in &pts {
            let d = 0.8 / 1.0 * (p[0] - 0.5) + 0.6 * (p[1] - 0.5);
            assert!(d.abs() < 1e-12);
            assert!((0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]));
        }
    }
}
