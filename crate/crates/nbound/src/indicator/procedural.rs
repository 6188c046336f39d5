//! Closed-form indicator shapes, used as test fixtures and as sources for
//! rasterized grids. Boundary points count as inside.

use super::Indicator;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vecn::{self, MAX_DIM};

#[derive(Clone, Debug)]
pub enum ProceduralIndicator<R: Real> {
    /// Closed ball `|x - center| <= radius` (any dimension).
    Disk {
        center: Vec<R>,
        radius: R,
    },
    /// Closed ring `r_inner <= |x - center| <= r_outer` (any dimension).
    Annulus {
        center: Vec<R>,
        r_inner: R,
        r_outer: R,
    },
    /// Closed half-space `normal . x <= offset` (any dimension).
    Halfspace {
        normal: Vec<R>,
        offset: R,
    },
    /// 2D star polygon with `points` tips, vertices alternating between
    /// `r_outer` (tips) and `r_inner` (notches), first tip at angle `phase`.
    Star {
        center: [R; 2],
        points: usize,
        r_inner: R,
        r_outer: R,
        phase: R,
    },
}

impl<R: Real> ProceduralIndicator<R> {
    pub fn disk(center: &[R], radius: R) -> Result<Self> {
        check_dim(center.len())?;
        if radius < R::zero() {
            return Err(Error::Invalid("disk radius must be >= 0".into()));
        }
        Ok(Self::Disk {
            center: center.to_vec(),
            radius,
        })
    }

    pub fn annulus(center: &[R], r_inner: R, r_outer: R) -> Result<Self> {
        check_dim(center.len())?;
        if r_inner < R::zero() || r_outer < r_inner {
            return Err(Error::Invalid("annulus needs 0 <= r_inner <= r_outer".into()));
        }
        Ok(Self::Annulus {
            center: center.to_vec(),
            r_inner,
            r_outer,
        })
    }

    pub fn halfspace(normal: &[R], offset: R) -> Result<Self> {
        check_dim(normal.len())?;
        if vecn::norm2(normal).to_f() < 1e-24 {
            return Err(Error::Invalid("halfspace normal must be nonzero".into()));
        }
        Ok(Self::Halfspace {
            normal: normal.to_vec(),
            offset,
        })
    }

    pub fn star(center: [R; 2], points: usize, r_inner: R, r_outer: R, phase: R) -> Result<Self> {
        if points < 3 {
            return Err(Error::Invalid("star needs at least 3 points".into()));
        }
        if r_inner <= R::zero() || r_outer < r_inner {
            return Err(Error::Invalid("star needs 0 < r_inner <= r_outer".into()));
        }
        Ok(Self::Star {
            center,
            points,
            r_inner,
            r_outer,
            phase,
        })
    }

    /// Polygon vertices of a star, tips and notches alternating.
    fn star_vertices(center: [R; 2], points: usize, r_inner: R, r_outer: R, phase: R) -> Vec<[R; 2]> {
        let n = 2 * points;
        (0..n)
            .map(|i| {
                let ang = phase.to_f() + std::f64::consts::TAU * i as f64 / n as f64;
                let r = if i % 2 == 0 { r_outer } else { r_inner };
                [
                    center[0] + r * R::from_f(ang.cos()),
                    center[1] + r * R::from_f(ang.sin()),
                ]
            })
            .collect()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Invalid(format!("dimension must be 1..={MAX_DIM}")));
    }
    Ok(())
}

/// Even-odd point-in-polygon with inclusive boundary.
fn point_in_polygon<R: Real>(p: [R; 2], verts: &[[R; 2]]) -> bool {
    let (px, py) = (p[0].to_f(), p[1].to_f());
    let mut inside = false;
    let n = verts.len();
    for i in 0..n {
        let (x1, y1) = (verts[i][0].to_f(), verts[i][1].to_f());
        let (x2, y2) = (verts[(i + 1) % n][0].to_f(), verts[(i + 1) % n][1].to_f());
        // On-segment check: collinear and within the segment's bounding box.
        let cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1);
        if cross.abs() < 1e-12
            && px >= x1.min(x2) - 1e-12
            && px <= x1.max(x2) + 1e-12
            && py >= y1.min(y2) - 1e-12
            && py <= y1.max(y2) + 1e-12
        {
            return true;
        }
        if (y1 > py) != (y2 > py) {
            let x_int = x1 + (py - y1) / (y2 - y1) * (x2 - x1);
            if px < x_int {
                inside = !inside;
            }
        }
    }
    inside
}

impl<R: Real> Indicator<R> for ProceduralIndicator<R> {
    fn dim(&self) -> usize {
        match self {
            Self::Disk { center, .. } => center.len(),
            Self::Annulus { center, .. } => center.len(),
            Self::Halfspace { normal, .. } => normal.len(),
            Self::Star { .. } => 2,
        }
    }

    fn eval(&self, x: &[R]) -> bool {
        assert_eq!(x.len(), Indicator::<R>::dim(self), "point dimension mismatch");
        if x.iter().any(|&c| c < R::zero() || c > R::one()) {
            return false;
        }
        match self {
            Self::Disk { center, radius } => {
                let mut d = [R::zero(); MAX_DIM];
                vecn::sub(x, center, &mut d[..x.len()]);
                vecn::norm2(&d[..x.len()]) <= *radius * *radius
            }
            Self::Annulus {
                center,
                r_inner,
                r_outer,
            } => {
                let mut d = [R::zero(); MAX_DIM];
                vecn::sub(x, center, &mut d[..x.len()]);
                let n2 = vecn::norm2(&d[..x.len()]);
                n2 >= *r_inner * *r_inner && n2 <= *r_outer * *r_outer
            }
            Self::Halfspace { normal, offset } => vecn::dot(x, normal) <= *offset,
            Self::Star {
                center,
                points,
                r_inner,
                r_outer,
                phase,
            } => {
                let verts = Self::star_vertices(*center, *points, *r_inner, *r_outer, *phase);
                point_in_polygon([x[0], x[1]], &verts)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfspace_inequality() {
        let h = ProceduralIndicator::halfspace(&[1.0f64, 0.0], 0.5).unwrap();
        assert!(h.eval(&[0.2, 0.9]));
        assert!(!h.eval(&[0.7, 0.1]));
        // boundary is inside
        assert!(h.eval(&[0.5, 0.3]));
    }

    #[test]
    fn disk_boundary_is_inside() {
        let d = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.25).unwrap();
        assert!(d.eval(&[0.75, 0.5]));
        assert!(d.eval(&[0.5, 0.5]));
        assert!(!d.eval(&[0.7501, 0.5]));
    }

    #[test]
    fn annulus_has_a_hole() {
        // Radii chosen exactly representable so the closed boundary is exact.
        let a = ProceduralIndicator::annulus(&[0.5f64, 0.5], 0.25, 0.4).unwrap();
        assert!(!a.eval(&[0.5, 0.5]));
        assert!(a.eval(&[0.5, 0.8]));
        assert!(a.eval(&[0.75, 0.5])); // inner boundary is inside
        assert!(!a.eval(&[0.99, 0.99]));
    }

    #[test]
    fn star_tips_and_notches() {
        // 5-point star, first tip pointing along +x.
        let s = ProceduralIndicator::star([0.5f64, 0.5], 5, 0.14, 0.35, 0.0).unwrap();
        assert!(s.eval(&[0.5, 0.5]));
        // Tip direction: almost at the outer radius.
        assert!(s.eval(&[0.5 + 0.34, 0.5]));
        // Same radius rotated halfway between tips falls in a notch.
        let mid = std::f64::consts::TAU / 10.0;
        assert!(!s.eval(&[0.5 + 0.34 * mid.cos(), 0.5 + 0.34 * mid.sin()]));
        // But close to the center in the notch direction is inside.
        assert!(s.eval(&[0.5 + 0.1 * mid.cos(), 0.5 + 0.1 * mid.sin()]));
    }
}
