//! Query regions, uniform query sampling, region point sampling and the
//! ground-truth query oracle.
//!
//! A query asks: does this point / ray / plane / box intersect the object?
//! The oracle answers by sampling points across the region and OR-ing the
//! indicator — conservative in expectation, exact for point queries.

mod oracle;
mod sample;

pub use oracle::QueryOracle;
pub use sample::{sample_region, sample_region_into, uniform_region};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vecn::{self, MAX_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Point,
    Ray,
    Plane,
    Box,
}

impl QueryKind {
    pub const ALL: [QueryKind; 4] = [Self::Point, Self::Ray, Self::Plane, Self::Box];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Point => "point",
            Self::Ray => "ray",
            Self::Plane => "plane",
            Self::Box => "box",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "point" => Ok(Self::Point),
            "ray" => Ok(Self::Ray),
            "plane" => Ok(Self::Plane),
            "box" => Ok(Self::Box),
            other => Err(Error::Invalid(format!("unknown query type '{other}'"))),
        }
    }

    /// Length of the flat model input encoding a region of this kind.
    pub fn encoded_len(self, dim: usize) -> usize {
        match self {
            Self::Point => dim,
            _ => 2 * dim,
        }
    }
}

impl std::fmt::Display for QueryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tagged query geometry. Coordinate records are fixed-length:
/// one n-vector for points, two for rays (origin + unit direction),
/// planes (p0 + unit normal) and boxes (min + max corner).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region<R: Real> {
    kind: QueryKind,
    dim: u8,
    a: [R; MAX_DIM],
    b: [R; MAX_DIM],
}

impl<R: Real> Region<R> {
    pub fn point(p: &[R]) -> Self {
        check_dim(p.len());
        Self {
            kind: QueryKind::Point,
            dim: p.len() as u8,
            a: vecn::pad(p),
            b: [R::zero(); MAX_DIM],
        }
    }

    /// Direction is normalized on construction; a zero direction is an error.
    pub fn ray(origin: &[R], dir: &[R]) -> Result<Self> {
        check_dim(origin.len());
        assert_eq!(origin.len(), dir.len(), "origin/direction dimension mismatch");
        let n = vecn::norm(dir);
        if n.to_f() < 1e-12 {
            return Err(Error::Invalid("ray direction must have nonzero norm".into()));
        }
        let mut d = vecn::pad(dir);
        for v in d.iter_mut().take(dir.len()) {
            *v = *v / n;
        }
        Ok(Self {
            kind: QueryKind::Ray,
            dim: origin.len() as u8,
            a: vecn::pad(origin),
            b: d,
        })
    }

    /// Normal is normalized on construction; a zero normal is an error.
    pub fn plane(p0: &[R], normal: &[R]) -> Result<Self> {
        check_dim(p0.len());
        assert_eq!(p0.len(), normal.len(), "p0/normal dimension mismatch");
        let n = vecn::norm(normal);
        if n.to_f() < 1e-12 {
            return Err(Error::Invalid("plane normal must have nonzero norm".into()));
        }
        let mut u = vecn::pad(normal);
        for v in u.iter_mut().take(normal.len()) {
            *v = *v / n;
        }
        Ok(Self {
            kind: QueryKind::Plane,
            dim: p0.len() as u8,
            a: vecn::pad(p0),
            b: u,
        })
    }

    /// Corners are sorted componentwise into (min, max).
    pub fn aabox(c0: &[R], c1: &[R]) -> Self {
        check_dim(c0.len());
        assert_eq!(c0.len(), c1.len(), "corner dimension mismatch");
        let mut lo = vecn::pad(c0);
        let mut hi = vecn::pad(c1);
        for i in 0..c0.len() {
            if lo[i] > hi[i] {
                std::mem::swap(&mut lo[i], &mut hi[i]);
            }
        }
        Self {
            kind: QueryKind::Box,
            dim: c0.len() as u8,
            a: lo,
            b: hi,
        }
    }

    pub fn kind(&self) -> QueryKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// First coordinate record: the point / ray origin / plane p0 / box min.
    pub fn first(&self) -> &[R] {
        &self.a[..self.dim as usize]
    }

    /// Second coordinate record: ray direction / plane normal / box max.
    pub fn second(&self) -> &[R] {
        &self.b[..self.dim as usize]
    }

    /// Flat model input: n reals for points, 2n for extended queries.
    pub fn encode_into(&self, out: &mut Vec<R>) {
        out.clear();
        out.extend_from_slice(self.first());
        if self.kind != QueryKind::Point {
            out.extend_from_slice(self.second());
        }
    }

    pub fn encode(&self) -> Vec<R> {
        let mut v = Vec::with_capacity(self.kind.encoded_len(self.dim()));
        self.encode_into(&mut v);
        v
    }
}

fn check_dim(dim: usize) {
    assert!(
        dim >= 1 && dim <= MAX_DIM,
        "region dimension must be 1..={MAX_DIM}, got {dim}"
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_direction_is_normalized() {
        let r = Region::ray(&[0.0f64, 0.0], &[3.0, 4.0]).unwrap();
        assert!((r.second()[0] - 0.6).abs() < 1e-15);
        assert!((r.second()[1] - 0.8).abs() < 1e-15);
        assert!(Region::ray(&[0.0f64, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn box_corners_are_sorted() {
        let r = Region::aabox(&[0.8f64, 0.1], &[0.2, 0.9]);
        assert_eq!(r.first(), &[0.2, 0.1]);
        assert_eq!(r.second(), &[0.8, 0.9]);
    }

    #[test]
    fn encoding_lengths() {
        let p = Region::point(&[0.1f64, 0.2, 0.3]);
        assert_eq!(p.encode(), vec![0.1, 0.2, 0.3]);
        let b = Region::aabox(&[0.0f64, 0.0], &[1.0, 1.0]);
        assert_eq!(b.encode().len(), 4);
        assert_eq!(QueryKind::Ray.encoded_len(3), 6);
    }
}
