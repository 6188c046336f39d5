//! The unified bounding-model surface: anything that answers
//! `test(region) -> {0,1}`, from closed-form primitives to trained nets,
//! behind one enum so evaluation and the CLI stay method-agnostic.

use crate::geometry::{Aabb, Bvh, Ellipsoid, KDop, Obb, OrientedEllipsoid, Primitive};
use crate::nnet::{threshold_hit, EarlyExitNet, Exit, FieldNet, Mlp, ReluField};
use crate::query::{QueryKind, Region};
use crate::scalar::Real;

/// Stateful per-thread tester; call it once per query.
pub type BoxTester<'a, R> = Box<dyn FnMut(&Region<R>) -> bool + Send + 'a>;

/// A conservative (or inverse-conservative) bounding predictor.
pub trait BoundingModel<R: Real>: Send + Sync {
    fn dim(&self) -> usize;

    /// `None` means the model answers every query kind (geometric
    /// primitives); trained models answer exactly one.
    fn query_kind(&self) -> Option<QueryKind> {
        None
    }

    /// A reusable tester owning whatever scratch the model needs, so bulk
    /// evaluation does not allocate per query.
    fn tester(&self) -> BoxTester<'_, R>;

    /// One-off convenience test.
    fn test(&self, region: &Region<R>) -> bool {
        (self.tester())(region)
    }
}

macro_rules! primitive_bounding_model {
    ($($ty:ty),+) => {$(
        impl<R: Real> BoundingModel<R> for $ty {
            fn dim(&self) -> usize {
                Primitive::dim(self)
            }
            fn tester(&self) -> BoxTester<'_, R> {
                Box::new(move |r| Primitive::test(self, r))
            }
        }
    )+};
}

primitive_bounding_model!(Aabb<R>, Ellipsoid<R>, Obb<R>, OrientedEllipsoid<R>, KDop<R>, Bvh<R>);

impl<R: Real> BoundingModel<R> for crate::geometry::Sphere<R> {
    fn dim(&self) -> usize {
        Primitive::dim(self)
    }
    fn tester(&self) -> BoxTester<'_, R> {
        Box::new(move |r| Primitive::test(self, r))
    }
}

/// Method families, as they appear in CLI flags, file tags and reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MethodKind {
    Aabb,
    Obox,
    Sphere,
    AaElli,
    OElli,
    Kdop,
    Bvh,
    KdopOpt,
    Nn,
    NnEarly,
    ReluField,
}

impl MethodKind {
    pub const CLASSIC: [MethodKind; 7] = [
        Self::Aabb,
        Self::Obox,
        Self::Sphere,
        Self::AaElli,
        Self::OElli,
        Self::Kdop,
        Self::Bvh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Aabb => "aabb",
            Self::Obox => "obox",
            Self::Sphere => "sphere",
            Self::AaElli => "aaelli",
            Self::OElli => "oelli",
            Self::Kdop => "kdop",
            Self::Bvh => "bvh",
            Self::KdopOpt => "kdop-opt",
            Self::Nn => "nn",
            Self::NnEarly => "nn-early",
            Self::ReluField => "relufield",
        }
    }

    pub fn parse(s: &str) -> crate::Result<Self> {
        Ok(match s {
            "aabb" => Self::Aabb,
            "obox" => Self::Obox,
            "sphere" => Self::Sphere,
            "aaelli" => Self::AaElli,
            "oelli" => Self::OElli,
            "kdop" => Self::Kdop,
            "bvh" => Self::Bvh,
            "kdop-opt" => Self::KdopOpt,
            "nn" => Self::Nn,
            "nn-early" => Self::NnEarly,
            "relufield" => Self::ReluField,
            other => {
                return Err(crate::Error::Invalid(format!("unknown method '{other}'")))
            }
        })
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            Self::Aabb => 0,
            Self::Obox => 1,
            Self::Sphere => 2,
            Self::AaElli => 3,
            Self::OElli => 4,
            Self::Kdop => 5,
            Self::Bvh => 6,
            Self::KdopOpt => 7,
            Self::Nn => 8,
            Self::NnEarly => 9,
            Self::ReluField => 10,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> crate::Result<Self> {
        Ok(match tag {
            0 => Self::Aabb,
            1 => Self::Obox,
            2 => Self::Sphere,
            3 => Self::AaElli,
            4 => Self::OElli,
            5 => Self::Kdop,
            6 => Self::Bvh,
            7 => Self::KdopOpt,
            8 => Self::Nn,
            9 => Self::NnEarly,
            10 => Self::ReluField,
            other => {
                return Err(crate::Error::Invalid(format!("unknown method tag {other}")))
            }
        })
    }
}

impl std::fmt::Display for MethodKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Trained MLP bound to one query kind, with its decision shift and the
/// seed it was initialized from. `eps` is negative for inverted models.
#[derive(Clone, Debug, PartialEq)]
pub struct NnPredictor<R: Real> {
    pub net: Mlp<R>,
    pub dim: usize,
    pub query: QueryKind,
    pub eps: R,
    pub seed: u64,
}

impl<R: Real> NnPredictor<R> {
    fn check(&self, region: &Region<R>) {
        assert_eq!(region.kind(), self.query, "query kind mismatch");
        assert_eq!(region.dim(), self.dim, "region dimension mismatch");
    }
}

impl<R: Real> BoundingModel<R> for NnPredictor<R> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn query_kind(&self) -> Option<QueryKind> {
        Some(self.query)
    }
    fn tester(&self) -> BoxTester<'_, R> {
        let mut scratch = self.net.make_scratch();
        let mut enc: Vec<R> = Vec::new();
        Box::new(move |r| {
            self.check(r);
            r.encode_into(&mut enc);
            threshold_hit(self.net.forward(&enc, &mut scratch), self.eps)
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EarlyPredictor<R: Real> {
    pub net: EarlyExitNet<R>,
    pub dim: usize,
    pub query: QueryKind,
    pub eps: R,
    pub seed: u64,
}

impl<R: Real> EarlyPredictor<R> {
    /// Prediction plus which exit answered, for cost accounting.
    pub fn predict_with_exit(&self, region: &Region<R>) -> (bool, Exit) {
        let mut scratch = self.net.make_scratch();
        let enc = region.encode();
        self.net.predict(&enc, self.eps, &mut scratch)
    }
}

impl<R: Real> BoundingModel<R> for EarlyPredictor<R> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn query_kind(&self) -> Option<QueryKind> {
        Some(self.query)
    }
    fn tester(&self) -> BoxTester<'_, R> {
        let mut scratch = self.net.make_scratch();
        let mut enc: Vec<R> = Vec::new();
        Box::new(move |r| {
            assert_eq!(r.kind(), self.query, "query kind mismatch");
            assert_eq!(r.dim(), self.dim, "region dimension mismatch");
            r.encode_into(&mut enc);
            self.net.predict(&enc, self.eps, &mut scratch).0
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldPredictor<R: Real> {
    pub field: ReluField<R>,
    pub dim: usize,
    pub query: QueryKind,
    pub eps: R,
    pub seed: u64,
}

impl<R: Real> BoundingModel<R> for FieldPredictor<R> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn query_kind(&self) -> Option<QueryKind> {
        Some(self.query)
    }
    fn tester(&self) -> BoxTester<'_, R> {
        let mut scratch = self.field.make_scratch();
        let mut enc: Vec<R> = Vec::new();
        Box::new(move |r| {
            assert_eq!(r.kind(), self.query, "query kind mismatch");
            assert_eq!(r.dim(), self.dim, "region dimension mismatch");
            r.encode_into(&mut enc);
            threshold_hit(self.field.forward(&enc, &mut scratch), self.eps)
        })
    }
}

/// Any persistable bounding model; the NBM container stores exactly this.
#[derive(Clone, Debug)]
pub enum Model<R: Real> {
    Aabb(Aabb<R>),
    Obox(Obb<R>),
    Sphere(crate::geometry::Sphere<R>),
    AaElli(Ellipsoid<R>),
    OElli(OrientedEllipsoid<R>),
    Kdop(KDop<R>),
    KdopOpt(KDop<R>),
    Bvh(Bvh<R>),
    Nn(NnPredictor<R>),
    NnEarly(EarlyPredictor<R>),
    ReluField(FieldPredictor<R>),
}

impl<R: Real> Model<R> {
    pub fn method(&self) -> MethodKind {
        match self {
            Self::Aabb(_) => MethodKind::Aabb,
            Self::Obox(_) => MethodKind::Obox,
            Self::Sphere(_) => MethodKind::Sphere,
            Self::AaElli(_) => MethodKind::AaElli,
            Self::OElli(_) => MethodKind::OElli,
            Self::Kdop(_) => MethodKind::Kdop,
            Self::KdopOpt(_) => MethodKind::KdopOpt,
            Self::Bvh(_) => MethodKind::Bvh,
            Self::Nn(_) => MethodKind::Nn,
            Self::NnEarly(_) => MethodKind::NnEarly,
            Self::ReluField(_) => MethodKind::ReluField,
        }
    }

    fn inner(&self) -> &dyn BoundingModel<R> {
        match self {
            Self::Aabb(p) => p,
            Self::Obox(p) => p,
            Self::Sphere(p) => p,
            Self::AaElli(p) => p,
            Self::OElli(p) => p,
            Self::Kdop(p) => p,
            Self::KdopOpt(p) => p,
            Self::Bvh(p) => p,
            Self::Nn(p) => p,
            Self::NnEarly(p) => p,
            Self::ReluField(p) => p,
        }
    }
}

impl<R: Real> BoundingModel<R> for Model<R> {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn query_kind(&self) -> Option<QueryKind> {
        self.inner().query_kind()
    }
    fn tester(&self) -> BoxTester<'_, R> {
        self.inner().tester()
    }
    fn test(&self, region: &Region<R>) -> bool {
        self.inner().test(region)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fit_aabb;
    use crate::indicator::{GridIndicator, ProceduralIndicator};

    #[test]
    fn primitives_answer_every_query_kind() {
        let disk = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.3).unwrap();
        let g = GridIndicator::rasterize(&disk, &[16, 16]).unwrap();
        let aabb = fit_aabb::<f64>(&g).unwrap();
        let model = Model::Aabb(aabb);
        assert_eq!(model.query_kind(), None);
        assert!(model.test(&Region::point(&[0.5, 0.5])));
        assert!(!model.test(&Region::point(&[0.02, 0.02])));
    }

    #[test]
    fn nn_predictor_applies_the_threshold_shift() {
        // A zeroed net outputs exactly 0.5: positive with +eps, negative
        // with -eps (inverted convention).
        let net = Mlp::<f64>::zeroed(&[2, 1], 1.0, None);
        let mk = |eps: f64| NnPredictor {
            net: net.clone(),
            dim: 2,
            query: QueryKind::Point,
            eps,
            seed: 0,
        };
        let r = Region::point(&[0.3f64, 0.3]);
        assert!(mk(1e-5).test(&r));
        assert!(!mk(-1e-5).test(&r));
    }

    #[test]
    fn method_tags_round_trip() {
        for m in [
            MethodKind::Aabb,
            MethodKind::Obox,
            MethodKind::Sphere,
            MethodKind::AaElli,
            MethodKind::OElli,
            MethodKind::Kdop,
            MethodKind::Bvh,
            MethodKind::KdopOpt,
            MethodKind::Nn,
            MethodKind::NnEarly,
            MethodKind::ReluField,
        ] {
            assert_eq!(MethodKind::from_tag(m.tag()).unwrap(), m);
            assert_eq!(MethodKind::parse(m.as_str()).unwrap(), m);
        }
        assert!(MethodKind::parse("cube").is_err());
    }
}
