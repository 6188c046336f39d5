//! NBM model containers.
//!
//! Layout (all little-endian):
//!
//! ```text
//! "NBM1" | u16 version | u8 method | u8 query | u8 dim | u8 reserved |
//! f64 eps | u64 seed |
//! u32 arch_len | arch bytes |
//! u64 param_count | param_count x f64 |
//! u32 crc32 (IEEE, over everything before it)
//! ```
//!
//! The architecture block is method-specific (layer widths, slab counts,
//! grid resolutions); parameters are always 64-bit reals. Serialization is
//! deterministic, so equal models produce identical bytes, and the CRC is
//! verified before anything is parsed.

use std::path::Path;

use super::{write_atomic, Reader};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Bvh, Ellipsoid, KDop, Oriented, Rotation, Sphere};
use crate::model::{EarlyPredictor, FieldPredictor, MethodKind, Model, NnPredictor};
use crate::nnet::{EarlyExitNet, FieldNet, Mlp, PositionalEncoding, ReluField};
use crate::query::QueryKind;
use crate::scalar::Real;

pub const MAGIC: &[u8; 4] = b"NBM1";
pub const VERSION: u16 = 1;

fn query_tag(kind: QueryKind) -> u8 {
    match kind {
        QueryKind::Point => 0,
        QueryKind::Ray => 1,
        QueryKind::Plane => 2,
        QueryKind::Box => 3,
    }
}

fn query_from_tag(tag: u8) -> Result<QueryKind> {
    Ok(match tag {
        0 => QueryKind::Point,
        1 => QueryKind::Ray,
        2 => QueryKind::Plane,
        3 => QueryKind::Box,
        other => return Err(Error::Invalid(format!("unknown query tag {other}"))),
    })
}

struct Payload {
    arch: Vec<u8>,
    params: Vec<f64>,
}

impl Payload {
    fn new() -> Self {
        Self {
            arch: Vec::new(),
            params: Vec::new(),
        }
    }

    fn push_reals<R: Real>(&mut self, vals: impl IntoIterator<Item = R>) {
        self.params.extend(vals.into_iter().map(|v| v.to_f()));
    }
}

/// Geometric primitives answer any query and carry no trained metadata;
/// their header stores this placeholder query tag and zero eps/seed.
const PRIM_QUERY: QueryKind = QueryKind::Point;

pub fn to_bytes<R: Real>(model: &Model<R>) -> Vec<u8> {
    let mut p = Payload::new();
    let (query, eps, seed, dim) = match model {
        Model::Aabb(b) => {
            p.push_reals(b.lo().iter().copied());
            p.push_reals(b.hi().iter().copied());
            (PRIM_QUERY, 0.0, 0, crate::geometry::Primitive::dim(b))
        }
        Model::Obox(o) => {
            let dim = crate::geometry::Primitive::dim(o);
            for a in 0..dim {
                p.push_reals(o.rotation.row(a).iter().copied());
            }
            p.push_reals(o.base.lo().iter().copied());
            p.push_reals(o.base.hi().iter().copied());
            (PRIM_QUERY, 0.0, 0, dim)
        }
        Model::Sphere(s) => {
            p.push_reals(s.center().iter().copied());
            p.push_reals([s.radius()]);
            (PRIM_QUERY, 0.0, 0, crate::geometry::Primitive::dim(s))
        }
        Model::AaElli(e) => {
            p.push_reals(e.center().iter().copied());
            p.push_reals(e.radii().iter().copied());
            (PRIM_QUERY, 0.0, 0, crate::geometry::Primitive::dim(e))
        }
        Model::OElli(o) => {
            let dim = crate::geometry::Primitive::dim(o);
            for a in 0..dim {
                p.push_reals(o.rotation.row(a).iter().copied());
            }
            p.push_reals(o.base.center().iter().copied());
            p.push_reals(o.base.radii().iter().copied());
            (PRIM_QUERY, 0.0, 0, dim)
        }
        Model::Kdop(k) | Model::KdopOpt(k) => {
            let dim = crate::geometry::Primitive::dim(k);
            p.arch
                .extend_from_slice(&(k.n_directions() as u32).to_le_bytes());
            p.push_reals(k.directions_flat().iter().copied());
            for &(lo, hi) in k.intervals() {
                p.push_reals([lo, hi]);
            }
            (PRIM_QUERY, 0.0, 0, dim)
        }
        Model::Bvh(b) => {
            let dim = crate::geometry::Primitive::dim(b);
            p.arch
                .extend_from_slice(&(b.n_leaves() as u32).to_le_bytes());
            p.arch
                .extend_from_slice(&(b.leaf_size() as u32).to_le_bytes());
            for leaf in b.leaves() {
                p.push_reals(leaf.lo().iter().copied());
                p.push_reals(leaf.hi().iter().copied());
            }
            (PRIM_QUERY, 0.0, 0, dim)
        }
        Model::Nn(nn) => {
            encode_mlp_arch(&mut p.arch, &nn.net);
            p.push_reals(nn.net.params().iter().copied());
            (nn.query, nn.eps.to_f(), nn.seed, nn.dim)
        }
        Model::NnEarly(nn) => {
            encode_mlp_arch(&mut p.arch, nn.net.late());
            p.push_reals(nn.net.late().params().iter().copied());
            p.push_reals(nn.net.early().params().iter().copied());
            (nn.query, nn.eps.to_f(), nn.seed, nn.dim)
        }
        Model::ReluField(f) => {
            p.arch.push(f.field.resolution().len() as u8);
            for &r in f.field.resolution() {
                p.arch.extend_from_slice(&(r as u32).to_le_bytes());
            }
            p.push_reals(f.field.values().iter().copied());
            (f.query, f.eps.to_f(), f.seed, f.dim)
        }
    };

    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(model.method().tag());
    out.push(query_tag(query));
    out.push(dim as u8);
    out.push(0);
    out.extend_from_slice(&eps.to_le_bytes());
    out.extend_from_slice(&seed.to_le_bytes());
    out.extend_from_slice(&(p.arch.len() as u32).to_le_bytes());
    out.extend_from_slice(&p.arch);
    out.extend_from_slice(&(p.params.len() as u64).to_le_bytes());
    for v in &p.params {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

fn encode_mlp_arch<R: Real>(arch: &mut Vec<u8>, net: &Mlp<R>) {
    arch.push(net.encoding().map(|pe| pe.depth() as u8).unwrap_or(0));
    arch.push(net.dims().len() as u8);
    for &d in net.dims() {
        arch.extend_from_slice(&(d as u32).to_le_bytes());
    }
    arch.extend_from_slice(&net.omega().to_f().to_le_bytes());
}

struct ArchReader<'a>(Reader<'a>);

impl ArchReader<'_> {
    fn mlp_arch(&mut self) -> Result<(usize, Vec<usize>, f64)> {
        let pe_depth = self.0.u8()? as usize;
        let n_dims = self.0.u8()? as usize;
        if n_dims < 2 {
            return Err(Error::Invalid("network needs at least two widths".into()));
        }
        let mut dims = Vec::with_capacity(n_dims);
        for _ in 0..n_dims {
            dims.push(self.0.u32()? as usize);
        }
        let omega = self.0.f64()?;
        Ok((pe_depth, dims, omega))
    }
}

pub fn from_bytes<R: Real>(bytes: &[u8]) -> Result<Model<R>> {
    if bytes.len() < 4 {
        return Err(Error::Truncated {
            needed: 4 - bytes.len(),
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::BadMagic { expected: "NBM1" });
    }
    if bytes.len() < 14 {
        return Err(Error::Truncated {
            needed: 14 - bytes.len(),
        });
    }
    // CRC over everything except the trailing checksum, verified first.
    let body = &bytes[..bytes.len() - 4];
    let stored = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }

    let mut r = Reader::new(body);
    r.take(4)?;
    let version = r.u16()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let method = MethodKind::from_tag(r.u8()?)?;
    let query = query_from_tag(r.u8()?)?;
    let dim = r.u8()? as usize;
    r.u8()?; // reserved
    if dim == 0 || dim > crate::vecn::MAX_DIM {
        return Err(Error::Invalid(format!("unsupported dimension {dim}")));
    }
    let eps = r.f64()?;
    let seed = r.u64()?;
    let arch_len = r.u32()? as usize;
    let arch_bytes = r.take(arch_len)?;
    let param_count = r.u64()? as usize;
    if param_count > (1 << 28) {
        return Err(Error::Invalid("parameter payload too large".into()));
    }
    match r.remaining().cmp(&(param_count * 8)) {
        std::cmp::Ordering::Less => {
            return Err(Error::Truncated {
                needed: param_count * 8 - r.remaining(),
            })
        }
        std::cmp::Ordering::Greater => {
            return Err(Error::LengthMismatch {
                expected: param_count * 8,
                got: r.remaining(),
            })
        }
        std::cmp::Ordering::Equal => {}
    }
    let mut params = Vec::with_capacity(param_count);
    for _ in 0..param_count {
        params.push(r.f64()?);
    }

    let mut arch = ArchReader(Reader::new(arch_bytes));
    let mut take = TakeParams::new(&params);
    let eps_r = R::from_f(eps);

    let model = match method {
        MethodKind::Aabb => Model::Aabb(read_aabb(&mut take, dim)?),
        MethodKind::Obox => {
            let rotation = read_rotation(&mut take, dim)?;
            let base = read_aabb(&mut take, dim)?;
            Model::Obox(Oriented { rotation, base })
        }
        MethodKind::Sphere => {
            let center = take.reals::<R>(dim)?;
            let radius = take.reals::<R>(1)?[0];
            Model::Sphere(Sphere::new(&center, radius)?)
        }
        MethodKind::AaElli => {
            let center = take.reals::<R>(dim)?;
            let radii = take.reals::<R>(dim)?;
            Model::AaElli(Ellipsoid::new(&center, &radii)?)
        }
        MethodKind::OElli => {
            let rotation = read_rotation(&mut take, dim)?;
            let center = take.reals::<R>(dim)?;
            let radii = take.reals::<R>(dim)?;
            Model::OElli(Oriented {
                rotation,
                base: Ellipsoid::new(&center, &radii)?,
            })
        }
        MethodKind::Kdop | MethodKind::KdopOpt => {
            let n_dirs = arch.0.u32()? as usize;
            let dirs = take.reals::<R>(n_dirs * dim)?;
            let mut intervals = Vec::with_capacity(n_dirs);
            for _ in 0..n_dirs {
                let pair = take.reals::<R>(2)?;
                intervals.push((pair[0], pair[1]));
            }
            let kdop = KDop::new(dim, dirs, intervals)?;
            if method == MethodKind::Kdop {
                Model::Kdop(kdop)
            } else {
                Model::KdopOpt(kdop)
            }
        }
        MethodKind::Bvh => {
            let n_leaves = arch.0.u32()? as usize;
            let leaf_size = arch.0.u32()? as usize;
            let mut leaves = Vec::with_capacity(n_leaves);
            for _ in 0..n_leaves {
                let lo = take.reals::<R>(dim)?;
                let hi = take.reals::<R>(dim)?;
                leaves.push(Aabb::new(&lo, &hi)?);
            }
            Model::Bvh(Bvh::from_sorted_leaves(dim, leaves, leaf_size)?)
        }
        MethodKind::Nn => {
            let (pe_depth, dims, omega) = arch.mlp_arch()?;
            let net =
                build_mlp::<R>(&dims, omega, pe_depth, take.reals::<R>(count_params(&dims))?)?;
            Model::Nn(NnPredictor {
                net,
                dim,
                query,
                eps: eps_r,
                seed,
            })
        }
        MethodKind::NnEarly => {
            let (pe_depth, late_dims, omega) = arch.mlp_arch()?;
            let late = build_mlp::<R>(
                &late_dims,
                omega,
                pe_depth,
                take.reals::<R>(count_params(&late_dims))?,
            )?;
            let early_dims = [query.encoded_len(dim), 1];
            let early = build_mlp::<R>(
                &early_dims,
                omega,
                0,
                take.reals::<R>(count_params(&early_dims))?,
            )?;
            Model::NnEarly(EarlyPredictor {
                net: EarlyExitNet::new(early, late),
                dim,
                query,
                eps: eps_r,
                seed,
            })
        }
        MethodKind::ReluField => {
            let n_axes = arch.0.u8()? as usize;
            if n_axes == 0 || n_axes > 8 {
                return Err(Error::Invalid(format!("bad grid axis count {n_axes}")));
            }
            let mut resolution = Vec::with_capacity(n_axes);
            for _ in 0..n_axes {
                resolution.push(arch.0.u32()? as usize);
            }
            let n: usize = resolution.iter().product();
            let field = ReluField::from_values(&resolution, take.reals::<R>(n)?);
            Model::ReluField(FieldPredictor {
                field,
                dim,
                query,
                eps: eps_r,
                seed,
            })
        }
    };
    take.finish()?;
    if arch.0.remaining() != 0 {
        return Err(Error::LengthMismatch {
            expected: arch.0.pos(),
            got: arch.0.pos() + arch.0.remaining(),
        });
    }
    Ok(model)
}

fn count_params(dims: &[usize]) -> usize {
    dims.windows(2).map(|w| (w[0] + 1) * w[1]).sum()
}

fn build_mlp<R: Real>(
    dims: &[usize],
    omega: f64,
    pe_depth: usize,
    params: Vec<R>,
) -> Result<Mlp<R>> {
    if dims.len() < 2 || *dims.last().unwrap() != 1 {
        return Err(Error::Invalid("malformed network widths".into()));
    }
    if pe_depth > 0 && (pe_depth % 2 != 0 || dims[0] % (1 + pe_depth) != 0) {
        return Err(Error::Invalid("malformed positional encoding depth".into()));
    }
    let encoding = (pe_depth > 0).then(|| PositionalEncoding::new(pe_depth));
    let mut net = Mlp::zeroed(dims, R::from_f(omega), encoding);
    net.params_mut().copy_from_slice(&params);
    Ok(net)
}

struct TakeParams<'a> {
    params: &'a [f64],
    pos: usize,
}

impl<'a> TakeParams<'a> {
    fn new(params: &'a [f64]) -> Self {
        Self { params, pos: 0 }
    }

    fn reals<R: Real>(&mut self, n: usize) -> Result<Vec<R>> {
        if self.params.len() - self.pos < n {
            return Err(Error::Truncated {
                needed: (n - (self.params.len() - self.pos)) * 8,
            });
        }
        let out = self.params[self.pos..self.pos + n]
            .iter()
            .map(|&v| R::from_f(v))
            .collect();
        self.pos += n;
        Ok(out)
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.params.len() {
            return Err(Error::LengthMismatch {
                expected: self.pos * 8,
                got: self.params.len() * 8,
            });
        }
        Ok(())
    }
}

fn read_aabb<R: Real>(take: &mut TakeParams, dim: usize) -> Result<Aabb<R>> {
    let lo = take.reals::<R>(dim)?;
    let hi = take.reals::<R>(dim)?;
    Aabb::new(&lo, &hi)
}

fn read_rotation<R: Real>(take: &mut TakeParams, dim: usize) -> Result<Rotation<R>> {
    let mut rows = Vec::with_capacity(dim);
    for _ in 0..dim {
        rows.push(take.reals::<R>(dim)?);
    }
    Rotation::from_rows(&rows)
}

pub fn save_model<R: Real>(model: &Model<R>, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &to_bytes(model))
}

pub fn load_model<R: Real>(path: impl AsRef<Path>) -> Result<Model<R>> {
    from_bytes(&std::fs::read(path)?)
}
