//! NBG indicator grid files.
//!
//! Layout: magic `"NBG1"` | `u8` dim | dim x `u32` little-endian shape
//! (axis 0 first) | payload of `ceil(cells/8)` bytes where bit `i`
//! (LSB-first within a byte) is cell `i` in row-major order.

use std::path::Path;

use super::{write_atomic, Reader};
use crate::error::{Error, Result};
use crate::indicator::GridIndicator;

pub const MAGIC: &[u8; 4] = b"NBG1";

pub fn to_bytes(grid: &GridIndicator) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 1 + 4 * grid.dim() + grid.packed_bits().len());
    out.extend_from_slice(MAGIC);
    out.push(grid.dim() as u8);
    for &s in grid.shape() {
        out.extend_from_slice(&(s as u32).to_le_bytes());
    }
    out.extend_from_slice(grid.packed_bits());
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<GridIndicator> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != MAGIC {
        return Err(Error::BadMagic { expected: "NBG1" });
    }
    let dim = r.u8()? as usize;
    if dim == 0 || dim > crate::vecn::MAX_DIM {
        return Err(Error::Invalid(format!("unsupported grid dimension {dim}")));
    }
    let mut shape = Vec::with_capacity(dim);
    for _ in 0..dim {
        shape.push(r.u32()? as usize);
    }
    let n_cells: usize = shape.iter().product();
    let payload_len = n_cells.div_ceil(8);
    if r.remaining() < payload_len {
        return Err(Error::Truncated {
            needed: payload_len - r.remaining(),
        });
    }
    if r.remaining() > payload_len {
        return Err(Error::LengthMismatch {
            expected: payload_len,
            got: r.remaining(),
        });
    }
    GridIndicator::from_packed(&shape, r.take(payload_len)?.to_vec())
}

pub fn save_grid(grid: &GridIndicator, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &to_bytes(grid))
}

pub fn load_grid(path: impl AsRef<Path>) -> Result<GridIndicator> {
    from_bytes(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicator::{Indicator, ProceduralIndicator};

    #[test]
    fn save_load_is_byte_identical() {
        let disk = ProceduralIndicator::disk(&[0.5f64, 0.5], 0.3).unwrap();
        let grid = GridIndicator::rasterize(&disk, &[32, 32]).unwrap();
        let bytes = to_bytes(&grid);
        let reloaded = from_bytes(&bytes).unwrap();
        assert_eq!(grid, reloaded);
        assert_eq!(to_bytes(&reloaded), bytes);
    }

    #[test]
    fn empty_grid_round_trips_to_zero_cells() {
        let grid = GridIndicator::zeros(&[2, 2]).unwrap();
        let got = from_bytes(&to_bytes(&grid)).unwrap();
        assert_eq!(got.occupied_count(), 0);
        assert_eq!(got.n_cells(), 4);
    }

    #[test]
    fn header_payload_length_is_enforced() {
        // dim=3, shape 32^3 -> 32768 cells -> 4096 payload bytes
        let grid = GridIndicator::zeros(&[32, 32, 32]).unwrap();
        let bytes = to_bytes(&grid);
        assert_eq!(bytes.len(), 4 + 1 + 12 + 4096);
        assert!(from_bytes(&bytes).is_ok());

        let mut truncated = bytes.clone();
        truncated.pop();
        assert!(matches!(
            from_bytes(&truncated),
            Err(Error::Truncated { .. })
        ));

        let mut padded = bytes.clone();
        padded.push(0);
        assert!(matches!(
            from_bytes(&padded),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn bad_magic_is_rejected() {
        let grid = GridIndicator::zeros(&[4, 4]).unwrap();
        let mut bytes = to_bytes(&grid);
        bytes[0] = b'X';
        assert!(matches!(from_bytes(&bytes), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn nonzero_padding_bits_are_rejected() {
        let grid = GridIndicator::zeros(&[3, 3]).unwrap(); // 9 cells, 2 bytes
        let mut bytes = to_bytes(&grid);
        let last = bytes.len() - 1;
        bytes[last] |= 0b1000_0000; // bit 15 is past cell 8
        assert!(from_bytes(&bytes).is_err());
    }

    #[test]
    fn atomic_save_creates_file_with_exact_bytes() {
        let dir = std::env::temp_dir().join(format!("nbg-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("grid.nbg");
        let mut grid = GridIndicator::zeros(&[4, 4]).unwrap();
        grid.set(&[1, 1], true);
        save_grid(&grid, &path).unwrap();
        let loaded = load_grid(&path).unwrap();
        assert!(Indicator::<f64>::eval(&loaded, &[0.3, 0.3]));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
