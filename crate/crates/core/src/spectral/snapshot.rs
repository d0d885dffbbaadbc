//! Binary field snapshot container.
//!
//! All integers and floats are little-endian.
//!
//! | offset | size      | content                                        |
//! |--------|-----------|------------------------------------------------|
//! | 0      | 8         | magic `NSCSNAP\0`                              |
//! | 8      | 4 (u32)   | format version, currently 1                    |
//! | 12     | 4 (u32)   | reserved, 0                                    |
//! | 16     | 24 (f64)  | periods `L₁, L₂, L₃`                           |
//! | 40     | 24 (u64)  | mode counts `N₁, N₂, N₃`                       |
//! | 64     | 8 (f64)   | snapshot time                                  |
//! | 72     | 3·16·N    | components `û¹, û², û³`, each as `(re, im)` pairs |
//!
//! Within a component the coefficients run in ascending integer mode order
//! `k = −N/2, …, N/2−1` on every axis, with `k₁` slowest and `k₃` fastest.

use std::io::{Read, Write};
use std::sync::Arc;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::{FrequencyLattice, SpectralVectorField};

pub const MAGIC: &[u8; 8] = b"NSCSNAP\0";
pub const VERSION: u32 = 1;

/// Storage indices in file order (ascending `k`, `k₁` slowest).
fn file_order(lattice: &FrequencyLattice) -> impl Iterator<Item = usize> + '_ {
    let [n1, n2, n3] = lattice.counts();
    let shift = |i: usize, n: usize| (i + n / 2) % n;
    (0..n1).flat_map(move |a| {
        (0..n2).flat_map(move |b| {
            (0..n3).map(move |c| lattice.index([shift(a, n1), shift(b, n2), shift(c, n3)]))
        })
    })
}

pub fn write_snapshot<W: Write>(mut w: W, field: &SpectralVectorField, time: f64) -> Result<()> {
    let lat = field.lattice();
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    w.write_u32::<LittleEndian>(0)?;
    for l in lat.periods() {
        w.write_f64::<LittleEndian>(l)?;
    }
    for n in lat.counts() {
        w.write_u64::<LittleEndian>(n as u64)?;
    }
    w.write_f64::<LittleEndian>(time)?;
    for c in 0..3 {
        let comp = field.component(c);
        for idx in file_order(lat) {
            w.write_f64::<LittleEndian>(comp[idx].re)?;
            w.write_f64::<LittleEndian>(comp[idx].im)?;
        }
    }
    Ok(())
}

/// Reads a snapshot, returning the field (on a fresh lattice) and its time.
pub fn read_snapshot<R: Read>(mut r: R) -> Result<(SpectralVectorField, f64)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let _reserved = r.read_u32::<LittleEndian>()?;
    let mut periods = [0.0; 3];
    for l in &mut periods {
        *l = r.read_f64::<LittleEndian>()?;
    }
    let mut counts = [0usize; 3];
    for n in &mut counts {
        *n = usize::try_from(r.read_u64::<LittleEndian>()?).map_err(|_| Error::Format("mode count overflow".into()))?;
    }
    let time = r.read_f64::<LittleEndian>()?;
    let lat = Arc::new(FrequencyLattice::new(periods, counts)?);
    let mut comps = [
        vec![Complex64::new(0.0, 0.0); lat.len()],
        vec![Complex64::new(0.0, 0.0); lat.len()],
        vec![Complex64::new(0.0, 0.0); lat.len()],
    ];
    for comp in &mut comps {
        for idx in file_order(&lat) {
            let re = r.read_f64::<LittleEndian>()?;
            let im = r.read_f64::<LittleEndian>()?;
            comp[idx] = Complex64::new(re, im);
        }
    }
    Ok((SpectralVectorField::from_components(lat, comps)?, time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use crate::spectral::make_lattice;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_and_layout() {
        let lat = make_lattice([1.0, 2.0, 3.0], [4, 6, 8]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_field(&lat, &mut rng, 0.0, 100.0, false);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.25).unwrap();
        assert_eq!(buf.len(), 72 + 3 * 16 * lat.len());
        // first coefficient in the file is k = (−2, −3, −4)
        let first = lat.index_of_mode([-2, -3, -4]).unwrap();
        let re = f64::from_le_bytes(buf[72..80].try_into().unwrap());
        assert_eq!(re, f.component(0)[first].re);
        let (g, t) = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(t, 0.25);
        assert_eq!(g.lattice().counts(), [4, 6, 8]);
        assert_eq!(g.max_relative_difference(&f), 0.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(read_snapshot(&b"NOTASNAPSHOT"[..]), Err(Error::Format(_))));
    }
}
