//! Basin/escape rendering over a two-real-parameter affine slice of C^k,
//! with deterministic data-parallel evaluation and binary PGM output.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify_point, Classification, FiltrationSpec};
use crate::error::{Error, Result};
use crate::maps::AutoSequence;

/// A 2-real-parameter affine slice `center + u dir_x + v dir_y` with
/// u, v in [-1, 1] sampled at pixel centers, row-major with v increasing
/// by row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RenderWindow {
    pub center: Vec<[f64; 2]>,
    pub dir_x: Vec<[f64; 2]>,
    pub dir_y: Vec<[f64; 2]>,
    pub nx: usize,
    pub ny: usize,
}

impl RenderWindow {
    pub fn point(&self, ix: usize, iy: usize) -> Vec<Complex64> {
        let u = 2.0 * (ix as f64 + 0.5) / self.nx as f64 - 1.0;
        let v = 2.0 * (iy as f64 + 0.5) / self.ny as f64 - 1.0;
        self.center
            .iter()
            .zip(self.dir_x.iter().zip(&self.dir_y))
            .map(|(c, (dx, dy))| {
                Complex64::new(
                    c[0] + u * dx[0] + v * dy[0],
                    c[1] + u * dx[1] + v * dy[1],
                )
            })
            .collect()
    }

    fn validate(&self, k: usize) -> Result<()> {
        if self.center.len() != k || self.dir_x.len() != k || self.dir_y.len() != k {
            return Err(Error::parameter("render window vectors must have length k"));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::parameter("render resolution must be positive"));
        }
        Ok(())
    }
}

/// Pixel value coding of the classification grid.
pub const PIXEL_IN_BASIN: u8 = 255;
pub const PIXEL_ESCAPING: u8 = 0;
pub const PIXEL_UNDECIDED: u8 = 128;

/// Row-major classification and event-time grids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderGrids {
    pub nx: usize,
    pub ny: usize,
    /// 255 in-basin, 0 escaping, 128 undecided.
    pub class: Vec<u8>,
    /// First entry step into the deciding region, clamped to 255;
    /// 255 for undecided pixels.
    pub time: Vec<u8>,
}

/// Classify every pixel of the slice. Pixels are independent and the output
/// is identical for any thread count.
pub fn render_basin(
    seq: &AutoSequence,
    window: &RenderWindow,
    spec: &FiltrationSpec,
    r_tilde: f64,
    maxiter: usize,
) -> Result<RenderGrids> {
    window.validate(seq.k())?;
    let total = window.nx * window.ny;
    let pixels: Vec<(u8, u8)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let ix = idx % window.nx;
            let iy = idx / window.nx;
            let z = window.point(ix, iy);
            match classify_point(seq, &z, spec, r_tilde, maxiter) {
                Classification::InBasin { at } => (PIXEL_IN_BASIN, at.min(255) as u8),
                Classification::Escaping { at } => (PIXEL_ESCAPING, at.min(255) as u8),
                Classification::Undecided { .. } => (PIXEL_UNDECIDED, 255),
            }
        })
        .collect();
    let mut class = Vec::with_capacity(total);
    let mut time = Vec::with_capacity(total);
    for (c, t) in pixels {
        class.push(c);
        time.push(t);
    }
    Ok(RenderGrids {
        nx: window.nx,
        ny: window.ny,
        class,
        time,
    })
}

/// Write an 8-bit binary PGM (P5) image.
pub fn write_pgm(path: &Path, width: usize, height: usize, data: &[u8]) -> Result<()> {
    if data.len() != width * height {
        return Err(Error::parameter("pixel buffer does not match dimensions"));
    }
    let mut buf = Vec::with_capacity(data.len() + 32);
    write!(&mut buf, "P5\n{width} {height}\n255\n")?;
    buf.extend_from_slice(data);
    std::fs::write(path, buf)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::Polynomial;
    use crate::maps::{PerturbedWeakShift, PolyMap, WeakShift};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn family() -> (AutoSequence, FiltrationSpec) {
        let base =
            WeakShift::new(3, c(0.5, 0.0), Polynomial::zero(2, 2), 2).unwrap();
        let pert = PerturbedWeakShift::new(base, 4).unwrap();
        let spec = super::super::find_filtration_spec(std::slice::from_ref(&pert)).unwrap();
        (AutoSequence::constant(PolyMap::Perturbed(pert)), spec)
    }

    fn window(center: [f64; 2], extent: f64, n: usize) -> RenderWindow {
        RenderWindow {
            center: vec![center, [0.0, 0.0], [0.0, 0.0]],
            dir_x: vec![[extent, 0.0], [0.0, 0.0], [0.0, 0.0]],
            dir_y: vec![[0.0, extent], [0.0, 0.0], [0.0, 0.0]],
            nx: n,
            ny: n,
        }
    }

    #[test]
    fn tiny_window_is_all_basin() {
        let (seq, spec) = family();
        let w = window([0.0, 0.0], 0.01, 8);
        let grids = render_basin(&seq, &w, &spec, 0.05, 50).unwrap();
        assert!(grids.class.iter().all(|&p| p == PIXEL_IN_BASIN));
        assert!(grids.time.iter().all(|&t| t == 0));
    }

    #[test]
    fn window_inside_the_escape_sector() {
        let (seq, spec) = family();
        let mut w = window([0.0, 0.0], 0.1, 8);
        w.center = vec![[0.0, 0.0], [0.0, 0.0], [3.0 * spec.radius, 0.0]];
        let grids = render_basin(&seq, &w, &spec, 0.05, 50).unwrap();
        assert!(grids.class.iter().all(|&p| p == PIXEL_ESCAPING));
        assert!(grids.time.iter().all(|&t| t == 0));
    }

    #[test]
    fn render_is_thread_invariant() {
        let (seq, spec) = family();
        let mut w = window([0.0, 0.0], 2.0, 24);
        w.center[2] = [1.0, 0.0];
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| render_basin(&seq, &w, &spec, 0.05, 60).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| render_basin(&seq, &w, &spec, 0.05, 60).unwrap());
        assert_eq!(single, multi);
    }

    #[test]
    fn pgm_header_and_payload() {
        let dir = std::env::temp_dir().join("nabasin_pgm_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("grid.pgm");
        write_pgm(&path, 3, 2, &[0, 10, 20, 30, 40, 250]).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(&bytes[bytes.len() - 6..], &[0, 10, 20, 30, 40, 250]);
        std::fs::remove_file(&path).ok();
    }
}
