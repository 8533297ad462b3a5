//! Uniform grids on `[-R, R)^{2n}` with the Fourier pairing
//! `f̂(ξ) = ∫ f(z) e^{-2πi Re⟨z, ξ⟩} dz`.
//!
//! Nodes are `x_m = -R + m h` with `h = 2R/M`; frequencies are
//! `ξ_k = (k - M/2)/(2R)`. Per axis `f̂[k] = h (-1)^k DFT[(-1)^m f[m]][k]`,
//! valid because `M/2` is even.

use std::f64::consts::PI;

use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Uniform grid in `2n` real dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    /// Complex dimension.
    pub n: usize,
    /// Box radius `R`.
    pub radius: f64,
    /// Points per axis `M`.
    pub points: usize,
}

impl SpectralGrid {
    pub fn new(n: usize, radius: f64, points: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("complex dimension must be positive".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGrid(format!("box radius {radius} must be positive")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis {points} must be a power of two ≥ 8"
            )));
        }
        Ok(SpectralGrid { n, radius, points })
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.real_dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial step `h = 2R/M`.
    pub fn step(&self) -> f64 {
        2.0 * self.radius / self.points as f64
    }

    /// Frequency step `1/(2R)`.
    pub fn freq_step(&self) -> f64 {
        0.5 / self.radius
    }

    /// Largest representable frequency per axis, `M/(4R)`.
    pub fn nyquist(&self) -> f64 {
        self.points as f64 * self.freq_step() / 2.0
    }

    pub fn coord(&self, m: usize) -> f64 {
        -self.radius + m as f64 * self.step()
    }

    pub fn freq(&self, k: usize) -> f64 {
        (k as f64 - (self.points / 2) as f64) * self.freq_step()
    }

    /// Same box, twice the points: the frequency lattice is a superset.
    pub fn refined(&self) -> Self {
        SpectralGrid {
            n: self.n,
            radius: self.radius,
            points: self.points * 2,
        }
    }

    /// Per-axis indices of flat index `i` (row-major, axis `2j` is `Re z_j`).
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let d = self.real_dim();
        let mut out = vec![0; d];
        for a in (0..d).rev() {
            out[a] = i % self.points;
            i /= self.points;
        }
        out
    }

    pub fn node(&self, i: usize) -> Vec<C64> {
        let idx = self.multi_index(i);
        (0..self.n)
            .map(|j| C64::new(self.coord(idx[2 * j]), self.coord(idx[2 * j + 1])))
            .collect()
    }

    /// Frequency of flat index `i` as a real `2n`-vector.
    pub fn frequency(&self, i: usize) -> Vec<f64> {
        self.multi_index(i).into_iter().map(|k| self.freq(k)).collect()
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec<C64>> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    pub fn frequencies(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.frequency(i))
    }

    /// Discrete forward transform with the continuous normalization.
    pub fn forward(&self, values: &[C64]) -> Result<Vec<C64>> {
        self.transform(values, FftDirection::Forward, self.step())
    }

    /// Discrete inverse transform with the continuous normalization.
    pub fn inverse(&self, spectrum: &[C64]) -> Result<Vec<C64>> {
        self.transform(spectrum, FftDirection::Inverse, self.freq_step())
    }

    fn transform(&self, data: &[C64], dir: FftDirection, scale: f64) -> Result<Vec<C64>> {
        if data.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: data.len(),
            });
        }
        let m = self.points;
        let d = self.real_dim();
        let mut out: Vec<C64> = data
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.checker(i))
            .collect();
        let fft = FftPlanner::new().plan_fft(m, dir);
        let mut line = vec![C64::new(0.0, 0.0); m];
        for a in 0..d {
            let stride = m.pow((d - 1 - a) as u32);
            let outer = m.pow(a as u32);
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * m * stride + inner;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = out[base + k * stride];
                    }
                    fft.process(&mut line);
                    for (k, slot) in line.iter().enumerate() {
                        out[base + k * stride] = *slot;
                    }
                }
            }
        }
        let total = scale.powi(d as i32);
        for (i, v) in out.iter_mut().enumerate() {
            *v *= self.checker(i) * total;
        }
        Ok(out)
    }

    /// `(-1)^{Σ_a m_a}`.
    fn checker(&self, i: usize) -> f64 {
        let s: usize = self.multi_index(i).iter().sum();
        if s.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Sup over the boundary layer of `|values|`, relative to the sup overall.
    pub fn boundary_ratio(&self, values: &[C64]) -> f64 {
        let max = values.iter().fold(0.0_f64, |a, v| a.max(v.norm()));
        if max == 0.0 {
            return 0.0;
        }
        let edge = values
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                self.multi_index(*i)
                    .iter()
                    .any(|&k| k == 0 || k == self.points - 1)
            })
            .fold(0.0_f64, |a, (_, v)| a.max(v.norm()));
        edge / max
    }
}

/// Samples of a function on a [`SpectralGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub grid: SpectralGrid,
    pub values: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct GridEnvelope {
    box_radius: f64,
    resolution: usize,
    values: Vec<[f64; 2]>,
}

impl GridFunction {
    pub fn sample<F: Fn(&[C64]) -> C64>(grid: &SpectralGrid, f: F) -> Self {
        GridFunction {
            grid: grid.clone(),
            values: grid.nodes().map(|z| f(&z)).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.norm()))
    }

    /// `max |self - other|`.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |a, (x, y)| a.max((x - y).norm()))
    }

    /// Riemann sum `h^{2n} Σ f`.
    pub fn integral(&self) -> C64 {
        let h = self.grid.step().powi(self.grid.real_dim() as i32);
        self.values.iter().sum::<C64>() * h
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&GridEnvelope {
            box_radius: self.grid.radius,
            resolution: self.grid.points,
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
        })?)
    }

    /// Reads the envelope; `n` is recovered from the value count.
    pub fn from_json(json: &str) -> Result<Self> {
        let env: GridEnvelope = serde_json::from_str(json)?;
        let len = env.values.len();
        let mut dims = 0;
        let mut count = 1usize;
        while count < len {
            count = count.saturating_mul(env.resolution);
            dims += 1;
        }
        if count != len || dims % 2 != 0 || dims == 0 {
            return Err(Error::InvalidGrid(format!(
                "{len} values do not fill a {}-point grid",
                env.resolution
            )));
        }
        let grid = SpectralGrid::new(dims / 2, env.box_radius, env.resolution)?;
        Ok(GridFunction {
            grid,
            values: env.values.iter().map(|p| C64::new(p[0], p[1])).collect(),
        })
    }
}

/// `e^{-2πi Re⟨z, ξ⟩}` with `ξ` as a real `2n`-vector.
pub fn character(z: &[C64], xi: &[f64]) -> C64 {
    let phase: f64 = z
        .iter()
        .enumerate()
        .map(|(j, v)| v.re * xi[2 * j] + v.im * xi[2 * j + 1])
        .sum();
    C64::from_polar(1.0, -2.0 * PI * phase)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(z: &[C64]) -> C64 {
        C64::new((-PI * z.iter().map(|v| v.norm_sqr()).sum::<f64>()).exp(), 0.0)
    }

    #[test]
    fn gaussian_is_self_dual() {
        let g = SpectralGrid::new(1, 6.0, 256).unwrap();
        let f = GridFunction::sample(&g, gaussian);
        let spec = g.forward(&f.values).unwrap();
        let err = g
            .frequencies()
            .zip(&spec)
            .map(|(xi, v)| (v - C64::new((-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp(), 0.0)).norm())
            .fold(0.0_f64, f64::max);
        assert!(err < 1e-8, "{err}");
        let back = g.inverse(&spec).unwrap();
        let rt = back.iter().zip(&f.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(rt < 1e-10);
    }

    #[test]
    fn shift_becomes_modulation() {
        let g = SpectralGrid::new(1, 6.0, 128).unwrap();
        let z0 = C64::new(0.7, -0.4);
        let f = GridFunction::sample(&g, |z| gaussian(&[z[0] - z0]));
        let spec = g.forward(&f.values).unwrap();
        let err = g
            .frequencies()
            .zip(&spec)
            .map(|(xi, v)| {
                let expect = character(&[z0], &xi) * (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp();
                (v - expect).norm()
            })
            .fold(0.0_f64, f64::max);
        assert!(err < 1e-8);
    }

    #[test]
    fn zero_maps_to_zero_and_validation() {
        let g = SpectralGrid::new(1, 3.0, 16).unwrap();
        let spec = g.forward(&vec![C64::new(0.0, 0.0); g.len()]).unwrap();
        assert!(spec.iter().all(|v| v.norm() == 0.0));
        assert!(SpectralGrid::new(1, 3.0, 100).is_err());
        assert!(g.forward(&[C64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn four_dimensional_transform() {
        let g = SpectralGrid::new(2, 5.0, 32).unwrap();
        let f = GridFunction::sample(&g, gaussian);
        let spec = g.forward(&f.values).unwrap();
        let i0 = g.len() / 2 + g.points / 2 * (1 + g.points + g.points * g.points);
        assert!(g.frequency(i0).iter().all(|&x| x == 0.0));
        assert!((spec[i0].re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn json_round_trip() {
        let g = SpectralGrid::new(1, 2.0, 8).unwrap();
        let f = GridFunction::sample(&g, gaussian);
        let back = GridFunction::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
