//! Periodic grids on the torus `∏ [0, L_j)` and sampled functions on them.

use std::io::Write;

use num_complex::Complex;
use num_traits::Zero;
use rustfft::FftPlanner;

use crate::error::GeneratorError;
use crate::scalar::Scalar;

/// `N` points per axis (a power of two) with per-axis periods `L_j`.
/// Points are `x = j L / N`, frequencies `2πk / L` with `k ∈ [−N/2, N/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusGrid<T> {
    periods: Vec<T>,
    points: usize,
}

impl<T: Scalar> TorusGrid<T> {
    pub fn new(periods: Vec<T>, points: usize) -> Result<Self, GeneratorError> {
        if periods.is_empty() {
            return Err(GeneratorError::Grid("grid needs at least one axis".into()));
        }
        if !points.is_power_of_two() || points < 2 {
            return Err(GeneratorError::Grid(format!("points per axis must be a power of two >= 2, got {points}")));
        }
        if periods.iter().any(|&l| !(l > T::zero() && l.is_finite())) {
            return Err(GeneratorError::Grid("periods must be positive and finite".into()));
        }
        Ok(Self { periods, points })
    }

    /// Same period on every axis.
    pub fn cubic(dim: usize, period: T, points: usize) -> Result<Self, GeneratorError> {
        Self::new(vec![period; dim], points)
    }

    pub fn dim(&self) -> usize {
        self.periods.len()
    }

    pub fn periods(&self) -> &[T] {
        &self.periods
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major multi-index; the last axis varies fastest.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for j in (0..self.dim()).rev() {
            idx[j] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    pub fn point(&self, flat: usize) -> Vec<T> {
        let n = T::lit(self.points as f64);
        self.multi_index(flat)
            .into_iter()
            .zip(&self.periods)
            .map(|(j, &l)| T::lit(j as f64) * l / n)
            .collect()
    }

    /// Signed wavenumber of an FFT-ordered index.
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j < self.points / 2 {
            j as i64
        } else {
            j as i64 - self.points as i64
        }
    }

    pub fn frequency(&self, flat: usize) -> Vec<T> {
        self.multi_index(flat)
            .into_iter()
            .zip(&self.periods)
            .map(|(j, &l)| T::TAU() * T::lit(self.wavenumber(j) as f64) / l)
            .collect()
    }

    /// Flat index of the frequency `−ξ_k` (mod N per axis).
    pub fn mirror(&self, flat: usize) -> usize {
        let idx: Vec<usize> = self.multi_index(flat).into_iter().map(|j| (self.points - j) % self.points).collect();
        self.flat_index(&idx)
    }

    /// Cell volume `∏ L_j / N`.
    pub fn cell_volume(&self) -> T {
        self.periods.iter().fold(T::one(), |acc, &l| acc * l / T::lit(self.points as f64))
    }
}

/// Values of a function at the points of a [`TorusGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    pub grid: TorusGrid<T>,
    pub values: Vec<Complex<T>>,
}

impl<T: Scalar> GridFunction<T> {
    pub fn new(grid: TorusGrid<T>, values: Vec<Complex<T>>) -> Result<Self, GeneratorError> {
        if values.len() != grid.len() {
            return Err(GeneratorError::Grid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(GeneratorError::Grid("grid function values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TorusGrid<T>, f: impl Fn(&[T]) -> Complex<T>) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.point(k))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: TorusGrid<T>, f: impl Fn(&[T]) -> T) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    /// `e^{iγ·x}`
    pub fn plane_wave(grid: TorusGrid<T>, gamma: &[T]) -> Self {
        Self::from_fn(grid, |x| {
            let phase = x.iter().zip(gamma).fold(T::zero(), |a, (&p, &g)| a + p * g);
            Complex::new(phase.cos(), phase.sin())
        })
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| if v.norm() > m { v.norm() } else { m })
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| if (a - b).norm() > m { (a - b).norm() } else { m })
    }

    /// Discrete `L²` pairing `Σ u conj(v) · cell volume`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.values
            .iter()
            .zip(&other.values)
            .fold(Complex::zero(), |acc: Complex<T>, (u, v)| acc + u * v.conj())
            * self.grid.cell_volume()
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Forward DFT coefficients `c_k = N^{-n} Σ f(x) e^{−iξ_k·x}`.
    pub fn coefficients(&self) -> Vec<Complex<T>> {
        let mut data = self.values.clone();
        fft_nd(&mut data, self.grid.points, self.grid.dim(), false);
        let scale = T::one() / T::lit(self.grid.len() as f64);
        data.iter_mut().for_each(|v| *v = *v * scale);
        data
    }

    pub fn from_coefficients(grid: TorusGrid<T>, mut coefficients: Vec<Complex<T>>) -> Self {
        fft_nd(&mut coefficients, grid.points, grid.dim(), true);
        Self { grid, values: coefficients }
    }

    /// Trigonometric interpolant at an arbitrary point. The Nyquist mode is
    /// split evenly between `±N/2`, so real data interpolates to real values.
    pub fn interpolate(&self, x: &[T]) -> Complex<T> {
        interpolate_coefficients(&self.grid, &self.coefficients(), x)
    }

    /// Writes `coordinates..., re, im` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (0..self.grid.dim()).map(|j| format!("x{j}")).collect();
        writeln!(out, "{},re,im", header.join(","))?;
        for (k, v) in self.values.iter().enumerate() {
            let coords: Vec<String> = self.grid.point(k).iter().map(|c| format!("{c}")).collect();
            writeln!(out, "{},{},{}", coords.join(","), v.re, v.im)?;
        }
        Ok(())
    }
}

pub(crate) fn interpolate_coefficients<T: Scalar>(grid: &TorusGrid<T>, coef: &[Complex<T>], x: &[T]) -> Complex<T> {
    let n = grid.points;
    let half = n / 2;
    // per-axis basis values, indexed by FFT order
    let bases: Vec<Vec<Complex<T>>> = (0..grid.dim())
        .map(|axis| {
            let l = grid.periods[axis];
            (0..n)
                .map(|j| {
                    let xi = T::TAU() * T::lit(grid.wavenumber(j) as f64) / l;
                    let phase = xi * x[axis];
                    if j == half {
                        Complex::new(phase.cos(), T::zero())
                    } else {
                        Complex::new(phase.cos(), phase.sin())
                    }
                })
                .collect()
        })
        .collect();
    let mut acc = Complex::zero();
    for (k, c) in coef.iter().enumerate() {
        let idx = grid.multi_index(k);
        let mut b = Complex::new(T::one(), T::zero());
        for (axis, &j) in idx.iter().enumerate() {
            b = b * bases[axis][j];
        }
        acc = acc + c * b;
    }
    acc
}

/// In-place unnormalized n-dimensional FFT by axis-wise 1-D transforms.
pub(crate) fn fft_nd<T: Scalar>(data: &mut [Complex<T>], points: usize, dim: usize, inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    let fft = if inverse { planner.plan_fft_inverse(points) } else { planner.plan_fft_forward(points) };
    let total = data.len();
    let mut line = vec![Complex::zero(); points];
    for axis in 0..dim {
        let stride = points.pow((dim - 1 - axis) as u32);
        let block = stride * points;
        for start in (0..total).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                fft.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_of_plane_wave() {
        let grid = TorusGrid::new(vec![2.0_f64, 3.0], 8).unwrap();
        let gamma = [std::f64::consts::TAU * 2.0 / 2.0, -std::f64::consts::TAU / 3.0];
        let f = GridFunction::plane_wave(grid.clone(), &gamma);
        let c = f.coefficients();
        let k = grid.flat_index(&[2, 7]);
        assert!((c[k] - Complex::new(1.0, 0.0)).norm() < 1e-13);
        let freq = grid.frequency(k);
        assert!((freq[0] - gamma[0]).abs() < 1e-14 && (freq[1] - gamma[1]).abs() < 1e-14);
        let others: f64 = c.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, v)| v.norm()).sum();
        assert!(others < 1e-12);
        let back = GridFunction::from_coefficients(grid, c);
        assert!(back.max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn interpolation_reproduces_band_limited_functions() {
        let grid = TorusGrid::cubic(1, 1.0_f64, 16).unwrap();
        let f = |x: f64| (std::f64::consts::TAU * x).cos() + 0.3 * (6.0 * std::f64::consts::PI * x).sin();
        let g = GridFunction::from_real_fn(grid, |x| f(x[0]));
        for x in [0.013, 0.37, 0.8] {
            assert!((g.interpolate(&[x]) - Complex::new(f(x), 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TorusGrid::cubic(1, 1.0_f64, 12).is_err());
        assert!(TorusGrid::cubic(1, -1.0_f64, 16).is_err());
        assert!(TorusGrid::<f64>::new(vec![], 16).is_err());
    }
}
