//! Spectral preconditioner: `(-Δ_h + σ)^{-1}` applied to every component,
//! where `-Δ_h` is the periodic second-difference Laplacian. On the staggered
//! complex this is the exact flat part of every invariant Laplacian.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::TorusGrid;

pub struct FlatPreconditioner {
    grid: TorusGrid,
    comps: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    inv_symbol: Vec<f64>,
}

const SHIFT: f64 = 1.0;

impl FlatPreconditioner {
    pub fn new(grid: TorusGrid, comps: usize) -> Self {
        let res = grid.res();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(res);
        let inverse = planner.plan_fft_inverse(res);
        let h = grid.h();
        let axis_symbol: Vec<f64> = (0..res)
            .map(|k| 4.0 / (h * h) * (std::f64::consts::PI * k as f64 / res as f64).sin().powi(2))
            .collect();
        let np = grid.points();
        let norm = 1.0 / np as f64;
        let inv_symbol = (0..np)
            .map(|x| {
                let s: f64 = (0..grid.dim()).map(|a| axis_symbol[grid.coord(x, a)]).sum();
                norm / (s + SHIFT)
            })
            .collect();
        FlatPreconditioner { grid, comps, forward, inverse, inv_symbol }
    }

    fn transform(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let res = self.grid.res();
        let np = self.grid.points();
        let mut line = vec![Complex64::new(0.0, 0.0); res];
        for axis in 0..self.grid.dim() {
            let stride = res.pow(axis as u32);
            for start in 0..np {
                if self.grid.coord(start, axis) != 0 {
                    continue;
                }
                for (k, l) in line.iter_mut().enumerate() {
                    *l = buf[start + k * stride];
                }
                fft.process(&mut line);
                for (k, l) in line.iter().enumerate() {
                    buf[start + k * stride] = *l;
                }
            }
        }
    }

    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        let np = self.grid.points();
        let mut buf = vec![Complex64::new(0.0, 0.0); np];
        for c in 0..self.comps {
            for (b, v) in buf.iter_mut().zip(&r[c * np..(c + 1) * np]) {
                *b = Complex64::new(*v, 0.0);
            }
            self.transform(&mut buf, &self.forward);
            for (b, s) in buf.iter_mut().zip(&self.inv_symbol) {
                *b *= *s;
            }
            self.transform(&mut buf, &self.inverse);
            for (o, b) in z[c * np..(c + 1) * np].iter_mut().zip(&buf) {
                *o = b.re;
            }
        }
    }
}
