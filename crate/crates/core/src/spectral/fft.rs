use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Unnormalised 3D FFT on x-fastest cubes, built from 1D passes.
pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

#[derive(Clone, Copy)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<Fft3>>> {
    static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
    PLANS.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Fft3 {
    pub(crate) fn for_size(n: usize) -> Arc<Fft3> {
        let mut plans = cache().lock().expect("fft plan cache poisoned");
        plans
            .entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft3 {
                    n,
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    }

    pub(crate) fn process(&self, data: &mut [Complex64], dir: Direction) {
        let n = self.n;
        let plane = n * n;
        assert_eq!(data.len(), plane * n);
        let fft = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };

        // x lines are contiguous
        data.par_chunks_mut(plane).for_each(|slab| {
            fft.process(slab);
        });

        // y lines: transpose each z slab
        data.par_chunks_mut(plane).for_each(|slab| {
            let mut t = vec![Complex64::default(); plane];
            for y in 0..n {
                for x in 0..n {
                    t[y + n * x] = slab[x + n * y];
                }
            }
            fft.process(&mut t);
            for y in 0..n {
                for x in 0..n {
                    slab[x + n * y] = t[y + n * x];
                }
            }
        });

        // z lines: full transpose so that z is fastest
        let mut t = vec![Complex64::default(); data.len()];
        {
            let src: &[Complex64] = data;
            t.par_chunks_mut(n).enumerate().for_each(|(line, chunk)| {
                for (z, v) in chunk.iter_mut().enumerate() {
                    *v = src[line + plane * z];
                }
            });
        }
        t.par_chunks_mut(plane).for_each(|block| fft.process(block));
        data.par_chunks_mut(plane)
            .enumerate()
            .for_each(|(z, slab)| {
                for (line, v) in slab.iter_mut().enumerate() {
                    *v = t[z + n * line];
                }
            });
    }
}
