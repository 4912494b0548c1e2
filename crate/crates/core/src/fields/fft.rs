//! Cached 2-D complex FFTs on row-major `n1 × n2` arrays (index `i + n1 * j`).

use crate::pauli::C64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

pub struct Fft2 {
    pub n1: usize,
    pub n2: usize,
    fwd1: Arc<dyn Fft<f64>>,
    inv1: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
}

fn cache() -> &'static Mutex<HashMap<(usize, usize), Arc<Fft2>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Fft2>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Fft2 {
    /// Returns the shared plan for an `n1 × n2` transform.
    pub fn get(n1: usize, n2: usize) -> Arc<Fft2> {
        let mut map = cache().lock().expect("fft cache poisoned");
        map.entry((n1, n2))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft2 {
                    n1,
                    n2,
                    fwd1: planner.plan_fft_forward(n1),
                    inv1: planner.plan_fft_inverse(n1),
                    fwd2: planner.plan_fft_forward(n2),
                    inv2: planner.plan_fft_inverse(n2),
                })
            })
            .clone()
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [C64], scratch: &mut Vec<C64>) {
        self.run(data, scratch, true);
    }

    /// Inverse transform in place, normalized by 1/(n1 n2).
    pub fn inverse(&self, data: &mut [C64], scratch: &mut Vec<C64>) {
        self.run(data, scratch, false);
        let norm = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|z| *z *= norm);
    }

    fn run(&self, data: &mut [C64], scratch: &mut Vec<C64>, forward: bool) {
        let (n1, n2) = (self.n1, self.n2);
        debug_assert_eq!(data.len(), n1 * n2);
        let (p1, p2) = if forward { (&self.fwd1, &self.fwd2) } else { (&self.inv1, &self.inv2) };
        let need = n1 * n2 + p1.get_inplace_scratch_len().max(p2.get_inplace_scratch_len());
        if scratch.len() < need {
            scratch.resize(need, C64::new(0.0, 0.0));
        }
        let (tr, work) = scratch.split_at_mut(n1 * n2);
        p1.process_with_scratch(data, &mut work[..p1.get_inplace_scratch_len()]);
        for j in 0..n2 {
            for i in 0..n1 {
                tr[j + n2 * i] = data[i + n1 * j];
            }
        }
        p2.process_with_scratch(tr, &mut work[..p2.get_inplace_scratch_len()]);
        for i in 0..n1 {
            for j in 0..n2 {
                data[i + n1 * j] = tr[j + n2 * i];
            }
        }
    }
}

/// Angular wavenumbers for a periodic axis of `n` nodes and length `l`, in FFT order.
/// The Nyquist entry is set to zero so odd derivatives stay real.
pub fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    let base = 2.0 * PI / l;
    (0..n)
        .map(|i| {
            if 2 * i == n {
                0.0
            } else if 2 * i < n {
                base * i as f64
            } else {
                base * (i as f64 - n as f64)
            }
        })
        .collect()
}

/// Signed mode index in FFT order; the Nyquist index maps to `n/2`.
pub fn mode_index(i: usize, n: usize) -> i64 {
    if 2 * i <= n {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
