use super::grid::{Grid2D, PGrid};
use super::spin::PauliField;
use crate::pauli::PauliCoeffs;

/// Real Pauli components (w0, w1, w2, w3) on x-grid × p-grid.
/// Storage index is `ix * np² + ip` so each x node owns a contiguous p block.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceField {
    pub grid: Grid2D,
    pub pgrid: PGrid,
    pub comps: [Vec<f64>; 4],
}

impl PhaseSpaceField {
    pub fn zeros(grid: Grid2D, pgrid: PGrid) -> Self {
        let n = grid.len() * pgrid.len();
        Self { grid, pgrid, comps: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]] }
    }

    /// Builds a field from `f(x1, x2, p1, p2) -> [w0, w1, w2, w3]`.
    pub fn from_fn<F: Fn(f64, f64, f64, f64) -> [f64; 4]>(grid: Grid2D, pgrid: PGrid, f: F) -> Self {
        let mut w = Self::zeros(grid, pgrid);
        let np2 = pgrid.len();
        for ix in 0..grid.len() {
            let (x1, x2) = grid.coords(ix);
            for ip in 0..np2 {
                let (p1, p2) = pgrid.momentum(ip);
                let v = f(x1, x2, p1, p2);
                for k in 0..4 {
                    w.comps[k][ix * np2 + ip] = v[k];
                }
            }
        }
        w
    }

    pub fn len(&self) -> usize {
        self.comps[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, ix: usize, ip: usize) -> PauliCoeffs {
        let i = ix * self.pgrid.len() + ip;
        PauliCoeffs::real(self.comps[0][i], [self.comps[1][i], self.comps[2][i], self.comps[3][i]])
    }

    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Self {
        let mut out = self.clone();
        for k in 0..4 {
            for (a, b) in out.comps[k].iter_mut().zip(&other.comps[k]) {
                *a = f(*a, *b);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flat_map(|c| c.iter()).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoidal ∫ p^μ W dp per x node.
    pub fn moment(&self, mu: (usize, usize)) -> PauliField {
        let np2 = self.pgrid.len();
        let weights: Vec<f64> = (0..np2)
            .map(|ip| {
                let (p1, p2) = self.pgrid.momentum(ip);
                p1.powi(mu.0 as i32) * p2.powi(mu.1 as i32) * self.pgrid.cell_area()
            })
            .collect();
        (0..self.grid.len())
            .map(|ix| {
                let mut acc = [0.0; 4];
                for k in 0..4 {
                    let block = &self.comps[k][ix * np2..(ix + 1) * np2];
                    acc[k] = block.iter().zip(&weights).map(|(a, b)| a * b).sum();
                }
                PauliCoeffs::real(acc[0], [acc[1], acc[2], acc[3]])
            })
            .collect()
    }

    /// Fraction of total |W| carried by the outermost `width` p-cells.
    pub fn boundary_fraction(&self, width: usize) -> f64 {
        let np2 = self.pgrid.len();
        let mut edge = 0.0;
        let mut total = 0.0;
        for ip in 0..np2 {
            let on_edge = self.pgrid.is_boundary(ip, width);
            for ix in 0..self.grid.len() {
                let i = ix * np2 + ip;
                let a = self.comps.iter().map(|c| c[i].abs()).sum::<f64>();
                total += a;
                if on_edge {
                    edge += a;
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            edge / total
        }
    }
}

/// Quadrature moment with a truncation warning.
pub fn quadrature_moment(w: &PhaseSpaceField, mu: (usize, usize)) -> PauliField {
    let frac = w.boundary_fraction(1);
    if frac > 1e-6 {
        log::warn!("p-boundary carries {frac:.2e} of the total mass; moments are truncated");
    }
    w.moment(mu)
}
