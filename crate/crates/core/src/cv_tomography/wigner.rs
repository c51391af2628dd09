//! Wigner function of a pure state and the inverse transform back to the
//! position-representation density kernel.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::{CvConfig, CvError, PhaseSpaceGrid, WaveFunction};
use crate::grid::GridSpec1D;

/// Wigner function
/// `W(q,p) = integral psi(q + u/2) conj(psi(q - u/2)) exp(-i p u) du`
/// evaluated by direct quadrature over `u`.
///
/// The integrand satisfies `g(-u) = conj(g(u))`, so the sum is folded into
/// its manifestly real form and the output carries no imaginary residue. The
/// result is checked against the normalization `(1/2 pi) integral W = 1`;
/// a violation beyond `quad_tol` reports the grid as too coarse.
pub fn wigner_from_psi(
    psi: &WaveFunction,
    q_grid: GridSpec1D,
    p_grid: GridSpec1D,
    cfg: &CvConfig,
) -> Result<PhaseSpaceGrid, CvError> {
    let du = psi.grid().step();
    let ps = p_grid.points();
    let mut values = Array2::zeros((q_grid.n, p_grid.n));
    for (iq, q) in q_grid.points().iter().enumerate() {
        // overlap support: both psi(q + u/2) and psi(q - u/2) on the grid
        let reach = 2.0 * (psi.grid().max - q).min(q - psi.grid().min);
        if reach <= 0.0 {
            continue;
        }
        let n_u = (reach / du).floor() as usize;
        if n_u == 0 {
            continue;
        }
        let g: Vec<C64> = (0..=n_u)
            .map(|k| {
                let u = k as f64 * du;
                psi.sample(q + 0.5 * u) * psi.sample(q - 0.5 * u).conj()
            })
            .collect();
        for (ip, &p) in ps.iter().enumerate() {
            let step = C64::from_polar(1.0, -p * du);
            let mut phase = step;
            let mut acc = 0.5 * g[0].re; // half weight: the k=0 term is not doubled
            for (k, gk) in g.iter().enumerate().skip(1) {
                let w = if k == n_u { 0.5 } else { 1.0 };
                acc += w * (gk * phase).re;
                phase *= step;
            }
            values[(iq, ip)] = 2.0 * du * acc;
        }
    }
    let grid = PhaseSpaceGrid::from_values(q_grid, p_grid, values);
    if grid.norm_residual() > cfg.quad_tol {
        return Err(CvError::NotNormalized {
            residual: grid.norm_residual(),
        });
    }
    Ok(grid)
}

/// Position-representation density kernel `rho(x, x')` on the q grid of `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityKernel {
    x: GridSpec1D,
    values: Array2<C64>,
}

impl DensityKernel {
    pub fn x_grid(&self) -> &GridSpec1D {
        &self.x
    }

    pub fn values(&self) -> &Array2<C64> {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> C64 {
        self.values[(i, j)]
    }

    /// `integral rho(x, x) dx`, one for a normalized state.
    pub fn trace(&self) -> f64 {
        let diag: Vec<f64> = (0..self.x.n).map(|i| self.values[(i, i)].re).collect();
        crate::grid::trapezoid(&diag, self.x.step())
    }
}

/// Recovers the density kernel from a Wigner function:
/// `rho(x, x') = (1/2 pi) integral W((x + x')/2, p) exp(i p (x - x')) dp`.
///
/// For the Wigner function of a pure state `psi` this reproduces
/// `psi(x) conj(psi(x'))`. An insufficient momentum extent of the input grid
/// (tails not decayed at the p boundary) is reported as a diagnostic because
/// it aliases the oscillatory integral.
pub fn density_kernel_from_wigner(
    w: &PhaseSpaceGrid,
    cfg: &CvConfig,
) -> Result<DensityKernel, CvError> {
    let max = w.max_abs();
    let boundary = boundary_momentum_magnitude(w);
    if max > 0.0 && boundary > cfg.quad_tol.sqrt() * max {
        return Err(CvError::MomentumRangeTooSmall { boundary, max });
    }

    let q = *w.q_grid();
    let p = *w.p_grid();
    let nq = q.n;
    let np = p.n;
    let dp = p.step();
    let half = 0.5 * q.step();

    // W interpolated at the 2N-1 midpoints (x_i + x_j)/2, one row per p.
    // Odd s sits exactly half-way between nodes, where the symmetric
    // six-point formula is O(h^6); the cubic fallback near the edges is
    // harmless because W has decayed there.
    const HALFWAY: [f64; 6] = [
        3.0 / 256.0,
        -25.0 / 256.0,
        150.0 / 256.0,
        150.0 / 256.0,
        -25.0 / 256.0,
        3.0 / 256.0,
    ];
    let mut midvals = Array2::zeros((2 * nq - 1, np));
    for s in 0..2 * nq - 1 {
        if s % 2 == 0 {
            for ip in 0..np {
                midvals[(s, ip)] = w.value(s / 2, ip);
            }
        } else if s / 2 >= 2 && s / 2 + 3 < nq {
            let base = s / 2 - 2;
            for ip in 0..np {
                midvals[(s, ip)] = HALFWAY
                    .iter()
                    .enumerate()
                    .map(|(d, c)| c * w.value(base + d, ip))
                    .sum();
            }
        } else {
            let qs = q.min + s as f64 * half;
            let (i1, t) = crate::grid::cubic_stencil_indices(nq, (qs - q.min) / q.step());
            let wts = crate::grid::cubic_stencil_weights(t);
            for ip in 0..np {
                midvals[(s, ip)] = wts[0] * w.value(i1 - 1, ip)
                    + wts[1] * w.value(i1, ip)
                    + wts[2] * w.value(i1 + 1, ip)
                    + wts[3] * w.value(i1 + 2, ip);
            }
        }
    }

    let scale = dp / (2.0 * std::f64::consts::PI);
    let mut values = Array2::from_elem((nq, nq), C64::new(0.0, 0.0));
    for i in 0..nq {
        for j in 0..=i {
            let delta = (i as f64 - j as f64) * q.step();
            let step = C64::from_polar(1.0, dp * delta);
            let mut phase = C64::from_polar(1.0, p.min * delta);
            let mut acc = C64::new(0.0, 0.0);
            for ip in 0..np {
                let wgt = if ip == 0 || ip == np - 1 { 0.5 } else { 1.0 };
                acc += phase * (midvals[(i + j, ip)] * wgt);
                phase *= step;
            }
            let rho_ij = acc * scale;
            values[(i, j)] = rho_ij;
            values[(j, i)] = rho_ij.conj();
        }
    }
    Ok(DensityKernel { x: q, values })
}

fn boundary_momentum_magnitude(w: &PhaseSpaceGrid) -> f64 {
    let np = w.p_grid().n;
    let mut worst = 0.0f64;
    for iq in 0..w.q_grid().n {
        worst = worst.max(w.value(iq, 0).abs());
        worst = worst.max(w.value(iq, np - 1).abs());
    }
    worst
}
