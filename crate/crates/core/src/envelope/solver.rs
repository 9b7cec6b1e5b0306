//! Finite-difference effective-mass Hamiltonian and a single-vector LOBPCG
//! eigensolver for its ground state.

use nalgebra::{Matrix3, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::geometry::{Grid3, PotentialGrid};
use crate::{domain, Error, Result};

/// `ħ²/2m₀` in meV·nm².
pub const HBAR2_2M0: f64 = 38.099_820_8;

const CHUNK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Relative residual `‖Hψ − Eψ‖ / E` at which iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Seed for the perturbation added to the initial guess.
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iterations: 5000,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSolution {
    /// Confinement energy above the GaAs band edge (meV).
    pub energy: f64,
    /// Grid values normalised so that `Σ|ψ|² = 1`.
    pub wavefunction: Vec<f64>,
    pub grid: Grid3,
    /// Probability weighted by the local barrier character `x/r`.
    pub barrier_occupancy: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// BenDaniel-Duke operator `−∇·(ħ²/2m(r))∇ + V` on a 7-point stencil with
/// arithmetic-mean face masses and `ψ = 0` just outside the grid.
pub struct Hamiltonian {
    n: [usize; 3],
    stride: [usize; 3],
    /// Coupling through the +axis face of each point (meV), zero at the far wall.
    face: [Vec<f64>; 3],
    diag: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(pot: &PotentialGrid) -> Result<Self> {
        let g = &pot.grid;
        let len = g.len();
        if len == 0 || pot.potential.len() != len || pot.inv_mass.len() != len {
            return domain("potential and mass grids must match the grid size");
        }
        if pot.inv_mass.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return domain("inverse masses must be positive");
        }
        let n = g.n;
        let stride = [1, n[0], n[0] * n[1]];
        let mut face: [Vec<f64>; 3] = Default::default();
        let mut diag = pot.potential.clone();
        for axis in 0..3 {
            let c = HBAR2_2M0 / (g.h[axis] * g.h[axis]);
            let mut f = vec![0.0; len];
            for idx in 0..len {
                let pos = (idx / stride[axis]) % n[axis];
                let m = pot.inv_mass[idx];
                f[idx] = if pos + 1 < n[axis] {
                    0.5 * c * (m + pot.inv_mass[idx + stride[axis]])
                } else {
                    0.0
                };
            }
            for idx in 0..len {
                let pos = (idx / stride[axis]) % n[axis];
                let up = if pos + 1 < n[axis] { f[idx] } else { c * pot.inv_mass[idx] };
                let down = if pos > 0 { f[idx - stride[axis]] } else { c * pot.inv_mass[idx] };
                diag[idx] += up + down;
            }
            face[axis] = f;
        }
        Ok(Self {
            n,
            stride,
            face,
            diag,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
            let start = c * CHUNK;
            for (k, yi) in out.iter_mut().enumerate() {
                let idx = start + k;
                let mut acc = self.diag[idx] * x[idx];
                for axis in 0..3 {
                    let s = self.stride[axis];
                    let pos = (idx / s) % self.n[axis];
                    if pos + 1 < self.n[axis] {
                        acc -= self.face[axis][idx] * x[idx + s];
                    }
                    if pos > 0 {
                        acc -= self.face[axis][idx - s] * x[idx - s];
                    }
                }
                *yi = acc;
            }
        });
    }
}

fn sum(v: &[f64]) -> f64 {
    let partial: Vec<f64> = v.par_chunks(CHUNK).map(|c| c.iter().sum::<f64>()).collect();
    partial.iter().sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

/// `y ← y − c·x`
fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(a, b)| *a -= c * b);
}

fn scale(c: f64, x: &mut [f64]) {
    x.par_iter_mut().for_each(|a| *a *= c);
}

fn combine(c: [f64; 2], a: &[f64], b: &[f64]) -> Vec<f64> {
    a.par_iter().zip(b.par_iter()).map(|(p, q)| c[0] * p + c[1] * q).collect()
}

/// Smooth positive start vector peaked where the potential is lowest, with a
/// small seeded perturbation so no symmetry is imposed.
fn initial_guess(pot: &PotentialGrid, seed: u64) -> Vec<f64> {
    let g = &pot.grid;
    let vmin = pot.potential.iter().cloned().fold(f64::INFINITY, f64::min);
    let vmax = pot.potential.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = (vmax - vmin).max(1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(g.len());
    for k in 0..g.n[2] {
        let sz = (k as f64 + 1.0) / (g.n[2] as f64 + 1.0);
        for j in 0..g.n[1] {
            let sy = (j as f64 + 1.0) / (g.n[1] as f64 + 1.0);
            for i in 0..g.n[0] {
                let sx = (i as f64 + 1.0) / (g.n[0] as f64 + 1.0);
                let idx = i + g.n[0] * (j + g.n[1] * k);
                let bump = sx * (1.0 - sx) * sy * (1.0 - sy) * sz * (1.0 - sz);
                let well = (-4.0 * (pot.potential[idx] - vmin) / spread).exp();
                x.push(bump * well * (1.0 + 0.01 * rng.random_range(-1.0..1.0)));
            }
        }
    }
    x
}

/// Remove the `basis` components from `v` (modified Gram-Schmidt) and
/// normalise; returns `None` if nothing independent is left.
fn orthonormalize(v: &mut [f64], av: &mut [f64], basis: &[(&[f64], &[f64])]) -> Option<()> {
    let n0 = dot(v, v).sqrt();
    for _ in 0..2 {
        for (b, ab) in basis {
            let c = dot(b, v);
            axpy(c, b, v);
            axpy(c, ab, av);
        }
    }
    let n = dot(v, v).sqrt();
    if !(n > 1e-10 * n0) || n == 0.0 {
        return None;
    }
    scale(1.0 / n, v);
    scale(1.0 / n, av);
    Some(())
}

/// Lowest eigenpair of the effective-mass Hamiltonian on `pot`.
pub fn solve_ground_state(pot: &PotentialGrid, tolerance: f64) -> Result<EnvelopeSolution> {
    solve_with(
        pot,
        &SolverSettings {
            tolerance,
            ..Default::default()
        },
    )
}

pub fn solve_with(pot: &PotentialGrid, settings: &SolverSettings) -> Result<EnvelopeSolution> {
    if !(settings.tolerance > 0.0) {
        return domain(format!("tolerance must be positive, got {}", settings.tolerance));
    }
    let h = Hamiltonian::new(pot)?;
    let len = h.len();
    let inv_diag: Vec<f64> = h.diagonal().iter().map(|d| 1.0 / d).collect();

    let mut x = initial_guess(pot, settings.seed);
    let nx = dot(&x, &x).sqrt();
    scale(1.0 / nx, &mut x);
    let mut ax = vec![0.0; len];
    h.apply(&x, &mut ax);
    let mut p: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut residual = f64::INFINITY;

    for it in 0..settings.max_iterations {
        if it % 25 == 0 {
            h.apply(&x, &mut ax);
        }
        let theta = dot(&x, &ax);
        let r: Vec<f64> = ax.par_iter().zip(x.par_iter()).map(|(a, b)| a - theta * b).collect();
        residual = dot(&r, &r).sqrt() / theta.abs().max(1e-300);
        if !residual.is_finite() {
            return Err(Error::Numerical("non-finite residual in eigensolver".into()));
        }
        if residual < settings.tolerance {
            // confirm with a fresh product before accepting
            h.apply(&x, &mut ax);
            let theta = dot(&x, &ax);
            let r: Vec<f64> = ax.par_iter().zip(x.par_iter()).map(|(a, b)| a - theta * b).collect();
            let res = dot(&r, &r).sqrt() / theta.abs();
            if res < settings.tolerance {
                return Ok(finish(pot, x, theta, it, res));
            }
            continue;
        }

        let mut w: Vec<f64> = r.par_iter().zip(inv_diag.par_iter()).map(|(a, b)| a * b).collect();
        let mut aw = vec![0.0; len];
        h.apply(&w, &mut aw);
        if orthonormalize(&mut w, &mut aw, &[(&x, &ax)]).is_none() {
            return Ok(finish(pot, x, theta, it, residual));
        }
        let mut p_basis = None;
        if let Some((mut pv, mut apv)) = p.take() {
            if orthonormalize(&mut pv, &mut apv, &[(&x, &ax), (&w, &aw)]).is_some() {
                p_basis = Some((pv, apv));
            }
        }

        let basis: Vec<(&[f64], &[f64])> = match &p_basis {
            Some((pv, apv)) => vec![(&x, &ax), (&w, &aw), (pv, apv)],
            None => vec![(&x, &ax), (&w, &aw)],
        };
        let m = basis.len();
        let mut g = Matrix3::<f64>::zeros();
        for a in 0..m {
            for b in a..m {
                let v = dot(basis[a].0, basis[b].1);
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        let sub = g.view((0, 0), (m, m)).into_owned();
        let eig = SymmetricEigen::new(sub);
        let k = (0..m)
            .min_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]))
            .unwrap_or(0);
        let c: Vec<f64> = (0..m).map(|i| eig.eigenvectors[(i, k)]).collect();
        let c2 = if m == 3 { c[2] } else { 0.0 };

        let (pn, apn) = match &p_basis {
            Some((pv, apv)) => (
                combine([c[1], c2], &w, pv),
                combine([c[1], c2], &aw, apv),
            ),
            None => (
                w.iter().map(|v| c[1] * v).collect::<Vec<_>>(),
                aw.iter().map(|v| c[1] * v).collect::<Vec<_>>(),
            ),
        };
        x = combine([c[0], 1.0], &x, &pn);
        ax = combine([c[0], 1.0], &ax, &apn);
        let n = dot(&x, &x).sqrt();
        scale(1.0 / n, &mut x);
        scale(1.0 / n, &mut ax);
        p = Some((pn, apn));
    }
    Err(Error::Convergence {
        iterations: settings.max_iterations,
        residual,
    })
}

fn finish(pot: &PotentialGrid, mut x: Vec<f64>, energy: f64, iterations: usize, residual: f64) -> EnvelopeSolution {
    let n = dot(&x, &x).sqrt();
    scale(1.0 / n, &mut x);
    // fix the overall sign so the largest component is positive
    let imax = x
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if x[imax] < 0.0 {
        scale(-1.0, &mut x);
    }
    let barrier_occupancy = if pot.barrier_fraction > 0.0 {
        let w: Vec<f64> = x
            .iter()
            .zip(&pot.al_fraction)
            .map(|(p, a)| p * p * (a / pot.barrier_fraction).clamp(0.0, 1.0))
            .collect();
        sum(&w).clamp(0.0, 1.0)
    } else {
        0.0
    };
    EnvelopeSolution {
        energy,
        wavefunction: x,
        grid: pot.grid.clone(),
        barrier_occupancy,
        iterations,
        residual,
    }
}
