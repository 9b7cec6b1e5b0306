//! Nanohole profiles, GaAs filling and the resulting band-edge grids.

use std::path::Path;

use super::material::MaterialTable;
use crate::csvio::{io_err, parse_numeric};
use crate::{domain, Error, Result};

pub const AFM_HEADER: [&str; 3] = ["x_nm", "y_nm", "depth_nm"];

/// Etched depth on a uniform lateral grid, row-major in `y` then `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct NanoholeProfile {
    pub nx: usize,
    pub ny: usize,
    /// Lateral spacing (nm).
    pub pitch: f64,
    /// Depth below the original surface (nm, ≥ 0), index `ix + nx·iy`.
    pub depth: Vec<f64>,
}

impl NanoholeProfile {
    pub fn new(nx: usize, ny: usize, pitch: f64, depth: Vec<f64>) -> Result<Self> {
        if nx < 16 || ny < 16 {
            return domain(format!("profile grid must be at least 16x16, got {nx}x{ny}"));
        }
        if !(pitch > 0.0) {
            return domain(format!("profile pitch must be positive, got {pitch}"));
        }
        if depth.len() != nx * ny {
            return domain("profile depth array does not match grid size");
        }
        if depth.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return domain("profile depths must be finite and non-negative");
        }
        Ok(Self {
            nx,
            ny,
            pitch,
            depth,
        })
    }

    /// Rotationally symmetric paraboloid `d(ρ) = D(1 − ρ²/R²)` for `ρ < R`,
    /// centred on an `extent × extent` nm field.
    pub fn paraboloid(extent: f64, pitch: f64, depth: f64, radius: f64) -> Result<Self> {
        let n = (extent / pitch).round() as usize;
        let c = 0.5 * (n as f64 - 1.0) * pitch;
        let mut d = Vec::with_capacity(n * n);
        for iy in 0..n {
            for ix in 0..n {
                let x = ix as f64 * pitch - c;
                let y = iy as f64 * pitch - c;
                let r2 = (x * x + y * y) / (radius * radius);
                d.push(if r2 < 1.0 { depth * (1.0 - r2) } else { 0.0 });
            }
        }
        Self::new(n, n, pitch, d)
    }

    /// The built-in stand-in for a measured droplet-etched hole: 6.5 nm deep,
    /// 31 nm radius, on a 100 nm field at 1 nm pitch.
    pub fn default_afm() -> Self {
        Self::paraboloid(100.0, 1.0, 6.5, 31.0).expect("valid built-in profile")
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.nx as f64 * self.pitch, self.ny as f64 * self.pitch)
    }

    pub fn area(&self) -> f64 {
        let (a, b) = self.extent();
        a * b
    }

    pub fn max_depth(&self) -> f64 {
        self.depth.iter().cloned().fold(0.0, f64::max)
    }

    /// Bilinear depth at lateral position `(x, y)`, measured from the field
    /// centre; zero outside the field.
    pub fn depth_at(&self, x: f64, y: f64) -> f64 {
        let fx = (x / self.pitch) + 0.5 * (self.nx as f64 - 1.0);
        let fy = (y / self.pitch) + 0.5 * (self.ny as f64 - 1.0);
        if fx < 0.0 || fy < 0.0 || fx > (self.nx - 1) as f64 || fy > (self.ny - 1) as f64 {
            return 0.0;
        }
        let ix = (fx.floor() as usize).min(self.nx - 2);
        let iy = (fy.floor() as usize).min(self.ny - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let d = |i: usize, j: usize| self.depth[i + self.nx * j];
        (1.0 - tx) * (1.0 - ty) * d(ix, iy)
            + tx * (1.0 - ty) * d(ix + 1, iy)
            + (1.0 - tx) * ty * d(ix, iy + 1)
            + tx * ty * d(ix + 1, iy + 1)
    }

    /// GaAs volume (nm³) below fill level `z_f` (surface at 0, hole bottom
    /// at `−depth`).
    pub fn filled_volume(&self, z_f: f64) -> f64 {
        let cell = self.pitch * self.pitch;
        self.depth
            .iter()
            .map(|d| (z_f + d).max(0.0) * cell)
            .sum()
    }

    /// Fill level at which the GaAs volume equals a uniform layer of
    /// thickness `h` over the whole field.
    pub fn fill_level(&self, h: f64) -> f64 {
        let target = h * self.area();
        let (mut lo, mut hi) = (-self.max_depth(), h.max(0.0) + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.filled_volume(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn from_csv_text(text: &str) -> Result<Self> {
        let t = parse_numeric(text)?;
        for h in AFM_HEADER {
            if !t.header.iter().any(|c| c == h) {
                return Err(Error::Parse(format!("AFM file lacks column '{h}'")));
            }
        }
        let xs = t.column("x_nm").unwrap_or_default();
        let ys = t.column("y_nm").unwrap_or_default();
        let ds = t.column("depth_nm").unwrap_or_default();
        let mut ux: Vec<f64> = xs.clone();
        ux.sort_by(f64::total_cmp);
        ux.dedup();
        let mut uy: Vec<f64> = ys.clone();
        uy.sort_by(f64::total_cmp);
        uy.dedup();
        let (nx, ny) = (ux.len(), uy.len());
        if nx < 2 || ny < 2 || nx * ny != ds.len() {
            return Err(Error::Parse("AFM grid is not a complete rectangular grid".into()));
        }
        let pitch = ux[1] - ux[0];
        let uniform = |u: &[f64]| u.windows(2).all(|w| ((w[1] - w[0]) - pitch).abs() < 1e-6 * pitch.max(1.0));
        if !uniform(&ux) || !uniform(&uy) {
            return Err(Error::Parse("AFM grid must be uniform with equal x and y pitch".into()));
        }
        let mut depth = vec![f64::NAN; nx * ny];
        for k in 0..ds.len() {
            let ix = ((xs[k] - ux[0]) / pitch).round() as usize;
            let iy = ((ys[k] - uy[0]) / pitch).round() as usize;
            depth[ix + nx * iy] = ds[k];
        }
        if depth.iter().any(|d| d.is_nan()) {
            return Err(Error::Parse("AFM grid has missing points".into()));
        }
        Self::new(nx, ny, pitch, depth)
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(&path.display().to_string()))?;
        Self::from_csv_text(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Rows `(x, y, depth)` with coordinates from the field corner.
    pub fn rows(&self) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(self.depth.len());
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                out.push([
                    ix as f64 * self.pitch,
                    iy as f64 * self.pitch,
                    self.depth[ix + self.nx * iy],
                ]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QDGeometry {
    pub profile: NanoholeProfile,
    /// Nominal GaAs filling height (nm).
    pub fill_height: f64,
    /// Al fraction of the surrounding barrier.
    pub al_fraction: f64,
    /// Width of the Gaussian interface smoothing (nm).
    pub interface_sigma: f64,
}

impl QDGeometry {
    pub fn new(profile: NanoholeProfile, fill_height: f64, al_fraction: f64) -> Result<Self> {
        Self::with_sigma(profile, fill_height, al_fraction, 1.5)
    }

    pub fn with_sigma(
        profile: NanoholeProfile,
        fill_height: f64,
        al_fraction: f64,
        interface_sigma: f64,
    ) -> Result<Self> {
        if !(fill_height > 0.0) {
            return domain(format!("filling height must be positive, got {fill_height}"));
        }
        if !(0.0..=1.0).contains(&al_fraction) {
            return domain(format!("Al fraction must lie in [0, 1], got {al_fraction}"));
        }
        if !(interface_sigma >= 0.0) {
            return domain("interface smoothing must be non-negative");
        }
        Ok(Self {
            profile,
            fill_height,
            al_fraction,
            interface_sigma,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Conduction,
    Valence,
}

/// Uniform 3D grid, index `i + nx·(j + ny·k)`, with `z` along growth.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid3 {
    pub n: [usize; 3],
    /// Spacing (nm).
    pub h: [f64; 3],
    /// Coordinate of the first point (nm).
    pub origin: [f64; 3],
}

impl Grid3 {
    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.h[axis]
    }

    pub fn cell_volume(&self) -> f64 {
        self.h[0] * self.h[1] * self.h[2]
    }
}

/// Potential (meV) and inverse effective mass (units of 1/m₀) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub grid: Grid3,
    pub potential: Vec<f64>,
    pub inv_mass: Vec<f64>,
    /// Local Al fraction after smoothing.
    pub al_fraction: Vec<f64>,
    /// Nominal barrier Al fraction.
    pub barrier_fraction: f64,
}

/// Al fraction on the solver grid: GaAs between the hole bottom and the
/// fill level, barrier elsewhere; each cell holds the GaAs length fraction
/// of its vertical extent so the result varies continuously with `h`.
pub fn composition(geom: &QDGeometry, n: [usize; 3], padding: f64) -> (Grid3, Vec<f64>) {
    let p = &geom.profile;
    let z_f = p.fill_level(geom.fill_height);
    let (ex, ey) = p.extent();
    let z_lo = -p.max_depth() - padding;
    let z_hi = z_f.max(0.0) + padding;
    let h = [
        ex / n[0] as f64,
        ey / n[1] as f64,
        (z_hi - z_lo) / n[2] as f64,
    ];
    let origin = [
        -0.5 * ex + 0.5 * h[0],
        -0.5 * ey + 0.5 * h[1],
        z_lo + 0.5 * h[2],
    ];
    let grid = Grid3 { n, h, origin };
    let r = geom.al_fraction;
    let mut x = vec![r; grid.len()];
    for j in 0..n[1] {
        let y = grid.coord(1, j);
        for i in 0..n[0] {
            let d = p.depth_at(grid.coord(0, i), y);
            let (bot, top) = (-d, z_f);
            if top <= bot {
                continue;
            }
            for k in 0..n[2] {
                let zc = grid.coord(2, k);
                let (c0, c1) = (zc - 0.5 * h[2], zc + 0.5 * h[2]);
                let overlap = (c1.min(top) - c0.max(bot)).max(0.0) / h[2];
                x[i + n[0] * (j + n[1] * k)] = r * (1.0 - overlap);
            }
        }
    }
    (grid, x)
}

fn gaussian_kernel(sigma: f64, h: f64) -> Vec<f64> {
    let half = ((4.0 * sigma / h).ceil() as isize).max(1);
    let mut k: Vec<f64> = (-half..=half)
        .map(|i| {
            let u = i as f64 * h / sigma;
            (-0.5 * u * u).exp()
        })
        .collect();
    let s: f64 = k.iter().sum();
    for v in &mut k {
        *v /= s;
    }
    k
}

/// Separable Gaussian blur with edge replication.
pub fn smooth(grid: &Grid3, field: &[f64], sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return field.to_vec();
    }
    let n = grid.n;
    let stride = [1, n[0], n[0] * n[1]];
    let mut cur = field.to_vec();
    for axis in 0..3 {
        let k = gaussian_kernel(sigma, grid.h[axis]);
        let half = (k.len() / 2) as isize;
        let len = n[axis] as isize;
        let mut next = vec![0.0; cur.len()];
        for (idx, out) in next.iter_mut().enumerate() {
            let pos = ((idx / stride[axis]) % n[axis]) as isize;
            let base = idx as isize - pos * stride[axis] as isize;
            let mut acc = 0.0;
            for (t, w) in k.iter().enumerate() {
                let q = (pos + t as isize - half).clamp(0, len - 1);
                acc += w * cur[(base + q * stride[axis] as isize) as usize];
            }
            *out = acc;
        }
        cur = next;
    }
    cur
}

/// Band-edge potential and mass grids for one carrier.
///
/// Electrons see `E_c(x) − E_c(0)` with `E_c = VBO + E_g` and mass `m_e*(x)`;
/// holes see `VBO(0) − VBO(x)` with the heavy-hole mass `m₀/(γ₁ − 2γ₂)`.
pub fn build_potential(
    geom: &QDGeometry,
    band: Band,
    materials: &MaterialTable,
    n: [usize; 3],
    padding: f64,
) -> PotentialGrid {
    let (grid, raw) = composition(geom, n, padding);
    let al = smooth(&grid, &raw, geom.interface_sigma);
    let base = materials.gaas;
    let mut potential = Vec::with_capacity(al.len());
    let mut inv_mass = Vec::with_capacity(al.len());
    for &x in &al {
        let m = materials.interp_unchecked(x.clamp(0.0, 1.0));
        match band {
            Band::Conduction => {
                potential.push(1000.0 * (m.conduction_edge() - base.conduction_edge()));
                inv_mass.push(1.0 / m.m_e);
            }
            Band::Valence => {
                potential.push(1000.0 * (base.vbo - m.vbo));
                inv_mass.push(1.0 / m.heavy_hole_mass());
            }
        }
    }
    PotentialGrid {
        grid,
        potential,
        inv_mass,
        al_fraction: al,
        barrier_fraction: geom.al_fraction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_profile() -> NanoholeProfile {
        NanoholeProfile::paraboloid(40.0, 1.0, 5.0, 12.0).unwrap()
    }

    #[test]
    fn fill_level_conserves_volume() {
        let p = small_profile();
        for h in [0.1, 0.5, 1.5] {
            let z = p.fill_level(h);
            assert_relative_eq!(p.filled_volume(z), h * p.area(), max_relative = 1e-9);
        }
        assert!(p.fill_level(0.1) < 0.0);
        assert!(p.fill_level(3.0) > 0.0);
    }

    #[test]
    fn composition_volume_matches_fill() {
        let p = small_profile();
        let g = QDGeometry::with_sigma(p.clone(), 0.4, 0.3, 0.0).unwrap();
        let (grid, x) = composition(&g, [40, 40, 40], 5.0);
        let gaas: f64 = x.iter().map(|v| (1.0 - v / 0.3) * grid.cell_volume()).sum();
        assert_relative_eq!(gaas, 0.4 * p.area(), max_relative = 0.05);
    }

    #[test]
    fn step_profile_without_smoothing() {
        let g = QDGeometry::with_sigma(small_profile(), 2.0, 0.25, 0.0).unwrap();
        let pot = build_potential(&g, Band::Conduction, &MaterialTable::default(), [20, 20, 30], 5.0);
        let max = pot.potential.iter().cloned().fold(0.0, f64::max);
        assert_relative_eq!(max, 227.97, epsilon = 0.1);
        assert!(pot.potential.contains(&0.0));
    }

    #[test]
    fn pure_gaas_is_flat() {
        let g = QDGeometry::new(small_profile(), 1.0, 0.0).unwrap();
        for band in [Band::Conduction, Band::Valence] {
            let pot = build_potential(&g, band, &MaterialTable::default(), [16, 16, 16], 5.0);
            assert!(pot.potential.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn smoothing_preserves_constants_and_mean() {
        let grid = Grid3 {
            n: [12, 10, 8],
            h: [1.0, 1.0, 0.5],
            origin: [0.0; 3],
        };
        let c = vec![0.3; grid.len()];
        for v in smooth(&grid, &c, 1.5) {
            assert_relative_eq!(v, 0.3, epsilon = 1e-14);
        }
    }

    #[test]
    fn csv_round_trip() {
        let p = small_profile();
        let mut text = String::from("x_nm,y_nm,depth_nm\n");
        for r in p.rows() {
            text.push_str(&format!("{},{},{}\n", r[0], r[1], r[2]));
        }
        let q = NanoholeProfile::from_csv_text(&text).unwrap();
        assert_eq!(q.nx, p.nx);
        assert_relative_eq!(q.pitch, p.pitch);
        assert_eq!(q.depth, p.depth);
        assert!(NanoholeProfile::from_csv_text("x_nm,y_nm\n1,2\n").is_err());
    }

    #[test]
    fn profile_validation() {
        assert!(NanoholeProfile::new(8, 8, 1.0, vec![0.0; 64]).is_err());
        assert!(NanoholeProfile::new(16, 16, 1.0, vec![-1.0; 256]).is_err());
        assert!(QDGeometry::new(small_profile(), 0.0, 0.2).is_err());
        assert!(QDGeometry::new(small_profile(), 1.0, 1.2).is_err());
    }
}
