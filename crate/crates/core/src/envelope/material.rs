//! Zinc-blende material parameters for the GaAs/AlAs system.

use serde::{Deserialize, Serialize};

use crate::{domain, Result};

/// One material's parameter set. Energies in eV, lattice constant in Å,
/// piezoelectric constants in C/m², `c_k` in eV·Å, elastic constants in GPa.
///
/// The single-band surrogate only consumes `e_g`, `vbo`, `e_p`, `m_e`,
/// `delta_so`, `gamma1`, `gamma2` and `g`; the remaining fields are stored
/// for completeness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialRecord {
    pub lattice_a: f64,
    pub e_g: f64,
    pub vbo: f64,
    pub e_p: f64,
    pub m_e: f64,
    pub delta_so: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub e14: f64,
    pub b114: f64,
    pub b124: f64,
    pub b156: f64,
    pub c_k: f64,
    pub a_c: f64,
    pub a_v: f64,
    pub b_v: f64,
    pub d_v: f64,
    pub c11: f64,
    pub c12: f64,
    pub c44: f64,
    pub eps_r: f64,
    pub g: f64,
    pub kappa: f64,
    pub q: f64,
}

pub const GAAS: MaterialRecord = MaterialRecord {
    lattice_a: 5.642,
    e_g: 1.519,
    vbo: -0.80,
    e_p: 28.8,
    m_e: 0.0665,
    delta_so: 0.341,
    gamma1: 6.98,
    gamma2: 2.06,
    gamma3: 2.93,
    e14: -0.205,
    b114: -0.99,
    b124: -3.21,
    b156: -1.28,
    c_k: -0.0034,
    a_c: -7.17,
    a_v: 1.16,
    b_v: -2.0,
    d_v: -4.8,
    c11: 1211.0,
    c12: 566.0,
    c44: 600.0,
    eps_r: 12.4,
    g: -0.44,
    kappa: 1.28,
    q: 0.04,
};

pub const ALAS: MaterialRecord = MaterialRecord {
    lattice_a: 5.652,
    e_g: 3.099,
    vbo: -1.32,
    e_p: 21.1,
    m_e: 0.15,
    delta_so: 0.28,
    gamma1: 3.76,
    gamma2: 0.82,
    gamma3: 1.42,
    e14: -0.055,
    b114: -1.61,
    b124: -2.59,
    b156: -1.32,
    c_k: 0.002,
    a_c: -5.64,
    a_v: 2.47,
    b_v: -2.3,
    d_v: -3.4,
    c11: 1250.0,
    c12: 534.0,
    c44: 542.0,
    eps_r: 10.06,
    g: 1.52,
    kappa: 0.12,
    q: 0.04,
};

impl MaterialRecord {
    /// Conduction band edge `VBO + E_g` (eV).
    pub fn conduction_edge(&self) -> f64 {
        self.vbo + self.e_g
    }

    /// Heavy-hole mass along the growth axis, `m₀/(γ₁ − 2γ₂)`.
    pub fn heavy_hole_mass(&self) -> f64 {
        1.0 / (self.gamma1 - 2.0 * self.gamma2)
    }

    fn lerp(a: &Self, b: &Self, x: f64) -> Self {
        let l = |p: f64, q: f64| (1.0 - x) * p + x * q;
        Self {
            lattice_a: l(a.lattice_a, b.lattice_a),
            e_g: l(a.e_g, b.e_g),
            vbo: l(a.vbo, b.vbo),
            e_p: l(a.e_p, b.e_p),
            m_e: l(a.m_e, b.m_e),
            delta_so: l(a.delta_so, b.delta_so),
            gamma1: l(a.gamma1, b.gamma1),
            gamma2: l(a.gamma2, b.gamma2),
            gamma3: l(a.gamma3, b.gamma3),
            e14: l(a.e14, b.e14),
            b114: l(a.b114, b.b114),
            b124: l(a.b124, b.b124),
            b156: l(a.b156, b.b156),
            c_k: l(a.c_k, b.c_k),
            a_c: l(a.a_c, b.a_c),
            a_v: l(a.a_v, b.a_v),
            b_v: l(a.b_v, b.b_v),
            d_v: l(a.d_v, b.d_v),
            c11: l(a.c11, b.c11),
            c12: l(a.c12, b.c12),
            c44: l(a.c44, b.c44),
            eps_r: l(a.eps_r, b.eps_r),
            g: l(a.g, b.g),
            kappa: l(a.kappa, b.kappa),
            q: l(a.q, b.q),
        }
    }
}

/// GaAs and AlAs records plus the band-gap bowing `C(x) = c0 + c1·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialTable {
    pub gaas: MaterialRecord,
    pub alas: MaterialRecord,
    pub eg_bowing: (f64, f64),
}

impl Default for MaterialTable {
    fn default() -> Self {
        Self {
            gaas: GAAS,
            alas: ALAS,
            eg_bowing: (-0.13, 1.31),
        }
    }
}

impl MaterialTable {
    /// `Al_x Ga_{1-x} As`: linear in every parameter, with
    /// `E_g(x) = (1−x)E_g^GaAs + x E_g^AlAs − x(1−x)(c0 + c1 x)`.
    pub fn interp(&self, x: f64) -> Result<MaterialRecord> {
        if !(0.0..=1.0).contains(&x) {
            return domain(format!("Al fraction must lie in [0, 1], got {x}"));
        }
        Ok(self.interp_unchecked(x))
    }

    pub(crate) fn interp_unchecked(&self, x: f64) -> MaterialRecord {
        if x == 0.0 {
            return self.gaas;
        }
        if x == 1.0 {
            return self.alas;
        }
        let mut m = MaterialRecord::lerp(&self.gaas, &self.alas, x);
        m.e_g -= x * (1.0 - x) * (self.eg_bowing.0 + self.eg_bowing.1 * x);
        m
    }
}

/// Shorthand for [`MaterialTable::interp`] on the built-in table.
pub fn material_interp(x: f64) -> Result<MaterialRecord> {
    MaterialTable::default().interp(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn endpoints_are_verbatim() {
        assert_eq!(material_interp(0.0).unwrap(), GAAS);
        assert_eq!(material_interp(1.0).unwrap(), ALAS);
        assert!(material_interp(-0.1).is_err());
        assert!(material_interp(1.1).is_err());
    }

    #[test]
    fn bowed_gap_and_offsets() {
        let m = material_interp(0.25).unwrap();
        assert_relative_eq!(m.e_g, 1.876969, epsilon = 1e-6);
        assert_relative_eq!(m.conduction_edge() - GAAS.conduction_edge(), 0.228, epsilon = 1e-3);
        assert_relative_eq!(GAAS.vbo - m.vbo, 0.130, epsilon = 1e-12);
    }

    #[test]
    fn continuous_near_endpoints() {
        for x in [1e-9, 1.0 - 1e-9] {
            let a = material_interp(x).unwrap();
            let b = material_interp(x.round()).unwrap();
            assert!((a.e_g - b.e_g).abs() < 1e-8);
            assert!((a.gamma1 - b.gamma1).abs() < 1e-8);
        }
    }

    #[test]
    fn heavy_hole_mass() {
        assert_relative_eq!(GAAS.heavy_hole_mass(), 1.0 / 2.86, epsilon = 1e-12);
    }
}
