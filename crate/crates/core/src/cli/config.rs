//! TOML run configuration. Angles are degrees here and radians everywhere
//! else.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::envelope::{DesignSettings, MaterialTable, SolverSettings};
use crate::holemix::{HoleMixingParameters, HoleModel, MixingKind};
use crate::hyperfine::{NuclearBathParameters, SweepDirection, SweepSpec};
use crate::spinmodel::{FieldConfiguration, GTensor, PLANCK_H};
use crate::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Material table file; the built-in GaAs/AlAs table when absent.
    pub materials: Option<PathBuf>,
    /// Absolute energy of the zero-field line (eV).
    pub center_ev: f64,
    pub field: FieldSection,
    pub electron: GSection,
    pub trion: TrionSection,
    pub bath: BathSection,
    pub drag: DragSection,
    pub design: DesignSection,
    pub rfmap: RfSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            materials: None,
            center_ev: 1.6,
            field: FieldSection::default(),
            electron: GSection {
                g_z: -0.1,
                g_perp: 0.08,
                delta_g_perp: 0.0,
            },
            trion: TrionSection::default(),
            bath: BathSection::default(),
            drag: DragSection::default(),
            design: DesignSection::default(),
            rfmap: RfSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    /// Field magnitude (T).
    #[serde(rename = "B")]
    pub b: f64,
    pub chi_deg: f64,
    pub phi_deg: f64,
}

impl Default for FieldSection {
    fn default() -> Self {
        Self {
            b: 5.8,
            chi_deg: 90.0,
            phi_deg: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GSection {
    pub g_z: f64,
    pub g_perp: f64,
    pub delta_g_perp: f64,
}

impl Default for GSection {
    fn default() -> Self {
        Self {
            g_z: 0.0,
            g_perp: 0.0,
            delta_g_perp: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrionSection {
    /// `"gtensor"` or `"mixing"`.
    pub model: String,
    pub g_z: f64,
    pub g_perp: f64,
    pub delta_g_perp: f64,
    pub kappa: f64,
    pub q_eff: f64,
    pub t_eff: f64,
    pub delta_lh_ghz: f64,
    pub terms: Vec<String>,
}

impl Default for TrionSection {
    fn default() -> Self {
        let p = HoleMixingParameters::default();
        Self {
            model: "gtensor".into(),
            g_z: -0.3,
            g_perp: 0.13,
            delta_g_perp: 0.0,
            kappa: p.kappa,
            q_eff: p.q_eff,
            t_eff: p.t_eff,
            delta_lh_ghz: p.delta_lh / PLANCK_H,
            terms: MixingKind::ALL.iter().map(|k| k.name().to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BathSection {
    pub a: f64,
    pub gamma_n_b: f64,
    pub relax_rate: f64,
    pub sideband_rate: f64,
    pub linewidth_ghz: f64,
}

impl Default for BathSection {
    fn default() -> Self {
        let b = NuclearBathParameters::default();
        Self {
            a: b.a,
            gamma_n_b: b.gamma_n_b,
            relax_rate: b.relax_rate,
            sideband_rate: b.sideband_rate,
            linewidth_ghz: b.optical_linewidth / PLANCK_H,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DragSection {
    pub start: f64,
    pub stop: f64,
    pub rate: f64,
    pub samples: usize,
}

impl Default for DragSection {
    fn default() -> Self {
        let s = SweepSpec::default();
        Self {
            start: s.start,
            stop: s.stop,
            rate: s.rate,
            samples: s.samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSection {
    /// AFM heightmap CSV; the built-in paraboloid when absent.
    pub afm: Option<PathBuf>,
    pub h_min: f64,
    pub h_max: f64,
    pub h_steps: usize,
    pub r_values: Vec<f64>,
    pub grid: [usize; 3],
    pub padding: f64,
    pub interface_sigma: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub binding_energy_mev: f64,
}

impl Default for DesignSection {
    fn default() -> Self {
        let d = DesignSettings::default();
        Self {
            afm: None,
            h_min: 0.2,
            h_max: 2.5,
            h_steps: 12,
            r_values: vec![0.25],
            grid: d.grid,
            padding: d.padding,
            interface_sigma: d.interface_sigma,
            tolerance: d.solver.tolerance,
            max_iterations: d.solver.max_iterations,
            binding_energy_mev: d.binding_energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfSection {
    /// GHz/V
    pub stark_slope: f64,
    pub windows: Vec<[f64; 2]>,
    pub linewidth_ghz: f64,
    pub gate_min: f64,
    pub gate_max: f64,
    pub gate_steps: usize,
    pub gate_ref: f64,
    pub noise: f64,
}

impl Default for RfSection {
    fn default() -> Self {
        Self {
            stark_slope: 2.0,
            windows: vec![[0.0, 1.0]],
            linewidth_ghz: 0.72,
            gate_min: -0.25,
            gate_max: 1.25,
            gate_steps: 61,
            gate_ref: 0.5,
            noise: 0.01,
        }
    }
}

impl RunConfig {
    /// Read and validate a config file. Relative paths inside it are taken
    /// relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(q) = p {
                if q.is_relative() {
                    *q = base.join(&*q);
                }
            }
        };
        rebase(&mut cfg.materials);
        rebase(&mut cfg.design.afm);
        Ok(cfg)
    }

    /// Check that referenced files exist and values are usable.
    pub fn validate(&self) -> Result<()> {
        for p in [&self.materials, &self.design.afm].into_iter().flatten() {
            if !p.exists() {
                return Err(Error::Io {
                    path: p.display().to_string(),
                    source: std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
                });
            }
        }
        self.field_config()?;
        self.electron_g()?;
        self.hole_model()?;
        self.bath()?;
        Ok(())
    }

    pub fn field_config(&self) -> Result<FieldConfiguration> {
        FieldConfiguration::new(
            self.field.b,
            self.field.chi_deg.to_radians(),
            self.field.phi_deg.to_radians(),
        )
    }

    pub fn electron_g(&self) -> Result<GTensor> {
        let e = &self.electron;
        GTensor::new(e.g_z, e.g_perp, e.delta_g_perp)
    }

    pub fn hole_model(&self) -> Result<HoleModel> {
        let t = &self.trion;
        match t.model.as_str() {
            "gtensor" => Ok(HoleModel::GTensor(GTensor::new(t.g_z, t.g_perp, t.delta_g_perp)?)),
            "mixing" => {
                let params = HoleMixingParameters::new(t.kappa, t.q_eff, t.t_eff, t.delta_lh_ghz * PLANCK_H)?;
                let enabled = t
                    .terms
                    .iter()
                    .map(|s| MixingKind::parse(s))
                    .collect::<Result<Vec<_>>>()?;
                Ok(HoleModel::Mixing {
                    g_z: t.g_z,
                    params,
                    enabled,
                })
            }
            other => domain(format!("trion.model must be 'gtensor' or 'mixing', got '{other}'")),
        }
    }

    /// In-plane trion g used for magnitude ordering.
    pub fn trion_g_perp(&self) -> Result<f64> {
        let field = self.field_config()?;
        Ok(match self.hole_model()? {
            HoleModel::GTensor(g) => g.g_perp(field.phi),
            HoleModel::Mixing { params, enabled, .. } => {
                crate::holemix::trion_inplane_response(field.b_perp().max(1e-9), field.phi, &params, &enabled)?.0
            }
        })
    }

    pub fn bath(&self) -> Result<NuclearBathParameters> {
        let b = &self.bath;
        NuclearBathParameters::new(b.a, b.gamma_n_b, b.relax_rate, b.sideband_rate, b.linewidth_ghz * PLANCK_H)
    }

    pub fn drag_sweep(&self) -> SweepSpec {
        SweepSpec {
            start: self.drag.start,
            stop: self.drag.stop,
            rate: self.drag.rate,
            direction: SweepDirection::Up,
            samples: self.drag.samples,
        }
    }

    pub fn material_table(&self) -> Result<MaterialTable> {
        match &self.materials {
            None => Ok(MaterialTable::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn design_settings(&self) -> Result<DesignSettings> {
        let d = &self.design;
        if d.grid.iter().any(|n| *n < 4) {
            return domain("design.grid needs at least 4 points per axis");
        }
        Ok(DesignSettings {
            grid: d.grid,
            padding: d.padding,
            interface_sigma: d.interface_sigma,
            solver: SolverSettings {
                tolerance: d.tolerance,
                max_iterations: d.max_iterations,
                seed: self.seed,
            },
            binding_energy: d.binding_energy_mev,
            materials: self.material_table()?,
        })
    }

    /// Canonical text used for the output hash.
    pub fn canonical(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}
