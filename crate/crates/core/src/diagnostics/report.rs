use std::io::Write;

use crate::error::Result;
use crate::sbp::FaceId;
use crate::scalar::Real;

/// One monitor sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub t: T,
    /// ‖U‖² in the evolved norm P_eff ⊗ P_Ω.
    pub energy: T,
    /// ‖U‖² in the physical norm P ⊗ P_Ω.
    pub physical_energy: T,
    /// Physical boundary flux per face, in the order of [`EnergyReport::faces`].
    pub boundary_terms: Vec<T>,
    /// Canonical SAT energy per face.
    pub sat_terms: Vec<T>,
    pub identity_residual: T,
    /// 2∫ Σ_faces s GᵀG ds dt so far.
    pub data_integral: T,
    /// ‖D_x u + D_y v‖ for the incompressible systems.
    pub divergence: Option<T>,
    /// ∮ Ψ·n ds.
    pub entropy_flux: T,
    pub entropy_residual: T,
}

/// Per-step quantities used by the bound checks.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<T> {
    pub t: T,
    pub energy: T,
    pub data_integral: T,
    /// Smallest s[WᵀΛW + 2(W⁻)ᵀΣr + GᵀG] summed over a weak face, or
    /// `None` without weak faces.
    pub face_margin: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport<T> {
    pub faces: Vec<FaceId>,
    pub samples: Vec<Sample<T>>,
    pub steps: Vec<StepRecord<T>>,
    /// ‖F‖² in the evolved norm.
    pub initial_energy: T,
    /// No boundary data and no forcing.
    pub homogeneous: bool,
}

impl<T: Real> EnergyReport<T> {
    pub fn csv_header(&self) -> Vec<String> {
        let mut cols = vec!["t".to_string(), "energy".into(), "physical_energy".into()];
        cols.extend(self.faces.iter().map(|f| format!("boundary_term_{f}")));
        cols.extend(self.faces.iter().map(|f| format!("sat_term_{f}")));
        cols.extend(
            [
                "identity_residual",
                "data_integral",
                "divergence_norm",
                "entropy_flux",
                "entropy_residual",
            ]
            .map(String::from),
        );
        cols
    }

    /// Header plus one row per sample, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.csv_header().join(","))?;
        let fmt = |v: T| format!("{:.16e}", v.to_f64_lossy());
        for s in &self.samples {
            let mut row = vec![fmt(s.t), fmt(s.energy), fmt(s.physical_energy)];
            row.extend(s.boundary_terms.iter().map(|&v| fmt(v)));
            row.extend(s.sat_terms.iter().map(|&v| fmt(v)));
            row.push(fmt(s.identity_residual));
            row.push(fmt(s.data_integral));
            row.push(s.divergence.map(fmt).unwrap_or_default());
            row.push(fmt(s.entropy_flux));
            row.push(fmt(s.entropy_residual));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn max_identity_residual(&self) -> T {
        self.samples
            .iter()
            .fold(T::zero(), |m, s| m.max(s.identity_residual))
    }

    pub fn final_energy(&self) -> T {
        self.steps.last().map_or(self.initial_energy, |s| s.energy)
    }
}
