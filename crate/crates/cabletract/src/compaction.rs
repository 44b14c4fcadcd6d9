//! Contact-pressure compaction metrics for the reference tractor and the
//! carriage over a multi-pass season.

use serde::Deserialize;

use crate::error::{domain, Error, Result};
use crate::fields::FieldPolygon;
use crate::physics::GRAVITY;
use crate::planner::StripPlan;

pub const DEFAULT_PASSES: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMode {
    /// Wheels cover a fixed share of the field on every pass.
    FullField,
    /// Rollers follow the strip midlines only.
    StripMidline,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactElement {
    pub load_share: f64,
    pub patch_area_m2: f64,
    pub width_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleFootprint {
    pub name: String,
    pub mode: CoverageMode,
    pub total_mass_kg: f64,
    /// Per-pass covered share of the field in full-field mode.
    pub coverage_fraction: f64,
    pub elements: Vec<ContactElement>,
}

impl VehicleFootprint {
    pub fn validate(&self) -> Result<()> {
        let shares: f64 = self.elements.iter().map(|e| e.load_share).sum();
        if self.elements.is_empty() || (shares - 1.0).abs() > 1e-9 {
            return Err(domain(format!("{}: load shares must sum to 1", self.name)));
        }
        if self.elements.iter().any(|e| !(e.patch_area_m2 > 0.0 && e.width_m > 0.0 && e.load_share >= 0.0)) {
            return Err(domain(format!("{}: patches need positive area and width", self.name)));
        }
        if !(self.total_mass_kg > 0.0) {
            return Err(domain(format!("{}: mass must be positive", self.name)));
        }
        if self.mode == CoverageMode::FullField && !(0.0..=1.0).contains(&self.coverage_fraction) {
            return Err(domain(format!("{}: coverage fraction must be in [0, 1]", self.name)));
        }
        Ok(())
    }

    /// Contact pressure of each element, kPa.
    pub fn element_pressures_kpa(&self) -> Vec<f64> {
        let w = self.total_mass_kg * GRAVITY;
        self.elements
            .iter()
            .map(|e| e.load_share * w / e.patch_area_m2 / 1000.0)
            .collect()
    }

    /// Load-weighted mean contact pressure, kPa.
    pub fn mean_pressure_kpa(&self) -> f64 {
        self.elements
            .iter()
            .zip(self.element_pressures_kpa())
            .map(|(e, p)| e.load_share * p)
            .sum()
    }

    pub fn max_pressure_kpa(&self) -> f64 {
        self.element_pressures_kpa().into_iter().fold(0.0, f64::max)
    }

    pub fn track_width_m(&self) -> f64 {
        self.elements.iter().map(|e| e.width_m).sum()
    }

    /// Σ p² · A_patch for one pass, kPa²·m².
    pub fn index_per_pass(&self) -> f64 {
        self.elements
            .iter()
            .zip(self.element_pressures_kpa())
            .map(|(e, p)| p * p * e.patch_area_m2)
            .sum()
    }
}

#[derive(Debug, Deserialize)]
struct VehicleRow {
    vehicle: String,
    mode: CoverageMode,
    mass_kg: f64,
    coverage_fraction: f64,
    #[allow(dead_code)]
    element: String,
    load_share: f64,
    patch_area_m2: f64,
    width_m: f64,
}

/// Rows sharing a vehicle name form one footprint; `#` lines are comments.
pub fn load_vehicles(csv_text: &str) -> Result<Vec<VehicleFootprint>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv_text.as_bytes());
    let mut out: Vec<VehicleFootprint> = Vec::new();
    for row in rdr.deserialize() {
        let r: VehicleRow = row?;
        let el = ContactElement {
            load_share: r.load_share,
            patch_area_m2: r.patch_area_m2,
            width_m: r.width_m,
        };
        match out.iter_mut().find(|v| v.name == r.vehicle) {
            Some(v) => v.elements.push(el),
            None => out.push(VehicleFootprint {
                name: r.vehicle,
                mode: r.mode,
                total_mass_kg: r.mass_kg,
                coverage_fraction: r.coverage_fraction,
                elements: vec![el],
            }),
        }
    }
    for v in &out {
        v.validate()?;
    }
    Ok(out)
}

pub fn bundled_vehicles() -> Vec<VehicleFootprint> {
    load_vehicles(crate::data::VEHICLES_CSV).expect("bundled vehicle table parses")
}

pub fn bundled_vehicle(name: &str) -> Result<VehicleFootprint> {
    bundled_vehicles()
        .into_iter()
        .find(|v| v.name == name)
        .ok_or_else(|| Error::Unknown {
            kind: "vehicle",
            name: name.to_string(),
        })
}

pub fn reference_tractor() -> VehicleFootprint {
    bundled_vehicle("tractor_80hp_4wd").expect("bundled tractor")
}

pub fn carriage() -> VehicleFootprint {
    bundled_vehicle("carriage").expect("bundled carriage")
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleMetrics {
    pub vehicle: String,
    pub compacted_area_m2: f64,
    pub compacted_fraction: f64,
    pub mean_pressure_kpa: f64,
    pub max_pressure_kpa: f64,
    pub contact_energy_index: f64,
}

/// Compacted area counts every pass; the fraction is taken against
/// field area times passes. In strip mode each piece contributes one
/// midline as long as its extent along the strip.
pub fn compaction_metrics(
    field: &FieldPolygon,
    vehicle: &VehicleFootprint,
    plan: Option<&StripPlan>,
    passes: u32,
) -> Result<VehicleMetrics> {
    vehicle.validate()?;
    if passes == 0 {
        return Err(domain("at least one pass is required"));
    }
    let area = field.area();
    let n = passes as f64;
    let compacted = match vehicle.mode {
        CoverageMode::FullField => area * vehicle.coverage_fraction * n,
        CoverageMode::StripMidline => {
            let plan = plan.ok_or_else(|| domain("strip-midline coverage needs a strip plan"))?;
            if plan.field_id != field.id {
                return Err(domain(format!("plan for {} applied to {}", plan.field_id, field.id)));
            }
            plan.total_bounds_length_m() * vehicle.track_width_m() * n
        }
    };
    Ok(VehicleMetrics {
        vehicle: vehicle.name.clone(),
        compacted_area_m2: compacted,
        compacted_fraction: compacted / (area * n),
        mean_pressure_kpa: vehicle.mean_pressure_kpa(),
        max_pressure_kpa: vehicle.max_pressure_kpa(),
        contact_energy_index: vehicle.index_per_pass() * n,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactionReport {
    pub field_id: String,
    pub class: String,
    pub tractor: VehicleMetrics,
    pub carriage: VehicleMetrics,
    pub area_reduction: f64,
    pub energy_index_reduction: f64,
}

pub fn compare(field: &FieldPolygon, plan: &StripPlan, passes: u32) -> Result<CompactionReport> {
    let t = compaction_metrics(field, &reference_tractor(), None, passes)?;
    let c = compaction_metrics(field, &carriage(), Some(plan), passes)?;
    Ok(CompactionReport {
        field_id: field.id.clone(),
        class: field.class.to_string(),
        area_reduction: (1.0 - c.compacted_fraction / t.compacted_fraction).max(0.0),
        energy_index_reduction: t.contact_energy_index / c.contact_energy_index,
        tractor: t,
        carriage: c,
    })
}
