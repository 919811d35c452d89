//! Multi-zone humid-air cabin with two-node walls and longwave radiation.
//!
//! Differential variables are ordered `[T^wi, T^we, h, x]`: internal and
//! external wall node temperatures (°C), zone specific enthalpies (J/kg dry
//! air) and zone absolute humidities (kg/kg). Algebraic variables are
//! `[T^a, Q, r]`: zone air temperatures, the wall heat fluxes (convective,
//! conductive, external convective, internal and external longwave) and zone
//! relative humidities. Radiative fluxes use absolute temperatures, so the
//! model is nonlinear.
//!
//! Zone air mass is constant. Ventilation is driven by the HVAC inlet flow:
//! zone `z` receives `inlet_fraction` of the inlet air and passes `fraction`
//! of its throughput to each downstream zone; the remainder is extracted. A
//! fixed mixing flow circulates around the zones in index order and a fixed
//! ambient infiltration enters each zone in proportion to its volume.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::psychro::{
    absolute_humidity_unchecked, enthalpy, saturation_pressure, temperature_from_enthalpy, vapour_pressure,
    CP_DRY_AIR, CP_VAPOUR, LATENT_HEAT, STANDARD_PRESSURE,
};
use crate::dae::{DaeModel, Equations, IncidenceBuilder, InputChannel, ModelSource, VariableSpace};
use crate::error::{Error, Result};

pub const MULTIZONE_KIND: &str = "multizone_cabin";

/// Snapshot scale divisor for specific enthalpies, J/(kg·K).
pub const ENTHALPY_SCALE: f64 = 1000.0;
/// Snapshot scale factor for absolute humidities (kg/kg to g/kg).
pub const HUMIDITY_SCALE: f64 = 1000.0;

const SIGMA: f64 = 5.670_374_419e-8;
const KELVIN: f64 = 273.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneConfig {
    pub name: String,
    /// m³
    pub volume: f64,
    /// Share of the HVAC inlet flow blown into this zone.
    pub inlet_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallKind {
    Opaque,
    Window,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallConfig {
    pub name: String,
    pub zone: usize,
    pub kind: WallKind,
    /// m²
    pub area: f64,
    /// J/K
    pub inner_capacitance: f64,
    /// J/K
    pub outer_capacitance: f64,
    /// Internal-to-external node conductance, W/K.
    pub conductance: f64,
    pub emissivity: f64,
    /// Shortwave absorptance of the external surface.
    pub absorptance: f64,
    /// Whether the external node sees the ambience.
    pub exposed: bool,
}

/// Share `fraction` of the throughput of zone `from` flows into zone `to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowLink {
    pub from: usize,
    pub to: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MultizoneConfig {
    pub zones: Vec<ZoneConfig>,
    pub walls: Vec<WallConfig>,
    pub flows: Vec<FlowLink>,
    /// Ring circulation between consecutive zones, kg/h.
    pub mixing_flow: f64,
    /// Total ambient infiltration, kg/h.
    pub infiltration: f64,
    /// Internal convective coefficient, W/(m²·K).
    pub h_int: f64,
    pub window_transmissivity: f64,
    /// Pa
    pub pressure: f64,
    /// kg/m³
    pub air_density: f64,
    /// °C, all walls and zones
    pub initial_temperature: f64,
    /// fraction
    pub initial_relative_humidity: f64,
    pub radiation: bool,
}

impl Default for MultizoneConfig {
    /// Six zones, 24 walls: N_θ = 60.
    fn default() -> Self {
        let zone_names = ["front_left", "front_right", "rear_left", "rear_right", "head", "recirc"];
        let volumes = [0.55, 0.55, 0.65, 0.65, 0.45, 0.5];
        let inlet = [0.3, 0.3, 0.15, 0.15, 0.1, 0.0];
        let zones = zone_names
            .iter()
            .zip(volumes)
            .zip(inlet)
            .map(|((n, volume), inlet_fraction)| ZoneConfig {
                name: n.to_string(),
                volume,
                inlet_fraction,
            })
            .collect();

        let mut walls = Vec::new();
        for (z, zname) in zone_names.iter().enumerate() {
            let f = 1.0 + 0.07 * z as f64;
            let window_a = 0.6 * f;
            walls.push(WallConfig {
                name: format!("{zname}_window"),
                zone: z,
                kind: WallKind::Window,
                area: window_a,
                inner_capacitance: 4200.0 * window_a,
                outer_capacitance: 4200.0 * window_a,
                conductance: 250.0 * window_a,
                emissivity: 0.84,
                absorptance: 0.1,
                exposed: true,
            });
            let door_a = 0.8 * f;
            walls.push(WallConfig {
                name: format!("{zname}_door"),
                zone: z,
                kind: WallKind::Opaque,
                area: door_a,
                inner_capacitance: 6000.0 * door_a,
                outer_capacitance: 9000.0 * door_a,
                conductance: 2.5 * door_a,
                emissivity: 0.9,
                absorptance: 0.6,
                exposed: true,
            });
            let roof_a = 0.9 / f;
            walls.push(WallConfig {
                name: format!("{zname}_roof"),
                zone: z,
                kind: WallKind::Opaque,
                area: roof_a,
                inner_capacitance: 5000.0 * roof_a,
                outer_capacitance: 8000.0 * roof_a,
                conductance: 2.0 * roof_a,
                emissivity: 0.9,
                absorptance: 0.7,
                exposed: true,
            });
            let seat_a = 0.5 * f;
            walls.push(WallConfig {
                name: format!("{zname}_seat"),
                zone: z,
                kind: WallKind::Opaque,
                area: seat_a,
                inner_capacitance: 12000.0 * seat_a,
                outer_capacitance: 15000.0 * seat_a,
                conductance: 3.0 * seat_a,
                emissivity: 0.92,
                absorptance: 0.0,
                exposed: false,
            });
        }

        let link = |from, to, fraction| FlowLink { from, to, fraction };
        Self {
            zones,
            walls,
            flows: vec![
                link(0, 2, 0.4),
                link(1, 3, 0.4),
                link(0, 4, 0.2),
                link(1, 4, 0.2),
                link(2, 5, 0.5),
                link(3, 5, 0.5),
                link(4, 5, 0.6),
            ],
            mixing_flow: 30.0,
            infiltration: 5.0,
            h_int: 6.0,
            window_transmissivity: 0.6,
            pressure: STANDARD_PRESSURE,
            air_density: 1.2,
            initial_temperature: 40.0,
            initial_relative_humidity: 0.3,
            radiation: true,
        }
    }
}

impl MultizoneConfig {
    /// Two identical zones exchanging equal flows, each with a window and a door.
    pub fn two_zone_symmetric() -> Self {
        let zone = |name: &str| ZoneConfig {
            name: name.into(),
            volume: 0.8,
            inlet_fraction: 0.5,
        };
        let mut walls = Vec::new();
        for (z, zname) in ["left", "right"].iter().enumerate() {
            walls.push(WallConfig {
                name: format!("{zname}_window"),
                zone: z,
                kind: WallKind::Window,
                area: 0.7,
                inner_capacitance: 2940.0,
                outer_capacitance: 2940.0,
                conductance: 175.0,
                emissivity: 0.84,
                absorptance: 0.1,
                exposed: true,
            });
            walls.push(WallConfig {
                name: format!("{zname}_door"),
                zone: z,
                kind: WallKind::Opaque,
                area: 1.1,
                inner_capacitance: 6600.0,
                outer_capacitance: 9900.0,
                conductance: 2.75,
                emissivity: 0.9,
                absorptance: 0.6,
                exposed: true,
            });
        }
        Self {
            zones: vec![zone("left"), zone("right")],
            walls,
            flows: vec![
                FlowLink { from: 0, to: 1, fraction: 0.2 },
                FlowLink { from: 1, to: 0, fraction: 0.2 },
            ],
            ..Self::default()
        }
    }

    /// One closed zone with two opaque walls, no radiation and no airflow.
    /// Only the first wall absorbs sunlight.
    pub fn single_zone_linear() -> Self {
        let wall = |name: &str, area: f64, absorptance: f64| WallConfig {
            name: name.into(),
            zone: 0,
            kind: WallKind::Opaque,
            area,
            inner_capacitance: 3000.0 * area,
            outer_capacitance: 4000.0 * area,
            conductance: 40.0 * area,
            emissivity: 0.9,
            absorptance,
            exposed: true,
        };
        Self {
            zones: vec![ZoneConfig {
                name: "cabin".into(),
                volume: 2.5,
                inlet_fraction: 0.0,
            }],
            walls: vec![wall("sunlit", 1.5, 0.7), wall("shade", 2.0, 0.0)],
            flows: Vec::new(),
            mixing_flow: 0.0,
            infiltration: 0.0,
            radiation: false,
            ..Self::default()
        }
    }

    pub fn n_zones(&self) -> usize {
        self.zones.len()
    }

    pub fn n_walls(&self) -> usize {
        self.walls.len()
    }

    /// N_θ = 2(N_w + N_a).
    pub fn n_theta(&self) -> usize {
        2 * (self.n_walls() + self.n_zones())
    }

    pub fn n_gamma(&self) -> usize {
        2 * self.n_zones() + 5 * self.n_walls()
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if self.zones.is_empty() {
            return bad("at least one zone is required".into());
        }
        for z in &self.zones {
            if !(z.volume > 0.0) || !(z.inlet_fraction >= 0.0) {
                return bad(format!("zone `{}`: volume must be positive and inlet fraction non-negative", z.name));
            }
        }
        let inlet_sum: f64 = self.zones.iter().map(|z| z.inlet_fraction).sum();
        if inlet_sum > 1.0 + 1e-12 {
            return bad(format!("inlet fractions sum to {inlet_sum} > 1"));
        }
        for w in &self.walls {
            if w.zone >= self.n_zones() {
                return bad(format!("wall `{}` refers to missing zone {}", w.name, w.zone));
            }
            let positive = [w.area, w.inner_capacitance, w.outer_capacitance, w.conductance];
            if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return bad(format!("wall `{}`: area, capacitances and conductance must be positive", w.name));
            }
            if !(0.0..=1.0).contains(&w.emissivity) || !(0.0..=1.0).contains(&w.absorptance) {
                return bad(format!("wall `{}`: emissivity and absorptance must lie in [0, 1]", w.name));
            }
        }
        let mut out = vec![0.0; self.n_zones()];
        for l in &self.flows {
            if l.from >= self.n_zones() || l.to >= self.n_zones() || l.from == l.to {
                return bad(format!("invalid flow link {} -> {}", l.from, l.to));
            }
            if !(l.fraction >= 0.0) {
                return bad("flow fractions must be non-negative".into());
            }
            out[l.from] += l.fraction;
        }
        if let Some(z) = out.iter().position(|&s| s > 1.0 + 1e-12) {
            return bad(format!("flow fractions out of zone {z} sum to {} > 1", out[z]));
        }
        if !(self.mixing_flow >= 0.0) || !(self.infiltration >= 0.0) {
            return bad("mixing and infiltration flows must be non-negative".into());
        }
        if !(self.h_int > 0.0) || !(self.pressure > 0.0) || !(self.air_density > 0.0) {
            return bad("h_int, pressure and air density must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.window_transmissivity) || !(0.0..=1.0).contains(&self.initial_relative_humidity) {
            return bad("transmissivity and initial relative humidity must lie in [0, 1]".into());
        }
        Ok(())
    }

    /// Zone throughput per unit inlet flow: c = β + Fᵀc.
    fn throughput(&self) -> Result<Vec<f64>> {
        let n = self.n_zones();
        let mut a = DMatrix::<f64>::identity(n, n);
        for l in &self.flows {
            a[(l.to, l.from)] -= l.fraction;
        }
        let beta = DVector::from_iterator(n, self.zones.iter().map(|z| z.inlet_fraction));
        let c = a
            .lu()
            .solve(&beta)
            .ok_or_else(|| Error::InvalidModel("ventilation topology has a closed loop with no extraction".into()))?;
        if c.iter().any(|v| !v.is_finite() || *v < -1e-12) {
            return Err(Error::InvalidModel("ventilation topology yields invalid throughputs".into()));
        }
        Ok(c.iter().copied().collect())
    }
}

// input channel positions
const V_VEH: usize = 0;
const T_EXT: usize = 1;
const R_EXT: usize = 2;
const I_SOLAR: usize = 3;
const M_INLET: usize = 4;
const R_INLET: usize = 5;
const T_INLET: usize = 6;

#[derive(Debug, Clone, Copy)]
enum Source {
    Inlet,
    Ambient,
    Zone(usize),
}

#[derive(Debug, Clone, Copy)]
struct Inflow {
    source: Source,
    /// kg/s per kg/s of inlet flow
    per_inlet: f64,
    /// kg/s
    fixed: f64,
}

#[derive(Debug, Clone)]
struct Wall {
    zone: usize,
    c_in: f64,
    c_out: f64,
    g: f64,
    h_int_a: f64,
    area: f64,
    exposed: bool,
    /// σ·ε·A for the external surface
    lw_ext: f64,
    /// (neighbour wall, σ·ε_w·ε_j·A_w·A_j / S_zone)
    lw_int: Vec<(usize, f64)>,
    solar_in: f64,
    solar_out: f64,
}

#[derive(Debug, Clone)]
struct Zone {
    mass: f64,
    walls: Vec<usize>,
    inflows: Vec<Inflow>,
}

struct MultizoneEquations {
    nw: usize,
    na: usize,
    walls: Vec<Wall>,
    zones: Vec<Zone>,
    pressure: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ThetaRow {
    WallIn(usize),
    WallOut(usize),
    Enthalpy(usize),
    Humidity(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GammaRow {
    AirTemp(usize),
    Conv(usize),
    Cond(usize),
    Ext(usize),
    LwInt(usize),
    LwExt(usize),
    RelHum(usize),
}

fn k4(t: f64) -> f64 {
    (t + KELVIN).powi(4)
}

fn external_coefficient(speed_kmh: f64) -> f64 {
    5.7 + 3.8 * (speed_kmh.max(0.0) / 3.6)
}

impl MultizoneEquations {
    fn theta_row(&self, row: usize) -> ThetaRow {
        let (nw, na) = (self.nw, self.na);
        match row {
            r if r < nw => ThetaRow::WallIn(r),
            r if r < 2 * nw => ThetaRow::WallOut(r - nw),
            r if r < 2 * nw + na => ThetaRow::Enthalpy(r - 2 * nw),
            r => ThetaRow::Humidity(r - 2 * nw - na),
        }
    }

    fn gamma_row(&self, row: usize) -> GammaRow {
        let (nw, na) = (self.nw, self.na);
        match row {
            r if r < na => GammaRow::AirTemp(r),
            r if r < na + nw => GammaRow::Conv(r - na),
            r if r < na + 2 * nw => GammaRow::Cond(r - na - nw),
            r if r < na + 3 * nw => GammaRow::Ext(r - na - 2 * nw),
            r if r < na + 4 * nw => GammaRow::LwInt(r - na - 3 * nw),
            r if r < na + 5 * nw => GammaRow::LwExt(r - na - 4 * nw),
            r => GammaRow::RelHum(r - na - 5 * nw),
        }
    }

    fn t_wi(&self, w: usize) -> usize {
        w
    }
    fn t_we(&self, w: usize) -> usize {
        self.nw + w
    }
    fn h(&self, z: usize) -> usize {
        2 * self.nw + z
    }
    fn x(&self, z: usize) -> usize {
        2 * self.nw + self.na + z
    }
    fn g_ta(&self, z: usize) -> usize {
        z
    }
    fn g_conv(&self, w: usize) -> usize {
        self.na + w
    }
    fn g_cond(&self, w: usize) -> usize {
        self.na + self.nw + w
    }
    fn g_ext(&self, w: usize) -> usize {
        self.na + 2 * self.nw + w
    }
    fn g_lwi(&self, w: usize) -> usize {
        self.na + 3 * self.nw + w
    }
    fn g_lwe(&self, w: usize) -> usize {
        self.na + 4 * self.nw + w
    }
    fn g_rh(&self, z: usize) -> usize {
        self.na + 5 * self.nw + z
    }

    fn zone_air_temp(&self, theta: &[f64], z: usize) -> f64 {
        temperature_from_enthalpy(theta[self.h(z)], theta[self.x(z)])
    }

    fn inlet_humidity(&self, inputs: &[f64]) -> f64 {
        absolute_humidity_unchecked(inputs[T_INLET], (inputs[R_INLET] / 100.0).clamp(0.0, 1.0), self.pressure)
    }

    fn ambient_humidity(&self, inputs: &[f64]) -> f64 {
        absolute_humidity_unchecked(inputs[T_EXT], (inputs[R_EXT] / 100.0).clamp(0.0, 1.0), self.pressure)
    }

    /// Value of γ_row given θ, the other γ and the inputs.
    fn algebraic(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> f64 {
        match self.gamma_row(row) {
            GammaRow::AirTemp(z) => self.zone_air_temp(theta, z),
            GammaRow::Conv(w) => {
                let wall = &self.walls[w];
                wall.h_int_a * (self.zone_air_temp(theta, wall.zone) - theta[self.t_wi(w)])
            }
            GammaRow::Cond(w) => self.walls[w].g * (theta[self.t_wi(w)] - theta[self.t_we(w)]),
            GammaRow::Ext(w) => {
                let wall = &self.walls[w];
                if wall.exposed {
                    external_coefficient(inputs[V_VEH]) * wall.area * (theta[self.t_we(w)] - inputs[T_EXT])
                } else {
                    0.0
                }
            }
            GammaRow::LwInt(w) => {
                let own = k4(theta[self.t_wi(w)]);
                self.walls[w]
                    .lw_int
                    .iter()
                    .map(|&(j, coef)| coef * (own - k4(theta[self.t_wi(j)])))
                    .sum()
            }
            GammaRow::LwExt(w) => {
                let wall = &self.walls[w];
                if wall.exposed && wall.lw_ext > 0.0 {
                    wall.lw_ext * (k4(theta[self.t_we(w)]) - k4(inputs[T_EXT]))
                } else {
                    0.0
                }
            }
            GammaRow::RelHum(z) => {
                vapour_pressure(theta[self.x(z)], self.pressure) / saturation_pressure(gamma[self.g_ta(z)])
            }
        }
    }
}

impl Equations for MultizoneEquations {
    fn derivative(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> f64 {
        match self.theta_row(row) {
            ThetaRow::WallIn(w) => {
                let wall = &self.walls[w];
                (gamma[self.g_conv(w)] - gamma[self.g_cond(w)] - gamma[self.g_lwi(w)] + wall.solar_in * inputs[I_SOLAR])
                    / wall.c_in
            }
            ThetaRow::WallOut(w) => {
                let wall = &self.walls[w];
                let mut q = gamma[self.g_cond(w)];
                if wall.exposed {
                    q += wall.solar_out * inputs[I_SOLAR] - gamma[self.g_ext(w)] - gamma[self.g_lwe(w)];
                }
                q / wall.c_out
            }
            ThetaRow::Enthalpy(z) => {
                let zone = &self.zones[z];
                let m_inlet = inputs[M_INLET] / 3600.0;
                let h_z = theta[self.h(z)];
                let mut q = 0.0;
                for f in &zone.inflows {
                    let m = f.per_inlet * m_inlet + f.fixed;
                    let h_src = match f.source {
                        Source::Inlet => enthalpy(inputs[T_INLET], self.inlet_humidity(inputs)),
                        Source::Ambient => enthalpy(inputs[T_EXT], self.ambient_humidity(inputs)),
                        Source::Zone(i) => theta[self.h(i)],
                    };
                    q += m * (h_src - h_z);
                }
                for &w in &zone.walls {
                    q -= gamma[self.g_conv(w)];
                }
                q / zone.mass
            }
            ThetaRow::Humidity(z) => {
                let zone = &self.zones[z];
                let m_inlet = inputs[M_INLET] / 3600.0;
                let x_z = theta[self.x(z)];
                let mut q = 0.0;
                for f in &zone.inflows {
                    let m = f.per_inlet * m_inlet + f.fixed;
                    let x_src = match f.source {
                        Source::Inlet => self.inlet_humidity(inputs),
                        Source::Ambient => self.ambient_humidity(inputs),
                        Source::Zone(i) => theta[self.x(i)],
                    };
                    q += m * (x_src - x_z);
                }
                q / zone.mass
            }
        }
    }

    fn residual(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> f64 {
        match self.gamma_row(row) {
            GammaRow::AirTemp(z) => {
                let (h, x) = (theta[self.h(z)], theta[self.x(z)]);
                gamma[row] * (CP_DRY_AIR + CP_VAPOUR * x) - (h - LATENT_HEAT * x)
            }
            GammaRow::RelHum(z) => {
                gamma[row] * saturation_pressure(gamma[self.g_ta(z)]) - vapour_pressure(theta[self.x(z)], self.pressure)
            }
            _ => gamma[row] - self.algebraic(row, theta, gamma, inputs),
        }
    }

    fn assign(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> Option<f64> {
        Some(self.algebraic(row, theta, gamma, inputs))
    }

    fn is_explicit(&self) -> bool {
        true
    }
}

/// Builds the multi-zone cabin. Inputs (Table-5 style units): `V_veh` km/h,
/// `T_ext` °C, `r_ext` %, `I_solar` W/m², `m_inlet` kg/h, `r_inlet` %, `T_inlet` °C.
pub fn build_multizone_demo(config: &MultizoneConfig) -> Result<DaeModel> {
    config.validate()?;
    let (nw, na) = (config.n_walls(), config.n_zones());
    let throughput = config.throughput()?;

    let total_volume: f64 = config.zones.iter().map(|z| z.volume).sum();
    let mut zones: Vec<Zone> = config
        .zones
        .iter()
        .map(|z| Zone {
            mass: config.air_density * z.volume,
            walls: Vec::new(),
            inflows: Vec::new(),
        })
        .collect();
    for (z, zc) in config.zones.iter().enumerate() {
        if zc.inlet_fraction > 0.0 {
            zones[z].inflows.push(Inflow {
                source: Source::Inlet,
                per_inlet: zc.inlet_fraction,
                fixed: 0.0,
            });
        }
        if config.infiltration > 0.0 {
            zones[z].inflows.push(Inflow {
                source: Source::Ambient,
                per_inlet: 0.0,
                fixed: config.infiltration / 3600.0 * zc.volume / total_volume,
            });
        }
    }
    for l in &config.flows {
        zones[l.to].inflows.push(Inflow {
            source: Source::Zone(l.from),
            per_inlet: l.fraction * throughput[l.from],
            fixed: 0.0,
        });
    }
    if na >= 2 && config.mixing_flow > 0.0 {
        for z in 0..na {
            zones[z].inflows.push(Inflow {
                source: Source::Zone((z + na - 1) % na),
                per_inlet: 0.0,
                fixed: config.mixing_flow / 3600.0,
            });
        }
    }
    for (w, wc) in config.walls.iter().enumerate() {
        zones[wc.zone].walls.push(w);
    }

    let mut walls = Vec::with_capacity(nw);
    for wc in &config.walls {
        let zone_walls = &zones[wc.zone].walls;
        let zone_area: f64 = zone_walls.iter().map(|&j| config.walls[j].area).sum();
        let window_area: f64 = zone_walls
            .iter()
            .filter(|&&j| config.walls[j].kind == WallKind::Window)
            .map(|&j| config.walls[j].area)
            .sum();
        let opaque_area: f64 = zone_walls
            .iter()
            .filter(|&&j| config.walls[j].kind == WallKind::Opaque)
            .map(|&j| config.walls[j].area)
            .sum();
        let lw_int = if config.radiation {
            zone_walls
                .iter()
                .filter(|&&j| config.walls[j].name != wc.name)
                .map(|&j| {
                    let o = &config.walls[j];
                    (j, SIGMA * wc.emissivity * o.emissivity * wc.area * o.area / zone_area)
                })
                .filter(|&(_, c)| c > 0.0)
                .collect()
        } else {
            Vec::new()
        };
        let solar_in = if wc.kind == WallKind::Opaque && opaque_area > 0.0 {
            config.window_transmissivity * window_area * wc.area / opaque_area
        } else {
            0.0
        };
        walls.push(Wall {
            zone: wc.zone,
            c_in: wc.inner_capacitance,
            c_out: wc.outer_capacitance,
            g: wc.conductance,
            h_int_a: config.h_int * wc.area,
            area: wc.area,
            exposed: wc.exposed,
            lw_ext: if config.radiation { SIGMA * wc.emissivity * wc.area } else { 0.0 },
            lw_int,
            solar_in,
            solar_out: if wc.exposed { wc.absorptance * wc.area } else { 0.0 },
        });
    }

    let eq = MultizoneEquations {
        nw,
        na,
        walls,
        zones,
        pressure: config.pressure,
    };

    // incidence
    let mut inc = IncidenceBuilder::new(config.n_theta(), config.n_gamma());
    for w in 0..nw {
        let wall = &eq.walls[w];
        inc.phi(eq.t_wi(w), &[], &[eq.g_conv(w), eq.g_cond(w), eq.g_lwi(w)]);
        if wall.exposed {
            inc.phi(eq.t_we(w), &[], &[eq.g_cond(w), eq.g_ext(w), eq.g_lwe(w)]);
            inc.psi(eq.g_ext(w), &[eq.t_we(w)], &[]);
            if wall.lw_ext > 0.0 {
                inc.psi(eq.g_lwe(w), &[eq.t_we(w)], &[]);
            }
        } else {
            inc.phi(eq.t_we(w), &[], &[eq.g_cond(w)]);
        }
        inc.psi(eq.g_conv(w), &[eq.h(wall.zone), eq.x(wall.zone), eq.t_wi(w)], &[]);
        inc.psi(eq.g_cond(w), &[eq.t_wi(w), eq.t_we(w)], &[]);
        if !wall.lw_int.is_empty() {
            let mut th = vec![eq.t_wi(w)];
            th.extend(wall.lw_int.iter().map(|&(j, _)| eq.t_wi(j)));
            inc.psi(eq.g_lwi(w), &th, &[]);
        }
    }
    for z in 0..na {
        let zone = &eq.zones[z];
        let mut h_src = vec![eq.h(z)];
        let mut x_src = vec![eq.x(z)];
        for f in &zone.inflows {
            if let Source::Zone(i) = f.source {
                h_src.push(eq.h(i));
                x_src.push(eq.x(i));
            }
        }
        let conv: Vec<usize> = zone.walls.iter().map(|&w| eq.g_conv(w)).collect();
        inc.phi(eq.h(z), &h_src, &conv);
        inc.phi(eq.x(z), &x_src, &[]);
        inc.psi(eq.g_ta(z), &[eq.h(z), eq.x(z)], &[]);
        inc.mixed(eq.g_ta(z), eq.g_ta(z), eq.x(z));
        inc.psi(eq.g_rh(z), &[eq.x(z)], &[eq.g_ta(z)]);
    }

    // variables
    let mut theta_names = Vec::with_capacity(config.n_theta());
    theta_names.extend(config.walls.iter().map(|w| format!("Twi_{}", w.name)));
    theta_names.extend(config.walls.iter().map(|w| format!("Twe_{}", w.name)));
    theta_names.extend(config.zones.iter().map(|z| format!("h_{}", z.name)));
    theta_names.extend(config.zones.iter().map(|z| format!("x_{}", z.name)));
    let mut gamma_names = Vec::with_capacity(config.n_gamma());
    gamma_names.extend(config.zones.iter().map(|z| format!("Ta_{}", z.name)));
    for prefix in ["Qconv", "Qcond", "Qext", "Qlwi", "Qlwe"] {
        gamma_names.extend(config.walls.iter().map(|w| format!("{prefix}_{}", w.name)));
    }
    gamma_names.extend(config.zones.iter().map(|z| format!("r_{}", z.name)));

    let t0 = config.initial_temperature;
    let x0 = absolute_humidity_unchecked(t0, config.initial_relative_humidity, config.pressure);
    let h0 = enthalpy(t0, x0);
    let mut initial = vec![t0; 2 * nw];
    initial.extend(std::iter::repeat_n(h0, na));
    initial.extend(std::iter::repeat_n(x0, na));
    let mut scale = vec![1.0; 2 * nw];
    scale.extend(std::iter::repeat_n(1.0 / ENTHALPY_SCALE, na));
    scale.extend(std::iter::repeat_n(HUMIDITY_SCALE, na));
    let space = VariableSpace::with_scale(theta_names, gamma_names, initial, scale)?;

    let inputs = vec![
        InputChannel::new("V_veh", 50.0),
        InputChannel::new("T_ext", 35.0),
        InputChannel::new("r_ext", 40.0),
        InputChannel::new("I_solar", 800.0),
        InputChannel::new("m_inlet", 300.0),
        InputChannel::new("r_inlet", 50.0),
        InputChannel::new("T_inlet", 8.0),
    ];
    let source = ModelSource {
        kind: MULTIZONE_KIND.into(),
        name: format!("{na}-zone cabin"),
        parameters: serde_json::to_value(config)?,
    };
    DaeModel::new(source, space, inputs, inc.build()?, Arc::new(eq))
}
