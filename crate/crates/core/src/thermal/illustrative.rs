//! Two-wall (windshield + roof) single-air-zone cabin.
//!
//! Differential variables `T_1..T_7`: windshield internal/middle/external
//! node, roof internal/middle/external node, air zone. Algebraic variables
//! `Q_1..Q_10`: convective and conductive fluxes (positive from cabin towards
//! the ambience) and the two junction sums. The air zone follows a first-order
//! lag towards the comfort set point.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dae::{DaeModel, Equations, IncidenceBuilder, InputChannel, ModelSource, VariableSpace};
use crate::error::{Error, Result};

pub const ILLUSTRATIVE_KIND: &str = "illustrative_cabin";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallProps {
    /// Total mass, kg.
    pub mass: f64,
    /// Surface, m².
    pub surface: f64,
    /// Thickness, m.
    pub thickness: f64,
    /// Specific heat capacity, J/(kg·K).
    pub specific_heat: f64,
    /// Thermal conductivity, W/(m·K).
    pub conductivity: f64,
}

impl WallProps {
    pub fn windshield() -> Self {
        Self {
            mass: 14.8525,
            surface: 1.3,
            thickness: 0.005,
            specific_heat: 829.0,
            conductivity: 0.55,
        }
    }

    pub fn roof() -> Self {
        Self {
            mass: 49.708,
            surface: 3.4,
            thickness: 0.020,
            specific_heat: 814.5,
            conductivity: 0.042,
        }
    }

    /// Conductance between adjacent nodes, 2·λ·S/E.
    pub fn node_conductance(&self) -> f64 {
        2.0 * self.conductivity * self.surface / self.thickness
    }

    fn validate(&self, which: &str) -> Result<()> {
        let fields = [
            ("mass", self.mass),
            ("surface", self.surface),
            ("thickness", self.thickness),
            ("specific_heat", self.specific_heat),
            ("conductivity", self.conductivity),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{which}.{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// How a wall's heat capacity m·C_p is assigned to its three nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeCapacitance {
    /// Each node carries m·C_p / 3.
    #[default]
    ThirdOfWall,
    /// Each node carries the full m·C_p.
    WholeWall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IllustrativeParams {
    pub windshield: WallProps,
    pub roof: WallProps,
    /// Internal convective coefficient, W/(m²·K).
    pub h_int: f64,
    /// Default external convective coefficient, W/(m²·K).
    pub h_ext: f64,
    /// Air-zone lag time constant, s.
    pub tau: f64,
    /// Ambient temperature, °C; also every initial state.
    pub t_ext: f64,
    /// Comfort set point, °C.
    pub t_cab: f64,
    #[serde(default)]
    pub capacitance: NodeCapacitance,
}

impl Default for IllustrativeParams {
    fn default() -> Self {
        Self {
            windshield: WallProps::windshield(),
            roof: WallProps::roof(),
            h_int: 20.0,
            h_ext: 20.0,
            tau: 60.0,
            t_ext: -18.0,
            t_cab: 20.0,
            capacitance: NodeCapacitance::ThirdOfWall,
        }
    }
}

impl IllustrativeParams {
    pub fn validate(&self) -> Result<()> {
        self.windshield.validate("windshield")?;
        self.roof.validate("roof")?;
        for (name, v) in [("h_int", self.h_int), ("h_ext", self.h_ext), ("tau", self.tau)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.t_ext.is_finite() || !self.t_cab.is_finite() {
            return Err(Error::InvalidParameter("temperatures must be finite".into()));
        }
        Ok(())
    }

    pub fn node_capacitances(&self) -> (f64, f64) {
        let share = match self.capacitance {
            NodeCapacitance::ThirdOfWall => 1.0 / 3.0,
            NodeCapacitance::WholeWall => 1.0,
        };
        (
            share * self.windshield.mass * self.windshield.specific_heat,
            share * self.roof.mass * self.roof.specific_heat,
        )
    }
}

// input channel positions
const H_EXT: usize = 0;
const T_EXT: usize = 1;
const T_CAB: usize = 2;

struct IllustrativeEquations {
    cap_w: f64,
    cap_r: f64,
    hs_int_w: f64,
    hs_int_r: f64,
    g_w: f64,
    g_r: f64,
    s_w: f64,
    s_r: f64,
    tau: f64,
}

impl Equations for IllustrativeEquations {
    fn derivative(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> f64 {
        let q = gamma;
        match row {
            0..=2 => (q[row] - q[row + 1]) / self.cap_w,
            3..=5 => (q[row + 1] - q[row + 2]) / self.cap_r,
            6 => (inputs[T_CAB] - theta[6]) / self.tau,
            _ => unreachable!("illustrative model has 7 differential rows"),
        }
    }

    fn residual(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> f64 {
        gamma[row] - self.flux(row, theta, gamma, inputs)
    }

    fn assign(&self, row: usize, theta: &[f64], gamma: &[f64], inputs: &[f64]) -> Option<f64> {
        Some(self.flux(row, theta, gamma, inputs))
    }

    fn is_explicit(&self) -> bool {
        true
    }
}

impl IllustrativeEquations {
    fn flux(&self, row: usize, t: &[f64], q: &[f64], inputs: &[f64]) -> f64 {
        match row {
            0 => self.hs_int_w * (t[6] - t[0]),
            1 => self.g_w * (t[0] - t[1]),
            2 => self.g_w * (t[1] - t[2]),
            3 => inputs[H_EXT] * self.s_w * (t[2] - inputs[T_EXT]),
            4 => self.hs_int_r * (t[6] - t[3]),
            5 => self.g_r * (t[3] - t[4]),
            6 => self.g_r * (t[4] - t[5]),
            7 => inputs[H_EXT] * self.s_r * (t[5] - inputs[T_EXT]),
            8 => q[0] + q[4],
            9 => q[3] + q[7],
            _ => unreachable!("illustrative model has 10 algebraic rows"),
        }
    }
}

/// Builds the two-wall cabin: N_θ = 7, N_γ = 10, inputs `h_ext`, `T_ext`, `T_cab`.
pub fn build_illustrative_cabin(params: &IllustrativeParams) -> Result<DaeModel> {
    params.validate()?;
    let (cap_w, cap_r) = params.node_capacitances();
    let eq = IllustrativeEquations {
        cap_w,
        cap_r,
        hs_int_w: params.h_int * params.windshield.surface,
        hs_int_r: params.h_int * params.roof.surface,
        g_w: params.windshield.node_conductance(),
        g_r: params.roof.node_conductance(),
        s_w: params.windshield.surface,
        s_r: params.roof.surface,
        tau: params.tau,
    };

    let theta: Vec<String> = (1..=7).map(|i| format!("T_{i}")).collect();
    let gamma: Vec<String> = (1..=10).map(|i| format!("Q_{i}")).collect();
    let space = VariableSpace::new(theta, gamma, vec![params.t_ext; 7])?;

    let mut inc = IncidenceBuilder::new(7, 10);
    for i in 0..3 {
        inc.phi(i, &[], &[i, i + 1]);
    }
    for i in 3..6 {
        inc.phi(i, &[], &[i + 1, i + 2]);
    }
    inc.phi(6, &[6], &[]);
    inc.psi(0, &[6, 0], &[])
        .psi(1, &[0, 1], &[])
        .psi(2, &[1, 2], &[])
        .psi(3, &[2], &[])
        .psi(4, &[6, 3], &[])
        .psi(5, &[3, 4], &[])
        .psi(6, &[4, 5], &[])
        .psi(7, &[5], &[])
        .psi(8, &[], &[0, 4])
        .psi(9, &[], &[3, 7]);

    let inputs = vec![
        InputChannel::new("h_ext", params.h_ext),
        InputChannel::new("T_ext", params.t_ext),
        InputChannel::new("T_cab", params.t_cab),
    ];
    let source = ModelSource {
        kind: ILLUSTRATIVE_KIND.into(),
        name: "two-wall cabin".into(),
        parameters: serde_json::to_value(params)?,
    };
    DaeModel::new(source, space, inputs, inc.build()?, Arc::new(eq))
}
