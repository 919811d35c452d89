//! Cabin thermal models and humid-air properties.

mod illustrative;
mod multizone;
mod psychro;

pub use illustrative::{build_illustrative_cabin, IllustrativeParams, NodeCapacitance, WallProps, ILLUSTRATIVE_KIND};
pub use multizone::{
    build_multizone_demo, FlowLink, MultizoneConfig, WallConfig, WallKind, ZoneConfig, ENTHALPY_SCALE,
    HUMIDITY_SCALE, MULTIZONE_KIND,
};
pub use psychro::{
    absolute_humidity, enthalpy, relative_humidity, saturation_pressure, temperature_from_enthalpy, vapour_pressure,
    CP_DRY_AIR, CP_VAPOUR, LATENT_HEAT, MOLAR_MASS_RATIO, STANDARD_PRESSURE,
};

use crate::dae::{DaeModel, ModelDocument};
use crate::error::{Error, Result};

/// Rebuilds a model from its document. Structural sections, when present,
/// must agree with the rebuilt model.
pub fn model_from_document(doc: &ModelDocument) -> Result<DaeModel> {
    doc.check_version()?;
    let model = match doc.kind.as_str() {
        ILLUSTRATIVE_KIND => {
            let params: IllustrativeParams = serde_json::from_value(doc.parameters.clone())?;
            build_illustrative_cabin(&params)?
        }
        MULTIZONE_KIND => {
            let config: MultizoneConfig = serde_json::from_value(doc.parameters.clone())?;
            build_multizone_demo(&config)?
        }
        other => return Err(Error::InvalidModel(format!("unknown model kind `{other}`"))),
    };
    doc.check_matches(&model)?;
    Ok(model)
}
