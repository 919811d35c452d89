//! Fixed-step simulation of full models, designs of experiment and snapshot campaigns.

mod campaign;
mod doe;
mod integrate;
mod trajectory;

pub use campaign::{read_campaign, run_campaign, write_campaign, CampaignIndex, CAMPAIGN_INDEX};
pub use doe::{filter_constraints, sample_doe, DoePlan, ParamRange, ParamSpace};
pub(crate) use integrate::first_non_finite;
pub use integrate::{integrate, integrate_point, StepSettings};
pub use trajectory::{ParamPoint, Trajectory};
