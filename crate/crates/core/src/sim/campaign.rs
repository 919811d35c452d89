use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::doe::DoePlan;
use super::integrate::{integrate_point, StepSettings};
use super::trajectory::{ParamPoint, Trajectory};
use crate::dae::{DaeModel, InputSchedule};
use crate::error::{Error, Result};

/// Simulates every point of `plan` over the base schedule. Points run
/// concurrently when `parallel` is set; output order always follows the plan.
pub fn run_campaign(
    model: &DaeModel,
    base: &InputSchedule,
    plan: &DoePlan,
    settings: StepSettings,
    parallel: bool,
) -> Result<Vec<Trajectory>> {
    if plan.is_empty() {
        return Err(Error::Empty("campaign plan".into()));
    }
    let run = |(index, point): (usize, &ParamPoint)| {
        integrate_point(model, base, point, settings).map_err(|e| Error::Campaign {
            index,
            source: Box::new(e),
        })
    };
    if parallel {
        plan.points.par_iter().enumerate().map(run).collect()
    } else {
        plan.points.iter().enumerate().map(run).collect()
    }
}

/// Index file written next to the per-point trajectory CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignIndex {
    pub settings: StepSettings,
    pub points: Vec<ParamPoint>,
    pub files: Vec<String>,
}

pub const CAMPAIGN_INDEX: &str = "campaign.json";

/// Writes one CSV per trajectory plus `campaign.json` into `dir`.
pub fn write_campaign(
    dir: &Path,
    model: &DaeModel,
    settings: StepSettings,
    trajectories: &[Trajectory],
) -> Result<CampaignIndex> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(trajectories.len());
    for (i, traj) in trajectories.iter().enumerate() {
        let name = format!("point_{i:04}.csv");
        traj.write_csv(BufWriter::new(File::create(dir.join(&name))?), model.space())?;
        files.push(name);
    }
    let index = CampaignIndex {
        settings,
        points: trajectories.iter().map(|t| t.point().clone()).collect(),
        files,
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join(CAMPAIGN_INDEX))?), &index)?;
    Ok(index)
}

/// Reads back a directory written by [`write_campaign`].
pub fn read_campaign(dir: &Path, model: &DaeModel) -> Result<Vec<Trajectory>> {
    let index: CampaignIndex = serde_json::from_reader(BufReader::new(File::open(dir.join(CAMPAIGN_INDEX))?))?;
    if index.points.len() != index.files.len() {
        return Err(Error::dim("campaign points", index.files.len(), index.points.len()));
    }
    index
        .files
        .iter()
        .zip(index.points)
        .map(|(file, point)| {
            let mut t = Trajectory::read_csv(BufReader::new(File::open(dir.join(file))?), model.space())?;
            t.set_point(point);
            Ok(t)
        })
        .collect()
}
