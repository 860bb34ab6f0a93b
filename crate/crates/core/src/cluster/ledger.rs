use serde::Serialize;

/// Metered cost of one stage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageCost {
    pub name: String,
    pub k: usize,
    /// Bytes received per worker.
    pub bytes_received: Vec<u64>,
    /// Bytes sent per source; index `k` is storage / the driver.
    pub bytes_sent: Vec<u64>,
    /// Work units per worker (comparisons or rows processed).
    pub work_units: Vec<u64>,
    pub wall_ms: f64,
}

impl StageCost {
    /// `X`: the most bytes any worker received.
    pub fn x_bytes(&self) -> u64 {
        self.bytes_received.iter().copied().max().unwrap_or(0)
    }

    /// `Y`: the most work any worker did.
    pub fn y_units(&self) -> u64 {
        self.work_units.iter().copied().max().unwrap_or(0)
    }

    pub fn total_bytes(&self) -> u64 {
        self.bytes_received.iter().sum()
    }

    pub fn total_sent(&self) -> u64 {
        self.bytes_sent.iter().sum()
    }

    pub fn total_units(&self) -> u64 {
        self.work_units.iter().sum()
    }
}

/// One row of the metrics report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageReport {
    pub stage_name: String,
    pub k: usize,
    #[serde(rename = "X_bytes")]
    pub x_bytes: u64,
    #[serde(rename = "Y_units")]
    pub y_units: u64,
    pub total_bytes: u64,
    pub total_units: u64,
    pub wall_ms: f64,
}

/// Append-only list of stage costs for one job.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CostLedger {
    stages: Vec<StageCost>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn commit(&mut self, stage: StageCost) {
        self.stages.push(stage);
    }

    pub fn stages(&self) -> &[StageCost] {
        &self.stages
    }

    /// Stages run one after another, so the job's `X` is the sum of the
    /// per-stage maxima.
    pub fn x_bytes(&self) -> u64 {
        self.stages.iter().map(StageCost::x_bytes).sum()
    }

    pub fn y_units(&self) -> u64 {
        self.stages.iter().map(StageCost::y_units).sum()
    }

    pub fn total_bytes(&self) -> u64 {
        self.stages.iter().map(StageCost::total_bytes).sum()
    }

    pub fn total_units(&self) -> u64 {
        self.stages.iter().map(StageCost::total_units).sum()
    }

    /// Sum of `X` over stages whose name starts with `prefix`.
    pub fn x_bytes_of(&self, prefix: &str) -> u64 {
        self.stages
            .iter()
            .filter(|s| s.name.starts_with(prefix))
            .map(StageCost::x_bytes)
            .sum()
    }

    pub fn report(&self) -> Vec<StageReport> {
        self.stages
            .iter()
            .map(|s| StageReport {
                stage_name: s.name.clone(),
                k: s.k,
                x_bytes: s.x_bytes(),
                y_units: s.y_units(),
                total_bytes: s.total_bytes(),
                total_units: s.total_units(),
                wall_ms: s.wall_ms,
            })
            .collect()
    }
}
