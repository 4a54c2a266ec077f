use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    DeepWalk,
    Walklets,
    Line,
    Hpe,
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deepwalk" => Ok(ModelKind::DeepWalk),
            "walklets" => Ok(ModelKind::Walklets),
            "line" => Ok(ModelKind::Line),
            "hpe" => Ok(ModelKind::Hpe),
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::DeepWalk => "deepwalk",
            ModelKind::Walklets => "walklets",
            ModelKind::Line => "line",
            ModelKind::Hpe => "hpe",
        })
    }
}

/// Which LINE proximities to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineOrder {
    First,
    Second,
    Both,
}

impl LineOrder {
    pub fn first(self) -> bool {
        matches!(self, LineOrder::First | LineOrder::Both)
    }

    pub fn second(self) -> bool {
        matches!(self, LineOrder::Second | LineOrder::Both)
    }
}

impl FromStr for LineOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(LineOrder::First),
            "2" => Ok(LineOrder::Second),
            "both" => Ok(LineOrder::Both),
            other => Err(Error::Config(format!("line order must be 1, 2 or both, got `{other}`"))),
        }
    }
}

impl fmt::Display for LineOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineOrder::First => "1",
            LineOrder::Second => "2",
            LineOrder::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub model: ModelKind,
    pub dimensions: usize,
    /// Walks started from every vertex (DeepWalk, Walklets).
    pub walk_times: usize,
    /// Steps per walk.
    pub walk_length: usize,
    pub window: usize,
    /// Negatives drawn per positive pair.
    pub negatives: usize,
    /// Number of start-vertex draws (LINE, HPE).
    pub sample_times: u64,
    pub alpha: f64,
    pub workers: usize,
    pub seed: u64,
    pub line_order: LineOrder,
    /// Walklets step offsets to train; `None` means all of `1..=window`.
    pub walklets_offsets: Option<Vec<usize>>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: ModelKind::DeepWalk,
            dimensions: 64,
            walk_times: 10,
            walk_length: 40,
            window: 5,
            negatives: 5,
            sample_times: 10_000_000,
            alpha: 0.025,
            workers: 1,
            seed: 1,
            line_order: LineOrder::Both,
            walklets_offsets: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.dimensions == 0 {
            return fail("dimensions must be at least 1".into());
        }
        if self.walk_length == 0 {
            return fail("walk length must be at least 1".into());
        }
        if self.window == 0 || self.window > self.walk_length {
            return fail(format!(
                "window must be in 1..={} (the walk length), got {}",
                self.walk_length, self.window
            ));
        }
        if self.walk_times == 0 {
            return fail("walk times must be at least 1".into());
        }
        if self.workers == 0 {
            return fail("at least one worker is required".into());
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return fail(format!("learning rate must be positive, got {}", self.alpha));
        }
        if matches!(self.model, ModelKind::Line | ModelKind::Hpe) && self.sample_times == 0 {
            return fail("sample times must be at least 1".into());
        }
        if let Some(offsets) = &self.walklets_offsets {
            if offsets.is_empty() {
                return fail("walklets offsets must not be empty".into());
            }
            if let Some(bad) = offsets.iter().find(|&&k| k == 0 || k > self.window) {
                return fail(format!("walklets offset {bad} is outside 1..={}", self.window));
            }
        }
        Ok(())
    }

    /// Walklets offsets in training order.
    pub fn offsets(&self) -> Vec<usize> {
        match &self.walklets_offsets {
            Some(offsets) => offsets.clone(),
            None => (1..=self.window).collect(),
        }
    }
}
