use alloc::vec::Vec;
use core::fmt;

use crate::dataset::Label;

/// Creation-order ball id, unique within one granulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct BallId(pub u32);

impl fmt::Display for BallId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How a ball's member set was obtained.
///
/// `Split` balls take their members by radius membership over the undivided
/// samples, so every member lies within the radius. `Initial` and `Merged`
/// balls own exactly the set their center and radius were computed on,
/// `Singleton` balls hold one leftover sample kept when outlier detection is
/// disabled, and `Cluster` balls are k-means clusters from the baseline
/// splitter (members need not lie within the radius).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BallOrigin {
    Initial,
    Split,
    Merged,
    Singleton,
    Cluster,
}

impl BallOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            BallOrigin::Initial => "initial",
            BallOrigin::Split => "split",
            BallOrigin::Merged => "merged",
            BallOrigin::Singleton => "singleton",
            BallOrigin::Cluster => "cluster",
        }
    }
}

/// A granular ball: center, radius, member sample indices, majority label
/// and purity.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GranularBall {
    pub id: BallId,
    pub center: Vec<f64>,
    pub radius: f64,
    /// Original sample indices (`Sample::index`).
    pub members: Vec<usize>,
    pub label: Label,
    pub purity: f64,
    /// Outer granulation iteration that created the ball; 0 for the initial ball.
    pub generation: u32,
    pub origin: BallOrigin,
}

impl GranularBall {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }
}
