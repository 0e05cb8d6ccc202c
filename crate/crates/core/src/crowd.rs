//! Berlonghi crowd types, their emotion-motivated groups, and the rules that
//! map emotion levels onto active groups.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotion::Emotion;
use crate::temporal::Level;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CrowdError {
    #[error("emotion levels are undefined for this window")]
    UndefinedLevels,
}

/// The eleven crowd types, numbered c1..c11.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrowdType {
    Ambulatory,
    LimitedMovement,
    Spectator,
    ExpressiveCohesive,
    Participatory,
    Aggressive,
    Demonstrator,
    Escaping,
    DenseSuffocating,
    RushingLooting,
    Violent,
}

impl CrowdType {
    pub const ALL: [CrowdType; 11] = [
        CrowdType::Ambulatory,
        CrowdType::LimitedMovement,
        CrowdType::Spectator,
        CrowdType::ExpressiveCohesive,
        CrowdType::Participatory,
        CrowdType::Aggressive,
        CrowdType::Demonstrator,
        CrowdType::Escaping,
        CrowdType::DenseSuffocating,
        CrowdType::RushingLooting,
        CrowdType::Violent,
    ];

    /// The one-based subscript `n` in `c_n`.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn display_name(self) -> &'static str {
        match self {
            CrowdType::Ambulatory => "Ambulatory",
            CrowdType::LimitedMovement => "Limited movement",
            CrowdType::Spectator => "Spectator",
            CrowdType::ExpressiveCohesive => "Expressive/Cohesive",
            CrowdType::Participatory => "Participatory",
            CrowdType::Aggressive => "Aggressive",
            CrowdType::Demonstrator => "Demonstrator",
            CrowdType::Escaping => "Escaping",
            CrowdType::DenseSuffocating => "Dense/Suffocating",
            CrowdType::RushingLooting => "Rushing/Looting",
            CrowdType::Violent => "Violent",
        }
    }

    /// Machine-readable identifier used in CSV and JSON output.
    pub fn key(self) -> &'static str {
        match self {
            CrowdType::Ambulatory => "ambulatory",
            CrowdType::LimitedMovement => "limited_movement",
            CrowdType::Spectator => "spectator",
            CrowdType::ExpressiveCohesive => "expressive_cohesive",
            CrowdType::Participatory => "participatory",
            CrowdType::Aggressive => "aggressive",
            CrowdType::Demonstrator => "demonstrator",
            CrowdType::Escaping => "escaping",
            CrowdType::DenseSuffocating => "dense_suffocating",
            CrowdType::RushingLooting => "rushing_looting",
            CrowdType::Violent => "violent",
        }
    }

    pub fn group(self) -> CrowdGroup {
        CrowdGroup::ALL
            .into_iter()
            .find(|g| g.members().contains(&self))
            .expect("every crowd type belongs to a group")
    }
}

impl fmt::Display for CrowdType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrowdGroup {
    Group1,
    Group2,
    Group3,
    Group4,
    Group5,
}

impl CrowdGroup {
    pub const ALL: [CrowdGroup; 5] = [
        CrowdGroup::Group1,
        CrowdGroup::Group2,
        CrowdGroup::Group3,
        CrowdGroup::Group4,
        CrowdGroup::Group5,
    ];

    pub fn members(self) -> &'static [CrowdType] {
        use CrowdType::*;
        match self {
            CrowdGroup::Group1 => &[Ambulatory, LimitedMovement, Spectator],
            CrowdGroup::Group2 => &[ExpressiveCohesive, Participatory],
            CrowdGroup::Group3 => &[Aggressive, Demonstrator, Violent],
            CrowdGroup::Group4 => &[Escaping, DenseSuffocating],
            CrowdGroup::Group5 => &[RushingLooting],
        }
    }

    pub fn motivating_emotions(self) -> &'static [Emotion] {
        match self {
            CrowdGroup::Group1 => &[],
            CrowdGroup::Group2 => &[Emotion::Happiness],
            CrowdGroup::Group3 => &[Emotion::Anger],
            CrowdGroup::Group4 => &[Emotion::Fear],
            CrowdGroup::Group5 => &[Emotion::Anger, Emotion::Sadness],
        }
    }

    /// Groups 3-5 raise alerts.
    pub fn is_dangerous(self) -> bool {
        matches!(self, CrowdGroup::Group3 | CrowdGroup::Group4 | CrowdGroup::Group5)
    }

    pub fn key(self) -> &'static str {
        match self {
            CrowdGroup::Group1 => "group1",
            CrowdGroup::Group2 => "group2",
            CrowdGroup::Group3 => "group3",
            CrowdGroup::Group4 => "group4",
            CrowdGroup::Group5 => "group5",
        }
    }
}

impl fmt::Display for CrowdGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

pub fn group_members(group: CrowdGroup) -> BTreeSet<CrowdType> {
    group.members().iter().copied().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::R1, Rule::R2, Rule::R3, Rule::R4, Rule::R5];

    pub fn consequent(self) -> CrowdGroup {
        match self {
            Rule::R1 => CrowdGroup::Group1,
            Rule::R2 => CrowdGroup::Group2,
            Rule::R3 => CrowdGroup::Group3,
            Rule::R4 => CrowdGroup::Group4,
            Rule::R5 => CrowdGroup::Group5,
        }
    }

    pub fn fires(self, levels: &[Level; 4]) -> bool {
        let high = |e: Emotion| levels[e.index()] == Level::High;
        match self {
            Rule::R1 => Emotion::ALL.iter().all(|&e| !high(e)),
            Rule::R2 => high(Emotion::Happiness),
            Rule::R3 => high(Emotion::Anger),
            Rule::R4 => high(Emotion::Fear),
            Rule::R5 => high(Emotion::Anger) && high(Emotion::Sadness),
        }
    }
}

/// Crowd groups active for one set of emotion levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inference {
    pub groups: BTreeSet<CrowdGroup>,
    pub crowd_types: BTreeSet<CrowdType>,
    pub fired_rules: BTreeSet<Rule>,
    pub danger: bool,
}

impl Inference {
    /// No rule fired. Only happens when sadness is the sole High emotion.
    pub fn is_indeterminate(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Evaluates every rule independently and unions the consequents.
pub fn infer(levels: &[Level; 4]) -> Inference {
    let fired_rules: BTreeSet<Rule> = Rule::ALL.into_iter().filter(|r| r.fires(levels)).collect();
    let groups: BTreeSet<CrowdGroup> = fired_rules.iter().map(|r| r.consequent()).collect();
    let crowd_types = groups.iter().flat_map(|g| g.members().iter().copied()).collect();
    let danger = groups.iter().any(|g| g.is_dangerous());
    Inference { groups, crowd_types, fired_rules, danger }
}

/// Like [`infer`], for levels that may be undefined.
pub fn infer_crowd(levels: Option<&[Level; 4]>) -> Result<Inference, CrowdError> {
    levels.map(infer).ok_or(CrowdError::UndefinedLevels)
}
