use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::operators::Operator;

/// Named operator bundle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Conservative,
    #[default]
    Balanced,
    Aggressive,
    Auto,
}

impl Profile {
    pub const ALL: [Profile; 4] = [
        Profile::Conservative,
        Profile::Balanced,
        Profile::Aggressive,
        Profile::Auto,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Profile::Conservative => "conservative",
            Profile::Balanced => "balanced",
            Profile::Aggressive => "aggressive",
            Profile::Auto => "auto",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Profile::ALL
            .into_iter()
            .find(|p| p.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown profile `{s}` (expected conservative, balanced, aggressive or auto)"))
    }
}

/// Tool-count breakpoints for the auto-disable rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolCountThresholds {
    /// `auto` stays conservative at or below this many tools.
    pub low: usize,
    /// `balanced` drops CFL and CFO at or above this many tools.
    pub mid: usize,
    /// `auto` falls back to conservative above this many tools.
    pub high: usize,
}

impl Default for ToolCountThresholds {
    fn default() -> Self {
        Self {
            low: 20,
            mid: 30,
            high: 40,
        }
    }
}

/// Static per-model-family behaviour.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFamily {
    /// When set, the aggressive profile drops CFL and SAD-F: both put
    /// verbatim schema text where the model tends to repeat it back.
    pub echo_back_guard: bool,
    /// Operators never enabled for this family, whatever the profile.
    #[serde(default)]
    pub disable: Vec<Operator>,
    #[serde(default)]
    pub archetype: String,
}

impl ModelFamily {
    /// Used for unknown or absent families: guard on, nothing else disabled.
    pub fn unknown() -> Self {
        Self {
            echo_back_guard: true,
            disable: Vec::new(),
            archetype: String::new(),
        }
    }
}

/// The shipped family table.
pub fn model_families() -> &'static BTreeMap<String, ModelFamily> {
    static TABLE: OnceLock<BTreeMap<String, ModelFamily>> = OnceLock::new();
    TABLE.get_or_init(|| {
        serde_json::from_str(include_str!("../../data/model_families.json")).expect("shipped model family table parses")
    })
}

/// Longest table key that is `tag` itself or a `-`-separated prefix of it,
/// case-insensitively: `claude-opus-4` resolves to `claude-opus`.
pub fn lookup_family(tag: &str) -> Option<(&'static str, &'static ModelFamily)> {
    let tag = tag.trim().to_ascii_lowercase();
    model_families()
        .iter()
        .filter(|(k, _)| tag == **k || tag.strip_prefix(k.as_str()).is_some_and(|rest| rest.starts_with('-')))
        .max_by_key(|(k, _)| k.len())
        .map(|(k, v)| (k.as_str(), v))
}

/// Operators a profile enables for a catalog of `tool_count` tools, with
/// the default thresholds.
pub fn resolve_profile(profile: Profile, tool_count: usize, model_family: Option<&str>) -> BTreeSet<Operator> {
    resolve_profile_with(profile, tool_count, model_family, ToolCountThresholds::default())
}

pub fn resolve_profile_with(
    profile: Profile,
    tool_count: usize,
    model_family: Option<&str>,
    t: ToolCountThresholds,
) -> BTreeSet<Operator> {
    use Operator::*;
    let unknown = ModelFamily::unknown();
    let family = model_family.and_then(lookup_family).map_or(&unknown, |(_, f)| f);

    let conservative = BTreeSet::from([Sdm]);
    let balanced = BTreeSet::from([Sdm, Cas, Cfo, Dro, Tas, Ccp]);
    let mut ops = match profile {
        Profile::Conservative => conservative,
        Profile::Balanced => {
            let mut ops = balanced;
            if tool_count >= t.mid {
                ops.remove(&Cfl);
                ops.remove(&Cfo);
            }
            ops
        }
        Profile::Aggressive => {
            let mut ops: BTreeSet<Operator> = Operator::ORDER.into_iter().collect();
            if family.echo_back_guard {
                ops.remove(&Cfl);
                ops.remove(&SadF);
            }
            ops
        }
        Profile::Auto => {
            if tool_count <= t.low || tool_count > t.high {
                conservative
            } else {
                let mut ops = balanced;
                ops.remove(&Cfl);
                ops.remove(&Cfo);
                ops
            }
        }
    };
    for op in &family.disable {
        ops.remove(op);
    }
    ops
}

#[cfg(test)]
mod tests {
    use super::*;
    use Operator::*;

    #[test]
    fn profile_table() {
        assert_eq!(
            resolve_profile(Profile::Balanced, 43, None),
            BTreeSet::from([Sdm, Cas, Dro, Tas, Ccp])
        );
        assert_eq!(
            resolve_profile(Profile::Balanced, 10, None),
            BTreeSet::from([Sdm, Cas, Cfo, Dro, Tas, Ccp])
        );
        for n in [0, 25, 100] {
            assert_eq!(
                resolve_profile(Profile::Conservative, n, Some("claude")),
                BTreeSet::from([Sdm])
            );
        }
        assert_eq!(
            resolve_profile(Profile::Auto, 25, None),
            BTreeSet::from([Sdm, Cas, Dro, Tas, Ccp])
        );
        assert_eq!(resolve_profile(Profile::Auto, 20, None), BTreeSet::from([Sdm]));
        assert_eq!(resolve_profile(Profile::Auto, 40, None).len(), 5);
        assert_eq!(resolve_profile(Profile::Auto, 41, None), BTreeSet::from([Sdm]));
    }

    #[test]
    fn aggressive_echo_back_guard() {
        assert_eq!(resolve_profile(Profile::Aggressive, 5, Some("claude")).len(), 8);
        assert_eq!(resolve_profile(Profile::Aggressive, 5, Some("Claude-Opus-4")).len(), 8);
        let guarded = resolve_profile(Profile::Aggressive, 5, None);
        assert_eq!(guarded, BTreeSet::from([Sdm, Tas, Dro, Cfo, Cas, Ccp]));
        // gpt also drops CFO everywhere
        let gpt = resolve_profile(Profile::Aggressive, 5, Some("gpt-5"));
        assert_eq!(gpt, BTreeSet::from([Sdm, Tas, Dro, Cas, Ccp]));
        assert!(!resolve_profile(Profile::Balanced, 5, Some("gpt")).contains(&Cfo));
        assert!(resolve_profile(Profile::Balanced, 5, Some("gpt-4o")).contains(&Cfo));
    }

    #[test]
    fn family_lookup_prefers_longest_key() {
        assert_eq!(lookup_family("claude-sonnet-4.5").unwrap().0, "claude-sonnet");
        assert_eq!(lookup_family("claude").unwrap().0, "claude");
        assert!(lookup_family("claudette").is_none());
        assert!(lookup_family("llama").is_none());
    }

    #[test]
    fn profile_names_round_trip() {
        for p in Profile::ALL {
            assert_eq!(p.tag().parse::<Profile>(), Ok(p));
        }
        assert!("fast".parse::<Profile>().is_err());
    }
}
