//! Built-in scenarios, embedded at compile time so `replicate <name>` works
//! without any files on disk.
//!
//! - `demo2x2`: the two-agent tie instance with two optimal partitions and
//!   a continuum of weight-game equilibria.
//! - `bench4x8-pbrag`: four agents, eight tasks, centralized dynamics with
//!   the two-step preset.
//! - `bench4x8-dpbrag`: the same instance run distributed on a directed
//!   cycle with growing/vanishing step phases and noisy reward samples.
//! - `single-task-eps03` / `single-task-eps09`: one contested task on a
//!   directed cycle with derived constant step sizes, at two ceilings for
//!   the non-dominating weights.

pub const NAMES: [&str; 5] = [
    "demo2x2",
    "bench4x8-pbrag",
    "bench4x8-dpbrag",
    "single-task-eps03",
    "single-task-eps09",
];

/// Scenario TOML text by name.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "demo2x2" => Some(include_str!("../scenarios/demo2x2.toml")),
        "bench4x8-pbrag" => Some(include_str!("../scenarios/bench4x8-pbrag.toml")),
        "bench4x8-dpbrag" => Some(include_str!("../scenarios/bench4x8-dpbrag.toml")),
        "single-task-eps03" => Some(include_str!("../scenarios/single-task-eps03.toml")),
        "single-task-eps09" => Some(include_str!("../scenarios/single-task-eps09.toml")),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{Overrides, Scenario};

    #[test]
    fn every_builtin_parses_and_resolves() {
        for name in NAMES {
            let text = builtin(name).unwrap();
            let scenario = Scenario::from_toml(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            let resolved = scenario
                .resolve(&Overrides::default())
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(resolved.name, name);
        }
    }
}
