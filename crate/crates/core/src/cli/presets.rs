//! Figure-reproduction presets.

use std::f64::consts::PI;

use super::config::{num, ModelKind, Origin, ScenarioConfig};

pub const FIGURES: &[&str] = &["1", "2a", "2b", "3a", "3b", "3c", "3d"];

/// Expands `1`, `2a`, …, the groups `2` and `3`, or `all`.
pub fn expand(which: &str) -> Option<Vec<&'static str>> {
    let pick =
        |prefix: &str| -> Vec<&'static str> { FIGURES.iter().copied().filter(|f| f.starts_with(prefix)).collect() };
    match which {
        "all" => Some(FIGURES.to_vec()),
        "2" | "3" => Some(pick(which)),
        _ => FIGURES.iter().find(|&&f| f == which).map(|&f| vec![f]),
    }
}

fn set(cfg: &mut ScenarioConfig, pairs: &[(&str, String)]) {
    for (k, v) in pairs {
        cfg.set(k, v, Origin::Default)
            .unwrap_or_else(|e| panic!("preset value rejected: {e}"));
    }
}

/// Scenario for one figure, starting from `base` (which carries the
/// environment's truncation ceiling).
pub fn figure(id: &str, base: &ScenarioConfig) -> Option<ScenarioConfig> {
    let mut cfg = base.clone();
    match id {
        "1" => {
            // The resonant distribution spreads without bound; the wall
            // population cannot reach 1e-10 within the default ceiling.
            cfg.model = ModelKind::Parametric;
            set(
                &mut cfg,
                &[
                    ("g_abs", "1".into()),
                    ("delta", "0".into()),
                    ("t_max", "4".into()),
                    ("samples", "401".into()),
                    ("n", "0,1,2,3".into()),
                    ("leak_tol", "1e-4".into()),
                ],
            );
        }
        "2a" | "2b" => {
            let (delta, leak) = if id == "2a" { (2.02, "1e-6") } else { (2.2, "1e-10") };
            let period = PI / (delta * delta / 4.0 - 1.0f64).sqrt();
            cfg.model = ModelKind::Parametric;
            set(
                &mut cfg,
                &[
                    ("g_abs", "1".into()),
                    ("delta", num(delta)),
                    ("t_max", num(2.25 * period)),
                    ("samples", "2001".into()),
                    ("n", "0,1,2,3".into()),
                    ("leak_tol", leak.into()),
                ],
            );
        }
        "3a" | "3b" | "3c" | "3d" => {
            let ratio = match id {
                "3a" => 0.0,
                "3b" => 0.5,
                "3c" => 1.0,
                _ => 2.0,
            };
            cfg.model = ModelKind::Driven;
            set(
                &mut cfg,
                &[
                    ("eps_abs", "1".into()),
                    ("delta", num(2.0 * ratio)),
                    ("t_max", num(4.0 * PI)),
                    ("samples", "1001".into()),
                    ("n", "0,1,2".into()),
                ],
            );
        }
        _ => return None,
    }
    Some(cfg)
}
