//! Scenario runner for blow-up experiments: parses scenario files, runs the
//! criteria/simulation/monitor pipeline and writes deterministic outputs.

pub mod output;
pub mod pipeline;
pub mod scenario;

pub use pipeline::{run_scenario, Mode, RunReport};
pub use scenario::{parse_scenario, parse_str, Scenario};

/// Applies a sweep parameter to a scenario. `K2` sets the builder target;
/// run-level names (`dt0`, `t_max`, `psi_cap`, `c_nl`) set the time stepping.
pub fn with_param(base: &Scenario, param: &str, value: f64) -> Result<Scenario, String> {
    let mut s = base.clone();
    match param {
        "K2" | "k2" => match &mut s.data {
            scenario::DataDesc::Builder { k2, .. } => *k2 = value,
            _ => return Err("parameter K2 needs a builder data source".into()),
        },
        "dt0" => s.run.dt0 = value,
        "t_max" => s.run.t_max = value,
        "psi_cap" => s.run.psi_cap = value,
        "c_nl" => s.run.c_nl = value,
        other => return Err(format!("unknown sweep parameter `{other}`")),
    }
    let tag: String = value
        .to_string()
        .chars()
        .map(|c| if c == '.' { 'p' } else { c })
        .filter(|c| c.is_ascii_alphanumeric() || *c == '-' || *c == 'p')
        .collect();
    s.name = format!("{}_{param}_{tag}", base.name);
    Ok(s)
}
