//! Builds a scenario in code, prints its JSON and runs it.

use hardy_core::scenario::{self, Overrides, PointSpec, Scenario};
use hardy_core::suite::Check;

fn main() {
    let s = Scenario {
        version: scenario::SCENARIO_VERSION,
        name: Some("example".into()),
        algebra: vec![1, 1],
        correspondence: vec![vec![0, 1], vec![2, 1]],
        representation: vec![2, 1],
        truncation: 4,
        seed: 21,
        point: PointSpec::Random { target_norm: 0.9, seed: None },
        polynomials: vec![],
        left_point: None,
        left_argument: None,
        checks: vec![Check::Telescoping, Check::Eigenvector, Check::DefectIdentity, Check::LeftEvalGauge],
        tolerances: Default::default(),
        mutation: Default::default(),
    };
    println!("{}", s.to_json());
    match scenario::run_scenario(&s, &Overrides::default()) {
        Ok(report) => print!("{}", report.render_human()),
        Err(e) => eprintln!("{e}"),
    }
}
