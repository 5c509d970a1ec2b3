#![no_main]

use libfuzzer_sys::fuzz_target;
use nhdf_sim::scenario::parse_scenario_str;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(scenario) = parse_scenario_str(text) else { return };
    let sw = &scenario.sweep;
    assert_eq!(
        scenario.cells().len(),
        sw.protocols.len() * sw.node_counts.len() * sw.seeds.len()
    );
    for &n in &sw.node_counts {
        assert!(scenario.config(n, sw.seeds[0]).validate().is_ok());
    }
});
