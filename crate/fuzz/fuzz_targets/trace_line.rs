#![no_main]

use libfuzzer_sys::fuzz_target;
use nhdf_sim::sim::{parse_line, read_trace, to_line};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(record) = parse_line(text) {
            assert_eq!(parse_line(&to_line(&record)).expect("round trip"), record);
        }
    }
    let _ = read_trace(data);
});
