#![no_main]

use libfuzzer_sys::fuzz_target;
use nhdf_sim::sweep::{read_csv, summarize, write_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_csv(data) else { return };
    let mut out = Vec::new();
    write_csv(&mut out, &rows).expect("write");
    let again = read_csv(out.as_slice()).expect("re-read");
    assert_eq!(again.len(), rows.len());
    let _ = summarize(&rows);
});
