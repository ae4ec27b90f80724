#![no_main]

use holoquant::io::{grid_csv_string, read_grid_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rows) = read_grid_csv(text) {
            let again = read_grid_csv(&grid_csv_string(&rows).unwrap()).unwrap();
            assert_eq!(again.len(), rows.len());
        }
    }
});
