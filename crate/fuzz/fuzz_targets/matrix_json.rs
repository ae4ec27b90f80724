#![no_main]

use holoquant::io::{matrix_from_json, matrix_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = matrix_from_json(text) {
            let back = matrix_from_json(&matrix_to_json(&m).unwrap()).unwrap();
            assert_eq!(back.nrows(), m.nrows());
        }
    }
});
