#![no_main]

use holoquant::io::{parse_complex, parse_complex_list, parse_group_element};
use holoquant::quantize::OrderingScheme;
use holoquant::su2::Spin;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_complex(text);
        let _ = parse_complex_list(text);
        let _ = parse_group_element(text);
        let _ = text.parse::<Spin>();
        let _ = text.parse::<OrderingScheme>();
    }
});
