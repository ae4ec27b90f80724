#![no_main]

use holoquant::su2::PeterWeylCoeffs;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = serde_json::from_slice::<PeterWeylCoeffs>(data);
});
