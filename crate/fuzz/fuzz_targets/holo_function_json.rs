#![no_main]

use holoquant::holospace::{HoloFunction, SpaceSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = serde_json::from_slice::<SpaceSpec>(data);
    if let Ok(f) = serde_json::from_slice::<HoloFunction>(data) {
        let _ = f.norm();
    }
});
