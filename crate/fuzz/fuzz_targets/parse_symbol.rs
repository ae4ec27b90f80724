#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(sym) = holoquant::symbol::parse_symbol(text) {
            // printing and reparsing must give the same symbol
            let again = holoquant::symbol::parse_symbol(&sym.to_string()).expect("display output parses");
            assert_eq!(again.dim(), sym.dim());
        }
    }
});
