//! Replays the checked-in fuzz seeds through every decoder on stable.

use std::fs;
use std::path::PathBuf;

use holoquant::holospace::{HoloFunction, SpaceSpec};
use holoquant::io::{
    grid_csv_string, matrix_from_json, matrix_to_json, parse_complex, parse_complex_list, parse_group_element,
    parse_hermite_coeffs, read_grid_csv,
};
use holoquant::quantize::OrderingScheme;
use holoquant::su2::{PeterWeylCoeffs, Spin};
use holoquant::symbol::parse_symbol;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn expect(name: &str, ok: bool, bad_prefixes: &[&str]) {
    let should_fail = bad_prefixes.iter().any(|p| name.starts_with(p));
    assert_eq!(ok, !should_fail, "seed {name}");
}

#[test]
fn symbol_seeds() {
    for (name, text) in seeds("parse_symbol") {
        let parsed = parse_symbol(&text);
        if let Ok(sym) = &parsed {
            assert_eq!(parse_symbol(&sym.to_string()).unwrap().dim(), sym.dim());
        }
        expect(&name, parsed.is_ok(), &["bad"]);
    }
}

#[test]
fn matrix_seeds() {
    for (name, text) in seeds("matrix_json") {
        let parsed = matrix_from_json(&text);
        if let Ok(m) = &parsed {
            assert_eq!(&matrix_from_json(&matrix_to_json(m).unwrap()).unwrap(), m);
        }
        expect(&name, parsed.is_ok(), &["extra"]);
    }
}

#[test]
fn grid_seeds() {
    for (name, text) in seeds("grid_csv") {
        let parsed = read_grid_csv(&text);
        if let Ok(rows) = &parsed {
            assert_eq!(&read_grid_csv(&grid_csv_string(rows).unwrap()).unwrap(), rows);
        }
        expect(&name, parsed.is_ok(), &["short"]);
    }
}

#[test]
fn hermite_seeds() {
    for (name, text) in seeds("hermite_coeffs") {
        expect(&name, parse_hermite_coeffs(&text).is_ok(), &["bad"]);
    }
}

#[test]
fn value_syntax_seeds() {
    for (name, text) in seeds("value_syntax") {
        let ok = match name.as_str() {
            "complex" | "spaced" => parse_complex(&text).is_ok() && parse_complex_list(&text).is_ok(),
            "group" => parse_group_element(&text).is_ok(),
            "spin" => text.parse::<Spin>().is_ok(),
            "scheme" => text.parse::<OrderingScheme>().is_ok(),
            _ => true,
        };
        assert!(ok, "seed {name}");
    }
}

#[test]
fn peter_weyl_seeds() {
    for (name, text) in seeds("peter_weyl_json") {
        expect(&name, serde_json::from_str::<PeterWeylCoeffs>(&text).is_ok(), &["missing"]);
    }
}

#[test]
fn holo_function_seeds() {
    for (name, text) in seeds("holo_function_json") {
        if name.starts_with("bad") {
            assert!(serde_json::from_str::<HoloFunction>(&text).is_err(), "seed {name}");
        } else if name.starts_with("space") {
            assert!(serde_json::from_str::<SpaceSpec>(&text).is_ok(), "seed {name}");
        } else {
            let f: HoloFunction = serde_json::from_str(&text).unwrap_or_else(|e| panic!("seed {name}: {e}"));
            assert!(f.norm().unwrap() > 0.0);
        }
    }
}
