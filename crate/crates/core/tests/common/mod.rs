#![allow(dead_code)]

use ceres_core::dsl::{parse_schema_file, SchemaDocument};

pub const SCHEMA_FIXTURES: [&str; 3] = ["running.ceres", "conj.ceres", "disj.ceres"];

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn parse(text: &str) -> SchemaDocument {
    parse_schema_file(text)
        .unwrap_or_else(|ds| panic!("{}", ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")))
}

pub fn load(name: &str) -> SchemaDocument {
    parse(&fixture_text(name))
}

pub fn all_fixtures() -> Vec<String> {
    let dir = format!("{}/fixtures", env!("CARGO_MANIFEST_DIR"));
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".ceres"))
        .collect();
    names.sort();
    names
}
