#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wade_core::io::{read_table, Table};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn wade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wade"))
        .args(args)
        .env_remove("WADE_OUT_DIR")
        .output()
        .expect("run wade")
}

pub fn wade_ok(args: &[&str]) -> Output {
    let out = wade(args);
    assert!(
        out.status.success(),
        "wade {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn table(path: &Path) -> Table {
    read_table(fs::File::open(path).expect("open table")).expect("parse table")
}

pub fn write_csv(dir: &Path, name: &str, rows: &[(i64, f64)]) -> PathBuf {
    let mut text = String::from("year,value\n");
    for (y, v) in rows {
        text.push_str(&format!("{y},{v}\n"));
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
