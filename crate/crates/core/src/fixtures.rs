//! The bundled example DGAs.

use crate::format::{parse_dga, DgaFile};

pub const A1: &str = include_str!("../fixtures/a1.dga");
pub const A2: &str = include_str!("../fixtures/a2.dga");
pub const A3: &str = include_str!("../fixtures/a3.dga");
pub const A4: &str = include_str!("../fixtures/a4.dga");
pub const S2: &str = include_str!("../fixtures/s2.dga");

pub fn load(text: &str) -> DgaFile {
    parse_dga(text).expect("bundled fixture parses")
}

pub fn a1() -> DgaFile {
    load(A1)
}

pub fn a2() -> DgaFile {
    load(A2)
}

pub fn a3() -> DgaFile {
    load(A3)
}

pub fn a4() -> DgaFile {
    load(A4)
}

pub fn s2() -> DgaFile {
    load(S2)
}

/// `(name, file)` for A1 through A4.
pub fn all() -> Vec<(&'static str, DgaFile)> {
    vec![("A1", a1()), ("A2", a2()), ("A3", a3()), ("A4", a4())]
}
