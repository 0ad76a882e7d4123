#![allow(dead_code)]

use std::collections::BTreeMap;

use commutant_core::symmetry::{parse_word, Group, SymmetryWord};

pub fn word(text: &str, dims: &[(&str, usize)]) -> SymmetryWord {
    let dims: BTreeMap<String, usize> = dims.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    parse_word(text, &dims, &BTreeMap::new()).expect("valid word")
}

pub fn uword(text: &str, n: usize) -> SymmetryWord {
    word(text, &[("U", n)])
}

pub fn oword(text: &str, n: usize) -> SymmetryWord {
    let dims = BTreeMap::from([("U".to_string(), n)]);
    let groups = BTreeMap::from([("U".to_string(), Group::Orthogonal)]);
    parse_word(text, &dims, &groups).expect("valid word")
}
