//! Shared fixtures for the integration suites: a brute-force word-set
//! oracle that never touches the library's recursions, and a tolerant
//! tiling comparison built from the public API only.
#![allow(dead_code)]

use blowup::{PowerVector, Tiling, Word};

/// Every word with `e > k >= e_minus`, found by exhaustive depth-first
/// extension. Independent of the prepend and step recursions: the only
/// shared vocabulary is the letter weights themselves.
pub fn oracle_omega(k: u32, pv: &PowerVector) -> Vec<Word> {
    let letters: Vec<u8> = pv.letters().collect();
    let mut found = Vec::new();
    let mut stack: Vec<(Vec<u8>, u32)> = letters.iter().map(|&l| (vec![l], 0)).collect();
    while let Some((word, e_minus)) = stack.pop() {
        let e = e_minus + pv.a(*word.last().unwrap());
        if e > k && k >= e_minus {
            found.push(Word::new(word.clone()).unwrap());
        }
        // Children have e_minus equal to this word's e; once that
        // exceeds k no extension can re-enter the set.
        if e <= k {
            for &l in &letters {
                let mut child = word.clone();
                child.push(l);
                stack.push((child, e));
            }
        }
    }
    found.sort();
    found
}

/// Transform-set equality within `tol`, ignoring tile order and
/// addresses. Both tilings index their transforms, and each side must
/// find every tile of the other; tilings here never carry duplicate
/// transforms, so mutual containment with equal counts is equality.
pub fn same_tiles(a: &Tiling, b: &Tiling, tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ia = blowup::tiling::TransformIndex::build(a, tol);
    let ib = blowup::tiling::TransformIndex::build(b, tol);
    a.tiles().iter().all(|t| ib.lookup(t.transform()).is_some())
        && b.tiles().iter().all(|t| ia.lookup(t.transform()).is_some())
}
