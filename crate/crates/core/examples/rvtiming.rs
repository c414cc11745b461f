//! Scratch timing probe for the root-vector catalog (not part of the test
//! suite; removed before release).

use std::time::Instant;

use qaffine_core::algebra::nf;
use qaffine_core::presentations::{chevalley_rules, drinfeld_rules, SUITE_BUDGET};
use qaffine_core::rootsystem::{CartanData, TypeLetter};
use qaffine_core::rootvectors::{bridge_letter_map, RootVectorCatalog};

fn main() {
    // ---- A2: reduced catalog in the reflection table ----
    let d2 = CartanData::new(TypeLetter::A, 2).unwrap();
    let t0 = Instant::now();
    let chev2 = chevalley_rules(&d2).unwrap();
    eprintln!("A2 chevalley rules: {:?}", t0.elapsed());
    let mut cat2 = RootVectorCatalog::reduced(&d2, 16, &chev2).unwrap();
    for r in [2i64, 3, 4, 5, 6, 7, 8, 9, -1, -2, -3, -4, -5, -6, -7, -8] {
        let t = Instant::now();
        let e = cat2.real_root_vector(r).unwrap();
        eprintln!(
            "A2 r={:>3}: {:?}, terms={} maxdeg={}",
            r,
            t.elapsed(),
            e.terms.len(),
            e.terms.keys().map(|w| w.letters.len()).max().unwrap_or(0)
        );
    }
    let t = Instant::now();
    let im = cat2.imaginary_root_vector(1, 1).unwrap();
    eprintln!("A2 imag (1,1): {:?} terms={}", t.elapsed(), im.terms.len());
    let t = Instant::now();
    let im = cat2.imaginary_root_vector(2, -1).unwrap();
    eprintln!("A2 imag (2,-1): {:?} terms={}", t.elapsed(), im.terms.len());

    // ---- A1: raw catalog mapped through the dictionary into the loop table ----
    let d1 = CartanData::new(TypeLetter::A, 1).unwrap();
    let t0 = Instant::now();
    let drin1 = drinfeld_rules(&d1, 12).unwrap();
    eprintln!("A1 drinfeld rules bound 12: {:?} ({} rules)", t0.elapsed(), drin1.rules.len());
    let mut raw1 = RootVectorCatalog::new(&d1, 12).unwrap();
    for r in [4i64, 5, 6, 7, -4, -5, -6, -7] {
        let t = Instant::now();
        let e = raw1.real_root_vector(r).unwrap();
        let build = t.elapsed();
        let t = Instant::now();
        let img = bridge_letter_map(&d1, &e).unwrap();
        let map_t = t.elapsed();
        let t = Instant::now();
        let red = nf(&drin1, &img, SUITE_BUDGET).unwrap();
        eprintln!(
            "A1 raw r={:>3}: build {:?} ({} terms), map {:?} ({} terms), drin nf {:?} -> {} terms",
            r,
            build,
            e.terms.len(),
            map_t,
            img.terms.len(),
            t.elapsed(),
            red.terms.len()
        );
    }
    let t = Instant::now();
    let im3 = raw1.imaginary_root_vector(1, 3).unwrap();
    let build = t.elapsed();
    let t = Instant::now();
    let img = bridge_letter_map(&d1, &im3).unwrap();
    let red = nf(&drin1, &img, SUITE_BUDGET).unwrap();
    eprintln!(
        "A1 raw imag 3: build {:?} ({} terms), map+nf {:?} -> {} terms",
        build,
        im3.terms.len(),
        t.elapsed(),
        red.terms.len()
    );
}
