use std::time::Instant;
use qaffine_core::presentations::*;
use qaffine_core::rootsystem::{CartanData, TypeLetter};

fn main() {
    let a1 = CartanData::new(TypeLetter::A, 1).unwrap();
    let a2 = CartanData::new(TypeLetter::A, 2).unwrap();

    let t = Instant::now();
    let ch1 = chevalley_rules(&a1).unwrap();
    println!("chevalley A1: {:?}  ({} rules)", t.elapsed(), ch1.rules.len());

    let t = Instant::now();
    let ch2 = chevalley_rules(&a2).unwrap();
    println!("chevalley A2: {:?}  ({} rules)", t.elapsed(), ch2.rules.len());

    let t = Instant::now();
    let dr1 = drinfeld_rules(&a1, 8).unwrap();
    println!("drinfeld A1 bound 8: {:?}  ({} rules)", t.elapsed(), dr1.rules.len());

    let t = Instant::now();
    let s = suite_drinfeld(&dr1, 4);
    println!("suite_drinfeld A1 probe 4: {:?}  ({} instances, pass={})",
        t.elapsed(), s.len(), suite_passes(&s));

    let t = Instant::now();
    let dr2 = drinfeld_rules(&a2, 8).unwrap();
    println!("drinfeld A2 bound 8 (cubic cap 4): {:?}  ({} rules)", t.elapsed(), dr2.rules.len());

    let t = Instant::now();
    let s = suite_drinfeld(&dr2, 4);
    println!("suite_drinfeld A2 probe 4: {:?}  ({} instances, pass={})",
        t.elapsed(), s.len(), suite_passes(&s));
    for f in suite_failures(&s).iter().take(5) {
        println!("  FAIL {f}");
    }
}
