//! Minimal tour: pull a design from the catalog, pick a rotated
//! constellation, and classify the pair.

use stbc_lab::constellation::{make_signal_set, SetKind};
use stbc_lab::construct::catalog;
use stbc_lab::design::{check_sd_general, classify};
use stbc_lab::DEFAULT_TOL;

fn main() -> stbc_lab::Result<()> {
    let design = catalog("ciod4")?;
    let set = make_signal_set(SetKind::Qam, 4, true)?.rotated(31.7175);
    assert!(check_sd_general(&design, DEFAULT_TOL).ok);
    let class = classify(&design, Some(&set), DEFAULT_TOL);
    assert_eq!(class.rfsdd_with_set, Some(true));
    println!(
        "{} ({}x{}, {} symbols): single-symbol decodable, full diversity with {}",
        design.name(),
        design.l(),
        design.n(),
        design.k(),
        set.label()
    );
    Ok(())
}
