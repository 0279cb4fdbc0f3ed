//! Random specification instances on the full 2-shift, traced by spliced
//! sequences.

use expflow::specification::{spec_point_check, splice_candidates, splice_margin, Homeomorphism};
use expflow::suspension::SuspensionBase;
use expflow::systems::ShiftMap;

fn main() -> expflow::error::Result<()> {
    let shift = ShiftMap::full(2)?;
    let eps = 0.25;
    let gap = 2 * u64::from(splice_margin(2, eps));
    let pool = shift.net(0.25);
    let sub = shift.subshift().clone();
    let report = spec_point_check(&shift, &pool[0], eps, gap, 50, 11, &pool, |inst| {
        splice_candidates(&sub, inst, eps)
    })?;
    println!("{}: {}/50 instances traced with gap {gap}", shift.name(), report.passed());
    Ok(())
}
