//! The pair test on the suspended full shift, and a failing pair inside the
//! fixed disc of the blown-up cat map.

use expflow::expansivity::{expansive_check, sample_pairs, test_pair, ExpansivityScale};
use expflow::systems::{self, AnyFlow, BlownUpCat, BlownUpPoint};

fn main() -> expflow::error::Result<()> {
    let scale = ExpansivityScale::new(0.1, 0.02, 6.0)?;
    let AnyFlow::Shift(f) = systems::flow_fixture("suspended-full-shift")? else {
        unreachable!()
    };
    let report = expansive_check(&f, &scale, &sample_pairs(&f, 0.25, 100, 1));
    println!("suspended full shift: passed = {} on {} pairs", report.passed(), report.pairs_tested);

    let AnyFlow::BlownUp(g) = systems::flow_fixture("suspended-blown-up")? else {
        unreachable!()
    };
    let disc = |radius| BlownUpPoint::Disc { radius, angle: 0.0 }.to_torus(&BlownUpCat::default());
    let x = g.point(disc(0.2)?, 0.5);
    let y = g.point(disc(0.3)?, 0.5);
    match test_pair(&g, &x, &y, &ExpansivityScale::new(0.1, 0.05, 6.0)?) {
        Some(c) => println!("disc pair tracks to {:.4} yet sits {:.4} off one orbit", c.tracking, c.orbit_gap),
        None => println!("disc pair separated"),
    }
    Ok(())
}
