//! Reparametrizations and orbit classification on a few fixtures.

use expflow::flow::{classify_point, rep_membership, FlowSystem, Reparametrization};
use expflow::symbolic::SymbolSequence;
use expflow::systems::{self, AnyFlow};

fn main() -> expflow::error::Result<()> {
    let h = Reparametrization::linear(1.1, 10.0)?;
    println!("t -> 1.1 t within 0.1: {}", rep_membership(&h, 0.1));
    println!("t -> 1.1 t within 0.05: {}", rep_membership(&h, 0.05));

    let AnyFlow::Shift(f) = systems::flow_fixture("suspended-full-shift")? else {
        unreachable!()
    };
    let fixed = f.point(SymbolSequence::constant(2, 0)?, 0.3);
    let other = f.point(SymbolSequence::periodic(2, &[0, 1, 1])?, 0.3);
    for (label, p) in [("0...", fixed), ("011...", other)] {
        let rep = classify_point(&f, &p, 8.0, 1e-6, 0.01)?;
        println!("{label}: {:?}, phi^1 moves it by {:.3e}", rep.kind, f.dist(&f.evaluate(&p, 1.0), &p));
    }
    Ok(())
}
