//! Cross-sections for the suspended golden-mean shift and the symbolic code
//! they induce on a sample of points.

use expflow::flow::FlowSystem;
use expflow::sections::{build_family, code_system};
use expflow::systems::flow_fixture;
use expflow::with_flow;

fn main() -> expflow::error::Result<()> {
    let f = flow_fixture("suspension(golden-mean-sft, unit)")?;
    with_flow!(&f, f => {
        let fam = build_family(f, 0.5, 0.25)?;
        let ys: Vec<_> = f.net(0.25).into_iter().step_by(5).take(24).collect();
        let coded = code_system(&fam, f, &ys, 8.0, 0.25)?;
        println!("{} sections, {} points coded", fam.len(), coded.correspondence.len());
        for (i, row) in coded.transitions.iter().enumerate() {
            let next: Vec<usize> = (0..row.len()).filter(|&j| row[j]).collect();
            println!("section {i} -> {next:?}");
        }
        let x = coded.subshift()?;
        println!("coded words of length 1..6: {:?}", (1..=6).map(|n| x.word_count(n)).collect::<Result<Vec<_>, _>>()?);
        Ok(())
    })
}
