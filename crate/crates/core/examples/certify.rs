//! Certifies positive entropy at a point of the suspended cat map, then
//! re-checks the certificate.

use expflow::cli::certify_preset;
use expflow::entropy::{certify_positive_entropy, verify_certificate, VerifyOptions};
use expflow::error::Error;
use expflow::suspension::SuspensionPoint;
use expflow::systems::{self, AnyFlow, TorusPoint};

fn main() -> expflow::error::Result<()> {
    let AnyFlow::Cat(f) = systems::flow_fixture("suspended-cat-map")? else {
        unreachable!()
    };
    let (p, cfg) = certify_preset("suspended-cat-map").ok_or_else(|| Error::Config("no preset".into()))?;
    let p: SuspensionPoint<TorusPoint> = serde_json::from_value(p)?;

    let cert = certify_positive_entropy(&f, &p, &cfg)?;
    println!(
        "orbits of period {:.3} and {:.3}, separated after {:.3}",
        cert.a.period, cert.b.period, cert.separation_time
    );
    print!("{}", cert.rates_csv());
    println!(
        "entropy >= {:.4} (time changed), >= {:.4} (flow)",
        cert.bound_time_changed, cert.bound_flow
    );

    let report = verify_certificate(&f, &cert, VerifyOptions::default())?;
    println!(
        "verified {} families, {} shadows, {} pairs",
        report.families, report.shadows_checked, report.pairs_checked
    );
    Ok(())
}
