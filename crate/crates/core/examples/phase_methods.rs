//! The three phase-density evaluators side by side: derivative jets,
//! direct quadrature, and the elementary-function series.

use zpd::pdfs::{self, PhaseEngine, PhaseMethod};
use zpd::ModelParams;

fn main() -> zpd::Result<()> {
    for l in [2, 4, 8] {
        let p = ModelParams::reference(l);
        let exact = PhaseEngine::new(p, PhaseMethod::ExactJet, None)?;
        let quad = PhaseEngine::new(p, PhaseMethod::Quadrature, None)?;
        let series = PhaseEngine::new(p, PhaseMethod::SeriesApprox, None)?;
        println!("L = {l}");
        println!("{:>8} {:>14} {:>14} {:>14}", "theta", "exact", "quadrature", "series T=L");
        for t in pdfs::phase_grid(12) {
            println!(
                "{t:>8.4} {:>14.8} {:>14.8} {:>14.8}",
                exact.eval(t)?,
                quad.eval(t)?,
                series.eval(t)?
            );
        }
        println!();
    }
    Ok(())
}
