//! Corrected amplitude density next to the legacy one. With no correlation
//! the legacy form cannot see the variances; the corrected one can.

use std::f64::consts::PI;

use zpd::{pdfs, ModelParams};

fn main() -> zpd::Result<()> {
    let a = ModelParams::new(0.7, 1.5, 0.0, PI / 6.0, 4)?;
    let b = ModelParams::new(2.0, 1.5, 0.0, PI / 6.0, 4)?;
    println!("{:>5} {:>12} {:>12} {:>12} {:>12}", "r", "corr(a)", "corr(b)", "legacy(a)", "legacy(b)");
    for i in 1..=16 {
        let r = 0.5 * i as f64;
        println!(
            "{r:>5.1} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e}",
            pdfs::amplitude_pdf(&a, r)?,
            pdfs::amplitude_pdf(&b, r)?,
            pdfs::amplitude_pdf_legacy(&a, r)?,
            pdfs::amplitude_pdf_legacy(&b, r)?,
        );
    }

    let p = ModelParams::reference(5);
    let grid = pdfs::amplitude_grid(&p, pdfs::amplitude_tail_radius(&p, 1e-9)?, 2001);
    let curve = pdfs::make_curve(&pdfs::Density::Amplitude(p), &grid)?;
    println!("\nreference L=5: trapezoid mass of the corrected curve = {:.8}", curve.trapezoid_mass());
    Ok(())
}
