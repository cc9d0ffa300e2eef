//! Simulate Z and test the samples against the corrected and legacy densities.

use std::f64::consts::PI;

use zpd::{pdfs, simulate, ModelParams};

fn main() -> zpd::Result<()> {
    let p = ModelParams::reference(5);
    let batch = simulate::sample_z(&p, 100_000, 42)?;
    let s = batch.summary();
    println!("mean Z = {:.4} {:+.4}j  (se {:.4}, {:.4})", s.mean_re, s.mean_im, s.se_re, s.se_im);
    println!("expected {:.4}", p.mu() * (p.big_l as f64 * p.sigma_prod()));

    let amps = batch.amplitudes();
    let r_max = pdfs::amplitude_tail_radius(&p, 1e-12)?;
    let corrected = simulate::gof(&amps, |r| pdfs::amplitude_pdf(&p, r), (0.0, r_max))?;
    let legacy = simulate::gof(&amps, |r| pdfs::amplitude_pdf_legacy(&p, r), (0.0, 45.0 / (1.0 - p.mu_abs)))?;
    let phase = simulate::gof(&batch.phases(), |t| pdfs::phase_pdf_exact(&p, t), (-PI, PI))?;

    println!("\n{:<18} {:>9} {:>11} {:>8} {:>5}", "target", "KS", "chi2/dof", "TV", "pass");
    for (name, g) in [("amplitude", corrected), ("amplitude legacy", legacy), ("phase", phase)] {
        println!(
            "{name:<18} {:>9.5} {:>11.2} {:>8.4} {:>5}",
            g.ks_stat,
            g.chi2_stat / g.chi2_dof as f64,
            g.tv_distance,
            g.pass
        );
    }
    println!("KS critical value (1%): {:.5}", simulate::ks_critical_1pct(amps.len()));
    Ok(())
}
