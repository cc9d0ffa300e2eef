//! Joint density of (Re Z, Im Z) along a few slices, in Cartesian and polar form.

use std::f64::consts::PI;

use zpd::{pdfs, ModelParams};

fn main() -> zpd::Result<()> {
    let p = ModelParams::reference(5);
    println!("L = {}, mean direction eps = {:.4} rad", p.big_l, p.epsilon);
    println!("{:>6} {:>14} {:>14}", "z_r", "f(z_r, 0)", "f(z_r, 1.5)");
    for i in -4..=8 {
        let x = i as f64;
        println!(
            "{x:>6.1} {:>14.6e} {:>14.6e}",
            pdfs::joint_pdf(&p, x, 0.0)?,
            pdfs::joint_pdf(&p, x, 1.5)?
        );
    }

    // Polar form includes the Jacobian r.
    let (r, theta) = (3.0, PI / 6.0);
    let cart = pdfs::joint_pdf(&p, r * theta.cos(), r * theta.sin())?;
    println!("\npolar f(r={r}, theta=pi/6) = {:.6e}", pdfs::joint_pdf_polar(&p, r, theta)?);
    println!("r * cartesian            = {:.6e}", r * cart);
    Ok(())
}
