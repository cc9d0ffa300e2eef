//! High-order derivatives at c = 1 through truncated Taylor arithmetic.
//!
//! h(c) = 1/(c − D²) + D (c − D²)^{-3/2} arccos(−D/√c) is differentiated
//! up to order 9, the most the phase density needs for L = 10.

use zpd::jets::{jet_sqrt_inv_arccos, jet_var};

fn main() -> zpd::Result<()> {
    let order = 9;
    for d in [-0.4, 0.0, 0.45] {
        let shifted = jet_var(order).add_scalar(-d * d);
        let h = shifted.powf(-1.0)? + shifted.powf(-1.5)?.scale(d) * jet_sqrt_inv_arccos(d, order)?;
        println!("D = {d}");
        for k in 0..=order {
            println!("  d^{k}h/dc^{k} (1) = {:>16.8e}", h.derivative_at_one(k)?);
        }
    }
    Ok(())
}
