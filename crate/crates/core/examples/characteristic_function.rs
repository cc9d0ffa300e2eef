//! The joint characteristic function on a few frequencies, for growing L.

use zpd::{pdfs, ModelParams};

fn main() {
    let freqs = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (1.0, 1.0), (3.0, -2.0)];
    for l in [1, 5, 10] {
        let p = ModelParams::reference(l);
        println!("L = {l}");
        for &(w1, w2) in &freqs {
            let c = pdfs::joint_cf(&p, w1, w2);
            println!("  psi({w1:>4}, {w2:>4}) = {:>11.6} {:+.6}j   |psi| = {:.6}", c.re, c.im, c.norm());
        }
    }
}
