//! K_n(x) against its finite series in elementary functions, plus the Lah
//! numbers behind the series coefficients.

use zpd::specfun::{bessel_kn, kl_series_approx, LahTable};

fn main() -> zpd::Result<()> {
    let lah = LahTable::new(6)?;
    println!("Lah numbers L(l, q):");
    for l in 1..=6 {
        let row: Vec<String> = (1..=l).map(|q| format!("{:>6}", lah.get(l, q).unwrap())).collect();
        println!("  l={l}: {}", row.join(""));
    }

    println!("\nrelative error of the series, T = n + 6:");
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "n", "x=0.5", "x=2", "x=5", "x=10");
    for n in 1..=6 {
        let mut line = format!("{n:>4}");
        for x in [0.5, 2.0, 5.0, 10.0] {
            let k = bessel_kn(n, x)?;
            let s = kl_series_approx(n, x, n + 6)?;
            line += &format!(" {:>10.2e}", ((s - k) / k).abs());
        }
        println!("{line}");
    }
    Ok(())
}
