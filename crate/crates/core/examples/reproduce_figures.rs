//! Writes the figure bundles (histograms, analytic grids, gnuplot scripts)
//! into a directory given as the first argument, default `figures`.

use clap::Parser;
use zpd::cli::{cmd_reproduce_figures, Cli, Command};

fn main() -> zpd::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "figures".into());
    let Command::ReproduceFigures(args) = Cli::parse_from(["zpd", "reproduce-figures", "--out-dir", &dir]).command else {
        unreachable!()
    };
    let manifest = cmd_reproduce_figures(&args)?;
    for (l, m) in &manifest.joint_grid_mass {
        println!("L = {l:>2}: joint grid mass {m:.5}");
    }
    println!("{} files under {}", manifest.files.len(), manifest.out_dir.display());
    println!("render with: (cd {dir}/fig1 && gnuplot fig1.gp)");
    Ok(())
}
