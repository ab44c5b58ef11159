//! Run the full verification suite on one fixture.

use riemann_mhd::cli::cmd_verify;
use riemann_mhd::config::{Check, RunConfig};
use riemann_mhd::fixtures;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "A".into());
    let Some(fx) = fixtures::by_name(&name) else {
        eprintln!("unknown fixture {name}");
        std::process::exit(2);
    };
    let mut run = RunConfig::new(fx.solution, fx.grid);
    run.checks = vec![Check::Pde, Check::DivH, Check::Lorentz, Check::Vorticity, Check::Current, Check::Circulation, Check::Gmc, Check::Rank];
    match cmd_verify(&run) {
        Ok(r) => println!("{}", serde_json::to_string_pretty(&r).unwrap()),
        Err(f) => {
            eprintln!("{}", f.message);
            std::process::exit(f.code);
        }
    }
}
