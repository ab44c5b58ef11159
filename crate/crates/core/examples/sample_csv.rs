//! Sample a fixture on its grid and write the CSV to stdout.

use riemann_mhd::cli::cmd_sample;
use riemann_mhd::fixtures;

fn main() -> riemann_mhd::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "E3".into());
    let Some(fx) = fixtures::by_name(&name) else {
        eprintln!("unknown fixture {name}");
        std::process::exit(2);
    };
    let built = fx.solution.build()?;
    print!("{}", cmd_sample(built.solution(), &fx.grid)?);
    Ok(())
}
