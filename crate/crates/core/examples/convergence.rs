//! PDE residual convergence of every reference fixture.

use riemann_mhd::fixtures;
use riemann_mhd::verify::{convergence_order, Order};

fn main() -> riemann_mhd::Result<()> {
    let levels = [64, 128, 256];
    for fx in fixtures::all() {
        let built = match fx.solution.build() {
            Ok(b) => b,
            Err(e) => {
                println!("{:<16} construction failed: {e}", fx.name);
                continue;
            }
        };
        match convergence_order(built.solution(), &fx.grid, &levels) {
            Ok(rep) => {
                let worst = rep
                    .summary
                    .iter()
                    .filter_map(|e| match e.order {
                        Some(Order::Rate(r)) => Some((r, e.equation.as_str(), e.l2)),
                        _ => None,
                    })
                    .min_by(|a, b| a.0.total_cmp(&b.0));
                match worst {
                    Some((r, eq, l2)) => println!("{:<16} min order {r:6.3} ({eq}, l2 {l2:.3e})", fx.name),
                    None => println!("{:<16} exact", fx.name),
                }
            }
            Err(e) => println!("{:<16} verification failed: {e}", fx.name),
        }
    }
    Ok(())
}
