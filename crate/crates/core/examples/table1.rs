//! Existence table of double waves.

fn main() {
    let (text, _) = riemann_mhd::cli::cmd_table1();
    print!("{text}");
}
