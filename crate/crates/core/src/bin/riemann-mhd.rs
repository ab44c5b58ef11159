fn main() {
    std::process::exit(riemann_mhd::cli::run(std::env::args_os()));
}
