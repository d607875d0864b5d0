fn main() {
    std::process::exit(kat_sphere::cli::run(std::env::args_os()));
}
