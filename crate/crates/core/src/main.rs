fn main() {
    std::process::exit(voxproj::cli::run_from_env());
}
