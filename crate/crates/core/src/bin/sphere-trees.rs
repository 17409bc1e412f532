fn main() {
    std::process::exit(sphere_trees::cli::main());
}
