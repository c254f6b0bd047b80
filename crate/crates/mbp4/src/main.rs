fn main() {
    mbp4::cli::main();
}
