fn main() {
    eprintln!("teichform: command-line interface under construction");
    std::process::exit(2);
}
