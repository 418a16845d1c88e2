fn main() {
    println!("pivp");
}
