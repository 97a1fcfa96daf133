fn main() {
    println!("wbf");
}
