fn main() { println!("{}", kronphi::placeholder()); }
