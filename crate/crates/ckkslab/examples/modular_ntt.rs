//! Word-sized modular arithmetic and a negacyclic NTT product.

use ckkslab::zq::{gen_ntt_prime, NttTable};

fn main() {
    let n = 8;
    let m = gen_ntt_prime(40, n, &[]).expect("prime");
    let q = m.value();
    println!("q = {q} ({} bits), q mod 2n = {}", 64 - q.leading_zeros(), q % (2 * n as u64));

    let (x, y) = (123_456_789_012u64 % q, 987_654_321_098u64 % q);
    let c = m.shoup(y);
    println!("x * y mod q = {} (Shoup: {})", m.mul(x, y), m.mul_shoup(x, &c));
    println!("x^-1 * x = {}", m.mul(m.inv(x), x));

    // (1 + X) * X^7 = X^7 + X^8 = X^7 - 1 in Z_q[X]/(X^8 + 1).
    let table = NttTable::new(m, n).expect("table");
    let mut a = vec![1, 1, 0, 0, 0, 0, 0, 0];
    let mut b = vec![0, 0, 0, 0, 0, 0, 0, 1];
    table.forward(&mut a);
    table.forward(&mut b);
    let mut prod: Vec<u64> = a.iter().zip(&b).map(|(u, v)| m.mul(*u, *v)).collect();
    table.inverse(&mut prod);
    let signed: Vec<i64> = prod.iter().map(|&v| m.center(v)).collect();
    println!("(1 + X) X^7 = {signed:?}");
}
