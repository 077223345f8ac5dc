//! Discriminant, real roots and p-adic splitting of a quartic.

use exceptional::poly::{discriminant, padic_splitting, sturm_real_roots};
use exceptional::ZPoly;

fn main() -> exceptional::Result<()> {
    let f = ZPoly::from_i64(&[3, 11, -7, -1, 1]);
    println!("f = {f}");
    println!("disc(f) = {}", discriminant(&f)?);
    println!("real roots: {}", sturm_real_roots(&f)?);
    for p in [2, 3, 59] {
        let s = padic_splitting(&f, p, 40)?;
        println!("over Q_{p}: (e, f) = {:?}, v_p(d_K) = {}", s.ef(), s.disc_valuation);
    }
    Ok(())
}
