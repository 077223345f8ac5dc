//! Identify the Galois group of a few polynomials.

use exceptional::galois::galois_group;
use exceptional::ZPoly;

fn main() -> exceptional::Result<()> {
    for c in [
        vec![3, 11, -7, -1, 1],
        vec![-13, 16, -4, -2, 1],
        vec![9, 0, 6, 3, 0, 1],
        vec![-2, 0, 0, 0, 1],
    ] {
        let f = ZPoly::from_i64(&c);
        println!("{f}: {}", galois_group(&f)?);
    }
    Ok(())
}
