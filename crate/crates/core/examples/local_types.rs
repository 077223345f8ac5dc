//! Local Galois types at each ramified prime.

use exceptional::local::analyze;
use exceptional::ZPoly;

fn main() -> exceptional::Result<()> {
    for (c, ell) in [(vec![-13, 16, -4, -2, 1], 11), (vec![9, 0, 6, 3, 0, 1], 3)] {
        let a = analyze(&ZPoly::from_i64(&c), ell)?;
        println!("{} ({}, d_K = {})", a.polynomial, a.group, a.field_discriminant);
        for (p, t) in &a.local_types {
            println!("  p = {p}: {t}");
        }
    }
    Ok(())
}
