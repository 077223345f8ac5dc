//! Levels, weights and nebentypes for twists of an S4 representation.

use exceptional::local::analyze;
use exceptional::recipe::{enumerate_serre_types, TwistBound};
use exceptional::ZPoly;

fn main() -> exceptional::Result<()> {
    let a = analyze(&ZPoly::from_i64(&[-13, 16, -4, -2, 1]), 11)?;
    for fam in enumerate_serre_types(&a, &TwistBound::uniform(2))? {
        println!("{fam}");
    }
    Ok(())
}
