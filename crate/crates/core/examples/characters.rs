//! Dirichlet characters: conductors, products and reduction mod λ.

use exceptional::character::{enumerate_local_twists, legendre, reduce_mod_lambda};

fn main() -> exceptional::Result<()> {
    let chi = legendre(11);
    println!("χ = {chi}, conductor {}, χ(2) = {} of a turn", chi.conductor(), chi.eval(2).unwrap());
    println!("χ² = {}", chi.square().primitive());
    let twists = enumerate_local_twists(5, 2, 0);
    println!("{} characters of Z_5^× with conductor exponent ≤ 2", twists.len());
    for phi in twists.iter().step_by(4) {
        println!("  {phi}: mod λ over 3 has order {}", reduce_mod_lambda(phi, 3)?.order());
    }
    Ok(())
}
