//! A5 inside PGL2 over F_5, F_81 and Z[ζ5].

use exceptional::embedding::{build_embedding, generated_group_order, verify_presentation, EmbeddingField};

fn main() -> exceptional::Result<()> {
    for field in [EmbeddingField::Finite { ell: 5, m: 1 }, EmbeddingField::Finite { ell: 3, m: 4 }, EmbeddingField::Cyclotomic] {
        let e = build_embedding(field, 1)?;
        let ok = verify_presentation(&e.ring, &e.x, &e.y);
        println!("{field}: presentation {ok}, |<x, y>| = {}", generated_group_order(&e.ring, &e.x, &e.y)?);
    }
    Ok(())
}
