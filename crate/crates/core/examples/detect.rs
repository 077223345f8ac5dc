//! Search the built-in field catalog for a form of given level, weight and ℓ.

use exceptional::catalog::{builtin_corpus, detect};
use exceptional::character::DirichletChar;

fn main() -> exceptional::Result<()> {
    let report = detect(8, 4, &DirichletChar::trivial(1), 11, &builtin_corpus())?;
    for m in &report.matches {
        println!("{} ({:?}): {}", m.record.label, m.quality, m.family);
    }
    for n in &report.negatives {
        println!("ruled out {}: {}", n.label, n.reason);
    }
    Ok(())
}
