//! Parse counterfactual formulas and ask whether their means are
//! identifiable from observational data.

use natfx::cfexpr::{check_identifiability, format_cf, parse_cf, parse_cf_inferred, Scenario};

fn main() {
    let formulas = [
        "Y(a, M1(a*), M2(a, M1(a*)))",
        "Y(a, M1(a), M2(a, M1(a*)))",
        "Y(a*, M1(a), M2(a*, M1(a)))",
        "Y(a, M1(m1*), M2(m2*))",
        "Y(a, M1(a), M2(a*))",
    ];
    for text in formulas {
        let (expr, scenario) = parse_cf_inferred(text).expect("well-formed");
        let verdict = check_identifiability(&expr, scenario);
        println!("{:<32} {:<8} {:?}", format_cf(&expr), scenario.to_string(), verdict.status);
        for c in &verdict.conflicts {
            println!("    M{} appears as {}", c.mediator, c.specs.join(" and "));
        }
    }

    // The same text can mean different things once the structure is pinned.
    let parallel = parse_cf("Y(a, M1(a), M2(a*))", Scenario::nonseq(2).unwrap()).unwrap();
    println!("\nnonseq2 reading: {}", format_cf(&parallel));
    match parse_cf("Y(a, M1(a), M2(a*))", Scenario::chain(2).unwrap()) {
        Ok(e) => println!("seq2 reading: {}", format_cf(&e)),
        Err(e) => println!("seq2 reading rejected: {e}"),
    }
    match parse_cf("Y(a, M1(a)", Scenario::SingleMediator) {
        Ok(_) => unreachable!(),
        Err(e) => println!("syntax error: {e}"),
    }
}
