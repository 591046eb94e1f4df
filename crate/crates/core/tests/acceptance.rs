//! One line per acceptance criterion; exits non-zero if any fails.

fn main() {
    let outcomes = siegel_maass::verify::run_all(false);
    let mut failed = 0;
    for o in &outcomes {
        println!("{}", o.line());
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
