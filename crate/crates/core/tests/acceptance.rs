//! Acceptance run: one line per criterion, nonzero exit on any failure.

fn main() {
    let results = nlogic::acceptance::run_all();
    for r in &results {
        println!("{r}");
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!("{passed} of {} criteria pass", results.len());
    if passed < results.len() {
        std::process::exit(1);
    }
}
