use coulomb_count::verify::{run_all, Level, VerifyOptions};

#[test]
fn acceptance() {
    let results = run_all(VerifyOptions {
        level: Level::Full,
        negative_control: false,
    });
    let mut failed = Vec::new();
    for r in &results {
        let timing = if r.within_budget() { "" } else { " OVER BUDGET" };
        println!(
            "criterion {:02} {:<36} {} {} ({:.1} s of {} s{timing})",
            r.id,
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail,
            r.elapsed.as_secs_f64(),
            r.budget.as_secs()
        );
        if !r.passed || !r.within_budget() {
            failed.push(r.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
