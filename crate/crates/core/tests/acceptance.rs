//! Acceptance criteria 1 to 10, one PASS/FAIL line each.
//!
//! All arithmetic is exact rational, so every numeric comparison uses
//! tolerance 0. Mismatch tolerance is 0 for every criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gnnlogic::verify::{self, SuiteReport, VerifyParams};

const SEED: u64 = 20_240_601;
const TOLERANCE_MISMATCHES: u64 = 0;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn(&VerifyParams) -> gnnlogic::Result<Vec<SuiteReport>>,
    /// Extra requirements on the reports beyond zero violations.
    extra: fn(&[SuiteReport]) -> Result<(), String>,
}

fn value<'a>(r: &'a SuiteReport, key: &str) -> Option<&'a str> {
    r.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn expect(r: &SuiteReport, key: &str, want: &str) -> Result<(), String> {
    match value(r, key) {
        Some(v) if v == want => Ok(()),
        other => Err(format!("{key}: expected {want}, got {other:?}")),
    }
}

fn one(f: fn(&VerifyParams) -> gnnlogic::Result<SuiteReport>) -> impl Fn(&VerifyParams) -> gnnlogic::Result<Vec<SuiteReport>> {
    move |p| f(p).map(|r| vec![r])
}

fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            name: "order characterisation, exhaustive n<=4 plus 10000 random n=5..8",
            budget: Duration::from_secs(60),
            run: |p| one(verify::suite_order_characterisation)(p),
            extra: |r| {
                expect(&r[0], "exhaustive graphs", "66066")?;
                expect(&r[0], "random n=5..8 checks", "10000")
            },
        },
        Criterion {
            id: 2,
            name: "linear-order network on the order corpus, exact layer-4 trace for n<=200",
            budget: Duration::from_secs(30),
            run: |p| one(verify::suite_order_gnn)(p),
            extra: |r| {
                expect(&r[0], "simple", "true")?;
                expect(&r[0], "random n=5..8 checks", "10000")?;
                expect(&r[0], "golden trace order(1..200) checks", "200")
            },
        },
        Criterion {
            id: 3,
            name: "sequence lemma n<=6 and Gale-Ryser against brute force n<=3",
            budget: Duration::from_secs(120),
            run: |p| one(verify::suite_sequences)(p),
            extra: |r| {
                for n in 1..=6 {
                    expect(&r[0], &format!("n={n} equality witnesses"), "1")?;
                }
                expect(&r[0], "gale-ryser n=3 checks", "4096")
            },
        },
        Criterion {
            id: 4,
            name: "gadget round trip, gadget hom counts, gadget-order network",
            budget: Duration::from_secs(60),
            run: |p| one(verify::suite_gadget_gnn)(p),
            extra: |r| {
                expect(&r[0], "round trip and hom counts checks", "100")?;
                expect(&r[0], "accepts gadgetised orders checks", "50")?;
                expect(&r[0], "negatives", "1000")?;
                expect(&r[0], "simple", "true")
            },
        },
        Criterion {
            id: 5,
            name: "counting counterexample family for (L,c) in {1,2}x{1,2}",
            budget: Duration::from_secs(40),
            run: |p| {
                let mut out = Vec::new();
                for (l, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                    let start = Instant::now();
                    let mut r = verify::suite_family(&VerifyParams { l: Some(l), c: Some(c), ..p.clone() })?;
                    r.elapsed = start.elapsed();
                    out.push(r);
                }
                Ok(out)
            },
            extra: |r| {
                for x in r {
                    if x.elapsed > Duration::from_secs(10) {
                        return Err(format!("{:?} exceeds 10s for one configuration", x.lines.first()));
                    }
                }
                Ok(())
            },
        },
        Criterion {
            id: 6,
            name: "compiled networks agree with the evaluator; c-bounded spot checks",
            budget: Duration::from_secs(120),
            run: |p| one(verify::suite_compiler)(p),
            extra: |r| {
                expect(&r[0], "formula-graph pairs checks", "1000")?;
                expect(&r[0], "c-bounded trace spot checks checks", "100")
            },
        },
        Criterion {
            id: 7,
            name: "characteristic formulas chi and gamma against bisimilarity",
            budget: Duration::from_secs(120),
            run: |p| one(verify::suite_charformulas)(p),
            extra: |r| {
                expect(&r[0], "pointed pairs checks", "500")?;
                let pos: u64 = value(&r[0], "capped-bisimilar pairs").and_then(|v| v.parse().ok()).unwrap_or(0);
                if pos == 0 || pos == 500 {
                    return Err(format!("degenerate corpus: {pos} capped-bisimilar pairs"));
                }
                Ok(())
            },
        },
        Criterion {
            id: 8,
            name: "companion surgery certificates, conditions and idempotence",
            budget: Duration::from_secs(60),
            run: |p| one(verify::suite_companion)(p),
            extra: |r| {
                let applied: u64 = value(&r[0], "free-edge and free-witness applications").and_then(|v| v.parse().ok()).unwrap_or(0);
                if applied == 0 {
                    return Err("no free-edge or free-witness operation was applicable".into());
                }
                Ok(())
            },
        },
        Criterion {
            id: 9,
            name: "bounded-aggregation networks are invariant under certified companions",
            budget: Duration::from_secs(60),
            run: |p| one(verify::suite_invariance)(p),
            extra: |r| {
                expect(&r[0], "certified pairs checks", "4000")?;
                let changed: u64 = value(&r[0], "companions differing from input").and_then(|v| v.parse().ok()).unwrap_or(0);
                if changed == 0 {
                    return Err("every companion equals its input".into());
                }
                Ok(())
            },
        },
        Criterion {
            id: 10,
            name: "refinement and pebble equivalence agree with game search",
            budget: Duration::from_secs(120),
            run: |p| one(verify::suite_refinement)(p),
            extra: |_| Ok(()),
        },
    ]
}

fn main() -> ExitCode {
    let params = VerifyParams { seed: SEED, ..VerifyParams::default() };
    let mut failed = 0;
    for c in criteria() {
        let start = Instant::now();
        let outcome = (c.run)(&params);
        let elapsed = start.elapsed();
        let verdict = match &outcome {
            Err(e) => Err(format!("error: {e}")),
            Ok(reports) => {
                let violations: u64 = reports.iter().map(|r| r.violations).sum();
                if violations > TOLERANCE_MISMATCHES {
                    let example = reports.iter().find_map(|r| r.first_counterexample.clone()).unwrap_or_default();
                    Err(format!("{violations} violations\n{example}"))
                } else if elapsed > c.budget {
                    Err(format!("took {:.1}s, budget {}s", elapsed.as_secs_f64(), c.budget.as_secs()))
                } else {
                    (c.extra)(reports)
                }
            }
        };
        let checks: u64 = outcome.as_ref().map(|rs| rs.iter().map(|r| r.checks).sum()).unwrap_or(0);
        match verdict {
            Ok(()) => println!("PASS criterion {:>2}: {} [{checks} checks, 0 mismatches, {:.2}s]", c.id, c.name, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {} [{:.2}s]: {why}", c.id, c.name, elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
