//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs as part of `cargo test --workspace`.

use std::process::ExitCode;
use std::time::Instant;

use tensorpure::harness::{replay, run_suite, Mode, Mutation, Report, Suite, SuiteConfig};
use tensorpure::report::SuiteResult;

/// One criterion: a detail line on success, the reason on failure.
type Check = fn() -> Result<String, String>;

const MODULI: [u64; 4] = [4, 8, 9, 12];

fn config(suites: Vec<Suite>, moduli: &[u64]) -> SuiteConfig {
    SuiteConfig {
        suites,
        moduli: moduli.to_vec(),
        mode: Mode::Exhaustive,
        ..SuiteConfig::default()
    }
}

fn run(config: &SuiteConfig) -> Result<Report, String> {
    run_suite(config).map_err(|e| e.to_string())
}

/// Sum of the per-modulus results in `report`.
fn total(report: &Report) -> SuiteResult {
    let mut t = SuiteResult::new("total");
    for s in &report.suites {
        t.merge(s.clone());
    }
    t
}

fn count(r: &SuiteResult, key: &str) -> u64 {
    r.counts.get(key).copied().unwrap_or(0)
}

/// Fails with the first counterexample unless `report` passed.
fn all_passed(report: &Report) -> Result<SuiteResult, String> {
    let t = total(report);
    if t.failed > 0 {
        let first = t.counterexamples.first().map(|c| format!("{}: {}", c.leg, c.detail));
        return Err(format!(
            "{} of {} checks failed; first: {}",
            t.failed,
            t.checked,
            first.unwrap_or_default()
        ));
    }
    Ok(t)
}

fn require(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn purity_equivalence() -> Result<String, String> {
    let mut c = config(vec![Suite::Purity], &MODULI);
    c.purity_order = 8;
    let t = all_passed(&run(&c)?)?;
    let agreement = count(&t, "agreement");
    require(agreement > 0, "no conflations enumerated")?;
    Ok(format!(
        "{agreement} conflations, {} pure, 0 disagreements",
        count(&t, "pure")
    ))
}

fn flatness_equivalence() -> Result<String, String> {
    let mut c = config(vec![Suite::FlatEquiv], &MODULI);
    c.max_order = 64;
    c.max_kernel = 16;
    let t = all_passed(&run(&c)?)?;
    let sections = count(&t, "extract_section");
    require(sections > 0, "no section was extracted")?;
    Ok(format!(
        "{} modules agree three ways, {sections} sections extracted",
        count(&t, "three_way")
    ))
}

fn enough_pure_injectives() -> Result<String, String> {
    let c = config(vec![Suite::EnoughPi], &MODULI);
    let t = all_passed(&run(&c)?)?;
    let modules = count(&t, "lambda_mono");
    require(modules > 0, "no modules enumerated")?;
    require(
        count(&t, "triangle_identity") == modules,
        "triangle identity not checked for every module",
    )?;
    Ok(format!(
        "{modules} modules: unit mono, pure embedding, pure-injective double dual, triangle identity"
    ))
}

fn complexes() -> Result<String, String> {
    let mut c = config(vec![Suite::Complexes], &[4, 9]);
    c.span = 3;
    let t = all_passed(&run(&c)?)?;
    require(
        count(&t, "componentwise_split_witness") == 2,
        "witness not checked for both moduli",
    )?;
    Ok(format!(
        "{} complexes agree four ways, {} conflations checked degreewise, witness classified",
        count(&t, "four_way"),
        count(&t, "pure_implies_degreewise")
    ))
}

fn axioms() -> Result<String, String> {
    let mut c = config(vec![Suite::Axioms], &MODULI);
    c.axiom_order = 8;
    let t = all_passed(&run(&c)?)?;
    for key in [
        "pullback_of_deflation",
        "pushout_of_inflation",
        "deflation_composition",
        "inflation_composition",
    ] {
        require(count(&t, key) > 0, &format!("no {key} instances"))?;
    }
    Ok(format!("{} axiom instances", t.checked))
}

fn adjunction() -> Result<String, String> {
    let mut c = config(vec![Suite::Adjunction], &MODULI);
    c.adjunction_samples = 256;
    c.seed = Some(2024);
    let t = all_passed(&run(&c)?)?;
    require(t.checked >= 1000, "fewer than 1000 triples sampled")?;
    Ok(format!(
        "{} sampled triples, inverse and natural in all arguments",
        t.checked
    ))
}

fn structural() -> Result<String, String> {
    let c = config(vec![Suite::Structural], &MODULI);
    let t = all_passed(&run(&c)?)?;
    let mut p = config(vec![Suite::Purity], &MODULI);
    p.purity_order = 4;
    let duals = all_passed(&run(&p)?)?;
    let dualized = count(&duals, "dual_is_conflation");
    require(dualized > 0, "no conflations dualized")?;
    Ok(format!(
        "{} cyclic pairs, {} dual orders, {dualized} dualized conflations",
        count(&t, "cyclic_orders"),
        count(&t, "dual_order")
    ))
}

fn mutation() -> Result<String, String> {
    let mut c = config(vec![Suite::Purity], &[4]);
    c.purity_order = 4;
    c.mutation = Mutation {
        skip_divisor: Some(2),
        ..Mutation::default()
    };
    let report = run(&c)?;
    require(report.exit_code() == 1, "mutated oracle was not detected")?;
    let t = total(&report);
    let first = t.counterexamples.first().ok_or("no counterexample emitted")?;
    let reproduced = !replay(first, &c).map_err(|e| e.to_string())?;
    require(reproduced, "counterexample does not replay")?;
    Ok(format!("{} counterexamples, first replays ({})", t.failed, first.leg))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("purity: dual splits agrees with the tensor oracle", purity_equivalence),
        (
            "flatness: three-way equivalence and section extraction",
            flatness_equivalence,
        ),
        ("double-dual unit is a pure-injective embedding", enough_pure_injectives),
        ("complexes: four-way equivalence and split witness", complexes),
        ("exact-category axioms", axioms),
        ("tensor-hom adjunction", adjunction),
        ("structural cross-checks", structural),
        ("mutation sensitivity", mutation),
    ];
    let mut ok = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} [{name}] {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                ok = false;
                println!("FAIL criterion {} [{name}] {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
