//! Suite configuration, orchestration, reports and counterexample replay.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::complex::{check_complex, check_witness, verify_flat_complex_equiv, Complex, ComplexBounds};
use crate::enumerate::enumerate_modules;
use crate::error::{Error, Result};
use crate::exact::{axiom_suite, replay_axiom, AxiomBounds, Conflation, FiberSign};
use crate::module::{FiniteModule, RingSpec};
use crate::naturality::{check_seeded_triple, verify_adjunction};
use crate::purity::{
    check_enough_pi_module, check_flat_module, check_purity_instance, cyclic_test_conflations,
    verify_enough_pure_injectives, verify_flat_equiv, verify_purity_agreement, verify_structural, FlatnessBounds,
    PurityBounds,
};
use crate::report::{Counterexample, SuiteResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Axioms,
    #[serde(rename = "prop1")]
    Purity,
    FlatEquiv,
    EnoughPi,
    Complexes,
    Structural,
    Adjunction,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Axioms,
        Suite::Purity,
        Suite::FlatEquiv,
        Suite::EnoughPi,
        Suite::Complexes,
        Suite::Structural,
        Suite::Adjunction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Purity => "prop1",
            Suite::FlatEquiv => "flat-equiv",
            Suite::EnoughPi => "enough-pi",
            Suite::Complexes => "complexes",
            Suite::Structural => "structural",
            Suite::Adjunction => "adjunction",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Exhaustive,
    Sample,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Deliberate defects, used to show that the suites detect broken code.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutation {
    /// Divisor left out of the tensor purity oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_divisor: Option<u64>,
    /// Use the wrong sign in the pullback fiber condition.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub flip_fiber_sign: bool,
}

impl Mutation {
    pub fn is_none(&self) -> bool {
        self == &Mutation::default()
    }

    fn fiber_sign(&self) -> FiberSign {
        if self.flip_fiber_sign {
            FiberSign::Flipped
        } else {
            FiberSign::Correct
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    pub moduli: Vec<u64>,
    /// Largest order of the modules tested by `flat-equiv` and `enough-pi`.
    pub max_order: u128,
    /// Largest order of the other end of the conflations quantified over
    /// in `flat-equiv` and `enough-pi`.
    pub max_kernel: u128,
    /// Largest kernel and end order in `prop1`.
    pub purity_order: u128,
    /// Largest module order in `axioms`.
    pub axiom_order: u128,
    /// Largest number of consecutive degrees of an enumerated complex.
    pub span: usize,
    pub mode: Mode,
    /// Extension classes drawn per pair of end terms in sample mode.
    pub samples: usize,
    pub seed: Option<u64>,
    /// Extension classes examined per pair of end terms in exhaustive mode
    /// before falling back to seeded sampling.
    pub class_cap: usize,
    /// Conflations examined per complex in `complexes`.
    pub conflation_limit: usize,
    /// Sampled `(F, G, K)` triples per modulus for the adjunction suite.
    pub adjunction_samples: usize,
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Mutation::is_none")]
    pub mutation: Mutation,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: Suite::ALL.to_vec(),
            moduli: vec![4, 8, 9, 12],
            max_order: 64,
            max_kernel: 16,
            purity_order: 8,
            axiom_order: 8,
            span: 4,
            mode: Mode::Exhaustive,
            samples: 16,
            seed: None,
            class_cap: 64,
            conflation_limit: 64,
            adjunction_samples: 256,
            format: Format::Json,
            out: None,
            mutation: Mutation::default(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        for &n in &self.moduli {
            RingSpec::new(n).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.mode == Mode::Sample {
            if self.seed.is_none() {
                return Err(Error::Config("sample mode requires a seed".into()));
            }
            if self.samples == 0 {
                return Err(Error::Config("sample mode requires a positive sample count".into()));
            }
        }
        if self.class_cap == 0 {
            return Err(Error::Config("the class cap must be positive".into()));
        }
        if let Some(d) = self.mutation.skip_divisor {
            if d < 2 {
                return Err(Error::Config("the skipped divisor must be at least 2".into()));
            }
        }
        Ok(())
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn class_cap(&self) -> usize {
        match self.mode {
            Mode::Exhaustive => self.class_cap,
            Mode::Sample => self.samples,
        }
    }

    pub fn purity_bounds(&self) -> PurityBounds {
        PurityBounds {
            max_kernel: self.purity_order,
            max_end: self.purity_order,
            samples: (self.mode == Mode::Sample).then_some(self.samples),
            seed: self.seed(),
            skip_divisor: self.mutation.skip_divisor,
        }
    }

    pub fn flatness_bounds(&self) -> FlatnessBounds {
        FlatnessBounds {
            max_order: self.max_order,
            max_kernel: self.max_kernel,
            class_cap: self.class_cap(),
            seed: self.seed(),
        }
    }

    pub fn complex_bounds(&self, ring: RingSpec) -> ComplexBounds {
        ComplexBounds {
            max_component: ring.modulus() as u128,
            span: self.span,
            class_cap: self.class_cap(),
            conflation_limit: self.conflation_limit,
            seed: self.seed(),
        }
    }

    pub fn axiom_bounds(&self) -> AxiomBounds {
        AxiomBounds {
            max_order: self.axiom_order,
            fiber_sign: self.mutation.fiber_sign(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: SuiteConfig,
    pub suites: Vec<SuiteResult>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    /// 0 when every suite passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.suites {
            let n = r.modulus.map(|n| format!(" n={n}")).unwrap_or_default();
            let status = if r.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{status} {}{n}: {} checked, {} failed", r.name, r.checked, r.failed);
            for (k, v) in &r.counts {
                let _ = writeln!(s, "    {k}: {v}");
            }
            for c in &r.counterexamples {
                let _ = writeln!(s, "    counterexample [{} / {}]: {}", c.check, c.leg, c.detail);
                let _ = writeln!(s, "      {}", c.data);
            }
        }
        let checked: u64 = self.suites.iter().map(|r| r.checked).sum();
        let failed: u64 = self.suites.iter().map(|r| r.failed).sum();
        let _ = writeln!(
            s,
            "{}: {checked} checked, {failed} failed in {} ms",
            if self.passed() { "PASS" } else { "FAIL" },
            self.elapsed_ms
        );
        s
    }

    pub fn render(&self) -> String {
        match self.config.format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

/// Runs one suite over one ring.
pub fn run_one(config: &SuiteConfig, suite: Suite, ring: RingSpec) -> SuiteResult {
    let mut r = match suite {
        Suite::Axioms => axiom_suite(ring, &config.axiom_bounds()),
        Suite::Purity => verify_purity_agreement(ring, &config.purity_bounds()),
        Suite::FlatEquiv => verify_flat_equiv(ring, &config.flatness_bounds()),
        Suite::EnoughPi => verify_enough_pure_injectives(ring, &config.flatness_bounds()),
        Suite::Complexes => verify_flat_complex_equiv(ring, &config.complex_bounds(ring)),
        Suite::Structural => verify_structural(ring, config.max_order),
        Suite::Adjunction => verify_adjunction(
            &[ring.modulus()],
            config.max_kernel,
            config.adjunction_samples,
            config.seed(),
        ),
    };
    r.name = suite.name().to_string();
    r.modulus = Some(ring.modulus());
    r
}

/// Runs every selected suite over every modulus, in that order, and writes
/// the rendered report to `config.out` when set.
pub fn run_suite(config: &SuiteConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let mut suites = Vec::new();
    for &suite in &config.suites {
        for &n in &config.moduli {
            let ring = RingSpec::new(n)?;
            suites.push(run_one(config, suite, ring));
        }
    }
    let report = Report {
        config: config.clone(),
        suites,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    if let Some(path) = &config.out {
        std::fs::write(path, report.render())
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(report)
}

fn field<T: serde::de::DeserializeOwned>(c: &Counterexample, key: &str) -> Result<T> {
    let v = c
        .data
        .get(key)
        .ok_or_else(|| Error::Config(format!("counterexample has no {key:?} field")))?;
    serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("bad {key:?} field: {e}")))
}

/// Re-runs the check that produced `c` under the bounds and mutation of
/// `config`. Returns whether the check passes now, so a faithful replay of
/// a reported failure returns `false`.
pub fn replay(c: &Counterexample, config: &SuiteConfig) -> Result<bool> {
    let mut out = SuiteResult::new("replay");
    match c.check.as_str() {
        "axioms" => return replay_axiom(c, config.mutation.fiber_sign()),
        "prop1" => {
            let conflation: Conflation = field(c, "conflation")?;
            let skip: Option<u64> = field(c, "skip_divisor")?;
            check_purity_instance(&conflation, skip, &mut out);
        }
        "flat-equiv" => {
            let m: FiniteModule = field(c, "module")?;
            let family = cyclic_test_conflations(m.ring());
            check_flat_module(&m, &family, &config.flatness_bounds(), &mut out);
        }
        "enough-pi" => {
            let m: FiniteModule = field(c, "module")?;
            check_enough_pi_module(&m, &config.flatness_bounds(), &mut out);
        }
        "complexes" => {
            if c.data.get("witness").is_some() {
                let n: u64 = field(c, "n")?;
                let ring = RingSpec::new(n)?;
                check_witness(ring, &mut out);
            } else {
                let x: Complex = field(c, "complex")?;
                check_complex(&x, &config.complex_bounds(x.ring()), &mut out);
            }
        }
        "adjunction" => {
            let n: u64 = field(c, "n")?;
            let (max_order, seed): (u128, u64) = (field(c, "max_order")?, field(c, "seed")?);
            let pool = enumerate_modules(RingSpec::new(n)?, max_order);
            return Ok(check_seeded_triple(&pool, seed).3.is_none());
        }
        "structural" => {
            if let Some(m) = c.data.get("module") {
                let m: FiniteModule = serde_json::from_value(m.clone()).map_err(|e| Error::Config(e.to_string()))?;
                let d = crate::purity::dual(&m);
                return Ok(d.order() == m.order());
            }
            let n: u64 = field(c, "n")?;
            let (a, b): (u64, u64) = (field(c, "a")?, field(c, "b")?);
            let ring = RingSpec::new(n)?;
            let (ma, mb) = (FiniteModule::cyclic(ring, a)?, FiniteModule::cyclic(ring, b)?);
            let hom = crate::module::HomModule::new(&ma, &mb)?.module().order();
            let tensor = crate::module::tensor(&ma, &mb)?.order();
            let g = crate::linalg::gcd(a, b) as u128;
            return Ok(hom == g && tensor == g);
        }
        other => return Err(Error::Config(format!("unknown check {other:?}"))),
    }
    Ok(out.passed())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suites: Vec<Suite>) -> SuiteConfig {
        SuiteConfig {
            suites,
            moduli: vec![4],
            max_order: 8,
            max_kernel: 4,
            purity_order: 4,
            axiom_order: 4,
            span: 2,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let config = small(Suite::ALL.to_vec());
        let a = run_suite(&config).unwrap();
        assert!(a.passed(), "{}", a.to_text());
        assert_eq!(a.exit_code(), 0);
        let mut b = run_suite(&config).unwrap();
        b.elapsed_ms = a.elapsed_ms;
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.suites.len(), Suite::ALL.len());
    }

    #[test]
    fn empty_moduli_is_vacuous() {
        let mut config = small(Suite::ALL.to_vec());
        config.moduli.clear();
        let r = run_suite(&config).unwrap();
        assert!(r.suites.is_empty());
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn config_errors() {
        let mut config = small(vec![Suite::Purity]);
        config.moduli = vec![1];
        assert!(matches!(run_suite(&config), Err(Error::Config(_))));
        let mut config = small(vec![Suite::Purity]);
        config.mode = Mode::Sample;
        assert!(matches!(run_suite(&config), Err(Error::Config(_))));
        config.seed = Some(7);
        assert!(run_suite(&config).unwrap().passed());
    }

    #[test]
    fn mutations_are_detected_and_replay() {
        let mut config = small(vec![Suite::Purity]);
        config.mutation.skip_divisor = Some(2);
        let r = run_suite(&config).unwrap();
        assert_eq!(r.exit_code(), 1);
        let c = &r.suites[0].counterexamples[0];
        assert!(!replay(c, &config).unwrap());
        // the same instance passes without the mutation
        let mut fixed = c.clone();
        fixed.data["skip_divisor"] = serde_json::Value::Null;
        assert!(replay(&fixed, &small(vec![Suite::Purity])).unwrap());

        let mut config = small(vec![Suite::Axioms]);
        config.mutation.flip_fiber_sign = true;
        let r = run_suite(&config).unwrap();
        assert_eq!(r.exit_code(), 1);
        assert!(!replay(&r.suites[0].counterexamples[0], &config).unwrap());
    }

    #[test]
    fn report_round_trips() {
        let r = run_suite(&small(vec![Suite::Structural])).unwrap();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_text().starts_with("PASS structural n=4"));
    }
}
