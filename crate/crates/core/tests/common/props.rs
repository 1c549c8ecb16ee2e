//! Strategies and checks for the engine invariants, shared by the proptest
//! target and the acceptance harness.

use num_complex::Complex64;
use oraclesim::{BitString, RegisterLayout, SeededRng, StateVector};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const TOL: f64 = 1e-12;

/// A normalized random state on layout `r0 … r{m−1}, t` with `t` of width
/// one, at most 10 qubits in total, plus a seed and selector values.
#[derive(Debug, Clone)]
pub struct Case {
    pub state: StateVector,
    pub seed: u64,
    pub pick: usize,
    pub table_bits: u64,
}

pub fn case() -> impl Strategy<Value = Case> {
    prop::collection::vec(1usize..=4, 1..=3)
        .prop_filter("at most 10 qubits", |w| w.iter().sum::<usize>() < 10)
        .prop_flat_map(|widths| {
            let total = widths.iter().sum::<usize>() + 1;
            (
                Just(widths),
                prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << total),
                any::<u64>(),
                any::<usize>(),
                any::<u64>(),
            )
        })
        .prop_filter_map(
            "non-zero vector",
            |(widths, raw, seed, pick, table_bits)| {
                let mut regs: Vec<(String, usize)> = widths
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| (format!("r{i}"), w))
                    .collect();
                regs.push(("t".to_string(), 1));
                let layout = RegisterLayout::new(regs).ok()?;
                let amps: Vec<Complex64> = raw
                    .into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect();
                let state = StateVector::from_amplitudes(layout, amps).ok()?;
                if state.norm_sqr() < 1e-6 {
                    return None;
                }
                Some(Case {
                    state: state.normalized(),
                    seed,
                    pick,
                    table_bits,
                })
            },
        )
}

fn register_names(s: &StateVector) -> Vec<String> {
    s.layout()
        .registers()
        .iter()
        .map(|r| r.name().to_string())
        .collect()
}

fn close(a: f64, b: f64, what: &str) -> Result<(), TestCaseError> {
    prop_assert!((a - b).abs() <= TOL, "{what}: {a} vs {b}");
    Ok(())
}

pub fn norm_preservation(case: &Case) -> Result<(), TestCaseError> {
    let s = &case.state;
    let total = s.layout().total_qubits();
    let names = register_names(s);
    let n0 = s.norm_sqr();

    let q = case.pick % total;
    close(
        s.clone().apply_hadamard(q).unwrap().norm_sqr(),
        n0,
        "hadamard",
    )?;
    close(s.clone().apply_x(q).unwrap().norm_sqr(), n0, "x")?;

    let reg = &names[case.pick % names.len()];
    close(
        s.clone().apply_grover_diffusion(reg).unwrap().norm_sqr(),
        n0,
        "diffusion",
    )?;

    let inputs: Vec<&str> = names
        .iter()
        .filter(|n| *n != "t")
        .map(String::as_str)
        .collect();
    let width: usize = total - 1;
    let table: Vec<bool> = (0..1usize << width)
        .map(|i| (case.table_bits.rotate_left(i as u32) ^ i as u64) & 1 == 1)
        .collect();
    let after = s.clone().apply_xor_oracle(&inputs, "t", &table).unwrap();
    close(after.norm_sqr(), n0, "xor oracle")?;
    let back = after.apply_xor_oracle(&inputs, "t", &table).unwrap();
    prop_assert_eq!(&back, s, "xor oracle is its own inverse");
    Ok(())
}

fn likely_outcome(s: &StateVector, reg: &str, pick: usize) -> BitString {
    let probs = s.marginal_distribution(reg).unwrap();
    let width = s.layout().register(reg).unwrap().width();
    let candidates: Vec<usize> = (0..probs.len()).filter(|&v| probs[v] > 1e-9).collect();
    BitString::new(candidates[pick % candidates.len()] as u64, width)
}

pub fn projection_idempotence(case: &Case) -> Result<(), TestCaseError> {
    let s = &case.state;
    let names = register_names(s);
    let reg = &names[case.pick % names.len()];
    let o = likely_outcome(s, reg, case.pick / 7);
    for normalize in [false, true] {
        let once = s.project(reg, o, normalize).unwrap();
        let twice = once.project(reg, o, normalize).unwrap();
        prop_assert_eq!(once, twice);
    }
    Ok(())
}

pub fn marginal_totality(case: &Case) -> Result<(), TestCaseError> {
    for reg in register_names(&case.state) {
        let p = case.state.marginal_distribution(&reg).unwrap();
        close(p.iter().sum(), 1.0, "marginal sum")?;
        prop_assert!(p.iter().all(|&v| v >= 0.0));
    }
    Ok(())
}

pub fn measurement_consistency(case: &Case) -> Result<(), TestCaseError> {
    let s = &case.state;
    let names = register_names(s);
    let reg = &names[case.pick % names.len()];
    let marginal = s.marginal_distribution(reg).unwrap();
    let (rec, post) = s.measure(reg, &mut SeededRng::new(case.seed)).unwrap();
    close(
        rec.probability,
        marginal[rec.outcome.index()],
        "recorded probability",
    )?;
    prop_assert!(rec.probability > 0.0);
    let again = post.marginal_distribution(reg).unwrap();
    close(again[rec.outcome.index()], 1.0, "re-measure")?;
    let (rec2, _) = post
        .measure(reg, &mut SeededRng::new(case.seed ^ 1))
        .unwrap();
    prop_assert_eq!(rec2.outcome, rec.outcome);
    Ok(())
}

pub fn seed_determinism(case: &Case) -> Result<(), TestCaseError> {
    let s = &case.state;
    let names = register_names(s);
    let reg = &names[case.pick % names.len()];
    let a = s.measure(reg, &mut SeededRng::new(case.seed)).unwrap();
    let b = s.measure(reg, &mut SeededRng::new(case.seed)).unwrap();
    prop_assert_eq!(
        serde_json::to_string(&a.0).unwrap(),
        serde_json::to_string(&b.0).unwrap()
    );
    prop_assert_eq!(a.1, b.1);
    Ok(())
}

pub fn all(case: &Case) -> Result<(), TestCaseError> {
    norm_preservation(case)?;
    projection_idempotence(case)?;
    marginal_totality(case)?;
    measurement_consistency(case)?;
    seed_determinism(case)
}
