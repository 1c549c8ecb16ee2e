//! The examiner/examinee oracle game.
//!
//! The examinee (Oedipus) receives the box with the mode register already in
//! superposition, may only measure the input register `x`, and must commit
//! an answer. Only then does the examiner (Sphinx) measure `k` and judge the
//! answer. With `backdated` set, `k` is collapsed right after its
//! preparation instead; the examiner still reads it only after the answer.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algorithms::{Algorithm, Circuit, Variant, INPUT_REGISTER, MODE_REGISTER};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::oracle::{FamilyError, FunctionFamily, ModeClass};
use crate::rng::{round_seed, SeededRng};
use crate::statevector::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Balanced,
    Constant,
    Found(BitString),
}

/// Ordered log of what happened during a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    PrepareAncilla,
    CollapseAncilla,
    RunCircuit,
    MeasureInput,
    CommitAnswer,
    MeasureAncilla,
    Judge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub algorithm: Algorithm,
    pub variant: Variant,
    pub n: usize,
    pub seed: u64,
    pub x_outcome: BitString,
    pub oedipus_answer: Answer,
    pub sphinx_k: BitString,
    pub correct: bool,
    pub backdated: bool,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramEntry {
    pub x_outcome: BitString,
    pub sphinx_k: BitString,
    pub count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: u64,
    pub correct_count: u64,
    #[serde(with = "histogram_entries")]
    pub joint_histogram: BTreeMap<(BitString, BitString), u64>,
}

impl TrialStats {
    pub fn record(&mut self, t: &ProtocolTranscript) {
        self.trials += 1;
        self.correct_count += t.correct as u64;
        *self
            .joint_histogram
            .entry((t.x_outcome, t.sphinx_k))
            .or_insert(0) += 1;
    }

    /// Counts per `x` outcome, summed over `k`.
    pub fn x_histogram(&self) -> BTreeMap<BitString, u64> {
        let mut out = BTreeMap::new();
        for (&(x, _), &c) in &self.joint_histogram {
            *out.entry(x).or_insert(0) += c;
        }
        out
    }

    pub fn merge(&mut self, other: &TrialStats) {
        self.trials += other.trials;
        self.correct_count += other.correct_count;
        for (key, &c) in &other.joint_histogram {
            *self.joint_histogram.entry(*key).or_insert(0) += c;
        }
    }
}

mod histogram_entries {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(BitString, BitString), u64>,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(map.iter().map(|(&(x, k), &count)| HistogramEntry {
            x_outcome: x,
            sphinx_k: k,
            count,
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<BTreeMap<(BitString, BitString), u64>, D::Error> {
        let entries = Vec::<HistogramEntry>::deserialize(deserializer)?;
        Ok(entries
            .into_iter()
            .map(|e| ((e.x_outcome, e.sphinx_k), e.count))
            .collect())
    }
}

/// The box as handed to the examinee: only the input register is readable.
pub struct SealedBox {
    state: StateVector,
}

impl SealedBox {
    fn new(state: StateVector) -> Self {
        SealedBox { state }
    }

    pub fn measure_input(&mut self, rng: &mut SeededRng) -> Result<BitString> {
        let (record, collapsed) = self.state.measure(INPUT_REGISTER, rng)?;
        self.state = collapsed;
        Ok(record.outcome)
    }
}

/// Oedipus' rule: Grover reports `x` as the mode; the Deutsch family
/// reports constant iff `x` is all zeros.
pub fn oedipus_answer(algorithm: Algorithm, x: BitString) -> Answer {
    match algorithm {
        Algorithm::Grover => Answer::Found(x),
        Algorithm::Deutsch | Algorithm::DeutschJozsa if x.is_zero() => Answer::Constant,
        Algorithm::Deutsch | Algorithm::DeutschJozsa => Answer::Balanced,
    }
}

/// Whether `answer` is right for mode `sphinx_k` of `family`.
pub fn judge(
    answer: Answer,
    sphinx_k: BitString,
    family: &FunctionFamily,
) -> Result<bool, FamilyError> {
    let class = family.classify(sphinx_k)?;
    Ok(match answer {
        Answer::Balanced => class == ModeClass::Balanced,
        Answer::Constant => class == ModeClass::Constant,
        Answer::Found(label) => label == sphinx_k,
    })
}

/// One round seeded with `seed`.
pub fn play_round(
    algorithm: Algorithm,
    n: usize,
    seed: u64,
    backdated: bool,
) -> Result<ProtocolTranscript> {
    let circuit = Circuit::new(algorithm, n, None)?;
    play_with(&circuit, seed, SeededRng::new(seed), backdated)
}

pub fn play_round_with(
    circuit: &Circuit,
    seed: u64,
    backdated: bool,
) -> Result<ProtocolTranscript> {
    play_with(circuit, seed, SeededRng::new(seed), backdated)
}

fn play_with(
    circuit: &Circuit,
    seed: u64,
    mut rng: SeededRng,
    backdated: bool,
) -> Result<ProtocolTranscript> {
    let mut steps = vec![Step::PrepareAncilla];
    let mut state = circuit.prepare_all_modes()?;
    if backdated {
        state = state.measure(MODE_REGISTER, &mut rng)?.1;
        steps.push(Step::CollapseAncilla);
    }
    let state = circuit.evolve(state)?;
    steps.push(Step::RunCircuit);

    let mut sealed = SealedBox::new(state);
    let x_outcome = sealed.measure_input(&mut rng)?;
    steps.push(Step::MeasureInput);
    let oedipus_answer = oedipus_answer(circuit.algorithm(), x_outcome);
    steps.push(Step::CommitAnswer);

    let (k_record, _) = sealed.state.measure(MODE_REGISTER, &mut rng)?;
    steps.push(Step::MeasureAncilla);
    let sphinx_k = k_record.outcome;
    let correct = judge(oedipus_answer, sphinx_k, circuit.family())?;
    steps.push(Step::Judge);

    Ok(ProtocolTranscript {
        algorithm: circuit.algorithm(),
        variant: Variant::Superposed,
        n: circuit.n(),
        seed,
        x_outcome,
        oedipus_answer,
        sphinx_k,
        correct,
        backdated,
        steps,
    })
}

/// Plays `trials` rounds; round `i` uses sub-seed `splitmix64(seed ^ i)`.
pub fn run_trials(
    algorithm: Algorithm,
    n: usize,
    trials: u64,
    seed: u64,
    backdated: bool,
) -> Result<TrialStats> {
    let circuit = Circuit::new(algorithm, n, None)?;
    run_trials_with(&circuit, trials, seed, backdated)
}

pub fn run_trials_with(
    circuit: &Circuit,
    trials: u64,
    seed: u64,
    backdated: bool,
) -> Result<TrialStats> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let mut stats = TrialStats::default();
    for round in 0..trials {
        let rng = SeededRng::for_round(seed, round);
        let t = play_with(circuit, round_seed(seed, round), rng, backdated)?;
        stats.record(&t);
    }
    Ok(stats)
}

/// Exact joint distributions over `(x, k)`, indexed by `x‖k`, for the
/// backdated ordering (k measured right after preparation) and the late
/// ordering (x then k at the end).
pub fn joint_outcome_distributions(circuit: &Circuit) -> Result<(Vec<f64>, Vec<f64>)> {
    let prepared = circuit.prepare_all_modes()?;
    let late = circuit
        .evolve(prepared.clone())?
        .joint_distribution(&[INPUT_REGISTER, MODE_REGISTER])?;

    let width = circuit.family().label_width();
    let mut early = vec![0.0; late.len()];
    for (k, &weight) in prepared
        .marginal_distribution(MODE_REGISTER)?
        .iter()
        .enumerate()
    {
        if weight == 0.0 {
            continue;
        }
        let branch = prepared.project(MODE_REGISTER, BitString::new(k as u64, width), true)?;
        let joint = circuit
            .evolve(branch)?
            .joint_distribution(&[INPUT_REGISTER, MODE_REGISTER])?;
        for (acc, p) in early.iter_mut().zip(joint) {
            *acc += weight * p;
        }
    }
    Ok((early, late))
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Total variation distance between the backdated and late orderings.
pub fn backdating_equivalence(algorithm: Algorithm, n: usize) -> Result<f64> {
    let circuit = Circuit::new(algorithm, n, None)?;
    backdating_equivalence_with(&circuit)
}

pub fn backdating_equivalence_with(circuit: &Circuit) -> Result<f64> {
    let (early, late) = joint_outcome_distributions(circuit)?;
    Ok(total_variation(&early, &late))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{delta_family, deutsch_family};

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn judge_examples() {
        let d = deutsch_family();
        assert!(judge(Answer::Balanced, b("01"), &d).unwrap());
        assert!(!judge(Answer::Balanced, b("00"), &d).unwrap());
        assert!(judge(Answer::Constant, b("11"), &d).unwrap());
        let g = delta_family(2).unwrap();
        assert!(judge(Answer::Found(b("11")), b("11"), &g).unwrap());
        assert!(!judge(Answer::Found(b("10")), b("11"), &g).unwrap());
        assert_eq!(
            judge(Answer::Balanced, b("1"), &d).unwrap_err(),
            FamilyError::UnknownLabel(b("1"))
        );
    }

    #[test]
    fn deutsch_rounds_are_correct() {
        for seed in 0..50 {
            for backdated in [false, true] {
                let t = play_round(Algorithm::Deutsch, 1, seed, backdated).unwrap();
                assert!(t.correct);
                let expected: &[&str] = if t.x_outcome == b("1") {
                    &["01", "10"]
                } else {
                    &["00", "11"]
                };
                assert!(expected.contains(&t.sphinx_k.to_string().as_str()));
            }
        }
    }

    #[test]
    fn grover_round_reveals_mode() {
        for seed in 0..50 {
            let t = play_round(Algorithm::Grover, 2, seed, false).unwrap();
            assert_eq!(t.sphinx_k, t.x_outcome);
            assert_eq!(t.oedipus_answer, Answer::Found(t.x_outcome));
        }
    }

    #[test]
    fn answer_committed_before_mode_is_read() {
        for backdated in [false, true] {
            let t = play_round(Algorithm::DeutschJozsa, 2, 5, backdated).unwrap();
            let pos = |s: Step| t.steps.iter().position(|&x| x == s).unwrap();
            assert!(pos(Step::CommitAnswer) < pos(Step::MeasureAncilla));
            assert!(pos(Step::MeasureInput) < pos(Step::CommitAnswer));
            assert_eq!(t.steps.contains(&Step::CollapseAncilla), backdated);
        }
    }

    #[test]
    fn trial_rounds_replay_from_sub_seed() {
        let stats = run_trials(Algorithm::DeutschJozsa, 2, 20, 99, false).unwrap();
        assert_eq!(stats.trials, 20);
        let mut replay = TrialStats::default();
        for r in 0..20 {
            let t = play_round(Algorithm::DeutschJozsa, 2, round_seed(99, r), false).unwrap();
            replay.record(&t);
        }
        assert_eq!(stats, replay);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(matches!(
            run_trials(Algorithm::Deutsch, 1, 0, 0, false),
            Err(Error::NoTrials)
        ));
    }

    #[test]
    fn stats_merge_commutes() {
        let a = run_trials(Algorithm::Grover, 2, 10, 1, false).unwrap();
        let c = run_trials(Algorithm::Grover, 2, 10, 2, false).unwrap();
        let mut ab = a.clone();
        ab.merge(&c);
        let mut ba = c.clone();
        ba.merge(&a);
        assert_eq!(ab, ba);
        assert_eq!(ab.joint_histogram.values().sum::<u64>(), ab.trials);
    }

    #[test]
    fn stats_json_round_trip() {
        let s = run_trials(Algorithm::Deutsch, 1, 30, 4, true).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"joint_histogram\":[{\"x_outcome\":"));
        let back: TrialStats = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn transcript_json_field_names() {
        let t = play_round(Algorithm::Grover, 2, 3, false).unwrap();
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        for key in [
            "algorithm",
            "variant",
            "n",
            "seed",
            "x_outcome",
            "oedipus_answer",
            "sphinx_k",
            "correct",
            "backdated",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["variant"], "superposed");
        assert_eq!(v["oedipus_answer"]["found"], v["x_outcome"]);
    }

    #[test]
    fn backdating_small_cases() {
        assert!(backdating_equivalence(Algorithm::Deutsch, 1).unwrap() < 1e-12);
        assert!(backdating_equivalence(Algorithm::Grover, 2).unwrap() < 1e-12);
        assert!(backdating_equivalence(Algorithm::DeutschJozsa, 2).unwrap() < 1e-12);
    }

    #[test]
    fn total_variation_basics() {
        assert_eq!(total_variation(&[0.5, 0.5], &[1.0, 0.0]), 0.5);
        assert_eq!(total_variation(&[0.25; 4], &[0.25; 4]), 0.0);
    }
}
