//! Acceptance criteria 1 to 10. Each test prints one PASS/FAIL line.
//! Run with `cargo test --test acceptance -- --nocapture --test-threads 1`.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use common::{ghz_projection, partial_trace, tuples, TOL};
use relfacts::assignments::{enumerate_satisfying, ghz_constraints, parity_witness};
use relfacts::dsl::{self, Scenario};
use relfacts::perspective::{
    builtin_contexts, deferred_context, exact_distribution, product_expectation, repeatability_check, sample,
};
use relfacts::scenario::{full_protocol, ghz_state, Encoding, SystemLabel};
use relfacts::statevec::Basis;
use relfacts::{Sign, GHZ3_RFS};

const ENCODINGS: [Encoding; 2] = [Encoding::Literal, Encoding::Computational];
const SHOTS: usize = 100_000;

type Check = Result<(), String>;

fn verdict(n: u32, what: &str, result: Check) {
    match &result {
        Ok(()) => println!("criterion {n:>2} PASS  {what}"),
        Err(why) => println!("criterion {n:>2} FAIL  {what}: {why}"),
    }
    if let Err(why) = result {
        panic!("criterion {n} failed: {why}");
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn stabilizers(enc: Encoding) -> Check {
    for (c, want) in builtin_contexts(enc).iter().zip([1.0, -1.0, -1.0, -1.0]) {
        let got = product_expectation(c);
        ensure((got - want).abs() < TOL, || {
            format!("{enc} {}: {got} != {want}", c.name())
        })?;
    }
    Ok(())
}

fn deterministic_products(enc: Encoding) -> Check {
    for (i, (c, want)) in builtin_contexts(enc)
        .iter()
        .zip([Sign::Plus, Sign::Minus, Sign::Minus, Sign::Minus])
        .enumerate()
    {
        let d = exact_distribution(c);
        for e in d.support() {
            ensure(e.product() == want, || {
                format!("{enc} {}: support tuple {:?}", c.name(), e.outcomes)
            })?;
        }
        let draws = sample(c, SHOTS, i as u64).map_err(|e| e.to_string())?;
        let violations = draws
            .iter()
            .filter(|t| Sign::product(t.iter().copied()) != want)
            .count();
        ensure(violations == 0, || {
            format!("{enc} {}: {violations} sampled violations", c.name())
        })?;
    }
    Ok(())
}

fn unsatisfiable() -> Check {
    let cs = ghz_constraints();
    let n = enumerate_satisfying(&cs).len();
    ensure(n == 0, || format!("{n} of 64 assignments satisfy (i)-(iv)"))?;
    let cert = parity_witness(&cs).ok_or("no parity certificate")?;
    ensure(cert.members == [0, 1, 2, 3], || {
        format!("certificate {:?}", cert.members)
    })
}

fn context_sensitivity(enc: Encoding) -> Check {
    let c = deferred_context(enc);
    let e = product_expectation(&c);
    ensure(e.abs() < TOL, || format!("{enc}: deferred expectation {e}"))?;
    let d = exact_distribution(&c);
    let plus = d.support().any(|t| t.product() == Sign::Plus);
    let minus = d.support().any(|t| t.product() == Sign::Minus);
    ensure(plus && minus, || format!("{enc}: support lacks a parity"))
}

fn memory_reset(enc: Encoding) -> Check {
    let s = full_protocol(enc);
    let end = s.run();
    for m in [SystemLabel::a(1), SystemLabel::a(2), SystemLabel::a(3)] {
        let q = s.layout().qubit(m).ok_or("memory missing")?;
        // fidelity with |R⟩ = |0⟩ is ⟨0|ρ|0⟩
        let fidelity = partial_trace(end.amplitudes(), q)[0][0].re;
        ensure((fidelity - 1.0).abs() < TOL, || {
            format!("{enc} {m}: fidelity {fidelity}")
        })?;
    }
    Ok(())
}

#[test]
fn criterion_01_stabilizer_expectations() {
    verdict(
        1,
        "GHZ stabilizer expectations +1, -1, -1, -1",
        stabilizers(Encoding::Literal),
    );
}

#[test]
fn criterion_02_deterministic_products() {
    verdict(
        2,
        "deterministic products, exact and over 10^5 samples",
        deterministic_products(Encoding::Literal),
    );
}

#[test]
fn criterion_03_joint_unsatisfiability() {
    verdict(3, "0 of 64 assignments, four-constraint certificate", unsatisfiable());
}

#[test]
fn criterion_04_context_sensitivity() {
    verdict(
        4,
        "deferred C2 has expectation 0 and both parities",
        context_sensitivity(Encoding::Literal),
    );
}

#[test]
fn criterion_05_memory_reset() {
    verdict(
        5,
        "A-memories return to |R> after the full protocol",
        memory_reset(Encoding::Literal),
    );
}

#[test]
fn criterion_06_encoding_independence() {
    let result = (|| {
        for enc in ENCODINGS {
            stabilizers(enc)?;
            deterministic_products(enc)?;
            context_sensitivity(enc)?;
            memory_reset(enc)?;
        }
        unsatisfiable()?;
        let lit = builtin_contexts(Encoding::Literal);
        let comp = builtin_contexts(Encoding::Computational);
        for (a, b) in lit.iter().zip(&comp) {
            let diff = exact_distribution(a)
                .max_abs_diff(&exact_distribution(b))
                .ok_or("label mismatch")?;
            ensure(diff < TOL, || format!("{}: distributions differ by {diff}", a.name()))?;
        }
        Ok(())
    })();
    verdict(6, "criteria 1-5 under both encodings, distributions agree", result);
}

#[test]
fn criterion_07_oracle_equivalence() {
    let result = (|| {
        let ghz = ghz_state(&[SystemLabel::s(1), SystemLabel::s(2), SystemLabel::s(3)]).map_err(|e| e.to_string())?;
        let triples = [
            [Basis::X, Basis::X, Basis::X],
            [Basis::X, Basis::Y, Basis::Y],
            [Basis::Y, Basis::X, Basis::Y],
            [Basis::Y, Basis::Y, Basis::X],
        ];
        for enc in ENCODINGS {
            for (c, triple) in builtin_contexts(enc).iter().zip(triples) {
                let obs: Vec<_> = triple.iter().copied().enumerate().collect();
                let bare = ghz.expectation_product(&obs).map_err(|e| e.to_string())?;
                let full = product_expectation(c);
                ensure((bare - full).abs() < TOL, || {
                    format!("{enc} {}: {full} vs bare {bare}", c.name())
                })?;

                // and tuple by tuple against a hand projection of GHZ
                let axes = triple.map(|b| if b == Basis::X { 'X' } else { 'Y' });
                let d = exact_distribution(c);
                for t in tuples(3) {
                    let mut by_qubit = [0i8; 3];
                    for (slot, m) in c.measurements().iter().enumerate() {
                        by_qubit[usize::from(m.target.index()) - 1] = t[slot];
                    }
                    let signs: Vec<Sign> = t.iter().map(|&v| Sign::from_value(v.into()).unwrap()).collect();
                    let (got, want) = (d.probability_of(&signs), ghz_projection(axes, by_qubit));
                    ensure((got - want).abs() < TOL, || {
                        format!("{enc} {} {t:?}: {got} vs {want}", c.name())
                    })?;
                }
            }
        }
        Ok(())
    })();
    verdict(7, "context expectations equal bare-GHZ Pauli expectations", result);
}

#[test]
fn criterion_08_repeatability() {
    let result = (|| {
        for enc in ENCODINGS {
            for c in builtin_contexts(enc) {
                for m in c.measured_memories() {
                    let ok = repeatability_check(&c, m).map_err(|e| e.to_string())?;
                    ensure(ok, || format!("{enc} {} {m}", c.name()))?;
                }
            }
        }
        Ok(())
    })();
    verdict(8, "every pointer reading is repeatable", result);
}

fn relfacts(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_relfacts"))
        .args(args)
        .env_remove("RELFACTS_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} exited with {:?}", out.status.code())
    })?;
    Ok(out.stdout)
}

#[test]
fn criterion_09_dsl_fidelity() {
    let result = (|| {
        for enc in ENCODINGS {
            let compiled = dsl::load(GHZ3_RFS, enc).map_err(|e| e.to_string())?;
            ensure(compiled == Scenario::builtin(enc), || {
                format!("{enc}: compiled scenario differs")
            })?;
        }
        let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
        let ghz3 = manifest.join("scenarios/ghz3.rfs");
        let ghz3 = ghz3.to_str().ok_or("path")?;
        for enc in ["literal", "computational"] {
            let builtin = relfacts(&["report", "--output", "json", "--encoding", enc])?;
            let from_dsl = relfacts(&["report", "--output", "json", "--encoding", enc, "--scenario", ghz3])?;
            ensure(builtin == from_dsl, || format!("{enc}: JSON differs between paths"))?;
        }
        let mut rejected = 0;
        for entry in fs::read_dir(manifest.join("tests/fixtures/invalid")).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let src = fs::read_to_string(&path).map_err(|e| e.to_string())?;
            let expected = src
                .lines()
                .next()
                .and_then(|l| l.strip_prefix("# expect: "))
                .ok_or("missing header")?;
            let pos = expected.split(' ').next().ok_or("bad header")?;
            let err = match dsl::load(&src, Encoding::Literal) {
                Ok(_) => return Err(format!("{} was accepted", path.display())),
                Err(e) => e,
            };
            let (line, column) = err.position();
            ensure(format!("{line}:{column}") == pos, || {
                format!("{}: {err}, expected {pos}", path.display())
            })?;
            rejected += 1;
        }
        ensure(rejected >= 10, || format!("only {rejected} invalid fixtures"))
    })();
    verdict(
        9,
        "bundled scenario compiles to the built-in one; fixtures rejected in place",
        result,
    );
}

#[test]
fn criterion_10_reproducibility() {
    let result = (|| {
        let a = relfacts(&["report", "--output", "json", "--seed", "2024"])?;
        let b = relfacts(&["report", "--output", "json", "--seed", "2024"])?;
        ensure(a == b, || "two runs differ".into())
    })();
    verdict(10, "report --output json is byte-identical for a fixed seed", result);
}
