//! The experiment harness from code: same tables the `relbreg` binary prints.

use relbreg::bench::{emit_table, run_experiment, Algo, ExperimentSpec, Family, Format};

fn main() -> relbreg::Result<()> {
    let mut out = std::io::stdout().lock();
    for (family, algo) in [(Family::Iep, Algo::Alg4), (Family::SvmSaddle, Algo::Alg2), (Family::Quartic, Algo::Alg5)] {
        let spec = ExperimentSpec {
            checkpoints: vec![100, 300, 1000],
            repeats: 3,
            ..ExperimentSpec::new(family, algo)
        };
        let outcome = run_experiment(&spec)?;
        println!("\n{} / {algo:?}", family.name());
        emit_table(&mut out, &outcome.table, Format::Text)?;
        if let Some(msg) = outcome.failure {
            println!("failed: {msg}");
        }
    }
    Ok(())
}
