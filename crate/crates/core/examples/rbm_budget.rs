//! Final RBM KLD on the 8-bit four-mode grid (n_h = 33) at two epoch budgets.
//!
//! `cargo run --release -p qsbm --example rbm_budget`

use qsbm::rbm::{run_rbm_realizations, RbmConfig};
use qsbm::targets::TargetSpec;

fn main() -> qsbm::Result<()> {
    let target = TargetSpec::FourModeMixture2d.build(8, None)?;
    for epochs in [10_000, 50_000] {
        let config = RbmConfig { epochs, eval_every: epochs / 10, ..RbmConfig::default() };
        let set = run_rbm_realizations(&target, &config, 2024, 5, None)?;
        let klds = set.final_exact_klds();
        let mean = klds.iter().sum::<f64>() / klds.len() as f64;
        println!("{epochs} epochs: mean final KLD {mean:.4}");
        for e in &set.records[0].evals {
            println!("  seed 0, epoch {:>6}: {:.4}", e.epoch, e.exact_kld);
        }
    }
    Ok(())
}
