// Scratch micro-benchmark of training components.

use std::sync::Arc;
use std::time::Instant;

use nbound::indicator::{GridIndicator, ProceduralIndicator};
use nbound::nnet::{FieldNet, Mlp};
use nbound::query::{uniform_region, QueryKind, QueryOracle};
use nbound::rng::stream;
use nbound::training::{loss_batch, LossWeights};

fn main() {
    let disk = ProceduralIndicator::disk(&[0.5, 0.5], 0.25).unwrap();
    let grid = GridIndicator::rasterize(&disk, &[32, 32]).unwrap();
    let oracle = QueryOracle::<f64>::new(Arc::new(grid), 64);
    let model = Mlp::<f64>::for_query(2, QueryKind::Point, 1, 1.0, 0);
    let mut scratch = model.make_scratch();

    // forward only
    let mut rng = stream(1, 0);
    let n = 100_000;
    let t0 = Instant::now();
    let mut acc = 0.0;
    for _ in 0..n {
        let r = uniform_region::<f64>(&mut rng, QueryKind::Point, 2);
        let enc = [r.first()[0], r.first()[1]];
        acc += model.forward(&enc, &mut scratch);
    }
    println!("forward: {:.0} ns/sample (acc {acc:.1})", t0.elapsed().as_nanos() as f64 / n as f64);

    // forward + backward_bce
    let mut grads = vec![0.0; model.params().len()];
    let t0 = Instant::now();
    for _ in 0..n {
        let r = uniform_region::<f64>(&mut rng, QueryKind::Point, 2);
        let enc = [r.first()[0], r.first()[1]];
        let y = model.forward(&enc, &mut scratch);
        model.backward_bce(&mut scratch, y, true, 2.0, 1.0, 1.0 / 8192.0, &mut grads);
    }
    println!("fwd+bwd: {:.0} ns/sample", t0.elapsed().as_nanos() as f64 / n as f64);

    // full loss_batch
    let w = LossWeights::new(2.0f64, 1.0);
    let t0 = Instant::now();
    let iters = 12;
    for i in 0..iters {
        loss_batch(
            &model, &mut scratch, &oracle, QueryKind::Point, 7, i, 8192, &w, 1e-5, 1e-7,
            &mut grads, |_| {},
        );
    }
    println!(
        "loss_batch(8192): {:.1} ms/iter => {:.0} ns/sample",
        t0.elapsed().as_millis() as f64 / iters as f64,
        t0.elapsed().as_nanos() as f64 / (iters * 8192) as f64
    );
}
