// Scratch probe: desk-scale training speed and tightness. Not part of the
// deliverable surface; run with `cargo run --release -p nbound --example probe`.

use std::sync::Arc;

use nbound::indicator::{GridIndicator, ProceduralIndicator};
use nbound::nnet::{threshold_hit, FieldNet, Mlp};
use nbound::query::{uniform_region, QueryKind, QueryOracle};
use nbound::rng::stream;
use nbound::training::{train, TrainConfig};

fn main() {
    let shape = std::env::args().nth(1).unwrap_or_else(|| "disk".into());
    let ind: ProceduralIndicator<f64> = match shape.as_str() {
        "disk" => ProceduralIndicator::disk(&[0.5, 0.5], 0.25).unwrap(),
        "star" => ProceduralIndicator::star([0.5, 0.5], 5, 0.14, 0.35, 0.5).unwrap(),
        _ => panic!("unknown shape"),
    };
    let grid = GridIndicator::rasterize(&ind, &[32, 32]).unwrap();
    println!("occupancy: {:.3}", grid.occupancy());
    let oracle = QueryOracle::new(Arc::new(grid.clone()), 64);
    let cfg = TrainConfig { seed: 424242, ..TrainConfig::default() };
    let model = Mlp::<f64>::for_query(2, QueryKind::Point, cfg.seed, 1.0, 0);
    let t0 = std::time::Instant::now();
    let out = train(model, &oracle, QueryKind::Point, &cfg).unwrap();
    println!(
        "converged={} iters={} windows={} seconds={:.1}",
        out.converged,
        out.stats.iterations,
        out.stats.windows.len(),
        out.stats.train_seconds
    );
    println!("wall: {:.1}s  per-iter: {:.2}ms", t0.elapsed().as_secs_f64(),
             1e3 * out.stats.train_seconds / out.stats.iterations as f64);

    // Hidden eval: 1e6 points, FN/FP.
    let mut scratch = out.model.make_scratch();
    let mut enc = Vec::new();
    let (mut fn_c, mut fp, mut pos, mut neg) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..1_000_000u64 {
        let r = uniform_region::<f64>(&mut stream(0xACCE97, i), QueryKind::Point, 2);
        let y = oracle.label(&mut stream(0xACCE98, i), &r);
        r.encode_into(&mut enc);
        let p = threshold_hit(out.model.forward(&enc, &mut scratch), 1e-5);
        if y { pos += 1; if !p { fn_c += 1; } } else { neg += 1; if p { fp += 1; } }
    }
    println!("hidden 1e6: fn={fn_c}/{pos}  fp={fp}/{neg}  fp_rate={:.4}", fp as f64 / neg as f64);

    // AABox comparison.
    let aabb = nbound::geometry::fit_aabb::<f64>(&grid).unwrap();
    use nbound::geometry::Primitive;
    let (mut afp, mut aneg) = (0u64, 0u64);
    for i in 0..1_000_000u64 {
        let r = uniform_region::<f64>(&mut stream(0xACCE97, i), QueryKind::Point, 2);
        let y = oracle.label(&mut stream(0xACCE98, i), &r);
        if !y { aneg += 1; if aabb.test(&r) { afp += 1; } }
    }
    println!("aabb fp_rate={:.4}  ratio={:.2}", afp as f64 / aneg as f64,
             (afp as f64 / aneg as f64) / (fp as f64 / neg as f64));
}
