use packsat::proof::{run_pipeline, PipelineConfig};
use std::time::Instant;

fn main() {
    let a: Vec<u32> = std::env::args().skip(1).map(|s| s.parse().unwrap()).collect();
    let split = if a.len() >= 6 { Some((a[3], a[4], a[5])) } else { None };
    let t = Instant::now();
    let out = run_pipeline(&PipelineConfig { r: a[0], k: a[1], c: a[2], alod: false, split, workers: 1, seed: 0 }).unwrap();
    println!("status={:?} solve={:.2}s total={:.2}s", out.status, out.solve_time.as_secs_f64(), t.elapsed().as_secs_f64());
    if let (Some(p), Some(c)) = (&out.pipeline, &out.check) {
        println!("steps={} check={:.2}s {:?}", p.steps.len(), c.stats.wall.as_secs_f64(), c.stats);
    }
    for r in &out.report.rows { println!("{} {:?} {:.2}s {}", r.index, r.status, r.seconds, r.conflicts); }
}
