use pcmk_core::fixtures::{canonical_cone, random_tight_body, rng};
use pcmk_core::measures::surface_measure;
use pcmk_core::solver::{solve_minkowski, DirectionalMeasure, SolverOptions};
use pcmk_core::weight::{WeightFunction, WeightKind};
use pcmk_core::QuadratureConfig;
use std::time::Instant;

fn main() {
    for dim in [2usize, 3] {
        let cone = canonical_cone(dim);
        let cfg = QuadratureConfig::for_dim(dim);
        let opts = SolverOptions::for_dim(dim);
        let mut r = rng(1000 + dim as u64);
        let mut worst = 0.0f64;
        let mut worst_iters = 0;
        let n_fix = 10;
        let t_all = Instant::now();
        for i in 0..n_fix {
            let m_max = if dim == 2 { 20 } else { 12 };
            let m = 1 + (i * 7 + 3) % m_max;
            let kind = if i % 2 == 0 { WeightKind::HeightPower } else { WeightKind::RadialPower };
            let n = dim as f64;
            let q = [n - 0.75, n - 0.5, n - 0.1][i % 3];
            let w = WeightFunction::new(kind, q, cone.clone());
            let body = random_tight_body(&cone, m, 0.1, &mut r);
            let s = surface_measure(&body, &w, &cfg).unwrap();
            let atoms: Vec<(Vec<f64>, f64)> = body.directions().iter().cloned().zip(s.masses.iter().cloned()).collect();
            let measure = DirectionalMeasure::new(&cone, atoms).unwrap();
            let t = Instant::now();
            let report = solve_minkowski(&cone, &w, &measure, &opts).unwrap();
            let dt = t.elapsed().as_secs_f64();
            worst = worst.max(dt);
            worst_iters = worst_iters.max(report.iterations);
            println!(
                "dim={dim} m={m:2} q={q:.2} {kind:?}: {:.3}s iters={} conv={} resid={:.2e}",
                dt, report.iterations, report.converged, report.max_residual()
            );
            assert!(report.converged, "fixture {i} failed");
        }
        println!("dim={dim}: total {:.2}s worst {:.3}s worst_iters {}\n", t_all.elapsed().as_secs_f64(), worst, worst_iters);
    }
}
