//! Constrained four-circles instance: compares DCA with the skip variant and
//! prints the step sizes of one skip run.

use gmwp::datasets::FourCircles;
use gmwp::{
    compare, random_init, solve, CompareConfig, GaugeSet, InitBox, ProblemInstance, SolverParams,
    Variant,
};

fn main() -> gmwp::Result<()> {
    let circles = FourCircles::default();
    let p = ProblemInstance::new(circles.points(1), 4, GaugeSet::euclidean())?
        .with_constraints(vec![vec![circles.constraint()]; 4])?;
    let params = SolverParams {
        sigma: 10.0,
        delta: 0.25,
        lambda_start: 0.1,
        lambda_f: 1e-3,
        lambda_skip: 30,
        ..Default::default()
    };

    let mut cfg = CompareConfig::new(10, 1, params.clone());
    cfg.variants = vec![Variant::Dca, Variant::AbdcaSkip];
    let report = compare(&p, &cfg)?;
    for s in &report.summary {
        println!(
            "{:<11} mean iters {:>8.1}  iter ratio {:>6.2}  mean value {:.4}",
            s.variant,
            s.mean_iters,
            s.iter_ratio.unwrap_or(f64::NAN),
            s.mean_value
        );
    }

    let x0 = random_init(&p, &InitBox::bounding(&p), 1, 0);
    let run = solve(&p, &x0, &params, Variant::AbdcaSkip)?;
    println!("max violation {:.3e}", p.max_violation(&run.centers));
    let steps: Vec<String> = run
        .trace
        .iter()
        .take(120)
        .map(|r| {
            if r.skipped {
                "s".to_string()
            } else {
                format!("{:.0e}", r.lambda_accepted)
            }
        })
        .collect();
    println!("{}", steps.join(" "));
    Ok(())
}
