//! One product ball on the reduced Brusselator, followed for five periods.
//!
//! `cargo run --release -p synchro-core --example single_ball`

use synchro_core::models::{Brusselator, BrusselatorParams};
use synchro_core::{proc1, ProductBall, SectionParallelogram, StateVector, TubeOptions, VerificationConfig};

fn main() -> Result<(), synchro_core::Error> {
    let system = Brusselator::reduced(BrusselatorParams::default());
    // (u, v) planes; v is the phase ordinate, vertices 0 and 2 span the diagonal
    let s1 = SectionParallelogram::from_vertices(
        [[0.621884, 3.778615], [0.621888, 3.778615], [0.621906, 3.77865], [0.621903, 3.77865]],
        0,
        2,
        1,
        0,
    )?;
    let s2 = SectionParallelogram::from_vertices(
        [[0.485926, 4.077926], [0.485929, 4.077926], [0.485946, 4.077997], [0.485943, 4.077997]],
        0,
        2,
        1,
        0,
    )?;
    let r0 = 3.5e-8;
    let ball = ProductBall::shared(StateVector::new(vec![0.622, 3.779])?, StateVector::new(vec![0.486, 4.078])?, r0)?;
    let config = VerificationConfig::new(2e-4, 34564, 5, 1e-4, r0)?;
    let result = proc1(&system, &ball, &s1, &s2, &config, &TubeOptions::default())?;
    println!("contained: {} at step {:?}", result.contained, result.hit_step);
    println!("image centers: {:?} {:?}", result.image.b1.center.as_slice(), result.image.b2.center.as_slice());
    println!("image radius: {:e}", result.image.radius());
    println!("phases: {:.4} {:.4} (difference {:.2e})", result.phase1, result.phase2, result.delta_phase);
    Ok(())
}
