//! Pointwise density estimation from multiplicatively censored data
//! Y = X U with U uniform, at several fixed cut-offs.

use mellin_deconv::estimator::CutoffEstimator;
use mellin_deconv::functionals::FunctionalSpec;
use mellin_deconv::mellin::ErrorModel;
use mellin_deconv::simulation::{draw_sample, Scenario, Selection};

fn main() -> mellin_deconv::Result<()> {
    let target = ErrorModel::Gamma { d: 2.0 };
    let error = ErrorModel::uniform();
    let sc = Scenario {
        target,
        error,
        functional: FunctionalSpec::density(1.0)?,
        c: 1.0,
        n: 5000,
        replications: 1,
        seed: 17,
        selection: Selection::FixedK { k: 1.0 },
    };
    let sample = draw_sample(&sc, 0)?.sample;
    for x0 in [0.5, 1.0, 2.0, 4.0] {
        let spec = FunctionalSpec::density(x0)?;
        let est = CutoffEstimator::new(spec.clone(), error, 1.0)?;
        let path = est.path(&sample, &[2.0, 4.0, 8.0])?;
        println!(
            "f({x0}) = {:.4}   k=2: {:.4}  k=4: {:.4}  k=8: {:.4}",
            spec.true_value(&target)?,
            path.theta[0],
            path.theta[1],
            path.theta[2]
        );
    }
    Ok(())
}
