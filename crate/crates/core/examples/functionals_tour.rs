//! Kernels of the supported functionals, their decay and the variance
//! proxy Delta(k) under a uniform and a gamma error.

use mellin_deconv::estimator::{delta_psi_g_many, regime_of};
use mellin_deconv::functionals::FunctionalSpec;
use mellin_deconv::mellin::ErrorModel;

fn main() -> mellin_deconv::Result<()> {
    let target = ErrorModel::Gamma { d: 2.0 };
    let cases = [
        (FunctionalSpec::density(1.0)?, 1.0),
        (FunctionalSpec::cdf(1.0)?, 0.5),
        (FunctionalSpec::survival(1.0)?, 1.5),
        (FunctionalSpec::laplace(1.0)?, 0.5),
    ];
    let ks = [1.0, 4.0, 16.0];
    for error in [ErrorModel::uniform(), ErrorModel::Gamma { d: 3.0 }] {
        println!("error {error}");
        for (spec, c) in &cases {
            let psi = spec.psi(*c, 1.0)?;
            let delta = delta_psi_g_many(spec, &error, *c, &ks)?;
            println!(
                "  {:<12} c={c:<4} theta={:.5} Psi(1)={:+.4}{:+.4}i  regime={:<13} Delta(1,4,16)={:.3e} {:.3e} {:.3e}",
                spec.to_string(),
                spec.true_value(&target)?,
                psi.re,
                psi.im,
                regime_of(spec, &error, *c)?.to_string(),
                delta[0],
                delta[1],
                delta[2]
            );
        }
    }
    Ok(())
}
