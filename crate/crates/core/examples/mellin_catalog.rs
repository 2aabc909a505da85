//! Analytic Mellin transforms of the error families next to a numeric
//! evaluation of the defining integral.

use mellin_deconv::mellin::{analytic_mellin, decay_class_g, numeric_mellin, DensityFn, ErrorModel};

fn main() -> mellin_deconv::Result<()> {
    let c = 1.0;
    let models = [
        ErrorModel::uniform(),
        ErrorModel::Beta { b: 3 },
        ErrorModel::ScaledLogGamma { mu: 0.0, a: 2.0, lambda: 1.5 },
        ErrorModel::Gamma { d: 4.0 },
        ErrorModel::Weibull { m: 2.0 },
        ErrorModel::Lognormal { mu: 0.0, lambda: 0.3 },
    ];
    println!("{:<22} {:>5} {:>24} {:>10}  decay", "model", "t", "M_c[g](t)", "rel err");
    for m in models {
        let h = DensityFn::from_model(&m);
        let class = decay_class_g(&m, c)?;
        for t in [0.5, 5.0] {
            let a = analytic_mellin(&m, c, t)?;
            let n = numeric_mellin(&h, c, t)?;
            println!(
                "{:<22} {:>5} {:>11.3e}{:+.3e}i {:>10.1e}  {:?}",
                m.to_string(),
                t,
                a.re,
                a.im,
                (n.value - a).norm() / a.norm(),
                class.shape
            );
        }
    }
    Ok(())
}
