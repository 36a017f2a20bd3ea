// Solving a regularized generalized eigenproblem `N w = theta (D + lambda I) w`.

use mcsda::{regularize, solve_ratio_trace, Matrix, ScatterPair};
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // numerator spreads along the first axis, denominator is tight there
    let numerator = Matrix::from_row_slice(3, 3, &[9.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
    let denominator = Matrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.0, 2.0, 0.5, 0.0, 0.5, 1.0]);
    let pair = ScatterPair::new(numerator, denominator)?;

    for lambda in [0.0, 0.01, 1.0] {
        let basis = solve_ratio_trace(&pair, 2, lambda)?;
        let den = regularize(&pair.denominator, lambda);
        let resid: f64 = (0..2)
            .map(|c| {
                let w = basis.vectors.column(c);
                (&pair.numerator * w - &den * w * basis.values[c]).norm()
            })
            .fold(0.0, f64::max);
        let gram = basis.vectors.transpose() * &den * &basis.vectors;
        println!(
            "lambda {lambda:>5}: values {:?}, residual {resid:.1e}, |W'(D+lI)W - I| {:.1e}",
            basis.values,
            (gram - Matrix::identity(2, 2)).norm()
        );
    }

    // a singular denominator needs the ridge
    let singular = ScatterPair::new(
        Matrix::identity(2, 2),
        Matrix::from_diagonal_element(2, 2, 0.0),
    )?;
    match solve_ratio_trace(&singular, 1, 0.0) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("lambda 0 on a zero denominator: {e}"),
    }
    println!(
        "with lambda 0.01: {:?}",
        solve_ratio_trace(&singular, 1, 0.01)?.values
    );
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
