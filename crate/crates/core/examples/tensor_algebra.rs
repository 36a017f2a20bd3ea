// Unfolding, folding and mode products on a small third-order tensor.

use mcsda::{fold, mode_product, multi_project, unfold, Matrix, Tensor};
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // entries 1..=24, first index fastest
    let x = Tensor::from_fn(vec![2, 3, 4], |idx| {
        (1 + idx[0] + 2 * idx[1] + 6 * idx[2]) as f64
    })?;
    println!(
        "tensor dims {:?}, |X|_F = {:.4}",
        x.dims(),
        x.frobenius_norm()
    );

    for k in 0..x.order() {
        let xk = unfold(&x, k)?;
        println!("mode-{} unfolding is {}x{}", k + 1, xk.nrows(), xk.ncols());
        assert_eq!(fold(&xk, k, x.dims())?, x);
    }
    println!("mode-2 unfolding:\n{}", unfold(&x, 1)?);

    // mode product = matrix product on the unfolding
    let w = Matrix::from_row_slice(2, 3, &[1.0, 0.0, -1.0, 0.5, 0.5, 0.5]);
    let y = mode_product(&x, &w, 1)?;
    let gap = (unfold(&y, 1)? - &w * unfold(&x, 1)?).norm();
    println!(
        "X x_2 W has dims {:?}; unfolding identity gap {gap:.1e}",
        y.dims()
    );

    // projecting every mode: each W_k maps I_k to I'_k
    let ws = vec![
        Matrix::from_column_slice(2, 1, &[1.0, 1.0]),
        Matrix::identity(3, 2),
        Matrix::from_fn(4, 2, |i, j| if i % 2 == j { 1.0 } else { 0.0 }),
    ];
    let z = multi_project(&x, &ws)?;
    println!("projected to {:?}: {:?}", z.dims(), z.data());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
