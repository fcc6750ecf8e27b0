//! Max-plus arithmetic on the 2x2 model matrix: one recursion step
//! z(k) = A(k) (x) z(k-1) and the idempotent norm that tracks growth.

use maxplus_growth::maxplus::{tmul, tnorm, TropicalMatrix, TropicalVector};

fn main() -> maxplus_growth::Result<()> {
    // Diagonal entries are the random firing delays; off-diagonal
    // entries are 0, the multiplicative identity of the semiring.
    let a1 = TropicalMatrix::model_matrix(1.3, 0.4);
    let a2 = TropicalMatrix::model_matrix(0.2, 2.1);

    let mut z = TropicalVector::origin(2)?;
    println!("z(0) = ({}, {})", z.entry(0).value(), z.entry(1).value());
    for (k, a) in [a1, a2].iter().enumerate() {
        z = tmul(a, &z)?;
        println!(
            "z({}) = ({}, {})   |z| = {}",
            k + 1,
            z.entry(0).value(),
            z.entry(1).value(),
            tnorm(&z).value()
        );
    }

    // Max-plus products are homogeneous: shifting the input by c shifts
    // every output entry by c, which is why the difference Y = z1 - z2
    // carries all the stationary structure.
    let shifted = tmul(&TropicalMatrix::model_matrix(0.2, 2.1), &z.shift(5.0))?;
    println!(
        "shift by 5.0 first: ({}, {})",
        shifted.entry(0).value(),
        shifted.entry(1).value()
    );
    Ok(())
}
