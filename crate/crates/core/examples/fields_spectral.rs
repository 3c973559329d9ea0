//! Spectral derivatives, norms and z-parity on the periodic box.

use std::f64::consts::PI;

use hydrolimit::fields::{derive, norms, Axis, Field, Parity, SpectralGrid};

fn main() -> hydrolimit::Result<()> {
    let grid = SpectralGrid::cubic(32, 1.0)?;
    // odd in z: sin(2 pi x1) sin(pi x3)
    let f = Field::from_fn(grid, Parity::Odd, |x| (2.0 * PI * x[0]).sin() * (PI * x[2]).sin());
    let df = derive(&f, Axis::X1, 1);
    let exact = Field::from_fn(grid, Parity::Odd, |x| {
        2.0 * PI * (2.0 * PI * x[0]).cos() * (PI * x[2]).sin()
    });
    println!("d/dx1 error       {:.2e}", df.sub(&exact).max_abs());

    let dz = derive(&f, Axis::X3, 1);
    println!("parity of d/dx3   {:?}", dz.parity());
    println!("parity residual   {:.2e}", f.parity_residual()?);

    let n = norms(&f);
    println!("l2 {:.6}  h1 {:.6}  h2 {:.6}  sup {:.6}", n.l2, n.h1, n.h2, n.linf);
    Ok(())
}
