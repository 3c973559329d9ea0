//! Rotation vector components and the thin-domain rescaling.

use hydrolimit::model::{rotate_coriolis, scale_forward, scale_inverse, PhysicalParams, ThinDomainQuantities};

fn main() -> hydrolimit::Result<()> {
    for phi in [0.0, 0.5, 1.0] {
        let c = rotate_coriolis(1.0, 0.3, phi);
        println!(
            "phi = {phi:.1}: alpha {:+.4} beta {:+.4} gamma {:+.4}",
            c.alpha, c.beta, c.gamma
        );
    }

    let thin = ThinDomainQuantities {
        x: 0.3,
        y: 0.7,
        z: 0.01,
        v_x: 1.0,
        v_y: -0.5,
        v_z: 0.002,
        nu_x: 1.0,
        nu_y: 1.0,
        nu_z: 1e-4,
        k_x: 0.1,
        k_y: 1.0,
        k_z: 1e-4,
        concentration: 5.0,
        source: 2.0,
        pressure: 3.0,
    };
    let eps = 0.01;
    let box_q = scale_forward(&thin, eps)?;
    println!(
        "rescaled: x3 {} u3 {} nu3 {} k1 {} c {}",
        box_q.x3, box_q.u3, box_q.nu3, box_q.k1, box_q.c
    );
    let back = scale_inverse(&box_q, eps)?;
    println!("round trip z error {:.1e}", (back.z - thin.z).abs());

    let p = PhysicalParams::default().with_eps(0.05);
    println!("aniso tracer diffusivities {:?}", p.aniso_diffusivity());
    Ok(())
}
