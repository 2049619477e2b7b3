use std::f64::consts::PI;

/// Series solution on a slab of height `h` that starts at zero, has the top
/// face held at `s0` and an insulated bottom face. `y` is measured from the bottom.
pub fn slab_solution(s0: f64, y: f64, t: f64, diffusivity: f64, h: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..2000 {
        let m = (2 * k + 1) as f64;
        let mu = m * PI / (2.0 * h);
        let decay = (-mu * mu * diffusivity * t).exp();
        if decay < 1e-300 {
            break;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * 4.0 / (m * PI) * (mu * y).cos() * decay;
    }
    s0 * (1.0 - sum)
}
