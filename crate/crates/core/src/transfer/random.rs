use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use super::GridFunction;

/// Number of Fourier modes in the random test functions.
const MODES: usize = 6;

/// Grid intervals per period of the fastest mode, so that Hermite
/// interpolation between nodes stays accurate to about `1e-4`.
const NODES_PER_PERIOD: usize = 16;

/// A random real trigonometric sum `g` with `sup|g| ≤ amplitude`, `sup|g'| ≤ slope`.
/// Frequencies stop at what a grid of `grid_size` nodes resolves, and `g'` is
/// further capped so that `e^{ig}` turns by at most `2π/NODES_PER_PERIOD` per cell.
fn random_trig<R: Rng>(rng: &mut R, amplitude: f64, slope: f64, grid_size: usize) -> impl Fn(f64) -> (f64, f64) {
    let resolvable = (grid_size.saturating_sub(1) / NODES_PER_PERIOD).max(1) as f64;
    let slope = slope.min(TAU * resolvable);
    let k_max = (slope / TAU).floor().clamp(1.0, resolvable) as u32;
    let modes: Vec<(f64, f64, f64)> = (0..MODES)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(1..=k_max) as f64, rng.gen_range(0.0..TAU)))
        .collect();
    let mass: f64 = modes.iter().map(|m| m.0.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let grad: f64 = modes.iter().map(|m| m.0.abs() * TAU * m.1).sum::<f64>().max(f64::MIN_POSITIVE);
    let scale = (amplitude / mass).min(slope / grad);
    move |x| {
        modes.iter().fold((0.0, 0.0), |acc, &(c, k, ph)| {
            let arg = TAU * k * x + ph;
            (acc.0 + scale * c * arg.sin(), acc.1 + scale * c * TAU * k * arg.cos())
        })
    }
}

/// `H = exp(g)` with `sup|g'| ≤ slope`, so `H ∈ C_{A|b|}` whenever `slope ≤ A|b|`.
pub fn random_cone_function<R: Rng>(rng: &mut R, grid_size: usize, slope: f64) -> GridFunction {
    let g = random_trig(rng, 2.0, slope, grid_size);
    GridFunction::from_real(grid_size, |x| {
        let (v, d) = g(x);
        let e = v.exp();
        (e, d * e)
    })
}

/// `f = ρ e^{iψ} H` with `0.1 ≤ ρ ≤ 0.9`, `sup|ρ'|, sup|ψ'| ≤ slope`; then
/// `|f| ≤ 0.9 H` and `|f'| ≤ (2·slope + sup|H'/H|) H`.
pub fn random_dominated<R: Rng>(rng: &mut R, h: &GridFunction, slope: f64) -> GridFunction {
    let rho = random_trig(rng, 0.4, slope, h.grid_size());
    let psi = random_trig(rng, 50.0, slope, h.grid_size());
    let u = GridFunction::from_fn(h.grid_size(), |x| {
        let (rv, rd) = rho(x);
        let (pv, pd) = psi(x);
        let phase = Complex64::from_polar(1.0, pv);
        let m = 0.5 + rv;
        (phase * m, phase * Complex64::new(rd, m * pd))
    });
    h.times(&u)
}
