//! Ordinary least squares with named columns, standard errors and a
//! rejected rank-deficient design.

use natfx::estimate::{fit_ols, Design};

fn main() {
    let x: Vec<f64> = (0..50).map(|i| i as f64 / 10.0).collect();
    let z: Vec<f64> = (0..50).map(|i| ((i * 7) % 11) as f64).collect();
    let y: Vec<f64> = x.iter().zip(&z).enumerate().map(|(i, (x, z))| 1.0 + 2.0 * x - 0.5 * z + 0.1 * ((i % 3) as f64 - 1.0)).collect();

    let design = Design::new(vec![("(Intercept)".into(), vec![1.0; 50]), ("x".into(), x.clone()), ("z".into(), z)]).unwrap();
    let fit = fit_ols(&design, &y).unwrap();
    for c in &fit.coefficients {
        println!("{:<12} {:>9.4} ({:.4})", c.name, c.estimate, c.std_error);
    }
    println!("sigma2 = {:.5}, n = {}", fit.sigma2, fit.n);

    let twice: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
    let collinear = Design::new(vec![("(Intercept)".into(), vec![1.0; 50]), ("x".into(), x), ("2x".into(), twice)]).unwrap();
    println!("{}", fit_ols(&collinear, &y).unwrap_err());
}
