use crate::quad::TanhSinh;

/// `K(u) = ∫ φ(x) φ(x + u) dx` for `φ(x) = x_+^{β2/2 − 1}`, tabulated by
/// quadrature on a log-spaced grid and interpolated as a piecewise power law.
#[derive(Debug, Clone)]
pub struct KFunction {
    beta2: f64,
    log_u: Vec<f64>,
    log_k: Vec<f64>,
}

const LOG10_MIN: f64 = -6.0;
const LOG10_MAX: f64 = 6.0;
const POINTS: usize = 25;

impl KFunction {
    pub fn new(beta2: f64) -> Self {
        assert!(beta2 > 0.0 && beta2 < 1.0, "beta2 = {beta2} outside (0, 1)");
        let g = 0.5 * beta2 - 1.0;
        let q = TanhSinh::new(1e-12, 9);
        let mut log_u = Vec::with_capacity(POINTS);
        let mut log_k = Vec::with_capacity(POINTS);
        for i in 0..POINTS {
            let e = LOG10_MIN + (LOG10_MAX - LOG10_MIN) * i as f64 / (POINTS - 1) as f64;
            let u = 10f64.powf(e);
            let near = q.integrate_with(|x, dl, _| dl.powf(g) * (x + u).powf(g), 0.0, u);
            let far = q.integrate_to_inf(|x| x.powf(g) * (x + u).powf(g), u);
            log_u.push(u.ln());
            log_k.push((near + far).ln());
        }
        Self { beta2, log_u, log_k }
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    /// `K(u)`, symmetric in `u`; infinite at 0.
    pub fn eval(&self, u: f64) -> f64 {
        let a = u.abs();
        if a == 0.0 {
            return f64::INFINITY;
        }
        let x = a.ln();
        let n = self.log_u.len();
        let i = match self.log_u.partition_point(|&v| v <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        let slope = (self.log_k[i + 1] - self.log_k[i]) / (self.log_u[i + 1] - self.log_u[i]);
        (self.log_k[i] + slope * (x - self.log_u[i])).exp()
    }

    /// Least-squares fit `K(u) ≈ C |u|^p` over the table.
    pub fn power_law(&self) -> (f64, f64) {
        let n = self.log_u.len() as f64;
        let mx = self.log_u.iter().sum::<f64>() / n;
        let my = self.log_k.iter().sum::<f64>() / n;
        let sxy: f64 = self.log_u.iter().zip(&self.log_k).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = self.log_u.iter().map(|x| (x - mx).powi(2)).sum();
        let p = sxy / sxx;
        ((my - p * mx).exp(), p)
    }

    /// `K(1)`.
    pub fn constant(&self) -> f64 {
        self.eval(1.0)
    }

    /// Largest relative deviation of the table from its power-law fit.
    pub fn power_law_residual(&self) -> f64 {
        let (c, p) = self.power_law();
        self.log_u
            .iter()
            .zip(&self.log_k)
            .map(|(&x, &y)| ((c.ln() + p * x) - y).exp_m1().abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::beta::beta;

    #[test]
    fn matches_beta_closed_form() {
        for &b2 in &[0.5, 0.7, 0.8, 2.0 / 3.0] {
            let k = KFunction::new(b2);
            let g = 0.5 * b2 - 1.0;
            let ck = beta(g + 1.0, -2.0 * g - 1.0);
            for &u in &[1e-4f64, 0.03, 1.0, 7.5, 2e3] {
                let want = ck * u.powf(b2 - 1.0);
                let got = k.eval(u);
                assert!((got / want - 1.0).abs() < 1e-8, "b2={b2} u={u}: {got} vs {want}");
                assert_eq!(k.eval(-u), got);
            }
            let (c, p) = k.power_law();
            assert!((p - (b2 - 1.0)).abs() < 1e-9);
            assert!((c / ck - 1.0).abs() < 1e-8);
            assert!(k.power_law_residual() < 1e-8);
        }
    }

    #[test]
    fn extrapolates_beyond_table() {
        let k = KFunction::new(0.7);
        let (c, p) = k.power_law();
        for &u in &[1e-9f64, 1e9] {
            assert!((k.eval(u) / (c * u.powf(p)) - 1.0).abs() < 1e-7);
        }
        assert!(k.eval(0.0).is_infinite());
    }
}
