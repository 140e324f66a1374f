use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

/// Default temperature step: max(0.5 K, 1e-3·T).
pub fn default_temperature_step(temperature: f64) -> f64 {
    (1e-3 * temperature).max(0.5)
}

/// Central differences at steps 2h, h, h/2 combined in a Richardson table.
/// The error estimate is the change between the two highest-order entries.
pub fn richardson_derivative<G>(g: G, x: f64, h: f64) -> Result<Derivative>
where
    G: Fn(f64) -> Result<f64>,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid("step", format!("must be positive, got {h}")));
    }
    let steps = [2.0 * h, h, 0.5 * h];
    let mut table = [[0.0_f64; 3]; 3];
    for (i, &s) in steps.iter().enumerate() {
        table[i][0] = (g(x + s)? - g(x - s)?) / (2.0 * s);
        let mut factor = 1.0;
        for j in 1..=i {
            factor *= 4.0;
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
        }
    }
    let value = table[2][2];
    let error = (table[2][2] - table[1][1]).abs();
    Ok(Derivative { value, error })
}

/// Temperature derivative dg/dT with the ladder confined to `[T - 2h, T + 2h]`.
pub fn derivative_in_t<G>(g: G, temperature: f64, h0: f64) -> Result<Derivative>
where
    G: Fn(f64) -> Result<f64>,
{
    if !(h0 > 0.0) || temperature - 2.0 * h0 <= 0.0 {
        return Err(Error::StepUnderflow { temperature, step: h0 });
    }
    richardson_derivative(g, temperature, h0)
}
