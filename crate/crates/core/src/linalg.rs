//! Dense LU solves with an explicit pivot floor.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Singular {
    pub min_pivot: f64,
    pub threshold: f64,
}

pub(crate) struct Factored {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    pub condition: f64,
}

/// Factor `m` with partial pivoting; fails if some pivot is at or below `rel_floor·scale`.
pub(crate) fn factor(m: DMatrix<f64>, scale: f64, rel_floor: f64) -> Result<Factored, Singular> {
    let norm1 = one_norm(&m);
    let lu = m.lu();
    let u = lu.u();
    let min_pivot = (0..u.nrows())
        .map(|i| u[(i, i)].abs())
        .fold(f64::INFINITY, f64::min);
    let threshold = rel_floor * scale;
    if !(min_pivot > threshold) {
        return Err(Singular {
            min_pivot,
            threshold,
        });
    }
    let condition = match lu.try_inverse() {
        Some(inv) => norm1 * one_norm(&inv),
        None => f64::INFINITY,
    };
    Ok(Factored { lu, condition })
}

impl Factored {
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.lu
            .solve(b)
            .expect("factor() already rejected singular systems")
    }
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
