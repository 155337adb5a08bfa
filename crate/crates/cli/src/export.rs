//! OBJ and CSV serialization of surface grids.

use std::fmt::Write;

use nilweier_core::pipeline::{SurfaceGrid, SymSample};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("surface grid has no samples")]
    EmptyGrid,
    #[error("theta index {0} is out of range")]
    NoSuchTheta(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Nil,
    L3,
    Normal,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Nil, Channel::L3, Channel::Normal];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Nil => "nil",
            Channel::L3 => "l3",
            Channel::Normal => "normal",
        }
    }

    fn pick(self, x: &SymSample) -> [f64; 3] {
        match self {
            Channel::Nil => x.nil,
            Channel::L3 => x.l3,
            Channel::Normal => x.normal,
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Wavefront OBJ of one θ-slice. Vertices are numbered over the present samples
/// in `i`-fastest order; a quad is written for every cell with four corners.
pub fn export_obj(sg: &SurfaceGrid, theta_index: usize, channel: Channel) -> Result<String, ExportError> {
    let slice = sg.samples.get(theta_index).ok_or(ExportError::NoSuchTheta(theta_index))?;
    let (ns, nt) = (sg.ns(), sg.nt());
    if slice.iter().all(Option::is_none) {
        return Err(ExportError::EmptyGrid);
    }
    let mut index = vec![0usize; ns * nt];
    let mut out = String::new();
    let mut next = 1;
    for j in 0..nt {
        for i in 0..ns {
            if let Some(x) = &slice[j * ns + i] {
                let [a, b, c] = channel.pick(x);
                let _ = writeln!(out, "v {} {} {}", num(a), num(b), num(c));
                index[j * ns + i] = next;
                next += 1;
            }
        }
    }
    for j in 0..nt.saturating_sub(1) {
        for i in 0..ns.saturating_sub(1) {
            let corners = [j * ns + i, j * ns + i + 1, (j + 1) * ns + i + 1, (j + 1) * ns + i];
            if corners.iter().all(|&k| index[k] > 0) {
                let [a, b, c, d] = corners.map(|k| index[k]);
                let _ = writeln!(out, "f {a} {b} {c} {d}");
            }
        }
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "s,t,theta,space,x1,x2,x3";

/// All θ-slices and channels, one row per sample and channel.
pub fn export_csv(sg: &SurfaceGrid) -> Result<String, ExportError> {
    if sg.samples.iter().flatten().all(Option::is_none) {
        return Err(ExportError::EmptyGrid);
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (k, &theta) in sg.thetas.iter().enumerate() {
        for (s, t, x) in sg.iter_theta(k) {
            for ch in Channel::ALL {
                let [a, b, c] = ch.pick(x);
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    num(s),
                    num(t),
                    num(theta),
                    ch.name(),
                    num(a),
                    num(b),
                    num(c)
                );
            }
        }
    }
    Ok(out)
}
