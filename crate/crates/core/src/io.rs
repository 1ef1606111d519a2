//! CSV artifacts. Numbers use the shortest representation that parses back
//! to the same value, so files are byte-stable across runs.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sm::SmField;
use crate::tensor::{BoundaryFlux, SymTensorField};
use crate::transform::{FanBeamData, FanBeamGrid};

fn num<T: Real>(v: T) -> String {
    format!("{v}")
}

fn tensor_labels(rank: usize) -> &'static [&'static str] {
    match rank {
        0 => &["u"],
        1 => &["u1", "u2"],
        _ => &["u11", "u12", "u22"],
    }
}

/// One row per masked node: `i, j, x1, x2, weight` and the components.
pub fn write_tensor_csv<T: Real, W: Write>(u: &SymTensorField<T>, out: W) -> Result<()> {
    let grid = u.grid();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["i", "j", "x1", "x2", "weight"];
    header.extend_from_slice(tensor_labels(u.rank()));
    w.write_record(&header)?;
    for node in grid.inside_nodes() {
        let (i, j) = grid.ij(node);
        let (x, y) = grid.xy(node);
        let mut row = vec![i.to_string(), j.to_string(), num(x), num(y), num(grid.weights()[node])];
        row.extend(u.components().iter().map(|c| num(c[node])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `node, x1, x2, theta, value` for every masked node and fiber angle.
pub fn write_sm_csv<T: Real, W: Write>(f: &SmField<T>, out: W) -> Result<()> {
    let grid = f.grid();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "x1", "x2", "theta", "value"])?;
    for node in grid.inside_nodes() {
        let (x, y) = grid.xy(node);
        for k in 0..f.ntheta() {
            w.write_record([node.to_string(), num(x), num(y), num(f.theta(k)), num(f.at(node, k))])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `beta, alpha, value, weight` with `weight = cos alpha`.
pub fn write_fan_csv<T: Real, W: Write>(phi: &FanBeamData<T>, out: W) -> Result<()> {
    let g = phi.grid;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["beta", "alpha", "value", "weight"])?;
    for i in 0..g.nbeta {
        for j in 0..g.nalpha {
            let a: T = g.alpha(j);
            w.write_record([num(g.beta::<T>(i)), num(a), num(phi.at(i, j)), num(a.cos())])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads the output of [`write_fan_csv`] back onto `grid`.
pub fn read_fan_csv<T: Real, R: Read>(grid: FanBeamGrid, input: R) -> Result<FanBeamData<T>> {
    let mut r = csv::Reader::from_reader(input);
    let mut values = Vec::with_capacity(grid.len());
    for rec in r.records() {
        let rec = rec?;
        let v: f64 = rec
            .get(2)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Io("malformed value column".into()))?;
        values.push(T::lit(v));
    }
    FanBeamData::new(grid, values)
}

/// `beta` and one `flux` column per component.
pub fn write_flux_csv<T: Real, W: Write>(flux: &BoundaryFlux<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["beta".to_string()];
    header.extend((0..flux.values.len()).map(|c| if flux.values.len() == 1 { "flux".into() } else { format!("flux{}", c + 1) }));
    w.write_record(&header)?;
    for (i, &b) in flux.beta.iter().enumerate() {
        let mut row = vec![num(b)];
        row.extend(flux.values.iter().map(|c| num(c[i])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_history_csv<W: Write>(history: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "residual"])?;
    for (i, r) in history.iter().enumerate() {
        w.write_record([(i + 1).to_string(), num(*r)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::random_fan;

    #[test]
    fn fan_data_round_trips_bit_exactly() {
        let g = FanBeamGrid::new(8, 6).unwrap();
        let phi: FanBeamData<f64> = random_fan(g, 3);
        let mut buf = Vec::new();
        write_fan_csv(&phi, &mut buf).unwrap();
        let back: FanBeamData<f64> = read_fan_csv(g, buf.as_slice()).unwrap();
        assert_eq!(back.values, phi.values);
    }

    #[test]
    fn shortest_formatting() {
        assert_eq!(num(0.1f64), "0.1");
        assert_eq!(num(1.0f64), "1");
        assert_eq!(num(1e-20f64), "0.00000000000000000001");
    }
}
