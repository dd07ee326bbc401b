//! Pointy-top hexagonal binning over a local equirectangular projection.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{centroid, GeoPoint, LocalProjection};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Hexagon grid with circumradius `cell_size_m`, axial `(q, r)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexGrid {
    pub projection: LocalProjection,
    pub cell_size_m: f64,
}

impl HexGrid {
    pub fn new(origin: GeoPoint, cell_size_m: f64) -> Result<Self> {
        if !(cell_size_m > 0.0 && cell_size_m.is_finite()) {
            return Err(Error::invalid(format!("cell size {cell_size_m} must be positive")));
        }
        Ok(HexGrid {
            projection: LocalProjection::new(origin),
            cell_size_m,
        })
    }

    /// Centre of cell `(q, r)` in projected metres.
    pub fn center(&self, q: i64, r: i64) -> (f64, f64) {
        let s = self.cell_size_m;
        (s * SQRT3 * (q as f64 + r as f64 / 2.0), s * 1.5 * r as f64)
    }

    pub fn cell_of_xy(&self, x: f64, y: f64) -> (i64, i64) {
        let s = self.cell_size_m;
        let qf = (SQRT3 / 3.0 * x - y / 3.0) / s;
        let rf = (2.0 / 3.0 * y) / s;
        cube_round(qf, rf)
    }

    pub fn cell_of(&self, p: GeoPoint) -> (i64, i64) {
        let (x, y) = self.projection.project(p);
        self.cell_of_xy(x, y)
    }
}

fn cube_round(qf: f64, rf: f64) -> (i64, i64) {
    let sf = -qf - rf;
    let (mut q, mut r, s) = (qf.round(), rf.round(), sf.round());
    let (dq, dr, ds) = ((q - qf).abs(), (r - rf).abs(), (s - sf).abs());
    if dq > dr && dq > ds {
        q = -r - s;
    } else if dr > ds {
        r = -q - s;
    }
    (q as i64, r as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexHistogram {
    pub grid: Option<HexGrid>,
    pub counts: BTreeMap<(i64, i64), u64>,
}

impl HexHistogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Count points per hexagon on a grid centred on the points' centroid.
pub fn hexbin(points: &[GeoPoint], cell_size_m: f64) -> Result<HexHistogram> {
    let Some(origin) = centroid(points) else {
        if !(cell_size_m > 0.0 && cell_size_m.is_finite()) {
            return Err(Error::invalid(format!("cell size {cell_size_m} must be positive")));
        }
        return Ok(HexHistogram {
            grid: None,
            counts: BTreeMap::new(),
        });
    };
    let grid = HexGrid::new(origin, cell_size_m)?;
    let mut counts = BTreeMap::new();
    for p in points {
        *counts.entry(grid.cell_of(*p)).or_default() += 1;
    }
    Ok(HexHistogram {
        grid: Some(grid),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_one_cell() {
        let p = GeoPoint::new(55.78, 12.52).unwrap();
        let h = hexbin(&[p; 7], 100.0).unwrap();
        assert_eq!(h.counts, BTreeMap::from([((0, 0), 7)]));
    }

    #[test]
    fn empty_input() {
        let h = hexbin(&[], 100.0).unwrap();
        assert!(h.counts.is_empty());
        assert!(hexbin(&[], 0.0).is_err());
    }

    #[test]
    fn cell_centres_map_to_themselves() {
        let g = HexGrid::new(GeoPoint::new(0.0, 0.0).unwrap(), 10.0).unwrap();
        for q in -3..=3 {
            for r in -3..=3 {
                let (x, y) = g.center(q, r);
                assert_eq!(g.cell_of_xy(x, y), (q, r));
            }
        }
    }

    #[test]
    fn uniform_grid_matches_nearest_centre_assignment() {
        // In a regular hexagonal tiling a point lies in the cell whose
        // centre is nearest; check against a brute-force search.
        let g = HexGrid::new(GeoPoint::new(0.0, 0.0).unwrap(), 7.0).unwrap();
        for i in -40..=40 {
            for j in -40..=40 {
                let (x, y) = (i as f64 * 1.37 + 0.01, j as f64 * 1.13 + 0.02);
                let mut best = (f64::INFINITY, (0, 0));
                for q in -15..=15 {
                    for r in -15..=15 {
                        let (cx, cy) = g.center(q, r);
                        let d = (x - cx).powi(2) + (y - cy).powi(2);
                        if d < best.0 {
                            best = (d, (q, r));
                        }
                    }
                }
                assert_eq!(g.cell_of_xy(x, y), best.1, "({x}, {y})");
            }
        }
    }
}
