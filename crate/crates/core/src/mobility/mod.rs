//! Location analytics: accuracy CDF, radius of gyration and its density,
//! stop locations, transitions between them, and hexagonal histograms.

mod cdf;
mod gyration;
mod hexbin;
mod kde;
mod stops;
mod transitions;

use std::collections::BTreeMap;
use std::io::Write;

pub use cdf::{accuracy_cdf, AccuracyCdf};
pub use gyration::radius_of_gyration;
pub use hexbin::{hexbin, HexGrid, HexHistogram};
pub use kde::{
    default_bandwidth_grid, kde_cross_validated, log_spaced, loo_log_likelihood, rg_kde, CvResult,
    GaussianKde, DEFAULT_GRID_SIZE, MIN_KDE_SAMPLES,
};
pub use stops::{extract_stops, StopLocation, DEFAULT_STOP_DISTANCE_M, DEFAULT_STOP_DURATION_S};
pub use transitions::{transition_graph, PlaceCluster, TransitionGraph};

use crate::error::Result;
use crate::ingest::LocationFix;
use crate::types::UserId;

/// Fixes with reported accuracy above this are dropped before r_g and
/// stop extraction.
pub const DEFAULT_ACCURACY_MAX_M: f64 = 200.0;

pub fn filter_by_accuracy(fixes: &[LocationFix], max_m: f64) -> Vec<LocationFix> {
    fixes
        .iter()
        .filter(|f| f.accuracy_m <= max_m)
        .cloned()
        .collect()
}

/// Group `(user, t)`-sorted fixes by user.
pub fn by_user(fixes: &[LocationFix]) -> BTreeMap<UserId, &[LocationFix]> {
    fixes
        .chunk_by(|a, b| a.user == b.user)
        .map(|c| (c[0].user.clone(), c))
        .collect()
}

/// Radius of gyration (km) per user with at least one fix.
pub fn rg_per_user(fixes: &[LocationFix]) -> Result<BTreeMap<UserId, f64>> {
    by_user(fixes)
        .into_iter()
        .map(|(u, f)| {
            let pts: Vec<_> = f.iter().map(|x| x.point).collect();
            Ok((u, radius_of_gyration(&pts)?))
        })
        .collect()
}

pub fn write_cdf<W: Write>(sink: W, cdf: &AccuracyCdf) -> Result<()> {
    let mut w = crate::csvio::csv_writer(sink);
    w.write_record(["accuracy_m", "fraction"])?;
    for (a, f) in &cdf.points {
        w.write_record([a.to_string(), f.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rg<W: Write>(sink: W, rg: &BTreeMap<UserId, f64>) -> Result<()> {
    let mut w = crate::csvio::csv_writer(sink);
    w.write_record(["user", "rg_km"])?;
    for (u, r) in rg {
        w.write_record([u.to_string(), r.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_density<W: Write>(sink: W, points: &[(f64, f64)]) -> Result<()> {
    let mut w = crate::csvio::csv_writer(sink);
    w.write_record(["x", "density"])?;
    for (x, d) in points {
        w.write_record([x.to_string(), d.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `user,lat,lon,start_s,end_s,n`.
pub fn write_stops<W: Write>(sink: W, stops: &[StopLocation]) -> Result<()> {
    let mut w = crate::csvio::csv_writer(sink);
    w.write_record(["user", "lat", "lon", "start_s", "end_s", "n"])?;
    for s in stops {
        w.write_record([
            s.user.to_string(),
            s.centroid.lat().to_string(),
            s.centroid.lon().to_string(),
            s.start.to_string(),
            s.end.to_string(),
            s.member_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `from,to,from_lat,from_lon,to_lat,to_lon,count`.
pub fn write_transitions<W: Write>(sink: W, g: &TransitionGraph) -> Result<()> {
    let mut w = crate::csvio::csv_writer(sink);
    w.write_record(["from", "to", "from_lat", "from_lon", "to_lat", "to_lon", "count"])?;
    for ((a, b), n) in &g.edges {
        let (pa, pb) = (g.clusters[*a].centroid, g.clusters[*b].centroid);
        w.write_record([
            a.to_string(),
            b.to_string(),
            pa.lat().to_string(),
            pa.lon().to_string(),
            pb.lat().to_string(),
            pb.lon().to_string(),
            n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `q,r,count` in axial coordinates.
pub fn write_hexbin<W: Write>(sink: W, h: &HexHistogram) -> Result<()> {
    let mut w = crate::csvio::csv_writer(sink);
    w.write_record(["q", "r", "count"])?;
    for ((q, r), n) in &h.counts {
        w.write_record([q.to_string(), r.to_string(), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
