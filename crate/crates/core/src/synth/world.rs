//! Static geometry: campus access points, classrooms, homes, venues and the
//! transit corridors.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geo::GeoPoint;

use super::config::SynthConfig;

/// Spacing between consecutive corridor fixes.
pub(crate) const CORRIDOR_STEP_M: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    Home,
    Classroom,
    Venue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Place {
    pub id: String,
    pub kind: PlaceKind,
    /// Metres east/north of the campus centre.
    pub x: f64,
    pub y: f64,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct AccessPoint {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct World {
    pub center: GeoPoint,
    pub places: Vec<Place>,
    pub aps: Vec<AccessPoint>,
    /// Index into `places`.
    pub homes: Vec<usize>,
    pub classrooms: Vec<usize>,
    pub venues: Vec<usize>,
    pub corridor_radius_m: f64,
    pub n_users: usize,
}

fn ring_point(radius: f64, k: usize, n: usize) -> (f64, f64) {
    let theta = 2.0 * PI * (k as f64 + 0.5) / n as f64;
    (radius * theta.cos(), radius * theta.sin())
}

impl World {
    /// Lays out the world.
    ///
    /// Homes and venues sit on a ring around campus, each with a private AP
    /// and far enough from everything else that neither WiFi nor Bluetooth
    /// reaches across places. Users in transit walk outward along a private
    /// ray beyond the ring.
    pub fn build(cfg: &SynthConfig) -> Result<World> {
        let center = GeoPoint::new(cfg.center_lat, cfg.center_lon)?;
        let vis = cfg.radio.visibility_m();
        let reach = vis.max(cfg.radio.bt_range_m);
        let cols = (cfg.ap_grid.count as f64).sqrt().ceil() as usize;
        let rows = cfg.ap_grid.count.div_ceil(cols);
        let sp = cfg.ap_grid.spacing_m;
        let off_x = (cols - 1) as f64 * sp / 2.0;
        let off_y = (rows - 1) as f64 * sp / 2.0;
        let mut aps: Vec<AccessPoint> = (0..cfg.ap_grid.count)
            .map(|i| AccessPoint {
                id: format!("ap-campus-{i:03}"),
                x: (i % cols) as f64 * sp - off_x,
                y: (i / cols) as f64 * sp - off_y,
            })
            .collect();
        let campus_extent = off_x.hypot(off_y);

        let mut places = Vec::new();
        let mut mk = |id: String, kind: PlaceKind, x: f64, y: f64| -> Result<usize> {
            let p = center.offset(y, x)?;
            places.push(Place {
                id,
                kind,
                x,
                y,
                lat: p.lat(),
                lon: p.lon(),
            });
            Ok(places.len() - 1)
        };

        // Spread classrooms over the grid.
        let n_class = cfg.social.communities;
        let mut classrooms = Vec::new();
        for c in 0..n_class {
            let ap = &aps[c * cfg.ap_grid.count / n_class];
            classrooms.push(mk(format!("class-{c}"), PlaceKind::Classroom, ap.x, ap.y)?);
        }

        let n_ring = cfg.n_users + cfg.schedule.venues;
        let min_sep = 2.0 * reach + 100.0;
        let ring_r = (campus_extent + 2.0 * reach + 1000.0).max(min_sep / (2.0 * (PI / n_ring as f64).sin()));
        let mut homes = Vec::new();
        let mut venues = Vec::new();
        for k in 0..n_ring {
            let (x, y) = ring_point(ring_r, k, n_ring);
            if k < cfg.n_users {
                let id = format!("home-{k:03}");
                aps.push(AccessPoint {
                    id: format!("ap-{id}"),
                    x,
                    y,
                });
                homes.push(mk(id, PlaceKind::Home, x, y)?);
            } else {
                let id = format!("venue-{}", k - cfg.n_users);
                aps.push(AccessPoint {
                    id: format!("ap-{id}"),
                    x,
                    y,
                });
                venues.push(mk(id, PlaceKind::Venue, x, y)?);
            }
        }

        // Points on two rays at least `gap` apart in angle are at least
        // `r sin(gap)` apart once both radii exceed `r`.
        let gap = (2.0 * PI / cfg.n_users as f64).min(PI / 2.0);
        let corridor_r = (2.0 * ring_r + 2.0 * reach + 1000.0).max((cfg.radio.bt_range_m + 100.0) / gap.sin());
        Ok(World {
            center,
            places,
            aps,
            homes,
            classrooms,
            venues,
            corridor_radius_m: corridor_r,
            n_users: cfg.n_users,
        })
    }

    /// Position of `user` at step `k` of a transit run.
    pub fn corridor(&self, user: usize, k: usize) -> (f64, f64) {
        let (ux, uy) = ring_point(1.0, user, self.n_users);
        let r = self.corridor_radius_m + k as f64 * CORRIDOR_STEP_M;
        (ux * r, uy * r)
    }

    pub fn to_geo(&self, x: f64, y: f64) -> Result<GeoPoint> {
        self.center.offset(y, x)
    }
}
