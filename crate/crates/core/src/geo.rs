//! Spherical-earth geodesy helpers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius used throughout.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::invalid(format!("latitude {lat} outside [-90, 90]")));
        }
        if !(-180.0..=180.0).contains(&lon) {
            return Err(Error::invalid(format!(
                "longitude {lon} outside [-180, 180]"
            )));
        }
        Ok(GeoPoint { lat, lon })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    /// Point `north_m` / `east_m` metres away on a local tangent plane.
    pub fn offset(&self, north_m: f64, east_m: f64) -> Result<Self> {
        let dlat = (north_m / EARTH_RADIUS_M).to_degrees();
        let dlon = (east_m / (EARTH_RADIUS_M * self.lat.to_radians().cos())).to_degrees();
        GeoPoint::new(self.lat + dlat, self.lon + dlon)
    }
}

/// Great-circle distance in metres.
pub fn haversine(a: GeoPoint, b: GeoPoint) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// Arithmetic mean of latitudes and longitudes.
///
/// Adequate at campus/city scale; not meaningful across the antimeridian.
pub fn centroid(points: &[GeoPoint]) -> Option<GeoPoint> {
    if points.is_empty() {
        return None;
    }
    let n = points.len() as f64;
    let lat = points.iter().map(|p| p.lat).sum::<f64>() / n;
    let lon = points.iter().map(|p| p.lon).sum::<f64>() / n;
    Some(GeoPoint { lat, lon })
}

/// Equirectangular projection to metres around a fixed origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalProjection {
    origin: GeoPoint,
}

impl LocalProjection {
    pub fn new(origin: GeoPoint) -> Self {
        LocalProjection { origin }
    }

    pub fn origin(&self) -> GeoPoint {
        self.origin
    }

    /// `(x east, y north)` in metres.
    pub fn project(&self, p: GeoPoint) -> (f64, f64) {
        let x = (p.lon - self.origin.lon).to_radians()
            * self.origin.lat.to_radians().cos()
            * EARTH_RADIUS_M;
        let y = (p.lat - self.origin.lat).to_radians() * EARTH_RADIUS_M;
        (x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn rejects_out_of_range_and_nan() {
        assert!(GeoPoint::new(91.0, 0.0).is_err());
        assert!(GeoPoint::new(0.0, -180.5).is_err());
        assert!(GeoPoint::new(f64::NAN, 0.0).is_err());
        assert!(GeoPoint::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn identity_is_zero() {
        let a = p(55.78, 12.52);
        assert_eq!(haversine(a, a), 0.0);
    }

    #[test]
    fn antipodal_on_equator() {
        let d = haversine(p(0.0, 0.0), p(0.0, 180.0));
        assert!((d - std::f64::consts::PI * EARTH_RADIUS_M).abs() < 1e-6);
        assert!((d - 20_015_086.8).abs() < 1.0);
    }

    #[test]
    fn campus_scale_matches_independent_geodesic() {
        // Spherical law of cosines, evaluated independently, plus the
        // meridian arc length 0.01 deg * pi/180 * R = 1111.95 m.
        let (a, b) = (p(55.78, 12.52), p(55.79, 12.52));
        let d = haversine(a, b);
        let arc = 0.01f64.to_radians() * EARTH_RADIUS_M;
        assert!((d - arc).abs() / arc < 1e-9);
        // An ellipsoidal (WGS-84) calculator gives ~1113.6 m at this latitude.
        assert!((d - 1113.6).abs() / 1113.6 < 0.002);
        assert!((d - 1111.95).abs() / 1111.95 < 0.001);
    }

    #[test]
    fn offset_round_trips_distance() {
        let a = p(55.78, 12.52);
        let b = a.offset(300.0, 400.0).unwrap();
        assert!((haversine(a, b) - 500.0).abs() < 0.05);
    }

    fn arb_point() -> impl Strategy<Value = GeoPoint> {
        (-89.9f64..89.9, -179.9f64..179.9).prop_map(|(la, lo)| p(la, lo))
    }

    proptest! {
        #[test]
        fn symmetric_and_non_negative(a in arb_point(), b in arb_point()) {
            let (ab, ba) = (haversine(a, b), haversine(b, a));
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - ba).abs() <= 1e-6 * ab.max(1.0));
        }

        #[test]
        fn triangle_inequality(a in arb_point(), b in arb_point(), c in arb_point()) {
            let (ab, bc, ac) = (haversine(a, b), haversine(b, c), haversine(a, c));
            prop_assert!(ac <= (ab + bc) * (1.0 + 1e-6) + 1e-6);
        }
    }
}
