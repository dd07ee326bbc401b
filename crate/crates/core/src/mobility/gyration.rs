use crate::error::{Error, Result};
use crate::geo::{centroid, haversine, GeoPoint};

/// Radius of gyration in kilometres: the root-mean-square haversine
/// distance of the points from their lat/lon centroid.
pub fn radius_of_gyration(points: &[GeoPoint]) -> Result<f64> {
    let cm = centroid(points).ok_or_else(|| Error::EmptyInput("no usable fixes".into()))?;
    let ms = points
        .iter()
        .map(|p| haversine(*p, cm).powi(2))
        .sum::<f64>()
        / points.len() as f64;
    Ok(ms.sqrt() / 1000.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::EARTH_RADIUS_M;
    use proptest::prelude::*;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn single_fix_is_zero() {
        assert_eq!(radius_of_gyration(&[p(55.7, 12.5)]).unwrap(), 0.0);
    }

    #[test]
    fn two_fixes_one_km_apart_on_meridian() {
        let dlat = (1000.0 / EARTH_RADIUS_M).to_degrees();
        let rg = radius_of_gyration(&[p(55.0, 12.0), p(55.0 + dlat, 12.0)]).unwrap();
        assert!((rg - 0.5).abs() / 0.5 < 1e-9);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(radius_of_gyration(&[]), Err(Error::EmptyInput(_))));
    }

    fn arb_points() -> impl Strategy<Value = Vec<GeoPoint>> {
        proptest::collection::vec((55.0f64..56.0, 12.0f64..13.0), 1..20)
            .prop_map(|v| v.into_iter().map(|(a, b)| p(a, b)).collect())
    }

    proptest! {
        #[test]
        fn permutation_invariant(mut pts in arb_points(), seed in any::<u64>()) {
            let before = radius_of_gyration(&pts).unwrap();
            let k = (seed as usize) % pts.len();
            pts.rotate_left(k);
            pts.reverse();
            let after = radius_of_gyration(&pts).unwrap();
            prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
        }

        #[test]
        fn adding_centroid_never_increases(pts in arb_points()) {
            let before = radius_of_gyration(&pts).unwrap();
            let mut more = pts.clone();
            more.push(centroid(&pts).unwrap());
            prop_assert!(radius_of_gyration(&more).unwrap() <= before + 1e-12);
        }

        #[test]
        fn zero_iff_all_coincide(pts in arb_points()) {
            let rg = radius_of_gyration(&pts).unwrap();
            let same = pts.iter().all(|q| *q == pts[0]);
            prop_assert_eq!(rg == 0.0, same);
        }
    }
}
