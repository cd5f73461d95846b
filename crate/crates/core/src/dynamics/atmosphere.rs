//! Harris–Priester density table (mean of the diurnal minimum and maximum).

/// Altitude (km), minimum and maximum density (g/km³, i.e. 1e-12 kg/m³).
const TABLE: [(f64, f64, f64); 50] = [
    (100.0, 497_400.0, 497_400.0),
    (120.0, 24_900.0, 24_900.0),
    (130.0, 8377.0, 8710.0),
    (140.0, 3899.0, 4059.0),
    (150.0, 2122.0, 2215.0),
    (160.0, 1263.0, 1344.0),
    (170.0, 800.8, 875.8),
    (180.0, 528.3, 601.0),
    (190.0, 361.7, 429.7),
    (200.0, 255.7, 316.2),
    (210.0, 183.9, 239.6),
    (220.0, 134.1, 185.3),
    (230.0, 99.49, 145.5),
    (240.0, 74.88, 115.7),
    (250.0, 57.09, 93.08),
    (260.0, 44.03, 75.55),
    (270.0, 34.30, 61.82),
    (280.0, 26.97, 50.95),
    (290.0, 21.39, 42.26),
    (300.0, 17.08, 35.26),
    (320.0, 10.99, 25.11),
    (340.0, 7.214, 18.19),
    (360.0, 4.824, 13.37),
    (380.0, 3.274, 9.955),
    (400.0, 2.249, 7.492),
    (420.0, 1.558, 5.684),
    (440.0, 1.091, 4.355),
    (460.0, 0.7701, 3.362),
    (480.0, 0.5474, 2.612),
    (500.0, 0.3916, 2.042),
    (520.0, 0.2819, 1.605),
    (540.0, 0.2042, 1.267),
    (560.0, 0.1488, 1.005),
    (580.0, 0.1092, 0.7997),
    (600.0, 0.08070, 0.6390),
    (620.0, 0.06012, 0.5123),
    (640.0, 0.04519, 0.4121),
    (660.0, 0.03430, 0.3325),
    (680.0, 0.02632, 0.2691),
    (700.0, 0.02043, 0.2185),
    (720.0, 0.01607, 0.1779),
    (740.0, 0.01281, 0.1452),
    (760.0, 0.01036, 0.1190),
    (780.0, 0.008496, 0.09776),
    (800.0, 0.007069, 0.08059),
    (840.0, 0.004680, 0.05741),
    (880.0, 0.003200, 0.04210),
    (920.0, 0.002210, 0.03130),
    (960.0, 0.001560, 0.02360),
    (1000.0, 0.001150, 0.01810),
];

pub const MIN_ALTITUDE: f64 = 100.0;
pub const MAX_ALTITUDE: f64 = 1000.0;

/// Density lookup result; `clamped` is set when the altitude fell outside the
/// table and the end value was used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensitySample {
    pub rho: f64,
    pub clamped: bool,
}

/// Density (kg/m³) at `altitude` km with exponential interpolation between
/// table rows. Altitudes outside the table are clamped to its ends.
pub fn density_sample(altitude: f64) -> DensitySample {
    let clamped = !(MIN_ALTITUDE..=MAX_ALTITUDE).contains(&altitude);
    let h = altitude.clamp(MIN_ALTITUDE, MAX_ALTITUDE);
    let j = TABLE
        .partition_point(|row| row.0 <= h)
        .clamp(1, TABLE.len() - 1);
    let (h0, lo0, hi0) = TABLE[j - 1];
    let (h1, lo1, hi1) = TABLE[j];
    let s = (h - h0) / (h1 - h0);
    let lo = lo0 * (lo1 / lo0).powf(s);
    let hi = hi0 * (hi1 / hi0).powf(s);
    DensitySample {
        rho: 0.5 * (lo + hi) * 1e-12,
        clamped,
    }
}

/// Density (kg/m³) at `altitude` km; logs a warning when clamping.
pub fn atmospheric_density(altitude: f64) -> f64 {
    let s = density_sample(altitude);
    if s.clamped {
        log::warn!("altitude {altitude:.1} km outside density table, clamped");
    }
    s.rho
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_nodes_are_reproduced() {
        // 400 km row: (2.249 + 7.492)/2 g/km³.
        let rho = atmospheric_density(400.0);
        assert!((rho - 0.5 * (2.249 + 7.492) * 1e-12).abs() < 1e-24);
    }

    #[test]
    fn band_and_monotonicity() {
        let r350 = atmospheric_density(350.0);
        assert!((1e-12..=1e-10).contains(&r350));
        assert!(atmospheric_density(1000.0) < r350);
        assert!(atmospheric_density(200.0) > r350);
        let mut prev = f64::INFINITY;
        let mut h = 100.0;
        while h <= 1000.0 {
            let r = atmospheric_density(h);
            assert!(r <= prev);
            prev = r;
            h += 0.7;
        }
    }

    #[test]
    fn clamping_is_flagged() {
        assert!(density_sample(1200.0).clamped);
        assert_eq!(density_sample(1200.0).rho, density_sample(1000.0).rho);
        assert!(density_sample(50.0).clamped);
        assert!(!density_sample(500.0).clamped);
    }
}
