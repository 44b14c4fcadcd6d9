//! Synthetic typical-year weather from monthly site statistics.
//!
//! Hourly global horizontal irradiance is the extraterrestrial profile
//! scaled by the monthly clearness index and a daily cloud factor, then
//! capped at the Haurwitz clear-sky bound. Time is local solar time.

use std::f64::consts::PI;

use rand_distr::{Beta, Distribution, Weibull};
use serde::Deserialize;

use crate::error::{domain, Error, Result};
use crate::stats::stream_rng;

pub const SOLAR_CONSTANT: f64 = 1361.0;
pub const HOURS_PER_YEAR: usize = 8760;
pub const DAYS_PER_YEAR: usize = 365;
pub const DAYS_IN_MONTH: [usize; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

const HAURWITZ_A: f64 = 1098.0;
const HAURWITZ_B: f64 = 0.057;
const DIURNAL_SWING_C: f64 = 5.0;
const PEAK_TEMP_HOUR: f64 = 15.0;
const CLOUD_BETA: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SiteClimate {
    pub name: String,
    pub lat_deg: f64,
    /// Published long-term annual GHI, kWh/m².
    pub published_ghi: f64,
    pub kt: [f64; 12],
    pub wind_ms: [f64; 12],
    pub temp_c: [f64; 12],
}

impl SiteClimate {
    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.lat_deg) {
            return Err(domain(format!("{}: latitude out of range", self.name)));
        }
        if self.kt.iter().any(|k| !(*k > 0.0 && *k < 1.0)) {
            return Err(domain(format!("{}: clearness must lie in (0, 1)", self.name)));
        }
        if self.wind_ms.iter().any(|w| !(*w > 0.0)) {
            return Err(domain(format!("{}: monthly wind must be positive", self.name)));
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct SiteRow {
    name: String,
    lat: f64,
    published_ghi: f64,
    #[serde(flatten)]
    monthly: std::collections::HashMap<String, f64>,
}

fn monthly(row: &SiteRow, prefix: &str) -> Result<[f64; 12]> {
    let mut out = [0.0; 12];
    for (m, slot) in out.iter_mut().enumerate() {
        let key = format!("{prefix}_{:02}", m + 1);
        *slot = *row.monthly.get(&key).ok_or_else(|| Error::Parse {
            location: row.name.clone(),
            message: format!("missing column {key}"),
        })?;
    }
    Ok(out)
}

pub fn load_sites(csv_text: &str) -> Result<Vec<SiteClimate>> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: SiteRow = row?;
        let site = SiteClimate {
            kt: monthly(&row, "kt")?,
            wind_ms: monthly(&row, "wind")?,
            temp_c: monthly(&row, "temp")?,
            name: row.name,
            lat_deg: row.lat,
            published_ghi: row.published_ghi,
        };
        site.validate()?;
        out.push(site);
    }
    Ok(out)
}

pub fn bundled_sites() -> Vec<SiteClimate> {
    load_sites(crate::data::SITES_CSV).expect("bundled site table parses")
}

pub fn bundled_site(name: &str) -> Result<SiteClimate> {
    bundled_sites()
        .into_iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Unknown {
            kind: "site",
            name: name.to_string(),
        })
}

/// Cooper declination for day of year `n` in 1..=365, degrees.
pub fn solar_declination_deg(n: u32) -> f64 {
    23.45 * (2.0 * PI * (284.0 + n as f64) / 365.0).sin()
}

pub fn cos_zenith(lat_deg: f64, day: u32, solar_hour: f64) -> f64 {
    let phi = lat_deg.to_radians();
    let delta = solar_declination_deg(day).to_radians();
    let omega = (15.0 * (solar_hour - 12.0)).to_radians();
    phi.sin() * delta.sin() + phi.cos() * delta.cos() * omega.cos()
}

/// Extraterrestrial irradiance on a horizontal plane, W/m².
pub fn extraterrestrial_horizontal(lat_deg: f64, day: u32, solar_hour: f64) -> f64 {
    let cz = cos_zenith(lat_deg, day, solar_hour);
    if cz <= 0.0 {
        return 0.0;
    }
    let e0 = 1.0 + 0.033 * (2.0 * PI * day as f64 / 365.0).cos();
    SOLAR_CONSTANT * e0 * cz
}

pub fn haurwitz_clearsky(zenith_rad: f64) -> f64 {
    haurwitz_from_cos(zenith_rad.cos())
}

fn haurwitz_from_cos(cz: f64) -> f64 {
    if cz <= 0.0 {
        return 0.0;
    }
    HAURWITZ_A * cz * (-HAURWITZ_B / cz).exp()
}

pub fn month_of_day(day_index: usize) -> usize {
    let mut d = day_index % DAYS_PER_YEAR;
    for (m, len) in DAYS_IN_MONTH.iter().enumerate() {
        if d < *len {
            return m;
        }
        d -= len;
    }
    11
}

#[derive(Debug, Clone, PartialEq)]
pub struct HourlyWeather {
    pub site: String,
    pub ghi_w_m2: Vec<f64>,
    pub wind_ms: Vec<f64>,
    pub temp_c: Vec<f64>,
}

impl HourlyWeather {
    pub fn annual_ghi_kwh_m2(&self) -> f64 {
        self.ghi_w_m2.iter().sum::<f64>() / 1000.0
    }

    pub fn daily_ghi_wh_m2(&self) -> Vec<f64> {
        self.ghi_w_m2.chunks(24).map(|d| d.iter().sum()).collect()
    }

    /// A year with no sun and no wind at a constant 20 °C.
    pub fn calm_dark(site: &str) -> Self {
        Self {
            site: site.to_string(),
            ghi_w_m2: vec![0.0; HOURS_PER_YEAR],
            wind_ms: vec![0.0; HOURS_PER_YEAR],
            temp_c: vec![20.0; HOURS_PER_YEAR],
        }
    }
}

/// Day-level cloud factors, 2·Beta(4,4), one per day.
pub fn cloud_factors(seed: u64) -> Vec<f64> {
    let beta = Beta::new(CLOUD_BETA, CLOUD_BETA).expect("valid beta parameters");
    let mut rng = stream_rng(seed, 0);
    (0..DAYS_PER_YEAR).map(|_| 2.0 * beta.sample(&mut rng)).collect()
}

pub fn synthesize_year(site: &SiteClimate, seed: u64) -> Result<HourlyWeather> {
    site.validate()?;
    let clouds = cloud_factors(seed);
    let mut wind_rng = stream_rng(seed, 1);
    let gamma_1_5 = 0.886_226_925_452_758;
    let weibulls: Vec<Weibull<f64>> = site
        .wind_ms
        .iter()
        .map(|m| Weibull::new(m / gamma_1_5, 2.0).expect("valid weibull parameters"))
        .collect();

    let mut ghi = Vec::with_capacity(HOURS_PER_YEAR);
    let mut wind = Vec::with_capacity(HOURS_PER_YEAR);
    let mut temp = Vec::with_capacity(HOURS_PER_YEAR);
    for (d, cloud) in clouds.iter().enumerate() {
        let month = month_of_day(d);
        let day = d as u32 + 1;
        for h in 0..24 {
            let solar_hour = h as f64 + 0.5;
            let cz = cos_zenith(site.lat_deg, day, solar_hour);
            let g = if cz > 0.0 {
                let toa = extraterrestrial_horizontal(site.lat_deg, day, solar_hour);
                (site.kt[month] * cloud * toa).min(haurwitz_from_cos(cz))
            } else {
                0.0
            };
            ghi.push(g);
            wind.push(weibulls[month].sample(&mut wind_rng));
            let phase = 2.0 * PI * (solar_hour - PEAK_TEMP_HOUR) / 24.0;
            temp.push(site.temp_c[month] + DIURNAL_SWING_C * phase.cos());
        }
    }
    Ok(HourlyWeather {
        site: site.name.clone(),
        ghi_w_m2: ghi,
        wind_ms: wind,
        temp_c: temp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn declination_hand_values() {
        assert!(solar_declination_deg(81).abs() < 0.5);
        assert_relative_eq!(solar_declination_deg(172), 23.45, epsilon = 0.01);
        for n in 1..=365 {
            assert!(solar_declination_deg(n).abs() <= 23.45 + 1e-12);
        }
    }

    #[test]
    fn haurwitz_zenith() {
        // 1098·exp(-0.057)
        assert_relative_eq!(haurwitz_clearsky(0.0), 1037.16, epsilon = 0.01);
        assert_eq!(haurwitz_clearsky(PI / 2.0 + 0.01), 0.0);
        let mut last = f64::INFINITY;
        for i in 0..90 {
            let g = haurwitz_clearsky((i as f64).to_radians());
            assert!(g < last);
            last = g;
        }
    }

    #[test]
    fn months_cover_year() {
        assert_eq!(month_of_day(0), 0);
        assert_eq!(month_of_day(31), 1);
        assert_eq!(month_of_day(364), 11);
        assert_eq!(DAYS_IN_MONTH.iter().sum::<usize>(), DAYS_PER_YEAR);
    }

    #[test]
    fn cloud_factor_mean_is_one() {
        let c = cloud_factors(11);
        let many: Vec<f64> = (0..24).flat_map(cloud_factors).collect();
        assert!(c.iter().all(|x| (0.0..=2.0).contains(x)));
        let m = many.iter().sum::<f64>() / many.len() as f64;
        assert!((m - 1.0).abs() < 0.02, "{m}");
    }
}
