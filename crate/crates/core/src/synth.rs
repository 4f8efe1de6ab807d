//! Steady and non-steady ambient-space signal synthesis.
//!
//! A steady axis is a sum of constant-amplitude sinusoids plus a DC offset
//! (`lambda_offset + baseline`) and white sensor noise. Human presence adds
//! further sinusoids whose amplitude is transient: `a (1 + m sin(w_mod t))`
//! plus a per-sample Gaussian random amplitude, and additive white noise.
//!
//! Randomness comes from ChaCha8 streams. Every (sensor, axis, purpose)
//! triple gets its own stream derived from the run seed with SplitMix64, so
//! adding or removing a sensor never perturbs the others.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ingest::{Label, SensorSeries, DEFAULT_WINDOW};

/// Highest sample rate that still gives strictly increasing millisecond timestamps.
pub const MAX_SAMPLE_RATE_HZ: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinusoidSpec {
    pub amplitude_a: f64,
    /// Radians per second.
    pub frequency_omega: f64,
    #[serde(default)]
    pub phase: f64,
}

impl SinusoidSpec {
    /// Convenience constructor from a period in seconds.
    pub fn with_period(amplitude_a: f64, period_s: f64, phase: f64) -> Self {
        Self { amplitude_a, frequency_omega: TAU / period_s, phase }
    }

    fn validate(&self, ctx: &str) -> Result<()> {
        if !(self.amplitude_a >= 0.0 && self.amplitude_a.is_finite()) {
            return Err(Error::Config(format!("{ctx}: amplitude must be finite and >= 0")));
        }
        if !(self.frequency_omega > 0.0 && self.frequency_omega.is_finite()) {
            return Err(Error::Config(format!("{ctx}: frequency must be finite and > 0")));
        }
        if !(0.0..TAU).contains(&self.phase) {
            return Err(Error::Config(format!("{ctx}: phase must lie in [0, 2pi)")));
        }
        Ok(())
    }

    #[inline]
    fn eval(&self, t: f64) -> f64 {
        (self.frequency_omega * t + self.phase).sin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub sinusoids: Vec<SinusoidSpec>,
    #[serde(default)]
    pub lambda_offset: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    #[serde(default)]
    pub sensor_noise_sigma: f64,
}

impl SpaceConfig {
    /// `floor(duration_s * sample_rate_hz)`, tolerant of representation error.
    pub fn n_samples(&self) -> usize {
        (self.duration_s * self.sample_rate_hz + 1e-9).floor() as usize
    }

    fn validate(&self, ctx: &str) -> Result<()> {
        if self.sinusoids.is_empty() {
            return Err(Error::Config(format!("{ctx}: at least one sinusoid is required")));
        }
        for (i, s) in self.sinusoids.iter().enumerate() {
            s.validate(&format!("{ctx} sinusoid {i}"))?;
        }
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz <= MAX_SAMPLE_RATE_HZ) {
            return Err(Error::Config(format!(
                "{ctx}: sample_rate_hz must lie in (0, {MAX_SAMPLE_RATE_HZ}]"
            )));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(Error::Config(format!("{ctx}: duration_s must be > 0")));
        }
        if !(self.sensor_noise_sigma >= 0.0 && self.lambda_offset.is_finite()) {
            return Err(Error::Config(format!("{ctx}: noise sigma must be >= 0, lambda finite")));
        }
        Ok(())
    }
}

fn default_axis_gain() -> [f64; 3] {
    [1.0; 3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HumanConfig {
    pub extra_sinusoids: Vec<SinusoidSpec>,
    pub modulation_depth_m: f64,
    /// Radians per second.
    pub modulation_freq: f64,
    #[serde(default)]
    pub random_amplitude_sigma: f64,
    #[serde(default)]
    pub noise_sigma_h: f64,
    /// Per-axis multiplier on the human component; scalar sensors use `[1, 0, 0]`.
    #[serde(default = "default_axis_gain")]
    pub axis_gain: [f64; 3],
}

impl HumanConfig {
    fn validate(&self, ctx: &str) -> Result<()> {
        if self.extra_sinusoids.is_empty() {
            return Err(Error::Config(format!("{ctx}: human config needs at least one sinusoid")));
        }
        for (i, s) in self.extra_sinusoids.iter().enumerate() {
            s.validate(&format!("{ctx} human sinusoid {i}"))?;
        }
        if !(0.0..=1.0).contains(&self.modulation_depth_m) {
            return Err(Error::Config(format!("{ctx}: modulation_depth_m must lie in [0, 1]")));
        }
        if !(self.modulation_freq > 0.0 && self.modulation_freq.is_finite()) {
            return Err(Error::Config(format!("{ctx}: modulation_freq must be > 0")));
        }
        if !(self.random_amplitude_sigma >= 0.0 && self.noise_sigma_h >= 0.0) {
            return Err(Error::Config(format!("{ctx}: human sigmas must be >= 0")));
        }
        if self.axis_gain.iter().any(|g| !g.is_finite()) {
            return Err(Error::Config(format!("{ctx}: axis_gain must be finite")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorProfile {
    pub sensor_id: String,
    #[serde(default)]
    pub baseline: [f64; 3],
    /// Steady-space model of the X, Y and Z axes.
    pub axes: [SpaceConfig; 3],
    #[serde(default)]
    pub human: Option<HumanConfig>,
}

impl SensorProfile {
    pub fn validate(&self) -> Result<()> {
        let id = &self.sensor_id;
        if id.is_empty() || id.contains(',') || id.contains('@') {
            return Err(Error::Config(format!(
                "invalid sensor_id {id:?} (must be non-empty, without ',' or '@')"
            )));
        }
        for (axis, cfg) in self.axes.iter().enumerate() {
            cfg.validate(&format!("sensor {id} axis {}", AXIS_NAMES[axis]))?;
        }
        let rate = self.axes[0].sample_rate_hz;
        if self.axes.iter().any(|a| a.sample_rate_hz != rate) {
            return Err(Error::Config(format!("sensor {id}: all axes must share one sample rate")));
        }
        if let Some(h) = &self.human {
            h.validate(&format!("sensor {id}"))?;
        }
        Ok(())
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.axes[0].sample_rate_hz
    }

    /// Copy of this profile with every axis' duration replaced.
    pub fn with_duration(&self, duration_s: f64) -> Self {
        let mut p = self.clone();
        for a in &mut p.axes {
            a.duration_s = duration_s;
        }
        p
    }
}

pub const AXIS_NAMES: [&str; 3] = ["X", "Y", "Z"];

// ---------------------------------------------------------------------------
// Seeding

#[derive(Debug, Clone, Copy)]
#[repr(u64)]
enum Stream {
    SensorNoise = 1,
    RandomAmplitude = 2,
    HumanNoise = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn stream_rng(seed: u64, sensor: &str, axis: usize, stream: Stream) -> ChaCha8Rng {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ fnv1a64(sensor.as_bytes()));
    h = splitmix64(h ^ (axis as u64 + 1));
    h = splitmix64(h ^ stream as u64);
    ChaCha8Rng::seed_from_u64(h)
}

fn normal(sigma: f64) -> Normal<f64> {
    // sigma is validated >= 0 and finite
    Normal::new(0.0, sigma).expect("validated sigma")
}

fn timestamp_ms(k: usize, rate: f64) -> u64 {
    (k as f64 * 1000.0 / rate).round() as u64
}

// ---------------------------------------------------------------------------
// Rendering

/// Renders `n` samples; the human component (if any) is active for sample
/// indices `>= human_from`.
fn render(
    profile: &SensorProfile,
    human: Option<&HumanConfig>,
    human_from: usize,
    n: usize,
    seed: u64,
) -> SensorSeries {
    let rate = profile.sample_rate_hz();
    let mut out = SensorSeries::with_capacity(profile.sensor_id.as_str(), n);
    out.timestamps.extend((0..n).map(|k| timestamp_ms(k, rate)));

    for axis in 0..3 {
        let cfg = &profile.axes[axis];
        let dc = cfg.lambda_offset + profile.baseline[axis];
        let mut noise_rng = stream_rng(seed, &profile.sensor_id, axis, Stream::SensorNoise);
        let sensor_noise = normal(cfg.sensor_noise_sigma);
        let mut human_parts = human.map(|h| {
            (
                h,
                stream_rng(seed, &profile.sensor_id, axis, Stream::RandomAmplitude),
                stream_rng(seed, &profile.sensor_id, axis, Stream::HumanNoise),
                normal(h.random_amplitude_sigma),
                normal(h.noise_sigma_h),
            )
        });

        let values = match axis {
            0 => &mut out.x,
            1 => &mut out.y,
            _ => &mut out.z,
        };
        values.reserve(n);
        for k in 0..n {
            let t = k as f64 / rate;
            let mut v: f64 = cfg.sinusoids.iter().map(|s| s.amplitude_a * s.eval(t)).sum();
            let mut h_noise = 0.0;
            if let Some((h, amp_rng, h_rng, amp_dist, h_dist)) = human_parts.as_mut() {
                if k >= human_from {
                    let gain = h.axis_gain[axis];
                    let envelope = 1.0 + h.modulation_depth_m * (h.modulation_freq * t).sin();
                    for s in &h.extra_sinusoids {
                        let gamma = s.amplitude_a * envelope + amp_dist.sample(amp_rng);
                        v += gain * (gamma * s.eval(t));
                    }
                    h_noise = gain * h_dist.sample(h_rng);
                }
            }
            values.push(v + dc + sensor_noise.sample(&mut noise_rng) + h_noise);
        }
    }
    out
}

fn checked_len(profile: &SensorProfile) -> Result<usize> {
    profile.validate()?;
    let n = profile.axes[0].n_samples();
    if profile.axes.iter().any(|a| a.n_samples() != n) {
        return Err(Error::Config(format!(
            "sensor {}: all axes must share one duration",
            profile.sensor_id
        )));
    }
    if n < DEFAULT_WINDOW {
        return Err(Error::Config(format!(
            "sensor {}: duration x sample rate gives {n} samples, fewer than one {DEFAULT_WINDOW}-reading window",
            profile.sensor_id
        )));
    }
    Ok(n)
}

/// Steady-space series of `profile` (its HumanConfig, if any, is ignored).
pub fn gen_steady(profile: &SensorProfile, seed: u64) -> Result<SensorSeries> {
    let n = checked_len(profile)?;
    Ok(render(profile, None, 0, n, seed))
}

/// Non-steady series: the steady model of `profile` perturbed by `human` over
/// the whole duration.
pub fn gen_nonsteady(profile: &SensorProfile, human: &HumanConfig, seed: u64) -> Result<SensorSeries> {
    let n = checked_len(profile)?;
    human.validate(&format!("sensor {}", profile.sensor_id))?;
    Ok(render(profile, Some(human), 0, n, seed))
}

/// Generated multi-sensor log plus its window label sidecar.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub series: Vec<SensorSeries>,
    pub labels: Vec<(usize, Label)>,
}

/// Generates a control phase of `n_control_windows` windows followed by a
/// near phase of `n_near_windows` windows for every sensor.
///
/// Timestamps and signal time run continuously across the phase boundary.
/// Sensors without a HumanConfig stay steady during the near phase.
pub fn gen_dataset(
    profiles: &[SensorProfile],
    n_control_windows: usize,
    n_near_windows: usize,
    window: usize,
    seed: u64,
    exec: Exec,
) -> Result<Dataset> {
    if profiles.is_empty() {
        return Err(Error::Config("no sensor profiles given".into()));
    }
    if n_control_windows + n_near_windows == 0 {
        return Err(Error::Config("at least one window must be requested".into()));
    }
    if window == 0 {
        return Err(Error::Config("window length must be positive".into()));
    }
    for (i, p) in profiles.iter().enumerate() {
        p.validate()?;
        if profiles[..i].iter().any(|q| q.sensor_id == p.sensor_id) {
            return Err(Error::Config(format!("duplicate sensor_id {}", p.sensor_id)));
        }
    }
    let human_from = n_control_windows * window;
    let n = (n_control_windows + n_near_windows) * window;
    let series = exec.map(profiles, |p| render(p, p.human.as_ref(), human_from, n, seed));
    let labels = (0..n_control_windows)
        .map(|k| (k, Label::Control))
        .chain((n_control_windows..n_control_windows + n_near_windows).map(|k| (k, Label::Near)))
        .collect();
    Ok(Dataset { series, labels })
}

// ---------------------------------------------------------------------------
// Default synthetic environment

/// Default sample rate: 10 Hz, about 6000 readings per 10-minute phase.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 10.0;
pub const DEFAULT_DURATION_S: f64 = 600.0;

/// The nine default sensors, in generation order.
pub const DEFAULT_SENSORS: [&str; 9] = [
    "accelerometer",
    "gravity",
    "gyroscope",
    "humidity",
    "light",
    "magnetometer",
    "pressure",
    "rotation-vector",
    "temperature",
];

struct Preset {
    id: &'static str,
    baseline: [f64; 3],
    /// Steady tone (amplitude, period s) shared by the active axes.
    tone: (f64, f64),
    noise: f64,
    /// Active axes; scalar sensors report X only.
    axes: [bool; 3],
    /// Human tone (amplitude, period s), modulation depth, random-amplitude
    /// sigma and additive noise sigma.
    human: Option<((f64, f64), f64, f64, f64)>,
}

const PRESETS: [Preset; 9] = [
    Preset {
        id: "accelerometer",
        baseline: [0.05, 0.21, 9.78],
        tone: (0.004, 45.0),
        noise: 0.012,
        axes: [true; 3],
        human: Some(((0.0028, 1.6), 0.6, 0.002, 0.001)),
    },
    Preset {
        id: "gravity",
        baseline: [0.05, 0.21, 9.79],
        tone: (0.001, 90.0),
        noise: 0.002,
        axes: [true; 3],
        human: Some(((0.00056, 2.5), 0.5, 0.0003, 0.0002)),
    },
    Preset {
        id: "gyroscope",
        baseline: [0.0, 0.0, 0.0],
        tone: (0.0005, 30.0),
        noise: 0.002,
        axes: [true; 3],
        human: None,
    },
    Preset {
        id: "humidity",
        baseline: [55.0, 0.0, 0.0],
        tone: (0.3, 400.0),
        noise: 0.05,
        axes: [true, false, false],
        human: Some(((0.014, 8.0), 0.3, 0.005, 0.004)),
    },
    Preset {
        id: "light",
        baseline: [320.0, 0.0, 0.0],
        tone: (2.0, 120.0),
        noise: 1.0,
        axes: [true, false, false],
        human: Some(((0.5, 6.0), 0.8, 0.2, 0.1)),
    },
    Preset {
        id: "magnetometer",
        baseline: [-12.5, 31.0, -40.2],
        tone: (0.2, 75.0),
        noise: 0.3,
        axes: [true; 3],
        human: Some(((0.042, 3.0), 0.5, 0.02, 0.02)),
    },
    Preset {
        id: "pressure",
        baseline: [1008.6, 0.0, 0.0],
        tone: (0.05, 300.0),
        noise: 0.01,
        axes: [true, false, false],
        human: None,
    },
    Preset {
        id: "rotation-vector",
        baseline: [0.01, 0.02, 0.70],
        tone: (0.0002, 60.0),
        noise: 0.0005,
        axes: [true; 3],
        human: Some(((0.00014, 2.0), 0.5, 0.00008, 0.00005)),
    },
    Preset {
        id: "temperature",
        baseline: [24.5, 0.0, 0.0],
        tone: (0.05, 500.0),
        noise: 0.02,
        axes: [true, false, false],
        human: Some(((0.0056, 10.0), 0.4, 0.003, 0.002)),
    },
];

/// The built-in nine-sensor environment. Amplitudes, periods and noise
/// levels are synthetic, chosen to resemble typical phone sensor ranges;
/// human presence perturbs seven of the nine sensors (gyroscope and
/// pressure carry no human signal).
pub fn default_profiles() -> Vec<SensorProfile> {
    PRESETS
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let axis = |a: usize| {
                let on = p.axes[a];
                let phase = (0.7 * (i + 3 * a) as f64) % TAU;
                SpaceConfig {
                    sinusoids: vec![SinusoidSpec::with_period(
                        if on { p.tone.0 } else { 0.0 },
                        p.tone.1,
                        phase,
                    )],
                    lambda_offset: 0.0,
                    sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
                    duration_s: DEFAULT_DURATION_S,
                    sensor_noise_sigma: if on { p.noise } else { 0.0 },
                }
            };
            let human = p.human.map(|((a, period), m, g, h)| HumanConfig {
                extra_sinusoids: vec![SinusoidSpec::with_period(a, period, 0.0)],
                modulation_depth_m: m,
                modulation_freq: TAU / 20.0,
                random_amplitude_sigma: g,
                noise_sigma_h: h,
                axis_gain: p.axes.map(|on| if on { 1.0 } else { 0.0 }),
            });
            SensorProfile {
                sensor_id: p.id.to_string(),
                baseline: p.baseline,
                axes: [axis(0), axis(1), axis(2)],
                human,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(a: f64, omega: f64, lambda: f64, rate: f64, dur: f64, noise: f64) -> SensorProfile {
        let axis = SpaceConfig {
            sinusoids: vec![SinusoidSpec { amplitude_a: a, frequency_omega: omega, phase: 0.0 }],
            lambda_offset: lambda,
            sample_rate_hz: rate,
            duration_s: dur,
            sensor_noise_sigma: noise,
        };
        SensorProfile {
            sensor_id: "s".into(),
            baseline: [0.0; 3],
            axes: [axis.clone(), axis.clone(), axis],
            human: None,
        }
    }

    fn human(m: f64, g: f64, h: f64) -> HumanConfig {
        HumanConfig {
            extra_sinusoids: vec![SinusoidSpec { amplitude_a: 2.0, frequency_omega: 3.0, phase: 0.5 }],
            modulation_depth_m: m,
            modulation_freq: 0.25,
            random_amplitude_sigma: g,
            noise_sigma_h: h,
            axis_gain: [1.0; 3],
        }
    }

    #[test]
    fn zero_amplitude_is_constant() {
        let s = gen_steady(&single(0.0, 1.0, 5.0, 10.0, 60.0, 0.0), 1).unwrap();
        assert_eq!(s.len(), 600);
        assert!(s.x.iter().chain(&s.y).chain(&s.z).all(|&v| v == 5.0));
    }

    #[test]
    fn unit_sinusoid_samples() {
        let s = gen_steady(&single(1.0, TAU, 0.0, 8.0, 64.0, 0.0), 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [0.0, h, 1.0, h, 0.0, -h, -1.0, -h, 0.0];
        for (v, e) in s.x.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12, "{v} vs {e}");
        }
        assert_eq!(&s.timestamps[..3], &[0, 125, 250]);
    }

    #[test]
    fn too_short_names_sensor() {
        let err = gen_steady(&single(1.0, 1.0, 0.0, 10.0, 51.1, 0.0), 1).unwrap_err();
        assert!(matches!(&err, Error::Config(m) if m.contains("sensor s")), "{err}");
        assert!(gen_steady(&single(1.0, 1.0, 0.0, 10.0, 51.2, 0.0), 1).is_ok());
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut p = single(1.0, 1.0, 0.0, 10.0, 60.0, 0.0);
        p.axes[0].sinusoids[0].phase = TAU;
        assert!(gen_steady(&p, 0).is_err());
        let p = single(-1.0, 1.0, 0.0, 10.0, 60.0, 0.0);
        assert!(gen_steady(&p, 0).is_err());
        let p = single(1.0, 1.0, 0.0, 2000.0, 60.0, 0.0);
        assert!(gen_steady(&p, 0).is_err());
        let p = single(1.0, 1.0, 0.0, 10.0, 60.0, 0.0);
        assert!(gen_nonsteady(&p, &human(1.5, 0.0, 0.0), 0).is_err());
    }

    #[test]
    fn nonsteady_reduces_to_merged_steady() {
        let mut p = single(1.0, 0.7, 2.0, 10.0, 60.0, 0.3);
        p.baseline = [1.0, -2.0, 0.5];
        let h = human(0.0, 0.0, 0.0);
        let ns = gen_nonsteady(&p, &h, 9).unwrap();
        let mut merged = p.clone();
        for a in &mut merged.axes {
            a.sinusoids.extend(h.extra_sinusoids.iter().copied());
        }
        let st = gen_steady(&merged, 9).unwrap();
        assert_eq!(ns, st);
    }

    #[test]
    fn envelope_oscillates_between_half_and_one_and_half() {
        // steady part zero, one human sinusoid with m = 0.5 and no noise
        let p = single(0.0, 1.0, 0.0, 1000.0, 40.0, 0.0);
        let mut h = human(0.5, 0.0, 0.0);
        h.extra_sinusoids[0] = SinusoidSpec { amplitude_a: 1.0, frequency_omega: 40.0, phase: 0.0 };
        h.modulation_freq = 0.2;
        let s = gen_nonsteady(&p, &h, 3).unwrap();
        // local peak magnitudes track the envelope
        let mut peaks = Vec::new();
        for k in 1..s.len() - 1 {
            let (a, b, c) = (s.x[k - 1].abs(), s.x[k].abs(), s.x[k + 1].abs());
            if b >= a && b >= c {
                peaks.push(b);
            }
        }
        let max = peaks.iter().cloned().fold(f64::MIN, f64::max);
        let min = peaks.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - 1.5).abs() < 0.01, "max {max}");
        assert!((min - 0.5).abs() < 0.02, "min {min}");
    }

    #[test]
    fn seeds_matter_when_noisy() {
        let p = single(1.0, 0.7, 0.0, 10.0, 60.0, 0.0);
        let h = human(0.3, 0.1, 0.1);
        let a = gen_nonsteady(&p, &h, 1).unwrap();
        let b = gen_nonsteady(&p, &h, 2).unwrap();
        assert_ne!(a.x, b.x);
        assert_eq!(a, gen_nonsteady(&p, &h, 1).unwrap());
    }

    #[test]
    fn steady_windows_share_mean() {
        // 512 samples at 64 Hz = 8 s, sinusoid period 2 s
        let p = single(3.0, TAU / 2.0, 1.0, 64.0, 32.0, 0.0);
        let s = gen_steady(&p, 0).unwrap();
        let means: Vec<f64> = s.x.chunks(512).map(|c| c.iter().sum::<f64>() / 512.0).collect();
        assert_eq!(means.len(), 4);
        for m in &means {
            assert!((m - means[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn dataset_shape_and_labels() {
        let profiles = default_profiles();
        let d = gen_dataset(&profiles, 3, 2, 512, 11, Exec::default()).unwrap();
        assert_eq!(d.series.len(), 9);
        assert!(d.series.iter().all(|s| s.len() == 5 * 512));
        assert_eq!(d.labels.iter().filter(|(_, l)| *l == Label::Control).count(), 3);
        assert_eq!(d.labels[3], (3, Label::Near));

        let one = gen_dataset(&profiles[..1], 1, 0, 512, 11, Exec::default()).unwrap();
        assert_eq!(one.series[0].len(), 512);
        assert_eq!(one.labels, vec![(0, Label::Control)]);

        assert!(gen_dataset(&[], 1, 1, 512, 0, Exec::default()).is_err());
    }

    #[test]
    fn control_phase_is_steady_prefix() {
        let profiles = default_profiles();
        let d = gen_dataset(&profiles, 2, 2, 512, 5, Exec::Sequential).unwrap();
        let p = profiles[0].with_duration(2.0 * 512.0 / DEFAULT_SAMPLE_RATE_HZ);
        let steady = gen_steady(&p, 5).unwrap();
        assert_eq!(&d.series[0].x[..1024], &steady.x[..]);
        assert_ne!(&d.series[0].x[1024..2048], &gen_steady(&profiles[0], 5).unwrap().x[1024..2048]);
    }

    #[test]
    fn adding_a_sensor_does_not_perturb_others() {
        let profiles = default_profiles();
        let a = gen_dataset(&profiles[..2], 1, 1, 512, 5, Exec::default()).unwrap();
        let b = gen_dataset(&profiles, 1, 1, 512, 5, Exec::default()).unwrap();
        assert_eq!(a.series[1], b.series[1]);
    }

    #[test]
    fn timestamps_strictly_increase() {
        let d = gen_dataset(&default_profiles(), 2, 2, 512, 1, Exec::default()).unwrap();
        for s in &d.series {
            assert!(s.timestamps.windows(2).all(|w| w[1] > w[0]));
        }
    }
}
