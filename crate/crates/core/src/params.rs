//! Canonical parameter container.
//!
//! All unit conversion happens exactly once, at the config boundary: the raw
//! document carries `{value, unit}` pairs, and everything downstream consumes
//! SI / linear quantities only. Derived quantities (tier intensities, downlink
//! symbol budget, slot duration) are recomputed on demand and never stored.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A raw config value with a declared unit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

impl Quantity {
    pub fn new(value: f64, unit: &str) -> Self {
        Quantity {
            value,
            unit: unit.to_string(),
        }
    }
}

/// Raw config document: flat JSON with one `{value, unit}` pair per field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawConfig {
    pub lambda_total: Quantity,
    pub lambda_u: Quantity,
    pub beta: Quantity,
    pub n_antennas: Quantity,
    pub alpha: Quantity,
    pub power: Quantity,
    pub bandwidth_s: Quantity,
    pub bandwidth_c: Quantity,
    pub scan_interval: Quantity,
    pub paoi_threshold: Quantity,
    pub packet_bits: Quantity,
    pub gain_tx: Quantity,
    pub gain_rx: Quantity,
    pub rcs_mean: Quantity,
    pub max_range: Quantity,
    pub detect_threshold: Quantity,
    pub beam_halfwidth: Quantity,
    pub noise_sensing: Quantity,
    pub coherence_symbols: Quantity,
    pub pilot_symbols: Quantity,
    pub blocklength: Quantity,
    pub pilot_snr: Quantity,
    pub sinr_threshold: Quantity,
    pub wavelength: Quantity,
    /// Expected aggregate serving antennas E[aleph]; either set explicitly...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aleph_mean: Option<Quantity>,
    /// ...or derived as N * lambda_c * pi * serving_radius^2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub serving_radius: Option<Quantity>,
    /// Simulation disk radius; defaults to 5 * max(R, 1/sqrt(lambda_c)).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_radius: Option<Quantity>,
}

/// Fully unit-normalized system parameters (SI + linear scale throughout).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParameters {
    /// Total AP intensity, AP/m^2.
    pub lambda_total: f64,
    /// User intensity, users/m^2.
    pub lambda_u: f64,
    /// Partition factor in [0,1]; sensing tier gets (1-beta), comm tier beta.
    pub beta: f64,
    /// Antennas per communication AP.
    pub n_antennas: u32,
    /// Path-loss exponent, > 2.
    pub alpha: f64,
    /// Transmit power P, watts.
    pub power: f64,
    /// Sensing bandwidth, Hz.
    pub bandwidth_s: f64,
    /// Communication bandwidth, Hz.
    pub bandwidth_c: f64,
    /// Scan interval T_s, seconds.
    pub scan_interval: f64,
    /// PAoI threshold zeta, seconds.
    pub paoi_threshold: f64,
    /// Packet length L, bits.
    pub packet_bits: f64,
    /// Per-antenna transmit gain, linear.
    pub gain_tx: f64,
    /// Per-antenna receive gain, linear.
    pub gain_rx: f64,
    /// Mean radar cross section, m^2.
    pub rcs_mean: f64,
    /// Maximum detection range R, meters.
    pub max_range: f64,
    /// Detection SINR threshold delta, linear.
    pub detect_threshold: f64,
    /// Beam half-width Theta, radians (full main lobe is 2*Theta).
    pub beam_halfwidth: f64,
    /// Sensing noise power N_s, watts.
    pub noise_sensing: f64,
    /// Coherence interval tau_c, symbols.
    pub coherence_symbols: f64,
    /// Uplink training length tau_tr, symbols (also the orthogonal pilot count).
    pub pilot_symbols: f64,
    /// FBC blocklength, symbols.
    pub blocklength: f64,
    /// Normalized pilot SNR rho_tr, linear.
    pub pilot_snr: f64,
    /// Communication coverage SINR threshold gamma_th, linear.
    pub sinr_threshold: f64,
    /// Carrier wavelength lambda_w, meters.
    pub wavelength: f64,
    /// Explicit E[aleph] if configured.
    pub aleph_mean: Option<f64>,
    /// Serving radius for the E[aleph] derivation rule, meters.
    pub serving_radius: Option<f64>,
    /// Explicit simulation region radius, meters.
    pub region_radius: Option<f64>,
}

fn require_finite(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(field, "value is not finite"))
    }
}

/// Convert one raw quantity to its normalized SI / linear value.
///
/// `pilot_snr` is special-cased per its conventional dBm labeling: the dBm
/// number is read as a normalized SNR, i.e. 23 dBm -> 10^2.3 linear.
fn normalize(field: &str, q: &Quantity) -> Result<f64> {
    let v = require_finite(field, q.value)?;
    let u = q.unit.as_str();
    let db = |v: f64| 10f64.powf(v / 10.0);
    let out = match (field, u) {
        (_, "linear")
        | (_, "per_m2")
        | (_, "s")
        | (_, "m")
        | (_, "w")
        | (_, "hz")
        | (_, "rad")
        | (_, "symbols")
        | (_, "bits")
        | (_, "m2")
        | (_, "count") => v,
        (_, "per_km2") => v * 1e-6,
        (_, "ms") => v * 1e-3,
        (_, "km") => v * 1e3,
        ("pilot_snr", "dbm") | ("pilot_snr", "db") => db(v),
        ("noise_sensing", "dbm") | ("power", "dbm") => db(v) * 1e-3,
        ("detect_threshold", "db") | ("sinr_threshold", "db") => db(v),
        ("gain_tx", "dbi") | ("gain_rx", "dbi") => db(v),
        ("rcs_mean", "dbsm") => db(v),
        _ => {
            return Err(Error::config(
                field,
                format!("unit `{u}` is not accepted for this field"),
            ))
        }
    };
    Ok(out)
}

impl SystemParameters {
    /// Build normalized parameters from a raw config document.
    pub fn from_config(raw: &RawConfig) -> Result<Self> {
        let n_antennas_f = normalize("n_antennas", &raw.n_antennas)?;
        if n_antennas_f < 1.0 || n_antennas_f.fract() != 0.0 {
            return Err(Error::config("n_antennas", "must be a positive integer"));
        }
        let p = SystemParameters {
            lambda_total: normalize("lambda_total", &raw.lambda_total)?,
            lambda_u: normalize("lambda_u", &raw.lambda_u)?,
            beta: normalize("beta", &raw.beta)?,
            n_antennas: n_antennas_f as u32,
            alpha: normalize("alpha", &raw.alpha)?,
            power: normalize("power", &raw.power)?,
            bandwidth_s: normalize("bandwidth_s", &raw.bandwidth_s)?,
            bandwidth_c: normalize("bandwidth_c", &raw.bandwidth_c)?,
            scan_interval: normalize("scan_interval", &raw.scan_interval)?,
            paoi_threshold: normalize("paoi_threshold", &raw.paoi_threshold)?,
            packet_bits: normalize("packet_bits", &raw.packet_bits)?,
            gain_tx: normalize("gain_tx", &raw.gain_tx)?,
            gain_rx: normalize("gain_rx", &raw.gain_rx)?,
            rcs_mean: normalize("rcs_mean", &raw.rcs_mean)?,
            max_range: normalize("max_range", &raw.max_range)?,
            detect_threshold: normalize("detect_threshold", &raw.detect_threshold)?,
            beam_halfwidth: normalize("beam_halfwidth", &raw.beam_halfwidth)?,
            noise_sensing: normalize("noise_sensing", &raw.noise_sensing)?,
            coherence_symbols: normalize("coherence_symbols", &raw.coherence_symbols)?,
            pilot_symbols: normalize("pilot_symbols", &raw.pilot_symbols)?,
            blocklength: normalize("blocklength", &raw.blocklength)?,
            pilot_snr: normalize("pilot_snr", &raw.pilot_snr)?,
            sinr_threshold: normalize("sinr_threshold", &raw.sinr_threshold)?,
            wavelength: normalize("wavelength", &raw.wavelength)?,
            aleph_mean: raw
                .aleph_mean
                .as_ref()
                .map(|q| normalize("aleph_mean", q))
                .transpose()?,
            serving_radius: raw
                .serving_radius
                .as_ref()
                .map(|q| normalize("serving_radius", q))
                .transpose()?,
            region_radius: raw
                .region_radius
                .as_ref()
                .map(|q| normalize("region_radius", q))
                .transpose()?,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parse a JSON config document.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))?;
        Self::from_config(&raw)
    }

    fn validate(&self) -> Result<()> {
        let nonneg = [
            ("lambda_total", self.lambda_total),
            ("lambda_u", self.lambda_u),
            ("power", self.power),
            ("gain_tx", self.gain_tx),
            ("gain_rx", self.gain_rx),
            ("rcs_mean", self.rcs_mean),
            ("noise_sensing", self.noise_sensing),
            ("detect_threshold", self.detect_threshold),
            ("pilot_snr", self.pilot_snr),
            ("sinr_threshold", self.sinr_threshold),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) {
                return Err(Error::config(name, format!("must be >= 0, got {v}")));
            }
        }
        let positive = [
            ("bandwidth_s", self.bandwidth_s),
            ("bandwidth_c", self.bandwidth_c),
            ("scan_interval", self.scan_interval),
            ("paoi_threshold", self.paoi_threshold),
            ("max_range", self.max_range),
            ("beam_halfwidth", self.beam_halfwidth),
            ("coherence_symbols", self.coherence_symbols),
            ("pilot_symbols", self.pilot_symbols),
            ("blocklength", self.blocklength),
            ("wavelength", self.wavelength),
            ("packet_bits", self.packet_bits),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::config(name, format!("must be > 0, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::config(
                "beta",
                format!("must lie in [0,1], got {}", self.beta),
            ));
        }
        if !(self.alpha > 2.0) {
            return Err(Error::config(
                "alpha",
                format!("path-loss exponent must exceed 2, got {}", self.alpha),
            ));
        }
        if self.pilot_symbols >= self.coherence_symbols {
            return Err(Error::config(
                "pilot_symbols",
                format!(
                    "tau_tr = {} must be smaller than tau_c = {} so tau_d > 0",
                    self.pilot_symbols, self.coherence_symbols
                ),
            ));
        }
        if let Some(a) = self.aleph_mean {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::config("aleph_mean", "must be positive"));
            }
        }
        if let Some(r) = self.serving_radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::config("serving_radius", "must be positive"));
            }
        }
        Ok(())
    }

    /// Sensing-tier intensity lambda_s = (1 - beta) * lambda, AP/m^2.
    /// Computed as the complement of lambda_c so the two tiers sum back to
    /// lambda_total at full precision.
    pub fn lambda_s(&self) -> f64 {
        self.lambda_total - self.lambda_c()
    }

    /// Communication-tier intensity lambda_c = beta * lambda, AP/m^2.
    pub fn lambda_c(&self) -> f64 {
        self.beta * self.lambda_total
    }

    /// Downlink data symbols tau_d = tau_c - tau_tr.
    pub fn tau_d(&self) -> f64 {
        self.coherence_symbols - self.pilot_symbols
    }

    /// Slot duration T_c = tau_c / B_c, seconds.
    pub fn slot_duration(&self) -> f64 {
        self.coherence_symbols / self.bandwidth_c
    }

    /// Number of orthogonal pilots (= tau_tr).
    pub fn pilot_count(&self) -> usize {
        self.pilot_symbols as usize
    }

    /// Expected aggregate serving antenna count E[aleph].
    ///
    /// Uses the explicit `aleph_mean` when configured, otherwise derives
    /// N * lambda_c * pi * serving_radius^2. Values below 1 are rejected:
    /// the Gamma-shape approximation behind the coverage bound is
    /// meaningless there.
    pub fn effective_aleph(&self) -> Result<f64> {
        let aleph = match (self.aleph_mean, self.serving_radius) {
            (Some(a), _) => a,
            (None, Some(r)) => {
                f64::from(self.n_antennas) * self.lambda_c() * std::f64::consts::PI * r * r
            }
            (None, None) => {
                return Err(Error::config(
                    "aleph_mean",
                    "neither aleph_mean nor serving_radius is configured",
                ))
            }
        };
        if aleph < 1.0 {
            return Err(Error::config(
                "aleph_mean",
                format!("effective aleph = {aleph:.6} is below 1"),
            ));
        }
        Ok(aleph)
    }

    /// Simulation disk radius: explicit override, else 5 * max(R, 1/sqrt(lambda_c)).
    pub fn simulation_region_radius(&self) -> f64 {
        if let Some(r) = self.region_radius {
            return r;
        }
        let lc = self.lambda_c();
        let scale = if lc > 0.0 {
            self.max_range.max(1.0 / lc.sqrt())
        } else {
            self.max_range
        };
        5.0 * scale
    }

    /// Copy with a different partition factor.
    pub fn with_beta(&self, beta: f64) -> Self {
        let mut p = self.clone();
        p.beta = beta;
        p
    }

    /// Set a field by canonical name with an SI / linear value (sweep support).
    pub fn set_field(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "lambda_total" => self.lambda_total = value,
            "lambda_u" => self.lambda_u = value,
            "beta" => self.beta = value,
            "n_antennas" => self.n_antennas = value as u32,
            "alpha" => self.alpha = value,
            "power" => self.power = value,
            "bandwidth_s" => self.bandwidth_s = value,
            "bandwidth_c" => self.bandwidth_c = value,
            "scan_interval" => self.scan_interval = value,
            "paoi_threshold" => self.paoi_threshold = value,
            "packet_bits" => self.packet_bits = value,
            "gain_tx" => self.gain_tx = value,
            "gain_rx" => self.gain_rx = value,
            "rcs_mean" => self.rcs_mean = value,
            "max_range" => self.max_range = value,
            "detect_threshold" => self.detect_threshold = value,
            "beam_halfwidth" => self.beam_halfwidth = value,
            "noise_sensing" => self.noise_sensing = value,
            "coherence_symbols" => self.coherence_symbols = value,
            "pilot_symbols" => self.pilot_symbols = value,
            "blocklength" => self.blocklength = value,
            "pilot_snr" => self.pilot_snr = value,
            "sinr_threshold" => self.sinr_threshold = value,
            "wavelength" => self.wavelength = value,
            "aleph_mean" => self.aleph_mean = Some(value),
            "serving_radius" => self.serving_radius = Some(value),
            "region_radius" => self.region_radius = Some(value),
            _ => return Err(Error::config(name, "unknown parameter name")),
        }
        self.validate()
    }

    /// Re-emit the normalized values as a config document (all units SI/linear).
    pub fn to_raw(&self) -> RawConfig {
        let q = |v: f64, u: &str| Quantity::new(v, u);
        RawConfig {
            lambda_total: q(self.lambda_total, "per_m2"),
            lambda_u: q(self.lambda_u, "per_m2"),
            beta: q(self.beta, "linear"),
            n_antennas: q(f64::from(self.n_antennas), "count"),
            alpha: q(self.alpha, "linear"),
            power: q(self.power, "w"),
            bandwidth_s: q(self.bandwidth_s, "hz"),
            bandwidth_c: q(self.bandwidth_c, "hz"),
            scan_interval: q(self.scan_interval, "s"),
            paoi_threshold: q(self.paoi_threshold, "s"),
            packet_bits: q(self.packet_bits, "bits"),
            gain_tx: q(self.gain_tx, "linear"),
            gain_rx: q(self.gain_rx, "linear"),
            rcs_mean: q(self.rcs_mean, "m2"),
            max_range: q(self.max_range, "m"),
            detect_threshold: q(self.detect_threshold, "linear"),
            beam_halfwidth: q(self.beam_halfwidth, "rad"),
            noise_sensing: q(self.noise_sensing, "w"),
            coherence_symbols: q(self.coherence_symbols, "symbols"),
            pilot_symbols: q(self.pilot_symbols, "symbols"),
            blocklength: q(self.blocklength, "symbols"),
            pilot_snr: q(self.pilot_snr, "linear"),
            sinr_threshold: q(self.sinr_threshold, "linear"),
            wavelength: q(self.wavelength, "m"),
            aleph_mean: self.aleph_mean.map(|v| q(v, "linear")),
            serving_radius: self.serving_radius.map(|v| q(v, "m")),
            region_radius: self.region_radius.map(|v| q(v, "m")),
        }
    }

    /// Normalized values keyed by field name, for result metadata sidecars.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: f64| {
            m.insert(k.to_string(), v);
        };
        put("lambda_total", self.lambda_total);
        put("lambda_u", self.lambda_u);
        put("beta", self.beta);
        put("n_antennas", f64::from(self.n_antennas));
        put("alpha", self.alpha);
        put("power", self.power);
        put("bandwidth_s", self.bandwidth_s);
        put("bandwidth_c", self.bandwidth_c);
        put("scan_interval", self.scan_interval);
        put("paoi_threshold", self.paoi_threshold);
        put("packet_bits", self.packet_bits);
        put("gain_tx", self.gain_tx);
        put("gain_rx", self.gain_rx);
        put("rcs_mean", self.rcs_mean);
        put("max_range", self.max_range);
        put("detect_threshold", self.detect_threshold);
        put("beam_halfwidth", self.beam_halfwidth);
        put("noise_sensing", self.noise_sensing);
        put("coherence_symbols", self.coherence_symbols);
        put("pilot_symbols", self.pilot_symbols);
        put("blocklength", self.blocklength);
        put("pilot_snr", self.pilot_snr);
        put("sinr_threshold", self.sinr_threshold);
        put("wavelength", self.wavelength);
        if let Some(v) = self.aleph_mean {
            put("aleph_mean", v);
        }
        if let Some(v) = self.serving_radius {
            put("serving_radius", v);
        }
        if let Some(v) = self.region_radius {
            put("region_radius", v);
        }
        put("derived.lambda_s", self.lambda_s());
        put("derived.lambda_c", self.lambda_c());
        put("derived.tau_d", self.tau_d());
        put("derived.slot_duration", self.slot_duration());
        m
    }
}
