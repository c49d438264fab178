//! TOML run configuration, `key=value` overrides and validation.

use std::path::Path;

use seqdec_core::channel::{CeErrorParams, KroneckerParams, LargeScaleParams};
use seqdec_core::decouple::{check_feasible, DecouplerKind};
use seqdec_core::detect::Constellation;
use seqdec_core::flops::CostModel;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; `0` lets rayon decide.
    #[serde(default)]
    pub threads: usize,
    pub system: SystemConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub ber: BerConfig,
    #[serde(default)]
    pub audit: AuditConfig,
    #[serde(default)]
    pub flops: FlopsConfig,
    #[serde(default)]
    pub include: IncludeConfig,
    #[serde(default)]
    pub cost_model: CostModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n_r: usize,
    pub k: usize,
    pub m_i: StreamsPerUser,
}

/// One stream count for every user, or one per user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StreamsPerUser {
    Uniform(usize),
    PerUser(Vec<usize>),
}

impl SystemConfig {
    pub fn dims(&self) -> Vec<usize> {
        match &self.m_i {
            StreamsPerUser::Uniform(m) => vec![*m; self.k],
            StreamsPerUser::PerUser(v) => v.clone(),
        }
    }

    pub fn total_streams(&self) -> usize {
        self.dims().iter().sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub kronecker: Option<KroneckerParams>,
    pub large_scale: Option<LargeScaleParams>,
    pub ce_error: Option<CeErrorParams>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Lmmse,
    Sic,
}

impl DetectorKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lmmse => "lmmse",
            Self::Sic => "sic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BerConfig {
    /// Every decoupler is paired with every detector on the same draws.
    pub decouplers: Vec<DecouplerKind>,
    pub detectors: Vec<DetectorKind>,
    pub constellation: String,
    pub snr_db: Vec<f64>,
    pub bits_per_point: u64,
    /// Symbol vectors sent through each channel realisation.
    pub vectors_per_channel: usize,
    /// Premultiply each decoupled link by the inverse Cholesky factor of
    /// `W Wᴴ` before detection.
    pub whitening: bool,
}

impl Default for BerConfig {
    fn default() -> Self {
        Self {
            decouplers: vec![DecouplerKind::Sd, DecouplerKind::Svd],
            detectors: vec![DetectorKind::Lmmse, DetectorKind::Sic],
            constellation: "qpsk".into(),
            snr_db: vec![0.0, 4.0, 8.0, 12.0, 16.0],
            bits_per_point: 200_040,
            vectors_per_channel: 10,
            whitening: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditConfig {
    pub trials: u64,
    /// Largest cross-residual or subspace distance still reported as a pass.
    pub tol: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlopsConfig {
    /// User counts of the K sweep, run at `m_i`.
    pub k_sweep: Vec<usize>,
    pub m_i: usize,
    /// Streams per user of the `M_i` sweep, run at `k_fixed` users.
    pub m_i_sweep: Vec<usize>,
    pub k_fixed: usize,
    /// `N_R = M + n_r_margin`.
    pub n_r_margin: usize,
    /// Also run the algorithms on random channels with the counter on.
    pub instrumented: bool,
}

impl Default for FlopsConfig {
    fn default() -> Self {
        Self {
            k_sweep: vec![30, 40, 50, 60, 70, 80],
            m_i: 2,
            m_i_sweep: vec![2, 4, 6, 8],
            k_fixed: 50,
            n_r_margin: 10,
            instrumented: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IncludeConfig {
    /// Users added one at a time on top of `system`.
    pub new_users: usize,
    pub new_m_i: usize,
}

impl Default for IncludeConfig {
    fn default() -> Self {
        Self {
            new_users: 5,
            new_m_i: 2,
        }
    }
}

impl SimConfig {
    /// Reads a TOML config, or the `config` object of a JSON run manifest.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        let mut value: toml::Value = if path.extension().is_some_and(|e| e == "json") {
            let json: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
            let mut inner = json.get("config").cloned().unwrap_or(json);
            strip_nulls(&mut inner);
            serde_json::from_value(inner)
                .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text)
                .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?
        };
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        Self::from_value(value)
    }

    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let mut value: toml::Value =
            toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        Self::from_value(value)
    }

    fn from_value(value: toml::Value) -> Result<Self> {
        let cfg: Self = value
            .try_into()
            .map_err(|e: toml::de::Error| SimError::Config(e.message().to_string()))?;
        cfg.validate_shape()?;
        Ok(cfg)
    }

    /// Checks that do not depend on the subcommand.
    fn validate_shape(&self) -> Result<()> {
        let dims = self.system.dims();
        if self.system.n_r == 0 {
            return Err(SimError::Config("system.n_r must be positive".into()));
        }
        if dims.is_empty() {
            return Err(SimError::Config("system needs at least one user".into()));
        }
        if let StreamsPerUser::PerUser(v) = &self.system.m_i {
            if v.len() != self.system.k {
                return Err(SimError::Config(format!(
                    "system.m_i lists {} users but system.k = {}",
                    v.len(),
                    self.system.k
                )));
            }
        }
        if dims.contains(&0) {
            return Err(SimError::Config("every user needs m_i >= 1".into()));
        }
        if let Some(p) = &self.channel.kronecker {
            p.validate()?;
        }
        if let Some(p) = &self.channel.large_scale {
            p.validate()?;
        }
        if let Some(p) = &self.channel.ce_error {
            p.validate()?;
        }
        Ok(())
    }

    /// Checks needed by `ber`; feasibility errors map to exit code 3.
    pub fn validate_ber(&self) -> Result<Constellation> {
        let ber = &self.ber;
        let cons = Constellation::from_name(&ber.constellation)
            .map_err(|e| SimError::Config(e.to_string()))?;
        if ber.snr_db.is_empty() {
            return Err(SimError::Config("ber.snr_db is empty".into()));
        }
        if ber.snr_db.iter().any(|s| !s.is_finite()) || ber.snr_db.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(SimError::Config(
                "ber.snr_db must be finite and strictly increasing".into(),
            ));
        }
        if ber.decouplers.is_empty() || ber.detectors.is_empty() {
            return Err(SimError::Config(
                "ber.decouplers and ber.detectors must be non-empty".into(),
            ));
        }
        if ber.vectors_per_channel == 0 {
            return Err(SimError::Config(
                "ber.vectors_per_channel must be positive".into(),
            ));
        }
        let per_vector = (cons.bits_per_symbol() * self.system.total_streams()) as u64;
        if ber.bits_per_point == 0 || ber.bits_per_point % per_vector != 0 {
            return Err(SimError::Config(format!(
                "ber.bits_per_point = {} is not a positive multiple of {per_vector} \
                 (bits per symbol x total streams)",
                ber.bits_per_point
            )));
        }
        check_feasible(self.system.n_r, &self.system.dims())?;
        Ok(cons)
    }
}

/// Drops `null` members, which TOML cannot represent; absent and `null`
/// mean the same for every optional field.
fn strip_nulls(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.retain(|_, x| !x.is_null());
            map.values_mut().for_each(strip_nulls);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_nulls),
        _ => {}
    }
}

/// Sets the dotted `key` of `root` to `value`, parsed as a TOML value when
/// possible and as a string otherwise.
pub fn apply_override(root: &mut toml::Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| SimError::Config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(SimError::Config(format!("bad override key `{key}`")));
    }
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| SimError::Config(format!("`{key}`: `{part}` is not a table")))?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    node.as_table_mut()
        .ok_or_else(|| SimError::Config(format!("`{key}` does not name a table entry")))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "seed = 3\n[system]\nn_r = 16\nk = 3\nm_i = 2\n";

    #[test]
    fn defaults_fill_in() {
        let cfg = SimConfig::from_toml(BASE, &[]).unwrap();
        assert_eq!(cfg.system.dims(), vec![2, 2, 2]);
        assert_eq!(cfg.ber.bits_per_point, 200_040);
        assert_eq!(cfg.cost_model, CostModel::default());
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let cfg = SimConfig::from_toml(
            BASE,
            &[
                "system.m_i=[1,2,3]".into(),
                "ber.constellation = 16qam".into(),
                "channel.ce_error.sigma_e2=0.01".into(),
                "seed=9".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.system.dims(), vec![1, 2, 3]);
        assert_eq!(cfg.ber.constellation, "16qam");
        assert_eq!(cfg.channel.ce_error.unwrap().sigma_e2, 0.01);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SimConfig::from_toml(BASE, &["nope".into()]).is_err());
        assert!(SimConfig::from_toml(BASE, &["system.bogus=1".into()]).is_err());
        assert!(SimConfig::from_toml(BASE, &["system.m_i=[1,2]".into()]).is_err());
        let cfg = SimConfig::from_toml(BASE, &["ber.snr_db=[4,0]".into()]).unwrap();
        assert_eq!(cfg.validate_ber().unwrap_err().exit_code(), 2);
        let cfg = SimConfig::from_toml(BASE, &["ber.bits_per_point=13".into()]).unwrap();
        assert_eq!(cfg.validate_ber().unwrap_err().exit_code(), 2);
        let cfg = SimConfig::from_toml(BASE, &["system.n_r=4".into()]).unwrap();
        assert_eq!(cfg.validate_ber().unwrap_err().exit_code(), 3);
    }
}
