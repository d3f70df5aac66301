//! Run configuration: defaults, key-value config files, and validation.
//!
//! Every tunable is available both as a command-line flag and as a
//! `key = value` line in a config file (keys match the flag names without
//! the leading dashes). Flags win on conflict.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ostce_core::colorspace::CHROMATIC_AXIS_SCALE;
use ostce_core::optimizer::EnhanceParams;
use ostce_core::preprocess::{BlurParams, FovMapping};

use crate::error::CliError;

/// Enhancement method selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Ours,
    Subtract,
    LumChroma,
    OppositeHue,
    None,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Ours,
        Method::Subtract,
        Method::LumChroma,
        Method::OppositeHue,
        Method::None,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Ours => "ours",
            Method::Subtract => "subtract",
            Method::LumChroma => "lumchroma",
            Method::OppositeHue => "opposite-hue",
            Method::None => "none",
        }
    }

    pub fn from_name(s: &str) -> Result<Method, CliError> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown method '{s}' (expected one of: ours, subtract, lumchroma, opposite-hue, none)"
                ))
            })
    }
}

/// Fully resolved configuration for a run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub virtual_path: Option<PathBuf>,
    pub background_path: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    /// Scaled color-difference budget λ'_E.
    pub lambda_e: f64,
    /// Unscaled CIELAB JND used by the evaluation; the optimizer's scaled
    /// radius is derived as `jnd / 128`.
    pub jnd: f64,
    pub blur: BlurParams,
    /// Fraction of background luminance removed by the combiner.
    pub attenuation: f64,
    pub fov: FovMapping,
    pub method: Method,
    pub emit_overlay: bool,
    pub report_path: Option<PathBuf>,
    pub compare: Option<Vec<Method>>,
    pub bench: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            virtual_path: None,
            background_path: None,
            out_dir: None,
            lambda_e: 0.4,
            jnd: 2.3,
            blur: BlurParams::default(),
            attenuation: 0.6,
            fov: FovMapping::new(0.65, 0.65, 0.13, 0.17),
            method: Method::Ours,
            emit_overlay: false,
            report_path: None,
            compare: None,
            bench: false,
        }
    }
}

impl RunConfig {
    pub fn enhance_params(&self) -> EnhanceParams {
        EnhanceParams {
            lambda_e: self.lambda_e,
            lambda_jnd_scaled: self.jnd / CHROMATIC_AXIS_SCALE,
            epsilon: 1e-9,
        }
    }

    /// Range checks for every numeric parameter. Violations map to exit
    /// code 3.
    pub fn validate(&self) -> Result<(), CliError> {
        self.enhance_params().validate().map_err(CliError::Param)?;
        if !(self.jnd >= 0.0 && self.jnd.is_finite()) {
            return Err(CliError::Param(format!(
                "jnd must be non-negative, got {}",
                self.jnd
            )));
        }
        self.blur.validate().map_err(CliError::Param)?;
        if !((0.0..=1.0).contains(&self.attenuation)) {
            return Err(CliError::Param(format!(
                "attenuation must be within [0, 1], got {}",
                self.attenuation
            )));
        }
        self.fov.validate().map_err(CliError::Param)?;
        Ok(())
    }
}

/// Unresolved settings from one source (config file or command line).
/// `None` means "no opinion", letting lower-precedence sources through.
#[derive(Clone, Debug, Default)]
pub struct PartialConfig {
    pub virtual_path: Option<PathBuf>,
    pub background_path: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub lambda_e: Option<f64>,
    pub jnd: Option<f64>,
    pub blur_sigma: Option<f64>,
    pub blur_kernel: Option<usize>,
    pub attenuation: Option<f64>,
    pub fov: Option<FovMapping>,
    pub method: Option<Method>,
    pub emit_overlay: Option<bool>,
    pub report_path: Option<PathBuf>,
    pub compare: Option<Vec<Method>>,
    pub bench: Option<bool>,
}

impl PartialConfig {
    /// Applies this source on top of `base`, overriding only the fields it
    /// sets.
    pub fn apply(&self, base: &mut RunConfig) {
        if let Some(v) = &self.virtual_path {
            base.virtual_path = Some(v.clone());
        }
        if let Some(v) = &self.background_path {
            base.background_path = Some(v.clone());
        }
        if let Some(v) = &self.out_dir {
            base.out_dir = Some(v.clone());
        }
        if let Some(v) = self.lambda_e {
            base.lambda_e = v;
        }
        if let Some(v) = self.jnd {
            base.jnd = v;
        }
        if let Some(v) = self.blur_sigma {
            base.blur.sigma = v;
        }
        if let Some(v) = self.blur_kernel {
            base.blur.kernel_size = v;
        }
        if let Some(v) = self.attenuation {
            base.attenuation = v;
        }
        if let Some(v) = self.fov {
            base.fov = v;
        }
        if let Some(v) = self.method {
            base.method = v;
        }
        if let Some(v) = self.emit_overlay {
            base.emit_overlay = v;
        }
        if let Some(v) = &self.report_path {
            base.report_path = Some(v.clone());
        }
        if let Some(v) = &self.compare {
            base.compare = Some(v.clone());
        }
        if let Some(v) = self.bench {
            base.bench = v;
        }
    }
}

/// Parses `SU,SV,BU,BV`.
pub fn parse_fov(s: &str) -> Result<FovMapping, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(CliError::Usage(format!(
            "fov expects four comma-separated values SU,SV,BU,BV, got '{s}'"
        )));
    }
    let mut vals = [0.0f64; 4];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| CliError::Usage(format!("fov component '{part}' is not a number")))?;
    }
    Ok(FovMapping::new(vals[0], vals[1], vals[2], vals[3]))
}

/// Parses a comma-separated method list.
pub fn parse_methods(s: &str) -> Result<Vec<Method>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(Method::from_name)
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::Usage(format!(
            "config key '{key}' expects a boolean, got '{value}'"
        ))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| {
        CliError::Usage(format!(
            "config key '{key}' expects a number, got '{value}'"
        ))
    })
}

/// Reads a plain-text config file: one `key = value` per line, `#` starts a
/// comment, keys named like the command-line flags.
pub fn parse_config_file(path: &Path) -> Result<PartialConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<PartialConfig, CliError> {
    let mut entries: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {} is not 'key = value': '{raw}'",
                lineno + 1
            )));
        };
        entries.insert(key.trim().to_string(), value.trim().to_string());
    }

    let mut cfg = PartialConfig::default();
    for (key, value) in entries {
        match key.as_str() {
            "virtual" => cfg.virtual_path = Some(PathBuf::from(value)),
            "background" => cfg.background_path = Some(PathBuf::from(value)),
            "out" => cfg.out_dir = Some(PathBuf::from(value)),
            "lambda-e" => cfg.lambda_e = Some(parse_num("lambda-e", &value)?),
            "jnd" => cfg.jnd = Some(parse_num("jnd", &value)?),
            "blur-sigma" => cfg.blur_sigma = Some(parse_num("blur-sigma", &value)?),
            "blur-kernel" => cfg.blur_kernel = Some(parse_num("blur-kernel", &value)?),
            "attenuation" => cfg.attenuation = Some(parse_num("attenuation", &value)?),
            "fov" => cfg.fov = Some(parse_fov(&value)?),
            "method" => cfg.method = Some(Method::from_name(&value)?),
            "emit-overlay" => cfg.emit_overlay = Some(parse_bool("emit-overlay", &value)?),
            "report" => cfg.report_path = Some(PathBuf::from(value)),
            "compare" => cfg.compare = Some(parse_methods(&value)?),
            "bench" => cfg.bench = Some(parse_bool("bench", &value)?),
            other => {
                return Err(CliError::Usage(format!("unknown config key '{other}'")));
            }
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.lambda_e, 0.4);
        assert_eq!(cfg.jnd, 2.3);
        assert_eq!(
            cfg.blur,
            BlurParams {
                kernel_size: 3,
                sigma: 1.5
            }
        );
        assert_eq!(cfg.attenuation, 0.6);
        assert_eq!(cfg.fov, FovMapping::new(0.65, 0.65, 0.13, 0.17));
        assert_eq!(cfg.method, Method::Ours);
        let p = cfg.enhance_params();
        assert!((p.lambda_jnd_scaled - 2.3 / 128.0).abs() < 1e-15);
        cfg.validate().unwrap();
    }

    #[test]
    fn config_file_parsing_and_precedence() {
        let parsed = parse_config_str(
            "# comment\nlambda-e = 0.8\nmethod = opposite-hue\nemit-overlay = true\nfov = 1,1,0,0\n",
        )
        .unwrap();
        let mut cfg = RunConfig::default();
        parsed.apply(&mut cfg);
        assert_eq!(cfg.lambda_e, 0.8);
        assert_eq!(cfg.method, Method::OppositeHue);
        assert!(cfg.emit_overlay);
        assert_eq!(cfg.fov, FovMapping::IDENTITY);

        // Flags win over the file.
        let flags = PartialConfig {
            lambda_e: Some(0.2),
            ..Default::default()
        };
        flags.apply(&mut cfg);
        assert_eq!(cfg.lambda_e, 0.2);
        assert_eq!(cfg.method, Method::OppositeHue);
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_lines() {
        assert!(matches!(
            parse_config_str("speed = 9\n").unwrap_err(),
            CliError::Usage(_)
        ));
        assert!(matches!(
            parse_config_str("just words\n").unwrap_err(),
            CliError::Usage(_)
        ));
    }

    #[test]
    fn validation_rejects_out_of_range() {
        let cfg = RunConfig {
            lambda_e: 2.5,
            ..RunConfig::default()
        };
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 3);

        let cfg = RunConfig {
            attenuation: 1.2,
            ..RunConfig::default()
        };
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 3);

        let cfg = RunConfig {
            blur: BlurParams {
                kernel_size: 4,
                sigma: 1.5,
            },
            ..RunConfig::default()
        };
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 3);

        let cfg = RunConfig {
            fov: FovMapping::new(-1.0, 1.0, 0.0, 0.0),
            ..RunConfig::default()
        };
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 3);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::from_name(m.name()).unwrap(), m);
        }
        assert!(Method::from_name("fancy").is_err());
        assert_eq!(
            parse_methods("ours, subtract,opposite-hue").unwrap(),
            vec![Method::Ours, Method::Subtract, Method::OppositeHue]
        );
    }
}
