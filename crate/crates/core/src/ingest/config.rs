use serde::{Deserialize, Serialize};

use crate::model::{AlignmentConfig, ConfigError, MappingTypeGroup, SourceId};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delimiter: Option<String>,
    seed: String,
    sources: Vec<String>,
    mapping_type_groups: Vec<MappingTypeGroup>,
}

/// Everything the configuration file declares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    pub config: AlignmentConfig,
    /// Field delimiter for the input tables. Defaults to `,`.
    pub delimiter: u8,
}

/// Parses a TOML configuration:
///
/// ```toml
/// seed = "MONDO"
/// sources = ["MONDO", "ORPHANET", "DOID"]
/// delimiter = ","        # optional; "\t" or "tab" for TSV inputs
///
/// [[mapping_type_groups]]
/// name = "eqv"
/// relations = ["equivalent_to"]
/// ```
pub fn parse_settings(text: &str) -> Result<Settings, ConfigError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let delimiter = match file.delimiter.as_deref() {
        None | Some(",") | Some("comma") => b',',
        Some("\t") | Some("tab") => b'\t',
        Some(other) => {
            return Err(ConfigError::Syntax(format!(
                "unsupported delimiter `{other}`; use \",\" or \"\\t\""
            )))
        }
    };
    let config = AlignmentConfig::new(
        SourceId::new(file.seed),
        file.sources.into_iter().map(SourceId::new).collect(),
        file.mapping_type_groups,
    )?;
    Ok(Settings { config, delimiter })
}

pub fn parse_config(text: &str) -> Result<AlignmentConfig, ConfigError> {
    parse_settings(text).map(|s| s.config)
}

/// Inverse of [`parse_config`].
pub fn render_config(config: &AlignmentConfig) -> String {
    let file = ConfigFile {
        delimiter: None,
        seed: config.seed().as_str().to_owned(),
        sources: config
            .sources()
            .iter()
            .map(|s| s.as_str().to_owned())
            .collect(),
        mapping_type_groups: config.groups().to_vec(),
    };
    toml::to_string(&file).expect("config serializes")
}
