use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Interaction channel a layer is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Call,
    Sms,
    Proximity,
}

impl Layer {
    pub const ALL: [Layer; 3] = [Layer::Call, Layer::Sms, Layer::Proximity];

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Call => "call",
            Layer::Sms => "sms",
            Layer::Proximity => "proximity",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Layer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "call" => Ok(Layer::Call),
            "sms" => Ok(Layer::Sms),
            "proximity" => Ok(Layer::Proximity),
            other => Err(format!(
                "unknown layer `{other}` (expected call, sms or proximity)"
            )),
        }
    }
}
