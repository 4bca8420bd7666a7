use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Sea areas used by the salinity model and the route catalog.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Area {
    #[serde(rename = "GoB")]
    GulfOfBothnia,
    #[serde(rename = "GoF")]
    GulfOfFinland,
    #[serde(rename = "GoR")]
    GulfOfRiga,
    #[serde(rename = "BP")]
    BalticProper,
    #[serde(rename = "SWB")]
    SouthwesternBaltic,
    #[serde(rename = "NS")]
    NorthSea,
}

impl Area {
    pub const ALL: [Area; 6] = [
        Area::GulfOfBothnia,
        Area::GulfOfFinland,
        Area::GulfOfRiga,
        Area::BalticProper,
        Area::SouthwesternBaltic,
        Area::NorthSea,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Area::GulfOfBothnia => "GoB",
            Area::GulfOfFinland => "GoF",
            Area::GulfOfRiga => "GoR",
            Area::BalticProper => "BP",
            Area::SouthwesternBaltic => "SWB",
            Area::NorthSea => "NS",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Area::GulfOfBothnia => "Gulf of Bothnia",
            Area::GulfOfFinland => "Gulf of Finland",
            Area::GulfOfRiga => "Gulf of Riga",
            Area::BalticProper => "Baltic Proper",
            Area::SouthwesternBaltic => "Southwestern Baltic",
            Area::NorthSea => "North Sea (eastern part)",
        }
    }

    pub fn index(self) -> usize {
        Area::ALL.iter().position(|a| *a == self).unwrap()
    }
}

impl fmt::Display for Area {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Area {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Area::ALL
            .into_iter()
            .find(|a| a.code().eq_ignore_ascii_case(s) || a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown area `{s}`"))
    }
}
