//! TOML profile documents.
//!
//! ```toml
//! twist = "twisted"          # optional assertion
//!
//! [min]
//! kind = "surface"
//! genus = 0
//! normal_chern = 2
//!
//! [[walls]]
//! index = 2
//! kind = "surface"
//! genus = 0
//! dual_class = [1, 1]        # optional, solved when absent
//!
//! [max]
//! kind = "surface"
//! genus = 0
//!
//! [fixed]
//! t0 = "1"
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine::{fmt_q, parse_q, Param};
use crate::crossing::{ComponentKind, Extremum, Profile, Twist, Wall};
use crate::lattice::IntClass;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("cannot parse profile document: {0}")]
    Syntax(String),
    #[error("{site}: {reason}")]
    Invalid { site: String, reason: String },
}

fn invalid(site: impl Into<String>, reason: impl Into<String>) -> DocumentError {
    DocumentError::Invalid {
        site: site.into(),
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    Point,
    Surface,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremumRecord {
    pub kind: KindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_chern: Option<i64>,
    /// Name of the size parameter; only `alpha0` (min) and `alphabar`
    /// (max) are accepted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallRecord {
    pub index: u8,
    pub kind: KindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_class: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub same_level: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<String>,
    pub min: ExtremumRecord,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub walls: Vec<WallRecord>,
    pub max: ExtremumRecord,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fixed: BTreeMap<String, String>,
}

fn component(kind: KindName, genus: Option<u32>, site: &str) -> Result<ComponentKind, DocumentError> {
    match (kind, genus) {
        (KindName::Point, None) => Ok(ComponentKind::Point),
        (KindName::Point, Some(_)) => Err(invalid(site, "a point has no genus")),
        (KindName::Surface, Some(genus)) => Ok(ComponentKind::Surface { genus }),
        (KindName::Surface, None) => Err(invalid(site, "a surface needs `genus`")),
    }
}

fn extremum(r: &ExtremumRecord, site: &str, size: Param) -> Result<Extremum, DocumentError> {
    if let Some(name) = &r.size {
        if name.trim() != size.to_string() {
            return Err(invalid(site, format!("size parameter must be named `{size}`, found `{name}`")));
        }
    }
    let kind = component(r.kind, r.genus, site)?;
    if kind.is_point() && r.normal_chern.is_some() {
        return Err(invalid(site, "a point has no normal Chern number"));
    }
    if kind.is_point() && r.size.is_some() {
        return Err(invalid(site, "a point has no size"));
    }
    Ok(Extremum {
        kind,
        normal_chern: r.normal_chern,
    })
}

impl ProfileDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        toml::from_str(text).map_err(|e| DocumentError::Syntax(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("profile documents always serialize")
    }

    pub fn to_profile(&self) -> Result<Profile, DocumentError> {
        let min = extremum(&self.min, "min", Param::MinSize)?;
        let max = extremum(&self.max, "max", Param::MaxSize)?;
        let mut walls = Vec::with_capacity(self.walls.len());
        for (i, w) in self.walls.iter().enumerate() {
            let site = format!("walls[{i}]");
            let kind = component(w.kind, w.genus, &site)?;
            if kind.is_point() && w.dual_class.is_some() {
                return Err(invalid(site, "a point has no dual class"));
            }
            walls.push(Wall {
                index: w.index,
                kind,
                dual_class: w.dual_class.clone().map(IntClass),
                same_level: w.same_level,
            });
        }
        let twist = self
            .twist
            .as_deref()
            .map(|t| t.parse::<Twist>().map_err(|_| invalid("twist", format!("unknown twist `{t}`"))))
            .transpose()?;
        let mut fixed = BTreeMap::new();
        for (name, value) in &self.fixed {
            let site = format!("fixed.{name}");
            let p: Param = name.parse().map_err(|_| invalid(&site, "unknown parameter"))?;
            if p == Param::Level {
                return Err(invalid(&site, "the level variable cannot be fixed"));
            }
            let v = parse_q(value).ok_or_else(|| invalid(&site, format!("`{value}` is not a rational number")))?;
            fixed.insert(p, v);
        }
        Ok(Profile {
            min,
            walls,
            max,
            twist,
            fixed,
        })
    }

    pub fn from_profile(p: &Profile) -> Self {
        let record = |e: &Extremum| ExtremumRecord {
            kind: if e.kind.is_point() { KindName::Point } else { KindName::Surface },
            genus: e.kind.genus(),
            normal_chern: e.normal_chern,
            size: None,
        };
        ProfileDocument {
            twist: p.twist.map(|t| t.to_string()),
            min: record(&p.min),
            walls: p
                .walls
                .iter()
                .map(|w| WallRecord {
                    index: w.index,
                    kind: if w.kind.is_point() { KindName::Point } else { KindName::Surface },
                    genus: w.kind.genus(),
                    dual_class: w.dual_class.as_ref().map(|c| c.0.clone()),
                    same_level: w.same_level,
                })
                .collect(),
            max: record(&p.max),
            fixed: p.fixed.iter().map(|(k, v)| (k.to_string(), fmt_q(v))).collect(),
        }
    }
}

/// Parses a document straight into a profile.
pub fn parse_profile(text: &str) -> Result<Profile, DocumentError> {
    ProfileDocument::parse(text)?.to_profile()
}

/// Renders a profile as a document.
pub fn emit_profile(p: &Profile) -> String {
    ProfileDocument::from_profile(p).to_toml()
}
