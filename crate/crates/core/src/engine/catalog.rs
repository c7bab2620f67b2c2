//! The fixed ten-category demo tree.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::demos::DEMOS;
use super::params::ParamSpec;

pub const CATEGORIES: [&str; 10] = [
    "Analog Video",
    "Singularities & Sampling",
    "Discrete Transforms",
    "Video Filters",
    "Motion 1: Detection & Optical Flow",
    "Motion 2: Perception & Computation",
    "Statistical Models",
    "Compression",
    "VQA",
    "Denoising",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    /// The demo generates its own frames.
    None,
    Clip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoDescriptor {
    pub id: String,
    pub category: String,
    pub title: String,
    pub description: String,
    pub param_schema: Vec<ParamSpec>,
    pub input_kind: InputKind,
    /// Stochastic demos need an explicit seed.
    pub stochastic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogCategory {
    pub name: String,
    pub demos: Vec<DemoDescriptor>,
}

/// All categories in display order, each with its demos in registry order.
pub fn catalog() -> &'static [CatalogCategory] {
    static CATALOG: OnceLock<Vec<CatalogCategory>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        CATEGORIES
            .iter()
            .enumerate()
            .map(|(i, name)| CatalogCategory {
                name: name.to_string(),
                demos: DEMOS
                    .iter()
                    .filter(|d| d.category == i)
                    .map(|d| DemoDescriptor {
                        id: d.id.into(),
                        category: name.to_string(),
                        title: d.title.into(),
                        description: d.description.into(),
                        param_schema: (d.schema)(),
                        input_kind: d.input,
                        stochastic: d.stochastic,
                    })
                    .collect(),
            })
            .collect()
    })
}

pub fn descriptor(id: &str) -> Option<&'static DemoDescriptor> {
    catalog().iter().flat_map(|c| &c.demos).find(|d| d.id == id)
}

/// Every demo id in catalog order.
pub fn demo_ids() -> Vec<&'static str> {
    catalog().iter().flat_map(|c| &c.demos).map(|d| d.id.as_str()).collect()
}
