use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Node types of a hierarchical information network and which of them take
/// part in property inheritance.
///
/// An *attaching* type carries information that propagates along the
/// hierarchy of an *inherited* type; each `(attaching, inherited)` entry of
/// `inheritance_pairs` enables that propagation for one combination.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Schema {
    pub node_types: BTreeSet<String>,
    #[serde(default)]
    pub attaching_types: BTreeSet<String>,
    #[serde(default)]
    pub inherited_types: BTreeSet<String>,
    #[serde(default)]
    pub inheritance_pairs: BTreeSet<(String, String)>,
}

impl Schema {
    pub fn is_inheritance_pair(&self, attaching: &str, inherited: &str) -> bool {
        self.inheritance_pairs
            .iter()
            .any(|(a, i)| a == attaching && i == inherited)
    }

    /// True when the two types form a pair in either order.
    pub fn forms_pair(&self, a: &str, b: &str) -> bool {
        self.is_inheritance_pair(a, b) || self.is_inheritance_pair(b, a)
    }

    /// Inherited types whose hierarchy propagates information from `attaching`.
    pub fn inherited_by<'a>(&'a self, attaching: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.inheritance_pairs
            .iter()
            .filter(move |(a, _)| a == attaching)
            .map(|(_, i)| i.as_str())
    }

    pub fn is_inherited(&self, ty: &str) -> bool {
        self.inherited_types.contains(ty)
    }

    /// Structural problems with the schema itself, as human-readable strings.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        for ty in self.attaching_types.intersection(&self.inherited_types) {
            out.push(format!("type {ty:?} is both attaching and inherited"));
        }
        for ty in self.attaching_types.iter().chain(&self.inherited_types) {
            if !self.node_types.contains(ty) {
                out.push(format!("type {ty:?} is not a declared node type"));
            }
        }
        for (a, i) in &self.inheritance_pairs {
            if !self.attaching_types.contains(a) {
                out.push(format!("pair ({a:?}, {i:?}): {a:?} is not an attaching type"));
            }
            if !self.inherited_types.contains(i) {
                out.push(format!("pair ({a:?}, {i:?}): {i:?} is not an inherited type"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product_schema() -> Schema {
        Schema {
            node_types: ["Product", "Vulnerability", "Technology", "Site"]
                .map(String::from)
                .into(),
            attaching_types: ["Vulnerability", "Technology"].map(String::from).into(),
            inherited_types: ["Product".to_string()].into(),
            inheritance_pairs: [
                ("Vulnerability".to_string(), "Product".to_string()),
                ("Technology".to_string(), "Product".to_string()),
            ]
            .into(),
        }
    }

    #[test]
    fn pairs_are_directional_but_forms_pair_is_not() {
        let s = product_schema();
        assert!(s.is_inheritance_pair("Vulnerability", "Product"));
        assert!(!s.is_inheritance_pair("Product", "Vulnerability"));
        assert!(s.forms_pair("Product", "Vulnerability"));
        assert!(!s.forms_pair("Site", "Product"));
        assert_eq!(s.inherited_by("Technology").collect::<Vec<_>>(), ["Product"]);
        assert!(s.problems().is_empty());
    }

    #[test]
    fn overlapping_roles_are_reported() {
        let mut s = product_schema();
        s.attaching_types.insert("Product".into());
        s.inheritance_pairs.insert(("Site".into(), "Product".into()));
        let problems = s.problems();
        assert!(problems.iter().any(|p| p.contains("both attaching and inherited")));
        assert!(problems.iter().any(|p| p.contains("\"Site\" is not an attaching type")));
    }

    #[test]
    fn json_field_names() {
        let json = serde_json::to_value(product_schema()).unwrap();
        assert!(json.get("nodeTypes").is_some());
        assert!(json.get("inheritancePairs").unwrap().as_array().unwrap()[0].is_array());
    }
}
