use std::fmt;

use serde::{Deserialize, Serialize};

use super::DataError;

/// Concept identifier (a THINGS id such as `aardvark`).
///
/// Identity is exact string equality after trimming surrounding whitespace.
/// No case folding is applied.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConceptId(String);

impl ConceptId {
    pub fn new(name: impl AsRef<str>) -> Result<Self, DataError> {
        let trimmed = name.as_ref().trim();
        if trimmed.is_empty() {
            return Err(DataError::EmptyName { field: "concept" });
        }
        Ok(ConceptId(trimmed.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ConceptId {
    type Error = DataError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        ConceptId::new(value)
    }
}

impl From<ConceptId> for String {
    fn from(id: ConceptId) -> String {
        id.0
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for ConceptId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// An attribute (norm) together with its type or domain label, e.g.
/// `is_red` / `visual-colour`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "AttributeRepr", into = "AttributeRepr")]
pub struct AttributeId {
    name: String,
    type_label: String,
}

#[derive(Serialize, Deserialize)]
struct AttributeRepr {
    name: String,
    type_label: String,
}

impl AttributeId {
    pub fn new(name: impl AsRef<str>, type_label: impl AsRef<str>) -> Result<Self, DataError> {
        let name = name.as_ref().trim();
        if name.is_empty() {
            return Err(DataError::EmptyName { field: "attribute" });
        }
        let type_label = type_label.as_ref().trim();
        if type_label.is_empty() {
            return Err(DataError::EmptyName {
                field: "attribute type",
            });
        }
        Ok(AttributeId {
            name: name.to_owned(),
            type_label: type_label.to_owned(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn type_label(&self) -> &str {
        &self.type_label
    }

    /// Same attribute name under a different type label.
    pub fn with_type(&self, type_label: &str) -> Result<Self, DataError> {
        AttributeId::new(&self.name, type_label)
    }
}

impl TryFrom<AttributeRepr> for AttributeId {
    type Error = DataError;

    fn try_from(repr: AttributeRepr) -> Result<Self, Self::Error> {
        AttributeId::new(repr.name, repr.type_label)
    }
}

impl From<AttributeId> for AttributeRepr {
    fn from(id: AttributeId) -> Self {
        AttributeRepr {
            name: id.name,
            type_label: id.type_label,
        }
    }
}

impl fmt::Display for AttributeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concept_ids_are_trimmed() {
        let id = ConceptId::new("  rose\t").unwrap();
        assert_eq!(id.as_str(), "rose");
        assert_eq!(id, ConceptId::new("rose").unwrap());
    }

    #[test]
    fn no_case_folding() {
        assert_ne!(
            ConceptId::new("Bow").unwrap(),
            ConceptId::new("bow").unwrap()
        );
    }

    #[test]
    fn empty_names_rejected() {
        assert!(matches!(
            ConceptId::new("   "),
            Err(DataError::EmptyName { field: "concept" })
        ));
        assert!(AttributeId::new("is_red", "").is_err());
        assert!(AttributeId::new("", "visual-colour").is_err());
    }
}
