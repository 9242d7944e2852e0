use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueType {
    String,
    Integer,
    Decimal,
    Boolean,
}

impl ValueType {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueType::String => "string",
            ValueType::Integer => "integer",
            ValueType::Decimal => "decimal",
            ValueType::Boolean => "boolean",
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, ValueType::Integer | ValueType::Decimal)
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValueType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "string" => Ok(ValueType::String),
            "integer" => Ok(ValueType::Integer),
            "decimal" => Ok(ValueType::Decimal),
            "boolean" => Ok(ValueType::Boolean),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDef {
    pub owner: String,
    pub value_type: ValueType,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("line {line}: unknown value type `{found}`")]
    UnknownType { line: usize, found: String },
    #[error("line {line}: duplicate attribute `{name}`")]
    DuplicateAttribute { line: usize, name: String },
    #[error("line {line}: attribute `{name}` declared on undeclared class `{class}`")]
    UndeclaredClass {
        line: usize,
        name: String,
        class: String,
    },
    #[error("line {line}: duplicate class `{name}`")]
    DuplicateClass { line: usize, name: String },
    #[error("line {line}: cannot parse `{text}`")]
    Syntax { line: usize, text: String },
    #[error("`{0}` is declared by more than one schema")]
    MergeConflict(String),
}

/// Terminology box: classes and their typed attributes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OntologySchema {
    /// Class names in declaration order.
    pub classes: Vec<String>,
    pub attributes: BTreeMap<String, AttributeDef>,
}

const HOTEL: &str = include_str!("../../data/hotel.schema");
const HOSPITAL: &str = include_str!("../../data/hospital.schema");

impl OntologySchema {
    pub fn hotel() -> Self {
        load_schema(HOTEL).expect("bundled hotel schema is valid")
    }

    pub fn hospital() -> Self {
        load_schema(HOSPITAL).expect("bundled hospital schema is valid")
    }

    /// Union of two schemas; a class or attribute may be declared once.
    pub fn merge(mut self, other: OntologySchema) -> Result<Self, SchemaError> {
        for c in other.classes {
            if self.has_class(&c) {
                return Err(SchemaError::MergeConflict(c));
            }
            self.classes.push(c);
        }
        for (name, def) in other.attributes {
            if self.attributes.contains_key(&name) {
                return Err(SchemaError::MergeConflict(name));
            }
            self.attributes.insert(name, def);
        }
        Ok(self)
    }

    pub fn has_class(&self, name: &str) -> bool {
        self.classes.iter().any(|c| c == name)
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeDef> {
        self.attributes.get(name)
    }

    /// Attribute names owned by `class`, sorted.
    pub fn attributes_of<'a>(&'a self, class: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.attributes
            .iter()
            .filter(move |(_, d)| d.owner == class)
            .map(|(n, _)| n.as_str())
    }
}

/// Parse `class <Name>` and `attr <name> <Class> <type>` lines.
/// Attributes must follow the class they belong to.
pub fn load_schema(text: &str) -> Result<OntologySchema, SchemaError> {
    let mut schema = OntologySchema::default();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        match words.as_slice() {
            ["class", name] => {
                if schema.has_class(name) {
                    return Err(SchemaError::DuplicateClass {
                        line,
                        name: name.to_string(),
                    });
                }
                schema.classes.push(name.to_string());
            }
            ["attr", name, class, ty] => {
                let value_type = ty.parse().map_err(|found| SchemaError::UnknownType { line, found })?;
                if !schema.has_class(class) {
                    return Err(SchemaError::UndeclaredClass {
                        line,
                        name: name.to_string(),
                        class: class.to_string(),
                    });
                }
                if schema.attributes.contains_key(*name) {
                    return Err(SchemaError::DuplicateAttribute {
                        line,
                        name: name.to_string(),
                    });
                }
                schema.attributes.insert(
                    name.to_string(),
                    AttributeDef {
                        owner: class.to_string(),
                        value_type,
                    },
                );
            }
            _ => {
                return Err(SchemaError::Syntax {
                    line,
                    text: body.to_string(),
                })
            }
        }
    }
    Ok(schema)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_hotel_schema() {
        let s = OntologySchema::hotel();
        assert_eq!(s.classes, ["Hotel"]);
        let ty = |a: &str| s.attribute(a).unwrap().value_type;
        assert_eq!(ty("numrooms"), ValueType::Integer);
        assert_eq!(ty("distfromairport"), ValueType::Decimal);
        assert_eq!(ty("restaurant"), ValueType::Boolean);
        assert_eq!(ty("ambiencestr"), ValueType::String);
        // every listed hotel attribute is present
        assert!(s.attributes.len() >= 60);
        for a in ["shoppingArcade", "conciierge", "swimmingpool", "distfrombusstand", "tariffamt"] {
            assert!(s.attribute(a).is_some(), "{a}");
        }
    }

    #[test]
    fn class_only() {
        let s = load_schema("class Hotel").unwrap();
        assert_eq!(s.classes, ["Hotel"]);
        assert!(s.attributes.is_empty());
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(
            load_schema("attr rooms Hotel integer"),
            Err(SchemaError::UndeclaredClass {
                line: 1,
                name: "rooms".into(),
                class: "Hotel".into()
            })
        );
        assert!(matches!(
            load_schema("class Hotel\n# x\nattr rooms Hotel number"),
            Err(SchemaError::UnknownType { line: 3, .. })
        ));
        assert!(matches!(
            load_schema("class Hotel\nattr a Hotel string\nattr a Hotel string"),
            Err(SchemaError::DuplicateAttribute { line: 3, .. })
        ));
        assert!(matches!(
            load_schema("klass Hotel"),
            Err(SchemaError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn merging() {
        let both = OntologySchema::hotel().merge(OntologySchema::hospital()).unwrap();
        assert_eq!(both.classes, ["Hotel", "Hospital"]);
        assert_eq!(both.attribute("numbeds").unwrap().owner, "Hospital");
        assert_eq!(
            OntologySchema::hotel().merge(OntologySchema::hotel()),
            Err(SchemaError::MergeConflict("Hotel".into()))
        );
    }
}
