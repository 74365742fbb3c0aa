use serde::{Deserialize, Serialize};

use super::{Edge, Model, Object};
use crate::error::{Error, Result};
use crate::group::MAX_GENERATORS;
use crate::handles::HandleLedger;

/// The on-disk form of a [`Model`]: objects and edges sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub generators: usize,
    pub objects: Vec<Object>,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub ledger: HandleLedger,
}

impl From<&Model> for Document {
    fn from(m: &Model) -> Self {
        Document {
            generators: m.generators,
            objects: m.objects.values().cloned().collect(),
            edges: m.edges.values().cloned().collect(),
            ledger: m.ledger.clone(),
        }
    }
}

impl TryFrom<Document> for Model {
    type Error = Error;

    fn try_from(doc: Document) -> Result<Model> {
        if doc.generators > MAX_GENERATORS {
            return Err(Error::Malformed(format!("at most {MAX_GENERATORS} generators are supported")));
        }
        let mut m = Model::new(doc.generators);
        for o in doc.objects {
            if m.contains(o.id) {
                return Err(Error::Malformed(format!("duplicate object id {}", o.id)));
            }
            m.insert_object(o);
        }
        for e in doc.edges {
            if m.edges.contains_key(&e.id) {
                return Err(Error::Malformed(format!("duplicate edge id {}", e.id)));
            }
            for x in e.endpoints {
                if !m.contains(x) {
                    return Err(Error::Malformed(format!("edge {} references missing object {x}", e.id)));
                }
            }
            if e.label.generator_bound() > m.generators {
                return Err(Error::Malformed(format!("edge {} label {} uses an undeclared generator", e.id, e.label)));
            }
            m.insert_edge(e);
        }
        for o in m.objects.values() {
            if let Some(p) = o.cancels {
                m.next_pairing = m.next_pairing.max(p.0 + 1);
            }
        }
        m.ledger = doc.ledger;
        Ok(m)
    }
}

impl Model {
    pub fn to_document(&self) -> Document {
        Document::from(self)
    }

    /// Pretty JSON with a trailing newline; stable for identical models.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_document()).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Model> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        Model::try_from(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupWord;

    #[test]
    fn round_trip_small_model() {
        let mut m = Model::new(2);
        let pair = m.add_sphere_pair();
        m.add_paired_intersections(pair.sphere_a, pair.sphere_b, GroupWord::parse("a b'", 2).unwrap()).unwrap();
        let text = m.to_json();
        assert!(text.contains("\"generators\""));
        assert!(text.contains("\"label\": \"a b'\""));
        let back = Model::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_dangling_edge() {
        let text = r#"{"generators":1,"objects":[],"edges":[{"id":0,"endpoints":[0,1],"label":"a"}]}"#;
        assert!(matches!(Model::from_json(text), Err(Error::Malformed(_))));
    }

    #[test]
    fn rejects_undeclared_generator() {
        let text = r#"{"generators":1,"objects":[{"id":0,"kind":"sphere","class":0}],
            "edges":[{"id":0,"endpoints":[0,0],"label":"b"}]}"#;
        assert!(matches!(Model::from_json(text), Err(Error::Malformed(_))));
    }
}
