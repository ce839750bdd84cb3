//! JSON files for representations: `.vrep.json` and `.hrep.json`.
//!
//! Rationals are strings `"num/den"`; vectors are arrays of such strings.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{HRep, VRep};
use crate::error::Result;

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn save_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_json(value)? + "\n")?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Loads and validates a V-representation (dimensions, duplicates).
pub fn load_vrep(path: impl AsRef<Path>) -> Result<VRep> {
    let raw: VRep = load_json(path)?;
    VRep::new(raw.dim, raw.vertices, raw.lineality)
}

pub fn load_hrep(path: impl AsRef<Path>) -> Result<HRep> {
    let raw: HRep = load_json(path)?;
    HRep::new(raw.dim, raw.inequalities, raw.equations)
}

pub fn parse_vrep(text: &str) -> Result<VRep> {
    let raw: VRep = serde_json::from_str(text)?;
    VRep::new(raw.dim, raw.vertices, raw.lineality)
}

pub fn parse_hrep(text: &str) -> Result<HRep> {
    let raw: HRep = serde_json::from_str(text)?;
    HRep::new(raw.dim, raw.inequalities, raw.equations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::kernel::Constraint;
    use crate::rat::{Rat, RatVec};
    use crate::ratvec;

    #[test]
    fn vrep_wire_format() {
        let v = VRep::from_points(2, vec![ratvec![0, 1], RatVec::new(vec![Rat::new(1, 2), Rat::zero()])]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"dim":2,"vertices":[["0/1","1/1"],["1/2","0/1"]],"lineality":[]}"#);
        assert_eq!(parse_vrep(&s).unwrap(), v);
    }

    #[test]
    fn hrep_wire_format() {
        let h = HRep::new(1, vec![Constraint::new(ratvec![1], Rat::new(3, 4))], vec![]).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, r#"{"dim":1,"inequalities":[{"a":["1/1"],"b":"3/4"}],"equations":[]}"#);
        assert_eq!(parse_hrep(&s).unwrap(), h);
    }

    #[test]
    fn rejects_bad_dims() {
        let s = r#"{"dim":2,"vertices":[["0/1"]]}"#;
        assert!(matches!(parse_vrep(s), Err(Error::DimensionMismatch { .. })));
        let s = r#"{"dim":2,"vertices":[["0/1","x"]]}"#;
        assert!(parse_vrep(s).is_err());
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sq.hrep.json");
        let h = HRep::unit_cube(2);
        save_json(&p, &h).unwrap();
        assert_eq!(load_hrep(&p).unwrap(), h);
    }
}
