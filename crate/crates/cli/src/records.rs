//! CSV row types written by the subcommands. Floats are written with 15
//! significant digits and read back with the same types.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};

pub fn sig15<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt15(*v))
}

/// `v` with 15 significant digits.
pub fn fmt15(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.14e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRow {
    #[serde(serialize_with = "sig15")]
    pub theta: f64,
    #[serde(serialize_with = "sig15")]
    pub residual: f64,
    #[serde(rename = "psi_M", serialize_with = "sig15")]
    pub psi_m: f64,
    #[serde(rename = "integral_I", serialize_with = "sig15")]
    pub integral_i: f64,
    #[serde(rename = "dG_dtheta", serialize_with = "sig15")]
    pub dg_dtheta: f64,
    #[serde(serialize_with = "sig15")]
    pub alpha_per_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaRow {
    #[serde(serialize_with = "sig15")]
    pub theta: f64,
    #[serde(serialize_with = "sig15")]
    pub omega: f64,
    #[serde(serialize_with = "sig15")]
    pub alpha: f64,
    #[serde(serialize_with = "sig15")]
    pub alpha_per_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeRow {
    #[serde(serialize_with = "sig15")]
    pub epsilon: f64,
    #[serde(serialize_with = "sig15")]
    pub lambda: f64,
    #[serde(rename = "error_L2", serialize_with = "sig15")]
    pub error_l2: f64,
    #[serde(serialize_with = "sig15")]
    pub alpha_estimate: f64,
    pub reference_kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AiryRow {
    #[serde(serialize_with = "sig15")]
    pub x: f64,
    #[serde(rename = "Ai", serialize_with = "sig15")]
    pub ai: f64,
    #[serde(rename = "dAi", serialize_with = "sig15")]
    pub dai: f64,
    #[serde(rename = "Bi", serialize_with = "sig15")]
    pub bi: f64,
    #[serde(rename = "dBi", serialize_with = "sig15")]
    pub dbi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    #[serde(serialize_with = "sig15")]
    pub r: f64,
    #[serde(rename = "Psi", serialize_with = "sig15")]
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    #[serde(serialize_with = "sig15")]
    pub x: f64,
    #[serde(serialize_with = "sig15")]
    pub y: f64,
    #[serde(rename = "G_re", serialize_with = "sig15")]
    pub g_re: f64,
    #[serde(rename = "G_im", serialize_with = "sig15")]
    pub g_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classify3dRow {
    #[serde(serialize_with = "sig15")]
    pub theta: f64,
    #[serde(serialize_with = "sig15")]
    pub omega: f64,
    pub verdict: String,
    /// `inf` for the free Laplacian.
    #[serde(serialize_with = "sig15")]
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiRow {
    #[serde(serialize_with = "sig15")]
    pub xi: f64,
    pub index: usize,
    #[serde(serialize_with = "sig15")]
    pub theta_airy: f64,
    #[serde(serialize_with = "sig15")]
    pub theta_ode: f64,
    #[serde(serialize_with = "sig15")]
    pub discrepancy: f64,
    #[serde(serialize_with = "sig15")]
    pub alpha_per_omega: f64,
}

pub fn write_csv<T: Serialize, W: Write>(out: W, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned, R: Read>(input: R) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
