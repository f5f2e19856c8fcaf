//! Scenario files: a single JSON document describing the sequence family,
//! solver parameters, dynamics parameters and render slice. Identical
//! scenario files produce bitwise-identical outputs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::RenderWindow;
use crate::error::{Error, Result};
use crate::germ::{GermMap, GermMapJson, MultiIndex, Polynomial, TermJson};
use crate::maps::{
    perturb, random_triangular_germs, random_weak_shifts, AttractionBounds, AutoSequence,
    ElementaryMap, HenonMap, PerturbedWeakShift, PolyMap, WeakShift,
};

fn complex(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsSpec {
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSpec {
    /// Germ agreement order (defaults to the least order implied by bounds).
    pub order: Option<u32>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_horizon() -> usize {
    32
}

fn default_tol() -> f64 {
    1e-9
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            order: None,
            horizon: default_horizon(),
            tol: default_tol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsSpec {
    /// Perturbation degree for weak-shift families.
    pub degree: Option<u32>,
    #[serde(default = "default_r_tilde")]
    pub r_tilde: f64,
    #[serde(default = "default_maxiter")]
    pub maxiter: usize,
    #[serde(default = "default_green_tol")]
    pub green_tol: f64,
    /// Explicit probe points; when absent, `samples` seeded points are drawn
    /// from the forward sectors.
    #[serde(default)]
    pub points: Vec<Vec<[f64; 2]>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Period for the Green functional-equation check.
    #[serde(default = "default_period_check")]
    pub period_check: usize,
}

fn default_r_tilde() -> f64 {
    0.05
}

fn default_maxiter() -> usize {
    256
}

fn default_green_tol() -> f64 {
    1e-6
}

fn default_samples() -> usize {
    100
}

fn default_period_check() -> usize {
    1
}

impl Default for DynamicsSpec {
    fn default() -> Self {
        DynamicsSpec {
            degree: None,
            r_tilde: default_r_tilde(),
            maxiter: default_maxiter(),
            green_tol: default_green_tol(),
            points: Vec::new(),
            samples: default_samples(),
            period_check: default_period_check(),
        }
    }
}

/// Family-specific coefficient payloads.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CoeffSpec {
    /// Hénon factors: delta and the univariate polynomial (ascending degree).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub henon: Vec<HenonCoeffs>,
    /// Triangular factors per index.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elementary: Vec<ElementaryCoeffs>,
    /// Weak shifts per index.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weakshift: Vec<WeakShiftCoeffs>,
    /// Explicit germ pairs per index.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub germs: Vec<GermPairJson>,
    /// Declared weak-shift family degree.
    pub family_degree: Option<u32>,
    /// Box bounds for seeded coefficient draws.
    pub coeff_min: Option<f64>,
    pub coeff_max: Option<f64>,
    /// Seeded triangular-germ draw parameters (family = "custom").
    pub diag_min: Option<f64>,
    pub diag_max: Option<f64>,
    pub subdiag_max: Option<f64>,
    pub higher_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HenonCoeffs {
    pub delta: [f64; 2],
    pub p: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementaryCoeffs {
    /// 0-based modified coordinate.
    pub target: usize,
    pub a: [f64; 2],
    #[serde(default)]
    pub p: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeakShiftCoeffs {
    pub a: [f64; 2],
    #[serde(default)]
    pub p: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GermPairJson {
    pub forward: GermMapJson,
    pub inverse: Option<GermMapJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub k: usize,
    /// `henon | elementary | weakshift | perturbed | custom`.
    pub family: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_period")]
    pub period: usize,
    #[serde(default)]
    pub coeffs: CoeffSpec,
    pub bounds: Option<BoundsSpec>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub dynamics: DynamicsSpec,
    pub render: Option<RenderWindow>,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
}

fn default_schema_version() -> u32 {
    1
}

fn default_period() -> usize {
    1
}

fn default_out_dir() -> String {
    "out".into()
}

fn terms_to_poly(terms: &[TermJson], vars: usize, cap: u32, path: &str) -> Result<Polynomial> {
    let mut p = Polynomial::zero(vars, cap);
    for (i, t) in terms.iter().enumerate() {
        if t.exponents.len() != vars {
            return Err(Error::schema(
                format!("{path}[{i}].exponents"),
                format!("expected {vars} exponents, got {}", t.exponents.len()),
            ));
        }
        let m = MultiIndex::new(t.exponents.clone());
        if m.degree() > cap {
            return Err(Error::schema(
                format!("{path}[{i}].exponents"),
                format!("degree {} exceeds the cap {cap}", m.degree()),
            ));
        }
        p.add_to_coeff(m, Complex64::new(t.re, t.im));
    }
    Ok(p)
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        let sc: Scenario = serde_json::from_str(text)
            .map_err(|e| Error::schema("$", e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != 1 {
            return Err(Error::schema(
                "schema_version",
                format!("unsupported version {}", self.schema_version),
            ));
        }
        if self.k < 2 {
            return Err(Error::schema("k", "dimension must be >= 2"));
        }
        if self.period < 1 {
            return Err(Error::schema("period", "period must be >= 1"));
        }
        match self.family.as_str() {
            "henon" => {
                if self.k != 2 {
                    return Err(Error::schema("k", "henon scenarios need k = 2"));
                }
                if self.coeffs.henon.is_empty() {
                    return Err(Error::schema("coeffs.henon", "at least one map required"));
                }
            }
            "elementary" => {
                if self.coeffs.elementary.is_empty() {
                    return Err(Error::schema(
                        "coeffs.elementary",
                        "at least one map required",
                    ));
                }
            }
            "weakshift" | "perturbed" => {
                if self.coeffs.weakshift.is_empty() && self.coeffs.family_degree.is_none() {
                    return Err(Error::schema(
                        "coeffs.family_degree",
                        "seeded weak-shift scenarios need a declared family degree",
                    ));
                }
                if self.family == "perturbed" && self.dynamics.degree.is_none() {
                    return Err(Error::schema(
                        "dynamics.degree",
                        "perturbed scenarios need the perturbation degree",
                    ));
                }
            }
            "custom" => {}
            other => {
                return Err(Error::schema(
                    "family",
                    format!(
                        "unknown family `{other}` \
                         (expected henon|elementary|weakshift|perturbed|custom)"
                    ),
                ));
            }
        }
        if let Some(b) = &self.bounds {
            AttractionBounds::new(b.lower, b.upper, b.r)
                .map_err(|e| Error::schema("bounds", e.to_string()))?;
        }
        Ok(())
    }

    pub fn attraction_bounds(&self) -> Option<AttractionBounds> {
        self.bounds
            .as_ref()
            .and_then(|b| AttractionBounds::new(b.lower, b.upper, b.r).ok())
    }

    /// Germ order: explicit, otherwise derived from the bounds.
    pub fn solve_order(&self) -> Result<u32> {
        if let Some(o) = self.solver.order {
            return Ok(o);
        }
        self.attraction_bounds()
            .map(|b| b.germ_order())
            .ok_or_else(|| Error::schema("solver.order", "no order and no bounds to derive it"))
    }

    /// The weak shifts of a weakshift/perturbed scenario (explicit or seeded).
    pub fn weak_shifts(&self) -> Result<Vec<WeakShift>> {
        let degree = self.coeffs.family_degree.unwrap_or_else(|| {
            self.coeffs
                .weakshift
                .iter()
                .flat_map(|w| w.p.iter().map(|t| t.exponents.iter().sum::<u32>()))
                .max()
                .unwrap_or(1)
                .max(1)
        });
        if self.coeffs.weakshift.is_empty() {
            let lo = self.coeffs.coeff_min.unwrap_or(0.3);
            let hi = self.coeffs.coeff_max.unwrap_or(0.7);
            random_weak_shifts(self.k, degree, self.seed, self.period, lo, hi)
        } else {
            self.coeffs
                .weakshift
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let p = terms_to_poly(
                        &w.p,
                        self.k - 1,
                        degree,
                        &format!("coeffs.weakshift[{i}].p"),
                    )?;
                    WeakShift::new(self.k, complex(w.a), p, degree)
                })
                .collect()
        }
    }

    /// The perturbed family of a `perturbed` scenario.
    pub fn perturbed_family(&self) -> Result<Vec<PerturbedWeakShift>> {
        let degree = self.dynamics.degree.ok_or_else(|| {
            Error::schema("dynamics.degree", "perturbation degree required")
        })?;
        perturb(&self.weak_shifts()?, degree)
    }

    /// Build the scenario's sequence.
    pub fn sequence(&self) -> Result<AutoSequence> {
        let maps: Vec<PolyMap> = match self.family.as_str() {
            "henon" => self
                .coeffs
                .henon
                .iter()
                .map(|h| {
                    let coeffs: Vec<Complex64> = h.p.iter().map(|&c| complex(c)).collect();
                    Ok(PolyMap::Henon(HenonMap::new(
                        complex(h.delta),
                        Polynomial::univariate(&coeffs),
                    )?))
                })
                .collect::<Result<_>>()?,
            "elementary" => self
                .coeffs
                .elementary
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let p = terms_to_poly(
                        &e.p,
                        self.k - 1,
                        self.solver.order.unwrap_or(8),
                        &format!("coeffs.elementary[{i}].p"),
                    )?;
                    Ok(PolyMap::Elementary(ElementaryMap::new(
                        self.k,
                        e.target,
                        complex(e.a),
                        p,
                    )?))
                })
                .collect::<Result<_>>()?,
            "weakshift" => self
                .weak_shifts()?
                .into_iter()
                .map(PolyMap::Shift)
                .collect(),
            "perturbed" => self
                .perturbed_family()?
                .into_iter()
                .map(PolyMap::Perturbed)
                .collect(),
            "custom" => {
                if self.coeffs.germs.is_empty() {
                    let order = self.solve_order()?;
                    let seq = random_triangular_germs(
                        self.k,
                        order,
                        self.seed,
                        self.period,
                        self.coeffs.diag_min.unwrap_or(0.35),
                        self.coeffs.diag_max.unwrap_or(0.55),
                        self.coeffs.subdiag_max.unwrap_or(0.05),
                        self.coeffs.higher_max.unwrap_or(0.05),
                    )?;
                    return Ok(match self.attraction_bounds() {
                        Some(b) => seq.with_bounds(b),
                        None => seq,
                    });
                }
                self.coeffs
                    .germs
                    .iter()
                    .map(|g| {
                        let forward = GermMap::try_from(&g.forward)?;
                        let inverse = match &g.inverse {
                            Some(j) => Some(GermMap::try_from(j)?),
                            None => None,
                        };
                        Ok(PolyMap::Germ { forward, inverse })
                    })
                    .collect::<Result<_>>()?
            }
            _ => unreachable!("validated family"),
        };
        let seq = AutoSequence::periodic(maps)?;
        Ok(match self.attraction_bounds() {
            Some(b) => seq.with_bounds(b),
            None => seq,
        })
    }

    /// Probe points for dynamics commands: explicit when given, otherwise
    /// seeded samples of the forward sectors at the given radius.
    pub fn probe_points(&self, radius: f64) -> Vec<Vec<Complex64>> {
        if !self.dynamics.points.is_empty() {
            return self
                .dynamics
                .points
                .iter()
                .map(|p| p.iter().map(|&c| complex(c)).collect())
                .collect();
        }
        crate::dynamics::sample_plus_region(self.k, radius, self.dynamics.samples, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_perturbed_scenario_parses() {
        let text = r#"{
            "k": 3,
            "family": "perturbed",
            "seed": 5,
            "period": 2,
            "coeffs": {"family_degree": 2, "coeff_min": 0.3, "coeff_max": 0.6},
            "dynamics": {"degree": 4}
        }"#;
        let sc = Scenario::from_json(text).unwrap();
        let family = sc.perturbed_family().unwrap();
        assert_eq!(family.len(), 2);
        assert_eq!(family[0].degree, 4);
        let seq = sc.sequence().unwrap();
        assert_eq!(seq.k(), 3);
    }

    #[test]
    fn missing_k_is_a_schema_error_naming_the_field() {
        let text = r#"{"family": "custom"}"#;
        let err = Scenario::from_json(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('k'), "message must name the field: {msg}");
    }

    #[test]
    fn unknown_family_is_rejected() {
        let text = r#"{"k": 2, "family": "unknown"}"#;
        assert!(Scenario::from_json(text).is_err());
    }

    #[test]
    fn henon_scenario_builds_maps() {
        let text = r#"{
            "k": 2,
            "family": "henon",
            "coeffs": {"henon": [{"delta": [1.0, 0.0], "p": [[0,0],[0,0],[1,0]]}]}
        }"#;
        let sc = Scenario::from_json(text).unwrap();
        let seq = sc.sequence().unwrap();
        let w = seq.map(0).evaluate(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert_eq!(w, vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]);
    }

    #[test]
    fn custom_seeded_scenario_is_deterministic() {
        let text = r#"{
            "k": 2,
            "family": "custom",
            "seed": 9,
            "period": 3,
            "bounds": {"A": 0.3, "B": 0.6, "r": 1.0},
            "solver": {"horizon": 8}
        }"#;
        let a = Scenario::from_json(text).unwrap().sequence().unwrap();
        let b = Scenario::from_json(text).unwrap().sequence().unwrap();
        let z = vec![Complex64::new(0.2, 0.1); 2];
        for n in 0..6 {
            assert_eq!(a.map(n).evaluate(&z), b.map(n).evaluate(&z));
        }
    }
}
