//! JSON forms of fields, rings, maps and points.

use num_bigint::BigInt;
use periodlab_core::dvr::DEFAULT_PRECISION_PER_E;
use periodlab_core::dynamics::{MapSpec, Monomial, Point, Polynomial, Space};
use periodlab_core::{DvrElement, Eisenstein, FieldElem, FieldSpec, RingSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// An integer written either as a JSON number or as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntLit {
    Int(i64),
    Uint(u64),
    Str(String),
}

impl IntLit {
    pub fn to_bigint(&self) -> Result<BigInt> {
        match self {
            IntLit::Int(n) => Ok(BigInt::from(*n)),
            IntLit::Uint(n) => Ok(BigInt::from(*n)),
            IntLit::Str(s) => s.trim().parse().map_err(|_| CliError::Schema(format!("`{s}` is not an integer"))),
        }
    }

    /// A number when it fits in `i64`, a string otherwise.
    pub fn number(n: &BigInt) -> Self {
        i64::try_from(n).map_or_else(|_| IntLit::Str(n.to_string()), IntLit::Int)
    }

    pub fn string(n: &BigInt) -> Self {
        IntLit::Str(n.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpecDto {
    pub p: u64,
    #[serde(default = "one")]
    pub f: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

fn one() -> u32 {
    1
}

impl FieldSpecDto {
    pub fn build(&self) -> Result<FieldSpec> {
        match &self.modulus {
            None => Ok(FieldSpec::new(self.p, self.f)?),
            Some(m) => {
                if m.len() != self.f as usize + 1 {
                    return Err(CliError::Schema(format!("modulus has degree {}, expected f = {}", m.len().saturating_sub(1), self.f)));
                }
                Ok(FieldSpec::with_modulus(self.p, m.clone())?)
            }
        }
    }
}

impl From<&FieldSpec> for FieldSpecDto {
    fn from(k: &FieldSpec) -> Self {
        FieldSpecDto { p: k.p(), f: k.degree(), modulus: Some(k.modulus().to_vec()) }
    }
}

/// `"default"`, `"zeta_p"`, `"alternate"` or explicit coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EisensteinDto {
    Preset(String),
    Coefficients(Vec<IntLit>),
}

impl Default for EisensteinDto {
    fn default() -> Self {
        EisensteinDto::Preset("default".into())
    }
}

impl EisensteinDto {
    pub fn build(&self, p: u64, e: u32) -> Result<Eisenstein> {
        match self {
            EisensteinDto::Preset(name) => match name.as_str() {
                "default" => Ok(Eisenstein::Default),
                "zeta_p" => Ok(Eisenstein::ZetaP),
                "alternate" => Ok(Eisenstein::alternate(p, e)),
                other => Err(CliError::Schema(format!("unknown Eisenstein preset `{other}`"))),
            },
            EisensteinDto::Coefficients(c) => Ok(Eisenstein::Custom(c.iter().map(IntLit::to_bigint).collect::<Result<_>>()?)),
        }
    }

    /// Parses the command-line form: a preset name or comma-separated
    /// coefficients.
    pub fn parse(s: &str) -> Result<Self> {
        if s.contains(',') || s.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()) {
            let coeffs = s.split(',').map(|c| IntLit::Str(c.trim().to_string())).collect::<Vec<_>>();
            for c in &coeffs {
                c.to_bigint()?;
            }
            Ok(EisensteinDto::Coefficients(coeffs))
        } else {
            Ok(EisensteinDto::Preset(s.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpecDto {
    pub p: u64,
    #[serde(default = "one")]
    pub f: u32,
    #[serde(default = "one")]
    pub e: u32,
    #[serde(default)]
    pub eisenstein: EisensteinDto,
    /// Defaults to `6e`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
}

impl RingSpecDto {
    pub fn build(&self) -> Result<RingSpec> {
        let choice = self.eisenstein.build(self.p, self.e)?;
        let precision = self.precision.unwrap_or(DEFAULT_PRECISION_PER_E * self.e);
        Ok(RingSpec::new(self.p, self.f, self.e, choice, precision)?)
    }
}

impl From<&RingSpec> for RingSpecDto {
    fn from(r: &RingSpec) -> Self {
        RingSpecDto {
            p: r.p(),
            f: r.f(),
            e: r.e(),
            eisenstein: EisensteinDto::Coefficients(r.eisenstein().iter().map(IntLit::number).collect()),
            precision: Some(periodlab_core::Ring::precision(r)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceDto {
    Affine,
    Projective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialDto {
    pub exps: Vec<u32>,
    pub coeff: IntLit,
    /// Power of the uniformizer multiplying the term.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub pi: u32,
}

fn is_zero(n: &u32) -> bool {
    *n == 0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDto {
    pub monomials: Vec<MonomialDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpecDto {
    pub space: SpaceDto,
    pub dim: usize,
    pub polys: Vec<PolyDto>,
}

impl MapSpecDto {
    pub fn build(&self) -> Result<MapSpec> {
        let space = match self.space {
            SpaceDto::Affine => Space::Affine,
            SpaceDto::Projective => Space::Projective,
        };
        let nvars = space.coords(self.dim);
        let polys = self
            .polys
            .iter()
            .enumerate()
            .map(|(i, poly)| {
                let mut terms = Vec::with_capacity(poly.monomials.len());
                for m in &poly.monomials {
                    if m.exps.len() != nvars {
                        return Err(CliError::Schema(format!(
                            "polynomial {i}: monomial has {} exponents, expected {nvars}",
                            m.exps.len()
                        )));
                    }
                    terms.push((Monomial { exps: m.exps.clone(), pi: m.pi }, m.coeff.to_bigint()?));
                }
                Polynomial::from_terms(nvars, terms).ok_or_else(|| CliError::Schema(format!("polynomial {i} is malformed")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MapSpec::new(space, self.dim, polys)?)
    }
}

impl From<&MapSpec> for MapSpecDto {
    fn from(map: &MapSpec) -> Self {
        let space = match map.space() {
            Space::Affine => SpaceDto::Affine,
            Space::Projective => SpaceDto::Projective,
        };
        let polys = map
            .polys()
            .iter()
            .map(|p| PolyDto {
                monomials: p
                    .terms()
                    .map(|(m, c)| MonomialDto { exps: m.exps.clone(), coeff: IntLit::string(c), pi: m.pi })
                    .collect(),
            })
            .collect();
        MapSpecDto { space, dim: map.dim(), polys }
    }
}

/// A residue-field element: an index in the base-`p` digit enumeration, or
/// its coefficient array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldElemDto {
    Index(u64),
    Coefficients(Vec<u64>),
}

impl FieldElemDto {
    pub fn build(&self, k: &FieldSpec) -> Result<FieldElem> {
        match self {
            FieldElemDto::Index(i) if *i < k.size() => Ok(k.elem_from_index(*i)),
            FieldElemDto::Index(i) => Err(CliError::Schema(format!("index {i} is outside a field of size {}", k.size()))),
            FieldElemDto::Coefficients(c) => {
                if c.iter().any(|&x| x >= k.p()) {
                    return Err(CliError::Schema(format!("coefficients {c:?} are not reduced mod {}", k.p())));
                }
                Ok(k.elem(c)?)
            }
        }
    }
}

pub fn field_point(k: &FieldSpec, coords: &[FieldElemDto]) -> Result<Point<FieldElem>> {
    Ok(Point(coords.iter().map(|c| c.build(k)).collect::<Result<_>>()?))
}

/// Coordinates as nested coefficient arrays, plus plain integers when the
/// ring is `Z/p^N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDto {
    pub coords: Vec<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integers: Option<Vec<u64>>,
}

impl PointDto {
    pub fn from_ring(ring: &RingSpec, pt: &Point<DvrElement>) -> Self {
        PointDto {
            coords: pt.0.iter().map(|x| x.coeffs().to_vec()).collect(),
            integers: pt.0.iter().map(|x| ring.as_integer(x)).collect(),
        }
    }

    pub fn from_field(pt: &Point<FieldElem>) -> Self {
        PointDto {
            coords: pt.0.iter().map(|x| vec![x.coeffs().to_vec()]).collect(),
            integers: pt.0.iter().map(|x| (x.coeffs().len() == 1).then(|| x.coeffs()[0])).collect(),
        }
    }

    pub fn build(&self, ring: &RingSpec) -> Result<Point<DvrElement>> {
        Ok(Point(self.coords.iter().map(|c| ring.element(c)).collect::<periodlab_core::Result<_>>()?))
    }

    /// Short display form: integers when available, nested arrays otherwise.
    pub fn display(&self) -> String {
        match &self.integers {
            Some(ints) => format!("({})", ints.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")),
            None => serde_json::to_string(&self.coords).expect("nested integer arrays serialize"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_map_json() -> &'static str {
        r#"{"space":"projective","dim":1,"polys":[
            {"monomials":[{"exps":[3,0],"coeff":"1"}]},
            {"monomials":[{"exps":[0,3],"coeff":1}]}]}"#
    }

    #[test]
    fn map_round_trip() {
        let dto: MapSpecDto = serde_json::from_str(cube_map_json()).unwrap();
        let map = dto.build().unwrap();
        let back = MapSpecDto::from(&map);
        assert_eq!(back.build().unwrap(), map);
        let text = serde_json::to_string(&back).unwrap();
        assert_eq!(serde_json::from_str::<MapSpecDto>(&text).unwrap(), back);
        assert!(text.contains(r#""coeff":"1""#));
    }

    #[test]
    fn map_schema_errors() {
        let bad = r#"{"space":"affine","dim":1,"polys":[{"monomials":[{"exps":[1,0],"coeff":"1"}]}]}"#;
        let dto: MapSpecDto = serde_json::from_str(bad).unwrap();
        assert_eq!(dto.build().unwrap_err().code(), "cli.SchemaError");
        let bad = r#"{"space":"affine","dim":1,"polys":[{"monomials":[{"exps":[1],"coeff":"x"}]}]}"#;
        let dto: MapSpecDto = serde_json::from_str(bad).unwrap();
        assert_eq!(dto.build().unwrap_err().code(), "cli.SchemaError");
        assert!(serde_json::from_str::<MapSpecDto>(r#"{"space":"torus","dim":1,"polys":[]}"#).is_err());
        let inhomogeneous = r#"{"space":"projective","dim":1,"polys":[
            {"monomials":[{"exps":[2,0],"coeff":"1"}]},{"monomials":[{"exps":[0,1],"coeff":"1"}]}]}"#;
        let dto: MapSpecDto = serde_json::from_str(inhomogeneous).unwrap();
        assert_eq!(dto.build().unwrap_err().code(), "dynamics_core.InhomogeneousMap");
    }

    #[test]
    fn ring_round_trip() {
        let dto: RingSpecDto = serde_json::from_str(r#"{"p":3,"f":1,"e":2,"eisenstein":"zeta_p","precision":6}"#).unwrap();
        let ring = dto.build().unwrap();
        let explicit = RingSpecDto::from(&ring);
        assert_eq!(explicit.eisenstein, EisensteinDto::Coefficients(vec![IntLit::Int(3), IntLit::Int(3), IntLit::Int(1)]));
        assert_eq!(explicit.build().unwrap().eisenstein(), ring.eisenstein());
        let defaulted: RingSpecDto = serde_json::from_str(r#"{"p":5,"e":3}"#).unwrap();
        assert_eq!(periodlab_core::Ring::precision(&defaulted.build().unwrap()), 18);
        let bad: RingSpecDto = serde_json::from_str(r#"{"p":5,"e":2,"eisenstein":[5,1,1]}"#).unwrap();
        assert_eq!(bad.build().unwrap_err().code(), "dvr_tower.NotEisenstein");
    }

    #[test]
    fn field_round_trip() {
        let k = FieldSpec::new(3, 2).unwrap();
        let dto = FieldSpecDto::from(&k);
        assert_eq!(dto.build().unwrap(), k);
        let wrong = FieldSpecDto { p: 3, f: 3, modulus: dto.modulus.clone() };
        assert_eq!(wrong.build().unwrap_err().code(), "cli.SchemaError");
    }

    #[test]
    fn eisenstein_command_line_forms() {
        assert_eq!(EisensteinDto::parse("zeta_p").unwrap(), EisensteinDto::Preset("zeta_p".into()));
        let c = EisensteinDto::parse("-5,0,1").unwrap().build(5, 2).unwrap();
        assert_eq!(c, Eisenstein::Custom(vec![BigInt::from(-5), BigInt::from(0), BigInt::from(1)]));
        assert!(EisensteinDto::parse("1,x").is_err());
        assert!(EisensteinDto::Preset("nope".into()).build(5, 1).is_err());
    }

    #[test]
    fn points() {
        let ring = RingSpec::new(7, 1, 1, Eisenstein::Default, 2).unwrap();
        let k = periodlab_core::Ring::residue_field(&ring);
        let pt = field_point(k, &[FieldElemDto::Index(3), FieldElemDto::Coefficients(vec![4])]).unwrap();
        assert_eq!(PointDto::from_field(&pt).coords, vec![vec![vec![3]], vec![vec![4]]]);
        assert_eq!(PointDto::from_field(&pt).display(), "(3, 4)");
        assert!(field_point(k, &[FieldElemDto::Index(7)]).is_err());
        let lifted = Point(vec![ring.element(&[vec![30]]).unwrap()]);
        let dto = PointDto::from_ring(&ring, &lifted);
        assert_eq!(dto.display(), "(30)");
        assert_eq!(dto.build(&ring).unwrap(), lifted);
    }
}
