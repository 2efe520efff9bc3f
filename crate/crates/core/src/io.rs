//! JSON files for structures, maps and ε-Carnot maps.
//!
//! Rationals are strings `"p/q"` in lowest terms; monomial exponents and
//! structure-constant indices are written out in full, indices from one.
//! Emitted documents go through `serde_json::Value`, whose objects keep
//! their keys sorted, so equal objects serialize to equal bytes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::carnot_map::CarnotMapJet;
use crate::carnot_structure::HFrame;
use crate::coords::EpsCarnotMap;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::nilgroup::{validate_algebra, Entry, GradedNilpotentAlgebra};
use crate::report::Report;
use crate::scalar::{fmt_q, parse_q, Q};
use crate::weights::WeightSequence;
use crate::wpoly::{invert_map, PolyCtx, VectorField, WPoly, WPolyMap, EXACT};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub m: Vec<u32>,
    pub c: String,
}

pub type PolyJson = Vec<TermJson>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub name: String,
    pub dim: usize,
    pub weights: Vec<u32>,
    pub frame: Vec<Vec<PolyJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Vec<ConstantJson>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub source: String,
    pub target: String,
    pub components: Vec<PolyJson>,
    pub basepoint: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DTermJson {
    pub k: usize,
    pub m: Vec<u32>,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsJson {
    pub weights: Vec<u32>,
    pub base: Vec<String>,
    pub matrix: Vec<Vec<String>>,
    pub d: Vec<DTermJson>,
    pub constants: Vec<ConstantJson>,
}

/// A parsed structure file.
#[derive(Clone, Debug)]
pub struct Structure {
    pub name: String,
    pub frame: HFrame<Q>,
    /// Declared structure constants, when the file carries them.
    pub algebra: Option<GradedNilpotentAlgebra<Q>>,
    pub report: Report,
}

fn from_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(s);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse(format!("at {path}: {}", e.into_inner()))
    })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(v: &T) -> String {
    let v = serde_json::to_value(v).expect("serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn rat(s: &str, path: &str) -> Result<Q> {
    parse_q(s).map_err(|_| Error::Parse(format!("at {path}: not a rational: {s:?}")))
}

fn rats(v: &[String], path: &str) -> Result<Vec<Q>> {
    v.iter().enumerate().map(|(i, s)| rat(s, &format!("{path}[{i}]"))).collect()
}

pub fn strs(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

pub fn poly_to_json(p: &WPoly<Q>) -> PolyJson {
    p.terms().iter().map(|(a, c)| TermJson { m: a.clone(), c: fmt_q(c) }).collect()
}

pub fn poly_from_json(ctx: &PolyCtx<Q>, p: &PolyJson, path: &str) -> Result<WPoly<Q>> {
    let n = ctx.n();
    let mut terms = Vec::with_capacity(p.len());
    for (i, t) in p.iter().enumerate() {
        if t.m.len() != n {
            return Err(Error::Parse(format!("at {path}[{i}].m: {} exponents for dimension {n}", t.m.len())));
        }
        terms.push((t.m.clone(), rat(&t.c, &format!("{path}[{i}].c"))?));
    }
    Ok(WPoly::from_terms(ctx, terms, EXACT))
}

fn constants_to_json(alg: &GradedNilpotentAlgebra<Q>) -> Vec<ConstantJson> {
    alg.entries().into_iter().map(|e| ConstantJson { i: e.i + 1, j: e.j + 1, k: e.k + 1, c: fmt_q(&e.c) }).collect()
}

fn constants_from_json(cs: &[ConstantJson], path: &str) -> Result<Vec<Entry<Q>>> {
    cs.iter()
        .enumerate()
        .map(|(l, c)| {
            if c.i == 0 || c.j == 0 || c.k == 0 {
                return Err(Error::Parse(format!("at {path}[{l}]: indices start at 1")));
            }
            Ok(Entry::new(c.i - 1, c.j - 1, c.k - 1, rat(&c.c, &format!("{path}[{l}].c"))?))
        })
        .collect()
}

impl StructureFile {
    pub fn from_frame(name: &str, f: &HFrame<Q>, algebra: Option<&GradedNilpotentAlgebra<Q>>) -> Self {
        let zero = f.basepoint().iter().all(|c| c == &Q::from_integer(0.into()));
        Self {
            name: name.into(),
            dim: f.n(),
            weights: f.weights().as_slice().to_vec(),
            frame: f.fields().iter().map(|x| x.comps().iter().map(poly_to_json).collect()).collect(),
            basepoint: if zero { None } else { Some(strs(f.basepoint())) },
            constants: algebra.map(constants_to_json),
        }
    }
}

/// Builds the frame and, when declared, the algebra, then validates both.
///
/// Shape and parse problems are errors; invariant failures of a well-formed
/// file (filtration, structure constants) land in the report.
pub fn structure_from_file(s: &StructureFile, trunc: Option<i64>) -> Result<Structure> {
    let w = WeightSequence::new(s.weights.clone()).map_err(|e| Error::Parse(format!("at weights: {e}")))?;
    let n = w.n();
    if s.dim != n {
        return Err(Error::Parse(format!("at dim: {} but {n} weights", s.dim)));
    }
    if s.frame.len() != n {
        return Err(Error::Parse(format!("at frame: {} fields for dimension {n}", s.frame.len())));
    }
    let ctx = PolyCtx::new(w.grading(), EXACT, ());
    let mut fields = Vec::with_capacity(n);
    for (j, vf) in s.frame.iter().enumerate() {
        if vf.len() != n {
            return Err(Error::Parse(format!("at frame[{j}]: {} components for dimension {n}", vf.len())));
        }
        let comps = vf.iter().enumerate().map(|(l, p)| poly_from_json(&ctx, p, &format!("frame[{j}][{l}]"))).collect::<Result<Vec<_>>>()?;
        fields.push(VectorField::new(comps));
    }
    let base = match &s.basepoint {
        Some(b) if b.len() != n => return Err(Error::Parse(format!("at basepoint: length {} for dimension {n}", b.len()))),
        Some(b) => rats(b, "basepoint")?,
        None => vec![Q::from_integer(0.into()); n],
    };
    let frame = HFrame::new(w.clone(), fields, base)?;
    let trunc = trunc.unwrap_or_else(|| crate::carnot_structure::default_trunc(&w));
    let mut report = frame.validate_filtration(trunc);
    let mut algebra = None;
    if let Some(cs) = &s.constants {
        let entries = constants_from_json(cs, "constants")?;
        let rep = validate_algebra(&w, &entries, &());
        if rep.is_ok() {
            let alg = GradedNilpotentAlgebra::new(w.clone(), &entries, &())?;
            if report.is_ok() {
                match frame.tangent_algebra_at(frame.basepoint()) {
                    Ok(t) if t != alg => report.push("constants_mismatch", "declared structure constants differ from the frame's tangent algebra at the basepoint"),
                    Ok(_) => {}
                    Err(e) => report.push("constants_mismatch", e.to_string()),
                }
            }
            algebra = Some(alg);
        }
        report.merge(rep);
    }
    Ok(Structure { name: s.name.clone(), frame, algebra, report })
}

pub fn parse_structure_str(s: &str, trunc: Option<i64>) -> Result<Structure> {
    structure_from_file(&from_str(s)?, trunc)
}

const BUNDLED: &[(&str, &str)] = &[
    ("abelian2.json", include_str!("../fixtures/abelian2.json")),
    ("asymmetric_heisenberg.json", include_str!("../fixtures/asymmetric_heisenberg.json")),
    ("corrupted_heisenberg.json", include_str!("../fixtures/corrupted_heisenberg.json")),
    ("corrupted_engel.json", include_str!("../fixtures/corrupted_engel.json")),
    ("engel4.json", include_str!("../fixtures/engel4.json")),
    ("engel_group.json", include_str!("../fixtures/engel_group.json")),
    ("heisenberg3.json", include_str!("../fixtures/heisenberg3.json")),
    ("heisenberg_contact.json", include_str!("../fixtures/heisenberg_contact.json")),
    ("heisenberg_cubic.json", include_str!("../fixtures/heisenberg_cubic.json")),
    ("heisenberg_dilation2.json", include_str!("../fixtures/heisenberg_dilation2.json")),
    ("heisenberg_swap.json", include_str!("../fixtures/heisenberg_swap.json")),
    ("engel_projection.json", include_str!("../fixtures/engel_projection.json")),
    ("non_carnot_filtration.json", include_str!("../fixtures/non_carnot_filtration.json")),
    ("non_privileged.json", include_str!("../fixtures/non_privileged.json")),
    ("perturbed_heisenberg.json", include_str!("../fixtures/perturbed_heisenberg.json")),
    ("variable_heisenberg.json", include_str!("../fixtures/variable_heisenberg.json")),
];

/// Names of the files shipped with the crate.
pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

pub fn bundled(name: &str) -> Option<&'static str> {
    let key = Path::new(name).file_name()?.to_str()?;
    BUNDLED.iter().find(|(n, _)| *n == key).map(|(_, s)| *s)
}

/// Reads a file, falling back to the bundled copy of the same name.
pub fn read_source(path: &str) -> Result<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) => bundled(path).map(str::to_string).ok_or_else(|| Error::Parse(format!("{path}: {e}"))),
    }
}

pub fn parse_structure(path: &str, trunc: Option<i64>) -> Result<Structure> {
    let s = read_source(path)?;
    parse_structure_str(&s, trunc).map_err(|e| prefix(path, e))
}

fn prefix(path: &str, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{path}: {m}")),
        e => e,
    }
}

impl MapFile {
    pub fn from_map(m: &CarnotMapJet, source: &str, target: &str) -> Self {
        Self { source: source.into(), target: target.into(), components: m.phi.comps().iter().map(poly_to_json).collect(), basepoint: strs(&m.base) }
    }
}

/// `resolve` turns the `source`/`target` references into frames.
pub fn map_from_file(m: &MapFile, resolve: impl Fn(&str) -> Result<HFrame<Q>>) -> Result<CarnotMapJet> {
    let src = resolve(&m.source)?;
    let tgt = resolve(&m.target)?;
    if m.components.len() != tgt.n() {
        return Err(Error::Parse(format!("at components: {} components for a target of dimension {}", m.components.len(), tgt.n())));
    }
    if m.basepoint.len() != src.n() {
        return Err(Error::Parse(format!("at basepoint: length {} for a source of dimension {}", m.basepoint.len(), src.n())));
    }
    let ctx = PolyCtx::new(src.weights().grading(), EXACT, ());
    let comps = m.components.iter().enumerate().map(|(k, p)| poly_from_json(&ctx, p, &format!("components[{k}]"))).collect::<Result<Vec<_>>>()?;
    let phi = WPolyMap::new(&ctx, tgt.weights().grading(), comps);
    CarnotMapJet::new(src, tgt, phi, rats(&m.basepoint, "basepoint")?)
}

/// Structure references resolve against the map file's directory first.
pub fn parse_map(path: &str, trunc: Option<i64>) -> Result<CarnotMapJet> {
    let s = read_source(path)?;
    let mf: MapFile = from_str(&s).map_err(|e| prefix(path, e))?;
    let dir = Path::new(path).parent().map(Path::to_path_buf).unwrap_or_default();
    let resolve = |r: &str| -> Result<HFrame<Q>> {
        let p: PathBuf = dir.join(r);
        let p = if p.exists() { p.to_string_lossy().into_owned() } else { r.to_string() };
        Ok(parse_structure(&p, trunc)?.frame)
    };
    let m = map_from_file(&mf, resolve).map_err(|e| prefix(path, e))?;
    Ok(match trunc {
        Some(t) => m.with_trunc(t),
        None => m,
    })
}

pub fn eps_to_json(e: &EpsCarnotMap<Q>) -> EpsJson {
    EpsJson {
        weights: e.algebra.weights().as_slice().to_vec(),
        base: strs(&e.base),
        matrix: e.m.to_strings(),
        d: e.d.iter().map(|((k, a), c)| DTermJson { k: k + 1, m: a.clone(), c: fmt_q(c) }).collect(),
        constants: constants_to_json(&e.algebra),
    }
}

pub fn eps_from_json(j: &EpsJson) -> Result<EpsCarnotMap<Q>> {
    let w = WeightSequence::new(j.weights.clone())?;
    let n = w.n();
    let base = rats(&j.base, "base")?;
    if base.len() != n || j.matrix.len() != n || j.matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("at matrix: shape differs from the weights".into()));
    }
    let rows = j.matrix.iter().enumerate().map(|(i, r)| rats(r, &format!("matrix[{i}]"))).collect::<Result<Vec<_>>>()?;
    let m = Mat::from_rows(rows);
    let m_inv = m.inverse()?;
    let ctx = PolyCtx::new(w.grading(), EXACT, ());
    let mut d = BTreeMap::new();
    let mut hat: Vec<WPoly<Q>> = (0..n).map(|k| WPoly::var(&ctx, k)).collect();
    for (l, t) in j.d.iter().enumerate() {
        if t.k == 0 || t.k > n || t.m.len() != n {
            return Err(Error::Parse(format!("at d[{l}]: bad index or exponent length")));
        }
        let c = rat(&t.c, &format!("d[{l}].c"))?;
        hat[t.k - 1] = hat[t.k - 1].add(&WPoly::monomial(&ctx, t.m.clone(), c.clone()));
        d.insert((t.k - 1, t.m.clone()), c);
    }
    let hat = WPolyMap::endo(&ctx, hat);
    let hat_inv = invert_map(&hat, EXACT)?;
    let algebra = GradedNilpotentAlgebra::new(w, &constants_from_json(&j.constants, "constants")?, &())?;
    Ok(EpsCarnotMap { base, m, m_inv, hat, hat_inv, d, algebra })
}

pub fn parse_eps_str(s: &str) -> Result<EpsCarnotMap<Q>> {
    eps_from_json(&from_str(s)?)
}

/// Comma-separated rationals, as given on the command line.
pub fn parse_point(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(parse_q).collect()
}

pub fn fmt_point(x: &[Q]) -> String {
    strs(x).join(",")
}

/// The bundled files, regenerated from [`crate::fixtures`].
pub fn fixture_documents() -> Vec<(&'static str, String)> {
    use crate::fixtures as fx;
    let mut out = Vec::new();
    let plain: Vec<(&str, HFrame<Q>)> = vec![
        ("abelian2", fx::abelian(2)),
        ("asymmetric_heisenberg", fx::asymmetric_heisenberg()),
        ("engel4", fx::engel4()),
        ("non_carnot_filtration", fx::non_carnot_filtration()),
        ("non_privileged", fx::non_privileged()),
        ("perturbed_heisenberg", fx::perturbed_heisenberg()),
        ("variable_heisenberg", fx::variable_heisenberg()),
    ];
    for (name, f) in plain {
        out.push((name, to_canonical_json(&StructureFile::from_frame(name, &f, None))));
    }
    out.push(("heisenberg3", to_canonical_json(&StructureFile::from_frame("heisenberg3", &fx::heisenberg3(), Some(&fx::heisenberg_algebra())))));
    out.push(("engel_group", to_canonical_json(&StructureFile::from_frame("engel_group", &fx::engel_group(), Some(&fx::engel_algebra())))));
    let bad = |name: &'static str, f: HFrame<Q>, cs: &[(usize, usize, usize, &str)]| {
        let mut s = StructureFile::from_frame(name, &f, None);
        s.constants = Some(cs.iter().map(|&(i, j, k, c)| ConstantJson { i, j, k, c: c.into() }).collect());
        (name, to_canonical_json(&s))
    };
    out.push(bad("corrupted_heisenberg", fx::heisenberg3(), &[(1, 2, 3, "1"), (2, 1, 3, "1")]));
    out.push(bad("corrupted_engel", fx::engel_group(), &[(1, 2, 3, "1"), (1, 3, 4, "1"), (1, 2, 4, "1")]));
    let maps = [
        ("heisenberg_contact", fx::heisenberg_contact(), "heisenberg3.json", "heisenberg3.json"),
        ("heisenberg_cubic", fx::heisenberg_cubic(), "heisenberg3.json", "heisenberg3.json"),
        ("heisenberg_dilation2", fx::heisenberg_dilation(2), "heisenberg3.json", "heisenberg3.json"),
        ("heisenberg_swap", fx::heisenberg_swap(), "heisenberg3.json", "heisenberg3.json"),
        ("engel_projection", fx::engel_projection(), "engel_group.json", "heisenberg3.json"),
    ];
    for (name, m, s, t) in maps {
        out.push((name, to_canonical_json(&MapFile::from_map(&m, s, t))));
    }
    out.sort_by_key(|(n, _)| *n);
    out
}
