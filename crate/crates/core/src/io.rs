//! JSON group and state specification files.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major lists of
//! rows. Both formats carry `format_version` and reject unknown fields.
//!
//! Group file:
//!
//! ```json
//! {"format_version": 1, "name": "Z2", "order": 2,
//!  "mult_table": [[0, 1], [1, 0]], "inverse": [0, 1], "identity": 0,
//!  "irreps": [{"label": "q0", "dim": 1, "matrices": [[[[1, 0]]], [[[1, 0]]]]}, ...],
//!  "representation": {"matrices": [...], "split": {"dims_a": 2, "dims_b": 2,
//!                     "matrices_a": [...], "matrices_b": [...]}}}
//! ```
//!
//! State file, with `kind` one of `amplitudes`, `matrix` or `builder`:
//!
//! ```json
//! {"format_version": 1, "dims": [2, 2], "kind": "amplitudes",
//!  "payload": [[0, 0], [0.7071067811865476, 0], [0.7071067811865476, 0], [0, 0]]}
//! {"format_version": 1, "kind": "builder", "payload": {"name": "refbit"}}
//! {"format_version": 1, "kind": "builder", "payload": {"name": "spin-plus", "sites": 2}}
//! {"format_version": 1, "kind": "builder",
//!  "payload": {"name": "symmetric", "beta": 0, "terms": [{"mu": 1, "m": 0, "mbar": 0, "d": [1, 0]}]}}
//! ```
//!
//! `dims` is required for explicit states and optional for builders; when
//! given it must match what the builder produces.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Result, SsrError};
use crate::group::{make_group, validate_representation, FiniteGroup, Irrep, Representation};
use crate::linalg::{c64, CMatrix, CVector, DensityOperator, PureState};
use crate::states::{build_symmetric_state, make_refbit, make_spin_plus, SymmetricPureState, Term};
use crate::twirl::{ChargeOperator, Symmetry, U1Action};

pub const FORMAT_VERSION: u32 = 1;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrrepSpec {
    pub label: String,
    pub dim: usize,
    pub matrices: Vec<JsonMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub dims_a: usize,
    pub dims_b: usize,
    pub matrices_a: Vec<JsonMatrix>,
    pub matrices_b: Vec<JsonMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationSpec {
    pub matrices: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub format_version: u32,
    pub name: String,
    pub order: usize,
    pub mult_table: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    pub identity: usize,
    pub irreps: Vec<IrrepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepresentationSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Amplitudes,
    Matrix,
    Builder,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    pub kind: StateKind,
    pub payload: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BuilderSpec {
    Refbit,
    SpinPlus {
        #[serde(default = "one")]
        sites: usize,
    },
    Symmetric {
        beta: usize,
        terms: Vec<Term>,
        #[serde(default)]
        seed: u64,
    },
}

fn one() -> usize {
    1
}

pub fn matrix_from_json(m: &JsonMatrix) -> Result<CMatrix> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(SsrError::Spec("ragged matrix".into()));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| c64(m[i][j][0], m[i][j][1])))
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn matrices_from_json(ms: &[JsonMatrix]) -> Result<Vec<CMatrix>> {
    ms.iter().map(matrix_from_json).collect()
}

fn check_version(found: u32) -> Result<()> {
    if found != FORMAT_VERSION {
        return Err(SsrError::Spec(format!("format_version {found} is not supported (expected {FORMAT_VERSION})")));
    }
    Ok(())
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| SsrError::Spec(format!("{what}: {e}")))
}

impl GroupSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = parse_json(text, "group spec")?;
        check_version(spec.format_version)?;
        Ok(spec)
    }

    /// Serializable description of a group, optionally with a representation.
    pub fn from_group(group: &FiniteGroup, rep: Option<&Representation>) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            name: group.name().to_string(),
            order: group.order(),
            mult_table: group.mult_table().to_vec(),
            inverse: group.inverse_table().to_vec(),
            identity: group.identity(),
            irreps: group
                .irreps()
                .iter()
                .map(|ir| IrrepSpec {
                    label: ir.label.clone(),
                    dim: ir.dim,
                    matrices: ir.matrices.iter().map(matrix_to_json).collect(),
                })
                .collect(),
            representation: rep.map(|r| RepresentationSpec {
                matrices: r.matrices().iter().map(matrix_to_json).collect(),
                split: r.split().map(|s| SplitSpec {
                    dims_a: s.dim_a(),
                    dims_b: s.dim_b(),
                    matrices_a: s.a.iter().map(matrix_to_json).collect(),
                    matrices_b: s.b.iter().map(matrix_to_json).collect(),
                }),
            }),
        }
    }

    /// Builds and validates the group, then the representation if present.
    pub fn build(&self) -> Result<(Arc<FiniteGroup>, Option<Representation>)> {
        check_version(self.format_version)?;
        if self.mult_table.len() != self.order || self.inverse.len() != self.order {
            return Err(SsrError::InvalidGroup(format!(
                "order {} but tables of size {} and {}",
                self.order,
                self.mult_table.len(),
                self.inverse.len()
            )));
        }
        let irreps = self
            .irreps
            .iter()
            .map(|ir| Ok(Irrep { label: ir.label.clone(), dim: ir.dim, matrices: matrices_from_json(&ir.matrices)? }))
            .collect::<Result<Vec<_>>>()?;
        let group = Arc::new(FiniteGroup::new(
            self.name.clone(),
            self.mult_table.clone(),
            self.inverse.clone(),
            self.identity,
            irreps,
        )?);
        let rep = match &self.representation {
            None => None,
            Some(r) => {
                let mut rep = Representation::new(group.clone(), matrices_from_json(&r.matrices)?)?;
                if let Some(s) = &r.split {
                    let a = matrices_from_json(&s.matrices_a)?;
                    let b = matrices_from_json(&s.matrices_b)?;
                    if a.iter().any(|m| m.nrows() != s.dims_a) || b.iter().any(|m| m.nrows() != s.dims_b) {
                        return Err(SsrError::InvalidRepresentation(
                            "split matrices disagree with dims_a/dims_b".into(),
                        ));
                    }
                    rep = rep.with_split(a, b)?;
                }
                let report = validate_representation(&rep);
                if let Some(failure) = report.first_failure() {
                    return Err(SsrError::InvalidRepresentation(failure));
                }
                Some(rep)
            }
        };
        Ok((group, rep))
    }
}

/// A group argument: a catalog name or a path to a group spec file.
pub fn load_group(arg: &str) -> Result<(Arc<FiniteGroup>, Option<Representation>)> {
    if let Ok(g) = make_group(arg) {
        return Ok((Arc::new(g), None));
    }
    let path = std::path::Path::new(arg);
    let looks_like_path = arg.ends_with(".json") || arg.contains(std::path::MAIN_SEPARATOR) || arg.contains('/');
    if !path.exists() && !looks_like_path {
        return Err(SsrError::UnknownGroup(arg.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| SsrError::Spec(format!("{arg}: {e}")))?;
    GroupSpec::parse(&text)?.build()
}

fn parse_side(group: &Arc<FiniteGroup>, text: &str) -> Result<Representation> {
    let text = text.trim();
    if text.eq_ignore_ascii_case("regular") {
        return Ok(Representation::regular(group.clone()));
    }
    let k = group.irreps().len();
    let list = text
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<usize>()
                .ok()
                .or_else(|| group.irreps().iter().position(|ir| ir.label == t))
                .filter(|&mu| mu < k)
                .ok_or_else(|| SsrError::Spec(format!("`{t}` is not an irrep of {}", group.name())))
        })
        .collect::<Result<Vec<_>>>()?;
    Representation::from_irreps(group.clone(), &list)
}

/// Representation shorthand for catalog groups: `regular`, a comma list of
/// irrep indices or labels (`0,2,2`), or two of those joined by `/` for a
/// bipartite split (`regular/0,1`).
pub fn parse_rep(group: &Arc<FiniteGroup>, text: &str) -> Result<Representation> {
    match text.split_once('/') {
        Some((a, b)) => parse_side(group, a)?.tensor(&parse_side(group, b)?),
        None => parse_side(group, text),
    }
}

/// U(1) charges: `0,1` for one site, `0,1/1,0` for two. Values may be
/// half-integers.
pub fn parse_charges(text: &str) -> Result<U1Action> {
    let side = |t: &str| -> Result<ChargeOperator> {
        let q = t
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| SsrError::Spec(format!("bad charge `{x}`"))))
            .collect::<Result<Vec<_>>>()?;
        ChargeOperator::diagonal(&q)
    };
    Ok(match text.split_once('/') {
        Some((a, b)) => U1Action::bipartite(side(a)?, side(b)?),
        None => U1Action::single(side(text)?),
    })
}

/// A state resolved from a spec, with the symmetry it carries when it came
/// from a builder.
#[derive(Clone, Debug)]
pub struct LoadedState {
    pub rho: DensityOperator,
    pub symmetry: Option<Symmetry>,
    pub symmetric: Option<SymmetricPureState>,
}

impl StateSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = parse_json(text, "state spec")?;
        check_version(spec.format_version)?;
        Ok(spec)
    }

    pub fn amplitudes(psi: &PureState) -> Self {
        let payload = psi.amplitudes().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
        Self {
            format_version: FORMAT_VERSION,
            dims: Some(psi.dims().to_vec()),
            kind: StateKind::Amplitudes,
            payload: serde_json::to_value(payload).expect("plain numbers"),
        }
    }

    pub fn matrix(rho: &DensityOperator) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            dims: Some(rho.dims().to_vec()),
            kind: StateKind::Matrix,
            payload: serde_json::to_value(matrix_to_json(rho.matrix())).expect("plain numbers"),
        }
    }

    pub fn builder(b: &BuilderSpec) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            dims: None,
            kind: StateKind::Builder,
            payload: serde_json::to_value(b).expect("builder serializes"),
        }
    }

    /// `rep` is needed only by the `symmetric` builder and must carry a split.
    pub fn resolve(&self, rep: Option<&Representation>) -> Result<LoadedState> {
        let payload = |what: &str| SsrError::Spec(format!("{what} payload"));
        let loaded = match self.kind {
            StateKind::Amplitudes => {
                let dims = self.dims.clone().ok_or_else(|| SsrError::Spec("amplitudes need dims".into()))?;
                let amps: Vec<[f64; 2]> =
                    serde_json::from_value(self.payload.clone()).map_err(|_| payload("amplitudes"))?;
                let v = CVector::from_iterator(amps.len(), amps.iter().map(|z| c64(z[0], z[1])));
                let psi = PureState::new(v, dims)?;
                LoadedState { rho: psi.density(), symmetry: None, symmetric: None }
            }
            StateKind::Matrix => {
                let dims = self.dims.clone().ok_or_else(|| SsrError::Spec("matrix needs dims".into()))?;
                let m: JsonMatrix = serde_json::from_value(self.payload.clone()).map_err(|_| payload("matrix"))?;
                LoadedState { rho: DensityOperator::new(matrix_from_json(&m)?, dims)?, symmetry: None, symmetric: None }
            }
            StateKind::Builder => {
                let b: BuilderSpec = serde_json::from_value(self.payload.clone())
                    .map_err(|e| SsrError::Spec(format!("builder payload: {e}")))?;
                match b {
                    BuilderSpec::Refbit => {
                        let st = make_refbit();
                        LoadedState { rho: st.density(), symmetry: Some(st.symmetry().clone()), symmetric: Some(st) }
                    }
                    BuilderSpec::SpinPlus { sites } => {
                        let (rho, sym) = make_spin_plus(sites)?;
                        LoadedState { rho, symmetry: Some(sym), symmetric: None }
                    }
                    BuilderSpec::Symmetric { beta, terms, seed } => {
                        let rep =
                            rep.ok_or_else(|| SsrError::Spec("symmetric builder needs a group representation".into()))?;
                        let st = build_symmetric_state(rep, beta, &terms, seed)?;
                        LoadedState { rho: st.density(), symmetry: Some(st.symmetry().clone()), symmetric: Some(st) }
                    }
                }
            }
        };
        if let Some(d) = &self.dims {
            if d.as_slice() != loaded.rho.dims() {
                return Err(SsrError::DimensionMismatch(format!(
                    "spec dims {:?} vs state dims {:?}",
                    d,
                    loaded.rho.dims()
                )));
            }
        }
        Ok(loaded)
    }
}

/// A state argument: a builder shorthand (`refbit`, `spin-plus`,
/// `spin-plus-2`) or a path to a state spec file.
pub fn load_state(arg: &str, rep: Option<&Representation>) -> Result<LoadedState> {
    let builder = match arg {
        "refbit" => Some(BuilderSpec::Refbit),
        "spin-plus" | "spin-plus-1" => Some(BuilderSpec::SpinPlus { sites: 1 }),
        "spin-plus-2" => Some(BuilderSpec::SpinPlus { sites: 2 }),
        _ => None,
    };
    if let Some(b) = builder {
        return StateSpec::builder(&b).resolve(rep);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| SsrError::Spec(format!("{arg}: {e}")))?;
    StateSpec::parse(&text)?.resolve(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn group_round_trip() {
        let g = make_group("S3").unwrap();
        let rep = Representation::regular(Arc::new(g.clone()));
        let rep = rep.tensor(&Representation::irrep(rep.group().clone(), 2)).unwrap();
        let text = serde_json::to_string(&GroupSpec::from_group(&g, Some(&rep))).unwrap();
        let (g2, rep2) = GroupSpec::parse(&text).unwrap().build().unwrap();
        assert_eq!(g2.mult_table(), g.mult_table());
        let rep2 = rep2.unwrap();
        assert_eq!(rep2.split().unwrap().dim_a(), 6);
        assert!(max_abs_diff(rep2.matrix(3), rep.matrix(3)) < 1e-15);
    }

    #[test]
    fn unknown_field_and_version_rejected() {
        let g = make_group("Z2").unwrap();
        let mut v = serde_json::to_value(GroupSpec::from_group(&g, None)).unwrap();
        v["colour"] = Value::from(1);
        assert!(matches!(GroupSpec::parse(&v.to_string()), Err(SsrError::Spec(_))));
        let mut v = serde_json::to_value(GroupSpec::from_group(&g, None)).unwrap();
        v["format_version"] = Value::from(9);
        assert!(matches!(GroupSpec::parse(&v.to_string()), Err(SsrError::Spec(_))));
    }

    #[test]
    fn corrupted_irrep_names_the_invariant() {
        let g = make_group("Z3").unwrap();
        let mut spec = GroupSpec::from_group(&g, None);
        spec.irreps[1].matrices[1][0][0] = [0.3, 0.2];
        let err = spec.build().unwrap_err();
        assert!(matches!(err, SsrError::InvalidGroup(_)));
        assert!(err.to_string().contains("not unitary"), "{err}");
    }

    #[test]
    fn builders_resolve() {
        let s = load_state("refbit", None).unwrap();
        assert_eq!(s.rho.dims(), &[2, 2]);
        assert!(s.symmetric.is_some());
        let s = load_state("spin-plus-2", None).unwrap();
        assert_eq!(s.rho.dim(), 4);

        let z2 = Arc::new(make_group("Z2").unwrap());
        let rep = parse_rep(&z2, "0,1/0,1").unwrap();
        let spec = StateSpec::builder(&BuilderSpec::Symmetric {
            beta: 0,
            terms: vec![
                Term { mu: 0, m: 0, mbar: 0, d: c64(1.0, 0.0) },
                Term { mu: 1, m: 0, mbar: 0, d: c64(1.0, 0.0) },
            ],
            seed: 0,
        });
        let text = serde_json::to_string(&spec).unwrap();
        let st = StateSpec::parse(&text).unwrap().resolve(Some(&rep)).unwrap().symmetric.unwrap();
        assert!((st.charge_entropy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_states_and_dims_check() {
        let psi = crate::linalg::Sampler::new(4).pure_state(&[2, 3]);
        let back = StateSpec::parse(&serde_json::to_string(&StateSpec::amplitudes(&psi)).unwrap())
            .unwrap()
            .resolve(None)
            .unwrap();
        assert!(max_abs_diff(back.rho.matrix(), psi.density().matrix()) < 1e-15);
        let mut spec = StateSpec::matrix(&psi.density());
        spec.dims = Some(vec![3, 2]);
        assert!(spec.resolve(None).is_ok());
        spec.dims = Some(vec![7]);
        assert!(spec.resolve(None).is_err());
    }

    #[test]
    fn rep_and_charge_shorthand() {
        let s3 = Arc::new(make_group("S3").unwrap());
        assert_eq!(parse_rep(&s3, "regular").unwrap().dim(), 6);
        assert_eq!(parse_rep(&s3, "0,2/regular").unwrap().split().unwrap().dim_a(), 3);
        assert!(parse_rep(&s3, "7").is_err());
        let u = parse_charges("0,1/0.5,-0.5").unwrap();
        assert!(u.split().is_some());
        assert!(parse_charges("0,0.3").is_err());
    }
}
