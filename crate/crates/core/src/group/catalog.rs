use std::f64::consts::PI;

use super::{FiniteGroup, Irrep};
use crate::error::{Result, SsrError};
use crate::linalg::{c64, identity, max_abs_diff, CMatrix};

/// Names accepted by [`make_group`].
pub const CATALOG: &[&str] =
    &["Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z11", "Z12", "S3", "D4", "Q8"];

/// Looks up a catalog group. Cyclic groups accept `Z4`, `Z_4`, `z4` or
/// `cyclic4`; the others are `S3`, `D4` and `Q8`.
pub fn make_group(kind: &str) -> Result<FiniteGroup> {
    let k = kind.trim().to_ascii_uppercase().replace('_', "");
    if let Some(n) = k.strip_prefix("CYCLIC").or_else(|| k.strip_prefix('Z')) {
        let n: usize = n.parse().map_err(|_| SsrError::UnknownGroup(kind.to_string()))?;
        if (1..=12).contains(&n) {
            return cyclic(n);
        }
        return Err(SsrError::UnknownGroup(kind.to_string()));
    }
    match k.as_str() {
        "TRIVIAL" => cyclic(1),
        "S3" => symmetric3(),
        "D4" => dihedral4(),
        "Q8" => quaternion(),
        _ => Err(SsrError::UnknownGroup(kind.to_string())),
    }
}

fn scalar(re: f64, im: f64) -> CMatrix {
    CMatrix::from_element(1, 1, c64(re, im))
}

fn phase(angle: f64) -> CMatrix {
    scalar(angle.cos(), angle.sin())
}

fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(rows, cols, &data.iter().map(|&x| c64(x, 0.0)).collect::<Vec<_>>())
}

/// Closes a faithful matrix representation under right multiplication by
/// the generators, then evaluates each irrep along the same words.
///
/// Element 0 is the identity; elements appear in breadth-first order.
fn from_generators(name: &str, faithful: &[CMatrix], irreps: Vec<(&str, Vec<CMatrix>)>) -> Result<FiniteGroup> {
    let dim = faithful[0].nrows();
    let mut elements = vec![identity(dim)];
    // word images per irrep, built in lockstep with `elements`
    let mut images: Vec<Vec<CMatrix>> = irreps.iter().map(|(_, g)| vec![identity(g[0].nrows())]).collect();
    let mut cursor = 0;
    while cursor < elements.len() {
        for (s, gen) in faithful.iter().enumerate() {
            let candidate = &elements[cursor] * gen;
            if !elements.iter().any(|e| max_abs_diff(e, &candidate) < 1e-9) {
                for (k, (_, gens)) in irreps.iter().enumerate() {
                    let next = &images[k][cursor] * &gens[s];
                    images[k].push(next);
                }
                elements.push(candidate);
            }
        }
        cursor += 1;
    }
    let n = elements.len();
    let find = |m: &CMatrix| elements.iter().position(|e| max_abs_diff(e, m) < 1e-9);
    let mut mult = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            mult[a][b] = find(&(&elements[a] * &elements[b]))
                .ok_or_else(|| SsrError::InvalidGroup("generators do not close".into()))?;
        }
    }
    let inv = (0..n).map(|a| (0..n).find(|&b| mult[a][b] == 0).expect("finite group element has an inverse")).collect();
    let irreps = irreps
        .into_iter()
        .zip(images)
        .map(|((label, gens), matrices)| Irrep { label: label.to_string(), dim: gens[0].nrows(), matrices })
        .collect();
    FiniteGroup::new(name, mult, inv, 0, irreps)
}

/// `Z_N` with element `k` the `k`-th power of the generator; irrep `q` sends
/// `k` to `exp(2πi qk/N)`.
fn cyclic(n: usize) -> Result<FiniteGroup> {
    let step = 2.0 * PI / n as f64;
    let irreps = (0..n).map(|q| (q, vec![phase(step * q as f64)])).collect::<Vec<_>>();
    let labels: Vec<String> = (0..n).map(|q| format!("q{q}")).collect();
    let irreps = irreps.into_iter().map(|(q, g)| (labels[q].as_str(), g)).collect::<Vec<_>>();
    let group = from_generators(&format!("Z{n}"), &[phase(step)], irreps)?;
    // rebuild the irreps from closed-form phases so the matrices are exact
    let mut exact = group.clone();
    for (q, irrep) in exact.irreps.iter_mut().enumerate() {
        for (k, m) in irrep.matrices.iter_mut().enumerate() {
            let e = (q * k) % n;
            *m = phase(step * e as f64);
        }
    }
    Ok(exact)
}

fn symmetric3() -> Result<FiniteGroup> {
    let swap = real(3, 3, &[0., 1., 0., 1., 0., 0., 0., 0., 1.]);
    let cycle = real(3, 3, &[0., 0., 1., 1., 0., 0., 0., 1., 0.]);
    // orthonormal basis of the complement of (1,1,1)
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    let basis = real(3, 2, &[1. / s2, 1. / s6, -1. / s2, 1. / s6, 0., -2. / s6]);
    let standard = |p: &CMatrix| basis.transpose() * p * &basis;
    from_generators(
        "S3",
        &[swap.clone(), cycle.clone()],
        vec![
            ("trivial", vec![scalar(1., 0.), scalar(1., 0.)]),
            ("sign", vec![scalar(-1., 0.), scalar(1., 0.)]),
            ("standard", vec![standard(&swap), standard(&cycle)]),
        ],
    )
}

fn dihedral4() -> Result<FiniteGroup> {
    let r = real(2, 2, &[0., -1., 1., 0.]);
    let s = real(2, 2, &[1., 0., 0., -1.]);
    let one = scalar(1., 0.);
    let neg = scalar(-1., 0.);
    from_generators(
        "D4",
        &[r.clone(), s.clone()],
        vec![
            ("A1", vec![one.clone(), one.clone()]),
            ("A2", vec![one.clone(), neg.clone()]),
            ("B1", vec![neg.clone(), one.clone()]),
            ("B2", vec![neg.clone(), neg]),
            ("E", vec![r, s]),
        ],
    )
}

fn quaternion() -> Result<FiniteGroup> {
    let i = CMatrix::from_row_slice(2, 2, &[c64(0., 1.), c64(0., 0.), c64(0., 0.), c64(0., -1.)]);
    let j = real(2, 2, &[0., 1., -1., 0.]);
    let one = scalar(1., 0.);
    let neg = scalar(-1., 0.);
    from_generators(
        "Q8",
        &[i.clone(), j.clone()],
        vec![
            ("trivial", vec![one.clone(), one.clone()]),
            ("i", vec![one.clone(), neg.clone()]),
            ("j", vec![neg.clone(), one.clone()]),
            ("k", vec![neg.clone(), neg]),
            ("spinor", vec![i, j]),
        ],
    )
}
