//! Singular fibers of elliptic-type fibrations by rational curves: checking
//! Kodaira's identities on a curve configuration and recognizing the fiber
//! shapes that occur over an ALF end.
//!
//! A configuration `C = Σ n_i Θ_i` is given by multiplicities `n_i`, the
//! intersection matrix `S_ij = (Θ_i Θ_j)` (self-intersections on the
//! diagonal), anticanonical degrees `a_i = (−K Θ_i)` and optionally the
//! degrees `d_i = (D Θ_i)` of the boundary divisor `D` together with the
//! local multiplicity `d_mult` with which `D` meets `C` at its single
//! intersection point.
//!
//! Chain fibers `Θ₀ + … + Θ_m` have `(Θ_i²) = −2 + δ(i) + δ(i − m)`: the two
//! end curves are `(−1)`-curves and interior curves are `(−2)`-curves.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub n: Vec<i64>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<i64>>,
    pub a: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_mult: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    Shape,
    Multiplicity,
    Symmetry,
    NegativeIntersection,
    FiberIdentity,
    AdjunctionParity,
    VirtualGenus,
    Disconnected,
    AnticanonicalDegree,
    DivisorDegree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub curve: Option<usize>,
    /// Signed defect of the violated identity.
    pub residual: i64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Virtual genus `π'(Θ_i)` from adjunction, when integral.
    pub genera: Vec<Option<i64>>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn violation(kind: ViolationKind, curve: Option<usize>, residual: i64, message: String) -> Violation {
    Violation {
        kind,
        curve,
        residual,
        message,
    }
}

/// Checks every identity and returns all violations.
///
/// * fiber identity `n_i(Θ_i²) + Σ_{j≠i} n_j(Θ_iΘ_j) = 0`;
/// * adjunction `2π'(Θ_i) − 2 − (Θ_i²) = −a_i` with `π'(Θ_i) = 0`
///   (every component is a non-singular rational curve);
/// * connectedness of the dual graph;
/// * `Σ n_i a_i = 2`, and `Σ n_i d_i = 2` when `d` is given.
pub fn validate(cfg: &CurveConfig) -> ValidationReport {
    use ViolationKind::*;
    let len = cfg.n.len();
    let mut v = Vec::new();
    let shape_ok = len > 0
        && cfg.s.len() == len
        && cfg.s.iter().all(|row| row.len() == len)
        && cfg.a.len() == len
        && cfg.d.as_ref().is_none_or(|d| d.len() == len);
    if !shape_ok {
        v.push(violation(
            Shape,
            None,
            0,
            format!("expected {len} curves in S, a and d, and at least one curve"),
        ));
        return ValidationReport {
            genera: Vec::new(),
            violations: v,
        };
    }
    let s = &cfg.s;
    for i in 0..len {
        if cfg.n[i] < 1 {
            v.push(violation(Multiplicity, Some(i), cfg.n[i], format!("n[{i}] = {} < 1", cfg.n[i])));
        }
        for j in 0..i {
            if s[i][j] != s[j][i] {
                v.push(violation(
                    Symmetry,
                    Some(i),
                    s[i][j] - s[j][i],
                    format!("S[{i}][{j}] = {} but S[{j}][{i}] = {}", s[i][j], s[j][i]),
                ));
            }
        }
        for j in 0..len {
            if i != j && s[i][j] < 0 {
                v.push(violation(
                    NegativeIntersection,
                    Some(i),
                    s[i][j],
                    format!("distinct curves {i} and {j} meet negatively"),
                ));
            }
        }
    }
    let mut genera = Vec::with_capacity(len);
    for i in 0..len {
        let fiber: i64 = (0..len).map(|j| cfg.n[j] * s[i][j]).sum();
        if fiber != 0 {
            v.push(violation(FiberIdentity, Some(i), fiber, format!("(C·Θ_{i}) = {fiber}")));
        }
        let twice = s[i][i] - cfg.a[i] + 2;
        if twice % 2 != 0 {
            genera.push(None);
            v.push(violation(
                AdjunctionParity,
                Some(i),
                1,
                format!("(Θ_{i}²) + (KΘ_{i}) is odd"),
            ));
        } else {
            let g = twice / 2;
            genera.push(Some(g));
            if g != 0 {
                v.push(violation(VirtualGenus, Some(i), g, format!("π'(Θ_{i}) = {g}, expected 0")));
            }
        }
    }
    if !connected(s) {
        v.push(violation(Disconnected, None, 1, "dual graph is disconnected".into()));
    }
    let deg: i64 = (0..len).map(|i| cfg.n[i] * cfg.a[i]).sum();
    if deg != 2 {
        v.push(violation(AnticanonicalDegree, None, deg - 2, format!("(−K·C) = {deg}, expected 2")));
    }
    if let Some(d) = &cfg.d {
        let dd: i64 = (0..len).map(|i| cfg.n[i] * d[i]).sum();
        if dd != 2 {
            v.push(violation(DivisorDegree, None, dd - 2, format!("(D·C) = {dd}, expected 2")));
        }
    }
    ValidationReport { genera, violations: v }
}

fn neighbors(s: &[Vec<i64>], i: usize) -> Vec<usize> {
    (0..s.len()).filter(|&j| j != i && s[i][j] != 0).collect()
}

fn connected(s: &[Vec<i64>]) -> bool {
    let len = s.len();
    let mut seen = vec![false; len];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in neighbors(s, i) {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen.into_iter().all(|x| x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiberType {
    Regular,
    AChain(usize),
    DCase1,
    DCase2,
    DCase3(usize),
    Invalid(String),
}

impl FiberType {
    pub fn name(&self) -> &'static str {
        match self {
            FiberType::Regular => "Regular",
            FiberType::AChain(_) => "AChain",
            FiberType::DCase1 => "DCase1",
            FiberType::DCase2 => "DCase2",
            FiberType::DCase3(_) => "DCase3",
            FiberType::Invalid(_) => "Invalid",
        }
    }

    pub fn m(&self) -> Option<usize> {
        match self {
            FiberType::AChain(m) | FiberType::DCase3(m) => Some(*m),
            _ => None,
        }
    }

    /// Rank of the Dynkin diagram spanned by the central-fiber curves:
    /// `A_{m−1}` for chains, `D_{m+2}` for the third D-case, 0 otherwise.
    pub fn dynkin_rank(&self) -> Option<usize> {
        match self {
            FiberType::Regular | FiberType::DCase1 | FiberType::DCase2 => Some(0),
            FiberType::AChain(m) => m.checked_sub(1),
            FiberType::DCase3(m) => Some(m + 2),
            FiberType::Invalid(_) => None,
        }
    }
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberType::AChain(m) | FiberType::DCase3(m) => write!(f, "{}({m})", self.name()),
            FiberType::Invalid(r) => write!(f, "Invalid({r})"),
            _ => write!(f, "{}", self.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub fiber: FiberType,
    pub note: Option<String>,
    pub report: ValidationReport,
}

const NO_DIVISOR_NOTE: &str = "no D data: D-cases cannot be distinguished from the plain fiber";

/// Recognizes the fiber type of a configuration.
pub fn classify(cfg: &CurveConfig) -> Classification {
    let report = validate(cfg);
    if !report.is_valid() {
        let reason = report
            .violations
            .iter()
            .map(|v| v.message.clone())
            .collect::<Vec<_>>()
            .join("; ");
        return Classification {
            fiber: FiberType::Invalid(reason),
            note: None,
            report,
        };
    }
    let no_d = cfg.d.is_none() && cfg.d_mult.is_none();
    let note = no_d.then(|| NO_DIVISOR_NOTE.to_string());
    let one_point_double = cfg.d_mult == Some(2);
    let len = cfg.n.len();
    let fiber = if len == 1 {
        if one_point_double {
            FiberType::DCase1
        } else {
            FiberType::Regular
        }
    } else if let Some(m) = chain_length(cfg) {
        if m == 1 && one_point_double {
            FiberType::DCase2
        } else {
            FiberType::AChain(m)
        }
    } else if let Some(m) = d_trunk_length(cfg) {
        FiberType::DCase3(m)
    } else {
        FiberType::Invalid("unrecognized configuration".into())
    };
    let note = match fiber {
        FiberType::Regular | FiberType::AChain(1) => note,
        _ => None,
    };
    Classification { fiber, note, report }
}

/// `Some(m)` when the curves form a simple path `Θ₀ − … − Θ_m` of
/// multiplicity-one curves meeting transversally once.
fn chain_length(cfg: &CurveConfig) -> Option<usize> {
    let s = &cfg.s;
    let len = s.len();
    if cfg.n.iter().any(|&n| n != 1) {
        return None;
    }
    let edges: usize = (0..len).map(|i| neighbors(s, i).len()).sum::<usize>() / 2;
    let simple = (0..len).all(|i| neighbors(s, i).iter().all(|&j| s[i][j] == 1));
    let max_deg = (0..len).map(|i| neighbors(s, i).len()).max().unwrap_or(0);
    // connected with len − 1 edges and degrees ≤ 2: a path
    (simple && edges + 1 == len && max_deg <= 2).then(|| len - 1)
}

/// `Some(m)` for `2Θ₀ + … + 2Θ_m + Θ_{m+1} + Θ_{m+2}`: a path of doubled
/// curves starting at the `(−1)`-curve `Θ₀`, with two reduced tips attached
/// to `Θ_m`.
fn d_trunk_length(cfg: &CurveConfig) -> Option<usize> {
    let s = &cfg.s;
    let len = s.len();
    let tips: Vec<usize> = (0..len).filter(|&i| cfg.n[i] == 1).collect();
    let trunk: Vec<usize> = (0..len).filter(|&i| cfg.n[i] == 2).collect();
    if tips.len() != 2 || trunk.len() + 2 != len {
        return None;
    }
    if (0..len).any(|i| neighbors(s, i).iter().any(|&j| s[i][j] != 1)) {
        return None;
    }
    let start = *trunk.iter().find(|&&i| s[i][i] == -1 && cfg.a[i] == 1)?;
    let mut order = vec![start];
    let mut prev = None;
    let mut cur = start;
    loop {
        let next: Vec<usize> = neighbors(s, cur)
            .into_iter()
            .filter(|&j| cfg.n[j] == 2 && Some(j) != prev)
            .collect();
        match next.as_slice() {
            [] => break,
            [j] => {
                prev = Some(cur);
                cur = *j;
                order.push(cur);
            }
            _ => return None,
        }
        if order.len() > trunk.len() {
            return None;
        }
    }
    if order.len() != trunk.len() {
        return None;
    }
    let end = *order.last()?;
    let tips_ok = tips
        .iter()
        .all(|&t| neighbors(s, t) == vec![end]);
    tips_ok.then(|| order.len() - 1)
}

/// Canonical configuration of a fiber type. `k` is the rank of the Dynkin
/// diagram spanned by the central-fiber curves and must match the type
/// (see [`FiberType::dynkin_rank`]).
///
/// The second D-case uses `(Θ₀Θ₁) = 1`, forced by the fiber identity for two
/// `(−1)`-curves of multiplicity one.
pub fn generate_fiber(t: &FiberType, k: usize) -> Result<CurveConfig> {
    let expected = t
        .dynkin_rank()
        .ok_or_else(|| Error::InconsistentFiber(format!("cannot generate {t}")))?;
    if let FiberType::AChain(0) = t {
        return Err(Error::InconsistentFiber("AChain needs m ≥ 1".into()));
    }
    if k != expected {
        return Err(Error::InconsistentFiber(format!(
            "{t} spans a rank-{expected} diagram, got k = {k}"
        )));
    }
    Ok(match *t {
        FiberType::Regular => CurveConfig {
            n: vec![1],
            s: vec![vec![0]],
            a: vec![2],
            d: None,
            d_mult: None,
        },
        FiberType::DCase1 => CurveConfig {
            n: vec![1],
            s: vec![vec![0]],
            a: vec![2],
            d: Some(vec![2]),
            d_mult: Some(2),
        },
        FiberType::DCase2 => CurveConfig {
            n: vec![1, 1],
            s: vec![vec![-1, 1], vec![1, -1]],
            a: vec![1, 1],
            d: Some(vec![1, 1]),
            d_mult: Some(2),
        },
        FiberType::AChain(m) => {
            let len = m + 1;
            let mut s = vec![vec![0; len]; len];
            for i in 0..len {
                s[i][i] = -2 + i64::from(i == 0) + i64::from(i == m);
                if i + 1 < len {
                    s[i][i + 1] = 1;
                    s[i + 1][i] = 1;
                }
            }
            let a = (0..len).map(|i| s[i][i] + 2).collect();
            CurveConfig {
                n: vec![1; len],
                s,
                a,
                d: None,
                d_mult: None,
            }
        }
        FiberType::DCase3(m) => {
            let len = m + 3;
            let mut s = vec![vec![0; len]; len];
            let mut link = |i: usize, j: usize| {
                s[i][j] = 1;
                s[j][i] = 1;
            };
            for i in 0..m {
                link(i, i + 1);
            }
            link(m, m + 1);
            link(m, m + 2);
            for (i, row) in s.iter_mut().enumerate() {
                row[i] = if i == 0 { -1 } else { -2 };
            }
            let n = (0..len).map(|i| if i <= m { 2 } else { 1 }).collect();
            let a = (0..len).map(|i| s[i][i] + 2).collect();
            let mut d = vec![0; len];
            d[0] = 1;
            CurveConfig {
                n,
                s,
                a,
                d: Some(d),
                d_mult: Some(1),
            }
        }
        FiberType::Invalid(_) => unreachable!("rejected above"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: Vec<i64>, s: Vec<Vec<i64>>, a: Vec<i64>) -> CurveConfig {
        CurveConfig {
            n,
            s,
            a,
            d: None,
            d_mult: None,
        }
    }

    #[test]
    fn single_regular_curve() {
        let c = cfg(vec![1], vec![vec![0]], vec![2]);
        let r = validate(&c);
        assert!(r.is_valid());
        assert_eq!(r.genera, vec![Some(0)]);
        let cl = classify(&c);
        assert_eq!(cl.fiber, FiberType::Regular);
        assert!(cl.note.is_some());
    }

    #[test]
    fn chain_of_three() {
        let c = cfg(
            vec![1, 1, 1],
            vec![vec![-1, 1, 0], vec![1, -2, 1], vec![0, 1, -1]],
            vec![1, 0, 1],
        );
        assert!(validate(&c).is_valid());
        assert_eq!(classify(&c).fiber, FiberType::AChain(2));
        assert_eq!(generate_fiber(&FiberType::AChain(2), 1).unwrap(), c);
    }

    #[test]
    fn tampered_chain_fails_fiber_identity() {
        let c = cfg(
            vec![1, 1, 1],
            vec![vec![-1, 1, 0], vec![1, -3, 1], vec![0, 1, -1]],
            vec![1, 0, 1],
        );
        let r = validate(&c);
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::FiberIdentity));
        assert!(matches!(classify(&c).fiber, FiberType::Invalid(_)));
    }

    #[test]
    fn two_curve_chain() {
        let c = cfg(vec![1, 1], vec![vec![-1, 1], vec![1, -1]], vec![1, 1]);
        assert_eq!(classify(&c).fiber, FiberType::AChain(1));
    }

    #[test]
    fn d_case_three_with_one_link() {
        let c = CurveConfig {
            n: vec![2, 2, 1, 1],
            s: vec![
                vec![-1, 1, 0, 0],
                vec![1, -2, 1, 1],
                vec![0, 1, -2, 0],
                vec![0, 1, 0, -2],
            ],
            a: vec![1, 0, 0, 0],
            d: Some(vec![1, 0, 0, 0]),
            d_mult: None,
        };
        assert!(validate(&c).is_valid());
        assert_eq!(classify(&c).fiber, FiberType::DCase3(1));
    }

    #[test]
    fn d_case_one() {
        let c = CurveConfig {
            d_mult: Some(2),
            ..cfg(vec![1], vec![vec![0]], vec![2])
        };
        assert_eq!(classify(&c).fiber, FiberType::DCase1);
    }

    #[test]
    fn d_case_three_without_links() {
        let c = generate_fiber(&FiberType::DCase3(0), 2).unwrap();
        assert_eq!(c.n, vec![2, 1, 1]);
        assert_eq!(c.s, vec![vec![-1, 1, 1], vec![1, -2, 0], vec![1, 0, -2]]);
        assert_eq!(classify(&c).fiber, FiberType::DCase3(0));
    }

    #[test]
    fn classification_ignores_curve_order() {
        let c = generate_fiber(&FiberType::DCase3(3), 5).unwrap();
        let perm = [4, 2, 0, 5, 1, 3];
        let permuted = CurveConfig {
            n: perm.iter().map(|&i| c.n[i]).collect(),
            s: perm.iter().map(|&i| perm.iter().map(|&j| c.s[i][j]).collect()).collect(),
            a: perm.iter().map(|&i| c.a[i]).collect(),
            d: c.d.as_ref().map(|d| perm.iter().map(|&i| d[i]).collect()),
            d_mult: c.d_mult,
        };
        assert_eq!(classify(&permuted).fiber, FiberType::DCase3(3));
    }

    #[test]
    fn inconsistent_rank_is_rejected() {
        assert!(generate_fiber(&FiberType::AChain(4), 4).is_err());
        assert!(generate_fiber(&FiberType::AChain(0), 0).is_err());
        assert!(generate_fiber(&FiberType::DCase3(1), 1).is_err());
        assert!(generate_fiber(&FiberType::Invalid("x".into()), 0).is_err());
    }

    #[test]
    fn shape_errors_are_reported() {
        let c = cfg(vec![1, 1], vec![vec![0]], vec![2]);
        assert_eq!(validate(&c).violations[0].kind, ViolationKind::Shape);
    }

    #[test]
    fn disconnected_is_reported() {
        let c = cfg(vec![1, 1], vec![vec![0, 0], vec![0, 0]], vec![1, 1]);
        assert!(validate(&c)
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::Disconnected));
    }

    #[test]
    fn json_field_names() {
        let c: CurveConfig = serde_json::from_str(r#"{"n":[1],"S":[[0]],"a":[2],"d_mult":2}"#).unwrap();
        assert_eq!(c.d_mult, Some(2));
        assert_eq!(classify(&c).fiber, FiberType::DCase1);
    }
}
