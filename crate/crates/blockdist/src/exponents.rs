//! Closed-form growth exponents for block-distance tuple sets, as exact
//! rationals: per-dimension distance exponents, two-set exponents, the
//! derived bounds for two-block / all-twos / general partitions, and the
//! grid ceiling 2q/d, with provenance notes where the tables mix sources.

use num_rational::Ratio;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::Partition;

pub type Rat = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(n, d)
}

/// Decimal rendering to six places, round half away from zero.
pub fn decimal6(r: Rat) -> String {
    let n = *r.numer() as i128;
    let d = *r.denom() as i128;
    let sign = if n < 0 { "-" } else { "" };
    let n = n.abs();
    let scaled = (n * 1_000_000 + d / 2) / d;
    format!("{sign}{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
}

/// JSON form of a rational: `{"ratio":"p/q","decimal":"0.375000"}`.
pub fn rat_json(r: Rat) -> serde_json::Value {
    json!({
        "ratio": format!("{}/{}", r.numer(), r.denom()),
        "decimal": decimal6(r),
    })
}

/// Distance-set exponent 2/m − 2/(m(m+2)) valid in every dimension m ≥ 2.
///
/// The variant m/2 − 2/(m(m+2)) sometimes quoted alongside exceeds 1 for
/// m ≥ 3, which no distance-count exponent can do; this module uses the
/// 2/m form throughout and the report carries a note to that effect.
pub fn gamma_sv(m: usize) -> Result<Rat> {
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "distance exponent needs dimension >= 2, got {m}"
        )));
    }
    let m = m as i64;
    Ok(rat(2, m) - rat(2, m * (m + 2)))
}

/// Best known distance-set exponent per dimension: 1 in the plane (sharp up
/// to logarithms, Guth–Katz), 3/5 in dimension three (planar sharpness with
/// the Solymosi–Vu lift), the Solymosi–Vu value beyond.
pub fn gamma_best(m: usize) -> Result<(Rat, &'static str)> {
    match m {
        0 | 1 => Err(Error::InvalidInput(format!(
            "distance exponent needs dimension >= 2, got {m}"
        ))),
        2 => Ok((rat(1, 1), "sharp up to logarithms (Guth-Katz)")),
        3 => Ok((rat(3, 5), "planar sharpness with the Solymosi-Vu lift")),
        _ => Ok((gamma_sv(m)?, "Solymosi-Vu")),
    }
}

/// Two-set distance exponent 2/(m+1), valid for s-adaptable sets with
/// s > m/2 + 1/3.
pub fn delta_pair(m: usize) -> Result<Rat> {
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "two-set distance exponent needs dimension >= 2, got {m}"
        )));
    }
    Ok(rat(2, m as i64 + 1))
}

/// Two-set block-tuple exponent 2/(2d − (pᵢ − 1)) for the complementary
/// blocks of block i; largest at i = 1.
pub fn eta_general(d: usize, p_i: usize) -> Result<Rat> {
    if p_i < 2 || p_i > d {
        return Err(Error::InvalidInput(format!(
            "block size {p_i} invalid for ambient dimension {d}"
        )));
    }
    Ok(rat(2, 2 * d as i64 - (p_i as i64 - 1)))
}

/// Convenient two-set exponent 2/(4(q−1)) for all-twos partitions with q−1
/// remaining blocks.
pub fn eta_twos(q_minus_1: usize) -> Result<Rat> {
    if q_minus_1 < 1 {
        return Err(Error::InvalidInput(
            "all-twos eta needs at least one remaining block".into(),
        ));
    }
    Ok(rat(2, 4 * q_minus_1 as i64))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaResult {
    pub theta: Rat,
    /// The density split that balances the two cases; equal to theta.
    pub alpha: Rat,
}

/// All-twos iterated exponent (1+η)/(q + (q−1)η).
pub fn theta(q: usize, eta: Rat) -> Result<ThetaResult> {
    if q < 2 {
        return Err(Error::InvalidInput(format!(
            "all-twos exponent needs q >= 2, got {q}"
        )));
    }
    if eta <= rat(0, 1) || eta > rat(1, 1) {
        return Err(Error::InvalidInput(format!(
            "eta {eta} outside (0, 1]"
        )));
    }
    let q = q as i64;
    let t = (rat(1, 1) + eta) / (Ratio::from_integer(q) + Ratio::from_integer(q - 1) * eta);
    Ok(ThetaResult { theta: t, alpha: t })
}

/// The displayed closed form 1/q + 2/(q(4q+1)(q−1)). It does not agree with
/// [`theta`] at η = 1/(2(q−1)) — e.g. 14/39 vs 5/14 at q = 3 — so both are
/// reported with a discrepancy flag rather than picking one.
pub fn theta_display(q: usize) -> Result<Rat> {
    if q < 2 {
        return Err(Error::InvalidInput(format!(
            "all-twos exponent needs q >= 2, got {q}"
        )));
    }
    let q = q as i64;
    Ok(rat(1, q) + rat(2, q * (4 * q + 1) * (q - 1)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauResult {
    /// Largest value of the per-block formula (attained at the first block
    /// for these tables).
    pub tau: Rat,
    /// Optimizing density split for the attaining block.
    pub alpha: Rat,
    /// γ_q(γᵢ+ηᵢ)/(γ_q + (q−1)(γᵢ+ηᵢ)) for every block i.
    pub per_block: Vec<Rat>,
    pub argmax: usize,
    pub first_maximizes: bool,
}

/// General-partition exponent with γᵢ = gamma_sv(pᵢ) and
/// ηᵢ = eta_general(d, pᵢ); evaluated at every block, reporting the max.
pub fn tau(p: &Partition) -> Result<TauResult> {
    let q = p.num_blocks();
    if q < 2 {
        return Err(Error::InvalidInput(format!(
            "general-partition exponent needs q >= 2, got {q}"
        )));
    }
    let d = p.dim();
    let gamma_q = gamma_sv(p.parts()[q - 1])?;
    let qm1 = Ratio::from_integer(q as i64 - 1);
    let mut per_block = Vec::with_capacity(q);
    let mut alphas = Vec::with_capacity(q);
    for &pi in p.parts() {
        let g = gamma_sv(pi)?;
        let e = eta_general(d, pi)?;
        let ge = g + e;
        let denom = gamma_q + qm1 * ge;
        per_block.push(gamma_q * ge / denom);
        alphas.push(ge / denom);
    }
    let argmax = per_block
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap();
    Ok(TauResult {
        tau: per_block[argmax],
        alpha: alphas[argmax],
        first_maximizes: per_block[argmax] == per_block[0],
        per_block,
        argmax,
    })
}

/// Equal-blocks correction factor (k² + 2k)/(k² + 2k + 1), i.e. the ratio of
/// the two-set exponent 2/(k+1) to gamma_sv(k); at least 13/14 for k ≥ 3
/// and increasing.
pub fn zeta(k: usize) -> Result<Rat> {
    if k < 3 {
        return Err(Error::InvalidInput(format!(
            "equal-blocks factor needs k >= 3, got {k}"
        )));
    }
    let k = k as i64;
    Ok(rat(k * k + 2 * k, k * k + 2 * k + 1))
}

/// Baseline gamma_best(p_q)/q from the densest single projection.
pub fn trivial_exponent(p: &Partition) -> Result<Rat> {
    let (g, _) = gamma_best(*p.parts().last().unwrap())?;
    Ok(g / Ratio::from_integer(p.num_blocks() as i64))
}

/// Baseline with the uniform gamma_sv table (used by the structural
/// comparison tau > trivial).
pub fn trivial_exponent_sv(p: &Partition) -> Result<Rat> {
    Ok(gamma_sv(*p.parts().last().unwrap())? / Ratio::from_integer(p.num_blocks() as i64))
}

/// Growth exponent 2q/d of the tuple set of the integer grid: the
/// conjectural ceiling.
pub fn grid_exponent(p: &Partition) -> Rat {
    rat(2 * p.num_blocks() as i64, p.dim() as i64)
}

/// A named exponent entry with provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedBound {
    pub name: String,
    pub value: Rat,
    /// True when the bound rests on an unproven conjecture.
    pub conditional: bool,
    pub note: String,
}

/// Every predicted exponent for one partition, as exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentTable {
    pub partition: Partition,
    pub gamma_sv: Vec<Rat>,
    pub gamma_best: Vec<Rat>,
    pub gamma_notes: Vec<&'static str>,
    pub delta: Vec<Rat>,
    pub eta: Vec<Rat>,
    pub trivial: Rat,
    pub trivial_sv: Rat,
    pub grid_upper: Rat,
    pub tau: TauResult,
    /// All-twos entries (present when every part is 2).
    pub theta: Option<ThetaResult>,
    pub theta_display: Option<Rat>,
    pub theta_discrepancy: Option<bool>,
    /// Equal-blocks factor (two equal blocks of size >= 3).
    pub zeta: Option<Rat>,
    /// Truth value of delta(pᵢ+1) >= gamma_sv(pᵢ) per block; recorded, not
    /// acted on.
    pub two_set_dominates: Vec<bool>,
    pub named: Vec<NamedBound>,
    pub notes: Vec<String>,
}

pub fn exponent_report(p: &Partition) -> Result<ExponentTable> {
    let q = p.num_blocks();
    if q < 2 {
        return Err(Error::InvalidInput(
            "exponent report needs at least two blocks".into(),
        ));
    }
    let d = p.dim();
    let parts = p.parts();
    let mut gamma_sv_v = Vec::with_capacity(q);
    let mut gamma_best_v = Vec::with_capacity(q);
    let mut gamma_notes = Vec::with_capacity(q);
    let mut delta_v = Vec::with_capacity(q);
    let mut eta_v = Vec::with_capacity(q);
    let mut two_set_dominates = Vec::with_capacity(q);
    for &pi in parts {
        gamma_sv_v.push(gamma_sv(pi)?);
        let (g, note) = gamma_best(pi)?;
        gamma_best_v.push(g);
        gamma_notes.push(note);
        delta_v.push(delta_pair(pi)?);
        eta_v.push(eta_general(d, pi)?);
        two_set_dominates.push(delta_pair(pi + 1)? >= gamma_sv(pi)?);
    }

    let all_twos = parts.iter().all(|&pi| pi == 2);
    let (theta_r, theta_disp, theta_flag) = if all_twos {
        let t = theta(q, eta_twos(q - 1)?)?;
        let disp = theta_display(q)?;
        let flag = t.theta != disp;
        (Some(t), Some(disp), Some(flag))
    } else {
        (None, None, None)
    };

    let zeta_r = if q == 2 && parts[0] == parts[1] && parts[0] >= 3 {
        Some(zeta(parts[0])?)
    } else {
        None
    };

    let mut named = Vec::new();
    let mut notes = vec![
        "gamma uses 2/m - 2/(m(m+2)); the variant m/2 - 2/(m(m+2)) exceeds 1 for m >= 3 and \
         cannot be a distance-count exponent"
            .to_string(),
    ];
    if all_twos {
        notes.push(
            "the all-twos closed form (1+eta)/(q+(q-1)eta) at eta = 1/(2(q-1)) and the display \
             1/q + 2/(q(4q+1)(q-1)) disagree (5/14 vs 14/39 at q = 3); both are reported"
                .to_string(),
        );
    }

    if parts == [2, 2] {
        named.push(NamedBound {
            name: "two-plane second moment".into(),
            value: rat(6, 11),
            conditional: false,
            note: "from the unit-distance bound on tuple multiplicity".into(),
        });
        named.push(NamedBound {
            name: "two-plane conditional".into(),
            value: rat(2, 3),
            conditional: true,
            note: "assumes the single-distance conjecture".into(),
        });
        named.push(NamedBound {
            name: "two-plane sharp".into(),
            value: rat(1, 1),
            conditional: false,
            note: "sharp up to logarithms via richness pigeonholing".into(),
        });
    } else if q == 2 {
        let (k, l) = (parts[0], parts[1]);
        if k != l {
            let (gl, _) = gamma_best(l)?;
            named.push(NamedBound {
                name: "two-block adaptable".into(),
                value: gl,
                conditional: false,
                note: format!("for s-adaptable sets with s > {l}/2 + 1/3"),
            });
        } else {
            let z = zeta(k)?;
            named.push(NamedBound {
                name: "equal-blocks adaptable".into(),
                value: z * gamma_sv(k)?,
                conditional: false,
                note: "zeta(k) * gamma_sv(k), equal to the two-set exponent 2/(k+1)".into(),
            });
            named.push(NamedBound {
                name: "equal-blocks uniform floor".into(),
                value: rat(13, 14) * gamma_sv(k)?,
                conditional: false,
                note: "13/14 is the infimum of zeta(k) over k >= 3".into(),
            });
        }
    }

    Ok(ExponentTable {
        partition: p.clone(),
        gamma_sv: gamma_sv_v,
        gamma_best: gamma_best_v,
        gamma_notes,
        delta: delta_v,
        eta: eta_v,
        trivial: trivial_exponent(p)?,
        trivial_sv: trivial_exponent_sv(p)?,
        grid_upper: grid_exponent(p),
        tau: tau(p)?,
        theta: theta_r,
        theta_display: theta_disp,
        theta_discrepancy: theta_flag,
        zeta: zeta_r,
        two_set_dominates,
        named,
        notes,
    })
}

impl ExponentTable {
    /// Lower-bound entries a single-set scaling run can be compared against:
    /// (label, exponent, conditional).
    pub fn lower_bounds(&self) -> Vec<(String, Rat, bool)> {
        let mut out = vec![("trivial".to_string(), self.trivial, false)];
        out.push(("tau".to_string(), self.tau.tau, false));
        if let Some(t) = &self.theta {
            out.push(("theta".to_string(), t.theta, false));
        }
        for nb in &self.named {
            out.push((nb.name.clone(), nb.value, nb.conditional));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "partition": self.partition.parts(),
            "dim": self.partition.dim(),
            "q": self.partition.num_blocks(),
            "gamma_sv": self.gamma_sv.iter().copied().map(rat_json).collect::<Vec<_>>(),
            "gamma_best": self
                .gamma_best
                .iter()
                .zip(&self.gamma_notes)
                .map(|(&g, &note)| json!({
                    "ratio": format!("{}/{}", g.numer(), g.denom()),
                    "decimal": decimal6(g),
                    "note": note,
                }))
                .collect::<Vec<_>>(),
            "delta_two_set": self.delta.iter().copied().map(rat_json).collect::<Vec<_>>(),
            "eta": self.eta.iter().copied().map(rat_json).collect::<Vec<_>>(),
            "trivial": rat_json(self.trivial),
            "trivial_sv": rat_json(self.trivial_sv),
            "grid_upper": rat_json(self.grid_upper),
            "tau": json!({
                "value": rat_json(self.tau.tau),
                "alpha": rat_json(self.tau.alpha),
                "per_block": self.tau.per_block.iter().copied().map(rat_json).collect::<Vec<_>>(),
                "argmax_block": self.tau.argmax + 1,
                "first_maximizes": self.tau.first_maximizes,
            }),
            "theta": self.theta.as_ref().map(|t| json!({
                "value": rat_json(t.theta),
                "alpha": rat_json(t.alpha),
                "display_form": self.theta_display.map(rat_json),
                "discrepancy": self.theta_discrepancy,
            })),
            "zeta": self.zeta.map(rat_json),
            "two_set_dominates": self.two_set_dominates,
            "named": self.named.iter().map(|nb| json!({
                "name": nb.name,
                "value": rat_json(nb.value),
                "conditional": nb.conditional,
                "note": nb.note,
            })).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }

    /// Aligned plaintext rendering.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let p = &self.partition;
        s.push_str(&format!(
            "exponents for partition {p}  (d={}, q={})\n",
            p.dim(),
            p.num_blocks()
        ));
        s.push_str(&format!(
            "{:<8}{:>12}{:>12}{:>12}{:>12}\n",
            "block", "gamma_sv", "gamma_best", "delta2set", "eta"
        ));
        for i in 0..p.num_blocks() {
            s.push_str(&format!(
                "{:<8}{:>12}{:>12}{:>12}{:>12}\n",
                format!("{} (p={})", i + 1, p.parts()[i]),
                self.gamma_sv[i].to_string(),
                self.gamma_best[i].to_string(),
                self.delta[i].to_string(),
                self.eta[i].to_string(),
            ));
        }
        let mut row = |name: &str, r: Rat, extra: &str| {
            s.push_str(&format!(
                "{:<28}{:>12}  {}  {}\n",
                name,
                r.to_string(),
                decimal6(r),
                extra
            ));
        };
        row("trivial", self.trivial, "(gamma_best(p_q)/q)");
        row("trivial_sv", self.trivial_sv, "(gamma_sv(p_q)/q)");
        row("tau", self.tau.tau, "");
        row("tau alpha", self.tau.alpha, "");
        if let Some(t) = &self.theta {
            row("theta", t.theta, "(all-twos)");
        }
        if let Some(d) = self.theta_display {
            let flag = if self.theta_discrepancy == Some(true) {
                "(differs from theta)"
            } else {
                ""
            };
            row("theta display form", d, flag);
        }
        if let Some(z) = self.zeta {
            row("zeta", z, "(equal blocks)");
        }
        for nb in &self.named {
            let cond = if nb.conditional { " [conditional]" } else { "" };
            row(&nb.name, nb.value, cond);
        }
        row("grid upper", self.grid_upper, "(2q/d)");
        s
    }
}

/// All increasing partitions of d with parts >= 2 and at least two blocks.
pub fn partitions_with_min_part_two(d: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: usize, min_part: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            if current.len() >= 2 {
                out.push(Partition::new(current.clone()).expect("valid by construction"));
            }
            return;
        }
        for part in min_part..=remaining {
            if remaining - part != 0 && remaining - part < part {
                continue; // cannot extend non-decreasingly
            }
            current.push(part);
            rec(remaining - part, part, current, out);
            current.pop();
        }
    }
    rec(d, 2, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_sv(2).unwrap(), rat(3, 4));
        assert_eq!(gamma_sv(3).unwrap(), rat(8, 15));
        assert_eq!(gamma_sv(100).unwrap(), rat(2, 100) - rat(2, 10200));
        assert!(gamma_sv(1).is_err());

        assert_eq!(gamma_best(2).unwrap().0, rat(1, 1));
        assert_eq!(gamma_best(3).unwrap().0, rat(3, 5));
        assert_eq!(gamma_best(4).unwrap().0, rat(5, 12));
    }

    #[test]
    fn delta_and_eta_values() {
        assert_eq!(delta_pair(2).unwrap(), rat(2, 3));
        assert_eq!(delta_pair(3).unwrap(), rat(1, 2));
        assert_eq!(delta_pair(4).unwrap(), rat(2, 5));
        assert_eq!(eta_general(6, 2).unwrap(), rat(2, 11));
        assert_eq!(eta_general(4, 2).unwrap(), rat(2, 7));
        assert!(eta_general(3, 4).is_err());
        assert_eq!(eta_twos(2).unwrap(), rat(1, 4));
    }

    #[test]
    fn theta_values() {
        let t = theta(3, rat(1, 4)).unwrap();
        assert_eq!(t.theta, rat(5, 14));
        assert_eq!(t.alpha, rat(5, 14));
        assert_eq!(theta(2, rat(1, 1)).unwrap().theta, rat(2, 3));
        assert!(theta(3, rat(0, 1)).is_err());
        assert_eq!(theta_display(3).unwrap(), rat(14, 39));
    }

    #[test]
    fn tau_values() {
        let p222 = Partition::new(vec![2, 2, 2]).unwrap();
        let t = tau(&p222).unwrap();
        assert_eq!(t.tau, rat(123, 460));
        assert!(t.first_maximizes);
        assert_eq!(t.alpha, rat(41, 115));

        let p22 = Partition::new(vec![2, 2]).unwrap();
        assert_eq!(tau(&p22).unwrap().tau, rat(87, 200));
    }

    #[test]
    fn tau_asymptotic_trend() {
        // For all-twos partitions, tau approaches gamma_q(1/q + 1/(dq)).
        let d = 40;
        let q = 20;
        let p = Partition::new(vec![2; q]).unwrap();
        let t = tau(&p).unwrap();
        let gamma_q = gamma_sv(2).unwrap();
        let approx = gamma_q * (rat(1, q as i64) + rat(1, (d * q) as i64));
        let lhs = *t.tau.numer() as f64 / *t.tau.denom() as f64;
        let rhs = *approx.numer() as f64 / *approx.denom() as f64;
        assert!(
            (lhs - rhs).abs() / rhs < 0.10,
            "tau {lhs} vs trend {rhs}"
        );
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta(3).unwrap(), rat(15, 16));
        assert_eq!(zeta(4).unwrap(), rat(24, 25));
        assert!(zeta(10).unwrap() > zeta(3).unwrap());
        assert!(zeta(3).unwrap() >= rat(13, 14));
        assert!(zeta(2).is_err());
        // zeta(k) * gamma_sv(k) collapses to the two-set exponent.
        for k in 3..20 {
            assert_eq!(
                zeta(k).unwrap() * gamma_sv(k).unwrap(),
                delta_pair(k).unwrap()
            );
        }
    }

    #[test]
    fn trivial_and_grid_values() {
        let p23 = Partition::new(vec![2, 3]).unwrap();
        assert_eq!(trivial_exponent(&p23).unwrap(), rat(3, 10));
        let p22 = Partition::new(vec![2, 2]).unwrap();
        assert_eq!(grid_exponent(&p22), rat(1, 1));
        assert_eq!(grid_exponent(&p23), rat(4, 5));
    }

    #[test]
    fn report_contents() {
        let p22 = Partition::new(vec![2, 2]).unwrap();
        let table = exponent_report(&p22).unwrap();
        let values: Vec<Rat> = table.named.iter().map(|nb| nb.value).collect();
        assert!(values.contains(&rat(6, 11)));
        assert!(values.contains(&rat(2, 3)));
        assert!(values.contains(&rat(1, 1)));
        assert!(table
            .named
            .iter()
            .any(|nb| nb.value == rat(2, 3) && nb.conditional));
        assert_eq!(table.theta_discrepancy, Some(true));

        let p23 = Partition::new(vec![2, 3]).unwrap();
        let t23 = exponent_report(&p23).unwrap();
        assert!(t23.named.iter().any(|nb| nb.value == rat(3, 5)));
        assert!(t23.theta.is_none());

        let p33 = Partition::new(vec![3, 3]).unwrap();
        let t33 = exponent_report(&p33).unwrap();
        assert_eq!(t33.zeta, Some(rat(15, 16)));
        assert!(t33
            .named
            .iter()
            .any(|nb| nb.value == rat(13, 14) * gamma_sv(3).unwrap()));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal6(rat(87, 200)), "0.435000");
        assert_eq!(decimal6(rat(1, 3)), "0.333333");
        assert_eq!(decimal6(rat(2, 3)), "0.666667");
        assert_eq!(decimal6(rat(5, 1)), "5.000000");
    }

    #[test]
    fn partition_enumeration_counts() {
        // d = 6: (2,4), (3,3), (2,2,2) — (6) excluded by the q >= 2 rule.
        let ps = partitions_with_min_part_two(6);
        assert_eq!(ps.len(), 3);
        for d in 4..=14 {
            for p in partitions_with_min_part_two(d) {
                assert_eq!(p.dim(), d);
                assert!(p.num_blocks() >= 2);
            }
        }
    }
}
