//! Exact integer sign tests behind the counting-class upper bounds: the
//! trace-power test on sampled strategy tuples, the measured-verifier test,
//! and tiny end-to-end deciders built on them.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::circuit::{Circuit, Referee};
use crate::error::{Error, Result};
use crate::exact::{DyadicGaussian, ExactMatrix};
use crate::game::{effect_operators, EffectOperators};
use crate::gap::{
    circuit_gap_functions, gap_add, gap_eval, gap_matrix_product, gap_scale, gap_sum, pair_decode,
    tuple_decode, tuple_encode, tuple_len, BitString, GapFunction, GapMatrixSpec,
};
use crate::natural::heisenberg;
use crate::sparsify::{StrategyTuple, MAX_TUPLE_ENUMERATION};

/// A language over binary strings.
#[derive(Clone)]
pub struct Predicate {
    label: String,
    membership: Arc<dyn Fn(&BitString) -> bool + Send + Sync>,
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Predicate({})", self.label)
    }
}

impl Predicate {
    pub fn new(
        label: impl Into<String>,
        membership: impl Fn(&BitString) -> bool + Send + Sync + 'static,
    ) -> Self {
        Predicate {
            label: label.into(),
            membership: Arc::new(membership),
        }
    }

    pub fn all() -> Self {
        Predicate::new("all", |_| true)
    }

    pub fn none() -> Self {
        Predicate::new("none", |_| false)
    }

    /// Membership in an explicit finite set.
    pub fn from_set(strings: Vec<BitString>) -> Self {
        let label = format!(
            "{{{}}}",
            strings.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        );
        Predicate::new(label, move |x| strings.contains(x))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, x: &BitString) -> bool {
        (self.membership)(x)
    }
}

fn big_string<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `H = 2^{2rm} N^{2m} Tr(P^{2m})` for `P = (1/N) Σ_j (I − S_{y_j})`, and
/// `K = 2^{2rm} N^{2m} − 3^m H`; accept iff `K > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePowerCertificate {
    #[serde(serialize_with = "big_string")]
    pub h_value: BigInt,
    #[serde(serialize_with = "big_string")]
    pub k_value: BigInt,
    /// All `2^r S_y` are Gaussian-integer matrices.
    pub r: u32,
    /// Bob's register width; the trace exponent is `2m`.
    pub m: u32,
    /// Tuple length.
    pub n: usize,
    pub accept: bool,
}

impl TracePowerCertificate {
    /// `K` recomputed from `H` and the scaling.
    pub fn recompute_k(&self) -> BigInt {
        scale_term(self.r, self.m, self.n) - BigInt::from(3u32).pow(self.m) * &self.h_value
    }
}

/// `2^{2rm} N^{2m}`.
fn scale_term(r: u32, m: u32, n: usize) -> BigInt {
    (BigInt::one() << (2 * r * m) as usize) * BigInt::from(n).pow(2 * m)
}

/// Smallest `r` with every entry of every operator in `2^{-r} Z[i]`.
fn common_denom_log(s: &EffectOperators) -> u32 {
    (0..s.len()).map(|y| s.exact(y).max_denom_log()).max().unwrap_or(0)
}

/// Real integer value of an exact trace; an imaginary part or fractional
/// value means an internal defect.
fn integer_trace(v: &DyadicGaussian, what: &str) -> Result<BigInt> {
    let (re, im) = v
        .numerators_at(0)
        .ok_or_else(|| Error::Invariant(format!("{what} is not an integer: {v}")))?;
    if !im.is_zero() {
        return Err(Error::Invariant(format!("{what} has imaginary part {im}")));
    }
    Ok(re)
}

fn check_bob(s: &EffectOperators) -> Result<u32> {
    if s.bob() == 0 {
        return Err(Error::input("the trace-power test needs a nonempty Bob register"));
    }
    Ok(s.bob() as u32)
}

/// `2^r Σ_j (I − S_{y_j})`.
fn scaled_loss_sum(s: &EffectOperators, idx: &[usize], r: u32) -> Result<ExactMatrix> {
    let side = 1usize << s.bob();
    let mut acc = ExactMatrix::zeros(side, side)?;
    for &y in idx {
        acc = acc.add(&s.complement(y))?;
    }
    Ok(acc.scale(&DyadicGaussian::from_int(BigInt::one() << r as usize)))
}

fn tuple_indices(s: &EffectOperators, t: &StrategyTuple) -> Result<Vec<usize>> {
    t.strings().iter().map(|y| s.index_of(y)).collect()
}

/// The trace-power test on a tuple, from exact effect operators.
pub fn trace_power_certificate(s: &EffectOperators, t: &StrategyTuple) -> Result<TracePowerCertificate> {
    let idx = tuple_indices(s, t)?;
    certificate_for(s, &idx, common_denom_log(s))
}

fn certificate_for(s: &EffectOperators, idx: &[usize], r: u32) -> Result<TracePowerCertificate> {
    let m = check_bob(s)?;
    let x = scaled_loss_sum(s, idx, r)?;
    let h = integer_trace(&x.trace_power(2 * m)?, "trace power")?;
    let k = scale_term(r, m, idx.len()) - BigInt::from(3u32).pow(m) * &h;
    Ok(TracePowerCertificate {
        accept: k.is_positive(),
        h_value: h,
        k_value: k,
        r,
        m,
        n: idx.len(),
    })
}

/// [`trace_power_certificate`] for a CQRG or MQRG referee.
pub fn trace_power_decide(r: &Referee, t: &StrategyTuple) -> Result<TracePowerCertificate> {
    trace_power_certificate(&effect_operators(r)?, t)
}

/// `R = Σ_{u ∈ B} P*(|u⟩⟨u|)`, `G = 2^{(n+1)r} Tr(R^{n+1})` and
/// `H = 3^{n+1} G − 2^{(n+1)r + n}`; accept iff `H > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasuredCertificate {
    #[serde(serialize_with = "big_string")]
    pub g_value: BigInt,
    #[serde(serialize_with = "big_string")]
    pub h_value: BigInt,
    /// Circuit size; `2^r R` has Gaussian-integer entries.
    pub r: u32,
    /// Input width; the trace exponent is `n + 1`.
    pub n: u32,
    pub accept: bool,
}

/// The accepted-outcome operator `Σ_{u ∈ B} P*(|u⟩⟨u|)`.
pub fn accepted_outcome_operator(p: &Circuit, b: &Predicate) -> Result<ExactMatrix> {
    let k = p.validate()?.outputs;
    let side = 1usize << k;
    let proj = ExactMatrix::diagonal(
        (0..side)
            .map(|u| {
                if b.contains(&BitString::from_u64(u as u64, k)) {
                    DyadicGaussian::one()
                } else {
                    DyadicGaussian::zero()
                }
            })
            .collect(),
    )?;
    heisenberg(p, &proj)
}

pub fn qma_pc_decide(p: &Circuit, b: &Predicate) -> Result<MeasuredCertificate> {
    let rop = accepted_outcome_operator(p, b)?;
    let n = p.inputs() as u32;
    let r = p.size() as u32;
    let x = rop.scale(&DyadicGaussian::from_int(BigInt::one() << r as usize));
    let g = integer_trace(&x.trace_power(n + 1)?, "trace power")?;
    let h = BigInt::from(3u32).pow(n + 1) * &g - (BigInt::one() << ((n + 1) * r + n) as usize);
    Ok(MeasuredCertificate {
        accept: h.is_positive(),
        g_value: g,
        h_value: h,
        r,
        n,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExistsDecision {
    pub accept: bool,
    /// The first accepting tuple, if any.
    pub witness: Option<StrategyTuple>,
    pub certificate: Option<TracePowerCertificate>,
    /// Multisets of messages examined.
    pub tuples_checked: u64,
}

/// Accepts iff some tuple of `N` messages passes the trace-power test.
/// Tuples are visited as multisets since the test ignores order.
pub fn exists_pp_decide(r: &Referee, n: usize) -> Result<ExistsDecision> {
    exists_for_effects(&effect_operators(r)?, n)
}

pub fn exists_for_effects(s: &EffectOperators, n: usize) -> Result<ExistsDecision> {
    if n == 0 {
        return Err(Error::input("tuple length must be positive"));
    }
    check_bob(s)?;
    let required = (s.len() as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if required > MAX_TUPLE_ENUMERATION {
        return Err(Error::CapExceeded {
            what: "tuple enumeration",
            required,
            cap: MAX_TUPLE_ENUMERATION,
        });
    }
    let r = common_denom_log(s);
    let mut idx = vec![0usize; n];
    let mut checked = 0;
    loop {
        checked += 1;
        let cert = certificate_for(s, &idx, r)?;
        if cert.accept {
            let w = s.width();
            let t = StrategyTuple::new(
                idx.iter().map(|&y| BitString::from_u64(y as u64, w)).collect(),
            )?;
            return Ok(ExistsDecision {
                accept: true,
                witness: Some(t),
                certificate: Some(cert),
                tuples_checked: checked,
            });
        }
        let Some(pos) = idx.iter().rposition(|&i| i + 1 < s.len()) else {
            break;
        };
        let v = idx[pos] + 1;
        idx[pos..].iter_mut().for_each(|i| *i = v);
    }
    Ok(ExistsDecision {
        accept: false,
        witness: None,
        certificate: None,
        tuples_checked: checked,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignDecision {
    pub value: i64,
    pub accept: bool,
}

/// Accept iff `g(x) > 0`.
pub fn p_pp_sign_decide(g: &GapFunction, x: &BitString) -> Result<SignDecision> {
    let value = gap_eval(g, x)?;
    Ok(SignDecision { value, accept: value > 0 })
}

/// Bits of a witness for the values `-2^len..=2^len`.
fn value_bits(max_abs: u64) -> usize {
    (64 - max_abs.saturating_sub(1).leading_zeros()) as usize
}

fn to_i64(v: &BigInt, what: &str) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::input(format!("{what} {v} does not fit 64 bits")))
}

/// `Σ_z f(⟨x, z, z⟩)` over `z ∈ Σ^p`, as a gap function of `x`.
fn gap_trace(f: &GapFunction, p: usize) -> GapFunction {
    let diag = f.reindex(
        "diagonal",
        move |s| {
            let (x, z) = pair_decode(s).ok()?;
            (z.len() == p).then(|| tuple_encode(&[&x, &z, &z]))
        },
        move |n| tuple_len(&[n.saturating_sub(1 + p) / 2, p, p]),
    );
    gap_sum(&diag, p)
}

/// `H` of the trace-power test computed through gap-function combinators:
/// the entries of `2^r (I − S_y)` are gap functions of `⟨y, z, w⟩`, the tuple
/// sum is an exponential sum over the tuple index, the power is a matrix
/// product of `2m` factors and the trace a sum over the diagonal. The input
/// string is the concatenated tuple `y₁⋯y_N`.
pub fn trace_power_gap_function(s: &EffectOperators, n_samples: usize) -> Result<GapFunction> {
    let m = check_bob(s)? as usize;
    let r = common_denom_log(s);
    let width = s.width();
    let scaled: Vec<Vec<(i64, i64)>> = (0..s.len())
        .map(|y| {
            let t = s.complement(y);
            t.entries()
                .iter()
                .map(|v| {
                    let (re, im) = v.numerators_at(r).expect("common denominator");
                    Ok((to_i64(&re, "entry")?, to_i64(&im, "entry")?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let max_abs = scaled
        .iter()
        .flatten()
        .map(|(a, b)| a.unsigned_abs().max(b.unsigned_abs()))
        .max()
        .unwrap_or(0);
    let side = 1usize << m;
    let jbits = value_bits(n_samples as u64);
    let scaled = Arc::new(scaled);
    // Entry of 2^r T_{y_j} on inputs ⟨⟨x, y, z, w⟩, j⟩.
    let term = |imag: bool| {
        let scaled = scaled.clone();
        GapFunction::from_values("tuple-term", value_bits(max_abs), move |s| {
            let Ok((xyzw, j)) = pair_decode(s) else { return 0 };
            let j = j.to_u64() as usize;
            let Ok(parts) = tuple_decode(&xyzw, 4) else { return 0 };
            let (x, z, w) = (&parts[0], &parts[2], &parts[3]);
            if j >= n_samples || x.len() != n_samples * width || z.len() != m || w.len() != m {
                return 0;
            }
            let y = x.slice(j * width, (j + 1) * width).to_u64() as usize;
            let (re, im) = scaled[y][z.to_u64() as usize * side + w.to_u64() as usize];
            if imag {
                im
            } else {
                re
            }
        })
    };
    let spec = GapMatrixSpec {
        real: gap_sum(&term(false), jbits),
        imag: gap_sum(&term(true), jbits),
        side_log: m,
        factors: 2 * m,
    };
    let (g0, _) = gap_matrix_product(&spec)?;
    Ok(gap_trace(&g0, m).with_label("trace-power"))
}

/// `H` of the measured-verifier test as a gap function of the empty input:
/// entries of `2^r R` come from the circuit's path-sum gap functions summed
/// over accepted outcomes, then power, trace, scaling and the constant term
/// are applied with the gap combinators.
pub fn measured_gap_function(p: &Circuit, b: &Predicate) -> Result<GapFunction> {
    let k = p.validate()?.outputs;
    let n = p.inputs();
    let r = p.size() as u32;
    let (f0, f1, _) = circuit_gap_functions(p)?;
    // Entry ⟨a|2^r R|c⟩ = Σ_{u ∈ B} f(⟨c, a, u, u⟩) on inputs ⟨x, y, a, c⟩.
    let entry = |f: &GapFunction| {
        let b = b.clone();
        let summand = f.reindex(
            "accepted-outcome",
            move |s| {
                let (xyac, u) = pair_decode(s).ok()?;
                let parts = tuple_decode(&xyac, 4).ok()?;
                let (a, c) = (&parts[2], &parts[3]);
                if a.len() != n || c.len() != n || u.len() != k || !b.contains(&u) {
                    return None;
                }
                Some(tuple_encode(&[c, a, &u, &u]))
            },
            move |_| tuple_len(&[n, n, k, k]),
        );
        gap_sum(&summand, k)
    };
    let spec = GapMatrixSpec {
        real: entry(&f0),
        imag: entry(&f1),
        side_log: n,
        factors: n + 1,
    };
    let (g0, _) = gap_matrix_product(&spec)?;
    let g = gap_trace(&g0, n);
    let three = 3u64.pow(n as u32 + 1);
    let c = 1i64
        .checked_shl((n as u32 + 1) * r + n as u32)
        .filter(|v| *v > 0)
        .ok_or_else(|| Error::input("constant term does not fit 64 bits"))?;
    Ok(gap_add(&gap_scale(&g, three), &GapFunction::constant(-c)).with_label("measured-test"))
}

/// Input of [`trace_power_gap_function`] for a tuple.
pub fn tuple_input(t: &StrategyTuple) -> BitString {
    t.concatenated()
}
