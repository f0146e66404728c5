//! Gap functions: integer-valued functions of the form
//! `f(x) = #{w ∈ Σ^p : accept(x, w)} − #{w ∈ Σ^p : reject(x, w)}`,
//! evaluated by full witness enumeration, with the closure combinators for
//! exponential sums, polynomial products and matrix products.

mod bits;
mod circuit;
pub mod suite;

use std::fmt;
use std::sync::Arc;

pub use bits::{
    pair_decode, pair_encode, pair_len, tuple_decode, tuple_encode, tuple_len, BitString,
};
pub use circuit::{circuit_amplitude_gap, circuit_gap_functions, CircuitGap};

use crate::error::{Error, Result};

/// Default bound on enumerated witness length.
pub const DEFAULT_CAP: usize = 20;

pub type Predicate = Arc<dyn Fn(&BitString, &BitString) -> bool + Send + Sync>;
pub type LengthFn = Arc<dyn Fn(usize) -> usize + Send + Sync>;

#[derive(Clone)]
pub struct GapFunction {
    label: String,
    accept: Predicate,
    reject: Predicate,
    witness_len: LengthFn,
    cap: usize,
}

impl fmt::Debug for GapFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GapFunction")
            .field("label", &self.label)
            .field("cap", &self.cap)
            .finish_non_exhaustive()
    }
}

impl GapFunction {
    /// `accept` and `reject` take `(input, witness)`; `witness_len` maps the
    /// input length to the witness length.
    pub fn new(
        label: impl Into<String>,
        witness_len: impl Fn(usize) -> usize + Send + Sync + 'static,
        accept: impl Fn(&BitString, &BitString) -> bool + Send + Sync + 'static,
        reject: impl Fn(&BitString, &BitString) -> bool + Send + Sync + 'static,
    ) -> Self {
        GapFunction {
            label: label.into(),
            accept: Arc::new(accept),
            reject: Arc::new(reject),
            witness_len: Arc::new(witness_len),
            cap: DEFAULT_CAP,
        }
    }

    /// The gap function whose value on `x` is `value(x)`, using witnesses of
    /// fixed length `len`: the first `|value(x)|` witnesses in numeric
    /// order are counted on the side given by the sign.
    ///
    /// # Panics
    /// During evaluation, if `|value(x)| > 2^len`.
    pub fn from_values(
        label: impl Into<String>,
        len: usize,
        value: impl Fn(&BitString) -> i64 + Send + Sync + 'static,
    ) -> Self {
        let value = Arc::new(value);
        let check = move |x: &BitString| {
            let v = value(x);
            assert!(
                v.unsigned_abs() <= 1u64 << len.min(63),
                "value {v} does not fit {len} witness bits"
            );
            v
        };
        let check = Arc::new(check);
        let c2 = check.clone();
        GapFunction::new(
            label,
            move |_| len,
            move |x, w| {
                let v = check(x);
                v > 0 && w.to_u64() < v as u64
            },
            move |x, w| {
                let v = c2(x);
                v < 0 && w.to_u64() < v.unsigned_abs()
            },
        )
    }

    pub fn constant(c: i64) -> Self {
        let len = index_bits(c.unsigned_abs());
        GapFunction::from_values(format!("const({c})"), len, move |_| c)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn witness_len(&self, input_len: usize) -> usize {
        (self.witness_len)(input_len)
    }

    pub fn accepts(&self, x: &BitString, w: &BitString) -> bool {
        (self.accept)(x, w)
    }

    pub fn rejects(&self, x: &BitString, w: &BitString) -> bool {
        (self.reject)(x, w)
    }

    /// Number of witnesses `eval(x)` enumerates, or a cap error.
    pub fn enumeration_size(&self, x: &BitString) -> Result<u64> {
        let p = self.witness_len(x.len());
        if p > self.cap {
            return Err(Error::CapExceeded {
                what: "witness length",
                required: p as u64,
                cap: self.cap as u64,
            });
        }
        Ok(1u64 << p)
    }

    pub fn eval(&self, x: &BitString) -> Result<i64> {
        self.enumeration_size(x)?;
        let p = self.witness_len(x.len());
        let mut total = 0i64;
        for w in BitString::all(p) {
            if self.accepts(x, &w) {
                total += 1;
            }
            if self.rejects(x, &w) {
                total -= 1;
            }
        }
        Ok(total)
    }

    pub fn negate(&self) -> Self {
        GapFunction {
            label: format!("-{}", self.label),
            accept: self.reject.clone(),
            reject: self.accept.clone(),
            witness_len: self.witness_len.clone(),
            cap: self.cap,
        }
    }

    /// `x ↦ self(map(x))`; inputs where `map` returns `None` have value 0.
    /// `len_map` must give `|map(x)|` as a function of `|x|`.
    pub fn reindex(
        &self,
        label: impl Into<String>,
        map: impl Fn(&BitString) -> Option<BitString> + Send + Sync + 'static,
        len_map: impl Fn(usize) -> usize + Send + Sync + 'static,
    ) -> Self {
        let map = Arc::new(map);
        let (acc, rej, wl) = (self.accept.clone(), self.reject.clone(), self.witness_len.clone());
        let m2 = map.clone();
        GapFunction {
            label: label.into(),
            accept: Arc::new(move |x, w| map(x).is_some_and(|y| acc(&y, w))),
            reject: Arc::new(move |x, w| m2(x).is_some_and(|y| rej(&y, w))),
            witness_len: Arc::new(move |n| wl(len_map(n))),
            cap: self.cap,
        }
    }
}

pub fn gap_eval(f: &GapFunction, x: &BitString) -> Result<i64> {
    f.eval(x)
}

/// True iff `f(x) > 0`.
pub fn gap_positive(f: &GapFunction, x: &BitString) -> Result<bool> {
    Ok(f.eval(x)? > 0)
}

/// `g(x) = Σ_{y ∈ Σ^p} f(⟨x, y⟩)`, with witnesses `y‖z` where `z` is a witness
/// of `f` on `⟨x, y⟩`.
pub fn gap_sum(f: &GapFunction, p: usize) -> GapFunction {
    let split = move |x: &BitString, w: &BitString| {
        (pair_encode(x, &w.slice(0, p)), w.slice(p, w.len()))
    };
    let (acc, rej, wl) = (f.accept.clone(), f.reject.clone(), f.witness_len.clone());
    GapFunction {
        label: format!("sum[{p}]({})", f.label),
        accept: Arc::new(move |x, w| {
            let (xy, z) = split(x, w);
            acc(&xy, &z)
        }),
        reject: Arc::new(move |x, w| {
            let (xy, z) = split(x, w);
            rej(&xy, &z)
        }),
        witness_len: Arc::new(move |n| p + wl(pair_len(n, p))),
        cap: f.cap,
    }
}

/// `g(x) = Π_{y ∈ Σ^p_1} f(⟨x, y⟩)`.
///
/// The witness is `z₁⋯z_p`, one witness of `f` per factor. After making the
/// accepting and rejecting sets disjoint, a witness is counted positively if
/// every `zₖ` lies in one of them and an even number lie in the rejecting
/// set, negatively if that number is odd.
pub fn gap_product(f: &GapFunction, p: usize) -> GapFunction {
    let ys = Arc::new(BitString::one_hot(p));
    let (acc, rej, wl) = (f.accept.clone(), f.reject.clone(), f.witness_len.clone());
    let wl_factor = {
        let wl = wl.clone();
        move |n: usize| wl(pair_len(n, p))
    };
    let wl_factor = Arc::new(wl_factor);
    let wf = wl_factor.clone();
    // Some(odd) when every block is in exactly one of the two sets.
    let parity = Arc::new(move |x: &BitString, w: &BitString| -> Option<bool> {
        let r = wf(x.len());
        let mut odd = false;
        for (k, y) in ys.iter().enumerate() {
            let xy = pair_encode(x, y);
            let z = w.slice(k * r, (k + 1) * r);
            match (acc(&xy, &z), rej(&xy, &z)) {
                (true, false) => {}
                (false, true) => odd = !odd,
                _ => return None,
            }
        }
        Some(odd)
    });
    let par2 = parity.clone();
    GapFunction {
        label: format!("prod[{p}]({})", f.label),
        accept: Arc::new(move |x, w| parity(x, w) == Some(false)),
        reject: Arc::new(move |x, w| par2(x, w) == Some(true)),
        witness_len: Arc::new(move |n| p * wl_factor(n)),
        cap: f.cap,
    }
}

/// Bits needed to index `k` alternatives.
fn index_bits(k: u64) -> usize {
    (64 - k.saturating_sub(1).leading_zeros()) as usize
}

/// `g(x) = k · f(x)`: the witness is an index `i < k` followed by a witness
/// of `f`.
pub fn gap_scale(f: &GapFunction, k: u64) -> GapFunction {
    let bits = index_bits(k);
    let (acc, rej, wl) = (f.accept.clone(), f.reject.clone(), f.witness_len.clone());
    let split = move |w: &BitString| (w.slice(0, bits).to_u64() < k).then(|| w.slice(bits, w.len()));
    let split = Arc::new(split);
    let s2 = split.clone();
    GapFunction {
        label: format!("{k}*{}", f.label),
        accept: Arc::new(move |x, w| split(w).is_some_and(|z| acc(x, &z))),
        reject: Arc::new(move |x, w| s2(w).is_some_and(|z| rej(x, &z))),
        witness_len: Arc::new(move |n| bits + wl(n)),
        cap: f.cap,
    }
}

/// `h(x) = f(x) + g(x)`: the first witness bit picks the summand, the rest
/// is its witness padded with zeros.
pub fn gap_add(f: &GapFunction, g: &GapFunction) -> GapFunction {
    let parts = [
        (f.accept.clone(), f.reject.clone(), f.witness_len.clone()),
        (g.accept.clone(), g.reject.clone(), g.witness_len.clone()),
    ];
    let parts = Arc::new(parts);
    let (wf, wg) = (f.witness_len.clone(), g.witness_len.clone());
    let pick = move |x: &BitString, w: &BitString, accept: bool| -> bool {
        let (acc, rej, wl) = &parts[w.get(0) as usize];
        let t = wl(x.len());
        if w.bits()[1 + t..].iter().any(|&b| b) {
            return false;
        }
        let z = w.slice(1, 1 + t);
        if accept {
            acc(x, &z)
        } else {
            rej(x, &z)
        }
    };
    let pick = Arc::new(pick);
    let p2 = pick.clone();
    GapFunction {
        label: format!("({} + {})", f.label, g.label),
        accept: Arc::new(move |x, w| pick(x, w, true)),
        reject: Arc::new(move |x, w| p2(x, w, false)),
        witness_len: Arc::new(move |n| 1 + wf(n).max(wg(n))),
        cap: f.cap.min(g.cap),
    }
}

/// A family of `2^side_log`-sided complex matrices `M_{x,y}` for
/// `y ∈ Σ^factors_1`, whose entries `⟨z|M_{x,y}|w⟩` have real part
/// `real(⟨x,y,z,w⟩)` and imaginary part `imag(⟨x,y,z,w⟩)`.
#[derive(Clone, Debug)]
pub struct GapMatrixSpec {
    pub real: GapFunction,
    pub imag: GapFunction,
    pub side_log: usize,
    pub factors: usize,
}

/// Gap functions `(g₀, g₁)` on `⟨x, z, w⟩` giving the real and imaginary
/// parts of `⟨z| M_{x,y₁}⋯M_{x,y_q} |w⟩` (`y₁ < ⋯ < y_q` in lexicographic
/// order).
///
/// Built from the real block form `N = [[Re M, Im M], [−Im M, Re M]]`: a path
/// sum over `u₀⋯u_q`, each `uₖ` one bit longer than a row index, with the
/// product taken over the one-hot index strings and the interior indices
/// summed out.
pub fn gap_matrix_product(spec: &GapMatrixSpec) -> Result<(GapFunction, GapFunction)> {
    let (p, q) = (spec.side_log, spec.factors);
    if q == 0 {
        return Err(Error::input("matrix product needs at least one factor"));
    }
    let h = block_entries(&spec.real, &spec.imag, p);

    // F(⟨⟨x, u₀⋯u_q⟩, y_k⟩) = h(⟨x, y_k, u_{k−1}, u_k⟩)
    let u_len = (q + 1) * (p + 1);
    let f = h.reindex(
        "path-factor",
        move |s| {
            let (xu, y) = pair_decode(s).ok()?;
            let (x, u) = pair_decode(&xu).ok()?;
            let k = y.one_hot_rank()?;
            if u.len() != u_len || y.len() != q {
                return None;
            }
            let prev = u.slice((k - 1) * (p + 1), k * (p + 1));
            let next = u.slice(k * (p + 1), (k + 1) * (p + 1));
            Some(tuple_encode(&[&x, &y, &prev, &next]))
        },
        move |n| {
            let x_len = (n.saturating_sub(3 + q + 2 * u_len)) / 4;
            tuple_len(&[x_len, q, p + 1, p + 1])
        },
    );
    let g = gap_product(&f, q);

    let interior = (q - 1) * (p + 1);
    let side = move |last: bool| {
        g.reindex(
            if last { "imag-path" } else { "real-path" },
            move |s| {
                let (xzw, u) = pair_decode(s).ok()?;
                let parts = tuple_decode(&xzw, 3).ok()?;
                let (x, z, w) = (&parts[0], &parts[1], &parts[2]);
                if z.len() != p || w.len() != p || u.len() != interior {
                    return None;
                }
                let mut path = BitString::zeros(1).concat(z).concat(&u);
                path.push(last);
                Some(pair_encode(x, &path.concat(w)))
            },
            move |n| {
                let x_len = n.saturating_sub(7 + interior + 6 * p) / 8;
                pair_len(x_len, u_len)
            },
        )
    };
    let g0 = gap_sum(&side(false), interior).with_label("matrix-product-real");
    let g1 = gap_sum(&side(true), interior).with_label("matrix-product-imag");
    Ok((g0, g1))
}

/// `h(⟨x, y, u, v⟩)` for `u, v ∈ Σ^{p+1}`: the entries of the real block
/// form, selected by the leading bits of `u` and `v`. Witnesses are padded
/// to the longer of the two parts; padding bits must be zero.
fn block_entries(real: &GapFunction, imag: &GapFunction, p: usize) -> GapFunction {
    let pick = {
        let (real, imag) = (real.clone(), imag.clone());
        move |s: &BitString| -> Option<(GapFunction, bool, BitString)> {
            let parts = tuple_decode(s, 4).ok()?;
            let (x, y, u, v) = (&parts[0], &parts[1], &parts[2], &parts[3]);
            if u.len() != p + 1 || v.len() != p + 1 {
                return None;
            }
            let z = u.slice(1, p + 1);
            let w = v.slice(1, p + 1);
            let inner = tuple_encode(&[x, y, &z, &w]);
            Some(match (u.get(0), v.get(0)) {
                (false, false) | (true, true) => (real.clone(), false, inner),
                (false, true) => (imag.clone(), false, inner),
                (true, false) => (imag.clone(), true, inner),
            })
        }
    };
    let pick = Arc::new(pick);
    let run = move |pick: &dyn Fn(&BitString) -> Option<(GapFunction, bool, BitString)>,
                    s: &BitString,
                    w: &BitString,
                    want_accept: bool|
          -> bool {
        let Some((f, negated, inner)) = pick(s) else {
            return false;
        };
        let t = f.witness_len(inner.len());
        if w.bits()[t..].iter().any(|&b| b) {
            return false;
        }
        let wit = w.slice(0, t);
        if want_accept != negated {
            f.accepts(&inner, &wit)
        } else {
            f.rejects(&inner, &wit)
        }
    };
    let run = Arc::new(run);
    let (p1, p2, r1, r2) = (pick.clone(), pick, run.clone(), run);
    let (real_wl, imag_wl) = (real.witness_len.clone(), imag.witness_len.clone());
    GapFunction {
        label: "block-entries".into(),
        accept: Arc::new(move |s, w| r1(&*p1, s, w, true)),
        reject: Arc::new(move |s, w| r2(&*p2, s, w, false)),
        witness_len: Arc::new(move |n| {
            let inner = n.saturating_sub(3);
            real_wl(inner).max(imag_wl(inner))
        }),
        cap: real.cap.min(imag.cap),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn scale_and_add() {
        let f = GapFunction::from_values("f", 3, |x| x.len() as i64 - 2);
        let g = GapFunction::constant(-5);
        for x in ["", "1", "0110"] {
            let x = b(x);
            let fx = f.eval(&x).unwrap();
            assert_eq!(gap_scale(&f, 3).eval(&x).unwrap(), 3 * fx);
            assert_eq!(gap_scale(&f, 1).eval(&x).unwrap(), fx);
            assert_eq!(gap_add(&f, &g).eval(&x).unwrap(), fx - 5);
            assert_eq!(gap_add(&g, &f).eval(&x).unwrap(), fx - 5);
        }
    }

    #[test]
    fn always_true_minus_always_false() {
        let f = GapFunction::new("t", |_| 3, |_, _| true, |_, _| false);
        assert_eq!(f.eval(&b("")).unwrap(), 8);
    }

    #[test]
    fn parity_split_is_zero() {
        let f = GapFunction::new(
            "parity",
            |_| 4,
            |_, w| w.count_ones() % 2 == 0,
            |_, w| w.count_ones() % 2 == 1,
        );
        assert_eq!(f.eval(&b("101")).unwrap(), 0);
    }

    #[test]
    fn identical_predicates_cancel() {
        let f = GapFunction::new("same", |n| n, |x, w| x == w, |x, w| x == w);
        assert_eq!(f.eval(&b("0110")).unwrap(), 0);
    }

    #[test]
    fn cap_refusal_names_required_length() {
        let f = GapFunction::new("big", |_| 21, |_, _| true, |_, _| false);
        match f.eval(&b("")) {
            Err(Error::CapExceeded { required: 21, cap: 20, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn from_values_and_constants() {
        for v in [-5, -1, 0, 1, 2, 7, 8] {
            assert_eq!(GapFunction::constant(v).eval(&b("1")).unwrap(), v);
        }
        let f = GapFunction::from_values("len", 3, |x| x.len() as i64 - 2);
        assert_eq!(f.eval(&b("")).unwrap(), -2);
        assert_eq!(f.eval(&b("10110")).unwrap(), 3);
    }

    #[test]
    fn sum_examples() {
        assert_eq!(gap_sum(&GapFunction::constant(1), 3).eval(&b("")).unwrap(), 8);
        let f = GapFunction::from_values("last-bit", 1, |xy| {
            let (_, y) = pair_decode(xy).unwrap();
            if y.bits().last() == Some(&false) {
                1
            } else {
                -1
            }
        });
        assert_eq!(gap_sum(&f, 2).eval(&b("1")).unwrap(), 0);
    }

    #[test]
    fn product_examples() {
        assert_eq!(gap_product(&GapFunction::constant(2), 2).eval(&b("")).unwrap(), 4);
        assert_eq!(gap_product(&GapFunction::constant(0), 3).eval(&b("")).unwrap(), 0);
        assert_eq!(gap_product(&GapFunction::constant(-3), 0).eval(&b("")).unwrap(), 1);
        // factors +2 (y₁ = "01") and −3 (y₂ = "10")
        let f = GapFunction::from_values("mixed", 2, |xy| {
            let (_, y) = pair_decode(xy).unwrap();
            if y == b("01") {
                2
            } else {
                -3
            }
        });
        assert_eq!(gap_product(&f, 2).eval(&b("")).unwrap(), -6);
    }

    #[test]
    fn product_disjointifies_overlapping_sets() {
        // accept = {0,1,2}, reject = {1}: value 2 per factor, and the
        // overlapping witness must not be counted.
        let f = GapFunction::new("overlap", |_| 2, |_, w| w.to_u64() < 3, |_, w| w.to_u64() == 1);
        assert_eq!(f.eval(&b("")).unwrap(), 2);
        assert_eq!(gap_product(&f, 3).eval(&b("")).unwrap(), 8);
    }

    fn entry_fn(entries: [[(i64, i64); 2]; 2], imag: bool) -> GapFunction {
        GapFunction::from_values("entry", 2, move |s| {
            let parts = tuple_decode(s, 4).unwrap();
            let (z, w) = (parts[2].to_u64() as usize, parts[3].to_u64() as usize);
            let e = entries[z][w];
            if imag {
                e.1
            } else {
                e.0
            }
        })
    }

    #[test]
    fn identity_products() {
        let id = [[(1, 0), (0, 0)], [(0, 0), (1, 0)]];
        let spec = GapMatrixSpec {
            real: entry_fn(id, false),
            imag: entry_fn(id, true),
            side_log: 1,
            factors: 2,
        };
        let (g0, g1) = gap_matrix_product(&spec).unwrap();
        for z in 0..2 {
            for w in 0..2 {
                let inp = tuple_encode(&[&b(""), &BitString::from_u64(z, 1), &BitString::from_u64(w, 1)]);
                assert_eq!(g0.eval(&inp).unwrap(), (z == w) as i64);
                assert_eq!(g1.eval(&inp).unwrap(), 0);
            }
        }
    }

    #[test]
    fn i_x_squared_is_minus_identity() {
        let ix = [[(0, 0), (0, 1)], [(0, 1), (0, 0)]];
        let spec = GapMatrixSpec {
            real: entry_fn(ix, false),
            imag: entry_fn(ix, true),
            side_log: 1,
            factors: 2,
        };
        let (g0, g1) = gap_matrix_product(&spec).unwrap();
        for z in 0..2 {
            for w in 0..2 {
                let inp = tuple_encode(&[&b("1"), &BitString::from_u64(z, 1), &BitString::from_u64(w, 1)]);
                assert_eq!(g0.eval(&inp).unwrap(), -((z == w) as i64));
                assert_eq!(g1.eval(&inp).unwrap(), 0);
            }
        }
    }
}
