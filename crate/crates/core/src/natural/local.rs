use crate::exact::{DyadicGaussian, ExactMatrix};

/// Sparse local superoperator: for each local input vec index, the nonzero
/// `(local output vec index, coefficient)` pairs.
pub(super) struct LocalOp {
    q_in: usize,
    q_out: usize,
    cols: Vec<Vec<(usize, DyadicGaussian)>>,
}

/// Bits of `s` (an `l`-qubit string, qubit 0 most significant) at `positions`,
/// packed with the first position most significant.
fn gather(s: usize, positions: &[usize], l: usize) -> usize {
    positions
        .iter()
        .fold(0, |acc, &p| (acc << 1) | ((s >> (l - 1 - p)) & 1))
}

fn complement(positions: &[usize], l: usize) -> Vec<usize> {
    (0..l).filter(|p| !positions.contains(p)).collect()
}

impl LocalOp {
    pub(super) fn from_rep(m: &ExactMatrix, q_in: usize, q_out: usize) -> Self {
        let cols = (0..m.cols())
            .map(|c| {
                (0..m.rows())
                    .filter(|&r| !m.get(r, c).is_zero())
                    .map(|r| (r, m.get(r, c).clone()))
                    .collect()
            })
            .collect();
        LocalOp { q_in, q_out, cols }
    }

    /// Local operator of the adjoint map: `Q_{yz} = Σ K[(b a),(z y)] P_{ab}`.
    pub(super) fn adjoint(&self) -> Self {
        let din = 1usize << self.q_in;
        let dout = 1usize << self.q_out;
        let mut cols = vec![Vec::new(); dout * dout];
        for (c, entries) in self.cols.iter().enumerate() {
            let (z, y) = (c / din, c % din);
            for (r, k) in entries {
                let (b, a) = (r / dout, r % dout);
                cols[a * dout + b].push((y * din + z, k.clone()));
            }
        }
        LocalOp {
            q_in: self.q_out,
            q_out: self.q_in,
            cols,
        }
    }

    /// Applies the operator, tensored with the identity on every other qubit,
    /// to the row-major data of a `2^live_in`-sided matrix. Local inputs sit
    /// at `wires_in`, local outputs at `wires_out` of the result.
    pub(super) fn apply(
        &self,
        wires_in: &[usize],
        wires_out: &[usize],
        live_in: usize,
        data: &[DyadicGaussian],
    ) -> Vec<DyadicGaussian> {
        debug_assert_eq!(wires_in.len(), self.q_in);
        debug_assert_eq!(wires_out.len(), self.q_out);
        let live_out = live_in - self.q_in + self.q_out;
        let (side_in, side_out) = (1usize << live_in, 1usize << live_out);
        debug_assert_eq!(data.len(), side_in * side_in);

        let env_in = complement(wires_in, live_in);
        let env_out = complement(wires_out, live_out);
        let split: Vec<(usize, usize)> = (0..side_in)
            .map(|s| (gather(s, wires_in, live_in), gather(s, &env_in, live_in)))
            .collect();
        // join[(env << q_out) | local] = full output string
        let mut join = vec![0usize; side_out];
        for s in 0..side_out {
            let idx = (gather(s, &env_out, live_out) << self.q_out) | gather(s, wires_out, live_out);
            join[idx] = s;
        }

        let din = 1usize << self.q_in;
        let dout = 1usize << self.q_out;
        let mut out = vec![DyadicGaussian::zero(); side_out * side_out];
        for r in 0..side_in {
            let (lr, er) = split[r];
            for c in 0..side_in {
                let v = &data[r * side_in + c];
                if v.is_zero() {
                    continue;
                }
                let (lc, ec) = split[c];
                for (lo, k) in &self.cols[lr * din + lc] {
                    let ro = join[(er << self.q_out) | (lo / dout)];
                    let co = join[(ec << self.q_out) | (lo % dout)];
                    out[ro * side_out + co] += &(k * v);
                }
            }
        }
        out
    }
}
