//! Incremental concordance tallies for two-valued risk assignments.
//!
//! When a node is split in two and every record gets its child's risk, the
//! credit of a pair depends only on whether the two records share a child and,
//! if not, on how the two child risks compare. Keeping per-(side, group)
//! aggregates for each case, plus Fenwick trees of records by time rank, lets
//! a threshold sweep move one record in O(k log m) instead of recounting all
//! O(m²) pairs per candidate.

use super::ConcordanceTally;

pub(crate) const LEFT: u8 = 0;
pub(crate) const RIGHT: u8 = 1;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Grouping<'a> {
    /// Fixed group per record, `k` groups.
    Fixed(&'a [usize], usize),
    /// The side a record sits on is its group.
    BySide,
}

#[derive(Debug, Clone, Copy, Default)]
struct Agg {
    permissible: i64,
    same: i64,
    // cross-side credit when this record's side is riskier / tied / safer
    hi: i64,
    tie: i64,
    lo: i64,
}

#[derive(Debug, Clone)]
struct Fenwick(Vec<i64>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick(vec![0; n + 1])
    }

    fn add(&mut self, i: usize, v: i64) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over positions `< i`.
    fn prefix(&self, mut i: usize) -> i64 {
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i &= i - 1;
        }
        s
    }
}

/// Records of one (side, group) slot indexed by time rank.
#[derive(Debug, Clone)]
struct SlotIndex {
    all: Fenwick,
    events: Fenwick,
    total: i64,
}

/// Credit rows summed over the records `y` of one slot for pairs `(y, x)`.
#[derive(Debug, Clone, Copy, Default)]
struct Against {
    permissible: i64,
    hi: i64,
    tie: i64,
    lo: i64,
}

#[derive(Debug, Clone)]
pub(crate) struct ImparitySweep<'a> {
    events: &'a [bool],
    rank: Vec<usize>,
    grouping: Grouping<'a>,
    k: usize,
    side: Vec<u8>,
    agg: Vec<Agg>,
    index: Vec<SlotIndex>,
}

impl<'a> ImparitySweep<'a> {
    /// Every record starts on the right side. O(m log m).
    pub(crate) fn new(times: &'a [f64], events: &'a [bool], grouping: Grouping<'a>) -> Self {
        let m = times.len();
        let k = match grouping {
            Grouping::Fixed(_, k) => k,
            Grouping::BySide => 2,
        };
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        let mut rank = vec![0; m];
        let mut r = 0;
        for (pos, &i) in order.iter().enumerate() {
            if pos > 0 && times[i] != times[order[pos - 1]] {
                r += 1;
            }
            rank[i] = r;
        }
        let n_ranks = if m == 0 { 0 } else { r + 1 };
        let empty = SlotIndex {
            all: Fenwick::new(n_ranks),
            events: Fenwick::new(n_ranks),
            total: 0,
        };
        let mut sweep = Self {
            events,
            rank,
            grouping,
            k,
            side: vec![RIGHT; m],
            agg: vec![Agg::default(); 2 * k],
            index: vec![empty; 2 * k],
        };
        for i in 0..m {
            sweep.insert(i, RIGHT);
        }
        for i in 0..m {
            let slot = sweep.slot(RIGHT, sweep.group(i, RIGHT));
            sweep.remove(i, RIGHT);
            let mut p = 0;
            let mut same = 0;
            for s in 0..2 * k {
                let c = sweep.against(s, i);
                p += c.permissible;
                same += c.tie;
            }
            sweep.insert(i, RIGHT);
            sweep.agg[slot].permissible += p;
            sweep.agg[slot].same += same;
        }
        sweep
    }

    #[inline]
    fn group(&self, i: usize, side: u8) -> usize {
        match self.grouping {
            Grouping::Fixed(groups, _) => groups[i],
            Grouping::BySide => usize::from(side),
        }
    }

    #[inline]
    fn slot(&self, side: u8, g: usize) -> usize {
        usize::from(side) * self.k + g
    }

    fn insert(&mut self, i: usize, side: u8) {
        self.update(i, side, 1);
    }

    fn remove(&mut self, i: usize, side: u8) {
        self.update(i, side, -1);
    }

    fn update(&mut self, i: usize, side: u8, v: i64) {
        let slot = self.slot(side, self.group(i, side));
        let idx = &mut self.index[slot];
        idx.all.add(self.rank[i], v);
        if self.events[i] {
            idx.events.add(self.rank[i], v);
        }
        idx.total += v;
    }

    /// Summed credit rows of pairs `(y, x)` over the records `y` in `slot`.
    /// `x` must not be indexed at the time of the call.
    fn against(&self, slot: usize, x: usize) -> Against {
        let idx = &self.index[slot];
        if idx.total == 0 {
            return Against::default();
        }
        let r = self.rank[x];
        let all_le = idx.all.prefix(r + 1);
        let all_lt = idx.all.prefix(r);
        let ev_le = idx.events.prefix(r + 1);
        let ev_lt = idx.events.prefix(r);
        let eq_ev = ev_le - ev_lt;
        let eq_cens = (all_le - all_lt) - eq_ev;
        // earlier events: [2, 1, 0]
        let before = ev_lt;
        let (after, both_ev, y_cens, y_ev_x_cens) = if self.events[x] {
            // later records: [0, 1, 2]; tied events [1, 2, 1]; tied censored y [1, 1, 2]
            (idx.total - all_le, eq_ev, eq_cens, 0)
        } else {
            // tied event y with censored x: [2, 1, 1]
            (0, 0, 0, eq_ev)
        };
        Against {
            permissible: before + after + both_ev + y_cens + y_ev_x_cens,
            hi: 2 * before + both_ev + y_cens + 2 * y_ev_x_cens,
            tie: before + after + 2 * both_ev + y_cens + y_ev_x_cens,
            lo: 2 * after + both_ev + 2 * y_cens + y_ev_x_cens,
        }
    }

    pub(crate) fn side(&self, i: usize) -> u8 {
        self.side[i]
    }

    /// Moves record `x` to side `to`. O(k log m).
    pub(crate) fn move_to(&mut self, x: usize, to: u8) {
        let from = self.side[x];
        if from == to {
            return;
        }
        let old_slot = self.slot(from, self.group(x, from));
        let new_slot = self.slot(to, self.group(x, to));
        self.remove(x, from);

        let mut from_side = Against::default();
        let mut to_side = Against::default();
        for g in 0..self.k {
            for (side, total) in [(from, &mut from_side), (to, &mut to_side)] {
                let slot = self.slot(side, g);
                let c = self.against(slot, x);
                let a = &mut self.agg[slot];
                if side == from {
                    // were on x's side, now across
                    a.same -= c.tie;
                    a.hi += c.hi;
                    a.tie += c.tie;
                    a.lo += c.lo;
                } else {
                    a.hi -= c.hi;
                    a.tie -= c.tie;
                    a.lo -= c.lo;
                    a.same += c.tie;
                }
                total.permissible += c.permissible;
                total.hi += c.hi;
                total.tie += c.tie;
                total.lo += c.lo;
            }
        }

        // x's own pairs (x, y) carry the reversed rows
        let p = from_side.permissible + to_side.permissible;
        let a = &mut self.agg[old_slot];
        a.permissible -= p;
        a.same -= from_side.tie;
        a.hi -= to_side.lo;
        a.tie -= to_side.tie;
        a.lo -= to_side.hi;
        let a = &mut self.agg[new_slot];
        a.permissible += p;
        a.same += to_side.tie;
        a.hi += from_side.lo;
        a.tie += from_side.tie;
        a.lo += from_side.hi;

        self.insert(x, to);
        self.side[x] = to;
    }

    /// Tally for risks `risk_left` / `risk_right` assigned by side.
    pub(crate) fn tally(&self, risk_left: f64, risk_right: f64) -> ConcordanceTally {
        let mut perm = vec![0u64; self.k];
        let mut conc = vec![0u64; self.k];
        for side in [LEFT, RIGHT] {
            let (mine, other) = if side == LEFT {
                (risk_left, risk_right)
            } else {
                (risk_right, risk_left)
            };
            for g in 0..self.k {
                let a = &self.agg[self.slot(side, g)];
                let cross = if mine > other {
                    a.hi
                } else if mine == other {
                    a.tie
                } else {
                    a.lo
                };
                perm[g] += a.permissible as u64;
                conc[g] += (a.same + cross) as u64;
            }
        }
        ConcordanceTally::from_halves(perm, conc)
    }
}
