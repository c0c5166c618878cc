//! Time-slotted OFDMA: terminals are split into `J` slots, each slot shares
//! all subcarriers by OFDMA, and a terminal's receiver is on only during its
//! own slot.
//!
//! Singleton slots are solved together as a weighted D-TDMA block; each
//! multi-terminal slot is an OFDMA frame whose constant power is
//! `α0 P_tc + sum_k α_k P_rc`. Every block gets its own `P_avg` budget, so
//! blocks decouple. Groupings come from a channel-correlation heuristic or,
//! for small K, exhaustive enumeration.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::{
    energy_report, validate_allocation, Allocation, ChannelMatrix, DemandVector, EnergyReport,
    Slot, SystemConfig,
};
use crate::scalar::Scalar;
use crate::temin::{solve_slot, SlotSolution, SlotWeights, TimeChoice};
use crate::wsre::{min_total_time, solve_block, BlockWeights, TdmaSolution};

/// Largest K for which partitions are enumerated.
pub const EXHAUSTIVE_MAX_K: usize = 6;
const MAX_PRICE_DOUBLINGS: usize = 200;

/// Partition of terminals into time slots, with the correlation data used to
/// build it.
#[derive(Clone, Debug, PartialEq)]
pub struct Grouping<T> {
    pub slots: Vec<Vec<usize>>,
    /// `π[k,l]`: inner product of the L2-normalized gain rows.
    pub pi: Array2<T>,
    /// `Π_j = sum_{k != l in slot j} π[k,l]` over ordered pairs.
    pub sum_cci: Vec<T>,
}

impl<T: Scalar> Grouping<T> {
    /// Builds a grouping from explicit slots; checks that they partition
    /// `0..K`.
    pub fn from_slots(chan: &ChannelMatrix<T>, slots: Vec<Vec<usize>>) -> Result<Self> {
        let k = chan.k();
        let mut seen = vec![false; k];
        for s in &slots {
            if s.is_empty() {
                return Err(Error::Config("empty slot in grouping".into()));
            }
            for &m in s {
                if m >= k || seen[m] {
                    return Err(Error::Config(format!(
                        "terminal {m} missing from 0..{k} or assigned twice"
                    )));
                }
                seen[m] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config("grouping does not cover every terminal".into()));
        }
        let pi = cci_matrix(chan);
        let sum_cci = slots.iter().map(|s| slot_cci(&pi, s)).collect();
        Ok(Self { slots, pi, sum_cci })
    }

    pub fn j(&self) -> usize {
        self.slots.len()
    }
}

fn slot_cci<T: Scalar>(pi: &Array2<T>, members: &[usize]) -> T {
    let mut s = T::zero();
    for &k in members {
        for &l in members {
            if k != l {
                s += pi[[k, l]];
            }
        }
    }
    s
}

/// Channel correlation indices of the L2-normalized gain rows.
pub fn cci_matrix<T: Scalar>(chan: &ChannelMatrix<T>) -> Array2<T> {
    let k = chan.k();
    let norms: Vec<T> = (0..k)
        .map(|kk| chan.h_row(kk).iter().map(|&h| h * h).sum::<T>().sqrt())
        .collect();
    let mut pi = Array2::zeros((k, k));
    for i in 0..k {
        pi[[i, i]] = T::one();
        for j in i + 1..k {
            let dot: T = chan
                .h_row(i)
                .iter()
                .zip(chan.h_row(j).iter())
                .map(|(&a, &b)| a * b)
                .sum();
            let v = (dot / (norms[i] * norms[j])).min(T::one());
            pi[[i, j]] = v;
            pi[[j, i]] = v;
        }
    }
    pi
}

/// Correlation-based grouping: the `J` terminals with the largest total
/// correlation seed the slots; the rest follow in descending total
/// correlation (ties by index), each joining the slot whose sum-CCI grows
/// least (ties to the lowest slot).
pub fn cog_grouping<T: Scalar>(chan: &ChannelMatrix<T>, j: usize) -> Result<Grouping<T>> {
    let k = chan.k();
    if j == 0 || j > k {
        return Err(Error::Config(format!("slot count {j} outside 1..={k}")));
    }
    let pi = cci_matrix(chan);
    let total: Vec<T> = (0..k)
        .map(|kk| (0..k).filter(|&l| l != kk).map(|l| pi[[kk, l]]).sum())
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| total[b].partial_cmp(&total[a]).unwrap().then(a.cmp(&b)));
    let mut slots: Vec<Vec<usize>> = order[..j].iter().map(|&m| vec![m]).collect();
    for &m in &order[j..] {
        let mut best = 0;
        let mut best_inc = T::infinity();
        for (s, members) in slots.iter().enumerate() {
            let inc: T = members.iter().map(|&l| pi[[m, l]] + pi[[l, m]]).sum();
            if inc < best_inc {
                best_inc = inc;
                best = s;
            }
        }
        slots[best].push(m);
    }
    for s in &mut slots {
        s.sort_unstable();
    }
    let sum_cci = slots.iter().map(|s| slot_cci(&pi, s)).collect();
    Ok(Grouping { slots, pi, sum_cci })
}

/// Slot indices with one terminal and with several.
pub fn split_b1_b2<T>(grouping: &Grouping<T>) -> (Vec<usize>, Vec<usize>) {
    let mut b1 = Vec::new();
    let mut b2 = Vec::new();
    for (j, s) in grouping.slots.iter().enumerate() {
        if s.len() == 1 {
            b1.push(j);
        } else {
            b2.push(j);
        }
    }
    (b1, b2)
}

fn sub_instance<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    members: &[usize],
) -> Result<(SystemConfig<T>, ChannelMatrix<T>, DemandVector<T>)> {
    Ok((cfg.select(members)?, chan.select(members), demand.select(members)))
}

/// Singleton slots solved as one weighted D-TDMA block.
#[derive(Clone, Debug, PartialEq)]
pub struct SingletonBlock<T> {
    pub members: Vec<usize>,
    pub solution: TdmaSolution<T>,
}

/// Pooled solve of the singleton slots: time cost `α_k P_rc + α0 P_tc` and
/// transmit energy weighted by `α0`, under one `P_avg` budget.
pub fn solve_singletons<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    members: &[usize],
) -> Result<SingletonBlock<T>> {
    singletons_priced(cfg, chan, demand, members, T::zero())
}

fn singletons_priced<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    members: &[usize],
    nu: T,
) -> Result<SingletonBlock<T>> {
    if members.is_empty() {
        return Err(Error::Config("no singleton terminals".into()));
    }
    let (c, h, d) = sub_instance(cfg, chan, demand, members)?;
    let solution = solve_block(&c, &h, &d, &BlockWeights::joint(&c).with_time_price(nu))?;
    Ok(SingletonBlock {
        members: members.to_vec(),
        solution,
    })
}

/// A multi-terminal slot solved as an OFDMA frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SharedSlot<T> {
    pub members: Vec<usize>,
    pub solution: SlotSolution<T>,
}

/// OFDMA solve of one slot with constant power `α0 P_tc + sum α_k P_rc`.
pub fn solve_multi_slot<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    members: &[usize],
) -> Result<SharedSlot<T>> {
    shared_priced(cfg, chan, demand, members, T::zero())
}

fn shared_priced<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    members: &[usize],
    nu: T,
) -> Result<SharedSlot<T>> {
    if members.len() < 2 {
        return Err(Error::Config("a shared slot needs at least two terminals".into()));
    }
    let (c, h, d) = sub_instance(cfg, chan, demand, members)?;
    let all: Vec<usize> = (0..members.len()).collect();
    let weights = SlotWeights::joint(&c, &all).with_time_price(nu);
    let solution = solve_slot(&c, &h, &d, weights, None)?;
    Ok(SharedSlot {
        members: members.to_vec(),
        solution,
    })
}

/// Solved grouping: per-block solutions and the assembled frame.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupedSolution<T> {
    pub grouping: Grouping<T>,
    pub singletons: Option<SingletonBlock<T>>,
    pub shared: Vec<SharedSlot<T>>,
    pub allocation: Allocation<T>,
    pub report: EnergyReport<T>,
}

impl<T: Scalar> GroupedSolution<T> {
    /// Weighted-sum total energy of the frame (J).
    pub fn objective(&self) -> T {
        self.report.wstre
    }
}

/// Frame layout: shared slots by descending duration, then the singleton
/// block in terminal order.
fn assemble<T: Scalar>(
    chan: &ChannelMatrix<T>,
    singletons: Option<&SingletonBlock<T>>,
    shared: &[SharedSlot<T>],
) -> Allocation<T> {
    let (k, n) = (chan.k(), chan.n());
    let mut order: Vec<&SharedSlot<T>> = shared.iter().collect();
    order.sort_by(|a, b| {
        b.solution
            .duration
            .partial_cmp(&a.solution.duration)
            .unwrap()
    });
    let mut slots: Vec<Slot<T>> = order
        .iter()
        .map(|s| Slot {
            members: s.members.clone(),
            duration: s.solution.duration,
        })
        .collect();
    if let Some(b) = singletons {
        let mut idx: Vec<usize> = (0..b.members.len()).collect();
        idx.sort_by_key(|&i| b.members[i]);
        for i in idx {
            slots.push(Slot {
                members: vec![b.members[i]],
                duration: b.solution.on_time[i],
            });
        }
    }
    let total: T = slots.iter().map(|s| s.duration).sum();
    let mut rho = Array2::zeros((k, n));
    let mut power = Array2::zeros((k, n));
    let mut on_time = vec![T::zero(); k];
    for s in shared {
        let tj = s.solution.duration;
        for (i, &m) in s.members.iter().enumerate() {
            on_time[m] = tj;
            for nn in 0..n {
                rho[[m, nn]] = tj * s.solution.p2.rho[[i, nn]] / total;
                power[[m, nn]] = s.solution.p2.power[[i, nn]];
            }
        }
    }
    if let Some(b) = singletons {
        for (i, &m) in b.members.iter().enumerate() {
            let t = b.solution.on_time[i];
            on_time[m] = t;
            for nn in 0..n {
                rho[[m, nn]] = t / total;
                power[[m, nn]] = b.solution.power[[i, nn]];
            }
        }
    }
    Allocation {
        duration: total,
        rho,
        power,
        on_time,
        grouping: Some(slots),
    }
}

fn finish<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    grouping: Grouping<T>,
    singletons: Option<SingletonBlock<T>>,
    shared: Vec<SharedSlot<T>>,
) -> Result<GroupedSolution<T>> {
    let allocation = assemble(chan, singletons.as_ref(), &shared);
    let v = validate_allocation(cfg, chan, demand, &allocation);
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    let report = energy_report(cfg, demand, &allocation)?;
    Ok(GroupedSolution {
        grouping,
        singletons,
        shared,
        allocation,
        report,
    })
}

fn solve_priced<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    grouping: &Grouping<T>,
    nu: T,
) -> Result<(Option<SingletonBlock<T>>, Vec<SharedSlot<T>>)> {
    let (b1, b2) = split_b1_b2(grouping);
    let singles = if b1.is_empty() {
        None
    } else {
        let members: Vec<usize> = b1.iter().map(|&j| grouping.slots[j][0]).collect();
        Some(singletons_priced(cfg, chan, demand, &members, nu)?)
    };
    let shared = b2
        .iter()
        .map(|&j| shared_priced(cfg, chan, demand, &grouping.slots[j], nu))
        .collect::<Result<Vec<_>>>()?;
    Ok((singles, shared))
}

fn frame_time<T: Scalar>(singles: &Option<SingletonBlock<T>>, shared: &[SharedSlot<T>]) -> T {
    singles
        .as_ref()
        .map(|b| b.solution.total_time())
        .unwrap_or(T::zero())
        + shared.iter().map(|s| s.solution.duration).sum::<T>()
}

fn check_inputs<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
) -> Result<()> {
    if cfg.k() != chan.k() || demand.len() != chan.k() {
        return Err(Error::Shape(format!(
            "config has {} terminals, channel {}, demand {}",
            cfg.k(),
            chan.k(),
            demand.len()
        )));
    }
    Ok(())
}

/// Solves the weighted-sum problem for a fixed grouping.
pub fn solve_grouping<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    grouping: &Grouping<T>,
) -> Result<GroupedSolution<T>> {
    check_inputs(cfg, chan, demand)?;
    let (singles, shared) = solve_priced(cfg, chan, demand, grouping, T::zero())?;
    finish(cfg, chan, demand, grouping.clone(), singles, shared)
}

/// Outcome of the search over slot counts.
#[derive(Clone, Debug, PartialEq)]
pub struct WstreResult<T> {
    pub best: GroupedSolution<T>,
    /// `(J, objective)` of every candidate that solved.
    pub candidates: Vec<(usize, T)>,
}

impl<T: Scalar> WstreResult<T> {
    pub fn j(&self) -> usize {
        self.best.grouping.j()
    }
}

fn candidate_groupings<T: Scalar>(chan: &ChannelMatrix<T>) -> Result<Vec<Grouping<T>>> {
    let k = chan.k();
    let mut out = vec![cog_grouping(chan, k)?];
    if k > 1 {
        out.push(cog_grouping(chan, 1)?);
    }
    for j in 2..k {
        out.push(cog_grouping(chan, j)?);
    }
    Ok(out)
}

fn pick_best<T: Scalar>(
    results: Vec<(usize, Result<GroupedSolution<T>>)>,
) -> Result<WstreResult<T>> {
    let mut best: Option<GroupedSolution<T>> = None;
    let mut candidates = Vec::new();
    let mut first_err = None;
    for (j, r) in results {
        match r {
            Ok(s) => {
                candidates.push((j, s.objective()));
                if best.as_ref().map(|b| s.objective() < b.objective()).unwrap_or(true) {
                    best = Some(s);
                }
            }
            Err(e) => {
                if first_err.is_none() || e.is_infeasible() {
                    first_err = Some(e);
                }
            }
        }
    }
    match best {
        Some(best) => Ok(WstreResult { best, candidates }),
        None => Err(first_err.unwrap_or_else(|| Error::Config("no candidate groupings".into()))),
    }
}

/// Tries `J = K`, `J = 1` and every `J` in between with the correlation
/// grouping; keeps the smallest weighted-sum energy.
pub fn solve_wstremin<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
) -> Result<WstreResult<T>> {
    check_inputs(cfg, chan, demand)?;
    let results = candidate_groupings(chan)?
        .into_iter()
        .map(|g| (g.j(), solve_grouping(cfg, chan, demand, &g)))
        .collect();
    pick_best(results)
}

/// Every partition of `0..k` into exactly `j` nonempty slots, in
/// restricted-growth order.
pub fn partitions(k: usize, j: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, k: usize, j: usize, used: usize, code: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == k {
            if used == j {
                let mut slots = vec![Vec::new(); j];
                for (m, &c) in code.iter().enumerate() {
                    slots[c].push(m);
                }
                out.push(slots);
            }
            return;
        }
        // Not enough terminals left to open the remaining slots.
        if j - used > k - i {
            return;
        }
        for c in 0..=used.min(j - 1) {
            code.push(c);
            rec(i + 1, k, j, used.max(c + 1), code, out);
            code.pop();
        }
    }
    let mut out = Vec::new();
    if j >= 1 && j <= k {
        rec(0, k, j, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Best grouping into exactly `j` slots by enumerating all partitions.
pub fn exhaustive_grouping<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    j: usize,
) -> Result<GroupedSolution<T>> {
    check_inputs(cfg, chan, demand)?;
    let k = chan.k();
    if k > EXHAUSTIVE_MAX_K {
        return Err(Error::TooLarge(format!(
            "exhaustive grouping enumerates partitions of {k} terminals; limit is {EXHAUSTIVE_MAX_K}"
        )));
    }
    if j == 0 || j > k {
        return Err(Error::Config(format!("slot count {j} outside 1..={k}")));
    }
    let results = partitions(k, j)
        .into_iter()
        .map(|slots| {
            let r = Grouping::from_slots(chan, slots)
                .and_then(|g| solve_grouping(cfg, chan, demand, &g));
            (j, r)
        })
        .collect();
    pick_best(results).map(|r| r.best)
}

/// Shortest frame a grouping can achieve: each block at its own power
/// limit.
pub fn min_frame_time<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    grouping: &Grouping<T>,
) -> Result<T> {
    let (b1, b2) = split_b1_b2(grouping);
    let mut total = T::zero();
    if !b1.is_empty() {
        let members: Vec<usize> = b1.iter().map(|&j| grouping.slots[j][0]).collect();
        let (c, h, d) = sub_instance(cfg, chan, demand, &members)?;
        total += min_total_time(&c, &h, &d)?.total_time();
    }
    for &j in &b2 {
        let (c, h, d) = sub_instance(cfg, chan, demand, &grouping.slots[j])?;
        let w = SlotWeights {
            tx_weight: T::zero(),
            const_power: T::one(),
        };
        let s = solve_slot(&c, &h, &d, w, None)?;
        debug_assert_eq!(s.choice, TimeChoice::PowerLimited);
        total += s.duration;
    }
    Ok(total)
}

/// [`solve_grouping`] with the frame limited to `T_max`: a common price per
/// second of slot time is raised until the blocks fit.
pub fn solve_grouping_tmax<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
    grouping: &Grouping<T>,
    t_max: T,
) -> Result<GroupedSolution<T>> {
    check_inputs(cfg, chan, demand)?;
    let shortest = min_frame_time(cfg, chan, demand, grouping)?;
    if shortest > t_max {
        return Err(Error::Infeasible {
            reason: format!(
                "grouping into {} slots needs at least {} s, above T_max = {t_max} s",
                grouping.j(),
                shortest
            ),
            diagnostic: shortest.as_f64(),
        });
    }
    let (s0, h0) = solve_priced(cfg, chan, demand, grouping, T::zero())?;
    if frame_time(&s0, &h0) <= t_max {
        return finish(cfg, chan, demand, grouping.clone(), s0, h0);
    }
    // Price scale: the largest constant power any block pays per second.
    let scale = cfg.alpha0() * cfg.p_tc()
        + cfg.alphas().iter().copied().sum::<T>() * cfg.p_rc()
        + cfg.p_avg();
    let mut lo = T::zero();
    let mut hi = scale;
    let mut best = None;
    for _ in 0..MAX_PRICE_DOUBLINGS {
        let (s, h) = solve_priced(cfg, chan, demand, grouping, hi)?;
        if frame_time(&s, &h) <= t_max {
            best = Some((s, h));
            break;
        }
        lo = hi;
        hi = hi * T::lit(2.0);
    }
    let Some(mut fit) = best else {
        return Err(Error::Numeric(format!(
            "no time price brings the frame under T_max = {t_max} s"
        )));
    };
    let rel = cfg.tol().time_rel;
    loop {
        let t_fit = frame_time(&fit.0, &fit.1);
        if t_fit >= t_max * (T::one() - rel) || hi - lo <= rel * hi {
            break;
        }
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let (s, h) = solve_priced(cfg, chan, demand, grouping, mid)?;
        if frame_time(&s, &h) <= t_max {
            hi = mid;
            fit = (s, h);
        } else {
            lo = mid;
        }
    }
    finish(cfg, chan, demand, grouping.clone(), fit.0, fit.1)
}

/// [`solve_wstremin`] with `T <= T_max` from the configuration. Groupings
/// that cannot fit are skipped; if none fits the shortest achievable frame
/// is reported.
pub fn solve_wstremin_tmax<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
) -> Result<WstreResult<T>> {
    let Some(t_max) = cfg.t_max() else {
        return solve_wstremin(cfg, chan, demand);
    };
    check_inputs(cfg, chan, demand)?;
    let mut results = Vec::new();
    let mut shortest = T::infinity();
    for g in candidate_groupings(chan)? {
        let r = solve_grouping_tmax(cfg, chan, demand, &g, t_max);
        if let Err(Error::Infeasible { diagnostic, .. }) = &r {
            shortest = shortest.min(T::lit(*diagnostic));
        }
        results.push((g.j(), r));
    }
    if results.iter().all(|(_, r)| matches!(r, Err(Error::Infeasible { .. }))) {
        return Err(Error::Infeasible {
            reason: format!(
                "no grouping fits T_max = {t_max} s; the shortest frame is {shortest} s"
            ),
            diagnostic: shortest.as_f64(),
        });
    }
    pick_best(results)
}

/// The two forced groupings, every terminal alone (`J = K`) and all in one
/// slot (`J = 1`), solved with the configured weights.
pub fn extremes<T: Scalar>(
    cfg: &SystemConfig<T>,
    chan: &ChannelMatrix<T>,
    demand: &DemandVector<T>,
) -> Result<(GroupedSolution<T>, GroupedSolution<T>)> {
    let k = chan.k();
    let all_single = Grouping::from_slots(chan, (0..k).map(|m| vec![m]).collect())?;
    let one = Grouping::from_slots(chan, vec![(0..k).collect()])?;
    Ok((
        solve_grouping(cfg, chan, demand, &all_single)?,
        solve_grouping(cfg, chan, demand, &one)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testutil::unit_cfg;
    use ndarray::array;

    #[test]
    fn stirling_counts() {
        assert_eq!(partitions(4, 2).len(), 7);
        assert_eq!(partitions(4, 3).len(), 6);
        assert_eq!(partitions(5, 2).len(), 15);
        assert_eq!(partitions(6, 3).len(), 90);
        assert_eq!(partitions(4, 1).len(), 1);
        assert_eq!(partitions(4, 4).len(), 1);
    }

    #[test]
    fn forced_partitions() {
        let cfg = unit_cfg(3);
        let chan = ChannelMatrix::new(array![[1.0, 2.0], [2.0, 1.0], [1.0, 1.0]], &cfg).unwrap();
        let g = cog_grouping(&chan, 3).unwrap();
        assert!(g.slots.iter().all(|s| s.len() == 1));
        let g = cog_grouping(&chan, 1).unwrap();
        assert_eq!(g.slots.len(), 1);
        let mut s = g.slots[0].clone();
        s.sort();
        assert_eq!(s, vec![0, 1, 2]);
    }

    #[test]
    fn split_by_cardinality() {
        let cfg = unit_cfg(4);
        let chan = ChannelMatrix::new(Array2::from_elem((4, 2), 1.0), &cfg).unwrap();
        let g = Grouping::from_slots(&chan, vec![vec![0], vec![1, 2], vec![3]]).unwrap();
        assert_eq!(split_b1_b2(&g), (vec![0, 2], vec![1]));
    }

    #[test]
    fn bad_partitions_rejected() {
        let cfg = unit_cfg(3);
        let chan = ChannelMatrix::new(Array2::from_elem((3, 2), 1.0), &cfg).unwrap();
        assert!(Grouping::from_slots(&chan, vec![vec![0, 1]]).is_err());
        assert!(Grouping::from_slots(&chan, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Grouping::from_slots(&chan, vec![vec![0, 1, 2], vec![]]).is_err());
    }
}
