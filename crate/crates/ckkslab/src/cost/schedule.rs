//! Level schedules of the structured workloads.

use std::collections::BTreeMap;

/// Ciphertext multiplications of a baby-step giant-step polynomial
/// evaluation. Returns the key-switch limb count of every multiplication and
/// the limb count of the evaluated result.
///
/// Baby powers 2..=k are built from the two nearest smaller powers, giant
/// powers k, 2k, 4k, ... by squaring, and the giant combination recursively
/// splits the degree at the largest giant power that fits.
pub fn bsgs_schedule(deg: usize, k: usize, c0: i64) -> (Vec<i64>, i64) {
    let mut mults = Vec::new();
    let mut lvl: BTreeMap<usize, i64> = BTreeMap::new();
    lvl.insert(1, c0);
    for i in 2..=k {
        let a = 1usize << ((i as f64).log2().ceil() as u32 - 1);
        let b = i - a;
        let c = lvl[&a].min(lvl[&b]);
        mults.push(c);
        lvl.insert(i, c - 1);
    }
    let mut g = k;
    while g * 2 <= deg {
        let c = lvl[&g];
        mults.push(c);
        lvl.insert(2 * g, c - 1);
        g *= 2;
    }
    let leaf = if k > 1 { (1..=k.min(deg)).map(|i| lvl[&i]).min().unwrap_or(c0) - 1 } else { c0 - 1 };
    let giants: Vec<usize> = lvl.keys().copied().filter(|&x| x >= k && x.is_power_of_two()).collect();
    let mut combos = Vec::new();
    let out = combine(deg, &giants, k, leaf, &lvl, &mut combos);
    mults.extend(combos);
    (mults, out)
}

fn combine(d: usize, giants: &[usize], k: usize, leaf: i64, lvl: &BTreeMap<usize, i64>, combos: &mut Vec<i64>) -> i64 {
    if d < k {
        return leaf;
    }
    let gg = *giants.iter().filter(|&&x| x <= d).max().expect("a giant power below the degree");
    let smaller: Vec<usize> = giants.iter().copied().filter(|&x| x < gg).collect();
    let lq = combine(d - gg, &smaller, k, leaf, lvl, combos);
    let lr = combine(gg - 1, &smaller, k, leaf, lvl, combos);
    let c = lq.min(lvl[&gg]);
    combos.push(c);
    (c - 1).min(lr)
}

/// Splits a DFT over 2^log_slots points into `iters` radix stages, the larger
/// radices last.
pub fn radices(log_slots: u32, iters: usize) -> Vec<usize> {
    let base = log_slots as usize / iters;
    let extra = log_slots as usize % iters;
    let mut r = vec![1usize << base; iters - extra];
    r.extend(std::iter::repeat_n(1usize << (base + 1), extra));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radices_multiply_to_slots() {
        for it in 1..=8 {
            let r = radices(16, it);
            assert_eq!(r.len(), it);
            assert_eq!(r.iter().product::<usize>(), 1 << 16);
            assert!(r.windows(2).all(|w| w[0] <= w[1]));
        }
        assert_eq!(radices(16, 3), vec![32, 32, 64]);
    }

    #[test]
    fn cubic_schedule() {
        // x^2 from x, then x^3 = x^2 * x at the lower level.
        let (m, out) = bsgs_schedule(3, 4, 10);
        assert_eq!(m, vec![10, 9, 9]);
        assert_eq!(out, 7);
    }

    #[test]
    fn degree_63_depth() {
        let (m, out) = bsgs_schedule(63, 4, 30);
        assert!(m.len() > 10);
        assert_eq!(30 - out, 7);
    }
}
