//! Small lattice enumeration helpers shared by the scores and topology.

use crate::spin::SpinConfiguration;

/// Calls `f` with every `z ∈ Z^d` with `|z|_1 = r`.
pub(crate) fn for_each_sphere_offset(d: usize, r: u32, mut f: impl FnMut(&[i64])) {
    let mut buf = vec![0i64; d];
    sphere_rec(&mut buf, 0, r as i64, &mut f);
}

fn sphere_rec(buf: &mut [i64], pos: usize, remaining: i64, f: &mut impl FnMut(&[i64])) {
    if pos + 1 == buf.len() {
        if remaining == 0 {
            buf[pos] = 0;
            f(buf);
        } else {
            buf[pos] = remaining;
            f(buf);
            buf[pos] = -remaining;
            f(buf);
        }
        return;
    }
    for a in 0..=remaining {
        if a == 0 {
            buf[pos] = 0;
            sphere_rec(buf, pos + 1, remaining, f);
        } else {
            buf[pos] = a;
            sphere_rec(buf, pos + 1, remaining - a, f);
            buf[pos] = -a;
            sphere_rec(buf, pos + 1, remaining - a, f);
        }
    }
}

/// Occupied window sites at ℓ∞ distance exactly 1 from `site` (closed
/// cubes that touch `Q_site`).
pub(crate) fn linf_neighbors(config: &SpinConfiguration, site: usize, out: &mut Vec<usize>) {
    out.clear();
    let window = config.window();
    let center = window.site(site).coords();
    let d = center.len();
    let mut coords = center.to_vec();
    let total = 3usize.pow(d as u32);
    for code in 0..total {
        let mut c = code;
        let mut zero = true;
        for k in 0..d {
            let delta = (c % 3) as i64 - 1;
            c /= 3;
            coords[k] = center[k] + delta;
            zero &= delta == 0;
        }
        if zero {
            continue;
        }
        if let Some(j) = window.lookup(&coords) {
            if config.is_occupied(j) {
                out.push(j);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_sizes() {
        for (d, r, expected) in [(1, 3, 2), (2, 0, 1), (2, 1, 4), (2, 3, 12), (3, 1, 6), (3, 2, 18)] {
            let mut n = 0;
            for_each_sphere_offset(d, r, |z| {
                assert_eq!(z.iter().map(|c| c.unsigned_abs()).sum::<u64>(), r as u64);
                n += 1;
            });
            assert_eq!(n, expected, "d={d} r={r}");
        }
    }
}
