//! Row-parallel stepper: 64 cells per word, neighbor counts accumulated in
//! four bit planes with carry-save adders.

#[inline(always)]
fn full_add(a: u64, b: u64, c: u64) -> (u64, u64) {
    let t = a ^ b;
    (t ^ c, (a & b) | (t & c))
}

/// Writes one generation of `src` into `dst`.
///
/// `wrap` selects toroidal boundaries; otherwise cells outside the window are
/// dead. Bits beyond `width` in the last word of each row stay zero.
#[allow(clippy::too_many_arguments)]
pub(super) fn step_words(
    src: &[u64],
    dst: &mut [u64],
    width: usize,
    height: usize,
    stride: usize,
    wrap: bool,
    birth_mask: u16,
    survive_mask: u16,
) {
    debug_assert_eq!(src.len(), stride * height);
    let tail_mask = match width % 64 {
        0 => !0u64,
        r => (1u64 << r) - 1,
    };
    let last_word = (width - 1) / 64;
    let last_bit = (width - 1) % 64;

    // west[x] holds cell x-1, east[x] holds cell x+1.
    let mut west = vec![0u64; src.len()];
    let mut east = vec![0u64; src.len()];
    for y in 0..height {
        let row = &src[y * stride..(y + 1) * stride];
        let (w_row, e_row) = (&mut west[y * stride..(y + 1) * stride], &mut east[y * stride..(y + 1) * stride]);
        for i in 0..stride {
            let prev = if i > 0 { row[i - 1] } else { 0 };
            let next = if i + 1 < stride { row[i + 1] } else { 0 };
            w_row[i] = (row[i] << 1) | (prev >> 63);
            e_row[i] = (row[i] >> 1) | (next << 63);
        }
        if wrap {
            w_row[0] |= (row[last_word] >> last_bit) & 1;
            e_row[last_word] |= (row[0] & 1) << last_bit;
        }
        w_row[stride - 1] &= tail_mask;
    }

    let counts: Vec<(u8, bool, bool)> = (0..=8u8)
        .filter(|k| (birth_mask | survive_mask) >> k & 1 == 1)
        .map(|k| (k, birth_mask >> k & 1 == 1, survive_mask >> k & 1 == 1))
        .collect();

    let zero_row = vec![0u64; stride];
    for y in 0..height {
        let above = if y > 0 {
            Some(y - 1)
        } else if wrap {
            Some(height - 1)
        } else {
            None
        };
        let below = if y + 1 < height {
            Some(y + 1)
        } else if wrap {
            Some(0)
        } else {
            None
        };
        let rows: [&[u64]; 8] = [
            row(&west, &zero_row, above, stride),
            row(src, &zero_row, above, stride),
            row(&east, &zero_row, above, stride),
            row(&west, &zero_row, Some(y), stride),
            row(&east, &zero_row, Some(y), stride),
            row(&west, &zero_row, below, stride),
            row(src, &zero_row, below, stride),
            row(&east, &zero_row, below, stride),
        ];
        let cur = &src[y * stride..(y + 1) * stride];
        let out = &mut dst[y * stride..(y + 1) * stride];
        for i in 0..stride {
            let n: [u64; 8] = std::array::from_fn(|j| rows[j][i]);
            let (s0, c0) = full_add(n[0], n[1], n[2]);
            let (s1, c1) = full_add(n[3], n[4], n[5]);
            let (s2, c2) = (n[6] ^ n[7], n[6] & n[7]);
            let (b0, k1) = full_add(s0, s1, s2);
            let (t, k2) = full_add(c0, c1, c2);
            let b1 = t ^ k1;
            let k3 = t & k1;
            let b2 = k2 ^ k3;
            let b3 = k2 & k3;

            let mut born = 0u64;
            let mut keep = 0u64;
            for &(k, is_birth, is_survive) in &counts {
                let e = (if k & 1 != 0 { b0 } else { !b0 })
                    & (if k & 2 != 0 { b1 } else { !b1 })
                    & (if k & 4 != 0 { b2 } else { !b2 })
                    & (if k & 8 != 0 { b3 } else { !b3 });
                if is_birth {
                    born |= e;
                }
                if is_survive {
                    keep |= e;
                }
            }
            let c = cur[i];
            out[i] = (!c & born) | (c & keep);
        }
        out[stride - 1] &= tail_mask;
    }
}

#[inline]
fn row<'a>(buf: &'a [u64], zero: &'a [u64], r: Option<usize>, stride: usize) -> &'a [u64] {
    match r {
        Some(r) => &buf[r * stride..(r + 1) * stride],
        None => zero,
    }
}
