use ndarray::Array2;

use super::GridBox;

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        parent[x as usize] = parent[parent[x as usize] as usize];
        x = parent[x as usize];
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// 8-connected labelling. Label 0 is background; components are numbered
/// `1..=count` in order of their first bin in row-major order.
pub fn label_components(mask: &Array2<bool>) -> (Array2<u32>, usize) {
    let (rows, cols) = mask.dim();
    let mut labels = Array2::<u32>::zeros((rows, cols));
    let mut parent: Vec<u32> = vec![0];
    // first pass: provisional labels from the already-visited neighbours
    for t in 0..rows {
        for f in 0..cols {
            if !mask[[t, f]] {
                continue;
            }
            let mut seen = [0u32; 4];
            let mut n = 0;
            if f > 0 && labels[[t, f - 1]] != 0 {
                seen[n] = labels[[t, f - 1]];
                n += 1;
            }
            if t > 0 {
                for ff in f.saturating_sub(1)..=(f + 1).min(cols - 1) {
                    if labels[[t - 1, ff]] != 0 {
                        seen[n] = labels[[t - 1, ff]];
                        n += 1;
                    }
                }
            }
            if n == 0 {
                let l = parent.len() as u32;
                parent.push(l);
                labels[[t, f]] = l;
            } else {
                let l = *seen[..n].iter().min().expect("non-empty");
                labels[[t, f]] = l;
                for &s in &seen[..n] {
                    union(&mut parent, l, s);
                }
            }
        }
    }
    // second pass: resolve roots and renumber densely
    let mut dense = vec![0u32; parent.len()];
    let mut count = 0;
    for t in 0..rows {
        for f in 0..cols {
            let l = labels[[t, f]];
            if l == 0 {
                continue;
            }
            let root = find(&mut parent, l) as usize;
            if dense[root] == 0 {
                count += 1;
                dense[root] = count as u32;
            }
            labels[[t, f]] = dense[root];
        }
    }
    (labels, count)
}

/// Bounding box of every 8-connected component of passing bins.
pub fn connected_components(mask: &Array2<bool>) -> Vec<GridBox> {
    let (labels, count) = label_components(mask);
    let mut boxes: Vec<Option<GridBox>> = vec![None; count];
    for ((t, f), &l) in labels.indexed_iter() {
        if l == 0 {
            continue;
        }
        match &mut boxes[l as usize - 1] {
            Some(b) => b.include(t, f),
            slot => *slot = Some(GridBox::point(t, f)),
        }
    }
    boxes.into_iter().map(|b| b.expect("every label has a bin")).collect()
}
