//! Worklist Colour Refinement with smaller-half splitter selection.
//!
//! Rounds stay synchronous so the partition after round `i` is exactly `π^i`.
//! Splitters for round `i` are the children of classes split in round `i-1`,
//! minus one largest child per class; counts into the omitted child follow
//! from the counts into its parent, which agree inside every current class.
//! Each vertex therefore joins a splitter `O(log n)` times.

use crate::graph::Graph;
use crate::refine::{Colouring, RefinementTrace};

struct Partition {
    elements: Vec<usize>,
    position: Vec<usize>,
    class_of: Vec<usize>,
    start: Vec<usize>,
    end: Vec<usize>,
}

impl Partition {
    fn new(n: usize) -> Partition {
        Partition {
            elements: (0..n).collect(),
            position: (0..n).collect(),
            class_of: vec![0; n],
            start: vec![0],
            end: vec![n],
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.elements.swap(i, j);
        self.position[self.elements[i]] = i;
        self.position[self.elements[j]] = j;
    }

    fn members(&self, c: usize) -> &[usize] {
        &self.elements[self.start[c]..self.end[c]]
    }

    fn snapshot(&self) -> Colouring {
        Colouring::from_labels(&self.class_of).normalized()
    }
}

/// Same partition sequence as [`crate::refine::run_colour_refinement`];
/// colours are numbered by first occurrence.
pub fn refine_fast(g: &Graph) -> RefinementTrace {
    let n = g.n();
    let mut part = Partition::new(n);
    let mut partitions = vec![part.snapshot()];
    if n == 0 {
        return RefinementTrace::from_partitions(partitions);
    }
    let mut splitters: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut count = vec![0u32; n];
    let mut signature: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    let mut touched_list: Vec<usize> = Vec::new();
    let mut hit: Vec<usize> = Vec::new();

    loop {
        // signature[v] = (splitter index, neighbours of v in that splitter)
        for (si, s) in splitters.iter().enumerate() {
            for &v in s {
                for &w in g.neighbours(v) {
                    if count[w] == 0 {
                        hit.push(w);
                    }
                    count[w] += 1;
                }
            }
            for &w in &hit {
                if signature[w].is_empty() {
                    touched_list.push(w);
                }
                signature[w].push((si as u32, count[w]));
                count[w] = 0;
            }
            hit.clear();
        }

        // move touched vertices to the back of their class range
        let mut touched_classes: Vec<usize> = Vec::new();
        let mut moved = vec![0usize; part.start.len()];
        for &v in &touched_list {
            let c = part.class_of[v];
            if moved[c] == 0 {
                touched_classes.push(c);
            }
            moved[c] += 1;
            let target = part.end[c] - moved[c];
            part.swap(part.position[v], target);
        }

        let mut next_splitters: Vec<Vec<usize>> = Vec::new();
        let mut any_split = false;
        for c in touched_classes {
            let (s, e) = (part.start[c], part.end[c]);
            let t = e - moved[c];
            part.elements[t..e].sort_unstable_by(|&x, &y| signature[x].cmp(&signature[y]));
            for i in t..e {
                let v = part.elements[i];
                part.position[v] = i;
            }
            let mut bounds: Vec<usize> = Vec::new();
            if t > s {
                bounds.push(s);
            }
            bounds.push(t);
            for i in t + 1..e {
                if signature[part.elements[i]] != signature[part.elements[i - 1]] {
                    bounds.push(i);
                }
            }
            if bounds.len() == 1 {
                continue;
            }
            any_split = true;
            bounds.push(e);
            let mut children: Vec<usize> = Vec::with_capacity(bounds.len() - 1);
            for (k, w) in bounds.windows(2).enumerate() {
                let id = if k == 0 {
                    part.end[c] = w[1];
                    c
                } else {
                    part.start.push(w[0]);
                    part.end.push(w[1]);
                    let id = part.start.len() - 1;
                    for i in w[0]..w[1] {
                        part.class_of[part.elements[i]] = id;
                    }
                    id
                };
                children.push(id);
            }
            let largest = *children.iter().max_by_key(|&&id| (part.end[id] - part.start[id], usize::MAX - id)).unwrap();
            for id in children {
                if id != largest {
                    next_splitters.push(part.members(id).to_vec());
                }
            }
        }
        for &v in &touched_list {
            signature[v].clear();
        }
        touched_list.clear();
        if !any_split {
            break;
        }
        partitions.push(part.snapshot());
        splitters = next_splitters;
    }
    RefinementTrace::from_partitions(partitions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refine::run_colour_refinement;

    fn same_sequence(g: &Graph) -> bool {
        let a = run_colour_refinement(g);
        let b = refine_fast(g);
        a.partitions.len() == b.partitions.len()
            && a.partitions.iter().zip(&b.partitions).all(|(x, y)| x.same_partition(y))
    }

    #[test]
    fn agrees_on_small_graphs() {
        for n in 1..9 {
            assert!(same_sequence(&Graph::path(n)));
            assert!(same_sequence(&Graph::complete(n)));
            assert!(same_sequence(&Graph::empty(n)));
            assert!(same_sequence(&Graph::star(n)));
        }
        assert!(same_sequence(&Graph::cycle(7)));
        assert!(same_sequence(&Graph::path(3).disjoint_union(&Graph::cycle(4))));
    }

    #[test]
    fn empty_input() {
        let t = refine_fast(&Graph::empty(0));
        assert_eq!(t.iteration_number, 0);
    }
}
