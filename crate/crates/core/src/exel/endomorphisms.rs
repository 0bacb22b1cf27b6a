//! Regular endomorphisms compatible with a fixed positive map on `C^n`.
//!
//! They correspond to subalgebras `B` of the multiplicative domain of `L`
//! that `L` maps bijectively onto `L(A)`: with `θ = (L|_B)⁻¹`, the
//! endomorphism is `α(a) = θ(L(1) a)`.

use num_traits::Zero;
use serde::Serialize;

use super::ExelError;
use crate::cp::{check_transfer_pair, indicator, md_subalgebra, PositiveMapMatrix, Subalgebra};
use crate::linalg::{dense_to_sparse, QMatrix, SpanBasis};
use crate::rational::{fmt_q, Q};

pub use crate::cp::PointMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularEndomorphism {
    pub point_map: PointMap,
    /// The subalgebra `θ(L(A))`.
    pub section_image: Subalgebra,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularEndomorphisms {
    pub endomorphisms: Vec<RegularEndomorphism>,
    pub multiplicative_domain: Option<Subalgebra>,
    /// Support of `L(A)` when it is an ideal.
    pub image: Option<Vec<usize>>,
    pub subalgebras_examined: usize,
    /// Why no regular system exists, when that is decided before enumeration.
    pub reason: Option<String>,
}

impl RegularEndomorphisms {
    fn none(reason: String) -> Self {
        RegularEndomorphisms {
            endomorphisms: Vec::new(),
            multiplicative_domain: None,
            image: None,
            subalgebras_examined: 0,
            reason: Some(reason),
        }
    }
}

/// Enumerates all partial partitions of `0..k`.
fn partial_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    // Each element is dropped or joins an existing/new block.
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for i in 0..k {
        let mut next = Vec::new();
        for p in out {
            next.push(p.clone());
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p;
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

pub fn enumerate_regular_endomorphisms(l: &PositiveMapMatrix) -> Result<RegularEndomorphisms, ExelError> {
    let n = l.n();
    if n > 8 {
        return Err(ExelError::Inconsistent(format!("enumeration is limited to 8 points, got {n}")));
    }
    let image: Vec<usize> = (0..n).filter(|&x| !l.row_sum(x).is_zero()).collect();
    let rank = l.matrix().rank();
    if rank != image.len() {
        return Ok(RegularEndomorphisms::none(format!(
            "no regular system exists: L(A) has dimension {rank} but is not the ideal of functions on its support {image:?}"
        )));
    }
    let ones = vec![Q::from_integer(1.into()); n];
    let l_one = l.apply(&ones);
    if l_one != indicator(n, image.iter().copied()) {
        return Ok(RegularEndomorphisms::none(format!(
            "no regular system exists: L(1) = {:?} is not a projection",
            l_one.iter().map(fmt_q).collect::<Vec<_>>()
        )));
    }
    let md = md_subalgebra(l)?;
    let md_blocks = md.blocks().to_vec();
    let mut found = Vec::new();
    let mut examined = 0;
    for part in partial_partitions(md_blocks.len()) {
        if part.len() != image.len() {
            continue;
        }
        examined += 1;
        let blocks: Vec<Vec<usize>> =
            part.iter().map(|group| group.iter().flat_map(|&b| md_blocks[b].iter().copied()).collect()).collect();
        let b = Subalgebra::new(n, blocks).expect("unions of disjoint blocks");
        let images: Vec<Vec<Q>> = b.basis().iter().map(|v| l.apply(v)).collect();
        let mut span = SpanBasis::new();
        if !images.iter().all(|v| span.insert(&dense_to_sparse(v))) {
            continue;
        }
        // θ(δ_t): solve Σ_j c_j L(χ_{b_j}) = δ_t.
        let cols = QMatrix::from_rows(images.clone()).transpose();
        let mut tau: Vec<Option<usize>> = vec![None; n];
        for &t in &image {
            let c = cols
                .solve(&indicator(n, [t]))
                .ok_or_else(|| ExelError::Inconsistent("L restricted to B does not reach L(A)".into()))?;
            for (j, cj) in c.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                if *cj != Q::from_integer(1.into()) {
                    return Err(ExelError::Inconsistent("section is not a homomorphism".into()));
                }
                for &x in &b.blocks()[j] {
                    if tau[x].replace(t).is_some() {
                        return Err(ExelError::Inconsistent("section images overlap".into()));
                    }
                }
            }
        }
        let alpha = PointMap::new(n, tau)?;
        let check = check_transfer_pair(&alpha, l)?;
        if !check.is_exel || !check.is_regular {
            return Err(ExelError::Inconsistent(format!(
                "induced endomorphism {:?} fails re-verification: {:?}",
                alpha.as_slice(),
                check.witness
            )));
        }
        found.push(RegularEndomorphism { point_map: alpha, section_image: b });
    }
    Ok(RegularEndomorphisms {
        endomorphisms: found,
        multiplicative_domain: Some(md),
        image: Some(image),
        subalgebras_examined: examined,
        reason: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn pm(rows: Vec<Vec<Q>>) -> PositiveMapMatrix {
        PositiveMapMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn partial_partition_counts_are_bell_numbers() {
        // Partial partitions of a k-set are partitions of a (k+1)-set.
        let bell = [1, 2, 5, 15, 52, 203];
        for (k, b) in bell.iter().enumerate() {
            assert_eq!(partial_partitions(k).len(), *b);
        }
    }

    #[test]
    fn identity_has_one_regular_endomorphism() {
        let r = enumerate_regular_endomorphisms(&PositiveMapMatrix::identity(2)).unwrap();
        assert_eq!(r.endomorphisms.len(), 1);
        assert_eq!(r.endomorphisms[0].point_map, PointMap::identity(2));
    }

    #[test]
    fn two_point_shift_has_two_sections() {
        // L(a)(0) = a(1). Both B = C·δ_1 and B = C·1 are mapped onto L(A) = C·δ_0.
        let l = pm(vec![vec![qi(0), qi(1)], vec![qi(0), qi(0)]]);
        let r = enumerate_regular_endomorphisms(&l).unwrap();
        let maps: Vec<&[Option<usize>]> = r.endomorphisms.iter().map(|e| e.point_map.as_slice()).collect();
        assert_eq!(maps.len(), 2);
        assert!(maps.contains(&[None, Some(0)].as_slice()));
        assert!(maps.contains(&[Some(0), Some(0)].as_slice()));
        let hereditary: Vec<_> = r.endomorphisms.iter().filter(|e| e.point_map.has_hereditary_range()).collect();
        assert_eq!(hereditary.len(), 1);
    }

    #[test]
    fn non_ideal_image_is_reported() {
        let l = pm(vec![vec![qi(1), qi(1), qi(0)], vec![qi(1), qi(1), qi(0)], vec![qi(0), qi(0), qi(0)]]);
        let r = enumerate_regular_endomorphisms(&l).unwrap();
        assert!(r.endomorphisms.is_empty());
        assert!(r.reason.unwrap().contains("not the ideal"));
    }

    #[test]
    fn averaging_map_has_no_ideal_image() {
        let h = q(1, 2);
        let l = pm(vec![vec![h.clone(), h.clone()], vec![h.clone(), h]]);
        assert!(enumerate_regular_endomorphisms(&l).unwrap().reason.is_some());
    }

    #[test]
    fn split_emitter_has_two_sections() {
        // Point 0 spreads its mass over 1 and 2; MD forces a(1) = a(2).
        let h = q(1, 2);
        let l = pm(vec![vec![qi(0), h.clone(), h], vec![qi(0); 3], vec![qi(0); 3]]);
        let r = enumerate_regular_endomorphisms(&l).unwrap();
        assert_eq!(r.endomorphisms.len(), 2);
        assert!(r.endomorphisms.iter().all(|e| !e.point_map.has_hereditary_range()));
    }
}
