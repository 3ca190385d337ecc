#![allow(dead_code)]

use hardy_core::algebra::{MultiMatrixAlgebra, Representation};
use hardy_core::corr::Correspondence;
use hardy_core::linalg::{real, CMatrix};
use hardy_core::poisson::DiscPoint;

/// Small correspondences with a faithful representation each.
pub fn family(idx: usize) -> (Correspondence, Representation) {
    match idx % 6 {
        0 => {
            let c = Correspondence::free(1);
            let r = Representation::standard(c.algebra());
            (c, r)
        }
        1 => {
            let c = Correspondence::free(2);
            let r = Representation::standard(c.algebra());
            (c, r)
        }
        2 => {
            let c = Correspondence::free(3);
            let r = Representation::new(c.algebra(), vec![2]).unwrap();
            (c, r)
        }
        3 => {
            let c = Correspondence::graph(vec![vec![1, 1], vec![1, 0]]).unwrap();
            let r = Representation::new(c.algebra(), vec![1, 1]).unwrap();
            (c, r)
        }
        4 => {
            let c = Correspondence::graph(vec![vec![0, 1], vec![2, 1]]).unwrap();
            let r = Representation::new(c.algebra(), vec![2, 1]).unwrap();
            (c, r)
        }
        _ => {
            let m2 = MultiMatrixAlgebra::full_matrix(2).unwrap();
            let c = Correspondence::new(&m2, vec![vec![2]]).unwrap();
            let r = Representation::new(&m2, vec![2]).unwrap();
            (c, r)
        }
    }
}

pub fn point(idx: usize, seed: u64, norm: f64) -> DiscPoint {
    let (c, r) = family(idx);
    DiscPoint::random(&c, &r, seed, norm).unwrap()
}

pub fn scalar_point(x: f64) -> DiscPoint {
    let c = Correspondence::free(1);
    let r = Representation::standard(c.algebra());
    DiscPoint::new(&c, &r, CMatrix::from_element(1, 1, real(x))).unwrap()
}
