use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::qmath::{c64, CMatrix};

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        c64(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            let d = r[(i, i)];
            d / d.norm()
        } else {
            c64(0.0, 0.0)
        }
    });
    q * phases
}
