//! Planar-gradient prediction: each sample is predicted from its left, upper
//! and upper-left neighbours. Neighbours outside the plane read as zero, so
//! the first sample is carried verbatim and the inverse is an exact scan.

use crate::error::{Error, Result};
use crate::plane::Plane;

#[inline]
fn at(p: &Plane, x: isize, y: isize) -> f64 {
    if x < 0 || y < 0 {
        0.0
    } else {
        p.get(x as usize, y as usize)
    }
}

fn check(p: &Plane) -> Result<()> {
    if p.width() < 2 || p.height() < 2 {
        return Err(Error::InvalidGeometry(format!(
            "predictive coding needs sides >= 2, got {}x{}",
            p.width(),
            p.height()
        )));
    }
    Ok(())
}

pub fn predictive_residual(plane: &Plane) -> Result<Plane> {
    check(plane)?;
    Ok(Plane::from_fn(plane.width(), plane.height(), |x, y| {
        let (x, y) = (x as isize, y as isize);
        at(plane, x, y) - (at(plane, x - 1, y) + at(plane, x, y - 1) - at(plane, x - 1, y - 1))
    }))
}

/// Raster-order accumulation undoing [`predictive_residual`].
pub fn predictive_inverse(residual: &Plane) -> Result<Plane> {
    check(residual)?;
    let mut out = Plane::new(residual.width(), residual.height());
    for y in 0..residual.height() as isize {
        for x in 0..residual.width() as isize {
            let pred = at(&out, x - 1, y) + at(&out, x, y - 1) - at(&out, x - 1, y - 1);
            out.set(x as usize, y as usize, residual.get(x as usize, y as usize) + pred);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_plane_leaves_only_the_origin() {
        let r = predictive_residual(&Plane::filled(6, 5, 40.0)).unwrap();
        assert_eq!(r.get(0, 0), 40.0);
        let rest: f64 = r.data().iter().skip(1).map(|v| v.abs()).sum();
        assert_eq!(rest, 0.0);
    }

    #[test]
    fn ramp_interior_is_zero() {
        let p = Plane::from_fn(10, 8, |x, _| x as f64);
        let r = predictive_residual(&p).unwrap();
        for y in 1..8 {
            for x in 1..10 {
                assert_eq!(r.get(x, y), 0.0);
            }
        }
    }

    #[test]
    fn rejects_thin_planes() {
        assert!(predictive_residual(&Plane::new(1, 5)).is_err());
    }

    proptest! {
        #[test]
        fn inverse_is_exact(w in 2usize..12, h in 2usize..12, seed in any::<u64>()) {
            let mut s = seed;
            let p = Plane::from_fn(w, h, |_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) % 256) as f64
            });
            let back = predictive_inverse(&predictive_residual(&p).unwrap()).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
