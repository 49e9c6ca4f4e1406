//! Joint-eigenspace transform of a suite member at a few points, next to its
//! spherical transform.

use jeft::geometry::BoundaryPoint;
use jeft::testfns::suite;
use jeft::transforms::{jeft_composed, jeft_direct, spherical_transform};
use jeft::{Model, ModelParams, Point, QuadratureGrid, SpectralParam};

fn main() -> jeft::Result<()> {
    let params = ModelParams::with_defaults(Model::H3);
    let grid = QuadratureGrid::with_defaults(params)?;
    let f = &suite(&params)?[0];
    let lambda = SpectralParam::real(1.0);
    println!("spherical transform: {}", spherical_transform(f, &grid, lambda)?);
    let axis = BoundaryPoint::axis(3);
    for r in [0.0, 0.5, 1.0] {
        let x = Point::at_distance(&axis, r)?;
        let d = jeft_direct(f, &grid, lambda, &x)?;
        let c = jeft_composed(f, &grid, lambda, &x)?;
        println!("r = {r}: direct {d:.12}, composed {c:.12}");
    }
    Ok(())
}
