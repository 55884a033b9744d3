// Convex-hull footprints: hull, area, intersection and per-algorithm
// footprint metrics.

use eapr::footprint::{compute_footprint, convex_hull, convex_intersection, footprint_overlap, polygon_area};
use eapr::{Coordinates2D, Outcome};

pub fn run_example() -> anyhow::Result<()> {
    let square = convex_hull(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]);
    let shifted = convex_hull(&[[0.5, 0.5], [1.5, 0.5], [1.5, 1.5], [0.5, 1.5]]);
    println!("square hull {:?}, area {}", square.vertices(), polygon_area(&square));
    println!("overlap area {}", polygon_area(&convex_intersection(&square, &shifted)));

    let coords = Coordinates2D {
        points: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [2.0, 2.0]],
    };
    use Outcome::{Bad, Good, Missing};
    let a = compute_footprint(&coords, &[Good, Good, Good, Good, Bad, Missing], "A")?;
    let b = compute_footprint(&coords, &[Bad, Good, Good, Bad, Good, Good], "B")?;
    for f in [&a, &b] {
        println!(
            "{}: area {:.3}, net {:.3}, purity {:.3}, density {:.3}",
            f.algorithm, f.area_good, f.area_net, f.purity, f.density
        );
    }
    println!("overlap(A, B) = {:.3}", footprint_overlap(&a, &b)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
