//! Lattice disks in imaginary quadratic rings and their residue classes.

use cmbound::density::{embedding_abs, enumerate_disk, residue_distribution, DiskSpec};
use cmbound::numfield::{
    normalize, reduction_maps, splitting_of_5, FieldDescriptor, RawDescriptor,
};
use proptest::prelude::*;

fn q(m: u64) -> FieldDescriptor {
    normalize(RawDescriptor::Quadratic(m)).unwrap()
}

#[test]
fn counts_approach_area() {
    for m in [1u64, 2, 5, 3, 7] {
        let d = q(m);
        let disc = d.quadratic_discriminant().unwrap().unsigned_abs() as f64;
        let n = DiskSpec::new(d, 500).unwrap().count() as f64;
        let ratio = n / 250_000.0 / (2.0 * std::f64::consts::PI / disc.sqrt());
        assert!((ratio - 1.0).abs() < 0.05, "m={m} ratio={ratio}");
    }
}

#[test]
fn residues_equidistribute() {
    for m in [1u64, 2, 5, 11] {
        let d = q(m);
        let maps = reduction_maps(&d).unwrap();
        let spec = DiskSpec::new(d, 300).unwrap();
        let dist = residue_distribution(&spec, &maps).unwrap();
        assert_eq!(dist.total, spec.count());
        let s = splitting_of_5(&d);
        assert_eq!(dist.class_count(), 5usize.pow(s.f * s.r));
        assert!(dist.max_min_ratio() < 1.05, "m={m}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn enumeration_agrees_with_count(i in 0usize..6, radius in 1u64..60) {
        let d = q([1, 2, 3, 5, 11, 15][i]);
        let spec = DiskSpec::new(d, radius).unwrap();
        let pts: Vec<_> = enumerate_disk(&spec).unwrap().collect();
        prop_assert_eq!(pts.len() as u64, spec.count());
        for p in &pts {
            prop_assert!(embedding_abs(p, &d).unwrap() < radius as f64);
        }
        // one step outside each row is outside the disk
        let inside: std::collections::HashSet<_> = pts.iter().map(|p| (p.coords[0], p.coords[1])).collect();
        for &(x, y) in &inside {
            for nx in [x - 1, x + 1] {
                if !inside.contains(&(nx, y)) {
                    let e = d.element(vec![nx, y]).unwrap();
                    prop_assert!(embedding_abs(&e, &d).unwrap() >= radius as f64 - 1e-9);
                }
            }
        }
    }
}
