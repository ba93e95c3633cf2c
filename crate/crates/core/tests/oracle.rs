mod support;

use std::collections::HashSet;

use tropmoduli::complex::enumerate_stable;
use tropmoduli::strata::{correlator, CorrelatorKey};

use support::{brute_force_stable, compositions, dims_of, dvv, forgetful_lift};

fn library_codes(g: u32, n: usize) -> (Vec<usize>, HashSet<Vec<u32>>) {
    let c = enumerate_stable(g, n).unwrap();
    let codes = c.cones().iter().map(|cone| support::brute_code(cone.graph())).collect();
    (c.dims(), codes)
}

#[test]
fn enumeration_matches_brute_force() {
    for (g, n) in [(1, 2), (1, 3), (1, 4), (2, 1), (2, 2), (2, 3)] {
        let brute = brute_force_stable(g, n);
        let (dims, codes) = library_codes(g, n);
        assert_eq!(dims, dims_of(&brute), "({g},{n})");
        assert_eq!(codes, support::codes(&brute), "({g},{n})");
    }
}

#[test]
fn forgetful_lift_matches_enumeration() {
    for (g, n) in [(1, 3), (1, 4), (2, 2), (2, 3), (2, 4)] {
        let lifted = forgetful_lift(&brute_force_stable(g, n - 1));
        let (dims, codes) = library_codes(g, n);
        assert_eq!(dims, dims_of(&lifted), "({g},{n})");
        assert_eq!(codes, support::codes(&lifted), "({g},{n})");
    }
}

#[test]
fn correlators_match_dvv() {
    assert_eq!(dvv(1, &[1]), tropmoduli::rational::frac(1, 24));
    for n in 3..=7 {
        for a in compositions(n, n as u32 - 3) {
            let key = CorrelatorKey::new(0, a.clone()).unwrap();
            assert_eq!(correlator(&key).unwrap(), dvv(0, &a), "genus 0 {a:?}");
        }
    }
    for n in 1..=5 {
        for a in compositions(n, n as u32) {
            let key = CorrelatorKey::new(1, a.clone()).unwrap();
            assert_eq!(correlator(&key).unwrap(), dvv(1, &a), "genus 1 {a:?}");
        }
    }
}

#[test]
fn pseudostable_subcomplex_matches_tail_free_graphs() {
    for (g, n) in [(1, 2), (1, 3), (1, 4), (2, 1), (2, 2), (2, 3)] {
        let brute = brute_force_stable(g, n);
        let expected: HashSet<Vec<u32>> =
            brute.iter().filter(|(_, gr)| support::has_no_elliptic_tail(gr)).map(|(k, _)| k.clone()).collect();
        let ps = enumerate_stable(g, n).unwrap().pseudostable_subcomplex().unwrap();
        let got: HashSet<Vec<u32>> = ps.cones().iter().map(|c| support::brute_code(c.graph())).collect();
        assert_eq!(got, expected, "({g},{n})");
    }
}
