//! Property checks for surfaces and curve surgery: intersection growth under
//! twisting, the signed pairing rule, order independence of bigon reduction,
//! and conservation of the total Euler measure.

use num_traits::Zero;
use qfloer::curve::{standard, Curve};
use qfloer::geom::{qi, Q};
use qfloer::moves;
use qfloer::overlay::{build_overlay, Overlay};
use qfloer::surface::{build_standard_surface, CombinatorialSurface, Layout};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn torus_with_probes() -> (CombinatorialSurface, Curve, Curve) {
    let mut s = build_standard_surface(1, 0).unwrap();
    let ids = match &s.layout {
        Layout::Closed(ids) => ids.clone(),
        _ => panic!("expected the polygon layout"),
    };
    let mut probe_a = standard::polygon_a(&ids, 0, 11);
    probe_a.name = "probe_a".into();
    let mut probe_b = standard::polygon_b(&ids, 0, 13);
    probe_b.name = "probe_b".into();
    s.add_curve(probe_a.clone()).unwrap();
    s.add_curve(probe_b.clone()).unwrap();
    (s, probe_a, probe_b)
}

#[test]
fn twisting_a_meridian_n_times_meets_a_longitude_n_times() {
    let (s, _, probe_b) = torus_with_probes();
    for n in 1..=5 {
        let tw = s.apply_twist("b1", &[("a1".into(), n)]).unwrap();
        let count = s.geometric_intersection_number(&tw, &probe_b).unwrap();
        assert_eq!(count as i64, n, "twist power {}", n);
    }
}

#[test]
fn twisting_changes_pairings_by_the_intersection_rule() {
    // (surface, base x, guide c, probe y, power): after twisting x along c,
    // the pairing with y must move by <x,c><c,y>, and the geometric count
    // must dominate the pairing.
    let torus = build_standard_surface(1, 0).unwrap();
    let genus2 = build_standard_surface(2, 0).unwrap();
    let ring = build_standard_surface(1, 2).unwrap();
    let triples: Vec<(&CombinatorialSurface, &str, &str, &str, i64)> = vec![
        (&torus, "b1", "a1", "a1", 1),
        (&torus, "b1", "a1", "a1", -1),
        (&torus, "b1", "a1", "a1", 2),
        (&torus, "b1", "a1", "a1", -2),
        (&torus, "a1", "b1", "b1", 1),
        (&torus, "a1", "b1", "b1", -1),
        (&genus2, "b1", "a1", "a1", 1),
        (&genus2, "a2", "b2", "b2", -1),
        (&genus2, "b1", "a1", "a2", 2),
        (&genus2, "b2", "a2", "a1", -2),
        (&genus2, "b1", "a2", "a2", 3),
        (&ring, "b1", "a1", "a1", 1),
        (&ring, "b1", "a1", "a1", -1),
        (&ring, "a1", "b1", "b1", 2),
    ];
    assert!(triples.len() >= 10);
    for (s, x, c, y, power) in triples {
        let xc = s.pairing(s.curve(x).unwrap(), s.curve(c).unwrap()).unwrap();
        let cy = if c == y {
            0
        } else {
            s.pairing(s.curve(c).unwrap(), s.curve(y).unwrap()).unwrap()
        };
        let xy = if x == y {
            0
        } else {
            s.pairing(s.curve(x).unwrap(), s.curve(y).unwrap()).unwrap()
        };
        let tw = s.apply_twist(x, &[(c.into(), power)]).unwrap();
        let got = s.pairing(&tw, s.curve(y).unwrap()).unwrap();
        let want = xy + power * xc * cy;
        assert_eq!(got, want, "pairing of twist^{}_{}({}) with {}", power, c, x, y);
        let geometric = s.geometric_intersection_number(&tw, s.curve(y).unwrap()).unwrap();
        assert!(
            geometric as i64 >= got.abs(),
            "geometric count {} under pairing {} for twist^{}_{}({}) against {}",
            geometric,
            got,
            power,
            c,
            x,
            y
        );
    }
}

#[test]
fn bigon_reduction_lands_at_the_same_count_in_any_order() {
    // ten curve pairs with removable bigons, each reduced under ten random
    // pick orders; every run must land on the same frozen crossing count
    let (torus, probe_a, probe_b) = torus_with_probes();
    let ring = build_standard_surface(1, 2).unwrap();

    let mut pairs: Vec<(&CombinatorialSurface, Curve, Curve, usize)> = Vec::new();
    for k in [1, 2] {
        let wiggled = torus
            .apply_twist("b1", &[("a1".into(), k), ("a1".into(), -k)])
            .unwrap();
        pairs.push((&torus, wiggled, probe_b.clone(), 0));
    }
    for k in [2, 3, 4] {
        let tw = torus.apply_twist("b1", &[("a1".into(), k)]).unwrap();
        pairs.push((&torus, tw, probe_a.clone(), 1));
    }
    for rounds in [1, 2] {
        let ti = torus.curve_index("b1").unwrap();
        let gi = torus.curve_index("a1").unwrap();
        let wound = moves::wind(&torus.scaffold, &torus.curves, ti, gi, rounds).unwrap();
        pairs.push((&torus, wound, probe_b.clone(), 0));
    }
    for rounds in [1, 2, 3] {
        let ti = ring.curve_index("b1").unwrap();
        let gi = ring.curve_index("a1").unwrap();
        let wound = moves::wind(&ring.scaffold, &ring.curves, ti, gi, rounds).unwrap();
        pairs.push((&ring, wound, ring.curve("eta2").unwrap().clone(), 0));
    }
    assert!(pairs.len() >= 10);

    let mut runs = 0;
    for (i, (s, a, b, want)) in pairs.iter().enumerate() {
        for salt in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + 97 * i as u64 + salt);
            let red = moves::bigon_reduce_with(&s.scaffold, a, b, |n| {
                rng.next_u32() as usize % n
            })
            .unwrap();
            assert_eq!(red.crossings, *want, "pair {} salt {}", i, salt);
            runs += 1;
        }
    }
    assert!(runs >= 100);
}

fn region_euler_sum(ov: &Overlay) -> Q {
    ov.regions.iter().fold(Q::zero(), |acc, r| acc + &r.e)
}

#[test]
fn euler_measures_still_sum_to_chi_after_twisting() {
    for (g, p, base, guide, power) in
        [(1, 0, "b1", "a1", 2), (2, 0, "b2", "a2", -1), (1, 2, "b1", "a1", 1)]
    {
        let s = build_standard_surface(g, p).unwrap();
        let tw = s.apply_twist(base, &[(guide.into(), power)]).unwrap();
        let other = s.curve(guide).unwrap().clone();
        let ov = build_overlay(&s.scaffold, &[tw, other], &[]).unwrap();
        let chi = qi(s.euler_characteristic());
        assert_eq!(region_euler_sum(&ov), chi, "pair overlay on genus {} punctures {}", g, p);

        let family = s.overlay_with(&[]).unwrap();
        assert_eq!(
            region_euler_sum(&family),
            chi,
            "family overlay on genus {} punctures {}",
            g,
            p
        );
    }
}
