use proptest::prelude::*;
use torsionlab_core::novikov::NovikovElement;
use torsionlab_core::rational::{q, qi, Extended, Q};
use torsionlab_core::toric::{self, FiberPoint, MomentModel};
use torsionlab_core::valmat;

fn spheres(areas: &[Q]) -> MomentModel {
    let parts: Vec<_> = areas.iter().map(|a| MomentModel::sphere(a.clone()).unwrap()).collect();
    MomentModel::product(&parts).unwrap()
}

/// Sphere areas in `1..=6` and interior positions on a 1/4 grid.
fn sphere_fibers() -> impl Strategy<Value = (Vec<Q>, Vec<Q>)> {
    prop::collection::vec((1i64..=6, 1i64..=23), 1..=3).prop_map(|pairs| {
        pairs
            .into_iter()
            .map(|(a, p)| {
                let area = qi(a);
                let steps = 4 * a - 1;
                (area, q(1 + (p - 1) % steps, 4))
            })
            .unzip()
    })
}

fn min_nonzero_valuation(w: &[NovikovElement]) -> Extended {
    w.iter().map(NovikovElement::valuation).min().unwrap_or(Extended::Infinity)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn koszul_model_properties((areas, u) in sphere_fibers()) {
        let m = spheres(&areas);
        let u = FiberPoint(u);
        // construction re-checks d∘d = 0 up to truncation
        let model = toric::floer_model(&m, &u).unwrap();
        let dec = valmat::decompose_total(&model.complex).unwrap();
        let threshold = valmat::torsion_threshold(&dec);
        prop_assert!(threshold >= min_nonzero_valuation(&model.w));
        prop_assert_eq!(dec.betti > 0, model.w_is_zero());
        if model.w_is_zero() {
            prop_assert_eq!(dec.betti, 1usize << m.dim());
        }
    }

    #[test]
    fn threshold_is_translation_invariant((areas, u) in sphere_fibers(), shift in prop::collection::vec(-8i64..=8, 3)) {
        let m = spheres(&areas);
        let shift: Vec<Q> = shift[..m.dim()].iter().map(|s| q(*s, 3)).collect();
        let moved = m.translated(&shift);
        let u2: Vec<Q> = u.iter().zip(&shift).map(|(a, b)| a + b).collect();
        prop_assert_eq!(
            toric::torsion_threshold_at(&moved, &FiberPoint(u2)).unwrap(),
            toric::torsion_threshold_at(&m, &FiberPoint(u)).unwrap()
        );
    }
}

#[test]
fn refinement_is_monotone() {
    let models = [
        spheres(&[qi(1), qi(2)]),
        spheres(&[q(3, 2), qi(5)]),
        MomentModel::projective_space(2, qi(3)).unwrap(),
    ];
    for m in &models {
        let mut last = Extended::Finite(qi(-1));
        for res in [2, 4, 8] {
            let opt = toric::optimize_threshold(m, res, None).unwrap();
            assert!(opt.threshold >= last, "resolution {res} lowered the threshold");
            last = opt.threshold;
        }
    }
}

#[test]
fn projective_plane_center_is_nondisplaceable() {
    let m = MomentModel::projective_space(2, qi(3)).unwrap();
    let opt = toric::optimize_threshold(&m, 3, None).unwrap();
    assert_eq!(opt.point, FiberPoint(vec![qi(1), qi(1)]));
    assert_eq!(opt.threshold, Extended::Infinity);
}
