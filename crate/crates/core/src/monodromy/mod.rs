//! Local monodromy groups of branch points, certified by tracking fiber roots
//! around each branch point of a line section, plus the `S3` relation
//! arithmetic that selects which `A_m` germs carry an `S3` cover.
//!
//! Only conjugation-invariant data is certified: cycle types, group order,
//! and whether the generators commute.

pub mod perm;
pub mod tracking;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use perm::{
    admissible_set, generate_group, presentation_admissible, GroupDescriptor, IsoClass, Permutation,
};
pub use tracking::{track_fiber, FiberModel, Loop, ModelKind, Track, TrackError, TrackingParams};

/// Generators from one loop per branch point and the group they generate.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMonodromy {
    pub generators: Vec<Permutation>,
    pub descriptor: GroupDescriptor,
    pub max_residual: f64,
    pub steps: usize,
}

pub fn local_monodromy_group(
    model: &FiberModel,
    params: &TrackingParams,
) -> Result<LocalMonodromy, TrackError> {
    model.validate()?;
    let clearance = model.default_clearance();
    let tracks: Vec<Track> = model
        .standard_loops()
        .par_iter()
        .map(|lp| track_fiber(model, lp, params, clearance))
        .collect::<Result<_, _>>()?;
    let generators: Vec<Permutation> = tracks.iter().map(|t| t.permutation.clone()).collect();
    Ok(LocalMonodromy {
        descriptor: GroupDescriptor::of(&generators),
        max_residual: tracks.iter().map(|t| t.max_residual).fold(0.0, f64::max),
        steps: tracks.iter().map(|t| t.steps).sum(),
        generators,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub passed: bool,
}

/// Machine-readable monodromy certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub model: String,
    pub generators: Vec<String>,
    pub group: IsoClass,
    pub order: usize,
    pub generator_cycle_types: Vec<Vec<usize>>,
    pub max_residual: f64,
    pub checks: Vec<NamedCheck>,
    pub certified: bool,
}

pub fn model_name(kind: ModelKind) -> String {
    match kind {
        ModelKind::Smooth2 => "smooth2".to_string(),
        ModelKind::S2Pair(k) => format!("s2pair(k={k})"),
        ModelKind::S3Cover(n) => format!("s3(n={n})"),
    }
}

/// Tracks the model, checks the group expected for its kind, and repeats the
/// computation with half the step size to confirm the generators are stable.
pub fn certify(model: &FiberModel, params: &TrackingParams) -> Result<MonodromyReport, TrackError> {
    let run = local_monodromy_group(model, params)?;
    let refined = local_monodromy_group(model, &params.halved())?;
    let gens = &run.generators;

    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool| {
        checks.push(NamedCheck {
            name: name.to_string(),
            passed,
        })
    };
    push(
        "step_halving_invariant",
        refined.generators == run.generators,
    );
    push(
        "newton_residual",
        run.max_residual.max(refined.max_residual) < params.newton_tol,
    );
    push(
        "generators_are_transpositions",
        gens.iter().all(Permutation::is_transposition),
    );
    match model.kind {
        ModelKind::Smooth2 => {
            push("one_generator", gens.len() == 1);
            push(
                "group_Z2",
                run.descriptor.iso_class == IsoClass::Z2 && run.descriptor.order == 2,
            );
        }
        ModelKind::S2Pair(_) => {
            let pair_ok = gens.len() == 2;
            push("two_generators", pair_ok);
            push("disjoint", pair_ok && gens[0].is_disjoint_from(&gens[1]));
            push("commute", pair_ok && gens[0].commutes_with(&gens[1]));
            push(
                "group_Z2xZ2",
                run.descriptor.iso_class == IsoClass::Z2xZ2 && run.descriptor.order == 4,
            );
        }
        ModelKind::S3Cover(_) => {
            let pair_ok = gens.len() == 2;
            push("two_generators", pair_ok);
            push("distinct", pair_ok && gens[0] != gens[1]);
            push("non_commuting", pair_ok && !gens[0].commutes_with(&gens[1]));
            push(
                "product_order_3",
                pair_ok && gens[0].then(&gens[1]).order() == 3,
            );
            push(
                "group_S3",
                run.descriptor.iso_class == IsoClass::S3 && run.descriptor.order == 6,
            );
        }
    }
    let certified = checks.iter().all(|c| c.passed);
    Ok(MonodromyReport {
        model: model_name(model.kind),
        generators: gens.iter().map(ToString::to_string).collect(),
        group: run.descriptor.iso_class,
        order: run.descriptor.order,
        generator_cycle_types: run.descriptor.generator_cycle_types,
        max_residual: run.max_residual.max(refined.max_residual),
        checks,
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn params() -> TrackingParams {
        TrackingParams::default()
    }

    #[test]
    fn s3_cover_branch_loops_are_transpositions() {
        let m = FiberModel::s3_cover(1);
        let loops = m.standard_loops();
        let clearance = m.default_clearance();
        let plus = track_fiber(&m, &loops[1], &params(), clearance).unwrap();
        assert!(plus.permutation.is_transposition());
        let finer = track_fiber(&m, &loops[1], &params().halved(), clearance).unwrap();
        assert_eq!(finer.permutation, plus.permutation);
    }

    #[test]
    fn big_circle_is_a_three_cycle() {
        let m = FiberModel::s3_cover(1);
        let origin = Complex64::new(0.0, 0.0);
        let big = Loop::around(origin, origin, 10.0);
        let t = track_fiber(&m, &big, &params(), 1.0).unwrap();
        assert_eq!(t.permutation.cycle_type(), vec![3]);
    }

    #[test]
    fn composition_and_reversal() {
        let m = FiberModel::s3_cover(2);
        let loops = m.standard_loops();
        let cl = m.default_clearance();
        let a = track_fiber(&m, &loops[0], &params(), cl)
            .unwrap()
            .permutation;
        let b = track_fiber(&m, &loops[1], &params(), cl)
            .unwrap()
            .permutation;
        let ab = track_fiber(&m, &loops[0].concat(&loops[1]), &params(), cl)
            .unwrap()
            .permutation;
        assert_eq!(ab, a.then(&b));
        let rev = track_fiber(&m, &loops[0].reversed(), &params(), cl)
            .unwrap()
            .permutation;
        assert_eq!(rev, a.inverse());
    }

    #[test]
    fn group_examples() {
        let g = local_monodromy_group(&FiberModel::s3_cover(1), &params()).unwrap();
        assert_eq!(
            (g.descriptor.order, g.descriptor.iso_class),
            (6, IsoClass::S3)
        );
        let g = local_monodromy_group(&FiberModel::s2_pair(2), &params()).unwrap();
        assert_eq!(
            (g.descriptor.order, g.descriptor.iso_class),
            (4, IsoClass::Z2xZ2)
        );
        let g = local_monodromy_group(&FiberModel::smooth2(), &params()).unwrap();
        assert_eq!(
            (g.descriptor.order, g.descriptor.iso_class),
            (2, IsoClass::Z2)
        );
    }

    #[test]
    fn certificate_json() {
        let r = certify(&FiberModel::s3_cover(1), &params()).unwrap();
        assert!(r.certified, "{:?}", r.checks);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["group"], "S3");
        assert_eq!(v["order"], 6);
        assert_eq!(v["generators"].as_array().unwrap().len(), 2);
    }
}
