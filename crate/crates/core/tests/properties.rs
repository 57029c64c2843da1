use multitest::kfwer::{self, BonferroniFamily, Subset, SubsetIndexedFamily};
use multitest::sim::{self, DiracUniformModel, Execution, GaussianModel, Metric};
use multitest::stepup::{self, Pi0Estimator};
use multitest::{fdp, PValueFamily, Procedure, RejectionSet};
use proptest::prelude::*;

fn pvalues() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..0.02, 0.0f64..=1.0], 2..30)
}

proptest! {
    #[test]
    fn bonferroni_family_is_non_increasing_along_chains(
        values in pvalues(),
        k in 1usize..4,
        alpha in 0.01f64..0.5,
        order in any::<u64>(),
    ) {
        let f = PValueFamily::new(values).unwrap();
        let b = BonferroniFamily::new(k, alpha).unwrap();
        prop_assert!(kfwer::check_non_increasing(&b, &f, 4, order).is_ok());
    }

    #[test]
    fn fwer_procedures_are_nested(values in pvalues(), alpha in 0.01f64..0.5) {
        let f = PValueFamily::new(values).unwrap();
        let m = f.m();
        let bonferroni = RejectionSet::at_threshold(&f, alpha / m as f64);
        let holm = kfwer::holm(&f, alpha).unwrap();
        let bh = stepup::linear_step_up(&f, alpha).unwrap();
        prop_assert!(bonferroni.is_subset_of(&holm));
        prop_assert!(holm.is_subset_of(&bh));
        let g2 = kfwer::generalized_holm(&f, alpha, 2.min(m)).unwrap();
        prop_assert!(holm.is_subset_of(&g2));
    }

    #[test]
    fn step_down_output_contains_single_step(values in pvalues(), k in 1usize..4, alpha in 0.01f64..0.5) {
        let f = PValueFamily::new(values).unwrap();
        let b = BonferroniFamily::new(k, alpha).unwrap();
        let single = b.reject_for(&Subset::full(f.m()), &f);
        let iterates = kfwer::step_down_kfwer_iterates(&b, k, &f).unwrap();
        prop_assert!(iterates.len() <= f.m() + 1);
        for w in iterates.windows(2) {
            prop_assert!(w[1].is_subset_of(&w[0]));
        }
        prop_assert!(single.is_subset_of(&kfwer::step_down_kfwer(&b, k, &f).unwrap()));
    }

    #[test]
    fn lehmann_romano_inside_quantile_binomial(values in pvalues(), gamma in 0.02f64..0.5, alpha in 0.02f64..0.8) {
        let f = PValueFamily::new(values).unwrap();
        let lr = fdp::lehmann_romano(&f, gamma, alpha).unwrap();
        let q = fdp::quantile_binomial(&f, gamma, alpha).unwrap();
        prop_assert!(lr.is_subset_of(&q));
    }
}

#[test]
fn estimates_do_not_depend_on_execution() {
    let model = GaussianModel::new(30, 20, 0.8, 2.0, 9).unwrap();
    let procedures = [
        Procedure::QuantileBinomial { alpha: 0.2, gamma: 0.1 },
        Procedure::Adaptive {
            alpha: 0.1,
            estimator: Pi0Estimator::Quantile { k0: 15 },
        },
        Procedure::GeneralizedHolm { alpha: 0.1, k: 2 },
    ];
    for procedure in procedures {
        let p = procedure.prepare(30).unwrap();
        let run = |execution| {
            sim::estimate(|f| p.rejections(f), Metric::FdpTail(0.1), &model, 3000, execution).unwrap()
        };
        assert_eq!(run(Execution::Sequential), run(Execution::Parallel), "{}", procedure.id());
    }
    let est = Pi0Estimator::Storey { lambda: 0.5 };
    assert_eq!(
        sim::verify_estimator_condition(est, 20, 7, 5000, 3, Execution::Sequential).unwrap(),
        sim::verify_estimator_condition(est, 20, 7, 5000, 3, Execution::Parallel).unwrap()
    );
}

#[test]
fn bh_fdr_is_exactly_pi0_alpha_under_dirac_uniform() {
    // Under the Dirac-uniform configuration BH's FDR equals alpha m0 / m.
    let model = DiracUniformModel::new(20, 8, 21).unwrap();
    let e = sim::estimate(
        |f| stepup::linear_step_up(f, 0.2),
        Metric::Fdr,
        &model,
        100_000,
        Execution::Parallel,
    )
    .unwrap();
    assert!((e.estimate - 0.08).abs() < 4.0 * e.std_error, "{e:?}");
}

#[test]
fn streamlined_controls_kfwer_under_dirac_uniform() {
    let model = DiracUniformModel::new(12, 9, 5).unwrap();
    let b = BonferroniFamily::new(2, 0.2).unwrap();
    let e = sim::estimate(
        |f| kfwer::streamlined_step_down_kfwer(&b, 2, f),
        Metric::Kfwer(2),
        &model,
        20_000,
        Execution::Parallel,
    )
    .unwrap();
    assert!(e.within(0.2, 3.0), "{e:?}");
}
