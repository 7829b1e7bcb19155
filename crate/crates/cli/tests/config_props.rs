use nsrg_cli::config::{FieldSpec, ForcingConfig, ModeSpec, SchemeName};
use nsrg_cli::RunConfig;
use proptest::prelude::*;

fn field() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![
        Just(FieldSpec::Zero),
        (-10.0..10.0f64).prop_map(|amplitude| FieldSpec::TaylorGreen { amplitude }),
        (0.0..5.0f64, 0.0..3.0f64, 1.0..4.0f64, proptest::option::of(any::<u64>())).prop_map(
            |(amplitude, slope, cutoff, seed)| FieldSpec::Random {
                amplitude,
                slope,
                cutoff,
                seed
            }
        ),
        (0.0..2.0f64, 0.0..1.0f64, proptest::option::of(any::<u64>())).prop_map(
            |(amplitude, perturbation, seed)| FieldSpec::PerturbedTaylorGreen {
                amplitude,
                perturbation,
                slope: 1.0,
                cutoff: 2.0,
                seed
            }
        ),
        prop::collection::vec(
            (prop::collection::vec(-3i64..=3, 2), prop::collection::vec(any::<[f64; 2]>()
                .prop_filter("finite", |c| c.iter().all(|x| x.is_finite())), 2)),
            0..3
        )
        .prop_map(|m| FieldSpec::Modes {
            modes: m.into_iter().map(|(k, coeff)| ModeSpec { k, coeff }).collect()
        }),
    ]
}

fn forcing() -> impl Strategy<Value = ForcingConfig> {
    prop_oneof![
        Just(ForcingConfig::Zero),
        field().prop_map(|field| ForcingConfig::Steady { field }),
        (field(), -5.0..5.0f64).prop_map(|(field, omega)| ForcingConfig::TimeHarmonic { field, omega }),
        prop::collection::vec((0.0..1.0f64, field()), 1..3).prop_map(|v| {
            let (times, fields) = v.into_iter().unzip();
            ForcingConfig::Snapshots { times, fields }
        }),
    ]
}

fn scheme() -> impl Strategy<Value = SchemeName> {
    prop_oneof![
        Just(SchemeName::IfRk4),
        Just(SchemeName::IfEuler),
        Just(SchemeName::GalerkinOde),
        Just(SchemeName::Picard),
    ]
}

prop_compose! {
    fn run_config()(
        dim in 2usize..=3, modes_per_axis in 2usize..64, nu in 0.0..10.0f64, epsilon in 0.0..1.0f64,
        m in 1u32..4, dt in 1e-6..1.0f64, horizon in 0.0..10.0f64, scheme in scheme(),
        nonlinearity in any::<bool>(), forcing in forcing(), snapshot_stride in 1usize..100,
        seed in any::<u64>(), output_dir in proptest::option::of("[a-z]{1,8}(/[a-z]{1,8})?"),
        initial in field(), pad_factor in 1.5..3.0f64,
    ) -> RunConfig {
        RunConfig {
            dim, modes_per_axis, nu, epsilon, m, dt, horizon, scheme, nonlinearity, forcing,
            snapshot_stride, seed, output_dir: output_dir.map(Into::into), initial, pad_factor,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_serialize_parse_is_identity(c in run_config()) {
        let once = RunConfig::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(&once, &c);
        let twice = RunConfig::from_json(&once.to_json()).unwrap();
        prop_assert_eq!(twice, once);
    }
}
