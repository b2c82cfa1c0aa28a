mod crude_mc {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/crude_mc.rs"));
}
mod importance_sampling {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/importance_sampling.rs"
    ));
}
mod kriging_fit {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/kriging_fit.rs"
    ));
}
mod classification {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/classification.rs"
    ));
}
mod slice_sampler {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/slice_sampler.rs"
    ));
}
mod kmeans {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/kmeans.rs"));
}
mod refine_parabola {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/refine_parabola.rs"
    ));
}

#[test]
fn crude_mc_example_runs() {
    let r = crude_mc::run_example().unwrap();
    assert!(r.estimate > 0.0);
}

#[test]
fn importance_sampling_example_runs() {
    let r = importance_sampling::run_example().unwrap();
    assert!(r.cov.unwrap() < 0.1);
}

#[test]
fn kriging_fit_example_runs() {
    assert_eq!(kriging_fit::run_example().unwrap().doe().len(), 20);
}

#[test]
fn classification_example_runs() {
    let mut out = Vec::new();
    classification::run_example(&mut out, 5).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), 26);
}

#[test]
fn slice_sampler_example_runs() {
    assert_eq!(slice_sampler::run_example().unwrap().samples.len(), 20_000);
}

#[test]
fn kmeans_example_runs() {
    assert_eq!(kmeans::run_example().unwrap().len(), 3);
}

#[test]
fn refine_parabola_example_runs() {
    let (model, _) = refine_parabola::run_example().unwrap();
    assert_eq!(model.doe().len(), 60);
}
