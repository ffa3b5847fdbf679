//! Every example builds and runs on reduced inputs.

#[allow(dead_code)]
#[path = "../examples/box_symbol_field.rs"]
mod box_symbol_field;
#[allow(dead_code)]
#[path = "../examples/bulk_sine_kernel.rs"]
mod bulk_sine_kernel;
#[allow(dead_code)]
#[path = "../examples/catalan_limit.rs"]
mod catalan_limit;
#[allow(dead_code)]
#[path = "../examples/edge_profiles.rs"]
mod edge_profiles;
#[allow(dead_code)]
#[path = "../examples/moyal_product.rs"]
mod moyal_product;
#[allow(dead_code)]
#[path = "../examples/oscillator_parity.rs"]
mod oscillator_parity;
#[allow(dead_code)]
#[path = "../examples/projection_convergence.rs"]
mod projection_convergence;
#[allow(dead_code)]
#[path = "../examples/sweep_report.rs"]
mod sweep_report;
#[allow(dead_code)]
#[path = "../examples/truncated_momentum.rs"]
mod truncated_momentum;

#[test]
fn box_symbol_field_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.csv");
    box_symbol_field::run(Some(path.clone())).unwrap();
    assert!(std::fs::metadata(path).unwrap().len() > 0);
}

#[test]
fn convergence_examples_run() {
    projection_convergence::run(&[10, 20], 200).unwrap();
    bulk_sine_kernel::run(&[50, 100]).unwrap();
    catalan_limit::run(&[16, 32]).unwrap();
    truncated_momentum::run(&[32, 64]).unwrap();
    edge_profiles::run(100).unwrap();
}

#[test]
fn moyal_and_oscillator_examples_run() {
    moyal_product::run().unwrap();
    oscillator_parity::run().unwrap();
}

#[test]
fn sweep_example_runs() {
    assert!(sweep_report::run(false, Some("box-tridiag-norm")).unwrap());
}
