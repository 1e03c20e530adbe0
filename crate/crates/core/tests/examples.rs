macro_rules! example {
    ($name:ident, $path:literal) => {
        #[path = $path]
        mod $name;
    };
}

example!(bounds_table, "../examples/bounds_table.rs");
example!(gauss_spectrum, "../examples/gauss_spectrum.rs");
example!(verify_gauss, "../examples/verify_gauss.rs");
example!(convergence, "../examples/convergence.rs");
example!(kernel_identity, "../examples/kernel_identity.rs");
example!(custom_operator, "../examples/custom_operator.rs");
example!(weyl_check, "../examples/weyl_check.rs");

#[test]
fn examples_run() {
    bounds_table::run_example().unwrap();
    gauss_spectrum::run_example().unwrap();
    verify_gauss::run_example().unwrap();
    convergence::run_example().unwrap();
    kernel_identity::run_example().unwrap();
    custom_operator::run_example().unwrap();
    weyl_check::run_example().unwrap();
}
