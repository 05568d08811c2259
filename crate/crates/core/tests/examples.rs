macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/examples/",
                stringify!($name),
                ".rs"
            ));
        }
    };
}

example!(two_box);
example!(bump_disk);
example!(neumann_boundary);
example!(nonattainment);
example!(slater);
example!(beta_sweep);
example!(alpha_path);

#[test]
fn two_box_example_runs() {
    let dir = tempfile::tempdir().unwrap();
    two_box::run(16, dir.path().join("out")).unwrap();
    assert!(dir.path().join("out").join("control.csv").is_file());
}

#[test]
fn bump_disk_example_runs() {
    bump_disk::run(16).unwrap();
}

#[test]
fn neumann_boundary_example_runs() {
    neumann_boundary::run(16).unwrap();
}

#[test]
fn nonattainment_example_runs() {
    nonattainment::run(32).unwrap();
}

#[test]
fn slater_example_runs() {
    slater::run(16).unwrap();
}

#[test]
fn beta_sweep_example_runs() {
    beta_sweep::run(16).unwrap();
}

#[test]
fn alpha_path_example_runs() {
    alpha_path::run(16).unwrap();
}
