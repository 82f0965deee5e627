//! End-to-end CLI behaviour: exit codes, file round trips, manifest reruns.

use cgsp::cli::{run, EXIT_INFEASIBLE, EXIT_IO, EXIT_OK, EXIT_USAGE};
use cgsp::io::read_dataset;

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_4() {
    assert_eq!(run(["cgsp", "no-such-command"]), EXIT_USAGE);
    assert_eq!(run(["cgsp", "generate", "--length"]), EXIT_USAGE);
    // missing required flag surfaces as a usage problem
    let dir = tmp();
    let out = dir.path().join("x");
    assert_eq!(
        run(["cgsp", "generate", "--out", path_str(&out)]),
        EXIT_USAGE
    );
    assert_eq!(run(["cgsp", "reproduce", "fig9"]), EXIT_USAGE);
    assert_eq!(
        run(["cgsp", "reproduce", "fig2", "--scale", "full"]),
        EXIT_USAGE
    );
    assert_eq!(run(["cgsp", "--help"]), EXIT_OK);
}

#[test]
fn io_errors_exit_3() {
    let dir = tmp();
    let missing = dir.path().join("nope").join("data.cgsp");
    assert_eq!(
        run(["cgsp", "estimate", "--input", path_str(&missing)]),
        EXIT_IO
    );
}

#[test]
fn infeasible_generate_exits_2() {
    let dir = tmp();
    let out = dir.path().join("run");
    let code = run([
        "cgsp",
        "generate",
        "--length",
        "4096",
        "--family",
        "power-law",
        "--gxx",
        "0.7",
        "--gyy",
        "0.8",
        "--gxy",
        "0.6",
        "--cross-scale",
        "1.0",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, EXIT_INFEASIBLE);
}

#[test]
fn generate_estimate_round_trip() {
    let dir = tmp();
    let out = dir.path().join("run");
    let code = run([
        "cgsp",
        "generate",
        "--length",
        "4096",
        "--family",
        "power-law",
        "--gxx",
        "0.7",
        "--gyy",
        "0.8",
        "--gxy",
        "0.6",
        "--samples",
        "10",
        "--seed",
        "42",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, EXIT_OK);

    // data re-read is bit-identical to an in-memory regeneration
    let data = read_dataset(&out.join("data.cgsp")).unwrap();
    assert_eq!(data.pairs.len(), 10);
    let grid = cgsp::grid::FrequencyGrid::new(4096, 1).unwrap();
    let models = cgsp::model::TargetModels::new(
        cgsp::model::CorrelationModel::power_law(0.7, 1.0).unwrap(),
        cgsp::model::CorrelationModel::power_law(0.8, 1.0).unwrap(),
        cgsp::model::CorrelationModel::power_law(0.6, 1.0).unwrap(),
    )
    .unwrap();
    let unit = cgsp::spectrum::SpectralTriple::from_models(
        &models,
        &grid,
        cgsp::spectrum::SpectralPath::Fft,
    )
    .unwrap();
    let scale = (0.999 * unit.max_cross_scale()).min(1.0);
    let triple = cgsp::spectrum::SpectralTriple::from_models(
        &models.scale_cross(scale),
        &grid,
        cgsp::spectrum::SpectralPath::Fft,
    )
    .unwrap();
    let plan = cgsp::synth::SynthesisPlan::new(triple).unwrap();
    let pair = plan.synthesize_indexed(42, 3).unwrap();
    let bits = |v: &[f64]| -> Vec<u64> { v.iter().map(|x| x.to_bits()).collect() };
    assert_eq!(bits(&data.pairs[3].0), bits(&pair.x));
    assert_eq!(bits(&data.pairs[3].1), bits(&pair.y));

    let est_out = dir.path().join("est");
    let code = run([
        "cgsp",
        "estimate",
        "--input",
        path_str(&out),
        "--fit-min",
        "2",
        "--fit-max",
        "64",
        "--out",
        path_str(&est_out),
    ]);
    assert_eq!(code, EXIT_OK);
    for file in [
        "cxx.csv",
        "cyy.csv",
        "cxy.csv",
        "coherence.csv",
        "fits.csv",
        "report.txt",
    ] {
        assert!(est_out.join(file).exists(), "missing {file}");
    }
    let fits = std::fs::read_to_string(est_out.join("fits.csv")).unwrap();
    assert!(
        fits.lines().count() >= 4,
        "three fitted curves expected:\n{fits}"
    );
    let report = std::fs::read_to_string(est_out.join("report.txt")).unwrap();
    assert!(report.contains("gamma_xx"), "{report}");
}

#[test]
fn manifest_rerun_is_bit_identical() {
    let dir = tmp();
    let run1 = dir.path().join("run1");
    let code = run([
        "cgsp",
        "generate",
        "--length",
        "1024",
        "--coupling",
        "damped-harmonic",
        "--samples",
        "3",
        "--seed",
        "9",
        "--cumulate",
        "--out",
        path_str(&run1),
    ]);
    assert_eq!(code, EXIT_OK);

    let run2 = dir.path().join("run2");
    let manifest = run1.join("manifest.cgsp");
    let code = run([
        "cgsp",
        "generate",
        "--config",
        path_str(&manifest),
        "--out",
        path_str(&run2),
    ]);
    assert_eq!(code, EXIT_OK);
    let a = std::fs::read(run1.join("data.cgsp")).unwrap();
    let b = std::fs::read(run2.join("data.cgsp")).unwrap();
    assert_eq!(a, b);
    let a = std::fs::read(run1.join("trajectories.cgsp")).unwrap();
    let b = std::fs::read(run2.join("trajectories.cgsp")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn csv_format_and_flag_override() {
    let dir = tmp();
    let out = dir.path().join("csvrun");
    let config = dir.path().join("cfg.txt");
    std::fs::write(
        &config,
        "length = 512\ncoupling = gaussian\nsamples = 2\nseed = 3\n",
    )
    .unwrap();
    let code = run([
        "cgsp",
        "generate",
        "--config",
        path_str(&config),
        "--format",
        "csv",
        "--samples",
        "1",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, EXIT_OK);
    // the flag overrides the config's sample count
    assert!(out.join("data_r0000.csv").exists());
    assert!(!out.join("data_r0001.csv").exists());
    let text = std::fs::read_to_string(out.join("data_r0000.csv")).unwrap();
    assert!(text.starts_with("index,x,y"));
    assert_eq!(text.lines().count(), 513);
}

#[test]
fn field_generation_with_surfaces() {
    let dir = tmp();
    let out = dir.path().join("field");
    let code = run([
        "cgsp",
        "generate",
        "--length",
        "32",
        "--dim",
        "2",
        "--family",
        "power-law",
        "--gxx",
        "0.7",
        "--gyy",
        "1.5",
        "--gxy",
        "1.0",
        "--samples",
        "2",
        "--seed",
        "11",
        "--surface",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code, EXIT_OK);
    let data = read_dataset(&out.join("data.cgsp")).unwrap();
    assert_eq!(data.dim, 2);
    assert_eq!(data.shape, vec![32, 32]);
    let surf = read_dataset(&out.join("surfaces.cgsp")).unwrap();
    assert_eq!(surf.pairs.len(), 2);
    // estimate on a field dataset produces radial curves
    let code = run(["cgsp", "estimate", "--input", path_str(&out), "--no-fit"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.join("cxx.csv").exists());
}

#[test]
fn indefinite_tabulated_target_is_rejected() {
    let dir = tmp();
    let table = dir.path().join("bad.txt");
    // a spike at lag 1 larger than the zero-lag value is indefinite
    let mut rows = vec!["1.0".to_string(), "2.5".to_string()];
    rows.extend(std::iter::repeat_n("0".to_string(), 15));
    std::fs::write(&table, rows.join("\n")).unwrap();
    let code = run([
        "cgsp",
        "validate",
        "--length",
        "32",
        "--family",
        "tabulated",
        "--table-xx",
        path_str(&table),
        "--table-yy",
        path_str(&table),
        "--table-xy",
        path_str(&table),
    ]);
    assert_eq!(code, EXIT_INFEASIBLE);
}

#[test]
fn out_dir_env_variable_is_honored() {
    let dir = tmp();
    let out = dir.path().join("from-env");
    std::env::set_var(cgsp::cli::OUT_DIR_ENV, &out);
    let code = run([
        "cgsp",
        "generate",
        "--length",
        "256",
        "--coupling",
        "exponential",
        "--seed",
        "5",
    ]);
    std::env::remove_var(cgsp::cli::OUT_DIR_ENV);
    assert_eq!(code, EXIT_OK);
    assert!(out.join("data.cgsp").exists());
    assert!(out.join("manifest.cgsp").exists());
}
