use std::f64::consts::TAU;

use sympcrit::DomainMode;
use sympcrit_cli::{parse_config, ConfigError, RunConfig};

#[test]
fn defaults_fill_omitted_keys() {
    let c = parse_config("preset=flat\nnx=64\nny=64").unwrap();
    let d = RunConfig::default();
    assert_eq!(c, d);
    assert_eq!(c.domain_mode, DomainMode::PeriodicTorus);
    assert!((c.hx - TAU / 64.0).abs() < 1e-15);
}

#[test]
fn negative_size_names_the_field() {
    match parse_config("nx=-3") {
        Err(ConfigError::Validation { field, .. }) => assert_eq!(field, "nx"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn perturbation_amplitude_is_read() {
    let c = parse_config("preset=perturbed_torus\neps=0.05").unwrap();
    assert_eq!(c.preset, "perturbed_torus");
    assert_eq!(c.eps, 0.05);
    assert!(matches!(
        c.preset(),
        sympcrit::presets::Preset::PerturbedTorus { eps, .. } if eps == 0.05
    ));
}

#[test]
fn comments_blank_lines_and_spaces() {
    let text = "# header\n\n  nx = 32   # trailing\nny=16\npreset = random_fourier\nseed=9\n";
    let c = parse_config(text).unwrap();
    assert_eq!((c.nx, c.ny, c.seed), (32, 16, 9));
    assert!((c.hy - TAU / 16.0).abs() < 1e-15);
}

#[test]
fn patch_spacing_default() {
    let c = parse_config("domain_mode=patch\nnx=11\nny=21").unwrap();
    assert_eq!(c.domain_mode, DomainMode::OpenPatch);
    assert!((c.hx - 0.1).abs() < 1e-15 && (c.hy - 0.05).abs() < 1e-15);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let cases = [
        ("nx=64\nbogus=1", 2),
        ("nx=64\nny=64\njust text", 3),
        ("nx=sixty", 1),
        ("dt_factor=0.1\ndt_factor=0.2", 2),
        ("domain_mode=sphere", 1),
    ];
    for (text, want) in cases {
        match parse_config(text) {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, want, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn validation_names_each_field() {
    let cases = [
        ("ny=2", "ny"),
        ("hx=0", "hx"),
        ("hy=-1", "hy"),
        ("preset=sphere", "preset"),
        ("eps=-0.1", "eps"),
        ("dt_factor=0", "dt_factor"),
        ("t_end=-1", "t_end"),
        ("record_every=0", "record_every"),
        ("samples=0", "samples"),
        ("preset=from_file", "file"),
        ("kx=0", "kx"),
        ("power=0", "power"),
        ("amplitude=-1", "amplitude"),
    ];
    for (text, want) in cases {
        match parse_config(text) {
            Err(ConfigError::Validation { field, .. }) => assert_eq!(field, want, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn refined_patch_keeps_its_rectangle() {
    let c = parse_config("domain_mode=patch\nnx=9\nny=9\nhx=0.25\nhy=0.25").unwrap();
    let g = c.refined_grid(2);
    assert_eq!((g.nx, g.ny), (17, 17));
    assert!(((g.nx - 1) as f64 * g.hx - 2.0).abs() < 1e-15);
    let t = parse_config("nx=16\nny=16").unwrap().refined_grid(4);
    assert_eq!(t.nx, 64);
    assert!((t.nx as f64 * t.hx - TAU).abs() < 1e-12);
}
