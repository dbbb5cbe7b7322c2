use sympcrit::flow::{run, FlowConfig};
use sympcrit::presets::{GridSpec, Preset};
use sympcrit_cli::{emit_csv, emit_heatmap, HeatmapField, OutputError, CSV_HEADER};

fn flat_run() -> Vec<sympcrit::flow::DiagnosticsRecord> {
    let s = Preset::Flat.build(&GridSpec::torus(16)).unwrap();
    // the converged test would stop at once; keep stepping to get several rows
    let cfg = FlowConfig { t_end: 0.05, record_every: 1, tol_converged: 0.0, ..FlowConfig::default() };
    run(s, &cfg).unwrap().records
}

#[test]
fn csv_header_and_constant_flat_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let records = flat_run();
    assert!(records.len() > 2);
    emit_csv(&records, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), records.len());
    for r in &rows {
        assert_eq!(r.len(), 9);
        // every column except t is the same on each row
        assert_eq!(r[1..], rows[0][1..]);
    }
}

#[test]
fn empty_records_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(emit_csv(&[], &dir.path().join("x.csv")), Err(OutputError::Empty)));
}

#[test]
fn io_errors_name_the_path() {
    let err = emit_csv(&flat_run(), std::path::Path::new("/nonexistent/dir/d.csv")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/dir/d.csv"), "{err}");
}

fn read_ppm(path: &std::path::Path) -> (usize, usize, Vec<u8>) {
    let bytes = std::fs::read(path).unwrap();
    let header_end = bytes.iter().enumerate().filter(|(_, b)| **b == b'\n').nth(2).unwrap().0 + 1;
    let header = std::str::from_utf8(&bytes[..header_end]).unwrap();
    let tok: Vec<&str> = header.split_whitespace().collect();
    assert_eq!(tok[0], "P6");
    assert_eq!(tok[3], "255");
    (tok[1].parse().unwrap(), tok[2].parse().unwrap(), bytes[header_end..].to_vec())
}

#[test]
fn flat_cos_alpha_heatmap_is_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let s = Preset::Flat.build(&GridSpec::torus(16)).unwrap();
    let path = dir.path().join("cos.ppm");
    let (lo, hi) = emit_heatmap(&s, HeatmapField::CosAlpha, &path).unwrap();
    assert_eq!((lo, hi), (1.0, 1.0));
    let (w, h, px) = read_ppm(&path);
    assert_eq!((w, h), (16, 16));
    assert_eq!(px.len(), 3 * 16 * 16);
    assert!(px.iter().all(|&b| b == px[0]));
    let side = std::fs::read_to_string(dir.path().join("cos.ppm.range.txt")).unwrap();
    assert_eq!(side, "field=cos_alpha\nmin=1\nmax=1\n");
}

#[test]
fn heatmap_spans_the_gray_range() {
    let dir = tempfile::tempdir().unwrap();
    let p = Preset::PerturbedTorus { eps: 0.1, eps_g: 0.05, kx: 1, ky: 1 };
    let s = p.build(&GridSpec { nx: 24, ny: 12, ..GridSpec::torus(24) }).unwrap();
    for field in HeatmapField::ALL {
        let path = dir.path().join(format!("{field}.ppm"));
        let (lo, hi) = emit_heatmap(&s, field, &path).unwrap();
        assert!(lo < hi, "{field}");
        let (w, h, px) = read_ppm(&path);
        assert_eq!((w, h), (24, 12));
        assert_eq!(px.iter().copied().min(), Some(0));
        assert_eq!(px.iter().copied().max(), Some(255));
        assert!(px.chunks(3).all(|c| c[0] == c[1] && c[1] == c[2]));
    }
}

#[test]
fn field_names_round_trip() {
    for f in HeatmapField::ALL {
        assert_eq!(f.to_string().parse::<HeatmapField>().unwrap(), f);
    }
    assert!("curvature".parse::<HeatmapField>().is_err());
}
