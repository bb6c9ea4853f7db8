use proptest::prelude::*;
use qcarpet::render::{
    grid_to_csv, parse_grid_csv, pgm_bytes, read_grid_csv, write_csv, write_pgm, write_png,
    ColorMap, Palette,
};
use qcarpet::{
    analytic_revival_time, build_mode_set, density_grid, DensityGrid, GridSpec, ModelKind,
    PacketSpec, PhysicalParams,
};

fn fig1c_grid(nz: usize, nt: usize) -> DensityGrid {
    let p = PhysicalParams::new(1.0, 1e-6, 1.0).unwrap();
    let set = build_mode_set(ModelKind::DiracNonRelLimit, &PacketSpec::centered(&p, 1, 20), &p)
        .unwrap();
    let trev = analytic_revival_time(ModelKind::DiracNonRelLimit, &p, set.mean_mode_index()).unwrap();
    density_grid(&set, &GridSpec::new(nz, nt, 1.0, trev, 1.0).unwrap()).unwrap()
}

#[test]
fn grid_independent_of_thread_count() {
    let grid = fig1c_grid(97, 61);
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let again = pool.install(|| fig1c_grid(97, 61));
        assert_eq!(grid.values(), again.values());
    }
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let grid = fig1c_grid(64, 48);
    let cmap = ColorMap::new(Palette::Viridis, 0.5).unwrap();
    for name in ["a", "b"] {
        write_pgm(&grid, 0.5, dir.path().join(format!("{name}.pgm"))).unwrap();
        write_png(&grid, &cmap, dir.path().join(format!("{name}.png"))).unwrap();
        write_csv(&grid, dir.path().join(format!("{name}.csv"))).unwrap();
    }
    for ext in ["pgm", "png", "csv"] {
        let a = std::fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext}");
    }
    let back = read_grid_csv(dir.path().join("a.csv")).unwrap();
    assert_eq!(back, grid);

    let png = image::open(dir.path().join("a.png")).unwrap().to_rgb8();
    assert_eq!(png.dimensions(), (64, 48));
}

#[test]
fn fig1c_bright_central_ridge() {
    let grid = fig1c_grid(257, 128);
    let bytes = pgm_bytes(&grid, 0.5).unwrap();
    let pixels: Vec<u16> = bytes[bytes.len() - 2 * 257 * 128..]
        .chunks(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();
    let first_row = &pixels[..257];
    let brightest = (0..257).max_by_key(|&j| first_row[j]).unwrap();
    assert_eq!(brightest, 128);
    assert_eq!(first_row[128], 65535);
    assert!(first_row[0] < 1000 && first_row[256] < 1000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_bit_exact(
        values in prop::collection::vec(prop::num::f64::POSITIVE | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL, 12),
        t_max in 1e-3f64..1e3,
        q in 1e-9f64..10.0,
    ) {
        let spec = GridSpec::new(4, 3, t_max, 2.0 / q, 1.0).unwrap();
        let grid = DensityGrid::from_values(spec, ModelKind::KleinGordon, q, values).unwrap();
        let back = parse_grid_csv(&grid_to_csv(&grid)).unwrap();
        for (a, b) in grid.values().iter().zip(back.values()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(back.spec, grid.spec);
        prop_assert_eq!(back.q.to_bits(), grid.q.to_bits());
        prop_assert_eq!(back.model, grid.model);
    }
}
