use proptest::prelude::*;

use yamalab_core::io::{load_field, metadata_path, save_field, FieldMeta, RunConfig};
use yamalab_core::verify::{random_field, trial_rng};
use yamalab_core::{Error, Field};

fn bits(f: &Field) -> Vec<u64> {
    f.values().iter().map(|x| x.to_bits()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_then_load_is_bit_exact(seed in any::<u64>(), scale in 1e-300..1e300f64) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.csv");
        let u = random_field(&mut trial_rng(seed, 0)).unwrap().scaled(scale).unwrap();
        save_field(&u, &path).unwrap();
        let v = load_field(&path).unwrap();
        prop_assert_eq!(bits(&u), bits(&v));
        prop_assert_eq!(u.grid().as_ref(), v.grid().as_ref());
    }
}

#[test]
fn files_are_inspectable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let u = random_field(&mut trial_rng(1, 1)).unwrap();
    save_field(&u, &path).unwrap();
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("m_index,cell_index,value\n"));
    assert_eq!(csv.lines().count(), u.grid().len() + 1);
    let meta: FieldMeta =
        serde_json::from_str(&std::fs::read_to_string(metadata_path(&path)).unwrap()).unwrap();
    assert_eq!(meta.rows, u.grid().len());
}

#[test]
fn saving_twice_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let u = random_field(&mut trial_rng(3, 0)).unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    save_field(&u, &a).unwrap();
    save_field(&u, &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(metadata_path(&a)).unwrap(),
        std::fs::read(metadata_path(&b)).unwrap()
    );
}

#[test]
fn shuffled_rows_load_to_the_same_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let u = random_field(&mut trial_rng(5, 0)).unwrap();
    save_field(&u, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[1..].reverse();
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    assert_eq!(load_field(&path).unwrap(), u);
}

#[test]
fn malformed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let u = random_field(&mut trial_rng(6, 0)).unwrap();
    save_field(&u, &path).unwrap();
    let good = std::fs::read_to_string(&path).unwrap();

    let dup = good.clone() + good.lines().nth(1).unwrap() + "\n";
    std::fs::write(&path, dup).unwrap();
    assert!(matches!(load_field(&path), Err(Error::Format(_))));

    std::fs::write(&path, good.replacen("\n0,0,", "\n0,0,x", 1)).unwrap();
    assert!(matches!(load_field(&path), Err(Error::Format(_))));

    std::fs::write(&path, good.replacen("\n0,0,", "\n99,0,", 1)).unwrap();
    assert!(matches!(load_field(&path), Err(Error::Format(_))));

    std::fs::write(&path, &good).unwrap();
    std::fs::write(metadata_path(&path), "{\"format\": \"other\"}").unwrap();
    assert!(matches!(load_field(&path), Err(Error::Format(_))));

    assert!(matches!(
        load_field(&dir.path().join("missing.csv")),
        Err(Error::Io { .. })
    ));
}

#[test]
fn config_rejects_unknown_keys() {
    assert!(RunConfig::from_json(
        r#"{"manifold":{"volume":1.0,"scalar_curvature":1.0},"dims":{"m":2,"n":1},
            "grid":{"r_max":12.0,"cells":100},"extra":1}"#
    )
    .is_err());
}
