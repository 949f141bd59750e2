//! Bundled tables checked cell by cell at their edges and against their
//! manifests.

use techknee_core::datasets::{sha256_hex, DatasetId, Registry};

fn first_and_last(id: DatasetId) -> (Vec<String>, Vec<String>) {
    let (table, _) = Registry::embedded().load_table(id).unwrap();
    (table.rows.first().unwrap().clone(), table.rows.last().unwrap().clone())
}

fn row(cells: &[&str]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

#[test]
fn table_edges_match_published_values() {
    let expected: [(DatasetId, &[&str], &[&str]); 8] = [
        (
            DatasetId::A1BandwidthCost,
            &["1983", "16666.67", "42184.50", "Coffman and Odlyzko, 1998"],
            &["2015", "0.63", "0.63", "Norton, 2010"],
        ),
        (DatasetId::A2Compression, &["1983", "1", "1", "1.00", "1"], &["2015", "4.7", "14", "16.80", "60"]),
        (
            DatasetId::A3Postage,
            &["1981-11-01", "20", "0.17", "0.51", "0.44"],
            &["2014-01-26", "49", "0.21", "0.50", "0.21"],
        ),
        (DatasetId::A4Traffic, &["1984", "180"], &["2014", "5.09078E+11"]),
        (DatasetId::A5MediaShare, &["1986", "0.0", "0.0"], &["2007", "4.1", "36.6"]),
        (
            DatasetId::A6Sales,
            &["1993", "1183", "625", "80.4", "0", "662.5"],
            &["2007", "1819", "5", "6.3", "1431", "150.3"],
        ),
        (DatasetId::A7MinutesPerUnit, &["vhs", "180"], &["vinyl", "90"]),
        (DatasetId::A8UnitStorage, &["cd", "700"], &["dvd", "4700"]),
    ];
    for (id, first, last) in expected {
        assert_eq!(first_and_last(id), (row(first), row(last)), "{id}");
    }
}

#[test]
fn manifests_describe_their_tables() {
    let registry = Registry::embedded();
    let rows = [33, 33, 15, 31, 22, 15, 3, 2];
    for (id, n) in DatasetId::ALL.into_iter().zip(rows) {
        let (text, _) = registry.raw(id).unwrap();
        let manifest = registry.manifest(id).unwrap();
        assert_eq!(manifest.rows, n, "{id}");
        assert_eq!(manifest.sha256, sha256_hex(text.as_bytes()), "{id}");
        assert!(!manifest.citation.is_empty(), "{id}");
        assert!(manifest.columns.iter().all(|c| !c.unit.is_empty()), "{id}");
    }
}

#[test]
fn export_is_verbatim_and_reloadable() {
    let dir = tempfile::tempdir().unwrap();
    let embedded = Registry::embedded();
    let written = embedded.export(dir.path()).unwrap();
    assert_eq!(written.len(), 16);
    for id in DatasetId::ALL {
        let on_disk = std::fs::read_to_string(dir.path().join(id.csv_file_name())).unwrap();
        assert_eq!(on_disk, embedded.raw(id).unwrap().0);
    }
    let reloaded = Registry::directory(dir.path()).load_all().unwrap();
    assert_eq!(reloaded, embedded.load_all().unwrap());
}

#[test]
fn missing_override_directory_is_an_io_error() {
    let registry = Registry::directory("/nonexistent/techknee-data");
    assert!(matches!(
        registry.load_table(DatasetId::A4Traffic),
        Err(techknee_core::Error::Io { .. })
    ));
}
