//! Keeps the checked-in fixture files in sync with the builders that define
//! them. The ignored writer regenerates the files; the guard test fails
//! whenever a file drifts from its builder.

mod common;

use std::fs;

#[test]
#[ignore = "regenerates the fixture files in place"]
fn write_fixture_files() {
    let dir = common::fixture_dir();
    fs::create_dir_all(&dir).unwrap();
    for (name, value) in common::fixture_values() {
        let text = serde_json::to_string_pretty(&value).unwrap();
        fs::write(dir.join(name), format!("{}\n", text)).unwrap();
    }
}

#[test]
fn fixture_files_match_their_builders() {
    for (name, value) in common::fixture_values() {
        let text = fs::read_to_string(common::fixture_path(name))
            .unwrap_or_else(|e| panic!("fixture {} unreadable: {}", name, e));
        let on_disk: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(on_disk, value, "fixture {} drifted from its builder", name);
    }
}
