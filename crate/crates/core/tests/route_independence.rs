//! The oracle and the kernel route must not share code paths, otherwise their
//! agreement proves nothing. Checked on the module sources.

use std::path::Path;

fn source(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("src").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    // drop comments so prose mentioning the other route does not count
    text.lines()
        .map(|l| match l.find("//") {
            Some(i) => &l[..i],
            None => l,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn oracle_does_not_use_kernel_modules() {
    let src = source("oracle.rs");
    for needle in ["kernels", "transforms", "verification"] {
        assert!(!src.contains(needle), "oracle.rs refers to `{needle}`");
    }
}

#[test]
fn kernel_route_does_not_use_oracle_or_sector_projection() {
    for file in ["kernels.rs", "transforms.rs"] {
        let src = source(file);
        for needle in ["oracle", "verification", "js_inverse", "js_forward", "project_sector"] {
            assert!(!src.contains(needle), "{file} refers to `{needle}`");
        }
    }
}
