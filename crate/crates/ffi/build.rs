use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let header = crate_dir.join("include").join("noisyrank.h");
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    match cbindgen::generate(&crate_dir) {
        Ok(bindings) => {
            bindings.write_to_file(header);
        }
        // keep the checked-in header when generation fails (e.g. during
        // macro expansion errors mid-edit); the build itself still works
        Err(e) => println!("cargo:warning=cbindgen skipped: {e}"),
    }
}
