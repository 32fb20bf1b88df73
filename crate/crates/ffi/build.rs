use std::path::PathBuf;

fn main() {
    let dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    let config_path = dir.join("cbindgen.toml");
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let config = cbindgen::Config::from_file(&config_path).unwrap_or_else(|_| cbindgen::Config {
        language: cbindgen::Language::C,
        ..Default::default()
    });
    match cbindgen::Builder::new()
        .with_crate(&dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(dir.join("include").join("anharmonic.h"));
        }
        Err(e) => println!("cargo:warning=header generation failed: {e}"),
    }
}
