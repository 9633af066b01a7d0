//! Fuzzes the JSON config parser and its validation layer.
//!
//! Arbitrary bytes are fed through [`ModelConfigFile::from_str`] and, when
//! they parse, through `into_parts`. Both stages must reject bad input with
//! an error, never a panic; a successfully built model must validate.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qmeas_cli::config::ModelConfigFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = ModelConfigFile::from_str(text) else {
        return;
    };
    if let Ok((model, optimizer)) = file.into_parts() {
        model
            .validate()
            .expect("a model built from a config must validate");
        optimizer
            .validate()
            .expect("optimizer options built from a config must validate");
    }
});
