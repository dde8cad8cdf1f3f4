#![no_main]

use libfuzzer_sys::fuzz_target;
use pwshape::dataset::Dataset;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ds) = Dataset::parse_str(text) {
        // Anything the parser accepts must survive a serialization
        // round trip unchanged.
        let tsv = ds.to_tsv();
        let echo = Dataset::parse_str(&tsv).expect("round trip parses");
        assert_eq!(tsv, echo.to_tsv());
    }
});
