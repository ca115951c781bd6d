#![no_main]

use libfuzzer_sys::fuzz_target;
use symtree::syntax::parse_fn;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_fn(s) {
        let again = parse_fn(&f.to_string()).unwrap();
        assert_eq!(again.to_string(), f.to_string());
    }
});
