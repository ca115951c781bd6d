#![no_main]

use libfuzzer_sys::fuzz_target;
use symtree::syntax::parse_fta;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(x) = parse_fta(s) {
        let text = x.to_string();
        let again = parse_fta(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(again, x);
    }
});
