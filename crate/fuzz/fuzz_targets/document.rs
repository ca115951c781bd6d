#![no_main]

use libfuzzer_sys::fuzz_target;
use symtree::syntax::parse_document;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(d) = parse_document(s) {
        let text = d.to_string();
        let again = parse_document(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(again.to_string(), text);
    }
});
