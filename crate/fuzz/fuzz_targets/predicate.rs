#![no_main]

use libfuzzer_sys::fuzz_target;
use symtree::syntax::parse_predicate;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_predicate(s) {
        let again = parse_predicate(&p.to_string()).unwrap();
        assert_eq!(again.to_string(), p.to_string());
    }
});
