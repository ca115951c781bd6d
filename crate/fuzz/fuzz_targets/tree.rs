#![no_main]

use libfuzzer_sys::fuzz_target;
use symtree::syntax::parse_tree;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_tree(s) {
        assert_eq!(parse_tree(&t.to_string()).unwrap(), t);
    }
});
