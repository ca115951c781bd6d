#![no_main]

use libfuzzer_sys::fuzz_target;
use symtree::syntax::parse_ranked_symbol;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_ranked_symbol(s) {
        assert_eq!(parse_ranked_symbol(&r.to_string()).unwrap(), r);
    }
});
