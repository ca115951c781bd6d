#![no_main]

use libfuzzer_sys::fuzz_target;
use symtree::syntax::{parse_relabeling, relabeling_text};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_relabeling(s) {
        let text = relabeling_text(&r);
        assert_eq!(parse_relabeling(&text).unwrap(), r);
    }
});
