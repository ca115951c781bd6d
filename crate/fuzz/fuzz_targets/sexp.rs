#![no_main]

use libfuzzer_sys::fuzz_target;
use symtree::syntax::read_all;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = read_all(s);
    }
});
