#![no_main]

use libfuzzer_sys::fuzz_target;
use rarefaction_nsf::harness::report::read_long;

fuzz_target!(|data: &[u8]| {
    let _ = read_long(data);
});
