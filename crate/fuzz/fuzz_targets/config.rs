#![no_main]

use libfuzzer_sys::fuzz_target;
use rarefaction_nsf::harness::parse_config_str;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = parse_config_str(text) {
        // anything accepted must survive its canonical form unchanged
        let canonical = config.to_ini();
        let again = parse_config_str(&canonical).expect("canonical form parses");
        assert_eq!(again, config);
        assert_eq!(again.to_ini(), canonical);
    }
});
