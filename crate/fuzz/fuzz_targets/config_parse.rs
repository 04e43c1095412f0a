#![no_main]
use ergodic_jacobi_cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = RunConfig::parse(text) {
            // an accepted config must survive its own serialization
            let again = serde_json::to_string(&config).unwrap();
            assert_eq!(RunConfig::parse(&again).unwrap(), config);
        }
    }
});
