#![no_main]
use ergodic_jacobi::io::{read_intervals, write_intervals};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(set) = read_intervals(data) {
        let mut buf = Vec::new();
        write_intervals(&mut buf, &set).unwrap();
        assert_eq!(read_intervals(buf.as_slice()).unwrap(), set);
    }
});
