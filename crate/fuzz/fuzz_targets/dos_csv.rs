#![no_main]
use libfuzzer_sys::fuzz_target;

// Histogram reader: arbitrary bytes must yield a measure or an error.
fuzz_target!(|data: &[u8]| {
    if let Ok(dos) = ergodic_jacobi::io::read_dos(data) {
        assert_eq!(dos.bin_edges.len(), dos.weights.len() + 1);
    }
});
