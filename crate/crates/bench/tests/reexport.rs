use surftn_bench::surftn::{build_lattice, cbf_network_factors, Decoder, DecoderConfig, IsingParams, Pauli, Syndrome};

#[test]
fn benchmarked_decoder_is_usable() {
    let lat = build_lattice(3, 3).unwrap();
    let noise = cbf_network_factors(&IsingParams::benchmark(1.0 / 0.7), &lat).unwrap();
    let dec = Decoder::new(&lat, &noise, DecoderConfig::with_chi(8)).unwrap();
    assert_eq!(dec.decode(&Syndrome::trivial(&lat)).unwrap().correction, Pauli::I);
}
