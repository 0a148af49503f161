//! Share file serialization.

use mldr::config::SystemConfigFile;
use mldr::error::HarnessError;
use mldr::sharefile::ShareFile;
use mldr_core::Fe;
use proptest::prelude::*;

fn sample_share() -> ShareFile {
    let config = SystemConfigFile { n: 4, d: 3, q: 257, sizes: vec![0, 15, 30], seed: 0 };
    let system = config.system().unwrap();
    let msgs: Vec<Vec<Fe>> = config.sizes.iter().map(|&b| (0..b as u32).map(|v| Fe(v * 7 % 257)).collect()).collect();
    let share = &system.encode(&msgs).unwrap()[2];
    ShareFile::from_share(&system, share)
}

#[test]
fn header_and_payload_sizes() {
    let file = sample_share();
    let bytes = file.to_bytes().unwrap();
    assert_eq!(&bytes[..4], b"MLDR");
    assert_eq!(bytes.len(), 16 + 8 * 3 + 2 * 24);
    assert_eq!(ShareFile::from_bytes(&bytes).unwrap(), file);
}

#[test]
fn every_truncation_is_a_format_error() {
    let bytes = sample_share().to_bytes().unwrap();
    for len in 0..bytes.len() {
        assert!(matches!(ShareFile::from_bytes(&bytes[..len]), Err(HarnessError::Format(_))), "length {len}");
    }
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(matches!(ShareFile::from_bytes(&extra), Err(HarnessError::Format(_))));
    let mut magic = bytes;
    magic[0] = b'X';
    assert!(matches!(ShareFile::from_bytes(&magic), Err(HarnessError::Format(_))));
}

#[test]
fn out_of_field_symbols_are_rejected() {
    let mut bytes = sample_share().to_bytes().unwrap();
    let last = bytes.len() - 2;
    bytes[last..].copy_from_slice(&300u16.to_le_bytes());
    assert!(matches!(ShareFile::from_bytes(&bytes), Err(HarnessError::Format(_))));
}

proptest! {
    #[test]
    fn random_shares_round_trip(
        d in 1usize..6,
        extra in 1usize..4,
        q in prop::sample::select(vec![257u32, 7, 65521, 65536]),
        gens in proptest::collection::vec((0usize..4, 0usize..5), 5),
        seed in any::<u64>(),
    ) {
        let n = d + extra;
        let levels: Vec<(usize, usize)> = gens[..d].to_vec();
        let total: usize = levels.iter().map(|l| l.0).sum();
        let symbols: Vec<Fe> = (0..d * total).map(|i| Fe(((seed >> (i % 48)) as u32 ^ i as u32) % q.min(65536))).collect();
        let file = ShareFile { n, d, q, node: 1 + (seed as usize) % n, levels, symbols };
        let bytes = file.to_bytes().unwrap();
        prop_assert_eq!(ShareFile::from_bytes(&bytes).unwrap(), file);
    }
}
