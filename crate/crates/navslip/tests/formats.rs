use navslip::cache::{self, BasisCache};
use navslip::noise_io;
use navslip_core::basis::{Basis, DomainSpec};
use navslip_core::noise::sample_path;
use navslip_core::{NoisePath, NoiseSpec};
use proptest::prelude::*;
use tempfile::TempDir;

fn basis(k: usize) -> Basis {
    Basis::build_auto(k, DomainSpec::new(0.5).unwrap()).unwrap()
}

#[test]
fn noise_dump_layout() {
    let path = sample_path(&NoiseSpec {
        m: 5,
        modes: 3,
        seed: 42,
        dt: 1e-2,
        steps: 4,
    })
    .unwrap();
    let bytes = noise_io::encode(&path);
    assert_eq!(bytes.len(), 32 + 8 * 12);
    assert_eq!(&bytes[..8], b"NSNOISE1");
    let word = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().unwrap());
    assert_eq!((word(1), word(2), word(3)), (3, 4, 42));
    for step in 0..4 {
        for mode in 0..3 {
            let v = f64::from_bits(word(4 + 3 * step + mode));
            assert_eq!(v.to_bits(), path.row(step)[mode].to_bits());
        }
    }
}

#[test]
fn noise_dump_rejects_bad_input() {
    let path = sample_path(&NoiseSpec {
        m: 5,
        modes: 2,
        seed: 1,
        dt: 1e-2,
        steps: 3,
    })
    .unwrap();
    let bytes = noise_io::encode(&path);
    assert!(noise_io::decode(&bytes[..31], 1e-2).is_err());
    assert!(noise_io::decode(&bytes[..bytes.len() - 8], 1e-2).is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(noise_io::decode(&bad, 1e-2).is_err());
}

proptest! {
    #[test]
    fn noise_dump_round_trips(modes in 1usize..5, steps in 1usize..6, seed in any::<u64>(), scale in -1e3f64..1e3) {
        let inc: Vec<f64> = (0..modes * steps).map(|i| scale * (i as f64 + 0.5).sin()).collect();
        let path = NoisePath::from_raw(modes, steps, 1e-3, seed, inc).unwrap();
        let d = TempDir::new().unwrap();
        let f = d.path().join("noise.bin");
        noise_io::write(&f, &path).unwrap();
        let back = noise_io::read(&f, 1e-3).unwrap();
        prop_assert_eq!(back.checksum(), path.checksum());
        prop_assert_eq!(back.increments(), path.increments());
    }
}

#[test]
fn cache_json_has_documented_keys_and_precision() {
    let b = basis(6);
    let json = String::from_utf8(BasisCache::from_basis(&b).to_json()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["format_version", "alpha", "K", "grid", "pairs", "checksum"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v["grid"]["Nr"].as_u64().unwrap() > 0 && v["grid"]["Ntheta"].as_u64().unwrap() > 0);
    let pair = &v["pairs"][0];
    for key in ["n", "parity", "s", "lambda", "normC", "mu"] {
        assert!(pair.get(key).is_some(), "{key}");
    }
    let lambda_text = json
        .split("\"lambda\": ")
        .nth(1)
        .unwrap()
        .split([',', '\n'])
        .next()
        .unwrap();
    let mantissa = lambda_text.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{lambda_text}");
    assert_eq!(v["checksum"].as_str().unwrap(), b.checksum());
}

#[test]
fn cache_round_trip_is_exact() {
    let b = basis(10);
    let d = TempDir::new().unwrap();
    let f = d.path().join("basis.json");
    cache::write(&f, &b).unwrap();
    let back = cache::read(&f).unwrap();
    assert_eq!(back.checksum(), b.checksum());
    for (x, y) in back.pairs().iter().zip(b.pairs()) {
        assert_eq!(x.lambda.to_bits(), y.lambda.to_bits());
        assert_eq!(x.mu.to_bits(), y.mu.to_bits());
    }
}

#[test]
fn cache_rejects_unknown_keys_and_tampering() {
    let b = basis(4);
    let json = String::from_utf8(BasisCache::from_basis(&b).to_json()).unwrap();
    let extra = json.replacen("\"alpha\"", "\"colour\": 1,\n  \"alpha\"", 1);
    assert!(BasisCache::from_json(extra.as_bytes()).is_err());
    let mut c = BasisCache::from_json(json.as_bytes()).unwrap();
    c.pairs[1].mu *= 1.0 + 1e-12;
    assert!(c.to_basis().is_err());
}
