#![allow(dead_code)]

use mddw::algebra::Group;
use mddw::base_sigs::{schnorr_sign, SchnorrKeyPair};
use mddw::cmdvs::{cmdvs_sign_with, CmdvsSignerKey};
use mddw::mdvs::{challenge, coefficients, mdvs_sign_with, mdvs_verify, MdvsKeyPair, SignNonces, VerifierSet};
use mddw::oracles::{commit, prf_eval, BitString, BlockOracles, PrfKey, Token};
use mddw::{Test16, Toy23};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::Value;

type S16 = <Test16 as Group>::Scalar;

fn hex_field(v: &Value, key: &str) -> Vec<u8> {
    hex::decode(v[key].as_str().unwrap_or_else(|| panic!("missing {key}"))).expect("hex")
}

fn u64_field(v: &Value, key: &str) -> u64 {
    v[key].as_u64().unwrap_or_else(|| panic!("missing {key}"))
}

fn tokens(v: &Value, key: &str) -> Vec<Token> {
    v[key]
        .as_array()
        .expect("array")
        .iter()
        .map(|t| t.as_u64().unwrap() as Token)
        .collect()
}

fn scalars(v: &Value, key: &str) -> Vec<S16> {
    v[key]
        .as_array()
        .expect("array")
        .iter()
        .map(|s| Test16::scalar_from_u64(s.as_u64().unwrap()))
        .collect()
}

fn cases<'a>(root: &'a Value, key: &str) -> &'a [Value] {
    root[key].as_array().unwrap_or_else(|| panic!("missing section {key}"))
}

fn expect_eq(what: &str, i: usize, got: &[u8], want: &[u8]) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!(
            "{what}[{i}]: got {}, want {}",
            hex::encode(got),
            hex::encode(want)
        ))
    }
}

fn set_of(vsks: &[S16]) -> VerifierSet<Test16> {
    let pks: Vec<_> = vsks.iter().map(Test16::exp_g).collect();
    VerifierSet::new(&pks).expect("nonempty")
}

/// Compares every committed fixture byte for byte; returns the number of checks.
pub fn check_golden() -> Result<usize, String> {
    let text = include_str!("../fixtures/golden.json");
    let root: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut n = 0;

    let params = Test16::params();
    let group = &root["group"];
    if params.order != u64_field(group, "q").to_string() || params.modulus != u64_field(group, "p").to_string() {
        return Err(format!("group order mismatch: {:?}", params));
    }

    for (i, c) in cases(&root, "h1").iter().enumerate() {
        let block = tokens(c, "block");
        let out = BlockOracles::new(block.len())
            .h1_message(&block)
            .map_err(|e| e.to_string())?;
        expect_eq("h1", i, &out, &hex_field(c, "out"))?;
        n += 1;
    }
    for (i, c) in cases(&root, "h2").iter().enumerate() {
        let block = tokens(c, "block");
        let bits = u64_field(c, "bits") as usize;
        let out = BlockOracles::new(block.len())
            .h2_mask(&block, bits)
            .map_err(|e| e.to_string())?;
        expect_eq("h2", i, &out.to_bytes(), &hex_field(c, "out"))?;
        n += 1;
    }
    for (i, c) in cases(&root, "h3").iter().enumerate() {
        let ell = u64_field(c, "ell") as usize;
        let prev = BitString::from_bits(c["bits"].as_array().unwrap().iter().map(|b| b.as_u64() == Some(1)));
        let bit = BlockOracles::new(ell)
            .h3_bit(&tokens(c, "carriers"), &tokens(c, "x"), &prev)
            .map_err(|e| e.to_string())?;
        expect_eq("h3", i, &[u8::from(bit)], &[u64_field(c, "out") as u8])?;
        n += 1;
    }
    for (i, c) in cases(&root, "prf").iter().enumerate() {
        let key = PrfKey(hex_field(c, "key").try_into().expect("32 bytes"));
        expect_eq("prf", i, &prf_eval(&key, &hex_field(c, "input")), &hex_field(c, "out"))?;
        n += 1;
    }
    for (i, c) in cases(&root, "commit").iter().enumerate() {
        let r: [u8; 32] = hex_field(c, "r").try_into().expect("32 bytes");
        expect_eq("commit", i, &commit(&hex_field(c, "msg"), &r).0, &hex_field(c, "out"))?;
        n += 1;
    }
    for (i, c) in cases(&root, "hash_to_scalar").iter().enumerate() {
        let s = mddw::algebra::hash_to_scalar::<Test16>(&hex_field(c, "tag"), &hex_field(c, "msg"));
        expect_eq("hash_to_scalar", i, &Test16::encode_scalar(&s), &hex_field(c, "out"))?;
        n += 1;
    }
    for (i, c) in cases(&root, "schnorr").iter().enumerate() {
        let key = SchnorrKeyPair::<Test16>::from_secret(Test16::scalar_from_u64(u64_field(c, "sk")));
        expect_eq("schnorr.pk", i, &Test16::encode_elem(&key.pk), &hex_field(c, "pk"))?;
        let rand32: [u8; 32] = hex_field(c, "rand").try_into().expect("32 bytes");
        let sig = schnorr_sign(&key, &hex_field(c, "msg"), &rand32);
        expect_eq("schnorr.sig", i, &sig.to_bytes(), &hex_field(c, "sig"))?;
        n += 2;
    }
    for (i, c) in cases(&root, "mdvs").iter().enumerate() {
        let signer = MdvsKeyPair::<Test16>::from_secret(Test16::scalar_from_u64(u64_field(c, "ssk")));
        let set = set_of(&scalars(c, "vsks"));
        let m = hex_field(c, "m");
        expect_eq("mdvs.set", i, &set.encode(), &hex_field(c, "set"))?;
        let hs: Vec<u8> = coefficients(&signer.pk, &set, &m)
            .iter()
            .flat_map(Test16::encode_scalar)
            .collect();
        let want: Vec<u8> = scalars(c, "h").iter().flat_map(Test16::encode_scalar).collect();
        expect_eq("mdvs.h", i, &hs, &want)?;
        let ns = scalars(c, "nonces");
        let nonces = SignNonces {
            r: ns[0],
            c2: ns[1],
            z2: ns[2],
        };
        let sig = mdvs_sign_with(&signer, &set, &m, &nonces);
        expect_eq("mdvs.sig", i, &sig.to_bytes(), &hex_field(c, "sig"))?;
        n += 3;
    }
    for (i, c) in cases(&root, "cmdvs").iter().enumerate() {
        let sk = CmdvsSignerKey::<Test16> {
            prf_key: PrfKey(hex_field(c, "prf_key").try_into().expect("32 bytes")),
            sig: SchnorrKeyPair::from_secret(Test16::scalar_from_u64(u64_field(c, "sig_sk"))),
            mdvs: MdvsKeyPair::from_secret(Test16::scalar_from_u64(u64_field(c, "mdvs_sk"))),
        };
        let set = set_of(&scalars(c, "vsks"));
        let ns = scalars(c, "nonces");
        let nonces = SignNonces {
            r: ns[0],
            c2: ns[1],
            z2: ns[2],
        };
        let sig = cmdvs_sign_with(&sk, &set, &hex_field(c, "m"), &nonces);
        expect_eq("cmdvs.inner", i, &sig.inner.to_bytes(), &hex_field(c, "inner"))?;
        expect_eq("cmdvs.com", i, &sig.com.0, &hex_field(c, "com"))?;
        let claim =
            mddw::cmdvs::cmdvs_claim(&sk, &set, &sig).ok_or(format!("cmdvs[{i}]: own signature not claimable"))?;
        expect_eq("cmdvs.r_commit", i, &claim.r_commit, &hex_field(c, "r_commit"))?;
        expect_eq(
            "cmdvs.sigma_sig",
            i,
            &claim.sigma_sig_bytes(),
            &hex_field(c, "sigma_sig"),
        )?;
        n += 4;
    }
    Ok(n)
}

const TOY_P: u64 = 23;
const TOY_Q: u64 = 11;
const TOY_G: u64 = 2;

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn toy_elem(v: u64) -> <Toy23 as Group>::Elem {
    Toy23::decode_elem(&[v as u8]).expect("subgroup element")
}

fn toy_value(e: &<Toy23 as Group>::Elem) -> u64 {
    u64::from(Toy23::encode_elem(e)[0])
}

fn toy_scalar_value(s: &<Toy23 as Group>::Scalar) -> u64 {
    u64::from(Toy23::encode_scalar(s)[0])
}

/// Discrete log base `g` by exhaustive search.
fn toy_log(x: u64) -> u64 {
    (0..TOY_Q)
        .find(|&k| pow_mod(TOY_G, k, TOY_P) == x)
        .expect("element of the subgroup")
}

/// All `11 x 11` exponentiations and products against schoolbook arithmetic.
pub fn check_toy_arithmetic() -> Result<usize, String> {
    let elems: Vec<u64> = (0..TOY_Q).map(|k| pow_mod(TOY_G, k, TOY_P)).collect();
    let mut n = 0;
    for &a in &elems {
        for k in 0..TOY_Q {
            let got = toy_value(&Toy23::exp(&toy_elem(a), &Toy23::scalar_from_u64(k)));
            if got != pow_mod(a, k, TOY_P) {
                return Err(format!("{a}^{k}: got {got}"));
            }
            n += 1;
        }
        for &b in &elems {
            let got = toy_value(&Toy23::mul(&toy_elem(a), &toy_elem(b)));
            if got != a * b % TOY_P {
                return Err(format!("{a}*{b}: got {got}"));
            }
            n += 1;
        }
    }
    Ok(n)
}

/// Re-derives the MDVS verification equation with brute-force logs on random
/// toy instances, and checks the library's verdict agrees.
pub fn check_toy_mdvs(instances: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < instances {
        let signer = MdvsKeyPair::<Toy23>::generate(&mut rng);
        let size = rng.gen_range(1..=3);
        let vs: Vec<MdvsKeyPair<Toy23>> = (0..size).map(|_| MdvsKeyPair::generate(&mut rng)).collect();
        let pks: Vec<_> = vs.iter().map(|v| v.pk).collect();
        let set = VerifierSet::<Toy23>::new(&pks).expect("nonempty");
        let m: [u8; 8] = rng.gen();
        let nonces = SignNonces::<Toy23>::sample(&mut rng);
        let sig = mdvs_sign_with(&signer, &set, &m, &nonces);

        let spk = toy_value(&signer.pk);
        let hs = coefficients(&signer.pk, &set, &m);
        // Y and its log from the set, one factor per distinct key
        let (mut y, mut log_y) = (1u64, 0u64);
        for (pk, h) in set.keys().iter().zip(&hs) {
            let (v, h) = (toy_value(pk), toy_scalar_value(h));
            y = y * pow_mod(v, h, TOY_P) % TOY_P;
            log_y = (log_y + toy_log(v) * h) % TOY_Q;
        }
        if toy_log(y) != log_y {
            return Err(format!("aggregate log mismatch at instance {checked}"));
        }
        let [c1, c2, z1, z2] = [sig.c1, sig.c2, sig.z1, sig.z2].map(|s| toy_scalar_value(&s));
        let log_t1 = (z1 + c1 * toy_log(spk)) % TOY_Q;
        let log_t2 = (z2 + c2 * log_y) % TOY_Q;
        // the signer's commitments are g^r and Y^c2 g^z2
        if log_t1 != toy_scalar_value(&nonces.r) {
            return Err(format!("T1 log mismatch at instance {checked}"));
        }
        let t1 = pow_mod(TOY_G, log_t1, TOY_P);
        let t2 = pow_mod(TOY_G, log_t2, TOY_P);
        let c = challenge(&toy_elem(t1), &toy_elem(t2), &signer.pk, &set, &hs, &m, &toy_elem(y));
        let equation = toy_scalar_value(&c) == (c1 + c2) % TOY_Q;
        if !equation {
            return Err(format!("challenge equation fails at instance {checked}"));
        }
        for v in &vs {
            if !mdvs_verify(&signer.pk, &v.sk, &set, &m, &sig) {
                return Err(format!("library rejects instance {checked}"));
            }
        }
        // a tampered z1 breaks the oracle equation and the library check alike
        let mut bad = sig;
        bad.z1 = bad.z1 + Toy23::scalar_from_u64(1);
        let log_t1_bad = (toy_scalar_value(&bad.z1) + c1 * toy_log(spk)) % TOY_Q;
        let c_bad = challenge(
            &toy_elem(pow_mod(TOY_G, log_t1_bad, TOY_P)),
            &toy_elem(t2),
            &signer.pk,
            &set,
            &hs,
            &m,
            &toy_elem(y),
        );
        let oracle_bad = toy_scalar_value(&c_bad) == (c1 + c2) % TOY_Q;
        if oracle_bad != mdvs_verify(&signer.pk, &vs[0].sk, &set, &m, &bad) {
            return Err(format!("oracle and library disagree on tampered instance {checked}"));
        }
        checked += 1;
    }
    Ok(checked)
}
