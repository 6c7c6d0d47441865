#!/usr/bin/env python3
"""Regenerate crates/core/tests/fixtures/golden.json.

Written from the format description alone, with hashlib and plain integer
arithmetic, so that the Rust test comparing against its output checks two
independent implementations.
"""

import hashlib
import json
import pathlib

P, Q, G = 2149481927, 65521, 687385019
ELEM_BYTES, SCALAR_BYTES = 4, 2

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures/golden.json"


def xof(tag: bytes, data: bytes, n: int) -> bytes:
    return hashlib.shake_256(bytes([len(tag)]) + tag + data).digest(n)


def u32(v):
    return v.to_bytes(4, "big")


def u64(v):
    return v.to_bytes(8, "big")


def enc_elem(e):
    return e.to_bytes(ELEM_BYTES, "big")


def enc_scalar(s):
    return s.to_bytes(SCALAR_BYTES, "big")


def enc_tokens(ts):
    return u64(len(ts)) + b"".join(u32(t) for t in ts)


def hash_to_scalar(tag, msg):
    counter = 0
    while True:
        wide = xof(tag, u32(counter) + msg, 2 * SCALAR_BYTES)
        s = int.from_bytes(wide, "big") % Q
        if s:
            return s
        counter += 1


def bits_to_hex(bits):
    padded = bits + [0] * (-len(bits) % 8)
    return bytes(int("".join(map(str, padded[i:i + 8])), 2) for i in range(0, len(padded), 8)).hex()


def bytes_to_bits(b, n):
    return [(b[i // 8] >> (7 - i % 8)) & 1 for i in range(n)]


def seeded(label, n):
    return hashlib.sha256(label.encode()).digest()[:n]


def seeded_scalar(label):
    return 1 + int.from_bytes(hashlib.sha256(label.encode()).digest(), "big") % (Q - 1)


def h3_bit(ell, carriers, bits, x):
    data = u32(ell)
    for i, b in enumerate(bits):
        data += b"".join(u32(t) for t in carriers[i * ell:(i + 1) * ell]) + bytes([b])
    data += b"".join(u32(t) for t in x)
    return xof(b"MDDW/H3", data, 1)[0] >> 7


def schnorr(sk, msg, rand32):
    pk = pow(G, sk, P)
    k = hash_to_scalar(b"MDDW/NONCE", rand32 + msg + enc_elem(pk))
    r = pow(G, k, P)
    c = hash_to_scalar(b"MDDW/SCH", enc_elem(r) + enc_elem(pk) + msg)
    return enc_scalar(c) + enc_scalar((k - c * sk) % Q)


def verifier_set(vsks):
    encs = sorted({enc_elem(pow(G, s, P)) for s in vsks})
    return encs, u32(len(encs)) + b"".join(encs)


def mdvs_sign(ssk, vsks, m, r, c2, z2):
    spk = pow(G, ssk, P)
    encs, set_enc = verifier_set(vsks)
    framed = u64(len(m)) + m
    prefix = enc_elem(spk) + set_enc + framed
    hs = [hash_to_scalar(b"MDDW/MDVS/h", prefix + u32(i)) for i in range(len(encs))]
    y = 1
    for e, h in zip(encs, hs):
        y = y * pow(int.from_bytes(e, "big"), h, P) % P
    t1 = pow(G, r, P)
    t2 = pow(y, c2, P) * pow(G, z2, P) % P
    data = enc_elem(t1) + enc_elem(t2) + enc_elem(spk)
    data += b"".join(e + enc_scalar(h) for e, h in zip(encs, hs))
    data += framed + enc_elem(y)
    c = hash_to_scalar(b"MDDW/MDVS/c", data)
    c1 = (c - c2) % Q
    z1 = (r - c1 * ssk) % Q
    return hs, b"".join(enc_scalar(v) for v in (c1, c2, z1, z2))


def prf(key, data):
    return xof(b"MDDW/PRF", key + data, 32)


def commit(msg, r):
    return xof(b"MDDW/COM", r + msg, 32)


def cmdvs_sign(prf_key, sig_sk, mdvs_sk, vsks, m, nonces):
    _, inner = mdvs_sign(mdvs_sk, vsks, m, *nonces)
    pk_enc = enc_elem(pow(G, sig_sk, P)) + enc_elem(pow(G, mdvs_sk, P))
    payload = pk_enc + inner
    sigma = schnorr(sig_sk, payload, prf(prf_key, payload + b"\x00"))
    r_commit = prf(prf_key, payload + b"\x01")
    com = commit(pk_enc + verifier_set(vsks)[1] + sigma, r_commit)
    return inner, sigma, r_commit, com


def main():
    cases = {"group": {"p": P, "q": Q, "g": G}}

    blocks = [[0, 0], [3, 17], [63, 1], [5, 9, 12, 40]]
    cases["h1"] = [{"block": b, "out": xof(b"MDDW/H1", enc_tokens(b), 32).hex()} for b in blocks]
    cases["h2"] = [
        {"block": b, "bits": n, "out": bits_to_hex(bytes_to_bits(xof(b"MDDW/H2", enc_tokens(b), (n + 7) // 8), n))}
        for b in blocks for n in (1, 64, 100, 642)
    ]

    h3 = []
    for i in range(6):
        ell = 1 + i % 3
        k = i + 1
        raw = seeded(f"h3-{i}", 4 * ell * (k + 1))
        toks = [b % 64 for b in raw]
        carriers, x = toks[:ell * k], toks[ell * k:ell * (k + 1)]
        bits = [b & 1 for b in seeded(f"h3-bits-{i}", k)]
        h3.append({"ell": ell, "carriers": carriers, "bits": bits, "x": x, "out": h3_bit(ell, carriers, bits, x)})
    cases["h3"] = h3

    cases["prf"] = []
    cases["commit"] = []
    for i in range(4):
        key, data = seeded(f"prf-key-{i}", 32), seeded(f"prf-in-{i}", 5 + 7 * i)
        cases["prf"].append({"key": key.hex(), "input": data.hex(), "out": prf(key, data).hex()})
        r, msg = seeded(f"com-r-{i}", 32), seeded(f"com-m-{i}", 3 * i)
        cases["commit"].append({"r": r.hex(), "msg": msg.hex(), "out": commit(msg, r).hex()})

    cases["hash_to_scalar"] = [
        {"tag": tag.hex(), "msg": msg.hex(), "out": enc_scalar(hash_to_scalar(tag, msg)).hex()}
        for tag, msg in [(b"MDDW/SCH", b""), (b"MDDW/MDVS/h", b"abc"), (b"x", bytes(range(40)))]
    ]

    cases["schnorr"] = []
    for i in range(4):
        sk = seeded_scalar(f"sch-sk-{i}")
        msg, rand32 = seeded(f"sch-m-{i}", 10 + i), seeded(f"sch-r-{i}", 32)
        cases["schnorr"].append({
            "sk": sk, "msg": msg.hex(), "rand": rand32.hex(),
            "pk": enc_elem(pow(G, sk, P)).hex(), "sig": schnorr(sk, msg, rand32).hex(),
        })

    cases["mdvs"] = []
    cases["cmdvs"] = []
    for i in range(4):
        ssk = seeded_scalar(f"mdvs-ssk-{i}")
        vsks = [seeded_scalar(f"mdvs-vsk-{i}-{j}") for j in range(1 + i)]
        m = seeded(f"mdvs-m-{i}", 32)
        nonces = [seeded_scalar(f"mdvs-{name}-{i}") for name in ("r", "c2", "z2")]
        hs, sig = mdvs_sign(ssk, vsks, m, *nonces)
        cases["mdvs"].append({
            "ssk": ssk, "vsks": vsks, "m": m.hex(), "nonces": nonces,
            "set": verifier_set(vsks)[1].hex(), "h": hs, "sig": sig.hex(),
        })
        prf_key = seeded(f"cmdvs-k-{i}", 32)
        sig_sk = seeded_scalar(f"cmdvs-sig-{i}")
        inner, sigma, r_commit, com = cmdvs_sign(prf_key, sig_sk, ssk, vsks, m, nonces)
        cases["cmdvs"].append({
            "prf_key": prf_key.hex(), "sig_sk": sig_sk, "mdvs_sk": ssk, "vsks": vsks, "m": m.hex(),
            "nonces": nonces, "inner": inner.hex(), "sigma_sig": sigma.hex(),
            "r_commit": r_commit.hex(), "com": com.hex(),
        })

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(cases, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
