// Copyright 2026 The Hopcast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

#include "hopcast/crypto.hpp"
#include "hopcast/encoding.hpp"

namespace hopcast::crypto {
namespace {

TEST(Encoding, HexRoundTrip) {
  const Bytes b{0x00, 0x01, 0xab, 0xff};
  EXPECT_EQ(to_hex(b), "0001abff");
  EXPECT_EQ(from_hex("0001ABff"), b);
  EXPECT_THROW(from_hex("abc"), DecodeError);
  EXPECT_THROW(from_hex("zz"), DecodeError);
}

TEST(Encoding, WriterReaderRoundTrip) {
  Writer w;
  w.u32(0x01020304);
  w.field(to_bytes("hello"));
  w.field_u32(7);
  const Bytes out = w.bytes();
  EXPECT_EQ(out[0], 0x01);
  EXPECT_EQ(out[3], 0x04);
  Reader r(out);
  EXPECT_EQ(r.u32(), 0x01020304u);
  const auto f = r.field();
  EXPECT_EQ(Bytes(f.begin(), f.end()), to_bytes("hello"));
  EXPECT_EQ(r.field_u32(), 7u);
  EXPECT_TRUE(r.done());
  EXPECT_NO_THROW(r.expect_done());
}

TEST(Encoding, TruncatedInputThrows) {
  Writer w;
  w.field(to_bytes("hello"));
  Bytes out = w.bytes();
  out.pop_back();
  Reader r(out);
  EXPECT_THROW(r.field(), DecodeError);
  Reader r2(Bytes{0, 0});
  EXPECT_THROW(r2.u32(), DecodeError);
}

TEST(TestScheme, HashIsSha256) {
  auto g = TestScheme::generate(1, 3);
  // FIPS 180-2 "abc"
  EXPECT_EQ(g.scheme->hash(to_bytes("abc")).hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(TestScheme, SignatureIsHmacOfDigestUnderDerivedSecret) {
  const std::uint64_t seed = 0x0123456789abcdefULL;
  auto g = TestScheme::generate(seed, 4);
  const Digest d = g.scheme->hash(to_bytes("payload"));
  for (int i = 1; i <= 4; ++i) {
    Bytes label = to_bytes("hopcast-test-key");
    for (int s = 56; s >= 0; s -= 8) label.push_back(static_cast<std::uint8_t>(seed >> s));
    for (int s = 24; s >= 0; s -= 8) label.push_back(static_cast<std::uint8_t>(i >> s));
    std::uint8_t secret[SHA256_DIGEST_LENGTH];
    SHA256(label.data(), label.size(), secret);
    std::uint8_t mac[32];
    unsigned len = 0;
    HMAC(EVP_sha256(), secret, sizeof secret, d.bytes.data(), d.bytes.size(), mac,
         &len);
    const Signature sig = g.scheme->sign(g.keys[i - 1], d);
    EXPECT_EQ(sig.signer, ProcessId{i});
    EXPECT_EQ(sig.bytes, Bytes(mac, mac + len));
  }
}

TEST(TestScheme, VerifyAcceptsOnlyGenuineSignatures) {
  auto rings = make_key_rings(9, 4);
  const Digest d = rings[0].hash(to_bytes("v"));
  const Signature s = rings[0].sign(d);
  for (const auto& ring : rings) EXPECT_TRUE(ring.verify(d, s));

  Signature tampered = s;
  tampered.bytes[5] ^= 1;
  EXPECT_FALSE(rings[1].verify(d, tampered));

  Signature relabelled = s;
  relabelled.signer = ProcessId{2};
  EXPECT_FALSE(rings[1].verify(d, relabelled));

  Signature bad_signer = s;
  bad_signer.signer = ProcessId{9};
  EXPECT_FALSE(rings[1].verify(d, bad_signer));

  Signature short_sig = s;
  short_sig.bytes.resize(3);
  EXPECT_FALSE(rings[1].verify(d, short_sig));

  const Digest other = rings[0].hash(to_bytes("w"));
  EXPECT_FALSE(rings[1].verify(other, s));
  EXPECT_TRUE(rings[2].verify(ExtendedSignature{d, s}));
}

TEST(TestScheme, KeysDependOnSeed) {
  auto a = make_key_rings(1, 3);
  auto b = make_key_rings(1, 3);
  auto c = make_key_rings(2, 3);
  const Digest d = a[0].hash(to_bytes("x"));
  EXPECT_EQ(a[0].sign(d), b[0].sign(d));
  EXPECT_NE(a[0].sign(d), c[0].sign(d));
  EXPECT_FALSE(c[1].verify(d, a[0].sign(d)));
}

TEST(KeyRing, PublicKeyRange) {
  auto rings = make_key_rings(1, 3);
  EXPECT_EQ(rings[1].self(), ProcessId{2});
  EXPECT_EQ(rings[1].public_key(ProcessId{3}).owner, ProcessId{3});
  EXPECT_THROW(rings[1].public_key(ProcessId{4}), std::out_of_range);
  EXPECT_THROW(TestScheme::generate(1, 0), std::invalid_argument);
}

}  // namespace
}  // namespace hopcast::crypto
