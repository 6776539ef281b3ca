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

#include "hopcast/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <algorithm>
#include <stdexcept>

namespace hopcast::crypto {

namespace {

constexpr std::size_t kBlock = 64;

struct CtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using Ctx = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

Ctx new_ctx() {
  Ctx ctx(EVP_MD_CTX_new());
  if (!ctx) throw std::bad_alloc();
  return ctx;
}

void sha256_into(std::span<const std::uint8_t> data, std::uint8_t* out) {
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out, &len, EVP_sha256(), nullptr) !=
          1 ||
      len != kDigestSize) {
    throw std::runtime_error("EVP_Digest failed");
  }
}

// Keyed contexts after absorbing key^ipad and key^opad.
struct Pads {
  Ctx inner;
  Ctx outer;

  explicit Pads(std::span<const std::uint8_t> key) {
    std::array<std::uint8_t, kBlock> k{};
    if (key.size() > kBlock) {
      sha256_into(key, k.data());
    } else {
      std::copy(key.begin(), key.end(), k.begin());
    }
    std::array<std::uint8_t, kBlock> ipad, opad;
    for (std::size_t i = 0; i < kBlock; ++i) {
      ipad[i] = k[i] ^ 0x36;
      opad[i] = k[i] ^ 0x5c;
    }
    inner = new_ctx();
    outer = new_ctx();
    if (EVP_DigestInit_ex(inner.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(inner.get(), ipad.data(), ipad.size()) != 1 ||
        EVP_DigestInit_ex(outer.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(outer.get(), opad.data(), opad.size()) != 1) {
      throw std::runtime_error("HMAC pad setup failed");
    }
  }

  std::array<std::uint8_t, kDigestSize> mac(const Digest& d) const {
    Ctx c = new_ctx();
    std::array<std::uint8_t, kDigestSize> ih{}, out{};
    unsigned int len = 0;
    bool ok = EVP_MD_CTX_copy_ex(c.get(), inner.get()) == 1 &&
              EVP_DigestUpdate(c.get(), d.bytes.data(), d.bytes.size()) == 1 &&
              EVP_DigestFinal_ex(c.get(), ih.data(), &len) == 1;
    ok = ok && EVP_MD_CTX_copy_ex(c.get(), outer.get()) == 1 &&
         EVP_DigestUpdate(c.get(), ih.data(), ih.size()) == 1 &&
         EVP_DigestFinal_ex(c.get(), out.data(), &len) == 1;
    if (!ok) throw std::runtime_error("HMAC computation failed");
    return out;
  }
};

Bytes derive_secret(std::uint64_t seed, ProcessId id) {
  Writer w;
  w.raw(to_bytes("hopcast-test-key"));
  w.u32(static_cast<std::uint32_t>(seed >> 32));
  w.u32(static_cast<std::uint32_t>(seed));
  w.u32(static_cast<std::uint32_t>(id.index));
  Bytes out(kDigestSize);
  sha256_into(w.bytes(), out.data());
  return out;
}

}  // namespace

struct TestScheme::Verifier {
  explicit Verifier(std::span<const std::uint8_t> secret) : pads(secret) {}
  Pads pads;
};

TestScheme::~TestScheme() = default;

TestScheme::Generated TestScheme::generate(std::uint64_t seed, int n) {
  if (n < 1 || n > kMaxProcesses) {
    throw std::invalid_argument("TestScheme: n out of range");
  }
  auto scheme = std::shared_ptr<TestScheme>(new TestScheme());
  Generated g;
  for (int i = 1; i <= n; ++i) {
    Bytes secret = derive_secret(seed, ProcessId{i});
    scheme->verifiers_.push_back(std::make_unique<Verifier>(secret));
    g.keys.push_back(make_private(ProcessId{i}, std::move(secret)));
  }
  g.scheme = std::move(scheme);
  return g;
}

Digest TestScheme::hash(std::span<const std::uint8_t> payload) const {
  Digest d;
  sha256_into(payload, d.bytes.data());
  return d;
}

Signature TestScheme::sign(const PrivateKey& key, const Digest& d) const {
  const auto mac = Pads(material(key)).mac(d);
  return Signature{Bytes(mac.begin(), mac.end()), key.owner()};
}

bool TestScheme::verify(const PublicKey& pub, const Digest& d,
                        const Signature& s) const {
  if (pub.owner != s.signer) return false;
  if (pub.owner.index < 1 || pub.owner.index > n()) return false;
  if (s.bytes.size() != kDigestSize) return false;
  try {
    const auto mac = verifiers_[pub.owner.bit()]->pads.mac(d);
    return CRYPTO_memcmp(mac.data(), s.bytes.data(), kDigestSize) == 0;
  } catch (const std::exception&) {
    return false;
  }
}

KeyRing::KeyRing(std::shared_ptr<const SignatureScheme> scheme, int n,
                 PrivateKey own)
    : scheme_(std::move(scheme)), n_(n), own_(std::move(own)) {
  if (!scheme_) throw std::invalid_argument("KeyRing: null scheme");
  if (own_.owner().index < 1 || own_.owner().index > n_) {
    throw std::invalid_argument("KeyRing: owner outside [1, n]");
  }
}

PublicKey KeyRing::public_key(ProcessId p) const {
  if (p.index < 1 || p.index > n_) {
    throw std::out_of_range("KeyRing: no public key for index " +
                            std::to_string(p.index));
  }
  return PublicKey{p};
}

bool KeyRing::verify(const Digest& d, const Signature& s) const {
  if (s.signer.index < 1 || s.signer.index > n_) return false;
  return scheme_->verify(PublicKey{s.signer}, d, s);
}

std::vector<KeyRing> make_key_rings(std::uint64_t seed, int n) {
  auto g = TestScheme::generate(seed, n);
  std::vector<KeyRing> rings;
  rings.reserve(n);
  for (auto& key : g.keys) rings.emplace_back(g.scheme, n, std::move(key));
  return rings;
}

}  // namespace hopcast::crypto
