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

#ifndef HOPCAST_CRYPTO_HPP_
#define HOPCAST_CRYPTO_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hopcast/encoding.hpp"
#include "hopcast/topology.hpp"

namespace hopcast::crypto {

inline constexpr std::size_t kDigestSize = 32;

struct Digest {
  std::array<std::uint8_t, kDigestSize> bytes{};

  std::string hex() const { return to_hex(bytes); }
  friend auto operator<=>(const Digest&, const Digest&) = default;
};

struct Signature {
  Bytes bytes;
  ProcessId signer;

  friend bool operator==(const Signature&, const Signature&) = default;
};

// e_i = (h_i, s_i)
struct ExtendedSignature {
  Digest h;
  Signature s;

  friend bool operator==(const ExtendedSignature&,
                         const ExtendedSignature&) = default;
};

struct PublicKey {
  ProcessId owner;
  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

// Opaque key material; only a scheme can read it.
class PrivateKey {
 public:
  ProcessId owner() const { return owner_; }

 private:
  friend class SignatureScheme;
  PrivateKey(ProcessId owner, Bytes material)
      : owner_(owner), material_(std::move(material)) {}

  ProcessId owner_;
  Bytes material_;
};

class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;

  virtual Digest hash(std::span<const std::uint8_t> payload) const = 0;
  virtual Signature sign(const PrivateKey& key, const Digest& d) const = 0;
  // Never throws; malformed input yields false.
  virtual bool verify(const PublicKey& pub, const Digest& d,
                      const Signature& s) const = 0;

 protected:
  static PrivateKey make_private(ProcessId owner, Bytes material) {
    return PrivateKey(owner, std::move(material));
  }
  static const Bytes& material(const PrivateKey& key) { return key.material_; }
};

// SHA-256 digest; signature = HMAC-SHA256(secret_i, digest). The verifier
// holds a registry of secrets, which stands in for public-key verification.
class TestScheme final : public SignatureScheme {
 public:
  struct Generated {
    std::shared_ptr<const TestScheme> scheme;
    std::vector<PrivateKey> keys;  // keys[i] belongs to process i+1
  };

  // Secrets are derived from (seed, process id).
  static Generated generate(std::uint64_t seed, int n);

  ~TestScheme() override;

  Digest hash(std::span<const std::uint8_t> payload) const override;
  Signature sign(const PrivateKey& key, const Digest& d) const override;
  bool verify(const PublicKey& pub, const Digest& d,
              const Signature& s) const override;

  int n() const { return static_cast<int>(verifiers_.size()); }

 private:
  struct Verifier;
  TestScheme() = default;

  std::vector<std::unique_ptr<Verifier>> verifiers_;
};

// Everything one process needs.
class KeyRing {
 public:
  KeyRing(std::shared_ptr<const SignatureScheme> scheme, int n,
          PrivateKey own);

  const SignatureScheme& scheme() const { return *scheme_; }
  int n() const { return n_; }
  ProcessId self() const { return own_.owner(); }
  PublicKey public_key(ProcessId p) const;
  const PrivateKey& own() const { return own_; }

  Digest hash(std::span<const std::uint8_t> payload) const {
    return scheme_->hash(payload);
  }
  Signature sign(const Digest& d) const { return scheme_->sign(own_, d); }
  bool verify(const Digest& d, const Signature& s) const;
  bool verify(const ExtendedSignature& e) const { return verify(e.h, e.s); }

 private:
  std::shared_ptr<const SignatureScheme> scheme_;
  int n_;
  PrivateKey own_;
};

// One key ring per process, keys derived from the seed.
std::vector<KeyRing> make_key_rings(std::uint64_t seed, int n);

}  // namespace hopcast::crypto

#endif  // HOPCAST_CRYPTO_HPP_
