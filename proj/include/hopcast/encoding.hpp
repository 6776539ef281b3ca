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

#ifndef HOPCAST_ENCODING_HPP_
#define HOPCAST_ENCODING_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hopcast {

using Bytes = std::vector<std::uint8_t>;

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);
Bytes to_bytes(std::string_view s);

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Big-endian, length-prefixed fields. No padding.
class Writer {
 public:
  void u32(std::uint32_t v);
  void raw(std::span<const std::uint8_t> bytes);
  // u32 length then bytes.
  void field(std::span<const std::uint8_t> bytes);
  void field_u32(std::uint32_t v);

  const Bytes& bytes() const& { return out_; }
  Bytes bytes() && { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint32_t u32();
  std::span<const std::uint8_t> raw(std::size_t len);
  std::span<const std::uint8_t> field();
  std::uint32_t field_u32();
  std::span<const std::uint8_t> rest() { return raw(in_.size() - pos_); }
  bool done() const { return pos_ == in_.size(); }
  void expect_done() const;

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace hopcast

#endif  // HOPCAST_ENCODING_HPP_
