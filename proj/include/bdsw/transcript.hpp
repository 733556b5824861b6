// Copyright 2026 The bdsw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bdsw/bits.hpp"

namespace bdsw {

enum class Party { Alice, Bob };
enum class MessageKind { Basis, TestOutcome, Parity, SubsetAnnounce, Decision };

std::string_view to_string(Party p);
std::string_view to_string(MessageKind k);

/// One public message on the authenticated classical channel.
struct Message {
  Party sender = Party::Alice;
  MessageKind kind = MessageKind::Parity;
  BitString payload;

  bool operator==(const Message&) const = default;
};

/// Append-only record of everything Eve sees.
///
/// Serialized as one record per line: `seq sender kind payload`, where the
/// payload token is `<bit count>:<hex>` (hex as in bits_to_hex; `0:` when
/// empty). Sequence numbers start at 0.
class Transcript {
 public:
  void append(Party sender, MessageKind kind, BitString payload) {
    messages_.push_back({sender, kind, std::move(payload)});
  }
  const std::vector<Message>& messages() const { return messages_; }
  std::size_t size() const { return messages_.size(); }
  bool operator==(const Transcript&) const = default;

  std::string serialize() const;
  static Transcript parse(std::string_view text);

 private:
  std::vector<Message> messages_;
};

}  // namespace bdsw
