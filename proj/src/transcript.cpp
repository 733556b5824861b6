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

#include "bdsw/transcript.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace bdsw {

std::string_view to_string(Party p) { return p == Party::Alice ? "alice" : "bob"; }

std::string_view to_string(MessageKind k) {
  switch (k) {
    case MessageKind::Basis: return "basis";
    case MessageKind::TestOutcome: return "test";
    case MessageKind::Parity: return "parity";
    case MessageKind::SubsetAnnounce: return "subset";
    case MessageKind::Decision: return "decision";
  }
  return "?";
}

namespace {

Party parse_party(std::string_view s) {
  if (s == "alice") return Party::Alice;
  if (s == "bob") return Party::Bob;
  throw std::invalid_argument("transcript: unknown sender '" + std::string(s) + "'");
}

MessageKind parse_kind(std::string_view s) {
  for (auto k : {MessageKind::Basis, MessageKind::TestOutcome, MessageKind::Parity,
                 MessageKind::SubsetAnnounce, MessageKind::Decision})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("transcript: unknown kind '" + std::string(s) + "'");
}

}  // namespace

std::string Transcript::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < messages_.size(); ++i) {
    const auto& m = messages_[i];
    out += std::to_string(i);
    out += ' ';
    out += to_string(m.sender);
    out += ' ';
    out += to_string(m.kind);
    out += ' ';
    out += std::to_string(m.payload.size());
    out += ':';
    out += bits_to_hex(m.payload);
    out += '\n';
  }
  return out;
}

Transcript Transcript::parse(std::string_view text) {
  Transcript t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t expect = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t seq;
    std::string sender, kind, payload;
    if (!(ls >> seq >> sender >> kind >> payload))
      throw std::invalid_argument("transcript: malformed record");
    if (seq != expect++) throw std::invalid_argument("transcript: sequence gap");
    const auto colon = payload.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("transcript: payload lacks length");
    std::size_t nbits = 0;
    auto [p, ec] = std::from_chars(payload.data(), payload.data() + colon, nbits);
    if (ec != std::errc{} || p != payload.data() + colon)
      throw std::invalid_argument("transcript: bad payload length");
    t.append(parse_party(sender), parse_kind(kind),
             bits_from_hex(std::string_view(payload).substr(colon + 1), nbits));
  }
  return t;
}

}  // namespace bdsw
