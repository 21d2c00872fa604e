/*
 * Copyright 2026 The fuzzqe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fuzzqe/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "fuzzqe/error.hpp"

namespace fuzzqe {
namespace {

constexpr std::string_view kMagic = "FZQE1";

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xFF) << (8 * (7 - i));
    return out;
  }
}

std::size_t parse_count(const std::map<std::string, std::string>& fields,
                        const std::string& key) {
  auto it = fields.find(key);
  if (it == fields.end()) throw DataError("checkpoint header lacks " + key);
  std::size_t value = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("checkpoint header: bad value for " + key);
  }
  return value;
}

const std::string& field(const std::map<std::string, std::string>& fields,
                         const std::string& key) {
  auto it = fields.find(key);
  if (it == fields.end()) throw DataError("checkpoint header lacks " + key);
  return it->second;
}

}  // namespace

void write_f64(std::ostream& out, std::span<const double> values) {
  std::vector<std::uint64_t> buffer(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    buffer[i] = to_little_endian(std::bit_cast<std::uint64_t>(values[i]));
  }
  out.write(reinterpret_cast<const char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size() * sizeof(std::uint64_t)));
}

void read_f64(std::istream& in, std::span<double> values, const std::string& what) {
  std::vector<std::uint64_t> buffer(values.size());
  in.read(reinterpret_cast<char*>(buffer.data()),
          static_cast<std::streamsize>(buffer.size() * sizeof(std::uint64_t)));
  if (!in) throw DataError("truncated data while reading " + what);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<double>(to_little_endian(buffer[i]));
  }
}

std::string checkpoint_header(const Parameters& params, const ModelConfig& config) {
  char eps[32];
  auto res = std::to_chars(eps, eps + sizeof(eps), config.ln_eps);
  std::ostringstream os;
  os << kMagic << " d=" << config.dim << " K=" << config.num_bases
     << " E=" << params.num_entities << " R=" << params.num_relations
     << " logic=" << to_string(config.logic) << " norm=" << to_string(config.norm)
     << " g=" << to_string(config.activation) << " ln_eps="
     << std::string_view(eps, static_cast<std::size_t>(res.ptr - eps));
  return os.str();
}

void save_checkpoint(const std::filesystem::path& file, const Parameters& params,
                     const ModelConfig& config) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << checkpoint_header(params, config) << '\n';
    for (const auto& t : params.tensors()) write_f64(out, t.values);
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + file.string());
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != kMagic) throw DataError(file.string() + " is not a checkpoint");
  std::map<std::string, std::string> fields;
  std::string token;
  while (hs >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw DataError("bad checkpoint header token " + token);
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  Checkpoint ck;
  ck.config.dim = parse_count(fields, "d");
  ck.config.num_bases = parse_count(fields, "K");
  ck.config.logic = parse_logic(field(fields, "logic"));
  ck.config.norm = parse_norm_mode(field(fields, "norm"));
  ck.config.activation = parse_activation(field(fields, "g"));
  const std::string& eps = field(fields, "ln_eps");
  auto [ptr, ec] = std::from_chars(eps.data(), eps.data() + eps.size(), ck.config.ln_eps);
  if (ec != std::errc()) throw DataError("checkpoint header: bad ln_eps");
  ck.params = Parameters(parse_count(fields, "E"), parse_count(fields, "R"),
                         ck.config.dim, ck.config.num_bases);
  for (auto& t : ck.params.tensors()) read_f64(in, t.values, std::string(t.name));
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError(file.string() + ": trailing bytes after tensors");
  }
  return ck;
}

}  // namespace fuzzqe
