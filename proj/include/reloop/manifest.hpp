#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reloop/config.hpp"
#include "reloop/format.hpp"
#include "reloop/version.hpp"

namespace reloop {

/// FNV-1a 64-bit hash; the checksum recorded for every output file.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

struct OutputRecord {
  std::string filename;
  std::uint64_t checksum;
};

/// Render a run manifest. The body is the fully resolved config (itself a
/// valid config file, so a run can be reproduced straight from its
/// manifest); version, duration, and per-output checksums ride in comment
/// lines that the config parser skips.
inline std::string render_manifest(const RunConfig& cfg, double duration_seconds,
                                   std::span<const OutputRecord> outputs) {
  std::string out;
  out += "# run manifest\n";
  out += "# version ";
  out += kVersion;
  out += '\n';
  out += "# duration_seconds ";
  out += format_double(duration_seconds);
  out += '\n';
  for (const OutputRecord& rec : outputs) {
    out += "# output ";
    out += rec.filename;
    out += " fnv1a64 ";
    out += hex64(rec.checksum);
    out += '\n';
  }
  out += serialize_config(cfg);
  return out;
}

} // namespace reloop
