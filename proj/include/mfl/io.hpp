#pragma once

#include <string>

#include "mfl/field.hpp"

namespace mfl {

// Checkpoint format, little-endian:
//   bytes  0-3   magic "MFLB"
//   bytes  4-7   u32 version (1)
//   bytes  8-11  u32 dim
//   bytes 12-15  u32 reserved (0)
//   bytes 16-23  u64 M
//   bytes 24-31  f64 L
// followed by M^dim interleaved (re, im) f64 samples.
void save_field(const Field& f, const std::string& path);
Field load_field(const std::string& path);

// write-temp-then-rename
void atomic_write_text(const std::string& path, const std::string& text);

}  // namespace mfl
