#pragma once

// Model file layout. Integers are little-endian; a "string" is a u32 byte
// length followed by the bytes.
//
//   "CPMODEL1"                     8-byte magic
//   u32 version                    currently 1
//   u32 k, k x (string key, string value)          ReprConfig
//   u32 count, count x (string word, i32 freq)     words
//   u32 count, count x string                      POS tags
//   u32 count, count x u32 code point              characters
//   u32 count, count x string                      labels
//   u32 count, count x parameter:
//       string name, u32 rows, u32 cols, rows*cols f64 (column-major)

#include <string>

#include "compparse/model.h"

namespace compparse {

inline constexpr char kModelMagic[] = "CPMODEL1";
inline constexpr std::uint32_t kModelVersion = 1;

std::string serialize_model(const ParserModel& model);
ParserModel deserialize_model(const std::string& bytes);

void save_model(const ParserModel& model, const std::string& path);
ParserModel load_model(const std::string& path);

}  // namespace compparse
