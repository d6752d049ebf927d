#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "cavity/model.hpp"

namespace cavity {

/// Malformed QEDDUMP content; the message carries the 1-based line number.
struct DumpParseError : StructuralError {
  DumpParseError(std::size_t line, const std::string& what)
      : StructuralError("dump line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

struct DumpHeader {
  int format_version = 1;
  std::size_t n_ao = 0;
  std::size_t n_electrons = 0;
  double e_nuc = 0.0;
  Vec3 d_nuc = Vec3::Zero();
  std::string label;
};

/// Reads a QEDDUMP v1 stream, expands permutational images and validates.
IntegralSet parse_dump(std::istream& in);
IntegralSet parse_dump_file(const std::filesystem::path& path);

/// Writes canonical (lower-triangle) entries with the given significant digits.
void write_dump(std::ostream& out, const IntegralSet& s, int precision = 17);
std::string write_dump(const IntegralSet& s, int precision = 17);

}  // namespace cavity
