#include "cavity/integral_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cavity {

namespace {

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double to_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw DumpParseError(line, "malformed number '" + std::string(tok) + "'");
  return v;
}

std::size_t to_count(std::string_view tok, std::size_t line) {
  std::size_t v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) throw DumpParseError(line, "malformed integer '" + std::string(tok) + "'");
  return v;
}

enum class Kind { Overlap, Core, Dipole, Quad, Eri };

struct Tag {
  Kind kind;
  int component;
};

const std::unordered_map<std::string_view, Tag>& tags() {
  static const std::unordered_map<std::string_view, Tag> t = {
      {"S", {Kind::Overlap, 0}}, {"H", {Kind::Core, 0}},    {"G", {Kind::Eri, 0}},
      {"DX", {Kind::Dipole, 0}}, {"DY", {Kind::Dipole, 1}}, {"DZ", {Kind::Dipole, 2}},
      {"QXX", {Kind::Quad, 0}},  {"QXY", {Kind::Quad, 1}},  {"QXZ", {Kind::Quad, 2}},
      {"QYY", {Kind::Quad, 3}},  {"QYZ", {Kind::Quad, 4}},  {"QZZ", {Kind::Quad, 5}}};
  return t;
}

DumpHeader parse_header(std::istream& in, std::size_t& line_no) {
  std::string line;
  DumpHeader h;
  if (!std::getline(in, line)) throw DumpParseError(1, "empty stream");
  line_no = 1;
  auto t = split(line);
  if (t.size() != 2 || t[0] != "QEDDUMP") throw DumpParseError(1, "missing 'QEDDUMP <version>' magic line");
  h.format_version = static_cast<int>(to_count(t[1], 1));
  if (h.format_version != 1) throw DumpParseError(1, "unsupported format version " + std::string(t[1]));

  if (!std::getline(in, line)) throw DumpParseError(2, "missing header line");
  line_no = 2;
  const auto label_pos = line.find("LABEL");
  std::string_view fields = std::string_view(line).substr(0, label_pos);
  if (label_pos != std::string::npos) {
    std::string rest = line.substr(label_pos + 5);
    const auto first = rest.find_first_not_of(" \t");
    const auto last = rest.find_last_not_of(" \t\r");
    h.label = first == std::string::npos ? "" : rest.substr(first, last - first + 1);
  }
  t = split(fields);
  if (t.size() != 10 || t[0] != "NAO" || t[2] != "NELEC" || t[4] != "ENUC" || t[6] != "DNUC")
    throw DumpParseError(2, "header must read 'NAO n NELEC n ENUC e DNUC x y z LABEL text'");
  h.n_ao = to_count(t[1], 2);
  h.n_electrons = to_count(t[3], 2);
  h.e_nuc = to_double(t[5], 2);
  for (int a = 0; a < 3; ++a) h.d_nuc(a) = to_double(t[7 + a], 2);
  if (h.n_ao == 0) throw DumpParseError(2, "NAO must be positive");
  if (h.n_electrons == 0) throw DumpParseError(2, "NELEC must be positive");
  return h;
}

std::uint64_t key_of(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
  return (static_cast<std::uint64_t>(i) << 48) | (static_cast<std::uint64_t>(j) << 32) |
         (static_cast<std::uint64_t>(k) << 16) | static_cast<std::uint64_t>(l);
}

std::uint64_t canonical_eri(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
  if (i < j) std::swap(i, j);
  if (k < l) std::swap(k, l);
  if (i * (i + 1) / 2 + j < k * (k + 1) / 2 + l) {
    std::swap(i, k);
    std::swap(j, l);
  }
  return key_of(i, j, k, l);
}

}  // namespace

IntegralSet parse_dump(std::istream& in) {
  std::size_t line_no = 0;
  const DumpHeader h = parse_header(in, line_no);
  const std::size_t n = h.n_ao;
  if (n >= 1024) throw DumpParseError(2, "NAO must be below 1024");
  IntegralSet s = IntegralSet::zeros(n);
  s.meta.n_electrons = h.n_electrons;
  s.meta.nuclear_repulsion = h.e_nuc;
  s.meta.nuclear_dipole = h.d_nuc;
  s.meta.label = h.label;

  // raw index tuples seen per block (exact duplicates) and canonical values (image consistency)
  std::unordered_set<std::uint64_t> seen;
  std::unordered_map<std::uint64_t, double> canon;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    const auto t = split(body);
    if (t.empty()) continue;
    const auto it = tags().find(t[0]);
    if (it == tags().end()) throw DumpParseError(line_no, "unknown block tag '" + std::string(t[0]) + "'");
    const Tag tag = it->second;
    const std::size_t n_idx = tag.kind == Kind::Eri ? 4 : 2;
    if (t.size() != n_idx + 2)
      throw DumpParseError(line_no, "expected " + std::to_string(n_idx) + " indices and a value");
    std::size_t idx[4] = {0, 0, 0, 0};
    for (std::size_t k = 0; k < n_idx; ++k) {
      const std::size_t v = to_count(t[1 + k], line_no);
      if (v < 1 || v > n) throw DumpParseError(line_no, "index " + std::string(t[1 + k]) + " outside 1.." + std::to_string(n));
      idx[k] = v - 1;
    }
    const double value = to_double(t[n_idx + 1], line_no);
    const std::uint64_t block =
        (static_cast<std::uint64_t>(tag.kind) * 8 + static_cast<std::uint64_t>(tag.component)) << 58;
    if (!seen.insert(block | key_of(idx[0], idx[1], idx[2], idx[3])).second)
      throw DumpParseError(line_no, "duplicate entry");
    const std::uint64_t ckey =
        block | (tag.kind == Kind::Eri ? canonical_eri(idx[0], idx[1], idx[2], idx[3])
                                       : key_of(std::max(idx[0], idx[1]), std::min(idx[0], idx[1]), 0, 0));
    if (auto [pos, fresh] = canon.emplace(ckey, value); !fresh) {
      if (std::abs(pos->second - value) > 1e-12)
        throw DataCorruptionError("dump line " + std::to_string(line_no) +
                                  ": inconsistent value for a symmetric image");
      continue;
    }

    const auto i = idx[0], j = idx[1], k = idx[2], l = idx[3];
    auto put2 = [&](Matrix& m) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
    };
    switch (tag.kind) {
      case Kind::Overlap: put2(s.overlap); break;
      case Kind::Core: put2(s.core_h); break;
      case Kind::Dipole: put2(s.dipole[static_cast<std::size_t>(tag.component)]); break;
      case Kind::Quad: put2(s.quadrupole[static_cast<std::size_t>(tag.component)]); break;
      case Kind::Eri:
        for (auto [a, b, c, d] : {std::array{i, j, k, l}, std::array{j, i, k, l}, std::array{i, j, l, k},
                                  std::array{j, i, l, k}, std::array{k, l, i, j}, std::array{l, k, i, j},
                                  std::array{k, l, j, i}, std::array{l, k, j, i}})
          s.eri(a, b, c, d) = value;
        break;
    }
  }
  validate_integral_set(s);
  return s;
}

IntegralSet parse_dump_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dump file " + path.string());
  return parse_dump(in);
}

void write_dump(std::ostream& out, const IntegralSet& s, int precision) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return std::string(buf);
  };
  const std::size_t n = s.meta.n_ao;
  const Vec3& d = s.meta.nuclear_dipole;
  out << "QEDDUMP 1\n"
      << "NAO " << n << " NELEC " << s.meta.n_electrons << " ENUC " << num(s.meta.nuclear_repulsion) << " DNUC "
      << num(d(0)) << ' ' << num(d(1)) << ' ' << num(d(2)) << " LABEL " << s.meta.label << '\n';
  auto one = [&](const char* tag, const Matrix& m) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (v != 0.0) out << tag << ' ' << i + 1 << ' ' << j + 1 << ' ' << num(v) << '\n';
      }
  };
  one("S", s.overlap);
  one("H", s.core_h);
  const char* dtags[] = {"DX", "DY", "DZ"};
  for (int a = 0; a < 3; ++a) one(dtags[a], s.dipole[static_cast<std::size_t>(a)]);
  const char* qtags[] = {"QXX", "QXY", "QXZ", "QYY", "QYZ", "QZZ"};
  for (int a = 0; a < 6; ++a) one(qtags[a], s.quadrupole[static_cast<std::size_t>(a)]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      for (std::size_t k = 0; k <= i; ++k)
        for (std::size_t l = 0; l <= (k == i ? j : k); ++l) {
          const double v = s.eri(i, j, k, l);
          if (v != 0.0) out << "G " << i + 1 << ' ' << j + 1 << ' ' << k + 1 << ' ' << l + 1 << ' ' << num(v) << '\n';
        }
}

std::string write_dump(const IntegralSet& s, int precision) {
  std::ostringstream os;
  write_dump(os, s, precision);
  return os.str();
}

}  // namespace cavity
