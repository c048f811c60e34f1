#include "pepcert/certificate_file.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace pepcert {
namespace {

constexpr std::array<std::string_view, 5> kBlockNames = {"d", "a", "b", "c", "eps"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_int(std::string_view token) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw FormatError("not an integer: '" + std::string(token) + "'");
  }
  return value;
}

void render_block(std::ostringstream& out, std::string_view name, const std::vector<double>& v) {
  out << name << ":\n";
  for (const double x : v) out << format_double(x) << '\n';
}

std::size_t expected_length(std::string_view block, int n) {
  if (block == "a") return n;
  if (block == "c" || block == "eps") return n + 1;
  return n - 1;  // d, b
}

}  // namespace

CertificateFile CertificateFile::from_certificate(const FullCertificate& cert, double delta,
                                                  bool with_derived) {
  CertificateFile file;
  file.n = cert.n();
  file.alpha = cert.params.alpha;
  file.rate = cert.params.rate;
  file.delta = delta;
  file.d = cert.d;
  if (with_derived) {
    file.a = cert.a;
    file.b = cert.b;
    file.c = cert.c;
    file.eps = cert.eps;
  }
  return file;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw FormatError("cannot format double");
  return {buf.data(), ptr};
}

double parse_double(std::string_view token) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw FormatError("not a number: '" + std::string(token) + "'");
  }
  return value;
}

std::string render(const CertificateFile& file) {
  std::ostringstream out;
  out << "format " << kFormatTag << '\n';
  out << "N " << file.n << '\n';
  out << "alpha " << format_double(file.alpha) << '\n';
  out << "r " << format_double(file.rate) << '\n';
  out << "delta " << format_double(file.delta) << '\n';
  render_block(out, "d", file.d);
  if (file.a) render_block(out, "a", *file.a);
  if (file.b) render_block(out, "b", *file.b);
  if (file.c) render_block(out, "c", *file.c);
  if (file.eps) render_block(out, "eps", *file.eps);
  return out.str();
}

CertificateFile parse_certificate(std::string_view text) {
  std::map<std::string, std::string, std::less<>> header;
  std::map<std::string, std::vector<double>, std::less<>> blocks;
  std::string current_block;
  int line_no = 0;

  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    try {
      if (line.back() == ':') {
        const std::string_view name = line.substr(0, line.size() - 1);
        if (std::find(kBlockNames.begin(), kBlockNames.end(), name) == kBlockNames.end()) {
          throw FormatError("unknown block '" + std::string(name) + "'");
        }
        if (blocks.contains(name)) throw FormatError("duplicate block '" + std::string(name) + "'");
        current_block = std::string(name);
        blocks[current_block];
        continue;
      }
      if (!current_block.empty()) {
        blocks[current_block].push_back(parse_double(line));
        continue;
      }
      const auto space = line.find_first_of(" \t");
      if (space == std::string_view::npos) throw FormatError("expected 'key value'");
      const std::string key(line.substr(0, space));
      if (header.contains(key)) throw FormatError("duplicate key '" + key + "'");
      header[key] = std::string(trim(line.substr(space + 1)));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  const auto field = [&](const char* key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) throw FormatError(std::string("missing header field '") + key + "'");
    return it->second;
  };
  if (field("format") != kFormatTag) {
    throw FormatError("unsupported format '" + field("format") + "'");
  }
  for (const auto& [key, value] : header) {
    if (key != "format" && key != "N" && key != "alpha" && key != "r" && key != "delta") {
      throw FormatError("unknown header field '" + key + "'");
    }
  }

  CertificateFile file;
  file.n = parse_int(field("N"));
  file.alpha = parse_double(field("alpha"));
  file.rate = parse_double(field("r"));
  file.delta = parse_double(field("delta"));
  if (file.n < kMinCertificateN) throw FormatError("N must be >= 3");

  if (!blocks.contains("d")) throw FormatError("missing block 'd'");
  for (const auto& [name, values] : blocks) {
    const std::size_t want = expected_length(name, file.n);
    if (values.size() != want) {
      throw FormatError("block '" + name + "' has " + std::to_string(values.size()) +
                        " values, expected " + std::to_string(want));
    }
  }
  const auto take = [&](const char* name) -> std::optional<std::vector<double>> {
    const auto it = blocks.find(name);
    if (it == blocks.end()) return std::nullopt;
    return it->second;
  };
  file.d = *take("d");
  file.a = take("a");
  file.b = take("b");
  file.c = take("c");
  file.eps = take("eps");
  return file;
}

void write_certificate(const std::filesystem::path& path, const CertificateFile& file) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << render(file);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

CertificateFile read_certificate(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_certificate(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::filesystem::path certificate_path(const std::filesystem::path& dir, int n) {
  return dir / ("cert_" + std::to_string(n) + ".txt");
}

}  // namespace pepcert
