#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pepcert/recursion.hpp"

namespace pepcert {

// Line-oriented certificate file:
//
//   format pepcert/1
//   N 5
//   alpha <double>
//   r <double>
//   delta <double>
//   d:
//   <one value per line>
//   a: / b: / c: / eps:   (optional blocks, same layout)
//
// Numbers are written as the shortest decimal that round-trips the double.
struct CertificateFile {
  int n = 0;
  double alpha = 0.0;
  double rate = 0.0;
  double delta = 0.0;
  std::vector<double> d;
  std::optional<std::vector<double>> a;
  std::optional<std::vector<double>> b;
  std::optional<std::vector<double>> c;
  std::optional<std::vector<double>> eps;

  static CertificateFile from_certificate(const FullCertificate& cert, double delta,
                                          bool with_derived = true);

  bool operator==(const CertificateFile&) const = default;
};

inline constexpr std::string_view kFormatTag = "pepcert/1";

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double value);
// Throws FormatError unless the whole token parses.
double parse_double(std::string_view token);

std::string render(const CertificateFile& file);
CertificateFile parse_certificate(std::string_view text);

void write_certificate(const std::filesystem::path& path, const CertificateFile& file);
CertificateFile read_certificate(const std::filesystem::path& path);

// <dir>/cert_<N>.txt
std::filesystem::path certificate_path(const std::filesystem::path& dir, int n);

}  // namespace pepcert
