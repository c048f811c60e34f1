#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pepcert::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNonConvergence = 2,
  kVerificationFailed = 3,
  kCorrupt = 4,
};

inline constexpr const char* kOutDirEnv = "PEPCERT_OUT_DIR";

// $PEPCERT_OUT_DIR, or the working directory.
std::filesystem::path default_output_dir();

int cmd_rates(int n, std::ostream& out, std::ostream& err);

struct SolveOptions {
  int n = 0;
  std::vector<std::filesystem::path> warm;
  double tol = 1e-13;
  int max_iter = 50;
  std::filesystem::path out_dir = ".";
};

int cmd_solve(const SolveOptions& options, std::ostream& out, std::ostream& err);

struct SweepOptions {
  int n_max = 0;
  std::optional<int> stride_from;
  int stride = 50;
  bool full_scale = false;
  double tol = 1e-13;
  int max_iter = 50;
  std::filesystem::path out_dir = ".";
};

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  std::filesystem::path file;
  bool oracle = false;
  double tol = 1e-11;  // bound on delta
};

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

struct PlotDataOptions {
  std::vector<std::filesystem::path> files;
  std::filesystem::path out_dir = ".";
};

int cmd_plotdata(const PlotDataOptions& options, std::ostream& out, std::ostream& err);

struct EnvelopeOptions {
  int n = 0;
  std::string grid = "0.1:1.99:0.01";  // lo:hi:step
};

int cmd_envelope(const EnvelopeOptions& options, std::ostream& out, std::ostream& err);

// Parses "lo:hi:step" into the grid lo, lo + step, ..., <= hi.
std::optional<std::vector<double>> parse_grid(const std::string& spec);

}  // namespace pepcert::cli
