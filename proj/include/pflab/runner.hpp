#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pflab/config.hpp"
#include "pflab/spectral.hpp"

namespace pflab {

struct RunOptions {
  std::string out_dir = "out";
  int workers = 1;
  std::uint64_t seed = 1;
  bool strict = false;
};

// In-memory artifact set: filename -> bytes, in a deterministic order.
// Identical config + seed must reproduce identical bytes for every file
// here; anything time-dependent goes only into manifest.json, which is
// added at write time.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  std::string log;  // human-readable run summary
  bool hypothesis_violation = false;

  const std::string* find(const std::string& name) const;
};

// Executes cfg.command: one of validate, spectrum, fgr, mourre, lap,
// track, widths, virial, vanhove-check. Every run performs hypothesis
// validation first and includes hypotheses.csv in the artifacts.
Artifacts run_experiment(const ExperimentConfig& cfg, const RunOptions& opt);

// Writes the artifacts plus manifest.json (schema versions, config hash,
// seed, workers, runtime, timestamp) under opt.out_dir.
void write_artifacts(const Artifacts& a, const ExperimentConfig& cfg,
                     const RunOptions& opt, double runtime_seconds,
                     const std::string& command);

// Deterministic parallel map: evaluates fn(0..n-1) on up to `workers`
// threads with stride partitioning. Callers write into pre-sized slots,
// so row order never depends on scheduling.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

// Full command-line entry point. Exit codes: 0 ok, 2 config/usage error,
// 3 numeric failure, 4 hypothesis violation under --strict.
int run_cli(int argc, const char* const* argv);

// CSV assembly with shortest round-trip floats and minimal quoting.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  void cell(double x);
  void cell(int x);
  void cell(bool x);
  void cell(const std::string& s);
  void endrow();
  std::string str() const;

 private:
  std::string buf_;
  std::size_t cols_ = 0, at_ = 0;
};

}  // namespace pflab
