#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wedgelab {

enum class CheckStatus { pass, fail, skipped };

// Origin of a check's expected value: a closed form evaluated in place, an
// independent oracle computed alongside, or a statistical bound.
enum class CheckOrigin { exact, oracle, statistical };

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::skipped;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  double runtime_s = 0.0;
  CheckOrigin origin = CheckOrigin::exact;
  std::string note;
};

struct VerificationReport {
  std::vector<Check> checks;

  bool overall_pass() const;
  // Deterministic payload: everything except wall-clock timings.
  std::string to_json() const;
  // Wall-clock sidecar, kept out of the reproducible payload.
  std::string timing_json() const;
  void print(std::ostream& os) const;
};

Check make_check(const std::string& name, bool pass, double measured, double bound,
                 double tolerance, double runtime_s, CheckOrigin origin,
                 const std::string& note = "");

// Table emission: fixed column order, 17 significant digits, manifest with a
// content hash per artifact.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string header_comment;  // parameter fingerprint line, "# ..." prefixed
};

std::string csv_to_string(const CsvTable& table);

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string out_dir);
  // Writes bytes under the output directory and records (path, size, hash).
  void write(const std::string& relative_path, const std::string& bytes);
  void write_csv(const std::string& relative_path, const CsvTable& table);
  // Writes manifest.json listing every artifact recorded so far.
  void write_manifest();
  const std::string& dir() const { return dir_; }

 private:
  struct Entry {
    std::string path;
    std::size_t bytes;
    std::string fnv1a64_hex;
  };
  std::string dir_;
  std::vector<Entry> entries_;
};

std::string format17(double v);

}  // namespace wedgelab
