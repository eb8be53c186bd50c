#include "wedgelab/report.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "wedgelab/errors.hpp"
#include "wedgelab/rng.hpp"

namespace wedgelab {

using nlohmann::json;

namespace {

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: default: return "skipped";
  }
}

const char* origin_name(CheckOrigin o) {
  switch (o) {
    case CheckOrigin::exact: return "exact";
    case CheckOrigin::oracle: return "oracle";
    case CheckOrigin::statistical: default: return "statistical";
  }
}

}  // namespace

std::string format17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool VerificationReport::overall_pass() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::fail) return false;
  return true;
}

std::string VerificationReport::to_json() const {
  json doc;
  doc["overall"] = overall_pass() ? "pass" : "fail";
  json arr = json::array();
  for (const auto& c : checks) {
    json jc;
    jc["name"] = c.name;
    jc["status"] = status_name(c.status);
    jc["measured"] = c.measured;
    jc["bound"] = c.bound;
    jc["tolerance"] = c.tolerance;
    jc["origin"] = origin_name(c.origin);
    if (!c.note.empty()) jc["note"] = c.note;
    arr.push_back(std::move(jc));
  }
  doc["checks"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::string VerificationReport::timing_json() const {
  json doc;
  json arr = json::array();
  for (const auto& c : checks) {
    json jc;
    jc["name"] = c.name;
    jc["runtime_s"] = c.runtime_s;
    arr.push_back(std::move(jc));
  }
  doc["checks"] = std::move(arr);
  return doc.dump(2) + "\n";
}

void VerificationReport::print(std::ostream& os) const {
  for (const auto& c : checks) {
    os << "[" << (c.status == CheckStatus::pass
                      ? "PASS"
                      : (c.status == CheckStatus::fail ? "FAIL" : "SKIP"))
       << "] " << c.name << "  measured=" << format17(c.measured)
       << " bound=" << format17(c.bound) << " tol=" << format17(c.tolerance)
       << " runtime=" << std::fixed << std::setprecision(2) << c.runtime_s << "s";
    os.unsetf(std::ios::fixed);
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << "\n";
  }
  os << "overall: " << (overall_pass() ? "PASS" : "FAIL") << "\n";
}

Check make_check(const std::string& name, bool pass, double measured, double bound,
                 double tolerance, double runtime_s, CheckOrigin origin,
                 const std::string& note) {
  return Check{name,      pass ? CheckStatus::pass : CheckStatus::fail,
               measured,  bound,
               tolerance, runtime_s,
               origin,    note};
}

std::string csv_to_string(const CsvTable& table) {
  std::ostringstream os;
  if (!table.header_comment.empty()) os << "# " << table.header_comment << "\n";
  for (size_t j = 0; j < table.columns.size(); ++j)
    os << table.columns[j] << (j + 1 < table.columns.size() ? "," : "");
  os << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw ValidationError("csv row width does not match the column list");
    for (size_t j = 0; j < row.size(); ++j)
      os << format17(row[j]) << (j + 1 < row.size() ? "," : "");
    os << "\n";
  }
  return os.str();
}

ArtifactWriter::ArtifactWriter(std::string out_dir) : dir_(std::move(out_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir_);
}

void ArtifactWriter::write(const std::string& relative_path, const std::string& bytes) {
  std::filesystem::path p = std::filesystem::path(dir_) / relative_path;
  std::error_code ec;
  std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + p.string());
  os << bytes;
  os.close();
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
  entries_.push_back({relative_path, bytes.size(), hex.str()});
}

void ArtifactWriter::write_csv(const std::string& relative_path, const CsvTable& table) {
  write(relative_path, csv_to_string(table));
}

void ArtifactWriter::write_manifest() {
  json doc;
  json arr = json::array();
  for (const auto& e : entries_) {
    json je;
    je["path"] = e.path;
    je["bytes"] = e.bytes;
    je["fnv1a64"] = e.fnv1a64_hex;
    arr.push_back(std::move(je));
  }
  doc["artifacts"] = std::move(arr);
  std::filesystem::path p = std::filesystem::path(dir_) / "manifest.json";
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + p.string());
  os << doc.dump(2) << "\n";
}

}  // namespace wedgelab
