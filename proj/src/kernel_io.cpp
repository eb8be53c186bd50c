#include "wedgelab/kernel_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wedgelab {

using nlohmann::json;

namespace {

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty())
    throw ValidationError(where + ": expected a nonempty array of rows");
  size_t cols = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].empty())
      throw ValidationError(where + "[" + std::to_string(i) + "]: expected a nonempty row");
    if (i == 0)
      cols = rows[i].size();
    else if (rows[i].size() != cols)
      throw ValidationError(where + "[" + std::to_string(i) + "]: ragged row length");
  }
  MatrixXd m(Eigen::Index(rows.size()), Eigen::Index(cols));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < cols; ++j) {
      const json& v = rows[i][j];
      if (!v.is_number())
        throw ValidationError(where + "[" + std::to_string(i) + "][" + std::to_string(j) +
                              "]: expected a number");
      m(Eigen::Index(i), Eigen::Index(j)) = v.get<double>();
    }
  }
  return m;
}

}  // namespace

std::string write_kernel_file(const KernelFile& file) {
  json doc;
  json spaces = json::array();
  for (const auto& s : file.spaces) spaces.push_back(s.labels);
  doc["spaces"] = std::move(spaces);
  json kernels = json::array();
  for (const auto& e : file.entries) {
    json k;
    k["source_index"] = e.source_index;
    k["target_index"] = e.target_index;
    k["rows"] = matrix_to_json(e.rows);
    if (e.counts) k["counts"] = matrix_to_json(*e.counts);
    if (e.stderrs) k["stderr"] = matrix_to_json(*e.stderrs);
    if (e.meta) k["meta"] = *e.meta;
    kernels.push_back(std::move(k));
  }
  doc["kernels"] = std::move(kernels);
  return doc.dump(2) + "\n";
}

KernelFile read_kernel_file(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("kernel file: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("spaces") || !doc.contains("kernels"))
    throw ValidationError("kernel file: expected object with 'spaces' and 'kernels'");

  KernelFile out;
  const json& spaces = doc["spaces"];
  if (!spaces.is_array() || spaces.empty())
    throw ValidationError("spaces: expected a nonempty array");
  for (size_t i = 0; i < spaces.size(); ++i) {
    if (!spaces[i].is_array())
      throw ValidationError("spaces[" + std::to_string(i) + "]: expected an array of labels");
    std::vector<std::string> labels;
    for (const auto& l : spaces[i]) {
      if (!l.is_string())
        throw ValidationError("spaces[" + std::to_string(i) + "]: labels must be strings");
      labels.push_back(l.get<std::string>());
    }
    try {
      out.spaces.emplace_back(std::move(labels));
    } catch (const ValidationError& e) {
      throw ValidationError("spaces[" + std::to_string(i) + "]: " + e.what());
    }
  }

  const json& kernels = doc["kernels"];
  if (!kernels.is_array()) throw ValidationError("kernels: expected an array");
  for (size_t i = 0; i < kernels.size(); ++i) {
    const std::string where = "kernels[" + std::to_string(i) + "]";
    const json& k = kernels[i];
    if (!k.is_object() || !k.contains("source_index") || !k.contains("target_index") ||
        !k.contains("rows"))
      throw ValidationError(where + ": expected source_index, target_index and rows");
    KernelFileEntry e;
    e.source_index = k["source_index"].get<int>();
    e.target_index = k["target_index"].get<int>();
    if (e.source_index < 0 || e.source_index >= int(out.spaces.size()))
      throw ValidationError(where + ".source_index: out of range");
    if (e.target_index < 0 || e.target_index >= int(out.spaces.size()))
      throw ValidationError(where + ".target_index: out of range");
    e.rows = matrix_from_json(k["rows"], where + ".rows");
    if (k.contains("counts")) e.counts = matrix_from_json(k["counts"], where + ".counts");
    if (k.contains("stderr")) e.stderrs = matrix_from_json(k["stderr"], where + ".stderr");
    if (k.contains("meta")) e.meta = k["meta"].get<std::string>();
    // Run the kernel invariants now so the violation carries file indices.
    try {
      SubKernel probe(out.spaces[size_t(e.source_index)], out.spaces[size_t(e.target_index)],
                      e.rows);
    } catch (const ValidationError& err) {
      throw ValidationError(where + ".rows: " + err.what());
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

KernelFile chain_to_file(const ChainSequence& chain) {
  KernelFile file;
  for (int l = 0; l <= chain.length(); ++l) file.spaces.push_back(chain.space(l));
  for (int l = 1; l <= chain.length(); ++l) {
    KernelFileEntry e;
    e.source_index = l;
    e.target_index = l - 1;
    e.rows = chain.kernel(l).weights();
    file.entries.push_back(std::move(e));
  }
  return file;
}

ChainSequence chain_from_file(const KernelFile& file) {
  if (file.entries.empty()) throw ValidationError("kernel file holds no kernels");
  std::vector<SubKernel> kernels;
  for (size_t i = 0; i < file.entries.size(); ++i) {
    const auto& e = file.entries[i];
    kernels.emplace_back(file.spaces[size_t(e.source_index)], file.spaces[size_t(e.target_index)],
                         e.rows);
  }
  return ChainSequence(std::move(kernels));
}

void save_kernel_file(const KernelFile& file, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path);
  os << write_kernel_file(file);
}

KernelFile load_kernel_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return read_kernel_file(buf.str());
}

}  // namespace wedgelab
