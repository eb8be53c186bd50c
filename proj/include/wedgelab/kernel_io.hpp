#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wedgelab/kernel.hpp"

namespace wedgelab {

// Interchange document for kernels and chains:
//   {
//     "spaces":  [["a","b"], ["u","v"], ...],
//     "kernels": [{"source_index": 1, "target_index": 0, "rows": [[...], ...]}, ...]
//   }
// Kernels may carry optional "counts" / "stderr" matrices and a "meta" string
// (used by empirical kernels); both round-trip untouched.
struct KernelFileEntry {
  int source_index = -1;
  int target_index = -1;
  MatrixXd rows;
  std::optional<MatrixXd> counts;
  std::optional<MatrixXd> stderrs;
  std::optional<std::string> meta;
};

struct KernelFile {
  std::vector<FiniteStateSpace> spaces;
  std::vector<KernelFileEntry> entries;
};

std::string write_kernel_file(const KernelFile& file);
// Validates the document and every kernel invariant; the first violation is
// reported with its indices ("kernels[2].rows[1]: ...").
KernelFile read_kernel_file(const std::string& text);

// Chain convention: entry l holds Q_{l+1} with source space l+1 and target l.
KernelFile chain_to_file(const ChainSequence& chain);
ChainSequence chain_from_file(const KernelFile& file);

void save_kernel_file(const KernelFile& file, const std::string& path);
KernelFile load_kernel_file(const std::string& path);

}  // namespace wedgelab
