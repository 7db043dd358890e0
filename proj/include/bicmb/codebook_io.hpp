#pragma once

// Versioned JSON codebook files:
//   {"version":1, "n_tx":N, "n_streams":S, "bits":B,
//    "entries":[ [[re,im], ...], ... ]}
// One array of [re,im] pairs per codeword, row-major. Unknown extra keys are
// ignored on load, so writers may attach provenance (this one adds
// "generator"). The loader rejects entries whose orthonormality defect
// exceeds 1e-6 and re-projects accepted entries onto the closest
// orthonormal-column matrix, restoring the in-memory invariant exactly.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bicmb/codebook.hpp"
#include "bicmb/errors.hpp"
#include "bicmb/linalg.hpp"

namespace bicmb {

inline constexpr double kCodebookFileTol = 1e-6;

inline nlohmann::ordered_json codebook_to_json(const Codebook& cb) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["n_tx"] = cb.n_tx();
  j["n_streams"] = cb.n_streams();
  j["bits"] = cb.bits();
  auto entries = nlohmann::ordered_json::array();
  for (const auto& m : cb.entries()) {
    auto cw = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        cw.push_back({m(r, c).real(), m(r, c).imag()});
    entries.push_back(std::move(cw));
  }
  j["entries"] = std::move(entries);
  return j;
}

inline void save_codebook(const Codebook& cb, const std::string& path,
                          const nlohmann::ordered_json* generator = nullptr) {
  nlohmann::ordered_json j = codebook_to_json(cb);
  if (generator) j["generator"] = *generator;
  std::ofstream out(path);
  if (!out) throw io_error("save_codebook: cannot open " + path);
  out << j.dump(1) << "\n";
  if (!out) throw io_error("save_codebook: write failed for " + path);
}

inline Codebook load_codebook(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("load_codebook: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("load_codebook: " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("version") || j["version"] != 1)
    throw io_error("load_codebook: " + path + ": unsupported version");
  for (const char* key : {"n_tx", "n_streams", "bits", "entries"})
    if (!j.contains(key))
      throw io_error(std::string("load_codebook: missing key ") + key);

  const int n = j["n_tx"].get<int>();
  const int s = j["n_streams"].get<int>();
  const int b = j["bits"].get<int>();
  if (n < 1 || s < 1 || s > n || b < 1 || b > 30)
    throw io_error("load_codebook: bad dimensions in " + path);
  const auto& je = j["entries"];
  if (!je.is_array() || je.size() != (std::size_t{1} << b))
    throw io_error("load_codebook: entry count != 2^bits in " + path);

  std::vector<Eigen::MatrixXcd> entries;
  entries.reserve(je.size());
  for (const auto& cw : je) {
    if (!cw.is_array() || cw.size() != static_cast<std::size_t>(n) * s)
      throw io_error("load_codebook: codeword size mismatch in " + path);
    Eigen::MatrixXcd m(n, s);
    std::size_t idx = 0;
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < s; ++c, ++idx) {
        const auto& pair = cw[idx];
        if (!pair.is_array() || pair.size() != 2)
          throw io_error("load_codebook: entries must be [re,im] pairs");
        m(r, c) = Cplx(pair[0].get<double>(), pair[1].get<double>());
      }
    if (!m.allFinite())
      throw io_error("load_codebook: non-finite codeword in " + path);
    if (orthonormality_defect(m) > kCodebookFileTol)
      throw io_error("load_codebook: codeword not orthonormal in " + path);
    entries.push_back(closest_unitary(m));
  }
  return Codebook::create(n, s, b, std::move(entries));
}

}  // namespace bicmb
