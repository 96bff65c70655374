#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "types.hpp"

namespace sparsemnl {

/// Shortest decimal string that round-trips the exact double value.
/// All CSV output funnels through this, so repeated runs of the same
/// computation serialize byte-identically.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec == std::errc())
    return std::string(buf, res.ptr);
  std::snprintf(buf, sizeof(buf), "%.17g", v);  // unreachable fallback
  return std::string(buf);
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  // from_chars mirrors the to_chars writer: locale independent, exact on
  // shortest round-trip output, and accepts subnormals that stod rejects.
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError("bad numeric field '" + s + "' in " + where);
  return v;
}

inline long parse_long(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer field '" + s + "' in " + where);
  }
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: fixed \n endings
  if (!out) throw ConfigError("cannot open for writing: " + path);
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  return in;
}

}  // namespace detail

/// Dataset layout: header "x1,...,xd,y", one row per observation,
/// labels 1-based.
inline void write_dataset(const std::string& path, const DesignMatrix& X,
                          const LabelVector& y) {
  if (X.n() != y.n())
    throw std::invalid_argument("write_dataset: X and y lengths differ");
  std::ofstream out = detail::open_out(path);
  for (Eigen::Index j = 0; j < X.d(); ++j)
    out << "x" << (j + 1) << ",";
  out << "y\n";
  for (Eigen::Index i = 0; i < X.n(); ++i) {
    for (Eigen::Index j = 0; j < X.d(); ++j)
      out << format_double(X.values(i, j)) << ",";
    out << y.labels[static_cast<size_t>(i)] << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path);
}

/// Reads a dataset written by write_dataset (or matching the layout).
/// The class count is max(labels) unless num_classes overrides it.
inline std::pair<DesignMatrix, LabelVector> read_dataset(
    const std::string& path, int num_classes = 0) {
  std::ifstream in = detail::open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty dataset: " + path);
  const std::vector<std::string> head = detail::split(line, ',');
  if (head.size() < 2 || head.back() != "y")
    throw ConfigError("dataset header must be x1,...,xd,y: " + path);
  const size_t d = head.size() - 1;
  for (size_t j = 0; j < d; ++j)
    if (head[j] != "x" + std::to_string(j + 1))
      throw ConfigError("dataset header must be x1,...,xd,y: " + path);

  std::vector<double> xs;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = detail::split(line, ',');
    if (f.size() != d + 1)
      throw ConfigError("dataset row with wrong field count in " + path);
    for (size_t j = 0; j < d; ++j)
      xs.push_back(detail::parse_double(f[j], path));
    labels.push_back(static_cast<int>(detail::parse_long(f[d], path)));
  }
  if (labels.empty()) throw ConfigError("dataset has no rows: " + path);

  const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j)
      X(i, j) = xs[static_cast<size_t>(i) * d + static_cast<size_t>(j)];

  int L = num_classes;
  if (L == 0)
    for (int v : labels) L = std::max(L, v);
  try {
    return {DesignMatrix(std::move(X)), LabelVector(std::move(labels), L)};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid dataset ") + path + ": " +
                      e.what());
  }
}

/// Coefficient layout: header "b1,...,bL", one row per feature, plus a
/// JSON sidecar <path>.meta.json recording the convention tag.
inline void write_coeff(const std::string& path, const CoeffMatrix& B) {
  std::ofstream out = detail::open_out(path);
  for (Eigen::Index l = 0; l < B.classes(); ++l)
    out << "b" << (l + 1) << (l + 1 < B.classes() ? "," : "\n");
  for (Eigen::Index j = 0; j < B.dim(); ++j)
    for (Eigen::Index l = 0; l < B.classes(); ++l)
      out << format_double(B.values(j, l))
          << (l + 1 < B.classes() ? "," : "\n");
  if (!out) throw ConfigError("write failed: " + path);
  std::ofstream meta = detail::open_out(path + ".meta.json");
  meta << "{\"convention\":\"" << to_string(B.convention)
       << "\",\"d\":" << B.dim() << ",\"classes\":" << B.classes() << "}\n";
  if (!meta) throw ConfigError("write failed: " + path + ".meta.json");
}

inline CoeffMatrix read_coeff(const std::string& path) {
  std::ifstream meta = detail::open_in(path + ".meta.json");
  std::stringstream ss;
  ss << meta.rdbuf();
  const std::string mtxt = ss.str();
  Convention conv;
  // The sidecar is machine-written; a substring probe keeps this header
  // free of the JSON dependency.
  if (mtxt.find("\"reference_last\"") != std::string::npos)
    conv = Convention::ReferenceLast;
  else if (mtxt.find("\"zero_row_mean\"") != std::string::npos)
    conv = Convention::ZeroRowMean;
  else
    throw ConfigError("missing convention tag in " + path + ".meta.json");

  std::ifstream in = detail::open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty coeff file: " + path);
  const size_t L = detail::split(line, ',').size();
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = detail::split(line, ',');
    if (f.size() != L)
      throw ConfigError("coeff row with wrong field count in " + path);
    for (const auto& s : f) vals.push_back(detail::parse_double(s, path));
  }
  const Eigen::Index d = static_cast<Eigen::Index>(vals.size() / L);
  if (d < 1 || vals.size() != static_cast<size_t>(d) * L)
    throw ConfigError("coeff file has no rows: " + path);
  Eigen::MatrixXd B(d, static_cast<Eigen::Index>(L));
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(L); ++l)
      B(j, l) = vals[static_cast<size_t>(j) * L + static_cast<size_t>(l)];
  try {
    return CoeffMatrix(std::move(B), conv);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid coefficients ") + path + ": " +
                      e.what());
  }
}

}  // namespace sparsemnl
