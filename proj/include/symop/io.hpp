#pragma once

// JSON configuration: algebras, norms, elements, superoperators.
//
//   algebra   {"blocks": [{"dim": 2, "weight": 1.0}, ...]}
//   norm      {"kind": "lp", "p": 3}            p may be "inf"
//             {"kind": "ky_fan", "k": 2}
//             {"kind": "lorentz", "alpha": 0.5}
//             {"kind": "l1_cap_linf"} | {"kind": "l1_plus_linf"}
//             {"kind": "custom_two_atom", "c": 3}
//   element   [[re, im, re, im, ...], ...]      one array per block, row-major
//   operator  {"type": "structured", "a": element, "b": element}
//             {"type": "dense", "matrix": [[re, im, ...], ...]}   rows
//             {"type": "dense", "file": "path"}                  flat text file
//             {"type": "identity" | "transpose" | "zero"}
//             {"type": "conjugation", "u": element, "transpose": false}
//
// The flat text file holds the coordinate dimension n followed by n rows of
// n (re, im) pairs, whitespace separated; '#' starts a comment.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "symop/algebra.hpp"
#include "symop/config.hpp"
#include "symop/norms.hpp"
#include "symop/superoperator.hpp"

namespace symop::io {

using json = nlohmann::ordered_json;

/// Malformed configuration; `field` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key, "missing field");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

inline int positive_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1) throw ConfigError(path, "expected a positive integer");
  return j.get<int>();
}

}  // namespace detail

inline AlgebraPtr parse_algebra(const json& j, const std::string& path = "algebra") {
  const json& blocks = detail::require(j, "blocks", path);
  if (!blocks.is_array() || blocks.empty()) throw ConfigError(path + ".blocks", "expected a non-empty array");
  std::vector<BlockSpec> specs;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string p = path + ".blocks[" + std::to_string(i) + "]";
    const int dim = detail::positive_int(detail::require(blocks[i], "dim", p), p + ".dim");
    const double w = detail::number(detail::require(blocks[i], "weight", p), p + ".weight");
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError(p + ".weight", "weight must be positive");
    specs.push_back({dim, w});
  }
  return TracialAlgebra::make(std::move(specs));
}

inline json algebra_to_json(const TracialAlgebra& alg) {
  json blocks = json::array();
  for (const auto& b : alg.blocks()) blocks.push_back({{"dim", b.dim}, {"weight", b.weight}});
  return {{"blocks", blocks}};
}

inline SymmetricNorm parse_norm(const json& j, const std::string& path = "norm") {
  const json& kj = detail::require(j, "kind", path);
  if (!kj.is_string()) throw ConfigError(path + ".kind", "expected a string");
  const std::string kind = kj.get<std::string>();
  auto param = [&](const char* key) {
    const json& v = detail::require(j, key, path);
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) return kInf;
    return detail::number(v, path + "." + key);
  };
  try {
    if (kind == "lp") return SymmetricNorm::lp(param("p"));
    if (kind == "ky_fan") return SymmetricNorm::ky_fan(param("k"));
    if (kind == "lorentz") return SymmetricNorm::lorentz(param("alpha"));
    if (kind == "l1_cap_linf") return SymmetricNorm::l1_cap_linf();
    if (kind == "l1_plus_linf") return SymmetricNorm::l1_plus_linf();
    if (kind == "custom_two_atom")
      return SymmetricNorm::custom_two_atom(j.contains("c") ? detail::number(j["c"], path + ".c") : 3.0);
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + ".kind", "unknown norm kind '" + kind + "'");
}

inline Mat parse_block(const json& j, int d, const std::string& path) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(2 * d * d))
    throw ConfigError(path, "expected " + std::to_string(2 * d * d) + " numbers (row-major re, im pairs)");
  Mat m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      const auto k = static_cast<std::size_t>(2 * (r * d + c));
      m(r, c) = cplx(detail::number(j[k], path + "[" + std::to_string(k) + "]"),
                     detail::number(j[k + 1], path + "[" + std::to_string(k + 1) + "]"));
    }
  return m;
}

inline Element parse_element(const AlgebraPtr& alg, const json& j, const std::string& path = "element") {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(alg->num_blocks()))
    throw ConfigError(path, "expected one array per block (" + std::to_string(alg->num_blocks()) + ")");
  std::vector<Mat> blocks;
  for (int i = 0; i < alg->num_blocks(); ++i)
    blocks.push_back(parse_block(j[static_cast<std::size_t>(i)], alg->dim(i), path + "[" + std::to_string(i) + "]"));
  return Element(alg, std::move(blocks));
}

inline json element_to_json(const Element& x) {
  json out = json::array();
  for (const auto& b : x.blocks()) {
    json arr = json::array();
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index c = 0; c < b.cols(); ++c) {
        arr.push_back(b(r, c).real());
        arr.push_back(b(r, c).imag());
      }
    out.push_back(std::move(arr));
  }
  return out;
}

/// Dense matrix from the flat text format.
inline Mat read_dense_file(const std::string& file, int n, const std::string& path) {
  std::ifstream in(file);
  if (!in) throw ConfigError(path, "cannot open '" + file + "'");
  std::ostringstream clean;
  std::string line;
  while (std::getline(in, line)) clean << line.substr(0, line.find('#')) << '\n';
  std::istringstream tokens(clean.str());
  long long dim = 0;
  if (!(tokens >> dim)) throw ConfigError(path, "'" + file + "': missing dimension");
  if (dim != n) throw ConfigError(path, "'" + file + "': dimension " + std::to_string(dim) + ", algebra needs " + std::to_string(n));
  Mat m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double re = 0.0, im = 0.0;
      if (!(tokens >> re >> im))
        throw ConfigError(path, "'" + file + "': expected " + std::to_string(2 * n * n) + " numbers");
      m(r, c) = cplx(re, im);
    }
  std::string extra;
  if (tokens >> extra) throw ConfigError(path, "'" + file + "': trailing data");
  return m;
}

inline void write_dense_file(const std::string& file, const Mat& m) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write '" + file + "'");
  out.precision(17);
  out << m.rows() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "  " : "") << m(r, c).real() << ' ' << m(r, c).imag();
    out << '\n';
  }
}

/// `base_dir` resolves relative file references.
inline SuperOperator parse_operator(const AlgebraPtr& alg, const json& j, const std::string& path = "operator",
                                    const std::string& base_dir = "") {
  const json& tj = detail::require(j, "type", path);
  if (!tj.is_string()) throw ConfigError(path + ".type", "expected a string");
  const std::string type = tj.get<std::string>();
  const int n = alg->coord_dim();
  if (type == "structured")
    return SuperOperator::structured(parse_element(alg, detail::require(j, "a", path), path + ".a"),
                                     parse_element(alg, detail::require(j, "b", path), path + ".b"));
  if (type == "identity") return SuperOperator::identity(alg);
  if (type == "zero") return SuperOperator::zero(alg);
  if (type == "transpose") return SuperOperator::transpose_map(alg);
  if (type == "conjugation") {
    const Element u = parse_element(alg, detail::require(j, "u", path), path + ".u");
    const bool tr = j.value("transpose", false);
    return SuperOperator::from_map(alg, [&](const Element& x) { return u * (tr ? x.transpose() : x) * u.adjoint(); });
  }
  if (type == "dense") {
    if (j.contains("file")) {
      if (!j["file"].is_string()) throw ConfigError(path + ".file", "expected a string");
      std::string f = j["file"].get<std::string>();
      if (!base_dir.empty() && !f.empty() && f[0] != '/') f = base_dir + "/" + f;
      return SuperOperator::dense(alg, read_dense_file(f, n, path + ".file"));
    }
    const json& rows = detail::require(j, "matrix", path);
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n))
      throw ConfigError(path + ".matrix", "expected " + std::to_string(n) + " rows");
    Mat m(n, n);
    for (int r = 0; r < n; ++r) {
      const std::string p = path + ".matrix[" + std::to_string(r) + "]";
      const json& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(2 * n))
        throw ConfigError(p, "expected " + std::to_string(2 * n) + " numbers");
      for (int c = 0; c < n; ++c)
        m(r, c) = cplx(detail::number(row[static_cast<std::size_t>(2 * c)], p),
                       detail::number(row[static_cast<std::size_t>(2 * c + 1)], p));
    }
    return SuperOperator::dense(alg, std::move(m));
  }
  throw ConfigError(path + ".type", "unknown operator type '" + type + "'");
}

inline Tolerances parse_tolerances(const json& j, Tolerances t = {}, const std::string& path = "tolerances") {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (auto& [key, field] : std::initializer_list<std::pair<const char*, double*>>{
           {"check", &t.check}, {"structural", &t.structural}, {"fit", &t.fit}, {"oracle", &t.oracle}})
    if (j.contains(key)) {
      *field = detail::number(j[key], path + "." + key);
      if (!(*field > 0.0)) throw ConfigError(path + "." + key, "tolerance must be positive");
    }
  return t;
}

inline json tolerances_to_json(const Tolerances& t) {
  return {{"check", t.check}, {"structural", t.structural}, {"fit", t.fit}, {"oracle", t.oracle}};
}

inline json load_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("--config", "cannot open '" + file + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("parse error: ") + e.what());
  }
}

}  // namespace symop::io
