#include "radfrac/radial_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace radfrac {

namespace {

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ValidationError(std::string("document is missing field \"") + key + "\"");
  }
  return doc.at(key);
}

double real_from_json(const json& j, const std::string& where) {
  if (!j.is_number()) {
    throw ValidationError(where + ": expected a number");
  }
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ValidationError(where + ": non-finite number");
  return x;
}

cd complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw ValidationError(where + ": expected [re, im]");
  }
  return {real_from_json(j[0], where), real_from_json(j[1], where)};
}

int int_from_json(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return j.get<int>();
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd matrix_from(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw ValidationError(where + ": expected " + std::to_string(dim) + " rows");
  }
  Eigen::MatrixXcd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != dim) {
      throw ValidationError(where + ": row " + std::to_string(i) + " has wrong length");
    }
    for (int k = 0; k < dim; ++k) m(i, k) = complex_from_json(j[i][k], where);
  }
  return m;
}

struct Header {
  FieldParams fp;
  LevelGrid grid;
};

Header header_from_json(const json& doc) {
  const int q = int_from_json(field(doc, "q"), "q");
  const int lo = int_from_json(field(doc, "n_min"), "n_min");
  const int hi = int_from_json(field(doc, "n_max"), "n_max");
  return {FieldParams(q), LevelGrid(lo, hi)};
}

json header_to_json(const FieldParams& fp, const LevelGrid& grid) {
  json doc;
  doc["q"] = fp.q();
  doc["n_min"] = grid.n_min;
  doc["n_max"] = grid.n_max;
  return doc;
}

}  // namespace

json to_json(const TailModel& t) {
  json doc;
  switch (t.kind()) {
    case TailModel::Kind::Zero:
      doc["kind"] = "zero";
      return doc;
    case TailModel::Kind::Constant:
      doc["kind"] = "constant";
      doc["c"] = complex_to_json(t.offset());
      return doc;
    case TailModel::Kind::Power:
      doc["kind"] = "power";
      break;
    case TailModel::Kind::Log:
      doc["kind"] = "log";
      break;
    case TailModel::Kind::Mixed:
      doc["kind"] = "mixed";
      break;
  }
  doc["c"] = complex_to_json(t.offset());
  if (t.slope() != cd{}) doc["slope"] = complex_to_json(t.slope());
  if (!t.terms().empty()) {
    json terms = json::array();
    for (const auto& term : t.terms()) {
      terms.push_back({{"scale", complex_to_json(term.scale)},
                       {"exponent", term.exponent}});
    }
    doc["terms"] = std::move(terms);
  }
  return doc;
}

TailModel tail_from_json(const json& doc) {
  const json& kind_j = field(doc, "kind");
  if (!kind_j.is_string()) throw ValidationError("tail.kind must be a string");
  const auto kind = kind_j.get<std::string>();
  if (kind == "zero") return TailModel::zero();
  if (kind == "constant") {
    return TailModel::constant(complex_from_json(field(doc, "c"), "tail.c"));
  }
  if (kind != "power" && kind != "log" && kind != "mixed") {
    throw ValidationError("unknown tail kind \"" + kind + "\"");
  }
  const cd offset = doc.contains("c") ? complex_from_json(doc["c"], "tail.c") : cd{};
  cd slope{};
  std::vector<PowerTerm> terms;
  if (kind != "power") {
    slope = complex_from_json(field(doc, "slope"), "tail.slope");
  }
  if (kind != "log") {
    const json& terms_j = field(doc, "terms");
    if (!terms_j.is_array()) throw ValidationError("tail.terms must be an array");
    for (const auto& tj : terms_j) {
      terms.push_back({complex_from_json(field(tj, "scale"), "tail.terms.scale"),
                       real_from_json(field(tj, "exponent"), "tail.terms.exponent")});
    }
  }
  return TailModel::general(offset, slope, std::move(terms));
}

json to_json(const RadialFunction& u) {
  json doc = header_to_json(u.field(), u.grid());
  json values = json::array();
  for (Eigen::Index i = 0; i < u.values().size(); ++i) {
    values.push_back(complex_to_json(u.values()[i]));
  }
  doc["values"] = std::move(values);
  doc["value_at_zero"] = complex_to_json(u.value_at_zero());
  doc["tail"] = to_json(u.tail());
  return doc;
}

RadialFunction radial_from_json(const json& doc) {
  const Header h = header_from_json(doc);
  const json& values_j = field(doc, "values");
  if (!values_j.is_array()) throw ValidationError("values must be an array");
  if (static_cast<int>(values_j.size()) != h.grid.size()) {
    throw ValidationError("values has " + std::to_string(values_j.size()) +
                          " entries, grid [" + std::to_string(h.grid.n_min) + ", " +
                          std::to_string(h.grid.n_max) + "] needs " +
                          std::to_string(h.grid.size()));
  }
  Eigen::VectorXcd values(h.grid.size());
  for (int i = 0; i < h.grid.size(); ++i) {
    values[i] = complex_from_json(values_j[i],
                                  "values at level " + std::to_string(h.grid.n_min + i));
  }
  const cd zero = complex_from_json(field(doc, "value_at_zero"), "value_at_zero");
  return RadialFunction(h.fp, h.grid, std::move(values), zero,
                        tail_from_json(field(doc, "tail")));
}

json to_json(const MatrixRadialFunction& a) {
  json doc = header_to_json(a.field(), a.grid());
  doc["shape"] = "matrix";
  doc["dim"] = a.dim();
  json values = json::array();
  for (const auto& m : a.values()) values.push_back(matrix_to_json(m));
  doc["values"] = std::move(values);
  doc["value_at_zero"] = matrix_to_json(a.value_at_zero());
  json tail;
  if (a.tail().is_constant) {
    tail["kind"] = "constant";
    tail["c"] = matrix_to_json(a.tail().c);
  } else {
    tail["kind"] = "zero";
  }
  doc["tail"] = std::move(tail);
  return doc;
}

MatrixRadialFunction matrix_from_json(const json& doc) {
  const Header h = header_from_json(doc);
  const int dim = int_from_json(field(doc, "dim"), "dim");
  if (dim < 1) throw ValidationError("dim must be >= 1");
  const json& values_j = field(doc, "values");
  if (!values_j.is_array() || static_cast<int>(values_j.size()) != h.grid.size()) {
    throw ValidationError("values must hold one matrix per grid level");
  }
  std::vector<Eigen::MatrixXcd> values;
  for (int i = 0; i < h.grid.size(); ++i) {
    values.push_back(
        matrix_from(values_j[i], dim, "values at level " + std::to_string(h.grid.n_min + i)));
  }
  Eigen::MatrixXcd zero = matrix_from(field(doc, "value_at_zero"), dim, "value_at_zero");
  const json& tail_j = field(doc, "tail");
  const auto kind = field(tail_j, "kind").get<std::string>();
  MatrixTail tail;
  if (kind == "constant") {
    tail = MatrixTail::constant(matrix_from(field(tail_j, "c"), dim, "tail.c"));
  } else if (kind != "zero") {
    throw ValidationError("matrix tail kind must be zero or constant");
  }
  return MatrixRadialFunction(h.fp, h.grid, dim, std::move(values), std::move(zero),
                              std::move(tail));
}

json to_json(const RadialVector& v) {
  if (v.empty()) throw ValidationError("empty radial vector");
  json doc = header_to_json(v.front().field(), v.front().grid());
  doc["shape"] = "vector";
  doc["dim"] = static_cast<int>(v.size());
  json values = json::array();
  for (int n = v.front().grid().n_min; n <= v.front().grid().n_max; ++n) {
    json level = json::array();
    for (const auto& c : v) level.push_back(complex_to_json(c.at(n)));
    values.push_back(std::move(level));
  }
  doc["values"] = std::move(values);
  json zero = json::array();
  json tails = json::array();
  for (const auto& c : v) {
    zero.push_back(complex_to_json(c.value_at_zero()));
    tails.push_back(to_json(c.tail()));
  }
  doc["value_at_zero"] = std::move(zero);
  doc["tail"] = std::move(tails);
  return doc;
}

RadialVector vector_from_json(const json& doc) {
  const Header h = header_from_json(doc);
  const int dim = int_from_json(field(doc, "dim"), "dim");
  if (dim < 1) throw ValidationError("dim must be >= 1");
  const json& values_j = field(doc, "values");
  const json& zero_j = field(doc, "value_at_zero");
  const json& tail_j = field(doc, "tail");
  if (!values_j.is_array() || static_cast<int>(values_j.size()) != h.grid.size()) {
    throw ValidationError("values must hold one vector per grid level");
  }
  if (!zero_j.is_array() || static_cast<int>(zero_j.size()) != dim) {
    throw ValidationError("value_at_zero must hold dim entries");
  }
  if (!tail_j.is_array() || static_cast<int>(tail_j.size()) != dim) {
    throw ValidationError("vector tail must be an array of dim tail objects");
  }
  RadialVector out;
  for (int c = 0; c < dim; ++c) {
    Eigen::VectorXcd values(h.grid.size());
    for (int i = 0; i < h.grid.size(); ++i) {
      const json& level = values_j[i];
      if (!level.is_array() || static_cast<int>(level.size()) != dim) {
        throw ValidationError("values at level " + std::to_string(h.grid.n_min + i) +
                              " must hold dim entries");
      }
      values[i] = complex_from_json(level[c], "values at level " +
                                                   std::to_string(h.grid.n_min + i));
    }
    out.emplace_back(h.fp, h.grid, std::move(values),
                     complex_from_json(zero_j[c], "value_at_zero"),
                     tail_from_json(tail_j[c]));
  }
  return out;
}

std::string serialize(const RadialFunction& u) { return to_json(u).dump(); }

RadialFunction deserialize(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed document: ") + e.what());
  }
  return radial_from_json(doc);
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const RadialFunction& u) {
  std::ostringstream out;
  out << "n,abs_x,re,im\n";
  for (int n = u.grid().n_min; n <= u.grid().n_max; ++n) {
    const cd z = u.at(n);
    out << n << ',' << format_real(ball_volume(u.field(), n)) << ','
        << format_real(z.real()) << ',' << format_real(z.imag()) << '\n';
  }
  return out.str();
}

}  // namespace radfrac
