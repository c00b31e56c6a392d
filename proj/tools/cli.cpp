#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "radfrac/acceptance.hpp"
#include "radfrac/cauchy.hpp"
#include "radfrac/radial_io.hpp"

namespace radfrac::cli {

namespace {

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError(where + ": expected [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input \"" + path + "\"");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ValidationError("input \"" + path + "\" is malformed: " + e.what());
  }
}

bool is_matrix_document(const json& doc) {
  return doc.is_object() && doc.contains("shape") && doc["shape"] == "matrix";
}

FieldParams field_of(const RunConfig& c) {
  if (!c.q) throw ValidationError("this command needs --q");
  return FieldParams(*c.q);
}

AlphaOrder alpha_of(const RunConfig& c) {
  if (!c.alpha) throw ValidationError("this command needs --alpha");
  return AlphaOrder(*c.alpha);
}

LevelGrid grid_of(const RunConfig& c) {
  if (!c.n_min || !c.n_max) throw ValidationError("this command needs --n-min and --n-max");
  return LevelGrid(*c.n_min, *c.n_max);
}

void require_inputs(const RunConfig& c, std::size_t count, const std::string& names) {
  if (c.inputs.size() != count) {
    throw ValidationError(command_name(c.command) + " needs " + std::to_string(count) +
                          " --input documents (" + names + "), got " +
                          std::to_string(c.inputs.size()));
  }
}

/// --q, when given, must agree with the documents.
void check_q(const RunConfig& c, const FieldParams& fp, const std::string& path) {
  if (c.q && *c.q != fp.q()) {
    throw ValidationError("--q " + std::to_string(*c.q) + " does not match q = " +
                          std::to_string(fp.q()) + " in \"" + path + "\"");
  }
}

std::string real(double x) { return format_real(x); }

class Emitter {
 public:
  Emitter(const RunConfig& c, std::ostream& out) : config_(c), out_(out) {}

  void write(const std::string& text) {
    if (config_.output.empty()) {
      out_ << text;
      return;
    }
    std::ofstream file(config_.output);
    if (!file) throw ValidationError("cannot write output \"" + config_.output + "\"");
    file << text;
  }

  void write(const json& doc) { write(doc.dump(2) + "\n"); }

 private:
  const RunConfig& config_;
  std::ostream& out_;
};

int cmd_constants(const RunConfig& c, Emitter& emit) {
  const FieldParams fp = field_of(c);
  const AlphaOrder a = alpha_of(c);
  const RieszConstants k = constants(fp, a);
  const double gamma_alpha = gamma_K(fp, a.value());
  const double gamma_minus = gamma_K(fp, -a.value());
  const std::string notice = "alpha = 1: c_alpha is undefined, the logarithmic kernel applies";
  if (c.format == Format::Csv) {
    std::string s = "name,value\n";
    s += "q," + std::to_string(fp.q()) + "\n";
    s += "alpha," + real(a.value()) + "\n";
    s += "gamma_K_alpha," + real(gamma_alpha) + "\n";
    s += "gamma_K_minus_alpha," + real(gamma_minus) + "\n";
    s += "d_alpha," + real(k.d_alpha) + "\n";
    s += "c_alpha," + (k.c_alpha ? real(*k.c_alpha) : std::string("")) + "\n";
    emit.write(s);
    return kOk;
  }
  json doc;
  doc["q"] = fp.q();
  doc["alpha"] = a.value();
  doc["log_branch"] = a.is_log_branch();
  doc["gamma_K_alpha"] = gamma_alpha;
  doc["gamma_K_minus_alpha"] = gamma_minus;
  doc["d_alpha"] = k.d_alpha;
  if (k.c_alpha) {
    doc["c_alpha"] = *k.c_alpha;
  } else {
    doc["c_alpha"] = nullptr;
    doc["notice"] = notice;
  }
  if (a.near_pole(fp)) doc["warning"] = "c_alpha is close to its pole";
  emit.write(doc);
  return kOk;
}

int cmd_integrate(const RunConfig& c, Emitter& emit) {
  const FieldParams fp = field_of(c);
  const AlphaOrder a = alpha_of(c);
  const LevelGrid grid = grid_of(c);
  const double alpha = a.value();
  const std::vector<std::string> columns = {
      "ball_volume",         "sphere_volume",         "sector_fixed_digit",
      "sector_excluded_digit", "ball_power",          "sphere_shifted_power",
      "ball_log",            "sphere_shifted_log"};
  auto row = [&](int n) {
    return std::vector<double>{ball_volume(fp, n),
                               sphere_volume(fp, n),
                               sector_volume_fixed_digit(fp, n),
                               sector_volume_excluded_digit(fp, n),
                               ball_integral_power(fp, alpha, n),
                               sphere_integral_shifted_power(fp, alpha, n),
                               ball_integral_log(fp, n),
                               sphere_integral_shifted_log(fp, n)};
  };
  if (c.format == Format::Csv) {
    std::string s = "n,abs_x";
    for (const auto& col : columns) s += "," + col;
    s += "\n";
    for (int n = grid.n_min; n <= grid.n_max; ++n) {
      s += std::to_string(n) + "," + real(ball_volume(fp, n));
      for (double v : row(n)) s += "," + real(v);
      s += "\n";
    }
    emit.write(s);
    return kOk;
  }
  json rows = json::array();
  for (int n = grid.n_min; n <= grid.n_max; ++n) {
    json r;
    r["n"] = n;
    r["abs_x"] = ball_volume(fp, n);
    const auto values = row(n);
    for (std::size_t i = 0; i < columns.size(); ++i) r[columns[i]] = values[i];
    rows.push_back(std::move(r));
  }
  emit.write(json{{"q", fp.q()}, {"alpha", alpha}, {"rows", std::move(rows)}});
  return kOk;
}

int cmd_apply(const RunConfig& c, Emitter& emit, bool derivative) {
  require_inputs(c, 1, "u");
  const AlphaOrder a = alpha_of(c);
  const RadialFunction u = radial_from_json(read_document(c.inputs[0]));
  check_q(c, u.field(), c.inputs[0]);
  const RadialFunction out = derivative ? apply_D(u, a) : apply_I(u, a);
  if (c.format == Format::Csv) {
    emit.write(to_csv(out));
    return kOk;
  }
  json doc = to_json(out);
  doc["alpha"] = a.value();
  if (derivative) {
    const ZeroLimit z = zero_limit(out);
    doc["zero_limit"] = {{"value", complex_json(z.value)}, {"drift", z.drift}};
  }
  emit.write(doc);
  return kOk;
}

cd scalar_u0(const RunConfig& c) {
  if (c.u0.size() > 1) throw ValidationError("a vector u0 needs matrix mode (--dim > 1)");
  return c.u0.empty() ? cd{} : c.u0.front();
}

Eigen::VectorXcd vector_u0(const RunConfig& c, int dim) {
  if (c.u0.empty()) return Eigen::VectorXcd::Zero(dim);
  if (c.u0.size() == 1) return Eigen::VectorXcd::Constant(dim, c.u0.front());
  if (static_cast<int>(c.u0.size()) != dim) {
    throw ValidationError("u0 has " + std::to_string(c.u0.size()) + " entries, dim is " +
                          std::to_string(dim));
  }
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = c.u0[i];
  return v;
}

json report_json(double min_pivot, double residual_max, const std::vector<std::string>& warnings) {
  return {{"min_pivot", min_pivot}, {"residual_max", residual_max}, {"warnings", warnings}};
}

void warn(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

std::string table_row(int n, const FieldParams& fp, const std::vector<cd>& values) {
  std::string s = std::to_string(n) + "," + real(ball_volume(fp, n));
  for (cd z : values) s += "," + real(z.real()) + "," + real(z.imag());
  return s + "\n";
}

MatrixCauchyProblem matrix_problem(const RunConfig& c, const json& a_doc, const json& f_doc) {
  const AlphaOrder a = alpha_of(c);
  MatrixRadialFunction coef = matrix_from_json(a_doc);
  check_q(c, coef.field(), c.inputs[0]);
  if (c.dim != 1 && c.dim != coef.dim()) {
    throw ValidationError("--dim " + std::to_string(c.dim) + " does not match dim = " +
                          std::to_string(coef.dim()) + " in \"" + c.inputs[0] + "\"");
  }
  RadialVector f = vector_from_json(f_doc);
  const int dim = coef.dim();
  const FieldParams fp = coef.field();
  return {fp, a, std::move(coef), std::move(f), vector_u0(c, dim)};
}

CauchyProblem scalar_problem(const RunConfig& c, const json& a_doc, const json& f_doc) {
  const AlphaOrder a = alpha_of(c);
  RadialFunction coef = radial_from_json(a_doc);
  RadialFunction f = radial_from_json(f_doc);
  check_q(c, coef.field(), c.inputs[0]);
  const FieldParams fp = coef.field();
  return {fp, a, std::move(coef), std::move(f), scalar_u0(c)};
}

int cmd_solve(const RunConfig& c, Emitter& emit, std::ostream& err) {
  require_inputs(c, 2, "a, f");
  const double tol = c.pivot_tolerance.value_or(kSingularPivot);
  const json a_doc = read_document(c.inputs[0]);
  const json f_doc = read_document(c.inputs[1]);
  if (is_matrix_document(a_doc) || c.dim > 1) {
    const MatrixCauchyProblem p = matrix_problem(c, a_doc, f_doc);
    const MatrixSolveReport r = solve_matrix(p, tol);
    warn(err, r.warnings);
    if (c.format == Format::Csv) {
      std::string s = "n,abs_x";
      for (std::size_t i = 0; i < r.v.size(); ++i) {
        s += ",v" + std::to_string(i) + "_re,v" + std::to_string(i) + "_im";
      }
      for (std::size_t i = 0; i < r.u.size(); ++i) {
        s += ",u" + std::to_string(i) + "_re,u" + std::to_string(i) + "_im";
      }
      s += "\n";
      const LevelGrid& g = p.a.grid();
      for (int n = g.n_min; n <= g.n_max; ++n) {
        std::vector<cd> row;
        for (const auto& v : r.v) row.push_back(v.at(n));
        for (const auto& u : r.u) row.push_back(u.at(n));
        s += table_row(n, p.fp, row);
      }
      emit.write(s);
      return kOk;
    }
    emit.write(json{{"alpha", p.order.value()},
                    {"v", to_json(r.v)},
                    {"u", to_json(r.u)},
                    {"report", report_json(r.min_pivot, r.residual_max, r.warnings)}});
    return kOk;
  }

  const CauchyProblem p = scalar_problem(c, a_doc, f_doc);
  const SolveReport r = solve_direct(p, tol);
  warn(err, r.warnings);
  if (c.format == Format::Csv) {
    std::string s = "n,abs_x,v_re,v_im,u_re,u_im\n";
    for (int n = p.a.grid().n_min; n <= p.a.grid().n_max; ++n) {
      s += table_row(n, p.fp, {r.v.at(n), r.u.at(n)});
    }
    emit.write(s);
    return kOk;
  }
  json report = report_json(r.min_pivot, r.residual_max, r.warnings);
  report["head_truncation_bound"] = r.head_truncation_bound;
  emit.write(json{{"alpha", p.order.value()},
                  {"v", to_json(r.v)},
                  {"u", to_json(r.u)},
                  {"report", std::move(report)}});
  return kOk;
}

int cmd_residual(const RunConfig& c, Emitter& emit, std::ostream& err) {
  require_inputs(c, 3, "a, f, u");
  const json a_doc = read_document(c.inputs[0]);
  const json f_doc = read_document(c.inputs[1]);
  const json u_doc = read_document(c.inputs[2]);
  if (is_matrix_document(a_doc) || c.dim > 1) {
    const MatrixCauchyProblem p = matrix_problem(c, a_doc, f_doc);
    const double worst = residual_max(p, vector_from_json(u_doc));
    if (c.format == Format::Csv) {
      emit.write("residual_max\n" + real(worst) + "\n");
    } else {
      emit.write(json{{"alpha", p.order.value()}, {"residual_max", worst}});
    }
    return kOk;
  }
  const CauchyProblem p = scalar_problem(c, a_doc, f_doc);
  const RadialFunction u = radial_from_json(u_doc);
  const ResidualReport r = residual(p, u);
  warn(err, r.warnings);
  const LevelGrid& g = p.a.grid();
  if (c.format == Format::Csv) {
    std::string s = "n,abs_x,re,im,trusted\n";
    for (int n = g.n_min; n <= g.n_max; ++n) {
      const cd z = r.values[g.index(n)];
      s += std::to_string(n) + "," + real(ball_volume(p.fp, n)) + "," + real(z.real()) + "," +
           real(z.imag()) + "," + (r.trusted[g.index(n)] ? "1" : "0") + "\n";
    }
    emit.write(s);
    return kOk;
  }
  json levels = json::array();
  for (int n = g.n_min; n <= g.n_max; ++n) {
    levels.push_back({{"n", n},
                      {"abs_x", ball_volume(p.fp, n)},
                      {"value", complex_json(r.values[g.index(n)])},
                      {"trusted", static_cast<bool>(r.trusted[g.index(n)])}});
  }
  emit.write(json{{"alpha", p.order.value()},
                  {"margin", r.margin},
                  {"residual_max", r.residual_max},
                  {"levels", std::move(levels)},
                  {"warnings", r.warnings}});
  return kOk;
}

int cmd_verify(const RunConfig& c, Emitter& emit) {
  const auto results = acceptance::run_all();
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  if (c.format == Format::Json) {
    json list = json::array();
    for (const auto& r : results) {
      list.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    }
    emit.write(json{{"passed", all}, {"criteria", std::move(list)}});
  } else if (c.format == Format::Csv) {
    std::string s = "id,name,passed,detail\n";
    for (const auto& r : results) {
      s += std::to_string(r.id) + ",\"" + r.name + "\"," + (r.passed ? "1" : "0") + ",\"" +
           r.detail + "\"\n";
    }
    emit.write(s);
  } else {
    std::string s;
    for (const auto& r : results) s += acceptance::format(r) + "\n";
    emit.write(s);
  }
  return all ? kOk : kVerification;
}

void apply_config_file(const std::string& path, RunConfig& c) {
  const json doc = read_document(path);
  if (!doc.is_object()) throw ValidationError("config \"" + path + "\" must be an object");
  auto get_int = [&](const char* key) -> std::optional<int> {
    if (!doc.contains(key)) return std::nullopt;
    if (!doc[key].is_number_integer()) {
      throw ValidationError(std::string("config field \"") + key + "\" must be an integer");
    }
    return doc[key].get<int>();
  };
  if (doc.contains("command")) c.command = parse_command(doc["command"].get<std::string>());
  if (auto v = get_int("q")) c.q = v;
  if (auto v = get_int("n_min")) c.n_min = v;
  if (auto v = get_int("n_max")) c.n_max = v;
  if (auto v = get_int("dim")) c.dim = *v;
  if (doc.contains("alpha")) {
    if (!doc["alpha"].is_number()) throw ValidationError("config field \"alpha\" must be a number");
    c.alpha = doc["alpha"].get<double>();
  }
  if (doc.contains("tol")) {
    if (!doc["tol"].is_number()) throw ValidationError("config field \"tol\" must be a number");
    c.pivot_tolerance = doc["tol"].get<double>();
  }
  if (doc.contains("inputs")) c.inputs = doc["inputs"].get<std::vector<std::string>>();
  if (doc.contains("output")) c.output = doc["output"].get<std::string>();
  if (doc.contains("format")) {
    const auto f = doc["format"].get<std::string>();
    if (f != "json" && f != "csv") throw ValidationError("format must be json or csv");
    c.format = f == "csv" ? Format::Csv : Format::Json;
  }
  if (doc.contains("u0")) {
    const json& u0 = doc["u0"];
    c.u0.clear();
    if (u0.is_array() && !u0.empty() && u0[0].is_array()) {
      for (const auto& z : u0) c.u0.push_back(complex_from(z, "config u0"));
    } else {
      c.u0.push_back(complex_from(u0, "config u0"));
    }
  }
}

void validate_config(const RunConfig& c) {
  if (c.q) FieldParams check(*c.q);
  if (c.alpha) AlphaOrder check(*c.alpha);
  if (c.n_min && c.n_max) LevelGrid check(*c.n_min, *c.n_max);
  if (c.dim < 1) throw ValidationError("dim must be >= 1, got " + std::to_string(c.dim));
  if (c.pivot_tolerance && !(*c.pivot_tolerance >= 0.0)) {
    throw ValidationError("--tol must be >= 0");
  }
  for (cd z : c.u0) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw ValidationError("u0 is not finite");
    }
  }
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "constants") return Command::Constants;
  if (name == "integrate") return Command::Integrate;
  if (name == "apply-d") return Command::ApplyD;
  if (name == "apply-i") return Command::ApplyI;
  if (name == "solve") return Command::Solve;
  if (name == "residual") return Command::Residual;
  if (name == "verify") return Command::Verify;
  throw ValidationError("unknown command \"" + name + "\"");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::Constants: return "constants";
    case Command::Integrate: return "integrate";
    case Command::ApplyD: return "apply-d";
    case Command::ApplyI: return "apply-i";
    case Command::Solve: return "solve";
    case Command::Residual: return "residual";
    case Command::Verify: return "verify";
  }
  return "?";
}

RunConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Fractional operators and Cauchy problems for radial functions on local fields",
               "radfrac"};
  std::string command;
  int q = 0;
  double alpha = 0.0;
  int n_min = 0;
  int n_max = 0;
  std::vector<std::string> inputs;
  std::string output;
  std::string format;
  int dim = 1;
  double u0_re = 0.0;
  double u0_im = 0.0;
  double tol = 0.0;
  std::string config_path;

  app.add_option("command", command,
                 "constants | integrate | apply-d | apply-i | solve | residual | verify");
  auto* o_q = app.add_option("--q", q, "residue field cardinality");
  auto* o_alpha = app.add_option("--alpha", alpha, "order alpha > 0");
  auto* o_min = app.add_option("--n-min", n_min, "lowest level");
  auto* o_max = app.add_option("--n-max", n_max, "highest level");
  auto* o_in = app.add_option("--input", inputs, "input document (repeatable: a then f [then u])");
  auto* o_out = app.add_option("--output", output, "output path (default: stdout)");
  auto* o_fmt = app.add_option("--format", format, "json | csv")
                    ->check(CLI::IsMember({"json", "csv"}));
  auto* o_dim = app.add_option("--dim", dim, "matrix dimension");
  auto* o_re = app.add_option("--u0-re", u0_re, "initial value, real part");
  auto* o_im = app.add_option("--u0-im", u0_im, "initial value, imaginary part");
  auto* o_tol = app.add_option("--tol", tol, "singular-pivot tolerance (default 1e-9)");
  app.add_option("--config", config_path, "JSON config file; flags take precedence");

  app.parse(argc, argv);

  RunConfig c;
  bool have_command = false;
  if (!config_path.empty()) {
    const json doc = read_document(config_path);
    have_command = doc.is_object() && doc.contains("command");
    apply_config_file(config_path, c);
  }
  if (!command.empty()) {
    c.command = parse_command(command);
    have_command = true;
  }
  if (!have_command) throw ValidationError("no command given");
  if (o_q->count()) c.q = q;
  if (o_alpha->count()) c.alpha = alpha;
  if (o_min->count()) c.n_min = n_min;
  if (o_max->count()) c.n_max = n_max;
  if (o_in->count()) c.inputs = inputs;
  if (o_out->count()) c.output = output;
  if (o_fmt->count()) c.format = format == "csv" ? Format::Csv : Format::Json;
  if (o_dim->count()) c.dim = dim;
  if (o_re->count() || o_im->count()) {
    const cd from_file = c.u0.size() == 1 ? c.u0.front() : cd{};
    c.u0 = {cd(o_re->count() ? u0_re : from_file.real(), o_im->count() ? u0_im : from_file.imag())};
  }
  if (o_tol->count()) c.pivot_tolerance = tol;
  validate_config(c);
  return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Emitter emit(config, out);
  try {
    validate_config(config);
    switch (config.command) {
      case Command::Constants: return cmd_constants(config, emit);
      case Command::Integrate: return cmd_integrate(config, emit);
      case Command::ApplyD: return cmd_apply(config, emit, true);
      case Command::ApplyI: return cmd_apply(config, emit, false);
      case Command::Solve: return cmd_solve(config, emit, err);
      case Command::Residual: return cmd_residual(config, emit, err);
      case Command::Verify: return cmd_verify(config, emit);
    }
  } catch (const SingularPivotError& e) {
    err << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const NoConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kValidation;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_args(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << "usage: radfrac <command> [--q Q] [--alpha A] [--n-min N] [--n-max N]\n"
           "               [--input PATH]... [--output PATH] [--format json|csv]\n"
           "               [--dim D] [--u0-re X] [--u0-im Y] [--tol T] [--config PATH]\n"
           "commands: constants integrate apply-d apply-i solve residual verify\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return run(config, out, err);
}

}  // namespace radfrac::cli
