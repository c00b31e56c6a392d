#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "radfrac/radial_io.hpp"

using namespace radfrac;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "radfrac");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("radfrac_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const json& doc) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << doc.dump();
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json decaying_doc(const FieldParams& fp, const LevelGrid& g, double scale, double rate) {
  Eigen::VectorXcd v(g.size());
  for (int n = g.n_min; n <= g.n_max; ++n) {
    v[g.index(n)] = scale * (n > 0 ? fp.pow(-rate * n) : 1.0) * cd(1.0, 0.1 * n);
  }
  return to_json(make_radial(fp, g, v, scale, TailModel::zero()));
}

}  // namespace

TEST_CASE("constants") {
  const Run r = run_cli({"constants", "--q", "2", "--alpha", "2"});
  REQUIRE(r.code == cli::kOk);
  const json doc = json::parse(r.out);
  CHECK(doc["d_alpha"].get<double>() == doctest::Approx(-24.0 / 7.0).epsilon(1e-15));
  CHECK(doc["c_alpha"].get<double>() == -0.75);

  const Run log = run_cli({"constants", "--q", "3", "--alpha", "1"});
  REQUIRE(log.code == cli::kOk);
  const json ld = json::parse(log.out);
  CHECK(ld["c_alpha"].is_null());
  CHECK(ld["log_branch"].get<bool>());
  CHECK(ld.contains("notice"));
}

TEST_CASE("validation errors") {
  CHECK(run_cli({"constants", "--q", "1", "--alpha", "2"}).code == cli::kValidation);
  CHECK(run_cli({"constants", "--q", "2", "--alpha", "-1"}).code == cli::kValidation);
  CHECK(run_cli({"constants", "--q", "2"}).code == cli::kValidation);
  CHECK(run_cli({"frobnicate"}).code == cli::kValidation);
  CHECK(run_cli({"integrate", "--q", "2", "--alpha", "1", "--n-min", "3", "--n-max", "1"}).code ==
        cli::kValidation);
  CHECK(run_cli({"apply-i", "--alpha", "1", "--input", "/nonexistent/u.json"}).code ==
        cli::kValidation);
  const Run bad = run_cli({"constants", "--q", "0", "--alpha", "2"});
  CHECK(bad.err.find("q must be >= 2") != std::string::npos);
}

TEST_CASE("integrate") {
  const Run r = run_cli({"integrate", "--q", "3", "--alpha", "2", "--n-min", "0", "--n-max", "1"});
  REQUIRE(r.code == cli::kOk);
  const json doc = json::parse(r.out);
  REQUIRE(doc["rows"].size() == 2);
  CHECK(doc["rows"][0]["ball_power"].get<double>() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(doc["rows"][0]["sphere_shifted_power"].get<double>() ==
        doctest::Approx(5.0 / 12.0).epsilon(1e-15));
  CHECK(doc["rows"][1]["ball_volume"].get<double>() == 3.0);
}

TEST_CASE("apply-i on the constant 1") {
  TempDir dir;
  const FieldParams fp(3);
  const std::string in = dir.write("one.json", to_json(constant_function(fp, LevelGrid(-5, 5), 1.0)));
  const Run r = run_cli({"apply-i", "--alpha", "0.5", "--input", in});
  REQUIRE(r.code == cli::kOk);
  const RadialFunction out = radial_from_json(json::parse(r.out));
  CHECK(out.values().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(out.value_at_zero() == cd(0.0));
  CHECK(out.tail().vanishes());
  CHECK(json::parse(r.out)["alpha"].get<double>() == 0.5);

  CHECK(run_cli({"apply-i", "--q", "2", "--alpha", "0.5", "--input", in}).code == cli::kValidation);

  const Run d = run_cli({"apply-d", "--alpha", "0.5", "--input", in});
  REQUIRE(d.code == cli::kOk);
  CHECK(json::parse(d.out).contains("zero_limit"));
}

TEST_CASE("solve with a singular pivot") {
  TempDir dir;
  const FieldParams fp(2);
  const LevelGrid g(-3, 3);
  const std::string a = dir.write("a.json", to_json(constant_function(fp, g, -2.0)));
  const std::string f = dir.write("f.json", to_json(constant_function(fp, g, 0.0)));
  const Run r = run_cli({"solve", "--alpha", "1", "--input", a, "--input", f});
  CHECK(r.code == cli::kSolver);
  CHECK(r.err.find("level 0") != std::string::npos);
}

TEST_CASE("solve and residual") {
  TempDir dir;
  const FieldParams fp(2);
  const LevelGrid g(-30, 30);
  const std::string a = dir.write("a.json", decaying_doc(fp, g, 0.2, 2.5));
  const std::string f = dir.write("f.json", decaying_doc(fp, g, 1.0, 0.5));
  const std::string out = dir.file("solution.json");
  const Run r = run_cli({"solve", "--alpha", "2", "--input", a, "--input", f, "--u0-re", "0.5",
                         "--output", out});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.empty());
  const json sol = json::parse(slurp(out));
  CHECK(sol["report"]["residual_max"].get<double>() <= 1e-8);
  const RadialFunction u = radial_from_json(sol["u"]);
  CHECK(u.value_at_zero() == cd(0.5));

  const std::string u_path = dir.write("u.json", sol["u"]);
  const Run res = run_cli({"residual", "--alpha", "2", "--input", a, "--input", f, "--u0-re", "0.5",
                           "--input", u_path});
  REQUIRE(res.code == cli::kOk);
  const json rd = json::parse(res.out);
  CHECK(rd["margin"].get<int>() == 10);
  CHECK(rd["levels"].size() == static_cast<std::size_t>(g.size()));
  // The stored u loses the small values of I v; the solver's own residual
  // avoids that, the re-read one may not.
  CHECK(rd["residual_max"].get<double>() <= 1e-6);

  CHECK(run_cli({"residual", "--alpha", "2", "--input", a, "--input", f}).code == cli::kValidation);
}

TEST_CASE("matrix solve") {
  TempDir dir;
  const FieldParams fp(3);
  const LevelGrid g(-5, 5);
  Eigen::MatrixXcd m(2, 2);
  m << 0.1, 0.02, 0.0, -0.05;
  const MatrixRadialFunction a(fp, g, 2, std::vector<Eigen::MatrixXcd>(g.size(), m), m,
                               MatrixTail::constant(m));
  const RadialVector f = {constant_function(fp, g, 1.0), sphere_indicator(fp, 0)};
  RadialVector fw = {f[0], widen(f[1], -5, 5)};
  const std::string ap = dir.write("a.json", to_json(a));
  const std::string fpath = dir.write("f.json", to_json(fw));
  const Run r = run_cli({"solve", "--alpha", "1.5", "--input", ap, "--input", fpath});
  REQUIRE(r.code == cli::kOk);
  const json doc = json::parse(r.out);
  CHECK(doc["v"]["shape"] == "vector");
  CHECK(vector_from_json(doc["u"]).size() == 2);

  CHECK(run_cli({"solve", "--alpha", "1.5", "--dim", "3", "--input", ap, "--input", fpath}).code ==
        cli::kValidation);
}

TEST_CASE("determinism and format consistency") {
  TempDir dir;
  const FieldParams fp(3);
  const LevelGrid g(-12, 12);
  const std::string a = dir.write("a.json", decaying_doc(fp, g, 0.3, 1.0));
  const std::string f = dir.write("f.json", decaying_doc(fp, g, 1.0, 0.5));
  const std::vector<std::string> base = {"solve", "--alpha", "0.5", "--input", a, "--input", f};

  const Run first = run_cli(base);
  const Run second = run_cli(base);
  REQUIRE(first.code == cli::kOk);
  CHECK(first.out == second.out);

  std::vector<std::string> csv_args = base;
  csv_args.insert(csv_args.end(), {"--format", "csv"});
  const Run csv = run_cli(csv_args);
  REQUIRE(csv.code == cli::kOk);

  const json doc = json::parse(first.out);
  const RadialFunction v = radial_from_json(doc["v"]);
  const RadialFunction u = radial_from_json(doc["u"]);
  std::istringstream lines(csv.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "n,abs_x,v_re,v_im,u_re,u_im");
  int rows = 0;
  while (std::getline(lines, line)) {
    int n;
    double abs_x, vr, vi, ur, ui;
    REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf", &n, &abs_x, &vr, &vi, &ur, &ui) == 6);
    CHECK(cd(vr, vi) == v.at(n));
    CHECK(cd(ur, ui) == u.at(n));
    ++rows;
  }
  CHECK(rows == g.size());
}

TEST_CASE("config file") {
  TempDir dir;
  const std::string cfg = dir.write("cfg.json", json{{"command", "constants"}, {"q", 2}, {"alpha", 3.0}});
  const Run from_file = run_cli({"--config", cfg});
  REQUIRE(from_file.code == cli::kOk);
  CHECK(json::parse(from_file.out)["alpha"].get<double>() == 3.0);

  const Run flag_wins = run_cli({"--config", cfg, "--alpha", "2"});
  REQUIRE(flag_wins.code == cli::kOk);
  CHECK(json::parse(flag_wins.out)["c_alpha"].get<double>() == -0.75);

  const std::string broken = dir.write("broken.json", json{{"command", "constants"}, {"q", "two"}});
  CHECK(run_cli({"--config", broken}).code == cli::kValidation);
}

TEST_CASE("csv constants") {
  const Run r = run_cli({"constants", "--q", "2", "--alpha", "2", "--format", "csv"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("c_alpha,-0.75\n") != std::string::npos);
  CHECK(r.out.find("d_alpha,-3.4285714285714284\n") != std::string::npos);
}

TEST_CASE("verify") {
  const Run r = run_cli({"verify"});
  CHECK(r.code == cli::kOk);
  int lines = 0;
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line); ++lines) CHECK(line.rfind("PASS", 0) == 0);
  CHECK(lines == 10);
  const Run j = run_cli({"verify", "--format", "json"});
  CHECK(json::parse(j.out)["passed"].get<bool>());
}
