// Command-line driver: moments, bounds, breuer-major, mc, verify.
// JSON config in, CSV + JSON out; identical config + seed gives byte-identical
// payloads. Exit codes: 0 success, 1 verification/validation failure,
// 2 configuration or I/O errors.

#include <CLI11.hpp>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "freeprob/breuer_major.hpp"
#include "freeprob/gue.hpp"
#include "freeprob/kernel.hpp"
#include "freeprob/ncpoly.hpp"
#include "freeprob/rng.hpp"
#include "freeprob/spd.hpp"
#include "freeprob/stein.hpp"
#include "freeprob/verify.hpp"
#include "freeprob/wigner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string digest_hex(const json& config, std::uint64_t seed) {
  std::uint64_t h = fnv1a(config.dump() + "#" + std::to_string(seed));
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, h, 16);
  return std::string(buf, res.ptr);
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a matrix");
  const int n = static_cast<int>(j.size());
  Eigen::MatrixXd m(n, static_cast<int>(j[0].size()));
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != m.cols())
      throw ConfigError(where + ": ragged matrix rows");
    for (int k = 0; k < m.cols(); ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

std::vector<int> parse_indices(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an index list");
  std::vector<int> out;
  for (const auto& v : j) out.push_back(v.get<int>());
  return out;
}

freeprob::Kernel parse_kernel(const json& j, const std::string& where) {
  check_keys(j, {"type", "h", "factors", "order", "grid", "seed", "mirror", "path", "data",
                 "scale", "symmetrize"},
             where);
  const std::string type = j.at("type").get<std::string>();
  freeprob::Kernel k;
  if (type == "rank-one") {
    const double h = j.at("h").get<double>();
    std::vector<Eigen::VectorXcd> factors;
    for (const auto& f : j.at("factors")) {
      Eigen::VectorXcd v(f.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f[i].get<double>();
      factors.push_back(std::move(v));
    }
    k = freeprob::rank_one(factors, h);
  } else if (type == "random") {
    k = freeprob::random_kernel(j.at("order").get<int>(), j.at("grid").get<int>(),
                                j.at("h").get<double>(), j.at("seed").get<std::uint64_t>(),
                                j.value("mirror", false));
  } else if (type == "file") {
    std::ifstream in(j.at("path").get<std::string>());
    if (!in) throw ConfigError(where + ": cannot open kernel file");
    k = freeprob::read_kernel(in);
  } else if (type == "text") {
    k = freeprob::kernel_from_text(j.at("data").get<std::string>());
  } else {
    throw ConfigError(where + ": unknown kernel type '" + type + "'");
  }
  if (j.value("symmetrize", false)) k = freeprob::mirror_symmetrize(k);
  if (j.contains("scale")) k *= freeprob::Complex(j["scale"].get<double>());
  return k;
}

void write_file(const fs::path& path, const std::string& payload) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << payload;
}

struct Emitter {
  fs::path dir;
  std::string command;
  std::string digest;
  std::uint64_t seed;

  void emit(const json& body, const std::string& csv_rows) const {
    fs::create_directories(dir);
    json out;
    out["command"] = command;
    out["config_digest"] = digest;
    out["seed"] = seed;
    out["result"] = body;
    write_file(dir / (command + ".json"), out.dump(2) + "\n");
    std::string csv = "# command=" + command + " config_digest=" + digest +
                      " seed=" + std::to_string(seed) + "\n" + csv_rows;
    write_file(dir / (command + ".csv"), csv);
  }
};

// ---- moments ---------------------------------------------------------------

int run_moments(const json& cfg, const Emitter& emit) {
  check_keys(cfg, {"seed", "tasks"}, "moments config");
  if (!cfg.contains("tasks")) throw ConfigError("moments config: missing 'tasks'");
  json results = json::array();
  std::string csv = "index,type,value_re,value_im\n";
  int idx = 0;
  for (const auto& task : cfg["tasks"]) {
    const std::string type = task.value("type", "");
    freeprob::Complex value;
    if (type == "semicircle") {
      check_keys(task, {"type", "k", "var"}, "semicircle task");
      value = freeprob::semicircle_moment(task.at("k").get<int>(), task.value("var", 1.0));
    } else if (type == "catalan") {
      check_keys(task, {"type", "m"}, "catalan task");
      value = static_cast<double>(freeprob::catalan(task.at("m").get<int>()));
    } else if (type == "family") {
      check_keys(task, {"type", "covariance", "indices"}, "family task");
      value = freeprob::family_moment(parse_matrix(task.at("covariance"), "family covariance"),
                                      parse_indices(task.at("indices"), "family indices"));
    } else if (type == "q-family") {
      check_keys(task, {"type", "covariance", "q", "indices"}, "q-family task");
      value = freeprob::q_family_moment(parse_matrix(task.at("covariance"), "q-family covariance"),
                                        task.at("q").get<double>(),
                                        parse_indices(task.at("indices"), "q-family indices"));
    } else if (type == "expectation") {
      check_keys(task, {"type", "n_vars", "poly", "covariance", "q"}, "expectation task");
      const int n_vars = task.at("n_vars").get<int>();
      freeprob::NcPolynomial p =
          freeprob::parse_polynomial(task.at("poly").get<std::string>(), n_vars);
      freeprob::FamilyLaw law{parse_matrix(task.at("covariance"), "expectation covariance"), {}};
      if (task.contains("q")) law.q = task["q"].get<double>();
      value = freeprob::expectation(p, law);
      // round-trip discipline: what we computed is what a reparse would compute
      freeprob::NcPolynomial reparsed = freeprob::parse_polynomial(freeprob::to_string(p), n_vars);
      if (!(p - reparsed).is_zero()) throw std::runtime_error("polynomial text round-trip failed");
    } else {
      throw ConfigError("moments task " + std::to_string(idx) + ": unknown type '" + type + "'");
    }
    json r;
    r["index"] = idx;
    r["type"] = type;
    r["value_re"] = value.real();
    r["value_im"] = value.imag();
    results.push_back(r);
    csv += std::to_string(idx) + "," + type + "," + fmt(value.real()) + "," + fmt(value.imag()) +
           "\n";
    ++idx;
  }
  emit.emit(results, csv);
  return 0;
}

// ---- bounds ----------------------------------------------------------------

int run_bounds(const json& cfg, const Emitter& emit) {
  check_keys(cfg, {"seed", "components"}, "bounds config");
  if (!cfg.contains("components")) throw ConfigError("bounds config: missing 'components'");
  std::vector<std::pair<int, freeprob::Kernel>> comps;
  int ci = 0;
  for (const auto& c : cfg["components"]) {
    check_keys(c, {"order", "kernel"}, "component " + std::to_string(ci));
    comps.emplace_back(c.at("order").get<int>(),
                       parse_kernel(c.at("kernel"), "component " + std::to_string(ci) + " kernel"));
    ++ci;
  }
  freeprob::WignerVector v = freeprob::WignerVector::from_components(std::move(comps));
  freeprob::BoundReport rep = freeprob::bound_report(v);

  json body;
  body["orders"] = rep.orders;
  body["x"] = rep.x;
  body["y"] = rep.y;
  auto mat_to_json = [](const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    return rows;
  };
  body["gram"] = mat_to_json(rep.gram);
  body["gamma_discrepancy_sq"] = mat_to_json(rep.gamma_discrepancy_sq);
  json terms = json::array();
  for (std::size_t i = 0; i < rep.gamma_terms.size(); ++i)
    for (std::size_t j = 0; j < rep.gamma_terms[i].size(); ++j) {
      const auto& e = rep.gamma_terms[i][j];
      json t;
      t["i"] = i;
      t["j"] = j;
      t["a"] = e.a;
      t["total"] = e.total;
      if (e.has_constant) {
        t["constant_re"] = e.constant.real();
        t["constant_im"] = e.constant.imag();
      }
      json parts = json::array();
      for (const auto& term : e.terms) {
        json p;
        p["m"] = term.m;
        p["l"] = term.l;
        p["left_order"] = term.left_order;
        p["right_order"] = term.right_order;
        p["norm_sq"] = term.norm_sq;
        parts.push_back(p);
      }
      t["terms"] = parts;
      terms.push_back(t);
    }
  body["gamma_terms"] = terms;
  body["stein_upper"] = rep.stein_upper;
  body["m_of_f"] = rep.m_of_f;
  body["dw_thm8"] = rep.dw_thm8;
  body["dw_lemma"] = rep.dw_lemma;
  body["hsi_rhs"] = rep.hsi_rhs;
  body["lsi_rhs"] = rep.lsi_rhs;

  std::string csv = "field,value\n";
  csv += "stein_upper," + fmt(rep.stein_upper) + "\n";
  csv += "m_of_f," + fmt(rep.m_of_f) + "\n";
  csv += "dw_thm8," + fmt(rep.dw_thm8) + "\n";
  csv += "dw_lemma," + fmt(rep.dw_lemma) + "\n";
  csv += "hsi_rhs," + fmt(rep.hsi_rhs) + "\n";
  csv += "lsi_rhs," + fmt(rep.lsi_rhs) + "\n";
  for (std::size_t i = 0; i < rep.x.size(); ++i) {
    csv += "x_" + std::to_string(i + 1) + "," + fmt(rep.x[i]) + "\n";
    csv += "y_" + std::to_string(i + 1) + "," + fmt(rep.y[i]) + "\n";
  }
  emit.emit(body, csv);
  return 0;
}

// ---- breuer-major ----------------------------------------------------------

int run_breuer_major(const json& cfg, const Emitter& emit) {
  check_keys(cfg, {"seed", "H", "q", "times", "n_list", "tail_tol"}, "breuer-major config");
  for (const char* key : {"H", "q", "times", "n_list"})
    if (!cfg.contains(key)) throw ConfigError(std::string("breuer-major config: missing '") + key + "'");
  freeprob::BmConfig base;
  base.hurst = cfg["H"].get<double>();
  base.rank = cfg["q"].get<int>();
  base.tail_tol = cfg.value("tail_tol", 1e-10);
  for (const auto& t : cfg["times"]) base.times.push_back(t.get<double>());
  std::vector<long long> ns;
  for (const auto& n : cfg["n_list"]) ns.push_back(n.get<long long>());

  freeprob::BmRateResult res = freeprob::bm_rate_experiment(base, ns);
  const double rate = freeprob::theoretical_rate(base.rank, base.hurst);

  const std::size_t d = res.points.front().x.size();
  std::string csv = "n";
  for (std::size_t i = 1; i <= d; ++i) csv += ",x_" + std::to_string(i);
  csv += ",M,dw_thm8,slope\n";
  json points = json::array();
  for (const auto& p : res.points) {
    csv += std::to_string(p.n);
    for (double x : p.x) csv += "," + fmt(x);
    csv += "," + fmt(p.m) + "," + fmt(p.dw_thm8) + "," + fmt(p.slope) + "\n";
    json jp;
    jp["n"] = p.n;
    jp["x"] = p.x;
    jp["M"] = p.m;
    jp["dw_thm8"] = p.dw_thm8;
    jp["slope"] = p.slope;
    points.push_back(jp);
  }
  json body;
  body["H"] = base.hurst;
  body["q"] = base.rank;
  body["points"] = points;
  body["last_slope"] = res.last_slope;
  body["aitken_slope"] = res.aitken_slope;
  body["theoretical_rate"] = rate;
  emit.emit(body, csv);
  return 0;
}

// ---- mc ----------------------------------------------------------------------

int run_mc(const json& cfg, const Emitter& emit) {
  check_keys(cfg, {"seed", "covariance", "words", "N", "reps", "stderr_mult", "bias_allowance"},
             "mc config");
  for (const char* key : {"covariance", "words", "N", "reps"})
    if (!cfg.contains(key)) throw ConfigError(std::string("mc config: missing '") + key + "'");
  const freeprob::SpdCovariance c =
      freeprob::SpdCovariance::analyze(parse_matrix(cfg["covariance"], "mc covariance"));
  std::vector<std::vector<int>> words;
  for (const auto& w : cfg["words"]) words.push_back(parse_indices(w, "mc word"));
  freeprob::McReport rep =
      freeprob::mc_compare(c, words, cfg["N"].get<int>(), cfg["reps"].get<int>(), emit.seed,
                           cfg.value("stderr_mult", 3.0), cfg.value("bias_allowance", 10.0));

  json body;
  body["N"] = rep.n;
  body["reps"] = rep.reps;
  body["all_pass"] = rep.all_pass;
  json jwords = json::array();
  std::string csv = "word,prediction,estimate,stderr,pass\n";
  for (const auto& w : rep.words) {
    json jw;
    jw["word"] = w.word;
    jw["prediction"] = w.prediction;
    jw["estimate"] = w.estimate;
    jw["stderr"] = w.stderr_val;
    jw["pass"] = w.pass;
    jwords.push_back(jw);
    std::string ws;
    for (std::size_t i = 0; i < w.word.size(); ++i)
      ws += (i ? "-" : "") + std::to_string(w.word[i]);
    csv += ws + "," + fmt(w.prediction) + "," + fmt(w.estimate) + "," + fmt(w.stderr_val) + "," +
           (w.pass ? "1" : "0") + "\n";
  }
  body["words"] = jwords;
  emit.emit(body, csv);
  return rep.all_pass ? 0 : 1;
}

// ---- verify --------------------------------------------------------------------

int run_verify(const json& cfg, const Emitter& emit) {
  check_keys(cfg, {"seed", "checks"}, "verify config");
  freeprob::VerifyOptions opts;
  opts.seed = emit.seed;
  if (cfg.contains("checks"))
    for (const auto& c : cfg["checks"]) opts.only.push_back(c.get<std::string>());

  const auto results = freeprob::run_verify_suite(opts);
  bool all = true;
  json checks = json::array();
  std::string csv = "name,pass\n";
  for (const auto& r : results) {
    all = all && r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " : " << r.detail << "\n";
    json jc;
    jc["name"] = r.name;
    jc["pass"] = r.pass;
    jc["detail"] = r.detail;
    checks.push_back(jc);
    csv += r.name + "," + (r.pass ? "1" : "0") + "\n";
  }
  json body;
  body["checks"] = checks;
  body["all_pass"] = all;
  emit.emit(body, csv);
  std::cout << (all ? "verify: all checks passed" : "verify: FAILURES present") << "\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free-probability numerics: moments, chaos bounds, experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::optional<std::uint64_t> seed_flag;
  int threads = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config path")->envname("FREEPROB_CONFIG");
    cmd->add_option("--out", out_dir, "output directory")->envname("FREEPROB_OUT");
    cmd->add_option("--seed", seed_flag, "seed override")->envname("FREEPROB_SEED");
    cmd->add_option("--threads", threads, "worker thread count")->envname("FREEPROB_THREADS");
  };

  CLI::App* cmd_moments = app.add_subcommand("moments", "evaluate moment formulas");
  CLI::App* cmd_bounds = app.add_subcommand("bounds", "semicircular-approximation bound report");
  CLI::App* cmd_bm = app.add_subcommand("breuer-major", "rate experiment for the increment CLT");
  CLI::App* cmd_mc = app.add_subcommand("mc", "random-matrix Monte Carlo cross-check");
  CLI::App* cmd_verify = app.add_subcommand("verify", "run the oracle/invariant suite");
  for (CLI::App* c : {cmd_moments, cmd_bounds, cmd_bm, cmd_mc, cmd_verify}) add_common(c);

  CLI11_PARSE(app, argc, argv);
  Eigen::setNbThreads(threads);

  try {
    json cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot open config " << config_path << "\n";
        return 2;
      }
      try {
        in >> cfg;
      } catch (const json::exception& e) {
        std::cerr << "error: bad JSON in " << config_path << ": " << e.what() << "\n";
        return 2;
      }
    }

    std::uint64_t seed = 0;
    if (cfg.is_object() && cfg.contains("seed")) seed = cfg["seed"].get<std::uint64_t>();
    if (seed_flag) seed = *seed_flag;

    Emitter emit;
    emit.dir = out_dir;
    emit.digest = digest_hex(cfg, seed);
    emit.seed = seed;

    if (app.got_subcommand(cmd_moments)) {
      emit.command = "moments";
      return run_moments(cfg, emit);
    }
    if (app.got_subcommand(cmd_bounds)) {
      emit.command = "bounds";
      return run_bounds(cfg, emit);
    }
    if (app.got_subcommand(cmd_bm)) {
      emit.command = "breuer-major";
      return run_breuer_major(cfg, emit);
    }
    if (app.got_subcommand(cmd_mc)) {
      emit.command = "mc";
      return run_mc(cfg, emit);
    }
    emit.command = "verify";
    return run_verify(cfg, emit);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
