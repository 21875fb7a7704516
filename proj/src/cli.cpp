#include "pbif/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "pbif/eigensolver.hpp"
#include "pbif/errors.hpp"
#include "pbif/numerics.hpp"
#include "pbif/orlicz.hpp"
#include "pbif/plaplace_operator.hpp"
#include "pbif/verify.hpp"

namespace pbif::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- logging

int log_level() {
  const char* v = std::getenv("PBIF_LOG");
  if (!v) return 0;
  if (std::strcmp(v, "debug") == 0) return 2;
  if (std::strcmp(v, "info") == 0) return 1;
  return 0;
}

void logmsg(int level, const std::string& msg) {
  if (level <= log_level()) std::cerr << "[pbif] " << msg << "\n";
}

// ------------------------------------------------------------- serialization

// JSON lacks nonfinite numbers; encode them as unambiguous strings.
ordered_json jnum(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "+inf" : "-inf";
}

const char* to_string(EigenStatus s) {
  switch (s) {
    case EigenStatus::converged: return "converged";
    case EigenStatus::no_sign_mass: return "no_sign_mass";
    case EigenStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

const char* to_string(BranchTermination t) {
  switch (t) {
    case BranchTermination::reconnected: return "reconnected";
    case BranchTermination::norm_cap: return "norm_cap";
    case BranchTermination::lambda_cap: return "lambda_cap";
    case BranchTermination::step_failure: return "step_failure";
    case BranchTermination::positivity_lost: return "positivity_lost";
  }
  return "unknown";
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
    case CheckStatus::not_applicable: return "not_applicable";
  }
  return "unknown";
}

const char* to_string(BifSide s) {
  switch (s) {
    case BifSide::right: return "right";
    case BifSide::left: return "left";
    case BifSide::hypothesis_violated: return "hypothesis_violated";
  }
  return "unknown";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalError("cannot open output file: " + path);
  out << content;
}

void write_json_file(const std::string& path, const ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void write_error_record(const std::string& out_dir, int code,
                        const std::string& kind, const std::string& message) {
  try {
    fs::create_directories(out_dir);
    ordered_json j;
    j["error"] = {{"exit_code", code}, {"kind", kind}, {"message", message}};
    write_json_file((fs::path(out_dir) / "error.json").string(), j);
  } catch (...) {
    // best effort; the exit code still reports the failure
  }
  logmsg(0, kind + ": " + message);
}

// -------------------------------------------------------------- config parse

using njson = nlohmann::json;

[[noreturn]] void bad_config(const std::string& msg) {
  throw ConfigError("config: " + msg);
}

double get_num(const njson& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad_config(key + " must be a number");
  return j.at(key).get<double>();
}

long get_int(const njson& j, const std::string& key, long fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad_config(key + " must be an integer");
  return j.at(key).get<long>();
}

std::string get_str(const njson& j, const std::string& key,
                    const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) bad_config(key + " must be a string");
  return j.at(key).get<std::string>();
}

WeightSpec parse_weight(const njson& j, const std::string& name, double lo,
                        double hi, double constant_fallback) {
  WeightSpec w;
  if (j.is_null()) {
    w.pieces.push_back({lo, hi, Polynomial{{constant_fallback}}});
    return w;
  }
  if (!j.is_object() || !j.contains("pieces") || !j.at("pieces").is_array() ||
      j.at("pieces").empty())
    bad_config(name + " must be an object with a nonempty pieces array");
  for (const njson& pj : j.at("pieces")) {
    if (!pj.is_object() || !pj.contains("lo") || !pj.contains("hi") ||
        !pj.contains("coeffs") || !pj.at("coeffs").is_array() ||
        pj.at("coeffs").empty())
      bad_config(name + " piece needs lo, hi and a nonempty coeffs array");
    WeightPiece piece;
    piece.lo = get_num(pj, "lo", 0.0);
    piece.hi = get_num(pj, "hi", 0.0);
    for (const njson& c : pj.at("coeffs")) {
      if (!c.is_number()) bad_config(name + " coeffs must be numbers");
      piece.poly.coeffs.push_back(c.get<double>());
    }
    w.pieces.push_back(std::move(piece));
  }
  return w;
}

Nonlinearity parse_nonlinearity(const njson& j, double p, int dimension) {
  if (!j.is_object() || !j.contains("kind"))
    bad_config("nonlinearity must be an object with a kind");
  const std::string kind = get_str(j, "kind", "");

  double p_star;
  if (j.contains("p_star")) {
    p_star = get_num(j, "p_star", 0.0);
  } else {
    if (!(dimension > p))
      bad_config(
          "nonlinearity without explicit p_star requires dimension > p");
    p_star = dimension * p / (dimension - p);
  }
  const double beta = get_num(j, "beta", 1.0);
  const double s0 = get_num(j, "s0", 1.0);
  const double c0 = get_num(j, "c0", 1.0);

  try {
    if (kind == "log_damped_power") return make_log_damped(p_star, beta, s0, c0);
    if (kind == "iterated_log_power")
      return make_iterated_log(p_star, beta, s0, c0);
    if (kind == "pure_power")
      return make_pure_power(p_star, get_num(j, "q", p_star), s0, c0);
    if (kind == "custom") {
      if (!j.contains("table_s") || !j.contains("table_f"))
        bad_config("custom nonlinearity needs table_s and table_f");
      std::vector<double> ts, tf;
      for (const njson& v : j.at("table_s")) ts.push_back(v.get<double>());
      for (const njson& v : j.at("table_f")) tf.push_back(v.get<double>());
      return make_custom(std::move(ts), std::move(tf), p_star, s0, c0);
    }
  } catch (const ContractViolation& e) {
    bad_config(std::string("nonlinearity: ") + e.what());
  }
  bad_config("unknown nonlinearity kind: " + kind);
}

}  // namespace

RunMode parse_mode(const std::string& s) {
  if (s == "eig") return RunMode::eig;
  if (s == "solve") return RunMode::solve;
  if (s == "branch") return RunMode::branch;
  if (s == "verify") return RunMode::verify;
  if (s == "hypotheses") return RunMode::hypotheses;
  if (s == "orlicz-demo") return RunMode::orlicz_demo;
  bad_config("unknown mode: " + s);
}

RunConfig parse_config_text(const std::string& text) {
  njson j;
  try {
    j = njson::parse(text);
  } catch (const njson::parse_error& e) {
    bad_config(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad_config("top level must be an object");

  RunConfig cfg;
  cfg.mode = parse_mode(get_str(j, "mode", "eig"));
  cfg.out_dir = get_str(j, "out", "out");
  cfg.seed = get_int(j, "seed", 0);
  cfg.threads = static_cast<int>(get_int(j, "threads", 1));
  if (cfg.threads < 1) bad_config("threads must be >= 1");

  cfg.p = get_num(j, "p", 2.0);
  if (!(cfg.p > 1.0)) bad_config("p must be > 1");
  cfg.lambda = get_num(j, "lambda", 0.0);
  cfg.initial_amplitude = get_num(j, "initial_amplitude", 0.0);

  const njson geo = j.value("geometry", njson::object());
  const std::string kind = get_str(geo, "kind", "ball");
  if (kind == "ball")
    cfg.geometry.kind = DomainKind::ball;
  else if (kind == "annulus")
    cfg.geometry.kind = DomainKind::annulus;
  else
    bad_config("geometry.kind must be ball or annulus");
  cfg.geometry.dimension = static_cast<int>(get_int(geo, "dimension", 3));
  cfg.geometry.nodes = static_cast<int>(get_int(geo, "nodes", 501));
  cfg.geometry.grading = get_num(geo, "grading", 1.0);
  cfg.geometry.r_inner =
      get_num(geo, "r_inner", cfg.geometry.kind == DomainKind::ball ? 0.0 : 0.5);
  cfg.geometry.r_outer = get_num(geo, "r_outer", 1.0);
  if (cfg.geometry.dimension < 2) bad_config("geometry.dimension must be >= 2");
  if (cfg.geometry.nodes < 3) bad_config("geometry.nodes must be >= 3");
  if (!(cfg.geometry.grading > 0.0)) bad_config("geometry.grading must be > 0");
  if (cfg.geometry.kind == DomainKind::ball && cfg.geometry.r_inner != 0.0)
    bad_config("a ball has r_inner == 0");
  if (cfg.geometry.kind == DomainKind::annulus &&
      !(cfg.geometry.r_inner > 0.0))
    bad_config("an annulus has r_inner > 0");
  if (!(cfg.geometry.r_outer > cfg.geometry.r_inner))
    bad_config("geometry.r_outer must exceed r_inner");

  cfg.V = parse_weight(j.value("V", njson()), "V", cfg.geometry.r_inner,
                       cfg.geometry.r_outer, 1.0);
  cfg.m = parse_weight(j.value("m", njson()), "m", cfg.geometry.r_inner,
                       cfg.geometry.r_outer, 0.0);

  if (j.contains("nonlinearity") && !j.at("nonlinearity").is_null()) {
    cfg.f = parse_nonlinearity(j.at("nonlinearity"), cfg.p,
                               cfg.geometry.dimension);
    cfg.has_f = true;
  }

  const njson sol = j.value("solver", njson::object());
  cfg.solver.newton_tol = get_num(sol, "newton_tol", cfg.solver.newton_tol);
  cfg.solver.newton_max_iter = static_cast<int>(
      get_int(sol, "newton_max_iter", cfg.solver.newton_max_iter));
  cfg.solver.eig_tol = get_num(sol, "eig_tol", cfg.solver.eig_tol);
  cfg.solver.eig_max_iter =
      static_cast<int>(get_int(sol, "eig_max_iter", cfg.solver.eig_max_iter));
  cfg.solver.delta_reg = get_num(sol, "delta_reg", cfg.solver.delta_reg);
  if (!(cfg.solver.newton_tol > 0.0) || !(cfg.solver.eig_tol > 0.0))
    bad_config("solver tolerances must be > 0");
  if (cfg.solver.delta_reg < 0.0) bad_config("solver.delta_reg must be >= 0");

  const njson cont = j.value("continuation", njson::object());
  cfg.continuation.step0 = get_num(cont, "step0", cfg.continuation.step0);
  cfg.continuation.min_step =
      get_num(cont, "min_step", cfg.continuation.min_step);
  cfg.continuation.max_step =
      get_num(cont, "max_step", cfg.continuation.max_step);
  cfg.continuation.norm_cap =
      get_num(cont, "norm_cap", cfg.continuation.norm_cap);
  cfg.continuation.lambda_lo =
      get_num(cont, "lambda_lo", cfg.continuation.lambda_lo);
  cfg.continuation.lambda_hi =
      get_num(cont, "lambda_hi", cfg.continuation.lambda_hi);
  cfg.continuation.max_points = static_cast<int>(
      get_int(cont, "max_points", cfg.continuation.max_points));
  if (cont.contains("seed_amplitudes")) {
    if (!cont.at("seed_amplitudes").is_array() ||
        cont.at("seed_amplitudes").empty())
      bad_config("continuation.seed_amplitudes must be a nonempty array");
    cfg.continuation.seed_amplitudes.clear();
    for (const njson& v : cont.at("seed_amplitudes"))
      cfg.continuation.seed_amplitudes.push_back(v.get<double>());
  }
  cfg.continuation.reconnect_norm_tol =
      get_num(cont, "reconnect_norm_tol", cfg.continuation.reconnect_norm_tol);
  cfg.continuation.reconnect_lambda_tol = get_num(
      cont, "reconnect_lambda_tol", cfg.continuation.reconnect_lambda_tol);
  if (!(cfg.continuation.step0 > 0.0) || !(cfg.continuation.min_step > 0.0) ||
      !(cfg.continuation.max_step >= cfg.continuation.step0))
    bad_config("continuation step control must satisfy 0 < min/step0 <= max");

  const njson ver = j.value("verify", njson::object());
  cfg.verify.epsilon = get_num(ver, "epsilon", cfg.verify.epsilon);
  cfg.verify.threshold = get_num(ver, "threshold", cfg.verify.threshold);
  cfg.verify.slack = get_num(ver, "slack", cfg.verify.slack);
  cfg.verify.picone_shift = get_num(ver, "picone_shift", cfg.verify.picone_shift);
  if (!(cfg.verify.epsilon > 0.0)) bad_config("verify.epsilon must be > 0");

  const bool needs_f = cfg.mode == RunMode::branch ||
                       cfg.mode == RunMode::verify ||
                       cfg.mode == RunMode::hypotheses ||
                       cfg.mode == RunMode::orlicz_demo;
  if (needs_f && !cfg.has_f)
    bad_config("this mode requires a nonlinearity block");
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad_config("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// ------------------------------------------------------------------ CSV I/O

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_branch_csv(const std::string& path, const Branch& b) {
  std::ostringstream out;
  out << "index,lambda,sup_norm,lp_star_norm,sobolev_norm,tangent_dlambda,"
         "is_fold,residual_norm\n";
  for (std::size_t k = 0; k < b.points.size(); ++k) {
    const BranchPoint& p = b.points[k];
    out << k << ',' << format_g17(p.lambda) << ',' << format_g17(p.sup_norm)
        << ',' << format_g17(p.lp_star_norm) << ','
        << format_g17(p.sobolev_norm) << ',' << format_g17(p.tangent_dlambda)
        << ',' << (p.is_fold ? 1 : 0) << ',' << format_g17(p.residual_norm)
        << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<BranchRow> read_branch_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NumericalError("cannot read branch csv: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line !=
          "index,lambda,sup_norm,lp_star_norm,sobolev_norm,tangent_dlambda,"
          "is_fold,residual_norm")
    throw NumericalError("branch csv header mismatch in " + path);

  std::vector<BranchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8)
      throw NumericalError("branch csv row arity mismatch in " + path);
    BranchRow r;
    r.index = std::strtol(cells[0].c_str(), nullptr, 10);
    r.lambda = std::strtod(cells[1].c_str(), nullptr);
    r.sup_norm = std::strtod(cells[2].c_str(), nullptr);
    r.lp_star_norm = std::strtod(cells[3].c_str(), nullptr);
    r.sobolev_norm = std::strtod(cells[4].c_str(), nullptr);
    r.tangent_dlambda = std::strtod(cells[5].c_str(), nullptr);
    r.is_fold = static_cast<int>(std::strtol(cells[6].c_str(), nullptr, 10));
    r.residual_norm = std::strtod(cells[7].c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

void write_profile_csv(const std::string& path, const RadialMesh& mesh,
                       const GridFunction& u) {
  std::ostringstream out;
  out << "r,value\n";
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    out << format_g17(mesh.nodes[i]) << ',' << format_g17(u.values[i]) << '\n';
  write_text_file(path, out.str());
}

std::vector<ProfileSample> read_profile_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NumericalError("cannot read profile csv: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "r,value")
    throw NumericalError("profile csv header mismatch in " + path);
  std::vector<ProfileSample> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw NumericalError("profile csv row mismatch in " + path);
    ProfileSample s;
    s.r = std::strtod(line.substr(0, comma).c_str(), nullptr);
    s.value = std::strtod(line.substr(comma + 1).c_str(), nullptr);
    rows.push_back(s);
  }
  return rows;
}

// ------------------------------------------------------------------ runners

namespace {

struct Workspace {
  RadialMesh mesh;
  GridFunction Vg, mg;
  OperatorConfig op;
};

Workspace make_workspace(const RunConfig& cfg) {
  Workspace w;
  w.mesh = build_mesh(cfg.geometry.kind, cfg.geometry.r_inner,
                      cfg.geometry.r_outer, cfg.geometry.dimension,
                      cfg.geometry.nodes, cfg.geometry.grading);
  try {
    w.Vg = evaluate(cfg.V, w.mesh);
    w.mg = evaluate(cfg.m, w.mesh);
  } catch (const ContractViolation& e) {
    bad_config(std::string("weights do not cover the domain: ") + e.what());
  }
  w.op.p = cfg.p;
  w.op.dimension = cfg.geometry.dimension;
  w.op.delta_reg = cfg.solver.delta_reg;
  w.op.V = w.Vg;
  w.op.m = w.mg;
  w.op.f = cfg.has_f ? &cfg.f : nullptr;
  return w;
}

ordered_json eig_json(const EigenResult& e) {
  ordered_json j;
  j["lambda"] = jnum(e.lambda);
  j["status"] = to_string(e.status);
  j["iterations"] = e.iterations;
  j["kkt_residual"] = jnum(e.kkt_residual);
  j["multistart_spread"] = jnum(e.multistart_spread);
  j["positive"] = e.positive;
  return j;
}

int run_eig(const RunConfig& cfg) {
  Workspace w = make_workspace(cfg);
  const EigenResult e1 = principal_eigenvalue(
      w.Vg, w.mesh, cfg.p, 1, cfg.solver.eig_tol, cfg.solver.eig_max_iter);
  const EigenResult em = principal_eigenvalue(
      w.Vg, w.mesh, cfg.p, -1, cfg.solver.eig_tol, cfg.solver.eig_max_iter);
  logmsg(1, "eig: lambda_1 = " + format_g17(e1.lambda) +
                ", lambda_minus_1 = " + format_g17(em.lambda));

  ordered_json j;
  j["mode"] = "eig";
  j["lambda_1"] = eig_json(e1);
  j["lambda_minus_1"] = eig_json(em);
  write_json_file((fs::path(cfg.out_dir) / "eig.json").string(), j);
  if (e1.status == EigenStatus::converged)
    write_profile_csv((fs::path(cfg.out_dir) / "eigenfunction_plus.csv").string(),
                      w.mesh, e1.eigenfunction);
  if (em.status == EigenStatus::converged)
    write_profile_csv(
        (fs::path(cfg.out_dir) / "eigenfunction_minus.csv").string(), w.mesh,
        em.eigenfunction);

  if (e1.status == EigenStatus::max_iter || em.status == EigenStatus::max_iter) {
    write_error_record(cfg.out_dir, 3, "solver",
                       "eigenvalue iteration hit max_iter");
    return 3;
  }
  return 0;
}

int run_solve(const RunConfig& cfg) {
  Workspace w = make_workspace(cfg);
  GridFunction u0 = make_grid_function(w.mesh);
  if (cfg.initial_amplitude != 0.0) {
    const double lo = w.mesh.inner(), hi = w.mesh.outer();
    const double peak = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < w.mesh.node_count(); ++i) {
      if (w.mesh.boundary_mask[i]) continue;
      const double r = w.mesh.nodes[i];
      const double t =
          r <= peak ? (w.mesh.kind == DomainKind::ball ? 1.0
                                                       : (r - lo) / (peak - lo))
                    : (hi - r) / (hi - peak);
      u0.values[i] = cfg.initial_amplitude * std::max(0.0, t);
    }
  }

  const NewtonResult res = newton_solve(cfg.lambda, u0, w.op, w.mesh,
                                        cfg.solver.newton_tol,
                                        cfg.solver.newton_max_iter);
  ordered_json j;
  j["mode"] = "solve";
  j["lambda"] = jnum(res.lambda);
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  j["residual_sup"] = jnum(res.residual_sup);
  j["sup_norm"] = jnum(sup_norm(res.u));
  write_json_file((fs::path(cfg.out_dir) / "solve.json").string(), j);
  write_profile_csv((fs::path(cfg.out_dir) / "solution.csv").string(), w.mesh,
                    res.u);
  if (!res.converged) {
    write_error_record(cfg.out_dir, 3, "solver",
                       "Newton did not reach the residual tolerance");
    return 3;
  }
  return 0;
}

struct OriginTrace {
  bool present = false;     // a branch was traced
  bool solver_failed = false;
  std::string note;
  EigenResult e;
  DirectionReport dir;
  Branch branch;
  std::vector<std::size_t> folds;
};

OriginTrace trace_from_origin(const RunConfig& cfg, const Workspace& w,
                              BranchOrigin origin, const EigenResult& e,
                              double other_lambda) {
  OriginTrace t;
  t.e = e;
  if (e.status == EigenStatus::no_sign_mass) {
    t.note = "eigenvalue is an infinite sentinel; no branch on this side";
    return t;
  }
  if (e.status != EigenStatus::converged) {
    t.solver_failed = true;
    t.note = "eigenvalue iteration did not converge";
    return t;
  }

  t.dir = bifurcation_direction(w.mg, e, cfg.f, w.mesh);
  BifurcationSide side;
  if (origin == BranchOrigin::lambda_1) {
    side = t.dir.from_lambda1 == BifSide::right ? BifurcationSide::right
                                                : BifurcationSide::left;
    if (t.dir.from_lambda1 == BifSide::hypothesis_violated) {
      side = BifurcationSide::right;
      t.note = "direction integral nonnegative; traced to the right anyway";
    }
  } else {
    side = t.dir.from_lambda_minus1 == BifSide::left ? BifurcationSide::left
                                                     : BifurcationSide::right;
    if (t.dir.from_lambda_minus1 == BifSide::hypothesis_violated) {
      side = BifurcationSide::left;
      t.note = "direction integral nonnegative; traced to the left anyway";
    }
  }

  std::vector<BranchPoint> seeds;
  try {
    seeds = seed_branch(e, side, cfg.continuation.seed_amplitudes, w.op,
                        w.mesh, cfg.solver.newton_tol);
  } catch (const std::exception& ex) {
    t.solver_failed = true;
    t.note = std::string("seeding failed: ") + ex.what();
    return t;
  }

  TraceOptions opts;
  opts.step0 = cfg.continuation.step0;
  opts.min_step = cfg.continuation.min_step;
  opts.max_step = cfg.continuation.max_step;
  opts.newton_tol = cfg.solver.newton_tol;
  opts.newton_max_iter = cfg.solver.newton_max_iter;
  opts.max_points = cfg.continuation.max_points;
  opts.norm_cap = cfg.continuation.norm_cap;
  opts.lambda_lo = cfg.continuation.lambda_lo;
  opts.lambda_hi = cfg.continuation.lambda_hi;
  opts.reconnect_norm_tol = cfg.continuation.reconnect_norm_tol > 0.0
                                ? cfg.continuation.reconnect_norm_tol
                                : 10.0 * cfg.solver.newton_tol;
  if (std::isfinite(other_lambda)) {
    opts.reconnect_lambda = other_lambda;
    opts.reconnect_lambda_tol =
        cfg.continuation.reconnect_lambda_tol > 0.0
            ? cfg.continuation.reconnect_lambda_tol
            : 0.05 * std::abs(e.lambda - other_lambda);
  }
  if (seeds.size() >= 2) {
    const BranchPoint& a = seeds[seeds.size() - 2];
    const BranchPoint& b = seeds.back();
    opts.tangent_u.resize(w.mesh.node_count());
    for (std::size_t i = 0; i < w.mesh.node_count(); ++i)
      opts.tangent_u[i] = b.u.values[i] - a.u.values[i];
    opts.tangent_lambda = b.lambda - a.lambda;
  } else {
    opts.tangent_lambda = side == BifurcationSide::right ? 1.0 : -1.0;
  }

  Branch traced;
  try {
    traced = trace_branch(seeds.back(), w.op, w.mesh, origin, opts);
  } catch (const std::exception& ex) {
    t.solver_failed = true;
    t.note = std::string("tracing failed: ") + ex.what();
    return t;
  }

  // merge the seed prefix with the traced tail (its first point is the seed)
  t.branch.origin = origin;
  t.branch.termination = traced.termination;
  t.branch.diagnostic = traced.diagnostic;
  t.branch.points.assign(seeds.begin(), seeds.end() - 1);
  for (BranchPoint& p : traced.points)
    t.branch.points.push_back(std::move(p));
  if (t.branch.points.size() >= 3) t.folds = detect_folds(t.branch);
  t.present = true;
  return t;
}

ordered_json branch_json(const OriginTrace& t, const std::string& origin_name) {
  ordered_json j;
  j["origin"] = origin_name;
  j["eigenvalue"] = eig_json(t.e);
  if (!t.note.empty()) j["note"] = t.note;
  if (!t.present) return j;
  j["direction_integral"] = jnum(t.dir.integral);
  j["g0_exponent"] = jnum(t.dir.g0_q);
  j["side_from_lambda1"] = to_string(t.dir.from_lambda1);
  j["side_from_lambda_minus1"] = to_string(t.dir.from_lambda_minus1);
  j["termination"] = to_string(t.branch.termination);
  if (!t.branch.diagnostic.empty()) j["diagnostic"] = t.branch.diagnostic;
  j["points"] = t.branch.points.size();
  ordered_json folds = ordered_json::array();
  for (std::size_t k : t.folds) folds.push_back(k);
  j["folds"] = folds;
  if (!t.branch.points.empty()) {
    j["lambda_first"] = jnum(t.branch.points.front().lambda);
    j["lambda_last"] = jnum(t.branch.points.back().lambda);
    j["sup_norm_max"] = jnum(
        std::max_element(t.branch.points.begin(), t.branch.points.end(),
                         [](const BranchPoint& a, const BranchPoint& b) {
                           return a.sup_norm < b.sup_norm;
                         })
            ->sup_norm);
  }
  return j;
}

std::pair<OriginTrace, OriginTrace> trace_both(const RunConfig& cfg,
                                               const Workspace& w) {
  const EigenResult e1 = principal_eigenvalue(
      w.Vg, w.mesh, cfg.p, 1, cfg.solver.eig_tol, cfg.solver.eig_max_iter);
  const EigenResult em = principal_eigenvalue(
      w.Vg, w.mesh, cfg.p, -1, cfg.solver.eig_tol, cfg.solver.eig_max_iter);

  if (cfg.threads >= 2) {
    auto f1 = std::async(std::launch::async, [&] {
      return trace_from_origin(cfg, w, BranchOrigin::lambda_1, e1, em.lambda);
    });
    auto fm = std::async(std::launch::async, [&] {
      return trace_from_origin(cfg, w, BranchOrigin::lambda_minus_1, em,
                               e1.lambda);
    });
    return {f1.get(), fm.get()};
  }
  return {trace_from_origin(cfg, w, BranchOrigin::lambda_1, e1, em.lambda),
          trace_from_origin(cfg, w, BranchOrigin::lambda_minus_1, em,
                            e1.lambda)};
}

int run_branch(const RunConfig& cfg) {
  Workspace w = make_workspace(cfg);
  const auto [t1, tm] = trace_both(cfg, w);

  ordered_json j;
  j["mode"] = "branch";
  j["lambda_1_branch"] = branch_json(t1, "lambda_1");
  j["lambda_minus_1_branch"] = branch_json(tm, "lambda_minus_1");
  write_json_file((fs::path(cfg.out_dir) / "branches.json").string(), j);
  if (t1.present)
    write_branch_csv((fs::path(cfg.out_dir) / "branch_lambda1.csv").string(),
                     t1.branch);
  if (tm.present)
    write_branch_csv(
        (fs::path(cfg.out_dir) / "branch_lambda_minus1.csv").string(),
        tm.branch);

  if (t1.solver_failed || tm.solver_failed) {
    write_error_record(cfg.out_dir, 3, "solver",
                       t1.solver_failed ? t1.note : tm.note);
    return 3;
  }
  return 0;
}

int run_hypotheses(const RunConfig& cfg) {
  Workspace w = make_workspace(cfg);
  const HypothesisReport fr = check_hypotheses(cfg.f, cfg.p);
  const SignDecomposition d = sign_decompose(cfg.m);
  const MHypothesesReport mr = check_m_hypotheses(cfg.m, cfg.V, d, w.mesh);

  ordered_json j;
  j["mode"] = "hypotheses";
  ordered_json jf;
  jf["f1"] = {{"pass", fr.f1.pass},
              {"last_value", jnum(fr.f1.last_value)},
              {"note", fr.f1.note}};
  jf["f2"] = {{"pass", fr.f2},
              {"certified_c0", jnum(fr.f2_certified_c0)},
              {"monotone", fr.f2_monotone}};
  jf["f3"] = {{"pass", fr.f3.pass},
              {"last_value", jnum(fr.f3.last_value)},
              {"note", fr.f3.note}};
  jf["f4"] = {{"pass", fr.f4},
              {"c1_estimate", jnum(fr.f4_c1_estimate)},
              {"ratio_converges", fr.f4_ratio_converges}};
  jf["all"] = fr.all();
  j["f_hypotheses"] = jf;

  if (cfg.geometry.dimension > cfg.p) {
    const CompactnessReport cr =
        compactness_hypotheses(cfg.f, cfg.p, cfg.geometry.dimension);
    ordered_json jc;
    jc["delta2"] = {{"satisfied", cr.delta2.satisfied},
                    {"k0", jnum(cr.delta2.k0)},
                    {"tail_diverging", cr.delta2.tail_diverging}};
    jc["essentially_slower"] = cr.essentially_slower;
    jc["certified_c0"] = jnum(cr.certified_c0);
    jc["k0_bound"] = jnum(cr.k0_bound);
    jc["k0_within_bound"] = cr.k0_within_bound;
    jc["pass"] = cr.pass;
    j["compactness"] = jc;
  } else {
    j["compactness"] = "skipped: requires dimension > p";
  }

  ordered_json jm;
  jm["m1"] = {{"pass", mr.m1},
              {"sup_m_plus", jnum(mr.sup_m_plus)},
              {"sup_m_minus", jnum(mr.sup_m_minus)}};
  jm["m2"] = {{"pass", mr.m2},
              {"v_plus", mr.m2_v_plus},
              {"v_minus", mr.m2_v_minus},
              {"components", mr.omega_plus0_components}};
  jm["m3"] = {{"pass", mr.m3},
              {"v_plus", mr.m3_v_plus},
              {"v_minus", mr.m3_v_minus},
              {"components", mr.omega_0_components}};
  j["m_hypotheses"] = jm;

  write_json_file((fs::path(cfg.out_dir) / "hypotheses.json").string(), j);
  return 0;
}

int run_orlicz(const RunConfig& cfg) {
  Workspace w = make_workspace(cfg);
  const NFunction A = nfunction_from_reaction(cfg.f);
  const NFunction Astar = conjugate(A);

  std::ostringstream table;
  table << "s,value,density,conjugate_at_density,young_gap\n";
  const std::vector<double> grid = geometric_grid(1e-2, 1e3, 25);
  for (double s : grid) {
    const double val = nf_value(A, s);
    const double dens = nf_density(A, s);
    const double conj = nf_value(Astar, dens);
    const double gap = young_gap(s, dens, A);
    table << format_g17(s) << ',' << format_g17(val) << ',' << format_g17(dens)
          << ',' << format_g17(conj) << ',' << format_g17(gap) << '\n';
  }
  write_text_file((fs::path(cfg.out_dir) / "orlicz_table.csv").string(),
                  table.str());

  std::vector<double> tgrid;
  for (double s : geometric_grid(std::max(cfg.f.s0, 1e-6), 1e8, 120))
    tgrid.push_back(eval_f(cfg.f, s));
  const Delta2Result d2 = check_delta2(Astar, tgrid);

  GridFunction tent = make_grid_function(w.mesh);
  const double mid = 0.5 * (w.mesh.inner() + w.mesh.outer());
  for (std::size_t i = 0; i < w.mesh.node_count(); ++i) {
    if (w.mesh.boundary_mask[i]) continue;
    const double r = w.mesh.nodes[i];
    tent.values[i] =
        std::max(0.0, 1.0 - std::abs(r - mid) / (w.mesh.outer() - mid));
  }
  const NFunction Ap = power_nfunction(cfg.p);
  const double gauge_p = gauge_norm(tent, Ap, w.mesh);
  const double lp = lebesgue_norm(tent, w.mesh, cfg.p);
  const double gauge_A = gauge_norm(tent, A, w.mesh);

  ordered_json j;
  j["mode"] = "orlicz-demo";
  j["conjugate_delta2"] = {{"satisfied", d2.satisfied},
                           {"k0", jnum(d2.k0)},
                           {"tail_diverging", d2.tail_diverging}};
  j["tent_gauge_power_p"] = jnum(gauge_p);
  j["tent_lp_norm"] = jnum(lp);
  j["tent_gauge_reaction"] = jnum(gauge_A);
  write_json_file((fs::path(cfg.out_dir) / "orlicz.json").string(), j);
  return 0;
}

int run_verify(const RunConfig& cfg) {
  Workspace w = make_workspace(cfg);
  const auto [t1, tm] = trace_both(cfg, w);
  if (t1.solver_failed || tm.solver_failed) {
    write_error_record(cfg.out_dir, 3, "solver",
                       t1.solver_failed ? t1.note : tm.note);
    return 3;
  }
  if (t1.present)
    write_branch_csv((fs::path(cfg.out_dir) / "branch_lambda1.csv").string(),
                     t1.branch);
  if (tm.present)
    write_branch_csv(
        (fs::path(cfg.out_dir) / "branch_lambda_minus1.csv").string(),
        tm.branch);

  ordered_json j;
  j["mode"] = "verify";
  bool any_fail = false;

  // window and its containment properties
  const WindowReport win = nonexistence_window(cfg.V, cfg.m, cfg.f, w.mesh,
                                               cfg.p, cfg.solver.eig_tol);
  {
    ordered_json jw;
    jw["lo"] = jnum(win.lo);
    jw["hi"] = jnum(win.hi);
    jw["from_plus0"] = win.from_plus0;
    jw["from_zero"] = win.from_zero;
    jw["alpha_plus0"] = jnum(win.alpha_plus0);
    jw["C0"] = jnum(win.C0);
    jw["note"] = win.note;

    bool contains_eigenvalues = true;
    if (t1.e.status == EigenStatus::converged)
      contains_eigenvalues = contains_eigenvalues && win.lo < t1.e.lambda &&
                             t1.e.lambda < win.hi;
    if (tm.e.status == EigenStatus::converged)
      contains_eigenvalues = contains_eigenvalues && win.lo < tm.e.lambda &&
                             tm.e.lambda < win.hi;
    bool contains_branches = true;
    for (const OriginTrace* t : {&t1, &tm}) {
      if (!t->present) continue;
      for (const BranchPoint& p : t->branch.points)
        contains_branches = contains_branches && win.lo <= p.lambda &&
                            p.lambda <= win.hi;
    }
    jw["contains_eigenvalues"] = contains_eigenvalues;
    jw["contains_branch_points"] = contains_branches;
    const bool ok = contains_eigenvalues && contains_branches;
    jw["status"] = ok ? "pass" : "fail";
    any_fail = any_fail || !ok;
    j["nonexistence_window"] = jw;
  }

  // gradient comparison identity on an eigenfunction-based pair
  if (t1.e.status == EigenStatus::converged && t1.present &&
      !t1.branch.points.empty()) {
    GridFunction v2 = t1.e.eigenfunction;
    for (double& v : v2.values) v += cfg.verify.picone_shift;
    GridFunction v1 = t1.branch.points.front().u;
    for (double& v : v1.values) v = std::max(v, 0.0);
    const PiconePair pp = picone(v1, v2, w.mesh, cfg.p);
    double min_L = 0.0, gap = 0.0;
    for (std::size_t c = 0; c < pp.L.size(); ++c) {
      min_L = std::min(min_L, pp.L[c]);
      gap = std::max(gap, std::abs(pp.L[c] - pp.R[c]));
    }
    const bool ok = min_L >= -1e-12;
    ordered_json jp;
    jp["min_L"] = jnum(min_L);
    jp["max_gap"] = jnum(gap);
    jp["status"] = ok ? "pass" : "fail";
    any_fail = any_fail || !ok;
    j["picone"] = jp;
  }

  // direction versus the first accepted points
  for (const OriginTrace* t : {&t1, &tm}) {
    if (!t->present || t->branch.points.empty()) continue;
    const bool from_l1 = t->branch.origin == BranchOrigin::lambda_1;
    const std::string key =
        from_l1 ? "direction_lambda1" : "direction_lambda_minus1";
    ordered_json jd;
    jd["integral"] = jnum(t->dir.integral);
    const BifSide side =
        from_l1 ? t->dir.from_lambda1 : t->dir.from_lambda_minus1;
    jd["side"] = to_string(side);
    if (side == BifSide::hypothesis_violated ||
        std::abs(t->dir.integral) <= 1e-11) {
      jd["status"] = "inconclusive";
    } else {
      bool ok = true;
      const double origin_lambda = t->e.lambda;
      const std::size_t upto = std::min<std::size_t>(5, t->branch.points.size());
      for (std::size_t k = 0; k < upto; ++k) {
        const double d = t->branch.points[k].lambda - origin_lambda;
        ok = ok && (side == BifSide::right ? d > 0.0 : d < 0.0);
      }
      jd["status"] = ok ? "pass" : "fail";
      any_fail = any_fail || !ok;
    }
    j[key] = jd;
  }

  // sup-norm growth estimate along the lambda_1 branch
  if (t1.present && !t1.branch.points.empty()) {
    double lambda_bound = 0.0;
    for (const BranchPoint& p : t1.branch.points)
      lambda_bound = std::max(lambda_bound, std::abs(p.lambda));
    const double v_sup = weight_max(cfg.V);
    const LinfReport lr = linf_estimate_check(
        t1.branch, cfg.f, cfg.p, cfg.geometry.dimension, cfg.verify.epsilon,
        lambda_bound, v_sup, cfg.verify.threshold, cfg.verify.slack);
    ordered_json jl;
    jl["status"] = to_string(lr.status);
    jl["slope"] = jnum(lr.slope);
    jl["exponent_bound"] = jnum(lr.exponent_bound);
    jl["empirical_constant"] = jnum(lr.empirical_constant);
    jl["points_used"] = lr.points_used;
    any_fail = any_fail || lr.status == CheckStatus::fail;
    j["linf_estimate"] = jl;
  }

  j["overall"] = any_fail ? "fail" : "pass";
  write_json_file((fs::path(cfg.out_dir) / "verify.json").string(), j);
  if (any_fail) {
    write_error_record(cfg.out_dir, 4, "verification",
                       "at least one claim check failed; see verify.json");
    return 4;
  }
  return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    fs::create_directories(cfg.out_dir);
    logmsg(1, "run: mode dispatch, out dir " + cfg.out_dir);
    switch (cfg.mode) {
      case RunMode::eig: return run_eig(cfg);
      case RunMode::solve: return run_solve(cfg);
      case RunMode::branch: return run_branch(cfg);
      case RunMode::verify: return run_verify(cfg);
      case RunMode::hypotheses: return run_hypotheses(cfg);
      case RunMode::orlicz_demo: return run_orlicz(cfg);
    }
    write_error_record(cfg.out_dir, 2, "config", "unhandled mode");
    return 2;
  } catch (const ConfigError& e) {
    write_error_record(cfg.out_dir, 2, "config", e.what());
    return 2;
  } catch (const std::exception& e) {
    write_error_record(cfg.out_dir, 3, "solver", e.what());
    return 3;
  }
}

}  // namespace pbif::cli
