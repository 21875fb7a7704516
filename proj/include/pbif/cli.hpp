#pragma once

#include <limits>
#include <string>
#include <vector>

#include "pbif/continuation.hpp"
#include "pbif/nonlinearity.hpp"
#include "pbif/radial_mesh.hpp"
#include "pbif/weights.hpp"

namespace pbif::cli {

enum class RunMode { eig, solve, branch, verify, hypotheses, orlicz_demo };

// Maps the mode strings accepted in configs and on the command line
// ("eig", "solve", "branch", "verify", "hypotheses", "orlicz-demo").
RunMode parse_mode(const std::string& s);

struct GeometryConfig {
  DomainKind kind = DomainKind::ball;
  int dimension = 3;
  int nodes = 501;
  double grading = 1.0;
  double r_inner = 0.0;
  double r_outer = 1.0;
};

struct SolverConfig {
  double newton_tol = 1e-11;
  int newton_max_iter = 50;
  double eig_tol = 1e-9;
  int eig_max_iter = 50000;
  double delta_reg = 1e-10;
};

struct ContinuationConfig {
  double step0 = 0.01;
  double min_step = 1e-9;
  double max_step = 0.5;
  double norm_cap = 1e3;
  double lambda_lo = -std::numeric_limits<double>::infinity();
  double lambda_hi = std::numeric_limits<double>::infinity();
  int max_points = 20000;
  std::vector<double> seed_amplitudes = {0.005, 0.0075, 0.01};
  // zero means "derive": 10x newton_tol, resp. 0.05 |lambda_1 - lambda_-1|
  double reconnect_norm_tol = 0.0;
  double reconnect_lambda_tol = 0.0;
};

struct VerifyConfig {
  double epsilon = 0.05;
  double threshold = 0.5;
  double slack = 0.1;
  double picone_shift = 1e-8;
};

struct RunConfig {
  RunMode mode = RunMode::eig;
  GeometryConfig geometry;
  double p = 2.0;
  WeightSpec V, m;
  bool has_f = false;
  Nonlinearity f;
  double lambda = 0.0;            // solve mode
  double initial_amplitude = 0.0;  // solve mode tent start
  SolverConfig solver;
  ContinuationConfig continuation;
  VerifyConfig verify;
  std::string out_dir = "out";
  long seed = 0;
  int threads = 1;
};

// JSON text -> validated config; throws ConfigError with a readable message.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Executes one mode and writes its artifacts under cfg.out_dir. Returns the
// process exit status: 0 ok, 2 bad configuration, 3 solver failure, 4 a
// claim check failed. Nonzero statuses leave a machine-readable error.json.
int run(const RunConfig& cfg);

// Deterministic %.17g rendering used for every CSV cell.
std::string format_g17(double v);

struct BranchRow {
  long index = 0;
  double lambda = 0.0;
  double sup_norm = 0.0;
  double lp_star_norm = 0.0;
  double sobolev_norm = 0.0;
  double tangent_dlambda = 0.0;
  int is_fold = 0;
  double residual_norm = 0.0;
};

void write_branch_csv(const std::string& path, const Branch& b);
std::vector<BranchRow> read_branch_csv(const std::string& path);

struct ProfileSample {
  double r = 0.0;
  double value = 0.0;
};

void write_profile_csv(const std::string& path, const RadialMesh& mesh,
                       const GridFunction& u);
std::vector<ProfileSample> read_profile_csv(const std::string& path);

}  // namespace pbif::cli
