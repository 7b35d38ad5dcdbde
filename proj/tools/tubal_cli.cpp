// tubal: command-line driver for synthetic data, degradation, tensor
// completion, tensor RPCA, quality metrics and t-SVD inspection.
//
// Exit codes: 0 success, 2 bad input, 3 numerical failure.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tubal/tubal.hpp"

namespace {

using tubal::Tensor3;
using json = nlohmann::ordered_json;

constexpr int kExitBadInput = 2;
constexpr int kExitNumerical = 3;

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

json json_number(double v) {
  if (!std::isfinite(v)) return format_number(v);
  return v;
}

/// Line-delimited key=value records plus a JSON summary at <path>.json.
class Report {
 public:
  void add(const std::string& key, double v) {
    lines_.emplace_back(key, format_number(v));
    doc_[key] = json_number(v);
  }
  void add(const std::string& key, std::size_t v) {
    lines_.emplace_back(key, std::to_string(v));
    doc_[key] = v;
  }
  void add(const std::string& key, bool v) {
    lines_.emplace_back(key, v ? "true" : "false");
    doc_[key] = v;
  }
  void add(const std::string& key, const std::string& v) {
    lines_.emplace_back(key, v);
    doc_[key] = v;
  }
  void add_series(const std::string& key, const std::vector<double>& values, bool in_lines = true) {
    json arr = json::array();
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) {
      arr.push_back(json_number(values[i]));
      if (i > 0) joined += ',';
      joined += format_number(values[i]);
    }
    if (in_lines) lines_.emplace_back(key, joined);
    doc_[key] = std::move(arr);
  }

  void write(const std::optional<std::string>& path) const {
    std::ostringstream text;
    for (const auto& [k, v] : lines_) text << k << '=' << v << '\n';
    if (!path) {
      std::cout << text.str();
      return;
    }
    write_text(*path, text.str());
    write_text(*path + ".json", doc_.dump(2) + "\n");
  }

 private:
  static void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw tubal::InvalidArgument("cannot write " + path);
    out << content;
  }

  std::vector<std::pair<std::string, std::string>> lines_;
  json doc_ = json::object();
};

std::vector<std::size_t> parse_triple(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw tubal::InvalidArgument(std::string("bad ") + what + ": " + text);
    }
    out.push_back(v);
  }
  if (out.size() != 3) throw tubal::InvalidArgument(std::string(what) + " needs three comma-separated values");
  return out;
}

/// "3,1,2" (1-based, output axis d takes input axis perm[d]) -> 0-based permutation.
tubal::ModePermutation parse_twist(const std::string& text) {
  const auto v = parse_triple(text, "--twist");
  tubal::ModePermutation p{};
  for (std::size_t d = 0; d < 3; ++d) {
    if (v[d] < 1 || v[d] > 3) throw tubal::InvalidArgument("--twist axes are 1-based: 1, 2, 3");
    p[d] = v[d] - 1;
  }
  tubal::check_permutation(p);
  return p;
}

/// Flags shared by `complete` and `rpca`.
struct SolverFlags {
  std::string penalty = "mcp";
  double mu0 = 1.0;
  double rho = 1.1;
  double mu_max = 1e10;
  double inner_tol = 1e-7;
  std::size_t inner_iters = 500;
  std::size_t outer_iters = 10;
  std::string twist;
  std::string init = "tnn";
  bool freeze_weight_mu = false;

  void attach(CLI::App* app) {
    app->add_option("--penalty", penalty, "Penalty: scad, mcp or tnn (convex)")
        ->check(CLI::IsMember({"scad", "mcp", "tnn"}))
        ->capture_default_str();
    app->add_option("--mu0", mu0, "Initial ADMM penalty")->capture_default_str();
    app->add_option("--rho", rho, "ADMM penalty growth factor")->capture_default_str();
    app->add_option("--mu-max", mu_max, "ADMM penalty cap")->capture_default_str();
    app->add_option("--inner-tol", inner_tol, "Inner stopping tolerance (max-abs residual)")
        ->capture_default_str();
    app->add_option("--inner-iters", inner_iters, "Inner iteration cap")->capture_default_str();
    app->add_option("--outer-iters", outer_iters, "MM outer iterations (1 = one-step LLA)")
        ->capture_default_str();
    app->add_option("--twist", twist, "Mode permutation applied before solving, 1-based, e.g. 3,1,2");
    app->add_option("--init", init, "Initialization: tnn or file:<path>")->capture_default_str();
    app->add_flag("--freeze-weight-mu", freeze_weight_mu,
                  "Divide penalty derivatives by mu0 instead of the current mu");
  }

  [[nodiscard]] bool convex() const { return penalty == "tnn"; }

  [[nodiscard]] tubal::SolverConfig config() const {
    tubal::SolverConfig cfg;
    cfg.penalty = penalty == "scad" ? tubal::PenaltyKind::scad : tubal::PenaltyKind::mcp;
    cfg.mu0 = mu0;
    cfg.rho = rho;
    cfg.mu_max = mu_max;
    cfg.inner_tol = inner_tol;
    cfg.inner_max_iters = inner_iters;
    cfg.outer_iters = outer_iters;
    cfg.freeze_weight_mu = freeze_weight_mu;
    if (!twist.empty()) cfg.twist = parse_twist(twist);
    if (init == "tnn") {
      cfg.init = tubal::InitKind::convex;
    } else if (init.rfind("file:", 0) == 0) {
      cfg.init = tubal::InitKind::provided;
      cfg.initial = tubal::load_tensor_any(init.substr(5));
    } else {
      throw tubal::InvalidArgument("--init must be tnn or file:<path>");
    }
    return cfg;
  }
};

void add_solve_stats(Report& report, const tubal::SolveReport& r) {
  report.add("iterations_used", r.iterations_used);
  report.add("init_iterations", r.init_iterations);
  report.add("hit_iteration_cap", r.hit_iteration_cap);
  report.add("final_feasibility", r.feasibility_trace.empty() ? 0.0 : r.feasibility_trace.back());
  report.add_series("objective_trace", r.objective_trace);
  std::vector<double> inner(r.inner_iterations.begin(), r.inner_iterations.end());
  report.add_series("inner_iterations", inner);
  report.add_series("feasibility_trace", r.feasibility_trace, /*in_lines=*/false);
}

int run(int argc, char** argv) {
  CLI::App app{"Low-tubal-rank tensor completion and robust PCA"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a random low-tubal-rank tensor");
  std::string synth_dims;
  std::size_t synth_rank = 0;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth->add_option("--dims", synth_dims, "n1,n2,n3")->required();
  synth->add_option("--rank", synth_rank, "Tubal rank")->required();
  synth->add_option("--seed", synth_seed, "PRNG seed")->required();
  synth->add_option("--out", synth_out, "Output tensor file")->required();

  // degrade
  auto* degrade = app.add_subcommand("degrade", "Subsample or corrupt a tensor");
  std::string deg_in;
  std::string deg_out;
  std::string deg_mask_out;
  std::optional<double> deg_mask_rate;
  std::optional<double> deg_salt_pepper;
  std::optional<double> deg_uniform;
  double deg_peak = 1.0;
  std::uint64_t deg_seed = 0;
  degrade->add_option("--in", deg_in, "Input tensor or PGM/PPM image")->required();
  auto* o_rate = degrade->add_option("--mask-rate", deg_mask_rate, "Keep each entry with this probability");
  auto* o_sp = degrade->add_option("--salt-pepper", deg_salt_pepper, "Salt-and-pepper probability");
  auto* o_un = degrade->add_option("--uniform-noise", deg_uniform, "Uniform-noise probability");
  o_rate->excludes(o_sp)->excludes(o_un);
  o_sp->excludes(o_un);
  degrade->add_option("--peak", deg_peak, "Salt value for salt-and-pepper noise")->capture_default_str();
  degrade->add_option("--seed", deg_seed, "PRNG seed")->required();
  degrade->add_option("--out", deg_out, "Output tensor file")->required();
  degrade->add_option("--mask-out", deg_mask_out, "Mask file (required with --mask-rate)");

  // complete
  auto* complete = app.add_subcommand("complete", "Low-rank tensor completion");
  SolverFlags tc_flags;
  std::string tc_in;
  std::string tc_mask;
  std::string tc_out;
  std::optional<std::string> tc_report;
  double tc_gamma = 25.0;
  complete->add_option("--in", tc_in, "Observed tensor (unobserved entries ignored)")->required();
  complete->add_option("--mask", tc_mask, "Observation mask file")->required();
  complete->add_option("--gamma", tc_gamma, "Rank surrogate gamma")->capture_default_str();
  tc_flags.attach(complete);
  complete->add_option("--out", tc_out, "Recovered tensor file")->required();
  complete->add_option("--report", tc_report, "Report path (stdout if omitted)");

  // rpca
  auto* rpca = app.add_subcommand("rpca", "Tensor robust PCA");
  SolverFlags rp_flags;
  std::string rp_in;
  std::string rp_out_l;
  std::string rp_out_e;
  std::optional<std::string> rp_report;
  double rp_gamma1 = 20.0;
  double rp_gamma2 = 20.0;
  std::optional<double> rp_lambda;
  std::string rp_init_sparse;
  rpca->add_option("--in", rp_in, "Corrupted tensor or PGM/PPM image")->required();
  rpca->add_option("--gamma1", rp_gamma1, "Low-rank surrogate gamma")->capture_default_str();
  rpca->add_option("--gamma2", rp_gamma2, "Sparsity measure gamma")->capture_default_str();
  rpca->add_option("--lambda", rp_lambda, "Sparse weight (default 1/sqrt(max(n1,n2) n3))");
  rpca->add_option("--init-sparse", rp_init_sparse, "Initial sparse part with --init file:<L0>");
  rp_flags.attach(rpca);
  rpca->add_option("--out-l", rp_out_l, "Low-rank part output")->required();
  rpca->add_option("--out-e", rp_out_e, "Sparse part output")->required();
  rpca->add_option("--report", rp_report, "Report path (stdout if omitted)");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Quality indexes of an estimate");
  std::string m_ref;
  std::string m_est;
  double m_peak = 1.0;
  std::optional<std::string> m_report;
  metrics->add_option("--ref", m_ref, "Reference tensor or image")->required();
  metrics->add_option("--est", m_est, "Estimate tensor or image")->required();
  metrics->add_option("--peak", m_peak, "Peak value for PSNR/SSIM")->capture_default_str();
  metrics->add_option("--report", m_report, "Report path (stdout if omitted)");

  // tsvd
  auto* tsvd = app.add_subcommand("tsvd", "Spectral singular values of a tensor");
  std::string ts_in;
  std::string ts_dump;
  tsvd->add_option("--in", ts_in, "Input tensor or image")->required();
  tsvd->add_option("--dump-spectrum", ts_dump, "Write S̄(i,i,k) as a p x 1 x n3 tensor")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  if (*synth) {
    const auto d = parse_triple(synth_dims, "--dims");
    tubal::write_tensor(synth_out, tubal::synth_low_tubal_rank({d[0], d[1], d[2]}, synth_rank, synth_seed));
    return 0;
  }

  if (*degrade) {
    const Tensor3 input = tubal::load_tensor_any(deg_in);
    if (deg_mask_rate) {
      if (deg_mask_out.empty()) throw tubal::InvalidArgument("--mask-rate requires --mask-out");
      const auto mask = tubal::random_mask(input.dims(), *deg_mask_rate, deg_seed);
      tubal::write_tensor(deg_out, tubal::project_observed(Tensor3(input.dims()), input, mask));
      tubal::write_mask(deg_mask_out, mask);
    } else if (deg_salt_pepper) {
      tubal::write_tensor(deg_out, tubal::add_salt_pepper(input, *deg_salt_pepper, deg_peak, deg_seed));
    } else if (deg_uniform) {
      tubal::write_tensor(deg_out, tubal::add_uniform_noise(input, *deg_uniform, deg_seed));
    } else {
      throw tubal::InvalidArgument("degrade needs one of --mask-rate, --salt-pepper, --uniform-noise");
    }
    return 0;
  }

  if (*complete) {
    const Tensor3 observed = tubal::load_tensor_any(tc_in);
    const auto mask = tubal::read_mask(tc_mask);
    auto cfg = tc_flags.config();
    cfg.gamma = tc_gamma;
    const auto result = tc_flags.convex() ? tubal::convex_tc(observed, mask, cfg)
                                          : tubal::lrtc_mm(observed, mask, cfg);
    tubal::write_tensor(tc_out, result.estimate);
    Report report;
    report.add("task", std::string("complete"));
    report.add("penalty", tc_flags.penalty);
    report.add("gamma", tc_gamma);
    report.add("observed_fraction", static_cast<double>(mask.count()) / static_cast<double>(mask.size()));
    add_solve_stats(report, result);
    report.write(tc_report);
    return 0;
  }

  if (*rpca) {
    const Tensor3 input = tubal::load_tensor_any(rp_in);
    auto cfg = rp_flags.config();
    cfg.gamma_rank = rp_gamma1;
    cfg.gamma_sparse = rp_gamma2;
    cfg.lambda = rp_lambda;
    if (!rp_init_sparse.empty()) cfg.initial_sparse = tubal::load_tensor_any(rp_init_sparse);
    const double lambda = rp_lambda.value_or(tubal::default_rpca_lambda(input.dims()));
    const auto result = rp_flags.convex() ? tubal::convex_trpca(input, lambda, cfg) : tubal::trpca_mm(input, cfg);
    tubal::write_tensor(rp_out_l, result.estimate);
    tubal::write_tensor(rp_out_e, result.sparse);
    Report report;
    report.add("task", std::string("rpca"));
    report.add("penalty", rp_flags.penalty);
    report.add("gamma1", rp_gamma1);
    report.add("gamma2", rp_gamma2);
    report.add("lambda", lambda);
    add_solve_stats(report, result);
    report.write(rp_report);
    return 0;
  }

  if (*metrics) {
    const Tensor3 ref = tubal::load_tensor_any(m_ref);
    const Tensor3 est = tubal::load_tensor_any(m_est);
    const auto m = tubal::evaluate_metrics(ref, est, m_peak);
    Report report;
    report.add("mse", m.mse);
    report.add("mse_units_1e-4", m.mse * 1e4);
    report.add("psnr", m.psnr);
    report.add("ssim", m.ssim);
    report.add("ergas", m.ergas ? format_number(*m.ergas) : std::string("undefined"));
    report.add("sam", m.sam ? format_number(*m.sam) : std::string("undefined"));
    report.add("sam_skipped", m.sam_skipped);
    report.write(m_report);
    return 0;
  }

  if (*tsvd) {
    const Tensor3 input = tubal::load_tensor_any(ts_in);
    const auto sd = tubal::spectral_singular_values(input);
    const std::size_t p = static_cast<std::size_t>(sd.rows());
    Tensor3 dump(tubal::Dims{p, 1, input.dims().n3});
    for (std::size_t k = 0; k < input.dims().n3; ++k) {
      for (std::size_t i = 0; i < p; ++i) {
        dump(i, 0, k) = sd(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      }
    }
    tubal::write_tensor(ts_dump, dump);
    Report report;
    report.add("tubal_rank", tubal::tubal_rank(sd, 1e-9));
    report.add("tensor_nuclear_norm", tubal::tensor_nuclear_norm(sd, input.dims()));
    report.write(std::nullopt);
    return 0;
  }
  return kExitBadInput;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tubal::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const tubal::InvalidArgument& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
