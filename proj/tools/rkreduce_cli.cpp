// Command-line front end: reproduce the simulation presets, transform user
// datasets, run the validation suite, and execute the DP transform.
//
// Exit codes: 0 pass, 1 validation/runtime failure, 2 usage error.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rkreduce/rkreduce.hpp"
#include "rkreduce/validation.hpp"

namespace {

using nlohmann::json;

// Shortest round-trip decimal rendering.
std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used])))
      ++used;
    return used == s.size();
  } catch (...) {
    return false;
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CLI::ValidationError("cannot write to '" + path + "'");
  return out;
}

struct SimulatedTheta {
  double theta;
  std::string file;
  rkreduce::TvEstimate tv;
  double mean;
  double var;
  double accept_rate;
};

int cmd_simulate(const std::string& preset, std::uint64_t seed, bool quick,
                 int threads, const std::string& out_dir,
                 const std::string& format) {
  using namespace rkreduce;
  ReductionPlan plan;
  std::vector<double> thetas{-5.0, -2.5, 0.0, 2.5, 5.0};
  std::size_t k_draws = 0;
  std::function<double(double, SplitMix64&)> draw_source;
  std::function<double(double)> target_mean;
  double target_sigma = 0.0;

  if (preset == "fig1") {
    plan = laplace_gaussian_plan(1.0, 5.0, 20, 0.01);
    k_draws = quick ? 50000 : 500000;
    draw_source = [](double theta, SplitMix64& rng) {
      return theta + sample_laplace(rng);
    };
    target_mean = [](double theta) { return theta; };
    target_sigma = 5.0;
  } else if (preset == "fig2") {
    plan = uniform_abs_plan(10.0, 0.1, 10.0, 3000);
    thetas = {-0.5, -0.25, 0.0, 0.25, 0.5};
    k_draws = quick ? 50000 : 1000000;
    draw_source = [](double theta, SplitMix64& rng) {
      return theta - 0.5 + uniform01(rng);
    };
    target_mean = [](double theta) { return 10.0 * std::fabs(theta); };
    target_sigma = 10.0;
  } else {
    throw CLI::ValidationError("unknown preset '" + preset + "'");
  }

  json summary;
  summary["preset"] = preset;
  summary["seed"] = seed;
  summary["samples_per_theta"] = k_draws;
  summary["plan"] = plan_to_json(plan);
  summary["per_theta"] = json::array();

  for (std::size_t idx = 0; idx < thetas.size(); ++idx) {
    const double theta = thetas[idx];
    SplitMix64 src = SplitMix64::stream(seed, 1000 + idx);
    std::vector<double> xs(k_draws);
    for (auto& x : xs) x = draw_source(theta, src);
    const RunResult run = run_reduction(plan, xs, seed + 7 * idx, threads);

    const std::string file =
        out_dir + "/" + preset + "_theta" + std::to_string(idx) +
        (format == "json" ? ".json" : ".csv");
    std::ofstream out = open_output(file);
    if (format == "json") {
      json rows = json::array();
      for (std::size_t i = 0; i < xs.size(); ++i)
        rows.push_back({{"index", i},
                        {"x", xs[i]},
                        {"y", run.outputs[i]},
                        {"accepted", run.traces[i].accepted},
                        {"iterations", run.traces[i].iterations_used}});
      out << rows.dump() << "\n";
    } else {
      out << "index,x,y,accepted,iterations\n";
      for (std::size_t i = 0; i < xs.size(); ++i) {
        out << i << ',' << fmt(xs[i]) << ',' << fmt(run.outputs[i]) << ','
            << (run.traces[i].accepted ? 1 : 0) << ','
            << run.traces[i].iterations_used << "\n";
      }
    }

    const double mu = target_mean(theta);
    const TvEstimate tv = tv_histogram(
        run.outputs, gaussian_density(mu, target_sigma), mu, target_sigma);
    double mean = 0.0;
    for (double y : run.outputs) mean += y;
    mean /= run.outputs.size();
    double var = 0.0;
    for (double y : run.outputs) var += (y - mean) * (y - mean);
    var /= (run.outputs.size() - 1);

    json row;
    row["theta"] = theta;
    row["file"] = file;
    row["tv"] = tv.to_json();
    row["mean"] = mean;
    row["var"] = var;
    row["accept_rate"] =
        static_cast<double>(run.summary.accepted) / run.summary.count;
    summary["per_theta"].push_back(row);
  }

  std::ofstream sout = open_output(out_dir + "/" + preset + "_summary.json");
  sout << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_reduce(const std::string& plan_path, const std::string& in_path,
               const std::string& out_path, std::uint64_t seed, int threads) {
  using namespace rkreduce;
  ReductionPlan plan;
  if (plan_path == "fig1" || plan_path == "fig2") {
    plan = preset_plan(plan_path);
  } else {
    std::ifstream pf(plan_path);
    if (!pf) throw CLI::ValidationError("cannot read plan '" + plan_path + "'");
    json pj;
    pf >> pj;
    plan = plan_from_json(pj);
  }

  std::ifstream in(in_path);
  if (!in) throw CLI::ValidationError("cannot read input '" + in_path + "'");
  std::vector<double> xs;
  std::string line;
  bool had_header = false;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v = 0.0;
    if (!parse_double(split_csv_line(line)[0], v)) {
      if (first) {
        had_header = true;
        first = false;
        continue;
      }
      throw CLI::ValidationError("non-numeric x value: '" + line + "'");
    }
    first = false;
    xs.push_back(v);
  }

  const RunResult run = run_reduction(plan, xs, seed, threads);
  std::ofstream out = open_output(out_path);
  out << "# plan: " << plan_to_json(plan).dump() << "\n";
  if (had_header || true) out << "x,y\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << fmt(xs[i]) << ',' << fmt(run.outputs[i]) << "\n";
  return 0;
}

int cmd_validate(std::uint64_t seed, bool quick, int threads,
                 const std::string& report_path, bool corrupt_m) {
  using namespace rkreduce;
  if (corrupt_m) {
    const std::string msg = m_violation_probe(seed);
    if (msg.empty()) {
      std::cout << "corrupted M probe did not trigger the expected error\n";
      return 1;
    }
    std::cout << "validation failure surfaced: " << msg << "\n";
    return 1;
  }
  ValidationOptions opt;
  opt.seed = seed;
  opt.quick = quick;
  opt.threads = threads;
  const std::vector<CriterionResult> results = run_validation(opt, &std::cout);
  json report = json::array();
  int failures = 0;
  for (const CriterionResult& r : results) {
    report.push_back(r.to_json());
    failures += r.pass ? 0 : 1;
  }
  if (!report_path.empty()) {
    std::ofstream out = open_output(report_path);
    out << report.dump(2) << "\n";
  }
  std::cout << (failures == 0 ? "VALIDATION PASS" : "VALIDATION FAIL") << " ("
            << (results.size() - failures) << "/" << results.size() << ")\n";
  return failures == 0 ? 0 : 1;
}

int cmd_dp(double g_out, double b, double delta, std::uint64_t seed) {
  using namespace rkreduce;
  SplitMix64 rng(seed);
  const DpTransformResult res = dp_laplace_to_gaussian(g_out, b, delta, rng);
  json j = res.to_json();
  j["seed"] = seed;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_moe(const std::string& in_path, const std::string& out_path,
            double delta, std::uint64_t seed) {
  using namespace rkreduce;
  std::ifstream in(in_path);
  if (!in) throw CLI::ValidationError("cannot read input '" + in_path + "'");
  std::string line;
  std::vector<std::string> header;
  std::vector<LabeledSample> data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    double probe = 0.0;
    if (header.empty() && !parse_double(cells[0], probe)) {
      header = cells;
      continue;
    }
    if (cells.size() < 2)
      throw CLI::ValidationError("need at least one covariate column plus y");
    LabeledSample row;
    for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
      double v = 0.0;
      if (!parse_double(cells[j], v))
        throw CLI::ValidationError("non-numeric covariate '" + cells[j] + "'");
      row.x.push_back(v);
    }
    double y = 0.0;
    if (!parse_double(cells.back(), y))
      throw CLI::ValidationError("non-numeric response '" + cells.back() + "'");
    row.y = y;
    data.push_back(std::move(row));
  }
  const auto out_rows = moe_to_phase_retrieval(data, delta, seed);
  std::ofstream out = open_output(out_path);
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j)
      out << header[j] << (j + 1 < header.size() ? "," : "\n");
  } else if (!data.empty()) {
    for (std::size_t j = 0; j < data[0].x.size(); ++j) out << "x" << (j + 1) << ",";
    out << "y\n";
  }
  for (const LabeledSample& row : out_rows) {
    for (double v : row.x) out << fmt(v) << ',';
    out << fmt(row.y) << "\n";
  }
  return 0;
}

int cmd_denoise(const std::string& in_path, const std::string& out_path,
                const std::string& target_name, double sigma, double eps,
                std::uint64_t seed) {
  using namespace rkreduce;
  std::ifstream in(in_path);
  if (!in) throw CLI::ValidationError("cannot read input '" + in_path + "'");
  MaskedVector mv;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::string cell = split_csv_line(line)[0];
    if (cell == "★" || cell == "*") {
      mv.values.push_back(std::numeric_limits<double>::quiet_NaN());
      mv.mask.push_back(false);
      first = false;
      continue;
    }
    double v = 0.0;
    if (!parse_double(cell, v)) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw CLI::ValidationError("non-numeric value '" + cell + "'");
    }
    first = false;
    mv.values.push_back(v);
    mv.mask.push_back(true);
  }

  LogConcaveTarget target;
  if (target_name == "gaussian") {
    target = gaussian_target(sigma);
  } else if (target_name == "logistic") {
    target = logistic_target(sigma);
  } else if (target_name == "laplace") {
    target = MollifiedLaplacePsi(std::min(eps, 0.99)).target(sigma);
  } else {
    throw CLI::ValidationError("unknown target '" + target_name + "'");
  }
  const MaskedVector out_v = denoise_transform(mv, target, eps, seed);
  std::ofstream out = open_output(out_path);
  out << "value\n";
  for (std::size_t i = 0; i < out_v.values.size(); ++i) {
    if (out_v.mask[i])
      out << fmt(out_v.values[i]) << "\n";
    else
      out << "★\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rejection-kernel reductions between location models"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  bool quick = false;
  int threads = 2;
  std::string format = "csv";
  auto add_common = [&](CLI::App* sub, bool with_quick, bool with_threads) {
    sub->add_option("--seed", seed, "master seed (per-row streams derive from it)");
    if (with_quick)
      sub->add_flag("--quick", quick, "small-sample variant of the heavy runs");
    if (with_threads)
      sub->add_option("--threads", threads, "worker threads (outputs are identical)");
  };

  auto* sim = app.add_subcommand("simulate", "run a named simulation preset");
  std::string preset, out_dir = ".";
  sim->add_option("--preset", preset, "fig1 or fig2")->required();
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--format", format, "csv or json sample files")
      ->check(CLI::IsMember({"csv", "json"}));
  add_common(sim, true, true);

  auto* red = app.add_subcommand("reduce", "apply a plan to a CSV of x values");
  std::string plan_path, in_path, out_path = "out.csv";
  red->add_option("--plan", plan_path, "plan JSON file, or preset fig1/fig2")
      ->required();
  red->add_option("--in", in_path, "input CSV with column x")->required();
  red->add_option("--out", out_path, "output CSV");
  add_common(red, false, true);

  auto* val = app.add_subcommand("validate", "run the acceptance suite");
  std::string report_path;
  bool corrupt_m = false;
  val->add_option("--out", report_path, "write the JSON report here");
  val->add_flag("--corrupt-m", corrupt_m,
                "force the M-violation error path and report it");
  add_common(val, true, true);

  auto* dp = app.add_subcommand("dp", "Laplace mechanism -> Gaussian mechanism");
  double g_out = 0.0, b = 1.0, delta = 0.05;
  dp->add_option("--g-out", g_out, "released Laplace mechanism output")->required();
  dp->add_option("--b", b, "Laplace scale of the mechanism");
  dp->add_option("--delta", delta, "TV budget, in (0,1)");
  add_common(dp, false, false);

  auto* moe = app.add_subcommand("moe", "mixture-of-experts -> phase retrieval");
  std::string moe_in, moe_out = "moe_out.csv";
  double moe_delta = 0.1;
  moe->add_option("--in", moe_in, "input CSV: covariates then response")->required();
  moe->add_option("--out", moe_out, "output CSV");
  moe->add_option("--delta", moe_delta, "total TV budget");
  add_common(moe, false, false);

  auto* den = app.add_subcommand("denoise", "noise swap with missing entries");
  std::string den_in, den_out = "denoise_out.csv", den_target = "gaussian";
  double den_sigma = 3.0, den_eps = 0.01;
  den->add_option("--in", den_in, "input CSV; star rows are unobserved")->required();
  den->add_option("--out", den_out, "output CSV");
  den->add_option("--target", den_target, "gaussian, logistic, or laplace");
  den->add_option("--sigma", den_sigma, "target scale");
  den->add_option("--eps", den_eps, "per-entry TV budget");
  add_common(den, false, false);

  try {
    app.parse(argc, argv);
    if (sim->parsed())
      return cmd_simulate(preset, seed, quick, threads, out_dir, format);
    if (red->parsed()) return cmd_reduce(plan_path, in_path, out_path, seed, threads);
    if (val->parsed())
      return cmd_validate(seed, quick, threads, report_path, corrupt_m);
    if (dp->parsed()) {
      if (!(delta > 0.0 && delta < 1.0))
        throw CLI::ValidationError("--delta must lie in (0, 1)");
      return cmd_dp(g_out, b, delta, seed);
    }
    if (moe->parsed()) return cmd_moe(moe_in, moe_out, moe_delta, seed);
    if (den->parsed())
      return cmd_denoise(den_in, den_out, den_target, den_sigma, den_eps, seed);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit cleanly, usage errors -> 2
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
