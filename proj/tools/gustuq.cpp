// gustuq: ground truth, convergence sweeps, PDF export and single-point
// simulation for the gust-response UQ benchmark.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gustuq/harness.hpp"

namespace fs = std::filesystem;
using namespace gustuq;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string methods;
  std::string format = "csv";
  bool no_timing = false;
  std::vector<double> point;
};

StudyConfig make_config(const Options& o) {
  StudyConfig c = o.config.empty() ? StudyConfig{} : load_study_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (!o.methods.empty()) {
    c.methods.clear();
    std::stringstream ss(o.methods);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) c.methods.push_back(parse_method(tok));
  }
  if (o.no_timing) c.timing = false;
  c.validate();
  return c;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write " + p.string());
  return f;
}

GroundTruth truth_for(const StudyConfig& c, const fs::path& dir) {
  fs::create_directories(dir);
  return load_or_compute_ground_truth(c, dir / "truth.json");
}

void print_truth(const GroundTruth& gt) {
  for (QoI q : kAllQoIs)
    std::printf("%-22s mean %.6g  std %.6g  p95 %.6g\n", qoi_name(q), gt[q].mean, gt[q].std_dev, gt[q].p95);
}

int cmd_truth(const Options& o) {
  const StudyConfig c = make_config(o);
  const GroundTruth gt = truth_for(c, o.out);
  print_truth(gt);
  std::printf("wrote %s\n", (fs::path(o.out) / "truth.json").string().c_str());
  return 0;
}

int cmd_converge(const Options& o) {
  const StudyConfig c = make_config(o);
  const GroundTruth gt = truth_for(c, o.out);
  const auto records = run_convergence(c, gt);
  const fs::path dir(o.out);
  if (o.format == "json") {
    auto f = open_out(dir / "convergence.json");
    f << to_json(records).dump(2) << '\n';
  } else {
    auto f = open_out(dir / "convergence.csv");
    write_convergence_csv(f, records);
  }
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.failed;
  std::printf("%zu records (%zu failed) written to %s\n", records.size(), failed,
              (dir / (o.format == "json" ? "convergence.json" : "convergence.csv")).string().c_str());
  return 0;
}

int cmd_pdf(const Options& o) {
  const StudyConfig c = make_config(o);
  const GroundTruth gt = truth_for(c, o.out);
  const auto hist = export_pdf_data(gt.surrogates, c.pdf.samples, c.pdf.bins, derive_seed(c.seed, "pdf"));
  for (QoI q : kAllQoIs) {
    const fs::path p = fs::path(o.out) / (std::string("pdf_") + qoi_name(q) + ".csv");
    auto f = open_out(p);
    write_histogram_csv(f, hist[static_cast<std::size_t>(q)]);
    std::printf("wrote %s\n", p.string().c_str());
  }
  return 0;
}

int cmd_simulate(const Options& o) {
  const StudyConfig c = make_config(o);
  if (c.constant_model) throw ConfigError("simulate needs the gust model, not a constant override");
  const GustBenchmark model(c.space, c.model);
  std::vector<double> x = o.point.empty() ? c.space.midpoint() : o.point;
  if (x.size() != c.space.dimension())
    throw ArgumentError("--point needs " + std::to_string(c.space.dimension()) + " values");
  to_standard(x, c.space);  // range check
  const TimeHistory h = model.history(x);
  fs::create_directories(o.out);
  const fs::path p = fs::path(o.out) / "timehistory.csv";
  auto f = open_out(p);
  write_time_history_csv(f, h);
  const QoIRecord r = qois(h);
  std::printf("max_tip_displacement %.9g m, avg_strain_energy %.9g J\nwrote %s\n", r.max_tip_displacement,
              r.avg_strain_energy, p.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gust-response uncertainty quantification harness"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "study configuration (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override the configured seed");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--methods", o.methods, "comma list of nipc,kriging,mc,udr,gudr");
  };

  auto* truth = app.add_subcommand("truth", "compute (or reuse) the ground truth and write truth.json");
  auto* converge = app.add_subcommand("converge", "run every method over its budget grid");
  auto* pdf = app.add_subcommand("pdf", "histogram the ground-truth surrogates into pdf_<qoi>.csv");
  auto* simulate = app.add_subcommand("simulate", "dump one time history to timehistory.csv");
  for (auto* s : {truth, converge, pdf, simulate}) common(s);
  converge->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  converge->add_flag("--no-timing", o.no_timing, "write wall_time_s as 0 for reproducible output");
  simulate->add_option("--point", o.point, "physical input values in input-space order")->delimiter(',');

  CLI11_PARSE(app, argc, argv);
  try {
    if (*truth) return cmd_truth(o);
    if (*converge) return cmd_converge(o);
    if (*pdf) return cmd_pdf(o);
    if (*simulate) return cmd_simulate(o);
  } catch (const FidelityError& e) {
    std::fprintf(stderr, "fidelity error: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
