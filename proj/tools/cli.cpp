#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "bboxlab/csv.hpp"
#include "run_config.hpp"
#include "svg_plot.hpp"

#ifndef BBOXLAB_VERSION
#define BBOXLAB_VERSION "0.0.0"
#endif

namespace bboxlab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Internal sanity check failure (exit code 3).
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::string seed;
  std::size_t samples = 0;
  unsigned threads = 0;
  bool plot = false;

  std::string grid, grid_spacing, anchor_ratios, anchor_scales, gt_ratios, gt_center, gt_area;
  std::string eta, iters, kinds, alpha, domain;

  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const {
    const auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_common_flags(CLI::App& cmd, CommonFlags& f) {
  f.opts["config"] = cmd.add_option("--config", f.config_path,
                                    "JSON config file (or a previous run manifest)");
  f.opts["out"] = cmd.add_option("--out", f.out_dir, "Output directory")->capture_default_str();
  f.opts["seed"] = cmd.add_option("--seed", f.seed,
                                  "Random seed (fallback: $BBOXLAB_SEED, then 42)");
  f.opts["samples"] = cmd.add_option("--samples", f.samples, "Number of random box pairs");
  f.opts["threads"] = cmd.add_option("--threads", f.threads,
                                     "Worker threads (default: available parallelism)");
  f.opts["plot"] = cmd.add_flag("--plot", f.plot, "Also write an SVG plot of each table");

  f.opts["grid"] = cmd.add_option("--grid", f.grid, "Anchor grid side count");
  f.opts["grid-spacing"] = cmd.add_option("--grid-spacing", f.grid_spacing,
                                          "Distance between grid points");
  f.opts["anchor-ratios"] = cmd.add_option("--anchor-ratios", f.anchor_ratios,
                                           "Anchor width:height ratios, e.g. 2:1,1:1,1:2");
  f.opts["anchor-scales"] = cmd.add_option("--anchor-scales", f.anchor_scales,
                                           "Anchor scales (sqrt of area), e.g. 2,4,6");
  f.opts["gt-ratios"] = cmd.add_option("--gt-ratios", f.gt_ratios,
                                       "Ground-truth width:height ratios");
  f.opts["gt-center"] = cmd.add_option("--gt-center", f.gt_center, "Ground-truth center x,y");
  f.opts["gt-area"] = cmd.add_option("--gt-area", f.gt_area, "Ground-truth box area");
  f.opts["eta"] = cmd.add_option("--eta", f.eta, "Gradient descent learning rate");
  f.opts["iters"] = cmd.add_option("--iters", f.iters, "Gradient descent iterations");
  f.opts["kinds"] = cmd.add_option("--kinds", f.kinds,
                                   "Loss kinds: iou,giou,diou,ciou,so,cd,sca,center,smoothl1");
  f.opts["alpha"] = cmd.add_option("--alpha", f.alpha, "Weight of the corner-distance term");
  f.opts["domain"] = cmd.add_option("--domain", f.domain,
                                    "Pair sampling domain: unit|disjoint|overlapping|offtie");
}

int parse_int(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("invalid ") + what + " '" + text + "'");
  }
}

double parse_real(const std::string& text, const char* what) {
  const std::vector<double> v = parse_number_list(text, false);
  if (v.size() != 1) throw ConfigError(std::string("invalid ") + what + " '" + text + "'");
  return v[0];
}

RunConfig resolve_config(const std::string& command, const CommonFlags& f) {
  RunConfig config = defaults_for(command);
  if (const char* env = std::getenv(kSeedEnvVar); env && *env) {
    config.sim.seed = parse_seed(env);
  }
  if (f.given("config")) apply_config_file(config, f.config_path);

  SimConfig& sim = config.sim;
  if (f.given("seed")) sim.seed = parse_seed(f.seed);
  if (f.given("samples")) config.samples = f.samples;
  if (f.given("grid")) sim.grid = parse_int(f.grid, "grid");
  if (f.given("grid-spacing")) sim.grid_spacing = parse_real(f.grid_spacing, "grid spacing");
  if (f.given("anchor-ratios")) sim.anchor_ratios = parse_number_list(f.anchor_ratios, true);
  if (f.given("anchor-scales")) sim.anchor_scales = parse_number_list(f.anchor_scales, false);
  if (f.given("gt-ratios")) sim.gt_ratios = parse_number_list(f.gt_ratios, true);
  if (f.given("gt-center")) sim.gt_center = parse_point(f.gt_center);
  if (f.given("gt-area")) sim.gt_area = parse_real(f.gt_area, "gt area");
  if (f.given("eta")) sim.eta = parse_real(f.eta, "eta");
  if (f.given("iters")) sim.iters = parse_int(f.iters, "iters");
  if (f.given("alpha")) sim.alpha = parse_real(f.alpha, "alpha");
  try {
    if (f.given("kinds")) sim.kinds = parse_loss_kinds(f.kinds);
    if (f.given("domain")) config.domain = parse_sample_domain(f.domain);
    sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (config.samples == 0) throw ConfigError("--samples must be at least 1");
  return config;
}

unsigned worker_count(const CommonFlags& f) {
  if (f.given("threads") && f.threads > 0) return f.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

PairSampler sampler_of(const RunConfig& config) {
  return {config.sim.seed, config.samples, config.domain};
}

void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw CheckFailure("non-finite value in " + what);
}

class OutputSet {
 public:
  OutputSet(const std::string& command, const CommonFlags& flags, const RunConfig& config)
      : command_(command), dir_(flags.out_dir), plot_(flags.plot), config_(config) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw ConfigError("cannot create output directory '" + dir_.string() + "'");
    }
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const fs::path path = dir_ / name;
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigError("cannot write '" + path.string() + "'");
    body(file);
    file.flush();
    if (!file) throw ConfigError("error while writing '" + path.string() + "'");
    written_.push_back(path.generic_string());
  }

  void figure(const std::string& stem, const plot::Figure& fig) {
    if (!plot_) return;
    write(stem + ".svg", [&](std::ostream& o) { o << plot::render_svg(fig); });
  }

  void finish(std::ostream& out) {
    const std::string manifest_name = command_ + ".manifest.json";
    std::vector<std::string> outputs = written_;
    outputs.push_back((dir_ / manifest_name).generic_string());
    const json manifest = {
        {"command", command_},
        {"tool_version", BBOXLAB_VERSION},
        {"seed", config_.sim.seed},
        {"config", to_json(config_)},
        {"outputs", outputs},
    };
    write(manifest_name, [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
    for (const std::string& p : written_) out << "wrote " << p << '\n';
  }

 private:
  std::string command_;
  fs::path dir_;
  bool plot_;
  RunConfig config_;
  std::vector<std::string> written_;
};

std::vector<double> iteration_axis(std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i);
  return xs;
}

int cmd_gradmag(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = resolve_config("gradmag", flags);
  const BinnedStats stats = grad_magnitude_study(
      sampler_of(config), config.sim.kinds, ScaParams{config.sim.alpha}, worker_count(flags));
  for (const auto& per_kind : stats.cells) {
    for (const BinCell& cell : per_kind) require_finite(cell.mean_grad_norm, "gradmag means");
  }

  OutputSet outputs("gradmag", flags, config);
  outputs.write("gradmag.csv", [&](std::ostream& o) { csv::write_gradmag(o, stats); });
  plot::Figure fig{"Mean gradient norm per IoU bin", "IoU", "mean |dL/dx|", {}};
  for (std::size_t k = 0; k < stats.kinds.size(); ++k) {
    plot::Series s{std::string(to_string(stats.kinds[k])), {}, {}, false};
    for (std::size_t bin = 0; bin < kIouBins; ++bin) {
      s.xs.push_back(0.5 * (stats.edges[bin] + stats.edges[bin + 1]));
      s.ys.push_back(stats.cells[k][bin].mean_grad_norm);
    }
    fig.series.push_back(std::move(s));
  }
  outputs.figure("gradmag", fig);
  out << "sampled " << stats.sampled << " pairs, skipped " << stats.skipped_degenerate
      << " degenerate\n";
  outputs.finish(out);
  return kExitOk;
}

int cmd_correlate(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = resolve_config("correlate", flags);
  const CorrelationTable table = correlation_study(sampler_of(config), worker_count(flags));
  for (const CorrelationRow& row : table.rows) {
    require_finite(row.iou + row.giou + row.so, "correlation rows");
    if (row.so > row.iou + 1.0 || row.so > row.giou + 1.0) {
      throw CheckFailure("side overlap exceeds IoU + 1 or GIoU + 1");
    }
  }

  OutputSet outputs("correlate", flags, config);
  outputs.write("correlation.csv", [&](std::ostream& o) { csv::write_correlation(o, table); });
  plot::Figure fig{"Side overlap against IoU and GIoU", "IoU / GIoU", "SO", {}};
  plot::Series vs_iou{"iou", {}, {}, true};
  plot::Series vs_giou{"giou", {}, {}, true};
  const std::size_t stride = std::max<std::size_t>(1, table.rows.size() / 4000);
  for (std::size_t i = 0; i < table.rows.size(); i += stride) {
    vs_iou.xs.push_back(table.rows[i].iou);
    vs_iou.ys.push_back(table.rows[i].so);
    vs_giou.xs.push_back(table.rows[i].giou);
    vs_giou.ys.push_back(table.rows[i].so);
  }
  fig.series = {vs_iou, vs_giou};
  outputs.figure("correlation", fig);
  out << "spearman(so, iou | overlapping) = " << csv::number(table.spearman_so_iou) << " over "
      << table.overlapping << " overlapping pairs\n";
  outputs.finish(out);
  return kExitOk;
}

int cmd_simulate(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = resolve_config("simulate", flags);
  const SimulationResult result = run_simulation(config.sim, worker_count(flags));
  for (const auto& [kind, t] : result) {
    for (std::size_t i = 0; i < t.mean_iou.size(); ++i) {
      require_finite(t.mean_iou[i] + t.mean_corner_dist[i], "simulation trajectory");
    }
  }

  OutputSet outputs("simulate", flags, config);
  outputs.write("simulate.csv", [&](std::ostream& o) { csv::write_simulation(o, result); });
  plot::Figure fig{"Anchor regression: mean IoU", "iteration", "mean IoU", {}};
  for (const auto& [kind, t] : result) {
    fig.series.push_back({std::string(to_string(kind)), iteration_axis(t.mean_iou.size()),
                          t.mean_iou, false});
    const auto reach = t.first_iou_at_least(0.8);
    out << to_string(kind) << ": final mean IoU " << csv::number(t.mean_iou.back())
        << ", mean IoU >= 0.8 at " << (reach ? std::to_string(*reach) : std::string("never"))
        << '\n';
  }
  outputs.figure("simulate", fig);
  outputs.finish(out);
  return kExitOk;
}

int cmd_align(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = resolve_config("align", flags);
  const AlignmentResult result = alignment_race(config.sim, worker_count(flags));
  for (const Trajectory* t : {&result.center, &result.corner}) {
    for (std::size_t i = 0; i < t->mean_iou.size(); ++i) {
      require_finite(t->mean_iou[i] + t->mean_corner_dist[i], "alignment trajectory");
    }
  }

  OutputSet outputs("align", flags, config);
  outputs.write("align.csv", [&](std::ostream& o) { csv::write_alignment(o, result); });
  plot::Figure fig{"Center versus corner alignment", "iteration", "mean corner distance", {}};
  fig.series.push_back({"center", iteration_axis(result.center.mean_corner_dist.size()),
                        result.center.mean_corner_dist, false});
  fig.series.push_back({"corner (0.5x)", iteration_axis(result.corner.mean_corner_dist.size()),
                        result.corner.mean_corner_dist, false});
  outputs.figure("align", fig);
  for (const auto& [name, t] : {std::pair{"center", &result.center}, {"corner", &result.corner}}) {
    const auto reach = t->first_corner_dist_below(0.05);
    out << name << ": final mean corner distance " << csv::number(t->mean_corner_dist.back())
        << ", below 0.05 at " << (reach ? std::to_string(*reach) : std::string("never")) << '\n';
  }
  outputs.finish(out);
  return kExitOk;
}

constexpr double kGradCheckTolerance = 1e-5;

int cmd_gradcheck(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = resolve_config("gradcheck", flags);
  const auto rows = gradient_check(sampler_of(config), config.sim.kinds,
                                   ScaParams{config.sim.alpha}, 1e-6, worker_count(flags));

  OutputSet outputs("gradcheck", flags, config);
  outputs.write("gradcheck.csv", [&](std::ostream& o) { csv::write_gradcheck(o, rows); });
  plot::Figure fig{"Analytic vs central-difference gradients", "kind index",
                   "log10 max relative error", {}};
  plot::Series s{"max rel. error", {}, {}, true};
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.xs.push_back(static_cast<double>(i));
    s.ys.push_back(std::log10(std::max(rows[i].max_rel_error, 1e-17)));
    const bool pass = rows[i].max_rel_error < kGradCheckTolerance;
    ok = ok && pass;
    out << to_string(rows[i].kind) << ' ' << csv::number(rows[i].max_rel_error)
        << (pass ? " ok" : " FAIL") << '\n';
  }
  fig.series.push_back(std::move(s));
  outputs.figure("gradcheck", fig);
  outputs.finish(out);
  if (!ok) throw CheckFailure("analytic gradient disagrees with finite differences");
  return kExitOk;
}

struct EvalFlags {
  std::string kind = "sca";
  double alpha = 0.5;
  std::string pred;
  std::string gt;
};

int cmd_eval(const EvalFlags& flags, std::ostream& out) {
  LossKind kind;
  try {
    kind = parse_loss_kind(flags.kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(flags.alpha >= 0.0)) throw ConfigError("--alpha must be >= 0");
  const Box pred = parse_box(flags.pred);
  const Box gt = parse_box(flags.gt);
  const BoxPair pair = BoxPair::checked(pred, gt);
  const LossEval e = eval_with_grad(kind, pair, ScaParams{flags.alpha});
  require_finite(e.value, "loss value");
  for (double g : e.grad) require_finite(g, "gradient");
  out << "kind " << to_string(kind) << '\n';
  out << "value " << format_eval_number(e.value) << '\n';
  out << "grad";
  for (double g : e.grad) out << ' ' << format_eval_number(g);
  out << '\n';
  return kExitOk;
}

}  // namespace

std::string format_eval_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12f", value);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"bboxlab: bounding-box regression loss laboratory", "bboxlab"};
  app.set_version_flag("--version", BBOXLAB_VERSION);
  app.require_subcommand(1);

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Evaluate one loss and its gradient on a box pair");
  eval->add_option("--kind", eval_flags.kind, "Loss kind")->capture_default_str();
  eval->add_option("--alpha", eval_flags.alpha, "Corner-distance weight for sca")
      ->capture_default_str();
  eval->add_option("pred", eval_flags.pred, "Predicted box x1,y1,x2,y2")->required();
  eval->add_option("gt", eval_flags.gt, "Ground-truth box x1,y1,x2,y2")->required();

  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"gradmag", "Mean gradient norm per IoU bin over random pairs"},
      {"correlate", "SO against IoU and GIoU over random pairs"},
      {"simulate", "Anchor-grid gradient-descent regression per loss"},
      {"align", "Center versus corner alignment race"},
      {"gradcheck", "Analytic gradients against central differences"},
  };
  std::map<std::string, CommonFlags> flags;
  std::map<std::string, CLI::App*> commands;
  for (const auto& [name, help] : experiments) {
    commands[name] = app.add_subcommand(name, help);
    add_common_flags(*commands[name], flags[name]);
  }

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (eval->parsed()) return cmd_eval(eval_flags, out);
    if (commands["gradmag"]->parsed()) return cmd_gradmag(flags["gradmag"], out);
    if (commands["correlate"]->parsed()) return cmd_correlate(flags["correlate"], out);
    if (commands["simulate"]->parsed()) return cmd_simulate(flags["simulate"], out);
    if (commands["align"]->parsed()) return cmd_align(flags["align"], out);
    if (commands["gradcheck"]->parsed()) return cmd_gradcheck(flags["gradcheck"], out);
  } catch (const CheckFailure& e) {
    err << "check failed: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const BoxParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateBoxError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace bboxlab::cli
