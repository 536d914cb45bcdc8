#include "excite/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <utility>

#include "excite/changepoint.hpp"
#include "excite/csv.hpp"
#include "excite/estimators.hpp"
#include "excite/metrics.hpp"
#include "excite/rng.hpp"
#include "excite/signal.hpp"

namespace excite {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

Vector broadcast(const std::vector<double>& values, Eigen::Index n) {
  Vector out(n);
  if (values.size() == 1) {
    out.setConstant(values[0]);
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      out[i] = values[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

Vector linspace(const AxisConfig& axis) {
  Vector out(axis.count);
  const double step = (axis.max - axis.min) / static_cast<double>(axis.count - 1);
  for (Eigen::Index i = 0; i < axis.count; ++i) {
    out[i] = axis.min + static_cast<double>(i) * step;
  }
  return out;
}

// JSON-safe number: non-finite doubles have no JSON literal, so they are
// emitted as their CSV string form ("inf", "-inf", "nan") instead of null.
Json json_number(double value) {
  if (std::isfinite(value)) {
    return value;
  }
  return format_double(value);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << text;
  out.close();
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

// ---------------------------------------------------------------------------
// Model materialization
// ---------------------------------------------------------------------------

struct ModelContext {
  bool is_sis = true;
  Eigen::Index p = 2;      ///< parameter dimension
  Eigen::Index nodes = 1;  ///< SIR network size
  Schedule<SisParams> sis;
  Schedule<SirNetworkParams> sir;
  std::vector<std::string> state_labels;
  std::vector<std::string> target_labels;

  Vector truth_at(double t) const { return is_sis ? sis.at(t).theta() : sir.at(t).theta(); }
};

ModelContext build_model(const ExperimentConfig& config) {
  ModelContext ctx;
  if (const auto* sis = std::get_if<SisModelConfig>(&config.model)) {
    ctx.is_sis = true;
    ctx.p = 2;
    for (const SisSegmentConfig& seg : sis->schedule) {
      ctx.sis.segments.push_back({seg.t, SisParams{seg.beta, seg.gamma}});
    }
    ctx.sis.validate();
    ctx.state_labels = {"I"};
    ctx.target_labels = {"psi"};
    return ctx;
  }

  const auto& sir = std::get<SirModelConfig>(config.model);
  ctx.is_sis = false;
  ctx.nodes = sir.nodes;
  ctx.p = sir.nodes * sir.nodes + sir.nodes;

  SirNetworkParams base;
  if (sir.network) {
    NetworkSpec spec;
    if (sir.network->topology == "fully-connected") {
      spec.topology = Topology::kFullyConnected;
    } else if (sir.network->topology == "star") {
      spec.topology = Topology::kStar;
    } else {
      spec.topology = Topology::kErdosRenyi;
    }
    spec.nodes = sir.nodes;
    spec.edge_prob = sir.network->edge_prob;
    spec.weight_min = sir.network->weight_min;
    spec.weight_max = sir.network->weight_max;
    spec.gamma_min = sir.network->gamma_min;
    spec.gamma_max = sir.network->gamma_max;
    std::mt19937_64 rng = substream(config.seed, "network");
    base = make_network(spec, rng);
  } else {
    base.b.resize(sir.nodes, sir.nodes);
    for (Eigen::Index i = 0; i < sir.nodes; ++i) {
      for (Eigen::Index j = 0; j < sir.nodes; ++j) {
        base.b(i, j) = (*sir.b)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
    base.gamma = broadcast(*sir.gamma, sir.nodes);
  }

  ctx.sir.segments.push_back({0.0, base});
  for (const BScaleConfig& seg : sir.b_schedule) {
    SirNetworkParams scaled;
    scaled.b = seg.scale * base.b;
    scaled.gamma = base.gamma;
    ctx.sir.segments.push_back({seg.t, std::move(scaled)});
  }
  ctx.sir.validate();

  for (Eigen::Index i = 0; i < sir.nodes; ++i) {
    ctx.state_labels.push_back("I" + std::to_string(i));
  }
  for (Eigen::Index i = 0; i < sir.nodes; ++i) {
    ctx.state_labels.push_back("R" + std::to_string(i));
  }
  for (Eigen::Index i = 0; i < 2 * sir.nodes; ++i) {
    ctx.target_labels.push_back("psi" + std::to_string(i));
  }
  return ctx;
}

Trajectory simulate(const ExperimentConfig& config, const ModelContext& ctx,
                    std::uint64_t seed) {
  if (ctx.is_sis) {
    return simulate_sis(ctx.sis, config.sim.i0[0], config.sim.h, config.sim.steps,
                        config.sim.noise, seed);
  }
  return simulate_sir(ctx.sir, broadcast(config.sim.i0, ctx.nodes),
                      broadcast(config.sim.r0, ctx.nodes), config.sim.h, config.sim.steps,
                      config.sim.noise, seed);
}

// ---------------------------------------------------------------------------
// Estimator pipelines
// ---------------------------------------------------------------------------

struct Pipeline {
  std::unique_ptr<OnlineEstimator> plain;         ///< set when not resetting
  std::unique_ptr<ResettingEstimator> resetting;  ///< set when resetting
  GwRls* gw = nullptr;                            ///< typed view for kappa columns
  EfRls* ef = nullptr;

  const Vector& theta() const { return resetting ? resetting->theta() : plain->theta(); }
};

Pipeline make_pipeline(const EstimatorConfig& cfg, Eigen::Index p) {
  Pipeline out;
  const Vector theta0 = cfg.theta0
                            ? broadcast(*cfg.theta0, p)
                            : Vector::Ones(p);
  const Matrix p0 = cfg.rho * Matrix::Identity(p, p);

  std::unique_ptr<OnlineEstimator> inner;
  if (cfg.kind == "gw-rls") {
    GwRlsOptions options;
    options.alpha = cfg.alpha;
    options.excitation_cap = cfg.excitation_cap;
    auto est = std::make_unique<GwRls>(theta0, p0, options);
    out.gw = est.get();
    inner = std::move(est);
  } else if (cfg.kind == "ef-rls") {
    auto est = std::make_unique<EfRls>(theta0, p0, EfRlsOptions{cfg.alpha});
    out.ef = est.get();
    inner = std::move(est);
  } else {
    inner = std::make_unique<GradientEstimator>(theta0);
  }

  if (cfg.detector) {
    LrtOptions options;
    options.eta = cfg.detector->eta;
    options.tau = cfg.detector->tau;
    options.min_samples = cfg.detector->min_samples;
    options.reset_on_change = cfg.detector->reset_on_change;
    out.resetting = std::make_unique<ResettingEstimator>(
        std::move(inner), LrtDetector(options), ResettingOptions{cfg.detector->reset_theta});
  } else {
    out.plain = std::move(inner);
  }
  return out;
}

struct EstimatorOutcome {
  Json metrics;
  std::vector<std::string> files;
};

EstimatorOutcome run_estimator(const EstimatorConfig& cfg, const Trajectory& traj,
                               const ModelContext& ctx, const ExperimentConfig& config,
                               const fs::path& out_dir) {
  Pipeline pipeline = make_pipeline(cfg, ctx.p);
  const double delta = config.metrics.delta;

  const std::string estimates_name = "estimates_" + cfg.label + ".csv";
  CsvFile estimates(out_dir / estimates_name);
  std::vector<std::string> header{"k", "t"};
  for (Eigen::Index i = 0; i < ctx.p; ++i) {
    header.push_back("theta" + std::to_string(i));
  }
  for (Eigen::Index i = 0; i < ctx.p; ++i) {
    header.push_back("relerr" + std::to_string(i));
  }
  if (pipeline.gw || pipeline.ef) {
    header.push_back("kappa_P");
  }
  if (pipeline.gw) {
    header.push_back("kappa_He");
    header.push_back("admitted");
  }
  estimates.write_row(header);

  std::unique_ptr<CsvFile> detections;
  std::string detections_name;
  if (pipeline.resetting) {
    detections_name = "detections_" + cfg.label + ".csv";
    detections = std::make_unique<CsvFile>(out_dir / detections_name);
    detections->write_row({"k", "t", "y", "z", "e", "d", "p", "detected"});
  }

  std::vector<std::int64_t> detection_samples;
  std::vector<std::string> row;
  for (const Datum& d : traj.data) {
    bool admitted = false;
    LrtDetector::Step detection;
    if (pipeline.resetting) {
      const ResettingEstimator::Step step = pipeline.resetting->step(d);
      admitted = step.admitted;
      detection = step.detection;
      if (detection.detected) {
        detection_samples.push_back(d.k);
      }
    } else {
      admitted = pipeline.plain->step(d);
    }

    const Vector& theta = pipeline.theta();
    const Vector errors = relative_error(ctx.truth_at(d.t), theta, delta);
    row.clear();
    row.push_back(std::to_string(d.k));
    row.push_back(format_double(d.t));
    for (Eigen::Index i = 0; i < ctx.p; ++i) {
      row.push_back(format_double(theta[i]));
    }
    for (Eigen::Index i = 0; i < ctx.p; ++i) {
      row.push_back(format_double(errors[i]));
    }
    if (pipeline.gw) {
      row.push_back(format_double(condition_number(pipeline.gw->covariance())));
      row.push_back(format_double(pipeline.gw->excitation_condition()));
      row.push_back(admitted ? "1" : "0");
    } else if (pipeline.ef) {
      row.push_back(format_double(condition_number(pipeline.ef->covariance())));
    }
    estimates.write_row(row);

    if (detections) {
      detections->write_row({std::to_string(d.k), format_double(d.t),
                             format_double(detection.y), format_double(detection.z),
                             detection.tested ? format_double(detection.e) : "",
                             detection.tested ? format_double(detection.d) : "",
                             detection.tested ? format_double(detection.p) : "",
                             detection.detected ? "1" : "0"});
    }
  }
  estimates.close();
  if (detections) {
    detections->close();
  }

  const double t_final = traj.times.back();
  const Vector truth = ctx.truth_at(t_final);
  const Vector theta = pipeline.theta();
  const Vector errors = relative_error(truth, theta, delta);
  std::vector<double> all(errors.data(), errors.data() + errors.size());

  EstimatorOutcome outcome;
  outcome.metrics["kind"] = cfg.kind;
  outcome.metrics["final_rel_error_median"] = json_number(median(all));
  outcome.metrics["final_rel_error_max"] =
      json_number(*std::max_element(all.begin(), all.end()));
  if (!ctx.is_sis) {
    const Eigen::Index n = ctx.nodes;
    std::vector<double> b_errors(errors.data(), errors.data() + n * n);
    outcome.metrics["final_rel_error_b_median"] = json_number(median(b_errors));
    const SirNetworkParams truth_params = SirNetworkParams::from_theta(truth, n);
    const SirNetworkParams est_params = SirNetworkParams::from_theta(theta, n);
    const Vector r0_errors = r0_error(truth_params, est_params, delta);
    std::vector<double> r0_all(r0_errors.data(), r0_errors.data() + r0_errors.size());
    outcome.metrics["final_rel_error_r0_median"] = json_number(median(r0_all));
  }
  if (pipeline.gw) {
    outcome.metrics["excitation_size"] = pipeline.gw->excitation_size();
    outcome.metrics["cap_reached"] = pipeline.gw->cap_reached();
    outcome.metrics["final_kappa_P"] =
        json_number(condition_number(pipeline.gw->covariance()));
  }
  if (pipeline.ef) {
    outcome.metrics["final_kappa_P"] =
        json_number(condition_number(pipeline.ef->covariance()));
  }
  if (pipeline.resetting) {
    outcome.metrics["detections"] = pipeline.resetting->detections();
    outcome.metrics["detection_samples"] = detection_samples;
  }

  outcome.files.push_back(estimates_name);
  if (!detections_name.empty()) {
    outcome.files.push_back(detections_name);
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// ROC harness: per-trial jittered switch schedules, re-detected per (eta, tau)
// ---------------------------------------------------------------------------

Json run_roc(const ExperimentConfig& config, const ModelContext& ctx,
             const fs::path& out_dir, std::vector<std::string>& files) {
  const RocConfig& roc = *config.metrics.roc;
  const EstimatorConfig& pipeline_template = config.estimators.front();
  const double h = config.sim.h;
  const std::int64_t steps = config.sim.steps;
  const SirNetworkParams& base = ctx.sir.segments.front().params;

  struct Pooled {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
  };
  std::vector<std::vector<Pooled>> pooled(
      roc.etas.size(), std::vector<Pooled>(roc.taus.size()));

  for (std::int64_t trial = 0; trial < roc.trials; ++trial) {
    const std::uint64_t trial_seed = fold_seed(config.seed, static_cast<std::uint64_t>(trial));

    std::mt19937_64 jitter_rng = substream(trial_seed, "schedule");
    std::uniform_int_distribution<std::int64_t> jitter(-roc.jitter, roc.jitter);
    std::vector<std::int64_t> switches;
    switches.reserve(roc.change_points.size());
    for (const std::int64_t cp : roc.change_points) {
      switches.push_back(cp + jitter(jitter_rng));
    }

    Schedule<SirNetworkParams> schedule;
    schedule.segments.push_back({0.0, base});
    for (std::size_t i = 0; i < switches.size(); ++i) {
      SirNetworkParams params;
      params.b = (i % 2 == 0 ? roc.scale_low : 1.0) * base.b;
      params.gamma = base.gamma;
      schedule.segments.push_back({static_cast<double>(switches[i]) * h, std::move(params)});
    }

    const Trajectory traj =
        simulate_sir(schedule, broadcast(config.sim.i0, ctx.nodes),
                     broadcast(config.sim.r0, ctx.nodes), h, steps, config.sim.noise,
                     trial_seed);

    RocScenario scenario;
    scenario.change_points = switches;
    scenario.window = roc.window;
    scenario.stream_len = steps;

    for (std::size_t e = 0; e < roc.etas.size(); ++e) {
      const double eta = roc.etas[e];
      const DetectionRunner runner = [&](double tau) {
        EstimatorConfig cfg = pipeline_template;
        cfg.excitation_cap = roc.excitation_cap;
        cfg.resetting = true;
        DetectorConfig detector;
        detector.eta = eta;
        detector.tau = tau;
        detector.min_samples = roc.min_samples;
        cfg.detector = detector;
        Pipeline pipeline = make_pipeline(cfg, ctx.p);
        std::vector<std::int64_t> detections;
        for (const Datum& d : traj.data) {
          if (pipeline.resetting->step(d).detection.detected) {
            detections.push_back(d.k);
          }
        }
        return detections;
      };
      const std::vector<RocPoint> points = roc_points(scenario, roc.taus, runner);
      for (std::size_t t = 0; t < points.size(); ++t) {
        pooled[e][t].tp += points[t].tp;
        pooled[e][t].fp += points[t].fp;
        pooled[e][t].fn += points[t].fn;
      }
    }
  }

  CsvFile csv(out_dir / "roc.csv");
  csv.write_row({"eta", "tau", "tp", "fp", "fn", "tpr", "fp_rate"});
  Json summary = Json::array();
  const double scanned = static_cast<double>(roc.trials) * static_cast<double>(steps);
  for (std::size_t e = 0; e < roc.etas.size(); ++e) {
    std::vector<RocPoint> points;
    bool monotone = true;
    double prev_tpr = -1.0;
    for (std::size_t t = 0; t < roc.taus.size(); ++t) {
      RocPoint point;
      point.tau = roc.taus[t];
      point.tp = pooled[e][t].tp;
      point.fp = pooled[e][t].fp;
      point.fn = pooled[e][t].fn;
      const std::int64_t positives = point.tp + point.fn;
      point.tpr =
          positives > 0 ? static_cast<double>(point.tp) / static_cast<double>(positives)
                        : 0.0;
      point.fp_rate = static_cast<double>(point.fp) / scanned;
      if (point.tpr < prev_tpr) {
        monotone = false;
      }
      prev_tpr = point.tpr;
      points.push_back(point);
      csv.write_row({format_double(roc.etas[e]), format_double(point.tau),
                     std::to_string(point.tp), std::to_string(point.fp),
                     std::to_string(point.fn), format_double(point.tpr),
                     format_double(point.fp_rate)});
    }
    Json entry;
    entry["eta"] = roc.etas[e];
    entry["auc"] = json_number(roc_auc(points));
    entry["tpr_monotone"] = monotone;
    summary.push_back(entry);
  }
  csv.close();
  files.push_back("roc.csv");
  return summary;
}

}  // namespace

fs::path resolve_out_dir(const ExperimentConfig& config, const fs::path& override_dir) {
  if (!override_dir.empty()) {
    return override_dir;
  }
  if (const char* env = std::getenv("EXCITE_ID_OUT"); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return fs::path(config.output.dir);
}

RunResult run_experiment(const ExperimentConfig& config,
                         const fs::path& out_dir_override) {
  validate_config(config);
  const ModelContext ctx = build_model(config);

  RunResult result;
  result.out_dir = resolve_out_dir(config, out_dir_override);
  fs::create_directories(result.out_dir);

  const Trajectory traj = simulate(config, ctx, config.seed);
  write_trajectory_csv(traj, ctx.state_labels, ctx.target_labels,
                       result.out_dir / "trajectory.csv");
  result.files.push_back("trajectory.csv");

  Json metrics;
  metrics["name"] = config.name;
  metrics["seed"] = config.seed;
  metrics["clamp_events"] = traj.clamp_events;

  Json per_estimator;
  for (const EstimatorConfig& cfg : config.estimators) {
    EstimatorOutcome outcome = run_estimator(cfg, traj, ctx, config, result.out_dir);
    per_estimator[cfg.label] = std::move(outcome.metrics);
    for (std::string& name : outcome.files) {
      result.files.push_back(std::move(name));
    }
  }
  metrics["estimators"] = std::move(per_estimator);

  if (config.metrics.pi_window) {
    const std::vector<PiReport> reports =
        moving_pi(traj.data, static_cast<int>(*config.metrics.pi_window));
    CsvFile csv(result.out_dir / "pi.csv");
    csv.write_row({"first", "last", "t", "lambda_min", "lambda_max", "kappa"});
    double min_kappa = std::numeric_limits<double>::infinity();
    double min_kappa_t = 0.0;
    for (const PiReport& report : reports) {
      const double t = traj.times[static_cast<std::size_t>(report.last)];
      csv.write_row({std::to_string(report.first), std::to_string(report.last),
                     format_double(t), format_double(report.lambda_min),
                     format_double(report.lambda_max), format_double(report.kappa)});
      if (report.kappa < min_kappa) {
        min_kappa = report.kappa;
        min_kappa_t = t;
      }
    }
    csv.close();
    result.files.push_back("pi.csv");
    Json pi;
    pi["window"] = *config.metrics.pi_window;
    pi["min_kappa"] = json_number(min_kappa);
    pi["min_kappa_t"] = min_kappa_t;
    pi["final_kappa"] = json_number(reports.back().kappa);
    metrics["pi"] = pi;
  }

  if (config.metrics.surface) {
    const Vector betas = linspace(config.metrics.surface->beta);
    const Vector gammas = linspace(config.metrics.surface->gamma);
    const Matrix surface = rmse_surface(traj.data, betas, gammas);
    CsvFile csv(result.out_dir / "surface.csv");
    csv.write_row({"beta", "gamma", "rmse"});
    Eigen::Index min_i = 0;
    Eigen::Index min_j = 0;
    surface.minCoeff(&min_i, &min_j);
    for (Eigen::Index i = 0; i < betas.size(); ++i) {
      for (Eigen::Index j = 0; j < gammas.size(); ++j) {
        csv.write_row({format_double(betas[i]), format_double(gammas[j]),
                       format_double(surface(i, j))});
      }
    }
    csv.close();
    result.files.push_back("surface.csv");
    Json summary;
    summary["min_rmse"] = json_number(surface(min_i, min_j));
    summary["argmin_beta"] = betas[min_i];
    summary["argmin_gamma"] = gammas[min_j];
    metrics["surface"] = summary;
  }

  if (config.metrics.roc) {
    metrics["roc"] = run_roc(config, ctx, result.out_dir, result.files);
  }

  write_text(result.out_dir / "metrics.json", metrics.dump(2) + "\n");
  result.files.push_back("metrics.json");

  Json manifest;
  manifest["name"] = config.name;
  manifest["seed"] = config.seed;
  manifest["config_hash"] = config_hash_hex(config);
  manifest["config"] = Json::parse(config_to_json(config));
  write_text(result.out_dir / "manifest.json", manifest.dump(2) + "\n");
  result.files.push_back("manifest.json");

  result.metrics = std::move(metrics);
  return result;
}

}  // namespace excite
