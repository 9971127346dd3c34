#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gcl/embed.hpp"
#include "gcl/error.hpp"
#include "gcl/eval.hpp"
#include "gcl/geom2d.hpp"
#include "gcl/geom3d.hpp"
#include "gcl/gradcheck.hpp"
#include "gcl/io.hpp"
#include "gcl/mining.hpp"
#include "gcl/retrieval.hpp"
#include "gcl/synth.hpp"
#include "gcl/train.hpp"

namespace gcl::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Flag value parsing

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(sep, start);
    const std::size_t end = pos == std::string::npos ? text.size() : pos;
    out.push_back(text.substr(start, end - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(const std::string& s, const std::string& flag) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    throw InvalidInput(flag + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& s, const std::string& flag) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidInput(flag + ": bad count '" + s + "'");
  }
  return v;
}

std::vector<std::size_t> parse_counts(const std::string& s, const std::string& flag) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s, ',')) out.push_back(parse_count(item, flag));
  return out;
}

std::vector<double> parse_reals(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  for (const auto& item : split_list(s, ',')) out.push_back(parse_real(item, flag));
  return out;
}

// "0.25:2,0.5:5" -> tiers
std::vector<eval::LocalizationTier> parse_tiers(const std::string& s) {
  std::vector<eval::LocalizationTier> out;
  for (const auto& item : split_list(s, ',')) {
    const auto parts = split_list(item, ':');
    if (parts.size() != 2) throw InvalidInput("--tiers: expected meters:degrees, got '" + item + "'");
    out.push_back({parse_real(parts[0], "--tiers"), parse_real(parts[1], "--tiers")});
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i].max_translation_m > 0.0) || !(out[i].max_rotation_deg > 0.0)) {
      throw InvalidInput("--tiers: thresholds must be positive");
    }
    if (i > 0 && (out[i].max_translation_m < out[i - 1].max_translation_m ||
                  out[i].max_rotation_deg < out[i - 1].max_rotation_deg)) {
      throw InvalidInput("--tiers: tiers must be ascending");
    }
  }
  return out;
}

std::string first_line(const fs::path& path) {
  const std::string text = io::read_file(path);
  std::string line = text.substr(0, text.find('\n'));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<eval::PlacePose> read_place_poses(const fs::path& path) {
  std::vector<eval::PlacePose> out;
  if (first_line(path) == "id,t0,t1,heading_deg") {
    for (const auto& p : io::read_poses_2d(path)) out.push_back(eval::PlacePose::from(p));
  } else {
    for (const auto& p : io::read_poses_6dof(path)) out.push_back(eval::PlacePose::from(p));
  }
  return out;
}

// Rows of several stores stacked in argument order.
train::FeatureTable load_feature_table(const std::vector<std::string>& paths) {
  std::vector<std::string> ids;
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index rows = 0;
  Eigen::Index dim = -1;
  for (const auto& p : paths) {
    auto store = io::read_descriptors(p);
    if (dim >= 0 && store.rows.cols() != dim) {
      throw InvalidInput("feature stores disagree on dimension: " + p);
    }
    dim = store.rows.cols();
    rows += store.rows.rows();
    ids.insert(ids.end(), store.ids.begin(), store.ids.end());
    blocks.push_back(std::move(store.rows));
  }
  Eigen::MatrixXd all(rows, dim < 0 ? 0 : dim);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    all.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return train::FeatureTable(std::move(ids), std::move(all));
}

Eigen::MatrixXd embed_rows(const embed::EmbeddingModel& model, const Eigen::MatrixXd& rows) {
  if (static_cast<std::size_t>(rows.cols()) != model.input_dim()) {
    throw InvalidInput("feature dimension " + std::to_string(rows.cols()) +
                       " does not match model input " + std::to_string(model.input_dim()));
  }
  Eigen::MatrixXd out(rows.rows(), static_cast<Eigen::Index>(model.output_dim()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out.row(i) = embed::forward(model, rows.row(i).transpose()).values.transpose();
  }
  return out;
}

void print(const std::string& text) {
  std::fwrite(text.data(), 1, text.size(), stdout);
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------
// annotate-2d

struct Annotate2dArgs {
  std::string poses, queries, maps, out;
  std::optional<double> theta, radius;
  std::string mode = "ioa";
  bool strong = false;
};

std::vector<CameraPose2D> planar_poses(const std::string& path, bool strong) {
  if (!strong) return io::read_poses_2d(path);
  std::vector<CameraPose2D> out;
  for (const auto& p : io::read_poses_6dof(path)) out.push_back(to_planar(p));
  return out;
}

void check_pose_sources(const std::string& poses, const std::string& queries,
                        const std::string& maps) {
  if (poses.empty() == (queries.empty() && maps.empty()) || queries.empty() != maps.empty()) {
    throw InvalidInput("give either one pose file or both --queries and --maps");
  }
}

int annotate_2d(const Annotate2dArgs& a) {
  check_pose_sources(a.poses, a.queries, a.maps);
  geom2d::FovParams params = a.strong ? geom2d::FovParams::garden() : geom2d::FovParams::street();
  if (a.theta) params.theta_deg = *a.theta;
  if (a.radius) params.radius_m = *a.radius;
  params.validate();
  const auto mode = a.mode == "iou" ? geom2d::OverlapMode::IntersectionOverUnion
                                    : geom2d::OverlapMode::IntersectionOverArea;
  const auto queries = planar_poses(a.poses.empty() ? a.queries : a.poses, a.strong);
  const auto maps = a.poses.empty() ? planar_poses(a.maps, a.strong) : queries;
  const auto pairs = geom2d::pairwise_similarity_matrix(queries, maps, params, mode);
  io::write_graded_pairs(a.out, pairs);
  print("queries=" + std::to_string(queries.size()) + " maps=" + std::to_string(maps.size()) +
        " nonzero=" + std::to_string(pairs.stored().size()) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// annotate-3d

struct Annotate3dArgs {
  std::string poses, queries, maps, cloud, intrinsics, out;
};

int annotate_3d(const Annotate3dArgs& a) {
  check_pose_sources(a.poses, a.queries, a.maps);
  const auto intr = io::read_intrinsics(a.intrinsics);
  const auto cloud = io::read_point_cloud(a.cloud);
  const auto queries = io::read_poses_6dof(a.poses.empty() ? a.queries : a.poses);
  const auto maps = a.poses.empty() ? io::read_poses_6dof(a.maps) : queries;
  const auto pairs = geom3d::fov3d_matrix(cloud, queries, maps, intr);
  io::write_graded_pairs(a.out, pairs);
  print("queries=" + std::to_string(queries.size()) + " maps=" + std::to_string(maps.size()) +
        " nonzero=" + std::to_string(pairs.stored().size()) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string pairs;
  std::vector<std::string> features;
  std::string out, trace;
  std::string loss = "gcl";
  std::string strategy = "A";
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  std::size_t batch = 64;
  double tau = 0.5;
  double positive_threshold = 0.5;
  std::optional<double> lr;
  double decay = 10.0;
  std::size_t decay_every = 250000;
  std::size_t checkpoint_every = 0;
  std::string hidden = "64";
  std::size_t out_dim = 32;
  bool no_normalize = false;
};

// Model initialization and batch sampling both derive from --seed.
std::uint64_t init_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

fs::path checkpoint_path(const fs::path& out, std::size_t batch) {
  fs::path p = out;
  std::string name = out.stem().string() + ".batch" + std::to_string(batch) + out.extension().string();
  p.replace_filename(name);
  return p;
}

int train_command(const TrainArgs& a) {
  train::TrainConfig cfg;
  cfg.loss_kind = a.loss == "cl" ? loss::LossKind::Contrastive : loss::LossKind::Generalized;
  cfg.initial_lr = a.lr;
  cfg.lr_decay_factor = a.decay;
  cfg.decay_every_pairs = a.decay_every;
  cfg.batch_size = a.batch;
  cfg.margin_tau = a.tau;
  cfg.positive_threshold = a.positive_threshold;
  cfg.epochs = a.epochs;
  cfg.seed = a.seed;
  cfg.strategy = mining::parse_strategy(a.strategy);
  cfg.checkpoint_every = a.checkpoint_every;
  cfg.validate();

  std::vector<std::size_t> hidden;
  if (!a.hidden.empty() && a.hidden != "none") hidden = parse_counts(a.hidden, "--hidden");
  if (hidden.size() > 2) throw InvalidInput("--hidden: at most two hidden layers");
  if (a.out_dim == 0 || std::count(hidden.begin(), hidden.end(), std::size_t{0}) > 0) {
    throw InvalidInput("layer sizes must be positive");
  }

  const auto pairs = io::read_graded_pairs(a.pairs);
  const auto features = load_feature_table(a.features);
  std::vector<std::size_t> dims{features.dim()};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(a.out_dim);
  auto model = embed::EmbeddingModel::initialized(dims, !a.no_normalize, init_seed(a.seed));

  const fs::path out = a.out;
  const fs::path trace_path = a.trace.empty() ? fs::path(out).replace_extension(".trace.csv")
                                              : fs::path(a.trace);
  print("loss=" + a.loss + " strategy=" + a.strategy + " tau=" + io::format_double(cfg.margin_tau) +
        " batch=" + std::to_string(cfg.batch_size) +
        " lr=" + io::format_double(cfg.effective_initial_lr()) +
        " epochs=" + std::to_string(cfg.epochs) + " seed=" + std::to_string(cfg.seed) + "\n");

  train::CheckpointFn on_checkpoint;
  if (cfg.checkpoint_every > 0) {
    on_checkpoint = [&](const embed::EmbeddingModel& m, std::size_t batch) {
      io::write_file_atomic(checkpoint_path(out, batch), io::model_bytes(m));
    };
  }
  const auto report = train::train(std::move(model), pairs, features, cfg, on_checkpoint);

  ordered_json meta;
  meta["format"] = "gsim";
  meta["loss"] = a.loss;
  meta["strategy"] = a.strategy;
  meta["seed"] = a.seed;
  meta["epochs"] = cfg.epochs;
  meta["batch_size"] = cfg.batch_size;
  meta["margin_tau"] = cfg.margin_tau;
  meta["positive_threshold"] = cfg.positive_threshold;
  meta["initial_lr"] = cfg.effective_initial_lr();
  meta["lr_decay_factor"] = cfg.lr_decay_factor;
  meta["decay_every_pairs"] = cfg.decay_every_pairs;
  meta["dims"] = dims;
  meta["output_normalize"] = !a.no_normalize;
  meta["pairs_seen"] = report.pairs_seen;
  meta["batches"] = report.trace.size();
  io::save_model(out, report.model, meta.dump(2) + "\n");
  io::write_loss_trace(trace_path, report.trace);

  std::string summary = "batches=" + std::to_string(report.trace.size()) +
                        " pairs_seen=" + std::to_string(report.pairs_seen);
  if (!report.trace.empty()) summary += " final_loss=" + io::format_double(report.trace.back().loss);
  print(summary + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// retrieve

struct RetrieveArgs {
  std::string model, maps, queries, out, save_whitening;
  std::size_t k = 10;
  std::optional<std::size_t> whiten;
  bool no_renormalize = false;
};

int retrieve_command(const RetrieveArgs& a) {
  if (a.k == 0) throw InvalidInput("--k must be positive");
  auto maps = io::read_descriptors(a.maps);
  auto queries = io::read_descriptors(a.queries);
  if (!a.model.empty()) {
    const auto model = io::load_model(a.model);
    maps.rows = embed_rows(model, maps.rows);
    queries.rows = embed_rows(model, queries.rows);
  }
  if (maps.rows.cols() != queries.rows.cols()) {
    throw InvalidInput("map and query descriptors differ in dimension");
  }
  const retrieval::RetrievalIndex index(maps.ids, std::move(maps.rows), a.whiten, !a.no_renormalize);
  if (!a.save_whitening.empty()) {
    if (!index.whitening()) throw InvalidInput("--save-whitening needs --whiten");
    io::save_whitening(a.save_whitening, *index.whitening());
  }
  eval::ResultSet results;
  results.reserve(queries.ids.size());
  for (std::size_t i = 0; i < queries.ids.size(); ++i) {
    const Eigen::VectorXd q = queries.rows.row(static_cast<Eigen::Index>(i)).transpose();
    results.push_back({queries.ids[i], index.search(q, a.k)});
  }
  io::write_results(a.out, results);
  print("queries=" + std::to_string(results.size()) + " maps=" + std::to_string(index.size()) +
        " k=" + std::to_string(std::min(a.k, index.size())) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string results, pairs, query_poses, map_poses, out, sweep_out;
  std::string criterion = "geo";
  double max_dist = 25.0;
  double max_angle = 40.0;
  double min_psi = 0.5;
  std::string ks = "1,5,10";
  std::string tiers;
  std::string sweep = "none";
  std::string grid;
  std::size_t sweep_k = 5;
};

int eval_command(const EvalArgs& a) {
  if (a.query_poses.empty() != a.map_poses.empty()) {
    throw InvalidInput("--query-poses and --map-poses go together");
  }
  const bool have_poses = !a.query_poses.empty();
  const bool have_pairs = !a.pairs.empty();
  if (a.criterion == "geo" && !have_poses) throw InvalidInput("--criterion geo needs pose files");
  if (a.criterion == "psi" && !have_pairs) throw InvalidInput("--criterion psi needs --pairs");

  eval::PositiveCriterion criterion;
  if (a.criterion == "geo") {
    if (!(a.max_dist > 0.0) || !(a.max_angle > 0.0)) throw InvalidInput("geo thresholds must be positive");
    criterion = eval::GeoThreshold{a.max_dist, a.max_angle};
  } else {
    if (!(a.min_psi >= 0.0 && a.min_psi < 1.0)) throw InvalidInput("--min-psi must be in [0, 1)");
    criterion = eval::PsiThreshold{a.min_psi};
  }
  const auto ks = parse_counts(a.ks, "--ks");
  for (std::size_t k : ks) {
    if (k == 0) throw InvalidInput("--ks: k must be positive");
  }

  eval::GroundTruth gt;
  if (have_poses) {
    gt = eval::GroundTruth::from_poses(read_place_poses(a.query_poses), read_place_poses(a.map_poses));
  }
  if (have_pairs) gt.set_pairs(io::read_graded_pairs(a.pairs));

  const auto results = io::read_results(a.results);
  std::string report = "queries=" + std::to_string(results.size()) + "\n";
  for (const auto& [k, r] : eval::recall_at_k(results, criterion, gt, ks)) {
    report += "recall@" + std::to_string(k) + "=" + io::format_double(r) + "\n";
  }
  try {
    report += "ap=" + io::format_double(eval::average_precision(results, criterion, gt)) + "\n";
  } catch (const DegenerateInput&) {
    report += "ap=undefined\n";
  }
  if (have_poses) {
    const auto tiers = a.tiers.empty() ? eval::default_tiers() : parse_tiers(a.tiers);
    const auto fractions = eval::localized_fraction(results, gt, tiers);
    for (std::size_t i = 0; i < tiers.size(); ++i) {
      report += "localized@" + io::format_double(tiers[i].max_translation_m) + "m," +
                io::format_double(tiers[i].max_rotation_deg) + "deg=" + io::format_double(fractions[i]) +
                "\n";
    }
  } else if (!a.tiers.empty()) {
    throw InvalidInput("--tiers needs pose files");
  }

  if (a.sweep != "none") {
    const auto axis = a.sweep == "distance" ? eval::SweepAxis::Distance : eval::SweepAxis::Psi;
    if (axis == eval::SweepAxis::Distance && !have_poses) throw InvalidInput("distance sweep needs pose files");
    if (axis == eval::SweepAxis::Psi && !have_pairs) throw InvalidInput("psi sweep needs --pairs");
    std::vector<double> grid;
    if (!a.grid.empty()) {
      grid = parse_reals(a.grid, "--grid");
    } else if (axis == eval::SweepAxis::Distance) {
      for (int t = 5; t <= 50; t += 5) grid.push_back(t);
    } else {
      for (int t = 0; t <= 9; ++t) grid.push_back(t / 10.0);
    }
    if (a.sweep_k == 0) throw InvalidInput("--sweep-k must be positive");
    const auto curve = eval::threshold_sweep(results, gt, axis, grid, a.sweep_k);
    std::string csv = "threshold,recall\n";
    for (const auto& p : curve) {
      csv += io::format_double(p.threshold) + "," + io::format_double(p.recall) + "\n";
    }
    if (a.sweep_out.empty()) {
      report += csv;
    } else {
      io::write_file_atomic(a.sweep_out, csv);
    }
  }

  print(report);
  if (!a.out.empty()) io::write_file_atomic(a.out, report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradcheckArgs {
  std::string dims = "8,12,6";
  std::size_t trials = 200;
  std::uint64_t seed = 0;
};

int gradcheck_command(const GradcheckArgs& a) {
  gradcheck::Options opt;
  opt.dims = parse_counts(a.dims, "--dims");
  opt.trials = a.trials;
  opt.seed = a.seed;
  if (opt.trials == 0) std::cerr << "warning: --trials 0 runs no checks; passing vacuously\n";
  const auto r = gradcheck::run(opt);
  print("trials=" + std::to_string(r.trials) + " loss_checks=" + std::to_string(r.loss_checks) +
        " model_checks=" + std::to_string(r.model_checks) +
        " max_loss_rel_error=" + io::format_double(r.max_loss_error) +
        " max_model_rel_error=" + io::format_double(r.max_model_error) +
        " tolerance=" + io::format_double(opt.tolerance) + " failures=" + std::to_string(r.failures) +
        " result=" + (r.passed() ? "pass" : "fail") + "\n");
  return r.passed() ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string scenario = "city2d";
  std::optional<std::size_t> n, queries, train_queries;
  std::size_t dim = 32;
  std::size_t points = 20000;
  std::uint64_t seed = 0;
  std::string out_dir;
};

void write_store(const fs::path& path, const std::vector<CameraPose2D>& poses,
                 const Eigen::MatrixXd& rows) {
  io::DescriptorStore store;
  for (const auto& p : poses) store.ids.push_back(p.id);
  store.rows = rows;
  io::write_descriptors(path, store);
}

int synth_command(const SynthArgs& a) {
  const fs::path dir = a.out_dir;
  fs::create_directories(dir);
  if (a.scenario == "city2d") {
    synth::CityOptions o;
    o.maps = a.n.value_or(1000);
    o.queries = a.queries.value_or(std::max<std::size_t>(1, o.maps / 5));
    o.train_queries = a.train_queries.value_or(o.queries);
    o.feature_dim = a.dim;
    o.seed = a.seed;
    const auto s = synth::city2d(o);
    io::write_poses_2d(dir / "maps.csv", s.maps);
    io::write_poses_2d(dir / "queries.csv", s.queries);
    io::write_poses_2d(dir / "train_queries.csv", s.train_queries);
    write_store(dir / "map_features.gdsc", s.maps, s.map_features);
    write_store(dir / "query_features.gdsc", s.queries, s.query_features);
    write_store(dir / "train_features.gdsc", s.train_queries, s.train_features);
    print("scenario=city2d maps=" + std::to_string(s.maps.size()) +
          " queries=" + std::to_string(s.queries.size()) +
          " train_queries=" + std::to_string(s.train_queries.size()) +
          " dim=" + std::to_string(o.feature_dim) + "\n");
  } else {
    synth::CloudOptions o;
    o.poses = a.n.value_or(20);
    o.points = a.points;
    o.seed = a.seed;
    const auto s = synth::cloud3d(o);
    io::write_poses_6dof(dir / "poses.csv", s.poses);
    io::write_xyz(dir / "cloud.xyz", s.cloud);
    io::write_intrinsics(dir / "intrinsics.txt", s.intrinsics);
    print("scenario=cloud3d poses=" + std::to_string(s.poses.size()) +
          " points=" + std::to_string(s.cloud.points.size()) + "\n");
  }
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Graded-similarity place recognition toolkit"};
  app.require_subcommand(1);
  std::function<int()> command;

  Annotate2dArgs a2;
  auto* annotate2 = app.add_subcommand("annotate-2d", "Graded pairs from planar field-of-view overlap");
  annotate2->add_option("poses", a2.poses, "Pose CSV used as both queries and maps");
  annotate2->add_option("--queries", a2.queries, "Query pose CSV");
  annotate2->add_option("--maps", a2.maps, "Map pose CSV");
  annotate2->add_option("--theta", a2.theta, "Aperture in degrees (default 90)");
  annotate2->add_option("--radius", a2.radius, "Sector radius in meters (default 50, or 3.5 with --strong)");
  annotate2->add_option("--mode", a2.mode, "Overlap normalization: ioa (intersection over the query sector) or iou")
      ->check(CLI::IsMember({"ioa", "iou"}))
      ->capture_default_str();
  annotate2->add_flag("--strong", a2.strong, "Read 6DOF pose CSVs and project them to the ground plane");
  annotate2->add_option("--out", a2.out, "Output graded-pair CSV")->required();
  annotate2->callback([&] { command = [&] { return annotate_2d(a2); }; });

  Annotate3dArgs a3;
  auto* annotate3 = app.add_subcommand("annotate-3d", "Graded pairs from point-cloud visibility IoU");
  annotate3->add_option("poses", a3.poses, "6DOF pose CSV used as both queries and maps");
  annotate3->add_option("--queries", a3.queries, "Query 6DOF pose CSV");
  annotate3->add_option("--maps", a3.maps, "Map 6DOF pose CSV");
  annotate3->add_option("--cloud", a3.cloud, "Point cloud (.xyz or ASCII .ply)")->required();
  annotate3->add_option("--intrinsics", a3.intrinsics, "Pinhole intrinsics key=value file")->required();
  annotate3->add_option("--out", a3.out, "Output graded-pair CSV")->required();
  annotate3->callback([&] { command = [&] { return annotate_3d(a3); }; });

  TrainArgs tr;
  auto* trainc = app.add_subcommand("train", "Train the embedding network with SGD");
  trainc->add_option("pairs", tr.pairs, "Graded-pair CSV")->required();
  trainc->add_option("features", tr.features, "One or more GDSC feature stores holding every pair id")
      ->required();
  trainc->add_option("--out", tr.out, "Output checkpoint (.gsim); metadata goes to <out>.json")->required();
  trainc->add_option("--trace", tr.trace, "Loss trace CSV (default <out stem>.trace.csv)");
  trainc->add_option("--loss", tr.loss, "gcl or cl")->check(CLI::IsMember({"gcl", "cl"}))->capture_default_str();
  trainc->add_option("--strategy", tr.strategy, "Batch composition A, B, C or D")
      ->check(CLI::IsMember({"A", "B", "C", "D"}))
      ->capture_default_str();
  trainc->add_option("--epochs", tr.epochs, "Epochs")->capture_default_str();
  trainc->add_option("--seed", tr.seed, "Seed for initialization and sampling")->capture_default_str();
  trainc->add_option("--batch", tr.batch, "Pairs per batch")->capture_default_str();
  trainc->add_option("--tau", tr.tau, "Margin")->capture_default_str();
  trainc->add_option("--positive-threshold", tr.positive_threshold, "psi above this is a positive for cl")
      ->capture_default_str();
  trainc->add_option("--lr", tr.lr, "Initial learning rate (default 0.1 for gcl, 0.01 for cl)");
  trainc->add_option("--lr-decay", tr.decay, "Learning-rate divisor per step")->capture_default_str();
  trainc->add_option("--decay-every", tr.decay_every, "Pairs between learning-rate steps")->capture_default_str();
  trainc->add_option("--checkpoint-every", tr.checkpoint_every,
                     "Write <out stem>.batch<N>.gsim every N batches; 0 disables")
      ->capture_default_str();
  trainc->add_option("--hidden", tr.hidden, "Comma-separated hidden sizes, or none")->capture_default_str();
  trainc->add_option("--out-dim", tr.out_dim, "Descriptor dimension")->capture_default_str();
  trainc->add_flag("--no-normalize", tr.no_normalize, "Skip L2 normalization of the output");
  trainc->callback([&] { command = [&] { return train_command(tr); }; });

  RetrieveArgs rt;
  auto* retrieve = app.add_subcommand("retrieve", "Exhaustive nearest-neighbor retrieval");
  retrieve->add_option("--model", rt.model, "Checkpoint to embed features with; raw features if omitted");
  retrieve->add_option("--maps", rt.maps, "Map GDSC store")->required();
  retrieve->add_option("--queries", rt.queries, "Query GDSC store")->required();
  retrieve->add_option("--k", rt.k, "Matches per query")->capture_default_str();
  retrieve->add_option("--whiten", rt.whiten, "PCA-whiten to this many dimensions, fitted on the maps");
  retrieve->add_flag("--no-renormalize", rt.no_renormalize, "Skip L2 normalization after whitening");
  retrieve->add_option("--save-whitening", rt.save_whitening, "Write the fitted GPCA transform here");
  retrieve->add_option("--out", rt.out, "Output results CSV")->required();
  retrieve->callback([&] { command = [&] { return retrieve_command(rt); }; });

  EvalArgs ev;
  auto* evalc = app.add_subcommand("eval", "Recall@k, AP, localization and threshold sweeps");
  evalc->add_option("results", ev.results, "Results CSV")->required();
  evalc->add_option("--pairs", ev.pairs, "Graded-pair CSV (psi ground truth)");
  evalc->add_option("--query-poses", ev.query_poses, "Query pose CSV, planar or 6DOF");
  evalc->add_option("--map-poses", ev.map_poses, "Map pose CSV, planar or 6DOF");
  evalc->add_option("--criterion", ev.criterion, "geo or psi")
      ->check(CLI::IsMember({"geo", "psi"}))
      ->capture_default_str();
  evalc->add_option("--max-dist", ev.max_dist, "geo: meters")->capture_default_str();
  evalc->add_option("--max-angle", ev.max_angle, "geo: degrees")->capture_default_str();
  evalc->add_option("--min-psi", ev.min_psi, "psi: positives have psi above this")->capture_default_str();
  evalc->add_option("--ks", ev.ks, "Comma-separated k values")->capture_default_str();
  evalc->add_option("--tiers", ev.tiers, "Localization tiers meters:degrees,... (default 0.25:2,0.5:5,5:10)");
  evalc->add_option("--sweep", ev.sweep, "Threshold sweep axis: none, distance or psi")
      ->check(CLI::IsMember({"none", "distance", "psi"}))
      ->capture_default_str();
  evalc->add_option("--grid", ev.grid, "Comma-separated sweep thresholds");
  evalc->add_option("--sweep-k", ev.sweep_k, "k for the sweep recall")->capture_default_str();
  evalc->add_option("--sweep-out", ev.sweep_out, "Sweep CSV (threshold,recall); appended to the report if omitted");
  evalc->add_option("--out", ev.out, "Also write the key=value report here");
  evalc->callback([&] { command = [&] { return eval_command(ev); }; });

  GradcheckArgs gc;
  auto* gradc = app.add_subcommand("gradcheck", "Finite-difference check of loss and model gradients");
  gradc->add_option("--dims", gc.dims, "Model sizes input,hidden...,output")->capture_default_str();
  gradc->add_option("--trials", gc.trials, "Random configurations")->capture_default_str();
  gradc->add_option("--seed", gc.seed, "Seed")->capture_default_str();
  gradc->callback([&] { command = [&] { return gradcheck_command(gc); }; });

  SynthArgs sy;
  auto* synthc = app.add_subcommand("synth", "Generate a synthetic scenario");
  synthc->add_option("--scenario", sy.scenario, "city2d or cloud3d")
      ->check(CLI::IsMember({"city2d", "cloud3d"}))
      ->capture_default_str();
  synthc->add_option("--n", sy.n, "Map cameras (city2d, default 1000) or poses (cloud3d, default 20)");
  synthc->add_option("--queries", sy.queries, "city2d: query cameras (default n/5)");
  synthc->add_option("--train-queries", sy.train_queries, "city2d: training query cameras (default = queries)");
  synthc->add_option("--dim", sy.dim, "city2d: feature dimension")->capture_default_str();
  synthc->add_option("--points", sy.points, "cloud3d: points in the cloud")->capture_default_str();
  synthc->add_option("--seed", sy.seed, "Seed")->capture_default_str();
  synthc->add_option("--out-dir", sy.out_dir, "Output directory")->required();
  synthc->callback([&] { command = [&] { return synth_command(sy); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    return command();
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace gcl::cli
