#include "oneshot/episodes.hpp"

#include "oneshot/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oneshot {

Episode sample_episode(const GmmWorld& world, int way, int shot, int queries_per_class, Rng& rng) {
  if (way < 1 || shot < 1 || queries_per_class < 1)
    throw std::invalid_argument("sample_episode: way, shot, queries must be >= 1");
  if (way > world.class_count())
    throw std::invalid_argument("sample_episode: way exceeds world class count");

  Episode ep;
  ep.way = way;
  ep.shot = shot;
  ep.queries_per_class = queries_per_class;

  // Classes without replacement via partial Fisher-Yates.
  std::vector<int> pool(world.class_count());
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < way; ++i) {
    std::uniform_int_distribution<int> pick(i, world.class_count() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    ep.classes.push_back(pool[i]);
  }

  for (int c = 0; c < way; ++c)
    for (int k = 0; k < shot; ++k)
      ep.supports.push_back({world.sample(ep.classes[c], rng), c, ep.classes[c]});
  for (int c = 0; c < way; ++c)
    for (int q = 0; q < queries_per_class; ++q)
      ep.queries.push_back({world.sample(ep.classes[c], rng), c, ep.classes[c]});
  return ep;
}

Encoder Encoder::identity() {
  Encoder e;
  e.kind_ = Kind::identity;
  e.lipschitz_ = 1.0;
  return e;
}

Encoder Encoder::fixed_random_linear(int in_dim, int out_dim, std::uint64_t seed) {
  if (in_dim < 1 || out_dim < 1)
    throw std::invalid_argument("Encoder: dimensions must be positive");
  Encoder e;
  e.kind_ = Kind::fixed_random_linear;
  Rng rng = make_stream(seed, 0xE4C0DE, 0, 0);
  e.weights_.resize(out_dim, in_dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
  for (int r = 0; r < out_dim; ++r)
    for (int c = 0; c < in_dim; ++c) e.weights_(r, c) = scale * normal_draw(rng);
  Eigen::JacobiSVD<MatrixXd> svd(e.weights_);
  e.lipschitz_ = svd.singularValues()(0);
  return e;
}

Encoder Encoder::avg_pool(int factor) {
  if (factor < 1) throw std::invalid_argument("Encoder: pool factor must be >= 1");
  Encoder e;
  e.kind_ = Kind::avg_pool;
  e.pool_factor_ = factor;
  e.lipschitz_ = 1.0 / factor;
  return e;
}

VectorXd Encoder::encode(const RasterImage& x) const {
  switch (kind_) {
    case Kind::identity:
      return x.pixels.matrix();
    case Kind::fixed_random_linear:
      if (weights_.cols() != x.pixels.size())
        throw std::invalid_argument("Encoder: image size does not match weights");
      return weights_ * x.pixels.matrix();
    case Kind::avg_pool: {
      if (x.width % pool_factor_ != 0 || x.height % pool_factor_ != 0)
        throw std::invalid_argument("Encoder: pool factor must divide image dimensions");
      const int ow = x.width / pool_factor_;
      const int oh = x.height / pool_factor_;
      VectorXd out(static_cast<long>(ow) * oh);
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          double sum = 0.0;
          for (int dy = 0; dy < pool_factor_; ++dy)
            for (int dx = 0; dx < pool_factor_; ++dx)
              sum += x(ox * pool_factor_ + dx, oy * pool_factor_ + dy);
          out[static_cast<long>(oy) * ow + ox] = sum / (pool_factor_ * pool_factor_);
        }
      }
      return out;
    }
  }
  throw std::logic_error("Encoder: unknown kind");
}

VectorXd default_view_weights(int extra_views, double original_weight) {
  if (extra_views < 0) throw std::invalid_argument("default_view_weights: negative view count");
  if (original_weight < 0.0 || original_weight > 1.0)
    throw std::invalid_argument("default_view_weights: original weight must lie in [0,1]");
  if (extra_views == 0) return VectorXd::Ones(1);
  VectorXd alpha(extra_views + 1);
  alpha[0] = original_weight;
  for (int k = 1; k <= extra_views; ++k) alpha[k] = (1.0 - original_weight) / extra_views;
  return alpha;
}

void check_weights(const VectorXd& alpha) {
  if (alpha.size() < 1) throw std::invalid_argument("weights: empty");
  if ((alpha.array() < 0.0).any()) throw std::invalid_argument("weights: must be non-negative");
  if (std::abs(alpha.sum() - 1.0) > 1e-12) throw std::invalid_argument("weights: must sum to 1");
}

VectorXd aggregate_support(const AugmentedSet& views, const Encoder& enc, const VectorXd& alpha) {
  check_weights(alpha);
  if (alpha.size() != views.view_count())
    throw std::invalid_argument("aggregate_support: weight/view count mismatch");
  VectorXd z = alpha[0] * enc.encode(views.original);
  for (int k = 1; k < views.view_count(); ++k) z += alpha[k] * enc.encode(views.view(k));
  return z;
}

MatrixXd prototypes(const Episode& episode, const std::vector<VectorXd>& aggregated_supports) {
  if (aggregated_supports.size() != episode.supports.size())
    throw std::invalid_argument("prototypes: support feature count mismatch");
  if (aggregated_supports.empty()) throw std::invalid_argument("prototypes: empty episode");
  const long dim = aggregated_supports.front().size();
  MatrixXd protos = MatrixXd::Zero(episode.way, dim);
  std::vector<int> counts(episode.way, 0);
  for (std::size_t i = 0; i < aggregated_supports.size(); ++i) {
    const int c = episode.supports[i].label;
    protos.row(c) += aggregated_supports[i].transpose();
    ++counts[c];
  }
  for (int c = 0; c < episode.way; ++c) {
    if (counts[c] == 0) throw std::invalid_argument("prototypes: class without supports");
    protos.row(c) /= counts[c];
  }
  return protos;
}

namespace {

double pair_logit(const VectorXd& z, const VectorXd& proto, Metric metric) {
  if (metric == Metric::euclidean) return -(z - proto).squaredNorm();
  const double nz = z.norm();
  const double np = proto.norm();
  if (nz == 0.0 || np == 0.0) return 0.0;
  return z.dot(proto) / (nz * np);
}

int argmax_smallest_tie(const VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

Classification classify_query(const AugmentedSet& query_views, const MatrixXd& protos,
                              const Encoder& enc, const VectorXd& alpha, Metric metric) {
  check_weights(alpha);
  if (alpha.size() != query_views.view_count())
    throw std::invalid_argument("classify_query: weight/view count mismatch");
  VectorXd logits = VectorXd::Zero(protos.rows());
  for (int k = 0; k < query_views.view_count(); ++k) {
    const VectorXd z = enc.encode(query_views.view(k));
    for (long c = 0; c < protos.rows(); ++c)
      logits[c] += alpha[k] * pair_logit(z, protos.row(c).transpose(), metric);
  }
  return {argmax_smallest_tie(logits), std::move(logits)};
}

int classify_query_feature_avg(const AugmentedSet& query_views, const MatrixXd& protos,
                               const Encoder& enc, const VectorXd& alpha) {
  check_weights(alpha);
  if (alpha.size() != query_views.view_count())
    throw std::invalid_argument("classify_query_feature_avg: weight/view count mismatch");
  VectorXd z = alpha[0] * enc.encode(query_views.original);
  for (int k = 1; k < query_views.view_count(); ++k) z += alpha[k] * enc.encode(query_views.view(k));
  VectorXd logits(protos.rows());
  for (long c = 0; c < protos.rows(); ++c)
    logits[c] = -(z - protos.row(c).transpose()).squaredNorm();
  return argmax_smallest_tie(logits);
}

AugMode parse_aug_mode(const std::string& s) {
  if (s == "none") return AugMode::none;
  if (s == "1s-daug") return AugMode::one_shot_daug;
  if (s == "traditional") return AugMode::traditional;
  if (s == "oracle") return AugMode::oracle;
  throw std::invalid_argument("unknown augmentation mode: " + s);
}

std::string aug_mode_name(AugMode mode) {
  switch (mode) {
    case AugMode::none: return "none";
    case AugMode::one_shot_daug: return "1s-daug";
    case AugMode::traditional: return "traditional";
    case AugMode::oracle: return "oracle";
  }
  return "?";
}

RasterImage traditional_view(const RasterImage& x, const ShapeTweakRanges& ranges,
                             const PhotometricJitter& jitter, Rng& rng) {
  RasterImage out = apply_tweak(x, sample_tweak(ranges, rng));
  const double contrast = uniform_draw(rng, 1.0 - jitter.contrast, 1.0 + jitter.contrast);
  const double brightness = uniform_draw(rng, -jitter.brightness, jitter.brightness);
  out.pixels = contrast * out.pixels + brightness;
  return out;
}

AugmentedSet make_views(const RasterImage& x, int world_class, int extra_views, AugMode mode,
                        const BenchmarkConfig& cfg, const GmmWorld& world,
                        const VarianceSchedule& schedule, Rng& rng) {
  AugmentedSet set;
  set.original = x;
  if (mode == AugMode::none) return set;
  if (mode == AugMode::one_shot_daug) {
    AugConfig aug = cfg.aug;
    aug.variants = extra_views;
    return augment_set(x, aug, world, schedule, rng);
  }
  set.variants.reserve(extra_views);
  for (int k = 0; k < extra_views; ++k) {
    if (mode == AugMode::traditional)
      set.variants.push_back(traditional_view(x, cfg.aug.ranges, cfg.jitter, rng));
    else
      set.variants.push_back(world.sample(world_class, rng));
  }
  return set;
}

namespace {

EpisodeResult run_episode(const GmmWorld& world, const VarianceSchedule& schedule,
                          const Encoder& enc, const BenchmarkConfig& cfg, long index) {
  // Separate streams for the task draw and the augmentations, so configs that
  // differ only in augmentation see identical episodes.
  Rng ep_rng = make_stream(cfg.seed, 0xE01, static_cast<std::uint64_t>(index));
  Rng aug_rng = make_stream(cfg.seed, 0xA02, static_cast<std::uint64_t>(index));

  const Episode ep = sample_episode(world, cfg.way, cfg.shot, cfg.queries_per_class, ep_rng);

  const int sup_extra = cfg.mode == AugMode::none ? 0 : cfg.ka_sup;
  const int qry_extra = cfg.mode == AugMode::none ? 0 : cfg.ka_qry;
  const VectorXd sup_alpha = default_view_weights(sup_extra, cfg.original_weight);
  const VectorXd qry_alpha = default_view_weights(qry_extra, cfg.original_weight);

  std::vector<VectorXd> sup_features;
  sup_features.reserve(ep.supports.size());
  for (const LabeledImage& s : ep.supports) {
    const AugmentedSet views =
        make_views(s.image, s.world_class, sup_extra, cfg.mode, cfg, world, schedule, aug_rng);
    sup_features.push_back(aggregate_support(views, enc, sup_alpha));
  }
  const MatrixXd protos = prototypes(ep, sup_features);

  EpisodeResult result;
  result.episode_seed = derive_seed(cfg.seed, 0xE01, static_cast<std::uint64_t>(index));
  result.confusion = Eigen::MatrixXi::Zero(ep.way, ep.way);
  int correct = 0;
  for (const LabeledImage& q : ep.queries) {
    const AugmentedSet views =
        make_views(q.image, q.world_class, qry_extra, cfg.mode, cfg, world, schedule, aug_rng);
    const Classification cls = classify_query(views, protos, enc, qry_alpha, cfg.metric);
    result.confusion(q.label, cls.predicted) += 1;
    if (cls.predicted == q.label) ++correct;
  }
  result.accuracy = static_cast<double>(correct) / ep.queries.size();
  return result;
}

}  // namespace

BenchmarkSummary run_benchmark(const GmmWorld& world, const VarianceSchedule& schedule,
                               const Encoder& enc, const BenchmarkConfig& cfg) {
  if (cfg.episodes < 1) throw std::invalid_argument("run_benchmark: episodes must be >= 1");
  if (cfg.ka_sup < 0 || cfg.ka_qry < 0)
    throw std::invalid_argument("run_benchmark: augmentation counts must be >= 0");

  BenchmarkSummary summary;
  summary.per_episode.resize(cfg.episodes);
  parallel_for(cfg.episodes, cfg.jobs, [&](long i) {
    summary.per_episode[i] = run_episode(world, schedule, enc, cfg, i);
  });
  summary.mean_accuracy = summary_mean(summary.per_episode);
  summary.ci95 = summary_ci95(summary.per_episode);
  return summary;
}

double summary_mean(const std::vector<EpisodeResult>& results) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const EpisodeResult& r : results) sum += r.accuracy;
  return sum / results.size();
}

double summary_ci95(const std::vector<EpisodeResult>& results) {
  if (results.size() < 2) return 0.0;
  const double mean = summary_mean(results);
  double ss = 0.0;
  for (const EpisodeResult& r : results) ss += (r.accuracy - mean) * (r.accuracy - mean);
  const double stderr_mean = std::sqrt(ss / (results.size() - 1)) / std::sqrt(double(results.size()));
  return 1.96 * stderr_mean;
}

std::vector<BinaryPair> episode_to_pairs(const Episode& episode, const Encoder& enc,
                                         const MatrixXd& protos) {
  if (protos.rows() != episode.way)
    throw std::invalid_argument("episode_to_pairs: prototype count mismatch");
  std::vector<BinaryPair> pairs;
  pairs.reserve(episode.queries.size() * episode.way);
  for (const LabeledImage& q : episode.queries) {
    const VectorXd z = enc.encode(q.image);
    for (int c = 0; c < episode.way; ++c)
      pairs.push_back({z, protos.row(c).transpose(), c == q.label ? 1 : -1});
  }
  return pairs;
}

double binary_pair_error(const std::vector<BinaryPair>& pairs, double beta) {
  if (pairs.empty()) throw std::invalid_argument("binary_pair_error: no pairs");
  long errors = 0;
  for (const BinaryPair& p : pairs) {
    const double score = beta - (p.query_feature - p.prototype).squaredNorm();
    if (p.label * score <= 0.0) ++errors;
  }
  return static_cast<double>(errors) / pairs.size();
}

}  // namespace oneshot
