#include "oneshot/theory.hpp"

#include "oneshot/parallel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oneshot {

double ramp_loss(double t, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("ramp_loss: rho must be > 0");
  if (t <= 0.0) return 1.0;
  if (t >= rho) return 0.0;
  return 1.0 - t / rho;
}

void SignTable::validate() const {
  const long n = f.size();
  if (n < 1 || f_a.size() != n || y.size() != n || prob.size() != n)
    throw std::invalid_argument("SignTable: column sizes disagree");
  for (long i = 0; i < n; ++i) {
    if (std::abs(std::abs(f[i]) - 1.0) > 0.0 || std::abs(std::abs(f_a[i]) - 1.0) > 0.0 ||
        std::abs(std::abs(y[i]) - 1.0) > 0.0)
      throw std::invalid_argument("SignTable: values must be in {-1, +1}");
    if (prob[i] < 0.0) throw std::invalid_argument("SignTable: negative probability");
  }
  if (std::abs(prob.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("SignTable: probabilities must sum to 1");
}

double risk_squared(const VectorXd& g, const VectorXd& y, const VectorXd& prob) {
  if (g.size() != y.size() || g.size() != prob.size())
    throw std::invalid_argument("risk_squared: size mismatch");
  double acc = 0.0;
  for (long i = 0; i < g.size(); ++i) acc += prob[i] * (g[i] - y[i]) * (g[i] - y[i]);
  return acc / 4.0;
}

double zero_one_risk(const VectorXd& g, const VectorXd& y, const VectorXd& prob) {
  if (g.size() != y.size() || g.size() != prob.size())
    throw std::invalid_argument("zero_one_risk: size mismatch");
  double acc = 0.0;
  for (long i = 0; i < g.size(); ++i)
    if (y[i] * g[i] <= 0.0) acc += prob[i];
  return acc;
}

Prop1Result verify_prop1(const SignTable& table) {
  table.validate();
  const VectorXd ensemble = (table.f + table.f_a) / 2.0;
  const double lhs =
      risk_squared(ensemble, table.y, table.prob) - risk_squared(table.f, table.y, table.prob);

  double e_fy = 0.0, e_fay = 0.0, e_ffa = 0.0;
  for (long i = 0; i < table.f.size(); ++i) {
    e_fy += table.prob[i] * table.f[i] * table.y[i];
    e_fay += table.prob[i] * table.f_a[i] * table.y[i];
    e_ffa += table.prob[i] * table.f[i] * table.f_a[i];
  }
  const double rhs = (e_fy - e_fay) / 4.0 + (e_ffa - 1.0) / 8.0;
  return {lhs, rhs, std::abs(lhs - rhs)};
}

namespace {

SignTable table_from_triples(const std::vector<int>& triples, const VectorXd& prob) {
  SignTable t;
  const long n = static_cast<long>(triples.size());
  t.f.resize(n);
  t.f_a.resize(n);
  t.y.resize(n);
  t.prob = prob;
  for (long i = 0; i < n; ++i) {
    t.f[i] = (triples[i] & 1) ? 1.0 : -1.0;
    t.f_a[i] = (triples[i] & 2) ? 1.0 : -1.0;
    t.y[i] = (triples[i] & 4) ? 1.0 : -1.0;
  }
  return t;
}

void enumerate_compositions(int total, int parts, std::vector<int>& current,
                            const std::function<void(const std::vector<int>&)>& emit) {
  if (parts == 1) {
    current.push_back(total);
    emit(current);
    current.pop_back();
    return;
  }
  for (int head = 1; head <= total - (parts - 1); ++head) {
    current.push_back(head);
    enumerate_compositions(total - head, parts - 1, current, emit);
    current.pop_back();
  }
}

}  // namespace

Prop1Audit verify_prop1_exhaustive(int denominator) {
  if (denominator < 1) throw std::invalid_argument("verify_prop1_exhaustive: bad denominator");
  Prop1Audit audit;
  std::vector<int> support;
  std::function<void(int)> choose = [&](int start) {
    if (!support.empty()) {
      std::vector<int> counts;
      enumerate_compositions(denominator, static_cast<int>(support.size()), counts,
                             [&](const std::vector<int>& parts) {
                               VectorXd prob(static_cast<long>(parts.size()));
                               for (std::size_t i = 0; i < parts.size(); ++i)
                                 prob[static_cast<long>(i)] =
                                     static_cast<double>(parts[i]) / denominator;
                               const Prop1Result r = verify_prop1(table_from_triples(support, prob));
                               audit.max_gap = std::max(audit.max_gap, r.gap);
                               ++audit.tables;
                             });
    }
    if (support.size() == 4) return;
    for (int next = start; next < 8; ++next) {
      support.push_back(next);
      choose(next + 1);
      support.pop_back();
    }
  };
  choose(0);
  return audit;
}

Prop1Audit verify_prop1_random(long tables, Rng& rng) {
  Prop1Audit audit;
  for (long i = 0; i < tables; ++i) {
    std::uniform_int_distribution<int> size_dist(1, 8);
    const int n = size_dist(rng);
    std::vector<int> triples(n);
    std::uniform_int_distribution<int> triple_dist(0, 7);
    for (int& t : triples) t = triple_dist(rng);
    VectorXd prob(n);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      prob[j] = uniform_draw(rng, 1e-3, 1.0);
      sum += prob[j];
    }
    prob /= sum;
    const Prop1Result r = verify_prop1(table_from_triples(triples, prob));
    audit.max_gap = std::max(audit.max_gap, r.gap);
    ++audit.tables;
  }
  return audit;
}

void PairwiseWorld::validate() const {
  if (atoms.empty()) throw std::invalid_argument("PairwiseWorld: no atoms");
  if (prob.size() != static_cast<long>(atoms.size()))
    throw std::invalid_argument("PairwiseWorld: probability count mismatch");
  if ((prob.array() < 0.0).any() || std::abs(prob.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("PairwiseWorld: probabilities must be a distribution");
  for (const PairwiseInstance& a : atoms)
    if (a.label != 1 && a.label != -1)
      throw std::invalid_argument("PairwiseWorld: labels must be +1 or -1");
}

double EncoderGrid::max_spectral_norm() const {
  double best = 0.0;
  for (const MatrixXd& w : weights) {
    Eigen::JacobiSVD<MatrixXd> svd(w);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

void MarginConfig::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("MarginConfig: rho must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("MarginConfig: delta in (0,1)");
  if (m < 1) throw std::invalid_argument("MarginConfig: m must be >= 1");
}

double pairwise_score(const MatrixXd& w, const PairwiseInstance& inst, double beta) {
  return beta - (w * inst.input - inst.prototype).squaredNorm();
}

PairwiseWorld make_pairwise_world(const GmmWorld& world, const MatrixXd& ref_encoder, int atoms,
                                  Rng& rng) {
  if (atoms < 2) throw std::invalid_argument("make_pairwise_world: needs at least two atoms");
  if (ref_encoder.cols() != world.pixel_count())
    throw std::invalid_argument("make_pairwise_world: encoder input dim mismatch");
  if (world.class_count() < 2)
    throw std::invalid_argument("make_pairwise_world: needs at least two classes");

  const MatrixXd encoded = world.templates() * ref_encoder.transpose();  // class x feature
  PairwiseWorld out;
  out.atoms.reserve(atoms);
  std::uniform_int_distribution<int> class_dist(0, world.class_count() - 1);
  for (int a = 0; a < atoms; ++a) {
    PairwiseInstance inst;
    const int c = class_dist(rng);
    inst.label = (a % 2 == 0) ? 1 : -1;
    int target = c;
    if (inst.label == -1) {
      std::uniform_int_distribution<int> other(0, world.class_count() - 2);
      target = other(rng);
      if (target >= c) ++target;
    }
    inst.input = world.sample(c, rng).pixels.matrix();
    inst.prototype = encoded.row(target).transpose();
    out.atoms.push_back(std::move(inst));
  }
  out.prob = VectorXd::Constant(atoms, 1.0 / atoms);
  return out;
}

PairwiseWorld scale_pairwise_world(const PairwiseWorld& world, double factor) {
  PairwiseWorld out = world;
  for (PairwiseInstance& a : out.atoms) {
    a.input *= factor;
    a.prototype *= factor;
  }
  return out;
}

EncoderGrid make_encoder_grid(const MatrixXd& ref_encoder, int count, double spread,
                              std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("make_encoder_grid: empty grid");
  EncoderGrid grid;
  grid.weights.reserve(count);
  grid.weights.push_back(ref_encoder);
  Rng rng = make_stream(seed, 0x6A1D);
  std::uniform_int_distribution<int> lattice(-1, 1);
  const double step = spread / std::sqrt(static_cast<double>(ref_encoder.size()));
  for (int j = 1; j < count; ++j) {
    MatrixXd w = ref_encoder;
    for (long r = 0; r < w.rows(); ++r)
      for (long c = 0; c < w.cols(); ++c) w(r, c) += step * lattice(rng);
    grid.weights.push_back(std::move(w));
  }
  return grid;
}

double calibrate_beta(const PairwiseWorld& world, const MatrixXd& ref_encoder) {
  world.validate();
  double within = 0.0, cross = 0.0, w_mass = 0.0, c_mass = 0.0;
  for (std::size_t i = 0; i < world.atoms.size(); ++i) {
    const PairwiseInstance& a = world.atoms[i];
    const double d2 = (ref_encoder * a.input - a.prototype).squaredNorm();
    if (a.label == 1) {
      within += world.prob[static_cast<long>(i)] * d2;
      w_mass += world.prob[static_cast<long>(i)];
    } else {
      cross += world.prob[static_cast<long>(i)] * d2;
      c_mass += world.prob[static_cast<long>(i)];
    }
  }
  if (w_mass == 0.0 || c_mass == 0.0)
    throw std::invalid_argument("calibrate_beta: needs both pair labels");
  return 0.5 * (within / w_mass + cross / c_mass);
}

double rademacher_score_mc(const MatrixXd& g_values, int sign_vectors, Rng& rng) {
  if (g_values.rows() < 1 || g_values.cols() < 1)
    throw std::invalid_argument("rademacher_score_mc: empty value matrix");
  if (sign_vectors < 1) throw std::invalid_argument("rademacher_score_mc: needs sign vectors");
  const long m = g_values.cols();
  MatrixXd signs(m, sign_vectors);
  std::uniform_int_distribution<int> coin(0, 1);
  for (long i = 0; i < m; ++i)
    for (int s = 0; s < sign_vectors; ++s) signs(i, s) = coin(rng) ? 1.0 : -1.0;
  const MatrixXd sums = g_values * signs;  // hypotheses x sign_vectors
  double acc = 0.0;
  for (int s = 0; s < sign_vectors; ++s) acc += sums.col(s).maxCoeff();
  return acc / (sign_vectors * static_cast<double>(m));
}

double rademacher_vector_mc(const std::vector<MatrixXd>& omegas, int sign_vectors, Rng& rng) {
  if (omegas.empty()) throw std::invalid_argument("rademacher_vector_mc: empty hypothesis set");
  if (sign_vectors < 1) throw std::invalid_argument("rademacher_vector_mc: needs sign vectors");
  const long m = omegas.front().rows();
  const long d = omegas.front().cols();
  MatrixXd flat(static_cast<long>(omegas.size()), m * d);
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    if (omegas[j].rows() != m || omegas[j].cols() != d)
      throw std::invalid_argument("rademacher_vector_mc: inconsistent shapes");
    flat.row(static_cast<long>(j)) =
        Eigen::Map<const VectorXd>(omegas[j].data(), m * d).transpose();
  }
  MatrixXd signs(m * d, sign_vectors);
  std::uniform_int_distribution<int> coin(0, 1);
  for (long i = 0; i < m * d; ++i)
    for (int s = 0; s < sign_vectors; ++s) signs(i, s) = coin(rng) ? 1.0 : -1.0;
  const MatrixXd sums = flat * signs;
  double acc = 0.0;
  for (int s = 0; s < sign_vectors; ++s) acc += sums.col(s).maxCoeff();
  return acc / (sign_vectors * static_cast<double>(m));
}

namespace {

// g values of every hypothesis on every atom, hypotheses x atoms.
MatrixXd score_table(const PairwiseWorld& world, const EncoderGrid& grid, double beta) {
  MatrixXd g(static_cast<long>(grid.weights.size()), static_cast<long>(world.atoms.size()));
  for (std::size_t j = 0; j < grid.weights.size(); ++j)
    for (std::size_t a = 0; a < world.atoms.size(); ++a)
      g(static_cast<long>(j), static_cast<long>(a)) =
          pairwise_score(grid.weights[j], world.atoms[a], beta);
  return g;
}

std::vector<long> sample_atoms(const PairwiseWorld& world, int m, Rng& rng) {
  std::discrete_distribution<long> pick(world.prob.data(), world.prob.data() + world.prob.size());
  std::vector<long> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = pick(rng);
  return idx;
}

}  // namespace

BoundAuditResult margin_bound_audit(const PairwiseWorld& world, const EncoderGrid& grid,
                                    const MarginConfig& cfg, int trials, int sign_vectors,
                                    std::uint64_t seed, int jobs) {
  world.validate();
  cfg.validate();
  if (grid.weights.empty()) throw std::invalid_argument("margin_bound_audit: empty grid");
  if (trials < 1) throw std::invalid_argument("margin_bound_audit: trials must be >= 1");

  const long n_hyp = static_cast<long>(grid.weights.size());
  const MatrixXd g_atoms = score_table(world, grid, cfg.beta);

  // Exact population 0-1 risk of every hypothesis.
  VectorXd true_risk = VectorXd::Zero(n_hyp);
  for (long j = 0; j < n_hyp; ++j)
    for (std::size_t a = 0; a < world.atoms.size(); ++a)
      if (world.atoms[a].label * g_atoms(j, static_cast<long>(a)) <= 0.0)
        true_risk[j] += world.prob[static_cast<long>(a)];

  const double slack = std::sqrt(std::log(1.0 / cfg.delta) / (2.0 * cfg.m));

  std::vector<int> holds(trials, 0);
  std::vector<double> rad(trials, 0.0);
  parallel_for(trials, jobs, [&](long trial) {
    Rng rng = make_stream(seed, 0x3AD1, static_cast<std::uint64_t>(trial));
    const std::vector<long> idx = sample_atoms(world, cfg.m, rng);

    MatrixXd g(n_hyp, cfg.m);
    VectorXd labels(cfg.m);
    for (int i = 0; i < cfg.m; ++i) {
      g.col(i) = g_atoms.col(idx[i]);
      labels[i] = world.atoms[static_cast<std::size_t>(idx[i])].label;
    }

    const double rademacher = rademacher_score_mc(g, sign_vectors, rng);
    rad[trial] = rademacher;

    bool all_hold = true;
    for (long j = 0; j < n_hyp && all_hold; ++j) {
      double emp = 0.0;
      for (int i = 0; i < cfg.m; ++i) emp += ramp_loss(labels[i] * g(j, i), cfg.rho);
      emp /= cfg.m;
      const double rhs = emp + (2.0 / cfg.rho) * rademacher + slack;
      if (true_risk[j] > rhs) all_hold = false;
    }
    holds[trial] = all_hold ? 1 : 0;
  });

  BoundAuditResult out;
  out.trials = trials;
  out.slack_term = slack;
  double hold_sum = 0.0, rad_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    hold_sum += holds[t];
    rad_sum += rad[t];
  }
  out.holding_fraction = hold_sum / trials;
  out.mean_rademacher = rad_sum / trials;
  out.mc_sigma = std::sqrt(std::max(out.holding_fraction * (1.0 - out.holding_fraction), 0.25 / trials) /
                           trials);
  out.passed = out.holding_fraction >= 1.0 - cfg.delta - 3.0 * out.mc_sigma;
  return out;
}

RadiusScalingResult radius_scaling_experiment(const PairwiseWorld& world, const EncoderGrid& grid,
                                              const MarginConfig& cfg, int sign_vectors,
                                              std::uint64_t seed) {
  world.validate();
  cfg.validate();
  const PairwiseWorld half = scale_pairwise_world(world, 0.5);
  const long n_hyp = static_cast<long>(grid.weights.size());

  Rng sample_rng = make_stream(seed, 0x5CA1E);
  const std::vector<long> idx = sample_atoms(world, cfg.m, sample_rng);

  auto build = [&](const PairwiseWorld& w, MatrixXd& g, std::vector<MatrixXd>& omegas,
                   double& radius) {
    g.resize(n_hyp, cfg.m);
    omegas.assign(grid.weights.size(), MatrixXd());
    radius = 0.0;
    for (std::size_t j = 0; j < grid.weights.size(); ++j) {
      MatrixXd om(cfg.m, grid.weights[j].rows());
      for (int i = 0; i < cfg.m; ++i) {
        const PairwiseInstance& a = w.atoms[static_cast<std::size_t>(idx[i])];
        const VectorXd diff = grid.weights[j] * a.input - a.prototype;
        om.row(i) = diff.transpose();
        g(static_cast<long>(j), i) = cfg.beta - diff.squaredNorm();
        radius = std::max(radius, diff.norm());
      }
      omegas[j] = std::move(om);
    }
  };

  RadiusScalingResult out;
  MatrixXd g_full, g_half;
  std::vector<MatrixXd> om_full, om_half;
  build(world, g_full, om_full, out.radius_full);
  build(half, g_half, om_half, out.radius_half);

  // Same sign draws on both scales; the ratio is then exact up to roundoff.
  Rng score_rng_a = make_stream(seed, 0x51C5);
  Rng score_rng_b = make_stream(seed, 0x51C5);
  out.score_full = rademacher_score_mc(g_full, sign_vectors, score_rng_a);
  out.score_half = rademacher_score_mc(g_half, sign_vectors, score_rng_b);
  out.score_ratio = out.score_half / out.score_full;

  Rng vec_rng_a = make_stream(seed, 0xF27);
  Rng vec_rng_b = make_stream(seed, 0xF27);
  out.feature_full = rademacher_vector_mc(om_full, sign_vectors, vec_rng_a);
  out.feature_half = rademacher_vector_mc(om_half, sign_vectors, vec_rng_b);
  out.feature_ratio = out.feature_half / out.feature_full;
  return out;
}

std::vector<std::pair<int, double>> rademacher_vs_m(const PairwiseWorld& world,
                                                    const EncoderGrid& grid,
                                                    const MarginConfig& cfg,
                                                    const std::vector<int>& sample_sizes,
                                                    int sign_vectors, std::uint64_t seed) {
  world.validate();
  const MatrixXd g_atoms = score_table(world, grid, cfg.beta);
  std::vector<std::pair<int, double>> out;
  for (std::size_t k = 0; k < sample_sizes.size(); ++k) {
    const int m = sample_sizes[k];
    if (m < 1) throw std::invalid_argument("rademacher_vs_m: bad sample size");
    Rng rng = make_stream(seed, 0x3B5, k);
    const std::vector<long> idx = sample_atoms(world, m, rng);
    MatrixXd g(g_atoms.rows(), m);
    for (int i = 0; i < m; ++i) g.col(i) = g_atoms.col(idx[i]);
    out.emplace_back(m, rademacher_score_mc(g, sign_vectors, rng));
  }
  return out;
}

Prop3Distribution parse_prop3_distribution(const std::string& s) {
  if (s == "standard_normal" || s == "normal") return Prop3Distribution::standard_normal;
  if (s == "uniform") return Prop3Distribution::uniform;
  if (s == "point_mass") return Prop3Distribution::point_mass;
  throw std::invalid_argument("unknown prop3 distribution: " + s);
}

Prop3Result verify_prop3(int dim, int m, long trials, Prop3Distribution dist, std::uint64_t seed,
                         int jobs) {
  if (dim < 1) throw std::invalid_argument("verify_prop3: dim must be >= 1");
  if (m <= 1) throw std::invalid_argument("verify_prop3: m must be > 1");
  if (trials < 1) throw std::invalid_argument("verify_prop3: trials must be >= 1");
  if (dist == Prop3Distribution::point_mass)
    throw std::invalid_argument("verify_prop3: distribution must be continuous");

  const long block_size = 4096;
  const long blocks = (trials + block_size - 1) / block_size;
  std::vector<long> wins(blocks, 0);
  parallel_for(blocks, jobs, [&](long b) {
    Rng rng = make_stream(seed, 0x9203, static_cast<std::uint64_t>(b));
    const long in_block = std::min(block_size, trials - b * block_size);
    VectorXd omega0(dim), omega1(dim);
    long w = 0;
    for (long trial = 0; trial < in_block; ++trial) {
      double max_orig = 0.0, max_avg = 0.0;
      for (int i = 0; i < m; ++i) {
        for (int k = 0; k < dim; ++k) {
          if (dist == Prop3Distribution::standard_normal) {
            omega0[k] = normal_draw(rng);
            omega1[k] = normal_draw(rng);
          } else {
            omega0[k] = uniform_draw(rng, -1.0, 1.0);
            omega1[k] = uniform_draw(rng, -1.0, 1.0);
          }
        }
        max_orig = std::max(max_orig, omega0.norm());
        max_avg = std::max(max_avg, 0.5 * (omega0 + omega1).norm());
      }
      if (max_avg < max_orig) ++w;
    }
    wins[b] = w;
  });

  Prop3Result out;
  out.dim = dim;
  out.m = m;
  out.trials = trials;
  long total = 0;
  for (long w : wins) total += w;
  out.estimate = static_cast<double>(total) / trials;
  out.std_error = std::sqrt(std::max(out.estimate * (1.0 - out.estimate), 1e-12) / trials);
  out.passed = out.estimate - 0.5 > 3.0 * out.std_error;
  return out;
}

PairwiseSampler::PairwiseSampler(const GmmWorld& world, MatrixXd ref_encoder)
    : world_(&world), ref_(std::move(ref_encoder)) {
  if (ref_.cols() != world.pixel_count())
    throw std::invalid_argument("PairwiseSampler: encoder input dim mismatch");
  if (world.class_count() < 2)
    throw std::invalid_argument("PairwiseSampler: needs at least two classes");
  encoded_templates_ = world.templates() * ref_.transpose();
  const MatrixXd gram = ref_ * ref_.transpose();
  Eigen::LLT<MatrixXd> llt(gram + 1e-12 * MatrixXd::Identity(gram.rows(), gram.cols()));
  feature_noise_chol_ = world.within_class_std() * MatrixXd(llt.matrixL());
}

PairwiseSampler::DrawnPair PairwiseSampler::draw(Rng& rng) const {
  DrawnPair out;
  std::uniform_int_distribution<int> class_dist(0, world_->class_count() - 1);
  out.query_class = class_dist(rng);
  out.inst.label = uniform_draw(rng, 0.0, 1.0) < 0.5 ? 1 : -1;
  int target = out.query_class;
  if (out.inst.label == -1) {
    std::uniform_int_distribution<int> other(0, world_->class_count() - 2);
    target = other(rng);
    if (target >= out.query_class) ++target;
  }
  out.inst.input = world_->sample(out.query_class, rng).pixels.matrix();
  out.inst.prototype = encoded_templates_.row(target).transpose();
  return out;
}

VectorXd PairwiseSampler::difference(const PairwiseInstance& inst) const {
  return ref_ * inst.input - inst.prototype;
}

VectorXd PairwiseSampler::fresh_difference(const DrawnPair& pair, Rng& rng) const {
  const VectorXd mean = encoded_templates_.row(pair.query_class).transpose() - pair.inst.prototype;
  return noisy_difference(mean, rng);
}

VectorXd PairwiseSampler::draw_mean_difference(Rng& rng) const {
  std::uniform_int_distribution<int> class_dist(0, world_->class_count() - 1);
  const int c = class_dist(rng);
  int target = c;
  if (uniform_draw(rng, 0.0, 1.0) < 0.5) {
    std::uniform_int_distribution<int> other(0, world_->class_count() - 2);
    target = other(rng);
    if (target >= c) ++target;
  }
  return (encoded_templates_.row(c) - encoded_templates_.row(target)).transpose();
}

VectorXd PairwiseSampler::noisy_difference(const VectorXd& mean, Rng& rng) const {
  return mean + feature_noise_chol_ * normal_vector(feature_noise_chol_.cols(), rng);
}

BoundComparisonReport bound_comparison_report(const GmmWorld& base_world,
                                              const GmmWorld& novel_world,
                                              const MatrixXd& ref_encoder, const MarginConfig& cfg,
                                              int m_base, int m_novel, int m_tr, int m_test,
                                              std::optional<double> c_enc, long radius_resamples,
                                              std::uint64_t seed, int jobs) {
  cfg.validate();
  if (!c_enc.has_value() || !(*c_enc > 0.0))
    throw std::invalid_argument("bound_comparison_report: missing user constant C_enc");
  if (m_base < 1 || m_novel < 1 || m_tr < 0 || m_test < 0 || radius_resamples < 1)
    throw std::invalid_argument("bound_comparison_report: bad sample sizes");

  const PairwiseSampler base(base_world, ref_encoder);
  const PairwiseSampler novel(novel_world, ref_encoder);

  Eigen::JacobiSVD<MatrixXd> svd(ref_encoder);
  BoundComparisonReport rep;
  rep.m_base = m_base;
  rep.m_novel = m_novel;
  rep.m_tr = m_tr;
  rep.m_test = m_test;
  rep.c_enc = *c_enc;
  rep.l_enc = svd.singularValues()(0);

  double b_x = 0.0;

  // Training side: augmented views enter the sample as extra instances.
  {
    Rng rng = make_stream(seed, 0xB45E);
    const long n_tr = static_cast<long>(m_base) * (m_tr + 1);
    double risk = 0.0, radius = 0.0;
    for (int i = 0; i < m_base; ++i) {
      const PairwiseSampler::DrawnPair pair = base.draw(rng);
      for (int k = 0; k <= m_tr; ++k) {
        PairwiseInstance inst = pair.inst;
        if (k > 0) inst.input = base_world.sample(pair.query_class, rng).pixels.matrix();
        b_x = std::max(b_x, inst.input.norm());
        const VectorXd diff = base.difference(inst);
        radius = std::max(radius, diff.norm());
        risk += ramp_loss(inst.label * (cfg.beta - diff.squaredNorm()), cfg.rho);
      }
    }
    rep.train_sample_size = static_cast<double>(n_tr);
    rep.train_emp_margin_risk = risk / n_tr;
    rep.r0_base_aug = radius;
    rep.train_slack_term = std::sqrt(std::log(1.0 / cfg.delta) / (2.0 * n_tr));
  }

  // Test side: augmented views aggregate into one difference feature.
  {
    Rng rng = make_stream(seed, 0x7E57);
    double risk = 0.0, r_hat = 0.0, r0 = 0.0;
    for (int i = 0; i < m_novel; ++i) {
      const PairwiseSampler::DrawnPair pair = novel.draw(rng);
      b_x = std::max(b_x, pair.inst.input.norm());
      VectorXd mean_diff = novel.difference(pair.inst);
      r0 = std::max(r0, mean_diff.norm());
      for (int k = 0; k < m_test; ++k) mean_diff += novel.fresh_difference(pair, rng);
      mean_diff /= (m_test + 1);
      r_hat = std::max(r_hat, mean_diff.norm());
      risk += ramp_loss(pair.inst.label * (cfg.beta - mean_diff.squaredNorm()), cfg.rho);
    }
    rep.test_emp_margin_risk = risk / m_novel;
    rep.r_hat_novel = r_hat;
    rep.r0_novel = r0;
    rep.test_slack_term = std::sqrt(std::log(1.0 / cfg.delta) / (2.0 * m_novel));
  }

  rep.b_x = b_x;
  rep.train_complexity_term = 2.0 * rep.c_enc * rep.b_x * rep.l_enc * rep.r0_base_aug /
                              (cfg.rho * std::sqrt(rep.train_sample_size));
  rep.test_complexity_term = 2.0 * rep.c_enc * rep.b_x * rep.l_enc * rep.r_hat_novel /
                             (cfg.rho * std::sqrt(static_cast<double>(m_novel)));

  // Radius-reduction resampling, prop3 machinery run directly in feature
  // space. Vacuous at M_test == 0 where the aggregate equals the original.
  rep.radius_resamples = radius_resamples;
  if (m_test == 0) {
    rep.radius_claim_passed = true;
  } else {
    const long block_size = 256;
    const long blocks = (radius_resamples + block_size - 1) / block_size;
    std::vector<long> wins(blocks, 0);
    parallel_for(blocks, jobs, [&](long b) {
      Rng rng = make_stream(seed, 0x4A4D, static_cast<std::uint64_t>(b));
      const long in_block = std::min(block_size, radius_resamples - b * block_size);
      long w = 0;
      for (long r = 0; r < in_block; ++r) {
        double r_orig = 0.0, r_agg = 0.0;
        for (int i = 0; i < m_novel; ++i) {
          const VectorXd mean = novel.draw_mean_difference(rng);
          VectorXd omega0 = novel.noisy_difference(mean, rng);
          r_orig = std::max(r_orig, omega0.norm());
          VectorXd mean_diff = omega0;
          for (int k = 0; k < m_test; ++k) mean_diff += novel.noisy_difference(mean, rng);
          mean_diff /= (m_test + 1);
          r_agg = std::max(r_agg, mean_diff.norm());
        }
        if (r_agg < r_orig) ++w;
      }
      wins[b] = w;
    });
    long total = 0;
    for (long w : wins) total += w;
    rep.radius_reduction_fraction = static_cast<double>(total) / radius_resamples;
    rep.radius_reduction_std_error = std::sqrt(
        std::max(rep.radius_reduction_fraction * (1.0 - rep.radius_reduction_fraction), 1e-12) /
        radius_resamples);
    rep.radius_claim_passed =
        rep.radius_reduction_fraction - 0.5 > 3.0 * rep.radius_reduction_std_error;
  }
  return rep;
}

}  // namespace oneshot
