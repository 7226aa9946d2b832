#include "sdof/analysis.hpp"

#include "sdof/error.hpp"
#include "sdof/rng.hpp"
#include "sdof/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sdof {

namespace {

/// log2 det(I + P M M^H) via singular values.
double log2det_plus_identity(const Eigen::MatrixXcd& m, double power) {
  if (m.size() == 0 || power == 0.0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  double s = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double sv = svd.singularValues()(i);
    s += std::log2(1.0 + power * sv * sv);
  }
  return s;
}

std::vector<int> complement(int n, const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  for (int j = 0; j < n; ++j)
    if (std::find(a.begin(), a.end(), j) == a.end() && std::find(b.begin(), b.end(), j) == b.end()) out.push_back(j);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

}  // namespace

MiResult gaussian_mi(const EffectiveLinearSystem& system, Node node, const std::vector<std::string>& secret,
                     const PowerBudget& power, const std::vector<std::string>& known) {
  if (system.empty()) throw LabError(ErrorCode::EmptySystem, "no slots or no symbols");
  const auto s_cols = system.columns(secret);
  const auto k_cols = system.columns(known);
  for (int j : s_cols)
    if (system.symbols.at(j).kind != SymbolKind::Message)
      throw LabError(ErrorCode::BadArgument, "secret '" + system.symbols.at(j).name + "' is not a message symbol");
  const auto nuis = complement(system.symbols.size(), s_cols, k_cols);
  std::vector<int> all = s_cols;
  all.insert(all.end(), nuis.begin(), nuis.end());

  const double p = power.total_power;
  const double full = log2det_plus_identity(system.block(node, all), p);
  const double rest = log2det_plus_identity(system.block(node, nuis), p);
  MiResult r;
  r.bits = full - rest;
  if (r.bits < 0 && r.bits >= -1e-9) r.bits = 0.0;
  r.power = p;
  r.conditioning = "I(" + join(secret) + "; y_" + to_string(node) + (known.empty() ? "" : " | " + join(known)) +
                   ", CSI)";
  return r;
}

MiResult achievable_rate(const EffectiveLinearSystem& system, Node node, const PowerBudget& power) {
  return gaussian_mi(system, node, system.symbols.intended(node), power);
}

double leakage_bits(const SchemeSpec& spec, const EffectiveLinearSystem& system, const PowerBudget& power) {
  double worst = 0.0;
  for (const auto& adv : spec.adversaries)
    worst = std::max(worst, gaussian_mi(system, adv.node, adv.protected_symbols, power, adv.known).bits);
  return worst;
}

std::vector<double> default_power_grid() { return power_grid_from_exponents({20, 30, 40, 50, 60}); }

std::vector<double> power_grid_from_exponents(const std::vector<int>& exponents) {
  std::vector<double> g;
  for (int e : exponents) g.push_back(std::ldexp(1.0, e));
  return g;
}

SlopeEstimate estimate_slope(const std::function<double(double)>& metric, const Rational& slots,
                             const std::vector<double>& grid) {
  if (grid.size() < 2) throw LabError(ErrorCode::GridTooSmall, "need at least two powers");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0)) throw LabError(ErrorCode::BadArgument, "powers must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw LabError(ErrorCode::BadArgument, "power grid must increase");
  }
  if (slots <= 0) throw LabError(ErrorCode::BadArgument, "slot count must be positive");
  const double n_slots = to_double(slots);
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = std::log2(grid[static_cast<std::size_t>(i)]);
    a(i, 1) = 1.0;
    y(i) = metric(grid[static_cast<std::size_t>(i)]) / n_slots;
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
  SlopeEstimate s;
  s.slope = coef(0);
  s.intercept = coef(1);
  s.power_grid = grid;
  s.residual = std::sqrt((a * coef - y).squaredNorm() / static_cast<double>(n));
  return s;
}

EffectiveLinearSystem system_from_matrix(Node node, const Eigen::MatrixXcd& gain) {
  EffectiveLinearSystem sys;
  sys.topology = Topology::multi_receiver();
  sys.n_slots = static_cast<int>(gain.rows());
  for (Eigen::Index j = 0; j < gain.cols(); ++j)
    sys.symbols.add("s" + std::to_string(j), SymbolKind::Message, Owner::Rx1);
  NodeSystem ns;
  ns.gain = gain;
  for (Eigen::Index i = 0; i < gain.rows(); ++i) ns.slot_of_row.push_back(static_cast<int>(i));
  for (Eigen::Index j = 0; j < gain.cols(); ++j) ns.b_cols.push_back(static_cast<int>(j));
  ns.observed = Eigen::VectorXcd::Zero(gain.rows());
  sys.nodes[node] = ns;
  return sys;
}

namespace {

struct GaussianDensity {
  Eigen::LLT<Eigen::MatrixXcd> chol;
  double log_det = 0.0;  // natural log

  explicit GaussianDensity(const Eigen::MatrixXcd& cov) : chol(cov) {
    const Eigen::MatrixXcd l = chol.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i).real());
  }
  /// log density of CN(0, cov) at y, without the -d log(pi) constant.
  double log_pdf(const Eigen::VectorXcd& y) const {
    const Eigen::VectorXcd w = chol.matrixL().solve(y);
    return -log_det - w.squaredNorm();
  }
};

}  // namespace

MiResult mc_mi_oracle(const EffectiveLinearSystem& system, Node node, const std::vector<std::string>& secret,
                      const PowerBudget& power, int n_samples, std::uint64_t seed) {
  if (system.empty()) throw LabError(ErrorCode::EmptySystem, "no slots or no symbols");
  const Eigen::MatrixXcd& g = system.node(node).gain;
  const Eigen::Index d = g.rows();
  if (d > kMcMaxDimension)
    throw LabError(ErrorCode::DimensionTooLarge, std::to_string(d) + " observations (limit " +
                                                     std::to_string(kMcMaxDimension) + ")");
  if (n_samples < 2) throw LabError(ErrorCode::BadArgument, "need at least two samples");
  const auto s_cols = system.columns(secret);
  const auto n_cols = complement(system.symbols.size(), s_cols, {});
  const double amp = std::sqrt(power.total_power);
  const Eigen::MatrixXcd ms = amp * system.block(node, s_cols);
  const Eigen::MatrixXcd mn = amp * system.block(node, n_cols);
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(d, d);
  const GaussianDensity p_y(eye + ms * ms.adjoint() + mn * mn.adjoint());
  const GaussianDensity p_y_given_s(eye + mn * mn.adjoint());

  const CounterRng rng(seed, 0x6d63ULL);
  const auto ns = static_cast<std::uint64_t>(ms.cols());
  const auto nn = static_cast<std::uint64_t>(mn.cols());
  const auto du = static_cast<std::uint64_t>(d);
  const std::uint64_t stride = ns + nn + du;
  double sum = 0.0, sum_sq = 0.0;
  Eigen::VectorXcd s(ms.cols()), q(mn.cols()), w(d);
  for (int k = 0; k < n_samples; ++k) {
    const std::uint64_t base = static_cast<std::uint64_t>(k) * stride;
    for (std::uint64_t i = 0; i < ns; ++i) s(static_cast<Eigen::Index>(i)) = rng.complex_normal(base + i);
    for (std::uint64_t i = 0; i < nn; ++i) q(static_cast<Eigen::Index>(i)) = rng.complex_normal(base + ns + i);
    for (std::uint64_t i = 0; i < du; ++i) w(static_cast<Eigen::Index>(i)) = rng.complex_normal(base + ns + nn + i);
    const Eigen::VectorXcd clean = ms * s;
    const Eigen::VectorXcd y = clean + mn * q + w;
    const double v = (p_y_given_s.log_pdf(y - clean) - p_y.log_pdf(y)) / std::numbers::ln2;
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  MiResult r;
  r.bits = mean;
  r.standard_error = std::sqrt(var / n);
  r.power = power.total_power;
  r.conditioning = "Monte-Carlo I(" + join(secret) + "; y_" + to_string(node) + ", CSI)";
  return r;
}

SymmetryReport check_output_symmetry(const Topology& topology, int n_trials, std::uint64_t seed,
                                     const SymmetryOptions& options) {
  if (n_trials < 2) throw LabError(ErrorCode::BadArgument, "need at least two channel draws");
  if (options.slots < 1) throw LabError(ErrorCode::BadArgument, "need at least one slot");
  const int n_tx = topology.n_tx;
  const int slots = options.slots;

  // Per-slot input covariance with unit total power.
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n_tx, n_tx);
  if (options.input == SymmetryInput::White) {
    q = Eigen::MatrixXcd::Identity(n_tx, n_tx) / static_cast<double>(n_tx);
  } else if (options.input == SymmetryInput::Correlated) {
    Eigen::MatrixXcd a(n_tx, n_tx);
    for (int i = 0; i < n_tx; ++i)
      for (int j = 0; j < n_tx; ++j) a(i, j) = Complex(1.0 / (1 + i + j), 0.25 * (i - j));
    q = a * a.adjoint();
    q /= q.trace().real();
  }
  const Node observer = topology.has_eavesdropper ? Node::Eve : Node::Rx2;
  const int draws = n_trials * slots;
  const auto actual = sample_channel(topology, draws, seed);
  const auto twin = options.twin_equals_actual ? actual : sample_channel(topology, draws, seed ^ 0x7477696eULL);

  // h(z | channels) for independent slots is a sum of per-slot log2(pi e (1 + g Q g^H)).
  const auto entropy = [&](const ChannelRealization& r, int trial) {
    double h = 0.0;
    for (int t = 0; t < slots; ++t) {
      const auto& g = r.row(observer, trial * slots + t);
      const double var = 1.0 + (g * q * g.adjoint())(0, 0).real();
      h += std::log2(std::numbers::pi * std::numbers::e * var);
    }
    return h;
  };
  double sa = 0, sa2 = 0, st = 0, st2 = 0;
  for (int k = 0; k < n_trials; ++k) {
    const double a = entropy(actual, k);
    const double b = entropy(twin, k);
    sa += a;
    sa2 += a * a;
    st += b;
    st2 += b * b;
  }
  const double n = n_trials;
  SymmetryReport rep;
  rep.entropy_actual = sa / n;
  rep.entropy_twin = st / n;
  rep.abs_gap = std::abs(rep.entropy_actual - rep.entropy_twin);
  const double va = std::max(0.0, (sa2 - n * rep.entropy_actual * rep.entropy_actual) / (n - 1));
  const double vt = std::max(0.0, (st2 - n * rep.entropy_twin * rep.entropy_twin) / (n - 1));
  rep.standard_error = std::sqrt(va / n + vt / n);
  return rep;
}

}  // namespace sdof
