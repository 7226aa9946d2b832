#include "sdof/precoding.hpp"

#include "sdof/error.hpp"

#include <algorithm>
#include <cmath>

namespace sdof {

namespace {

void canonical_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  if (vmax == 0.0) return;
  Eigen::Index k = 0;
  while (std::abs(v(k)) < vmax * (1.0 - 1e-12)) ++k;
  v *= std::conj(v(k)) / std::abs(v(k));
  v(k) = Complex(std::abs(v(k)), 0.0);
}

Eigen::MatrixXcd stack(const std::vector<Eigen::RowVectorXcd>& rows, int dim) {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) throw LabError(ErrorCode::BadArgument, "row length does not match dimension");
    m.row(static_cast<Eigen::Index>(i)) = rows[i];
  }
  return m;
}

}  // namespace

Eigen::MatrixXcd null_basis(const std::vector<Eigen::RowVectorXcd>& rows, int dim, bool* degenerate) {
  if (dim < 1) throw LabError(ErrorCode::BadArgument, "dimension must be positive");
  if (static_cast<int>(rows.size()) >= dim)
    throw LabError(ErrorCode::OverConstrained,
                   std::to_string(rows.size()) + " constraints leave no nullspace in dimension " + std::to_string(dim));
  if (degenerate) *degenerate = false;
  if (rows.empty()) return Eigen::MatrixXcd::Identity(dim, dim);

  const Eigen::MatrixXcd r = stack(rows, dim);
  // Columns of Q past the rank of R^H span the orthogonal complement of the row space.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(r.adjoint());
  qr.setThreshold(1e-12);
  const auto rank = qr.rank();
  if (degenerate) *degenerate = rank < r.rows();
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd basis = q.rightCols(dim - rank);
  for (Eigen::Index j = 0; j < basis.cols(); ++j) canonical_phase(basis.col(j));
  return basis;
}

Beamformer null_vector(const std::vector<Eigen::RowVectorXcd>& rows, int dim) {
  Beamformer b;
  b.constraints = rows;
  b.vector = null_basis(rows, dim, &b.degenerate_rows).col(0);
  b.vector.normalize();
  canonical_phase(b.vector);
  return b;
}

int numerical_rank(const Eigen::MatrixXcd& m, double rel_tol, double abs_floor) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  const double tol = std::max(rel_tol * sv(0), abs_floor);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

int SymbolTable::add(const std::string& name, SymbolKind kind, Owner owner) {
  if (index_.count(name)) throw LabError(ErrorCode::BadArgument, "duplicate symbol '" + name + "'");
  const int i = size();
  symbols_.push_back({name, kind, kind == SymbolKind::Noise ? Owner::None : owner});
  index_[name] = i;
  return i;
}

int SymbolTable::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw LabError(ErrorCode::UnknownSymbolId, "no symbol '" + name + "'");
  return it->second;
}

Owner owner_of(Node n) {
  switch (n) {
    case Node::Rx1: return Owner::Rx1;
    case Node::Rx2: return Owner::Rx2;
    case Node::Eve: return Owner::None;
  }
  return Owner::None;
}

std::vector<std::string> SymbolTable::intended(Node n) const {
  std::vector<std::string> out;
  if (n == Node::Eve) return out;
  for (const auto& s : symbols_)
    if (s.kind == SymbolKind::Message && (s.owner == owner_of(n) || s.owner == Owner::Common)) out.push_back(s.name);
  return out;
}

std::vector<std::string> SymbolTable::messages() const {
  std::vector<std::string> out;
  for (const auto& s : symbols_)
    if (s.kind == SymbolKind::Message) out.push_back(s.name);
  return out;
}

std::vector<std::string> SymbolTable::noise() const {
  std::vector<std::string> out;
  for (const auto& s : symbols_)
    if (s.kind == SymbolKind::Noise) out.push_back(s.name);
  return out;
}

std::vector<std::string> SymbolTable::owned_by(Owner o) const {
  std::vector<std::string> out;
  for (const auto& s : symbols_)
    if (s.kind == SymbolKind::Message && s.owner == o) out.push_back(s.name);
  return out;
}

double TransmissionTrace::slot_power(int t) const {
  return power * slot_gain.at(static_cast<std::size_t>(t)).squaredNorm();
}

const NodeSystem& EffectiveLinearSystem::node(Node n) const {
  auto it = nodes.find(n);
  if (it == nodes.end()) throw LabError(ErrorCode::BadArgument, "node " + to_string(n) + " not in system");
  return it->second;
}

std::vector<int> EffectiveLinearSystem::columns(const std::vector<std::string>& names) const {
  std::vector<int> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(symbols.index(n));
  return out;
}

Eigen::MatrixXcd EffectiveLinearSystem::block(Node n, const std::vector<int>& cols) const {
  const auto& g = node(n).gain;
  Eigen::MatrixXcd out(g.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = g.col(cols[j]);
  return out;
}

EffectiveLinearSystem assemble_effective_system(const TransmissionTrace& trace) {
  if (!trace.complete())
    throw LabError(ErrorCode::IncompleteTrace, std::to_string(trace.executed_slots) + " of " +
                                                   std::to_string(trace.planned_slots) + " slots executed");
  EffectiveLinearSystem sys;
  sys.symbols = trace.symbols;
  sys.topology = trace.topology;
  sys.n_slots = trace.executed_slots;
  const int n_sym = trace.symbols.size();
  const double amp = std::sqrt(trace.power);
  double worst = 0.0;

  for (Node n : trace.topology.nodes()) {
    NodeSystem ns;
    ns.gain.resize(sys.n_slots, n_sym);
    ns.observed.resize(sys.n_slots);
    for (int t = 0; t < sys.n_slots; ++t) {
      ns.gain.row(t) = trace.realization.row(n, t) * trace.slot_gain[static_cast<std::size_t>(t)];
      ns.slot_of_row.push_back(t);
      ns.observed(t) = trace.observations.at(n).at(static_cast<std::size_t>(t));
    }
    std::set<int> prot;
    if (auto it = trace.protected_symbols.find(n); it != trace.protected_symbols.end())
      for (const auto& s : it->second) prot.insert(trace.symbols.index(s));
    for (int j = 0; j < n_sym; ++j) {
      if (prot.count(j))
        ns.a_cols.push_back(j);
      else if (trace.symbols.at(j).kind == SymbolKind::Message)
        ns.b_cols.push_back(j);
      else
        ns.c_cols.push_back(j);
    }
    if (sys.n_slots > 0 && n_sym > 0) {
      Eigen::VectorXcd noiseless = ns.observed;
      for (int t = 0; t < sys.n_slots; ++t) noiseless(t) -= trace.noise.at(n).at(static_cast<std::size_t>(t));
      const Eigen::VectorXcd re = amp * ns.gain * trace.symbol_values;
      const double scale = std::max(noiseless.norm(), amp * ns.gain.norm() * trace.symbol_values.norm());
      if (scale > 0) worst = std::max(worst, (re - noiseless).norm() / scale);
    }
    sys.nodes[n] = std::move(ns);
  }
  sys.reconstruction_residual = worst;
  return sys;
}

bool identifiability_check(const EffectiveLinearSystem& system, Node node, const std::vector<std::string>& targets,
                           const std::vector<std::string>& known) {
  const auto t_cols = system.columns(targets);
  const auto k_cols = system.columns(known);
  for (int t : t_cols)
    if (std::find(k_cols.begin(), k_cols.end(), t) != k_cols.end())
      throw LabError(ErrorCode::BadArgument, "targets and known symbols overlap");
  if (t_cols.empty()) return true;

  std::vector<int> nuis;
  for (int j = 0; j < system.symbols.size(); ++j)
    if (std::find(t_cols.begin(), t_cols.end(), j) == t_cols.end() &&
        std::find(k_cols.begin(), k_cols.end(), j) == k_cols.end())
      nuis.push_back(j);

  std::vector<int> all = t_cols;
  all.insert(all.end(), nuis.begin(), nuis.end());
  const Eigen::MatrixXcd m_all = system.block(node, all);
  const Eigen::MatrixXcd m_nuis = system.block(node, nuis);
  if (m_all.size() == 0) return false;
  // One absolute tolerance for both ranks so they are measured on the same scale.
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m_all);
  const double tol = std::max(1e-8 * svd.singularValues()(0), 1e-10);
  const int r_all = numerical_rank(m_all, 0.0, tol);
  const int r_nuis = numerical_rank(m_nuis, 0.0, tol);
  return r_all - r_nuis == static_cast<int>(t_cols.size());
}

std::vector<std::string> identifiable_symbols(const EffectiveLinearSystem& system, Node node,
                                              const std::vector<std::string>& candidates,
                                              const std::vector<std::string>& known) {
  const auto k_cols = system.columns(known);
  std::vector<int> cols;
  for (int j = 0; j < system.symbols.size(); ++j)
    if (std::find(k_cols.begin(), k_cols.end(), j) == k_cols.end()) cols.push_back(j);
  std::vector<std::string> out;
  const Eigen::MatrixXcd m = system.block(node, cols);
  if (m.size() == 0) return out;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double tol = std::max(1e-8 * sv(0), 1e-10);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  const Eigen::MatrixXcd vr = svd.matrixV().leftCols(r);
  for (const auto& c : candidates) {
    const int j = system.symbols.index(c);
    const auto pos = std::find(cols.begin(), cols.end(), j);
    if (pos == cols.end()) throw LabError(ErrorCode::BadArgument, "candidate '" + c + "' is also known");
    // Squared norm of the projection of e_j onto the row space.
    const double in_rowspace = vr.row(pos - cols.begin()).squaredNorm();
    if (in_rowspace > 1.0 - 1e-6) out.push_back(c);
  }
  return out;
}

}  // namespace sdof
