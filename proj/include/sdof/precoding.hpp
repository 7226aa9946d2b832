#pragma once

#include "sdof/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace sdof {

using Complex = std::complex<double>;

struct Beamformer {
  Eigen::VectorXcd vector;  // unit norm, length dim
  std::vector<Eigen::RowVectorXcd> constraints;
  bool degenerate_rows = false;
};

/// Unit vector orthogonal to every row, from a unitary factorization of the
/// stacked rows. Phase convention: the first entry of largest magnitude is
/// real and nonnegative.
Beamformer null_vector(const std::vector<Eigen::RowVectorXcd>& rows, int dim);

/// Orthonormal basis (dim x (dim - rank)) of the right nullspace of the rows,
/// each column phase-normalized like null_vector.
Eigen::MatrixXcd null_basis(const std::vector<Eigen::RowVectorXcd>& rows, int dim, bool* degenerate = nullptr);

/// Numerical rank with tolerance rel_tol * largest singular value (and an
/// absolute floor).
int numerical_rank(const Eigen::MatrixXcd& m, double rel_tol = 1e-8, double abs_floor = 1e-10);

enum class SymbolKind : std::uint8_t { Message, Noise };

/// Message owner. Common symbols are wanted by both receivers.
enum class Owner : std::uint8_t { Rx1, Rx2, Common, None };

struct SymbolInfo {
  std::string name;
  SymbolKind kind = SymbolKind::Message;
  Owner owner = Owner::None;
};

class SymbolTable {
 public:
  int add(const std::string& name, SymbolKind kind, Owner owner);
  int index(const std::string& name) const;  // throws UnknownSymbolId
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const SymbolInfo& at(int i) const { return symbols_.at(static_cast<std::size_t>(i)); }
  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<SymbolInfo>& all() const { return symbols_; }

  /// Message symbols a receiver wants (own plus common).
  std::vector<std::string> intended(Node n) const;
  std::vector<std::string> messages() const;
  std::vector<std::string> noise() const;
  std::vector<std::string> owned_by(Owner o) const;

 private:
  std::vector<SymbolInfo> symbols_;
  std::map<std::string, int> index_;
};

Owner owner_of(Node n);

enum class RunMode : std::uint8_t { Noiseless, Noisy };

struct SchemeSpec;

/// Record of one execution. All gains are stored at unit power: the
/// transmitted vector of slot t is sqrt(P) * slot_gain[t] * s.
struct TransmissionTrace {
  std::shared_ptr<const SchemeSpec> spec;
  Topology topology;
  SymbolTable symbols;
  /// Per adversarial node, the symbols its secrecy analysis protects.
  std::map<Node, std::vector<std::string>> protected_symbols;
  ChannelRealization realization;
  double power = 1.0;
  RunMode mode = RunMode::Noiseless;
  std::uint64_t seed = 0;
  int planned_slots = 0;
  int executed_slots = 0;

  Eigen::VectorXcd symbol_values;                          // unit variance draws
  std::vector<std::vector<Eigen::MatrixXcd>> stream_gain;  // [slot][stream], n_tx x symbols
  std::vector<Eigen::MatrixXcd> slot_gain;                 // [slot], n_tx x symbols
  std::vector<std::vector<Beamformer>> beams;              // [slot][stream]
  std::vector<Eigen::VectorXcd> x;                         // [slot], actual transmit vector
  std::map<Node, std::vector<Complex>> observations;       // [node][slot]
  std::map<Node, std::vector<Complex>> noise;              // [node][slot], zero when noiseless

  bool complete() const { return executed_slots == planned_slots; }
  /// Expected transmit power of slot t (trace of the input covariance).
  double slot_power(int t) const;
};

/// Per-node block view y = A s_protected + B s_other_messages + C q + n.
struct NodeSystem {
  Eigen::MatrixXcd gain;  // rows: observations, cols: every symbol (unit power)
  std::vector<int> slot_of_row;
  std::vector<int> a_cols, b_cols, c_cols;
  Eigen::VectorXcd observed;  // trace observations including noise
};

class EffectiveLinearSystem {
 public:
  SymbolTable symbols;
  Topology topology;
  int n_slots = 0;
  std::map<Node, NodeSystem> nodes;
  double reconstruction_residual = 0.0;

  const NodeSystem& node(Node n) const;
  std::vector<int> columns(const std::vector<std::string>& names) const;
  Eigen::MatrixXcd block(Node n, const std::vector<int>& cols) const;
  bool empty() const { return n_slots == 0 || symbols.size() == 0; }
};

/// Builds each node's exact gain matrix from the trace and checks that
/// noiseless re-simulation reproduces the recorded observations.
EffectiveLinearSystem assemble_effective_system(const TransmissionTrace& trace);

/// True iff the targets are linearly recoverable at the node once the known
/// symbols are cancelled: rank([A_T | N]) - rank(N) == |T|.
bool identifiability_check(const EffectiveLinearSystem& system, Node node, const std::vector<std::string>& targets,
                           const std::vector<std::string>& known);

/// Which candidates are individually identifiable. Same criterion as
/// identifiability_check with one target, from a single factorization: a
/// symbol is recoverable iff its unit vector lies in the row space.
std::vector<std::string> identifiable_symbols(const EffectiveLinearSystem& system, Node node,
                                              const std::vector<std::string>& candidates,
                                              const std::vector<std::string>& known);

}  // namespace sdof
