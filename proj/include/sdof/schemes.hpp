#pragma once

#include "sdof/model.hpp"
#include "sdof/precoding.hpp"
#include "sdof/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sdof {

enum class SchemeId : std::uint8_t {
  WT_PP,
  WT_DP,
  WT_PD,
  WT_DD_23,
  MR_PPD,
  MR_PDP,
  MR_DDP,
  MR_PDD,
  MR_S30_29_A,
  MR_S30_29_B,
  SUB_PD_DP_UNICAST,
  SUB_SECURE_MULTICAST,
  BC_PP_S2,
  BC_DD_S1,
  BC_S1_43,
  BC_S2_43,
};

const std::vector<SchemeId>& all_scheme_ids();
/// Stable lower-snake CLI name, e.g. "mr_s30_29_a".
std::string to_string(SchemeId id);
SchemeId parse_scheme_id(const std::string& name);  // throws UnknownScheme

/// Channel row of a node at a slot (0-based).
struct ChannelRef {
  Node node;
  int slot;
};

/// A node's noiseless observation at an earlier slot, optionally with some
/// of that slot's streams removed (the transmitter knows what it sent).
struct ObsRef {
  Node node;
  int slot;
  std::vector<int> exclude_streams;
};

struct Term {
  bool is_symbol = true;
  std::string symbol;
  ObsRef obs{Node::Rx1, 0, {}};
  Complex coeff{1.0, 0.0};
};

/// Linear combination of symbols and reconstructed past observations.
struct Quantity {
  std::vector<Term> terms;

  static Quantity symbol(const std::string& name);
  static Quantity observation(Node node, int slot, std::vector<int> exclude_streams = {});
  Quantity operator+(const Quantity& o) const;
};

struct BeamRule {
  enum class Kind : std::uint8_t { Axis, Null };
  Kind kind = Kind::Axis;
  int axis = 0;
  std::vector<ChannelRef> null_of;
  int column = 0;  // which nullspace basis column

  static BeamRule along(int axis);
  static BeamRule null(std::vector<ChannelRef> rows, int column = 0);
};

struct Stream {
  Quantity payload;
  BeamRule beam;
};

struct SlotPlan {
  StateLabel state;
  std::vector<Stream> streams;
};

/// Node that must be able to invert for `targets` after cancelling `known`.
struct DecodeTask {
  Node node;
  std::vector<std::string> targets;
  std::vector<std::string> known;
};

/// Node that must not recover any protected symbol, given what it knows.
struct AdversaryTask {
  Node node;
  std::vector<std::string> protected_symbols;
  std::vector<std::string> known;
};

struct AccountingReport {
  Rational slots_total = 0;
  std::map<Node, int> symbols_per_receiver;
  std::map<Node, Rational> nominal_sdof;
  std::map<std::string, Rational> sub_dof_assumptions;
};

enum class SubProtocol : std::uint8_t { Tjsp53, Fallback32 };

std::string to_string(SubProtocol s);
SubProtocol parse_sub_protocol(const std::string& s);  // throws BadParams

struct SchemeParams {
  SubProtocol sub = SubProtocol::Tjsp53;
  /// Number of phase-A blocks in the 30/29 superframe.
  std::optional<int> multiplier;
  /// Number of common-symbol pairs per secure multicast batch.
  std::optional<int> batch;
};

struct SchemeSpec {
  SchemeId id = SchemeId::WT_PP;
  SchemeParams params;
  Topology topology;
  std::vector<SlotPlan> slots;
  SymbolTable symbols;
  std::vector<DecodeTask> decoders;
  std::vector<AdversaryTask> adversaries;
  AccountingReport nominal;

  int n_slots() const { return static_cast<int>(slots.size()); }
  std::vector<std::string> message_symbols(Node n) const { return symbols.intended(n); }
  std::vector<std::string> noise_symbols() const { return symbols.noise(); }
};

SchemeSpec build_scheme(SchemeId id, const SchemeParams& params = {});

/// Executes the slot program. Throws CsitViolation if any recipe reads CSI
/// outside its slot's information set, RealizationTooShort otherwise.
TransmissionTrace run_scheme(const SchemeSpec& spec, const ChannelRealization& realization, const PowerBudget& power,
                             RunMode mode, std::uint64_t seed);

struct NodeDecode {
  Node node;
  std::vector<std::string> targets;
  Eigen::VectorXcd recovered;
  double residual = 0.0;
  bool success = true;
};

struct AdversaryOutcome {
  Node node;
  std::vector<std::string> identifiable;  // protected symbols the node could recover
  bool secure = true;
};

struct DecodeReport {
  std::vector<NodeDecode> receivers;
  std::vector<AdversaryOutcome> adversaries;

  bool success() const;
  bool secure() const;
  double max_residual() const;
};

inline constexpr double kDecodeTolerance = 1e-8;

/// Cancel known side information, project away nuisance directions, invert.
DecodeReport decode(const TransmissionTrace& trace);

/// Runs one decode task against the trace.
NodeDecode decode_one(const TransmissionTrace& trace, const DecodeTask& task);

AccountingReport accounting(const SchemeSpec& spec);

/// Superframe prediction from the sub-protocol rate: the common message
/// travels at 2/(2 + 2/sub_dof) and each receiver gets
/// phaseA_symbols / (phaseA_slots + 2/sub_dof + 1/sdof_common).
AccountingReport composite_accounting(const Rational& sub_dof, int phaseA_symbols = 3, int phaseA_slots = 3);

/// Samples a fresh realization sized for the spec and runs it.
TransmissionTrace run_with_seed(const SchemeSpec& spec, std::uint64_t seed, double power,
                                RunMode mode = RunMode::Noiseless);

/// Theorem whose region should contain the scheme's nominal point, with the
/// schedule it realizes; nullopt for building blocks with no theorem.
struct TheoremBinding {
  std::string theorem;
  StateSchedule schedule;
};
std::optional<TheoremBinding> theorem_for(const SchemeSpec& spec);

}  // namespace sdof
