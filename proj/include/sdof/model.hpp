#pragma once

#include "sdof/rational.hpp"

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sdof {

/// CSIT quality of one node in one slot: perfect/instantaneous or unit-delayed.
enum class Csit : std::uint8_t { P = 0, D = 1 };

char to_char(Csit c);
Csit parse_csit(char c);

/// Joint CSIT state, one entry per node in topology order
/// (S1 S2 for broadcast and wiretap, S1 S2 S3 for the multi-receiver channel).
struct StateLabel {
  std::vector<Csit> per_node;

  StateLabel() = default;
  explicit StateLabel(std::vector<Csit> s) : per_node(std::move(s)) {}

  static StateLabel parse(const std::string& text);
  std::string str() const;
  std::size_t arity() const { return per_node.size(); }
  Csit operator[](std::size_t i) const { return per_node.at(i); }

  auto operator<=>(const StateLabel&) const = default;
  bool operator==(const StateLabel&) const = default;
};

enum class Node : std::uint8_t { Rx1 = 0, Rx2 = 1, Eve = 2 };

std::string to_string(Node n);

enum class TopologyKind : std::uint8_t { Wiretap, MultiReceiver, Broadcast };

/// Antenna configuration. Wiretap is (3,1,1): receiver 1 and an eavesdropper.
/// MultiReceiver is (3,1,1,1). Broadcast is (2,1,1) where each receiver
/// eavesdrops on the other's message.
struct Topology {
  TopologyKind kind = TopologyKind::MultiReceiver;
  int n_tx = 3;
  int receivers = 2;
  bool has_eavesdropper = true;

  static Topology wiretap();
  static Topology multi_receiver();
  static Topology broadcast();

  std::size_t label_arity() const { return kind == TopologyKind::MultiReceiver ? 3 : 2; }
  std::vector<Node> nodes() const;
  bool has_node(Node n) const;
  /// Position of the node's entry in a StateLabel.
  std::size_t state_index(Node n) const;

  bool operator==(const Topology&) const = default;
};

std::string to_string(TopologyKind k);

class StateSchedule {
 public:
  const std::map<StateLabel, Rational>& fractions() const { return fractions_; }
  bool symmetric() const { return symmetric_; }
  std::size_t arity() const { return arity_; }
  /// Zero for labels absent from the map.
  Rational fraction(const StateLabel& label) const;
  Rational fraction(const std::string& label) const { return fraction(StateLabel::parse(label)); }

 private:
  friend StateSchedule validate_schedule(const std::map<StateLabel, Rational>&, bool);
  std::map<StateLabel, Rational> fractions_;
  bool symmetric_ = false;
  std::size_t arity_ = 0;
};

/// Accepts iff every fraction is nonnegative, they sum to exactly one, all
/// labels share one arity and, with symmetry on, lambda_PDD == lambda_DPD
/// (arity 3) or lambda_PD == lambda_DP (arity 2).
StateSchedule validate_schedule(const std::map<StateLabel, Rational>& fractions, bool symmetry_mode);

/// Convenience: {"PD": "1/2", ...}.
StateSchedule make_schedule(const std::map<std::string, Rational>& fractions, bool symmetry_mode = false);

/// Materializes the fractions on a block of n_slots. Labels are interleaved
/// by smooth weighted round-robin, ties broken by label order (P before D),
/// so equal fractions alternate.
std::vector<StateLabel> schedule_to_slot_states(const StateSchedule& schedule, int n_slots);

struct ChannelRealization {
  Topology topology;
  int n_slots = 0;
  std::uint64_t seed = 0;
  std::vector<Eigen::RowVectorXcd> h;        // receiver 1
  std::vector<Eigen::RowVectorXcd> h_acute;  // receiver 2 (multi-receiver only)
  std::vector<Eigen::RowVectorXcd> g;        // eavesdropper, or receiver 2 in broadcast

  const Eigen::RowVectorXcd& row(Node n, int slot) const;
  /// Stacked rows of all nodes present in the topology.
  Eigen::MatrixXcd state_matrix(int slot) const;

  bool operator==(const ChannelRealization& o) const;
};

struct SamplerOptions {
  double max_condition = 1e6;
  int max_attempts = 100;
};

/// I.i.d. unit-variance circularly-symmetric complex Gaussian entries; a slot
/// is redrawn until its state matrix has full row rank and condition number
/// at most max_condition. Deterministic in seed.
ChannelRealization sample_channel(const Topology& topology, int n_slots, std::uint64_t seed,
                                  const SamplerOptions& options = {});

double condition_number(const Eigen::MatrixXcd& m);

enum class SplitPolicy : std::uint8_t { EqualPerStream };

struct PowerBudget {
  double total_power = 1.0;
  SplitPolicy split = SplitPolicy::EqualPerStream;

  explicit PowerBudget(double p = 1.0, SplitPolicy s = SplitPolicy::EqualPerStream);
};

}  // namespace sdof
