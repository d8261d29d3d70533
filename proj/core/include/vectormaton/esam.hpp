#pragma once

// Enhanced generalized suffix automaton. Each state is one equivalence class
// of patterns (patterns with identical occurrence sets) over a collection of
// byte sequences, and records the ids of the sequences that contain them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "vectormaton/core.hpp"
#include "vectormaton/serialize.hpp"

namespace vectormaton {

using StateId = std::uint32_t;

struct EsamState {
  /// Length of the longest pattern in the class.
  std::uint32_t max_len = 0;
  /// Absent only at the root.
  std::optional<StateId> suffix_link;
  /// Sorted by symbol.
  std::vector<std::pair<std::uint8_t, StateId>> transitions;
  /// Sorted ids of the sequences containing this class's patterns.
  std::vector<VectorId> ids;
  /// Last sequence id propagated here; stops repeated walks for one sequence.
  VectorId last_mark = 0;

  std::optional<StateId> next(std::uint8_t c) const noexcept;

  friend bool operator==(const EsamState& a, const EsamState& b) {
    return a.max_len == b.max_len && a.suffix_link == b.suffix_link &&
           a.transitions == b.transitions && a.ids == b.ids;
  }
};

/// Structural changes made by one extend step. Consumers that attach data to
/// states (the vector index) replay these to keep their per-state data aligned.
struct ExtendEvent {
  /// Fresh state with an empty occurrence set before propagation.
  std::optional<StateId> created;
  /// (original, copy) when a class was split.
  std::optional<std::pair<StateId, StateId>> cloned;
  /// States whose transition was moved from the original to the copy.
  std::vector<StateId> redirected;
};

class Esam {
 public:
  static constexpr StateId kRoot = 0;

  Esam();

  /// Adds one sequence: resets the active state to the root, then extends and
  /// propagates `id` per symbol. Empty sequences record `id` at the root only.
  /// Throws std::invalid_argument when `id` is 0 or was already added.
  void add_sequence(VectorId id, std::string_view s);

  /// Starts a new sequence without consuming symbols.
  void begin_sequence(VectorId id);
  /// Appends symbol c to the sequence currently being added.
  ExtendEvent extend(std::uint8_t c);
  /// Adds the current sequence id along the suffix-link chain of the active
  /// state. Returns the states that gained the id, nearest first.
  std::vector<StateId> propagate_id();

  /// State reached by reading p from the root; root for empty p.
  std::optional<StateId> locate(std::string_view p) const noexcept;

  const EsamState& state(StateId s) const { return states_.at(s); }
  const std::vector<EsamState>& states() const noexcept { return states_; }
  std::size_t state_count() const noexcept { return states_.size(); }
  std::size_t transition_count() const noexcept;
  std::size_t total_id_count() const noexcept;
  /// Number of sequences added so far.
  std::size_t sequence_count() const noexcept { return sequence_count_; }
  /// Sum of added sequence lengths.
  std::size_t total_length() const noexcept { return total_length_; }

  /// States ordered by decreasing max_len, ties by ascending id. Every
  /// transition goes from a later to an earlier state in this order.
  std::vector<StateId> reverse_topological_order() const;

  void serialize(io::ByteWriter& out) const;
  static Esam deserialize(io::ByteReader& in);

  friend bool operator==(const Esam& a, const Esam& b) { return a.states_ == b.states_; }

 private:
  StateId new_state(std::uint32_t max_len);
  StateId clone_state(StateId src, std::uint32_t max_len);
  void set_transition(StateId from, std::uint8_t c, StateId to);
  /// Splits q for the extension from p; returns the copy.
  StateId split(StateId p, std::uint8_t c, StateId q, ExtendEvent& ev);

  std::vector<EsamState> states_;
  StateId last_ = kRoot;
  VectorId current_ = 0;
  std::size_t sequence_count_ = 0;
  std::size_t total_length_ = 0;
  std::vector<bool> added_;
};

}  // namespace vectormaton
