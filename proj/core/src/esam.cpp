#include "vectormaton/esam.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace vectormaton {

namespace {

void insert_sorted(std::vector<VectorId>& ids, VectorId id) {
  if (ids.empty() || ids.back() < id) {
    ids.push_back(id);
    return;
  }
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) ids.insert(it, id);
}

}  // namespace

std::optional<StateId> EsamState::next(std::uint8_t c) const noexcept {
  auto it = std::lower_bound(transitions.begin(), transitions.end(), c,
                             [](const auto& t, std::uint8_t sym) { return t.first < sym; });
  if (it == transitions.end() || it->first != c) return std::nullopt;
  return it->second;
}

Esam::Esam() { states_.emplace_back(); }

StateId Esam::new_state(std::uint32_t max_len) {
  states_.emplace_back();
  states_.back().max_len = max_len;
  return static_cast<StateId>(states_.size() - 1);
}

StateId Esam::clone_state(StateId src, std::uint32_t max_len) {
  EsamState copy = states_[src];
  copy.max_len = max_len;
  states_.push_back(std::move(copy));
  return static_cast<StateId>(states_.size() - 1);
}

void Esam::set_transition(StateId from, std::uint8_t c, StateId to) {
  auto& tr = states_[from].transitions;
  auto it = std::lower_bound(tr.begin(), tr.end(), c,
                             [](const auto& t, std::uint8_t sym) { return t.first < sym; });
  if (it != tr.end() && it->first == c) {
    it->second = to;
  } else {
    tr.insert(it, {c, to});
  }
}

StateId Esam::split(StateId p, std::uint8_t c, StateId q, ExtendEvent& ev) {
  const StateId copy = clone_state(q, states_[p].max_len + 1);
  ev.cloned = std::make_pair(q, copy);
  std::optional<StateId> walk = p;
  while (walk && states_[*walk].next(c) == q) {
    set_transition(*walk, c, copy);
    ev.redirected.push_back(*walk);
    walk = states_[*walk].suffix_link;
  }
  states_[q].suffix_link = copy;
  return copy;
}

void Esam::begin_sequence(VectorId id) {
  if (id == 0) throw std::invalid_argument("esam: sequence id must be >= 1");
  if (id < added_.size() && added_[id]) {
    throw std::invalid_argument("esam: sequence id " + std::to_string(id) + " already added");
  }
  if (id >= added_.size()) added_.resize(static_cast<std::size_t>(id) + 1, false);
  added_[id] = true;
  current_ = id;
  last_ = kRoot;
  ++sequence_count_;
}

ExtendEvent Esam::extend(std::uint8_t c) {
  ExtendEvent ev;
  ++total_length_;
  const StateId last = last_;

  // Multi-sequence fast path: the class for last+c already exists.
  if (auto q = states_[last].next(c)) {
    if (states_[*q].max_len == states_[last].max_len + 1) {
      last_ = *q;
    } else {
      last_ = split(last, c, *q, ev);
    }
    return ev;
  }

  const StateId cur = new_state(states_[last].max_len + 1);
  ev.created = cur;
  std::optional<StateId> p = last;
  while (p && !states_[*p].next(c)) {
    set_transition(*p, c, cur);
    p = states_[*p].suffix_link;
  }
  if (!p) {
    states_[cur].suffix_link = kRoot;
  } else {
    const StateId q = *states_[*p].next(c);
    if (states_[q].max_len == states_[*p].max_len + 1) {
      states_[cur].suffix_link = q;
    } else {
      states_[cur].suffix_link = split(*p, c, q, ev);
    }
  }
  last_ = cur;
  return ev;
}

std::vector<StateId> Esam::propagate_id() {
  std::vector<StateId> touched;
  std::optional<StateId> u = last_;
  while (u && states_[*u].last_mark != current_) {
    auto& st = states_[*u];
    insert_sorted(st.ids, current_);
    st.last_mark = current_;
    touched.push_back(*u);
    u = st.suffix_link;
  }
  return touched;
}

void Esam::add_sequence(VectorId id, std::string_view s) {
  begin_sequence(id);
  if (s.empty()) {
    propagate_id();
    return;
  }
  for (char ch : s) {
    extend(static_cast<std::uint8_t>(ch));
    propagate_id();
  }
}

std::optional<StateId> Esam::locate(std::string_view p) const noexcept {
  StateId cur = kRoot;
  for (char ch : p) {
    auto next = states_[cur].next(static_cast<std::uint8_t>(ch));
    if (!next) return std::nullopt;
    cur = *next;
  }
  return cur;
}

std::size_t Esam::transition_count() const noexcept {
  return std::accumulate(states_.begin(), states_.end(), std::size_t{0},
                         [](std::size_t acc, const EsamState& s) { return acc + s.transitions.size(); });
}

std::size_t Esam::total_id_count() const noexcept {
  return std::accumulate(states_.begin(), states_.end(), std::size_t{0},
                         [](std::size_t acc, const EsamState& s) { return acc + s.ids.size(); });
}

std::vector<StateId> Esam::reverse_topological_order() const {
  std::vector<StateId> order(states_.size());
  std::iota(order.begin(), order.end(), StateId{0});
  std::stable_sort(order.begin(), order.end(), [this](StateId a, StateId b) {
    return states_[a].max_len > states_[b].max_len;
  });
  return order;
}

void Esam::serialize(io::ByteWriter& out) const {
  out.put_varint(states_.size());
  for (const auto& st : states_) {
    out.put_varint(st.max_len);
    out.put_varint(st.suffix_link ? std::uint64_t{*st.suffix_link} + 1 : 0);
    out.put_varint(st.transitions.size());
    for (const auto& [sym, target] : st.transitions) {
      out.put_u8(sym);
      out.put_varint(target);
    }
    out.put_sorted_ids(st.ids);
  }
  out.put_varint(sequence_count_);
  out.put_varint(total_length_);
}

Esam Esam::deserialize(io::ByteReader& in) {
  const std::uint64_t count = in.get_varint();
  if (count == 0 || count > std::numeric_limits<StateId>::max()) {
    throw FormatError("esam: invalid state count " + std::to_string(count));
  }
  Esam a;
  a.states_.clear();
  a.states_.resize(count);
  for (auto& st : a.states_) {
    const auto len = in.get_varint();
    if (len > std::numeric_limits<std::uint32_t>::max()) throw FormatError("esam: bad max_len");
    st.max_len = static_cast<std::uint32_t>(len);
    const auto link = in.get_varint();
    if (link > count) throw FormatError("esam: suffix link out of range");
    if (link != 0) st.suffix_link = static_cast<StateId>(link - 1);
    const auto ntr = in.get_varint();
    if (ntr > 256) throw FormatError("esam: too many transitions");
    st.transitions.reserve(ntr);
    for (std::uint64_t i = 0; i < ntr; ++i) {
      const std::uint8_t sym = in.get_u8();
      const auto target = in.get_varint();
      if (target >= count) throw FormatError("esam: transition target out of range");
      if (!st.transitions.empty() && st.transitions.back().first >= sym) {
        throw FormatError("esam: transitions not sorted");
      }
      st.transitions.emplace_back(sym, static_cast<StateId>(target));
    }
    st.ids = in.get_sorted_ids();
  }
  if (a.states_[kRoot].suffix_link || a.states_[kRoot].max_len != 0) {
    throw FormatError("esam: malformed root state");
  }
  a.sequence_count_ = in.get_varint();
  a.total_length_ = in.get_varint();
  for (VectorId id : a.states_[kRoot].ids) {
    if (id >= a.added_.size()) a.added_.resize(static_cast<std::size_t>(id) + 1, false);
    a.added_[id] = true;
  }
  return a;
}

}  // namespace vectormaton
