#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "transcoord/chart.hpp"
#include "transcoord/error.hpp"
#include "transcoord/geometry.hpp"
#include "transcoord/numeric.hpp"

namespace transcoord {

using ParticleId = std::string;

// Per-particle events, pairwise spacelike, with optional component amplitudes.
class StateTuple {
 public:
  const std::map<ParticleId, Event>& entries() const noexcept { return entries_; }
  const std::map<std::string, Complex>& amplitudes() const noexcept { return amplitudes_; }
  const Event& at(const ParticleId& id) const {
    const auto it = entries_.find(id);
    require(it != entries_.end(), ErrorCode::particle_mismatch, "no particle '" + id + "' in the state");
    return it->second;
  }
  bool has(const ParticleId& id) const { return entries_.count(id) != 0; }

 private:
  friend StateTuple make_state(std::map<ParticleId, Event>, std::map<std::string, Complex>);
  std::map<ParticleId, Event> entries_;
  std::map<std::string, Complex> amplitudes_;
};

inline StateTuple make_state(std::map<ParticleId, Event> entries, std::map<std::string, Complex> amplitudes = {}) {
  require(!entries.empty(), ErrorCode::invalid_argument, "a state needs at least one particle");
  for (auto i = entries.begin(); i != entries.end(); ++i) {
    for (auto j = std::next(i); j != entries.end(); ++j) {
      const CausalClass c = classify_relation(i->second, j->second);
      require(c == CausalClass::spacelike, ErrorCode::not_spacelike,
              "particles '" + i->first + "' and '" + j->first + "' are " + to_string(c) + " related");
    }
  }
  if (!amplitudes.empty()) {
    double total = 0.0;
    for (const auto& [label, a] : amplitudes) total += std::norm(a);
    require(std::abs(total - 1.0) <= 1e-10, ErrorCode::not_normalized, "component amplitudes must have unit norm");
  }
  StateTuple s;
  s.entries_ = std::move(entries);
  s.amplitudes_ = std::move(amplitudes);
  return s;
}

// The state with one particle advanced to new_event.
inline StateTuple successor(const StateTuple& state, const ParticleId& particle, const Event& new_event) {
  const Event& old = state.at(particle);
  require(in_closed_future(old, new_event), ErrorCode::not_successor,
          "new event is not in the forward cone of particle '" + particle + "'");
  auto entries = state.entries();
  entries.insert_or_assign(particle, new_event);
  return make_state(std::move(entries), state.amplitudes());
}

// True when every event of s2 lies in the closed forward cone of the same
// particle's event in s1.
inline bool is_successor(const StateTuple& s2, const StateTuple& s1) {
  const auto& a = s1.entries();
  const auto& b = s2.entries();
  require(a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(),
                                             [](const auto& x, const auto& y) { return x.first == y.first; }),
          ErrorCode::particle_mismatch, "states describe different particles");
  for (const auto& [id, e1] : a) {
    if (!in_closed_future(e1, b.at(id))) return false;
  }
  return true;
}

inline bool same_state(const StateTuple& s1, const StateTuple& s2) {
  if (s1.entries().size() != s2.entries().size()) return false;
  for (const auto& [id, e] : s1.entries()) {
    if (!s2.has(id) || !approx_equal(e, s2.at(id))) return false;
  }
  return true;
}

// Joint amplitude of two particles over spacelike event pairs.
struct CorrelatedState {
  ParticleId first;
  ParticleId second;
  std::function<Complex(const Event&, const Event&)> joint;
};

inline Complex evaluate_correlated(const CorrelatedState& corr, const Event& a, const Event& b) {
  require(classify_relation(a, b) == CausalClass::spacelike, ErrorCode::not_spacelike,
          "a joint amplitude needs spacelike events");
  return corr.joint(a, b);
}

inline CorrelatedState product_state(ParticleId p1, ParticleId p2, std::function<Complex(const Event&)> f1,
                                     std::function<Complex(const Event&)> f2) {
  return {std::move(p1), std::move(p2),
          [f1 = std::move(f1), f2 = std::move(f2)](const Event& a, const Event& b) { return f1(a) * f2(b); }};
}

// sum_i c_i f_i(a) g_i(b)
inline CorrelatedState entangled_state(ParticleId p1, ParticleId p2,
                                       std::vector<std::tuple<Complex, std::function<Complex(const Event&)>,
                                                              std::function<Complex(const Event&)>>>
                                           terms) {
  return {std::move(p1), std::move(p2), [terms = std::move(terms)](const Event& a, const Event& b) {
            Complex s{};
            for (const auto& [c, f, g] : terms) s += c * f(a) * g(b);
            return s;
          }};
}

// --- histories and collapse ---------------------------------------------------------

struct HistoryNode {
  ParticleId particle;
  Event event;
  std::string tag;  // component label
  std::string name;
};

enum class CollapseMode { modified, planar };

inline const char* to_string(CollapseMode m) noexcept { return m == CollapseMode::modified ? "modified" : "planar"; }

struct CollapseRecord {
  std::size_t trigger;
  std::string surviving_component;
  std::vector<std::size_t> affected;  // re-tagged nodes
  CollapseMode mode;
};

// World-line events of several particles, succession edges along each world
// line, and influence edges contributed by collapses.
class History {
 public:
  explicit History(std::set<std::string> components) : components_(std::move(components)) {}

  std::size_t add(ParticleId particle, Event event, std::string tag, std::string name = {}) {
    require(components_.count(tag) != 0, ErrorCode::unknown_component, "unknown component '" + tag + "'");
    if (name.empty()) name = particle + "#" + std::to_string(nodes_.size());
    // Link to the latest earlier event of the same particle.
    std::optional<std::size_t> prev;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      if (nodes_[i].particle == particle) {
        prev = i;
        break;
      }
    }
    if (prev) {
      require(in_closed_future(nodes_[*prev].event, event), ErrorCode::not_successor,
              "world-line event not in the forward cone of its predecessor");
    }
    nodes_.push_back({std::move(particle), std::move(event), std::move(tag), std::move(name)});
    if (prev && !approx_equal(nodes_[*prev].event, nodes_.back().event)) succession_.emplace_back(*prev, nodes_.size() - 1);
    return nodes_.size() - 1;
  }

  const std::vector<HistoryNode>& nodes() const noexcept { return nodes_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& succession() const noexcept { return succession_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& influence() const noexcept { return influence_; }
  const std::vector<CollapseRecord>& collapses() const noexcept { return collapses_; }
  const std::set<std::string>& components() const noexcept { return components_; }

  std::size_t find(const Event& e) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].event.comparable(e) && approx_equal(nodes_[i].event, e)) return i;
    fail(ErrorCode::unknown_trigger, "trigger is not on any recorded world line");
  }

  // Re-tags every node in the closed backward cone of the trigger. In the
  // modified mode influence runs from each re-tagged node to the trigger; in
  // the planar comparator it runs from the trigger to the re-tagged nodes of
  // other particles, as if the collapse were carried along a simultaneity
  // surface.
  CollapseRecord apply_collapse(const Event& trigger, const std::string& surviving,
                                CollapseMode mode = CollapseMode::modified) {
    require(components_.count(surviving) != 0, ErrorCode::unknown_component,
            "unknown component '" + surviving + "'");
    const std::size_t t = find(trigger);
    CollapseRecord rec{t, surviving, {}, mode};
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!in_closed_past(nodes_[t].event, nodes_[i].event)) continue;
      nodes_[i].tag = surviving;
      rec.affected.push_back(i);
      if (i == t) continue;
      if (mode == CollapseMode::modified) {
        influence_.emplace_back(i, t);
      } else if (nodes_[i].particle != nodes_[t].particle) {
        influence_.emplace_back(t, i);
      }
    }
    collapses_.push_back(rec);
    return rec;
  }

 private:
  std::set<std::string> components_;
  std::vector<HistoryNode> nodes_;
  std::vector<std::pair<std::size_t, std::size_t>> succession_;
  std::vector<std::pair<std::size_t, std::size_t>> influence_;
  std::vector<CollapseRecord> collapses_;
};

struct LoopCheck {
  bool acyclic;
  std::optional<std::vector<std::size_t>> witness;  // closed walk, first node repeated at the end
};

// Directed-cycle search over succession and influence edges.
inline LoopCheck causal_loop_check(const History& h) {
  const std::size_t n = h.nodes().size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b] : h.succession()) adj[a].push_back(b);
  for (const auto& [a, b] : h.influence()) adj[a].push_back(b);
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  enum class Mark { white, grey, black };
  std::vector<Mark> mark(n, Mark::white);
  std::vector<std::size_t> stack;
  std::optional<std::vector<std::size_t>> witness;
  std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
    mark[u] = Mark::grey;
    stack.push_back(u);
    for (std::size_t v : adj[u]) {
      if (mark[v] == Mark::grey) {
        const auto it = std::find(stack.begin(), stack.end(), v);
        std::vector<std::size_t> cyc(it, stack.end());
        cyc.push_back(v);
        witness = std::move(cyc);
        return true;
      }
      if (mark[v] == Mark::white && dfs(v)) return true;
    }
    stack.pop_back();
    mark[u] = Mark::black;
    return false;
  };
  for (std::size_t u = 0; u < n; ++u) {
    if (mark[u] == Mark::white && dfs(u)) return {false, witness};
  }
  return {true, std::nullopt};
}

// Graphviz text of the union graph; influence edges are dashed.
inline std::string to_dot(const History& h, const std::string& name = "history") {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (std::size_t i = 0; i < h.nodes().size(); ++i) {
    const auto& nd = h.nodes()[i];
    os << "  n" << i << " [label=\"" << nd.name << "\\n" << nd.tag << "\"];\n";
  }
  for (const auto& [a, b] : h.succession()) os << "  n" << a << " -> n" << b << ";\n";
  for (const auto& [a, b] : h.influence()) os << "  n" << a << " -> n" << b << " [style=dashed];\n";
  os << "}\n";
  return os.str();
}

}  // namespace transcoord
