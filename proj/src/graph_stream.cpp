#include "rankshift/graph_stream.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace rankshift {

namespace {

std::vector<SparseEntry> merge_difference(const std::vector<SparseEntry>& after,
                                          const std::vector<SparseEntry>& before) {
  std::vector<SparseEntry> out;
  out.reserve(after.size() + before.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < after.size() || j < before.size()) {
    if (j == before.size() || (i < after.size() && after[i].row < before[j].row)) {
      out.push_back(after[i++]);
    } else if (i == after.size() || before[j].row < after[i].row) {
      out.push_back({before[j].row, -before[j].value});
      ++j;
    } else {
      const double d = after[i].value - before[j].value;
      if (d != 0.0) {
        out.push_back({after[i].row, d});
      }
      ++i;
      ++j;
    }
  }
  return out;
}

void validate_event(const GraphState& state, const EdgeEvent& event,
                    const std::optional<double>& last_timestamp) {
  if (event.sign != 1 && event.sign != -1) {
    throw Error("edge sign must be +1 or -1");
  }
  if (event.src >= state.node_count() || event.dst >= state.node_count()) {
    throw UnknownNode("edge " + std::to_string(event.src) + " -> " + std::to_string(event.dst) +
                      " outside node universe of size " + std::to_string(state.node_count()));
  }
  if (!std::isfinite(event.timestamp)) {
    throw Error("non-finite timestamp");
  }
  if (last_timestamp && event.timestamp < *last_timestamp) {
    throw OutOfOrderTimestamp("timestamp " + std::to_string(event.timestamp) +
                              " precedes previous " + std::to_string(*last_timestamp));
  }
}

}  // namespace

double SparseColumn::l1() const {
  double s = 0.0;
  for (const auto& e : entries) {
    s += std::abs(e.value);
  }
  return s;
}

double column_l1(const SparseColumnMatrix& m) {
  double best = 0.0;
  for (const auto& col : m.columns) {
    best = std::max(best, col.l1());
  }
  return best;
}

SparseColumnMatrix subtract(const SparseColumnMatrix& lhs, const SparseColumnMatrix& rhs) {
  SparseColumnMatrix out;
  std::size_t i = 0;
  std::size_t j = 0;
  static const std::vector<SparseEntry> none;
  while (i < lhs.columns.size() || j < rhs.columns.size()) {
    NodeId col;
    const std::vector<SparseEntry>* a = &none;
    const std::vector<SparseEntry>* b = &none;
    if (j == rhs.columns.size() ||
        (i < lhs.columns.size() && lhs.columns[i].column < rhs.columns[j].column)) {
      col = lhs.columns[i].column;
      a = &lhs.columns[i++].entries;
    } else if (i == lhs.columns.size() || rhs.columns[j].column < lhs.columns[i].column) {
      col = rhs.columns[j].column;
      b = &rhs.columns[j++].entries;
    } else {
      col = lhs.columns[i].column;
      a = &lhs.columns[i++].entries;
      b = &rhs.columns[j++].entries;
    }
    auto entries = merge_difference(*a, *b);
    if (!entries.empty()) {
      out.columns.push_back({col, std::move(entries)});
    }
  }
  return out;
}

GraphState::GraphState(std::size_t node_count)
    : out_(node_count), out_weight_(node_count, 0), dangling_(node_count) {}

Weight GraphState::weight(NodeId u, NodeId v) const {
  const auto& edges = out_[u];
  auto it = std::lower_bound(edges.begin(), edges.end(), v,
                             [](const OutEdge& e, NodeId d) { return e.dst < d; });
  return (it != edges.end() && it->dst == v) ? it->weight : 0;
}

std::vector<SparseEntry> GraphState::structural_column(NodeId u) const {
  const auto& edges = out_[u];
  if (edges.empty()) {
    return {{u, 1.0}};
  }
  const double share = 1.0 / static_cast<double>(edges.size());
  std::vector<SparseEntry> col;
  col.reserve(edges.size());
  for (const auto& e : edges) {
    col.push_back({e.dst, share});
  }
  return col;
}

std::vector<SparseEntry> GraphState::weighted_column(NodeId u) const {
  const auto& edges = out_[u];
  if (edges.empty()) {
    return {{u, 1.0}};
  }
  const double total = static_cast<double>(out_weight_[u]);
  std::vector<SparseEntry> col;
  col.reserve(edges.size());
  for (const auto& e : edges) {
    col.push_back({e.dst, static_cast<double>(e.weight) / total});
  }
  return col;
}

void GraphState::add_weight(NodeId u, NodeId v, Weight delta) {
  if (delta == 0) {
    return;
  }
  auto& edges = out_[u];
  auto it = std::lower_bound(edges.begin(), edges.end(), v,
                             [](const OutEdge& e, NodeId d) { return e.dst < d; });
  const bool present = it != edges.end() && it->dst == v;
  const Weight current = present ? it->weight : 0;
  const Weight updated = current + delta;
  if (updated < 0) {
    throw DeleteNonexistentEdge("edge " + std::to_string(u) + " -> " + std::to_string(v) +
                                " has weight " + std::to_string(current));
  }
  const bool was_dangling = edges.empty();
  if (present) {
    if (updated == 0) {
      edges.erase(it);
    } else {
      it->weight = updated;
    }
  } else {
    edges.insert(it, OutEdge{v, updated});
  }
  out_weight_[u] += delta;
  total_weight_ += delta;
  if (was_dangling && !edges.empty()) {
    --dangling_;
  } else if (!was_dangling && edges.empty()) {
    ++dangling_;
  }
}

double StartVectorDelta::l1() const {
  if (total_before == 0 || total_after == 0) {
    return 0.0;
  }
  const double mb = static_cast<double>(total_before);
  const double ma = static_cast<double>(total_after);
  double s = 0.0;
  Weight shifted_before = 0;
  for (const auto& sh : shifts) {
    s += std::abs(static_cast<double>(sh.after) / ma - static_cast<double>(sh.before) / mb);
    shifted_before += sh.before;
  }
  s += static_cast<double>(total_before - shifted_before) * std::abs(1.0 / ma - 1.0 / mb);
  return s;
}

std::vector<double> StartVectorDelta::materialize(const GraphState& after) const {
  const std::size_t n = after.node_count();
  std::vector<double> out(n, 0.0);
  if (total_before == 0 || total_after == 0) {
    return out;
  }
  const double mb = static_cast<double>(total_before);
  const double ma = static_cast<double>(total_after);
  for (NodeId i = 0; i < n; ++i) {
    const double w = static_cast<double>(after.effective_out_weight(i));
    out[i] = w / ma - w / mb;
  }
  for (const auto& sh : shifts) {
    out[sh.node] = static_cast<double>(sh.after) / ma - static_cast<double>(sh.before) / mb;
  }
  return out;
}

WindowBuffer::WindowBuffer(double window_width) : width_(window_width) {
  if (!(window_width > 0.0) || !std::isfinite(window_width)) {
    throw InvalidConfig("window width must be positive");
  }
}

std::int64_t WindowBuffer::window_of(double timestamp) const {
  return static_cast<std::int64_t>(std::floor(timestamp / width_));
}

void WindowBuffer::open(std::int64_t window_index) {
  if (open_) {
    throw Error("window " + std::to_string(index_) + " is still open");
  }
  open_ = true;
  index_ = window_index;
}

Weight WindowBuffer::pending(NodeId u, NodeId v) const {
  auto it = net_.find(key(u, v));
  return it == net_.end() ? 0 : it->second;
}

void ingest_edge(const GraphState& state, const EdgeEvent& event, WindowBuffer& pending) {
  validate_event(state, event, pending.last_timestamp_);
  const std::int64_t w = pending.window_of(event.timestamp);
  if (pending.open_ && w != pending.index_) {
    throw Error("event at window " + std::to_string(w) + " while window " +
                std::to_string(pending.index_) + " is open");
  }
  if (event.sign < 0 && state.weight(event.src, event.dst) + pending.pending(event.src, event.dst) < 1) {
    throw DeleteNonexistentEdge("deletion of absent edge " + std::to_string(event.src) + " -> " +
                                std::to_string(event.dst));
  }
  if (!pending.open_) {
    pending.open(w);
  }
  pending.events_.push_back(event);
  pending.net_[WindowBuffer::key(event.src, event.dst)] += event.sign;
  pending.last_timestamp_ = event.timestamp;
}

SnapshotDelta close_window(GraphState& state, WindowBuffer& pending) {
  if (!pending.open_) {
    throw Error("no open window to close");
  }
  SnapshotDelta delta;
  delta.window_index = pending.index_;
  delta.event_count = pending.events_.size();
  delta.attack_event_count = static_cast<std::size_t>(
      std::count_if(pending.events_.begin(), pending.events_.end(),
                    [](const EdgeEvent& e) { return e.label; }));

  std::vector<std::tuple<NodeId, NodeId, Weight>> changes;
  changes.reserve(pending.net_.size());
  for (const auto& [k, d] : pending.net_) {
    if (d != 0) {
      changes.emplace_back(static_cast<NodeId>(k >> 32), static_cast<NodeId>(k & 0xffffffffu), d);
    }
  }
  std::sort(changes.begin(), changes.end());

  delta.delta_bw.total_before = state.effective_total_weight();
  std::size_t i = 0;
  while (i < changes.size()) {
    const NodeId u = std::get<0>(changes[i]);
    const auto old_s = state.structural_column(u);
    const auto old_w = state.weighted_column(u);
    const Weight old_eff = state.effective_out_weight(u);
    for (; i < changes.size() && std::get<0>(changes[i]) == u; ++i) {
      state.add_weight(u, std::get<1>(changes[i]), std::get<2>(changes[i]));
    }
    auto ds = merge_difference(state.structural_column(u), old_s);
    if (!ds.empty()) {
      delta.delta_As.columns.push_back({u, std::move(ds)});
    }
    auto dw = merge_difference(state.weighted_column(u), old_w);
    if (!dw.empty()) {
      delta.delta_Aw.columns.push_back({u, std::move(dw)});
    }
    const Weight new_eff = state.effective_out_weight(u);
    if (new_eff != old_eff) {
      delta.delta_bw.shifts.push_back({u, old_eff, new_eff});
    }
  }
  delta.delta_bw.total_after = state.effective_total_weight();

  delta.l1_dAs = column_l1(delta.delta_As);
  delta.l1_dAw = column_l1(delta.delta_Aw);
  delta.l1_dbw = delta.delta_bw.l1();

  pending.open_ = false;
  pending.events_.clear();
  pending.net_.clear();
  return delta;
}

GraphStream::GraphStream(std::size_t node_count, double window_width)
    : state_(node_count), buffer_(window_width) {}

void GraphStream::push(const EdgeEvent& event, const WindowCallback& on_window) {
  validate_event(state_, event, buffer_.last_timestamp());
  const std::int64_t w = buffer_.window_of(event.timestamp);
  if (buffer_.is_open() && w > buffer_.window_index()) {
    const std::int64_t closed = buffer_.window_index();
    on_window(close_window(state_, buffer_), state_);
    for (std::int64_t idx = closed + 1; idx < w; ++idx) {
      buffer_.open(idx);
      on_window(close_window(state_, buffer_), state_);
    }
  }
  ingest_edge(state_, event, buffer_);
}

void GraphStream::finish(const WindowCallback& on_window) {
  if (buffer_.is_open()) {
    on_window(close_window(state_, buffer_), state_);
  }
}

}  // namespace rankshift
