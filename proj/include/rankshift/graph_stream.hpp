#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rankshift/errors.hpp"

namespace rankshift {

using NodeId = std::uint32_t;
using Weight = std::int64_t;

/// One timestamped directed edge occurrence.
struct EdgeEvent {
  double timestamp = 0.0;
  NodeId src = 0;
  NodeId dst = 0;
  int sign = +1;       // +1 insertion, -1 deletion
  bool label = false;  // ground-truth attack edge
};

struct OutEdge {
  NodeId dst;
  Weight weight;
};

struct SparseEntry {
  NodeId row;
  double value;
};

/// One column of a sparse column-indexed matrix; entries sorted by row.
struct SparseColumn {
  NodeId column = 0;
  std::vector<SparseEntry> entries;

  double l1() const;
};

/// Sparse column-indexed matrix holding only the non-empty columns, sorted by
/// column index.
struct SparseColumnMatrix {
  std::vector<SparseColumn> columns;

  bool empty() const { return columns.empty(); }
};

/// Maximum over columns of the absolute column sum; 0 for an empty matrix.
double column_l1(const SparseColumnMatrix& m);

/// Column-wise difference lhs - rhs, used to compare consecutive deltas.
SparseColumnMatrix subtract(const SparseColumnMatrix& lhs, const SparseColumnMatrix& rhs);

/// Cumulative dynamic graph with integer edge weights.
///
/// A node with no out-edges behaves as if it had a single self-loop of weight
/// one, in both the structural and the weighted transition matrix, and that
/// implicit weight also counts towards the weighted starting vector.
class GraphState {
 public:
  explicit GraphState(std::size_t node_count = 0);

  std::size_t node_count() const noexcept { return out_.size(); }

  /// m: sum of real edge weights.
  Weight total_weight() const noexcept { return total_weight_; }
  /// m_u: sum of real out-edge weights of u.
  Weight out_weight(NodeId u) const { return out_weight_[u]; }
  /// k_u: number of distinct out-neighbours of u.
  std::size_t out_degree(NodeId u) const { return out_[u].size(); }
  bool is_dangling(NodeId u) const { return out_[u].empty(); }
  std::size_t dangling_count() const noexcept { return dangling_; }

  /// Weight of u -> v, 0 when absent.
  Weight weight(NodeId u, NodeId v) const;
  std::span<const OutEdge> out_edges(NodeId u) const { return out_[u]; }

  /// m_u with the implicit self-loop counted for dangling nodes.
  Weight effective_out_weight(NodeId u) const {
    return out_weight_[u] > 0 ? out_weight_[u] : 1;
  }
  /// m with the implicit self-loops counted.
  Weight effective_total_weight() const noexcept {
    return total_weight_ + static_cast<Weight>(dangling_);
  }

  /// Column u of the transposed row-normalised structural matrix.
  std::vector<SparseEntry> structural_column(NodeId u) const;
  /// Column u of the transposed row-normalised weighted matrix.
  std::vector<SparseEntry> weighted_column(NodeId u) const;

  /// Adds delta to the weight of u -> v. A weight reaching zero removes the
  /// edge; a negative result is a DeleteNonexistentEdge.
  void add_weight(NodeId u, NodeId v, Weight delta);

 private:
  std::vector<std::vector<OutEdge>> out_;
  std::vector<Weight> out_weight_;
  Weight total_weight_ = 0;
  std::size_t dangling_ = 0;
};

/// Per-node change of the effective out-weight during one window.
struct WeightShift {
  NodeId node;
  Weight before;
  Weight after;
};

/// Change of the weighted starting vector b_w(i) = m_i / m.
///
/// Stored in factored form: old and new totals plus the nodes whose weight
/// changed. Every other entry moves by m_i (1/m' - 1/m).
struct StartVectorDelta {
  Weight total_before = 0;
  Weight total_after = 0;
  std::vector<WeightShift> shifts;  // sorted by node

  bool empty() const { return shifts.empty() && total_before == total_after; }
  /// Entrywise absolute sum, from the closed form.
  double l1() const;
  /// Dense Δb_w against the post-window graph.
  std::vector<double> materialize(const GraphState& after) const;
};

/// One window's change to the transition matrices and starting vector.
struct SnapshotDelta {
  std::int64_t window_index = 0;
  SparseColumnMatrix delta_As;
  SparseColumnMatrix delta_Aw;
  StartVectorDelta delta_bw;
  double l1_dAs = 0.0;
  double l1_dAw = 0.0;
  double l1_dbw = 0.0;
  std::size_t event_count = 0;
  std::size_t attack_event_count = 0;
};

/// Events of the currently open window, with net per-edge weight changes.
class WindowBuffer {
 public:
  explicit WindowBuffer(double window_width = 3600.0);

  double window_width() const noexcept { return width_; }
  std::int64_t window_of(double timestamp) const;

  bool is_open() const noexcept { return open_; }
  std::int64_t window_index() const noexcept { return index_; }
  void open(std::int64_t window_index);

  std::size_t size() const noexcept { return events_.size(); }
  std::span<const EdgeEvent> events() const { return events_; }
  std::optional<double> last_timestamp() const { return last_timestamp_; }

  /// Net pending weight change of u -> v.
  Weight pending(NodeId u, NodeId v) const;

 private:
  friend void ingest_edge(const GraphState&, const EdgeEvent&, WindowBuffer&);
  friend SnapshotDelta close_window(GraphState&, WindowBuffer&);

  static std::uint64_t key(NodeId u, NodeId v) {
    return (static_cast<std::uint64_t>(u) << 32) | v;
  }

  double width_;
  bool open_ = false;
  std::int64_t index_ = 0;
  std::optional<double> last_timestamp_;
  std::vector<EdgeEvent> events_;
  std::unordered_map<std::uint64_t, Weight> net_;
};

/// Validates and buffers one event. Opens the buffer at the event's window
/// when it is closed; an event from any other window is rejected.
void ingest_edge(const GraphState& state, const EdgeEvent& event, WindowBuffer& pending);

/// Applies the buffered window to state and returns its delta.
SnapshotDelta close_window(GraphState& state, WindowBuffer& pending);

/// Tumbling-window driver over a time-ordered event stream. Empty windows
/// between two events are emitted as empty deltas.
class GraphStream {
 public:
  using WindowCallback = std::function<void(const SnapshotDelta&, const GraphState&)>;

  GraphStream(std::size_t node_count, double window_width);

  void push(const EdgeEvent& event, const WindowCallback& on_window);
  /// Closes the open window, if any.
  void finish(const WindowCallback& on_window);

  const GraphState& state() const noexcept { return state_; }
  const WindowBuffer& buffer() const noexcept { return buffer_; }

 private:
  GraphState state_;
  WindowBuffer buffer_;
};

}  // namespace rankshift
