#include "rankshift/cli_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace rankshift {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  char sep = ' ';
  if (line.find('\t') != std::string_view::npos) {
    sep = '\t';
  } else if (line.find(',') != std::string_view::npos) {
    sep = ',';
  }
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t end = std::min(line.find(sep, pos), line.size());
    std::string_view f = line.substr(pos, end - pos);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) {
      f.remove_prefix(1);
    }
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) {
      f.remove_suffix(1);
    }
    if (sep != ' ' || !f.empty()) {
      fields.push_back(f);
    }
    pos = end + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    return std::nullopt;
  }
  return value;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot read " + path.string());
  }
  return in;
}

// Yields (line number, trimmed content) for non-blank, non-comment lines.
template <typename F>
void for_each_line(std::istream& in, F&& f) {
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    f(lineno, line);
  }
}

std::vector<std::size_t> default_ks(std::size_t available) {
  std::vector<std::size_t> ks;
  for (std::size_t k = 50; k <= 800 && k <= available; k += 50) {
    ks.push_back(k);
  }
  return ks;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

ParsedStream parse_edges(std::istream& in) {
  ParsedStream out;
  std::unordered_map<std::string, NodeId> ids;
  const auto intern = [&](std::string_view name) {
    auto [it, inserted] = ids.try_emplace(std::string(name), static_cast<NodeId>(out.node_names.size()));
    if (inserted) {
      out.node_names.emplace_back(name);
    }
    return it->second;
  };
  bool first = true;
  for_each_line(in, [&](std::size_t lineno, std::string_view line) {
    const auto fields = split(line);
    if (first && !fields.empty() && fields[0] == "timestamp") {
      first = false;
      return;
    }
    first = false;
    if (fields.size() < 3 || fields.size() > 5) {
      throw ParseError(lineno, "expected 3 to 5 fields, found " + std::to_string(fields.size()));
    }
    const auto t = parse_number<double>(fields[0]);
    if (!t || !std::isfinite(*t)) {
      throw ParseError(lineno, "bad timestamp '" + std::string(fields[0]) + "'");
    }
    if (fields[1].empty() || fields[2].empty()) {
      throw ParseError(lineno, "empty node id");
    }
    EdgeEvent e;
    e.timestamp = *t;
    if (fields.size() >= 4) {
      if (fields[3] == "0" || fields[3] == "1") {
        e.label = fields[3] == "1";
        out.has_labels = true;
      } else {
        throw ParseError(lineno, "label must be 0 or 1, found '" + std::string(fields[3]) + "'");
      }
    }
    if (fields.size() == 5) {
      if (fields[4] == "+") {
        e.sign = +1;
      } else if (fields[4] == "-") {
        e.sign = -1;
      } else {
        throw ParseError(lineno, "sign must be + or -, found '" + std::string(fields[4]) + "'");
      }
    }
    if (!out.events.empty() && e.timestamp < out.events.back().timestamp) {
      throw ParseError(lineno, "timestamp " + std::string(fields[0]) + " is earlier than the previous line");
    }
    e.src = intern(fields[1]);
    e.dst = intern(fields[2]);
    out.events.push_back(e);
  });
  return out;
}

ParsedStream read_edge_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_edges(in);
}

void write_edges(std::ostream& out, std::span<const EdgeEvent> events, bool with_labels) {
  for (const auto& e : events) {
    out << format_double(e.timestamp) << '\t' << e.src << '\t' << e.dst;
    if (with_labels || e.sign < 0) {
      out << '\t' << (e.label ? 1 : 0);
    }
    if (e.sign < 0) {
      out << "\t-";
    }
    out << '\n';
  }
}

void write_score_table(std::ostream& out, std::span<const AnomalyRecord> records) {
  out << "window_index\tt_start\tscore\tscore_s\tscore_w\tl1_d1s\tl1_d2s\tl1_d1w\tl1_d2w\twarmup\n";
  for (const auto& r : records) {
    out << r.window_index << '\t' << format_double(r.t_start) << '\t' << format_double(r.score) << '\t'
        << format_double(r.score_s) << '\t' << format_double(r.score_w) << '\t'
        << format_double(r.l1_d1s) << '\t' << format_double(r.l1_d2s) << '\t'
        << format_double(r.l1_d1w) << '\t' << format_double(r.l1_d2w) << '\t' << (r.warmup ? 1 : 0)
        << '\n';
  }
}

void write_attribution(std::ostream& out, std::span<const AnomalyRecord> records,
                       std::span<const std::string> node_names) {
  out << "window_index\trank\tnode\tscore\tchannel\n";
  for (const auto& r : records) {
    std::size_t rank = 1;
    for (const auto& a : r.top_nodes) {
      out << r.window_index << '\t' << rank++ << '\t';
      if (a.node < node_names.size()) {
        out << node_names[a.node];
      } else {
        out << a.node;
      }
      out << '\t' << format_double(a.magnitude) << '\t' << channel_name(a.channel) << '\n';
    }
  }
}

void write_nodes(std::ostream& out, std::span<const std::string> node_names) {
  out << "node_id\tname\n";
  for (std::size_t i = 0; i < node_names.size(); ++i) {
    out << i << '\t' << node_names[i] << '\n';
  }
}

void write_labels(std::ostream& out, const WindowLabels& labels) {
  for (const auto& [w, anomalous] : labels) {
    out << w << '\t' << (anomalous ? 1 : 0) << '\n';
  }
}

void write_eval(std::ostream& out, const EvalResult& result) {
  out << "k\tprecision\trecall\thits\n";
  for (const auto& p : result.points) {
    out << p.k << '\t' << format_double(p.precision) << '\t' << format_double(p.recall) << '\t'
        << p.hits << '\n';
  }
}

void write_threshold(std::ostream& out, const ThresholdResult& r) {
  out << "threshold\tmean\tstd\tabove\ttrue_positives\trate\tdegenerate\n";
  out << format_double(r.threshold) << '\t' << format_double(r.mean) << '\t'
      << format_double(r.stddev) << '\t' << r.above << '\t' << r.true_positives << '\t'
      << format_double(r.rate) << '\t' << (r.degenerate ? 1 : 0) << '\n';
}

void write_eval_table(std::ostream& out, const EvalResult& result) {
  out << "window_index\tscore\tlabel\n";
  for (const auto& row : result.table) {
    out << row.window_index << '\t' << format_double(row.score) << '\t' << (row.label ? 1 : 0)
        << '\n';
  }
}

WindowLabels read_labels(std::istream& in) {
  WindowLabels labels;
  for_each_line(in, [&](std::size_t lineno, std::string_view line) {
    const auto fields = split(line);
    if (fields.size() == 2 && fields[0] == "window_index") {
      return;
    }
    if (fields.size() != 2) {
      throw ParseError(lineno, "expected window_index and label");
    }
    const auto w = parse_number<std::int64_t>(fields[0]);
    if (!w || (fields[1] != "0" && fields[1] != "1")) {
      throw ParseError(lineno, "bad label line");
    }
    if (!labels.emplace(*w, fields[1] == "1").second) {
      throw ParseError(lineno, "duplicate window " + std::string(fields[0]));
    }
  });
  return labels;
}

std::vector<ScoredWindow> ScoreTable::scored(const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end() || column == "warmup") {
    throw InvalidConfig("score table has no column '" + column + "'");
  }
  const auto col = static_cast<std::size_t>(it - columns.begin());
  std::vector<ScoredWindow> out;
  out.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    out.push_back({windows[i], rows[i][col], warmup[i]});
  }
  return out;
}

ScoreTable read_score_table(std::istream& in) {
  ScoreTable table;
  bool header = true;
  std::size_t warmup_col = 0;
  for_each_line(in, [&](std::size_t lineno, std::string_view line) {
    const auto fields = split(line);
    if (header) {
      header = false;
      if (fields.empty() || fields[0] != "window_index") {
        throw ParseError(lineno, "score table must start with a window_index header");
      }
      for (std::size_t i = 1; i < fields.size(); ++i) {
        table.columns.emplace_back(fields[i]);
      }
      const auto it = std::find(table.columns.begin(), table.columns.end(), "warmup");
      if (it == table.columns.end()) {
        throw ParseError(lineno, "score table lacks a warmup column");
      }
      warmup_col = static_cast<std::size_t>(it - table.columns.begin());
      return;
    }
    if (fields.size() != table.columns.size() + 1) {
      throw ParseError(lineno, "expected " + std::to_string(table.columns.size() + 1) + " fields");
    }
    const auto w = parse_number<std::int64_t>(fields[0]);
    if (!w) {
      throw ParseError(lineno, "bad window index");
    }
    std::vector<double> row;
    row.reserve(table.columns.size());
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto v = parse_number<double>(fields[i]);
      if (!v) {
        throw ParseError(lineno, "bad number '" + std::string(fields[i]) + "'");
      }
      row.push_back(*v);
    }
    table.windows.push_back(*w);
    table.warmup.push_back(row[warmup_col] != 0.0);
    table.rows.push_back(std::move(row));
  });
  if (header) {
    throw ParseError(0, "score table is empty");
  }
  return table;
}

void run_score(const ScoreOptions& opt) {
  opt.detector.validate();
  const ParsedStream parsed = read_edge_file(opt.input);
  std::size_t n = parsed.node_names.size();
  if (opt.nodes) {
    if (*opt.nodes < n) {
      throw UnknownNode("input names " + std::to_string(n) + " nodes but --nodes is " +
                        std::to_string(*opt.nodes));
    }
    n = *opt.nodes;
  }
  const auto records = run_detector(parsed.events, n, opt.detector);

  std::filesystem::create_directories(opt.out_dir);
  auto scores = open_out(opt.out_dir / "scores.tsv");
  write_score_table(scores, records);
  auto attribution = open_out(opt.out_dir / "attribution.tsv");
  write_attribution(attribution, records, parsed.node_names);
  auto nodes = open_out(opt.out_dir / "nodes.tsv");
  write_nodes(nodes, parsed.node_names);
  if (parsed.has_labels) {
    auto labels = open_out(opt.out_dir / "labels.tsv");
    write_labels(labels, label_windows(parsed.events, opt.detector.window_width, opt.min_attack_edges));
  }
}

void run_generate(const GenerateOptions& opt) {
  auto events = generate_stream(opt.generator);
  if (opt.injection) {
    events = inject(events, opt.generator.n_nodes, *opt.injection).events;
  }
  std::filesystem::create_directories(opt.out_dir);
  auto edges = open_out(opt.out_dir / "edges.tsv");
  write_edges(edges, events, true);
  auto labels = open_out(opt.out_dir / "labels.tsv");
  write_labels(labels, label_windows(events, opt.window_width, opt.min_attack_edges));
}

EvalResult run_eval(const EvalOptions& opt) {
  auto score_in = open_in(opt.scores);
  const ScoreTable table = read_score_table(score_in);
  auto label_in = open_in(opt.labels);
  const WindowLabels labels = read_labels(label_in);

  const std::set<std::int64_t> scored(table.windows.begin(), table.windows.end());
  if (scored.size() != table.windows.size()) {
    throw MisalignedWindows("score table repeats a window index");
  }
  for (const auto w : table.windows) {
    if (!labels.contains(w)) {
      throw MisalignedWindows("window " + std::to_string(w) + " has a score but no label");
    }
  }
  for (const auto& [w, _] : labels) {
    if (!scored.contains(w)) {
      throw MisalignedWindows("window " + std::to_string(w) + " has a label but no score");
    }
  }

  const auto windows = table.scored(opt.column);
  std::vector<std::size_t> ks = opt.ks;
  if (ks.empty()) {
    const auto live = static_cast<std::size_t>(
        std::count_if(windows.begin(), windows.end(), [](const ScoredWindow& w) { return !w.warmup; }));
    ks = default_ks(live);
  }
  EvalResult result = precision_recall_curve(windows, labels, ks);

  std::filesystem::create_directories(opt.out_dir);
  auto eval = open_out(opt.out_dir / "eval.tsv");
  write_eval(eval, result);
  auto threshold = open_out(opt.out_dir / "threshold.tsv");
  write_threshold(threshold, result.threshold);
  auto table_out = open_out(opt.out_dir / "eval_windows.tsv");
  write_eval_table(table_out, result);
  return result;
}

}  // namespace rankshift
