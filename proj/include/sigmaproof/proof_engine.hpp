#pragma once

// Discretized sweep over the reduced first-generation region. Every cube of
// the lattice must be disposed of by one of three sufficient conditions:
//   S1  the first generation alone already has a large sharp value,
//   S2  the dangerous children of p2 form a set of small diameter,
//   S3  no two-colored 4-clique exists in the compatibility graph of the
//       dangerous children of p1 and p2.
//
// All lattice stepping and tolerance handling follows the reference program
// operation by operation; lattices are built by repeated addition, not by
// multiplication, so the float rounding is the same.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sigmaproof/geometry.hpp"
#include "sigmaproof/objective.hpp"

namespace sigmaproof {

struct SweepParams {
  double sigma = 0.7;
  double delta = 0.008;
  std::vector<double> s2_deltas{0.05, 0.02, 0.01};
  double s3_delta = 0.03;
  double eps = kEps;
  std::uint64_t seed = 2024;
  std::optional<std::size_t> sample;  // sweep only this many cubes of the shuffled list
  bool exact_subsets = false;         // disable the two-point tail in S3 compatibility

  double m_delta() const { return std::sqrt(2.0) * delta; }
  double r_delta() const { return 1.0 + delta / std::sqrt(2.0); }

  void validate() const {
    if (!(sigma >= 0.5 && sigma <= 1.0)) throw std::invalid_argument("sigma must lie in [1/2, 1]");
    if (!(delta > 0 && delta < 0.1)) throw std::invalid_argument("delta must lie in (0, 0.1)");
    if (!(s3_delta > 0 && s3_delta <= 0.05))
      throw std::invalid_argument("s3 delta must lie in (0, 0.05]");
    if (s2_deltas.empty()) throw std::invalid_argument("at least one s2 delta is required");
    for (double d : s2_deltas)
      if (!(d > 0 && d < 1)) throw std::invalid_argument("s2 deltas must lie in (0, 1)");
    if (!(eps > 0 && eps < delta / 4)) throw std::invalid_argument("eps out of range");
  }

  bool operator==(const SweepParams&) const = default;
};

inline void to_json(nlohmann::json& j, const SweepParams& p) {
  j = {{"sigma", p.sigma},         {"delta", p.delta},
       {"m_delta", p.m_delta()},   {"r_delta", p.r_delta()},
       {"s2_deltas", p.s2_deltas}, {"s3_delta", p.s3_delta},
       {"eps", p.eps},             {"seed", p.seed},
       {"exact_subsets", p.exact_subsets}};
  j["sample"] = p.sample ? nlohmann::json(*p.sample) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, SweepParams& p) {
  j.at("sigma").get_to(p.sigma);
  j.at("delta").get_to(p.delta);
  j.at("s2_deltas").get_to(p.s2_deltas);
  j.at("s3_delta").get_to(p.s3_delta);
  j.at("eps").get_to(p.eps);
  j.at("seed").get_to(p.seed);
  j.at("exact_subsets").get_to(p.exact_subsets);
  if (j.contains("sample") && !j.at("sample").is_null())
    p.sample = j.at("sample").get<std::size_t>();
  else
    p.sample.reset();
}

struct CubeCenter {
  Point2 p1;
  Point2 p2;
};

enum class Strategy { S1, S2, S3, Failed };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::S1: return "S1";
    case Strategy::S2: return "S2";
    case Strategy::S3: return "S3";
    case Strategy::Failed: return "Failed";
  }
  return "?";
}

inline Strategy strategy_from_string(const std::string& s) {
  if (s == "S1") return Strategy::S1;
  if (s == "S2") return Strategy::S2;
  if (s == "S3") return Strategy::S3;
  if (s == "Failed") return Strategy::Failed;
  throw std::invalid_argument("unknown strategy: " + s);
}

struct CubeOutcome {
  std::size_t index = 0;  // position in the shuffled cube list
  CubeCenter center;
  Strategy disposed_by = Strategy::Failed;
  double s2_delta = 0.0;  // net step that succeeded, when disposed by S2
  double elapsed = 0.0;   // seconds
};

// ---------------------------------------------------------------------------
// Lattice

inline std::vector<CubeCenter> discretize_omega(const SweepParams& params) {
  const double delta = params.delta;
  const double eps = params.eps;
  const double l = 1 + 3 * delta;
  const double step = delta - eps;
  std::vector<CubeCenter> out;
  Point2 p1{0, 0}, p2{0, 0};
  for (p1.y = -l; p1.y <= l; p1.y += step)
    for (p2.x = -l; p2.x <= l; p2.x += step)
      for (p2.y = -l; p2.y <= l; p2.y += step)
        if (omega_membership(p1, p2, params.sigma, delta, eps)) out.push_back({p1, p2});
  return out;
}

inline std::vector<CubeCenter> shuffled_cubes(const SweepParams& params) {
  auto cubes = discretize_omega(params);
  std::mt19937 g(static_cast<std::mt19937::result_type>(params.seed));
  std::shuffle(cubes.begin(), cubes.end(), g);
  return cubes;
}

// ---------------------------------------------------------------------------
// Sharp thresholds as used by the sweep: singletons skipped, and an
// unsatisfiable candidate set counts as the value -1.

namespace detail {

using EngineSet = SmallPlanarSet<5>;

inline bool engine_exceeds(const MetricTable& t, const SubsetOptions& opt, double threshold,
                           bool inclusive) {
  const bool floor_hit = inclusive ? kNoCandidate >= threshold : kNoCandidate > threshold;
  return floor_hit || sharp_exceeds(t, opt, threshold, inclusive);
}

inline SubsetOptions engine_options(const SweepParams& params) {
  SubsetOptions opt;
  opt.include_singletons = false;
  opt.eps = params.eps;
  return opt;
}

}  // namespace detail

// Lattice points of p1 + (delta1 - eps) Z^2 near p1 whose sharp value with
// {O, p1, p2} stays at most m + delta1/sqrt(2) + eps.
inline std::vector<Point2> x_net(const SweepParams& params, double delta1, Point2 p1, Point2 p2,
                                 double r, double m) {
  if (!(delta1 > 0)) throw std::invalid_argument("net step must be positive");
  const double eps = params.eps;
  delta1 -= eps;
  r += delta1 / std::sqrt(2.0);
  const double threshold = m + delta1 / std::sqrt(2.0) + eps;
  std::vector<Point2> out;

  // The value with a fourth point is at least the value of {O, p1, p2}; if
  // that already exceeds the threshold the net is empty. Otherwise only
  // subsets containing the fourth point can push the value over.
  auto opt = detail::engine_options(params);
  {
    detail::EngineSet base(params.sigma, {Point2{0, 0}, p1, p2});
    if (detail::engine_exceeds(MetricTable(base), opt, threshold, false)) return out;
  }
  opt.required_tail = 1;
  for (double x = -r; x <= r; x += delta1) {
    for (double y = -r; y <= r; y += delta1) {
      const Point2 q{x, y};
      if (!(norm(q) <= r)) continue;
      detail::EngineSet s(params.sigma, {Point2{0, 0}, p1, p2, p1 + q});
      if (!sharp_exceeds(MetricTable(s), opt, threshold, false)) out.push_back(p1 + q);
    }
  }
  return out;
}

// Over-estimate of the diameter of a finite set.
inline double net_diameter(const std::vector<Point2>& pts, double eps = kEps) {
  double d = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, distance(pts[i], pts[j]));
  return d + eps;
}

inline bool check_s1(const SweepParams& params, Point2 p1, Point2 p2) {
  detail::EngineSet s(params.sigma, {Point2{0, 0}, p1, p2});
  return detail::engine_exceeds(MetricTable(s), detail::engine_options(params),
                                params.m_delta() + params.eps, false);
}

// Returns the first net step that succeeds, or nullopt.
inline std::optional<double> check_s2_step(const SweepParams& params, Point2 p1, Point2 p2) {
  for (double d1 : params.s2_deltas) {
    const auto net = x_net(params, d1, p2, p1, params.r_delta(), params.m_delta());
    if (params.eps + net_diameter(net, params.eps) < 2 * params.sigma - std::sqrt(2.0) * d1)
      return d1;
  }
  return std::nullopt;
}

inline bool check_s2(const SweepParams& params, Point2 p1, Point2 p2) {
  return check_s2_step(params, p1, p2).has_value();
}

// Adjacency as sorted neighbour lists; color true marks the first net.
struct ColoredGraph {
  std::vector<bool> color;
  std::vector<std::vector<std::size_t>> adj;

  explicit ColoredGraph(std::size_t n = 0) : color(n, false), adj(n) {}
  std::size_t size() const { return color.size(); }
  bool adjacent(std::size_t a, std::size_t b) const {
    return std::binary_search(adj[a].begin(), adj[a].end(), b);
  }
  void add_edge(std::size_t a, std::size_t b) {
    if (a == b) throw std::invalid_argument("self loop");
    auto ins = [](std::vector<std::size_t>& v, std::size_t x) {
      auto it = std::lower_bound(v.begin(), v.end(), x);
      if (it == v.end() || *it != x) v.insert(it, x);
    };
    ins(adj[a], b);
    ins(adj[b], a);
  }
};

// Two adjacent vertices of color false with two adjacent common neighbours
// of color true.
inline bool contains_bicolor_k4(const ColoredGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> common;
  for (std::size_t i = 0; i < n; ++i) {
    if (g.color[i]) continue;
    for (std::size_t j : g.adj[i]) {
      if (j <= i || g.color[j]) continue;
      common.clear();
      for (std::size_t x : g.adj[i])
        if (g.color[x] && g.adjacent(j, x)) common.push_back(x);
      for (std::size_t a = 0; a < common.size(); ++a)
        for (std::size_t b = a + 1; b < common.size(); ++b)
          if (g.adjacent(common[a], common[b])) return true;
    }
  }
  return false;
}

inline bool check_s3(const SweepParams& params, Point2 p1, Point2 p2) {
  const double d1 = params.s3_delta;
  const auto x1 = x_net(params, d1, p1, p2, params.r_delta(), params.m_delta());
  const auto x2 = x_net(params, d1, p2, p1, params.r_delta(), params.m_delta());
  const double dist = 2 * params.sigma - std::sqrt(2.0) * d1;
  const double m_val = params.m_delta() + std::sqrt(2.0) * d1;
  const double eps = params.eps;

  auto opt = detail::engine_options(params);
  opt.required_tail = params.exact_subsets ? 0 : 2;
  opt.ascending = true;
  const auto compatible = [&](Point2 a, Point2 b) {
    detail::EngineSet s(params.sigma, {Point2{0, 0}, p1, p2, a, b});
    return !detail::engine_exceeds(MetricTable(s), opt, m_val + eps, true);
  };

  const std::size_t n = x1.size() + x2.size();
  const auto vertex = [&](std::size_t i) { return i < x1.size() ? x1[i] : x2[i - x1.size()]; };
  ColoredGraph g(n);
  for (std::size_t i = 0; i < x1.size(); ++i) g.color[i] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (g.color[i] != g.color[j]) continue;
      const Point2 a = vertex(i), b = vertex(j);
      if (distance(a, b) > dist - eps && compatible(a, b)) g.add_edge(i, j);
    }
  std::vector<bool> has_edge(n);
  for (std::size_t i = 0; i < n; ++i) has_edge[i] = !g.adj[i].empty();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (g.color[i] == g.color[j]) continue;
      if (has_edge[i] && has_edge[j] && compatible(vertex(i), vertex(j))) g.add_edge(i, j);
    }
  return !contains_bicolor_k4(g);
}

inline CubeOutcome dispose_cube(const SweepParams& params, std::size_t index, CubeCenter c) {
  const auto t0 = std::chrono::steady_clock::now();
  CubeOutcome out;
  out.index = index;
  out.center = c;
  if (check_s1(params, c.p1, c.p2)) {
    out.disposed_by = Strategy::S1;
  } else if (auto d = check_s2_step(params, c.p1, c.p2)) {
    out.disposed_by = Strategy::S2;
    out.s2_delta = *d;
  } else if (check_s3(params, c.p1, c.p2)) {
    out.disposed_by = Strategy::S3;
  } else {
    out.disposed_by = Strategy::Failed;
  }
  out.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint log: one JSON header line, then one line per finished cube:
//   <index> <strategy> <s2 step> <elapsed seconds>
// Only a final line without its newline (an interrupted write) is tolerated.

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline nlohmann::json checkpoint_header(const SweepParams& params, std::size_t total) {
  return {{"format", "sigmaproof-checkpoint/1"}, {"params", params}, {"selected_cubes", total}};
}

struct CheckpointState {
  std::vector<std::optional<CubeOutcome>> done;
  std::size_t resumed = 0;
  std::size_t valid_bytes = 0;  // length of the intact prefix
};

inline CheckpointState read_checkpoint(const std::string& path, const SweepParams& params,
                                       const std::vector<CubeCenter>& cubes) {
  CheckpointState st;
  st.done.assign(cubes.size(), std::nullopt);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t pos = text.find('\n');
  if (pos == std::string::npos) throw CheckpointError("checkpoint header is incomplete");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text.substr(0, pos));
  } catch (const nlohmann::json::exception&) {
    throw CheckpointError("checkpoint header is not valid JSON");
  }
  if (header != checkpoint_header(params, cubes.size()))
    throw CheckpointError("checkpoint was written with different parameters");
  ++pos;
  st.valid_bytes = pos;

  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // torn final record
    std::istringstream line(text.substr(pos, nl - pos));
    std::size_t index;
    std::string strategy, extra;
    double s2 = 0, elapsed = 0;
    if (!(line >> index >> strategy >> s2 >> elapsed) || (line >> extra))
      throw CheckpointError("corrupt checkpoint record at byte " + std::to_string(pos));
    if (index >= cubes.size() || st.done[index])
      throw CheckpointError("invalid or duplicate cube index in checkpoint");
    CubeOutcome o;
    try {
      o.disposed_by = strategy_from_string(strategy);
    } catch (const std::invalid_argument&) {
      throw CheckpointError("corrupt strategy in checkpoint");
    }
    o.index = index;
    o.center = cubes[index];
    o.s2_delta = s2;
    o.elapsed = elapsed;
    st.done[index] = o;
    ++st.resumed;
    pos = nl + 1;
    st.valid_bytes = pos;
  }
  return st;
}

inline std::string checkpoint_record(const CubeOutcome& o) {
  std::ostringstream s;
  s.precision(17);
  s << o.index << ' ' << to_string(o.disposed_by) << ' ' << o.s2_delta << ' ' << o.elapsed
    << '\n';
  return s.str();
}

// ---------------------------------------------------------------------------
// Sweep

enum class Verdict { Proved, Failed, Incomplete };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Proved: return "Proved";
    case Verdict::Failed: return "Failed";
    case Verdict::Incomplete: return "Incomplete";
  }
  return "?";
}

struct ProofReport {
  SweepParams params;
  std::size_t total_cubes = 0;     // lattice size
  std::size_t selected_cubes = 0;  // after sampling
  std::size_t processed = 0;
  std::size_t count_s1 = 0, count_s2 = 0, count_s3 = 0, count_failed = 0;
  std::vector<std::pair<double, std::size_t>> s2_by_step;
  std::vector<CubeOutcome> outcomes;  // index order
  double wall_time = 0.0;
  std::size_t resumed = 0;
  std::string checkpoint_path;
  Verdict verdict = Verdict::Incomplete;
};

inline nlohmann::json outcome_json(const CubeOutcome& o, bool with_time) {
  nlohmann::json j = {{"index", o.index},
                      {"p1", {o.center.p1.x, o.center.p1.y}},
                      {"p2", {o.center.p2.x, o.center.p2.y}},
                      {"disposed_by", to_string(o.disposed_by)}};
  if (o.disposed_by == Strategy::S2) j["s2_delta"] = o.s2_delta;
  if (with_time) j["elapsed_s"] = o.elapsed;
  return j;
}

// Wall-time fields are kept under "timing" so the rest compares exactly
// between runs.
inline nlohmann::json report_json(const ProofReport& r, bool with_timing = true) {
  nlohmann::json j;
  j["params"] = r.params;
  j["total_cubes"] = r.total_cubes;
  j["selected_cubes"] = r.selected_cubes;
  j["processed"] = r.processed;
  j["counts"] = {{"S1", r.count_s1}, {"S2", r.count_s2}, {"S3", r.count_s3},
                 {"Failed", r.count_failed}};
  auto steps = nlohmann::json::array();
  for (const auto& [d, c] : r.s2_by_step) steps.push_back({{"delta1", d}, {"count", c}});
  j["s2_by_step"] = steps;
  j["verdict"] = to_string(r.verdict);
  nlohmann::json first = nlohmann::json::object();
  for (Strategy s : {Strategy::S1, Strategy::S2, Strategy::S3, Strategy::Failed}) {
    auto arr = nlohmann::json::array();
    for (const auto& o : r.outcomes)
      if (o.disposed_by == s && arr.size() < 10) arr.push_back(outcome_json(o, false));
    first[to_string(s)] = arr;
  }
  j["first_outcomes"] = first;
  auto failed = nlohmann::json::array();
  for (const auto& o : r.outcomes)
    if (o.disposed_by == Strategy::Failed) failed.push_back(outcome_json(o, false));
  j["failed_cubes"] = failed;
  if (with_timing) {
    double cube_time = 0;
    for (const auto& o : r.outcomes) cube_time += o.elapsed;
    j["timing"] = {{"wall_time_s", r.wall_time}, {"cube_time_s", cube_time}};
    j["checkpoint"] = {{"path", r.checkpoint_path}, {"resumed_cubes", r.resumed}};
  }
  return j;
}

struct SweepOptions {
  std::size_t workers = 1;
  std::string checkpoint_path;  // empty: no checkpoint
  bool restart = false;         // discard an existing checkpoint
  // Stop after this many newly processed cubes (simulates an interruption).
  std::optional<std::size_t> stop_after;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

inline std::size_t default_workers() {
  if (const char* env = std::getenv("SIGMAPROOF_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline ProofReport run_sweep(const SweepParams& params, const SweepOptions& options = {}) {
  params.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto cubes = shuffled_cubes(params);
  ProofReport rep;
  rep.params = params;
  rep.total_cubes = cubes.size();
  if (params.sample && *params.sample < cubes.size()) cubes.resize(*params.sample);
  rep.selected_cubes = cubes.size();
  rep.checkpoint_path = options.checkpoint_path;

  std::vector<std::optional<CubeOutcome>> done(cubes.size());
  std::ofstream log;
  if (!options.checkpoint_path.empty()) {
    namespace fs = std::filesystem;
    const bool exists = fs::exists(options.checkpoint_path);
    if (exists && !options.restart) {
      auto st = read_checkpoint(options.checkpoint_path, params, cubes);
      done = std::move(st.done);
      rep.resumed = st.resumed;
      fs::resize_file(options.checkpoint_path, st.valid_bytes);  // drop a torn record
      log.open(options.checkpoint_path, std::ios::binary | std::ios::app);
    } else {
      log.open(options.checkpoint_path, std::ios::binary | std::ios::trunc);
      log << checkpoint_header(params, cubes.size()).dump() << '\n';
    }
    if (!log) throw CheckpointError("cannot write checkpoint " + options.checkpoint_path);
    log.flush();
  }

  // Static sharding: cube j belongs to worker j % workers. Workers push
  // outcomes to a queue drained by this thread, the only checkpoint writer.
  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  std::mutex mu;
  std::condition_variable cv;
  std::deque<CubeOutcome> queue;
  std::atomic<bool> stop{false};
  std::size_t finished_workers = 0;
  std::exception_ptr error;

  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t j = w; j < cubes.size() && !stop.load(); j += workers) {
          if (done[j]) continue;
          auto o = dispose_cube(params, j, cubes[j]);
          std::lock_guard lk(mu);
          queue.push_back(o);
          cv.notify_one();
        }
      } catch (...) {
        std::lock_guard lk(mu);
        if (!error) error = std::current_exception();
        stop = true;
      }
      std::lock_guard lk(mu);
      ++finished_workers;
      cv.notify_one();
    });
  }

  std::size_t fresh = 0;
  std::size_t completed = rep.resumed;
  for (;;) {
    std::unique_lock lk(mu);
    cv.wait(lk, [&] { return !queue.empty() || finished_workers == workers; });
    if (queue.empty() && finished_workers == workers) break;
    auto o = queue.front();
    queue.pop_front();
    lk.unlock();
    if (stop.load()) continue;  // drain without recording after an interruption
    done[o.index] = o;
    if (log.is_open()) {
      log << checkpoint_record(o);
      log.flush();
    }
    ++fresh;
    ++completed;
    if (options.progress) options.progress(completed, cubes.size());
    if (options.stop_after && fresh >= *options.stop_after) stop = true;
  }
  pool.clear();
  if (error) std::rethrow_exception(error);

  std::vector<double> steps = params.s2_deltas;
  std::vector<std::size_t> step_counts(steps.size(), 0);
  for (const auto& o : done) {
    if (!o) continue;
    rep.outcomes.push_back(*o);
    switch (o->disposed_by) {
      case Strategy::S1: ++rep.count_s1; break;
      case Strategy::S2:
        ++rep.count_s2;
        for (std::size_t k = 0; k < steps.size(); ++k)
          if (steps[k] == o->s2_delta) ++step_counts[k];
        break;
      case Strategy::S3: ++rep.count_s3; break;
      case Strategy::Failed: ++rep.count_failed; break;
    }
  }
  for (std::size_t k = 0; k < steps.size(); ++k) rep.s2_by_step.push_back({steps[k], step_counts[k]});
  rep.processed = rep.outcomes.size();
  if (rep.count_failed > 0)
    rep.verdict = Verdict::Failed;
  else if (rep.processed == rep.selected_cubes)
    rep.verdict = Verdict::Proved;
  else
    rep.verdict = Verdict::Incomplete;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace sigmaproof
