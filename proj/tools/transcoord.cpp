// Batch front end: transcoord <command> --config <file> --out <dir> [--seed N]

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "transcoord/transcoord.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace transcoord;

namespace {

constexpr int kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& path, const std::string& what) : std::runtime_error(path + ": " + what) {}
};

// JSON node plus its dotted path, for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  Node at(const std::string& key) const {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    if (!j_.contains(key)) throw ConfigError(sub(key), "missing required field");
    return Node(j_.at(key), sub(key));
  }

  Node at(std::size_t i) const {
    if (!j_.is_array() || i >= j_.size()) throw ConfigError(path_ + "[" + std::to_string(i) + "]", "missing element");
    return Node(j_.at(i), path_ + "[" + std::to_string(i) + "]");
  }

  std::size_t size() const {
    if (!j_.is_array()) throw ConfigError(path_, "expected an array");
    return j_.size();
  }

  double num() const {
    if (!j_.is_number()) throw ConfigError(path_, "expected a number");
    return j_.get<double>();
  }
  double num(const std::string& key, double fallback) const { return has(key) ? at(key).num() : fallback; }
  double num(const std::string& key) const { return at(key).num(); }

  long integer() const {
    if (!j_.is_number_integer()) throw ConfigError(path_, "expected an integer");
    return j_.get<long>();
  }
  long integer(const std::string& key, long fallback) const { return has(key) ? at(key).integer() : fallback; }

  std::string str() const {
    if (!j_.is_string()) throw ConfigError(path_, "expected a string");
    return j_.get<std::string>();
  }
  std::string str(const std::string& key, const std::string& fallback) const {
    return has(key) ? at(key).str() : fallback;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Node n = at(key);
    if (!n.j_.is_boolean()) throw ConfigError(n.path_, "expected true or false");
    return n.j_.get<bool>();
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).num());
    return out;
  }

  Vec2 point() const {
    if (size() != 2) throw ConfigError(path_, "expected [t, x]");
    return {at(0).num(), at(1).num()};
  }

  Interval interval() const {
    if (size() != 2) throw ConfigError(path_, "expected [lo, hi]");
    const Interval r{at(0).num(), at(1).num()};
    if (!(r.hi > r.lo)) throw ConfigError(path_, "expected lo < hi");
    return r;
  }

  template <class T>
  T choice(const std::string& key, const std::map<std::string, T>& options, std::optional<T> fallback = {}) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(sub(key), "missing required field");
    }
    const std::string v = at(key).str();
    const auto it = options.find(v);
    if (it == options.end()) {
      std::string allowed;
      for (const auto& [k, _] : options) allowed += (allowed.empty() ? "" : ", ") + k;
      throw ConfigError(sub(key), "unknown value '" + v + "' (allowed: " + allowed + ")");
    }
    return it->second;
  }

  void positive(double v, const std::string& key) const {
    if (!(v > 0.0)) throw ConfigError(sub(key), "must be positive");
  }

 private:
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
};

// --- config readers ------------------------------------------------------------

DynamicPrinciple read_principle(const Node& n) {
  const auto kind = n.choice<Principle>(
      "principle", {{"schroedinger", Principle::schroedinger}, {"klein_gordon", Principle::klein_gordon}},
      Principle::schroedinger);
  const double m = n.num("mass", 1.0);
  n.positive(m, "mass");
  return kind == Principle::schroedinger ? DynamicPrinciple::schroedinger(m) : DynamicPrinciple::klein_gordon(m);
}

WaveFunction read_wave(const Node& n) {
  const DynamicPrinciple p = read_principle(n);
  const std::string form = n.at("form").str();
  if (form == "plane_wave") {
    std::optional<double> omega;
    if (n.has("omega")) omega = n.num("omega");
    return WaveFunction::plane_wave(p, n.num("k", 0.0), omega);
  }
  if (form == "gaussian") {
    const double s = n.num("sigma0", 1.0);
    n.positive(s, "sigma0");
    return WaveFunction::gaussian(p, s, n.num("x0", 0.0), n.num("k0", 0.0));
  }
  if (form == "boxcar") {
    const double w = n.num("width");
    n.positive(w, "width");
    return boxcar(p, n.num("x_lo", 0.0), w);
  }
  if (form == "superposition") {
    const Node terms = n.at("terms");
    std::vector<std::pair<Complex, WaveFunctionPtr>> list;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const Node t = terms.at(i);
      const Node w = t.at("weight");
      Complex c{w.at(0).num(), w.at(1).num()};
      Node inner = t.at("wave");
      list.emplace_back(c, std::make_shared<WaveFunction>(read_wave(inner)));
    }
    return WaveFunction::superposition(std::move(list));
  }
  throw ConfigError(n.path() + ".form", "unknown wave form '" + form + "'");
}

// Polynomial coefficient table c[i][j] multiplying t^i x^j.
std::function<double(double, double)> read_poly(const Node& n) {
  std::vector<std::vector<double>> c;
  for (std::size_t i = 0; i < n.size(); ++i) c.push_back(n.at(i).numbers());
  if (c.empty()) throw ConfigError(n.path(), "empty coefficient table");
  return [c](double t, double x) {
    double s = 0.0, ti = 1.0;
    for (const auto& row : c) {
      double xj = 1.0;
      for (double v : row) {
        s += v * ti * xj;
        xj *= x;
      }
      ti *= t;
    }
    return s;
  };
}

ChartPtr read_chart(const Node& parent, const std::string& key) {
  if (!parent.has(key)) return Chart::standard();
  const Node n = parent.at(key);
  const std::string kind = n.str("kind", "minkowski");
  const std::string id = n.str("id", kind);
  if (kind == "minkowski") return Chart::minkowski(id);
  if (kind == "diagonal") {
    DiagonalForm form;
    form.gtt = read_poly(n.at("gtt"));
    form.gxx = read_poly(n.at("gxx"));
    return Chart::diagonal(id, std::move(form));
  }
  throw ConfigError(n.path() + ".kind", "unknown chart kind '" + kind + "'");
}

LimitSchedule read_schedule(const Node& parent) {
  if (!parent.has("schedule")) return LimitSchedule::geometric();
  const Node n = parent.at("schedule");
  if (n.has("deltas")) {
    LimitSchedule s;
    s.deltas = n.at("deltas").numbers();
    s.richardson_levels = static_cast<int>(n.integer("richardson", 3));
    return s;
  }
  return LimitSchedule::geometric(n.num("delta0", 1e-2), n.num("ratio", 0.25), static_cast<int>(n.integer("levels", 5)),
                                  static_cast<int>(n.integer("richardson", 3)));
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw Error(ErrorCode::io_error, "cannot write " + (dir / name).string());
  return os;
}

// --- commands ---------------------------------------------------------------------

void write_trace_svg(const fs::path& dir, const std::vector<PartitionLine>& lines) {
  double t0 = 1e300, t1 = -1e300, x0 = 1e300, x1 = -1e300;
  for (const auto& l : lines)
    for (const auto& e : l.samples) {
      t0 = std::min(t0, e.point().t);
      t1 = std::max(t1, e.point().t);
      x0 = std::min(x0, e.point().x);
      x1 = std::max(x1, e.point().x);
    }
  if (!(t1 > t0) || !(x1 > x0)) return;
  auto os = open_out(dir, "trace.svg");
  const double W = 480, H = 480;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  for (const auto& l : lines) {
    os << "<polyline fill=\"none\" stroke=\"black\" points=\"";
    for (const auto& e : l.samples) {
      os << (e.point().x - x0) / (x1 - x0) * (W - 20) + 10 << ',' << H - 10 - (e.point().t - t0) / (t1 - t0) * (H - 20)
         << ' ';
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

void cmd_trace(const Node& p, const fs::path& out) {
  const WaveFunction phi = read_wave(p.at("wave"));
  const std::vector<double> fractions = p.at("fractions").numbers();
  const Interval range = p.at("t_range").interval();
  const double t_seed = p.num("t_seed", range.lo);
  const int samples = static_cast<int>(p.integer("samples", 201));
  std::vector<PartitionLine> lines;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    lines.push_back(trace_fraction_line(phi, fractions[i], t_seed, range, phi.home(), samples));
    if (lines.back().truncated) {
      std::cerr << "warning: line " << i << " truncated: " << lines.back().truncation_reason << "\n";
    }
    char name[32];
    std::snprintf(name, sizeof name, "line_%02zu.csv", i);
    auto os = open_out(out, name);
    CsvWriter w(os, {"index", "t", "x", "fraction"});
    for (std::size_t k = 0; k < lines.back().samples.size(); ++k) {
      const Vec2 q = lines.back().samples[k].point();
      w.row() << static_cast<long>(k) << q.t << q.x << lines.back().fraction.value_or(fractions[i]);
    }
  }
  if (p.flag("svg", false)) write_trace_svg(out, lines);
}

void cmd_fraction(const Node& p, const fs::path& out) {
  const WaveFunction phi = read_wave(p.at("wave"));
  const Node events = p.at("events");
  auto os = open_out(out, "fraction.csv");
  CsvWriter w(os, {"t", "x", "fraction"});
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Vec2 q = events.at(i).point();
    w.row() << q.t << q.x << fraction_at(phi, Event(phi.home(), q));
  }
}

void cmd_derive(const Node& p, const fs::path& out) {
  const WaveFunction phi = read_wave(p.at("wave"));
  const Vec2 q = p.has("event") ? p.at("event").point() : Vec2{0.0, 0.0};
  const auto policy = p.choice<GridPolicy>("grid", {{"rest", GridPolicy::rest}, {"flow", GridPolicy::flow}},
                                           GridPolicy::rest);
  const LimitSchedule sched = read_schedule(p);
  std::vector<std::string> axes{"space", "time"};
  if (p.has("axes")) {
    axes.clear();
    const Node a = p.at("axes");
    for (std::size_t i = 0; i < a.size(); ++i) axes.push_back(a.at(i).str());
  }
  const Event a(phi.home(), q);
  for (const auto& ax : axes) {
    DerivativeResult r;
    if (ax == "space") r = transcoord_partial(phi, a, Axis::space, sched, policy);
    else if (ax == "time") r = transcoord_partial(phi, a, Axis::time, sched, policy);
    else if (ax == "second_space") r = transcoord_second_x(phi, a, sched, policy);
    else throw ConfigError(p.path().empty() ? "axes" : p.path() + ".axes", "unknown axis '" + ax + "'");
    auto os = open_out(out, "derive_" + ax + ".csv");
    CsvWriter w(os, {"delta", "re", "im", "error"});
    for (std::size_t i = 0; i < r.raw.size(); ++i)
      w.row() << r.deltas[i] << r.raw[i].real() << r.raw[i].imag() << std::abs(r.raw[i] - r.value);
    w.row() << 0.0 << r.value.real() << r.value.imag() << r.residual;
  }
}

void cmd_neighborhood(const Node& p, const fs::path& out) {
  const ChartPtr chart = read_chart(p, "chart");
  const Event a(chart, p.has("event") ? p.at("event").point() : Vec2{0.0, 0.0});
  const double beta = p.num("beta", 0.0);
  const double delta = p.num("delta");
  p.positive(delta, "delta");
  const Neighborhood n = build_neighborhood(a, boost_direction(Direction::chart_rest(a), beta), delta);
  auto os = open_out(out, "neighborhood.csv");
  CsvWriter w(os, {"label", "t", "x", "interval_squared_from_center"});
  const std::pair<const char*, const Event*> rows[] = {
      {"a", &n.center}, {"b", &n.b}, {"b_prime", &n.b_prime}, {"c", &n.c}, {"c_prime", &n.c_prime}};
  for (const auto& [label, e] : rows)
    w.row() << label << e->point().t << e->point().x << interval_squared(n.center, *e).value;
}

void cmd_doppler(const Node& p, const fs::path& out) {
  const auto heading = p.choice<Heading>("heading", {{"right", Heading::right}, {"left", Heading::left}},
                                         Heading::right);
  const double rate = p.num("rate", 1.0);
  p.positive(rate, "rate");
  const std::vector<double> betas = p.has("betas") ? p.at("betas").numbers() : std::vector<double>{0.0, 0.6};
  const PhotonPhaseField photon(heading, {{Complex{1.0, 0.0}, 0.0, rate}}, {-1e9, 1e9});
  const Event a(photon.home(), 0.0, 0.0);
  const LocalGrid rest = chart_rest_grid(a);
  const double e_rest = grid_relative_kinematics(photon, rest, a).e_gamma;
  auto os = open_out(out, "doppler.csv");
  CsvWriter w(os, {"beta", "ratio", "e_rest", "e_moving"});
  for (double beta : betas) {
    const LocalGrid moving = grid_from_time_direction(boost_direction(Direction::chart_rest(a), beta));
    w.row() << beta << doppler_ratio(rest, moving, heading) << e_rest
            << grid_relative_kinematics(photon, moving, a).e_gamma;
  }
}

void cmd_interference(const Node& p, const fs::path& out) {
  const double d = p.num("slit_separation"), L = p.num("screen_distance"), lambda = p.num("wavelength");
  p.positive(d, "slit_separation");
  p.positive(L, "screen_distance");
  p.positive(lambda, "wavelength");
  const Interval span = p.at("screen").interval();
  const long points = p.integer("points", 1000);
  if (points < 2) throw ConfigError(p.path().empty() ? "points" : p.path() + ".points", "need at least two points");
  auto os = open_out(out, "interference.csv");
  CsvWriter w(os, {"position", "intensity"});
  for (long i = 0; i < points; ++i) {
    const double y = span.lo + span.length() * static_cast<double>(i) / static_cast<double>(points - 1);
    w.row() << y << two_slit_intensity(d, L, lambda, y);
  }
}

ScenarioSpec read_scenario(const Node& p, std::uint64_t seed) {
  ScenarioSpec s;
  s.gamma = p.num("gamma", 1.0);
  s.transition_energy = p.num("transition_energy", 1.0);
  if (p.has("emission_weights")) {
    const auto w = p.at("emission_weights").numbers();
    if (w.size() != 2) throw ConfigError(p.path() + ".emission_weights", "expected [left, right]");
    s.emission.weight = {w[0], w[1]};
  }
  s.band_width = p.num("band_width", 1.0);
  s.detector_rate = p.num("detector_rate", 1.0);
  s.atom_beta = p.num("atom_beta", 0.0);
  s.detector_beta = p.num("detector_beta", 0.0);
  s.detector_offset = p.num("detector_offset", 10.0);
  s.horizon = p.num("horizon", 1e6);
  s.host = p.choice<HostLabel>("host", {{"proton", HostLabel::proton}, {"electron", HostLabel::electron}},
                               HostLabel::proton);
  s.seed = seed;
  return s;
}

void cmd_scenario(const Node& p, const fs::path& out, std::uint64_t seed) {
  const ScenarioSpec spec = read_scenario(p, seed);
  const long trials = p.integer("trials", 1000);
  if (trials < 1) throw ConfigError(p.path().empty() ? "trials" : p.path() + ".trials", "must be at least 1");
  const ScenarioResult r = run_decay_detection(spec, static_cast<std::uint64_t>(trials));
  auto os = open_out(out, "scenario.csv");
  CsvWriter w(os, {"trial", "jump_time", "detected", "detection_time", "e_emit", "e_detect"});
  for (const auto& t : r.trials) {
    w.row() << static_cast<unsigned long long>(t.trial) << t.jump_time << t.detected << t.detection_time << t.e_emit
            << t.e_detect;
  }
}

void cmd_collapse_demo(const Node& p, const fs::path& out) {
  const ChartPtr h = Chart::standard();
  const Vec2 source = p.has("source") ? p.at("source").point() : Vec2{0.0, 0.0};
  const Vec2 d1 = p.has("detection_1") ? p.at("detection_1").point() : Vec2{2.0, -1.5};
  const Vec2 d2 = p.has("detection_2") ? p.at("detection_2").point() : Vec2{2.2, 1.5};
  auto csv = open_out(out, "loops.csv");
  CsvWriter w(csv, {"mode", "acyclic", "witness_length", "witness"});
  for (const CollapseMode mode : {CollapseMode::modified, CollapseMode::planar}) {
    History hist({"pair", "up_down", "down_up"});
    hist.add("p1", Event(h, source), "pair", "s1");
    hist.add("p2", Event(h, source), "pair", "s2");
    hist.add("p1", Event(h, d1), "pair", "d1");
    hist.add("p2", Event(h, d2), "pair", "d2");
    hist.apply_collapse(Event(h, d1), "up_down", mode);
    hist.apply_collapse(Event(h, d2), "up_down", mode);
    const LoopCheck lc = causal_loop_check(hist);
    std::string witness;
    if (lc.witness)
      for (std::size_t i : *lc.witness) witness += (witness.empty() ? "" : " ") + hist.nodes()[i].name;
    w.row() << to_string(mode) << lc.acyclic << static_cast<long>(lc.witness ? lc.witness->size() - 1 : 0) << witness;
    auto dot = open_out(out, std::string("collapse_") + to_string(mode) + ".dot");
    dot << to_dot(hist, to_string(mode));
  }
}

void cmd_internal_coords(const Node& p, const fs::path& out) {
  const WaveFunction phi = read_wave(p.at("wave"));
  const Vec2 o = p.has("origin") ? p.at("origin").point() : Vec2{0.0, 0.0};
  const InternalChart chart = build_internal_chart(phi, Event(phi.home(), o));
  const std::vector<double> taus = p.has("taus") ? p.at("taus").numbers() : std::vector<double>{0.0};
  const std::vector<double> sigmas = p.has("sigmas") ? p.at("sigmas").numbers() : std::vector<double>{0.0};
  auto os = open_out(out, "internal.csv");
  CsvWriter w(os, {"tau", "sigma", "t", "x", "re", "im"});
  for (double tau : taus)
    for (double sigma : sigmas) {
      const Event e = chart.event_at(tau, sigma);
      const Complex v = phi.evaluate(e);
      w.row() << tau << sigma << e.point().t << e.point().x << v.real() << v.imag();
    }
  if (phi.normalizable()) {
    auto ns = open_out(out, "normalization.csv");
    CsvWriter n(ns, {"total"});
    n.row() << chart.total_normalization();
  }
}

void cmd_conservation_report(const Node& p, const fs::path& out) {
  const ChartPtr chart = read_chart(p, "chart");
  Region region{-1.0, 1.0, -1.0, 1.0};
  if (p.has("region")) {
    const Node r = p.at("region");
    const Interval t = r.at("t").interval(), x = r.at("x").interval();
    region = {t.lo, t.hi, x.lo, x.hi};
  }
  const int samples = static_cast<int>(p.integer("samples", 9));
  const ConservationReport rep = metric_symmetry_report(*chart, region, samples);
  auto os = open_out(out, "conservation.csv");
  CsvWriter w(os, {"chart", "energy_conserved", "momentum_conserved"});
  w.row() << chart->id() << rep.energy_conserved << rep.momentum_conserved;
}

const std::vector<std::string> kCommands{"trace",        "fraction",     "derive",   "neighborhood",
                                         "doppler",      "interference", "scenario", "collapse-demo",
                                         "internal-coords", "conservation-report"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trans-coordinate wave-packet and light-cone experiments"};
  std::string command, config_path, out_dir;
  std::optional<std::uint64_t> seed_override;
  app.add_option("command", command, "experiment to run")->required()->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--seed", seed_override, "master seed (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  json cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("config", "cannot read " + config_path);
    cfg = json::parse(in);
    const Node root(cfg, "");
    if (root.integer("schema_version", -1) != kSchemaVersion)
      throw ConfigError("schema_version", "expected " + std::to_string(kSchemaVersion));
    if (root.has("command") && root.at("command").str() != command)
      throw ConfigError("command", "config is for '" + root.at("command").str() + "'");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: config: " << e.what() << "\n";
    return 2;
  }

  try {
    const Node root(cfg, "");
    const json empty = json::object();
    const Node params = root.has("params") ? root.at("params") : Node(empty, "params");
    std::uint64_t seed = 0;
    if (root.has("seed")) {
      const long s = root.at("seed").integer();
      if (s < 0) throw ConfigError("seed", "must be non-negative");
      seed = static_cast<std::uint64_t>(s);
    }
    if (seed_override) seed = *seed_override;
    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    if (command == "trace") cmd_trace(params, out);
    else if (command == "fraction") cmd_fraction(params, out);
    else if (command == "derive") cmd_derive(params, out);
    else if (command == "neighborhood") cmd_neighborhood(params, out);
    else if (command == "doppler") cmd_doppler(params, out);
    else if (command == "interference") cmd_interference(params, out);
    else if (command == "scenario") cmd_scenario(params, out, seed);
    else if (command == "collapse-demo") cmd_collapse_demo(params, out);
    else if (command == "internal-coords") cmd_internal_coords(params, out);
    else if (command == "conservation-report") cmd_conservation_report(params, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
