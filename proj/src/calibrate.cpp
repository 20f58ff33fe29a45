#include "fogsim/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fogsim/engine.hpp"

namespace fogsim {

namespace {

constexpr int kMaxBisectionSteps = 60;

struct KnobPath {
  enum class Kind { Node, RoleGroup, LinkClass, Workload, Policy };
  Kind kind = Kind::Node;
  std::string selector;  // node id, role name, or link class
  std::string field;
};

KnobPath parse_path(const std::string& path) {
  KnobPath p;
  auto split_field = [&](const std::string& rest, const std::string& ctx) {
    auto dot = rest.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == rest.size()) {
      throw ConfigError("unknown knob path '" + path + "': expected " + ctx + ".<field>");
    }
    p.selector = rest.substr(0, dot);
    p.field = rest.substr(dot + 1);
  };
  if (path.rfind("node:", 0) == 0) {
    p.kind = KnobPath::Kind::Node;
    split_field(path.substr(5), "node:<id>");
  } else if (path.rfind("role:", 0) == 0) {
    p.kind = KnobPath::Kind::RoleGroup;
    split_field(path.substr(5), "role:<role>");
  } else if (path.rfind("links.", 0) == 0) {
    p.kind = KnobPath::Kind::LinkClass;
    split_field(path.substr(6), "links.<class>");
  } else if (path.rfind("workload.", 0) == 0) {
    p.kind = KnobPath::Kind::Workload;
    p.field = path.substr(9);
  } else if (path.rfind("policy.", 0) == 0) {
    p.kind = KnobPath::Kind::Policy;
    p.field = path.substr(7);
  } else {
    throw ConfigError("unknown knob path '" + path + "'");
  }
  return p;
}

Role parse_role(const std::string& name, const std::string& path) {
  if (name == "robot") return Role::Robot;
  if (name == "frs") return Role::Frs;
  if (name == "sub_frs") return Role::SubFrs;
  if (name == "cloud_region") return Role::CloudRegion;
  throw ConfigError("unknown role '" + name + "' in knob path '" + path + "'");
}

// Link classes pair endpoint roles; FRS and SubFRS both count as fog.
bool link_in_class(const Scenario& s, const LinkSpec& l, const std::string& cls,
                   const std::string& path) {
  const NodeSpec* a = s.find_node(l.a);
  const NodeSpec* b = s.find_node(l.b);
  if (a == nullptr || b == nullptr) return false;
  auto match = [&](Role ra, Role rb) {
    auto fits = [](const NodeSpec& n, Role want) {
      if (want == Role::Frs) return n.is_fog();
      return n.role == want;
    };
    return (fits(*a, ra) && fits(*b, rb)) || (fits(*a, rb) && fits(*b, ra));
  };
  if (cls == "robot_robot") return match(Role::Robot, Role::Robot);
  if (cls == "robot_fog") return match(Role::Robot, Role::Frs);
  if (cls == "fog_fog") return match(Role::Frs, Role::Frs);
  if (cls == "fog_cloud") return match(Role::Frs, Role::CloudRegion);
  throw ConfigError("unknown link class '" + cls + "' in knob path '" + path + "'");
}

double node_field(const NodeSpec& n, const std::string& field, const std::string& path) {
  if (field == "service_time_ms") return n.service_time_ms;
  if (field == "parallel_servers") return static_cast<double>(n.parallel_servers);
  throw ConfigError("unknown node field '" + field + "' in knob path '" + path + "'");
}

void set_node_field(NodeSpec& n, const std::string& field, double v, const std::string& path) {
  if (field == "service_time_ms") {
    n.service_time_ms = v;
  } else if (field == "parallel_servers") {
    n.parallel_servers = static_cast<int>(std::llround(v));
  } else {
    throw ConfigError("unknown node field '" + field + "' in knob path '" + path + "'");
  }
}

}  // namespace

double read_knob(const Scenario& s, const std::string& path) {
  KnobPath p = parse_path(path);
  switch (p.kind) {
    case KnobPath::Kind::Node:
      for (const NodeSpec& n : s.nodes) {
        if (n.id == p.selector) return node_field(n, p.field, path);
      }
      throw ConfigError("knob path '" + path + "' matches no node");
    case KnobPath::Kind::RoleGroup: {
      Role role = parse_role(p.selector, path);
      for (const NodeSpec& n : s.nodes) {
        if (n.role == role) return node_field(n, p.field, path);
      }
      throw ConfigError("knob path '" + path + "' matches no node");
    }
    case KnobPath::Kind::LinkClass: {
      if (p.field != "one_way_ms") {
        throw ConfigError("unknown link field '" + p.field + "' in knob path '" + path + "'");
      }
      for (const LinkSpec& l : s.links) {
        if (link_in_class(s, l, p.selector, path)) return l.one_way.avg_ms;
      }
      throw ConfigError("knob path '" + path + "' matches no link");
    }
    case KnobPath::Kind::Workload: {
      if (s.workload.empty()) throw ConfigError("knob path '" + path + "' matches no stream");
      if (p.field == "interval_ms") return s.workload.front().interval_ms;
      if (p.field == "rate_rps") return s.workload.front().rate_rps;
      throw ConfigError("unknown workload field '" + p.field + "' in knob path '" + path + "'");
    }
    case KnobPath::Kind::Policy:
      if (p.field == "d2d_internal_lag_ms") return s.policy.d2d_internal_lag_ms;
      throw ConfigError("unknown policy field '" + p.field + "' in knob path '" + path + "'");
  }
  throw ConfigError("unknown knob path '" + path + "'");
}

void apply_knob(Scenario& s, const std::string& path, double value) {
  KnobPath p = parse_path(path);
  switch (p.kind) {
    case KnobPath::Kind::Node: {
      for (NodeSpec& n : s.nodes) {
        if (n.id == p.selector) {
          set_node_field(n, p.field, value, path);
          return;
        }
      }
      throw ConfigError("knob path '" + path + "' matches no node");
    }
    case KnobPath::Kind::RoleGroup: {
      Role role = parse_role(p.selector, path);
      bool hit = false;
      for (NodeSpec& n : s.nodes) {
        if (n.role == role) {
          set_node_field(n, p.field, value, path);
          hit = true;
        }
      }
      if (!hit) throw ConfigError("knob path '" + path + "' matches no node");
      return;
    }
    case KnobPath::Kind::LinkClass: {
      if (p.field != "one_way_ms") {
        throw ConfigError("unknown link field '" + p.field + "' in knob path '" + path + "'");
      }
      bool hit = false;
      for (LinkSpec& l : s.links) {
        if (link_in_class(s, l, p.selector, path)) {
          l.one_way = LatencyModel::constant(value);
          hit = true;
        }
      }
      if (!hit) throw ConfigError("knob path '" + path + "' matches no link");
      return;
    }
    case KnobPath::Kind::Workload: {
      if (s.workload.empty()) throw ConfigError("knob path '" + path + "' matches no stream");
      for (WorkloadStream& w : s.workload) {
        if (p.field == "interval_ms") {
          w.interval_ms = value;
        } else if (p.field == "rate_rps") {
          w.rate_rps = value;
        } else {
          throw ConfigError("unknown workload field '" + p.field + "' in knob path '" + path +
                            "'");
        }
      }
      return;
    }
    case KnobPath::Kind::Policy: {
      if (p.field == "d2d_internal_lag_ms") {
        s.policy.d2d_internal_lag_ms = value;
        return;
      }
      throw ConfigError("unknown policy field '" + p.field + "' in knob path '" + path + "'");
    }
  }
  throw ConfigError("unknown knob path '" + path + "'");
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Runs the scenario and reports mean latency over completed requests.
struct Evaluator {
  Scenario* s;
  std::string knob;
  int evals = 0;

  double at(double value) {
    apply_knob(*s, knob, value);
    ++evals;
    RunResult r = run(*s);
    if (!r.overall.has_values()) {
      throw ConfigError("calibration run for knob '" + knob + "' completed no requests");
    }
    return r.overall.mean_ms;
  }
};

struct Band {
  double target = 0.0;
  double tol = 0.0;
  bool within(double m) const { return std::abs(m - target) <= tol * std::abs(target); }
};

FittedKnob fitted(const std::string& path, double value, double achieved, int evals) {
  FittedKnob f;
  f.path = path;
  f.value = value;
  f.achieved_ms = achieved;
  f.evaluations = evals;
  return f;
}

// Standard bisection on a bracketing interval. Endpoints were already
// evaluated; the first midpoint doubles as the monotonicity probe.
FittedKnob bisect(Evaluator& ev, const Band& band, double a, double b, double ma, double mb,
                  const std::string& label) {
  bool probed = false;
  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    double mid = 0.5 * (a + b);
    double mm = ev.at(mid);
    if (!probed) {
      // End-of-run truncation wiggles the metric by less than the tolerance
      // band; anything past the band is genuine non-monotonicity.
      double slack = band.tol * std::abs(band.target) + 1e-9;
      if (mm < std::min(ma, mb) - slack || mm > std::max(ma, mb) + slack) {
        throw CalibrationError(CalibrationError::Kind::NonMonotone, ev.knob,
                               "knob '" + ev.knob + "' is not monotone for target '" + label +
                                   "': metric " + fmt(mm) + " at " + fmt(mid) +
                                   " falls outside endpoint metrics [" + fmt(std::min(ma, mb)) +
                                   ", " + fmt(std::max(ma, mb)) + "]");
      }
      probed = true;
    }
    if (band.within(mm)) return fitted(ev.knob, mid, mm, ev.evals);
    if ((mm - band.target) * (ma - band.target) > 0) {
      a = mid;
      ma = mm;
    } else {
      b = mid;
      mb = mm;
    }
  }
  throw CalibrationError(CalibrationError::Kind::NotConverged, ev.knob,
                         "knob '" + ev.knob + "' did not reach target '" + label + "' (" +
                             fmt(band.target) + " ±" + fmt(band.tol * 100) + "%) within " +
                             std::to_string(kMaxBisectionSteps) + " bisection steps");
}

// Single continuous knob: fixed point first, then endpoints, then bisect.
FittedKnob fit_continuous(Scenario& s, const Knob& k, const Band& band,
                          const std::string& label) {
  Evaluator ev{&s, k.path};
  double cur = read_knob(s, k.path);
  double mc = ev.at(cur);
  if (band.within(mc)) return fitted(k.path, cur, mc, ev.evals);
  double ma = ev.at(k.lo);
  if (band.within(ma)) return fitted(k.path, k.lo, ma, ev.evals);
  double mb = ev.at(k.hi);
  if (band.within(mb)) return fitted(k.path, k.hi, mb, ev.evals);
  if ((ma - band.target) * (mb - band.target) > 0) {
    throw CalibrationError(CalibrationError::Kind::Unbracketable, k.path,
                           "knob '" + k.path + "' cannot bracket target '" + label + "' (" +
                               fmt(band.target) + "): metric spans [" + fmt(std::min(ma, mb)) +
                               ", " + fmt(std::max(ma, mb)) + "] over [" + fmt(k.lo) + ", " +
                               fmt(k.hi) + "]");
  }
  return bisect(ev, band, k.lo, k.hi, ma, mb, label);
}

// Integer knob alone: ascending scan, first value within tolerance wins.
FittedKnob fit_integer(Scenario& s, const Knob& k, const Band& band, const std::string& label) {
  Evaluator ev{&s, k.path};
  double cur = read_knob(s, k.path);
  double mc = ev.at(cur);
  if (band.within(mc)) return fitted(k.path, cur, mc, ev.evals);
  long lo = std::lround(std::ceil(k.lo));
  long hi = std::lround(std::floor(k.hi));
  for (long c = lo; c <= hi; ++c) {
    double m = ev.at(static_cast<double>(c));
    if (band.within(m)) return fitted(k.path, static_cast<double>(c), m, ev.evals);
  }
  throw CalibrationError(CalibrationError::Kind::Unbracketable, k.path,
                         "no integer value of knob '" + k.path + "' in [" + fmt(k.lo) + ", " +
                             fmt(k.hi) + "] reaches target '" + label + "' (" + fmt(band.target) +
                             ")");
}

// Integer knob followed by a continuous one, both serving one target: scan
// the integer ascending until the continuous range brackets, then bisect.
std::pair<FittedKnob, FittedKnob> fit_compound(Scenario& s, const Knob& ik, const Knob& ck,
                                               const Band& band, const std::string& label) {
  Evaluator scan{&s, ik.path};
  double cur_i = read_knob(s, ik.path);
  double cur_c = read_knob(s, ck.path);
  apply_knob(s, ck.path, cur_c);
  double mc = scan.at(cur_i);
  if (band.within(mc)) {
    return {fitted(ik.path, cur_i, mc, scan.evals), fitted(ck.path, cur_c, mc, 0)};
  }
  long lo = std::lround(std::ceil(ik.lo));
  long hi = std::lround(std::floor(ik.hi));
  for (long c = lo; c <= hi; ++c) {
    apply_knob(s, ik.path, static_cast<double>(c));
    Evaluator ev{&s, ck.path};
    double ma = ev.at(ck.lo);
    if (band.within(ma)) {
      return {fitted(ik.path, static_cast<double>(c), ma, scan.evals),
              fitted(ck.path, ck.lo, ma, ev.evals)};
    }
    double mb = ev.at(ck.hi);
    if (band.within(mb)) {
      return {fitted(ik.path, static_cast<double>(c), mb, scan.evals),
              fitted(ck.path, ck.hi, mb, ev.evals)};
    }
    if ((ma - band.target) * (mb - band.target) > 0) continue;  // next capacity
    FittedKnob fc = bisect(ev, band, ck.lo, ck.hi, ma, mb, label);
    return {fitted(ik.path, static_cast<double>(c), fc.achieved_ms, scan.evals), fc};
  }
  throw CalibrationError(CalibrationError::Kind::Unbracketable, ik.path,
                         "no integer value of knob '" + ik.path + "' in [" + fmt(ik.lo) + ", " +
                             fmt(ik.hi) + "] lets knob '" + ck.path + "' bracket target '" +
                             label + "' (" + fmt(band.target) + ")");
}

}  // namespace

CalibrationResult calibrate(const std::vector<CalibrationTarget>& targets,
                            const std::vector<Knob>& knobs) {
  CalibrationResult out;
  std::vector<std::pair<std::string, double>> fitted_so_far;
  std::size_t kcur = 0;
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    const CalibrationTarget& t = targets[ti];
    if (kcur >= knobs.size()) {
      throw ConfigError("calibrate: more targets than knobs (target '" + t.label + "' unpaired)");
    }
    Scenario s = t.scenario;
    for (const auto& [path, value] : fitted_so_far) {
      try {
        apply_knob(s, path, value);  // carry earlier fits into later scenarios
      } catch (const ConfigError&) {
        // path has no counterpart here; leave this scenario untouched
      }
    }
    Band band{t.target_ms, t.tolerance_fraction};
    std::size_t remaining_knobs = knobs.size() - kcur;
    std::size_t remaining_targets = targets.size() - ti;
    bool compound = knobs[kcur].integer && kcur + 1 < knobs.size() &&
                    !knobs[kcur + 1].integer && remaining_knobs == remaining_targets + 1;
    if (compound) {
      auto [fi, fc] = fit_compound(s, knobs[kcur], knobs[kcur + 1], band, t.label);
      fi.label = t.label;
      fc.label = t.label;
      out.fitted.push_back(fi);
      out.fitted.push_back(fc);
      fitted_so_far.emplace_back(fi.path, fi.value);
      fitted_so_far.emplace_back(fc.path, fc.value);
      kcur += 2;
    } else {
      FittedKnob f = knobs[kcur].integer ? fit_integer(s, knobs[kcur], band, t.label)
                                         : fit_continuous(s, knobs[kcur], band, t.label);
      f.label = t.label;
      out.fitted.push_back(f);
      fitted_so_far.emplace_back(f.path, f.value);
      kcur += 1;
    }
  }
  if (kcur != knobs.size()) {
    throw ConfigError("calibrate: " + std::to_string(knobs.size() - kcur) +
                      " knob(s) left unpaired with any target");
  }
  return out;
}

}  // namespace fogsim
