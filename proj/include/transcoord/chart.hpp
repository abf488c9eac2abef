#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "transcoord/error.hpp"
#include "transcoord/numeric.hpp"

namespace transcoord {

// Metric coefficients of a diagonal 1+1 metric at one point.
struct MetricCoefficients {
  double gtt;
  double gxx;

  double dot(Vec2 u, Vec2 v) const noexcept { return gtt * u.t * v.t + gxx * u.x * v.x; }
  double norm2(Vec2 u) const noexcept { return dot(u, u); }
};

struct MinkowskiForm {};

// ds^2 = g_tt(t, x) dt^2 + g_xx(t, x) dx^2. Derivative callables are optional;
// when absent the geodesic solver differentiates numerically.
struct DiagonalForm {
  std::function<double(double, double)> gtt;
  std::function<double(double, double)> gxx;
  std::function<Vec2(double, double)> dgtt;  // (d/dt, d/dx) of g_tt
  std::function<Vec2(double, double)> dgxx;
};

using MetricForm = std::variant<MinkowskiForm, DiagonalForm>;

// Static diagonal form: coefficients depend on the space parameter only.
inline DiagonalForm static_diagonal(std::function<double(double)> gtt, std::function<double(double)> gxx) {
  DiagonalForm form;
  form.gtt = [gtt](double, double x) { return gtt(x); };
  form.gxx = [gxx](double, double x) { return gxx(x); };
  return form;
}

// A registered map from a derived chart to its parent chart. The jacobian of
// to_parent is optional; a fourth-order central difference stands in for it.
struct ChartMap {
  std::function<Vec2(Vec2)> to_parent;
  std::function<Vec2(Vec2)> from_parent;
  std::function<Mat2(Vec2)> jacobian_to_parent;
};

class Chart;
using ChartPtr = std::shared_ptr<const Chart>;

// A private computational chart (one time, one space parameter). Charts form
// a tree through registered maps; events on charts that share a root are
// comparable.
class Chart {
 public:
  Chart(std::string id, MetricForm form, ChartPtr parent = nullptr, ChartMap map = {})
      : id_(std::move(id)), form_(std::move(form)), parent_(std::move(parent)), map_(std::move(map)) {
    if (parent_) {
      require(static_cast<bool>(map_.to_parent) && static_cast<bool>(map_.from_parent), ErrorCode::invalid_argument,
              "chart '" + id_ + "' needs forward and inverse maps to its parent");
    }
    if (const auto* d = std::get_if<DiagonalForm>(&form_)) {
      require(static_cast<bool>(d->gtt) && static_cast<bool>(d->gxx), ErrorCode::invalid_metric,
              "chart '" + id_ + "' has an empty metric coefficient");
    }
  }

  static ChartPtr minkowski(std::string id = "minkowski") {
    return std::make_shared<const Chart>(std::move(id), MinkowskiForm{});
  }
  // Shared flat chart used as the default home of wave functions and photons.
  static const ChartPtr& standard() {
    static const ChartPtr chart = minkowski("standard");
    return chart;
  }
  static ChartPtr diagonal(std::string id, DiagonalForm form) {
    return std::make_shared<const Chart>(std::move(id), std::move(form));
  }
  static ChartPtr derived(std::string id, ChartPtr parent, ChartMap map, MetricForm form) {
    require(parent != nullptr, ErrorCode::invalid_argument, "derived chart needs a parent");
    return std::make_shared<const Chart>(std::move(id), std::move(form), std::move(parent), std::move(map));
  }

  const std::string& id() const noexcept { return id_; }
  const MetricForm& form() const noexcept { return form_; }
  bool is_minkowski() const noexcept { return std::holds_alternative<MinkowskiForm>(form_); }
  const ChartPtr& parent() const noexcept { return parent_; }
  const ChartMap& map() const noexcept { return map_; }

  const Chart* root() const noexcept {
    const Chart* c = this;
    while (c->parent_) c = c->parent_.get();
    return c;
  }

  MetricCoefficients metric(Vec2 p) const {
    if (is_minkowski()) return {-1.0, 1.0};
    const auto& d = std::get<DiagonalForm>(form_);
    const MetricCoefficients g{d.gtt(p.t, p.x), d.gxx(p.t, p.x)};
    if (!(g.gtt < 0.0) || !(g.gxx > 0.0)) {
      fail(ErrorCode::invalid_metric, "chart '" + id_ + "' loses (-,+) signature at t=" + std::to_string(p.t) +
                                          " x=" + std::to_string(p.x));
    }
    return g;
  }

  // Partial derivatives of the metric coefficients: {d g_tt, d g_xx}, each as (d/dt, d/dx).
  std::pair<Vec2, Vec2> metric_gradient(Vec2 p) const {
    if (is_minkowski()) return {Vec2{}, Vec2{}};
    const auto& d = std::get<DiagonalForm>(form_);
    const double ht = 1e-3 * std::max(1.0, std::abs(p.t));
    const double hx = 1e-3 * std::max(1.0, std::abs(p.x));
    auto grad = [&](const std::function<double(double, double)>& g, const std::function<Vec2(double, double)>& dg) {
      if (dg) return dg(p.t, p.x);
      return Vec2{detail::central_derivative([&](double t) { return g(t, p.x); }, p.t, ht),
                  detail::central_derivative([&](double x) { return g(p.t, x); }, p.x, hx)};
    };
    return {grad(d.gtt, d.dgtt), grad(d.gxx, d.dgxx)};
  }

  // Jacobian of this chart's map to its parent at p (this chart's parameters).
  Mat2 jacobian_to_parent(Vec2 p) const {
    if (map_.jacobian_to_parent) return map_.jacobian_to_parent(p);
    const double h = 1e-4 * std::max(1.0, max_abs(p));
    auto col = [&](Vec2 e) {
      auto f = [&](double s) { return map_.to_parent(p + e * s); };
      auto d = [&](auto proj) {
        return (-proj(f(2 * h)) + 8 * proj(f(h)) - 8 * proj(f(-h)) + proj(f(-2 * h))) / (12 * h);
      };
      return Vec2{d([](Vec2 v) { return v.t; }), d([](Vec2 v) { return v.x; })};
    };
    const Vec2 ct = col({1.0, 0.0});
    const Vec2 cx = col({0.0, 1.0});
    return {ct.t, cx.t, ct.x, cx.x};
  }

 private:
  std::string id_;
  MetricForm form_;
  ChartPtr parent_;
  ChartMap map_;
};

namespace detail {

inline std::vector<const Chart*> ancestry(const Chart& c) {
  std::vector<const Chart*> chain;
  for (const Chart* p = &c; p != nullptr; p = p->parent().get()) chain.push_back(p);
  return chain;  // chain.front() == &c, chain.back() == root
}

inline Vec2 point_to_root(const Chart& c, Vec2 p) {
  for (const Chart* q = &c; q->parent(); q = q->parent().get()) p = q->map().to_parent(p);
  return p;
}

inline Vec2 point_from_root(const Chart& c, Vec2 p) {
  const auto chain = ancestry(c);
  for (auto it = chain.rbegin() + 1; it != chain.rend(); ++it) p = (*it)->map().from_parent(p);
  return p;
}

// d(root parameters)/d(chart parameters) at p.
inline Mat2 jacobian_to_root(const Chart& c, Vec2 p) {
  Mat2 jac{};
  for (const Chart* q = &c; q->parent(); q = q->parent().get()) {
    jac = q->jacobian_to_parent(p) * jac;
    p = q->map().to_parent(p);
  }
  return jac;
}

inline void require_same_root(const Chart& a, const Chart& b) {
  require(a.root() == b.root(), ErrorCode::chart_mismatch,
          "charts '" + a.id() + "' and '" + b.id() + "' are not connected by registered maps");
}

}  // namespace detail

// A point of the metric space, represented on a private chart.
class Event {
 public:
  Event(ChartPtr chart, double t, double x) : chart_(std::move(chart)), point_{t, x} {
    require(chart_ != nullptr, ErrorCode::invalid_argument, "event needs a chart");
  }
  Event(ChartPtr chart, Vec2 p) : Event(std::move(chart), p.t, p.x) {}

  const ChartPtr& chart() const noexcept { return chart_; }
  // Chart parameters; plumbing for the library and its tests.
  Vec2 point() const noexcept { return point_; }

  Vec2 point_in(const Chart& target) const {
    if (&target == chart_.get()) return point_;
    detail::require_same_root(*chart_, target);
    return detail::point_from_root(target, detail::point_to_root(*chart_, point_));
  }

  Event in_chart(const ChartPtr& target) const { return Event(target, point_in(*target)); }

  bool comparable(const Event& other) const noexcept { return chart_->root() == other.chart_->root(); }

 private:
  ChartPtr chart_;
  Vec2 point_;
};

// Geometric equality: images in a common chart coincide within tol.
inline bool approx_equal(const Event& a, const Event& b, double tol = 1e-9) {
  const Vec2 pa = a.point();
  const Vec2 pb = b.point_in(*a.chart());
  return max_abs(pa - pb) <= tol * std::max(1.0, max_abs(pa));
}

inline bool operator==(const Event& a, const Event& b) { return approx_equal(a, b); }

// Pushforward of tangent components from one chart to another at the same event.
inline Vec2 push_components(const Event& at, Vec2 comps, const Chart& target) {
  const Chart& from = *at.chart();
  if (&from == &target) return comps;
  detail::require_same_root(from, target);
  const Vec2 root_comps = detail::jacobian_to_root(from, at.point()) * comps;
  const Mat2 target_to_root = detail::jacobian_to_root(target, at.point_in(target));
  return target_to_root.inverse() * root_comps;
}

}  // namespace transcoord
