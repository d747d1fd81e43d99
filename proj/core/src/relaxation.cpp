#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hasa/valuation.hpp"

namespace hasa {

namespace {

struct Point {
  double d = 0.0;  // delay coordinate
  double g = 0.0;  // acting advantage over the non-policy action
};

struct Edge {
  Point step;
  double angle = 0.0;
};

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.d - o.d) * (b.g - o.g) - (a.g - o.g) * (b.d - o.d);
}

// Counter-clockwise hull starting at the lowest (then leftmost) vertex, written to the
// front of `hull`. Returns the vertex count.
std::size_t convex_hull(std::vector<Point>& pts, std::vector<Point>& hull) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.d < b.d || (a.d == b.d && a.g < b.g); });
  if (pts.size() == 1) {
    hull.assign(1, pts[0]);
    return 1;
  }
  if (hull.size() < 2 * pts.size()) hull.resize(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  --k;
  const auto start = std::min_element(hull.begin(), hull.begin() + k, [](const Point& a, const Point& b) {
    return a.g < b.g || (a.g == b.g && a.d < b.d);
  });
  std::rotate(hull.begin(), start, hull.begin() + k);
  return k;
}

// Monotone in the counter-clockwise angle of `e`, in [0, 4).
double edge_angle(const Point& e) {
  if (e.g >= 0.0) return e.d >= 0.0 ? e.g / (e.d + e.g) : 1.0 - e.d / (e.g - e.d);
  return e.d < 0.0 ? 2.0 - e.g / (-e.d - e.g) : 3.0 + e.d / (e.d - e.g);
}

// max over t in [0, 1] of (k - d(t)) * g(t) along p + t * e.
double segment_max(double k, const Point& p, const Point& e) {
  const double a = -e.d * e.g;
  const double b = (k - p.d) * e.g - e.d * p.g;
  const double c = (k - p.d) * p.g;
  double best = std::max(c, a + b + c);
  if (a < 0.0) {
    const double t = -b / (2.0 * a);
    if (t > 0.0 && t < 1.0) best = std::max(best, (a * t + b) * t + c);
  }
  return best;
}

struct Undecided {
  StateIndex state = 0;
  double mass = 0.0;              // p_c(state | true state)
  std::vector<double> conflict;   // delay forced by each action, per policy action
};

struct StateTerms {
  double forced_delay = 0.0;  // conflicts every completion incurs
  double open_delay = 0.0;    // events that may or may not conflict
  std::vector<double> decided_mass;
  std::vector<Undecided> open;
};

std::vector<StateTerms> collect_terms(const HasaMdp& model, const PartialPolicy& partial) {
  const std::size_t n = model.num_states();
  const std::size_t num_actions = model.num_actions();
  std::vector<StateTerms> terms(n);
  std::vector<double> agree(n * num_actions, 0.0);
  std::vector<double> total(n, 0.0);

  for (StateIndex s = 0; s < n; ++s) {
    StateTerms& st = terms[s];
    const double psi = model.patience(s);
    st.decided_mass.assign(num_actions, 0.0);
    std::fill(agree.begin(), agree.end(), 0.0);
    std::fill(total.begin(), total.end(), 0.0);

    for (const auto& event : model.uncertainty().events_for(s)) {
      if (event.is_confident()) continue;
      ActionIndex shared = PartialPolicy::kUndecided;
      bool split = false;
      std::size_t undecided = 0;
      StateIndex open = 0;
      auto visit = [&](StateIndex member) {
        if (!partial.decided(member)) {
          ++undecided;
          open = member;
        } else if (shared == PartialPolicy::kUndecided) {
          shared = partial[member];
        } else if (partial[member] != shared) {
          split = true;
        }
      };
      visit(event.best_guess);
      for (StateIndex alt : event.alternates) visit(alt);

      if (split) {
        st.forced_delay += psi * event.weight;
      } else if (undecided == 1 && shared != PartialPolicy::kUndecided) {
        total[open] += event.weight;
        agree[open * num_actions + shared] += event.weight;
      } else if (undecided >= 1) {
        st.open_delay += psi * event.weight;
      }
    }

    for (StateIndex u = 0; u < n; ++u) {
      const double mass = model.classification(s, u);
      if (partial.decided(u)) {
        st.decided_mass[partial[u]] += mass;
        continue;
      }
      if (mass == 0.0 && total[u] == 0.0) continue;
      Undecided entry{u, mass, std::vector<double>(num_actions)};
      for (ActionIndex a = 0; a < num_actions; ++a) entry.conflict[a] = psi * (total[u] - agree[u * num_actions + a]);
      if (mass == 0.0) {
        // Only the cheapest action matters when the guess carries no classification mass.
        const double low = *std::min_element(entry.conflict.begin(), entry.conflict.end());
        const double high = *std::max_element(entry.conflict.begin(), entry.conflict.end());
        st.forced_delay += low;
        st.open_delay += high - low;
        continue;
      }
      st.open.push_back(std::move(entry));
    }
  }
  return terms;
}

}  // namespace

UpperBound coupled_upper_bound(const HasaMdp& model, const PartialPolicy& partial, std::size_t max_iters,
                               double epsilon_target, const EarlyStop* early_stop) {
  if (max_iters == 0) throw std::invalid_argument("coupled_upper_bound needs at least one iteration");
  const std::size_t n = model.num_states();
  const std::size_t num_actions = model.num_actions();
  const ActionIndex np = model.non_policy_index();
  const double gamma = model.discount();
  const std::vector<StateTerms> terms = collect_terms(model, partial);

  struct Successor {
    StateIndex t;
    double p;
  };
  std::vector<Successor> successors;
  std::vector<std::size_t> row_start{0};
  for (StateIndex s = 0; s < n; ++s) {
    for (ActionIndex b = 0; b <= num_actions; ++b) {
      const auto row = model.transition_row(s, b);
      for (StateIndex t = 0; t < n; ++t) {
        if (row[t] != 0.0) successors.push_back({t, row[t]});
      }
      row_start.push_back(successors.size());
    }
  }

  ValueVector prev(n, 0.0);
  ValueVector next(n, 0.0);
  std::vector<double> q(num_actions + 1);
  std::vector<Point> pts;
  std::vector<Point> hull;
  std::vector<Edge> edges;
  double delta = 0.0;
  bool stopped_early = false;
  std::size_t k = 0;
  while (k < max_iters) {
    ++k;
    delta = 0.0;
    for (StateIndex s = 0; s < n; ++s) {
      for (ActionIndex b = 0; b <= num_actions; ++b) {
        const std::size_t row = s * (num_actions + 1) + b;
        double ev = 0.0;
        for (std::size_t i = row_start[row]; i < row_start[row + 1]; ++i) ev += successors[i].p * prev[successors[i].t];
        q[b] = model.reward(s, b) + gamma * ev;
      }
      const StateTerms& st = terms[s];
      Point start{st.forced_delay, 0.0};
      for (ActionIndex a = 0; a < num_actions; ++a) start.g += st.decided_mass[a] * (q[a] - q[np]);

      edges.clear();
      for (const Undecided& u : st.open) {
        pts.resize(num_actions);
        for (ActionIndex a = 0; a < num_actions; ++a) pts[a] = {u.conflict[a], u.mass * (q[a] - q[np])};
        const std::size_t vertices = convex_hull(pts, hull);
        start.d += hull[0].d;
        start.g += hull[0].g;
        if (vertices < 2) continue;
        for (std::size_t i = 0; i < vertices; ++i) {
          const Point& from = hull[i];
          const Point& to = hull[(i + 1) % vertices];
          const Point step{to.d - from.d, to.g - from.g};
          if (step.d == 0.0 && step.g == 0.0) continue;
          edges.push_back({step, edge_angle(step)});
        }
      }
      std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.angle < y.angle; });

      const double k_low = 1.0;
      const double k_high = 1.0 - st.open_delay;
      double best = std::max((k_low - start.d) * start.g, (k_high - start.d) * start.g);
      Point p = start;
      for (const Edge& e : edges) {
        best = std::max({best, segment_max(k_low, p, e.step), segment_max(k_high, p, e.step)});
        p.d += e.step.d;
        p.g += e.step.g;
      }
      next[s] = q[np] + best;
      delta = std::max(delta, std::abs(next[s] - prev[s]));
    }
    std::swap(prev, next);
    if (delta <= epsilon_target) break;
    if (early_stop && early_stop->decided(prev, delta, gamma)) {
      stopped_early = true;
      break;
    }
  }
  const double correction = gamma < 1.0 ? delta * gamma / (1.0 - gamma) : std::numeric_limits<double>::infinity();
  UpperBound out;
  out.stopped_early = stopped_early;
  out.upper.resize(n);
  for (StateIndex s = 0; s < n; ++s) out.upper[s] = prev[s] + correction;
  out.iterations = k;
  out.final_delta = delta;
  return out;
}

}  // namespace hasa
