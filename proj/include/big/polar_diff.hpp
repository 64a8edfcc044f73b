#pragma once

// Cartesian first and second derivatives at polar nodes via the chain rule.
// Radial stencils are central in the interior and one-sided second order at
// r = 1 and r = R. Angular stencils use the weights 1/(2 sin dθ) and
// 1/(2(1 - cos dθ)), which keep second order and reproduce constants, cos θ
// and sin θ exactly; together with the radial stencils this makes every
// affine Cartesian field differentiate without truncation error.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "big/model_core.hpp"

namespace big {

struct Deriv2 {
  double fx = 0.0, fy = 0.0, fxx = 0.0, fxy = 0.0, fyy = 0.0;

  double laplacian() const { return fxx + fyy; }
  Vec2 gradient() const { return {fx, fy}; }
};

class PolarDiff {
 public:
  explicit PolarDiff(Grid g) : grid_(std::move(g)) { build(); }

  const Grid& grid() const { return grid_; }

  Deriv2 at(std::span<const double> f, std::size_t k) const {
    Deriv2 d;
    for (std::uint32_t e = start_[k]; e < start_[k + 1]; ++e) {
      const double v = f[index_[e]];
      const double* w = &weight_[5 * e];
      d.fx += w[0] * v;
      d.fy += w[1] * v;
      d.fxx += w[2] * v;
      d.fxy += w[3] * v;
      d.fyy += w[4] * v;
    }
    return d;
  }

  Vec2 grad(std::span<const double> f, std::size_t k) const {
    Vec2 g;
    for (std::uint32_t e = start_[k]; e < start_[k + 1]; ++e) {
      const double v = f[index_[e]];
      g.x += weight_[5 * e] * v;
      g.y += weight_[5 * e + 1] * v;
    }
    return g;
  }

  /// Stencil entries of node k: neighbor indices and weights (dx, dy, dxx, dxy, dyy).
  struct Entry {
    std::size_t node;
    std::array<double, 5> w;
  };
  std::vector<Entry> stencil(std::size_t k) const {
    std::vector<Entry> out;
    for (std::uint32_t e = start_[k]; e < start_[k + 1]; ++e)
      out.push_back({index_[e], {weight_[5 * e], weight_[5 * e + 1], weight_[5 * e + 2],
                                 weight_[5 * e + 3], weight_[5 * e + 4]}});
    return out;
  }

 private:
  struct RadialStencil {
    int n = 0;
    std::array<int, 4> ring{};
    std::array<double, 4> d1{}, d2{};
  };

  RadialStencil radial(int i) const {
    const Grid& g = grid_;
    const double h = g.dr(), h2 = h * h;
    const int last = g.nr() - 1;
    RadialStencil s;
    if (i == 0) {
      s.n = 4;
      s.ring = {0, 1, 2, 3};
      s.d1 = {-1.5 / h, 2.0 / h, -0.5 / h, 0.0};
      s.d2 = {2.0 / h2, -5.0 / h2, 4.0 / h2, -1.0 / h2};
    } else if (i == last) {
      s.n = 4;
      s.ring = {last, last - 1, last - 2, last - 3};
      s.d1 = {1.5 / h, -2.0 / h, 0.5 / h, 0.0};
      s.d2 = {2.0 / h2, -5.0 / h2, 4.0 / h2, -1.0 / h2};
    } else {
      s.n = 3;
      s.ring = {i - 1, i, i + 1, 0};
      s.d1 = {-0.5 / h, 0.0, 0.5 / h, 0.0};
      s.d2 = {1.0 / h2, -2.0 / h2, 1.0 / h2, 0.0};
    }
    return s;
  }

  void build() {
    const Grid& g = grid_;
    const double dth = g.dtheta();
    const double c1 = 1.0 / (2.0 * std::sin(dth));
    const double c2 = 1.0 / (2.0 * (1.0 - std::cos(dth)));
    start_.assign(1, 0);

    for (int i = 0; i < g.nr(); ++i) {
      const RadialStencil rs = radial(i);
      const double r = g.r(i);
      for (int j = 0; j < g.nt(); ++j) {
        const double c = g.cos_theta(j), s = g.sin_theta(j);
        // Polar-derivative weights per neighbor: fr, frr, fth, fthth, frth.
        std::vector<Entry> local;
        auto add = [&](std::size_t node, double fr, double frr, double ft, double ftt, double frt) {
          const std::array<double, 5> w = {
              c * fr - s / r * ft,
              s * fr + c / r * ft,
              c * c * frr - 2 * c * s / r * frt + s * s / (r * r) * ftt + s * s / r * fr + 2 * c * s / (r * r) * ft,
              c * s * frr + (c * c - s * s) / r * frt - c * s / (r * r) * ftt - c * s / r * fr - (c * c - s * s) / (r * r) * ft,
              s * s * frr + 2 * c * s / r * frt + c * c / (r * r) * ftt + c * c / r * fr - 2 * c * s / (r * r) * ft,
          };
          for (auto& e : local)
            if (e.node == node) {
              for (int q = 0; q < 5; ++q) e.w[q] += w[q];
              return;
            }
          local.push_back({node, w});
        };
        for (int a = 0; a < rs.n; ++a) {
          const int ia = rs.ring[a];
          add(g.index(ia, j), rs.d1[a], rs.d2[a], 0.0, 0.0, 0.0);
          add(g.index(ia, j + 1), 0.0, 0.0, 0.0, 0.0, rs.d1[a] * c1);
          add(g.index(ia, j - 1), 0.0, 0.0, 0.0, 0.0, -rs.d1[a] * c1);
        }
        add(g.index(i, j + 1), 0.0, 0.0, c1, c2, 0.0);
        add(g.index(i, j - 1), 0.0, 0.0, -c1, c2, 0.0);
        add(g.index(i, j), 0.0, 0.0, 0.0, -2.0 * c2, 0.0);

        for (const auto& e : local) {
          index_.push_back(static_cast<std::uint32_t>(e.node));
          weight_.insert(weight_.end(), e.w.begin(), e.w.end());
        }
        start_.push_back(static_cast<std::uint32_t>(index_.size()));
      }
    }
  }

  Grid grid_;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> index_;
  std::vector<double> weight_;
};

}  // namespace big
