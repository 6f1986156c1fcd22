#include "roa/contour.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>

#include "roa/kernels.hpp"

namespace roa {

namespace {

// Node values of V on a resolution^n lattice including the box faces.
std::vector<double> node_values(const Polynomial& V, const Box& box, int resolution) {
  const int n = box.nvars();
  std::size_t npts = 1;
  for (int d = 0; d < n; ++d) npts *= static_cast<std::size_t>(resolution);
  std::vector<std::vector<double>> coords(n, std::vector<double>(npts));
  for (std::size_t flat = 0; flat < npts; ++flat) {
    std::size_t rest = flat;
    for (int d = 0; d < n; ++d) {
      const std::size_t idx = rest % resolution;
      rest /= resolution;
      coords[d][flat] =
          box.lo[d] + static_cast<double>(idx) * (box.hi[d] - box.lo[d]) / (resolution - 1);
    }
  }
  std::vector<const double*> xs(n);
  for (int d = 0; d < n; ++d) xs[d] = coords[d].data();
  std::vector<double> out(npts);
  kernels::eval_batch(kernels::CompiledPoly::compile(V), xs.data(), out.data(), npts);
  return out;
}

struct Segment {
  std::int64_t e0, e1;
  bool used = false;
};

}  // namespace

std::vector<Polyline> marching_squares(const Polynomial& V, double gamma, const Box& box,
                                       int resolution) {
  box.validate();
  if (box.nvars() != 2) throw std::invalid_argument("marching squares needs a 2-D box");
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  if (V.nvars() != 2) throw std::invalid_argument("polynomial dimension mismatch");

  const int res = resolution;
  const std::vector<double> v = node_values(V, box, res);
  const double hx = (box.hi[0] - box.lo[0]) / (res - 1);
  const double hy = (box.hi[1] - box.lo[1]) / (res - 1);
  auto node_x = [&](int i) { return box.lo[0] + i * hx; };
  auto node_y = [&](int j) { return box.lo[1] + j * hy; };
  auto val = [&](int i, int j) { return v[static_cast<std::size_t>(j) * res + i]; };

  // Edge ids: horizontal (i,j)-(i+1,j) even, vertical (i,j)-(i,j+1) odd.
  auto h_edge = [&](int i, int j) { return 2 * (static_cast<std::int64_t>(j) * res + i); };
  auto v_edge = [&](int i, int j) { return 2 * (static_cast<std::int64_t>(j) * res + i) + 1; };

  std::map<std::int64_t, std::array<double, 2>> edge_point;
  auto crossing = [&](std::int64_t edge) {
    auto it = edge_point.find(edge);
    if (it != edge_point.end()) return;
    const bool horizontal = edge % 2 == 0;
    const std::int64_t node = edge / 2;
    const int i = static_cast<int>(node % res);
    const int j = static_cast<int>(node / res);
    const double va = val(i, j);
    const double vb = horizontal ? val(i + 1, j) : val(i, j + 1);
    double t = vb == va ? 0.5 : (gamma - va) / (vb - va);
    t = std::min(1.0, std::max(0.0, t));
    std::array<double, 2> p{node_x(i), node_y(j)};
    (horizontal ? p[0] : p[1]) += t * (horizontal ? hx : hy);
    edge_point.emplace(edge, p);
  };

  std::vector<Segment> segs;
  std::map<std::int64_t, std::vector<std::size_t>> at_edge;
  auto add_seg = [&](std::int64_t a, std::int64_t b) {
    crossing(a);
    crossing(b);
    at_edge[a].push_back(segs.size());
    at_edge[b].push_back(segs.size());
    segs.push_back({a, b, false});
  };

  for (int j = 0; j + 1 < res; ++j) {
    for (int i = 0; i + 1 < res; ++i) {
      const bool in0 = val(i, j) <= gamma;          // bottom-left
      const bool in1 = val(i + 1, j) <= gamma;      // bottom-right
      const bool in2 = val(i + 1, j + 1) <= gamma;  // top-right
      const bool in3 = val(i, j + 1) <= gamma;      // top-left
      const int c = in0 | in1 << 1 | in2 << 2 | in3 << 3;
      if (c == 0 || c == 15) continue;
      const std::int64_t B = h_edge(i, j), T = h_edge(i, j + 1);
      const std::int64_t L = v_edge(i, j), R = v_edge(i + 1, j);
      switch (c) {
        case 1: case 14: add_seg(L, B); break;
        case 2: case 13: add_seg(B, R); break;
        case 3: case 12: add_seg(L, R); break;
        case 4: case 11: add_seg(R, T); break;
        case 6: case 9: add_seg(B, T); break;
        case 7: case 8: add_seg(T, L); break;
        case 5: case 10: {
          const double center =
              0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
          const bool diag = (center <= gamma) == (c == 5);
          if (diag) {
            add_seg(B, R);
            add_seg(T, L);
          } else {
            add_seg(L, B);
            add_seg(R, T);
          }
          break;
        }
      }
    }
  }

  // Chain segments through shared edges into maximal polylines.
  auto next_through = [&](std::int64_t edge) -> long {
    for (std::size_t k : at_edge[edge])
      if (!segs[k].used) return static_cast<long>(k);
    return -1;
  };

  std::vector<Polyline> lines;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (segs[s].used) continue;
    segs[s].used = true;
    std::vector<std::int64_t> chain{segs[s].e0, segs[s].e1};
    for (long k = next_through(chain.back()); k >= 0; k = next_through(chain.back())) {
      segs[k].used = true;
      chain.push_back(segs[k].e0 == chain.back() ? segs[k].e1 : segs[k].e0);
      if (chain.back() == chain.front()) break;
    }
    if (chain.back() != chain.front()) {
      std::vector<std::int64_t> head{chain.front()};
      for (long k = next_through(head.back()); k >= 0; k = next_through(head.back())) {
        segs[k].used = true;
        head.push_back(segs[k].e0 == head.back() ? segs[k].e1 : segs[k].e0);
      }
      chain.insert(chain.begin(), head.rbegin(), head.rend() - 1);
    }
    Polyline line;
    line.closed = chain.size() > 2 && chain.front() == chain.back();
    for (std::int64_t e : chain) line.points.push_back(edge_point.at(e));
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::array<double, 3>> straddling_cells(const Polynomial& V, double gamma,
                                                    const Box& box, int resolution) {
  box.validate();
  if (box.nvars() != 3) throw std::invalid_argument("straddling cells needs a 3-D box");
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  if (V.nvars() != 3) throw std::invalid_argument("polynomial dimension mismatch");

  const int res = resolution;
  const std::vector<double> v = node_values(V, box, res);
  auto val = [&](int i, int j, int k) {
    return v[(static_cast<std::size_t>(k) * res + j) * res + i];
  };
  auto node = [&](int d, int idx) {
    return box.lo[d] + static_cast<double>(idx) * (box.hi[d] - box.lo[d]) / (res - 1);
  };

  std::vector<std::array<double, 3>> pts;
  for (int k = 0; k + 1 < res; ++k)
    for (int j = 0; j + 1 < res; ++j)
      for (int i = 0; i + 1 < res; ++i) {
        bool lo = false, hi = false;
        for (int c = 0; c < 8; ++c) {
          const double w = val(i + (c & 1), j + (c >> 1 & 1), k + (c >> 2));
          (w <= gamma ? lo : hi) = true;
        }
        if (lo && hi)
          pts.push_back({0.5 * (node(0, i) + node(0, i + 1)), 0.5 * (node(1, j) + node(1, j + 1)),
                         0.5 * (node(2, k) + node(2, k + 1))});
      }
  return pts;
}

void write_polylines_csv(const std::string& path, const std::vector<Polyline>& lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "polyline,x1,x2\n";
  for (std::size_t k = 0; k < lines.size(); ++k)
    for (const auto& p : lines[k].points)
      out << k << "," << format_double(p[0]) << "," << format_double(p[1]) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_points_csv(const std::string& path, const std::vector<std::array<double, 3>>& pts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "x1,x2,x3\n";
  for (const auto& p : pts)
    out << format_double(p[0]) << "," << format_double(p[1]) << "," << format_double(p[2]) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace roa
