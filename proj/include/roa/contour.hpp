#pragma once

// Level-set geometry exports: marching-squares polylines of {V = gamma} in
// two dimensions and straddling-cell point clouds in three.  Output order is
// a pure function of the inputs.

#include <array>
#include <string>
#include <vector>

#include "roa/poly.hpp"
#include "roa/verify.hpp"

namespace roa {

struct Polyline {
  std::vector<std::array<double, 2>> points;
  bool closed = false;  // first and last point coincide
};

// Contour of {V = gamma} on a resolution x resolution node grid spanning the
// box.  Segments are chained into maximal polylines; saddle cells are split
// by the cell-center value.
std::vector<Polyline> marching_squares(const Polynomial& V, double gamma, const Box& box,
                                       int resolution);

// Centers of 3-D grid cells whose corner values straddle gamma.
std::vector<std::array<double, 3>> straddling_cells(const Polynomial& V, double gamma,
                                                    const Box& box, int resolution);

// CSV: "polyline,x1,x2" rows, polylines in discovery order.
void write_polylines_csv(const std::string& path, const std::vector<Polyline>& lines);
// CSV: "x1,x2,x3" rows.
void write_points_csv(const std::string& path, const std::vector<std::array<double, 3>>& pts);

}  // namespace roa
