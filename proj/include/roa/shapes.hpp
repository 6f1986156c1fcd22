#pragma once

// Ellipsoidal shape functions p(x) = (x - x*)' N (x - x*) and the geometry
// used to place their centers on a level set of a Lyapunov candidate.

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "roa/poly.hpp"

namespace roa {

struct ShapeFunction {
  Eigen::MatrixXd N;       // symmetric positive definite
  Eigen::VectorXd center;  // x*

  void validate() const;
  Polynomial to_polynomial() const;
  double evaluate(const Eigen::VectorXd& x) const;
};

class NoIntersection : public std::runtime_error {
 public:
  explicit NoIntersection(const std::string& what) : std::runtime_error(what) {}
};

// Unit direction from planar angle theta (radians).
Eigen::VectorXd direction_2d(double theta);
// Unit direction from azimuth psi and elevation theta (radians):
// (cos t cos p, cos t sin p, sin t).
Eigen::VectorXd direction_3d(double theta, double psi);

// First r > 0 with V(r u) = gamma along the ray through unit vector u.
// Marches outward in steps scaled to the quadratic-part guess, then bisects
// the bracket to |V(r u) - gamma| <= 1e-10 (at most 200 iterations).  Throws
// NoIntersection if the crossing lies outside the box [-1e3, 1e3]^n.
double ray_level_intersection(const Polynomial& V, double gamma, const Eigen::VectorXd& u);

// Center x* = sigma * r* * u, pulled inside the level set by sigma in (0,1).
Eigen::VectorXd shifting_center(const Polynomial& V, double gamma, const Eigen::VectorXd& u,
                                double sigma);

// The 14 (psi, theta) cuboid directions in degrees: 8 vertices of a cube
// followed by its 6 face centers.
struct AnglePair {
  double psi_deg;
  double theta_deg;
};
const std::vector<AnglePair>& cuboid_angles();

}  // namespace roa
