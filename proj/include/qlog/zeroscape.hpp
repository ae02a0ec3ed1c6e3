#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qlog/qnum.hpp"

namespace qlog {

enum class RootKind { RealAxis, ConjugatePairUpper, ConjugatePairLower };

// Zeros of f (target = Zero) or of f' (target = Turning).
enum class RootTarget { Zero, Turning };

struct ZeroRecord {
  int index = 0;  // 1-based, by modulus
  std::complex<double> location;
  RootKind kind = RootKind::RealAxis;
  double residual = 0.0;  // |f| (|f'| for turning points) at location
  double scale = 0.0;     // max |f| over location +- 1, +- i
  bool certified = false;  // winding number 1 on a small rectangle
  bool near_degenerate = false;
  FunctionSpec spec;
};

struct TurningPointRecord : ZeroRecord {
  std::complex<double> branch_value;  // f(location)
};

template <class Record>
struct RootList {
  std::vector<Record> roots;
  bool truncated = false;  // max_count reached or a step gave up
  bool complete = true;    // argument-principle count matched
  std::vector<std::string> notes;
};

using ZeroList = RootList<ZeroRecord>;
using TurningList = RootList<TurningPointRecord>;

// Real roots in [x_min, x_max] (origin zeros of Sin / integrals excluded),
// sorted by |x|.
ZeroList find_real_zeros(const FunctionSpec& spec, double x_min, double x_max, int max_count);
TurningList find_real_turning_points(const FunctionSpec& spec, double x_min, double x_max,
                                     int max_count);

// First `pairs` conjugate pairs by modulus. Without seeds the pairs are
// obtained by continuation in q from a small q where all roots are real.
ZeroList find_complex_zeros(const FunctionSpec& spec, int pairs,
                            const std::vector<std::complex<double>>& seeds = {});
TurningList find_complex_turning_points(const FunctionSpec& spec, int pairs,
                                        const std::vector<std::complex<double>>& seeds = {});

// First `count` roots by modulus, real and complex; completeness checked by
// the argument principle on a circle. For Cos/Sin only the half-plane
// Re z > 0 is reported (the zero set is symmetric under z -> -z).
ZeroList find_zeros(const FunctionSpec& spec, int count);
TurningList find_turning_points(const FunctionSpec& spec, int count);

struct CollisionEvent {
  double q = 0.0;
  double location = 0.0;
  int slot = 0;  // tracked slots slot and slot+1 merged
};

struct Trajectory {
  RootTarget target = RootTarget::Zero;
  std::vector<double> q;
  std::vector<std::vector<std::complex<double>>> roots;  // one row per q
  std::vector<std::vector<RootKind>> kinds;
  std::vector<CollisionEvent> events;
  bool truncated = false;
  std::string note;
};

// Predictor-corrector continuation of tracked roots (real roots sorted by
// modulus, complex ones as upper-half-plane representatives). Only
// increasing q is supported.
Trajectory continue_in_q(const FunctionSpec& spec, RootTarget target, double q_from, double q_to,
                         int steps, const std::vector<std::complex<double>>& tracked);

struct CollisionResult {
  bool found = false;
  double q_star = 0.0;
  double location = 0.0;
  RootTarget target = RootTarget::Zero;
  int pair = 1;
  double bracket_width = 0.0;
  std::string note;
};

CollisionResult collision_point(const FunctionSpec& spec, RootTarget target, int pair = 1);

// Certified argument-principle count of roots inside |z| < radius.
int count_roots_in_disk(const FunctionSpec& spec, RootTarget target, double radius);

// Winding number of the target around a rectangle; -1 when a root sits on the boundary.
int winding_number(const FunctionSpec& spec, RootTarget target, std::complex<double> center,
                   double half_width, double half_height);

enum class ContourField { ReZero, ImZero };

struct Window {
  double x_min, x_max, y_min, y_max;
};

struct ContourSet {
  ContourField field = ContourField::ImZero;
  FunctionSpec spec;
  Window window{};
  int grid_n = 0;
  double tolerance = 0.0;  // max |field| allowed at a vertex
  std::vector<std::vector<std::complex<double>>> polylines;
  std::vector<std::vector<std::complex<double>>> w_images;
};

ContourSet extract_contours(const FunctionSpec& spec, const Window& window, int grid_n,
                            ContourField field);

}  // namespace qlog
